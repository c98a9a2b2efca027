//! Arbitrary bytes → KernelSpec JSON decoder. Accepted kernels must be
//! conjugate-symmetric with a finite l¹ mass.

#![no_main]

use chaos_core::KernelSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 20 {
        return;
    }
    if let Ok(kernel) = serde_json::from_slice::<KernelSpec>(data) {
        assert!(kernel.l1_mass().is_finite());
        let x = vec![0.3; kernel.dim()];
        let y = vec![0.8; kernel.dim()];
        let _ = kernel.eval(&x, &y);
    }
});
