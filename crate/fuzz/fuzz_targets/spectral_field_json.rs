//! Arbitrary bytes → SpectralField JSON decoder. Decoding must never
//! panic; accepted fields must satisfy the box and symmetry invariants, so
//! evaluation and norms must be safe to call.

#![no_main]

use chaos_core::SpectralField;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 20 {
        return;
    }
    if let Ok(field) = serde_json::from_slice::<SpectralField>(data) {
        let _ = field.norms();
        let point = vec![0.25; field.num_vars() * field.dim()];
        let _ = field.eval(&point);
        let text = serde_json::to_string(&field).unwrap();
        let back: SpectralField = serde_json::from_str(&text).unwrap();
        assert_eq!(back.num_nonzero(), field.num_nonzero());
    }
});
