//! Arbitrary bytes → SetPartition JSON decoder (canonical list of lists).

#![no_main]

use chaos_core::SetPartition;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    if let Ok(pi) = serde_json::from_slice::<SetPartition>(data) {
        // canonical-form invariants
        let m = pi.ground_set_size();
        assert!(m >= 1);
        assert_eq!(pi.blocks().iter().map(Vec::len).sum::<usize>(), m);
        let _ = pi.is_refinement_of(&pi);
    }
});
