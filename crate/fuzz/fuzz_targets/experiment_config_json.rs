//! Arbitrary bytes → strict experiment-config parser (the CLI's input
//! surface). Parsing and validation must never panic; valid configs must
//! re-serialize.

#![no_main]

use chaos_cli::config::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 20 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = parse_config(text) {
        let _ = serde_json::to_string(&config).unwrap();
    }
});
