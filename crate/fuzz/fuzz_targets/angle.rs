#![no_main]

use casimir_cli::parse_angle;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(theta) = parse_angle(s) {
            assert!(theta.is_finite());
        }
    }
});
