#![no_main]

use casimir_core::sphere_plate::parse_experimental_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(points) = parse_experimental_csv(data) {
        assert!(!points.is_empty());
        assert!(points
            .iter()
            .all(|p| p.a > 0.0 && p.sigma >= 0.0 && p.fprime.is_finite()));
    }
});
