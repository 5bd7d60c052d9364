#![no_main]

use casimir_core::optical_data::parse_optical_table_str;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(t) = parse_optical_table_str(s) {
            // Accepted tables are sorted and physical.
            assert!(t.rows().windows(2).all(|w| w[0].energy < w[1].energy));
            assert!(t
                .rows()
                .iter()
                .all(|r| r.energy > 0.0 && r.n >= 0.0 && r.k >= 0.0));
        }
    }
});
