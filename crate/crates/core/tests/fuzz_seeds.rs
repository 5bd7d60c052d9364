//! Replays the checked-in fuzz corpus through the parsers on stable.

use std::fs;
use std::path::PathBuf;

use casimir_core::optical_data::parse_optical_table_str;
use casimir_core::sphere_plate::parse_experimental_csv;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn optical_table_seeds() {
    let mut accepted = Vec::new();
    for (name, bytes) in seeds("optical_table") {
        if let Ok(t) = parse_optical_table_str(&String::from_utf8_lossy(&bytes)) {
            assert!(
                t.rows().windows(2).all(|w| w[0].energy < w[1].energy),
                "{name}"
            );
            accepted.push(name);
        }
    }
    assert_eq!(accepted, ["basic.txt", "tabs_blank_lines.txt"]);
}

#[test]
fn experimental_csv_seeds() {
    let mut accepted = Vec::new();
    for (name, bytes) in seeds("experimental_csv") {
        if let Ok(p) = parse_experimental_csv(bytes.as_slice()) {
            assert!(p.iter().all(|x| x.a > 0.0 && x.sigma >= 0.0), "{name}");
            accepted.push(name);
        }
    }
    assert_eq!(accepted, ["comments_spaces.csv", "header.csv"]);
}
