#![no_main]

use eigenscape::io::{parse_key_values, parse_table};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_table(text) {
        assert!(t.rows.iter().all(|r| r.len() == t.columns.len()));
    }
    let _ = parse_key_values(text);
});
