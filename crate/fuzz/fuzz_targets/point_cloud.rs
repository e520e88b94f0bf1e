#![no_main]

use eigenscape::io::parse_point_cloud;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for delim in [',', ';', '\t', ' '] {
        if let Ok(points) = parse_point_cloud(text, delim) {
            let dim = points[0].len();
            assert!(points.iter().all(|p| p.len() == dim && p.iter().all(|v| v.is_finite())));
        }
    }
});
