#![no_main]

use eigenscape::graphs::kernel_from_edges;
use eigenscape::io::parse_edge_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(list) = parse_edge_list(text) {
        assert!(list.edges.iter().all(|&(i, j, w)| i < list.vertices && j < list.vertices && w >= 0.0));
        // keep the dense kernel small
        if list.vertices <= 64 {
            let _ = kernel_from_edges(list.vertices, &list.edges);
        }
    }
});
