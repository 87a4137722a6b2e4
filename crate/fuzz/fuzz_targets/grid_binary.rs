#![no_main]

use libfuzzer_sys::fuzz_target;
use unlk::ingest::{contour_tree, parse_grid_binary};

fuzz_target!(|data: &[u8]| {
    if let Ok(g) = parse_grid_binary(data) {
        let _ = contour_tree(&g);
    }
});
