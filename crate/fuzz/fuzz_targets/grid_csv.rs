#![no_main]

use libfuzzer_sys::fuzz_target;
use unlk::ingest::parse_grid_csv;

fuzz_target!(|data: &[u8]| {
    let _ = parse_grid_csv(data);
});
