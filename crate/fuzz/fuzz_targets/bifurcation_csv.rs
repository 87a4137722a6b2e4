#![no_main]

use libfuzzer_sys::fuzz_target;
use unlk::report::parse_bifurcation_csv;

fuzz_target!(|data: &[u8]| {
    let _ = parse_bifurcation_csv(data);
});
