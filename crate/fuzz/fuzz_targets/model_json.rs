#![no_main]

use libfuzzer_sys::fuzz_target;
use unlk::model::{parse_model, to_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = parse_model(data) {
        let once = to_json(&m);
        let back = parse_model(once.as_bytes()).expect("emitted documents parse");
        assert_eq!(to_json(&back), once);
    }
});
