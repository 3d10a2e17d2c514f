#![no_main]

use caloron_core::field_io::{from_json, to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(field) = from_json(text) {
        let again = from_json(&to_json(&field).expect("decoded fields encode")).expect("re-decode");
        assert_eq!(again, field);
    }
});
