#![no_main]

use caloron_core::field_io::{from_bytes, to_bytes};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(field) = from_bytes(data) {
        assert_eq!(to_bytes(&field), data);
    }
});
