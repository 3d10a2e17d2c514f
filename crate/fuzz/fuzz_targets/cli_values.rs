#![no_main]

use caloron_core::cli::{parse_grid, parse_tol};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok([a, b, c]) = parse_grid(text) {
        assert_eq!(parse_grid(&format!("{a},{b},{c}")).unwrap(), [a, b, c]);
    }
    if let Ok((id, v)) = parse_tol(text) {
        assert!(v.is_finite() && v > 0.0 && !id.is_empty());
    }
});
