#![no_main]

use caloron_core::cli::{plan, ConfigLayer};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(layer) = ConfigLayer::from_json(text) else { return };
    if let Ok(cfg) = layer.resolve() {
        // Planning only builds closures; nothing runs.
        let _ = plan(&cfg);
    }
});
