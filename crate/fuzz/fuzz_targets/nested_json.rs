#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(v) = serde_json::from_slice(data) {
        let _ = fauto::fset::ElementaryNested::from_json(&v);
    }
});
