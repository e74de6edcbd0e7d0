#![no_main]

use fauto::json::spanning_from_json;
use fauto::Endomorphism;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(v) = serde_json::from_slice(data) {
        let f = Endomorphism::scalar(4, 1).unwrap();
        let _ = spanning_from_json(&v, &f);
    }
});
