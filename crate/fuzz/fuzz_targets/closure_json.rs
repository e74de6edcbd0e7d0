#![no_main]

use std::sync::{Arc, OnceLock};

use fauto::sml::{Field, PerfectClosureElem};
use libfuzzer_sys::fuzz_target;

static F4: OnceLock<Arc<Field>> = OnceLock::new();

fuzz_target!(|data: &[u8]| {
    let field = F4.get_or_init(|| Arc::new(Field::new(2, 2).unwrap()));
    if let Ok(v) = serde_json::from_slice(data) {
        let _ = PerfectClosureElem::from_json(field, &v);
    }
});
