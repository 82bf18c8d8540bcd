#![no_main]

use kbsc_core::format::{parse_model, serialize_model};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(problem) = parse_model(text) else { return };
    // accepted models must survive a round trip unchanged
    let once = serialize_model(&problem);
    let again = parse_model(&once).expect("serialized model parses");
    assert_eq!(again, problem);
    assert_eq!(serialize_model(&again), once);
});
