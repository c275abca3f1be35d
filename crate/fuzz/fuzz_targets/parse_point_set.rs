#![no_main]

use bargmann_retrieval::io::{parse_point_set, point_set_to_csv};
use libfuzzer_sys::fuzz_target;

// Accepted input re-serializes to an equal value.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(value) = parse_point_set(text) {
        let again = parse_point_set(&point_set_to_csv(&value)).expect("serialized form parses");
        assert_eq!(again, value);
    }
});
