#![no_main]

use bargmann_retrieval::io::{parse_zero_multiset, zero_multiset_to_json};
use libfuzzer_sys::fuzz_target;

// Accepted input re-serializes to an equal value.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(value) = parse_zero_multiset(text) {
        let again = parse_zero_multiset(&zero_multiset_to_json(&value).to_string()).expect("serialized form parses");
        assert_eq!(again, value);
    }
});
