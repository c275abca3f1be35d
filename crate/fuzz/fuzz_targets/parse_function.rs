#![no_main]

use bargmann_retrieval::fock_core::eval_log_magnitude;
use bargmann_retrieval::io::parse_function;
use bargmann_retrieval::Complex64;
use libfuzzer_sys::fuzz_target;

// Accepted input round-trips through its tagged form and evaluates without
// panicking.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_function(text) {
        let again = parse_function(&serde_json::to_string(&f).unwrap()).expect("serialized form parses");
        assert_eq!(again, f);
        for z in [Complex64::new(0.0, 0.0), Complex64::new(1.5, -2.0), Complex64::new(-30.0, 25.0)] {
            let _ = f.eval(z);
            let _ = eval_log_magnitude(&f, z);
        }
    }
});
