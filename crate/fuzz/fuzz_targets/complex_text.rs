#![no_main]

use libfuzzer_sys::fuzz_target;
use morse_levels::chaincore::{parse_complex, write_complex};

// The parser must never panic on arbitrary text, and everything it accepts
// must round-trip exactly through the writer.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(complex) = parse_complex(text) {
        let written = write_complex(&complex).expect("parsed complexes serialize");
        let reparsed = parse_complex(&written).expect("canonical output parses");
        assert_eq!(reparsed, complex, "round trip changed the complex");
        // validation must not panic either, whatever the incidence data
        let _ = complex.validate();
    }
});
