#![no_main]

use libfuzzer_sys::fuzz_target;
use morse_levels::scenario::parse_rational;

// Exact-rational parsing: no panics, and accepted values survive a
// print/reparse cycle unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(value) = parse_rational(text) {
        let reparsed = parse_rational(&value.to_string()).expect("canonical form parses");
        assert_eq!(reparsed, value);
    }
});
