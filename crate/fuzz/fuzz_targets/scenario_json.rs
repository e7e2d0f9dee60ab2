#![no_main]

use libfuzzer_sys::fuzz_target;
use morse_levels::scenario::ScenarioConfig;

// Config parsing and coefficient validation must never panic.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ScenarioConfig::from_json(text) {
        let _ = cfg.coefficient_specs();
    }
});
