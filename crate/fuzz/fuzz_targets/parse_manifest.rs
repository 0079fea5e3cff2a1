#![no_main]

use ggs::problems::parse_manifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(entries) = parse_manifest(text) {
            for e in entries {
                assert!(!e.label.is_empty());
            }
        }
    }
});
