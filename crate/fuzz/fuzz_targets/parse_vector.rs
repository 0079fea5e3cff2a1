#![no_main]

use ggs::problems::{parse_vector, write_vector};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = parse_vector(text) {
        let mut out = Vec::new();
        write_vector(&v, &mut out).unwrap();
        let back = parse_vector(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(back.len(), v.len());
        for (a, b) in back.iter().zip(&v) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
});
