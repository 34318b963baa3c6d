#![no_main]

use bdk2::fields::Field;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = Field::parse(s) {
        assert_eq!(Field::parse(&f.to_string()).ok(), Some(f));
    }
});
