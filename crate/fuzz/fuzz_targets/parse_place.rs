#![no_main]

use bdk2::fields::Field;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    for field in [Field::Rational, Field::Function { p: 5 }, Field::Function { p: 3 }] {
        if let Ok(place) = field.parse_place(s) {
            assert_eq!(field.parse_place(&place.to_string()).ok(), Some(place));
        }
    }
});
