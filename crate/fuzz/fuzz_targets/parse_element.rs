#![no_main]

use bdk2::fields::Field;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    for field in [Field::Rational, Field::Function { p: 5 }, Field::Function { p: 2 }] {
        if let Ok(x) = field.parse_element(s) {
            let again = field.parse_element(&x.to_string()).expect("printed elements parse");
            assert_eq!(x, again);
        }
    }
});
