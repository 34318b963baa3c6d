#![no_main]

use bdk2::lattice::Lattice;
use bdk2::schema::{from_json, QuadraticFormJson};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = from_json::<QuadraticFormJson>(s) {
        if doc.rank > 16 {
            return;
        }
        if let Ok(q) = doc.build(&Lattice::new(doc.rank, "Y")) {
            assert_eq!(QuadraticFormJson::from_form(&q).build(q.lattice()).ok(), Some(q));
        }
    }
});
