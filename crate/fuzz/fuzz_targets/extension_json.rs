#![no_main]

use bdk2::lattice::Lattice;
use bdk2::schema::{from_json, ExtensionJson};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = from_json::<ExtensionJson>(s) {
        if doc.rank > 6 || doc.terms.len() > 8 {
            return;
        }
        if let Ok(e) = doc.build(&Lattice::new(doc.rank, "Y")) {
            let _ = e.simplify();
            let _ = e.split();
        }
    }
});
