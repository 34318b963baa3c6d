#![no_main]

use bdk2::schema::{from_json, TripleJson};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = from_json::<TripleJson>(s) {
        if doc.root_datum.rank > 4 || doc.d.terms.len() > 6 || doc.phi.terms.len() > 6 {
            return;
        }
        if let Ok(t) = doc.build() {
            let _ = TripleJson::from_triple(&t);
        }
    }
});
