#![no_main]

use bdk2::schema::{from_json, RootDatumJson};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = from_json::<RootDatumJson>(s) {
        if doc.rank > 6 || doc.roots.len() > 24 {
            return;
        }
        if let Ok(rd) = doc.build() {
            let _ = bdk2::lattice::weyl_group(&rd);
        }
    }
});
