//! Invariants of K₂-central extensions of split tori and split reductive
//! groups over `Q` and `F_p(t)`.

pub mod bd;
pub mod error;
pub mod extensions;
pub mod fields;
pub mod ktheory;
pub mod lattice;
pub mod presets;
pub mod residue_functors;
pub mod sample;
pub mod schema;
pub mod verify;

pub use error::{Error, Result};
