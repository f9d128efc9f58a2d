//! The explicit structure maps.

pub mod phi;
pub mod ha;
pub mod sign_lemma;
pub mod hc;
pub mod cup;
pub mod bar_cochains;
