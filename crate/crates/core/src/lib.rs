//! Symbolic engine for the strongly homotopy commutative structure on free
//! extended homotopy Gerstenhaber algebras.

pub mod error;
pub mod bar;
pub mod diff;
pub mod gens;
pub mod ks;
pub mod family;
pub mod lin;
pub mod maps;
pub mod normal;
pub mod poly;
pub mod pre;
pub mod verify;
pub mod sign;
pub mod text;
pub mod word;

pub use error::HgaError;
pub use gens::{GenId, Letter};
pub use lin::{Expr, Lin, Term, Tup};
pub use sign::{Affine, SignId, SignPoly};
pub use word::{Atom, Factor, WordId};
