//! Growth and cogrowth of subgroups of free groups and of right ideals in
//! free algebras.

pub mod coset;
pub mod essential;
pub mod error;
pub mod growth;
pub mod ideal;
pub mod intersection;
pub mod source;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
pub use growth::{CgFunction, Family, GrowthTable};
pub use words::{Alphabet, Letter, Word};
