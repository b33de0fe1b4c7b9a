//! Explicit descent of Artin-Schreier type extensions and of the completed
//! Garcia-Stichtenoth tower from `F_{q^2}` to `F_q`.

pub mod error;
pub mod ff;
pub mod linalg;
pub mod linpoly;
pub mod descent;
pub mod tower;
pub mod complexity;
pub mod fixtures;
pub mod selfcheck;
pub mod cli;

pub use error::{Error, Result};
pub use ff::{Field, FieldElement, Modulus};
