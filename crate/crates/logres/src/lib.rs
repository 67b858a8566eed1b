//! Exact computation of logarithmic Fitting ideals of a resolution-style
//! morphism, their behaviour under blowups, and the combinatorial
//! certificates (Hsiang-Pati coordinates) that witness monomial structure.

pub mod algebra;
pub mod charts;
pub mod error;
pub mod ideal;
pub mod hp;
pub mod invariants;
pub mod logfit;
pub mod pipeline;
pub mod prepared;
pub mod scenario;

pub use error::{Error, Result, Verdict};
