//! Exact symbolic arithmetic: monomials, sparse rational polynomials,
//! truncated power series, expression parsing and rational linear algebra.

pub mod linalg;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod series;

pub use monomial::Monomial;
pub use parse::{parse_poly, print_poly};
pub use poly::{Order, Polynomial, Rat};
pub use series::TruncatedSeries;
