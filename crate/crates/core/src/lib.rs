//! Exact p-adic power series and the Frobenius-antecedent machinery for
//! MOM differential operators: Cartier operator, antecedent chains,
//! rational congruence certificates and a multiplicative dependence scan.

pub mod catalog;
pub mod coeff;
pub mod dependence;
pub mod diffops;
pub mod error;
pub mod frobenius;
mod linalg;
pub mod matrix;
pub mod rational;
pub mod reconstruct;
mod residue;
pub mod series;

pub use coeff::{Coefficient, Field, PadicContext, Ramification, Valuation};
pub use diffops::{uniform_part, DiffOp, OperatorJson, RawTerm};
pub use error::{Error, Result};
pub use matrix::SeriesMatrix;
pub use rational::RationalFunction;
pub use series::{SeriesJson, TruncSeries};
