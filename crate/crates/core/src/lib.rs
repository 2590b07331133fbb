//! Alternate Cantor real bases and the matrix theory behind them.
//!
//! The crate has three layers:
//!
//! * exact and extended-precision scalars ([`scalar`]);
//! * the combinatorial core: matrices with cyclically monotone rows
//!   ([`cyclic_matrix`]) and eventually periodic digit sequences with the
//!   Parry condition ([`digit_seq`]);
//! * the analytic core: alternate power series and their Jacobians
//!   ([`power_series`]), the Ψ-solver that recovers a base from a digit list
//!   ([`solver`]), and greedy/quasi-greedy expansions ([`numeration`]).
//!
//! File formats consumed by the CLI live in [`io`].

pub mod cyclic_matrix;
pub mod digit_seq;
pub mod io;
pub mod numeration;
pub mod power_series;
pub mod scalar;
pub mod solver;

pub use cyclic_matrix::{CirculantClass, CycMatrix, MonotoneClass};
pub use digit_seq::{EpDigits, ParryList, ValidationReport};
pub use numeration::{AdmissibilityVerdict, ExpansionPrefix, Reliability};
pub use power_series::{AltSeries, EvalResult, PsiMap};
pub use scalar::{Rational, Real};
pub use solver::{AltBase, SolveCertificate, SolverConfig};
