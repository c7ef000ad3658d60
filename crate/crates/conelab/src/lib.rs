//! Invariant-cone analysis for weakly coupled elliptic systems
//! Delta u + sum_i B^(i) D_i u + C u >= 0: exact algebra checks, cone
//! synthesis, closed-form counterexample families, finite-difference
//! sign-propagation certificates, and the scalar Bellman reduction.

pub mod bellman;
pub mod closed_forms;
pub mod cone_synthesis;
pub mod fd_lab;
pub mod matrix_algebra;
pub mod report;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
