//! Radial k-Hessian solver and classifier.
//!
//! This crate constructs entire radial solutions of weighted k-Hessian
//! equations
//!
//! ```text
//! S_k^(1/k)(λ(D²u)) = p(|x|) · h(u)      on ℝ^N
//! ```
//!
//! and of the corresponding two-component systems, via a monotone
//! successive-approximation scheme for the equivalent radial integral
//! equation. Alongside the solver it provides:
//!
//! * [`expr`] — a small expression language for weights `p(t)` and
//!   nonlinearities `h(u)`, `f(u, v)`;
//! * [`quad`] — deterministic adaptive quadrature and an improper-integral
//!   convergence classifier;
//! * [`radial`] — elementary symmetric polynomials on radial Hessian
//!   spectra, Γ_k cone membership, and the radial k-Hessian operator;
//! * [`picard`] — the iteration engine, solve drivers, a comparison check,
//!   and an a-priori growth bound on iterates;
//! * [`conditions`] — numerical verdicts for the structural conditions
//!   (weight monotonicity and decay, nonlinearity shape, Keller–Osserman
//!   integrals, largeness integrals, dimension gate);
//! * [`classify`] — combination of condition verdicts into applicability
//!   decisions for the four existence/largeness results;
//! * [`cli`] — config parsing and report/profile writers behind the
//!   `khessian` binary.
//!
//! Everything is deterministic: no randomness, no time dependence, no
//! environment-dependent iteration order. Identical inputs produce
//! bit-identical outputs.

// Guards are written `!(x > 0.0)` rather than `x <= 0.0` on purpose: the
// negated form also trips on NaN, so every such check rejects undefined
// values instead of letting them through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cli;
pub mod conditions;
mod error;
pub mod expr;
pub mod picard;
pub mod quad;
pub mod radial;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
