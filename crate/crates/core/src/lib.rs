//! Desk-scale computational toolkit around Heegner points of level `q`.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: Kronecker symbols, modular inverses and complete exponential
//!   sums (Kloosterman, Salié, quadratic Gauss).
//! - [`quadforms`]: positive definite binary quadratic forms, reduction,
//!   composition, class groups and their characters.
//! - [`heegner`]: Heegner points on `X_0(q)`, the Galois action, the Fricke
//!   involution, coset labels in `P^1(F_q)` and equidistribution counts.
//! - [`specfun`]: log-gamma, Bessel functions and adaptive quadrature.
//! - [`lfun`]: zeta and Dirichlet L-values, approximate functional equations,
//!   theta series, Maass form evaluation and the Waldspurger ratio.
//! - [`eisenstein`]: real-analytic Eisenstein series of level 1 and prime
//!   level and their Weyl sums over Heegner orbits.
//! - [`kuznetsov`]: spectral weights, the Bessel transforms of the Kuznetsov
//!   formula, the twisted sums `a(m; c, D)` and the Poisson decomposition.

pub mod arith;
pub mod eisenstein;
pub mod error;
pub mod heegner;
pub mod kuznetsov;
pub mod lfun;
pub mod quadforms;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
