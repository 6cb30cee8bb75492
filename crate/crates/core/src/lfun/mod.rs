//! L-functions: zeta and Dirichlet L-values, the one-piece approximate
//! functional equation, Maass coefficient data, theta series and the
//! Rankin-Selberg central values behind the Waldspurger ratio.

mod afe;
mod dirichlet;
mod maass;
mod rankin;

pub use afe::*;
pub use dirichlet::*;
pub use maass::*;
pub use rankin::*;
