//! The analytic side of the Kuznetsov formula: spectral weight, the Bessel
//! transforms `H_0` and `H(y)`, twisted exponential sums `a(m; c, D)`, the
//! oscillatory integrals `r(m; c, D)`, Poisson summation and the geometric side.

mod cheb;
mod geometric;
mod transform;
mod twisted;
mod weight;

pub use cheb::*;
pub use geometric::*;
pub use transform::*;
pub use twisted::*;
pub use weight::*;
