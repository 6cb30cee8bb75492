use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::specfun::{integrate_real, Domain, QuadratureSpec};
use crate::{Complex64, Error, Result};

/// `h(t) = P(t) [exp(-((t-T)/M)^2) + exp(-((t+T)/M)^2)]` with
/// `P(t) = c prod_{k=0}^{A} (t^2 + (2k+1)^2/4) / (T^2 + (2k+1)^2/4)`.
///
/// `c` is chosen so that `h >= 1` on `[T, T+M]`, and also on `it in [-1/4, 1/4]` when `T = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWeight {
    pub t: f64,
    pub m: f64,
    pub order: u32,
    pub c: f64,
}

impl SpectralWeight {
    pub fn new(t: f64, m: f64, order: u32) -> Result<Self> {
        if !(t >= 0.0) || !(m > 0.0) || !t.is_finite() || !m.is_finite() {
            return Err(Error::InvalidArgument(format!("weight needs T >= 0 and M > 0, got T = {t}, M = {m}")));
        }
        if t > 0.0 && m > t {
            return Err(Error::InvalidArgument(format!("weight needs M <= T when T > 0, got T = {t}, M = {m}")));
        }
        if order > 20 {
            return Err(Error::InvalidArgument(format!("order A = {order} above 20")));
        }
        let mut w = SpectralWeight { t, m, order, c: 1.0 };
        let mut lowest = f64::INFINITY;
        for j in 0..=400 {
            let r = t + m * j as f64 / 400.0;
            lowest = lowest.min(w.eval(Complex64::new(r, 0.0)).re);
        }
        if t == 0.0 {
            for j in 0..=100 {
                let s = 0.25 * j as f64 / 100.0;
                lowest = lowest.min(w.eval(Complex64::new(0.0, s)).re);
            }
        }
        w.c = 1.0 / lowest;
        Ok(w)
    }

    pub fn poly(&self, z: Complex64) -> Complex64 {
        let t2 = self.t * self.t;
        let z2 = z * z;
        let mut acc = Complex64::new(self.c, 0.0);
        for k in 0..=self.order {
            let q = (2.0 * k as f64 + 1.0).powi(2) / 4.0;
            acc *= (z2 + q) / (t2 + q);
        }
        acc
    }

    /// `exp(-((z - delta T)/M)^2)`.
    pub fn bump(&self, z: Complex64, delta: f64) -> Complex64 {
        let u = (z - delta * self.t) / self.m;
        (-u * u).exp()
    }

    /// `h(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.poly(z) * (self.bump(z, 1.0) + self.bump(z, -1.0))
    }

    /// Where `h` is below `e^{-60}` of its peak on the real line.
    pub fn support(&self) -> f64 {
        self.t + 9.0 * self.m + 2.0
    }
}

pub fn h_eval(w: &SpectralWeight, t: Complex64) -> Complex64 {
    w.eval(t)
}

/// `H_0 = pi^{-2} int r h(r) tanh(pi r) dr`.
pub fn h0(w: &SpectralWeight) -> Result<f64> {
    let f = |r: f64| r * w.eval(Complex64::new(r, 0.0)).re * (PI * r).tanh();
    let (v, _) = integrate_real(f, Domain::Finite(0.0, w.support()), &QuadratureSpec::tol(0.0, 1e-12))?;
    Ok(2.0 * v / (PI * PI))
}
