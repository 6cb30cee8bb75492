use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::specfun::{gamma_q, integrate, ln_gamma, log_gamma, Domain, QuadratureSpec};
use crate::{Complex64, Error, Result};

/// Parameters of the one-piece approximate functional equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfeParams {
    /// Degree `d` of the L-function.
    pub degree: u32,
    /// Analytic conductor `Q`.
    pub conductor: f64,
    /// Length parameter `X`.
    pub x: f64,
    /// Cutoff order `A`.
    pub order: u32,
}

impl AfeParams {
    /// `X = Q^{1.2}`, `A = 8`.
    pub fn standard(degree: u32, conductor: f64) -> Self {
        AfeParams { degree, conductor, x: conductor.powf(1.2), order: 8 }
    }

    fn k(&self) -> f64 {
        2.0 * self.degree as f64
    }

    fn shape(&self) -> f64 {
        self.k() * (self.order as f64 + 1.0)
    }
}

fn check_kernel_args(x: f64, d: u32, a: u32) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("kernel argument x = {x} must be positive")));
    }
    if d == 0 || a == 0 || a > 20 {
        return Err(Error::InvalidArgument(format!("kernel needs d >= 1 and 1 <= A <= 20, got d = {d}, A = {a}")));
    }
    Ok(())
}

/// `V(x) = (1/2 pi i) int_(c) Gamma(2d(s+A+1))/Gamma(2d(A+1)) x^{-s} ds/s`,
/// by quadrature on a vertical line.
///
/// The line sits near the saddle of the integrand for large `x` and close
/// enough to the imaginary axis otherwise that the integrand never exceeds
/// the result by more than a factor `e`.
pub fn afe_kernel(x: f64, d: u32, a: u32) -> Result<f64> {
    check_kernel_args(x, d, a)?;
    let k = 2.0 * d as f64;
    let af = a as f64 + 1.0;
    let lx = x.ln();
    // |Gamma(k(c+A+1))/Gamma(k(A+1)) x^{-c}| is about exp(c (k ln(k(A+1)) - ln x))
    let growth = k * (k * af).ln() - lx;
    let c = (1.0 / growth.abs().max(1.0)).max(x.powf(1.0 / k) / k - af);
    let norm = ln_gamma(k * af);
    let f = |v: f64| {
        let s = Complex64::new(c, v);
        let lg = log_gamma(s.scale(k) + k * af).unwrap_or_default() - norm - s * lx;
        lg.exp() / s / PI
    };
    let q = integrate(f, Domain::From(0.0), &QuadratureSpec::tol(1e-15, 1e-12))?;
    Ok(q.value.re)
}

/// Closed form of the same kernel: `V(x) = Q(2d(A+1), x^{1/(2d)})`.
pub fn afe_kernel_closed(x: f64, d: u32, a: u32) -> Result<f64> {
    check_kernel_args(x, d, a)?;
    let k = 2.0 * d as f64;
    gamma_q(k * (a as f64 + 1.0), x.powf(1.0 / k))
}

/// Smallest `y` with `Q(shape, y) < eps`.
fn kernel_cutoff(shape: f64, eps: f64) -> Result<f64> {
    let mut y = shape.max(1.0);
    while gamma_q(shape, y)? >= eps {
        y *= 1.25;
    }
    Ok(y)
}

/// Number of Dirichlet coefficients the smoothed sum needs.
pub fn afe_length(p: &AfeParams) -> Result<usize> {
    if p.degree == 0 || p.order == 0 || p.order > 20 {
        return Err(Error::InvalidArgument(format!("degree {} / order {} out of range", p.degree, p.order)));
    }
    if !(p.conductor >= 1.0) || !(p.x >= p.conductor) {
        return Err(Error::InvalidArgument(format!(
            "need Q >= 1 and X >= Q, got Q = {}, X = {}",
            p.conductor, p.x
        )));
    }
    let y = kernel_cutoff(p.shape(), 1e-13)?;
    let n = p.x * y.powf(p.k());
    if n > 5e8 {
        return Err(Error::TooLarge(format!("approximate functional equation needs {n:.3e} coefficients")));
    }
    Ok(n.ceil() as usize)
}

/// `sum_n lambda(n) n^{-1/2} V(n/X)`, with `coeffs[0] = lambda(1)`.
pub fn afe_value(coeffs: &[f64], p: &AfeParams) -> Result<f64> {
    let need = afe_length(p)?;
    if coeffs.len() < need {
        return Err(Error::InsufficientCoefficients { have: coeffs.len(), need });
    }
    let shape = p.shape();
    let inv_k = 1.0 / p.k();
    let mut sum = 0.0;
    for (i, &c) in coeffs[..need].iter().enumerate() {
        if c != 0.0 {
            let n = (i + 1) as f64;
            sum += c / n.sqrt() * gamma_q(shape, (n / p.x).powf(inv_k))?;
        }
    }
    Ok(sum)
}

/// `zeta(1/2)` from the smoothed sum, after removing the contribution of the
/// pole at `s = 1`: `2 sqrt(X) Gamma(2d(A+3/2)) / Gamma(2d(A+1))`.
pub fn afe_zeta(p: &AfeParams) -> Result<f64> {
    let need = afe_length(p)?;
    let ones = vec![1.0; need];
    let raw = afe_value(&ones, p)?;
    let k = p.k();
    let a = p.order as f64;
    let pole = 2.0 * p.x.sqrt() * (ln_gamma(k * (a + 1.5)) - ln_gamma(k * (a + 1.0))).exp();
    Ok(raw - pole)
}

/// Archimedean factor `prod_j Gamma_R(s + mu_j)` and arithmetic conductor `N`
/// of a self-dual L-function with root number 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFactor {
    pub shifts: Vec<Complex64>,
    pub conductor: f64,
}

impl GammaFactor {
    /// `Gamma_C(s + it) Gamma_C(s - it) = 4 (2 pi)^{-2s} Gamma(s+it) Gamma(s-it)`,
    /// the factor of a Rankin-Selberg product with a weight one theta series.
    pub fn rankin_theta(t: f64, conductor: f64) -> Self {
        let it = Complex64::new(0.0, t);
        GammaFactor { shifts: vec![it, it + 1.0, -it, 1.0 - it], conductor }
    }

    /// `Gamma_R(s + 2it) Gamma_R(s) Gamma_R(s - 2it)`, symmetric square of a
    /// level one Maass form of either parity.
    pub fn sym2(t: f64) -> Self {
        let it = Complex64::new(0.0, 2.0 * t);
        GammaFactor { shifts: vec![it, Complex64::default(), -it], conductor: 1.0 }
    }

    pub fn degree(&self) -> usize {
        self.shifts.len()
    }

    /// `log prod_j Gamma_R(s + mu_j)`.
    pub fn log_eval(&self, s: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::default();
        for &mu in &self.shifts {
            let z = s + mu;
            acc += log_gamma(z * 0.5)? - z * 0.5 * PI.ln();
        }
        Ok(acc)
    }

    /// Kernel `W(x) = (1/2 pi i) int_(c) L_inf(s0 + u) / L_inf(norm) x^{-u} du/u`.
    pub fn kernel(&self, s0: f64, norm: f64) -> Result<MellinKernel> {
        MellinKernel::new(self, s0, norm)
    }

    fn length_for(w: &MellinKernel, root: f64, y: f64) -> Result<usize> {
        Ok((w.cutoff(1e-13)? * root * y.max(1.0 / y)).ceil() as usize)
    }

    /// Number of coefficients [`GammaFactor::central_value`] needs at scale `Y`.
    pub fn required_length(&self, y: f64) -> Result<usize> {
        Self::length_for(&self.kernel(0.5, 0.5)?, self.conductor.sqrt(), y)
    }

    /// Central value `L(1/2)` by the balanced approximate functional equation
    /// `sum_n a(n) n^{-1/2} (W(n / (Y sqrt N)) + W(n Y / sqrt N))`.
    ///
    /// `Y = 1` is the balanced choice; other `Y` give the same value, which is the
    /// stability check on the functional equation data.
    pub fn central_value(&self, coeffs: &[f64], y: f64) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::InvalidArgument(format!("scale Y = {y} must be positive")));
        }
        let w = self.kernel(0.5, 0.5)?;
        let root = self.conductor.sqrt();
        let need = Self::length_for(&w, root, y)?;
        if coeffs.len() < need {
            return Err(Error::InsufficientCoefficients { have: coeffs.len(), need });
        }
        let mut sum = 0.0;
        for (i, &c) in coeffs[..need].iter().enumerate() {
            if c != 0.0 {
                let n = (i + 1) as f64;
                sum += c / n.sqrt() * (w.eval(n / (y * root)) + w.eval(n * y / root));
            }
        }
        Ok(sum)
    }
}

/// Inverse Mellin transform tabulated on trapezoid nodes of a vertical line.
///
/// The integrand is analytic in a strip of half-width `c` around the line,
/// so the trapezoid rule with step `c/5` is accurate to roughly `x^c e^{-10 pi}`.
#[derive(Debug, Clone)]
pub struct MellinKernel {
    c: f64,
    nodes: Vec<(f64, Complex64)>,
}

impl MellinKernel {
    fn new(g: &GammaFactor, s0: f64, norm: f64) -> Result<Self> {
        let c = 1.0;
        let h = c / 5.0;
        let base = g.log_eval(Complex64::new(norm, 0.0))?;
        let weight = |v: f64| -> Result<Complex64> {
            let u = Complex64::new(c, v);
            Ok((g.log_eval(u + s0)? - base).exp() / u * (h / (2.0 * PI)))
        };
        let reach = g.shifts.iter().map(|m| m.im.abs()).fold(0.0, f64::max) + 5.0;
        let mut nodes = vec![(0.0, weight(0.0)?)];
        let peak = nodes[0].1.norm();
        for dir in [1.0, -1.0] {
            let mut peak_side = peak;
            for j in 1.. {
                let v = dir * j as f64 * h;
                let wv = weight(v)?;
                peak_side = peak_side.max(wv.norm());
                nodes.push((v, wv));
                if v.abs() > reach && wv.norm() < 1e-18 * peak_side {
                    break;
                }
                if j > 200_000 {
                    return Err(Error::NoConvergence(j));
                }
            }
        }
        Ok(MellinKernel { c, nodes })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let lx = x.ln();
        let mut acc = Complex64::default();
        for &(v, w) in &self.nodes {
            acc += w * Complex64::from_polar(1.0, -v * lx);
        }
        acc.re * (-self.c * lx).exp()
    }

    /// A point past which `|W| < eps` (checked on a doubling grid).
    pub fn cutoff(&self, eps: f64) -> Result<f64> {
        let mut x = 0.5;
        let mut small = 0;
        while small < 3 {
            x *= 1.25;
            if self.eval(x).abs() < eps {
                small += 1;
            } else {
                small = 0;
            }
            if x > 1e9 {
                return Err(Error::NoConvergence(0));
            }
        }
        Ok(x)
    }
}
