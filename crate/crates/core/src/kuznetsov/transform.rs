use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::cheb::{Cheb, PiecewiseCheb};
use super::weight::SpectralWeight;
use crate::specfun::{bessel_j_series, integrate, Domain, QuadratureSpec};
use crate::{Complex64, Error, Result};

/// Above this `y` the power series for `J` loses too many digits and the
/// cosh-kernel representation is used instead.
pub const H_SERIES_MAX_Y: f64 = 8.0;

fn kernel(w: &SpectralWeight, r: Complex64) -> Complex64 {
    r * w.eval(r) / (r * PI).cosh()
}

fn contour_integrand(w: &SpectralWeight, y: f64, sigma: f64, x: f64) -> f64 {
    let (j, _) = bessel_j_series(Complex64::new(2.0 * sigma, 2.0 * x), y);
    (j * kernel(w, Complex64::new(x, -sigma))).im
}

fn contour_end(w: &SpectralWeight) -> f64 {
    w.t + w.m * (9.0 + (w.order as f64 + 1.0).sqrt()) + 2.0
}

/// `H(y) = (2i/pi) int J_{2ir}(y) r h(r) / cosh(pi r) dr`, evaluated on the shifted
/// line `Im r = -sigma` with the integer `sigma <= A + 1` that minimises cancellation.
/// Delegates to [`h_transform_alt`] above [`H_SERIES_MAX_Y`].
pub fn h_transform(w: &SpectralWeight, y: f64) -> Result<f64> {
    if !(y > 0.0) || y > 100.0 {
        return Err(Error::InvalidArgument(format!("H(y) needs 0 < y <= 100, got {y}")));
    }
    if y > H_SERIES_MAX_Y {
        return HAlt::new(w)?.eval(y);
    }
    h_transform_contour(w, y)
}

/// The contour evaluation without the large-`y` hand-off.
pub fn h_transform_contour(w: &SpectralWeight, y: f64) -> Result<f64> {
    let end = contour_end(w);
    let mut best = (f64::INFINITY, 0.0);
    for s in 0..=w.order + 1 {
        let sigma = s as f64;
        let peak = (0..=64)
            .map(|k| contour_integrand(w, y, sigma, end * k as f64 / 64.0).abs())
            .fold(0.0, f64::max);
        if peak < best.0 {
            best = (peak, sigma);
        }
    }
    let (peak, sigma) = best;
    let spec = QuadratureSpec::tol(1e-16 * peak * end, 1e-12);
    let q = integrate(|x| Complex64::new(contour_integrand(w, y, sigma, x), 0.0), Domain::Finite(0.0, end), &spec)?;
    Ok(-4.0 / PI * q.value.re)
}

/// The slowly varying factor of `U_delta(v) = e^{2 i delta T v} U~_delta(v)`, where
/// `U(v) = (2/pi^2) int r tanh(pi r) h(r) e^{2irv} dr = sum_delta U_delta(v)`.
#[derive(Debug, Clone)]
struct SlowFactor {
    w: SpectralWeight,
    nodes: Vec<(f64, Complex64)>,
}

impl SlowFactor {
    /// Trapezoid nodes in `rho = (r - delta T)/M`, fine enough for `|Re v| <= s_max`
    /// and `0 <= Im v <= theta`.
    fn new(w: &SpectralWeight, delta: f64, s_max: f64, theta: f64) -> Self {
        let d = (0.9 * (w.order as f64 + 1.5) / w.m).min(3.0);
        let step = 2.0 * PI * d / (45.0 + d * d + 2.0 * w.m * d * s_max);
        let reach = 10.0 + (w.order as f64 + 1.0).sqrt();
        let (lo, hi) = (-reach - 2.0 * w.m * theta, reach);
        let n = ((hi - lo) / step).ceil() as i64;
        let nodes = (0..=n)
            .map(|k| {
                let rho = lo + k as f64 * step;
                let r = delta * w.t + w.m * rho;
                let g = r * (PI * r).tanh() * w.poly(Complex64::new(r, 0.0)).re * (-rho * rho).exp();
                (rho, Complex64::new(g * 2.0 * w.m * step / (PI * PI), 0.0))
            })
            .collect();
        SlowFactor { w: *w, nodes }
    }

    fn eval(&self, v: Complex64) -> Complex64 {
        let f = Complex64::new(0.0, 2.0 * self.w.m) * v;
        self.nodes.iter().map(|&(rho, g)| g * (f * rho).exp()).sum()
    }
}

/// Precomputed data for the cosh-kernel representation
/// `H(y) = int cos(y cosh v) U(v) dv`, integrated along `0 -> i theta -> i theta + s_max`.
/// The height `theta` shrinks with `y` to keep the vertical leg from oscillating.
#[derive(Debug, Clone)]
pub struct HAlt {
    w: SpectralWeight,
    s_max: f64,
    /// `U~_delta(i tau)` for `tau in [0, theta_0]`, delta = +, -
    vertical: [Cheb; 2],
    /// `(theta_j, U~_delta(s + i theta_j))` with `theta_j = theta_0 / 2^j`
    horizontal: Vec<(f64, [PiecewiseCheb; 2])>,
    scale: f64,
}

const DELTAS: [f64; 2] = [1.0, -1.0];
const HEIGHTS: usize = 10;

enum Leg {
    Vertical,
    Horizontal(usize),
}

impl HAlt {
    pub fn new(w: &SpectralWeight) -> Result<Self> {
        let theta0 = (1.0 / (w.t + 1.0)).min(0.5);
        let s_max = 14.0;
        let width = (1.0 / w.m).min(0.5);
        let panels = (s_max / width).ceil() as usize;
        let edges: Vec<f64> = (0..=panels).map(|k| s_max * k as f64 / panels as f64).collect();
        let factors: Vec<SlowFactor> = DELTAS.iter().map(|&d| SlowFactor::new(w, d, s_max, theta0)).collect();
        let vertical = [0, 1].map(|k| Cheb::build(0.0, theta0, 24, |tau| factors[k].eval(Complex64::new(0.0, tau))));
        let mut horizontal = Vec::with_capacity(HEIGHTS);
        for j in 0..HEIGHTS {
            let th = theta0 / (1u32 << j) as f64;
            let mut pair = Vec::with_capacity(2);
            for f in &factors {
                pair.push(PiecewiseCheb::try_build::<Error, _>(edges.clone(), 24, |s| Ok(f.eval(Complex64::new(s, th))))?);
            }
            let b = pair.pop().expect("two");
            let a = pair.pop().expect("two");
            horizontal.push((th, [a, b]));
        }
        let mut alt = HAlt { w: *w, s_max, vertical, horizontal, scale: 1.0 };
        alt.scale = (0..=20)
            .map(|k| alt.u_path(Complex64::new(0.0, theta0 * k as f64 / 20.0), &Leg::Vertical).norm())
            .fold(0.0, f64::max);
        Ok(alt)
    }

    /// `U(v)` on one leg of the integration path.
    fn u_path(&self, v: Complex64, leg: &Leg) -> Complex64 {
        let mut acc = Complex64::default();
        for (k, delta) in DELTAS.iter().enumerate() {
            let slow = match leg {
                Leg::Vertical => self.vertical[k].eval(v.im),
                Leg::Horizontal(j) => self.horizontal[*j].1[k].eval(v.re).unwrap_or_default(),
            };
            acc += (Complex64::new(0.0, 2.0 * delta * self.w.t) * v).exp() * slow;
        }
        acc
    }

    /// `U(v)` for real `0 <= v <= 14` (exact trapezoid evaluation, no interpolation).
    pub fn u_real(&self, v: f64) -> f64 {
        DELTAS
            .iter()
            .map(|&delta| {
                let f = SlowFactor::new(&self.w, delta, self.s_max, 0.0);
                ((Complex64::new(0.0, 2.0 * delta * self.w.t * v)).exp() * f.eval(Complex64::new(v, 0.0))).re
            })
            .sum()
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        let j = self
            .horizontal
            .iter()
            .position(|(th, _)| y * (1.0 - th.cos()) <= 20.0)
            .unwrap_or(HEIGHTS - 1);
        let th = self.horizontal[j].0;
        let spec = QuadratureSpec::tol(1e-15 * self.scale, 1e-11);
        let vert = integrate(
            |tau| Complex64::new(0.0, y * tau.cos()).exp() * self.u_path(Complex64::new(0.0, tau), &Leg::Vertical),
            Domain::Finite(0.0, th),
            &spec,
        )?;
        let s_end = self.s_max.min((45.0 / (y * th.sin())).asinh());
        let leg = Leg::Horizontal(j);
        let horiz = integrate(
            |s| {
                let v = Complex64::new(s, th);
                (Complex64::new(0.0, y) * v.cosh()).exp() * self.u_path(v, &leg)
            },
            Domain::Finite(0.0, s_end),
            &spec,
        )?;
        Ok(2.0 * (Complex64::new(0.0, 1.0) * vert.value + horiz.value).re)
    }
}

/// `H(y)` through the cosh-kernel representation with numerically built `u_+-`.
pub fn h_transform_alt(w: &SpectralWeight, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::InvalidArgument(format!("H(y) needs y > 0, got {y}")));
    }
    HAlt::new(w)?.eval(y)
}

/// The functions `u_+(v), u_-(v)` with
/// `H(y) = (T+1) sum_delta int e(delta T v/M) cos(y cosh(pi v/M)) u_delta(v) dv`.
/// For real `v` they are complex conjugates of each other.
pub fn u_pm(w: &SpectralWeight, v: f64) -> (Complex64, Complex64) {
    let vp = PI * v / w.m;
    let s_max = vp.abs().max(1.0);
    let scale = PI / (w.m * (w.t + 1.0));
    let f = |delta| SlowFactor::new(w, delta, s_max, 0.0).eval(Complex64::new(vp, 0.0)) * scale;
    (f(1.0), f(-1.0))
}

/// Piecewise Chebyshev table of `H` on `[y_lo, y_hi]`, built once per weight.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HTable {
    pub weight: SpectralWeight,
    table: PiecewiseCheb,
}

const TABLE_DEGREE: usize = 20;

impl HTable {
    pub fn new(w: &SpectralWeight, y_lo: f64, y_hi: f64) -> Result<Self> {
        if !(y_lo > 0.0 && y_hi > y_lo) {
            return Err(Error::InvalidArgument(format!("bad table range [{y_lo}, {y_hi}]")));
        }
        let alt = if y_hi > H_SERIES_MAX_Y { Some(HAlt::new(w)?) } else { None };
        // unit panels, split at the hand-off point so each panel uses one method
        let mut edges = vec![y_lo];
        let mut y = y_lo.floor() + 1.0;
        while y < y_hi {
            if y - y_lo > 1e-3 {
                edges.push(y);
            }
            y += 1.0;
        }
        edges.push(y_hi);
        let table = PiecewiseCheb::try_build(edges, TABLE_DEGREE, |y| {
            let v = match &alt {
                Some(a) if y > H_SERIES_MAX_Y => a.eval(y)?,
                _ => h_transform_contour(w, y)?,
            };
            Ok::<_, Error>(Complex64::new(v, 0.0))
        })?;
        Ok(HTable { weight: *w, table })
    }

    pub fn range(&self) -> (f64, f64) {
        self.table.range()
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        self.table
            .eval(y)
            .map(|v| v.re)
            .ok_or_else(|| Error::InvalidArgument(format!("y = {y} outside the H table {:?}", self.range())))
    }
}
