use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::transform::HTable;
use super::twisted::{a_sum_closed, abound};
use crate::arith::{is_fundamental_discriminant, kloosterman_row_fft, kronecker};
use crate::lfun::afe_kernel_closed;
use crate::specfun::{integrate, Domain, QuadratureSpec};
use crate::{Complex64, Error, Result};

/// `S(t) = f(t)/(f(t) + f(1-t))` with `f(t) = e^{-1/t}`: smooth, 0 below 0, 1 above 1.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let (a, b) = ((-1.0 / t).exp(), (-1.0 / (1.0 - t)).exp());
        a / (a + b)
    }
}

/// Smooth plateau bump supported on `[N, 2N]`, equal to 1 on `[N(1+edge), N(2-edge)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub n: f64,
    pub edge: f64,
}

impl Window {
    pub fn new(n: f64) -> Self {
        Window { n, edge: 0.25 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = x / self.n - 1.0;
        smooth_step(u / self.edge) * smooth_step((1.0 - u) / self.edge)
    }
}

/// `r(m; c, D) = int w(x) H(4 pi sqrt(x)/c) e(-m x/(c|D|)) dx`.
pub fn r_oscillatory(m: i64, c: u64, d: i64, w: &Window, table: &HTable) -> Result<Complex64> {
    let (lo, hi) = table.range();
    let (ya, yb) = (4.0 * PI * w.n.sqrt() / c as f64, 4.0 * PI * (2.0 * w.n).sqrt() / c as f64);
    if ya < lo * (1.0 - 1e-12) || yb > hi * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("H table {:?} does not cover [{ya}, {yb}]", (lo, hi))));
    }
    let freq = m as f64 / (c as f64 * d.abs() as f64);
    let wt = &table.weight;
    let spec = QuadratureSpec::tol(1e-15 * w.n * (wt.t + 1.0) * wt.m, 1e-12);
    let f = |x: f64| {
        let y = (4.0 * PI * x.sqrt() / c as f64).clamp(lo, hi);
        let h = table.eval(y).unwrap_or(0.0);
        Complex64::from_polar(w.eval(x) * h, -2.0 * PI * (freq * x).fract())
    };
    Ok(integrate(f, Domain::Finite(w.n, 2.0 * w.n), &spec)?.value)
}

/// Both sides of `S_c(N) = sum_m a(m; c, D) r(m; c, D) / (c|D|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
    /// `sum_n |terms|` of the left side; `|lhs| / mass` measures cancellation
    pub mass: f64,
    /// the m-sum ran over |m| <= m_max
    pub m_max: i64,
}

/// Largest |m| tried before the truncation is declared a failure.
pub const POISSON_M_BUDGET: i64 = 100_000;

pub fn poisson_check(c: u64, d: i64, w: &Window, table: &HTable) -> Result<PoissonCheck> {
    if d != 1 && !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let row = kloosterman_row_fft(c);
    let chi = |n: i64| if d == 1 { 1.0 } else { kronecker(d, n) as f64 };
    let (mut lhs, mut mass) = (0.0, 0.0);
    for n in (w.n.ceil() as i64)..=((2.0 * w.n).floor() as i64) {
        let y = 4.0 * PI * (n as f64).sqrt() / c as f64;
        let t = chi(n) * row[(n as u64 % c) as usize] * w.eval(n as f64) * table.eval(y)?;
        lhs += t;
        mass += t.abs();
    }
    let modulus = c as f64 * d.abs() as f64;
    let tol = 1e-10 * mass.max(1e-300);
    let mut rhs = a_sum_closed(0, c, d)?.value.re * r_oscillatory(0, c, d, w, table)?.re / modulus;
    let mut quiet = 0;
    let mut m = 0;
    while quiet < 8 {
        m += 1;
        if m > POISSON_M_BUDGET {
            return Err(Error::TooLarge(format!("Poisson m-sum not converged by |m| = {POISSON_M_BUDGET}")));
        }
        let r = r_oscillatory(m, c, d, w, table)?;
        // r(-m) is the conjugate of r(m)
        let pair = a_sum_closed(m, c, d)?.value * r + a_sum_closed(-m, c, d)?.value * r.conj();
        rhs += pair.re / modulus;
        if r.norm() * 2.0 * abound(m, c, d) / modulus < tol {
            quiet += 1;
        } else {
            quiet = 0;
        }
    }
    let rel_error = (lhs - rhs).abs() / lhs.abs().max(1e-300);
    Ok(PoissonCheck { lhs, rhs, rel_error, mass, m_max: m })
}

/// `H` resampled on a uniform grid with 4-point Lagrange interpolation, for the
/// hot loop of [`geometric_side`].
#[derive(Debug, Clone)]
pub struct HGrid {
    y0: f64,
    step: f64,
    values: Vec<f64>,
}

impl HGrid {
    pub fn new(table: &HTable, y_lo: f64, y_hi: f64, step: f64) -> Result<Self> {
        let y0 = y_lo - step;
        let count = ((y_hi - y0) / step).ceil() as usize + 3;
        let (lo, hi) = table.range();
        let values = (0..count)
            .map(|k| table.eval((y0 + k as f64 * step).clamp(lo, hi)))
            .collect::<Result<Vec<_>>>()?;
        if y_lo < lo || y_hi > hi {
            return Err(Error::InvalidArgument(format!("H table {:?} does not cover [{y_lo}, {y_hi}]", (lo, hi))));
        }
        Ok(HGrid { y0, step, values })
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        let u = (y - self.y0) / self.step;
        let i = (u.floor() as usize).clamp(1, self.values.len() - 3);
        let t = u - i as f64;
        let v = &self.values[i - 1..i + 3];
        // nodes at t = -1, 0, 1, 2
        let (a, b, c, d) = (t + 1.0, t, t - 1.0, t - 2.0);
        -v[0] * b * c * d / 6.0 + v[1] * a * c * d / 2.0 - v[2] * a * b * d / 2.0 + v[3] * a * b * c / 6.0
    }
}

/// The sum `S_l` over `c = 0 mod l`, with the ratio `|S_l| l / sqrt|D|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricSide {
    pub level: u64,
    pub d: i64,
    pub x: f64,
    pub t: f64,
    pub m: f64,
    pub value: f64,
    pub ratio: f64,
    pub n_max: u64,
    pub c_max: u64,
    pub terms: u64,
}

/// `V(n/X)` below this is dropped.
pub const GEOM_V_CUTOFF: f64 = 1e-10;
/// Upper limit on the number of `(n, c)` pairs.
pub const GEOM_PAIR_BUDGET: f64 = 6e9;
const GRID_STEP: f64 = 0.01;

/// Range `[y_lo, y_hi]` of `H` arguments needed by [`geometric_side`] at this `X` and `T`.
pub fn geometric_h_range(x: f64, t: f64) -> (f64, f64, u64) {
    let mut u = 4.0;
    while afe_kernel_closed(u * u, 1, 1).unwrap_or(0.0) >= GEOM_V_CUTOFF {
        u *= 1.02;
    }
    let n_max = (u * u * x).ceil() as u64;
    let big_l = (3.0 + x).ln().powi(2);
    (4.0 * PI * (t + 1.0) / big_l, 4.0 * PI * (n_max as f64).sqrt(), n_max)
}

/// `S_l = sum_n chi_D(n)/sqrt(n) V(n/X) sum_{c = 0 mod l, c <= C} S(n,1;c)/c H(4 pi sqrt(n)/c)`
/// with `C = sqrt(n)/(T+1) log^2(3+X)` and the `d = 1, A = 1` kernel `V(x) = Q(4, sqrt x)`.
pub fn geometric_side(level: u64, d: i64, x: f64, table: &HTable) -> Result<GeometricSide> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    if level == 0 || !(x >= 1.0) || x > 1e5 {
        return Err(Error::InvalidArgument(format!("need level >= 1 and 1 <= X <= 1e5, got {level}, {x}")));
    }
    let w = table.weight;
    let (y_lo, y_hi, n_max) = geometric_h_range(x, w.t);
    let big_l = (3.0 + x).ln().powi(2);
    let c_max = ((n_max as f64).sqrt() / (w.t + 1.0) * big_l).floor() as u64;
    let n_lo = |c: u64| (((c as f64) * (w.t + 1.0) / big_l).powi(2).ceil() as u64).max(1);
    let pairs: f64 = (1..=c_max / level).map(|k| n_max.saturating_sub(n_lo(k * level)) as f64).sum();
    if pairs > GEOM_PAIR_BUDGET {
        return Err(Error::TooLarge(format!("{pairs:e} (n, c) pairs")));
    }
    let grid = HGrid::new(table, y_lo, y_hi, GRID_STEP)?;
    let b: Vec<f64> = (0..=n_max)
        .map(|n| {
            if n == 0 {
                return 0.0;
            }
            let chi = kronecker(d, n as i64) as f64;
            if chi == 0.0 {
                0.0
            } else {
                chi * afe_kernel_closed(n as f64 / x, 1, 1).unwrap_or(0.0) / (n as f64).sqrt()
            }
        })
        .collect();
    let sqrt_n: Vec<f64> = (0..=n_max).map(|n| 4.0 * PI * (n as f64).sqrt()).collect();
    let mut total = 0.0;
    let mut terms = 0u64;
    let mut c = level;
    while c <= c_max {
        let row = kloosterman_row_fft(c);
        let inv_c = 1.0 / c as f64;
        let mut acc = 0.0;
        for n in n_lo(c)..=n_max {
            let bn = b[n as usize];
            if bn != 0.0 {
                acc += bn * row[(n % c) as usize] * grid.eval(sqrt_n[n as usize] * inv_c);
            }
        }
        terms += n_max + 1 - n_lo(c).min(n_max + 1);
        total += acc * inv_c;
        c += level;
    }
    Ok(GeometricSide {
        level,
        d,
        x,
        t: w.t,
        m: w.m,
        value: total,
        ratio: total.abs() * level as f64 / (d.abs() as f64).sqrt(),
        n_max,
        c_max,
        terms,
    })
}
