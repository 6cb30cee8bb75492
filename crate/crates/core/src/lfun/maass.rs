use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::arith::{divisor_count, gcd};
use crate::specfun::bessel_k_it;
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Hecke eigenvalues `lambda(1..=N)` of a Maass form, `coeffs[n-1] = lambda(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSeries {
    pub t: f64,
    pub level: u64,
    pub parity: Parity,
    pub coeffs: Vec<f64>,
}

/// Tolerance for the Hecke relations on ingested data.
pub const HECKE_TOL: f64 = 1e-6;

impl CoefficientSeries {
    /// Validated constructor: `lambda(1) = 1`, the Hecke relations on coprime-to-level
    /// pairs with `m, n <= 60`, and the size screen `|lambda(n)| <= 1.1 d(n) n^{7/64}`.
    pub fn new(t: f64, level: u64, parity: Parity, coeffs: Vec<f64>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("spectral parameter {t} is not finite")));
        }
        match coeffs.first() {
            Some(&l1) if (l1 - 1.0).abs() <= HECKE_TOL => {}
            Some(&l1) => return Err(Error::InvalidArgument(format!("normalization: lambda(1) = {l1}, expected 1"))),
            None => return Err(Error::InvalidArgument("normalization: empty coefficient list".into())),
        }
        let s = CoefficientSeries { t, level, parity, coeffs };
        s.hecke_check()?;
        for (i, &l) in s.coeffs.iter().enumerate() {
            let n = (i + 1) as u64;
            let bound = 1.1 * divisor_count(n) as f64 * (n as f64).powf(7.0 / 64.0);
            if !l.is_finite() || l.abs() > bound {
                return Err(Error::InvalidArgument(format!("size screen: |lambda({n})| = {} exceeds {bound:.4}", l.abs())));
            }
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `lambda(n)`, zero for `n = 0`.
    pub fn lambda(&self, n: u64) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.coeffs[n as usize - 1]
        }
    }

    fn hecke_check(&self) -> Result<()> {
        let len = self.coeffs.len() as u64;
        for m in 2..=60u64.min(len) {
            for n in m..=60u64.min(len / m) {
                if gcd((m * n) as i64, self.level as i64) != 1 {
                    continue;
                }
                let g = gcd(m as i64, n as i64) as u64;
                let rhs: f64 = (1..=g).filter(|d| g % d == 0).map(|d| self.lambda(m * n / (d * d))).sum();
                let lhs = self.lambda(m) * self.lambda(n);
                if (lhs - rhs).abs() > HECKE_TOL * (1.0 + rhs.abs()) {
                    return Err(Error::InvalidArgument(format!(
                        "Hecke check: lambda({m}) lambda({n}) = {lhs} but the relation gives {rhs}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Multiplicative data from prime values via the Hecke recursion
    /// `lambda(p^{k+1}) = lambda(p) lambda(p^k) - [p does not divide level] lambda(p^{k-1})`.
    pub fn from_primes<F: FnMut(u64) -> f64>(t: f64, level: u64, parity: Parity, n_max: usize, prime_value: F) -> Result<Self> {
        let coeffs = hecke_extend(n_max, level, prime_value);
        CoefficientSeries::new(t, level, parity, coeffs)
    }
}

/// Smallest prime factor of every `n <= n_max` (entry 0 and 1 unused).
pub(crate) fn spf_sieve(n_max: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n_max + 1];
    for i in 2..=n_max {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n_max {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Values at prime powers from the Hecke recursion, for `p^k <= n_max`.
fn prime_power_values(p: u64, lp: f64, bad: bool, n_max: usize) -> Vec<f64> {
    let mut vals = vec![1.0, lp];
    let mut pk = p;
    while pk.saturating_mul(p) <= n_max as u64 {
        pk *= p;
        let k = vals.len();
        let next = if bad { lp * vals[k - 1] } else { lp * vals[k - 1] - vals[k - 2] };
        vals.push(next);
    }
    vals
}

/// Completely determined multiplicative sequence `lambda(1..=n_max)` from prime values.
pub fn hecke_extend<F: FnMut(u64) -> f64>(n_max: usize, level: u64, mut prime_value: F) -> Vec<f64> {
    let spf = spf_sieve(n_max);
    let mut out = vec![0.0; n_max + 1];
    let mut powers: Vec<Vec<f64>> = vec![Vec::new(); n_max + 1];
    if n_max >= 1 {
        out[1] = 1.0;
    }
    for n in 2..=n_max {
        let p = spf[n] as usize;
        if p == n {
            let bad = level % p as u64 == 0;
            powers[p] = prime_power_values(p as u64, prime_value(p as u64), bad, n_max);
        }
        let mut m = n;
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        out[n] = out[m] * powers[p][e];
    }
    out.remove(0);
    out
}

/// `f(z) = sum_n lambda(n) sqrt(y) K_{it}(2 pi n y) 2cos(2 pi n x)` (even) or
/// with `2 sin` (odd).
pub fn maass_evaluate(f: &CoefficientSeries, z: Complex64) -> Result<f64> {
    let (x, y) = (z.re, z.im);
    if !(y >= 1e-3) {
        return Err(Error::InvalidArgument(format!("Im z = {y} below 1e-3")));
    }
    let need = ((12.0 + f.t.abs()) / y).ceil() as usize;
    if f.coeffs.len() < need {
        return Err(Error::InsufficientCoefficients { have: f.coeffs.len(), need });
    }
    let sy = y.sqrt();
    let mut sum = 0.0;
    for (i, &l) in f.coeffs[..need].iter().enumerate() {
        if l == 0.0 {
            continue;
        }
        let n = (i + 1) as f64;
        let arg = 2.0 * PI * n * x;
        let trig = match f.parity {
            Parity::Even => arg.cos(),
            Parity::Odd => arg.sin(),
        };
        if trig == 0.0 {
            continue;
        }
        sum += l * 2.0 * trig * bessel_k_it(f.t, 2.0 * PI * n * y)?;
    }
    Ok(sum * sy)
}

/// The normalized oldform `g_q(z) = s (g(qz) - q^{1/2} lambda(q)/(q+1) g(z))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OldformLift {
    pub q: u64,
    /// `s = (1 - q lambda(q)^2 / (q+1)^2)^{-1/2}`.
    pub scalar: f64,
    /// Weight of `g(qz)`, equal to `s`.
    pub weight_gq: f64,
    /// Weight of `g(z)`, equal to `-s q^{1/2} lambda(q)/(q+1)`.
    pub weight_g: f64,
    /// Coefficients of `g_q` in the basis `sqrt(y) K_{it}(2 pi n y) e(nx)`:
    /// `rho(n) = weight_g lambda(n) + weight_gq sqrt(q) lambda(n/q)`.
    pub coeffs: Vec<f64>,
}

pub fn oldform_lift(g: &CoefficientSeries, q: u64) -> Result<OldformLift> {
    if g.level != 1 {
        return Err(Error::InvalidArgument(format!("oldform lift needs level 1, got {}", g.level)));
    }
    if !crate::arith::is_prime(q) {
        return Err(Error::InvalidArgument(format!("{q} is not prime")));
    }
    if g.coeffs.len() < q as usize {
        return Err(Error::InsufficientCoefficients { have: g.coeffs.len(), need: q as usize });
    }
    let lq = g.lambda(q);
    let qf = q as f64;
    let inner = 1.0 - qf * lq * lq / ((qf + 1.0) * (qf + 1.0));
    if inner <= 0.0 {
        return Err(Error::InvalidArgument(format!("lambda({q}) = {lq} violates the Ramanujan range")));
    }
    let scalar = inner.powf(-0.5);
    let weight_gq = scalar;
    let weight_g = -scalar * qf.sqrt() * lq / (qf + 1.0);
    let coeffs = (1..=g.coeffs.len() as u64)
        .map(|n| {
            let old = if n % q == 0 { qf.sqrt() * g.lambda(n / q) } else { 0.0 };
            weight_g * g.lambda(n) + weight_gq * old
        })
        .collect();
    Ok(OldformLift { q, scalar, weight_gq, weight_g, coeffs })
}

/// Number of leading coefficients per unit of smoothing scale.
const SYM2_SPAN: f64 = 30.0;

/// `L(sym^2 f, 1)` for level one data, as `sum_n b(n)/n e^{-n/N}` with
/// `sum b(n) n^{-s} = zeta(2s) sum lambda(n^2) n^{-s}` and `N = len/30`.
///
/// `lambda(n^2)` comes from the prime values through the Hecke recursion, so the
/// sum runs as far as the data has primes.
pub fn sym2_l_at_1(f: &CoefficientSeries) -> Result<f64> {
    sym2_l_at_1_scaled(f, f.coeffs.len() as f64 / SYM2_SPAN)
}

/// Same with an explicit smoothing scale `N`; requires `30 N` coefficients and
/// `N >= 10 (3 + 2|t|)`.
pub fn sym2_l_at_1_scaled(f: &CoefficientSeries, scale: f64) -> Result<f64> {
    if f.level != 1 {
        return Err(Error::InvalidArgument(format!("symmetric square needs level 1, got {}", f.level)));
    }
    let min_scale = 10.0 * (3.0 + 2.0 * f.t.abs());
    let m = (SYM2_SPAN * scale.max(min_scale) * (1.0 - 1e-12)).ceil() as usize;
    if f.coeffs.len() < m || !(scale >= min_scale) {
        return Err(Error::InsufficientCoefficients { have: f.coeffs.len(), need: m });
    }
    let sq = hecke_extend(m, 1, |p| f.lambda(p));
    let spf = spf_sieve(m);
    // lambda(k^2) multiplicatively: lambda(p^{2e}) from the prime power table
    let mut lsq = vec![0.0; m + 1];
    lsq[1] = 1.0;
    let mut cache: Vec<Vec<f64>> = vec![Vec::new(); m + 1];
    for k in 2..=m {
        let p = spf[k] as usize;
        if cache[p].is_empty() {
            cache[p] = prime_power_values_long(p as u64, sq[p - 1], m);
        }
        let mut r = k;
        let mut e = 0;
        while r % p == 0 {
            r /= p;
            e += 1;
        }
        lsq[k] = lsq[r] * cache[p][2 * e];
    }
    let mut sum = 0.0;
    for mm in 1.. {
        let m2 = mm * mm;
        if m2 > m {
            break;
        }
        for k in 1..=m / m2 {
            let n = (m2 * k) as f64;
            sum += lsq[k] / n * (-n / scale).exp();
        }
    }
    Ok(sum)
}

/// `lambda(p^j)` for `j <= 2 log_p(n_max)`.
fn prime_power_values_long(p: u64, lp: f64, n_max: usize) -> Vec<f64> {
    let mut e = 0;
    let mut pk = 1u64;
    while pk * p <= n_max as u64 {
        pk *= p;
        e += 1;
    }
    let mut vals = vec![1.0, lp];
    while vals.len() <= 2 * e {
        let k = vals.len();
        vals.push(lp * vals[k - 1] - vals[k - 2]);
    }
    vals
}
