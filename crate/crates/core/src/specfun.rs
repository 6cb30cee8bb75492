//! Special functions and numerical integration.
//!
//! Quadrature works on complex-valued integrands throughout; real integrands
//! go through the same code with a zero imaginary part.

use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// Adaptive Gauss-Kronrod (7/15) panels.
    GaussKronrod,
    /// Double exponential trapezoid rules (tanh-sinh, exp-sinh, sinh-sinh).
    DoubleExponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Bisection depth for Gauss-Kronrod, halving levels for double exponential rules.
    pub max_depth: u32,
    pub rule: Rule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-13, rel_tol: 1e-12, max_depth: 40, rule: Rule::GaussKronrod }
    }
}

impl QuadratureSpec {
    pub fn tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureSpec { abs_tol, rel_tol, ..Default::default() }
    }

    pub fn de(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureSpec { abs_tol, rel_tol, max_depth: 12, rule: Rule::DoubleExponential }
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    /// `[a, infinity)`
    From(f64),
    /// The whole real line.
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod panel: `(value, error, roundoff floor)` with the
/// QUADPACK error scaling.
fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [Complex64::default(); 15];
    fv[0] = f(c);
    for j in 0..7 {
        let x = h * XGK[j];
        fv[1 + 2 * j] = f(c - x);
        fv[2 + 2 * j] = f(c + x);
    }
    let mut k = fv[0] * WGK[7];
    let mut g = fv[0] * WG[3];
    let mut resabs = fv[0].norm() * WGK[7];
    for j in 0..7 {
        let s = fv[1 + 2 * j] + fv[2 + 2 * j];
        k += s * WGK[j];
        resabs += (fv[1 + 2 * j].norm() + fv[2 + 2 * j].norm()) * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let mean = k * 0.5;
    let mut resasc = (fv[0] - mean).norm() * WGK[7];
    for j in 0..7 {
        resasc += ((fv[1 + 2 * j] - mean).norm() + (fv[2 + 2 * j] - mean).norm()) * WGK[j];
    }
    let h = h.abs();
    let (resabs, resasc) = (resabs * h, resasc * h);
    let mut err = ((k - g) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    (k * h, err.max(floor), floor)
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    depth: u32,
    /// error already at the rounding floor; splitting cannot help
    final_: bool,
}

impl Panel {
    fn key(&self) -> f64 {
        if self.final_ {
            -1.0
        } else {
            self.error
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().total_cmp(&other.key())
    }
}

fn panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, depth: u32) -> Panel {
    let (value, error, floor) = gk15(f, a, b);
    Panel { a, b, value, error, depth, final_: error <= floor }
}

fn adaptive_gk<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quad> {
    let first = panel(f, a, b, 0);
    let (mut total, mut err) = (first.value, first.error);
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut evals = 15;
    while err > spec.target(total) {
        let p = heap.pop().expect("nonempty");
        if p.final_ {
            // every panel is at the rounding floor
            heap.push(p);
            break;
        }
        if p.depth >= spec.max_depth || evals > 2_000_000 {
            return Err(Error::Quadrature { estimate: total, error: err });
        }
        let m = 0.5 * (p.a + p.b);
        let (p1, p2) = (panel(f, p.a, m, p.depth + 1), panel(f, m, p.b, p.depth + 1));
        evals += 30;
        total += p1.value + p2.value - p.value;
        err += p1.error + p2.error - p.error;
        heap.push(p1);
        heap.push(p2);
        if err.is_nan() || total.re.is_nan() || total.im.is_nan() {
            return Err(Error::Quadrature { estimate: total, error: f64::INFINITY });
        }
    }
    // re-sum to limit drift from the running updates
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Quad { value, error, evals })
}

/// Trapezoid sums of `g(t)` over `t in h Z` with `h` halved until two levels agree.
fn de_sum<G: Fn(f64) -> Option<Complex64>>(g: &G, spec: &QuadratureSpec) -> Result<Quad> {
    let mut h = 0.5;
    let mut evals = 0;
    let mut sum = g(0.0).unwrap_or_default();
    evals += 1;
    let tail = |sum: &mut Complex64, start: f64, step: f64, evals: &mut usize| {
        for dir in [1.0, -1.0] {
            let mut k = 0;
            let mut small = 0;
            loop {
                let t = dir * (start + step * k as f64);
                k += 1;
                if t.abs() > 8.0 {
                    break;
                }
                let Some(v) = g(t) else { break };
                *evals += 1;
                *sum += v;
                if v.norm() <= 1e-18 * sum.norm().max(1e-300) {
                    small += 1;
                    if small >= 3 {
                        break;
                    }
                } else {
                    small = 0;
                }
            }
        }
    };
    tail(&mut sum, h, h, &mut evals);
    let mut prev = sum * h;
    for _ in 0..spec.max_depth {
        // add the odd points of the halved grid
        let mut odd = Complex64::default();
        tail(&mut odd, h / 2.0, h, &mut evals);
        sum += odd;
        h /= 2.0;
        let cur = sum * h;
        let diff = (cur - prev).norm();
        if diff <= spec.target(cur) {
            return Ok(Quad { value: cur, error: diff, evals });
        }
        prev = cur;
    }
    Err(Error::Quadrature { estimate: prev, error: f64::NAN })
}

fn finite_or_none(x: f64, v: Complex64) -> Option<Complex64> {
    if x.is_finite() && v.re.is_finite() && v.im.is_finite() {
        Some(v)
    } else {
        None
    }
}

/// Integrate `f` over `domain`; failure to meet the tolerance is an error
/// carrying the best available estimate.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, domain: Domain, spec: &QuadratureSpec) -> Result<Quad> {
    match (spec.rule, domain) {
        (Rule::GaussKronrod, Domain::Finite(a, b)) => adaptive_gk(&f, a, b, spec),
        (Rule::GaussKronrod, Domain::From(a)) => {
            // x = a + u / (1 - u)
            let g = |u: f64| {
                let w = 1.0 - u;
                let x = a + u / w;
                if !x.is_finite() {
                    return Complex64::default();
                }
                f(x) / (w * w)
            };
            adaptive_gk(&g, 0.0, 1.0, spec)
        }
        (Rule::GaussKronrod, Domain::Real) => {
            // x = u / (1 - u^2)
            let g = |u: f64| {
                let w = 1.0 - u * u;
                let x = u / w;
                if !x.is_finite() {
                    return Complex64::default();
                }
                f(x) * (1.0 + u * u) / (w * w)
            };
            adaptive_gk(&g, -1.0, 1.0, spec)
        }
        (Rule::DoubleExponential, Domain::Finite(a, b)) => {
            let r = 0.5 * (b - a);
            let g = |t: f64| {
                let s = FRAC_PI_2 * t.sinh();
                let ch = s.cosh();
                // distance to the nearest endpoint, computed without cancellation
                let gap = r * (-s.abs()).exp() / ch;
                if gap <= 0.0 || !ch.is_finite() {
                    return None;
                }
                let x = if t >= 0.0 { b - gap } else { a + gap };
                let w = r * FRAC_PI_2 * t.cosh() / (ch * ch);
                finite_or_none(x, f(x) * w)
            };
            de_sum(&g, spec)
        }
        (Rule::DoubleExponential, Domain::From(a)) => {
            let g = |t: f64| {
                let e = (FRAC_PI_2 * t.sinh()).exp();
                let x = a + e;
                let w = FRAC_PI_2 * t.cosh() * e;
                if !x.is_finite() || w == 0.0 {
                    return None;
                }
                finite_or_none(x, f(x) * w)
            };
            de_sum(&g, spec)
        }
        (Rule::DoubleExponential, Domain::Real) => {
            let g = |t: f64| {
                let s = FRAC_PI_2 * t.sinh();
                let x = s.sinh();
                let w = FRAC_PI_2 * t.cosh() * s.cosh();
                finite_or_none(x, f(x) * w)
            };
            de_sum(&g, spec)
        }
    }
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, domain: Domain, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    integrate(|x| Complex64::new(f(x), 0.0), domain, spec).map(|q| (q.value.re, q.error))
}

/// `B_{2k} / (2k (2k - 1))` for the Stirling series.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

fn is_pole(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

/// Principal branch of `log Gamma(s)`, analytic off the negative real axis.
///
/// The argument is shifted to `Re z >= 17` by the recurrence, summing
/// principal logarithms, and the Stirling series is applied there.
pub fn log_gamma(s: Complex64) -> Result<Complex64> {
    if is_pole(s) {
        return Err(Error::GammaPole(s.re));
    }
    let mut z = s;
    let mut shift = Complex64::default();
    while z.re < 17.0 {
        shift += z.ln();
        z += 1.0;
    }
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut series = Complex64::default();
    let mut p = zinv;
    for c in STIRLING {
        series += p * c;
        p *= zinv2;
    }
    let lg = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series;
    Ok(lg - shift)
}

pub fn gamma(s: Complex64) -> Result<Complex64> {
    log_gamma(s).map(|l| l.exp())
}

/// `1 / Gamma(s)`, entire; zero at the poles of `Gamma`.
pub fn rgamma(s: Complex64) -> Complex64 {
    match log_gamma(s) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex64::default(),
    }
}

/// `log Gamma(x)` for real `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs a positive argument");
    log_gamma(Complex64::new(x, 0.0)).expect("no pole").re
}

/// Regularized incomplete gammas `(P(a, x), Q(a, x))` for `a > 0`, `x >= 0`.
pub fn gamma_pq(a: f64, x: f64) -> Result<(f64, f64)> {
    if a <= 0.0 || x < 0.0 || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("incomplete gamma at a={a}, x={x}")));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    let log_pref = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        // P = x^a e^{-x} / Gamma(a + 1) sum_n x^n / ((a+1)...(a+n))
        let mut term = 1.0 / a;
        let mut sum = term;
        for n in 1..100_000 {
            term *= x / (a + n as f64);
            sum += term;
            if term < sum * 1e-17 {
                let p = (log_pref + sum.ln()).exp();
                return Ok((p, 1.0 - p));
            }
        }
        Err(Error::NoConvergence(100_000))
    } else {
        // modified Lentz continued fraction for Q
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..100_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                let q = (log_pref + h.ln()).exp();
                return Ok((1.0 - q, q));
            }
        }
        Err(Error::NoConvergence(100_000))
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = Gamma(a, x) / Gamma(a)`.
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    gamma_pq(a, x).map(|(_, q)| q)
}

/// `K_nu(y)` for complex order and `y > 0`, from
/// `K_nu(y) = 1/2 int_R exp(-y cosh u + nu u) du`.
///
/// For `Im nu = t > 0` the path is moved to `Im u = beta`, close to the
/// height of the saddle of `-y cosh u + i t u`: `beta = asin(t / y)` when
/// `t < y`, capped at `pi/2 - min(pi/2, 2/t)` so the integrand still decays.
/// On this path the integrand carries the factor `exp(-t beta)`, so there is
/// no cancellation down to `exp(-pi t / 2)`.
/// Returns exactly zero once `y > 700`, where the value underflows.
pub fn bessel_k(nu: Complex64, y: f64) -> Result<Complex64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::InvalidArgument(format!("bessel_k needs y > 0, got {y}")));
    }
    if bessel_k_underflows(y) {
        return Ok(Complex64::default());
    }
    let flip = nu.im < 0.0;
    let nu = if flip { nu.conj() } else { nu };
    let (sigma, t) = (nu.re, nu.im);
    let beta = if t > 0.0 {
        (t / y).min(1.0).asin().min(FRAC_PI_2 - FRAC_PI_2.min(2.0 / t))
    } else {
        0.0
    };
    let cb = beta.cos();
    let phi = |u: f64| -y * cb * u.cosh() + sigma * u;
    let ustar = (sigma / (y * cb)).asinh();
    let top = phi(ustar);
    let mut step = 1.0;
    while phi(ustar + step) > top - 42.0 {
        step *= 1.5;
    }
    let hi = ustar + step;
    let mut step = 1.0;
    while phi(ustar - step) > top - 42.0 {
        step *= 1.5;
    }
    let lo = ustar - step;
    let scale = top - t * beta;
    let shift = Complex64::new(0.0, beta);
    let f = |u: f64| {
        let w = shift + u;
        (-y * w.cosh() + nu * w - scale).exp() * 0.5
    };
    let spec = QuadratureSpec::tol(1e-16, 1e-14);
    let q = integrate(f, Domain::Finite(lo, hi), &spec)?;
    let v = q.value * scale.exp();
    Ok(if flip { v.conj() } else { v })
}

pub fn bessel_k_underflows(y: f64) -> bool {
    y > 700.0
}

/// `K_{it}(y)`, real for real `t`.
pub fn bessel_k_it(t: f64, y: f64) -> Result<f64> {
    bessel_k(Complex64::new(0.0, t), y).map(|v| v.re)
}

/// Ascending series for `J_nu(y)`; also returns `sum |terms|`, whose ratio
/// to `|J|` bounds the loss of relative accuracy.
pub fn bessel_j_series(nu: Complex64, y: f64) -> (Complex64, f64) {
    if nu.im == 0.0 && nu.re < 0.0 && nu.re == nu.re.round() {
        let (v, m) = bessel_j_series(-nu, y);
        let sign = if (nu.re as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return (v * sign, m);
    }
    if y == 0.0 {
        let v = if nu == Complex64::default() { Complex64::new(1.0, 0.0) } else { Complex64::default() };
        return (v, v.norm());
    }
    let mut term = (nu * (0.5 * y).ln()).exp() * rgamma(nu + 1.0);
    let mut sum = term;
    let mut mag = term.norm();
    let x2 = -0.25 * y * y;
    for k in 1..100_000 {
        let kf = k as f64;
        term *= x2 / (kf * (nu + kf));
        sum += term;
        mag += term.norm();
        if term.norm() <= 1e-17 * mag && kf * (nu + kf).norm() > y * y {
            break;
        }
    }
    (sum, mag)
}

/// Schläfli's integral, valid for all complex `nu` and `y > 0`:
/// `J_nu(y) = 1/pi int_0^pi cos(nu th - y sin th) dth
///           - sin(nu pi)/pi int_0^inf exp(-y sinh t - nu t) dt`.
pub fn bessel_j_schlafli(nu: Complex64, y: f64) -> Result<Complex64> {
    let spec = QuadratureSpec::tol(1e-15, 1e-13);
    let first = integrate(|th| (nu * th - y * th.sin()).cos(), Domain::Finite(0.0, PI), &spec)?.value / PI;
    let snp = (nu * PI).sin();
    if snp.norm() == 0.0 {
        return Ok(first);
    }
    // exp(-y sinh t - nu t): peak at t0, cut where it has dropped by e^{-45}
    let sigma = nu.re;
    let phi = |t: f64| -y * t.sinh() - sigma * t;
    let t0 = if -sigma > y { (-sigma / y).acosh() } else { 0.0 };
    let mut upper = t0 + 1.0;
    while phi(upper) > phi(t0) - 45.0 {
        upper = t0 + 2.0 * (upper - t0);
    }
    let second = integrate(|t| (-y * t.sinh() - nu * t).exp(), Domain::Finite(0.0, upper), &spec)?.value;
    Ok(first - snp * second / PI)
}

/// The sine-power representation
/// `J_nu(y) = 2 (y/2)^nu / (Gamma(nu + 1/2) Gamma(1/2)) int_0^{pi/2} sin^{2 nu} th cos(y cos th) dth`,
/// for `Re nu > -1/2`, evaluated after the substitution `th = (pi/2) e^{-u}`.
pub fn bessel_j_integral(nu: Complex64, y: f64) -> Result<Complex64> {
    if nu.re <= -0.5 {
        return Err(Error::InvalidArgument(format!("integral representation needs Re nu > -1/2, got {nu}")));
    }
    let g = |u: f64| {
        let th = FRAC_PI_2 * (-u).exp();
        let ls = th.sin().ln();
        (nu * (2.0 * ls)).exp() * (y * th.cos()).cos() * th
    };
    let q = integrate(g, Domain::From(0.0), &QuadratureSpec::de(1e-16, 1e-14))?;
    let pref = (nu * (0.5 * y).ln() - log_gamma(nu + 0.5)?).exp() * 2.0 / PI.sqrt();
    Ok(pref * q.value)
}

/// `J_nu(y)` for complex `nu` and `y > 0`: the ascending series where it is
/// well conditioned, Schläfli's integral otherwise.
pub fn bessel_j(nu: Complex64, y: f64) -> Result<Complex64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::InvalidArgument(format!("bessel_j needs y > 0, got {y}")));
    }
    let (v, mag) = bessel_j_series(nu, y);
    if mag <= 1e3 * v.norm() {
        return Ok(v);
    }
    bessel_j_schlafli(nu, y)
}
