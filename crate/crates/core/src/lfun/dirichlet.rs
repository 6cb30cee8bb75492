use std::f64::consts::PI;

use crate::arith::{is_fundamental_discriminant, kronecker};
use crate::specfun::gamma_q;
use crate::{Complex64, Error, Result};

/// `B_{2k}` for `k = 1..=10`.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const EM_TERMS: usize = 8;

fn em_start(s: Complex64) -> usize {
    (10.0 * (1.0 + s.im.abs())).ceil() as usize + 10
}

/// `zeta(s, a) - 1/(s - 1)`, entire in `s`, by Euler-Maclaurin.
///
/// Subtracting the pole keeps character sums stable at `s = 1`: the `N`
/// contribution is `((N + a)^{1-s} - 1)/(s - 1)`, evaluated as a series near `s = 1`.
pub fn hurwitz_zeta_reg(s: Complex64, a: f64) -> Complex64 {
    let n = em_start(s);
    let mut sum = Complex64::default();
    for k in 0..n {
        sum += (-s * (k as f64 + a).ln()).exp();
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let w = (1.0 - s) * lx;
    // (e^w - 1) / (s - 1) = -lx (e^w - 1) / w
    let expm1_over = if w.norm() < 1e-5 {
        Complex64::new(1.0, 0.0) + w / 2.0 + w * w / 6.0
    } else {
        (w.exp() - 1.0) / w
    };
    sum += -lx * expm1_over;
    let xs = (-s * lx).exp();
    sum += xs * 0.5;
    // B_{2k}/(2k)! (s)_{2k-1} x^{-s-2k+1}
    let mut rising = s; // (s)_{1}
    let mut fact = 2.0; // (2k)!
    let mut xpow = xs / x;
    for k in 1..=EM_TERMS {
        sum += rising * xpow * (BERNOULLI[k - 1] / fact);
        let kf = k as f64;
        rising *= (s + 2.0 * kf - 1.0) * (s + 2.0 * kf);
        fact *= (2.0 * kf + 1.0) * (2.0 * kf + 2.0);
        xpow /= x * x;
    }
    sum
}

pub fn hurwitz_zeta(s: Complex64, a: f64) -> Complex64 {
    hurwitz_zeta_reg(s, a) + (s - 1.0).inv()
}

pub fn zeta(s: Complex64) -> Complex64 {
    hurwitz_zeta(s, 1.0)
}

/// `zeta(1/2 + i t)` by Euler-Maclaurin.
pub fn zeta_critical(t: f64) -> Complex64 {
    zeta(Complex64::new(0.5, t))
}

/// `zeta(s)` from Borwein's accelerated alternating series for `eta(s)`.
///
/// Independent of Euler-Maclaurin; loses about `pi |t| / 2` nats to cancellation.
pub fn zeta_borwein(s: Complex64, n: usize) -> Complex64 {
    // d_k = n sum_{j=0}^{k} (n + j - 1)! 4^j / ((n - j)! (2j)!)
    let mut d = vec![0.0f64; n + 1];
    let mut term = 1.0 / n as f64; // j = 0 term of the sum, times 1/n
    let mut acc = term;
    d[0] = acc;
    for j in 1..=n {
        let jf = j as f64;
        term *= (n as f64 + jf - 1.0) * 4.0 * (n as f64 - jf + 1.0) / ((2.0 * jf - 1.0) * 2.0 * jf);
        acc += term;
        d[j] = acc;
    }
    let dn = d[n];
    let mut eta = Complex64::default();
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        eta += (-s * ((k + 1) as f64).ln()).exp() * (sign * (d[k] - dn));
    }
    eta = -eta / dn;
    eta / (1.0 - (s * -std::f64::consts::LN_2).exp() * 2.0)
}

/// `L(s, chi_D)` for a fundamental discriminant `D`, as
/// `|D|^{-s} sum_{a mod |D|} chi_D(a) zeta(s, a/|D|)`.
pub fn dirichlet_l(s: Complex64, d: i64) -> Result<Complex64> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let q = d.abs();
    let qf = q as f64;
    let mut sum = Complex64::default();
    for a in 1..q {
        let chi = kronecker(d, a);
        if chi != 0 {
            sum += hurwitz_zeta_reg(s, a as f64 / qf) * chi as f64;
        }
    }
    Ok(sum * (-s * qf.ln()).exp())
}

/// `L(1/2, chi_D)` from the theta-function expansion
/// `2 sum_n chi(n) n^{-1/2} Q((1/2 + kappa)/2, pi n^2 / |D|)`, with `kappa = 0`
/// for even and `1` for odd characters; the root number of a real character is 1.
pub fn dirichlet_l_half_theta(d: i64) -> Result<f64> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let q = d.abs() as f64;
    let kappa = if d < 0 { 1.0 } else { 0.0 };
    let a = (0.5 + kappa) / 2.0;
    let mut sum = 0.0;
    for n in 1.. {
        let x = PI * (n * n) as f64 / q;
        if x > 60.0 {
            break;
        }
        let chi = kronecker(d, n);
        if chi != 0 {
            sum += chi as f64 / (n as f64).sqrt() * gamma_q(a, x)?;
        }
    }
    Ok(2.0 * sum)
}
