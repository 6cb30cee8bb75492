//! Exact modular arithmetic and complete exponential sums.
//!
//! Every sum here is evaluated by direct enumeration over residues; phases
//! are reduced modulo the denominator in integer arithmetic before any
//! floating point work, so `e(k/c)` is always computed from `k mod c`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::{Error, Result};

/// `e(x) = exp(2 pi i x)`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let frac = x - x.floor();
    Complex64::from_polar(1.0, TAU * frac)
}

/// `e(num / den)` with the numerator reduced exactly modulo `den`.
#[inline]
pub fn e_frac(num: i128, den: i128) -> Complex64 {
    debug_assert!(den > 0);
    let k = num.rem_euclid(den);
    Complex64::from_polar(1.0, TAU * (k as f64) / (den as f64))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    gcd(gcd(a, b), c)
}

/// Extended Euclid: returns `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    (r0 as i64, s0 as i64, t0 as i64)
}

/// Inverse of `a` modulo `m`, in `[0, m)`.
pub fn mod_inverse(a: i64, m: i64) -> Result<i64> {
    if m <= 0 {
        return Err(Error::InvalidModulus(m, "modulus must be positive"));
    }
    if m == 1 {
        return Ok(0);
    }
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    if g != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(x.rem_euclid(m))
}

/// Prime factorisation by trial division, as `(prime, exponent)` pairs.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 2;
    }
    true
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, k)| k == 1)
}

/// Number of positive divisors `d(n)`.
pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, k)| k as u64 + 1).product()
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, k) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..k {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Jacobi symbol `(a | n)` for odd `n > 0`.
pub fn jacobi(a: i64, n: i64) -> i32 {
    assert!(n > 0 && n % 2 == 1, "jacobi symbol needs odd positive modulus");
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut sign = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol `(d | n)`, extended to all integers `d`, `n`.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= twos;
    }
    if n == 1 {
        return result;
    }
    result * jacobi(d, n)
}

/// Whether `d` is a fundamental discriminant (of either sign, `d != 1`).
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Kloosterman sum `S(m, n; c) = sum_{x mod c, (x, c) = 1} e((m x + n xbar) / c)`.
///
/// The sum is real; the imaginary parts cancel pairwise under `x <-> -x`.
pub fn kloosterman(m: i64, n: i64, c: i64) -> f64 {
    assert!(c >= 1, "kloosterman modulus must be positive");
    if c == 1 {
        return 1.0;
    }
    let (m, n, c) = (m as i128, n as i128, c as i128);
    let mut acc = 0.0;
    for x in 1..c {
        if gcd(x as i64, c as i64) != 1 {
            continue;
        }
        let xbar = mod_inverse(x as i64, c as i64).expect("unit") as i128;
        let k = (m * x + n * xbar).rem_euclid(c);
        acc += (TAU * k as f64 / c as f64).cos();
    }
    acc
}

/// All values `S(n, 1; c)` for `n = 0, ..., c - 1`, from a cosine table.
pub fn kloosterman_row(c: u64) -> Vec<f64> {
    let c = c as usize;
    if c == 1 {
        return vec![1.0];
    }
    let cos_table: Vec<f64> = (0..c)
        .map(|k| (TAU * k as f64 / c as f64).cos())
        .collect();
    let units: Vec<(usize, usize)> = (1..c)
        .filter(|&x| gcd(x as i64, c as i64) == 1)
        .map(|x| (x, mod_inverse(x as i64, c as i64).unwrap() as usize))
        .collect();
    (0..c)
        .map(|n| {
            units
                .iter()
                .map(|&(x, xbar)| cos_table[(n * x + xbar) % c])
                .sum()
        })
        .collect()
}

/// Same values as [`kloosterman_row`], as the length-`c` DFT of `1_{(x,c)=1} e(xbar/c)`.
pub fn kloosterman_row_fft(c: u64) -> Vec<f64> {
    use rustfft::FftPlanner;
    let n = c as usize;
    if n == 1 {
        return vec![1.0];
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for x in 1..n {
        if let Ok(xbar) = mod_inverse(x as i64, c as i64) {
            buf[x] = e_frac(xbar as i128, c as i128);
        }
    }
    // the inverse transform carries the sign e(+nx/c)
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// Salié sum `sum_{y mod l, (y, l) = 1} (y | l) e((m y + n ybar) / l)` for odd `l`.
pub fn salie(m: i64, n: i64, l: i64) -> Result<Complex64> {
    if l < 1 || l % 2 == 0 {
        return Err(Error::InvalidModulus(l, "Salie sums need an odd positive modulus"));
    }
    if l == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for y in 1..l {
        let chi = jacobi(y, l);
        if chi == 0 {
            continue;
        }
        let ybar = mod_inverse(y, l)?;
        acc += e_frac(m as i128 * y as i128 + n as i128 * ybar as i128, l as i128) * chi as f64;
    }
    Ok(acc)
}

/// Quadratic Gauss sum `sum_{x mod p} (x | p) e(m x / p)` for an odd prime `p`.
pub fn quadratic_gauss(p: i64, m: i64) -> Complex64 {
    assert!(p > 2 && p % 2 == 1, "quadratic Gauss sums need an odd prime");
    (1..p)
        .map(|x| e_frac(m as i128 * x as i128, p as i128) * jacobi(x, p) as f64)
        .sum()
}

/// `epsilon_p`: 1 when `p = 1 mod 4`, `i` when `p = 3 mod 4`.
pub fn gauss_unit(p: i64) -> Complex64 {
    if p.rem_euclid(4) == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

/// Closed form of the quadratic Gauss sum: `epsilon_p (m | p) sqrt(p)`.
pub fn quadratic_gauss_closed(p: i64, m: i64) -> Complex64 {
    gauss_unit(p) * (jacobi(m, p) as f64) * (p as f64).sqrt()
}
