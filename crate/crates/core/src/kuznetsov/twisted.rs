use serde::{Deserialize, Serialize};

use crate::arith::{
    e_frac, factorize, gauss_unit, gcd3, is_fundamental_discriminant, jacobi, kloosterman_row, kronecker,
    mod_inverse, quadratic_gauss_closed,
};
use crate::{Complex64, Error, Result};

/// Largest `c|D|` enumerated by [`a_sum_bruteforce`].
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

/// `a(m; c, D) = sum_{x mod c|D|} chi_D(x) S(x, 1; c) e(m x / (c|D|))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistedSum {
    pub m: i64,
    pub c: u64,
    pub d: i64,
    pub value: Complex64,
    /// some local factor (always one at `p = 2`) came from enumeration
    pub fallback: bool,
}

fn check_d(d: i64) -> Result<()> {
    if d == 1 || is_fundamental_discriminant(d) {
        Ok(())
    } else {
        Err(Error::NotFundamental(d))
    }
}

fn character(d: i64, x: i64) -> i32 {
    if d == 1 {
        1
    } else {
        kronecker(d, x)
    }
}

/// Direct enumeration with a precomputed row `S(n, 1; c)`, `n mod c`.
pub fn a_sum_with_row(m: i64, c: u64, d: i64, row: &[f64]) -> Complex64 {
    let modulus = c as i64 * d.abs();
    let mut acc = Complex64::default();
    for x in 0..modulus {
        let chi = character(d, x);
        if chi == 0 {
            continue;
        }
        let s = row[(x as u64 % c) as usize];
        if s == 0.0 {
            continue;
        }
        acc += e_frac(m as i128 * x as i128, modulus as i128) * (chi as f64 * s);
    }
    acc
}

pub fn a_sum_bruteforce(m: i64, c: u64, d: i64) -> Result<Complex64> {
    check_d(d)?;
    if c == 0 {
        return Err(Error::InvalidModulus(0, "c must be positive"));
    }
    if c.saturating_mul(d.unsigned_abs()) > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!("c|D| = {} above {BRUTE_FORCE_LIMIT}", c as u128 * d.unsigned_abs() as u128)));
    }
    Ok(a_sum_with_row(m, c, d, &kloosterman_row(c)))
}

/// Splits a fundamental discriminant (or 1) into prime discriminants, keyed by prime.
pub fn prime_discriminants(d: i64) -> Vec<(u64, i64)> {
    if d == 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut odd_product = 1i64;
    for (p, _) in factorize(d.unsigned_abs()) {
        if p == 2 {
            continue;
        }
        let star = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        odd_product *= star;
        out.push((p, star));
    }
    let two = d / odd_product;
    if two != 1 {
        out.push((2, two));
    }
    out.sort();
    out
}

/// The local factor `a(m; p^k, D_p)` for odd `p` and `D_p` in `{1, p*}`.
fn local_odd(m: i64, p: i64, k: u32, dp: i64) -> Complex64 {
    let pk = p.pow(k);
    let pf = p as f64;
    match (dp == 1, k) {
        (true, 0) => Complex64::new(1.0, 0.0),
        (true, _) => {
            if m % p == 0 {
                Complex64::default()
            } else {
                let mbar = mod_inverse(m, pk).expect("unit");
                e_frac(-(mbar as i128), pk as i128) * pk as f64
            }
        }
        (false, 0) => quadratic_gauss_closed(p, m),
        (false, _) if m % p != 0 => Complex64::default(),
        (false, 1) => {
            // Salie-type reduced sum over units y mod p
            let m1 = (m / p).rem_euclid(p);
            let mut acc = Complex64::default();
            for y in 1..p {
                let chi = jacobi(m1 + y, p);
                if chi != 0 {
                    let ybar = mod_inverse(y, p).expect("unit");
                    acc += e_frac(ybar as i128, p as i128) * chi as f64;
                }
            }
            gauss_unit(p) * pf.powf(1.5) * acc
        }
        (false, _) => {
            let m1 = (m / p).rem_euclid(pk);
            if m1 % p == 0 {
                Complex64::default()
            } else {
                let mbar = mod_inverse(m1, pk).expect("unit");
                e_frac(-(mbar as i128), pk as i128) * (pk * p) as f64
            }
        }
    }
}

/// `a(m; c, D)` assembled from local factors through the CRT relation
/// `a(m; c1 c2, D1 D2) = a(m c2 D2bar; c1, D1) a(m c1 D1bar; c2, D2)`, where the bar
/// is the inverse of `|D_i|` (the sign of `D_i` must not enter).
/// Odd primes use closed forms; the 2-part is enumerated and flagged.
pub fn a_sum_closed(m: i64, c: u64, d: i64) -> Result<TwistedSum> {
    check_d(d)?;
    if c == 0 {
        return Err(Error::InvalidModulus(0, "c must be positive"));
    }
    let discs = prime_discriminants(d);
    let mut primes: Vec<u64> = factorize(c).into_iter().map(|(p, _)| p).collect();
    primes.extend(discs.iter().map(|&(p, _)| p));
    primes.sort();
    primes.dedup();
    let mut value = Complex64::new(1.0, 0.0);
    let mut fallback = false;
    for p in primes {
        let mut k = 0u32;
        let mut cp = 1u64;
        while c % (cp * p) == 0 {
            cp *= p;
            k += 1;
        }
        let dp = discs.iter().find(|&&(q, _)| q == p).map_or(1, |&(_, s)| s);
        let modulus = cp as i64 * dp.abs();
        let rest_c = (c / cp) as i64;
        let rest_d = (d / dp).abs();
        let inv = mod_inverse(rest_d.rem_euclid(modulus), modulus)?;
        let mp = ((m as i128).rem_euclid(modulus as i128) * rest_c as i128 % modulus as i128 * inv as i128)
            .rem_euclid(modulus as i128) as i64;
        let local = if p == 2 {
            fallback = true;
            a_sum_with_row(mp, cp, dp, &kloosterman_row(cp))
        } else {
            local_odd(mp, p as i64, k, dp)
        };
        value *= local;
        if value == Complex64::default() {
            break;
        }
    }
    Ok(TwistedSum { m, c, d, value, fallback })
}

/// `4^{nu+2} c |D|^{1/2} (m, c, D)^{1/2}` with `2^nu || c`.
pub fn abound(m: i64, c: u64, d: i64) -> f64 {
    let nu = c.trailing_zeros() as i32;
    let g = gcd3(m, c as i64, d).max(1);
    4f64.powi(nu + 2) * c as f64 * (d.abs() as f64).sqrt() * (g as f64).sqrt()
}
