//! Real-analytic Eisenstein series for `SL_2(Z)` and `Gamma_0(q)`, and their
//! sums over Heegner orbits.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::heegner::{check_admissible, heegner_points_with};
use crate::lfun::{
    dirichlet_l, eisenstein_eigenvalues, rankin_selberg_coeffs, theta_coefficients, zeta, GammaFactor,
    WaldspurgerOutcome, WEYL_FLOOR,
};
use crate::quadforms::ClassCharacter;
use crate::quadforms::ClassGroup;
use crate::specfun::{bessel_k, log_gamma};
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cusp {
    Infinity,
    Zero,
}

fn check_s(s: Complex64) -> Result<()> {
    if !(0.5..=3.0).contains(&s.re) {
        return Err(Error::InvalidArgument(format!("Re s = {} outside [1/2, 3]", s.re)));
    }
    if (s - 0.5).norm() < 1e-9 {
        return Err(Error::Singular("zeta(2s) has a pole at s = 1/2".into()));
    }
    Ok(())
}

/// `log xi(w)` with `xi(w) = pi^{-w/2} Gamma(w/2) zeta(w)`.
fn log_xi(w: Complex64) -> Result<Complex64> {
    Ok(-w * 0.5 * PI.ln() + log_gamma(w * 0.5)? + zeta(w).ln())
}

/// `phi(s) = xi(2s - 1) / xi(2s)`.
pub fn scattering(s: Complex64) -> Result<Complex64> {
    check_s(s)?;
    Ok((log_xi(2.0 * s - 1.0)? - log_xi(2.0 * s)?).exp())
}

fn sigma(n: u64, e: Complex64) -> Complex64 {
    let mut acc = Complex64::default();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            acc += (e * (d as f64).ln()).exp();
            let o = n / d;
            if o != d {
                acc += (e * (o as f64).ln()).exp();
            }
        }
        d += 1;
    }
    acc
}

/// Number of Fourier terms for `Im z = y`: `2 pi n y` runs past `45 + |Im s|`.
pub fn fourier_length(y: f64, s: Complex64) -> usize {
    ((45.0 + s.im.abs()) / (2.0 * PI * y)).ceil() as usize
}

/// `E(z, s) = sum over Gamma_inf \ SL_2(Z) of Im(gamma z)^s`, from
/// `y^s + phi(s) y^{1-s} + (2/xi(2s)) sqrt(y) sum_{n != 0} |n|^{s-1/2} sigma_{1-2s}(|n|) K_{s-1/2}(2 pi |n| y) e(nx)`.
///
/// The point is used as given; see [`eisenstein_level1_reduced`].
pub fn eisenstein_level1(z: Complex64, s: Complex64) -> Result<Complex64> {
    check_s(s)?;
    let (x, y) = (z.re, z.im);
    if !(y > 0.05) {
        return Err(Error::InvalidArgument(format!("Im z = {y} must exceed 0.05")));
    }
    let ly = y.ln();
    let mut val = (s * ly).exp() + scattering(s)? * ((1.0 - s) * ly).exp();
    let pref = (-log_xi(2.0 * s)?).exp() * 2.0 * y.sqrt();
    let nu = s - 0.5;
    let mut sum = Complex64::default();
    for n in 1..=fourier_length(y, s) as u64 {
        let nf = n as f64;
        let k = bessel_k(nu, 2.0 * PI * nf * y)?;
        if k == Complex64::default() {
            break;
        }
        sum += (nu * nf.ln()).exp() * sigma(n, 1.0 - 2.0 * s) * k * (2.0 * (2.0 * PI * nf * x).cos());
    }
    val += pref * sum;
    Ok(val)
}

/// Reduction into `|Re z| <= 1/2, |z| >= 1`.
pub fn reduce_point(mut z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) || !z.is_finite() {
        return Err(Error::InvalidArgument(format!("{z} is not in the upper half plane")));
    }
    for _ in 0..10_000 {
        z.re -= (z.re + 0.5).floor();
        if z.norm_sqr() < 1.0 - 1e-14 {
            z = -z.inv();
        } else {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence(10_000))
}

/// [`eisenstein_level1`] after moving `z` into the fundamental domain.
pub fn eisenstein_level1_reduced(z: Complex64, s: Complex64) -> Result<Complex64> {
    eisenstein_level1(reduce_point(z)?, s)
}

/// Level `q` Eisenstein series at the cusp `infinity` or `0`.
///
/// Splitting the coset sum by `q | d` gives `E(qz) = q^s E_inf(z) + q^{-s} (E(z) - E_inf(z))`,
/// so `E_inf = (q^s E(qz) - E(z)) / (q^{2s} - 1)` and, via `z -> -1/(qz)`,
/// `E_0 = (q^s E(z) - E(qz)) / (q^{2s} - 1)`. Both level one values are taken at reduced points.
pub fn eisenstein_levelq(z: Complex64, s: Complex64, q: u64, cusp: Cusp) -> Result<Complex64> {
    let (alpha, beta) = levelq_weights(s, q, cusp)?;
    let e1 = eisenstein_level1_reduced(z, s)?;
    let eq = eisenstein_level1_reduced(z * q as f64, s)?;
    Ok(alpha * e1 + beta * eq)
}

/// `(alpha, beta)` with `E_cusp(z) = alpha E(z) + beta E(qz)`.
pub fn levelq_weights(s: Complex64, q: u64, cusp: Cusp) -> Result<(Complex64, Complex64)> {
    check_s(s)?;
    if !is_prime(q) {
        return Err(Error::InvalidArgument(format!("level {q} is not prime")));
    }
    let qs = (s * (q as f64).ln()).exp();
    let den = qs * qs - 1.0;
    if den.norm() < 1e-12 {
        return Err(Error::Singular(format!("q^(2s) = 1 at s = {s}")));
    }
    Ok(match cusp {
        Cusp::Infinity => (-1.0 / den, qs / den),
        Cusp::Zero => (qs / den, -1.0 / den),
    })
}

/// `sum_a sum_sigma E_a(tau^sigma, 1/2 + it)` over the `r_min` orbit
/// (all classes once at level one, where there is a single cusp).
pub fn weyl_sum_eisenstein(d: u64, q: u64, t: f64) -> Result<Complex64> {
    let s = Complex64::new(0.5, t);
    if q == 1 {
        let group = ClassGroup::new(d)?;
        let mut acc = Complex64::default();
        for f in &group.forms {
            acc += eisenstein_level1_reduced(f.tau(), s)?;
        }
        return Ok(acc);
    }
    check_admissible(d, q)?;
    let group = ClassGroup::new(d)?;
    let [orbit, _] = heegner_points_with(&group, q)?;
    let (ai, bi) = levelq_weights(s, q, Cusp::Infinity)?;
    let (a0, b0) = levelq_weights(s, q, Cusp::Zero)?;
    let mut acc = Complex64::default();
    for p in &orbit {
        let tau = p.tau();
        let e1 = eisenstein_level1_reduced(tau, s)?;
        let eq = eisenstein_level1_reduced(tau * q as f64, s)?;
        acc += (ai + a0) * e1 + (bi + b0) * eq;
    }
    Ok(acc)
}

/// `|W| / (D^{1/4} q^{-1/2} |zeta(1/2+it)| |L(1/2+it, chi_{-D})| / |zeta(1+2it)|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GzRatio {
    pub d: u64,
    pub q: u64,
    pub t: f64,
    pub weyl: Complex64,
    pub rhs: f64,
    pub kappa: f64,
}

pub fn gz_ratio(d: u64, q: u64, t: f64) -> Result<GzRatio> {
    let weyl = weyl_sum_eisenstein(d, q, t)?;
    let s = Complex64::new(0.5, t);
    let l = dirichlet_l(s, -(d as i64))?;
    let rhs = (d as f64).powf(0.25) / (q as f64).sqrt() * zeta(s).norm() * l.norm() / zeta(2.0 * s).norm();
    Ok(GzRatio { d, q, t, weyl, rhs, kappa: weyl.norm() / rhs })
}

/// The value `kappa` takes when the identity holds exactly:
/// `2^{-1/2}` at level one and `2^{1/2} q^{1/2} / |1 + q^{1/2+it}|` at prime level.
pub fn gz_kappa_expected(q: u64, t: f64) -> f64 {
    if q == 1 {
        return 0.5f64.sqrt();
    }
    let qf = q as f64;
    let qs = Complex64::from_polar(qf.sqrt(), t * qf.ln());
    2f64.sqrt() * qf.sqrt() / (qs + 1.0).norm()
}

/// `R(chi)` of the Waldspurger ratio for `f = E(z, 1/2 + it)` at level one.
///
/// Here `L(f x Theta_chi, s) = L(s + it, chi) L(s - it, chi)`. For the trivial
/// character this has poles at `s = 1 +- it` and `s = +-it`, and the approximate
/// functional equation loses `4 Re(R / (1/2 + it)) / (D^{1/2} L_inf(1/2))`, where
/// `R = D^{1+it} L_inf(1+it) L(1, chi_{-D}) zeta_K(1+2it)` is the residue of the completed
/// function at `1 + it`. With that term restored, `R(chi) = 4 |zeta(1+2it)|^2 / cosh(pi t)`
/// for every `chi`.
pub fn eisenstein_waldspurger(group: &ClassGroup, chi: &ClassCharacter, t: f64) -> Result<WaldspurgerOutcome> {
    if t == 0.0 {
        return Err(Error::Singular("E(z, 1/2) vanishes identically".into()));
    }
    let s = Complex64::new(0.5, t);
    let d = group.d() as f64;
    let gamma = GammaFactor::rankin_theta(t, d * d);
    let need = gamma.required_length(1.0)?;
    let theta = theta_coefficients(group, chi, need)?;
    let coeffs = rankin_selberg_coeffs(&eisenstein_eigenvalues(t, need), &theta);
    let mut l = gamma.central_value(&coeffs, 1.0)?;
    let linf_half = 2.0 / (PI * t).cosh();
    if chi.is_trivial() {
        let disc = -(group.d() as i64);
        let one_it = Complex64::new(1.0, t);
        let two_it = Complex64::new(1.0, 2.0 * t);
        let zeta_k = zeta(two_it) * dirichlet_l(two_it, disc)?;
        let r_k = dirichlet_l(Complex64::new(1.0, 0.0), disc)?.re;
        let residue = (one_it * d.ln() + gamma.log_eval(one_it)?).exp() * r_k * zeta_k;
        l -= 4.0 * (residue / s).re / (d.sqrt() * linf_half);
    }
    let lambda_half = linf_half * l;
    let mut weyl = Complex64::default();
    for (j, f) in group.forms.iter().enumerate() {
        weyl += chi.value(j) * eisenstein_level1_reduced(f.tau(), s)?;
    }
    let weyl = weyl.norm();
    if weyl < WEYL_FLOOR {
        return Ok(WaldspurgerOutcome::Skipped { lambda_half, weyl });
    }
    Ok(WaldspurgerOutcome::Ratio { ratio: lambda_half * d.sqrt() / (weyl * weyl), lambda_half, weyl })
}

/// `4 |zeta(1+2it)|^2 / cosh(pi t)`.
pub fn eisenstein_waldspurger_constant(t: f64) -> f64 {
    4.0 * zeta(Complex64::new(1.0, 2.0 * t)).norm_sqr() / (PI * t).cosh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heegner::random_gamma0;
    use crate::quadforms::Mat2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mobius(m: &Mat2, z: Complex64) -> Complex64 {
        (z * m[0][0] as f64 + m[0][1] as f64) / (z * m[1][0] as f64 + m[1][1] as f64)
    }

    /// `(1/2) sum_{gcd(c,d)=1, l | c} y^s / |cz + d|^{2s}` over `max(|c|,|d|) <= m`,
    /// extrapolated in `m` (tail ~ m^{2 - 2 Re s}).
    fn coset_sum(z: Complex64, s: f64, l: i64) -> f64 {
        let partial = |m: i64| {
            let mut acc = 0.0;
            for c in (-m..=m).filter(|c| c % l == 0) {
                for d in -m..=m {
                    if crate::arith::gcd(c, d) == 1 {
                        acc += z.im.powf(s) / (z * c as f64 + d as f64).norm_sqr().powf(s);
                    }
                }
            }
            acc / 2.0
        };
        let (a, b) = (partial(400), partial(800));
        let p = 2.0 * s - 2.0;
        (b * 2f64.powf(p) - a) / (2f64.powf(p) - 1.0)
    }

    #[test]
    fn level1_lattice_oracle() {
        let s = Complex64::new(2.0, 0.0);
        let z = Complex64::new(0.0, 1.0);
        let e = eisenstein_level1(z, s).unwrap();
        let oracle = coset_sum(z, 2.0, 1);
        assert!((e.re - oracle).abs() < 1e-6 && e.im.abs() < 1e-12, "{e} {oracle}");
        // the full lattice sum carries the factor zeta(2s)
        let zeta4 = PI.powi(4) / 90.0;
        let lattice = {
            let m = 600i64;
            let mut acc = 0.0;
            for c in -m..=m {
                for d in -m..=m {
                    if c != 0 || d != 0 {
                        acc += 1.0 / ((c * c + d * d) as f64).powi(2);
                    }
                }
            }
            acc / 2.0
        };
        assert!((lattice - zeta4 * e.re).abs() < 1e-4);
    }

    #[test]
    fn level1_invariance() {
        let s = Complex64::new(0.5, 2.0);
        let z = Complex64::new(0.3, 1.1);
        let a = eisenstein_level1(z, s).unwrap();
        let b = eisenstein_level1(-z.inv(), s).unwrap();
        assert!((a - b).norm() < 1e-8, "{a} {b}");
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 50 {
            let m = random_gamma0(1, |lo, hi| rng.gen_range(lo..=hi));
            let z = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..1.5));
            let w = mobius(&m, z);
            if w.im < 0.06 {
                continue;
            }
            let s = Complex64::new(rng.gen_range(0.5..1.5), rng.gen_range(-4.0..4.0));
            let a = eisenstein_level1(z, s).unwrap();
            let b = eisenstein_level1(w, s).unwrap();
            assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()), "{z} {w} {s}: {a} {b}");
            done += 1;
        }
    }

    #[test]
    fn constant_term() {
        let s = Complex64::new(2.0, 0.0);
        let y = 2.0;
        let (v, _) = crate::specfun::integrate_real(
            |x| eisenstein_level1(Complex64::new(x, y), s).unwrap().re,
            crate::specfun::Domain::Finite(0.0, 1.0),
            &Default::default(),
        )
        .unwrap();
        let expect = y * y + scattering(s).unwrap().re / y;
        assert!((v - expect).abs() < 1e-7);
        // phi(2) = sqrt(pi) Gamma(3/2) zeta(3) / (Gamma(2) zeta(4))
        let phi2 = PI.sqrt() * 0.5 * PI.sqrt() * 1.2020569031595942 / (PI.powi(4) / 90.0);
        assert!((scattering(s).unwrap().re - phi2).abs() < 1e-12);
    }

    #[test]
    fn levelq_direct_sum() {
        let s = Complex64::new(2.0, 0.0);
        let z = Complex64::new(0.2, 1.3);
        for q in [2u64, 3, 5] {
            let e = eisenstein_levelq(z, s, q, Cusp::Infinity).unwrap();
            let oracle = coset_sum(z, 2.0, q as i64);
            assert!((e.re - oracle).abs() < 1e-6, "q={q}: {e} {oracle}");
        }
    }

    #[test]
    fn levelq_fricke_and_cusp_sum() {
        let s = Complex64::new(0.5, 1.7);
        for q in [2u64, 3, 7] {
            for z in [Complex64::new(0.13, 0.4), Complex64::new(-0.3, 0.9)] {
                let w = -(z * q as f64).inv();
                let a = eisenstein_levelq(w, s, q, Cusp::Infinity).unwrap();
                let b = eisenstein_levelq(z, s, q, Cusp::Zero).unwrap();
                assert!((a - b).norm() < 1e-7 * (1.0 + a.norm()));
                let sum = eisenstein_levelq(z, s, q, Cusp::Infinity).unwrap() + b;
                let qs = (s * (q as f64).ln()).exp();
                let expect = (eisenstein_level1_reduced(z, s).unwrap() + eisenstein_level1_reduced(z * q as f64, s).unwrap()) / (qs + 1.0);
                assert!((sum - expect).norm() < 1e-9 * (1.0 + sum.norm()));
            }
        }
    }

    #[test]
    fn levelq_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = Complex64::new(0.5, 3.0);
        for q in [2u64, 5, 11] {
            for _ in 0..50 {
                let m = random_gamma0(q, |lo, hi| rng.gen_range(lo..=hi));
                let z = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.2..1.5));
                for cusp in [Cusp::Infinity, Cusp::Zero] {
                    let a = eisenstein_levelq(z, s, q, cusp).unwrap();
                    let b = eisenstein_levelq(mobius(&m, z), s, q, cusp).unwrap();
                    assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()));
                }
            }
        }
    }

    #[test]
    fn gz_constant() {
        let k0 = gz_ratio(7, 1, 1.0).unwrap().kappa;
        assert!(k0 <= 10.0);
        assert!((k0 - gz_kappa_expected(1, 1.0)).abs() < 1e-8);
        for (d, t) in [(23u64, 1.0), (31, 2.0), (47, 0.4), (103, 5.0)] {
            let k = gz_ratio(d, 1, t).unwrap().kappa;
            assert!((k / k0 - 1.0).abs() < 1e-4, "D={d} t={t}: {k} vs {k0}");
        }
        for (d, q, t) in [(23u64, 2u64, 1.0), (31, 5, 2.0), (47, 3, 0.7), (7, 2, 3.0)] {
            let r = gz_ratio(d, q, t).unwrap();
            assert!(r.kappa <= 10.0);
            assert!((r.kappa / gz_kappa_expected(q, t) - 1.0).abs() < 1e-6, "D={d} q={q}");
        }
    }

    #[test]
    fn eisenstein_waldspurger_all_characters() {
        for (d, t) in [(23u64, 1.0), (31, 1.0), (23, 2.5)] {
            let group = ClassGroup::new(d).unwrap();
            let c = eisenstein_waldspurger_constant(t);
            for chi in group.characters() {
                let r = eisenstein_waldspurger(&group, &chi, t).unwrap().ratio().unwrap();
                assert!((r / c - 1.0).abs() < 1e-6, "D={d} t={t} trivial={}: {r} vs {c}", chi.is_trivial());
            }
        }
    }

    #[test]
    fn weyl_conjugation() {
        for (d, q) in [(23u64, 1u64), (23, 2), (31, 5)] {
            let a = weyl_sum_eisenstein(d, q, 1.5).unwrap();
            let b = weyl_sum_eisenstein(d, q, -1.5).unwrap();
            assert!((a - b.conj()).norm() < 1e-10 * (1.0 + a.norm()));
        }
    }
}
