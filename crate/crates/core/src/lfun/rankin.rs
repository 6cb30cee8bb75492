use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, kronecker};
use crate::heegner::heegner_points_with;
use crate::lfun::{maass_evaluate, CoefficientSeries, GammaFactor};
use crate::quadforms::{representation_counts_upto, ClassCharacter, ClassGroup};
use crate::{Complex64, Error, Result};

/// Coefficients `a_chi(n) = (1/2) sum_A chi(A) r_A(n)` of the weight one theta
/// series attached to a class group character; `coeffs[n-1] = a_chi(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSeries {
    pub d: u64,
    pub chi: ClassCharacter,
    pub coeffs: Vec<Complex64>,
}

pub fn theta_coefficients(group: &ClassGroup, chi: &ClassCharacter, n_max: usize) -> Result<ThetaSeries> {
    if chi.values.len() != group.h() {
        return Err(Error::InvalidArgument(format!(
            "character has {} values, class group has {} classes",
            chi.values.len(),
            group.h()
        )));
    }
    let mut coeffs = vec![Complex64::default(); n_max];
    for (j, f) in group.forms.iter().enumerate() {
        let w = chi.value(j) * 0.5;
        let r = representation_counts_upto(f, n_max);
        for n in 1..=n_max {
            if r[n] != 0 {
                coeffs[n - 1] += w * r[n] as f64;
            }
        }
    }
    let theta = ThetaSeries { d: group.d(), chi: chi.clone(), coeffs };
    if chi.is_trivial() {
        let disc = -(group.d() as i64);
        for n in 1..=n_max.min(200) as i64 {
            if gcd(n, disc) != 1 {
                continue;
            }
            let expect: i64 = (1..=n).filter(|k| n % k == 0).map(|k| kronecker(disc, k) as i64).sum();
            let got = theta.coeffs[n as usize - 1];
            if (got.re - expect as f64).abs() > 1e-9 || got.im.abs() > 1e-9 {
                return Err(Error::Singular(format!("theta coefficient {n}: {got} but divisor sum is {expect}")));
            }
        }
    }
    Ok(theta)
}

/// `a_chi(n)` as reals; they are real because `r_A = r_{A^{-1}}`.
pub fn theta_real(theta: &ThetaSeries) -> Vec<f64> {
    theta.coeffs.iter().map(|c| c.re).collect()
}

/// Dirichlet coefficients of `L(chi_{-D}, 2s) sum_n lambda(n) a_chi(n) n^{-s}`.
pub fn rankin_selberg_coeffs(lambda: &[f64], theta: &ThetaSeries) -> Vec<f64> {
    let n_max = lambda.len().min(theta.coeffs.len());
    let disc = -(theta.d as i64);
    let base: Vec<f64> = (0..n_max).map(|i| lambda[i] * theta.coeffs[i].re).collect();
    let mut out = vec![0.0; n_max];
    for m in 1..=n_max {
        let m2 = m * m;
        if m2 > n_max {
            break;
        }
        let chi = kronecker(disc, m as i64) as f64;
        if chi == 0.0 {
            continue;
        }
        for k in 1..=n_max / m2 {
            out[m2 * k - 1] += chi * base[k - 1];
        }
    }
    out
}

pub fn rankin_selberg_series(f: &CoefficientSeries, theta: &ThetaSeries, d: u64) -> Result<Vec<f64>> {
    if theta.d != d {
        return Err(Error::DiscriminantMismatch(-(theta.d as i64), -(d as i64)));
    }
    Ok(rankin_selberg_coeffs(&f.coeffs, theta))
}

/// Hecke eigenvalues `tau_{it}(n) = sum_{ab = n} (a/b)^{it}` of `E(z, 1/2 + it)`.
pub fn eisenstein_eigenvalues(t: f64, n_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_max];
    for a in 1..=n_max {
        for b in 1..=n_max / a {
            out[a * b - 1] += (t * (a as f64 / b as f64).ln()).cos();
        }
    }
    out
}

/// `sum_sigma chi(sigma) v_sigma` for every character in `chars`.
pub fn character_sums(chars: &[ClassCharacter], v: &[Complex64]) -> Vec<Complex64> {
    chars
        .iter()
        .map(|chi| v.iter().enumerate().map(|(j, &x)| chi.value(j) * x).sum())
        .collect()
}

/// Both sides of `sum_chi |sum_sigma chi(sigma) v_sigma|^2 = h sum_sigma |v_sigma|^2`.
pub fn plancherel_sides(group: &ClassGroup, v: &[Complex64]) -> Result<(f64, f64)> {
    if v.len() != group.h() {
        return Err(Error::InvalidArgument(format!("vector of length {} for h = {}", v.len(), group.h())));
    }
    let chars = group.characters();
    let lhs = character_sums(&chars, v).iter().map(|s| s.norm_sqr()).sum();
    let rhs = group.h() as f64 * v.iter().map(|x| x.norm_sqr()).sum::<f64>();
    Ok((lhs, rhs))
}

/// Smallest Weyl sum the ratio is computed for.
pub const WEYL_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WaldspurgerOutcome {
    /// `R(chi) = Lambda(f x Theta_chi, 1/2) sqrt(D) / |W|^2`.
    Ratio { ratio: f64, lambda_half: f64, weyl: f64 },
    /// The Weyl sum is below [`WEYL_FLOOR`].
    Skipped { lambda_half: f64, weyl: f64 },
}

impl WaldspurgerOutcome {
    pub fn ratio(&self) -> Option<f64> {
        match *self {
            WaldspurgerOutcome::Ratio { ratio, .. } => Some(ratio),
            WaldspurgerOutcome::Skipped { .. } => None,
        }
    }

    pub fn lambda_half(&self) -> f64 {
        match *self {
            WaldspurgerOutcome::Ratio { lambda_half, .. } | WaldspurgerOutcome::Skipped { lambda_half, .. } => lambda_half,
        }
    }
}

/// `Lambda(f x Theta_chi, 1/2) = L_inf(1/2) L(1/2)` with `L_inf(1/2) = 2/cosh(pi t)`,
/// from Hecke eigenvalues `lambda` of a form of level `q` and spectral parameter `t`.
/// `y` is the scale of the approximate functional equation (1 is balanced).
pub fn rankin_theta_lambda(lambda: &[f64], t: f64, q: u64, group: &ClassGroup, chi: &ClassCharacter, y: f64) -> Result<f64> {
    let d = group.d() as f64;
    let gamma = GammaFactor::rankin_theta(t, (q as f64 * d).powi(2));
    let need = gamma.required_length(y)?;
    if lambda.len() < need {
        return Err(Error::InsufficientCoefficients { have: lambda.len(), need });
    }
    let theta = theta_coefficients(group, chi, need)?;
    let coeffs = rankin_selberg_coeffs(&lambda[..need], &theta);
    let l = gamma.central_value(&coeffs, y)?;
    Ok(2.0 / (PI * t).cosh() * l)
}

/// Ratio from precomputed values `values[j] = f(tau_j)` at one Heegner point per class `j`.
pub fn waldspurger_from_values(
    values: &[Complex64],
    lambda: &[f64],
    t: f64,
    q: u64,
    group: &ClassGroup,
    chi: &ClassCharacter,
) -> Result<WaldspurgerOutcome> {
    if values.len() != group.h() {
        return Err(Error::InvalidArgument(format!("{} values for h = {}", values.len(), group.h())));
    }
    let weyl: Complex64 = values.iter().enumerate().map(|(j, &v)| chi.value(j) * v).sum();
    let lambda_half = rankin_theta_lambda(lambda, t, q, group, chi, 1.0)?;
    let weyl = weyl.norm();
    if weyl < WEYL_FLOOR {
        return Ok(WaldspurgerOutcome::Skipped { lambda_half, weyl });
    }
    let ratio = lambda_half * (group.d() as f64).sqrt() / (weyl * weyl);
    Ok(WaldspurgerOutcome::Ratio { ratio, lambda_half, weyl })
}

/// `f(tau^sigma)` for the classes of `group`: reduced points at level one, the
/// `r_min` Heegner orbit at prime level.
pub fn heegner_values(f: &CoefficientSeries, group: &ClassGroup) -> Result<Vec<Complex64>> {
    let mut values = vec![Complex64::default(); group.h()];
    if f.level == 1 {
        for (j, form) in group.forms.iter().enumerate() {
            values[j] = maass_evaluate(f, form.tau())?.into();
        }
    } else {
        let [orbit, _] = heegner_points_with(group, f.level)?;
        for p in &orbit {
            values[p.class] = maass_evaluate(f, p.tau())?.into();
        }
    }
    Ok(values)
}

/// `R(chi)` for a Maass form of level one or prime level.
pub fn waldspurger_ratio(f: &CoefficientSeries, group: &ClassGroup, chi: &ClassCharacter) -> Result<WaldspurgerOutcome> {
    let values = heegner_values(f, group)?;
    waldspurger_from_values(&values, &f.coeffs, f.t, f.level, group, chi)
}
