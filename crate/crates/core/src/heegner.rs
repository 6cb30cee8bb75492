//! Heegner points of level `q`, their Galois orbits, the Fricke involution and
//! the distribution of an orbit over the cosets `Gamma_0(q) \ SL2(Z)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, kronecker, mod_inverse};
use crate::quadforms::{compose_raw, mat_mul, reduce_with_matrix, ClassGroup, Mat2, QuadForm};
use crate::{Complex64, Error, Result};

/// A point of `P^1(F_q)`: either `(0 : 1)` or `(1 : d)` with `0 <= d < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CosetLabel {
    pub c: u64,
    pub d: u64,
}

impl CosetLabel {
    pub const INFINITY: CosetLabel = CosetLabel { c: 0, d: 1 };

    /// Normalize a bottom row `(c, d)` of an `SL2(Z)` matrix.
    pub fn from_row(c: i64, d: i64, q: u64) -> CosetLabel {
        let qi = q as i64;
        let c = c.rem_euclid(qi);
        if c == 0 {
            return CosetLabel::INFINITY;
        }
        let cinv = mod_inverse(c, qi).expect("bottom row is primitive");
        CosetLabel { c: 1, d: (d.rem_euclid(qi) * cinv).rem_euclid(qi) as u64 }
    }

    /// All `q + 1` labels: `(0:1)` first, then `(1:0), ..., (1:q-1)`.
    pub fn all(q: u64) -> Vec<CosetLabel> {
        std::iter::once(CosetLabel::INFINITY)
            .chain((0..q).map(|d| CosetLabel { c: 1, d }))
            .collect()
    }

    /// Position in [`CosetLabel::all`].
    pub fn position(&self) -> usize {
        if self.c == 0 {
            0
        } else {
            1 + self.d as usize
        }
    }

    /// A fixed matrix in `SL2(Z)` with this bottom row.
    pub fn matrix(&self) -> Mat2 {
        if self.c == 0 {
            [[1, 0], [0, 1]]
        } else {
            [[0, -1], [1, self.d as i64]]
        }
    }
}

impl fmt::Display for CosetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.c, self.d)
    }
}

/// A Heegner point: `q | a`, `b = r mod 2q`, `b^2 - 4ac = -D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeegnerPoint {
    pub form: QuadForm,
    pub r: i64,
    pub q: u64,
    pub d: u64,
    /// Class of `form` in the class group (index into `ClassGroup::forms`).
    pub class: usize,
    pub label: CosetLabel,
    /// Reduced level-one form, whose root lies in the standard fundamental domain.
    pub reduced: QuadForm,
}

impl HeegnerPoint {
    pub fn tau(&self) -> Complex64 {
        self.form.tau()
    }

    /// The point moved into the standard fundamental domain.
    pub fn tau_reduced(&self) -> Complex64 {
        self.reduced.tau()
    }
}

/// The two square roots `r` of `-D` modulo `4q`, taken in `[0, 2q)`, smallest first.
pub fn roots(d: u64, q: u64) -> Vec<i64> {
    let (m, disc) = (4 * q as i128, -(d as i128));
    (0..2 * q as i128)
        .filter(|&r| (r * r - disc).rem_euclid(m) == 0)
        .map(|r| r as i64)
        .collect()
}

pub(crate) fn check_admissible(d: u64, q: u64) -> Result<()> {
    let disc = -(d as i64);
    if d <= 4 || d % 2 == 0 || !crate::arith::is_fundamental_discriminant(disc) {
        return Err(Error::NotFundamental(disc));
    }
    if !is_prime(q) {
        return Err(Error::InvalidModulus(q as i64, "level must be prime"));
    }
    let symbol = kronecker(disc, q as i64);
    if symbol != 1 {
        return Err(Error::NotSplit { q: q as i64, disc, symbol });
    }
    Ok(())
}

/// The reduced form of `f` and `gamma` in `SL2(Z)` with `tau_f = gamma . tau_reduced`.
fn label_of(f: &QuadForm, q: u64) -> (QuadForm, CosetLabel) {
    let (g, m) = reduce_with_matrix(f).expect("valid form");
    (g, CosetLabel::from_row(m[1][0], m[1][1], q))
}

/// Canonical representative `gamma_label . tau_reduced`, with `b` in `(-a, a]`.
fn canonical(f: &QuadForm, q: u64, group: &ClassGroup, r: i64) -> Result<HeegnerPoint> {
    let (reduced, label) = label_of(f, q);
    let m = label.matrix();
    let minv = [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]];
    let mut g = reduced.act(&minv);
    let two_a = 2 * g.a;
    let k = (g.a - g.b).div_euclid(two_a);
    g = g.act(&[[1, k], [0, 1]]);
    debug_assert_eq!(g.a % q as i64, 0);
    debug_assert_eq!((g.b - r).rem_euclid(2 * q as i64), 0);
    Ok(HeegnerPoint {
        form: g,
        r,
        q,
        d: group.d(),
        class: group.index_of(&reduced)?,
        label,
        reduced,
    })
}

/// An `SL2(Z)`-equivalent form whose leading coefficient is prime to `m`.
pub fn form_prime_to(f: &QuadForm, m: i64) -> QuadForm {
    if gcd(f.a, m) == 1 {
        return *f;
    }
    for size in 1i64.. {
        for x in -size..=size {
            for y in [size, -size].into_iter().chain(-size + 1..size) {
                if (x.abs() != size && y.abs() != size) || gcd(x, y) != 1 {
                    continue;
                }
                if gcd(f.eval(x, y), m) == 1 {
                    let (_, u, v) = crate::arith::ext_gcd(x, y);
                    // x u + y v = 1, so [[x, -v], [y, u]] has determinant 1
                    return f.act(&[[x, -v], [y, u]]);
                }
            }
        }
    }
    unreachable!()
}

fn orbit(group: &ClassGroup, q: u64, r: i64) -> Result<Vec<HeegnerPoint>> {
    let d = group.d() as i64;
    let qi = q as i64;
    let base = QuadForm::new(qi, r, (r * r + d) / (4 * qi))?;
    group
        .forms
        .iter()
        .map(|f| {
            let g = form_prime_to(f, qi);
            canonical(&compose_raw(&g, &base)?, q, group, r)
        })
        .collect()
}

/// Both Galois orbits of Heegner points, for the roots `r_min` and `-r_min`.
pub fn heegner_points(d: u64, q: u64) -> Result<[Vec<HeegnerPoint>; 2]> {
    check_admissible(d, q)?;
    let group = ClassGroup::new(d)?;
    heegner_points_with(&group, q)
}

/// As [`heegner_points`] with a precomputed class group.
pub fn heegner_points_with(group: &ClassGroup, q: u64) -> Result<[Vec<HeegnerPoint>; 2]> {
    check_admissible(group.d(), q)?;
    let rs = roots(group.d(), q);
    Ok([orbit(group, q, rs[0])?, orbit(group, q, rs[1])?])
}

/// The point of the same root whose class is `[g] [P]`.
pub fn galois_act(group: &ClassGroup, g: &QuadForm, p: &HeegnerPoint) -> Result<HeegnerPoint> {
    if g.disc() != p.form.disc() {
        return Err(Error::DiscriminantMismatch(p.form.disc(), g.disc()));
    }
    let g = form_prime_to(g, p.form.a);
    canonical(&compose_raw(&g, &p.form)?, p.q, group, p.r)
}

/// `z -> -1/(q z)`, which sends `(a, b, c)` to `(c q, -b, a / q)`.
pub fn fricke(group: &ClassGroup, p: &HeegnerPoint) -> Result<HeegnerPoint> {
    let q = p.q as i64;
    let f = QuadForm::new(p.form.c * q, -p.form.b, p.form.a / q)?;
    canonical(&f, p.q, group, (-p.r).rem_euclid(2 * q))
}

const EDGE: f64 = 1e-10;

/// Label of an arbitrary upper half plane point, by floating point reduction.
pub fn coset_label(tau: Complex64, q: u64) -> Result<CosetLabel> {
    if tau.im <= 0.0 || !tau.is_finite() {
        return Err(Error::InvalidArgument(format!("{tau} is not in the upper half plane")));
    }
    // z_F = n . tau
    let mut n: Mat2 = [[1, 0], [0, 1]];
    let mut z = tau;
    for _ in 0..10_000 {
        // same tie-breaking as reduced forms: Re z in [-1/2, 1/2), Re z <= 0 on |z| = 1
        let k = (z.re + 0.5 + EDGE).floor();
        if k != 0.0 {
            z.re -= k;
            n = mat_mul(&[[1, -(k as i64)], [0, 1]], &n);
        }
        let r2 = z.norm_sqr();
        if r2 < 1.0 - EDGE || (r2 < 1.0 + EDGE && z.re > EDGE) {
            z = -z.inv();
            n = mat_mul(&[[0, -1], [1, 0]], &n);
        } else {
            // tau = n^{-1} z, and n^{-1} has bottom row (-n10, n00)
            return Ok(CosetLabel::from_row(-n[1][0], n[0][0], q));
        }
    }
    Err(Error::NoConvergence(10_000))
}

/// Which of the two orbits to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orbit {
    /// Root `r_min`, the smallest root in `[0, 2q)`.
    Plus,
    /// Root `-r_min`.
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistReport {
    pub d: u64,
    pub q: u64,
    pub h: u64,
    pub r: i64,
    pub labels: Vec<CosetLabel>,
    pub counts: Vec<u64>,
    pub discrepancy: f64,
}

pub fn count_labels(points: &[HeegnerPoint], q: u64) -> EquidistReport {
    let labels = CosetLabel::all(q);
    let mut counts = vec![0u64; labels.len()];
    for p in points {
        counts[p.label.position()] += 1;
    }
    let h = points.len() as u64;
    let expect = 1.0 / (q + 1) as f64;
    let discrepancy = counts
        .iter()
        .map(|&n| (n as f64 / h as f64 - expect).abs())
        .fold(0.0, f64::max);
    EquidistReport {
        d: points.first().map_or(0, |p| p.d),
        q,
        h,
        r: points.first().map_or(0, |p| p.r),
        labels,
        counts,
        discrepancy,
    }
}

pub fn equidist_counts(d: u64, q: u64, orbit: Orbit) -> Result<EquidistReport> {
    let [plus, minus] = heegner_points(d, q)?;
    Ok(count_labels(if orbit == Orbit::Plus { &plus } else { &minus }, q))
}

/// `sum_sigma U_q(tau^sigma)` where `U_q` is `u` placed on the translate of
/// the fundamental domain with the given label.
pub fn smooth_weyl_sum<U: Fn(Complex64) -> f64>(
    d: u64,
    q: u64,
    u: U,
    label: CosetLabel,
    orbit: Orbit,
) -> Result<f64> {
    let [plus, minus] = heegner_points(d, q)?;
    let pts = if orbit == Orbit::Plus { plus } else { minus };
    Ok(pts
        .iter()
        .filter(|p| p.label == label)
        .map(|p| u(p.tau_reduced()))
        .sum())
}

/// Random element of `Gamma_0(q)` with entries of moderate size.
pub fn random_gamma0<R: FnMut(i64, i64) -> i64>(q: u64, mut rand: R) -> Mat2 {
    let q = q as i64;
    loop {
        let c = q * rand(-6, 7);
        let d = rand(-20, 21);
        if gcd(c, d) != 1 {
            continue;
        }
        let (_, x, y) = crate::arith::ext_gcd(d, c);
        // a d - b c = 1 with a = x, b = -y
        let k = rand(-3, 4);
        let (a, b) = (x + k * c, -y + k * d);
        return [[a, b], [c, d]];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c).unwrap()
    }

    fn mobius(m: &Mat2, z: Complex64) -> Complex64 {
        (z * m[0][0] as f64 + m[0][1] as f64) / (z * m[1][0] as f64 + m[1][1] as f64)
    }

    #[test]
    fn heegner_examples() {
        let [o1, o2] = heegner_points(23, 2).unwrap();
        assert_eq!((o1.len(), o2.len()), (3, 3));
        assert_eq!(o1[0].r, 1);
        assert!(o1.iter().any(|p| p.form == f(2, 1, 3)));
        let [a, b] = heegner_points(7, 2).unwrap();
        assert_eq!((a.len(), b.len()), (1, 1));
        assert!(matches!(heegner_points(23, 5), Err(Error::NotSplit { symbol: -1, .. })));
        assert!(heegner_points(20, 3).is_err());
        assert!(heegner_points(23, 4).is_err());
    }

    #[test]
    fn points_satisfy_level_structure() {
        for (d, q) in [(23u64, 2u64), (23, 3), (71, 2), (47, 7), (31, 5), (1155 + 4 * 0, 13)] {
            let Ok(orbits) = heegner_points(d, q) else { continue };
            for pts in &orbits {
                for p in pts {
                    assert_eq!(p.form.a % q as i64, 0);
                    assert_eq!(p.form.disc(), -(d as i64));
                    assert_eq!((p.form.b - p.r).rem_euclid(2 * q as i64), 0);
                    assert_eq!((p.r * p.r + d as i64).rem_euclid(4 * q as i64), 0);
                }
            }
        }
    }

    #[test]
    fn galois_action_examples() {
        let group = ClassGroup::new(23).unwrap();
        let [orbit, _] = heegner_points(23, 2).unwrap();
        let p = orbit[0];
        assert_eq!(galois_act(&group, &f(1, 1, 6), &p).unwrap(), p);
        let g = f(2, 1, 3);
        let mut x = p;
        for _ in 0..3 {
            x = galois_act(&group, &g, &x).unwrap();
        }
        assert_eq!(x, p);
        assert_ne!(galois_act(&group, &g, &p).unwrap(), p);
    }

    #[test]
    fn fricke_examples() {
        let group = ClassGroup::new(23).unwrap();
        let [orbit, other] = heegner_points(23, 2).unwrap();
        let p = *orbit.iter().find(|p| p.form == f(2, 1, 3)).unwrap();
        let w = fricke(&group, &p).unwrap();
        assert_eq!(w.r, 3);
        assert_eq!((w.form.b + 1).rem_euclid(4), 0);
        // the literal image (6, -1, 1) is Gamma_0(2)-equivalent to the canonical one
        let raw = f(6, -1, 1);
        assert_eq!(label_of(&raw, 2), (w.reduced, w.label));
        assert!(other.contains(&w));
        assert_eq!(fricke(&group, &w).unwrap(), p);
        let tau = p.tau();
        let image = -(tau * 2.0).inv();
        assert!((image - raw.tau()).norm() < 1e-12);
    }

    #[test]
    fn coset_label_examples() {
        let tau = Complex64::new(-1.0, 23f64.sqrt()) / 4.0;
        assert_eq!(coset_label(tau, 2).unwrap(), CosetLabel::INFINITY);
        for q in [2, 3, 5, 7] {
            assert_eq!(coset_label(Complex64::new(0.0, 1e6), q).unwrap(), CosetLabel::INFINITY);
        }
        assert!(coset_label(Complex64::new(0.0, -1.0), 2).is_err());
    }

    #[test]
    fn coset_label_is_gamma0_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2u64, 3, 5, 7, 11, 13] {
            for _ in 0..20 {
                let tau = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..2.0));
                let want = coset_label(tau, q).unwrap();
                for _ in 0..20 {
                    let delta = random_gamma0(q, |lo, hi| rng.gen_range(lo..hi));
                    let moved = mobius(&delta, tau);
                    assert_eq!(coset_label(moved, q).unwrap(), want, "q={q} tau={tau}");
                }
            }
        }
    }

    #[test]
    fn exact_and_float_labels_agree() {
        for (d, q) in [(71u64, 2u64), (47, 3), (311, 5), (479, 7)] {
            for pts in heegner_points(d, q).unwrap() {
                for p in pts {
                    assert_eq!(coset_label(p.tau(), q).unwrap(), p.label);
                    assert!((p.tau_reduced().norm() >= 1.0 - 1e-12) && p.tau_reduced().re.abs() <= 0.5 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn exact_label_invariant_under_gamma0() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (d, q) in [(71u64, 2u64), (47, 3), (311, 5)] {
            for p in &heegner_points(d, q).unwrap()[0] {
                for _ in 0..100 {
                    let delta = random_gamma0(q, |lo, hi| rng.gen_range(lo..hi));
                    // tau_new = delta tau  <=>  form_new = form o delta^{-1}
                    let inv = [[delta[1][1], -delta[0][1]], [-delta[1][0], delta[0][0]]];
                    let g = p.form.act(&inv);
                    assert_eq!(label_of(&g, q).1, p.label);
                }
            }
        }
    }

    #[test]
    fn orbits_are_simply_transitive() {
        for d in (5..2000u64).filter(|&d| d % 2 == 1 && crate::arith::is_fundamental_discriminant(-(d as i64))).step_by(5) {
            let group = ClassGroup::new(d).unwrap();
            for q in [2u64, 3, 5, 7, 11, 13] {
                let Ok([plus, minus]) = heegner_points_with(&group, q) else { continue };
                let h = group.h();
                for pts in [&plus, &minus] {
                    assert_eq!(pts.len(), h);
                    let mut classes: Vec<usize> = pts.iter().map(|p| p.class).collect();
                    classes.sort_unstable();
                    classes.dedup();
                    assert_eq!(classes.len(), h);
                    for p in pts.iter().take(3) {
                        for (j, g) in group.forms.iter().enumerate() {
                            let x = galois_act(&group, g, p).unwrap();
                            assert_eq!(x.class, group.mul(j, p.class));
                            assert!(pts.contains(&x));
                        }
                    }
                }
                for p in &plus {
                    let w = fricke(&group, p).unwrap();
                    assert!(minus.contains(&w));
                    assert_eq!(fricke(&group, &w).unwrap(), *p);
                }
                let report = count_labels(&plus, q);
                assert_eq!(report.counts.iter().sum::<u64>(), h as u64);
                assert_eq!(report.labels.len(), q as usize + 1);
            }
        }
    }

    #[test]
    fn equidist_and_weyl_sum() {
        let rep = equidist_counts(23, 2, Orbit::Plus).unwrap();
        assert_eq!(rep.counts.iter().sum::<u64>(), 3);
        let other = equidist_counts(23, 2, Orbit::Minus).unwrap();
        assert_eq!(other.counts.iter().sum::<u64>(), 3);

        for label in CosetLabel::all(2) {
            assert_eq!(smooth_weyl_sum(23, 2, |_| 0.0, label, Orbit::Plus).unwrap(), 0.0);
            let ones = smooth_weyl_sum(23, 2, |_| 1.0, label, Orbit::Plus).unwrap();
            assert_eq!(ones, rep.counts[label.position()] as f64);
        }

        let rho = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
        let bump = |z: Complex64| (-(z - rho).norm_sqr()).exp().min(0.9);
        let [plus, _] = heegner_points(23, 2).unwrap();
        let total: f64 = CosetLabel::all(2)
            .into_iter()
            .map(|l| smooth_weyl_sum(23, 2, bump, l, Orbit::Plus).unwrap())
            .sum();
        let direct: f64 = plus
            .iter()
            .map(|p| {
                let (g, _) = reduce_with_matrix(&p.form).unwrap();
                bump(g.tau())
            })
            .sum();
        assert!((total - direct).abs() < 1e-12);
    }
}
