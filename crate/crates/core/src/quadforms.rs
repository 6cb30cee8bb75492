//! Positive definite binary quadratic forms, reduction, composition and
//! class groups of imaginary quadratic fields.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith::{e_frac, ext_gcd, gcd3, is_fundamental_discriminant};
use crate::{Complex64, Error, Result};

/// `2x2` integer matrix `[[p, q], [r, s]]`, stored row-major.
pub type Mat2 = [[i64; 2]; 2];

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        [
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
        ],
        [
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        ],
    ]
}

pub fn mat_det(x: &Mat2) -> i64 {
    x[0][0] * x[1][1] - x[0][1] * x[1][0]
}

/// The form `a x^2 + b x y + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    /// Checked constructor: requires `a > 0` and negative discriminant.
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = QuadForm { a, b, c };
        if a <= 0 {
            return Err(Error::InvalidForm { a, b, c, reason: "leading coefficient must be positive" });
        }
        if f.disc() >= 0 {
            return Err(Error::InvalidForm { a, b, c, reason: "discriminant must be negative" });
        }
        Ok(f)
    }

    /// Form with leading coefficient `a`, middle `b` and the given discriminant.
    pub fn from_ab(a: i64, b: i64, disc: i64) -> Result<Self> {
        let num = b as i128 * b as i128 - disc as i128;
        if a <= 0 || num % (4 * a as i128) != 0 {
            return Err(Error::InvalidForm { a, b, c: 0, reason: "b^2 - disc not divisible by 4a" });
        }
        QuadForm::new(a, b, (num / (4 * a as i128)) as i64)
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    pub fn is_primitive(&self) -> bool {
        gcd3(self.a, self.b, self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// The root of `f(tau, 1) = 0` in the upper half plane.
    pub fn tau(&self) -> Complex64 {
        let sqrt_d = (-(self.disc() as f64)).sqrt();
        Complex64::new(-self.b as f64, sqrt_d) / (2.0 * self.a as f64)
    }

    /// `(f o M)(x, y) = f(p x + q y, r x + s y)`.
    pub fn act(&self, m: &Mat2) -> QuadForm {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (p, q, r, s) = (m[0][0] as i128, m[0][1] as i128, m[1][0] as i128, m[1][1] as i128);
        QuadForm {
            a: (a * p * p + b * p * r + c * r * r) as i64,
            b: (2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s) as i64,
            c: (a * q * q + b * q * s + c * s * s) as i64,
        }
    }

    /// The opposite form `(a, -b, c)`, inverse in the class group.
    pub fn inverse(&self) -> QuadForm {
        QuadForm { a: self.a, b: -self.b, c: self.c }
    }

    /// Principal form of discriminant `disc`.
    pub fn principal(disc: i64) -> QuadForm {
        let b = disc.rem_euclid(2);
        QuadForm { a: 1, b, c: (b * b - disc) / 4 }
    }
}

/// Reduce `f` and return the reduced form `g` together with `M` in `SL2(Z)`
/// satisfying `g = f o M`, equivalently `tau_f = M . tau_g`.
pub fn reduce_with_matrix(f: &QuadForm) -> Result<(QuadForm, Mat2)> {
    QuadForm::new(f.a, f.b, f.c)?;
    let mut g = *f;
    let mut m = IDENTITY;
    loop {
        // translate b into (-a, a]
        let two_a = 2 * g.a;
        let k = (g.a - g.b).div_euclid(two_a);
        if k != 0 {
            let t = [[1, k], [0, 1]];
            g = g.act(&t);
            m = mat_mul(&m, &t);
        }
        if g.a > g.c || (g.a == g.c && g.b < 0) {
            let s = [[0, -1], [1, 0]];
            g = g.act(&s);
            m = mat_mul(&m, &s);
            continue;
        }
        break;
    }
    debug_assert!(g.is_reduced());
    Ok((g, m))
}

pub fn reduce(f: &QuadForm) -> Result<QuadForm> {
    reduce_with_matrix(f).map(|(g, _)| g)
}

/// Dirichlet composition without reduction.
///
/// With `s = (b1 + b2)/2` and `d = gcd(a1, a2, s) = u a1 + v a2 + w s`, the
/// result is `(a1 a2 / d^2, B, C)` where `B = b2 + 2 (a2/d)(v (b1 - b2)/2 - w c2)`
/// taken modulo `2 a3`.
pub fn compose_raw(f1: &QuadForm, f2: &QuadForm) -> Result<QuadForm> {
    let disc = f1.disc();
    if disc != f2.disc() {
        return Err(Error::DiscriminantMismatch(disc, f2.disc()));
    }
    let s = (f1.b + f2.b) / 2;
    let (g1, _, v1) = ext_gcd(f1.a, f2.a);
    let (d, x, w) = ext_gcd(g1, s);
    let v = x as i128 * v1 as i128;
    let a3 = (f1.a as i128 / d as i128) * (f2.a as i128 / d as i128);
    let half_diff = (f1.b as i128 - f2.b as i128) / 2;
    let big = f2.b as i128
        + 2 * (f2.a as i128 / d as i128) * (v * half_diff - w as i128 * f2.c as i128);
    let two_a3 = 2 * a3;
    // bring B into (-a3, a3]
    let mut b3 = big.rem_euclid(two_a3);
    if b3 > a3 {
        b3 -= two_a3;
    }
    let a3 = i64::try_from(a3).map_err(|_| Error::TooLarge("composed form".into()))?;
    QuadForm::from_ab(a3, b3 as i64, disc)
}

/// Reduced representative of the composition of two classes.
pub fn compose(f1: &QuadForm, f2: &QuadForm) -> Result<QuadForm> {
    reduce(&compose_raw(f1, f2)?)
}

/// Number of `(x, y)` in `Z^2` with `f(x, y) = n`.
pub fn representation_count(f: &QuadForm, n: u64) -> u64 {
    let d = -(f.disc() as i128);
    let n = n as i128;
    let (a, b) = (f.a as i128, f.b as i128);
    // 4 a f(x, y) = (2 a x + b y)^2 + D y^2
    let ymax = ((4 * a * n) as f64 / d as f64).sqrt() as i128 + 1;
    let mut count = 0;
    for y in -ymax..=ymax {
        let rest = 4 * a * n - d * y * y;
        if rest < 0 {
            continue;
        }
        let s = isqrt(rest as u128) as i128;
        if s * s != rest {
            continue;
        }
        for root in if s == 0 { vec![0] } else { vec![s, -s] } {
            let num = root - b * y;
            if num % (2 * a) == 0 {
                count += 1;
            }
        }
    }
    count
}

/// `r_f(n)` for all `0 <= n <= nmax` by enumerating lattice points.
pub fn representation_counts_upto(f: &QuadForm, nmax: usize) -> Vec<u32> {
    let mut out = vec![0u32; nmax + 1];
    let d = -(f.disc() as f64);
    let (a, b, c) = (f.a as i128, f.b as i128, f.c as i128);
    let ymax = ((4.0 * f.a as f64 * nmax as f64) / d).sqrt() as i128 + 1;
    for y in -ymax..=ymax {
        // a x^2 + b y x + c y^2 <= nmax; centre x0 = -b y / (2a)
        let x0 = -(b * y) as f64 / (2.0 * a as f64);
        let rest = 4.0 * a as f64 * nmax as f64 - d * (y * y) as f64;
        if rest < 0.0 {
            continue;
        }
        let half = rest.sqrt() / (2.0 * a as f64) + 1.0;
        let lo = (x0 - half).floor() as i128;
        let hi = (x0 + half).ceil() as i128;
        for x in lo..=hi {
            let v = a * x * x + b * x * y + c * y * y;
            if v >= 0 && (v as usize) <= nmax {
                out[v as usize] += 1;
            }
        }
    }
    out
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// All reduced primitive forms of discriminant `disc < 0`, ordered by `(a, b)`.
pub fn reduced_forms(disc: i64) -> Vec<QuadForm> {
    let d = -disc;
    let amax = isqrt((d / 3) as u128) as i64;
    let mut out = Vec::new();
    for a in 1..=amax {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b + d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = QuadForm { a, b, c };
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
    }
    out
}

/// Number of units `w` in the ring of integers of discriminant `-d`.
pub fn units_count(d: u64) -> u32 {
    match d {
        3 => 6,
        4 => 4,
        _ => 2,
    }
}

/// Class group of a fundamental discriminant `-D`, stored as its reduced forms.
///
/// Element `0` is always the principal class.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "ClassGroupRepr", into = "ClassGroupRepr")]
pub struct ClassGroup {
    pub disc: i64,
    pub forms: Vec<QuadForm>,
    index: HashMap<(i64, i64), usize>,
}

#[derive(Serialize, Deserialize)]
struct ClassGroupRepr {
    disc: i64,
    forms: Vec<QuadForm>,
}

impl From<ClassGroupRepr> for ClassGroup {
    fn from(r: ClassGroupRepr) -> Self {
        ClassGroup::from_forms(r.disc, r.forms)
    }
}

impl From<ClassGroup> for ClassGroupRepr {
    fn from(g: ClassGroup) -> Self {
        ClassGroupRepr { disc: g.disc, forms: g.forms }
    }
}

impl ClassGroup {
    /// Class group of discriminant `-d`; `-d` must be fundamental.
    pub fn new(d: u64) -> Result<Self> {
        let disc = -(d as i64);
        if !is_fundamental_discriminant(disc) {
            return Err(Error::NotFundamental(disc));
        }
        let mut forms = reduced_forms(disc);
        let principal = QuadForm::principal(disc);
        let pos = forms.iter().position(|f| *f == principal).expect("principal form is reduced");
        forms.swap(0, pos);
        forms[1..].sort_by_key(|f| (f.a, f.b));
        Ok(ClassGroup::from_forms(disc, forms))
    }

    fn from_forms(disc: i64, forms: Vec<QuadForm>) -> Self {
        let index = forms.iter().enumerate().map(|(i, f)| ((f.a, f.b), i)).collect();
        ClassGroup { disc, forms, index }
    }

    pub fn h(&self) -> usize {
        self.forms.len()
    }

    pub fn d(&self) -> u64 {
        (-self.disc) as u64
    }

    /// Index of the class of an arbitrary form of this discriminant.
    pub fn index_of(&self, f: &QuadForm) -> Result<usize> {
        if f.disc() != self.disc {
            return Err(Error::DiscriminantMismatch(self.disc, f.disc()));
        }
        let g = reduce(f)?;
        self.index
            .get(&(g.a, g.b))
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("form {g:?} is not primitive")))
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        let f = compose(&self.forms[i], &self.forms[j]).expect("same discriminant");
        self.index[&(f.a, f.b)]
    }

    pub fn inv(&self, i: usize) -> usize {
        let f = reduce(&self.forms[i].inverse()).expect("valid form");
        self.index[&(f.a, f.b)]
    }

    pub fn pow(&self, i: usize, mut k: u64) -> usize {
        let mut base = i;
        let mut acc = 0;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn order(&self, i: usize) -> usize {
        let mut x = i;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, i);
            k += 1;
        }
        k
    }

    /// Full `h x h` multiplication table.
    pub fn table(&self) -> Vec<Vec<usize>> {
        (0..self.h()).map(|i| (0..self.h()).map(|j| self.mul(i, j)).collect()).collect()
    }

    /// All `h` characters of the group.
    ///
    /// The group is filtered by a chain `1 = H_0 < H_1 < ... < H_k = G` where
    /// `H_i = <H_{i-1}, g_i>` and `r_i` is the least power with `g_i^{r_i}` in
    /// `H_{i-1}`. Every element has a unique exponent vector `(e_i)` with
    /// `0 <= e_i < r_i`, and a character is fixed by a compatible choice of
    /// `chi(g_i)`; there are exactly `prod r_i = h` such choices.
    pub fn characters(&self) -> Vec<ClassCharacter> {
        let h = self.h();
        let table = self.table();
        // exponent vectors of members of the current subgroup
        let mut member: Vec<Option<Vec<u64>>> = vec![None; h];
        member[0] = Some(Vec::new());
        let mut elems = vec![0usize];
        let mut gens: Vec<(u64, Vec<u64>)> = Vec::new(); // (r_i, exponents of g_i^{r_i})
        while elems.len() < h {
            let g = (0..h).find(|&x| member[x].is_none()).unwrap();
            let mut r = 1u64;
            let mut p = g;
            while member[p].is_none() {
                p = table[p][g];
                r += 1;
            }
            let rel = member[p].clone().unwrap();
            let k = gens.len();
            let mut new_elems = Vec::with_capacity(elems.len() * r as usize);
            let mut gj = 0usize;
            for j in 0..r {
                for &x in &elems {
                    let y = table[gj][x];
                    let mut v = member[x].clone().unwrap();
                    v.resize(k, 0);
                    v.push(j);
                    new_elems.push((y, v));
                }
                gj = table[gj][g];
            }
            for m in member.iter_mut().flatten() {
                m.resize(k + 1, 0);
            }
            for (y, v) in new_elems {
                if member[y].is_none() || y == 0 {
                    member[y] = Some(v);
                }
            }
            member[0] = Some(vec![0; k + 1]);
            elems = (0..h).filter(|&x| member[x].is_some()).collect();
            gens.push((r, rel));
        }
        let exps: Vec<Vec<u64>> = member
            .into_iter()
            .map(|m| {
                let mut v = m.unwrap();
                v.resize(gens.len(), 0);
                v
            })
            .collect();

        // chi(g_i) = e(T_i / h) with r_i T_i = sum_j rel_j T_j (mod h)
        let mut assignments: Vec<Vec<u64>> = vec![Vec::new()];
        for (r, rel) in &gens {
            let mut next = Vec::new();
            for ts in &assignments {
                let base: u64 = rel.iter().zip(ts).map(|(e, t)| e * t).sum::<u64>() % h as u64;
                for k in 0..*r {
                    let num = base + k * h as u64;
                    debug_assert_eq!(num % r, 0);
                    let mut t = ts.clone();
                    t.push((num / r) % h as u64);
                    next.push(t);
                }
            }
            assignments = next;
        }
        let mut chars: Vec<ClassCharacter> = assignments
            .into_iter()
            .map(|ts| ClassCharacter {
                h: h as u64,
                values: exps
                    .iter()
                    .map(|e| e.iter().zip(&ts).map(|(a, b)| a * b).sum::<u64>() % h as u64)
                    .collect(),
            })
            .collect();
        chars.sort_by(|a, b| a.values.cmp(&b.values));
        chars
    }
}

/// A character of the class group; `chi(sigma_j) = e(values[j] / h)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCharacter {
    pub h: u64,
    pub values: Vec<u64>,
}

impl ClassCharacter {
    pub fn value(&self, j: usize) -> Complex64 {
        e_frac(self.values[j] as i128, self.h as i128)
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn conj(&self) -> ClassCharacter {
        ClassCharacter {
            h: self.h,
            values: self.values.iter().map(|&v| (self.h - v) % self.h).collect(),
        }
    }

    /// Whether all values are real (a genus character).
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|&v| (2 * v) % self.h == 0)
    }
}

/// Integer `h`-approximation from the analytic class number formula,
/// using `L(1, chi) = -(pi / D^{3/2}) sum_{a < D} a chi(a)` for odd characters.
pub fn class_number_analytic(d: u64) -> f64 {
    let disc = -(d as i64);
    let s: f64 = (1..d as i64)
        .map(|a| a as f64 * crate::arith::kronecker(disc, a) as f64)
        .sum();
    let l1 = -std::f64::consts::PI * s / (d as f64).powf(1.5);
    units_count(d) as f64 * (d as f64).sqrt() * l1 / (2.0 * std::f64::consts::PI)
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c).unwrap()
    }

    /// Reduced forms of a discriminant found by brute force over a box.
    fn brute_reduced(disc: i64) -> Vec<QuadForm> {
        let mut out = Vec::new();
        for a in 1..=(-disc) {
            for b in -a..=a {
                for c in a..=(-disc) {
                    let g = QuadForm { a, b, c };
                    if g.disc() == disc && g.is_reduced() && g.is_primitive() {
                        out.push(g);
                    }
                }
            }
        }
        out.sort_by_key(|g| (g.a, g.b));
        out
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(&f(1, 1, 6)).unwrap(), f(1, 1, 6));
        assert_eq!(reduce(&f(6, -1, 1)).unwrap(), f(1, 1, 6));
        assert_eq!(reduce(&f(2, 3, 4)).unwrap(), f(2, -1, 3));
        assert!(brute_reduced(-23).contains(&f(2, -1, 3)));
        assert!(QuadForm::new(1, 5, 1).is_err());
    }

    #[test]
    fn reduction_matrix_is_sl2() {
        for (a, b, c) in [(6, -1, 1), (2, 3, 4), (37, 29, 6), (100, 181, 82)] {
            let g0 = f(a, b, c);
            let (g, m) = reduce_with_matrix(&g0).unwrap();
            assert_eq!(mat_det(&m), 1);
            assert_eq!(g0.act(&m), g);
            let tau = g0.tau();
            let t = g.tau();
            let mt = (t * m[0][0] as f64 + m[0][1] as f64) / (t * m[1][0] as f64 + m[1][1] as f64);
            assert!((mt - tau).norm() < 1e-9);
        }
    }

    #[test]
    fn compose_examples() {
        let one = f(1, 1, 6);
        let g = f(2, 1, 3);
        assert_eq!(compose(&one, &g).unwrap(), g);
        assert_eq!(compose(&g, &f(2, -1, 3)).unwrap(), one);
        assert_eq!(compose(&g, &g).unwrap(), f(2, -1, 3));
        assert!(matches!(compose(&g, &f(1, 1, 2)), Err(Error::DiscriminantMismatch(..))));
    }

    #[test]
    fn composition_multiplies_represented_values() {
        // f1(x1, y1) f2(x2, y2) is represented by f1 * f2
        let (f1, f2) = (f(2, 1, 3), f(3, 1, 2));
        let f3 = compose(&f1, &f2).unwrap();
        let prod = f1.eval(1, 0) * f2.eval(1, 1);
        assert!(representation_count(&f3, prod as u64) > 0);
    }

    #[test]
    fn class_group_examples() {
        let g7 = ClassGroup::new(7).unwrap();
        assert_eq!(g7.forms, vec![f(1, 1, 2)]);
        let g23 = ClassGroup::new(23).unwrap();
        assert_eq!(g23.h(), 3);
        let mut forms = g23.forms.clone();
        forms.sort_by_key(|g| (g.a, g.b));
        assert_eq!(forms, vec![f(1, 1, 6), f(2, -1, 3), f(2, 1, 3)]);
        assert_eq!(ClassGroup::new(4).unwrap().forms, vec![f(1, 0, 1)]);
        assert!(matches!(ClassGroup::new(12), Err(Error::NotFundamental(-12))));
    }

    #[test]
    fn reduced_forms_match_brute_force() {
        for d in [3u64, 4, 7, 8, 15, 20, 23, 24, 31, 39, 47, 56, 71, 84, 95] {
            let mut ours = ClassGroup::new(d).unwrap().forms;
            ours.sort_by_key(|g| (g.a, g.b));
            assert_eq!(ours, brute_reduced(-(d as i64)), "D={d}");
        }
    }

    #[test]
    fn characters_examples() {
        let g7 = ClassGroup::new(7).unwrap();
        let c7 = g7.characters();
        assert_eq!(c7.len(), 1);
        assert!(c7[0].is_trivial());

        let g23 = ClassGroup::new(23).unwrap();
        let chars = g23.characters();
        assert_eq!(chars.len(), 3);
        let j = g23.index_of(&f(2, 1, 3)).unwrap();
        let third = crate::arith::e(1.0 / 3.0);
        assert!(chars.iter().any(|c| (c.value(j) - third).norm() < 1e-12));
        for c in chars.iter().filter(|c| !c.is_trivial()) {
            let s: Complex64 = (0..3).map(|i| c.value(i)).sum();
            assert!(s.norm() < 1e-12);
            assert!(chars.contains(&c.conj()));
        }
    }

    fn check_group(g: &ClassGroup) {
        let h = g.h();
        let t = g.table();
        for i in 0..h {
            assert_eq!(t[0][i], i);
            assert_eq!(t[i][g.inv(i)], 0);
            for j in 0..h {
                assert_eq!(t[i][j], t[j][i]);
                for k in 0..h {
                    assert_eq!(t[t[i][j]][k], t[i][t[j][k]]);
                }
            }
        }
        let chars = g.characters();
        assert_eq!(chars.len(), h);
        for c in &chars {
            for i in 0..h {
                for j in 0..h {
                    assert_eq!((c.values[i] + c.values[j]) % h as u64, c.values[t[i][j]]);
                }
            }
        }
        for i in 0..h {
            for j in 0..h {
                let s: Complex64 = chars.iter().map(|c| c.value(i) * c.value(j).conj()).sum();
                let want = if i == j { h as f64 } else { 0.0 };
                assert!((s - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn group_axioms_and_orthogonality() {
        // includes non-cyclic groups: 84 -> (Z/2)^2, 420 -> (Z/2)^3, 3315 -> (Z/2)^3 x ...
        for d in [23u64, 39, 47, 56, 84, 104, 231, 420, 1155, 3315] {
            check_group(&ClassGroup::new(d).unwrap());
        }
    }

    #[test]
    fn representation_count_examples() {
        assert_eq!(representation_count(&f(1, 0, 1), 1), 4);
        assert_eq!(representation_count(&f(1, 1, 6), 1), 2);
        assert_eq!(representation_count(&f(2, 1, 3), 1), 0);
        let all = representation_counts_upto(&f(2, 1, 3), 300);
        for n in 1..=300 {
            assert_eq!(all[n] as u64, representation_count(&f(2, 1, 3), n as u64));
        }
    }

    #[test]
    fn class_number_formula() {
        for d in [7u64, 23, 47, 71, 163, 199] {
            let g = ClassGroup::new(d).unwrap();
            assert!((class_number_analytic(d) - g.h() as f64).abs() < 0.5);
        }
    }

    #[test]
    fn serde_roundtrip() {
        let g = ClassGroup::new(47).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        let back: ClassGroup = serde_json::from_str(&json).unwrap();
        assert_eq!(back.forms, g.forms);
        assert_eq!(back.table(), g.table());
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_preserves_disc(a in 1i64..400, b in -800i64..800, c in 1i64..400) {
            prop_assume!(b * b - 4 * a * c < 0);
            let g0 = f(a, b, c);
            let (g, m) = reduce_with_matrix(&g0).unwrap();
            prop_assert!(g.is_reduced());
            prop_assert_eq!(g.disc(), g0.disc());
            prop_assert_eq!(mat_det(&m), 1);
            prop_assert_eq!(reduce(&g).unwrap(), g);
        }

        #[test]
        fn composition_is_a_group_law(idx in 0usize..50, i in 0usize..500, j in 0usize..500, k in 0usize..500) {
            let ds: Vec<u64> = (5..2000u64).filter(|&d| is_fundamental_discriminant(-(d as i64))).collect();
            let g = ClassGroup::new(ds[idx * 7 % ds.len()]).unwrap();
            let h = g.h();
            let (i, j, k) = (i % h, j % h, k % h);
            prop_assert_eq!(g.mul(g.mul(i, j), k), g.mul(i, g.mul(j, k)));
            prop_assert_eq!(g.mul(i, j), g.mul(j, i));
            prop_assert_eq!(g.mul(i, g.inv(i)), 0);
        }
    }
}
