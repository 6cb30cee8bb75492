use serde::{Deserialize, Serialize};

use crate::Complex64;

/// Chebyshev interpolant of a complex function on `[a, b]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cheb {
    a: f64,
    b: f64,
    coeffs: Vec<Complex64>,
}

impl Cheb {
    /// Interpolates at the `n` Chebyshev points of the first kind.
    pub fn build<F: FnMut(f64) -> Complex64>(a: f64, b: f64, n: usize, mut f: F) -> Self {
        let nf = n as f64;
        let vals: Vec<Complex64> = (0..n)
            .map(|j| {
                let x = (std::f64::consts::PI * (j as f64 + 0.5) / nf).cos();
                f(0.5 * (a + b) + 0.5 * (b - a) * x)
            })
            .collect();
        let coeffs = (0..n)
            .map(|k| {
                let mut acc = Complex64::default();
                for (j, v) in vals.iter().enumerate() {
                    acc += v * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / nf).cos();
                }
                acc * (2.0 / nf)
            })
            .collect();
        Cheb { a, b, coeffs }
    }

    /// Fallible variant of [`Cheb::build`].
    pub fn try_build<E, F: FnMut(f64) -> Result<Complex64, E>>(a: f64, b: f64, n: usize, mut f: F) -> Result<Self, E> {
        let mut err = None;
        let c = Cheb::build(a, b, n, |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                Complex64::default()
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(c),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let u = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (Complex64::default(), Complex64::default());
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + b1 * (2.0 * u) - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] * 0.5 + b1 * u - b2
    }

    /// Size of the two highest coefficients, a proxy for the interpolation error.
    pub fn tail(&self) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(2)..].iter().map(|c| c.norm()).sum()
    }
}

/// Piecewise Chebyshev interpolant over consecutive panels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PiecewiseCheb {
    edges: Vec<f64>,
    pieces: Vec<Cheb>,
}

impl PiecewiseCheb {
    pub fn try_build<E, F: FnMut(f64) -> Result<Complex64, E>>(edges: Vec<f64>, degree: usize, mut f: F) -> Result<Self, E> {
        let mut pieces = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            pieces.push(Cheb::try_build(w[0], w[1], degree, &mut f)?);
        }
        Ok(PiecewiseCheb { edges, pieces })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.edges[0], *self.edges.last().unwrap())
    }

    /// Value at `x`, or `None` outside the covered range.
    pub fn eval(&self, x: f64) -> Option<Complex64> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let i = self.edges.partition_point(|&e| e <= x).clamp(1, self.pieces.len()) - 1;
        Some(self.pieces[i].eval(x))
    }

    pub fn max_tail(&self) -> f64 {
        self.pieces.iter().map(|p| p.tail()).fold(0.0, f64::max)
    }
}
