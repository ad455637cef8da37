//! Householder QR on a column-equilibrated design.
//!
//! Columns are scaled to unit Euclidean norm before factoring, so the rank
//! decision is independent of the units each regressor happens to be in.

use crate::scalar::{norm, Real};

/// Relative threshold on `|R_jj| / max |R_ii|` below which a column is
/// declared linearly dependent on the preceding ones.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub(crate) struct QrFactor<F> {
    k: usize,
    /// Householder vectors, one per column, each of length `n - j`.
    reflectors: Vec<Vec<F>>,
    /// Upper triangle of R (row-major, k x k) for the scaled design.
    r: Vec<F>,
    /// Column scale factors: scaled column j = original column j / scale[j].
    scale: Vec<F>,
}

/// Column `dependent` is (numerically) a combination of the columns in `basis`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Collinearity {
    pub dependent: usize,
    pub basis: Vec<usize>,
}

impl<F: Real> QrFactor<F> {
    /// Factors an `n x k` design given as columns.
    pub fn factor(columns: &[Vec<F>]) -> Result<Self, Collinearity> {
        let k = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if n < k {
            return Err(Collinearity { dependent: n, basis: (0..n).collect() });
        }
        let mut scale = Vec::with_capacity(k);
        let mut a: Vec<Vec<F>> = Vec::with_capacity(k);
        for (j, col) in columns.iter().enumerate() {
            let s = norm(col);
            if s == F::zero() || !s.is_finite() {
                return Err(Collinearity { dependent: j, basis: Vec::new() });
            }
            scale.push(s);
            a.push(col.iter().map(|&v| v / s).collect());
        }

        let mut reflectors: Vec<Vec<F>> = Vec::with_capacity(k);
        let mut r = vec![F::zero(); k * k];
        for j in 0..k {
            // apply previous reflectors to column j
            let col = &mut a[j];
            for (i, v) in reflectors.iter().enumerate() {
                apply_reflector(v, &mut col[i..]);
            }
            for i in 0..j {
                r[i * k + j] = col[i];
            }
            let tail = &col[j..];
            let alpha = norm(tail);
            let mut v: Vec<F> = tail.to_vec();
            let diag = if v[0] >= F::zero() { -alpha } else { alpha };
            v[0] = v[0] - diag;
            let vnorm = norm(&v);
            if vnorm > F::zero() {
                for x in &mut v {
                    *x = *x / vnorm;
                }
            }
            r[j * k + j] = diag;
            reflectors.push(v);
        }

        let factor = QrFactor { k, reflectors, r, scale };
        if let Some(bad) = factor.first_deficient_column() {
            return Err(factor.collinearity(bad));
        }
        Ok(factor)
    }

    fn first_deficient_column(&self) -> Option<usize> {
        let k = self.k;
        let mut max = F::zero();
        for j in 0..k {
            let d = self.r[j * k + j].abs();
            max = max.max(d);
            if !(d > F::lit(RANK_TOLERANCE) * max) {
                return Some(j);
            }
        }
        None
    }

    fn collinearity(&self, j: usize) -> Collinearity {
        let k = self.k;
        // Solve R[..j, ..j] c = R[..j, j] to see which earlier columns carry column j.
        let mut c = vec![F::zero(); j];
        for i in (0..j).rev() {
            let mut s = self.r[i * k + j];
            for l in i + 1..j {
                s = s - self.r[i * k + l] * c[l];
            }
            c[i] = s / self.r[i * k + i];
        }
        let cmax = c.iter().fold(F::zero(), |m, v| m.max(v.abs()));
        let basis = c
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > F::lit(1e-8) * cmax)
            .map(|(i, _)| i)
            .collect();
        Collinearity { dependent: j, basis }
    }

    /// Returns `Q^T y`.
    fn qt(&self, y: &[F]) -> Vec<F> {
        let mut z = y.to_vec();
        for (j, v) in self.reflectors.iter().enumerate() {
            apply_reflector(v, &mut z[j..]);
        }
        z
    }

    /// Least-squares coefficients in the original (unscaled) column units.
    pub fn solve(&self, y: &[F]) -> Vec<F> {
        let z = self.qt(y);
        let k = self.k;
        let mut b = vec![F::zero(); k];
        for i in (0..k).rev() {
            let mut s = z[i];
            for l in i + 1..k {
                s = s - self.r[i * k + l] * b[l];
            }
            b[i] = s / self.r[i * k + i];
        }
        b.iter().zip(&self.scale).map(|(&bi, &s)| bi / s).collect()
    }

    /// Residual sum of squares of the projection of `y`.
    pub fn ssr(&self, y: &[F]) -> F {
        let z = self.qt(y);
        z[self.k..].iter().map(|&v| v * v).sum()
    }

    /// `(X^T X)^{-1}` in original column units, row-major `k x k`.
    pub fn xtx_inverse(&self) -> Vec<F> {
        let k = self.k;
        // Rinv: upper triangular inverse of R.
        let mut rinv = vec![F::zero(); k * k];
        for j in 0..k {
            rinv[j * k + j] = self.r[j * k + j].recip();
            for i in (0..j).rev() {
                let mut s = F::zero();
                for l in i + 1..=j {
                    s = s + self.r[i * k + l] * rinv[l * k + j];
                }
                rinv[i * k + j] = -s / self.r[i * k + i];
            }
        }
        let mut out = vec![F::zero(); k * k];
        for i in 0..k {
            for j in 0..k {
                let mut s = F::zero();
                for l in i.max(j)..k {
                    s = s + rinv[i * k + l] * rinv[j * k + l];
                }
                out[i * k + j] = s / (self.scale[i] * self.scale[j]);
            }
        }
        out
    }
}

fn apply_reflector<F: Real>(v: &[F], x: &mut [F]) {
    // H = I - 2 v v^T with |v| = 1 (or v = 0 for the identity).
    let mut s = F::zero();
    for (a, b) in v.iter().zip(x.iter()) {
        s = s + *a * *b;
    }
    let s = s + s;
    for (a, b) in v.iter().zip(x.iter_mut()) {
        *b = *b - s * *a;
    }
}
