//! Small dense complex linear algebra.
//!
//! Everything here is sized for MIMO problems with at most a few dozen
//! antennas, so matrices are stored densely in row-major order.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Pivots below this magnitude are treated as a rank deficiency.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ComplexScalar>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ComplexScalar::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = ComplexScalar::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<ComplexScalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ComplexScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Column vector from a slice.
    pub fn column(v: &[ComplexScalar]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[ComplexScalar] {
        &self.data
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[ComplexScalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column_vec(&self, c: usize) -> Vec<ComplexScalar> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[ComplexScalar]) -> Result<Vec<ComplexScalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Adds `value` to every diagonal entry.
    pub fn add_diagonal(&mut self, value: f64) {
        for k in 0..self.rows.min(self.cols) {
            self[(k, k)] += value;
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Drops column `c`.
    pub fn without_column(&self, c: usize) -> Self {
        Self::from_fn(self.rows, self.cols - 1, |r, k| {
            self[(r, if k < c { k } else { k + 1 })]
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = ComplexScalar;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &ComplexScalar {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut ComplexScalar {
        &mut self.data[r * self.cols + c]
    }
}

/// Returns `H^H H`.
///
/// Only the upper triangle is accumulated; the lower triangle is written as
/// the exact conjugate so the result is Hermitian bit for bit.
pub fn gram(h: &ComplexMatrix) -> ComplexMatrix {
    let n = h.cols();
    let mut out = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let mut acc = ComplexScalar::new(0.0, 0.0);
            for j in 0..h.rows() {
                acc += h[(j, a)].conj() * h[(j, b)];
            }
            if a == b {
                acc.im = 0.0;
            }
            out[(a, b)] = acc;
            out[(b, a)] = acc.conj();
        }
    }
    out
}

/// Lower-triangular Cholesky factor `L` with `A = L L^H`.
fn cholesky(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for c in 0..n {
        let mut diag = a[(c, c)].re;
        for k in 0..c {
            diag -= l[(c, k)].norm_sqr();
        }
        if !(diag > PIVOT_THRESHOLD) {
            return Err(Error::SingularMatrix { pivot: diag });
        }
        let d = diag.sqrt();
        l[(c, c)] = ComplexScalar::new(d, 0.0);
        for r in c + 1..n {
            let mut acc = a[(r, c)];
            for k in 0..c {
                acc -= l[(r, k)] * l[(c, k)].conj();
            }
            l[(r, c)] = acc / d;
        }
    }
    Ok(l)
}

/// Solves `A X = B` for Hermitian positive definite `A`.
pub fn hermitian_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve with {}x{} system and {}x{} right-hand side",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let l = cholesky(a)?;
    let mut x = b.clone();
    for c in 0..b.cols() {
        // forward: L z = b
        for r in 0..n {
            let mut acc = x[(r, c)];
            for k in 0..r {
                acc -= l[(r, k)] * x[(k, c)];
            }
            x[(r, c)] = acc / l[(r, r)].re;
        }
        // backward: L^H x = z
        for r in (0..n).rev() {
            let mut acc = x[(r, c)];
            for k in r + 1..n {
                acc -= l[(k, r)].conj() * x[(k, c)];
            }
            x[(r, c)] = acc / l[(r, r)].re;
        }
    }
    Ok(x)
}

/// Max-log replacement for `log(e^a + e^b)`.
#[inline]
pub fn max_log(a: f64, b: f64) -> f64 {
    a.max(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn gram_of_identity_and_scalar() {
        assert_eq!(gram(&ComplexMatrix::identity(2)), ComplexMatrix::identity(2));
        let h = ComplexMatrix::from_row_major(1, 1, vec![c(3.0, 4.0)]).unwrap();
        assert_eq!(gram(&h)[(0, 0)], c(25.0, 0.0));
    }

    #[test]
    fn gram_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_matrix(&mut rng, 4, 4);
        let g = gram(&h);
        for a in 0..4 {
            for b in 0..4 {
                let mut expect = c(0.0, 0.0);
                for j in 0..4 {
                    expect += h[(j, a)].conj() * h[(j, b)];
                }
                assert!((g[(a, b)] - expect).norm() < 1e-14);
                assert_eq!(g[(a, b)], g[(b, a)].conj());
            }
        }
    }

    #[test]
    fn solve_trivial_systems() {
        let b = ComplexMatrix::column(&[c(1.0, 2.0), c(-3.0, 0.5)]);
        assert_eq!(hermitian_solve(&ComplexMatrix::identity(2), &b).unwrap(), b);

        let mut a = ComplexMatrix::identity(2);
        a[(0, 0)] = c(2.0, 0.0);
        a[(1, 1)] = c(2.0, 0.0);
        let x = hermitian_solve(&a, &ComplexMatrix::column(&[c(4.0, 0.0), c(6.0, 0.0)])).unwrap();
        for (got, want) in x.entries().iter().zip([c(2.0, 0.0), c(3.0, 0.0)]) {
            assert!((got - want).norm() < 1e-15);
        }
    }

    #[test]
    fn solve_residual_on_random_hpd() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let h = random_matrix(&mut rng, 4, 4);
            let mut a = gram(&h);
            a.add_diagonal(0.5);
            let b = random_matrix(&mut rng, 4, 2);
            let x = hermitian_solve(&a, &b).unwrap();
            let mut r = a.matmul(&x).unwrap();
            for (ri, bi) in r.data.iter_mut().zip(b.entries()) {
                *ri -= bi;
            }
            assert!(r.norm() / b.norm() <= 1e-10);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let h = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        let a = gram(&h);
        let err = hermitian_solve(&a, &ComplexMatrix::identity(2)).unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { .. }));
    }

    #[test]
    fn max_log_values() {
        assert_eq!(max_log(0.0, 0.0), 0.0);
        assert_eq!(max_log(-3.5, 1.25), 1.25);
        assert_eq!(max_log(1e6, -1e6), 1e6);
    }

    #[test]
    fn max_log_brackets_log_sum_exp() {
        let grid: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.5).collect();
        for &a in &grid {
            for &b in &grid {
                let lse = a.max(b) + (-(a - b).abs()).exp().ln_1p();
                let m = max_log(a, b);
                assert!(m <= lse + 1e-12);
                assert!(m >= lse - std::f64::consts::LN_2 - 1e-12);
            }
        }
    }
}
