//! Dense row-major matrix and a Householder QR factorization.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = T> + '_ {
        (0..self.rows).map(move |i| self[(i, j)])
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Householder QR of a tall matrix, without pivoting so that a vanishing
/// diagonal entry of R identifies the column that depends on its predecessors.
#[derive(Debug, Clone)]
pub struct HouseholderQr<T> {
    r: Matrix<T>,
    // reflector k acts on rows k.. ; None when the column was already zero
    reflectors: Vec<Option<(Vec<T>, T)>>,
}

impl<T: Scalar> HouseholderQr<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        let (n, p) = (a.rows(), a.cols());
        assert!(n >= p, "QR needs at least as many rows as columns");
        let mut r = a.clone();
        let mut reflectors = Vec::with_capacity(p);
        for k in 0..p {
            let norm = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<T>().sqrt();
            if norm == T::zero() {
                reflectors.push(None);
                continue;
            }
            let x0 = r[(k, k)];
            let alpha = if x0 >= T::zero() { -norm } else { norm };
            let mut v: Vec<T> = (k..n).map(|i| r[(i, k)]).collect();
            v[0] = v[0] - alpha;
            let vtv: T = v.iter().map(|&x| x * x).sum();
            if vtv == T::zero() {
                reflectors.push(None);
                continue;
            }
            let beta = T::c(2.0) / vtv;
            for j in k..p {
                let dot: T = v
                    .iter()
                    .enumerate()
                    .map(|(t, &vi)| vi * r[(k + t, j)])
                    .sum();
                let scale = beta * dot;
                for (t, &vi) in v.iter().enumerate() {
                    r[(k + t, j)] = r[(k + t, j)] - scale * vi;
                }
            }
            for i in (k + 1)..n {
                r[(i, k)] = T::zero();
            }
            reflectors.push(Some((v, beta)));
        }
        HouseholderQr { r, reflectors }
    }

    pub fn ncols(&self) -> usize {
        self.r.cols()
    }

    pub fn r_diag(&self) -> Vec<T> {
        (0..self.ncols()).map(|k| self.r[(k, k)]).collect()
    }

    /// Columns whose |R_kk| falls below `tol` times the largest |R_jj|.
    pub fn dependent_columns(&self, tol: T) -> Vec<usize> {
        let diag = self.r_diag();
        let max = diag.iter().fold(T::zero(), |m, d| m.max(d.abs()));
        diag.iter()
            .enumerate()
            .filter(|(_, d)| d.abs() <= tol * max || max == T::zero())
            .map(|(k, _)| k)
            .collect()
    }

    /// Overwrites `b` with Qᵀb.
    pub fn apply_qt(&self, b: &mut [T]) {
        assert_eq!(b.len(), self.r.rows());
        for (k, refl) in self.reflectors.iter().enumerate() {
            if let Some((v, beta)) = refl {
                let dot: T = v.iter().enumerate().map(|(t, &vi)| vi * b[k + t]).sum();
                let scale = *beta * dot;
                for (t, &vi) in v.iter().enumerate() {
                    b[k + t] = b[k + t] - scale * vi;
                }
            }
        }
    }

    /// Least-squares solution of Ax ≈ b; assumes full column rank.
    pub fn solve_least_squares(&self, b: &[T]) -> Vec<T> {
        let mut qtb = b.to_vec();
        self.apply_qt(&mut qtb);
        let p = self.ncols();
        let mut x = vec![T::zero(); p];
        for k in (0..p).rev() {
            let mut acc = qtb[k];
            for (j, &xj) in x.iter().enumerate().skip(k + 1) {
                acc = acc - self.r[(k, j)] * xj;
            }
            x[k] = acc / self.r[(k, k)];
        }
        x
    }

    /// R⁻¹ (upper triangular); assumes full column rank.
    pub fn r_inverse(&self) -> Matrix<T> {
        let p = self.ncols();
        let mut inv = Matrix::zeros(p, p);
        for col in 0..p {
            for k in (0..=col).rev() {
                let mut acc = if k == col { T::one() } else { T::zero() };
                for j in (k + 1)..=col {
                    acc = acc - self.r[(k, j)] * inv[(j, col)];
                }
                inv[(k, col)] = acc / self.r[(k, k)];
            }
        }
        inv
    }

    /// Diagonal of (RᵀR)⁻¹ = R⁻¹R⁻ᵀ, i.e. of (AᵀA)⁻¹.
    pub fn gram_inverse_diag(&self) -> Vec<T> {
        let inv = self.r_inverse();
        (0..self.ncols())
            .map(|j| inv.row(j).iter().map(|&x| x * x).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_system() {
        let a = Matrix::from_rows(&[vec![2.0f64, 1.0], vec![1.0, 3.0]]);
        let qr = HouseholderQr::new(&a);
        let x = qr.solve_least_squares(&[3.0, 5.0]);
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        let inv = qr.r_inverse();
        // (AᵀA)⁻¹ = [[10,-5],[-5,5]]/25
        let d = qr.gram_inverse_diag();
        assert!((d[0] - 0.4).abs() < 1e-14 && (d[1] - 0.2).abs() < 1e-14);
        assert_eq!(inv.rows(), 2);
    }

    #[test]
    fn flags_dependent_column() {
        let a = Matrix::from_fn(6, 3, |i, j| match j {
            0 => 1.0,
            1 => i as f64,
            _ => 2.0 + 3.0 * i as f64,
        });
        let qr = HouseholderQr::new(&a);
        assert_eq!(qr.dependent_columns(1e-10), vec![2]);
    }

    #[test]
    fn overdetermined_least_squares() {
        // y = 1 + 2x exactly
        let a = Matrix::from_fn(5, 2, |i, j| if j == 0 { 1.0 } else { i as f64 });
        let b: Vec<f64> = (0..5).map(|i| 1.0 + 2.0 * i as f64).collect();
        let x = HouseholderQr::new(&a).solve_least_squares(&b);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }
}
