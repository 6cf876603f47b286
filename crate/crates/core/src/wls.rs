//! Weighted least squares with classical inference, plus the R² arithmetic
//! used to compare nested models.

use thiserror::Error;

use crate::linalg::{HouseholderQr, Matrix};
use crate::scalar::Scalar;
use crate::stats;
use crate::transform::DesignMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("singular design: column(s) {} linearly dependent on earlier columns", .0.join(", "))]
    Singular(Vec<String>),
    #[error("insufficient data: {n} observations for {k} coefficients")]
    InsufficientData { n: usize, k: usize },
    #[error("degrees of freedom exhausted: n = {n}, k = {k}")]
    DegreesOfFreedom { n: usize, k: usize },
    #[error("R² undefined: response has zero weighted variance")]
    UndefinedR2,
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<T> {
    pub column_names: Vec<String>,
    pub coefficients: Vec<T>,
    pub std_errors: Vec<T>,
    pub t_stats: Vec<T>,
    pub p_values: Vec<T>,
    pub r2: T,
    pub adj_r2: T,
    pub n: usize,
    /// Regressors excluding the intercept.
    pub k_predictors: usize,
    pub residuals: Vec<T>,
    pub fitted: Vec<T>,
    /// σ̂², weighted RSS over the residual degrees of freedom.
    pub sigma2: T,
}

impl<T: Scalar> FitResult<T> {
    pub fn df_resid(&self) -> usize {
        self.n - self.k_predictors - 1
    }

    pub fn coefficient(&self, name: &str) -> Option<T> {
        self.column_names
            .iter()
            .position(|c| c == name)
            .map(|i| self.coefficients[i])
    }
}

/// Fits the design; column 0 is taken to be the intercept.
pub fn fit<T: Scalar>(design: &DesignMatrix<T>) -> Result<FitResult<T>, FitError> {
    fit_weighted(&design.x, &design.y, &design.w, &design.column_names)
}

/// Minimizes Σ wᵢ(yᵢ − xᵢβ)² through a Householder QR of the √w-scaled system.
pub fn fit_weighted<T: Scalar>(
    x: &Matrix<T>,
    y: &[T],
    w: &[T],
    column_names: &[String],
) -> Result<FitResult<T>, FitError> {
    let (n, p) = (x.rows(), x.cols());
    if y.len() != n || w.len() != n || column_names.len() != p {
        return Err(FitError::Invalid(format!(
            "dimension mismatch: X {n}x{p}, y {}, w {}, names {}",
            y.len(),
            w.len(),
            column_names.len()
        )));
    }
    if p == 0 {
        return Err(FitError::Invalid("design has no columns".into()));
    }
    if let Some(bad) = w.iter().position(|&wi| !(wi > T::zero() && wi.is_finite())) {
        return Err(FitError::Invalid(format!(
            "weight {} at row {bad} not positive",
            w[bad]
        )));
    }
    if n <= p {
        return Err(FitError::InsufficientData { n, k: p });
    }

    let sqrt_w: Vec<T> = w.iter().map(|wi| wi.sqrt()).collect();
    let xs = Matrix::from_fn(n, p, |i, j| x[(i, j)] * sqrt_w[i]);
    let ys: Vec<T> = y.iter().zip(&sqrt_w).map(|(&yi, &s)| yi * s).collect();

    let qr = HouseholderQr::new(&xs);
    let dependent = qr.dependent_columns(T::rank_tolerance());
    if !dependent.is_empty() {
        let named = name_dependent(&xs, T::rank_tolerance());
        let cols = if named.is_empty() { dependent } else { named };
        return Err(FitError::Singular(
            cols.into_iter().map(|j| column_names[j].clone()).collect(),
        ));
    }
    let coefficients = qr.solve_least_squares(&ys);
    let fitted = x.mul_vec(&coefficients);
    let residuals: Vec<T> = y.iter().zip(&fitted).map(|(&a, &b)| a - b).collect();

    let k_predictors = p - 1;
    let df = n - p;
    let rss: T = residuals.iter().zip(w).map(|(&r, &wi)| wi * r * r).sum();
    let sigma2 = rss / T::from_usize_lossy(df);
    let gram_diag = qr.gram_inverse_diag();
    let std_errors: Vec<T> = gram_diag.iter().map(|&g| (sigma2 * g).sqrt()).collect();
    let df_t = T::from_usize_lossy(df);
    let (t_stats, p_values): (Vec<T>, Vec<T>) = coefficients
        .iter()
        .zip(&std_errors)
        .map(|(&b, &se)| {
            if se > T::zero() {
                let t = b / se;
                (t, stats::two_sided_p(t, df_t))
            } else {
                // exact fit: infinite t, zero p, unless the coefficient is zero too
                let t = if b == T::zero() {
                    T::zero()
                } else {
                    T::infinity() * b.signum()
                };
                (t, if b == T::zero() { T::one() } else { T::zero() })
            }
        })
        .unzip();

    let r2 = r2_weighted(y, &fitted, w)?;
    let adj = adj_r2(r2, n, k_predictors)?;
    Ok(FitResult {
        column_names: column_names.to_vec(),
        coefficients,
        std_errors,
        t_stats,
        p_values,
        r2,
        adj_r2: adj,
        n,
        k_predictors,
        residuals,
        fitted,
        sigma2,
    })
}

/// Walks the columns in order and reports each one lying in the span of the
/// independent columns before it. A single factorization can smear one
/// dependency over later diagonal entries, so each column is refactored
/// against the kept set.
fn name_dependent<T: Scalar>(xs: &Matrix<T>, tol: T) -> Vec<usize> {
    let n = xs.rows();
    let mut kept: Vec<usize> = Vec::new();
    let mut dependent = Vec::new();
    for j in 0..xs.cols() {
        let norm = xs.column(j).map(|v| v * v).sum::<T>().sqrt();
        let mut cols = kept.clone();
        cols.push(j);
        let sub = Matrix::from_fn(n, cols.len(), |i, c| xs[(i, cols[c])]);
        let last = HouseholderQr::new(&sub).r_diag()[cols.len() - 1].abs();
        if norm == T::zero() || last <= tol * norm {
            dependent.push(j);
        } else {
            kept.push(j);
        }
    }
    dependent
}

/// 1 − Σw(y−ŷ)² / Σw(y−ȳ_w)², with ȳ_w the weighted mean of y.
pub fn r2_weighted<T: Scalar>(y: &[T], fitted: &[T], w: &[T]) -> Result<T, FitError> {
    if y.len() != fitted.len() || y.len() != w.len() || y.is_empty() {
        return Err(FitError::Invalid("length mismatch in r2".into()));
    }
    let wsum: T = w.iter().copied().sum();
    let ybar = y.iter().zip(w).map(|(&a, &b)| a * b).sum::<T>() / wsum;
    let tss: T = y
        .iter()
        .zip(w)
        .map(|(&a, &b)| b * (a - ybar) * (a - ybar))
        .sum();
    if tss <= T::zero() {
        return Err(FitError::UndefinedR2);
    }
    let rss: T = y
        .iter()
        .zip(fitted)
        .zip(w)
        .map(|((&a, &f), &b)| b * (a - f) * (a - f))
        .sum();
    Ok(T::one() - rss / tss)
}

/// 1 − (1 − R²)(n − 1)/(n − k − 1), k excluding the intercept.
pub fn adj_r2<T: Scalar>(r2: T, n: usize, k: usize) -> Result<T, FitError> {
    if n <= k + 1 {
        return Err(FitError::DegreesOfFreedom { n, k });
    }
    let ratio = T::from_usize_lossy(n - 1) / T::from_usize_lossy(n - k - 1);
    Ok(T::one() - (T::one() - r2) * ratio)
}

/// R² gain in basis points, rounded to the nearest integer.
pub fn delta_r2_bps<T: Scalar>(r2_base: T, r2_model: T) -> i64 {
    ((r2_model - r2_base) * T::c(10_000.0))
        .round()
        .to_i64()
        .unwrap_or(0)
}

/// `***` below 0.001, `**` below 0.01, `*` below 0.05; strict inequalities.
pub fn significance_stars<T: Scalar>(p: T) -> &'static str {
    if p < T::c(0.001) {
        "***"
    } else if p < T::c(0.01) {
        "**"
    } else if p < T::c(0.05) {
        "*"
    } else {
        ""
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|j| format!("x{j}")).collect()
    }

    #[test]
    fn exact_linear_fit() {
        let x = Matrix::from_fn(8, 3, |i, j| match j {
            0 => 1.0,
            1 => i as f64,
            _ => ((i * i) % 5) as f64,
        });
        let y: Vec<f64> = (0..8)
            .map(|i| 2.0 - 0.5 * i as f64 + 3.0 * ((i * i) % 5) as f64)
            .collect();
        let w: Vec<f64> = (0..8).map(|i| 0.5 + i as f64).collect();
        let f = fit_weighted(&x, &y, &w, &names(3)).unwrap();
        assert!(f.residuals.iter().all(|r| r.abs() < 1e-12));
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert!((f.coefficients[1] + 0.5).abs() < 1e-12);
    }

    fn check_adj(r2: f64, k: usize, want: f64) {
        let adj: f64 = adj_r2(r2, 676, k).unwrap();
        assert!(
            (adj - want).abs() < 5e-5,
            "adj_r2({r2}, 676, {k}) = {adj}, want {want}"
        );
    }

    #[test]
    fn adjusted_r2_model1_pair() {
        check_adj(0.6806, 33, 0.6642);
    }

    #[test]
    fn adjusted_r2_hand_arithmetic() {
        // 1 - 0.3003 * 675 / 640 and 1 - 0.2681 * 675 / 638, worked by hand
        let m2: f64 = adj_r2(0.6997, 676, 35).unwrap();
        assert!((m2 - 0.683_277_343_75).abs() < 1e-12, "{m2}");
        let m3: f64 = adj_r2(0.7319, 676, 37).unwrap();
        assert!((m3 - (1.0 - 180.9675 / 638.0)).abs() < 1e-12, "{m3}");
    }

    #[test]
    fn adjusted_r2_needs_residual_df() {
        assert_eq!(
            adj_r2(0.5, 3, 2),
            Err(FitError::DegreesOfFreedom { n: 3, k: 2 })
        );
    }

    #[test]
    fn bps() {
        assert_eq!(delta_r2_bps(0.6806, 0.6997), 191);
        assert_eq!(delta_r2_bps(0.6806, 0.7319), 513);
        assert_eq!(delta_r2_bps(0.6806, 0.6806), 0);
        assert_eq!(delta_r2_bps(0.6806f32, 0.6997f32), 191);
    }

    #[test]
    fn stars() {
        assert_eq!(significance_stars(0.049), "*");
        assert_eq!(significance_stars(0.0009), "***");
        assert_eq!(significance_stars(0.05), "");
        assert_eq!(significance_stars(0.01), "*");
        assert_eq!(significance_stars(0.001), "**");
    }

    #[test]
    fn r2_edges() {
        let y = [1.0f64, 2.0, 4.0];
        let w = [1.0, 2.0, 1.0];
        assert_eq!(r2_weighted(&y, &y, &w).unwrap(), 1.0);
        let ybar = (1.0 + 4.0 + 4.0) / 4.0;
        assert!(r2_weighted(&y, &[ybar; 3], &w).unwrap().abs() < 1e-15);
        assert_eq!(
            r2_weighted(&[2.0, 2.0], &[2.0, 2.0], &[1.0, 1.0]),
            Err(FitError::UndefinedR2)
        );
    }

    #[test]
    fn r2_matches_definition() {
        let y = [0.3, -1.2, 2.2, 0.9, 1.1, -0.4, 3.3, 0.0, 1.7, -2.0];
        let f = [0.1, -1.0, 1.9, 1.2, 0.8, -0.1, 2.9, 0.4, 1.5, -1.6];
        let w = [1.0, 0.5, 2.0, 1.5, 0.2, 0.9, 1.1, 3.0, 0.7, 1.3];
        let sw: f64 = w.iter().sum();
        let ybar: f64 = y.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..10 {
            num += w[i] * (y[i] - f[i]).powi(2);
            den += w[i] * (y[i] - ybar).powi(2);
        }
        assert!((r2_weighted(&y, &f, &w).unwrap() - (1.0 - num / den)).abs() < 1e-14);
    }

    #[test]
    fn singular_names_column() {
        let x = Matrix::from_fn(6, 3, |i, j| match j {
            0 => 1.0,
            1 => i as f64,
            _ => 2.0 * i as f64,
        });
        let y: Vec<f64> = (0..6).map(|i| (i * 7 % 4) as f64).collect();
        let err =
            fit_weighted(&x, &y, &[1.0; 6], &["const".into(), "a".into(), "b".into()]).unwrap_err();
        assert_eq!(err, FitError::Singular(vec!["b".into()]));
    }

    #[test]
    fn insufficient_data() {
        let x = Matrix::from_fn(2, 2, |i, j| if j == 0 { 1.0 } else { i as f64 });
        assert_eq!(
            fit_weighted(&x, &[1.0, 2.0], &[1.0, 1.0], &names(2)),
            Err(FitError::InsufficientData { n: 2, k: 2 })
        );
    }

    #[test]
    fn fits_in_f32() {
        let x = Matrix::from_fn(30, 2, |i, j| if j == 0 { 1.0f32 } else { i as f32 / 10.0 });
        let y: Vec<f32> = (0..30)
            .map(|i| 1.0 + 0.5 * i as f32 / 10.0 + if i % 2 == 0 { 0.1 } else { -0.1 })
            .collect();
        let f = fit_weighted(&x, &y, &[1.0; 30], &names(2)).unwrap();
        assert!((f.coefficients[1] - 0.5).abs() < 1e-2);
    }
}
