//! Special functions, Student-t tail probabilities and descriptive statistics.

use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0 (Lanczos approximation).
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    let half = T::c(0.5);
    if x < half {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = T::c(std::f64::consts::PI);
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::c(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::c(c) / (x + T::from_usize_lossy(i));
    }
    let t = x + T::c(LANCZOS_G) + half;
    T::c(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + half) * t.ln() - t + acc.ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction<T: Scalar>(a: T, b: T, x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let eps = T::epsilon();
    let one = T::one();
    let (qab, qap, qam) = (a + b, a + one, a - one);
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..=500usize {
        let m = T::from_usize_lossy(m);
        let m2 = m + m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let delta = d * c;
        h = h * delta;
        if (delta - one).abs() <= eps {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
pub fn regularized_incomplete_beta<T: Scalar>(a: T, b: T, x: T) -> T {
    let one = T::one();
    if x <= T::zero() {
        return T::zero();
    }
    if x >= one {
        return one;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (one - x).ln();
    let front = ln_front.exp();
    if x < (a + one) / (a + b + T::c(2.0)) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        one - front * beta_continued_fraction(b, a, one - x) / b
    }
}

/// Upper-tail probability P(T > t) of Student's t with `df` degrees of freedom.
pub fn student_t_sf<T: Scalar>(t: T, df: T) -> T {
    let half = T::c(0.5);
    if t == T::zero() {
        return half;
    }
    let x = df / (df + t * t);
    let tail = half * regularized_incomplete_beta(df * half, half, x);
    if t > T::zero() {
        tail
    } else {
        T::one() - tail
    }
}

/// Two-sided p-value 2·P(T > |t|).
pub fn two_sided_p<T: Scalar>(t: T, df: T) -> T {
    let p = T::c(2.0) * student_t_sf(t.abs(), df);
    p.min(T::one()).max(T::zero())
}

/// One equal-width histogram bin; the last bin is closed on the right.
#[derive(Debug, Clone, PartialEq)]
pub struct Bin<T> {
    pub lower: T,
    pub upper: T,
    pub count: usize,
}

/// Equal-width bins spanning [min, max].
///
/// Returns `None` for an empty input or zero bins.
pub fn histogram<T: Scalar>(values: &[T], n_bins: usize) -> Option<Vec<Bin<T>>> {
    if values.is_empty() || n_bins == 0 {
        return None;
    }
    let min = values.iter().copied().fold(T::infinity(), T::min);
    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
    let width = (max - min) / T::from_usize_lossy(n_bins);
    let mut bins: Vec<Bin<T>> = (0..n_bins)
        .map(|b| Bin {
            lower: min + width * T::from_usize_lossy(b),
            upper: if b + 1 == n_bins {
                max
            } else {
                min + width * T::from_usize_lossy(b + 1)
            },
            count: 0,
        })
        .collect();
    for &v in values {
        let idx = if width > T::zero() {
            ((v - min) / width)
                .floor()
                .to_usize()
                .unwrap_or(0)
                .min(n_bins - 1)
        } else {
            0
        };
        bins[idx].count += 1;
    }
    Some(bins)
}

pub fn mean<T: Scalar>(values: &[T]) -> Option<T> {
    (!values.is_empty())
        .then(|| values.iter().copied().sum::<T>() / T::from_usize_lossy(values.len()))
}

/// Sample standard deviation (n − 1 denominator).
pub fn sample_sd<T: Scalar>(values: &[T]) -> Option<T> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    let ss: T = values.iter().map(|&v| (v - m) * (v - m)).sum();
    Some((ss / T::from_usize_lossy(values.len() - 1)).sqrt())
}

/// Pearson correlation; `None` when either column is constant.
pub fn correlation<T: Scalar>(x: &[T], y: &[T]) -> Option<T> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(x)?, mean(y)?);
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy = sxy + da * db;
        sxx = sxx + da * da;
        syy = syy + db * db;
    }
    if sxx == T::zero() || syy == T::zero() {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).max(-T::one()).min(T::one()))
}

/// Means, standard deviations and pairwise correlations of named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptives<T> {
    pub names: Vec<String>,
    pub n: Vec<usize>,
    pub means: Vec<Option<T>>,
    pub sds: Vec<Option<T>>,
    /// Symmetric, unit diagonal; computed over rows where both columns are
    /// present.
    pub correlations: Vec<Vec<Option<T>>>,
}

/// Columns may contain missing entries; every column must have the same length.
pub fn descriptives<T: Scalar>(columns: &[(String, Vec<Option<T>>)]) -> Descriptives<T> {
    let k = columns.len();
    let observed: Vec<Vec<T>> = columns
        .iter()
        .map(|(_, c)| c.iter().flatten().copied().collect())
        .collect();
    let mut correlations = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let (xs, ys): (Vec<T>, Vec<T>) = columns[i]
                .1
                .iter()
                .zip(&columns[j].1)
                .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
                .unzip();
            let r = if i == j {
                sample_sd(&xs).filter(|s| *s > T::zero()).map(|_| T::one())
            } else {
                correlation(&xs, &ys)
            };
            correlations[i][j] = r;
            correlations[j][i] = r;
        }
    }
    Descriptives {
        names: columns.iter().map(|(n, _)| n.clone()).collect(),
        n: observed.iter().map(Vec::len).collect(),
        means: observed.iter().map(|v| mean(v)).collect(),
        sds: observed.iter().map(|v| sample_sd(v)).collect(),
        correlations,
    }
}
