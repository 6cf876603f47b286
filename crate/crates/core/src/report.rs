//! Regression tables in the layout of a multi-model results table:
//! estimate with stars, standard error in parentheses beneath, and a
//! statistics block.

use std::fmt::Write;

use crate::scalar::Scalar;
use crate::stats::{Bin, Descriptives};
use crate::transform::{DesignMatrix, Variable, INTERCEPT};
use crate::wls::{delta_r2_bps, significance_stars, FitResult};

/// One fitted model and the bookkeeping of the design behind it.
#[derive(Debug, Clone)]
pub struct ModelReport<T> {
    pub name: String,
    pub fit: FitResult<T>,
    pub n_dropped: usize,
    pub n_imputed: usize,
    pub n_weight_clamped: usize,
    pub has_sector_indicators: bool,
    pub has_country_indicators: bool,
}

impl<T: Scalar> ModelReport<T> {
    pub fn new(name: impl Into<String>, design: &DesignMatrix<T>, fit: FitResult<T>) -> Self {
        ModelReport {
            name: name.into(),
            n_dropped: design.dropped.len(),
            n_imputed: design.imputed.iter().map(|(_, n)| n).sum(),
            n_weight_clamped: design.n_weight_clamped,
            has_sector_indicators: design.column_names.iter().any(|c| c.starts_with("sector:")),
            has_country_indicators: design
                .column_names
                .iter()
                .any(|c| c.starts_with("country:")),
            fit,
        }
    }

    /// R² as printed, to four decimals.
    pub fn printed_r2(&self) -> f64 {
        round_to(self.fit.r2.to_f64_lossy(), 4)
    }
}

fn round_to(v: f64, decimals: usize) -> f64 {
    format!("{v:.decimals$}")
        .parse()
        .expect("formatted float parses")
}

/// Basis-point gain of `model` over `base`, computed from the printed R² so
/// the table stays internally consistent.
pub fn printed_delta_bps<T: Scalar>(base: &ModelReport<T>, model: &ModelReport<T>) -> i64 {
    delta_r2_bps(base.printed_r2(), model.printed_r2())
}

fn is_indicator(name: &str) -> bool {
    name.starts_with("sector:") || name.starts_with("country:")
}

const LABEL_WIDTH: usize = 36;
const CELL_WIDTH: usize = 14;

fn push_row(out: &mut String, label: &str, cells: &[String]) {
    let _ = write!(out, "{label:<LABEL_WIDTH$}");
    for c in cells {
        let _ = write!(out, "{c:>CELL_WIDTH$}");
    }
    let trimmed = out.trim_end_matches(' ').len();
    out.truncate(trimmed);
    out.push('\n');
}

/// Renders the models side by side. With `full` the indicator coefficients
/// are listed; otherwise they are summarized as `incl.`.
pub fn render<T: Scalar>(reports: &[ModelReport<T>], baseline: usize, full: bool) -> String {
    let mut rows: Vec<&str> = Vec::new();
    for r in reports {
        for name in &r.fit.column_names {
            if name != INTERCEPT && (full || !is_indicator(name)) && !rows.contains(&name.as_str())
            {
                rows.push(name);
            }
        }
    }
    // predictors, then indicators, then the constant
    rows.sort_by_key(|n| {
        (
            is_indicator(n),
            n.parse::<Variable>().map_or(u8::MAX, |v| v.block()),
        )
    });
    rows.push(INTERCEPT);

    let mut out = String::new();
    let rule = "-".repeat(LABEL_WIDTH + CELL_WIDTH * reports.len());
    out.push_str(&rule);
    out.push('\n');
    push_row(
        &mut out,
        "Variable",
        &reports.iter().map(|r| r.name.clone()).collect::<Vec<_>>(),
    );
    out.push_str(&rule);
    out.push('\n');

    for name in rows {
        let label = if name == INTERCEPT { "Constant" } else { name };
        let mut est = Vec::new();
        let mut se = Vec::new();
        for r in reports {
            match r.fit.column_names.iter().position(|c| c == name) {
                Some(j) => {
                    let stars = significance_stars(r.fit.p_values[j]);
                    est.push(format!(
                        "{:.3}{stars:<3}",
                        r.fit.coefficients[j].to_f64_lossy()
                    ));
                    se.push(format!("({:.3})   ", r.fit.std_errors[j].to_f64_lossy()));
                }
                None => {
                    est.push(String::new());
                    se.push(String::new());
                }
            }
        }
        push_row(&mut out, label, &est);
        push_row(&mut out, "", &se);
    }
    if !full {
        let incl = |b: bool| {
            if b {
                "incl.   ".to_string()
            } else {
                String::new()
            }
        };
        push_row(
            &mut out,
            "GICS sector indicators",
            &reports
                .iter()
                .map(|r| incl(r.has_sector_indicators))
                .collect::<Vec<_>>(),
        );
        push_row(
            &mut out,
            "Country of risk indicators",
            &reports
                .iter()
                .map(|r| incl(r.has_country_indicators))
                .collect::<Vec<_>>(),
        );
    }
    out.push_str(&rule);
    out.push('\n');

    let base = &reports[baseline];
    let cells = |f: &dyn Fn(usize, &ModelReport<T>) -> String| -> Vec<String> {
        reports
            .iter()
            .enumerate()
            .map(|(i, r)| format!("{}   ", f(i, r)))
            .collect()
    };
    push_row(
        &mut out,
        "Observations",
        &cells(&|_, r| r.fit.n.to_string()),
    );
    push_row(
        &mut out,
        &format!("Dropped obs. ({})", base.name),
        &cells(&|i, r| {
            if i == baseline {
                "N/A".into()
            } else {
                (base.fit.n as i64 - r.fit.n as i64).to_string()
            }
        }),
    );
    push_row(
        &mut out,
        "R2",
        &cells(&|_, r| format!("{:.4}", r.fit.r2.to_f64_lossy())),
    );
    push_row(
        &mut out,
        "Adjusted R2",
        &cells(&|_, r| format!("{:.4}", r.fit.adj_r2.to_f64_lossy())),
    );
    push_row(
        &mut out,
        &format!("Delta R2 (bps; from {})", base.name),
        &cells(&|i, r| {
            if i == baseline {
                "N/A".into()
            } else {
                printed_delta_bps(base, r).to_string()
            }
        }),
    );
    out.push_str(&rule);
    out.push('\n');
    out.push_str("*p<0.05; **p<0.01; ***p<0.001\n");

    let notes: Vec<String> = reports
        .iter()
        .filter(|r| r.n_imputed > 0 || r.n_weight_clamped > 0 || r.n_dropped > 0)
        .map(|r| {
            format!(
                "{}: {} dropped, {} imputed value(s), {} market cap(s) clamped to weight floor",
                r.name, r.n_dropped, r.n_imputed, r.n_weight_clamped
            )
        })
        .collect();
    for n in notes {
        out.push_str(&n);
        out.push('\n');
    }
    out
}

/// Means, SDs and the lower-triangular correlation matrix.
pub fn render_descriptives<T: Scalar>(d: &Descriptives<T>) -> String {
    let fmt = |v: Option<T>| {
        v.map(|x| format!("{:.2}", x.to_f64_lossy()))
            .unwrap_or_else(|| "NA".into())
    };
    let mut out = String::from("variable,n,mean,sd");
    for i in 0..d.names.len() {
        let _ = write!(out, ",{}", i + 1);
    }
    out.push('\n');
    for i in 0..d.names.len() {
        let _ = write!(
            out,
            "{}. {},{},{},{}",
            i + 1,
            d.names[i],
            d.n[i],
            fmt(d.means[i]),
            fmt(d.sds[i])
        );
        for j in 0..d.names.len() {
            if j <= i {
                let _ = write!(out, ",{}", fmt(d.correlations[i][j]));
            } else {
                out.push(',');
            }
        }
        out.push('\n');
    }
    out
}

pub fn render_histogram<T: Scalar>(name: &str, bins: &[Bin<T>]) -> String {
    let mut out = format!("# {name}\nlower,upper,count\n");
    for b in bins {
        let _ = writeln!(
            out,
            "{:.6},{:.6},{}",
            b.lower.to_f64_lossy(),
            b.upper.to_f64_lossy(),
            b.count
        );
    }
    out
}
