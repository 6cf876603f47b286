//! End-to-end runs: files in, rendered tables out.

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::config::{self, ConfigError, SpecFile};
use crate::graph::{GicsSector, GraphError, Side, SupplyChainGraph, Violation};
use crate::ingest::{self, IngestError};
use crate::netmetrics::{all_metrics, metrics_at, ConstraintMode};
use crate::report::{self, ModelReport};
use crate::scalar::Scalar;
use crate::stats::{descriptives, histogram, Descriptives};
use crate::synth::CALIBRATED_VARIABLES;
use crate::transform::{build_design, log1p_count, log_transform, TransformError, Weighting};
use crate::wls::{fit, FitError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parse: {0}")]
    Parse(#[from] IngestError),
    #[error("spec: {0}")]
    Spec(#[from] ConfigError),
    #[error("validation: {} violation(s)\n{}", .0.len(), render_violations(.0))]
    Validation(Vec<Violation>),
    #[error("validation: {0}")]
    Graph(GraphError),
    #[error("transform: model {model}: {source}")]
    Transform {
        model: String,
        source: TransformError,
    },
    #[error("fit: model {model}: {source}")]
    Fit { model: String, source: FitError },
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

fn render_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("  {x}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl PipelineError {
    /// Process exit status: 2 for unreadable input or specs, 3 for data that
    /// parse but violate invariants, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Parse(_) | PipelineError::Spec(_) | PipelineError::Output(_) => 2,
            PipelineError::Validation(_) | PipelineError::Graph(_) => 3,
            PipelineError::Transform {
                source: TransformError::Spec(_),
                ..
            } => 2,
            PipelineError::Transform { .. } | PipelineError::Fit { .. } => 4,
        }
    }
}

impl From<GraphError> for PipelineError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Invalid(v) => PipelineError::Validation(v),
            other => PipelineError::Graph(other),
        }
    }
}

/// Reads both files and builds a validated graph.
pub fn load_graph<T: Scalar>(
    companies: &Path,
    relationships: &Path,
) -> Result<SupplyChainGraph<T>, PipelineError> {
    let cs = ingest::parse_companies(companies)?;
    let rs = ingest::parse_relationships(relationships)?;
    Ok(SupplyChainGraph::build(cs, rs)?)
}

#[derive(Debug, Clone, Default)]
pub struct FitOptions {
    pub weighting: Option<Weighting>,
    pub keep_financials: bool,
    pub full: bool,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput<T> {
    pub reports: Vec<ModelReport<T>>,
    pub baseline: usize,
    pub rendered: String,
}

/// Fits every model of `specs` on `graph`. Models are fitted concurrently;
/// reports keep the order of the spec file.
pub fn fit_models<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    specs: &SpecFile,
    options: &FitOptions,
) -> Result<PipelineOutput<T>, PipelineError> {
    let models: Vec<_> = specs
        .models
        .iter()
        .cloned()
        .map(|mut m| {
            if let Some(w) = options.weighting {
                m.weighting = w;
            }
            if options.keep_financials {
                m.exclude_financials = false;
            }
            m
        })
        .collect();

    let results: Vec<Result<ModelReport<T>, PipelineError>> = std::thread::scope(|s| {
        let handles: Vec<_> = models
            .iter()
            .map(|spec| {
                s.spawn(move || {
                    let design =
                        build_design(graph, spec).map_err(|source| PipelineError::Transform {
                            model: spec.name.clone(),
                            source,
                        })?;
                    let result = fit(&design).map_err(|source| PipelineError::Fit {
                        model: spec.name.clone(),
                        source,
                    })?;
                    Ok(ModelReport::new(spec.name.clone(), &design, result))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("model thread panicked"))
            .collect()
    });
    let reports = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let baseline = specs.baseline_index();
    let rendered = report::render(&reports, baseline, options.full);
    Ok(PipelineOutput {
        reports,
        baseline,
        rendered,
    })
}

pub fn run_pipeline<T: Scalar>(
    companies: &Path,
    relationships: &Path,
    spec: &Path,
    options: &FitOptions,
) -> Result<PipelineOutput<T>, PipelineError> {
    let graph = load_graph(companies, relationships)?;
    let specs = config::load(spec)?;
    fit_models(&graph, &specs, options)
}

fn cell<T: Scalar>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-company network metrics as CSV, one row per company in graph order.
pub fn write_metrics<T: Scalar, W: Write>(
    out: &mut W,
    graph: &SupplyChainGraph<T>,
    mode: ConstraintMode,
) -> std::io::Result<()> {
    let mut header = vec!["id".to_string()];
    for side in [Side::Supplier, Side::Customer] {
        let l = side.label();
        for m in [
            "count",
            "public",
            "quantified",
            "share_sum",
            "hhi",
            "constraint",
            "avg_dp",
            "wavg_dp",
        ] {
            header.push(format!("{l}_{m}"));
        }
    }
    writeln!(out, "{}", header.join(","))?;
    for m in all_metrics(graph, mode) {
        let mut row = vec![m.id.to_string()];
        for side in [Side::Supplier, Side::Customer] {
            let c = m.concentration(side);
            let i = m.influence(side);
            row.extend([
                c.n_partners.to_string(),
                c.n_public_partners.to_string(),
                c.n_quantified.to_string(),
                c.share_sum.to_string(),
                cell(c.hhi),
                cell(m.constraint(side)),
                cell(i.avg_dp),
                cell(i.wavg_dp),
            ]);
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// The seven log-scale company variables over the CDS sample.
pub fn describe_columns<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    keep_financials: bool,
) -> Vec<(String, Vec<Option<T>>)> {
    let mut cols: Vec<(String, Vec<Option<T>>)> = CALIBRATED_VARIABLES
        .iter()
        .map(|n| (n.to_string(), Vec::new()))
        .collect();
    let log = |v: Option<T>| v.and_then(|x| log_transform(x).ok());
    for (pos, c) in graph.companies().iter().enumerate() {
        if c.cds_5y_bps.is_none() || (!keep_financials && c.gics_sector == GicsSector::Financials) {
            continue;
        }
        let m = metrics_at(graph, pos, ConstraintMode::SameSide);
        let count = |n: usize| log1p_count(T::from_usize_lossy(n)).ok();
        let values = [
            log(c.cds_5y_bps),
            count(m.suppliers.n_partners),
            count(m.customers.n_partners),
            log(m.supplier_influence.avg_dp),
            log(m.customer_influence.avg_dp),
            log(c.default_prob),
            log(c.market_cap_billions),
        ];
        for (col, v) in cols.iter_mut().zip(values) {
            col.1.push(v);
        }
    }
    cols
}

pub fn describe<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    keep_financials: bool,
    bins: Option<usize>,
) -> (Descriptives<T>, String) {
    let cols = describe_columns(graph, keep_financials);
    let d = descriptives(&cols);
    let mut text = report::render_descriptives(&d);
    if let Some(n) = bins {
        for (name, values) in &cols {
            let observed: Vec<T> = values.iter().flatten().copied().collect();
            if let Some(b) = histogram(&observed, n) {
                text.push('\n');
                text.push_str(&report::render_histogram(name, &b));
            }
        }
    }
    (d, text)
}
