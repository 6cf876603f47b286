//! From a network plus a declarative model definition to a numeric design:
//! sample filters, variable transforms, imputation, indicator expansion and
//! observation weights.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Company, CompanyId, GicsSector, Side, SupplyChainGraph};
use crate::linalg::Matrix;
use crate::netmetrics::{self, ConstraintMode};
use crate::scalar::Scalar;

/// Market caps below this many billions are clamped before taking the log so
/// that weights stay positive and bounded.
pub const MARKET_CAP_FLOOR_BILLIONS: f64 = 1.05;

pub const INTERCEPT: &str = "const";

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("model spec error: {0}")]
    Spec(String),
    #[error("variable `{0}` has no observed values")]
    UnusableVariable(String),
    #[error("market cap missing")]
    MissingMarketCap,
    #[error("design has no usable rows")]
    EmptyDesign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConcentrationMetric {
    /// Number of partners.
    Count,
    /// Partners with a public identifier.
    Public,
    /// Partners with a quantified share.
    Quantified,
    /// Sum of quantified shares.
    ShareSum,
    /// Herfindahl index of quantified shares.
    Hhi,
}

/// A model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    Concentration(Side, ConcentrationMetric),
    Constraint(Side),
    AvgDp(Side),
    WavgDp(Side),
    Dp,
    MarketCap,
    Cds,
}

impl Variable {
    pub fn name(&self) -> String {
        match self {
            Variable::Cds => "cds".into(),
            Variable::Dp => "dp".into(),
            Variable::MarketCap => "market_cap".into(),
            Variable::Concentration(side, m) => {
                let m = match m {
                    ConcentrationMetric::Count => "count",
                    ConcentrationMetric::Public => "public",
                    ConcentrationMetric::Quantified => "quantified",
                    ConcentrationMetric::ShareSum => "share_sum",
                    ConcentrationMetric::Hhi => "hhi",
                };
                format!("{side}_{m}")
            }
            Variable::Constraint(side) => format!("{side}_constraint"),
            Variable::AvgDp(side) => format!("{side}_avg_dp"),
            Variable::WavgDp(side) => format!("{side}_wavg_dp"),
        }
    }

    /// Position of the variable's block in the design column order.
    pub(crate) fn block(&self) -> u8 {
        match self {
            Variable::Concentration(..) | Variable::Constraint(_) => 0,
            Variable::AvgDp(_) | Variable::WavgDp(_) => 1,
            Variable::Dp => 2,
            Variable::MarketCap => 3,
            Variable::Cds => 4,
        }
    }

    pub fn default_transform(&self) -> Transform {
        use ConcentrationMetric::*;
        match self {
            Variable::Concentration(_, Count | Public | Quantified) => Transform::Log1p,
            Variable::Concentration(_, ShareSum | Hhi) | Variable::Constraint(_) => {
                Transform::Identity
            }
            _ => Transform::Log,
        }
    }

    /// Whether the variable can be undefined for a company in the sample.
    pub fn may_be_missing(&self) -> bool {
        matches!(
            self,
            Variable::Concentration(_, ConcentrationMetric::Hhi)
                | Variable::Constraint(_)
                | Variable::AvgDp(_)
                | Variable::WavgDp(_)
        )
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Variable {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "cds" => return Ok(Variable::Cds),
            "dp" => return Ok(Variable::Dp),
            "market_cap" => return Ok(Variable::MarketCap),
            _ => {}
        }
        let unknown = || TransformError::Spec(format!("unknown variable `{s}`"));
        let (side, rest) = if let Some(rest) = s.strip_prefix("suppliers_") {
            (Side::Supplier, rest)
        } else if let Some(rest) = s.strip_prefix("customers_") {
            (Side::Customer, rest)
        } else {
            return Err(unknown());
        };
        use ConcentrationMetric::*;
        Ok(match rest {
            "count" => Variable::Concentration(side, Count),
            "public" => Variable::Concentration(side, Public),
            "quantified" => Variable::Concentration(side, Quantified),
            "share_sum" => Variable::Concentration(side, ShareSum),
            "hhi" => Variable::Concentration(side, Hhi),
            "constraint" => Variable::Constraint(side),
            "avg_dp" => Variable::AvgDp(side),
            "wavg_dp" => Variable::WavgDp(side),
            _ => return Err(unknown()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Identity,
    Log,
    Log1p,
}

impl Transform {
    pub fn apply<T: Scalar>(self, x: T) -> Result<T, TransformError> {
        match self {
            Transform::Identity => Ok(x),
            Transform::Log => log_transform(x),
            Transform::Log1p => log1p_count(x),
        }
    }
}

impl FromStr for Transform {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "identity" | "none" => Ok(Transform::Identity),
            "log" => Ok(Transform::Log),
            "log1p" => Ok(Transform::Log1p),
            other => Err(TransformError::Spec(format!("unknown transform `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    MeanImpute,
    DropRows,
}

impl FromStr for MissingPolicy {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "mean_impute" | "mean-impute" => Ok(MissingPolicy::MeanImpute),
            "drop_rows" | "drop-rows" => Ok(MissingPolicy::DropRows),
            other => Err(TransformError::Spec(format!(
                "unknown missing policy `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    #[default]
    ReciprocalLogMarketCap,
    Unweighted,
}

impl FromStr for Weighting {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "reciprocal-log-mcap" | "reciprocal_log_mcap" => Ok(Weighting::ReciprocalLogMarketCap),
            "none" | "unweighted" => Ok(Weighting::Unweighted),
            other => Err(TransformError::Spec(format!("unknown weighting `{other}`"))),
        }
    }
}

/// Declarative regression definition.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub response: Variable,
    pub predictors: Vec<Variable>,
    /// Overrides of [`Variable::default_transform`].
    pub transforms: BTreeMap<Variable, Transform>,
    /// Overrides of the default mean imputation for variables that may be missing.
    pub missing: BTreeMap<Variable, MissingPolicy>,
    pub sector_indicators: bool,
    pub country_indicators: bool,
    pub sector_reference: GicsSector,
    pub country_reference: String,
    pub weighting: Weighting,
    pub exclude_financials: bool,
    pub constraint_mode: ConstraintMode,
}

impl ModelSpec {
    /// Log CDS on log DP and log market cap with sector and country indicators.
    pub fn baseline(name: impl Into<String>) -> Self {
        ModelSpec {
            name: name.into(),
            response: Variable::Cds,
            predictors: vec![Variable::Dp, Variable::MarketCap],
            transforms: BTreeMap::new(),
            missing: BTreeMap::new(),
            sector_indicators: true,
            country_indicators: true,
            sector_reference: GicsSector::Industrials,
            country_reference: "US".into(),
            weighting: Weighting::default(),
            exclude_financials: true,
            constraint_mode: ConstraintMode::default(),
        }
    }

    pub fn with_predictors(mut self, predictors: Vec<Variable>) -> Self {
        self.predictors = predictors;
        self
    }

    pub fn transform_of(&self, v: Variable) -> Transform {
        self.transforms
            .get(&v)
            .copied()
            .unwrap_or_else(|| v.default_transform())
    }

    pub fn missing_policy_of(&self, v: Variable) -> MissingPolicy {
        self.missing.get(&v).copied().unwrap_or_default()
    }

    fn check(&self) -> Result<(), TransformError> {
        let mut seen = BTreeSet::new();
        for p in &self.predictors {
            if *p == self.response {
                return Err(TransformError::Spec(format!(
                    "`{p}` is both response and predictor"
                )));
            }
            if !seen.insert(*p) {
                return Err(TransformError::Spec(format!(
                    "predictor `{p}` listed twice"
                )));
            }
        }
        Ok(())
    }
}

pub fn log_transform<T: Scalar>(x: T) -> Result<T, TransformError> {
    if x > T::zero() && x.is_finite() {
        Ok(x.ln())
    } else {
        Err(TransformError::Domain(format!(
            "log of non-positive value {x}"
        )))
    }
}

/// ln(1 + x) for counts and other non-negative quantities.
pub fn log1p_count<T: Scalar>(x: T) -> Result<T, TransformError> {
    if x >= T::zero() && x.is_finite() {
        Ok(x.ln_1p())
    } else {
        Err(TransformError::Domain(format!(
            "log1p of negative value {x}"
        )))
    }
}

/// Splits off companies in the Financials sector, preserving order.
pub fn exclude_financials<'a, T: 'a>(
    companies: impl IntoIterator<Item = &'a Company<T>>,
) -> (Vec<&'a Company<T>>, Vec<&'a Company<T>>) {
    companies
        .into_iter()
        .partition(|c| c.gics_sector != GicsSector::Financials)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationWeight<T> {
    pub value: T,
    /// The market cap was below the floor and was raised to it.
    pub clamped: bool,
}

/// 1 / ln(max(market cap in billions, floor)).
pub fn observation_weight<T: Scalar>(
    market_cap_billions: Option<T>,
) -> Result<ObservationWeight<T>, TransformError> {
    let cap = market_cap_billions.ok_or(TransformError::MissingMarketCap)?;
    if !(cap > T::zero() && cap.is_finite()) {
        return Err(TransformError::Domain(format!(
            "market cap {cap} not positive"
        )));
    }
    let floor = T::c(MARKET_CAP_FLOOR_BILLIONS);
    let clamped = cap < floor;
    Ok(ObservationWeight {
        value: T::one() / cap.max(floor).ln(),
        clamped,
    })
}

/// Replaces missing entries with the mean of the observed ones.
pub fn impute_influence<T: Scalar>(
    column: &[Option<T>],
) -> Result<(Vec<T>, usize), TransformError> {
    let observed: Vec<T> = column.iter().flatten().copied().collect();
    if observed.is_empty() {
        return Err(TransformError::UnusableVariable("column".into()));
    }
    let mean = observed.iter().copied().sum::<T>() / T::from_usize_lossy(observed.len());
    let n_imputed = column.len() - observed.len();
    Ok((
        column.iter().map(|v| v.unwrap_or(mean)).collect(),
        n_imputed,
    ))
}

/// Why a sampled company did not make it into a design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DropReason {
    MissingDefaultProb,
    MissingMarketCap,
    MissingValue(String),
    InvalidTransform(String),
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DropReason::MissingDefaultProb => f.write_str("missing_default_prob"),
            DropReason::MissingMarketCap => f.write_str("missing_market_cap"),
            DropReason::MissingValue(v) => write!(f, "missing_value:{v}"),
            DropReason::InvalidTransform(v) => write!(f, "invalid_transform:{v}"),
        }
    }
}

/// Realized numeric design of one model.
#[derive(Debug, Clone)]
pub struct DesignMatrix<T> {
    /// Intercept first, then predictors, sector and country indicators.
    pub column_names: Vec<String>,
    pub x: Matrix<T>,
    pub y: Vec<T>,
    pub w: Vec<T>,
    pub row_ids: Vec<CompanyId>,
    /// Sampled companies (CDS present, financials filter applied) left out.
    pub dropped: Vec<(CompanyId, DropReason)>,
    pub excluded_financials: Vec<CompanyId>,
    /// Per mean-imputed variable, the number of filled entries.
    pub imputed: Vec<(Variable, usize)>,
    /// Rows whose market cap hit the weight floor.
    pub n_weight_clamped: usize,
    pub sector_reference: Option<GicsSector>,
    pub country_reference: Option<String>,
}

impl<T: Scalar> DesignMatrix<T> {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Builds a design directly from numeric parts; the first column must be
    /// the intercept.
    pub fn from_parts(column_names: Vec<String>, x: Matrix<T>, y: Vec<T>, w: Vec<T>) -> Self {
        let n = y.len();
        DesignMatrix {
            column_names,
            x,
            y,
            w,
            row_ids: (0..n).map(|i| CompanyId(format!("row{i}"))).collect(),
            dropped: Vec::new(),
            excluded_financials: Vec::new(),
            imputed: Vec::new(),
            n_weight_clamped: 0,
            sector_reference: None,
            country_reference: None,
        }
    }
}

struct Row<T> {
    pos: usize,
    values: Vec<Option<T>>,
}

fn raw_value<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    pos: usize,
    var: Variable,
    mode: ConstraintMode,
) -> Option<T> {
    let company = graph.company_at(pos);
    let count = |n: usize| Some(T::from_usize_lossy(n));
    match var {
        Variable::Cds => company.cds_5y_bps,
        Variable::Dp => company.default_prob,
        Variable::MarketCap => company.market_cap_billions,
        Variable::Concentration(side, metric) => {
            let p = netmetrics::concentration_at(graph, pos, side);
            match metric {
                ConcentrationMetric::Count => count(p.n_partners),
                ConcentrationMetric::Public => count(p.n_public_partners),
                ConcentrationMetric::Quantified => count(p.n_quantified),
                ConcentrationMetric::ShareSum => Some(p.share_sum),
                ConcentrationMetric::Hhi => p.hhi,
            }
        }
        Variable::Constraint(side) => netmetrics::constraint_at(graph, pos, side, mode).ok(),
        Variable::AvgDp(side) => netmetrics::influence_at(graph, pos, side).avg_dp,
        Variable::WavgDp(side) => netmetrics::influence_at(graph, pos, side).wavg_dp,
    }
}

/// Builds the design for `spec` over the companies of `graph` that carry a
/// CDS spread. Network metrics are computed on the full graph.
pub fn build_design<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    spec: &ModelSpec,
) -> Result<DesignMatrix<T>, TransformError> {
    spec.check()?;

    let mut predictors = spec.predictors.clone();
    predictors.sort_by_key(Variable::block);
    // column 0 of each row's values is the response
    let vars: Vec<Variable> = std::iter::once(spec.response)
        .chain(predictors.iter().copied())
        .collect();

    let sampled: Vec<usize> = (0..graph.companies().len())
        .filter(|&p| graph.company_at(p).cds_5y_bps.is_some())
        .collect();
    let mut excluded_financials = Vec::new();
    let mut dropped = Vec::new();
    let mut rows: Vec<Row<T>> = Vec::new();
    for pos in sampled {
        let c = graph.company_at(pos);
        if spec.exclude_financials && c.gics_sector == GicsSector::Financials {
            excluded_financials.push(c.id.clone());
            continue;
        }
        if c.default_prob.is_none() {
            dropped.push((c.id.clone(), DropReason::MissingDefaultProb));
            continue;
        }
        if c.market_cap_billions.is_none() {
            dropped.push((c.id.clone(), DropReason::MissingMarketCap));
            continue;
        }
        let values = vars
            .iter()
            .map(|&v| raw_value(graph, pos, v, spec.constraint_mode))
            .collect();
        rows.push(Row { pos, values });
    }

    // drop rows missing a value the spec does not impute
    rows.retain(|row| {
        for (k, &v) in vars.iter().enumerate() {
            let imputable = k > 0
                && v.may_be_missing()
                && spec.missing_policy_of(v) == MissingPolicy::MeanImpute;
            if row.values[k].is_none() && !imputable {
                dropped.push((
                    graph.company_at(row.pos).id.clone(),
                    DropReason::MissingValue(v.name()),
                ));
                return false;
            }
        }
        true
    });

    let mut imputed = Vec::new();
    for (k, &v) in vars.iter().enumerate().skip(1) {
        if !(v.may_be_missing() && spec.missing_policy_of(v) == MissingPolicy::MeanImpute)
            || rows.is_empty()
        {
            continue;
        }
        let column: Vec<Option<T>> = rows.iter().map(|r| r.values[k]).collect();
        let (filled, n) =
            impute_influence(&column).map_err(|_| TransformError::UnusableVariable(v.name()))?;
        for (row, f) in rows.iter_mut().zip(filled) {
            row.values[k] = Some(f);
        }
        if n > 0 {
            imputed.push((v, n));
        }
    }

    let mut transformed: Vec<(usize, Vec<T>)> = Vec::with_capacity(rows.len());
    'rows: for row in &rows {
        let mut out = Vec::with_capacity(vars.len());
        for (k, &v) in vars.iter().enumerate() {
            let raw = row.values[k].expect("missing values removed or imputed");
            match spec.transform_of(v).apply(raw) {
                Ok(t) if t.is_finite() => out.push(t),
                _ => {
                    dropped.push((
                        graph.company_at(row.pos).id.clone(),
                        DropReason::InvalidTransform(v.name()),
                    ));
                    continue 'rows;
                }
            }
        }
        transformed.push((row.pos, out));
    }
    if transformed.is_empty() {
        return Err(TransformError::EmptyDesign);
    }

    let mut sector_reference = None;
    let mut sector_levels: Vec<GicsSector> = Vec::new();
    if spec.sector_indicators {
        let present: BTreeSet<GicsSector> = transformed
            .iter()
            .map(|(p, _)| graph.company_at(*p).gics_sector)
            .collect();
        let reference = if present.contains(&spec.sector_reference) {
            spec.sector_reference
        } else {
            *present.iter().next().expect("non-empty")
        };
        sector_levels = present.into_iter().filter(|s| *s != reference).collect();
        sector_reference = Some(reference);
    }
    let mut country_reference = None;
    let mut country_levels: Vec<String> = Vec::new();
    if spec.country_indicators {
        let present: BTreeSet<&str> = transformed
            .iter()
            .map(|(p, _)| graph.company_at(*p).country_of_risk.as_str())
            .collect();
        let reference = if present.contains(spec.country_reference.as_str()) {
            spec.country_reference.clone()
        } else {
            present.iter().next().expect("non-empty").to_string()
        };
        country_levels = present
            .into_iter()
            .filter(|c| *c != reference)
            .map(str::to_owned)
            .collect();
        country_reference = Some(reference);
    }

    let mut column_names = vec![INTERCEPT.to_string()];
    column_names.extend(predictors.iter().map(Variable::name));
    column_names.extend(sector_levels.iter().map(|s| format!("sector:{}", s.name())));
    column_names.extend(country_levels.iter().map(|c| format!("country:{c}")));

    let n = transformed.len();
    let k = column_names.len();
    let mut x = Matrix::zeros(n, k);
    let mut y = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut row_ids = Vec::with_capacity(n);
    let mut n_weight_clamped = 0;
    for (i, (pos, values)) in transformed.iter().enumerate() {
        let c = graph.company_at(*pos);
        y.push(values[0]);
        x[(i, 0)] = T::one();
        for (j, &v) in values.iter().enumerate().skip(1) {
            x[(i, j)] = v;
        }
        let offset = values.len();
        if let Some(j) = sector_levels.iter().position(|s| *s == c.gics_sector) {
            x[(i, offset + j)] = T::one();
        }
        let offset = offset + sector_levels.len();
        if let Some(j) = country_levels.iter().position(|s| *s == c.country_of_risk) {
            x[(i, offset + j)] = T::one();
        }
        let weight = match spec.weighting {
            Weighting::Unweighted => T::one(),
            Weighting::ReciprocalLogMarketCap => {
                let ow = observation_weight(c.market_cap_billions)?;
                n_weight_clamped += usize::from(ow.clamped);
                ow.value
            }
        };
        w.push(weight);
        row_ids.push(c.id.clone());
    }

    Ok(DesignMatrix {
        column_names,
        x,
        y,
        w,
        row_ids,
        dropped,
        excluded_financials,
        imputed,
        n_weight_clamped,
        sector_reference,
        country_reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Relationship;

    #[test]
    fn log_transforms() {
        assert_eq!(log1p_count(0.0f64).unwrap(), 0.0);
        assert!((log1p_count(std::f64::consts::E - 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((log_transform(75.9f64).unwrap() - 4.33).abs() < 0.005);
        assert!((4.33f64.exp() - 75.9).abs() < 0.05);
        assert!(log_transform(0.0f64).is_err());
        assert!(log1p_count(-1.0f64).is_err());
    }

    #[test]
    fn weights() {
        let e = std::f64::consts::E;
        assert!((observation_weight(Some(e)).unwrap().value - 1.0).abs() < 1e-15);
        assert!((observation_weight(Some(e * e)).unwrap().value - 0.5).abs() < 1e-15);
        let w = observation_weight(Some(1.1f64)).unwrap();
        assert!((w.value - 10.492058687).abs() < 1e-8 && !w.clamped);
        let low = observation_weight(Some(0.2f64)).unwrap();
        assert!(low.clamped);
        assert!((low.value - 1.0 / 1.05f64.ln()).abs() < 1e-12);
        assert!(matches!(
            observation_weight::<f64>(None),
            Err(TransformError::MissingMarketCap)
        ));
    }

    #[test]
    fn imputation() {
        let (v, n) = impute_influence(&[Some(0.2f64), None, Some(0.4)]).unwrap();
        assert!((v[1] - 0.3).abs() < 1e-15);
        assert_eq!(n, 1);
        let (v, n) = impute_influence(&[Some(0.2), Some(0.4)]).unwrap();
        assert_eq!((v, n), (vec![0.2, 0.4], 0));
        let mut col = vec![None; 5];
        col.push(Some(0.1));
        let (v, n) = impute_influence(&col).unwrap();
        assert!(v.iter().all(|x| *x == 0.1));
        assert_eq!(n, 5);
        assert!(impute_influence::<f64>(&[None, None]).is_err());
    }

    #[test]
    fn financial_split() {
        let mk = |id: &str, s| Company::<f64>::new(id, s, "US");
        let all = [
            mk("a", GicsSector::Energy),
            mk("b", GicsSector::Financials),
            mk("c", GicsSector::Utilities),
        ];
        let (kept, removed) = exclude_financials(&all);
        assert_eq!(
            kept.iter().map(|c| c.id.as_str()).collect::<Vec<_>>(),
            ["a", "c"]
        );
        assert_eq!(removed.len(), 1);
        let none: [Company<f64>; 0] = [];
        assert_eq!(exclude_financials(&none).0.len(), 0);
        let fin = [mk("x", GicsSector::Financials)];
        let (kept, removed) = exclude_financials(&fin);
        assert!(kept.is_empty() && removed.len() == 1);
    }

    #[test]
    fn variable_names_round_trip() {
        for side in [Side::Supplier, Side::Customer] {
            use ConcentrationMetric::*;
            for v in [
                Variable::Concentration(side, Count),
                Variable::Concentration(side, Public),
                Variable::Concentration(side, Quantified),
                Variable::Concentration(side, ShareSum),
                Variable::Concentration(side, Hhi),
                Variable::Constraint(side),
                Variable::AvgDp(side),
                Variable::WavgDp(side),
            ] {
                assert_eq!(v.name().parse::<Variable>().unwrap(), v);
            }
        }
        assert!("suppliers_degree".parse::<Variable>().is_err());
    }

    fn focal(id: &str, dp: f64, cap: f64) -> Company<f64> {
        let mut c = Company::new(id, GicsSector::Industrials, "US");
        c.cds_5y_bps = Some(80.0);
        c.default_prob = Some(dp);
        c.market_cap_billions = Some(cap);
        c
    }

    /// Ten focal companies, each supplied by one partner; three partners lack a DP.
    fn panel() -> SupplyChainGraph<f64> {
        let mut companies = Vec::new();
        let mut rels = Vec::new();
        for i in 0..10 {
            companies.push(focal(
                &format!("F{i}"),
                0.001 * (i + 1) as f64,
                5.0 + i as f64,
            ));
            let mut p = Company::new(format!("P{i}"), GicsSector::Energy, "US");
            if i >= 3 {
                p.default_prob = Some(0.002 * i as f64);
            }
            companies.push(p);
            rels.push(
                Relationship::new(format!("P{i}").as_str(), format!("F{i}").as_str())
                    .with_cost_share(0.3),
            );
        }
        SupplyChainGraph::build(companies, rels).unwrap()
    }

    #[test]
    fn impute_versus_drop() {
        let g = panel();
        let spec = ModelSpec::baseline("m")
            .with_predictors(vec![Variable::Dp, Variable::AvgDp(Side::Supplier)]);
        let imputed = build_design(&g, &spec).unwrap();
        assert_eq!(imputed.n(), 10);
        assert_eq!(imputed.imputed, vec![(Variable::AvgDp(Side::Supplier), 3)]);
        let mut drop = spec.clone();
        drop.missing
            .insert(Variable::AvgDp(Side::Supplier), MissingPolicy::DropRows);
        let dropped = build_design(&g, &drop).unwrap();
        assert_eq!(dropped.n(), 7);
        assert_eq!(dropped.dropped.len(), 3);
        assert!(matches!(dropped.dropped[0].1, DropReason::MissingValue(_)));
    }

    #[test]
    fn minimal_design_shape() {
        let g = panel();
        let mut spec = ModelSpec::baseline("m").with_predictors(vec![Variable::Dp]);
        spec.sector_indicators = false;
        spec.country_indicators = false;
        let d = build_design(&g, &spec).unwrap();
        assert_eq!(d.column_names, ["const", "dp"]);
        assert_eq!(d.x.cols(), 2);
        assert!((d.x[(0, 1)] - 0.001f64.ln()).abs() < 1e-15);
        assert!((d.w[0] - 1.0 / 5.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn spec_errors() {
        let g = panel();
        let spec = ModelSpec::baseline("m").with_predictors(vec![Variable::Dp, Variable::Dp]);
        assert!(matches!(
            build_design(&g, &spec),
            Err(TransformError::Spec(_))
        ));
        let spec = ModelSpec::baseline("m").with_predictors(vec![Variable::Cds]);
        assert!(matches!(
            build_design(&g, &spec),
            Err(TransformError::Spec(_))
        ));
        let empty = SupplyChainGraph::<f64>::build(vec![], vec![]).unwrap();
        assert!(matches!(
            build_design(&empty, &ModelSpec::baseline("m")),
            Err(TransformError::EmptyDesign)
        ));
    }

    #[test]
    fn column_block_order() {
        let g = panel();
        let spec = ModelSpec::baseline("m").with_predictors(vec![
            Variable::MarketCap,
            Variable::Dp,
            Variable::AvgDp(Side::Supplier),
            Variable::Concentration(Side::Supplier, ConcentrationMetric::Count),
        ]);
        let d = build_design(&g, &spec).unwrap();
        assert_eq!(
            d.column_names,
            [
                "const",
                "suppliers_count",
                "suppliers_avg_dp",
                "dp",
                "market_cap"
            ]
        );
    }
}
