//! Synthetic company panels and supply-chain graphs calibrated to published
//! sample moments, for end-to-end runs without proprietary data.
//!
//! Every focal company (the ones carrying a CDS spread) gets its own set of
//! partner-only companies. Seven log-scale company variables are drawn
//! jointly Gaussian with the configured means, standard deviations and
//! correlations; partner counts and partners' default probabilities are then
//! constructed so that the realized log variables hit those draws.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::graph::{Company, GicsSector, Relationship, SupplyChainGraph};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("infeasible configuration: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub mean: f64,
    pub sd: f64,
}

const fn m(mean: f64, sd: f64) -> Moment {
    Moment { mean, sd }
}

/// The jointly drawn company variables, all on the log scale.
pub const CALIBRATED_VARIABLES: [&str; 7] = [
    "CDS (log)",
    "Suppliers (log)",
    "Customers (log)",
    "Suppliers' avg. DP (log)",
    "Customers' avg. DP (log)",
    "DP (log)",
    "Market Cap (log)",
];

/// Sample means and standard deviations of the seven log variables for the
/// 676 non-financial CDS names.
pub const PUBLISHED_MOMENTS: [Moment; 7] = [
    m(4.33, 0.78),
    m(3.78, 1.27),
    m(3.12, 1.46),
    m(-6.10, 0.78),
    m(-6.17, 1.02),
    m(-7.50, 1.72),
    m(3.39, 2.08),
];

/// Pairwise correlations of the same seven variables.
pub const PUBLISHED_CORRELATIONS: [[f64; 7]; 7] = [
    [1.00, -0.33, -0.34, -0.18, -0.11, 0.40, -0.51],
    [-0.33, 1.00, 0.60, 0.18, 0.20, -0.11, 0.57],
    [-0.34, 0.60, 1.00, 0.27, 0.23, -0.07, 0.49],
    [-0.18, 0.18, 0.27, 1.00, 0.44, 0.38, 0.41],
    [-0.11, 0.20, 0.23, 0.44, 1.00, 0.35, 0.35],
    [0.40, -0.11, -0.07, 0.38, 0.35, 1.00, 0.15],
    [-0.51, 0.57, 0.49, 0.41, 0.35, 0.15, 1.00],
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_companies: usize,
    pub seed: u64,
    /// Targets in the order of [`CALIBRATED_VARIABLES`].
    pub target_moments: [Moment; 7],
    /// `None` draws the seven variables independently.
    pub target_correlations: Option<[[f64; 7]; 7]>,
    /// Relative weights of the non-financial sectors.
    pub sector_weights: Vec<(GicsSector, f64)>,
    pub country_weights: Vec<(String, f64)>,
    pub fraction_financials: f64,
    pub fraction_quantified_edges: f64,
    pub fraction_partners_with_dp: f64,
    pub fraction_public_partners: f64,
    /// Expected partner-to-partner ties per partner, within one focal side.
    pub partner_tie_rate: f64,
    /// Log-scale spread of partners' default probabilities around their
    /// focal company's target average.
    pub partner_dp_dispersion: f64,
    /// Pareto tail index of raw relationship sizes before rescaling.
    pub share_tail_index: f64,
    pub max_partners: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        use GicsSector::*;
        let countries = [
            ("US", 0.50),
            ("GB", 0.08),
            ("JP", 0.07),
            ("FR", 0.06),
            ("DE", 0.05),
            ("CA", 0.03),
            ("IT", 0.025),
            ("NL", 0.02),
            ("ES", 0.02),
            ("CH", 0.02),
            ("SE", 0.015),
            ("GR", 0.01),
            ("NO", 0.01),
            ("FI", 0.01),
            ("BE", 0.01),
            ("PT", 0.01),
            ("AT", 0.005),
            ("BR", 0.005),
            ("DK", 0.005),
            ("ID", 0.005),
            ("IE", 0.005),
            ("LU", 0.005),
            ("MX", 0.005),
            ("PE", 0.005),
        ];
        SynthConfig {
            n_companies: 828,
            seed: 0,
            target_moments: PUBLISHED_MOMENTS,
            target_correlations: Some(PUBLISHED_CORRELATIONS),
            sector_weights: vec![
                (ConsumerDiscretionary, 0.17),
                (ConsumerStaples, 0.09),
                (Energy, 0.09),
                (HealthCare, 0.06),
                (Industrials, 0.17),
                (InformationTechnology, 0.08),
                (Materials, 0.13),
                (TelecommunicationServices, 0.07),
                (Utilities, 0.14),
            ],
            country_weights: countries.iter().map(|(c, w)| (c.to_string(), *w)).collect(),
            fraction_financials: 152.0 / 828.0,
            fraction_quantified_edges: 0.37,
            fraction_partners_with_dp: 0.70,
            fraction_public_partners: 0.6,
            partner_tie_rate: 0.05,
            partner_dp_dispersion: 1.0,
            share_tail_index: 1.2,
            max_partners: 10_000,
        }
    }
}

fn cholesky(a: &[[f64; 7]; 7]) -> Option<[[f64; 7]; 7]> {
    let mut l = [[0.0; 7]; 7];
    for i in 0..7 {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if d <= 0.0 {
                    return None;
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

fn check_fraction(name: &str, v: f64) -> Result<(), SynthError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(SynthError::Infeasible(format!(
            "{name} = {v} outside [0,1]"
        )))
    }
}

fn check(config: &SynthConfig) -> Result<[[f64; 7]; 7], SynthError> {
    if config.n_companies < 2 {
        return Err(SynthError::Infeasible(
            "n_companies must be at least 2".into(),
        ));
    }
    check_fraction("fraction_financials", config.fraction_financials)?;
    check_fraction(
        "fraction_quantified_edges",
        config.fraction_quantified_edges,
    )?;
    check_fraction(
        "fraction_partners_with_dp",
        config.fraction_partners_with_dp,
    )?;
    check_fraction("fraction_public_partners", config.fraction_public_partners)?;
    for (name, mo) in CALIBRATED_VARIABLES.iter().zip(&config.target_moments) {
        if !(mo.sd > 0.0 && mo.sd.is_finite() && mo.mean.is_finite()) {
            return Err(SynthError::Infeasible(format!(
                "{name}: invalid moments {mo:?}"
            )));
        }
    }
    for (name, idx) in [("suppliers", 3), ("customers", 4), ("company", 5)] {
        if config.target_moments[idx].mean >= 0.0 {
            return Err(SynthError::Infeasible(format!(
                "{name} log default probability mean must be negative"
            )));
        }
    }
    if !(config.partner_tie_rate >= 0.0
        && config.partner_dp_dispersion >= 0.0
        && config.share_tail_index > 0.0)
    {
        return Err(SynthError::Infeasible(
            "negative rate, dispersion or tail index".into(),
        ));
    }
    if config
        .sector_weights
        .iter()
        .any(|(s, _)| *s == GicsSector::Financials)
    {
        return Err(SynthError::Infeasible(
            "financials are set by fraction_financials".into(),
        ));
    }
    let positive = |ws: &mut dyn Iterator<Item = f64>| {
        let v: Vec<f64> = ws.collect();
        v.iter().all(|w| *w >= 0.0) && v.iter().sum::<f64>() > 0.0
    };
    if !positive(&mut config.sector_weights.iter().map(|x| x.1)) && config.fraction_financials < 1.0
    {
        return Err(SynthError::Infeasible(
            "sector weights must be non-negative with a positive sum".into(),
        ));
    }
    if !positive(&mut config.country_weights.iter().map(|x| x.1)) {
        return Err(SynthError::Infeasible(
            "country weights must be non-negative with a positive sum".into(),
        ));
    }
    match &config.target_correlations {
        None => {
            let mut id = [[0.0; 7]; 7];
            for (i, row) in id.iter_mut().enumerate() {
                row[i] = 1.0;
            }
            Ok(id)
        }
        Some(c) => {
            let valid = (0..7)
                .all(|i| c[i][i] == 1.0 && (0..i).all(|j| (c[i][j] - c[j][i]).abs() <= 1e-12));
            if !valid {
                return Err(SynthError::Infeasible(
                    "correlation matrix must be symmetric with unit diagonal".into(),
                ));
            }
            cholesky(c).ok_or_else(|| {
                SynthError::Infeasible("correlation matrix is not positive definite".into())
            })
        }
    }
}

fn pick<'a, K>(rng: &mut ChaCha8Rng, items: &'a [(K, f64)]) -> &'a K {
    let total: f64 = items.iter().map(|x| x.1).sum();
    let mut u = rng.random::<f64>() * total;
    for (k, w) in items {
        if u < *w {
            return k;
        }
        u -= w;
    }
    &items.last().expect("non-empty weights").0
}

/// Shifts log-scale draws so that the log of their arithmetic mean on the
/// probability scale equals `target`, shrinking the spread if any
/// probability would leave (0, 0.5).
fn centre_log_dps(mut draws: Vec<f64>, target: f64) -> Vec<f64> {
    let cap = 0.5f64.ln();
    for _ in 0..60 {
        let mean = draws.iter().map(|e| e.exp()).sum::<f64>() / draws.len() as f64;
        let shift = target - mean.ln();
        let shifted: Vec<f64> = draws.iter().map(|e| e + shift).collect();
        if shifted.iter().all(|v| *v < cap) {
            return shifted;
        }
        draws.iter_mut().for_each(|e| *e *= 0.5);
    }
    vec![target; draws.len()]
}

fn skewed_shares(rng: &mut ChaCha8Rng, k: usize, tail: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..k)
        .map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / tail))
        .collect();
    let total_share = 0.05 + 0.9 * rng.random::<f64>();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|r| total_share * r / sum).collect()
}

struct Builder<'c> {
    config: &'c SynthConfig,
    rng: ChaCha8Rng,
    companies: Vec<Company<f64>>,
    relationships: Vec<Relationship<f64>>,
}

impl Builder<'_> {
    fn partner(&mut self, id: String) -> (usize, bool) {
        let cfg = self.config;
        let sector = *pick(&mut self.rng, &cfg.sector_weights);
        let country = pick(&mut self.rng, &cfg.country_weights).clone();
        let mut c = Company::new(id, sector, country);
        c.has_public_identifier = self.rng.random::<f64>() < cfg.fraction_public_partners;
        let has_dp = self.rng.random::<f64>() < cfg.fraction_partners_with_dp;
        self.companies.push(c);
        (self.companies.len() - 1, has_dp)
    }

    /// Adds one side of partners for the focal company at `focal`.
    fn side(&mut self, focal: usize, supplier_side: bool, count: usize, log_avg_dp: f64) {
        let cfg = self.config;
        let focal_id = self.companies[focal].id.0.clone();
        let tag = if supplier_side { 'S' } else { 'C' };
        let mut members = Vec::with_capacity(count);
        let mut with_dp = Vec::new();
        for k in 0..count {
            let (pos, has_dp) = self.partner(format!("{focal_id}-{tag}{k:04}"));
            members.push(pos);
            if has_dp {
                with_dp.push(pos);
            }
        }
        if !with_dp.is_empty() {
            let draws: Vec<f64> = (0..with_dp.len())
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut self.rng);
                    cfg.partner_dp_dispersion * z
                })
                .collect();
            for (pos, v) in with_dp.into_iter().zip(centre_log_dps(draws, log_avg_dp)) {
                self.companies[pos].default_prob = Some(v.exp());
            }
        }

        let quantified: Vec<usize> = (0..count)
            .filter(|_| self.rng.random::<f64>() < cfg.fraction_quantified_edges)
            .collect();
        let shares = skewed_shares(&mut self.rng, quantified.len(), cfg.share_tail_index);
        let mut share_of = vec![None; count];
        for (k, s) in quantified.into_iter().zip(shares) {
            share_of[k] = Some(s);
        }
        for (k, &pos) in members.iter().enumerate() {
            let partner_id = self.companies[pos].id.clone();
            let rel = if supplier_side {
                Relationship {
                    supplier_id: partner_id,
                    customer_id: self.companies[focal].id.clone(),
                    revenue_share: None,
                    cost_share: share_of[k],
                }
            } else {
                Relationship {
                    supplier_id: self.companies[focal].id.clone(),
                    customer_id: partner_id,
                    revenue_share: share_of[k],
                    cost_share: None,
                }
            };
            self.relationships.push(rel);
        }

        // ties among the partners of one side create two-paths for the constraint
        if count >= 2 {
            let n_ties = (cfg.partner_tie_rate * count as f64).round() as usize;
            let mut seen = HashSet::new();
            for _ in 0..n_ties {
                let a = self.rng.random_range(0..count);
                let b = self.rng.random_range(0..count);
                if a == b || !seen.insert((a, b)) {
                    continue;
                }
                let rev = 0.01 + 0.19 * self.rng.random::<f64>();
                let cost = 0.01 + 0.19 * self.rng.random::<f64>();
                self.relationships.push(Relationship {
                    supplier_id: self.companies[members[a]].id.clone(),
                    customer_id: self.companies[members[b]].id.clone(),
                    revenue_share: Some(rev),
                    cost_share: Some(cost),
                });
            }
        }
    }
}

/// Scales partner-to-partner shares so no company's revenue or cost shares
/// exceed 0.95 in total. Focal-company shares already sum below that.
fn cap_share_sums(rels: &mut [Relationship<f64>], first_tie: &[bool]) {
    use std::collections::HashMap;
    let mut revenue: HashMap<String, f64> = HashMap::new();
    let mut cost: HashMap<String, f64> = HashMap::new();
    for (r, tie) in rels.iter().zip(first_tie) {
        if *tie {
            *revenue.entry(r.supplier_id.0.clone()).or_default() += r.revenue_share.unwrap_or(0.0);
            *cost.entry(r.customer_id.0.clone()).or_default() += r.cost_share.unwrap_or(0.0);
        }
    }
    for (r, tie) in rels.iter_mut().zip(first_tie) {
        if !*tie {
            continue;
        }
        let rs = revenue[&r.supplier_id.0];
        if rs > 0.95 {
            r.revenue_share = r.revenue_share.map(|s| s * 0.95 / rs);
        }
        let cs = cost[&r.customer_id.0];
        if cs > 0.95 {
            r.cost_share = r.cost_share.map(|s| s * 0.95 / cs);
        }
    }
}

/// Generates a validated graph. The same configuration always yields the
/// same graph.
pub fn generate<T: Scalar>(config: &SynthConfig) -> Result<SupplyChainGraph<T>, SynthError> {
    let chol = check(config)?;
    let mut b = Builder {
        config,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        companies: Vec::new(),
        relationships: Vec::new(),
    };
    let width = config.n_companies.to_string().len().max(5);
    let dp_cap = 0.5f64.ln();
    let mut is_tie = Vec::new();
    for i in 0..config.n_companies {
        let z: Vec<f64> = (0..7).map(|_| StandardNormal.sample(&mut b.rng)).collect();
        let latent: Vec<f64> = (0..7)
            .map(|r| {
                let zr: f64 = (0..=r).map(|c| chol[r][c] * z[c]).sum();
                config.target_moments[r].mean + config.target_moments[r].sd * zr
            })
            .collect();
        let count = |v: f64| ((v.exp() - 1.0).round().max(0.0) as usize).min(config.max_partners);

        let sector = if b.rng.random::<f64>() < config.fraction_financials {
            GicsSector::Financials
        } else {
            *pick(&mut b.rng, &config.sector_weights)
        };
        let country = pick(&mut b.rng, &config.country_weights).clone();
        let mut c = Company::new(format!("F{i:0width$}"), sector, country);
        c.has_public_identifier = true;
        c.cds_5y_bps = Some(latent[0].exp());
        c.default_prob = Some(latent[5].min(dp_cap).exp());
        c.market_cap_billions = Some(latent[6].exp());
        b.companies.push(c);
        let focal = b.companies.len() - 1;

        for (supplier_side, count_idx, dp_idx) in [(true, 1, 3), (false, 2, 4)] {
            let before = b.relationships.len();
            let n = count(latent[count_idx]);
            b.side(focal, supplier_side, n, latent[dp_idx]);
            // the first n edges of a side are focal ties, the rest partner ties
            is_tie.extend((before..b.relationships.len()).map(|r| r - before >= n));
        }
    }
    cap_share_sums(&mut b.relationships, &is_tie);

    let convert = |v: Option<f64>| v.map(T::c);
    let companies = b
        .companies
        .into_iter()
        .map(|c| Company {
            id: c.id,
            name: c.name,
            has_public_identifier: c.has_public_identifier,
            cds_5y_bps: convert(c.cds_5y_bps),
            default_prob: convert(c.default_prob),
            market_cap_billions: convert(c.market_cap_billions),
            gics_sector: c.gics_sector,
            country_of_risk: c.country_of_risk,
        })
        .collect();
    let relationships = b
        .relationships
        .into_iter()
        .map(|r| Relationship {
            supplier_id: r.supplier_id,
            customer_id: r.customer_id,
            revenue_share: convert(r.revenue_share),
            cost_share: convert(r.cost_share),
        })
        .collect();
    Ok(SupplyChainGraph::build(companies, relationships)?)
}
