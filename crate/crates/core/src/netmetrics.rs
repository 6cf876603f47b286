//! Concentration (Herfindahl, structural-holes constraint, partner counts)
//! and influence (partners' default probability) metrics.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{CompanyId, GraphError, Side, SupplyChainGraph};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("metric undefined: {0}")]
    Undefined(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Sum of squared shares.
///
/// Shares are raw revenue (cost) fractions and are not renormalized.
pub fn hhi<T: Scalar>(shares: &[T]) -> Result<T, MetricError> {
    if shares.is_empty() {
        return Err(MetricError::Undefined(
            "herfindahl index of an empty share list".into(),
        ));
    }
    let mut sum = T::zero();
    for &s in shares {
        if !(s > T::zero() && s <= T::one()) {
            return Err(MetricError::Domain(format!("share {s} outside (0,1]")));
        }
        sum = sum + s;
    }
    if sum > T::one() + T::share_tolerance() {
        return Err(MetricError::Domain(format!("shares sum to {sum} > 1")));
    }
    Ok(shares.iter().map(|&s| s * s).sum())
}

/// How the indirect proportion p_qj of the constraint's two-path term is
/// measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstraintMode {
    /// p_qj is q's normalized share toward j on the same side as the focal
    /// analysis: for the customer side, j must be a quantified customer of q.
    #[default]
    SameSide,
    /// p_qj is q's share toward j over all of q's quantified ties in either
    /// direction, normalized over both sides.
    Mixed,
}

/// Quantified partners of `pos` on `side` with shares normalized to sum to one.
fn side_proportions<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    pos: usize,
    side: Side,
) -> Vec<(usize, T)> {
    let mut out: Vec<(usize, T)> = Vec::new();
    for (rel, other) in graph.ties_at(pos, side) {
        if let Some(s) = rel.share_for(side) {
            match out.iter_mut().find(|(o, _)| *o == other) {
                Some((_, acc)) => *acc = *acc + s,
                None => out.push((other, s)),
            }
        }
    }
    normalize(&mut out);
    out
}

fn mixed_proportions<T: Scalar>(graph: &SupplyChainGraph<T>, pos: usize) -> Vec<(usize, T)> {
    let mut out: Vec<(usize, T)> = Vec::new();
    for side in [Side::Customer, Side::Supplier] {
        for (rel, other) in graph.ties_at(pos, side) {
            if let Some(s) = rel.share_for(side) {
                match out.iter_mut().find(|(o, _)| *o == other) {
                    Some((_, acc)) => *acc = *acc + s,
                    None => out.push((other, s)),
                }
            }
        }
    }
    normalize(&mut out);
    out
}

fn normalize<T: Scalar>(props: &mut [(usize, T)]) {
    let total: T = props.iter().map(|(_, s)| *s).sum();
    if total > T::zero() {
        for (_, s) in props.iter_mut() {
            *s = *s / total;
        }
    }
}

/// Structural-holes constraint of a company over its partners on `side`.
///
/// `Σ_j (p_ij + Σ_q p_iq p_qj)²`, where j and q range over the company's
/// quantified partners on `side` and p_ij is renormalized so the company's
/// proportions sum to one. With no partner-to-partner ties this is the
/// Herfindahl index of the renormalized shares.
pub fn constraint<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    id: &CompanyId,
    side: Side,
    mode: ConstraintMode,
) -> Result<T, MetricError> {
    let pos = graph.position(id)?;
    constraint_at(graph, pos, side, mode)
}

pub(crate) fn constraint_at<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    pos: usize,
    side: Side,
    mode: ConstraintMode,
) -> Result<T, MetricError> {
    let direct = side_proportions(graph, pos, side);
    if direct.is_empty() {
        return Err(MetricError::Undefined(format!(
            "constraint of {} without quantified {side}",
            graph.company_at(pos).id
        )));
    }
    let onward: Vec<HashMap<usize, T>> = direct
        .iter()
        .map(|&(q, _)| {
            let props = match mode {
                ConstraintMode::SameSide => side_proportions(graph, q, side),
                ConstraintMode::Mixed => mixed_proportions(graph, q),
            };
            props.into_iter().collect()
        })
        .collect();

    let mut total = T::zero();
    for &(j, p_ij) in &direct {
        let mut term = p_ij;
        for (qi, &(q, p_iq)) in direct.iter().enumerate() {
            if q == j || q == pos {
                continue;
            }
            if let Some(&p_qj) = onward[qi].get(&j) {
                term = term + p_iq * p_qj;
            }
        }
        total = total + term * term;
    }
    Ok(total)
}

/// Counts, share sum and Herfindahl index of one partner list.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationProfile<T> {
    pub side: Side,
    pub n_partners: usize,
    pub n_public_partners: usize,
    pub n_quantified: usize,
    pub share_sum: T,
    /// Only over quantified partners; absent when there are none.
    pub hhi: Option<T>,
}

pub fn concentration_profile<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    id: &CompanyId,
    side: Side,
) -> Result<ConcentrationProfile<T>, MetricError> {
    let pos = graph.position(id)?;
    Ok(concentration_at(graph, pos, side))
}

pub(crate) fn concentration_at<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    pos: usize,
    side: Side,
) -> ConcentrationProfile<T> {
    let mut profile = ConcentrationProfile {
        side,
        n_partners: 0,
        n_public_partners: 0,
        n_quantified: 0,
        share_sum: T::zero(),
        hhi: None,
    };
    let mut squares = T::zero();
    for (rel, other) in graph.ties_at(pos, side) {
        profile.n_partners += 1;
        if graph.company_at(other).has_public_identifier {
            profile.n_public_partners += 1;
        }
        if let Some(s) = rel.share_for(side) {
            profile.n_quantified += 1;
            profile.share_sum = profile.share_sum + s;
            squares = squares + s * s;
        }
    }
    if profile.n_quantified > 0 {
        profile.hhi = Some(squares);
    }
    profile
}

/// Simple and share-weighted averages of partners' default probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceProfile<T> {
    pub side: Side,
    pub avg_dp: Option<T>,
    pub wavg_dp: Option<T>,
    pub n_with_dp: usize,
    pub n_weightable: usize,
}

pub fn influence_profile<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    id: &CompanyId,
    side: Side,
) -> Result<InfluenceProfile<T>, MetricError> {
    let pos = graph.position(id)?;
    Ok(influence_at(graph, pos, side))
}

pub(crate) fn influence_at<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    pos: usize,
    side: Side,
) -> InfluenceProfile<T> {
    let (mut dp_sum, mut n_with_dp) = (T::zero(), 0usize);
    let (mut wsum, mut weight, mut n_weightable) = (T::zero(), T::zero(), 0usize);
    for (rel, other) in graph.ties_at(pos, side) {
        let Some(dp) = graph.company_at(other).default_prob else {
            continue;
        };
        dp_sum = dp_sum + dp;
        n_with_dp += 1;
        if let Some(s) = rel.share_for(side) {
            wsum = wsum + s * dp;
            weight = weight + s;
            n_weightable += 1;
        }
    }
    InfluenceProfile {
        side,
        avg_dp: (n_with_dp > 0).then(|| dp_sum / T::from_usize_lossy(n_with_dp)),
        wavg_dp: (n_weightable > 0).then(|| wsum / weight),
        n_with_dp,
        n_weightable,
    }
}

/// Both sides of every metric for one company.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanyMetrics<T> {
    pub id: CompanyId,
    pub suppliers: ConcentrationProfile<T>,
    pub customers: ConcentrationProfile<T>,
    pub supplier_influence: InfluenceProfile<T>,
    pub customer_influence: InfluenceProfile<T>,
    pub supplier_constraint: Option<T>,
    pub customer_constraint: Option<T>,
}

impl<T: Scalar> CompanyMetrics<T> {
    pub fn concentration(&self, side: Side) -> &ConcentrationProfile<T> {
        match side {
            Side::Customer => &self.customers,
            Side::Supplier => &self.suppliers,
        }
    }

    pub fn influence(&self, side: Side) -> &InfluenceProfile<T> {
        match side {
            Side::Customer => &self.customer_influence,
            Side::Supplier => &self.supplier_influence,
        }
    }

    pub fn constraint(&self, side: Side) -> Option<T> {
        match side {
            Side::Customer => self.customer_constraint,
            Side::Supplier => self.supplier_constraint,
        }
    }
}

pub(crate) fn metrics_at<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    pos: usize,
    mode: ConstraintMode,
) -> CompanyMetrics<T> {
    CompanyMetrics {
        id: graph.company_at(pos).id.clone(),
        suppliers: concentration_at(graph, pos, Side::Supplier),
        customers: concentration_at(graph, pos, Side::Customer),
        supplier_influence: influence_at(graph, pos, Side::Supplier),
        customer_influence: influence_at(graph, pos, Side::Customer),
        supplier_constraint: constraint_at(graph, pos, Side::Supplier, mode).ok(),
        customer_constraint: constraint_at(graph, pos, Side::Customer, mode).ok(),
    }
}

pub fn company_metrics<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    id: &CompanyId,
    mode: ConstraintMode,
) -> Result<CompanyMetrics<T>, MetricError> {
    let pos = graph.position(id)?;
    Ok(metrics_at(graph, pos, mode))
}

/// Metrics for every company, in graph order.
pub fn all_metrics<T: Scalar>(
    graph: &SupplyChainGraph<T>,
    mode: ConstraintMode,
) -> Vec<CompanyMetrics<T>> {
    (0..graph.companies().len())
        .map(|pos| metrics_at(graph, pos, mode))
        .collect()
}
