//! Inter-organizational network model: companies, supplier→customer
//! relationships and the per-company directional indices.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Scalar;

/// Opaque, unique company identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompanyId(pub String);

impl CompanyId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CompanyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CompanyId {
    fn from(s: &str) -> Self {
        CompanyId(s.to_owned())
    }
}

impl From<String> for CompanyId {
    fn from(s: String) -> Self {
        CompanyId(s)
    }
}

/// The ten GICS sectors in use for the sample period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GicsSector {
    ConsumerDiscretionary,
    ConsumerStaples,
    Energy,
    Financials,
    HealthCare,
    Industrials,
    InformationTechnology,
    Materials,
    TelecommunicationServices,
    Utilities,
}

impl GicsSector {
    pub const ALL: [GicsSector; 10] = [
        GicsSector::ConsumerDiscretionary,
        GicsSector::ConsumerStaples,
        GicsSector::Energy,
        GicsSector::Financials,
        GicsSector::HealthCare,
        GicsSector::Industrials,
        GicsSector::InformationTechnology,
        GicsSector::Materials,
        GicsSector::TelecommunicationServices,
        GicsSector::Utilities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GicsSector::ConsumerDiscretionary => "Consumer Discretionary",
            GicsSector::ConsumerStaples => "Consumer Staples",
            GicsSector::Energy => "Energy",
            GicsSector::Financials => "Financials",
            GicsSector::HealthCare => "Health Care",
            GicsSector::Industrials => "Industrials",
            GicsSector::InformationTechnology => "Information Technology",
            GicsSector::Materials => "Materials",
            GicsSector::TelecommunicationServices => "Telecommunication Services",
            GicsSector::Utilities => "Utilities",
        }
    }
}

impl fmt::Display for GicsSector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown GICS sector `{0}`")]
pub struct UnknownSector(pub String);

impl FromStr for GicsSector {
    type Err = UnknownSector;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let sector = match key.as_str() {
            "consumerdiscretionary" => GicsSector::ConsumerDiscretionary,
            "consumerstaples" => GicsSector::ConsumerStaples,
            "energy" => GicsSector::Energy,
            "financials" => GicsSector::Financials,
            "healthcare" => GicsSector::HealthCare,
            "industrials" => GicsSector::Industrials,
            "informationtechnology" => GicsSector::InformationTechnology,
            "materials" => GicsSector::Materials,
            "telecommunicationservices" | "telecommunicationsrv" | "telecommunications" => {
                GicsSector::TelecommunicationServices
            }
            "utilities" => GicsSector::Utilities,
            _ => return Err(UnknownSector(s.to_owned())),
        };
        Ok(sector)
    }
}

/// A node of the network together with its financial attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Company<T> {
    pub id: CompanyId,
    pub name: String,
    /// Proxy for "likely to be a public company".
    pub has_public_identifier: bool,
    /// 5-year CDS spread in basis points.
    pub cds_5y_bps: Option<T>,
    pub default_prob: Option<T>,
    pub market_cap_billions: Option<T>,
    pub gics_sector: GicsSector,
    pub country_of_risk: String,
}

impl<T: Scalar> Company<T> {
    /// A company with no financial attributes, the shape of a partner-only node.
    pub fn new(id: impl Into<CompanyId>, sector: GicsSector, country: impl Into<String>) -> Self {
        let id = id.into();
        Company {
            name: id.0.clone(),
            id,
            has_public_identifier: false,
            cds_5y_bps: None,
            default_prob: None,
            market_cap_billions: None,
            gics_sector: sector,
            country_of_risk: country.into(),
        }
    }
}

/// Directed supplier→customer edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Relationship<T> {
    pub supplier_id: CompanyId,
    pub customer_id: CompanyId,
    /// Fraction of the supplier's revenue attributable to this customer.
    pub revenue_share: Option<T>,
    /// Fraction of the customer's total cost attributable to this supplier.
    pub cost_share: Option<T>,
}

impl<T: Scalar> Relationship<T> {
    pub fn new(supplier: impl Into<CompanyId>, customer: impl Into<CompanyId>) -> Self {
        Relationship {
            supplier_id: supplier.into(),
            customer_id: customer.into(),
            revenue_share: None,
            cost_share: None,
        }
    }

    pub fn with_revenue_share(mut self, share: T) -> Self {
        self.revenue_share = Some(share);
        self
    }

    pub fn with_cost_share(mut self, share: T) -> Self {
        self.cost_share = Some(share);
        self
    }

    /// The share that quantifies this tie from the point of view of the
    /// company looking at its partners on `side`. Zero shares count as absent.
    pub fn share_for(&self, side: Side) -> Option<T> {
        let s = match side {
            Side::Customer => self.revenue_share,
            Side::Supplier => self.cost_share,
        };
        s.filter(|v| *v > T::zero())
    }
}

/// Which partner list of a company is being analysed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Customer,
    Supplier,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Customer => "customers",
            Side::Supplier => "suppliers",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One broken invariant found by [`SupplyChainGraph::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateCompany {
        id: CompanyId,
    },
    DefaultProbOutOfRange {
        id: CompanyId,
        value: f64,
    },
    NonPositiveCds {
        id: CompanyId,
        value: f64,
    },
    NonPositiveMarketCap {
        id: CompanyId,
        value: f64,
    },
    SelfSupply {
        id: CompanyId,
    },
    UnknownEndpoint {
        supplier: CompanyId,
        customer: CompanyId,
        missing: CompanyId,
    },
    DuplicateEdge {
        supplier: CompanyId,
        customer: CompanyId,
    },
    ShareOutOfRange {
        supplier: CompanyId,
        customer: CompanyId,
        field: &'static str,
        value: f64,
    },
    ShareSumExceeded {
        id: CompanyId,
        side: Side,
        sum: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateCompany { id } => write!(f, "company {id}: duplicate id"),
            Violation::DefaultProbOutOfRange { id, value } => {
                write!(f, "company {id}: default_prob {value} outside (0,1)")
            }
            Violation::NonPositiveCds { id, value } => {
                write!(f, "company {id}: cds_5y_bps {value} not positive")
            }
            Violation::NonPositiveMarketCap { id, value } => {
                write!(f, "company {id}: market_cap_billions {value} not positive")
            }
            Violation::SelfSupply { id } => write!(f, "edge {id}->{id}: self-supply"),
            Violation::UnknownEndpoint {
                supplier,
                customer,
                missing,
            } => {
                write!(f, "edge {supplier}->{customer}: unknown company {missing}")
            }
            Violation::DuplicateEdge { supplier, customer } => {
                write!(f, "edge {supplier}->{customer}: duplicate pair")
            }
            Violation::ShareOutOfRange {
                supplier,
                customer,
                field,
                value,
            } => {
                write!(
                    f,
                    "edge {supplier}->{customer}: {field} {value} outside (0,1]"
                )
            }
            Violation::ShareSumExceeded { id, side, sum } => {
                write!(f, "company {id}: {side} shares sum to {sum} > 1")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("company `{0}` not found")]
    NotFound(CompanyId),
    #[error("graph has {} invariant violation(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
}

/// A relationship together with the partner at its other end.
pub type Tie<'a, T> = (&'a Relationship<T>, &'a Company<T>);

/// The full network with per-company customer and supplier indices.
///
/// Immutable once assembled. Relationship storage is sorted by
/// (supplier, customer) and each index is sorted by counterparty id, so the
/// structure does not depend on input order.
#[derive(Debug, Clone)]
pub struct SupplyChainGraph<T> {
    companies: Vec<Company<T>>,
    index: HashMap<CompanyId, usize>,
    relationships: Vec<Relationship<T>>,
    // per company: (relationship index, counterparty company index)
    customers: Vec<Vec<(usize, usize)>>,
    suppliers: Vec<Vec<(usize, usize)>>,
}

impl<T: Scalar> SupplyChainGraph<T> {
    /// Assembles and validates; any violation rejects the whole graph.
    pub fn build(
        companies: Vec<Company<T>>,
        relationships: Vec<Relationship<T>>,
    ) -> Result<Self, GraphError> {
        let graph = Self::assemble(companies, relationships);
        let violations = graph.validate();
        if violations.is_empty() {
            Ok(graph)
        } else {
            Err(GraphError::Invalid(violations))
        }
    }

    /// Indexes the inputs without enforcing invariants. Edges whose endpoints
    /// are unknown are kept in storage but left out of the indices.
    pub fn assemble(companies: Vec<Company<T>>, mut relationships: Vec<Relationship<T>>) -> Self {
        let mut index = HashMap::with_capacity(companies.len());
        for (i, c) in companies.iter().enumerate() {
            index.entry(c.id.clone()).or_insert(i);
        }
        relationships.sort_by(|a, b| {
            (&a.supplier_id, &a.customer_id).cmp(&(&b.supplier_id, &b.customer_id))
        });
        let mut customers = vec![Vec::new(); companies.len()];
        let mut suppliers = vec![Vec::new(); companies.len()];
        for (r, rel) in relationships.iter().enumerate() {
            if let (Some(&s), Some(&c)) = (index.get(&rel.supplier_id), index.get(&rel.customer_id))
            {
                customers[s].push((r, c));
                suppliers[c].push((r, s));
            }
        }
        // relationships are sorted by (supplier, customer) so each customers
        // list is already ordered by counterparty id; suppliers lists are not.
        for list in &mut suppliers {
            list.sort_by(|a, b| {
                companies[a.1]
                    .id
                    .cmp(&companies[b.1].id)
                    .then(a.0.cmp(&b.0))
            });
        }
        SupplyChainGraph {
            companies,
            index,
            relationships,
            customers,
            suppliers,
        }
    }

    pub fn companies(&self) -> &[Company<T>] {
        &self.companies
    }

    pub fn relationships(&self) -> &[Relationship<T>] {
        &self.relationships
    }

    pub fn company(&self, id: &CompanyId) -> Option<&Company<T>> {
        self.index.get(id).map(|&i| &self.companies[i])
    }

    pub(crate) fn position(&self, id: &CompanyId) -> Result<usize, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::NotFound(id.clone()))
    }

    pub(crate) fn company_at(&self, pos: usize) -> &Company<T> {
        &self.companies[pos]
    }

    /// Partner ties of the company at `pos` on `side`, as
    /// (relationship, counterparty position).
    pub(crate) fn ties_at(
        &self,
        pos: usize,
        side: Side,
    ) -> impl Iterator<Item = (&Relationship<T>, usize)> {
        let list = match side {
            Side::Customer => &self.customers[pos],
            Side::Supplier => &self.suppliers[pos],
        };
        list.iter()
            .map(move |&(r, other)| (&self.relationships[r], other))
    }

    /// Relationships where `id` is the supplier, ordered by customer id.
    pub fn customers_of(&self, id: &CompanyId) -> Result<Vec<Tie<'_, T>>, GraphError> {
        self.partners_of(id, Side::Customer)
    }

    /// Relationships where `id` is the customer, ordered by supplier id.
    pub fn suppliers_of(&self, id: &CompanyId) -> Result<Vec<Tie<'_, T>>, GraphError> {
        self.partners_of(id, Side::Supplier)
    }

    pub fn partners_of(&self, id: &CompanyId, side: Side) -> Result<Vec<Tie<'_, T>>, GraphError> {
        let pos = self.position(id)?;
        Ok(self
            .ties_at(pos, side)
            .map(|(r, o)| (r, &self.companies[o]))
            .collect())
    }

    /// Every broken invariant. Empty iff the graph is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let one = T::one();
        let zero = T::zero();

        for (i, c) in self.companies.iter().enumerate() {
            if self.index.get(&c.id) != Some(&i) {
                out.push(Violation::DuplicateCompany { id: c.id.clone() });
            }
            if let Some(dp) = c.default_prob {
                if !(dp > zero && dp < one) {
                    out.push(Violation::DefaultProbOutOfRange {
                        id: c.id.clone(),
                        value: dp.to_f64_lossy(),
                    });
                }
            }
            if let Some(v) = c.cds_5y_bps {
                if !(v > zero && v.is_finite()) {
                    out.push(Violation::NonPositiveCds {
                        id: c.id.clone(),
                        value: v.to_f64_lossy(),
                    });
                }
            }
            if let Some(v) = c.market_cap_billions {
                if !(v > zero && v.is_finite()) {
                    out.push(Violation::NonPositiveMarketCap {
                        id: c.id.clone(),
                        value: v.to_f64_lossy(),
                    });
                }
            }
        }

        let mut revenue_sums: BTreeMap<&CompanyId, T> = BTreeMap::new();
        let mut cost_sums: BTreeMap<&CompanyId, T> = BTreeMap::new();
        let mut previous: Option<(&CompanyId, &CompanyId)> = None;
        for rel in &self.relationships {
            let (s, c) = (&rel.supplier_id, &rel.customer_id);
            if s == c {
                out.push(Violation::SelfSupply { id: s.clone() });
            }
            for end in [s, c] {
                if !self.index.contains_key(end) {
                    out.push(Violation::UnknownEndpoint {
                        supplier: s.clone(),
                        customer: c.clone(),
                        missing: end.clone(),
                    });
                }
            }
            if previous == Some((s, c)) {
                out.push(Violation::DuplicateEdge {
                    supplier: s.clone(),
                    customer: c.clone(),
                });
            }
            previous = Some((s, c));
            for (field, share) in [
                ("revenue_share", rel.revenue_share),
                ("cost_share", rel.cost_share),
            ] {
                if let Some(v) = share {
                    if !(v > zero && v <= one) {
                        out.push(Violation::ShareOutOfRange {
                            supplier: s.clone(),
                            customer: c.clone(),
                            field,
                            value: v.to_f64_lossy(),
                        });
                    }
                }
            }
            if let Some(v) = rel.revenue_share {
                let e = revenue_sums.entry(s).or_insert(zero);
                *e = *e + v;
            }
            if let Some(v) = rel.cost_share {
                let e = cost_sums.entry(c).or_insert(zero);
                *e = *e + v;
            }
        }

        let limit = one + T::share_tolerance();
        for (sums, side) in [(revenue_sums, Side::Customer), (cost_sums, Side::Supplier)] {
            for (id, sum) in sums {
                if sum > limit {
                    out.push(Violation::ShareSumExceeded {
                        id: id.clone(),
                        side,
                        sum: sum.to_f64_lossy(),
                    });
                }
            }
        }
        out
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn public(id: &str) -> Company<f64> {
        let mut c = Company::new(id, GicsSector::ConsumerDiscretionary, "US");
        c.has_public_identifier = true;
        c
    }

    /// TripAdvisor and the six customers of its published revenue breakdown.
    pub fn tripadvisor() -> SupplyChainGraph<f64> {
        let customers = [
            ("EXPE", 25.63),
            ("PCLN", 19.83),
            ("OWW", 5.44),
            ("CTRP", 4.79),
            ("GOOG", 1.53),
            ("AAL", 1.42),
        ];
        let mut companies = vec![public("TRIP")];
        let mut rels = Vec::new();
        for (id, pct) in customers {
            companies.push(public(id));
            rels.push(Relationship::new("TRIP", id).with_revenue_share(pct / 100.0));
        }
        SupplyChainGraph::build(companies, rels).unwrap()
    }

    /// TripAdvisor, Expedia and American Airlines: both travel sites supply
    /// the airline and TripAdvisor also supplies Expedia.
    pub fn triad() -> SupplyChainGraph<f64> {
        let companies = vec![public("TRIP"), public("EXPE"), public("AAL")];
        let rels = vec![
            Relationship::new("TRIP", "EXPE").with_revenue_share(0.2563),
            Relationship::new("TRIP", "AAL")
                .with_revenue_share(0.0142)
                .with_cost_share(0.4),
            Relationship::new("EXPE", "AAL").with_cost_share(0.6),
        ];
        SupplyChainGraph::build(companies, rels).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn ids<T>(list: &[(&Relationship<T>, &Company<T>)]) -> Vec<String> {
        list.iter().map(|(_, c)| c.id.0.clone()).collect()
    }

    #[test]
    fn tripadvisor_customers() {
        let g = tripadvisor();
        let list = g.customers_of(&"TRIP".into()).unwrap();
        assert_eq!(list.len(), 6);
        assert_eq!(ids(&list), ["AAL", "CTRP", "EXPE", "GOOG", "OWW", "PCLN"]);
        let mut by_share = list.clone();
        by_share.sort_by(|a, b| b.0.revenue_share.partial_cmp(&a.0.revenue_share).unwrap());
        assert_eq!(by_share[0].1.id.as_str(), "EXPE");
    }

    #[test]
    fn triad_directions() {
        let g = triad();
        let exp = g.customers_of(&"EXPE".into()).unwrap();
        assert_eq!(ids(&exp), ["AAL"]);
        let aal = g.suppliers_of(&"AAL".into()).unwrap();
        assert_eq!(ids(&aal), ["EXPE", "TRIP"]);
    }

    #[test]
    fn isolated_and_chain() {
        let g = SupplyChainGraph::build(
            vec![public("A"), public("B"), public("Z")],
            vec![Relationship::new("A", "B")],
        )
        .unwrap();
        assert!(g.customers_of(&"Z".into()).unwrap().is_empty());
        assert!(g.suppliers_of(&"Z".into()).unwrap().is_empty());
        assert_eq!(ids(&g.suppliers_of(&"B".into()).unwrap()), ["A"]);
        assert!(matches!(
            g.customers_of(&"nope".into()),
            Err(GraphError::NotFound(_))
        ));
    }

    #[test]
    fn validate_well_formed() {
        assert!(tripadvisor().validate().is_empty());
        assert!(triad().validate().is_empty());
    }

    #[test]
    fn duplicate_edge_reported_once() {
        let g = SupplyChainGraph::<f64>::assemble(
            vec![public("A"), public("B")],
            vec![Relationship::new("A", "B"), Relationship::new("A", "B")],
        );
        let v = g.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::DuplicateEdge { .. }));
        assert!(matches!(
            SupplyChainGraph::build(g.companies().to_vec(), g.relationships().to_vec()),
            Err(GraphError::Invalid(_))
        ));
    }

    #[test]
    fn share_sum_violation() {
        let g = SupplyChainGraph::<f64>::assemble(
            vec![public("A"), public("B"), public("C")],
            vec![
                Relationship::new("A", "B").with_revenue_share(0.7),
                Relationship::new("A", "C").with_revenue_share(0.5),
            ],
        );
        let v = g.validate();
        assert_eq!(v.len(), 1, "{v:?}");
        match &v[0] {
            Violation::ShareSumExceeded { id, side, sum } => {
                assert_eq!(id.as_str(), "A");
                assert_eq!(*side, Side::Customer);
                assert!((sum - 1.2).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn other_violations() {
        let mut bad = public("A");
        bad.default_prob = Some(1.0);
        bad.cds_5y_bps = Some(0.0);
        let g = SupplyChainGraph::<f64>::assemble(
            vec![bad, public("B"), public("B")],
            vec![
                Relationship::new("A", "A"),
                Relationship::new("A", "Q"),
                Relationship::new("B", "A").with_cost_share(1.5),
            ],
        );
        let v = g.validate();
        let has = |f: fn(&Violation) -> bool| v.iter().any(f);
        assert!(has(|x| matches!(x, Violation::DuplicateCompany { .. })));
        assert!(has(|x| matches!(
            x,
            Violation::DefaultProbOutOfRange { .. }
        )));
        assert!(has(|x| matches!(x, Violation::NonPositiveCds { .. })));
        assert!(has(|x| matches!(x, Violation::SelfSupply { .. })));
        assert!(has(|x| matches!(x, Violation::UnknownEndpoint { .. })));
        assert!(has(|x| matches!(x, Violation::ShareOutOfRange { .. })));
        // the out-of-range share also pushes A's cost sum over one
        assert!(has(|x| matches!(x, Violation::ShareSumExceeded { .. })));
    }

    #[test]
    fn sector_parsing() {
        for s in GicsSector::ALL {
            assert_eq!(s.name().parse::<GicsSector>().unwrap(), s);
        }
        assert_eq!(
            "Telecommunication Srv".parse::<GicsSector>().unwrap(),
            GicsSector::TelecommunicationServices
        );
        assert!("Banks".parse::<GicsSector>().is_err());
    }
}
