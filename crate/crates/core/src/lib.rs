//! Supply-chain network metrics and weighted least-squares models of
//! credit-spread levels.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`.
//!
//! ```
//! use supplynet::{hhi, Company, GicsSector, Graph, Relationship, Side};
//!
//! let companies = vec![
//!     Company::new("TRIP", GicsSector::ConsumerDiscretionary, "US"),
//!     Company::new("EXPE", GicsSector::ConsumerDiscretionary, "US"),
//!     Company::new("PCLN", GicsSector::ConsumerDiscretionary, "US"),
//! ];
//! let relationships = vec![
//!     Relationship::new("TRIP", "EXPE").with_revenue_share(0.2563),
//!     Relationship::new("TRIP", "PCLN").with_revenue_share(0.1983),
//! ];
//! let graph = Graph::build(companies, relationships).unwrap();
//! let p = supplynet::concentration_profile(&graph, &"TRIP".into(), Side::Customer).unwrap();
//! assert_eq!(p.n_partners, 2);
//! assert!((p.hhi.unwrap() - hhi(&[0.2563, 0.1983]).unwrap()).abs() < 1e-15);
//! ```

pub mod config;
pub mod graph;
pub mod ingest;
pub mod linalg;
pub mod netmetrics;
pub mod pipeline;
pub mod report;
pub mod scalar;
pub mod stats;
pub mod synth;
pub mod transform;
pub mod wls;

pub use graph::{CompanyId, GicsSector, GraphError, Side, SupplyChainGraph, Violation};
pub use netmetrics::{
    all_metrics, company_metrics, concentration_profile, constraint, hhi, influence_profile,
    CompanyMetrics, ConcentrationProfile, ConstraintMode, InfluenceProfile, MetricError,
};
pub use scalar::Scalar;
pub use transform::{
    build_design, ConcentrationMetric, DesignMatrix, MissingPolicy, ModelSpec, Transform,
    TransformError, Variable, Weighting,
};
pub use wls::{
    adj_r2, delta_r2_bps, fit, fit_weighted, r2_weighted, significance_stars, FitError, FitResult,
};

pub type Company = graph::Company<f64>;
pub type Relationship = graph::Relationship<f64>;
pub type Graph = SupplyChainGraph<f64>;
pub type Design = DesignMatrix<f64>;
pub type Fit = FitResult<f64>;
pub type Metrics = CompanyMetrics<f64>;

pub type Graph32 = SupplyChainGraph<f32>;
pub type Fit32 = FitResult<f32>;
