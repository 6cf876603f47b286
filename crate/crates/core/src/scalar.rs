//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Real scalar the metrics, transforms and estimators are written against.
///
/// Implemented for `f32` and `f64`. Tolerances are exposed here so that
/// routines written once stay meaningful at either precision.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Sum + Send + Sync + 'static {
    /// Slack allowed when checking that shares sum to at most one.
    fn share_tolerance() -> Self {
        Self::c(1e-9).max(Self::epsilon() * Self::c(16.0))
    }

    /// Relative threshold on the triangular factor's diagonal below which a
    /// design column is treated as linearly dependent.
    fn rank_tolerance() -> Self {
        Self::c(1e-10).max(Self::epsilon() * Self::c(64.0))
    }

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_track_precision() {
        assert_eq!(f64::share_tolerance(), 1e-9);
        assert_eq!(f64::rank_tolerance(), 1e-10);
        assert!(f32::share_tolerance() > 1e-9);
        assert!(f32::rank_tolerance() > 1e-6);
    }
}
