use thiserror::Error;

use crate::market::MnoId;

/// Failures raised by parameter validation and model evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{name}` = {value} is invalid: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("retail prices must satisfy p2 <= p1 (p1 = {p1}, p2 = {p2})")]
    PriceOrdering { p1: f64, p2: f64 },
    #[error("unit margin h{mno} = p - c - ct is negative ({margin})")]
    NegativeMargin { mno: MnoId, margin: f64 },
    #[error("MVNO retail price {p0} outside [0, {upper}]")]
    RetailPriceOutOfRange { p0: f64, upper: f64 },
    #[error("operator retail price must be positive, got {0}")]
    NonPositiveRetailPrice(f64),
    #[error("wholesale price w{mno} = {value} must be finite")]
    InvalidWholesale { mno: MnoId, value: f64 },
    #[error("no MVNO is active in the no-entry scenario")]
    NoEntrant,
}

/// Precondition failures of the verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("check requires r0 < r0_flat (r0 = {r0}, r0_flat = {r0_flat})")]
    RequiresPsInfeasible { r0: f64, r0_flat: f64 },
    #[error("region of admissible wholesale prices is empty")]
    EmptyRegion,
}
