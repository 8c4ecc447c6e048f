use thiserror::Error;

pub type Result<T> = std::result::Result<T, PricingError>;

/// Errors shared across the pricing pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    /// A parameter fails basic validation (non-finite, wrong sign, u <= d, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The adjusted factors collapsed: the up factor no longer exceeds the
    /// down factor, so no risk-neutral probability exists.
    #[error("degenerate lattice: adjusted up factor {u_adj} must exceed adjusted down factor {d_adj}")]
    DegenerateLattice { u_adj: f64, d_adj: f64 },

    /// The per-step gross rate escapes the adjusted factor interval, i.e. the
    /// implied probability leaves [0, 1]. Requires d_adj <= r_step <= u_adj.
    #[error("arbitrage violation: require d_adj <= r_step <= u_adj, got d_adj = {d_adj}, r_step = {r_step}, u_adj = {u_adj}")]
    ArbitrageViolation { d_adj: f64, r_step: f64, u_adj: f64 },

    /// Minimal admissible volumes are undefined at lambda = 0; the classical
    /// condition d <= r_step <= u is all there is.
    #[error("no-arbitrage volume thresholds are undefined at lambda = 0; the condition reduces to d <= r_step <= u (d = {d}, r_step = {r_step}, u = {u})")]
    ZeroImpact { d: f64, r_step: f64, u: f64 },

    /// Full path enumeration was requested beyond the configured cap.
    #[error("enumeration cap exceeded: n = {n} paths would number 2^{n}, cap is n <= {cap}; use the recombined method")]
    CapExceeded { n: u32, cap: u32 },

    /// Exact integer path-class counts are only guaranteed up to n = 60.
    #[error("count overflow: exact path-class counts require n <= {max}, got n = {n}")]
    Overflow { n: u32, max: u32 },

    /// A closed-form benchmark input that must be positive is not.
    #[error("non-positive input: {0}")]
    NonPositiveInputs(String),
}
