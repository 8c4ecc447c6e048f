//! Market description, impact-adjusted lattice factors, one-step replication,
//! and the no-arbitrage region for trade volumes.

use crate::error::{PricingError, Result};

/// How the quoted gross `rate` maps onto a single lattice step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateConvention {
    /// `rate` is the gross return per step; `r_step = rate`.
    PerStep,
    /// `rate` is the gross return over the whole n-step horizon;
    /// `r_step = rate^(1/n)`.
    TotalHorizon,
}

/// Underlying lattice and contract parameters.
///
/// Invariants: `s0 > 0`, `u > d > 0`, `rate > 0`, `n >= 1`, `strike >= 0`,
/// all finite. Enforced by [`MarketSpec::new`] / [`MarketSpec::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketSpec {
    pub s0: f64,
    pub u: f64,
    pub d: f64,
    pub rate: f64,
    pub rate_convention: RateConvention,
    pub n: u32,
    pub strike: f64,
}

impl MarketSpec {
    pub fn new(
        s0: f64,
        u: f64,
        d: f64,
        rate: f64,
        rate_convention: RateConvention,
        n: u32,
        strike: f64,
    ) -> Result<Self> {
        let spec = Self { s0, u, d, rate, rate_convention, n, strike };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("s0", self.s0)?;
        require_finite("u", self.u)?;
        require_finite("d", self.d)?;
        require_finite("rate", self.rate)?;
        require_finite("strike", self.strike)?;
        if self.s0 <= 0.0 {
            return Err(PricingError::InvalidInput(format!("s0 must be positive, got {}", self.s0)));
        }
        if self.d <= 0.0 {
            return Err(PricingError::InvalidInput(format!("d must be positive, got {}", self.d)));
        }
        if self.u <= self.d {
            return Err(PricingError::InvalidInput(format!(
                "u must exceed d, got u = {}, d = {}",
                self.u, self.d
            )));
        }
        if self.rate <= 0.0 {
            return Err(PricingError::InvalidInput(format!(
                "rate must be positive, got {}",
                self.rate
            )));
        }
        if self.n == 0 {
            return Err(PricingError::InvalidInput("n must be at least 1".into()));
        }
        if self.strike < 0.0 {
            return Err(PricingError::InvalidInput(format!(
                "strike must be non-negative, got {}",
                self.strike
            )));
        }
        Ok(())
    }

    /// Gross rate applied on one lattice step under this spec's convention.
    pub fn r_step(&self) -> f64 {
        match self.rate_convention {
            RateConvention::PerStep => self.rate,
            RateConvention::TotalHorizon => self.rate.powf(1.0 / f64::from(self.n)),
        }
    }
}

/// Permanent linear price-impact parameters: coefficient `lambda >= 0` and the
/// signed volumes traded on up (`v_u`) and down (`v_d`) moves. Volumes may be
/// negative (trading with the move instead of against it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpactSpec {
    pub lambda: f64,
    pub v_u: f64,
    pub v_d: f64,
}

impl ImpactSpec {
    pub fn new(lambda: f64, v_u: f64, v_d: f64) -> Result<Self> {
        let spec = Self { lambda, v_u, v_d };
        spec.validate()?;
        Ok(spec)
    }

    /// No impact at all: lambda = 0.
    pub const fn zero() -> Self {
        Self { lambda: 0.0, v_u: 0.0, v_d: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("lambda", self.lambda)?;
        require_finite("v_u", self.v_u)?;
        require_finite("v_d", self.v_d)?;
        if self.lambda < 0.0 {
            return Err(PricingError::InvalidInput(format!(
                "lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Lattice after impact adjustment. Produced by [`adjust_factors`]; when it
/// exists, `u_adj > d_adj` and `p_adj` lies in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustedModel {
    pub u_adj: f64,
    pub d_adj: f64,
    pub r_step: f64,
    pub p_adj: f64,
    pub n: u32,
}

impl AdjustedModel {
    /// Gross discount over the full horizon, `r_step^n`.
    pub fn horizon_growth(&self) -> f64 {
        self.r_step.powi(self.n as i32)
    }
}

/// One-step replicating portfolio at a single node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationResult {
    /// Shares of the underlying.
    pub delta: f64,
    /// Cash position (negative = borrowing).
    pub bond: f64,
    /// Portfolio cost `delta * s + bond`, the node's arbitrage-free value.
    pub node_value: f64,
}

/// Minimal admissible trade volumes for a positive impact coefficient.
///
/// `admissible` reproduces exactly the check made by [`adjust_factors`]:
/// `d_adj <= r_step <= u_adj`, which is equivalent to `v_u >= v_u_min` and
/// `v_d >= v_d_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoArbRegion {
    pub v_u_min: f64,
    pub v_d_min: f64,
    pub admissible: bool,
}

fn require_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(PricingError::InvalidInput(format!("{name} must be finite, got {x}")))
    }
}

/// Impact-adjusted factors for one step:
/// `u_adj = u * exp(lambda * v_u)`, `d_adj = d * exp(-lambda * v_d)`, and the
/// implied risk-neutral probability `p_adj = (r_step - d_adj) / (u_adj - d_adj)`.
///
/// # Errors
///
/// [`PricingError::DegenerateLattice`] when `u_adj <= d_adj`;
/// [`PricingError::ArbitrageViolation`] when `r_step` falls outside
/// `[d_adj, u_adj]` (equivalently `p_adj` outside [0, 1]). The violation is a
/// hard error: probabilities are never clamped.
pub fn adjust_factors(market: &MarketSpec, impact: &ImpactSpec) -> Result<AdjustedModel> {
    market.validate()?;
    impact.validate()?;

    let r_step = market.r_step();
    let u_adj = market.u * (impact.lambda * impact.v_u).exp();
    let d_adj = market.d * (-impact.lambda * impact.v_d).exp();
    if !u_adj.is_finite() || !d_adj.is_finite() {
        return Err(PricingError::InvalidInput(format!(
            "adjusted factors overflow: u_adj = {u_adj}, d_adj = {d_adj}"
        )));
    }
    if u_adj <= d_adj {
        return Err(PricingError::DegenerateLattice { u_adj, d_adj });
    }
    if r_step < d_adj || r_step > u_adj {
        return Err(PricingError::ArbitrageViolation { d_adj, r_step, u_adj });
    }
    let p_adj = (r_step - d_adj) / (u_adj - d_adj);
    Ok(AdjustedModel { u_adj, d_adj, r_step, p_adj, n: market.n })
}

/// Minimal volumes keeping the adjusted lattice arbitrage-free:
/// `v_u_min = ln(r_step / u) / lambda`, `v_d_min = -ln(r_step / d) / lambda`.
///
/// # Errors
///
/// [`PricingError::ZeroImpact`] when `lambda = 0` (no thresholds exist; the
/// error carries `d`, `r_step`, `u` so callers can report the classical
/// condition instead).
pub fn no_arb_region(market: &MarketSpec, impact: &ImpactSpec) -> Result<NoArbRegion> {
    market.validate()?;
    impact.validate()?;

    let r_step = market.r_step();
    if impact.lambda == 0.0 {
        return Err(PricingError::ZeroImpact { d: market.d, r_step, u: market.u });
    }
    let v_u_min = (r_step / market.u).ln() / impact.lambda;
    let v_d_min = -(r_step / market.d).ln() / impact.lambda;

    // Same comparisons as adjust_factors, bit for bit, so the two can never
    // disagree at the boundary.
    let u_adj = market.u * (impact.lambda * impact.v_u).exp();
    let d_adj = market.d * (-impact.lambda * impact.v_d).exp();
    let admissible = d_adj <= r_step && r_step <= u_adj;

    Ok(NoArbRegion { v_u_min, v_d_min, admissible })
}

/// One-step replicating portfolio for claim values `v_up` / `v_down` one step
/// ahead of a node where the underlying trades at `s`:
/// `delta = (v_up - v_down) / (s (u_adj - d_adj))`,
/// `bond = (v_down - delta * s * d_adj) / r_step`.
pub fn replicate_node(
    s: f64,
    v_up: f64,
    v_down: f64,
    model: &AdjustedModel,
) -> Result<ReplicationResult> {
    require_finite("s", s)?;
    require_finite("v_up", v_up)?;
    require_finite("v_down", v_down)?;
    if s <= 0.0 {
        return Err(PricingError::InvalidInput(format!("node price must be positive, got {s}")));
    }
    let spread = model.u_adj - model.d_adj;
    let delta = (v_up - v_down) / (s * spread);
    let bond = (v_down - delta * s * model.d_adj) / model.r_step;
    Ok(ReplicationResult { delta, bond, node_value: delta * s + bond })
}

/// Residual of the one-step martingale identity
/// `p_adj * u_adj + (1 - p_adj) * d_adj - r_step`. Zero in exact arithmetic;
/// callers treat anything above ~1e-12 as a defect.
pub fn martingale_check(model: &AdjustedModel) -> f64 {
    model.p_adj * model.u_adj + (1.0 - model.p_adj) * model.d_adj - model.r_step
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn base_market(n: u32, convention: RateConvention) -> MarketSpec {
        MarketSpec::new(100.0, 1.2, 0.8, 1.05, convention, n, 100.0).unwrap()
    }

    #[test]
    fn adjusted_factors_scale_by_exponential_impact() {
        let market = base_market(1, RateConvention::PerStep);
        let impact = ImpactSpec::new(0.05, 1.3, 1.0).unwrap();
        let model = adjust_factors(&market, &impact).unwrap();
        assert_abs_diff_eq!(model.u_adj, 1.280_590_829_261_031_2, epsilon = 1e-12);
        assert_abs_diff_eq!(model.d_adj, 0.760_983_539_600_571_2, epsilon = 1e-12);
    }

    #[test]
    fn zero_impact_recovers_classical_probability() {
        let market = base_market(1, RateConvention::PerStep);
        let model = adjust_factors(&market, &ImpactSpec::zero()).unwrap();
        assert_abs_diff_eq!(model.p_adj, 0.625, epsilon = 1e-14);
        assert_abs_diff_eq!(model.r_step, 1.05, epsilon = 0.0);
    }

    #[test]
    fn total_horizon_convention_takes_the_nth_root() {
        let market = base_market(6, RateConvention::TotalHorizon);
        let impact = ImpactSpec::new(0.05, 1.3, 1.0).unwrap();
        let model = adjust_factors(&market, &impact).unwrap();
        assert_abs_diff_eq!(model.r_step, 1.008_164_846_051_901_1, epsilon = 1e-12);
        assert_abs_diff_eq!(model.p_adj, 0.475_707_926_678_341_6, epsilon = 1e-12);
        assert_abs_diff_eq!(model.horizon_growth(), 1.05, epsilon = 1e-12);
    }

    #[test]
    fn probability_stays_inside_unit_interval_or_errors() {
        let market = base_market(1, RateConvention::PerStep);
        // d_adj = 0.8 * e^1 = 2.1746... > r_step: hard error, no clamping.
        let impact = ImpactSpec::new(1.0, 1.3, -1.0).unwrap();
        match adjust_factors(&market, &impact) {
            Err(PricingError::ArbitrageViolation { d_adj, r_step, u_adj }) => {
                assert_abs_diff_eq!(d_adj, 0.8 * 1f64.exp(), epsilon = 1e-12);
                assert_abs_diff_eq!(r_step, 1.05, epsilon = 0.0);
                assert!(u_adj > d_adj);
            }
            other => panic!("expected arbitrage violation, got {other:?}"),
        }
    }

    #[test]
    fn collapsed_factor_order_is_degenerate() {
        let market = base_market(1, RateConvention::PerStep);
        let impact = ImpactSpec::new(1.0, -3.0, -3.0).unwrap();
        assert!(matches!(
            adjust_factors(&market, &impact),
            Err(PricingError::DegenerateLattice { .. })
        ));
    }

    #[test]
    fn no_arb_region_matches_log_thresholds() {
        let market = base_market(1, RateConvention::PerStep);
        let impact = ImpactSpec::new(0.1, 0.0, 0.0).unwrap();
        let region = no_arb_region(&market, &impact).unwrap();
        assert_abs_diff_eq!(region.v_u_min, -1.335_313_926_245_226_2, epsilon = 1e-12);
        assert_abs_diff_eq!(region.v_d_min, -2.719_337_154_836_417_6, epsilon = 1e-12);
        assert!(region.admissible, "non-negative volumes must be admissible here");
    }

    #[test]
    fn no_arb_region_flags_inadmissible_volumes() {
        let market = base_market(1, RateConvention::PerStep);
        let impact = ImpactSpec::new(0.1, -2.0, 0.0).unwrap(); // v_u below -1.3353
        let region = no_arb_region(&market, &impact).unwrap();
        assert!(!region.admissible);
        assert!(matches!(
            adjust_factors(&market, &impact),
            Err(PricingError::ArbitrageViolation { .. })
        ));
    }

    #[test]
    fn zero_lambda_region_reports_classical_condition() {
        let market = base_market(1, RateConvention::PerStep);
        match no_arb_region(&market, &ImpactSpec::zero()) {
            Err(PricingError::ZeroImpact { d, r_step, u }) => {
                assert_eq!((d, r_step, u), (0.8, 1.05, 1.2));
            }
            other => panic!("expected ZeroImpact, got {other:?}"),
        }
    }

    #[test]
    fn replication_reproduces_one_step_value() {
        let model = AdjustedModel { u_adj: 1.2, d_adj: 0.8, r_step: 1.05, p_adj: 0.625, n: 1 };
        let rep = replicate_node(100.0, 1.0, 0.0, &model).unwrap();
        assert_abs_diff_eq!(rep.delta, 0.025, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.bond, -1.904_761_904_761_904_7, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.node_value, 0.595_238_095_238_095_2, epsilon = 1e-12);
        // Same number as discounting the expected payoff.
        let expected = (model.p_adj * 1.0 + (1.0 - model.p_adj) * 0.0) / model.r_step;
        assert_abs_diff_eq!(rep.node_value, expected, epsilon = 1e-14);
    }

    #[test]
    fn martingale_residual_is_negligible() {
        let market = base_market(6, RateConvention::TotalHorizon);
        let impact = ImpactSpec::new(0.05, 1.3, 1.0).unwrap();
        let model = adjust_factors(&market, &impact).unwrap();
        assert!(martingale_check(&model).abs() <= 1e-12);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(MarketSpec::new(0.0, 1.2, 0.8, 1.05, RateConvention::PerStep, 1, 100.0).is_err());
        assert!(MarketSpec::new(100.0, 0.8, 1.2, 1.05, RateConvention::PerStep, 1, 100.0).is_err());
        assert!(MarketSpec::new(100.0, 1.2, 0.0, 1.05, RateConvention::PerStep, 1, 100.0).is_err());
        assert!(MarketSpec::new(100.0, 1.2, 0.8, 0.0, RateConvention::PerStep, 1, 100.0).is_err());
        assert!(MarketSpec::new(100.0, 1.2, 0.8, 1.05, RateConvention::PerStep, 0, 100.0).is_err());
        assert!(MarketSpec::new(100.0, 1.2, 0.8, 1.05, RateConvention::PerStep, 1, -1.0).is_err());
        assert!(ImpactSpec::new(-0.1, 0.0, 0.0).is_err());
        assert!(ImpactSpec::new(f64::NAN, 0.0, 0.0).is_err());
    }
}
