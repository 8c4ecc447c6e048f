//! Exact geometric-average prices, an exact arithmetic-average price by
//! enumeration, and two-sided bounds bracketing the arithmetic price.
//!
//! Geometric pricing has two interchangeable routes. Enumeration visits all
//! 2^n paths. The recombined route collapses them onto (#ups, area) classes:
//! the geometric average depends on a path only through its up-area and the
//! path probability only through its up-count, so the 2^n-term sum regroups
//! into O(n^3) class terms. Both routes evaluate the same discounted
//! expectation and agree to floating-point accuracy; the recombined route is
//! the only one available past the enumeration cap.
//!
//! The arithmetic average admits no such collapse (path extrema do not
//! recombine on (#ups, area)), so the exact arithmetic price and the pathwise
//! upper bound require full enumeration and are gated by the cap. The
//! geometric lower bound and the global upper bound stay available at any n.
//!
//! All enumerated and grouped sums accumulate in a fixed ascending order
//! (path index, respectively (#ups, area)), so repeated runs are
//! bit-reproducible.

use crate::error::Result;
use crate::model::{adjust_factors, AdjustedModel, ImpactSpec, MarketSpec};
use crate::paths::{
    area_count_table, area_count_table_f64, enumerate_paths, total_area, Move, PathStats,
    HARD_ENUMERATION_LIMIT, MAX_EXACT_COUNT_STEPS,
};

/// Which exact summation produced a geometric price.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PricingMethod {
    /// Full walk over all 2^n paths.
    Enumeration,
    /// Grouped sum over (#ups, area) classes.
    Recombined,
}

/// Route requested by a caller. `Auto` enumerates when n fits under the cap
/// and falls back to the recombined sum otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Auto,
    Enumeration,
    Recombined,
}

/// Geometric-average call price, tagged with the route that produced it and
/// the adjusted model it was priced under. `value >= 0` always.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricPriceResult {
    pub value: f64,
    pub method: PricingMethod,
    pub n: u32,
    pub model: AdjustedModel,
}

/// Two-sided bracket for the arithmetic-average call price.
///
/// On every successful construction: `lower <= upper_pathwise <= upper_global`
/// (where the pathwise bound exists), `rho_star >= 1`, and
/// `lower <= exact_enum <= upper_pathwise` when the enumerated fields are
/// filled. `lower` is `geometric.value`, the identical f64.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArithmeticBounds {
    pub geometric: GeometricPriceResult,
    /// AM-GM lower bound: the geometric price itself.
    pub lower: f64,
    /// Enumerated per-path upper bound; `None` when n exceeds the cap.
    pub upper_pathwise: Option<f64>,
    /// Closed-form upper bound from the lattice-wide extremal factor. May be
    /// infinite when `rho_star` overflows; emitted as-is, never clamped.
    pub upper_global: f64,
    pub rho_star: f64,
    /// Exact arithmetic price by enumeration; `None` when n exceeds the cap.
    pub exact_enum: Option<f64>,
}

// The geometric average of a path with up-area a is
// s0 * (u_adj^a * d_adj^(T - a))^(1/(n+1)) with T = n(n+1)/2; evaluated in
// log space, once per path or class.
struct GeoKernel {
    ln_s0: f64,
    ln_u: f64,
    ln_d: f64,
    np1: f64,
    t: f64,
}

impl GeoKernel {
    fn new(market: &MarketSpec, model: &AdjustedModel) -> Self {
        Self {
            ln_s0: market.s0.ln(),
            ln_u: model.u_adj.ln(),
            ln_d: model.d_adj.ln(),
            np1: f64::from(model.n + 1),
            t: total_area(model.n) as f64,
        }
    }

    fn at_area(&self, a: f64) -> f64 {
        (self.ln_s0 + (a * self.ln_u + (self.t - a) * self.ln_d) / self.np1).exp()
    }
}

fn weight(p: f64, ups: u32, n: u32) -> f64 {
    p.powi(ups as i32) * (1.0 - p).powi((n - ups) as i32)
}

// Class weight for step counts past the exact-count range, via logs so large
// exponents neither overflow nor lose the p = 0 / p = 1 edge cases.
fn log_weight(p: f64, ups: u32, n: u32) -> f64 {
    if p == 0.0 {
        return if ups == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if ups == n { 1.0 } else { 0.0 };
    }
    (f64::from(ups) * p.ln() + f64::from(n - ups) * (1.0 - p).ln()).exp()
}

/// Prices the geometric-average call by enumerating all 2^n paths:
/// the discounted expectation of `max(0, G - K)` under the adjusted measure,
/// with discount `r_step^n`.
///
/// Ties `G = K` pay zero (non-strict `max`), fixed for determinism.
///
/// # Errors
///
/// Propagates model construction failures; [`PricingError::CapExceeded`] when
/// `n` exceeds `cap` (or the 62-step encoding limit).
pub fn price_geometric_enum(
    market: &MarketSpec,
    impact: &ImpactSpec,
    cap: u32,
) -> Result<GeometricPriceResult> {
    let model = adjust_factors(market, impact)?;
    let kernel = GeoKernel::new(market, &model);
    let mut payoff_sum = 0.0;
    for path in enumerate_paths(market.n, cap)? {
        let w = weight(model.p_adj, path.ups(), market.n);
        let g = kernel.at_area(path.area_up() as f64);
        payoff_sum += w * (g - market.strike).max(0.0);
    }
    Ok(GeometricPriceResult {
        value: payoff_sum / model.horizon_growth(),
        method: PricingMethod::Enumeration,
        n: market.n,
        model,
    })
}

/// Prices the geometric-average call by the grouped (#ups, area) sum. Equals
/// [`price_geometric_enum`] to 1e-12 relative wherever both run, and works
/// for any n the count table fits in memory (the table grows cubically).
///
/// Counts are exact integers up to [`MAX_EXACT_COUNT_STEPS`]; beyond that the
/// grouping carries f64 counts and log-space class weights.
///
/// # Errors
///
/// Propagates model construction failures.
pub fn price_geometric_recombined(
    market: &MarketSpec,
    impact: &ImpactSpec,
) -> Result<GeometricPriceResult> {
    let model = adjust_factors(market, impact)?;
    let (payoff_sum, _) = grouped_sums(market, &model)?;
    Ok(GeometricPriceResult {
        value: payoff_sum / model.horizon_growth(),
        method: PricingMethod::Recombined,
        n: market.n,
        model,
    })
}

/// Dispatches between the two geometric routes. `Auto` enumerates exactly
/// when `n <= cap` (clamped to the encoding limit) and otherwise recombines,
/// so it never fails on size alone.
pub fn price_geometric(
    market: &MarketSpec,
    impact: &ImpactSpec,
    choice: MethodChoice,
    cap: u32,
) -> Result<GeometricPriceResult> {
    match choice {
        MethodChoice::Enumeration => price_geometric_enum(market, impact, cap),
        MethodChoice::Recombined => price_geometric_recombined(market, impact),
        MethodChoice::Auto => {
            if market.n <= cap.min(HARD_ENUMERATION_LIMIT) {
                price_geometric_enum(market, impact, cap)
            } else {
                price_geometric_recombined(market, impact)
            }
        }
    }
}

/// Exact discounted expectation of the arithmetic-average call payoff
/// `max(0, mean(S_0..S_n) - K)`, by full enumeration.
///
/// # Errors
///
/// Propagates model failures; [`PricingError::CapExceeded`] past the cap.
pub fn price_arithmetic_exact_enum(
    market: &MarketSpec,
    impact: &ImpactSpec,
    cap: u32,
) -> Result<f64> {
    let model = adjust_factors(market, impact)?;
    let (arith_payoff, _) = enum_walk_sums(market, &model, cap)?;
    Ok(arith_payoff / model.horizon_growth())
}

/// Reverse AM-GM factor of one path: `exp[(s_max - s_min)^2 / (4 s_min s_max)]`.
/// Always >= 1, and 1 exactly when the path never moves. The path's
/// arithmetic mean is at most `rho_path` times its geometric mean.
pub fn rho_path(stats: &PathStats) -> f64 {
    let spread = stats.s_max - stats.s_min;
    (0.25 * spread * spread / (stats.s_min * stats.s_max)).exp()
}

/// Lattice-wide reverse AM-GM factor built from the extremal terminal prices
/// `s0 u_adj^n` and `s0 d_adj^n`:
/// `exp[(u_adj^n - d_adj^n)^2 / (4 u_adj^n d_adj^n)]`.
///
/// Dominates [`rho_path`] of every path. Grows violently with n and with the
/// factor spread; overflows to infinity rather than saturating.
pub fn rho_star(model: &AdjustedModel) -> f64 {
    let un = model.u_adj.powi(model.n as i32);
    let dn = model.d_adj.powi(model.n as i32);
    let spread = un - dn;
    (0.25 * spread * spread / (un * dn)).exp()
}

/// Enumerated upper bound for the arithmetic price: the geometric price plus
/// the discounted sum of `P(path) * (rho_path - 1) * G(path)`.
///
/// Never below [`price_geometric_enum`] or the exact arithmetic price on the
/// same inputs. Requires enumeration (per-path extrema do not recombine).
///
/// # Errors
///
/// Propagates model failures; [`PricingError::CapExceeded`] past the cap.
pub fn bound_upper_pathwise(market: &MarketSpec, impact: &ImpactSpec, cap: u32) -> Result<f64> {
    let geometric = price_geometric_enum(market, impact, cap)?;
    let (_, gap) = enum_walk_sums(market, &geometric.model, cap)?;
    Ok(geometric.value + gap / geometric.model.horizon_growth())
}

/// Closed-form upper bound for the arithmetic price: the recombined geometric
/// price plus `(rho_star - 1) / r^n` times the (undiscounted) expectation of
/// the geometric average. Returns `(bound, rho_star)`. No enumeration runs;
/// any n the count table fits is accepted.
///
/// Looser than [`bound_upper_pathwise`] wherever both exist, and infinite
/// once `rho_star` overflows.
///
/// # Errors
///
/// Propagates model construction failures.
pub fn bound_upper_global(market: &MarketSpec, impact: &ImpactSpec) -> Result<(f64, f64)> {
    let model = adjust_factors(market, impact)?;
    let (payoff_sum, eg) = grouped_sums(market, &model)?;
    let rn = model.horizon_growth();
    let star = rho_star(&model);
    Ok((payoff_sum / rn + (star - 1.0) * eg / rn, star))
}

/// Full two-sided bracket for the arithmetic-average call around one
/// geometric price (routed per `choice`). The enumerated fields
/// (`upper_pathwise`, `exact_enum`) are filled only when `n <= cap`; the
/// global bound and the lower bound are always present.
///
/// # Errors
///
/// Propagates model failures, and [`PricingError::CapExceeded`] only when the
/// caller explicitly forced `MethodChoice::Enumeration` past the cap.
pub fn two_sided_bounds(
    market: &MarketSpec,
    impact: &ImpactSpec,
    choice: MethodChoice,
    cap: u32,
) -> Result<ArithmeticBounds> {
    let geometric = price_geometric(market, impact, choice, cap)?;
    let model = geometric.model;
    let rn = model.horizon_growth();

    let (upper_pathwise, exact_enum) = if market.n <= cap.min(HARD_ENUMERATION_LIMIT) {
        let (arith_payoff, gap) = enum_walk_sums(market, &model, cap)?;
        (Some(geometric.value + gap / rn), Some(arith_payoff / rn))
    } else {
        (None, None)
    };

    let (_, eg) = grouped_sums(market, &model)?;
    let star = rho_star(&model);
    let upper_global = geometric.value + (star - 1.0) * eg / rn;

    Ok(ArithmeticBounds {
        geometric,
        lower: geometric.value,
        upper_pathwise,
        upper_global,
        rho_star: star,
        exact_enum,
    })
}

// Single enumeration pass collecting the two sums that need per-path walks:
// the arithmetic payoff expectation and the AM-GM gap sum
// sum_paths P * (rho - 1) * G. Ascending path order, deterministic.
fn enum_walk_sums(market: &MarketSpec, model: &AdjustedModel, cap: u32) -> Result<(f64, f64)> {
    let kernel = GeoKernel::new(market, model);
    let np1 = f64::from(market.n + 1);
    let mut arith_payoff = 0.0;
    let mut gap = 0.0;
    for path in enumerate_paths(market.n, cap)? {
        let mut s = market.s0;
        let mut s_min = s;
        let mut s_max = s;
        let mut sum = s;
        for mv in path.moves() {
            s *= match mv {
                Move::Up => model.u_adj,
                Move::Down => model.d_adj,
            };
            s_min = s_min.min(s);
            s_max = s_max.max(s);
            sum += s;
        }
        let w = weight(model.p_adj, path.ups(), market.n);
        let g = kernel.at_area(path.area_up() as f64);
        let spread = s_max - s_min;
        let rho = (0.25 * spread * spread / (s_min * s_max)).exp();
        arith_payoff += w * (sum / np1 - market.strike).max(0.0);
        gap += w * (rho - 1.0) * g;
    }
    Ok((arith_payoff, gap))
}

// Grouped sums over (#ups, area) classes: (payoff expectation, expectation of
// the geometric average), both undiscounted. Ascending (k, area) order.
fn grouped_sums(market: &MarketSpec, model: &AdjustedModel) -> Result<(f64, f64)> {
    if model.n <= MAX_EXACT_COUNT_STEPS {
        grouped_sums_exact(market, model)
    } else {
        Ok(grouped_sums_float(market, model))
    }
}

fn grouped_sums_exact(market: &MarketSpec, model: &AdjustedModel) -> Result<(f64, f64)> {
    let table = area_count_table(model.n)?;
    let kernel = GeoKernel::new(market, model);
    let mut payoff_sum = 0.0;
    let mut eg_sum = 0.0;
    for (k, a, count) in table.entries() {
        let w = count as f64 * weight(model.p_adj, k, model.n);
        let g = kernel.at_area(a as f64);
        payoff_sum += w * (g - market.strike).max(0.0);
        eg_sum += w * g;
    }
    Ok((payoff_sum, eg_sum))
}

fn grouped_sums_float(market: &MarketSpec, model: &AdjustedModel) -> (f64, f64) {
    let rows = area_count_table_f64(model.n);
    let kernel = GeoKernel::new(market, model);
    let mut payoff_sum = 0.0;
    let mut eg_sum = 0.0;
    for (k, row) in rows.iter().enumerate() {
        for (a, &count) in row.iter().enumerate() {
            if count == 0.0 {
                continue;
            }
            let w = count * log_weight(model.p_adj, k as u32, model.n);
            let g = kernel.at_area(a as f64);
            payoff_sum += w * (g - market.strike).max(0.0);
            eg_sum += w * g;
        }
    }
    (payoff_sum, eg_sum)
}
