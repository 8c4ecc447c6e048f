//! Pricing engine for Asian (average-price) calls on a recombining binomial
//! lattice whose up/down factors are tilted by permanent linear price impact.
//!
//! A trader replicating the option moves the price against itself: buying
//! `v_u` shares on an up step scales the up factor to `u * exp(lambda * v_u)`,
//! selling `v_d` on a down step scales the down factor to
//! `d * exp(-lambda * v_d)`. Everything downstream works with the adjusted
//! factors: risk-neutral probabilities, one-step replication, the no-arbitrage
//! volume region, exact geometric-average prices (by brute enumeration or by a
//! grouped sum over (#ups, area) classes), and two-sided bounds for the
//! arithmetic-average price. A closed-form geometric-average benchmark is
//! included for sanity comparisons at zero impact.
//!
//! Module map:
//! - [`model`]: market/impact parameters, adjusted factors, replication,
//!   no-arbitrage region.
//! - [`paths`]: path encoding, per-path statistics, (#ups, area) count tables.
//! - [`pricing`]: geometric prices, exact arithmetic price, arithmetic bounds.
//! - [`kemna_vorst`]: closed-form benchmark and lattice comparison table.

pub mod error;
pub mod kemna_vorst;
pub mod model;
pub mod paths;
pub mod pricing;

pub use error::{PricingError, Result};
pub use model::{
    adjust_factors, martingale_check, no_arb_region, replicate_node, AdjustedModel, ImpactSpec,
    MarketSpec, NoArbRegion, RateConvention, ReplicationResult,
};
pub use paths::{
    area_count_table, enumerate_paths, path_prices, path_probability, path_stats, AreaCountTable,
    Move, PathStats, PathWord, DEFAULT_ENUMERATION_CAP, MAX_EXACT_COUNT_STEPS,
};
pub use pricing::{
    bound_upper_global, bound_upper_pathwise, price_arithmetic_exact_enum, price_geometric,
    price_geometric_enum, price_geometric_recombined, rho_path, rho_star, two_sided_bounds,
    ArithmeticBounds, GeometricPriceResult, MethodChoice, PricingMethod,
};
