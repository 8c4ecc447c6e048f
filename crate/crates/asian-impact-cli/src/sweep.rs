//! Parameter sweeps emitted as CSV.
//!
//! Points run in parallel but rows are collected in axis order, and every
//! cell is formatted by the same pure function, so sweep output is
//! byte-identical across runs and across worker counts. A point that fails
//! (an inadmissible lattice, an exceeded cap) becomes a marked row instead
//! of aborting the sweep.

use rayon::prelude::*;

use asian_impact::{two_sided_bounds, ImpactSpec, MarketSpec, MethodChoice, PricingError};

use crate::config::{ConfigError, RawConfig};
use crate::fmt::g10;

pub const CSV_HEADER_TAIL: &str =
    "u_adj,d_adj,p_adj,geom_price,arith_lb,arith_ub_pathwise,arith_ub_global,arith_exact,error_marker";

/// Which parameter a sweep varies. `Moneyness` rescales the strike as
/// `K = value * s0`; `Maturity` rounds the value to a step count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Lambda,
    Vu,
    Vd,
    Moneyness,
    Maturity,
}

impl SweepAxis {
    pub fn column_name(self) -> &'static str {
        match self {
            SweepAxis::Lambda => "lambda",
            SweepAxis::Vu => "vu",
            SweepAxis::Vd => "vd",
            SweepAxis::Moneyness => "moneyness",
            SweepAxis::Maturity => "n",
        }
    }
}

/// A validated axis range: at least two points, strictly increasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPlan {
    pub axis: SweepAxis,
    pub from: f64,
    pub to: f64,
    pub points: u32,
}

impl SweepPlan {
    pub fn from_config(config: &RawConfig) -> Result<Self, ConfigError> {
        let missing: Vec<&str> = [
            ("axis", config.axis.is_none()),
            ("from", config.from.is_none()),
            ("to", config.to.is_none()),
            ("points", config.points.is_none()),
        ]
        .into_iter()
        .filter_map(|(key, absent)| absent.then_some(key))
        .collect();
        if !missing.is_empty() {
            return Err(ConfigError::Invalid(format!(
                "sweep requires {} (set via flags or config keys)",
                missing.join(", ")
            )));
        }
        let plan = Self {
            axis: config.axis.unwrap(),
            from: config.from.unwrap(),
            to: config.to.unwrap(),
            points: config.points.unwrap(),
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.from.is_finite() || !self.to.is_finite() {
            return Err(ConfigError::Invalid(format!(
                "sweep range must be finite, got from = {}, to = {}",
                self.from, self.to
            )));
        }
        if self.points < 2 {
            return Err(ConfigError::Invalid(format!(
                "sweeps need at least 2 points, got {}",
                self.points
            )));
        }
        if self.from >= self.to {
            return Err(ConfigError::Invalid(format!(
                "sweep start must lie below its stop, got from = {}, to = {}",
                self.from, self.to
            )));
        }
        if self.axis == SweepAxis::Maturity && self.from < 1.0 {
            return Err(ConfigError::Invalid(format!(
                "maturity sweeps start at n >= 1, got from = {}",
                self.from
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let span = self.to - self.from;
        let last = f64::from(self.points - 1);
        (0..self.points).map(|i| self.from + span * f64::from(i) / last).collect()
    }
}

struct Row {
    axis_text: String,
    u_adj: Option<f64>,
    d_adj: Option<f64>,
    p_adj: Option<f64>,
    geom: Option<f64>,
    lower: Option<f64>,
    upper_pathwise: Option<f64>,
    upper_global: Option<f64>,
    exact: Option<f64>,
    marker: &'static str,
}

impl Row {
    fn failed(axis_text: String, err: &PricingError) -> Self {
        // Adjusted factors are recoverable from the lattice errors that
        // carry them; every other cell stays empty.
        let (u_adj, d_adj) = match err {
            PricingError::DegenerateLattice { u_adj, d_adj } => (Some(*u_adj), Some(*d_adj)),
            PricingError::ArbitrageViolation { u_adj, d_adj, .. } => (Some(*u_adj), Some(*d_adj)),
            _ => (None, None),
        };
        Self {
            axis_text,
            u_adj,
            d_adj,
            p_adj: None,
            geom: None,
            lower: None,
            upper_pathwise: None,
            upper_global: None,
            exact: None,
            marker: marker_for(err),
        }
    }

    fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            self.axis_text,
            cell(self.u_adj),
            cell(self.d_adj),
            cell(self.p_adj),
            cell(self.geom),
            cell(self.lower),
            cell(self.upper_pathwise),
            cell(self.upper_global),
            cell(self.exact),
            self.marker,
        )
    }
}

fn cell(value: Option<f64>) -> String {
    value.map(g10).unwrap_or_default()
}

fn marker_for(err: &PricingError) -> &'static str {
    match err {
        PricingError::ArbitrageViolation { .. } => "arbitrage_violation",
        PricingError::DegenerateLattice { .. } => "degenerate_lattice",
        PricingError::CapExceeded { .. } => "cap_exceeded",
        PricingError::Overflow { .. } => "overflow",
        _ => "invalid_input",
    }
}

fn point_specs(
    market: &MarketSpec,
    impact: &ImpactSpec,
    axis: SweepAxis,
    value: f64,
) -> Result<(MarketSpec, ImpactSpec), PricingError> {
    match axis {
        SweepAxis::Lambda => Ok((*market, ImpactSpec::new(value, impact.v_u, impact.v_d)?)),
        SweepAxis::Vu => Ok((*market, ImpactSpec::new(impact.lambda, value, impact.v_d)?)),
        SweepAxis::Vd => Ok((*market, ImpactSpec::new(impact.lambda, impact.v_u, value)?)),
        SweepAxis::Moneyness => {
            let scaled = MarketSpec::new(
                market.s0,
                market.u,
                market.d,
                market.rate,
                market.rate_convention,
                market.n,
                value * market.s0,
            )?;
            Ok((scaled, *impact))
        }
        SweepAxis::Maturity => {
            let steps = value.round();
            if steps < 1.0 || steps > f64::from(u32::MAX) {
                return Err(PricingError::InvalidInput(format!(
                    "maturity value {value} does not round to a valid step count"
                )));
            }
            let stretched = MarketSpec::new(
                market.s0,
                market.u,
                market.d,
                market.rate,
                market.rate_convention,
                steps as u32,
                market.strike,
            )?;
            Ok((stretched, *impact))
        }
    }
}

fn axis_text(axis: SweepAxis, value: f64) -> String {
    if axis == SweepAxis::Maturity {
        format!("{}", value.round() as u32)
    } else {
        g10(value)
    }
}

fn compute_row(
    market: &MarketSpec,
    impact: &ImpactSpec,
    method: MethodChoice,
    cap: u32,
    axis: SweepAxis,
    value: f64,
) -> Row {
    let text = axis_text(axis, value);
    let (point_market, point_impact) = match point_specs(market, impact, axis, value) {
        Ok(specs) => specs,
        Err(err) => return Row::failed(text, &err),
    };
    match two_sided_bounds(&point_market, &point_impact, method, cap) {
        Ok(bounds) => {
            let model = bounds.geometric.model;
            Row {
                axis_text: text,
                u_adj: Some(model.u_adj),
                d_adj: Some(model.d_adj),
                p_adj: Some(model.p_adj),
                geom: Some(bounds.geometric.value),
                lower: Some(bounds.lower),
                upper_pathwise: bounds.upper_pathwise,
                upper_global: Some(bounds.upper_global),
                exact: bounds.exact_enum,
                marker: "",
            }
        }
        Err(err) => Row::failed(text, &err),
    }
}

/// Runs the sweep and renders the full CSV document, header included.
pub fn run_sweep(
    market: &MarketSpec,
    impact: &ImpactSpec,
    method: MethodChoice,
    cap: u32,
    plan: &SweepPlan,
) -> String {
    let rows: Vec<Row> = plan
        .values()
        .into_par_iter()
        .map(|value| compute_row(market, impact, method, cap, plan.axis, value))
        .collect();

    let mut out = format!("{},{}\n", plan.axis.column_name(), CSV_HEADER_TAIL);
    for row in &rows {
        out.push_str(&row.to_csv_line());
    }
    out
}
