//! The four subcommand bodies. Each returns the full text it would print,
//! leaving the stdout-or-file decision to `main`, so the two destinations
//! always receive identical bytes.

use std::fmt::Write as _;

use asian_impact::kemna_vorst::{kv_comparison_table, Averaging};
use asian_impact::{
    no_arb_region, two_sided_bounds, ImpactSpec, MarketSpec, PricingError, PricingMethod,
};

use crate::config::Resolved;
use crate::fmt::g10;
use crate::sweep::{run_sweep, SweepPlan};
use crate::Failure;

/// Prices one option and reports the adjusted lattice alongside the
/// geometric price and the arithmetic bracket.
pub fn cmd_price(resolved: &Resolved) -> Result<String, Failure> {
    let bounds = two_sided_bounds(&resolved.market, &resolved.impact, resolved.method, resolved.cap)
        .map_err(|err| match err {
            PricingError::ArbitrageViolation { d_adj, r_step, u_adj } => {
                arbitrage_failure(&resolved.market, &resolved.impact, d_adj, r_step, u_adj)
            }
            other => other.into(),
        })?;

    let model = bounds.geometric.model;
    let method = match bounds.geometric.method {
        PricingMethod::Enumeration => "enum",
        PricingMethod::Recombined => "recombined",
    };
    let mut out = String::new();
    let _ = writeln!(out, "method = {method}");
    let _ = writeln!(out, "n = {}", model.n);
    let _ = writeln!(out, "u_adj = {}", g10(model.u_adj));
    let _ = writeln!(out, "d_adj = {}", g10(model.d_adj));
    let _ = writeln!(out, "r_step = {}", g10(model.r_step));
    let _ = writeln!(out, "p_adj = {}", g10(model.p_adj));
    let _ = writeln!(out, "geometric_price = {}", g10(bounds.geometric.value));
    let _ = writeln!(out, "arith_lower = {}", g10(bounds.lower));
    match bounds.upper_pathwise {
        Some(v) => {
            let _ = writeln!(out, "arith_upper_pathwise = {}", g10(v));
        }
        None => {
            let _ = writeln!(out, "arith_upper_pathwise = n/a (n > cap)");
        }
    }
    let _ = writeln!(out, "arith_upper_global = {}", g10(bounds.upper_global));
    let _ = writeln!(out, "rho_star = {}", g10(bounds.rho_star));
    match bounds.exact_enum {
        Some(v) => {
            let _ = writeln!(out, "arith_exact = {}", g10(v));
        }
        None => {
            let _ = writeln!(out, "arith_exact = n/a (n > cap)");
        }
    }
    Ok(out)
}

// Names the violated side of d_adj <= r_step <= u_adj and, when impact is
// active, the minimal volumes that restore admissibility.
fn arbitrage_failure(
    market: &MarketSpec,
    impact: &ImpactSpec,
    d_adj: f64,
    r_step: f64,
    u_adj: f64,
) -> Failure {
    let mut message = String::from("arbitrage violation: ");
    if r_step < d_adj {
        let _ = write!(
            message,
            "d_adj <= r_step fails (d_adj = {}, r_step = {})",
            g10(d_adj),
            g10(r_step)
        );
    } else {
        let _ = write!(
            message,
            "r_step <= u_adj fails (r_step = {}, u_adj = {})",
            g10(r_step),
            g10(u_adj)
        );
    }
    if impact.lambda > 0.0 {
        if let Ok(region) = no_arb_region(market, impact) {
            let _ = write!(
                message,
                "; minimal admissible volumes: v_u >= {}, v_d >= {}",
                g10(region.v_u_min),
                g10(region.v_d_min)
            );
        }
    } else {
        message.push_str("; lambda = 0, so the classical condition d <= r_step <= u fails on its own");
    }
    Failure { message, code: 3 }
}

/// Reports the minimal admissible volumes, or the classical condition when
/// impact is switched off. Inadmissible volumes are a report, not an error.
pub fn cmd_region(resolved: &Resolved) -> Result<String, Failure> {
    match no_arb_region(&resolved.market, &resolved.impact) {
        Ok(region) => {
            let mut out = String::new();
            let _ = writeln!(out, "v_u_min = {}", g10(region.v_u_min));
            let _ = writeln!(out, "v_d_min = {}", g10(region.v_d_min));
            let _ = writeln!(out, "v_u = {}", g10(resolved.impact.v_u));
            let _ = writeln!(out, "v_d = {}", g10(resolved.impact.v_d));
            let _ = writeln!(out, "admissible = {}", region.admissible);
            Ok(out)
        }
        Err(PricingError::ZeroImpact { d, r_step, u }) => {
            let satisfied = d <= r_step && r_step <= u;
            let mut out = String::new();
            let _ = writeln!(out, "lambda = 0: no-arbitrage volume thresholds are undefined");
            let _ = writeln!(
                out,
                "the classical condition d <= r_step <= u applies (d = {}, r_step = {}, u = {})",
                g10(d),
                g10(r_step),
                g10(u)
            );
            let _ = writeln!(out, "classical condition satisfied = {satisfied}");
            if satisfied {
                let _ = writeln!(out, "any non-negative volumes keep the lattice arbitrage-free");
            }
            Ok(out)
        }
        Err(other) => Err(other.into()),
    }
}

pub fn cmd_sweep(resolved: &Resolved, plan: &SweepPlan) -> String {
    run_sweep(&resolved.market, &resolved.impact, resolved.method, resolved.cap, plan)
}

/// Compares zero-impact lattice prices against the closed-form benchmark
/// over a range of step counts, as CSV.
pub fn cmd_benchmark(
    resolved: &Resolved,
    averaging: Averaging,
    n_from: u32,
    n_to: u32,
    n_step: u32,
) -> Result<String, Failure> {
    if resolved.impact.lambda != 0.0 {
        return Err(Failure::validation(
            "the benchmark is a frictionless reference; it requires lambda = 0",
        ));
    }
    if n_from == 0 || n_step == 0 || n_from > n_to {
        return Err(Failure::validation(format!(
            "benchmark range requires 1 <= n-from <= n-to and n-step >= 1, got n-from = {n_from}, n-to = {n_to}, n-step = {n_step}"
        )));
    }
    let steps: Vec<u32> = (n_from..=n_to).step_by(n_step as usize).collect();
    let rows = kv_comparison_table(&resolved.market, averaging, &steps)?;
    let mut out = String::from("n,lattice_price,kv_price,abs_diff,pct_error\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.n,
            g10(row.lattice_price),
            g10(row.kv_price),
            g10(row.abs_diff),
            g10(row.pct_error)
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    use asian_impact::{MethodChoice, RateConvention};

    use crate::config::Resolved;

    fn resolved(n: u32, lambda: f64, v_u: f64, v_d: f64) -> Resolved {
        Resolved {
            market: MarketSpec::new(100.0, 1.2, 0.8, 1.05, RateConvention::TotalHorizon, n, 100.0)
                .unwrap(),
            impact: ImpactSpec::new(lambda, v_u, v_d).unwrap(),
            method: MethodChoice::Auto,
            cap: 24,
            out: None,
        }
    }

    #[test]
    fn price_report_lists_model_and_bounds_in_order() {
        let report = cmd_price(&resolved(6, 0.0, 0.0, 0.0)).unwrap();
        let keys: Vec<&str> =
            report.lines().map(|l| l.split(" = ").next().unwrap()).collect();
        assert_eq!(
            keys,
            [
                "method",
                "n",
                "u_adj",
                "d_adj",
                "r_step",
                "p_adj",
                "geometric_price",
                "arith_lower",
                "arith_upper_pathwise",
                "arith_upper_global",
                "rho_star",
                "arith_exact"
            ]
        );
        assert!(report.contains("geometric_price = 10.74"));
        assert!(report.contains("method = enum"));
    }

    #[test]
    fn price_report_marks_capped_fields() {
        let mut r = resolved(30, 0.0, 0.0, 0.0);
        r.cap = 24;
        let report = cmd_price(&r).unwrap();
        assert!(report.contains("method = recombined"));
        assert!(report.contains("arith_upper_pathwise = n/a (n > cap)"));
        assert!(report.contains("arith_exact = n/a (n > cap)"));
    }

    #[test]
    fn arbitrage_failure_names_inequality_and_minimal_volumes() {
        // v_u keeps u_adj above d_adj so the lattice is not degenerate, while
        // v_d = -1 pushes d_adj = 0.8 e above r_step.
        let r = resolved(2, 1.0, 1.0, -1.0);
        let failure = cmd_price(&r).unwrap_err();
        assert_eq!(failure.code, 3);
        assert!(failure.message.contains("d_adj <= r_step fails"));
        assert!(failure.message.contains("d_adj = 2.174625463"));
        assert!(failure.message.contains("v_u >="));
        assert!(failure.message.contains("v_d >="));
    }

    #[test]
    fn region_reports_minima_and_admissibility() {
        let report = cmd_region(&resolved(2, 0.1, 1.3, 1.0)).unwrap();
        assert!(report.contains("v_u_min = "));
        assert!(report.contains("v_d_min = "));
        assert!(report.contains("admissible = true"));

        let report = cmd_region(&resolved(2, 1.0, 0.0, -1.0)).unwrap();
        assert!(report.contains("admissible = false"));
    }

    #[test]
    fn region_explains_the_classical_condition_at_zero_lambda() {
        let report = cmd_region(&resolved(2, 0.0, 0.0, 0.0)).unwrap();
        assert!(report.contains("lambda = 0"));
        assert!(report.contains("classical condition satisfied = true"));
    }

    #[test]
    fn benchmark_requires_zero_impact() {
        let failure =
            cmd_benchmark(&resolved(2, 0.1, 1.0, 1.0), Averaging::Continuous, 2, 6, 2).unwrap_err();
        assert_eq!(failure.code, 2);
        assert!(failure.message.contains("lambda = 0"));
    }

    #[test]
    fn benchmark_emits_one_row_per_step_count() {
        let csv =
            cmd_benchmark(&resolved(2, 0.0, 0.0, 0.0), Averaging::Continuous, 2, 8, 2).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,lattice_price,kv_price,abs_diff,pct_error");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("2,7.142847795,"));
    }
}
