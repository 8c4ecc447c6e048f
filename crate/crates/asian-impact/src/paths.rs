//! Path-level machinery: compact path encoding, per-path price statistics,
//! and the exact (#ups, area) multiplicity tables behind the recombined
//! pricer.
//!
//! The "area" of a path is the sum of cumulative up-move counts over all n+1
//! observation dates. An up move at step j (1-based) is counted by the last
//! n+1-j dates, so the area equals a k-subset sum of {1, ..., n} and the
//! geometric average of the path depends on the path only through (#ups, area).

use crate::error::{PricingError, Result};
use crate::model::{AdjustedModel, MarketSpec};

/// Default cap on full 2^n path enumeration.
pub const DEFAULT_ENUMERATION_CAP: u32 = 24;

/// Largest n for which (#ups, area) multiplicities are exactly representable
/// in u64 (row sums reach C(n, n/2), which clears 2^63 past n = 60).
pub const MAX_EXACT_COUNT_STEPS: u32 = 60;

// u64 path words cannot index more steps than this, whatever the cap says.
pub(crate) const HARD_ENUMERATION_LIMIT: u32 = 62;

/// One lattice move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Up,
    Down,
}

/// An n-step path packed into a u64: bit k (least significant first) holds
/// step k+1, a set bit meaning an up move. Index 0 is the all-down path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathWord {
    index: u64,
    len: u32,
}

impl PathWord {
    pub fn new(index: u64, len: u32) -> Result<Self> {
        if len > HARD_ENUMERATION_LIMIT {
            return Err(PricingError::InvalidInput(format!(
                "path length {len} exceeds the {HARD_ENUMERATION_LIMIT}-step encoding limit"
            )));
        }
        if len < 64 && index >= (1u64 << len) {
            return Err(PricingError::InvalidInput(format!(
                "path index {index} out of range for {len} steps"
            )));
        }
        Ok(Self { index, len })
    }

    pub fn index(self) -> u64 {
        self.index
    }

    /// Number of steps n.
    pub fn len(self) -> u32 {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// Move taken at 0-based step offset `step` (i.e. step `step + 1`).
    pub fn move_at(self, step: u32) -> Move {
        debug_assert!(step < self.len);
        if (self.index >> step) & 1 == 1 {
            Move::Up
        } else {
            Move::Down
        }
    }

    pub fn moves(self) -> impl Iterator<Item = Move> {
        (0..self.len).map(move |k| self.move_at(k))
    }

    pub fn ups(self) -> u32 {
        self.index.count_ones()
    }

    pub fn downs(self) -> u32 {
        self.len - self.ups()
    }

    /// Sum over observation dates of the cumulative up count: an up at step
    /// j contributes n+1-j, i.e. bit b contributes len - b.
    pub fn area_up(self) -> u64 {
        let mut area = 0u64;
        let mut bits = self.index;
        while bits != 0 {
            let b = bits.trailing_zeros();
            area += u64::from(self.len - b);
            bits &= bits - 1;
        }
        area
    }

    /// Complementary down area; `area_up + area_down = n(n+1)/2`.
    pub fn area_down(self) -> u64 {
        total_area(self.len) - self.area_up()
    }
}

/// `n(n+1)/2`, the combined area of any n-step path.
pub fn total_area(n: u32) -> u64 {
    u64::from(n) * u64::from(n + 1) / 2
}

/// All 2^n paths in ascending index order.
///
/// # Errors
///
/// [`PricingError::CapExceeded`] when `n` exceeds `cap` (or the 62-step
/// encoding limit, whichever is smaller).
pub fn enumerate_paths(n: u32, cap: u32) -> Result<impl Iterator<Item = PathWord>> {
    let effective_cap = cap.min(HARD_ENUMERATION_LIMIT);
    if n > effective_cap {
        return Err(PricingError::CapExceeded { n, cap: effective_cap });
    }
    Ok((0..(1u64 << n)).map(move |index| PathWord { index, len: n }))
}

/// Price sequence (S_0, ..., S_n) along `path` under the adjusted factors.
pub fn path_prices(market: &MarketSpec, model: &AdjustedModel, path: PathWord) -> Result<Vec<f64>> {
    check_len(model, path)?;
    let mut prices = Vec::with_capacity(path.len() as usize + 1);
    let mut s = market.s0;
    prices.push(s);
    for mv in path.moves() {
        s *= factor(model, mv);
        prices.push(s);
    }
    Ok(prices)
}

/// Per-path summary statistics over the n+1 observed prices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStats {
    pub n_up: u32,
    pub n_down: u32,
    pub area_up: u64,
    pub area_down: u64,
    pub s_min: f64,
    pub s_max: f64,
    /// Geometric mean, accumulated in log space.
    pub geo_mean: f64,
    pub arith_mean: f64,
}

/// Walks `path` once and collects counts, areas, extrema and both averages.
pub fn path_stats(market: &MarketSpec, model: &AdjustedModel, path: PathWord) -> Result<PathStats> {
    check_len(model, path)?;
    let mut s = market.s0;
    let mut s_min = s;
    let mut s_max = s;
    let mut sum = s;
    let mut log_sum = s.ln();
    for mv in path.moves() {
        s *= factor(model, mv);
        s_min = s_min.min(s);
        s_max = s_max.max(s);
        sum += s;
        log_sum += s.ln();
    }
    let count = f64::from(path.len() + 1);
    Ok(PathStats {
        n_up: path.ups(),
        n_down: path.downs(),
        area_up: path.area_up(),
        area_down: path.area_down(),
        s_min,
        s_max,
        geo_mean: (log_sum / count).exp(),
        arith_mean: sum / count,
    })
}

/// Risk-neutral probability `p_adj^#ups * (1 - p_adj)^#downs` of `path`.
pub fn path_probability(model: &AdjustedModel, path: PathWord) -> Result<f64> {
    check_len(model, path)?;
    let p = model.p_adj;
    Ok(p.powi(path.ups() as i32) * (1.0 - p).powi(path.downs() as i32))
}

fn check_len(model: &AdjustedModel, path: PathWord) -> Result<()> {
    if path.len() != model.n {
        return Err(PricingError::InvalidInput(format!(
            "path has {} steps but the model has {}",
            path.len(),
            model.n
        )));
    }
    Ok(())
}

fn factor(model: &AdjustedModel, mv: Move) -> f64 {
    match mv {
        Move::Up => model.u_adj,
        Move::Down => model.d_adj,
    }
}

/// Exact multiplicities of (#ups, area) classes for an n-step lattice:
/// `count(k, a)` paths take k up moves and have up-area a. Row k sums to
/// C(n, k); a is nonzero only inside [k(k+1)/2, kn - k(k-1)/2].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AreaCountTable {
    n: u32,
    rows: Vec<Vec<u64>>,
}

impl AreaCountTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Multiplicity of the class (k ups, area a); zero outside the table.
    pub fn count(&self, k: u32, a: u64) -> u64 {
        self.rows
            .get(k as usize)
            .and_then(|row| row.get(a as usize))
            .copied()
            .unwrap_or(0)
    }

    /// Dense row for k ups, indexed by area 0..=n(n+1)/2.
    pub fn row(&self, k: u32) -> &[u64] {
        &self.rows[k as usize]
    }

    /// Nonzero entries as (k, area, count), ascending in (k, area). The fixed
    /// order keeps grouped summations reproducible bit for bit.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u64, u64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(k, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(move |(a, &c)| (k as u32, a as u64, c))
        })
    }
}

/// Builds the exact (#ups, area) table by the subset-sum recurrence
/// `count_m(k, a) = count_{m-1}(k, a) + count_{m-1}(k-1, a-m)` over element
/// sizes m = 1..=n.
///
/// # Errors
///
/// [`PricingError::Overflow`] when `n` exceeds [`MAX_EXACT_COUNT_STEPS`].
pub fn area_count_table(n: u32) -> Result<AreaCountTable> {
    if n > MAX_EXACT_COUNT_STEPS {
        return Err(PricingError::Overflow { n, max: MAX_EXACT_COUNT_STEPS });
    }
    let t = total_area(n) as usize;
    let mut rows = vec![vec![0u64; t + 1]; n as usize + 1];
    rows[0][0] = 1;
    for m in 1..=n as usize {
        for k in (1..=m).rev() {
            // Reads row k-1, which this outer pass has not rewritten yet.
            for a in (m..=t).rev() {
                let add = rows[k - 1][a - m];
                if add != 0 {
                    rows[k][a] += add;
                }
            }
        }
    }
    Ok(AreaCountTable { n, rows })
}

/// Same recurrence carried in f64, for grouped pricing past the exact-count
/// range. Relative rounding stays near machine epsilon times n.
pub(crate) fn area_count_table_f64(n: u32) -> Vec<Vec<f64>> {
    let t = total_area(n) as usize;
    let mut rows = vec![vec![0f64; t + 1]; n as usize + 1];
    rows[0][0] = 1.0;
    for m in 1..=n as usize {
        for k in (1..=m).rev() {
            for a in (m..=t).rev() {
                let add = rows[k - 1][a - m];
                if add != 0.0 {
                    rows[k][a] += add;
                }
            }
        }
    }
    rows
}
