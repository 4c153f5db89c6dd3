//! Capacity-expansion timing economics.
//!
//! Years are 1-based. An expansion year `delta` means the pre-expansion limit
//! must hold in years `1..=delta` and the new capacity serves every later
//! year; `delta = 0` expands immediately.

use serde::{Deserialize, Serialize};

use crate::timegrid::Discount;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapexParams {
    /// Inflation-adjusted cost of the expansion project, $.
    pub cost: f64,
    /// Pre-expansion capacity, MW.
    pub limit: f64,
    pub discount: Discount,
}

impl CapexParams {
    pub fn new(cost: f64, limit: f64, discount: Discount) -> Result<Self> {
        if !(cost >= 0.0 && cost.is_finite()) {
            return Err(Error::config(format!("expansion cost must be >= 0, got {cost}")));
        }
        if !(limit > 0.0 && limit.is_finite()) {
            return Err(Error::config(format!("capacity limit must be > 0, got {limit}")));
        }
        Ok(CapexParams {
            cost,
            limit,
            discount,
        })
    }

    /// Present cost of expanding in `delta` without range checking.
    #[inline]
    pub(crate) fn cost_at(&self, delta: usize) -> f64 {
        self.cost * self.discount.at(delta)
    }
}

/// Expansion year chosen by the planner's rule: the last year before the
/// peak first exceeds `limit`, or `peaks.len()` if it never does.
pub fn capex_year(peaks: &[f64], limit: f64) -> usize {
    peaks
        .iter()
        .position(|&p| p > limit)
        .unwrap_or(peaks.len())
}

/// Present cost `I / (1 + rho)^delta` of expanding in year `delta`.
pub fn present_cost(p: &CapexParams, delta: usize, n_years: usize) -> Result<f64> {
    if delta > n_years {
        return Err(Error::domain(format!(
            "expansion year {delta} outside 0..={n_years}"
        )));
    }
    Ok(p.cost_at(delta))
}

/// Minimizes the present cost over every admissible expansion year, i.e.
/// every `delta` in `0..=n_years` whose years `1..=delta` respect the limit.
///
/// Returns `(delta*, cost)`. Ties go to the latest year.
pub fn lemma1_min(peaks: &[f64], p: &CapexParams) -> (usize, f64) {
    let n = peaks.len();
    let mut best = (0, p.cost_at(0));
    for delta in 1..=n {
        if peaks[..delta].iter().any(|&l| l > p.limit) {
            continue;
        }
        let c = p.cost_at(delta);
        if c <= best.1 {
            best = (delta, c);
        }
    }
    best
}
