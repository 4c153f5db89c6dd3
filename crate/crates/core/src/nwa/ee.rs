//! Energy efficiency: a convex piecewise-linear cost of percentage load
//! reduction, applied to the base-year load.

use serde::{Deserialize, Serialize};

use super::{check_deviations, BlockRow, NwaBlock};
use crate::lp::Sense;
use crate::timegrid::TimeGrid;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EeSpec {
    /// Size of each cost segment, % of base-year load.
    pub segment_sizes: Vec<f64>,
    /// Marginal cost of each segment, $ per %; nondecreasing.
    pub segment_costs: Vec<f64>,
    /// Realized fraction of the projected reduction per (year, period).
    pub accuracy: Vec<f64>,
    /// Half-width of the accuracy interval per (year, period); empty = certain.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub accuracy_deviation: Vec<f64>,
    /// Base-year load per period, MW.
    pub base_year_load: Vec<f64>,
}

impl EeSpec {
    /// Synthetic three-segment cost curve (3 %, 3 %, 4 % at $0.5M, $1.5M and
    /// $4M per %), exact accuracy. Placeholder data, not a calibrated curve.
    pub fn placeholder(base_year_load: Vec<f64>, grid: &TimeGrid) -> EeSpec {
        EeSpec {
            segment_sizes: vec![3.0, 3.0, 4.0],
            segment_costs: vec![0.5e6, 1.5e6, 4.0e6],
            accuracy: vec![1.0; grid.len()],
            accuracy_deviation: Vec::new(),
            base_year_load,
        }
    }

    fn validate(&self, grid: &TimeGrid) -> Result<()> {
        if self.segment_sizes.len() != self.segment_costs.len() {
            return Err(Error::config(format!(
                "EE: {} segment sizes but {} segment costs",
                self.segment_sizes.len(),
                self.segment_costs.len()
            )));
        }
        if self.segment_sizes.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::config("EE: segment sizes must be finite and >= 0"));
        }
        if self.segment_costs.iter().any(|c| !c.is_finite())
            || self.segment_costs.windows(2).any(|w| w[1] < w[0])
        {
            return Err(Error::config("EE: segment costs must be finite and nondecreasing"));
        }
        if self.base_year_load.len() != grid.n_periods {
            return Err(Error::config(format!(
                "EE: base-year load has {} periods, expected {}",
                self.base_year_load.len(),
                grid.n_periods
            )));
        }
        grid.check_len("EE accuracy", self.accuracy.len())?;
        if self.accuracy.iter().any(|a| !a.is_finite()) {
            return Err(Error::config("EE: accuracy must be finite"));
        }
        check_deviations("EE accuracy deviation", &self.accuracy_deviation, grid)
    }
}

/// Investment variables are the segment reductions `ε_b` (%); one operating
/// variable per cell holds the realized reduction `r` (MW), tied by
/// `r = α·l0_t/100·Σ ε_b`. The load contribution is `−r`.
pub fn compile_ee(spec: &EeSpec, grid: &TimeGrid) -> Result<NwaBlock> {
    spec.validate(grid)?;
    let nb = spec.segment_sizes.len();
    let mut block = NwaBlock::empty("EE", nb, grid.len(), grid);
    for (b, &size) in spec.segment_sizes.iter().enumerate() {
        block.bounds[b] = (0.0, size);
        block.invest_cost[b] = spec.segment_costs[b];
    }
    for cell in 0..grid.len() {
        let r = nb + cell;
        let (_, t) = grid.unflat(cell);
        let scale = spec.base_year_load[t - 1] / 100.0;
        let mut coeffs = vec![(r, 1.0)];
        coeffs.extend((0..nb).map(|b| (b, -spec.accuracy[cell] * scale)));
        let mut row = BlockRow::new(coeffs, Sense::Eq, 0.0);
        if let Some(&dev) = spec.accuracy_deviation.get(cell) {
            if dev > 0.0 && scale != 0.0 {
                row.deviations = (0..nb).map(|b| (b, dev * scale.abs())).collect();
            }
        }
        block.rows.push(row);
        block.bounds[r] = (f64::NEG_INFINITY, f64::INFINITY);
        block.load_map[cell].push((r, -1.0));
    }
    Ok(block)
}
