//! Demand response: load reduced in one period rebounds, amplified, in the
//! next period of the same year.

use serde::{Deserialize, Serialize};

use super::{check_nonnegative, BlockRow, NwaBlock};
use crate::lp::Sense;
use crate::timegrid::TimeGrid;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrSpec {
    /// $ per MW of enrolled capacity.
    pub capacity_cost: f64,
    /// Largest enrollable capacity, MW.
    pub max_capacity: f64,
    /// Rebound factor applied in the following period, >= 1.
    pub rebound: f64,
}

impl Default for DrSpec {
    fn default() -> Self {
        DrSpec {
            capacity_cost: 200_000.0,
            max_capacity: 10.0,
            rebound: 1.1,
        }
    }
}

/// One investment variable `r_cap` (MW) and a reduction `r ∈ [0, r_cap]` per
/// cell. The load in period t is `rebound·r_{t−1} − r_t`; the first period
/// carries no rebound and the last period of each year cannot reduce, so no
/// rebound crosses a year boundary.
pub fn compile_dr(spec: &DrSpec, grid: &TimeGrid) -> Result<NwaBlock> {
    check_nonnegative("DR capacity cost", spec.capacity_cost)?;
    check_nonnegative("DR max capacity", spec.max_capacity)?;
    if !(spec.rebound >= 1.0 && spec.rebound.is_finite()) {
        return Err(Error::config(format!("DR rebound must be >= 1, got {}", spec.rebound)));
    }
    let mut block = NwaBlock::empty("DR", 1, grid.len(), grid);
    block.bounds[0] = (0.0, spec.max_capacity);
    block.invest_cost[0] = spec.capacity_cost;
    for cell in 0..grid.len() {
        let r = 1 + cell;
        let (_, t) = grid.unflat(cell);
        if t == grid.n_periods {
            block.bounds[r] = (0.0, 0.0);
        } else {
            block.rows.push(BlockRow::new(vec![(r, 1.0), (0, -1.0)], Sense::Le, 0.0));
        }
        block.load_map[cell].push((r, -1.0));
        if t > 1 {
            block.load_map[cell].push((r - 1, spec.rebound));
        }
    }
    Ok(block)
}
