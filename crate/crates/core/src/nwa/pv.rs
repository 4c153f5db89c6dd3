//! Solar photovoltaics: output is the installed capacity times a per-cell
//! availability profile.

use serde::{Deserialize, Serialize};

use super::{check_deviations, check_nonnegative, BlockRow, NwaBlock};
use crate::lp::Sense;
use crate::timegrid::TimeGrid;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvSpec {
    /// $ per MW installed.
    pub capacity_cost: f64,
    /// Largest installable capacity, MW.
    pub max_capacity: f64,
    /// Output per MW installed, per (year, period), in [0, 1].
    pub profile: Vec<f64>,
    /// Half-width of the profile interval per (year, period); empty = certain.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profile_deviation: Vec<f64>,
}

impl PvSpec {
    fn validate(&self, grid: &TimeGrid) -> Result<()> {
        check_nonnegative("PV capacity cost", self.capacity_cost)?;
        check_nonnegative("PV max capacity", self.max_capacity)?;
        grid.check_len("PV profile", self.profile.len())?;
        if let Some(p) = self.profile.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::config(format!("PV profile value {p} outside [0, 1]")));
        }
        check_deviations("PV profile deviation", &self.profile_deviation, grid)
    }
}

/// One investment variable `g_cap` (MW) and one generation variable per
/// cell with `g − α·g_cap = 0`. The load contribution is `−g`.
pub fn compile_pv(spec: &PvSpec, grid: &TimeGrid) -> Result<NwaBlock> {
    spec.validate(grid)?;
    let mut block = NwaBlock::empty("PV", 1, grid.len(), grid);
    block.bounds[0] = (0.0, spec.max_capacity);
    block.invest_cost[0] = spec.capacity_cost;
    for cell in 0..grid.len() {
        let g = 1 + cell;
        let mut row = BlockRow::new(vec![(g, 1.0), (0, -spec.profile[cell])], Sense::Eq, 0.0);
        if let Some(&dev) = spec.profile_deviation.get(cell) {
            if dev > 0.0 {
                row.deviations = vec![(0, dev)];
            }
        }
        block.rows.push(row);
        block.load_map[cell].push((g, -1.0));
    }
    Ok(block)
}
