//! Energy storage with throughput-driven capacity degradation.

use serde::{Deserialize, Serialize};

use super::{check_nonnegative, check_positive, BlockRow, NwaBlock};
use crate::lp::Sense;
use crate::timegrid::TimeGrid;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EsSpec {
    /// $ per MWh of nameplate energy capacity.
    pub energy_cost: f64,
    /// Largest installable energy capacity, MWh.
    pub max_capacity: f64,
    pub eta_c: f64,
    pub eta_d: f64,
    /// MWh of capacity lost per MWh of charge plus discharge throughput.
    pub degradation: f64,
    /// Energy-to-power ratio, hours.
    pub epr: f64,
}

impl Default for EsSpec {
    fn default() -> Self {
        EsSpec {
            energy_cost: 250_000.0,
            max_capacity: 40.0,
            eta_c: 0.97,
            eta_d: 0.95,
            degradation: 0.028,
            epr: 4.0,
        }
    }
}

impl EsSpec {
    fn validate(&self) -> Result<()> {
        check_nonnegative("ES energy cost", self.energy_cost)?;
        check_nonnegative("ES max capacity", self.max_capacity)?;
        check_nonnegative("ES degradation", self.degradation)?;
        check_positive("ES energy-to-power ratio", self.epr)?;
        for (what, eta) in [("charge", self.eta_c), ("discharge", self.eta_d)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::config(format!(
                    "ES {what} efficiency must lie in (0, 1], got {eta}"
                )));
            }
        }
        Ok(())
    }
}

/// Variable layout of a compiled storage block.
///
/// Index 0 is the nameplate capacity `s0` (MWh). For each flat cell `k`,
/// charge `c` (MW), discharge `d` (MW) and the state of charge at the
/// start of the following period follow at `1 + 3k`, `2 + 3k`, `3 + 3k`.
/// The state at the start of each year is 0 and not represented. The usable
/// capacity of year `a` sits at `1 + 3·cells + (a − 1)`.
#[derive(Debug, Clone, Copy)]
pub struct EsLayout {
    cells: usize,
}

impl EsLayout {
    pub fn new(grid: &TimeGrid) -> Self {
        EsLayout { cells: grid.len() }
    }

    pub fn charge(&self, cell: usize) -> usize {
        1 + 3 * cell
    }

    pub fn discharge(&self, cell: usize) -> usize {
        2 + 3 * cell
    }

    /// State of charge at the end of `cell`.
    pub fn soc_after(&self, cell: usize) -> usize {
        3 + 3 * cell
    }

    pub fn capacity(&self, year: usize) -> usize {
        1 + 3 * self.cells + (year - 1)
    }
}

/// Charging `c` raises the next state of charge by `Δt·η_c·c`; discharging
/// `d` lowers it by `Δt·d/η_d`. The state never exceeds the year's usable
/// capacity, which equals the nameplate minus `degradation` times all
/// strictly-prior years' throughput `Δt·Σ(c + d)`. Power is limited by the
/// nameplate capacity over the energy-to-power ratio. The load
/// contribution is `c − d`.
pub fn compile_es(spec: &EsSpec, grid: &TimeGrid) -> Result<NwaBlock> {
    spec.validate()?;
    let lay = EsLayout::new(grid);
    let n_op = 3 * grid.len() + grid.n_years;
    let mut block = NwaBlock::empty("ES", 1, n_op, grid);
    block.bounds[0] = (0.0, spec.max_capacity);
    block.invest_cost[0] = spec.energy_cost;
    let dt = grid.dt_hours;
    let inv_epr = 1.0 / spec.epr;

    for a in grid.years() {
        let cap = lay.capacity(a);
        for (cell, t) in grid.year_range(a).zip(1..) {
            let (c, d, s) = (lay.charge(cell), lay.discharge(cell), lay.soc_after(cell));
            let mut soc = vec![(s, 1.0), (c, -dt * spec.eta_c), (d, dt / spec.eta_d)];
            if t > 1 {
                soc.push((lay.soc_after(cell - 1), -1.0));
            }
            block.rows.push(BlockRow::new(soc, Sense::Eq, 0.0));
            block.rows.push(BlockRow::new(vec![(s, 1.0), (cap, -1.0)], Sense::Le, 0.0));
            block.rows.push(BlockRow::new(vec![(c, 1.0), (0, -inv_epr)], Sense::Le, 0.0));
            block.rows.push(BlockRow::new(vec![(d, 1.0), (0, -inv_epr)], Sense::Le, 0.0));
            block.load_map[cell] = vec![(c, 1.0), (d, -1.0)];
        }
        let mut degr = vec![(cap, 1.0), (0, -1.0)];
        if spec.degradation > 0.0 {
            for cell in 0..grid.year_range(a).start {
                let w = spec.degradation * dt;
                degr.push((lay.charge(cell), w));
                degr.push((lay.discharge(cell), w));
            }
        }
        block.rows.push(BlockRow::new(degr, Sense::Eq, 0.0));
    }
    Ok(block)
}
