//! The joint NWA planning problem and its two solution techniques.
//!
//! For a fixed expansion year `j` the problem `P(j)` is a single LP over all
//! NWA variables and one peak variable `l^p_a` per year:
//!
//! * minimize NWA investment + NWA operating cost (including the energy
//!   cost of the load they shift) + demand charges on `l^p_a`,
//! * subject to every block's operating region,
//! * `l^b_{a,t} + Σ_i l^i_{a,t} <= l^p_a` in every cell, and
//! * `l^p_a <= l̄` for years `1..=j` (the pre-expansion limit).
//!
//! The expansion cost `I/(1+ρ)^j` is a constant of `P(j)`.
//! [`solve_sequential`] walks `j = 0, 1, …` and [`solve_dwda`] prices all
//! `P(j)` inside one Dantzig–Wolfe loop.
//!
//! Uncertain base load, PV availability and EE accuracy are protected with
//! the interval-scaling knob `Γ` of [`crate::robust::scale_protection`].
//! Rows carrying uncertain coefficients (PV output, EE reduction) become
//! upper limits, so the worst case may leave capacity unused but never
//! overstates it.

mod dwda;
mod sequential;

use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use dwda::{
    dw_master, dw_master_at, dw_subproblem, solve_dwda, solve_dwda_logged, DwIteration, DwOptions,
    MasterPhase, MasterSolution, Proposal, SubproblemSolution,
};
pub use sequential::{solve_sequential, solve_sequential_logged, SequentialStep};

use crate::capex::CapexParams;
use crate::lp::{self, Sense, SparseLp};
use crate::model::{check_load, Tariff};
use crate::nwa::{BlockRow, NwaBlock};
use crate::robust::{self, UncertainLp};
use crate::timegrid::TimeGrid;
use crate::{Error, Result};

/// Relative tolerance used to compare objective values of different `P(j)`.
pub(crate) const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PlanningProblem {
    pub grid: TimeGrid,
    pub blocks: Vec<NwaBlock>,
    /// Nominal base load per cell, MW.
    pub base_load: Vec<f64>,
    /// Half-width of the base-load interval per cell; empty = certain.
    pub load_deviation: Vec<f64>,
    pub capex: CapexParams,
    pub tariff: Tariff,
    /// Protection level in `[0, 1]`.
    pub robust_gamma: f64,
}

impl PlanningProblem {
    pub fn new(
        grid: TimeGrid,
        blocks: Vec<NwaBlock>,
        base_load: Vec<f64>,
        load_deviation: Vec<f64>,
        capex: CapexParams,
        tariff: Tariff,
        robust_gamma: f64,
    ) -> Result<Self> {
        let p = PlanningProblem {
            grid,
            blocks,
            base_load,
            load_deviation,
            capex,
            tariff,
            robust_gamma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        check_load(&self.grid, &self.base_load, &self.load_deviation)?;
        self.tariff.validate(&self.grid)?;
        for b in &self.blocks {
            b.validate(&self.grid)?;
        }
        if !(0.0..=1.0).contains(&self.robust_gamma) {
            return Err(Error::domain(format!(
                "protection level {} outside [0, 1]",
                self.robust_gamma
            )));
        }
        Ok(())
    }

    /// $ per MW of NWA load in each cell: discounted energy price times the
    /// period length.
    pub fn energy_weights(&self) -> Vec<f64> {
        let d = self.capex.discount;
        (0..self.grid.len())
            .map(|k| {
                let (a, _) = self.grid.unflat(k);
                d.at(a) * self.tariff.energy_price[k] * self.grid.dt_hours
            })
            .collect()
    }

    /// $ per MW of yearly peak: the discounted demand charge.
    pub fn demand_weights(&self) -> Vec<f64> {
        let d = self.capex.discount;
        self.grid
            .years()
            .map(|a| d.at(a) * self.tariff.demand_charge)
            .collect()
    }

    /// Base load at the upper end of its protected interval.
    pub fn protected_base_load(&self) -> Vec<f64> {
        self.base_load
            .iter()
            .enumerate()
            .map(|(k, l)| l + self.robust_gamma * self.load_deviation.get(k).copied().unwrap_or(0.0))
            .collect()
    }

    /// Every block robustified at the problem's protection level, with the
    /// energy cost of its load folded into the operating cost.
    pub fn protected_blocks(&self) -> Result<Vec<NwaBlock>> {
        let w = self.energy_weights();
        self.blocks
            .iter()
            .map(|b| Ok(protect_block(b, self.robust_gamma)?.with_load_cost(&w)))
            .collect()
    }

    fn capex_cost(&self, delta: usize) -> f64 {
        self.capex.cost_at(delta)
    }
}

/// Rows of a block ready for robustification: rows with uncertain
/// coefficients become `<=`.
fn relaxed_rows(block: &NwaBlock) -> impl Iterator<Item = (Vec<(usize, f64)>, Sense, f64, &[(usize, f64)])> {
    block.rows.iter().map(|r: &BlockRow| {
        let sense = if r.is_uncertain() { Sense::Le } else { r.sense };
        (r.coeffs.clone(), sense, r.rhs, r.deviations.as_slice())
    })
}

/// Replaces a block's uncertain rows by their robust counterpart at
/// protection level `gamma`. Any auxiliary variables the counterpart needs
/// are appended as cost-free operating variables.
pub fn protect_block(block: &NwaBlock, gamma: f64) -> Result<NwaBlock> {
    let mut base = SparseLp::new();
    for &(lo, hi) in &block.bounds {
        base.add_var(0.0, lo, hi);
    }
    let mut devs = Vec::with_capacity(block.rows.len());
    for (coeffs, sense, rhs, d) in relaxed_rows(block) {
        base.add_row(coeffs, sense, rhs);
        devs.push(d.to_vec());
    }
    let ulp = UncertainLp::new(base, devs, vec![0.0; block.rows.len()])?.with_full_budgets();
    let rc = robust::robust_counterpart_compact(&robust::scale_protection(&ulp, gamma)?)?;
    let extra = rc.n_vars - block.n_vars();
    let mut out = block.clone();
    out.n_op_vars += extra;
    out.op_cost.extend(std::iter::repeat(0.0).take(extra));
    out.bounds = rc.bounds;
    out.rows = rc
        .rows
        .into_iter()
        .map(|r| BlockRow {
            coeffs: r.entries,
            sense: r.sense,
            rhs: r.rhs,
            deviations: Vec::new(),
        })
        .collect();
    Ok(out)
}

/// Column layout of an assembled `P(j)`.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub block_offsets: Vec<usize>,
    pub peak_offset: usize,
}

/// Assembles the protected LP `P(delta)`. Block variables come first in
/// block order, then one peak variable per year; any auxiliary variables
/// of the robust counterpart follow. The expansion cost is not part of the
/// LP objective.
pub fn assemble_fixed_delta(p: &PlanningProblem, delta: usize) -> Result<SparseLp> {
    Ok(assemble(p, delta)?.0)
}

pub(crate) fn assemble(p: &PlanningProblem, delta: usize) -> Result<(SparseLp, Layout)> {
    let grid = &p.grid;
    if delta > grid.n_years {
        return Err(Error::domain(format!(
            "expansion year {delta} outside 0..={}",
            grid.n_years
        )));
    }
    let w = p.energy_weights();
    let mut base = SparseLp::new();
    let mut devs = Vec::new();
    let mut rhs_dev = Vec::new();
    let mut offsets = Vec::with_capacity(p.blocks.len());
    let priced: Vec<NwaBlock> = p.blocks.iter().map(|b| b.with_load_cost(&w)).collect();
    for b in &priced {
        let off = base.n_vars;
        offsets.push(off);
        let obj = b.objective(None);
        for (j, &(lo, hi)) in b.bounds.iter().enumerate() {
            base.add_var(obj[j], lo, hi);
        }
        for (coeffs, sense, rhs, d) in relaxed_rows(b) {
            base.add_row(coeffs.iter().map(|&(j, a)| (off + j, a)).collect(), sense, rhs);
            devs.push(d.iter().map(|&(j, v)| (off + j, v)).collect());
            rhs_dev.push(0.0);
        }
    }
    let peak_offset = base.n_vars;
    for (a, wa) in grid.years().zip(p.demand_weights()) {
        let hi = if a <= delta { p.capex.limit } else { f64::INFINITY };
        base.add_var(wa, 0.0, hi);
    }
    for k in 0..grid.len() {
        let (a, _) = grid.unflat(k);
        let mut entries = vec![(peak_offset + a - 1, -1.0)];
        for (b, &off) in priced.iter().zip(&offsets) {
            for &(j, coef) in &b.load_map[k] {
                match entries.iter_mut().find(|e| e.0 == off + j) {
                    Some(e) => e.1 += coef,
                    None => entries.push((off + j, coef)),
                }
            }
        }
        base.add_row(entries, Sense::Le, -p.base_load[k]);
        devs.push(Vec::new());
        rhs_dev.push(p.load_deviation.get(k).copied().unwrap_or(0.0));
    }
    let n_rows = base.rows.len();
    let ulp = UncertainLp::new(base, devs, vec![0.0; n_rows])?.with_full_budgets();
    let ulp = robust::augment_rhs_uncertainty(&ulp, &rhs_dev)?;
    let lp = robust::robust_counterpart_compact(&robust::scale_protection(&ulp, p.robust_gamma)?)?;
    Ok((
        lp,
        Layout {
            block_offsets: offsets,
            peak_offset,
        },
    ))
}

/// Optimal solution of one `P(j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedDeltaSolution {
    pub delta: usize,
    /// Variables of each block, in the raw block's indexing.
    pub block_vars: Vec<Vec<f64>>,
    pub yearly_peaks: Vec<f64>,
    pub breakdown: CostBreakdown,
    pub iterations: usize,
}

impl FixedDeltaSolution {
    pub fn objective(&self) -> f64 {
        self.breakdown.total()
    }
}

/// Solves `P(delta)`; `None` if it is infeasible.
pub fn solve_fixed_delta(p: &PlanningProblem, delta: usize) -> Result<Option<FixedDeltaSolution>> {
    let (lp, layout) = assemble(p, delta)?;
    let sol = lp::solve_primal(&lp).map_err(|e| Error::from(e).context(format!("solving P({delta})")))?;
    match sol.status {
        lp::Status::Optimal => {}
        lp::Status::Infeasible => return Ok(None),
        lp::Status::Unbounded => {
            return Err(Error::domain(format!("P({delta}) is unbounded")));
        }
    }
    let block_vars: Vec<Vec<f64>> = p
        .blocks
        .iter()
        .zip(&layout.block_offsets)
        .map(|(b, &off)| sol.primal[off..off + b.n_vars()].to_vec())
        .collect();
    let peaks = sol.primal[layout.peak_offset..layout.peak_offset + p.grid.n_years].to_vec();
    let breakdown = breakdown_of(p, &block_vars, &peaks, delta);
    Ok(Some(FixedDeltaSolution {
        delta,
        block_vars,
        yearly_peaks: peaks,
        breakdown,
        iterations: sol.iterations,
    }))
}

/// Cost breakdown of block variables (raw indexing, or protected indexing
/// whose leading variables coincide) and yearly peaks.
pub(crate) fn breakdown_of(
    p: &PlanningProblem,
    block_vars: &[Vec<f64>],
    peaks: &[f64],
    delta: usize,
) -> CostBreakdown {
    let w = p.energy_weights();
    let mut op = 0.0;
    let mut invest = 0.0;
    for (b, x) in p.blocks.iter().zip(block_vars) {
        let priced = b.with_load_cost(&w);
        op += priced.op_cost_of(&x[..b.n_vars()]);
        invest += b.invest_cost_of(x);
    }
    let demand = p.demand_weights().iter().zip(peaks).map(|(w, l)| w * l).sum();
    CostBreakdown {
        op_cost: op,
        invest_cost: invest,
        demand_charge: demand,
        capex_present_cost: p.capex_cost(delta),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Discounted NWA operating cost including the energy cost of the load
    /// the NWAs add or remove, $.
    pub op_cost: f64,
    /// NWA investment, charged at year 0, $.
    pub invest_cost: f64,
    /// Discounted demand charges on the yearly peaks, $.
    pub demand_charge: f64,
    /// Present cost of the expansion project, $.
    pub capex_present_cost: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.op_cost + self.invest_cost + self.demand_charge + self.capex_present_cost
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    Dwda,
    Sequential,
}

impl std::str::FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dwda" => Ok(Technique::Dwda),
            "sequential" => Ok(Technique::Sequential),
            other => Err(Error::config(format!(
                "unknown technique {other:?} (expected dwda or sequential)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockInvestment {
    pub name: String,
    pub invest: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub technique: Technique,
    pub gamma: f64,
    /// Expansion year; the limit binds in years `1..=delta`.
    pub delta: usize,
    pub investments: Vec<BlockInvestment>,
    /// Protected peak of every year, MW.
    pub yearly_peaks: Vec<f64>,
    pub objective: f64,
    pub breakdown: CostBreakdown,
    pub iterations: usize,
    /// Final relative optimality gap (0 for the sequential technique).
    pub gap: f64,
    /// True if the limit is never reached and the expansion cost is paid
    /// at the end of the horizon.
    pub expansion_at_horizon_end: bool,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl Plan {
    pub(crate) fn assemble(
        p: &PlanningProblem,
        technique: Technique,
        block_vars: &[Vec<f64>],
        peaks: Vec<f64>,
        delta: usize,
        iterations: usize,
        gap: f64,
        wall_time: Duration,
    ) -> Plan {
        let breakdown = breakdown_of(p, block_vars, &peaks, delta);
        let investments = p
            .blocks
            .iter()
            .zip(block_vars)
            .map(|(b, x)| BlockInvestment {
                name: b.name.clone(),
                invest: x[..b.n_invest_vars].to_vec(),
            })
            .collect();
        let at_end = delta == p.grid.n_years;
        let mut notes = vec![
            "NWA investment is charged undiscounted at year 0; operating costs and demand \
             charges of year a are discounted by 1/(1+rho)^a."
                .to_string(),
            "Operating cost covers the NWAs' own costs and the energy cost of the load they \
             add or remove; the energy cost of the base load does not depend on the plan and \
             is excluded."
                .to_string(),
            format!(
                "The pre-expansion limit of {} MW binds in years 1..={delta}.",
                p.capex.limit
            ),
        ];
        if at_end {
            notes.push(
                "The limit is never reached within the horizon; the expansion cost is charged \
                 at the end of the horizon."
                    .to_string(),
            );
        }
        Plan {
            technique,
            gamma: p.robust_gamma,
            delta,
            investments,
            yearly_peaks: peaks,
            objective: breakdown.total(),
            breakdown,
            iterations,
            gap,
            expansion_at_horizon_end: at_end,
            notes,
            wall_time,
        }
    }

    /// Investment of the block named `name`, if present.
    pub fn investment(&self, name: &str) -> Option<&[f64]> {
        self.investments
            .iter()
            .find(|b| b.name == name)
            .map(|b| b.invest.as_slice())
    }
}
