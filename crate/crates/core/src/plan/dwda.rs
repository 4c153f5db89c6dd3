//! Dantzig–Wolfe column generation over all expansion years at once.
//!
//! A proposal is one joint snapshot of every (protected) block: its cost
//! and its load profile. The restricted master for expansion year `j`
//! chooses a convex combination of proposals and the yearly peaks:
//!
//! ```text
//! min  Σ_k C_k λ_k + Σ_a w_a l^p_a + M Σ_{a<=j} u_a
//! s.t. Σ_k L_k[a,t] λ_k − l^p_a <= −l^b_{a,t}      (prices π¹ = −dual)
//!      l^p_a − u_a <= l̄                 a <= j
//!      Σ_k λ_k = 1                                (dual π²)
//! ```
//!
//! The elastic variables `u` keep every master feasible while the pool
//! cannot yet respect the limit; a master counts as feasible only when
//! `u = 0`. Each iteration prices every still-open `j` with its own duals;
//! blocks are priced independently and in parallel. `P(j)` is closed once
//! its Lagrangian bound reaches the best objective found, or once pricing
//! finds no improving column while `u > 0` (then `P(j)` is infeasible).

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Plan, PlanningProblem, Technique, TIE_TOL};
use crate::lp::{self, Sense, SparseLp};
use crate::nwa::NwaBlock;
use crate::{Error, Result};

/// Relative tolerance on reduced costs.
const TOL_REDUCED: f64 = 1e-9;
/// Proposal load entries below this fraction of the largest are zeroed.
const LOAD_NOISE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwOptions {
    pub max_iters: usize,
    /// Stop once `(upper − lower) / max(1, |upper|)` falls below this.
    pub tol_gap: f64,
    /// Purge a proposal after this many contiguous iterations with zero
    /// weight in the chosen master.
    pub purge_after: usize,
}

impl Default for DwOptions {
    fn default() -> Self {
        DwOptions {
            max_iters: 500,
            tol_gap: 1e-4,
            purge_after: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub id: u64,
    /// Variables of each protected block.
    pub blocks: Vec<Vec<f64>>,
    /// Investment plus operating cost, $.
    pub cost: f64,
    /// Load contribution per cell, MW.
    pub load: Vec<f64>,
    pub zero_weight_streak: usize,
}

impl Proposal {
    fn zero(p: &PlanningProblem, blocks: &[NwaBlock]) -> Proposal {
        Proposal {
            id: 0,
            blocks: blocks.iter().map(|b| vec![0.0; b.n_vars()]).collect(),
            cost: 0.0,
            load: vec![0.0; p.grid.len()],
            zero_weight_streak: 0,
        }
    }

    fn same_column(&self, other: &Proposal) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
        close(self.cost, other.cost) && self.load.iter().zip(&other.load).all(|(a, b)| close(*a, *b))
    }
}

/// Optimal restricted master for one expansion year.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterSolution {
    pub delta: usize,
    pub phase: MasterPhase,
    /// Convex weight of each proposal, in pool order.
    pub weights: Vec<f64>,
    /// Price of load per cell (`π¹ >= 0`), $/MW.
    pub prices: Vec<f64>,
    /// Dual of the convexity row (`π²`).
    pub convexity_dual: f64,
    /// Master objective without the expansion cost (total violation in
    /// the feasibility phase).
    pub objective: f64,
    pub yearly_peaks: Vec<f64>,
    /// Total limit violation `Σ u_a`, MW.
    pub violation: f64,
}

impl MasterSolution {
    pub fn is_feasible(&self) -> bool {
        self.phase == MasterPhase::Cost
    }

    /// Total cost including the expansion project, if feasible.
    pub fn total(&self, p: &PlanningProblem) -> Option<f64> {
        self.is_feasible().then(|| self.objective + p.capex_cost(self.delta))
    }
}

/// Optimal subproblem solution of one block at given prices.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution {
    pub x: Vec<f64>,
    /// Investment plus operating cost, $.
    pub cost: f64,
    pub load: Vec<f64>,
    /// `cost + Σ prices·load`.
    pub value: f64,
}

/// Minimizes a block's cost plus `prices` per MW of its load.
pub fn dw_subproblem(block: &NwaBlock, prices: &[f64]) -> Result<SubproblemSolution> {
    if prices.len() != block.load_map.len() {
        return Err(Error::config(format!(
            "{} prices for {} cells",
            prices.len(),
            block.load_map.len()
        )));
    }
    let lp = block.to_lp(block.objective(Some(prices)));
    let sol = lp::solve_primal(&lp)
        .map_err(|e| Error::from(e).context(format!("pricing block {}", block.name)))?;
    match sol.status {
        lp::Status::Optimal => {}
        lp::Status::Infeasible => {
            return Err(Error::Infeasible(format!("block {} has no feasible operation", block.name)))
        }
        lp::Status::Unbounded => {
            return Err(Error::domain(format!("block {} subproblem is unbounded", block.name)))
        }
    }
    let x = sol.primal;
    let cost = block.invest_cost_of(&x) + block.op_cost_of(&x);
    let mut load = block.load(&x);
    // round-off from the simplex would otherwise distort the master's scaling
    let big = load.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for v in load.iter_mut().filter(|v| v.abs() <= LOAD_NOISE * big) {
        *v = 0.0;
    }
    Ok(SubproblemSolution {
        cost,
        load,
        value: sol.objective_value,
        x,
    })
}

/// Which problem a restricted master solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MasterPhase {
    /// The pool cannot yet respect the limit: the master minimized the
    /// total limit violation instead of cost.
    Feasibility,
    /// The master minimized cost.
    Cost,
}

fn master_lp(proposals: &[Proposal], p: &PlanningProblem, delta: usize, phase: MasterPhase) -> (SparseLp, usize, usize, usize) {
    let grid = &p.grid;
    let mut lp = SparseLp::new();
    let cost_phase = phase == MasterPhase::Cost;
    for prop in proposals {
        lp.add_var(if cost_phase { prop.cost } else { 0.0 }, 0.0, f64::INFINITY);
    }
    let peak0 = lp.n_vars;
    for (a, w) in grid.years().zip(p.demand_weights()) {
        let hi = if cost_phase && a <= delta { p.capex.limit } else { f64::INFINITY };
        lp.add_var(if cost_phase { w } else { 0.0 }, 0.0, hi);
    }
    let u0 = lp.n_vars;
    let load = p.protected_base_load();
    for cell in 0..grid.len() {
        let (a, _) = grid.unflat(cell);
        let mut entries: Vec<(usize, f64)> = proposals
            .iter()
            .enumerate()
            .filter(|(_, q)| q.load[cell] != 0.0)
            .map(|(i, q)| (i, q.load[cell]))
            .collect();
        entries.push((peak0 + a - 1, -1.0));
        lp.add_row(entries, Sense::Le, -load[cell]);
    }
    if !cost_phase {
        lp.add_vars(delta, 1.0, 0.0, f64::INFINITY);
        for a in 1..=delta {
            lp.add_row(vec![(peak0 + a - 1, 1.0), (u0 + a - 1, -1.0)], Sense::Le, p.capex.limit);
        }
    }
    let conv = lp.add_row((0..proposals.len()).map(|i| (i, 1.0)).collect(), Sense::Eq, 1.0);
    (lp, peak0, u0, conv)
}

/// Solves the restricted master with expansion year `delta`.
///
/// If the pool cannot keep the peaks of years `1..=delta` within the limit,
/// the feasibility master (minimum total violation) is returned instead;
/// its prices steer the subproblems toward feasibility.
pub fn dw_master_at(proposals: &[Proposal], p: &PlanningProblem, delta: usize) -> Result<MasterSolution> {
    if proposals.is_empty() {
        return Err(Error::domain("the master needs at least one proposal"));
    }
    let grid = &p.grid;
    let k = proposals.len();
    let context = |e: lp::LpError| Error::from(e).context(format!("master for year {delta}"));
    let mut phase = MasterPhase::Cost;
    let (mut mlp, mut peak0, mut u0, mut conv) = master_lp(proposals, p, delta, phase);
    let mut sol = lp::solve(&mlp).map_err(context)?;
    if sol.status == lp::Status::Infeasible {
        phase = MasterPhase::Feasibility;
        (mlp, peak0, u0, conv) = master_lp(proposals, p, delta, phase);
        sol = lp::solve(&mlp).map_err(context)?;
    }
    if !sol.is_optimal() {
        return Err(Error::domain(format!("master for year {delta} is {}", sol.status)));
    }
    let violation = match phase {
        MasterPhase::Cost => 0.0,
        MasterPhase::Feasibility => sol.primal[u0..u0 + delta].iter().sum::<f64>().max(f64::MIN_POSITIVE),
    };
    Ok(MasterSolution {
        delta,
        phase,
        weights: sol.primal[..k].to_vec(),
        prices: sol.duals[..grid.len()].iter().map(|y| -y).collect(),
        convexity_dual: sol.duals[conv],
        objective: sol.objective_value,
        yearly_peaks: sol.primal[peak0..peak0 + grid.n_years].to_vec(),
        violation,
    })
}

/// Solves the restricted master for every expansion year and returns the
/// feasible one with the lowest total cost (ties: the later year).
pub fn dw_master(proposals: &[Proposal], p: &PlanningProblem) -> Result<MasterSolution> {
    let masters = (0..=p.grid.n_years)
        .map(|j| dw_master_at(proposals, p, j))
        .collect::<Result<Vec<_>>>()?;
    let totals: Vec<Option<f64>> = masters.iter().map(|m| m.total(p)).collect();
    let best = pick_best(&totals).expect("the master without a limit is always feasible");
    Ok(masters.into_iter().nth(best).unwrap())
}

/// Index of the smallest value, preferring later indices on ties.
fn pick_best(values: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, v) in values.iter().enumerate() {
        if let Some(v) = *v {
            match best {
                Some((_, b)) if v > b + TIE_TOL * b.abs().max(1.0) => {}
                _ => best = Some((j, v)),
            }
        }
    }
    best.map(|b| b.0)
}

/// One line of the column-generation log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DwIteration {
    pub iteration: usize,
    /// Best total cost (master plus expansion cost) over feasible masters.
    pub master_objective: f64,
    pub lower_bound: f64,
    pub gap: f64,
    /// Pool size when the masters were solved.
    pub proposals: usize,
    pub added: usize,
    pub purged: usize,
    pub purged_ids: Vec<u64>,
    /// Proposals with positive weight in the master that drives the
    /// zero-weight streaks this iteration.
    pub weighted_ids: Vec<u64>,
    /// Proposals with zero weight in that master; together with
    /// `weighted_ids` empty when no streak was updated.
    pub zero_weight_ids: Vec<u64>,
    pub delta: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum YearState {
    Open,
    Closed,
    Infeasible,
}

/// Best feasible master found so far, with the proposals it combines.
struct Incumbent {
    master: MasterSolution,
    total: f64,
    support: Vec<(f64, Proposal)>,
}

pub fn solve_dwda(p: &PlanningProblem, max_iters: usize, tol_gap: f64) -> Result<Plan> {
    let opts = DwOptions {
        max_iters,
        tol_gap,
        ..DwOptions::default()
    };
    Ok(solve_dwda_logged(p, &opts)?.0)
}

/// Runs column generation and returns the plan with the iteration log.
pub fn solve_dwda_logged(p: &PlanningProblem, opts: &DwOptions) -> Result<(Plan, Vec<DwIteration>)> {
    if opts.max_iters == 0 {
        return Err(Error::domain("max_iters must be at least 1"));
    }
    let start = Instant::now();
    let n_years = p.grid.n_years;
    let blocks = p.protected_blocks()?;
    let feasibility_blocks: Vec<NwaBlock> = blocks.iter().map(without_costs).collect();
    let mut pool = vec![Proposal::zero(p, &blocks)];
    let mut next_id = 1u64;
    let mut state = vec![YearState::Open; n_years + 1];
    let mut best_lb = vec![f64::NEG_INFINITY; n_years + 1];
    let mut to_purge: Vec<usize> = Vec::new();
    let mut log = Vec::new();
    let mut incumbent: Option<Incumbent> = None;
    let mut gap = f64::INFINITY;

    for it in 1..=opts.max_iters {
        let mut purged_ids = Vec::new();
        for &i in to_purge.iter().rev() {
            purged_ids.push(pool.remove(i).id);
        }
        purged_ids.reverse();
        to_purge.clear();

        let open: Vec<usize> = (0..=n_years).filter(|&j| state[j] == YearState::Open).collect();
        let masters: Vec<MasterSolution> = open
            .iter()
            .map(|&j| dw_master_at(&pool, p, j))
            .collect::<Result<_>>()
            .map_err(|e| e.context(format!("column generation iteration {it}")))?;
        let totals: Vec<Option<f64>> = masters.iter().map(|m| m.total(p)).collect();
        // Closed years cannot beat the incumbent, which is therefore kept
        // unless an open year improves on it.
        let mut fresh = None;
        if let Some(b) = pick_best(&totals) {
            let t = totals[b].unwrap();
            let better = incumbent
                .as_ref()
                .map_or(true, |c| t <= c.total + TIE_TOL * c.total.abs().max(1.0));
            if better {
                let m = &masters[b];
                let support = pool
                    .iter()
                    .zip(&m.weights)
                    .filter(|(_, &w)| w > 0.0)
                    .map(|(q, &w)| (w, q.clone()))
                    .collect();
                incumbent = Some(Incumbent {
                    master: m.clone(),
                    total: t,
                    support,
                });
                fresh = Some(b);
            }
        }
        let inc = incumbent
            .as_ref()
            .ok_or_else(|| Error::Infeasible("no feasible expansion year".into()))?;
        let ub = inc.total;

        // Price every open year, each block independently.
        let jobs: Vec<(usize, usize)> = (0..masters.len())
            .flat_map(|m| (0..blocks.len()).map(move |b| (m, b)))
            .collect();
        let solved: Vec<SubproblemSolution> = jobs
            .par_iter()
            .map(|&(m, b)| match masters[m].phase {
                MasterPhase::Cost => dw_subproblem(&blocks[b], &masters[m].prices),
                MasterPhase::Feasibility => {
                    let mut s = dw_subproblem(&feasibility_blocks[b], &masters[m].prices)?;
                    s.cost = blocks[b].invest_cost_of(&s.x) + blocks[b].op_cost_of(&s.x);
                    Ok(s)
                }
            })
            .collect::<Result<_>>()
            .map_err(|e| e.context(format!("column generation iteration {it}")))?;

        let mut added = 0;
        for (m, master) in masters.iter().enumerate() {
            let j = master.delta;
            let subs = &solved[m * blocks.len()..(m + 1) * blocks.len()];
            let reduced = subs.iter().map(|s| s.value).sum::<f64>() - master.convexity_dual;
            let tol = TOL_REDUCED * master.objective.abs().max(1.0);
            if let Some(total) = totals[m] {
                best_lb[j] = best_lb[j].max(total + reduced.min(0.0));
            }
            if reduced < -tol {
                let mut load = vec![0.0; p.grid.len()];
                for s in subs {
                    for (l, v) in load.iter_mut().zip(&s.load) {
                        *l += v;
                    }
                }
                let prop = Proposal {
                    id: next_id,
                    blocks: subs.iter().map(|s| s.x.clone()).collect(),
                    cost: subs.iter().map(|s| s.cost).sum(),
                    load,
                    zero_weight_streak: 0,
                };
                if !pool.iter().any(|q| q.same_column(&prop)) {
                    next_id += 1;
                    pool.push(prop);
                    added += 1;
                }
            } else if master.phase == MasterPhase::Feasibility {
                // no column can reduce the violation any further
                state[j] = YearState::Infeasible;
            }
            if state[j] == YearState::Open && best_lb[j] >= ub - opts.tol_gap * ub.abs().max(1.0) {
                state[j] = YearState::Closed;
            }
        }

        let lb = (0..=n_years)
            .filter(|&j| state[j] != YearState::Infeasible)
            .map(|j| best_lb[j])
            .fold(f64::INFINITY, f64::min)
            .min(ub);
        gap = (ub - lb) / ub.abs().max(1.0);

        // Zero-weight streaks refer to the incumbent's master when it was
        // (re)solved this iteration.
        let n_priced = pool.len() - added;
        let current = masters
            .iter()
            .zip(&totals)
            .position(|(m, t)| m.delta == inc.master.delta && t.is_some())
            .or(fresh);
        let mut weighted_ids = Vec::new();
        let mut zero_weight_ids = Vec::new();
        if let Some(m) = current {
            for (i, (q, &w)) in pool[..n_priced].iter_mut().zip(&masters[m].weights).enumerate() {
                if w > 0.0 {
                    weighted_ids.push(q.id);
                    q.zero_weight_streak = 0;
                } else {
                    zero_weight_ids.push(q.id);
                    q.zero_weight_streak += 1;
                    if q.zero_weight_streak >= opts.purge_after {
                        to_purge.push(i);
                    }
                }
            }
        }

        let record = DwIteration {
            iteration: it,
            master_objective: ub,
            lower_bound: lb,
            gap,
            proposals: n_priced,
            added,
            purged: purged_ids.len(),
            purged_ids,
            weighted_ids,
            zero_weight_ids,
            delta: inc.master.delta,
        };
        log::info!("{}", serde_json::to_string(&record).unwrap_or_default());
        log.push(record);

        if gap <= opts.tol_gap || added == 0 || state.iter().all(|s| *s != YearState::Open) {
            break;
        }
    }

    let inc = incumbent.expect("at least one iteration ran");
    let plan = reconstruct(p, &inc, log.len(), gap.max(0.0), start);
    Ok((plan, log))
}

/// A copy of `block` whose costs are all zero.
fn without_costs(block: &NwaBlock) -> NwaBlock {
    let mut b = block.clone();
    b.invest_cost.iter_mut().for_each(|c| *c = 0.0);
    b.op_cost.iter_mut().for_each(|c| *c = 0.0);
    b
}

/// Plan from the λ-weighted proposals of the incumbent master.
fn reconstruct(p: &PlanningProblem, inc: &Incumbent, iterations: usize, gap: f64, start: Instant) -> Plan {
    let mut vars: Vec<Vec<f64>> = inc.support[0].1.blocks.iter().map(|x| vec![0.0; x.len()]).collect();
    for (w, q) in &inc.support {
        for (acc, x) in vars.iter_mut().zip(&q.blocks) {
            for (a, v) in acc.iter_mut().zip(x) {
                *a += w * v;
            }
        }
    }
    Plan::assemble(
        p,
        Technique::Dwda,
        &vars,
        inc.master.yearly_peaks.clone(),
        inc.master.delta,
        iterations,
        gap,
        start.elapsed(),
    )
}

#[cfg(test)]
mod tests {
    use super::super::tests::problem;
    use super::super::{solve_sequential, Tariff};
    use super::*;
    use crate::nwa::{compile_es, compile_pv, EsSpec, PvSpec};
    use crate::timegrid::TimeGrid;

    fn pv(grid: &TimeGrid, cost: f64, profile: Vec<f64>) -> NwaBlock {
        compile_pv(
            &PvSpec {
                capacity_cost: cost,
                max_capacity: 10.0,
                profile,
                profile_deviation: vec![],
            },
            grid,
        )
        .unwrap()
    }

    #[test]
    fn zero_prices_give_zero_proposal() {
        let grid = TimeGrid::new(1, 3, 1.0).unwrap();
        let b = pv(&grid, 5.0, vec![0.2, 0.5, 0.1]);
        let s = dw_subproblem(&b, &[0.0; 3]).unwrap();
        assert!(s.x.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn positive_prices_fill_cheap_pv() {
        let grid = TimeGrid::new(1, 3, 1.0).unwrap();
        let b = pv(&grid, 1.0, vec![0.2, 0.5, 0.1]);
        let s = dw_subproblem(&b, &[10.0, 10.0, 10.0]).unwrap();
        assert!((s.x[0] - 10.0).abs() < 1e-9);
        assert!((s.value - (10.0 - 10.0 * 8.0)).abs() < 1e-9);
    }

    #[test]
    fn storage_arbitrages_price_spread() {
        let grid = TimeGrid::new(1, 3, 1.0).unwrap();
        let spec = EsSpec {
            energy_cost: 0.0,
            max_capacity: 4.0,
            degradation: 0.0,
            ..EsSpec::default()
        };
        let b = compile_es(&spec, &grid).unwrap();
        let s = dw_subproblem(&b, &[-10.0, 100.0, 0.0]).unwrap();
        let load = &s.load;
        // charge at full power (1 MW) first, then discharge what is stored
        assert!((load[0] - 1.0).abs() < 1e-9);
        assert!((load[1] + 0.97 * 0.95).abs() < 1e-9);
    }

    #[test]
    fn master_with_zero_proposal_follows_decision_rule() {
        let grid = TimeGrid::new(5, 1, 1.0).unwrap();
        let p = problem(grid, vec![], vec![50.0, 55.0, 61.0, 62.0, 63.0], 1e8, 60.0);
        let pool = vec![Proposal::zero(&p, &[])];
        let m = dw_master(&pool, &p).unwrap();
        assert_eq!(m.delta, 2);
        assert_eq!(m.weights, vec![1.0]);
    }

    #[test]
    fn master_prefers_dominating_proposal() {
        let grid = TimeGrid::new(1, 1, 1.0).unwrap();
        let p = problem(grid, vec![], vec![50.0], 1e8, 60.0);
        let mk = |id, cost, load| Proposal {
            id,
            blocks: vec![],
            cost,
            load: vec![load],
            zero_weight_streak: 0,
        };
        let m = dw_master(&[mk(0, 10.0, 0.0), mk(1, 5.0, -1.0)], &p).unwrap();
        assert!((m.weights[1] - 1.0).abs() < 1e-12);
        let dup = dw_master(&[mk(0, 5.0, -1.0), mk(1, 5.0, -1.0)], &p).unwrap();
        assert!((dup.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((dup.objective - m.objective).abs() < 1e-9);
    }

    #[test]
    fn no_blocks_terminates_immediately() {
        let grid = TimeGrid::new(3, 2, 1.0).unwrap();
        let p = problem(grid, vec![], vec![50.0, 52.0, 55.0, 58.0, 61.0, 57.0], 1e8, 60.0);
        let (plan, log) = solve_dwda_logged(&p, &DwOptions::default()).unwrap();
        assert_eq!(log.len(), 1);
        assert_eq!(plan.delta, 2);
        let seq = solve_sequential(&p).unwrap();
        assert!((plan.objective - seq.objective).abs() < 1e-9 * seq.objective);
    }

    #[test]
    fn single_iteration_returns_zero_proposal_plan() {
        let grid = TimeGrid::new(2, 2, 1.0).unwrap();
        let b = pv(&grid, 1e3, vec![0.6, 0.1, 0.6, 0.1]);
        let p = problem(grid, vec![b], vec![58.0, 50.0, 61.0, 50.0], 1e7, 60.0);
        let (plan, log) = solve_dwda_logged(
            &p,
            &DwOptions {
                max_iters: 1,
                ..DwOptions::default()
            },
        )
        .unwrap();
        assert_eq!(log.len(), 1);
        assert_eq!(plan.investments[0].invest, vec![0.0]);
        assert!(plan.gap > 0.0);
    }

    #[test]
    fn agrees_with_sequential_on_small_pv_instance() {
        let grid = TimeGrid::new(2, 2, 1.0).unwrap();
        let b = pv(&grid, 2e4, vec![0.6, 0.1, 0.6, 0.1]);
        let p = problem(grid, vec![b], vec![58.0, 50.0, 61.0, 50.0], 1e7, 60.0);
        let seq = solve_sequential(&p).unwrap();
        let dw = solve_dwda(&p, 200, 1e-4).unwrap();
        assert!((seq.objective - dw.objective).abs() <= 1e-4 * seq.objective);
        assert_eq!(seq.delta, dw.delta);
    }

    #[test]
    fn purge_removes_idle_proposals() {
        let grid = TimeGrid::new(3, 8, 1.0).unwrap();
        let n = grid.len();
        let profile: Vec<f64> = (0..n).map(|k| [0.0, 0.1, 0.5, 0.9, 0.8, 0.4, 0.1, 0.0][k % 8]).collect();
        let load: Vec<f64> = (0..n)
            .map(|k| {
                let (a, t) = grid.unflat(k);
                (50.0 + 4.0 * a as f64) * [0.8, 0.85, 0.9, 0.95, 1.0, 1.05, 1.02, 0.9][t - 1]
            })
            .collect();
        let es = compile_es(&EsSpec::default(), &grid).unwrap();
        let dr = crate::nwa::compile_dr(&crate::nwa::DrSpec::default(), &grid).unwrap();
        let b = pv(&grid, 1e5, profile);
        let mut p = problem(grid, vec![b, es, dr], load, 2e7, 60.0);
        p.tariff = Tariff {
            energy_price: (0..n).map(|k| 30.0 + 10.0 * (k % 8) as f64).collect(),
            demand_charge: 5e4,
        };
        let opts = DwOptions {
            purge_after: 2,
            tol_gap: 1e-9,
            ..DwOptions::default()
        };
        let (plan, log) = solve_dwda_logged(&p, &opts).unwrap();
        let seq = solve_sequential(&p).unwrap();
        assert!(log.iter().any(|r| r.purged > 0), "{log:#?}");
        for w in log.windows(2) {
            assert!(w[1].master_objective <= w[0].master_objective * (1.0 + 1e-12));
        }
        assert!((seq.objective - plan.objective).abs() <= 1e-6 * seq.objective);
    }
}
