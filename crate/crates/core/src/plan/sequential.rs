//! Sequential technique: solve `P(0), P(1), …` in order and stop as soon
//! as the objective rises or `P(j)` turns infeasible.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{solve_fixed_delta, FixedDeltaSolution, Plan, PlanningProblem, Technique, TIE_TOL};
use crate::{Error, Result};

/// One evaluated expansion year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequentialStep {
    pub delta: usize,
    /// `None` if `P(delta)` is infeasible.
    pub objective: Option<f64>,
    pub lp_iterations: usize,
}

pub fn solve_sequential(p: &PlanningProblem) -> Result<Plan> {
    Ok(solve_sequential_logged(p)?.0)
}

/// Like [`solve_sequential`], also returning every evaluated `P(j)`.
///
/// The walk relies on the objective being unimodal in `j`: it stops at the
/// first increase. Equal objectives prefer the later year.
pub fn solve_sequential_logged(p: &PlanningProblem) -> Result<(Plan, Vec<SequentialStep>)> {
    let start = Instant::now();
    let mut steps = Vec::new();
    let mut best: Option<FixedDeltaSolution> = None;
    let mut prev: Option<f64> = None;
    for j in 0..=p.grid.n_years {
        let sol = solve_fixed_delta(p, j)?;
        steps.push(SequentialStep {
            delta: j,
            objective: sol.as_ref().map(|s| s.objective()),
            lp_iterations: sol.as_ref().map_or(0, |s| s.iterations),
        });
        let Some(sol) = sol else {
            log::debug!("P({j}) infeasible; stopping");
            break;
        };
        let obj = sol.objective();
        log::debug!("P({j}) = {obj}");
        if let Some(pv) = prev {
            if obj > pv + TIE_TOL * pv.abs().max(1.0) {
                break;
            }
        }
        prev = Some(obj);
        let better = best
            .as_ref()
            .map_or(true, |b| obj <= b.objective() + TIE_TOL * b.objective().abs().max(1.0));
        if better {
            best = Some(sol);
        }
    }
    let best = best.ok_or_else(|| {
        Error::Infeasible("the planning problem is infeasible even with immediate expansion".into())
    })?;
    let plan = Plan::assemble(
        p,
        Technique::Sequential,
        &best.block_vars,
        best.yearly_peaks.clone(),
        best.delta,
        steps.len(),
        0.0,
        start.elapsed(),
    );
    Ok((plan, steps))
}

#[cfg(test)]
mod tests {
    use super::super::tests::problem;
    use super::*;
    use crate::nwa::{compile_pv, PvSpec};
    use crate::timegrid::{Discount, TimeGrid};

    #[test]
    fn no_blocks_crossing_after_year_nine() {
        let grid = TimeGrid::new(12, 1, 1.0).unwrap();
        let load: Vec<f64> = (1..=12).map(|a| 50.0 + a as f64).collect();
        let p = problem(grid, vec![], load, 1e8, 59.5);
        let plan = solve_sequential(&p).unwrap();
        assert_eq!(plan.delta, 9);
        let d = Discount::new(0.07).unwrap();
        assert!((plan.breakdown.capex_present_cost - 1e8 * d.at(9)).abs() < 1e-6);
        let charges: f64 = (1..=12).map(|a| 1e4 * (50.0 + a as f64) * d.at(a)).sum();
        assert!((plan.objective - charges - 1e8 * d.at(9)).abs() < 1e-5);
        assert!(!plan.expansion_at_horizon_end);
    }

    #[test]
    fn free_expansion_still_deferred_to_latest_feasible_year() {
        let grid = TimeGrid::new(4, 1, 1.0).unwrap();
        let p = problem(grid, vec![], vec![50.0, 55.0, 61.0, 62.0], 0.0, 60.0);
        let plan = solve_sequential(&p).unwrap();
        assert_eq!(plan.delta, 2);
        assert_eq!(plan.breakdown.capex_present_cost, 0.0);
    }

    #[test]
    fn enough_pv_avoids_crossing() {
        let grid = TimeGrid::new(3, 1, 1.0).unwrap();
        let pv = compile_pv(
            &PvSpec {
                capacity_cost: 1.0,
                max_capacity: 20.0,
                profile: vec![0.5; 3],
                profile_deviation: vec![],
            },
            &grid,
        )
        .unwrap();
        let p = problem(grid, vec![pv], vec![58.0, 62.0, 65.0], 1e8, 60.0);
        let plan = solve_sequential(&p).unwrap();
        assert_eq!(plan.delta, 3);
        assert!(plan.expansion_at_horizon_end);
        assert!(plan.yearly_peaks.iter().all(|&l| l <= 60.0 + 1e-9));
    }
}
