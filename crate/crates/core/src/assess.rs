//! Monte Carlo assessment of a fixed plan and protection-level selection.
//!
//! Each draw combines one load scenario with (optionally) one PV and one EE
//! accuracy scenario. The plan's investments are frozen and a single LP over
//! the whole horizon dispatches the NWAs with perfect foresight of the draw.
//! Load that cannot be served under the pre-expansion limit is shed at the
//! value of lost load (VOLL); after the expansion year no limit applies.
//! Perfect foresight makes the reported costs an optimistic bound on what a
//! real-time controller would achieve.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lp::{self, Sense, SparseLp};
use crate::model::SystemModel;
use crate::nwa::{NwaBlock, NwaSpec};
use crate::plan::{self, Plan, Technique};
use crate::scenario::{sample_indices, ScenarioKind, ScenarioSet};
use crate::timegrid::TimeGrid;
use crate::{Error, Result};

/// Default value of lost load, $/MWh.
pub const DEFAULT_VOLL: f64 = 10_000.0;

/// Cost per MWh of shed load used in the dispatch objective when the VOLL
/// is (near) zero, so that no load is shed without need.
const SHED_FLOOR: f64 = 1e-3;

/// One joint realization of the uncertain inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    /// Base load per (year, period), MW.
    pub load: Vec<f64>,
    /// PV availability per (year, period); `None` keeps the nominal profile.
    pub pv_profile: Option<Vec<f64>>,
    /// EE accuracy per (year, period); `None` keeps the nominal accuracy.
    pub ee_accuracy: Option<Vec<f64>>,
}

/// The scenario sets a plan is assessed against.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSets {
    pub load: ScenarioSet,
    pub pv: Option<ScenarioSet>,
    pub ee: Option<ScenarioSet>,
}

impl ScenarioSets {
    pub fn new(load: ScenarioSet, pv: Option<ScenarioSet>, ee: Option<ScenarioSet>) -> Result<Self> {
        let sets = ScenarioSets { load, pv, ee };
        sets.validate()?;
        Ok(sets)
    }

    pub fn validate(&self) -> Result<()> {
        let expect = |set: &ScenarioSet, kind: ScenarioKind| -> Result<()> {
            set.validate()?;
            if set.kind != kind {
                return Err(Error::config(format!("expected {kind} scenarios, got {}", set.kind)));
            }
            if set.grid != self.load.grid {
                return Err(Error::config(format!("{kind} scenarios use a different time grid")));
            }
            if set.is_empty() {
                return Err(Error::config(format!("no {kind} scenarios")));
            }
            Ok(())
        };
        expect(&self.load, ScenarioKind::Load)?;
        if let Some(s) = &self.pv {
            expect(s, ScenarioKind::PvProfile)?;
        }
        if let Some(s) = &self.ee {
            expect(s, ScenarioKind::EeAccuracy)?;
        }
        Ok(())
    }

    /// `n` draws, each picking one scenario per set uniformly with
    /// replacement. Deterministic under `seed`.
    pub fn draw(&self, n: usize, seed: u64) -> Vec<Draw> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let load = sample_indices(self.load.len(), n, &mut rng);
        let pv = self.pv.as_ref().map(|s| sample_indices(s.len(), n, &mut rng));
        let ee = self.ee.as_ref().map(|s| sample_indices(s.len(), n, &mut rng));
        (0..n)
            .map(|i| Draw {
                draw: i,
                load_scenario: load[i],
                pv_scenario: pv.as_ref().map(|v| v[i]),
                ee_scenario: ee.as_ref().map(|v| v[i]),
            })
            .collect()
    }

    /// The realization a draw stands for.
    pub fn realization(&self, d: &Draw) -> Realization {
        Realization {
            load: self.load.scenarios[d.load_scenario].clone(),
            pv_profile: self.pv.as_ref().zip(d.pv_scenario).map(|(s, i)| s.scenarios[i].clone()),
            ee_accuracy: self.ee.as_ref().zip(d.ee_scenario).map(|(s, i)| s.scenarios[i].clone()),
        }
    }
}

/// Scenario indices of one Monte Carlo draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Draw {
    pub draw: usize,
    pub load_scenario: usize,
    pub pv_scenario: Option<usize>,
    pub ee_scenario: Option<usize>,
}

/// Costs and shedding of one dispatched realization. All money is present
/// value in $.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispatchRecord {
    /// NWA operating cost including the energy cost of the load they shift.
    pub op_cost: f64,
    pub invest_cost: f64,
    /// Demand charges on the yearly peaks of the net load (before shedding).
    pub demand_charge: f64,
    pub capex_present_cost: f64,
    /// Discounted VOLL times the shed energy.
    pub lost_load_cost: f64,
    /// Shed energy, MWh.
    pub shed_energy: f64,
    /// Shed energy as a percentage of the base-load energy.
    pub shed_fraction: f64,
    pub total_cost: f64,
}

/// A dispatch record tagged with the draw it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrawRecord {
    #[serde(flatten)]
    pub draw: Draw,
    #[serde(flatten)]
    pub result: DispatchRecord,
}

/// Dispatches one realization with the plan's investments fixed.
///
/// Minimizes NWA operating cost plus demand charges plus VOLL-priced
/// shedding, with the net load minus shed held under the limit in the
/// years `1..=delta`.
pub fn dispatch_with_shedding(
    model: &SystemModel,
    plan: &Plan,
    realization: &Realization,
    voll: f64,
) -> Result<DispatchRecord> {
    let grid = &model.grid;
    grid.check_len("realized load", realization.load.len())?;
    if let Some(p) = &realization.pv_profile {
        grid.check_len("realized PV profile", p.len())?;
    }
    if let Some(a) = &realization.ee_accuracy {
        grid.check_len("realized EE accuracy", a.len())?;
    }
    if !(voll >= 0.0 && voll.is_finite()) {
        return Err(Error::domain(format!("VOLL must be finite and >= 0, got {voll}")));
    }
    if plan.delta > grid.n_years {
        return Err(Error::config(format!(
            "plan expansion year {} outside 0..={}",
            plan.delta, grid.n_years
        )));
    }
    if plan.investments.len() != model.nwas.len()
        || plan.investments.iter().zip(&model.nwas).any(|(b, s)| b.name != s.name())
    {
        return Err(Error::config(format!(
            "plan NWAs [{}] do not match the model's [{}]",
            plan.investments.iter().map(|b| b.name.as_str()).collect::<Vec<_>>().join(", "),
            model.nwas.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ")
        )));
    }

    let d = model.capex.discount;
    let energy: Vec<f64> = (0..grid.len())
        .map(|k| d.at(grid.unflat(k).0) * model.tariff.energy_price[k] * grid.dt_hours)
        .collect();

    let mut lp = SparseLp::new();
    let mut blocks: Vec<(NwaBlock, NwaBlock, usize)> = Vec::new();
    let mut load_terms: Vec<Vec<(usize, f64)>> = vec![Vec::new(); grid.len()];
    for (spec, inv) in model.nwas.iter().zip(&plan.investments) {
        let block = realized_block(spec, grid, realization)
            .map_err(|e| e.context(format!("NWA {}", spec.name())))?;
        if inv.invest.len() != block.n_invest_vars {
            return Err(Error::config(format!(
                "plan has {} investment values for {}, expected {}",
                inv.invest.len(),
                spec.name(),
                block.n_invest_vars
            )));
        }
        let priced = block.with_load_cost(&energy);
        let off = lp.n_vars;
        for (j, (&(lo, hi), &c)) in priced.bounds.iter().zip(&priced.objective(None)).enumerate() {
            if j < block.n_invest_vars {
                let v = inv.invest[j].clamp(lo, hi);
                lp.add_var(c, v, v);
            } else {
                lp.add_var(c, lo, hi);
            }
        }
        for row in &priced.rows {
            lp.add_row(
                row.coeffs.iter().map(|&(j, a)| (off + j, a)).collect(),
                row.sense,
                row.rhs,
            );
        }
        for (cell, terms) in priced.load_map.iter().enumerate() {
            load_terms[cell].extend(terms.iter().map(|&(j, a)| (off + j, a)));
        }
        blocks.push((block, priced, off));
    }

    let peak0 = lp.n_vars;
    for a in grid.years() {
        lp.add_var(d.at(a) * model.tariff.demand_charge, 0.0, f64::INFINITY);
    }
    let shed_weight = voll.max(SHED_FLOOR);
    let mut shed_vars = Vec::new();
    for cell in 0..grid.len() {
        let (a, _) = grid.unflat(cell);
        let base = realization.load[cell];
        let mut entries = load_terms[cell].clone();
        entries.push((peak0 + a - 1, -1.0));
        lp.add_row(entries, Sense::Le, -base);
        if a <= plan.delta {
            let s = lp.add_var(d.at(a) * shed_weight * grid.dt_hours, 0.0, base.max(0.0));
            shed_vars.push((cell, s));
            let mut entries = load_terms[cell].clone();
            entries.push((s, -1.0));
            lp.add_row(entries, Sense::Le, model.capex.limit - base);
        }
    }

    let sol = lp::solve_primal(&lp).map_err(|e| Error::from(e).context("dispatch"))?;
    match sol.status {
        lp::Status::Optimal => {}
        lp::Status::Infeasible => {
            return Err(Error::Infeasible("dispatch with fixed investments".into()));
        }
        lp::Status::Unbounded => return Err(Error::domain("dispatch LP is unbounded")),
    }
    let x = &sol.primal;

    let mut op_cost = 0.0;
    let mut invest_cost = 0.0;
    for (block, priced, off) in &blocks {
        let xb = &x[*off..*off + block.n_vars()];
        op_cost += priced.op_cost_of(xb);
        invest_cost += block.invest_cost_of(xb);
    }
    let demand_charge: f64 = grid
        .years()
        .map(|a| d.at(a) * model.tariff.demand_charge * x[peak0 + a - 1])
        .sum();
    let total_load: f64 = realization.load.iter().map(|l| l * grid.dt_hours).sum();
    let mut shed_energy = 0.0;
    let mut lost_load_cost = 0.0;
    for &(cell, s) in &shed_vars {
        let shed = if x[s] > SHED_NOISE * realization.load[cell].max(1.0) { x[s] } else { 0.0 };
        let (a, _) = grid.unflat(cell);
        shed_energy += shed * grid.dt_hours;
        lost_load_cost += d.at(a) * voll * grid.dt_hours * shed;
    }
    let shed_fraction = if total_load > 0.0 {
        (100.0 * shed_energy / total_load).clamp(0.0, 100.0)
    } else {
        0.0
    };
    let capex_present_cost = model.capex.cost_at(plan.delta);
    Ok(DispatchRecord {
        op_cost,
        invest_cost,
        demand_charge,
        capex_present_cost,
        lost_load_cost,
        shed_energy,
        shed_fraction,
        total_cost: op_cost + invest_cost + demand_charge + capex_present_cost + lost_load_cost,
    })
}

/// Shed below this fraction of the cell's load is solver round-off.
const SHED_NOISE: f64 = 1e-9;

/// The block of `spec` under `realization`. Rows whose coefficients were
/// uncertain are upper limits, as in planning (output may be curtailed).
fn realized_block(spec: &NwaSpec, grid: &TimeGrid, r: &Realization) -> Result<NwaBlock> {
    let nominal = spec.compile(grid)?;
    let mut block = spec
        .realized(r.pv_profile.as_deref(), r.ee_accuracy.as_deref())
        .compile(grid)?;
    for (row, orig) in block.rows.iter_mut().zip(&nominal.rows) {
        if orig.is_uncertain() {
            row.sense = Sense::Le;
        }
    }
    Ok(block)
}

/// Summary statistics of an assessment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean_total_cost: f64,
    /// Sample standard deviation (0 for a single draw).
    pub stddev_total_cost: f64,
    pub p05_total_cost: f64,
    pub p50_total_cost: f64,
    pub p95_total_cost: f64,
    pub mean_lost_load_cost: f64,
    pub mean_shed_energy: f64,
    pub mean_shed_fraction: f64,
    pub p95_shed_fraction: f64,
    pub max_shed_fraction: f64,
    /// Number of draws with any shedding.
    pub draws_with_shed: usize,
}

impl Summary {
    pub fn of(records: &[DrawRecord]) -> Summary {
        let n = records.len() as f64;
        let totals: Vec<f64> = records.iter().map(|r| r.result.total_cost).collect();
        let shed: Vec<f64> = records.iter().map(|r| r.result.shed_fraction).collect();
        let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / n };
        let m = mean(&totals);
        let var = if records.len() > 1 {
            totals.iter().map(|t| (t - m).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let lost: Vec<f64> = records.iter().map(|r| r.result.lost_load_cost).collect();
        let energy: Vec<f64> = records.iter().map(|r| r.result.shed_energy).collect();
        Summary {
            mean_total_cost: m,
            stddev_total_cost: var.sqrt(),
            p05_total_cost: quantile(&totals, 0.05),
            p50_total_cost: quantile(&totals, 0.5),
            p95_total_cost: quantile(&totals, 0.95),
            mean_lost_load_cost: mean(&lost),
            mean_shed_energy: mean(&energy),
            mean_shed_fraction: mean(&shed),
            p95_shed_fraction: quantile(&shed, 0.95),
            max_shed_fraction: shed.iter().copied().fold(0.0, f64::max),
            draws_with_shed: records.iter().filter(|r| r.result.shed_energy > 0.0).count(),
        }
    }
}

/// Linearly interpolated quantile (`q` in `[0, 1]`); 0 for no data.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Monte Carlo assessment of one plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub n_draws: usize,
    pub voll: f64,
    pub seed: u64,
    pub summary: Summary,
    pub records: Vec<DrawRecord>,
}

impl Assessment {
    /// One CSV row per draw.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record([
            "draw",
            "load_scenario",
            "pv_scenario",
            "ee_scenario",
            "op_cost",
            "invest_cost",
            "demand_charge",
            "capex_present_cost",
            "lost_load_cost",
            "shed_energy_mwh",
            "shed_fraction_pct",
            "total_cost",
        ])
        .map_err(io)?;
        let opt = |v: Option<usize>| v.map_or(String::new(), |i| i.to_string());
        for r in &self.records {
            let d = &r.draw;
            let x = &r.result;
            w.write_record([
                d.draw.to_string(),
                d.load_scenario.to_string(),
                opt(d.pv_scenario),
                opt(d.ee_scenario),
                fmt_sig(x.op_cost),
                fmt_sig(x.invest_cost),
                fmt_sig(x.demand_charge),
                fmt_sig(x.capex_present_cost),
                fmt_sig(x.lost_load_cost),
                fmt_sig(x.shed_energy),
                fmt_sig(x.shed_fraction),
                fmt_sig(x.total_cost),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `v` rounded to nine significant digits; used for every exported float
/// so that outputs are stable across platforms.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.8e}").parse().expect("formatted float parses")
}

/// Formats `v` with nine significant digits.
pub fn fmt_sig(v: f64) -> String {
    format!("{}", round_sig(v))
}

/// Dispatches `n` draws of `sets` against `plan`, in parallel; the result
/// does not depend on the number of threads.
pub fn monte_carlo(
    model: &SystemModel,
    plan: &Plan,
    sets: &ScenarioSets,
    n: usize,
    voll: f64,
    seed: u64,
) -> Result<Assessment> {
    if n == 0 {
        return Err(Error::domain("at least one draw is required"));
    }
    sets.validate()?;
    if sets.load.grid != model.grid {
        return Err(Error::config("scenario grid differs from the model's"));
    }
    let draws = sets.draw(n, seed);
    let records = draws
        .par_iter()
        .map(|d| {
            let result = dispatch_with_shedding(model, plan, &sets.realization(d), voll)
                .map_err(|e| e.context(format!("draw {}", d.draw)))?;
            Ok(DrawRecord { draw: *d, result })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Assessment {
        n_draws: n,
        voll,
        seed,
        summary: Summary::of(&records),
        records,
    })
}

/// One protection level of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub gamma: f64,
    pub delta: usize,
    /// Planning objective (protected cost).
    pub plan_objective: f64,
    pub expected_total_cost: f64,
    pub stddev_total_cost: f64,
    pub expected_lost_load_cost: f64,
    pub mean_shed_fraction: f64,
}

/// Expected cost as a function of the protection level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSweep {
    pub voll: f64,
    pub points: Vec<SweepPoint>,
    /// Protection level with the lowest expected total cost (ties: the
    /// larger level).
    pub best_gamma: f64,
}

/// Plans at every protection level in `gammas`, assesses each plan, and
/// selects the level with the lowest expected total cost.
#[allow(clippy::too_many_arguments)]
pub fn gamma_sweep(
    model: &SystemModel,
    gammas: &[f64],
    technique: Technique,
    sets: &ScenarioSets,
    n: usize,
    voll: f64,
    seed: u64,
) -> Result<(GammaSweep, Vec<Plan>)> {
    let plans = plan_for_gammas(model, gammas, technique)?;
    let sweep = assess_plans(model, &plans, sets, n, voll, seed)?;
    Ok((sweep, plans))
}

/// One plan per protection level.
pub fn plan_for_gammas(model: &SystemModel, gammas: &[f64], technique: Technique) -> Result<Vec<Plan>> {
    if gammas.is_empty() {
        return Err(Error::domain("the protection-level grid is empty"));
    }
    if let Some(g) = gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::domain(format!("protection level {g} outside [0, 1]")));
    }
    gammas
        .iter()
        .map(|&g| {
            let p = model.problem(g)?;
            match technique {
                Technique::Sequential => plan::solve_sequential(&p),
                Technique::Dwda => {
                    let opts = plan::DwOptions::default();
                    plan::solve_dwda(&p, opts.max_iters, opts.tol_gap)
                }
            }
            .map_err(|e| e.context(format!("planning at protection level {g}")))
        })
        .collect()
}

/// Assesses already computed plans (one per protection level) with common
/// draws and selects the cheapest level in expectation.
pub fn assess_plans(
    model: &SystemModel,
    plans: &[Plan],
    sets: &ScenarioSets,
    n: usize,
    voll: f64,
    seed: u64,
) -> Result<GammaSweep> {
    if plans.is_empty() {
        return Err(Error::domain("no plans to assess"));
    }
    let mut points = Vec::with_capacity(plans.len());
    for plan in plans {
        let a = monte_carlo(model, plan, sets, n, voll, seed)
            .map_err(|e| e.context(format!("assessing protection level {}", plan.gamma)))?;
        points.push(SweepPoint {
            gamma: plan.gamma,
            delta: plan.delta,
            plan_objective: plan.objective,
            expected_total_cost: a.summary.mean_total_cost,
            stddev_total_cost: a.summary.stddev_total_cost,
            expected_lost_load_cost: a.summary.mean_lost_load_cost,
            mean_shed_fraction: a.summary.mean_shed_fraction,
        });
    }
    let best_gamma = select_gamma(&points);
    Ok(GammaSweep {
        voll,
        points,
        best_gamma,
    })
}

/// The protection level with the lowest expected total cost; near-ties
/// (relative 1e-9) go to the larger level.
pub fn select_gamma(points: &[SweepPoint]) -> f64 {
    let mut best: Option<&SweepPoint> = None;
    for p in points {
        best = match best {
            None => Some(p),
            Some(b) => {
                let tol = 1e-9 * b.expected_total_cost.abs().max(1.0);
                if p.expected_total_cost < b.expected_total_cost - tol
                    || (p.expected_total_cost <= b.expected_total_cost + tol && p.gamma > b.gamma)
                {
                    Some(p)
                } else {
                    Some(b)
                }
            }
        };
    }
    best.map_or(f64::NAN, |p| p.gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capex::CapexParams;
    use crate::model::Tariff;
    use crate::nwa::{DrSpec, PvSpec};
    use crate::timegrid::Discount;

    fn model(grid: TimeGrid, load: Vec<f64>, nwas: Vec<NwaSpec>, limit: f64) -> SystemModel {
        SystemModel {
            grid,
            capex: CapexParams::new(1e7, limit, Discount::new(0.07).unwrap()).unwrap(),
            tariff: Tariff {
                energy_price: vec![50.0; grid.len()],
                demand_charge: 1e4,
            },
            nwas,
            base_load: load,
            load_deviation: Vec::new(),
        }
    }

    fn fixed_plan(m: &SystemModel, delta: usize, invest: Vec<Vec<f64>>) -> Plan {
        let p = m.problem(0.0).unwrap();
        let mut plan = plan::solve_sequential(&p).unwrap();
        plan.delta = delta;
        for (b, v) in plan.investments.iter_mut().zip(invest) {
            b.invest = v;
        }
        plan
    }

    fn realization(load: Vec<f64>) -> Realization {
        Realization {
            load,
            pv_profile: None,
            ee_accuracy: None,
        }
    }

    #[test]
    fn single_excursion_without_nwas_sheds_the_excess() {
        let g = TimeGrid::new(1, 1, 1.0).unwrap();
        let m = model(g, vec![62.0], vec![], 60.0);
        let plan = fixed_plan(&m, 1, vec![]);
        let r = dispatch_with_shedding(&m, &plan, &realization(vec![62.0]), 1000.0).unwrap();
        assert!((r.shed_energy - 2.0).abs() < 1e-9);
        assert!((r.lost_load_cost - 2.0 * 1000.0 / 1.07).abs() < 1e-6);
        assert!((r.shed_fraction - 100.0 * 2.0 / 62.0).abs() < 1e-9);
        let sum = r.op_cost + r.invest_cost + r.demand_charge + r.capex_present_cost + r.lost_load_cost;
        assert!((sum - r.total_cost).abs() < 1e-6);
        // after expansion nothing is shed
        let plan = fixed_plan(&m, 0, vec![]);
        let r = dispatch_with_shedding(&m, &plan, &realization(vec![62.0]), 1000.0).unwrap();
        assert_eq!(r.shed_energy, 0.0);
    }

    #[test]
    fn no_shedding_below_the_limit() {
        let g = TimeGrid::new(2, 3, 1.0).unwrap();
        let m = model(g, vec![50.0; 6], vec![], 60.0);
        let plan = fixed_plan(&m, 2, vec![]);
        let r = dispatch_with_shedding(&m, &plan, &realization(vec![55.0; 6]), 0.0).unwrap();
        assert_eq!(r.shed_energy, 0.0);
        assert_eq!(r.shed_fraction, 0.0);
    }

    #[test]
    fn large_voll_makes_demand_response_absorb_the_excursion() {
        let g = TimeGrid::new(1, 2, 1.0).unwrap();
        let dr = NwaSpec::Dr(DrSpec {
            capacity_cost: 1e3,
            max_capacity: 5.0,
            rebound: 1.1,
        });
        let m = model(g, vec![58.0, 40.0], vec![dr], 60.0);
        let plan = fixed_plan(&m, 1, vec![vec![5.0]]);
        let r = dispatch_with_shedding(&m, &plan, &realization(vec![63.0, 40.0]), 1e6).unwrap();
        assert_eq!(r.shed_energy, 0.0);
        // without demand response capacity the excursion is shed
        let plan = fixed_plan(&m, 1, vec![vec![0.0]]);
        let r = dispatch_with_shedding(&m, &plan, &realization(vec![63.0, 40.0]), 1e6).unwrap();
        assert!((r.shed_energy - 3.0).abs() < 1e-9);
    }

    #[test]
    fn pv_realization_replaces_the_nominal_profile() {
        let g = TimeGrid::new(1, 2, 1.0).unwrap();
        let pv = NwaSpec::Pv(PvSpec {
            capacity_cost: 1e3,
            max_capacity: 10.0,
            profile: vec![0.5, 0.5],
            profile_deviation: vec![0.3, 0.3],
        });
        let m = model(g, vec![62.0, 50.0], vec![pv], 60.0);
        let plan = fixed_plan(&m, 1, vec![vec![10.0]]);
        let mut r = realization(vec![62.0, 50.0]);
        r.pv_profile = Some(vec![0.2, 0.2]);
        let rec = dispatch_with_shedding(&m, &plan, &r, 1000.0).unwrap();
        assert!(rec.shed_energy.abs() < 1e-9, "{rec:?}");
        r.pv_profile = Some(vec![0.1, 0.1]);
        let rec = dispatch_with_shedding(&m, &plan, &r, 1000.0).unwrap();
        assert!((rec.shed_energy - 1.0).abs() < 1e-9, "{rec:?}");
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let g = TimeGrid::new(1, 2, 1.0).unwrap();
        let m = model(g, vec![58.0, 40.0], vec![], 60.0);
        let plan = fixed_plan(&m, 1, vec![]);
        let single = ScenarioSet::new(ScenarioKind::Load, g, vec![vec![61.0, 40.0]]).unwrap();
        let sets = ScenarioSets::new(single, None, None).unwrap();
        let a = monte_carlo(&m, &plan, &sets, 5, 100.0, 3).unwrap();
        assert_eq!(a.records.len(), 5);
        assert!(a.records.iter().all(|r| r.result == a.records[0].result));
        assert_eq!(a.summary.stddev_total_cost, 0.0);
        assert_eq!(a, monte_carlo(&m, &plan, &sets, 5, 100.0, 3).unwrap());
        assert!(matches!(monte_carlo(&m, &plan, &sets, 0, 100.0, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn quantiles_interpolate() {
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.5), 2.0);
        assert_eq!(quantile(&[0.0, 10.0], 0.25), 2.5);
        assert_eq!(quantile(&[], 0.5), 0.0);
    }

    #[test]
    fn gamma_selection_prefers_cheaper_then_larger() {
        let pt = |gamma, cost| SweepPoint {
            gamma,
            delta: 0,
            plan_objective: 0.0,
            expected_total_cost: cost,
            stddev_total_cost: 0.0,
            expected_lost_load_cost: 0.0,
            mean_shed_fraction: 0.0,
        };
        assert_eq!(select_gamma(&[pt(0.0, 5.0), pt(0.5, 3.0), pt(1.0, 4.0)]), 0.5);
        assert_eq!(select_gamma(&[pt(0.0, 3.0), pt(1.0, 3.0)]), 1.0);
        assert_eq!(select_gamma(&[pt(0.25, 1.0)]), 0.25);
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig(123456789012.0), "123456789000");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(2.5), "2.5");
    }
}
