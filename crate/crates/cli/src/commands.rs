//! The subcommands.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nwa_core::assess::{self, Assessment, GammaSweep, SweepPoint};
use nwa_core::capex::{capex_year, lemma1_min, present_cost};
use nwa_core::config::{self, Study};
use nwa_core::plan::{self, DwOptions, Plan, Technique};
use nwa_core::scenario::{synthesize_load, synthesize_pv, SyntheticLoad, SyntheticPv};
use nwa_core::nwa::NwaSpec;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::output::{emit_json, num, to_value, write_json, write_json_lines, Csv};
use crate::{AssessArgs, CapexArgs, PlanArgs, SweepArgs, SynthArgs, SynthKind};

fn load_study(path: &Path) -> Result<Study> {
    Ok(config::load(path)?)
}

/// Solves the planning problem and returns the plan with its iteration log.
fn solve(study: &Study, gamma: f64, technique: Technique) -> Result<(Plan, Vec<Value>)> {
    let p = study.model.problem(gamma)?;
    Ok(match technique {
        Technique::Dwda => {
            let (plan, log) = plan::solve_dwda_logged(&p, &DwOptions::default())?;
            let log = log.iter().map(to_value).collect::<Result<_>>()?;
            (plan, log)
        }
        Technique::Sequential => {
            let (plan, log) = plan::solve_sequential_logged(&p)?;
            let log = log.iter().map(to_value).collect::<Result<_>>()?;
            (plan, log)
        }
    })
}

pub fn plan(a: &PlanArgs) -> Result<()> {
    let study = load_study(&a.config)?;
    let gamma = a.gamma.unwrap_or(study.gamma());
    let (plan, log) = solve(&study, gamma, a.technique.into())?;
    log::info!(
        "expansion year {} objective {} in {:.3} s",
        plan.delta,
        plan.objective,
        plan.wall_time.as_secs_f64()
    );
    emit_json(a.out.as_deref(), &plan)?;
    let log_path = a
        .log
        .clone()
        .or_else(|| a.out.as_ref().map(|o| o.with_extension("log.jsonl")));
    if let Some(path) = log_path {
        write_json_lines(&path, &log)?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct PeakRow {
    year: usize,
    value: f64,
}

#[derive(Debug, Serialize)]
struct CapexReport {
    limit: f64,
    delta: usize,
    present_cost: f64,
    lemma1_delta: usize,
    lemma1_cost: f64,
    lemma1_agrees: bool,
}

pub fn capex(a: &CapexArgs) -> Result<()> {
    let study = load_study(&a.config)?;
    let peaks = read_peaks(&a.peaks)?;
    let p = study.model.capex;
    let delta = capex_year(&peaks, p.limit);
    let cost = present_cost(&p, delta, peaks.len())?;
    let (lemma_delta, lemma_cost) = lemma1_min(&peaks, &p);
    let report = CapexReport {
        limit: p.limit,
        delta,
        present_cost: cost,
        lemma1_delta: lemma_delta,
        lemma1_cost: lemma_cost,
        lemma1_agrees: lemma_delta == delta && lemma_cost == cost,
    };
    emit_json(None, &report)
}

fn read_peaks(path: &Path) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut peaks = Vec::new();
    for (i, row) in rdr.deserialize::<PeakRow>().enumerate() {
        let line = i + 2;
        let row = row.with_context(|| format!("{}:{line}", path.display()))?;
        if row.year != i + 1 {
            bail!("{}:{line}: expected year {}, found {}", path.display(), i + 1, row.year);
        }
        if !row.value.is_finite() {
            bail!("{}:{line}: peak {} is not finite", path.display(), row.value);
        }
        peaks.push(row.value);
    }
    Ok(peaks)
}

fn read_plan(path: &Path) -> Result<Plan> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing plan {}", path.display()))
}

pub fn assess(a: &AssessArgs, seed: Option<u64>) -> Result<()> {
    let study = load_study(&a.config)?;
    let plan = read_plan(&a.plan)?;
    let sets = study.require_sets()?;
    let cfg = study.config.assess;
    let result = assess::monte_carlo(
        &study.model,
        &plan,
        sets,
        a.draws.unwrap_or(cfg.n_draws),
        a.voll.unwrap_or(cfg.voll),
        seed.unwrap_or(cfg.seed),
    )?;
    match &a.out {
        Some(dir) => {
            create_dir(dir)?;
            write_json(&dir.join("assessment.json"), &result)?;
            let path = dir.join("assessment.csv");
            let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            result.write_csv(file)?;
            emit_json(None, &result.summary)
        }
        None => emit_json(None, &result.summary),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

#[derive(Debug, Serialize)]
struct SweepReport<'a> {
    technique: Technique,
    n_draws: usize,
    seed: u64,
    sweep: &'a GammaSweep,
    voll_curve: &'a [VollPoint],
    plans: &'a [Plan],
}

#[derive(Debug, Serialize)]
struct VollPoint {
    voll: f64,
    best_gamma: f64,
}

pub fn sweep(a: &SweepArgs, seed: Option<u64>) -> Result<()> {
    if a.gammas.is_empty() {
        bail!("--gammas needs at least one protection level");
    }
    let study = load_study(&a.config)?;
    let sets = study.require_sets()?;
    let cfg = study.config.assess;
    let n = a.draws.unwrap_or(cfg.n_draws);
    let voll = a.voll.unwrap_or(cfg.voll);
    let seed = seed.unwrap_or(cfg.seed);
    let technique: Technique = a.technique.into();

    let plans = assess::plan_for_gammas(&study.model, &a.gammas, technique)?;
    let assessments: Vec<Assessment> = plans
        .iter()
        .map(|p| {
            assess::monte_carlo(&study.model, p, sets, n, voll, seed)
                .with_context(|| format!("assessing protection level {}", p.gamma))
        })
        .collect::<Result<_>>()?;
    let points: Vec<SweepPoint> = plans
        .iter()
        .zip(&assessments)
        .map(|(p, r)| SweepPoint {
            gamma: p.gamma,
            delta: p.delta,
            plan_objective: p.objective,
            expected_total_cost: r.summary.mean_total_cost,
            stddev_total_cost: r.summary.stddev_total_cost,
            expected_lost_load_cost: r.summary.mean_lost_load_cost,
            mean_shed_fraction: r.summary.mean_shed_fraction,
        })
        .collect();
    let sweep = GammaSweep {
        voll,
        best_gamma: assess::select_gamma(&points),
        points,
    };
    let voll_curve = a
        .voll_grid
        .iter()
        .map(|&v| {
            let s = assess::assess_plans(&study.model, &plans, sets, n, v, seed)?;
            Ok(VollPoint {
                voll: v,
                best_gamma: s.best_gamma,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    create_dir(&a.out)?;
    write_json(
        &a.out.join("sweep.json"),
        &SweepReport {
            technique,
            n_draws: n,
            seed,
            sweep: &sweep,
            voll_curve: &voll_curve,
            plans: &plans,
        },
    )?;
    write_sweep_csvs(&a.out, &study, &plans, &assessments, &sweep, &voll_curve)?;
    emit_json(None, &sweep)
}

/// Plot-ready tables: cost and timing versus the protection level, the
/// installed capacities, the shed distribution and the best protection
/// level versus VOLL.
fn write_sweep_csvs(
    dir: &Path,
    study: &Study,
    plans: &[Plan],
    assessments: &[Assessment],
    sweep: &GammaSweep,
    voll_curve: &[VollPoint],
) -> Result<()> {
    let mut c = Csv::create(
        &dir.join("cost_vs_gamma.csv"),
        &[
            "gamma",
            "delta",
            "plan_objective",
            "op_cost",
            "invest_cost",
            "demand_charge",
            "capex_present_cost",
            "expected_total_cost",
            "stddev_total_cost",
            "expected_lost_load_cost",
            "mean_shed_fraction_pct",
        ],
    )?;
    for (p, pt) in plans.iter().zip(&sweep.points) {
        let b = p.breakdown;
        c.row(&[
            num(p.gamma),
            p.delta.to_string(),
            num(p.objective),
            num(b.op_cost),
            num(b.invest_cost),
            num(b.demand_charge),
            num(b.capex_present_cost),
            num(pt.expected_total_cost),
            num(pt.stddev_total_cost),
            num(pt.expected_lost_load_cost),
            num(pt.mean_shed_fraction),
        ])?;
    }
    c.finish()?;

    let mut c = Csv::create(&dir.join("capacities.csv"), &["gamma", "nwa", "capacity", "value"])?;
    for p in plans {
        for (inv, spec) in p.investments.iter().zip(&study.model.nwas) {
            for (label, v) in capacity_labels(spec, &inv.invest) {
                c.row(&[num(p.gamma), inv.name.clone(), label, num(v)])?;
            }
        }
    }
    c.finish()?;

    let mut c = Csv::create(&dir.join("shed_distribution.csv"), &["gamma", "draw", "shed_fraction_pct"])?;
    for (p, r) in plans.iter().zip(assessments) {
        for rec in &r.records {
            c.row(&[num(p.gamma), rec.draw.draw.to_string(), num(rec.result.shed_fraction)])?;
        }
    }
    c.finish()?;

    let mut c = Csv::create(&dir.join("gamma_vs_voll.csv"), &["voll", "best_gamma"])?;
    for v in voll_curve {
        c.row(&[num(v.voll), num(v.best_gamma)])?;
    }
    c.finish()
}

/// Human-readable names of a block's investment variables.
fn capacity_labels(spec: &NwaSpec, invest: &[f64]) -> Vec<(String, f64)> {
    let name = |i: usize| match spec {
        NwaSpec::Ee(_) => format!("segment_{}_pct", i + 1),
        NwaSpec::Pv(_) => "capacity_mw".to_string(),
        NwaSpec::Dr(_) => "capacity_mw".to_string(),
        NwaSpec::Es(_) => "energy_mwh".to_string(),
    };
    invest.iter().enumerate().map(|(i, &v)| (name(i), v)).collect()
}

pub fn synth(a: &SynthArgs, seed: Option<u64>) -> Result<()> {
    let study = load_study(&a.config)?;
    let m = &study.model;
    let grid = m.grid;
    let seed = seed.unwrap_or(study.config.assess.seed);
    let set = match a.kind {
        SynthKind::Load => {
            let params = SyntheticLoad {
                shape: m.base_load[..grid.n_periods].to_vec(),
                growth: (a.growth_min, a.growth_max),
                noise: a.noise,
            };
            synthesize_load(grid, &params, a.n, seed)?
        }
        SynthKind::Pv => {
            let profile = m
                .nwas
                .iter()
                .find_map(|s| match s {
                    NwaSpec::Pv(pv) => Some(pv.profile[..grid.n_periods].to_vec()),
                    _ => None,
                })
                .context("synthetic PV scenarios need a PV section (nwa.pv) for the clear-sky profile")?;
            let params = SyntheticPv {
                profile,
                cloudiness: a.cloudiness,
                noise: a.noise,
            };
            synthesize_pv(grid, &params, a.n, seed)?
        }
    };
    let out: PathBuf = a.out.clone();
    let file = std::fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
    set.write_csv(file)?;
    Ok(())
}
