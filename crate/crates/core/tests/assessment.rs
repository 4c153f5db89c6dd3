use std::path::PathBuf;

use nwa_core::assess;
use nwa_core::config::{self, Study};
use nwa_core::plan::{self, Technique};

fn desk_example() -> Study {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/desk_example/config.json");
    config::load(path).expect("bundled example loads")
}

#[test]
fn unprotected_plan_sheds_and_protected_plan_does_not() {
    let study = desk_example();
    let sets = study.require_sets().unwrap();
    let voll = study.config.assess.voll;
    let mut shed = Vec::new();
    for gamma in [0.0, 1.0] {
        let p = study.model.problem(gamma).unwrap();
        let plan = plan::solve_sequential(&p).unwrap();
        let a = assess::monte_carlo(&study.model, &plan, sets, 300, voll, 11).unwrap();
        assert_eq!(a.records.len(), 300);
        shed.push(a.summary.draws_with_shed);
    }
    assert!(shed[0] > 0, "nominal plan never sheds");
    assert_eq!(shed[1], 0, "protected plan sheds");
}

#[test]
fn assessment_is_reproducible_for_a_seed() {
    let study = desk_example();
    let sets = study.require_sets().unwrap();
    let plan = plan::solve_sequential(&study.model.problem(0.5).unwrap()).unwrap();
    let run = |seed| assess::monte_carlo(&study.model, &plan, sets, 50, 1e4, seed).unwrap().summary;
    let (a, b) = (run(3), run(3));
    assert_eq!(a.mean_total_cost.to_bits(), b.mean_total_cost.to_bits());
    assert_eq!(a.mean_shed_fraction.to_bits(), b.mean_shed_fraction.to_bits());
}

#[test]
fn sweep_selects_a_listed_level() {
    let study = desk_example();
    let sets = study.require_sets().unwrap();
    let gammas = [0.0, 0.5, 1.0];
    let (sweep, plans) =
        assess::gamma_sweep(&study.model, &gammas, Technique::Sequential, sets, 100, 1e4, 5).unwrap();
    assert_eq!(plans.len(), gammas.len());
    assert_eq!(sweep.points.len(), gammas.len());
    assert!(gammas.contains(&sweep.best_gamma));
    let best = sweep
        .points
        .iter()
        .map(|p| p.expected_total_cost)
        .fold(f64::INFINITY, f64::min);
    let chosen = sweep.points.iter().find(|p| p.gamma == sweep.best_gamma).unwrap();
    assert!(chosen.expected_total_cost <= best + 1e-9 * best.abs());
}
