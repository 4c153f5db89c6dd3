//! Random desk-scale planning instances.

use nwa_core::capex::CapexParams;
use nwa_core::nwa::{DrSpec, EeSpec, EsSpec, NwaSpec, PvSpec};
use nwa_core::{Discount, SystemModel, Tariff, TimeGrid};
use rand::seq::SliceRandom;
use rand::Rng;

/// A random instance with at most 3 years, 8 periods and 2 NWAs, plus a
/// protection level drawn from {0, 0.5, 1}.
pub fn random_model(rng: &mut impl Rng) -> (SystemModel, f64) {
    let n_years = rng.gen_range(1..=3);
    let n_periods = rng.gen_range(2..=8);
    let grid = TimeGrid::new(n_years, n_periods, 1.0).unwrap();
    let cells = grid.len();

    let shape: Vec<f64> = (0..n_periods).map(|_| rng.gen_range(0.75..1.0)).collect();
    let peak = rng.gen_range(50.0..58.0);
    let growth = rng.gen_range(0.0..0.08);
    let base_load: Vec<f64> = (0..cells)
        .map(|k| {
            let (a, t) = grid.unflat(k);
            peak * shape[t - 1] * (1.0f64 + growth).powi(a as i32 - 1) * rng.gen_range(0.99..1.01)
        })
        .collect();
    let load_deviation = if rng.gen_bool(0.5) {
        base_load.iter().map(|l| l * rng.gen_range(0.0..0.05)).collect()
    } else {
        Vec::new()
    };
    let solar: Vec<f64> = (0..n_periods).map(|_| rng.gen_range(0.0..1.0)).collect();

    let mut kinds = vec![0, 1, 2, 3];
    kinds.shuffle(rng);
    let n_blocks = rng.gen_range(0..=2);
    let nwas = kinds[..n_blocks]
        .iter()
        .map(|&kind| match kind {
            0 => {
                let profile: Vec<f64> = (0..cells).map(|k| solar[grid.unflat(k).1 - 1]).collect();
                let profile_deviation = if rng.gen_bool(0.5) {
                    profile.iter().map(|p| p.min(1.0 - p).min(0.1) * rng.gen_range(0.0..1.0)).collect()
                } else {
                    Vec::new()
                };
                NwaSpec::Pv(PvSpec {
                    capacity_cost: rng.gen_range(5e4..5e5),
                    max_capacity: rng.gen_range(5.0..15.0),
                    profile,
                    profile_deviation,
                })
            }
            1 => {
                let c1 = rng.gen_range(1e4..1e5);
                NwaSpec::Ee(EeSpec {
                    segment_sizes: vec![rng.gen_range(1.0..3.0), rng.gen_range(1.0..4.0)],
                    segment_costs: vec![c1, c1 * rng.gen_range(1.0..4.0)],
                    accuracy: (0..cells).map(|_| rng.gen_range(0.9..1.1)).collect(),
                    accuracy_deviation: if rng.gen_bool(0.5) {
                        (0..cells).map(|_| rng.gen_range(0.0..0.1)).collect()
                    } else {
                        Vec::new()
                    },
                    base_year_load: base_load[..n_periods].to_vec(),
                })
            }
            2 => NwaSpec::Dr(DrSpec {
                capacity_cost: rng.gen_range(1e4..1e5),
                max_capacity: rng.gen_range(2.0..8.0),
                rebound: rng.gen_range(1.0..1.2),
            }),
            _ => NwaSpec::Es(EsSpec {
                energy_cost: rng.gen_range(5e3..5e4),
                max_capacity: rng.gen_range(10.0..30.0),
                eta_c: rng.gen_range(0.9..1.0),
                eta_d: rng.gen_range(0.9..1.0),
                degradation: rng.gen_range(0.0..0.03),
                epr: rng.gen_range(1.0..4.0),
            }),
        })
        .collect();

    let model = SystemModel {
        grid,
        capex: CapexParams::new(
            rng.gen_range(1e6..5e7),
            rng.gen_range(52.0..62.0),
            Discount::new(rng.gen_range(0.03..0.1)).unwrap(),
        )
        .unwrap(),
        tariff: Tariff {
            energy_price: (0..cells).map(|_| rng.gen_range(30.0..120.0)).collect(),
            demand_charge: rng.gen_range(0.0..1e5),
        },
        nwas,
        base_load,
        load_deviation,
    };
    let gamma = [0.0, 0.5, 1.0][rng.gen_range(0..3)];
    (model, gamma)
}
