//! Brute-force planning oracle.
//!
//! Formulates the joint planning LP for each expansion year directly from
//! the technology specifications, with the worst-case coefficients written
//! out explicitly (no block compiler and no robust transformation), solves
//! every year and keeps the cheapest (ties: the later year).

use nwa_core::lp::{self, Sense, SparseLp, Status};
use nwa_core::nwa::NwaSpec;
use nwa_core::SystemModel;

pub struct OracleResult {
    pub delta: usize,
    pub objective: f64,
    /// Objective of every expansion year; `None` if infeasible.
    pub by_year: Vec<Option<f64>>,
}

pub fn solve(m: &SystemModel, gamma: f64) -> OracleResult {
    let by_year: Vec<Option<f64>> = (0..=m.grid.n_years).map(|j| solve_year(m, gamma, j)).collect();
    let mut best: Option<(usize, f64)> = None;
    for (j, v) in by_year.iter().enumerate() {
        if let Some(v) = *v {
            if best.map_or(true, |(_, b)| v <= b + 1e-9 * b.abs().max(1.0)) {
                best = Some((j, v));
            }
        }
    }
    let (delta, objective) = best.expect("expanding immediately is always possible");
    OracleResult {
        delta,
        objective,
        by_year,
    }
}

fn disc(rho: f64, a: usize) -> f64 {
    (1.0 + rho).powi(-(a as i32))
}

/// Optimal total cost with the limit binding in years `1..=j`.
pub fn solve_year(m: &SystemModel, gamma: f64, j: usize) -> Option<f64> {
    let g = m.grid;
    let cells = g.n_years * g.n_periods;
    let rho = m.capex.discount.rho;
    let cell_year = |k: usize| k / g.n_periods + 1;
    let cell_period = |k: usize| k % g.n_periods + 1;
    let energy = |k: usize| disc(rho, cell_year(k)) * m.tariff.energy_price[k] * g.dt_hours;

    let mut lp = SparseLp::new();
    // net NWA load per cell as a list of (variable, coefficient)
    let mut load: Vec<Vec<(usize, f64)>> = vec![Vec::new(); cells];

    for spec in &m.nwas {
        match spec {
            NwaSpec::Pv(s) => {
                let cap = lp.add_var(s.capacity_cost, 0.0, s.max_capacity);
                for k in 0..cells {
                    let dev = s.profile_deviation.get(k).copied().unwrap_or(0.0);
                    let avail = s.profile[k] - gamma * dev;
                    let gen = lp.add_var(-energy(k), 0.0, f64::INFINITY);
                    lp.add_row(vec![(gen, 1.0), (cap, -avail)], Sense::Le, 0.0);
                    load[k].push((gen, -1.0));
                }
            }
            NwaSpec::Ee(s) => {
                let eps: Vec<usize> = s
                    .segment_sizes
                    .iter()
                    .zip(&s.segment_costs)
                    .map(|(&size, &c)| lp.add_var(c, 0.0, size))
                    .collect();
                for k in 0..cells {
                    let dev = s.accuracy_deviation.get(k).copied().unwrap_or(0.0);
                    let acc = s.accuracy[k] - gamma * dev;
                    let base = s.base_year_load[cell_period(k) - 1] / 100.0;
                    let r = lp.add_var(-energy(k), f64::NEG_INFINITY, f64::INFINITY);
                    let mut e = vec![(r, 1.0)];
                    e.extend(eps.iter().map(|&v| (v, -acc * base)));
                    lp.add_row(e, Sense::Le, 0.0);
                    load[k].push((r, -1.0));
                }
            }
            NwaSpec::Dr(s) => {
                let cap = lp.add_var(s.capacity_cost, 0.0, s.max_capacity);
                let mut prev: Option<usize> = None;
                for k in 0..cells {
                    let t = cell_period(k);
                    let hi = if t == g.n_periods { 0.0 } else { f64::INFINITY };
                    // cost of −r now and +rebound·r next period
                    let next_w = if t < g.n_periods { energy(k + 1) } else { 0.0 };
                    let r = lp.add_var(-energy(k) + s.rebound * next_w, 0.0, hi);
                    lp.add_row(vec![(r, 1.0), (cap, -1.0)], Sense::Le, 0.0);
                    load[k].push((r, -1.0));
                    if t > 1 {
                        load[k].push((prev.unwrap(), s.rebound));
                    }
                    prev = Some(r);
                }
            }
            NwaSpec::Es(s) => {
                let s0 = lp.add_var(s.energy_cost, 0.0, s.max_capacity);
                let caps: Vec<usize> =
                    (0..g.n_years).map(|_| lp.add_var(0.0, 0.0, f64::INFINITY)).collect();
                let mut throughput: Vec<(usize, f64)> = Vec::new();
                for a in 1..=g.n_years {
                    // usable capacity: nameplate minus degradation of prior years
                    let mut row = vec![(caps[a - 1], 1.0), (s0, -1.0)];
                    row.extend(throughput.iter().map(|&(v, w)| (v, w)));
                    lp.add_row(row, Sense::Eq, 0.0);
                    let mut soc_prev: Option<usize> = None;
                    for t in 1..=g.n_periods {
                        let k = (a - 1) * g.n_periods + t - 1;
                        let c = lp.add_var(energy(k), 0.0, f64::INFINITY);
                        let d = lp.add_var(-energy(k), 0.0, f64::INFINITY);
                        let soc = lp.add_var(0.0, 0.0, f64::INFINITY);
                        let mut bal = vec![
                            (soc, 1.0),
                            (c, -g.dt_hours * s.eta_c),
                            (d, g.dt_hours / s.eta_d),
                        ];
                        if let Some(sp) = soc_prev {
                            bal.push((sp, -1.0));
                        }
                        lp.add_row(bal, Sense::Eq, 0.0);
                        lp.add_row(vec![(soc, 1.0), (caps[a - 1], -1.0)], Sense::Le, 0.0);
                        lp.add_row(vec![(c, 1.0), (s0, -1.0 / s.epr)], Sense::Le, 0.0);
                        lp.add_row(vec![(d, 1.0), (s0, -1.0 / s.epr)], Sense::Le, 0.0);
                        load[k].push((c, 1.0));
                        load[k].push((d, -1.0));
                        soc_prev = Some(soc);
                        throughput.push((c, s.degradation * g.dt_hours));
                        throughput.push((d, s.degradation * g.dt_hours));
                    }
                }
            }
        }
    }

    let peaks: Vec<usize> = (1..=g.n_years)
        .map(|a| {
            let hi = if a <= j { m.capex.limit } else { f64::INFINITY };
            lp.add_var(disc(rho, a) * m.tariff.demand_charge, 0.0, hi)
        })
        .collect();
    for k in 0..cells {
        let dev = m.load_deviation.get(k).copied().unwrap_or(0.0);
        let worst = m.base_load[k] + gamma * dev;
        let mut row: Vec<(usize, f64)> = Vec::new();
        for &(v, c) in &load[k] {
            match row.iter_mut().find(|e| e.0 == v) {
                Some(e) => e.1 += c,
                None => row.push((v, c)),
            }
        }
        row.push((peaks[cell_year(k) - 1], -1.0));
        lp.add_row(row, Sense::Le, -worst);
    }

    let sol = lp::solve(&lp).expect("oracle LP solves");
    match sol.status {
        Status::Optimal => Some(sol.objective_value + m.capex.cost * disc(rho, j)),
        Status::Infeasible => None,
        Status::Unbounded => panic!("oracle LP unbounded"),
    }
}
