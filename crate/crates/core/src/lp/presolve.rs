//! Primal-only presolve: removes fixed columns, empty rows and singleton rows.

use super::simplex::solve_scaled;
use super::{LpError, LpSolution, Sense, SparseLp, Status, TOL_FEAS};

const MIN_SINGLETON_COEF: f64 = 1e-9;

pub(super) fn solve_presolved(lp: &SparseLp) -> Result<LpSolution, LpError> {
    let n = lp.n_vars;
    let m = lp.rows.len();
    let mut lo: Vec<f64> = lp.bounds.iter().map(|b| b.0).collect();
    let mut hi: Vec<f64> = lp.bounds.iter().map(|b| b.1).collect();
    let mut active = vec![true; m];

    let infeasible = || Ok(LpSolution::without_solution(Status::Infeasible, n, 0, 0));

    loop {
        let mut changed = false;
        for (i, row) in lp.rows.iter().enumerate() {
            if !active[i] {
                continue;
            }
            let mut rhs = row.rhs;
            let mut free: Option<(usize, f64)> = None;
            let mut n_free = 0;
            for &(j, a) in &row.entries {
                if a == 0.0 {
                    continue;
                }
                if lo[j] == hi[j] {
                    rhs -= a * lo[j];
                } else {
                    n_free += 1;
                    free = Some((j, a));
                }
            }
            let tol = TOL_FEAS * row.rhs.abs().max(1.0);
            match n_free {
                0 => {
                    let ok = match row.sense {
                        Sense::Le => rhs >= -tol,
                        Sense::Eq => rhs.abs() <= tol,
                    };
                    if !ok {
                        return infeasible();
                    }
                    active[i] = false;
                    changed = true;
                }
                1 => {
                    let (j, a) = free.unwrap();
                    if a.abs() < MIN_SINGLETON_COEF {
                        continue;
                    }
                    let v = rhs / a;
                    match row.sense {
                        Sense::Le if a > 0.0 => hi[j] = hi[j].min(v),
                        Sense::Le => lo[j] = lo[j].max(v),
                        Sense::Eq => {
                            if v < lo[j] - tol || v > hi[j] + tol {
                                return infeasible();
                            }
                            let v = v.clamp(lo[j], hi[j]);
                            lo[j] = v;
                            hi[j] = v;
                        }
                    }
                    if lo[j] > hi[j] {
                        if lo[j] - hi[j] > TOL_FEAS * lo[j].abs().max(1.0) {
                            return infeasible();
                        }
                        let mid = 0.5 * (lo[j] + hi[j]);
                        lo[j] = mid;
                        hi[j] = mid;
                    }
                    active[i] = false;
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }

    let mut map = vec![usize::MAX; n];
    let mut reduced = SparseLp::new();
    let mut offset = 0.0;
    for j in 0..n {
        if lo[j] == hi[j] {
            offset += lp.objective[j] * lo[j];
        } else {
            map[j] = reduced.add_var(lp.objective[j], lo[j], hi[j]);
        }
    }
    for (i, row) in lp.rows.iter().enumerate() {
        if !active[i] {
            continue;
        }
        let mut rhs = row.rhs;
        let mut entries = Vec::with_capacity(row.entries.len());
        for &(j, a) in &row.entries {
            if map[j] == usize::MAX {
                rhs -= a * lo[j];
            } else if a != 0.0 {
                entries.push((map[j], a));
            }
        }
        reduced.add_row(entries, row.sense, rhs);
    }

    let sol = solve_scaled(&reduced)?;
    if sol.status != Status::Optimal {
        return Ok(LpSolution::without_solution(sol.status, n, 0, sol.iterations));
    }
    let primal: Vec<f64> = (0..n)
        .map(|j| {
            if map[j] == usize::MAX {
                lo[j]
            } else {
                sol.primal[map[j]]
            }
        })
        .collect();
    Ok(LpSolution {
        status: Status::Optimal,
        objective_value: sol.objective_value + offset,
        primal,
        duals: Vec::new(),
        iterations: sol.iterations,
    })
}
