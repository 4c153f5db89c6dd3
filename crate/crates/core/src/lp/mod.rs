//! Sparse linear programs and a bounded-variable revised simplex solver.
//!
//! Problems are minimizations over `lo <= x <= hi` subject to rows of the
//! form `a·x <= b` or `a·x = b`.
//!
//! # Dual sign convention
//!
//! `LpSolution::duals[i]` is the sensitivity of the optimal objective to the
//! right-hand side of row `i`: `y_i = ∂ obj / ∂ b_i`. For a `<=` row of a
//! minimization this is never positive (relaxing the row cannot hurt).
//! Reduced costs are `d_j = c_j - Σ_i y_i a_ij`.
//!
//! Column-generation prices are the negated duals of `<=` coupling rows, so
//! they come out non-negative; see [`crate::plan::dwda`].

mod presolve;
mod scaling;
mod simplex;

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

pub use simplex::IterationRecord;

/// Primal feasibility tolerance.
pub const TOL_FEAS: f64 = 1e-7;
/// Objective / duality-gap tolerance (relative to `max(1, |obj|)`).
pub const TOL_OBJ: f64 = 1e-6;
/// Smallest pivot magnitude accepted in the ratio test.
pub const TOL_PIVOT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// `(column, coefficient)` pairs, column indices unique.
    pub entries: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.entries.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseLp {
    pub n_vars: usize,
    /// Minimization objective, one coefficient per variable.
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    /// `(lo, hi)` per variable; infinite values allowed.
    pub bounds: Vec<(f64, f64)>,
}

impl SparseLp {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable and returns its index.
    pub fn add_var(&mut self, cost: f64, lo: f64, hi: f64) -> usize {
        self.objective.push(cost);
        self.bounds.push((lo, hi));
        self.n_vars += 1;
        self.n_vars - 1
    }

    /// Adds `n` variables sharing cost and bounds; returns the first index.
    pub fn add_vars(&mut self, n: usize, cost: f64, lo: f64, hi: f64) -> usize {
        let first = self.n_vars;
        for _ in 0..n {
            self.add_var(cost, lo, hi);
        }
        first
    }

    pub fn add_row(&mut self, entries: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        self.rows.push(Row {
            entries,
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    /// Adds `a·x >= b`, stored as `-a·x <= -b`.
    pub fn add_ge_row(&mut self, entries: Vec<(usize, f64)>, rhs: f64) -> usize {
        let negated = entries.into_iter().map(|(j, a)| (j, -a)).collect();
        self.add_row(negated, Sense::Le, -rhs)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.entries.len()).sum()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), LpError> {
        if self.objective.len() != self.n_vars || self.bounds.len() != self.n_vars {
            return Err(LpError::Malformed(format!(
                "{} variables but {} objective entries and {} bounds",
                self.n_vars,
                self.objective.len(),
                self.bounds.len()
            )));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
            {
                return Err(LpError::Malformed(format!(
                    "variable {j} has invalid bounds [{lo}, {hi}]"
                )));
            }
            if !self.objective[j].is_finite() {
                return Err(LpError::Malformed(format!(
                    "variable {j} has non-finite cost"
                )));
            }
        }
        let mut seen = vec![usize::MAX; self.n_vars];
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::Malformed(format!("row {i} has non-finite rhs")));
            }
            for &(j, a) in &row.entries {
                if j >= self.n_vars {
                    return Err(LpError::Malformed(format!(
                        "row {i} references column {j} >= {}",
                        self.n_vars
                    )));
                }
                if seen[j] == i {
                    return Err(LpError::Malformed(format!(
                        "row {i} lists column {j} twice"
                    )));
                }
                if !a.is_finite() {
                    return Err(LpError::Malformed(format!(
                        "row {i} column {j} has non-finite coefficient"
                    )));
                }
                seen[j] = i;
            }
        }
        Ok(())
    }

    /// Plain-text dump, one row per line. For debugging only; the format is
    /// not stable.
    pub fn to_debug_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vars {} rows {}", self.n_vars, self.rows.len());
        let _ = write!(out, "min");
        for (j, c) in self.objective.iter().enumerate() {
            if *c != 0.0 {
                let _ = write!(out, " {c:+}*x{j}");
            }
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "r{i}:");
            for &(j, a) in &row.entries {
                let _ = write!(out, " {a:+}*x{j}");
            }
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", row.rhs);
        }
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            if *lo != 0.0 || *hi != f64::INFINITY {
                let _ = writeln!(out, "x{j} in [{lo}, {hi}]");
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: Status,
    pub primal: Vec<f64>,
    /// One per row; empty when solved through [`solve_primal`].
    pub duals: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    fn without_solution(status: Status, n_vars: usize, n_rows: usize, iterations: usize) -> Self {
        LpSolution {
            status,
            primal: vec![0.0; n_vars],
            duals: vec![0.0; n_rows],
            objective_value: match status {
                Status::Infeasible => f64::INFINITY,
                Status::Unbounded => f64::NEG_INFINITY,
                Status::Optimal => 0.0,
            },
            iterations,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("malformed LP: {0}")]
    Malformed(String),

    #[error("simplex failure: {reason} (last {} iterations logged)", log.len())]
    SolverFailure {
        reason: String,
        log: Vec<IterationRecord>,
    },
}

/// Solves `lp`, returning primal values, row duals and a status.
pub fn solve(lp: &SparseLp) -> Result<LpSolution, LpError> {
    lp.validate()?;
    simplex::solve_scaled(lp)
}

/// Solves `lp` after a primal-only presolve (fixed columns and singleton rows
/// are eliminated). Duals are not reported.
pub fn solve_primal(lp: &SparseLp) -> Result<LpSolution, LpError> {
    lp.validate()?;
    presolve::solve_presolved(lp)
}

/// Verifies primal feasibility, dual feasibility and strong duality of an
/// optimal solution.
///
/// Row and bound violations are measured against `tol_feas * max(1, |rhs|)`;
/// dual violations and the duality gap against `tol_obj * max(1, |obj|)`.
pub fn check_certificates(lp: &SparseLp, sol: &LpSolution, tol_feas: f64, tol_obj: f64) -> bool {
    if sol.status != Status::Optimal
        || sol.primal.len() != lp.n_vars
        || sol.duals.len() != lp.rows.len()
    {
        return false;
    }
    let x = &sol.primal;
    let y = &sol.duals;

    for (j, &(lo, hi)) in lp.bounds.iter().enumerate() {
        if x[j] < lo - tol_feas * lo.abs().max(1.0) || x[j] > hi + tol_feas * hi.abs().max(1.0) {
            return false;
        }
    }
    for row in &lp.rows {
        let act = row.activity(x);
        let tol = tol_feas * row.rhs.abs().max(1.0);
        let ok = match row.sense {
            Sense::Le => act <= row.rhs + tol,
            Sense::Eq => (act - row.rhs).abs() <= tol,
        };
        if !ok {
            return false;
        }
    }

    let primal_obj = lp.objective_value(x);
    let cmax = lp.objective.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let dual_tol = tol_obj * cmax;

    let mut reduced = lp.objective.clone();
    for (row, &yi) in lp.rows.iter().zip(y) {
        if row.sense == Sense::Le && yi > dual_tol {
            return false;
        }
        for &(j, a) in &row.entries {
            reduced[j] -= yi * a;
        }
    }

    let mut dual_obj: f64 = lp.rows.iter().zip(y).map(|(r, yi)| r.rhs * yi).sum();
    for (j, &d) in reduced.iter().enumerate() {
        let (lo, hi) = lp.bounds[j];
        let at_lo = x[j] <= lo + tol_feas * lo.abs().max(1.0);
        let at_hi = x[j] >= hi - tol_feas * hi.abs().max(1.0);
        if d > dual_tol && !at_lo {
            return false;
        }
        if d < -dual_tol && !at_hi {
            return false;
        }
        let bound = if d > 0.0 && lo.is_finite() {
            lo
        } else if d < 0.0 && hi.is_finite() {
            hi
        } else {
            x[j]
        };
        dual_obj += d * bound;
    }

    // complementary slackness on rows
    let scale = primal_obj.abs().max(1.0);
    for (row, &yi) in lp.rows.iter().zip(y) {
        if row.sense == Sense::Le {
            let slack = row.rhs - row.activity(x);
            if (yi * slack).abs() > tol_obj * scale {
                return false;
            }
        }
    }

    (primal_obj - dual_obj).abs() <= tol_obj * scale
}
