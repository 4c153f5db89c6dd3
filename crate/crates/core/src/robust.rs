//! Interval-uncertain LPs and their budgeted (Bertsimas–Sim) robust
//! counterpart.
//!
//! Coefficient `a_ij` of row `i` may take any value in `ā_ij ± â_ij`; the
//! row must hold whenever at most `Γ_i` of its uncertain coefficients
//! deviate (fractional budgets allowed). Right-hand-side uncertainty is
//! handled by moving `b` into a column fixed at 1
//! ([`augment_rhs_uncertainty`]).

use crate::lp::{Sense, SparseLp};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct UncertainLp {
    /// Nominal problem.
    pub base: SparseLp,
    /// Per row: `(column, â)` with `â >= 0`, only on existing coefficients.
    pub deviations: Vec<Vec<(usize, f64)>>,
    /// Per row protection budget in `[0, |J_i|]`.
    pub row_budgets: Vec<f64>,
}

impl UncertainLp {
    /// Wraps an LP without any uncertainty.
    pub fn certain(base: SparseLp) -> Self {
        let m = base.rows.len();
        UncertainLp {
            base,
            deviations: vec![Vec::new(); m],
            row_budgets: vec![0.0; m],
        }
    }

    pub fn new(
        base: SparseLp,
        deviations: Vec<Vec<(usize, f64)>>,
        row_budgets: Vec<f64>,
    ) -> Result<Self> {
        let lp = UncertainLp {
            base,
            deviations,
            row_budgets,
        };
        lp.validate()?;
        Ok(lp)
    }

    /// Number of uncertain coefficients `|J_i|` of row `i`.
    pub fn n_uncertain(&self, row: usize) -> usize {
        self.deviations[row].iter().filter(|e| e.1 > 0.0).count()
    }

    /// Total number of uncertain coefficients.
    pub fn nnz_uncertain(&self) -> usize {
        (0..self.deviations.len()).map(|i| self.n_uncertain(i)).sum()
    }

    /// Sets every row budget to `|J_i|` (protect against all deviations).
    pub fn with_full_budgets(mut self) -> Self {
        self.row_budgets = (0..self.deviations.len())
            .map(|i| self.n_uncertain(i) as f64)
            .collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        let m = self.base.rows.len();
        if self.deviations.len() != m || self.row_budgets.len() != m {
            return Err(Error::config(format!(
                "uncertain LP has {m} rows but {} deviation rows and {} budgets",
                self.deviations.len(),
                self.row_budgets.len()
            )));
        }
        for (i, (row, devs)) in self.base.rows.iter().zip(&self.deviations).enumerate() {
            for &(j, d) in devs {
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(Error::config(format!("row {i}: deviation {d} is not >= 0")));
                }
                if d > 0.0 && !row.entries.iter().any(|e| e.0 == j) {
                    return Err(Error::config(format!(
                        "row {i}: deviation on column {j} without a coefficient"
                    )));
                }
            }
            let budget = self.row_budgets[i];
            if !(budget >= 0.0 && budget <= self.n_uncertain(i) as f64) {
                return Err(Error::config(format!(
                    "row {i}: budget {budget} outside [0, {}]",
                    self.n_uncertain(i)
                )));
            }
            if row.sense == Sense::Eq && self.n_uncertain(i) > 0 && budget > 0.0 {
                return Err(Error::config(format!(
                    "row {i}: an equality row cannot carry protected uncertainty"
                )));
            }
        }
        Ok(())
    }
}

/// Moves every right-hand side into a new column fixed at 1 whose
/// coefficient in row `i` is `−b_i` with deviation `rhs_dev[i]`; all
/// right-hand sides become 0. Row budgets grow by one wherever the new
/// column is uncertain and the row was already fully protected.
pub fn augment_rhs_uncertainty(lp: &UncertainLp, rhs_dev: &[f64]) -> Result<UncertainLp> {
    let m = lp.base.rows.len();
    if rhs_dev.len() != m {
        return Err(Error::config(format!(
            "{} right-hand-side deviations for {m} rows",
            rhs_dev.len()
        )));
    }
    let mut out = lp.clone();
    if m == 0 {
        return Ok(out);
    }
    let pi = out.base.add_var(0.0, 1.0, 1.0);
    for i in 0..m {
        let full = out.row_budgets[i] >= out.n_uncertain(i) as f64;
        let row = &mut out.base.rows[i];
        let b = std::mem::replace(&mut row.rhs, 0.0);
        // keep the column even for b = 0 when its deviation is nonzero
        if b != 0.0 || rhs_dev[i] > 0.0 {
            row.entries.push((pi, -b));
        }
        if rhs_dev[i] > 0.0 {
            out.deviations[i].push((pi, rhs_dev[i]));
            if full {
                out.row_budgets[i] += 1.0;
            }
        }
    }
    out.validate()?;
    Ok(out)
}

/// Scales every deviation by `gamma` and protects every row in full over
/// the scaled intervals: `ā ± gamma·â`.
pub fn scale_protection(lp: &UncertainLp, gamma: f64) -> Result<UncertainLp> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::domain(format!("protection level {gamma} outside [0, 1]")));
    }
    let deviations = lp
        .deviations
        .iter()
        .map(|row| {
            row.iter()
                .map(|&(j, d)| (j, gamma * d))
                .filter(|e| e.1 > 0.0)
                .collect()
        })
        .collect();
    Ok(UncertainLp {
        base: lp.base.clone(),
        deviations,
        row_budgets: Vec::new(),
    }
    .with_full_budgets())
}

/// The robust counterpart in its textbook form.
///
/// Variables: the original `x` (same indices), then one `z_i` per row, one
/// `p_ij` per uncertain coefficient, and one `y_j` per original variable.
/// Rows: `Σ ā_ij x_j + Γ_i z_i + Σ p_ij <= b_i` per original row (equality
/// rows without protected uncertainty stay equalities), `â_ij y_j − z_i −
/// p_ij <= 0` per uncertain coefficient, and `±x_j − y_j <= 0` per variable.
pub fn robust_counterpart(lp: &UncertainLp) -> Result<SparseLp> {
    lp.validate()?;
    let n = lp.base.n_vars;
    let m = lp.base.rows.len();
    let mut out = SparseLp::new();
    for j in 0..n {
        let (lo, hi) = lp.base.bounds[j];
        out.add_var(lp.base.objective[j], lo, hi);
    }
    let z0 = out.add_vars(m, 0.0, 0.0, f64::INFINITY);
    let n_p = lp.nnz_uncertain();
    let p0 = out.add_vars(n_p, 0.0, 0.0, f64::INFINITY);
    let y0 = out.add_vars(n, 0.0, 0.0, f64::INFINITY);

    let mut p = p0;
    let mut protection_rows = Vec::with_capacity(n_p);
    for (i, row) in lp.base.rows.iter().enumerate() {
        let mut entries = row.entries.clone();
        let budget = lp.row_budgets[i];
        if budget > 0.0 {
            entries.push((z0 + i, budget));
        }
        for &(j, d) in lp.deviations[i].iter().filter(|e| e.1 > 0.0) {
            entries.push((p, 1.0));
            protection_rows.push(vec![(y0 + j, d), (z0 + i, -1.0), (p, -1.0)]);
            p += 1;
        }
        out.add_row(entries, row.sense, row.rhs);
    }
    for entries in protection_rows {
        out.add_row(entries, Sense::Le, 0.0);
    }
    for j in 0..n {
        out.add_row(vec![(j, 1.0), (y0 + j, -1.0)], Sense::Le, 0.0);
        out.add_row(vec![(j, -1.0), (y0 + j, -1.0)], Sense::Le, 0.0);
    }
    Ok(out)
}

/// An equivalent, smaller robust counterpart.
///
/// Fully protected rows (`Γ_i = |J_i|`) become `Σ ā x + Σ â |x| <= b`, with
/// `|x_j|` replaced by `x_j` when `x_j >= 0` by its bounds. Only partially
/// protected rows keep their `z_i`/`p_ij` variables, and `y_j` is created
/// only for sign-indefinite variables that need it. The original variables
/// keep their indices.
pub fn robust_counterpart_compact(lp: &UncertainLp) -> Result<SparseLp> {
    lp.validate()?;
    let n = lp.base.n_vars;
    let mut out = SparseLp::new();
    for j in 0..n {
        let (lo, hi) = lp.base.bounds[j];
        out.add_var(lp.base.objective[j], lo, hi);
    }
    let mut abs_var: Vec<Option<usize>> = vec![None; n];
    let mut abs_of = |out: &mut SparseLp, j: usize| -> usize {
        if lp.base.bounds[j].0 >= 0.0 {
            return j;
        }
        *abs_var[j].get_or_insert_with(|| {
            let y = out.add_var(0.0, 0.0, f64::INFINITY);
            out.add_row(vec![(j, 1.0), (y, -1.0)], Sense::Le, 0.0);
            out.add_row(vec![(j, -1.0), (y, -1.0)], Sense::Le, 0.0);
            y
        })
    };

    for (i, row) in lp.base.rows.iter().enumerate() {
        let devs: Vec<(usize, f64)> =
            lp.deviations[i].iter().copied().filter(|e| e.1 > 0.0).collect();
        let budget = lp.row_budgets[i];
        if devs.is_empty() || budget == 0.0 {
            out.add_row(row.entries.clone(), row.sense, row.rhs);
            continue;
        }
        let mut entries = row.entries.clone();
        if budget >= devs.len() as f64 {
            for (j, d) in devs {
                let y = abs_of(&mut out, j);
                add_entry(&mut entries, y, d);
            }
        } else {
            let z = out.add_var(0.0, 0.0, f64::INFINITY);
            entries.push((z, budget));
            for (j, d) in devs {
                let p = out.add_var(0.0, 0.0, f64::INFINITY);
                entries.push((p, 1.0));
                let y = abs_of(&mut out, j);
                out.add_row(vec![(y, d), (z, -1.0), (p, -1.0)], Sense::Le, 0.0);
            }
        }
        entries.retain(|e| e.1 != 0.0);
        out.add_row(entries, row.sense, row.rhs);
    }
    Ok(out)
}

fn add_entry(entries: &mut Vec<(usize, f64)>, col: usize, value: f64) {
    match entries.iter_mut().find(|e| e.0 == col) {
        Some(e) => e.1 += value,
        None => entries.push((col, value)),
    }
}
