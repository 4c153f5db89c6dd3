//! The generic NWA abstraction and its four instantiations.
//!
//! Every NWA compiles to an [`NwaBlock`]: linear rows over its own investment
//! and operating variables, linear costs, and a sparse map from operating
//! variables to the MW each adds to (or removes from) the load in every
//! (year, period) cell. Variables are indexed block-locally, investment
//! variables first.

mod dr;
mod ee;
mod es;
mod pv;

use serde::{Deserialize, Serialize};

pub use dr::{compile_dr, DrSpec};
pub use ee::{compile_ee, EeSpec};
pub use es::{compile_es, EsLayout, EsSpec};
pub use pv::{compile_pv, PvSpec};

use crate::lp::{Sense, SparseLp};
use crate::timegrid::TimeGrid;
use crate::{Error, Result};

/// One linear row of an NWA's operating region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    /// Half-widths of uncertain coefficients of this row. A row listing any
    /// deviation is an availability limit and becomes `<=` when robustified.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deviations: Vec<(usize, f64)>,
}

impl BlockRow {
    fn new(coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Self {
        BlockRow {
            coeffs,
            sense,
            rhs,
            deviations: Vec::new(),
        }
    }

    pub fn is_uncertain(&self) -> bool {
        !self.deviations.is_empty()
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NwaBlock {
    pub name: String,
    pub n_invest_vars: usize,
    pub n_op_vars: usize,
    /// Bounds of every block variable; the investment part is the feasible
    /// investment set.
    pub bounds: Vec<(f64, f64)>,
    pub rows: Vec<BlockRow>,
    /// $ per unit of each investment variable.
    pub invest_cost: Vec<f64>,
    /// $ per unit of each operating variable.
    pub op_cost: Vec<f64>,
    /// Per flat (year, period) cell: `(block variable, MW per unit)`.
    pub load_map: Vec<Vec<(usize, f64)>>,
}

impl NwaBlock {
    fn empty(name: &str, n_invest: usize, n_op: usize, grid: &TimeGrid) -> Self {
        NwaBlock {
            name: name.to_string(),
            n_invest_vars: n_invest,
            n_op_vars: n_op,
            bounds: vec![(0.0, f64::INFINITY); n_invest + n_op],
            rows: Vec::new(),
            invest_cost: vec![0.0; n_invest],
            op_cost: vec![0.0; n_op],
            load_map: vec![Vec::new(); grid.len()],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_invest_vars + self.n_op_vars
    }

    pub fn invest_bounds(&self) -> &[(f64, f64)] {
        &self.bounds[..self.n_invest_vars]
    }

    /// MW load contribution per cell for block variables `x`.
    pub fn load(&self, x: &[f64]) -> Vec<f64> {
        self.load_map
            .iter()
            .map(|cell| cell.iter().map(|&(j, a)| a * x[j]).sum())
            .collect()
    }

    pub fn op_cost_of(&self, x: &[f64]) -> f64 {
        self.op_cost
            .iter()
            .zip(&x[self.n_invest_vars..])
            .map(|(c, v)| c * v)
            .sum()
    }

    pub fn invest_cost_of(&self, x: &[f64]) -> f64 {
        self.invest_cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Returns a copy whose operating cost additionally charges
    /// `weights[cell]` $ per MW of load contributed in each cell.
    pub fn with_load_cost(&self, weights: &[f64]) -> NwaBlock {
        let mut out = self.clone();
        for (cell, w) in self.load_map.iter().zip(weights) {
            for &(j, a) in cell {
                out.op_cost[j - self.n_invest_vars] += w * a;
            }
        }
        out
    }

    /// Objective over all block variables: investment and operating cost,
    /// plus `prices[cell]` per MW of load when given.
    pub fn objective(&self, prices: Option<&[f64]>) -> Vec<f64> {
        let mut c = Vec::with_capacity(self.n_vars());
        c.extend_from_slice(&self.invest_cost);
        c.extend_from_slice(&self.op_cost);
        if let Some(p) = prices {
            for (cell, pi) in self.load_map.iter().zip(p) {
                for &(j, a) in cell {
                    c[j] += pi * a;
                }
            }
        }
        c
    }

    /// The block's operating region, nominal coefficients, as a standalone
    /// LP with the given objective.
    pub fn to_lp(&self, objective: Vec<f64>) -> SparseLp {
        let mut lp = SparseLp::new();
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            lp.add_var(objective[j], lo, hi);
        }
        for r in &self.rows {
            lp.add_row(r.coeffs.clone(), r.sense, r.rhs);
        }
        lp
    }

    /// True if `x` satisfies the bounds and nominal rows within `tol`.
    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.bounds
            .iter()
            .zip(x)
            .all(|(&(lo, hi), &v)| v >= lo - tol && v <= hi + tol)
            && self.rows.iter().all(|r| {
                let act = r.activity(x);
                match r.sense {
                    Sense::Le => act <= r.rhs + tol,
                    Sense::Eq => (act - r.rhs).abs() <= tol,
                }
            })
    }

    pub fn validate(&self, grid: &TimeGrid) -> Result<()> {
        let n = self.n_vars();
        if self.load_map.len() != grid.len() {
            return Err(Error::config(format!(
                "block {}: load map has {} cells, grid has {}",
                self.name,
                self.load_map.len(),
                grid.len()
            )));
        }
        if self.bounds.len() != n
            || self.invest_cost.len() != self.n_invest_vars
            || self.op_cost.len() != self.n_op_vars
        {
            return Err(Error::config(format!("block {}: inconsistent sizes", self.name)));
        }
        if self.bounds.iter().any(|&(lo, hi)| !(lo <= hi)) {
            return Err(Error::config(format!("block {}: empty variable bounds", self.name)));
        }
        let ok_rows = self.rows.iter().all(|r| {
            r.coeffs.iter().all(|&(j, _)| j < n)
                && r
                    .deviations
                    .iter()
                    .all(|&(j, d)| d >= 0.0 && r.coeffs.iter().any(|&(k, _)| k == j))
        });
        let ok_map = self
            .load_map
            .iter()
            .flatten()
            .all(|&(j, _)| j >= self.n_invest_vars && j < n);
        if !ok_rows || !ok_map {
            return Err(Error::config(format!(
                "block {}: row or load-map entry out of range",
                self.name
            )));
        }
        Ok(())
    }
}

/// Configuration of one NWA technology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum NwaSpec {
    Ee(EeSpec),
    Pv(PvSpec),
    Dr(DrSpec),
    Es(EsSpec),
}

impl NwaSpec {
    pub fn name(&self) -> &'static str {
        match self {
            NwaSpec::Ee(_) => "EE",
            NwaSpec::Pv(_) => "PV",
            NwaSpec::Dr(_) => "DR",
            NwaSpec::Es(_) => "ES",
        }
    }

    pub fn compile(&self, grid: &TimeGrid) -> Result<NwaBlock> {
        match self {
            NwaSpec::Ee(s) => compile_ee(s, grid),
            NwaSpec::Pv(s) => compile_pv(s, grid),
            NwaSpec::Dr(s) => compile_dr(s, grid),
            NwaSpec::Es(s) => compile_es(s, grid),
        }
    }

    /// Replaces the uncertain parameters by one realization and drops their
    /// deviations. `None` keeps the nominal values.
    pub fn realized(&self, pv_profile: Option<&[f64]>, ee_accuracy: Option<&[f64]>) -> NwaSpec {
        match self {
            NwaSpec::Pv(s) => {
                let mut s = s.clone();
                if let Some(p) = pv_profile {
                    s.profile = p.to_vec();
                }
                s.profile_deviation.clear();
                NwaSpec::Pv(s)
            }
            NwaSpec::Ee(s) => {
                let mut s = s.clone();
                if let Some(a) = ee_accuracy {
                    s.accuracy = a.to_vec();
                }
                s.accuracy_deviation.clear();
                NwaSpec::Ee(s)
            }
            other => other.clone(),
        }
    }
}

fn check_deviations(what: &str, dev: &[f64], grid: &TimeGrid) -> Result<()> {
    if !dev.is_empty() {
        grid.check_len(what, dev.len())?;
        if dev.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(Error::config(format!("{what} must be finite and >= 0")));
        }
    }
    Ok(())
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::config(format!("{what} must be > 0, got {v}")));
    }
    Ok(())
}

fn check_nonnegative(what: &str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::config(format!("{what} must be >= 0, got {v}")));
    }
    Ok(())
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp;

    fn all_specs(grid: &TimeGrid) -> Vec<NwaSpec> {
        vec![
            NwaSpec::Ee(EeSpec {
                accuracy_deviation: vec![0.1; grid.len()],
                ..EeSpec::placeholder(vec![40.0; grid.n_periods], grid)
            }),
            NwaSpec::Pv(PvSpec {
                capacity_cost: 2e6,
                max_capacity: 20.0,
                profile: (0..grid.len()).map(|i| (i % 5) as f64 / 5.0).collect(),
                profile_deviation: vec![0.05; grid.len()],
            }),
            NwaSpec::Dr(DrSpec::default()),
            NwaSpec::Es(EsSpec::default()),
        ]
    }

    #[test]
    fn zero_point_feasible_for_every_block() {
        let grid = TimeGrid::new(2, 6, 1.0).unwrap();
        for spec in all_specs(&grid) {
            let b = spec.compile(&grid).unwrap();
            b.validate(&grid).unwrap();
            assert!(b.is_feasible(&vec![0.0; b.n_vars()], 1e-12), "{}", b.name);
        }
    }

    #[test]
    fn compilation_is_deterministic() {
        let grid = TimeGrid::new(3, 4, 0.5).unwrap();
        for spec in all_specs(&grid) {
            assert_eq!(spec.compile(&grid).unwrap(), spec.compile(&grid).unwrap());
        }
    }

    #[test]
    fn load_cost_folds_into_operating_cost() {
        let grid = TimeGrid::new(1, 3, 1.0).unwrap();
        let b = compile_dr(&DrSpec::default(), &grid).unwrap();
        let w = [10.0, 20.0, 30.0];
        let priced = b.with_load_cost(&w);
        let mut x = vec![0.0; b.n_vars()];
        x[0] = 1.0;
        x[1] = 1.0;
        let extra: f64 = b.load(&x).iter().zip(&w).map(|(l, w)| l * w).sum();
        assert!((priced.op_cost_of(&x) - b.op_cost_of(&x) - extra).abs() < 1e-12);
        let c = b.objective(Some(&w));
        let direct: f64 = c.iter().zip(&x).map(|(c, v)| c * v).sum();
        assert!((direct - b.invest_cost_of(&x) - b.op_cost_of(&x) - extra).abs() < 1e-9);
    }

    #[test]
    fn realization_clears_deviations() {
        let grid = TimeGrid::new(1, 2, 1.0).unwrap();
        let spec = all_specs(&grid).remove(1);
        let NwaSpec::Pv(pv) = spec.realized(Some(&[0.3, 0.4]), None) else {
            panic!("kind changed")
        };
        assert_eq!(pv.profile, vec![0.3, 0.4]);
        assert!(pv.profile_deviation.is_empty());
    }

    #[test]
    fn standalone_block_lp_solves_to_zero() {
        let grid = TimeGrid::new(2, 4, 1.0).unwrap();
        for spec in all_specs(&grid) {
            let b = spec.compile(&grid).unwrap();
            let sol = lp::solve(&b.to_lp(b.objective(None))).unwrap();
            assert!(sol.is_optimal());
            assert!(sol.objective_value.abs() < 1e-9);
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let grid = TimeGrid::new(1, 2, 1.0).unwrap();
        for spec in all_specs(&grid) {
            let s = serde_json::to_string(&spec).unwrap();
            assert_eq!(serde_json::from_str::<NwaSpec>(&s).unwrap(), spec);
        }
    }
}
