//! Two-phase bounded-variable revised simplex with an explicit dense basis
//! inverse.
//!
//! Phase 1 minimizes the sum of artificial variables added to rows whose
//! slack cannot start basic and feasible. Pricing is Dantzig's rule with a
//! Harris two-pass ratio test. After [`STALL_LIMIT`] consecutive degenerate
//! pivots the bounds of the basic variables are spread apart by tiny
//! pseudo-random amounts, which breaks the degeneracy; the original bounds
//! are restored once the phase is optimal. Should the perturbed problem
//! stall as well, the solver falls back to Bland's rule (textbook ratio
//! test, ties to the lowest column index) for the rest of the phase.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::scaling::Scaling;
use super::{LpError, LpSolution, Sense, SparseLp, Status, TOL_FEAS, TOL_PIVOT};

const NONBASIC: usize = usize::MAX;
/// Reduced-cost tolerance in the scaled problem.
const OPT_TOL: f64 = 1e-9;
/// Bound relaxation used by the first pass of the Harris ratio test.
const HARRIS_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const STALL_LIMIT: usize = 50;
/// Relative size of the anti-degeneracy bound perturbation.
const PERTURBATION: f64 = 1e-7;
const LOG_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub phase: u8,
    pub entering: usize,
    pub leaving: Option<usize>,
    pub step: f64,
    pub objective: f64,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Simplex {
    m: usize,
    n: usize,
    ncols: usize,
    // structural columns, compressed by column
    cstart: Vec<usize>,
    crow: Vec<usize>,
    cval: Vec<f64>,
    // slack and artificial columns are signed unit vectors
    urow: Vec<usize>,
    usign: Vec<f64>,
    art_start: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    phase: u8,
    b: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    pos: Vec<usize>,
    binv: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
    since_refactor: usize,
    /// Original bounds while a perturbation is active.
    saved_bounds: Option<(Vec<f64>, Vec<f64>)>,
    log: VecDeque<IterationRecord>,
}

pub(super) fn solve_scaled(lp: &SparseLp) -> Result<LpSolution, LpError> {
    let scaling = Scaling::compute(lp);
    let mut s = Simplex::build(lp, &scaling);
    let status = s.run()?;
    let n = lp.n_vars;
    let m = lp.rows.len();
    if status != Status::Optimal {
        return Ok(LpSolution::without_solution(status, n, m, s.iterations));
    }

    let y = s.row_prices();
    let mut primal: Vec<f64> = (0..n).map(|j| s.x[j] * scaling.col[j]).collect();
    for (j, v) in primal.iter_mut().enumerate() {
        let (lo, hi) = lp.bounds[j];
        *v = v.clamp(lo, hi);
    }
    let duals = (0..m).map(|i| y[i] * scaling.row[i] / scaling.obj).collect();
    Ok(LpSolution {
        status,
        objective_value: lp.objective_value(&primal),
        primal,
        duals,
        iterations: s.iterations,
    })
}

impl Simplex {
    fn build(lp: &SparseLp, sc: &Scaling) -> Simplex {
        let m = lp.rows.len();
        let n = lp.n_vars;

        let mut counts = vec![0usize; n + 1];
        for r in &lp.rows {
            for &(j, _) in &r.entries {
                counts[j + 1] += 1;
            }
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let cstart = counts.clone();
        let mut fill = counts;
        let nnz = cstart[n];
        let mut crow = vec![0; nnz];
        let mut cval = vec![0.0; nnz];
        for (i, r) in lp.rows.iter().enumerate() {
            for &(j, a) in &r.entries {
                let k = fill[j];
                crow[k] = i;
                cval[k] = a * sc.row[i] * sc.col[j];
                fill[j] += 1;
            }
        }

        let mut lo = Vec::with_capacity(n + 2 * m);
        let mut hi = Vec::with_capacity(n + 2 * m);
        let mut cost = Vec::with_capacity(n + 2 * m);
        for j in 0..n {
            let (l, h) = lp.bounds[j];
            lo.push(l / sc.col[j]);
            hi.push(h / sc.col[j]);
            cost.push(lp.objective[j] * sc.col[j] * sc.obj);
        }
        let b: Vec<f64> = lp.rows.iter().zip(&sc.row).map(|(r, s)| r.rhs * s).collect();

        let mut x: Vec<f64> = (0..n)
            .map(|j| {
                if lo[j].is_finite() {
                    lo[j]
                } else if hi[j].is_finite() {
                    hi[j]
                } else {
                    0.0
                }
            })
            .collect();

        let mut resid = b.clone();
        for j in 0..n {
            if x[j] != 0.0 {
                for k in cstart[j]..cstart[j + 1] {
                    resid[crow[k]] -= cval[k] * x[j];
                }
            }
        }

        let mut urow = Vec::with_capacity(2 * m);
        let mut usign = Vec::with_capacity(2 * m);
        // slacks
        for (i, r) in lp.rows.iter().enumerate() {
            urow.push(i);
            usign.push(1.0);
            lo.push(0.0);
            hi.push(match r.sense {
                Sense::Le => f64::INFINITY,
                Sense::Eq => 0.0,
            });
            cost.push(0.0);
            x.push(0.0);
        }
        let art_start = n + m;
        let mut basis = vec![0; m];
        let mut binv = vec![0.0; m * m];
        for (i, r) in lp.rows.iter().enumerate() {
            if r.sense == Sense::Le && resid[i] >= 0.0 {
                basis[i] = n + i;
                x[n + i] = resid[i];
                binv[i * m + i] = 1.0;
            } else {
                let sign = if resid[i] >= 0.0 { 1.0 } else { -1.0 };
                let j = lo.len();
                urow.push(i);
                usign.push(sign);
                lo.push(0.0);
                hi.push(f64::INFINITY);
                cost.push(0.0);
                x.push(resid[i].abs());
                basis[i] = j;
                binv[i * m + i] = sign;
            }
        }
        let ncols = lo.len();
        let mut pos = vec![NONBASIC; ncols];
        for (r, &j) in basis.iter().enumerate() {
            pos[j] = r;
        }

        Simplex {
            m,
            n,
            ncols,
            cstart,
            crow,
            cval,
            urow,
            usign,
            art_start,
            lo,
            hi,
            cost,
            phase: 1,
            b,
            x,
            basis,
            pos,
            binv,
            iterations: 0,
            max_iterations: 20_000 + 20 * (n + 2 * m),
            since_refactor: 0,
            saved_bounds: None,
            log: VecDeque::with_capacity(LOG_LEN),
        }
    }

    #[inline]
    fn phase_cost(&self, j: usize) -> f64 {
        if self.phase == 1 {
            if j >= self.art_start {
                1.0
            } else {
                0.0
            }
        } else {
            self.cost[j]
        }
    }

    #[inline]
    fn for_col(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n {
            for k in self.cstart[j]..self.cstart[j + 1] {
                f(self.crow[k], self.cval[k]);
            }
        } else {
            let u = j - self.n;
            f(self.urow[u], self.usign[u]);
        }
    }

    fn fail(&self, reason: impl Into<String>) -> LpError {
        LpError::SolverFailure {
            reason: reason.into(),
            log: self.log.iter().cloned().collect(),
        }
    }

    fn run(&mut self) -> Result<Status, LpError> {
        if self.ncols > self.art_start {
            self.phase = 1;
            match self.iterate()? {
                PhaseEnd::Optimal => {}
                PhaseEnd::Unbounded => return Err(self.fail("phase 1 reported an unbounded ray")),
            }
            let infeas: f64 = (self.art_start..self.ncols).map(|j| self.x[j]).sum();
            let bnorm = self.b.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            if infeas > TOL_FEAS * bnorm {
                return Ok(Status::Infeasible);
            }
            for j in self.art_start..self.ncols {
                self.hi[j] = 0.0;
                if self.pos[j] == NONBASIC {
                    self.x[j] = 0.0;
                }
            }
        }
        self.phase = 2;
        match self.iterate()? {
            PhaseEnd::Optimal => Ok(Status::Optimal),
            PhaseEnd::Unbounded => Ok(Status::Unbounded),
        }
    }

    /// Simplex multipliers `y = c_B B^-1` for the current phase.
    fn row_prices(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for r in 0..m {
            let c = self.phase_cost(self.basis[r]);
            if c != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (yk, bk) in y.iter_mut().zip(row) {
                    *yk += c * bk;
                }
            }
        }
        y
    }

    fn objective(&self) -> f64 {
        (0..self.ncols).map(|j| self.phase_cost(j) * self.x[j]).sum()
    }

    /// Chooses the entering column and its direction (+1 increase, -1 decrease).
    fn price(&self, y: &[f64], bland: bool) -> Option<(usize, f64, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.ncols {
            if self.pos[j] != NONBASIC || self.lo[j] >= self.hi[j] {
                continue;
            }
            let mut d = self.phase_cost(j);
            self.for_col(j, |i, a| d -= y[i] * a);
            let dir = if d < -OPT_TOL && self.x[j] < self.hi[j] {
                1.0
            } else if d > OPT_TOL && self.x[j] > self.lo[j] {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir, d));
            }
            if best.map_or(true, |(_, _, bd)| d.abs() > bd.abs()) {
                best = Some((j, dir, d));
            }
        }
        best
    }

    fn column_image(&self, q: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        self.for_col(q, |k, a| {
            for (i, al) in alpha.iter_mut().enumerate() {
                *al += self.binv[i * m + k] * a;
            }
        });
        alpha
    }

    /// Distance the basic variable in row `r` may move before hitting a bound,
    /// given that it changes at rate `-g` per unit step.
    #[inline]
    fn room(&self, r: usize, g: f64) -> Option<f64> {
        let j = self.basis[r];
        if g > 0.0 {
            self.lo[j].is_finite().then(|| self.x[j] - self.lo[j])
        } else {
            self.hi[j].is_finite().then(|| self.hi[j] - self.x[j])
        }
    }

    /// Returns `(step, leaving row)`; `None` row means a bound flip of the
    /// entering variable. `Err(())` signals an unbounded ray.
    fn ratio_test(&self, q: usize, dir: f64, alpha: &[f64], bland: bool) -> Result<(f64, Option<usize>), ()> {
        let flip = self.hi[q] - self.lo[q];
        if bland {
            let mut best: Option<(f64, usize)> = None;
            for r in 0..self.m {
                let g = dir * alpha[r];
                if g.abs() <= TOL_PIVOT {
                    continue;
                }
                if let Some(room) = self.room(r, g) {
                    let ratio = (room / g.abs()).max(0.0);
                    let better = match best {
                        None => true,
                        Some((br, bw)) => {
                            ratio < br - 1e-12
                                || (ratio <= br + 1e-12 && self.basis[r] < self.basis[bw])
                        }
                    };
                    if better {
                        best = Some((ratio, r));
                    }
                }
            }
            return match best {
                Some((ratio, _)) if flip <= ratio => Ok((flip, None)),
                Some((ratio, r)) => Ok((ratio, Some(r))),
                None if flip.is_finite() => Ok((flip, None)),
                None => Err(()),
            };
        }

        let mut bound = f64::INFINITY;
        for r in 0..self.m {
            let g = dir * alpha[r];
            if g.abs() <= TOL_PIVOT {
                continue;
            }
            if let Some(room) = self.room(r, g) {
                bound = bound.min((room + HARRIS_TOL) / g.abs());
            }
        }
        if flip.is_finite() && flip <= bound {
            return Ok((flip, None));
        }
        if bound == f64::INFINITY {
            return Err(());
        }
        let mut pick: Option<(usize, f64, f64)> = None;
        for r in 0..self.m {
            let g = dir * alpha[r];
            if g.abs() <= TOL_PIVOT {
                continue;
            }
            if let Some(room) = self.room(r, g) {
                let ratio = room / g.abs();
                if ratio <= bound {
                    let better = match pick {
                        None => true,
                        Some((pr, pg, _)) => {
                            g.abs() > pg * (1.0 + 1e-9)
                                || (g.abs() >= pg * (1.0 - 1e-9)
                                    && self.basis[r] < self.basis[pr])
                        }
                    };
                    if better {
                        pick = Some((r, g.abs(), ratio.max(0.0)));
                    }
                }
            }
        }
        let (r, _, ratio) = pick.expect("a row attains the Harris bound");
        Ok((ratio, Some(r)))
    }

    fn iterate(&mut self) -> Result<PhaseEnd, LpError> {
        let m = self.m;
        let mut stall = 0usize;
        let mut bland = false;
        let mut verified = false;
        loop {
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            if stall > STALL_LIMIT {
                if self.saved_bounds.is_none() && !bland {
                    self.perturb();
                } else {
                    bland = true;
                }
                stall = 0;
            }
            let y = self.row_prices();
            let Some((q, dir, _d)) = self.price(&y, bland) else {
                if self.saved_bounds.is_some() {
                    // the reduced costs do not depend on the bounds, so the
                    // basis stays optimal; only the basic values move
                    self.unperturb()?;
                    verified = true;
                    continue;
                }
                if self.since_refactor > 0 && !verified {
                    // re-price against a fresh factorization before declaring optimality
                    self.refactor()?;
                    verified = true;
                    continue;
                }
                return Ok(PhaseEnd::Optimal);
            };
            verified = false;

            let alpha = self.column_image(q);
            let (step, leave) = match self.ratio_test(q, dir, &alpha, bland) {
                Ok(v) => v,
                Err(()) => {
                    if self.saved_bounds.is_some() {
                        self.unperturb()?;
                    }
                    return Ok(PhaseEnd::Unbounded);
                }
            };

            for r in 0..m {
                if alpha[r] != 0.0 {
                    let j = self.basis[r];
                    self.x[j] -= step * dir * alpha[r];
                }
            }
            let leaving = match leave {
                None => {
                    self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                    None
                }
                Some(r) => {
                    self.x[q] += dir * step;
                    let l = self.basis[r];
                    self.x[l] = if dir * alpha[r] > 0.0 {
                        self.lo[l]
                    } else {
                        self.hi[l]
                    };
                    self.pos[l] = NONBASIC;
                    self.basis[r] = q;
                    self.pos[q] = r;
                    self.pivot(r, &alpha);
                    Some(l)
                }
            };

            if step <= 1e-12 {
                stall += 1;
            } else {
                stall = 0;
            }
            self.iterations += 1;
            if self.log.len() == LOG_LEN {
                self.log.pop_front();
            }
            let record = IterationRecord {
                iteration: self.iterations,
                phase: self.phase,
                entering: q,
                leaving,
                step,
                objective: self.objective(),
            };
            self.log.push_back(record);
            if self.iterations >= self.max_iterations {
                return Err(self.fail(format!(
                    "iteration limit {} reached in phase {}",
                    self.max_iterations, self.phase
                )));
            }
        }
    }

    /// Widens the finite bounds of every basic variable (artificials
    /// excepted) by a small pseudo-random amount.
    fn perturb(&mut self) {
        let saved = (self.lo.clone(), self.hi.clone());
        for (r, &j) in self.basis.iter().enumerate() {
            if j >= self.art_start {
                continue;
            }
            // deterministic spread in [1, 2)
            let u = 1.0 + ((j as u64 * 2_654_435_761 + r as u64 * 40_503) % 1024) as f64 / 1024.0;
            if self.lo[j].is_finite() {
                self.lo[j] -= PERTURBATION * u * (1.0 + self.lo[j].abs());
            }
            if self.hi[j].is_finite() {
                self.hi[j] += PERTURBATION * u * (1.0 + self.hi[j].abs());
            }
        }
        self.saved_bounds = Some(saved);
    }

    /// Restores the original bounds, moves nonbasic variables back onto
    /// them and recomputes the basic values.
    fn unperturb(&mut self) -> Result<(), LpError> {
        let (lo, hi) = self.saved_bounds.take().expect("a perturbation is active");
        self.lo = lo;
        self.hi = hi;
        for j in 0..self.ncols {
            if self.pos[j] == NONBASIC {
                self.x[j] = self.x[j].clamp(self.lo[j], self.hi[j]);
            }
        }
        self.refactor()
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let piv = alpha[r];
        let prow: Vec<f64> = self.binv[r * m..(r + 1) * m].iter().map(|v| v / piv).collect();
        for (i, &f) in alpha.iter().enumerate() {
            let row = &mut self.binv[i * m..(i + 1) * m];
            if i == r {
                row.copy_from_slice(&prow);
            } else if f != 0.0 {
                for (bk, pk) in row.iter_mut().zip(&prow) {
                    *bk -= f * pk;
                }
            }
        }
        self.since_refactor += 1;
    }

    /// Rebuilds the basis inverse from scratch and recomputes basic values.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        let w = 2 * m;
        let mut aug = vec![0.0; m * w];
        for (r, &j) in self.basis.iter().enumerate() {
            self.for_col(j, |i, a| aug[i * w + r] = a);
        }
        for i in 0..m {
            aug[i * w + m + i] = 1.0;
        }
        for c in 0..m {
            let mut p = c;
            let mut best = aug[c * w + c].abs();
            for i in c + 1..m {
                let v = aug[i * w + c].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best < 1e-12 {
                return Err(self.fail(format!("singular basis at refactorization (column {c})")));
            }
            if p != c {
                for k in 0..w {
                    aug.swap(c * w + k, p * w + k);
                }
            }
            let piv = aug[c * w + c];
            for k in 0..w {
                aug[c * w + k] /= piv;
            }
            // bases are sparse: eliminate with the pivot row's nonzeros only
            let prow: Vec<(usize, f64)> = aug[c * w..(c + 1) * w]
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(k, &v)| (k, v))
                .collect();
            for i in 0..m {
                if i != c {
                    let f = aug[i * w + c];
                    if f != 0.0 {
                        let row = &mut aug[i * w..(i + 1) * w];
                        for &(k, pk) in &prow {
                            row[k] -= f * pk;
                        }
                    }
                }
            }
        }
        for i in 0..m {
            self.binv[i * m..(i + 1) * m].copy_from_slice(&aug[i * w + m..(i + 1) * w]);
        }

        let mut rhs = self.b.clone();
        for j in 0..self.ncols {
            if self.pos[j] == NONBASIC && self.x[j] != 0.0 {
                let v = self.x[j];
                self.for_col(j, |i, a| rhs[i] -= a * v);
            }
        }
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            let v: f64 = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
            let j = self.basis[r];
            self.x[j] = v;
        }
        Ok(())
    }
}
