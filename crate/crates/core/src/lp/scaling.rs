//! Geometric row/column equilibration.
//!
//! Scale factors are rounded to powers of two so scaling and unscaling are
//! exact in floating point.

use super::SparseLp;

const PASSES: usize = 6;
const NEGLIGIBLE: f64 = 1e-12;

pub(super) struct Scaling {
    /// Scaled row i = `row[i]` * original row i.
    pub row: Vec<f64>,
    /// Original x_j = `col[j]` * scaled x_j.
    pub col: Vec<f64>,
    /// Scaled objective = `obj` * (column-scaled) objective.
    pub obj: f64,
}

fn pow2(v: f64) -> f64 {
    if !v.is_finite() || v <= 0.0 {
        return 1.0;
    }
    2f64.powi(v.log2().round().clamp(-60.0, 60.0) as i32)
}

impl Scaling {
    pub fn compute(lp: &SparseLp) -> Scaling {
        let m = lp.rows.len();
        let n = lp.n_vars;
        let mut row = vec![1.0; m];
        let mut col = vec![1.0; n];
        // entries this far below the largest one are treated as round-off
        let amax = lp
            .rows
            .iter()
            .flat_map(|r| r.entries.iter())
            .fold(0.0f64, |m, &(_, a)| m.max(a.abs()));
        let floor = amax * NEGLIGIBLE;

        for _ in 0..PASSES {
            for (i, r) in lp.rows.iter().enumerate() {
                let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
                for &(j, a) in &r.entries {
                    let v = (a * col[j]).abs();
                    if a.abs() > floor {
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                if hi > 0.0 {
                    row[i] = pow2(1.0 / (lo * hi).sqrt());
                }
            }
            let mut lo = vec![f64::INFINITY; n];
            let mut hi = vec![0.0f64; n];
            for (i, r) in lp.rows.iter().enumerate() {
                for &(j, a) in &r.entries {
                    let v = (a * row[i]).abs();
                    if a.abs() > floor {
                        lo[j] = lo[j].min(v);
                        hi[j] = hi[j].max(v);
                    }
                }
            }
            for j in 0..n {
                if hi[j] > 0.0 {
                    col[j] = pow2(1.0 / (lo[j] * hi[j]).sqrt());
                }
            }
        }

        let cmax = lp
            .objective
            .iter()
            .zip(&col)
            .fold(0.0f64, |m, (c, s)| m.max((c * s).abs()));
        let obj = if cmax > 0.0 { pow2(1.0 / cmax) } else { 1.0 };
        Scaling { row, col, obj }
    }
}
