//! Brute-force vertex enumeration for small bounded LPs.

use nwa_core::lp::{Sense, SparseLp};
use rand::Rng;

/// Solves the dense square system `a x = b`; `None` if singular.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &k| a[i][c].abs().total_cmp(&a[k][c].abs()))?;
        if a[p][c].abs() < 1e-9 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[i][k] -= f * a[c][k];
                }
                b[i] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn for_each_subset(n_items: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n_items: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n_items {
            if n_items - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n_items, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n_items, k, &mut Vec::with_capacity(k), f);
}

/// Optimal objective of a bounded LP by enumerating every basic solution;
/// `None` when no vertex is feasible.
pub fn vertex_enumeration(lp: &SparseLp) -> Option<f64> {
    let n = lp.n_vars;
    // each constraint as (dense coefficients, rhs, is_equality)
    let mut cons: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for row in &lp.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.entries {
            a[j] = v;
        }
        cons.push((a, row.rhs, row.sense == Sense::Eq));
    }
    for (j, &(lo, hi)) in lp.bounds.iter().enumerate() {
        assert!(lo.is_finite() && hi.is_finite(), "oracle needs finite bounds");
        let mut a = vec![0.0; n];
        a[j] = -1.0;
        cons.push((a.clone(), -lo, false));
        a[j] = 1.0;
        cons.push((a, hi, false));
    }
    let feasible = |x: &[f64]| {
        cons.iter().all(|(a, b, eq)| {
            let v: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            let tol = 1e-7 * b.abs().max(1.0);
            if *eq {
                (v - b).abs() <= tol
            } else {
                v <= b + tol
            }
        })
    };
    let mut best: Option<f64> = None;
    for_each_subset(cons.len(), n, &mut |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| cons[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| cons[i].1).collect();
        if let Some(x) = solve_dense(a, b) {
            if feasible(&x) {
                let obj = lp.objective_value(&x);
                best = Some(best.map_or(obj, |v: f64| v.min(obj)));
            }
        }
    });
    best
}

/// Random integer-coefficient LP with finite bounds, up to `max_n` variables
/// and `max_m` rows.
pub fn random_bounded_lp(rng: &mut impl Rng, max_n: usize, max_m: usize) -> SparseLp {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(0..=max_m);
    let mut lp = SparseLp::new();
    for _ in 0..n {
        let lo = rng.gen_range(-5..=0) as f64;
        let hi = lo + rng.gen_range(1..=10) as f64;
        lp.add_var(rng.gen_range(-5..=5) as f64, lo, hi);
    }
    for _ in 0..m {
        let mut entries = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.7) {
                let a = rng.gen_range(-5..=5) as f64;
                if a != 0.0 {
                    entries.push((j, a));
                }
            }
        }
        let sense = if rng.gen_bool(0.15) { Sense::Eq } else { Sense::Le };
        lp.add_row(entries, sense, rng.gen_range(-5..=12) as f64);
    }
    lp
}
