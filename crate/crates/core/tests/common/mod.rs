//! Multi-start real Newton oracle, independent of the interval code.

#![allow(dead_code)]

use ivsolve_core::solvers::RunReport;
use ivsolve_core::SystemModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RESIDUAL_TOL: f64 = 1e-12;
const MAX_NEWTON_STEPS: usize = 200;
const DEDUP_TOL: f64 = 1e-7;

/// Solves `a x = b` with partial pivoting; `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-300 {
            return None;
        }
        a.swap(p, k);
        b.swap(p, k);
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            for c in k..n {
                a[r][c] -= f * a[k][c];
            }
            b[r] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|c| a[k][c] * x[c]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn residual(m: &SystemModel, x: &[f64], u: &[f64]) -> Option<f64> {
    let f = m.eval_real(x, u).ok()?;
    Some(f.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}

/// Newton with backtracking on the max-norm residual.
fn newton_from(m: &SystemModel, mut x: Vec<f64>, u: &[f64]) -> Option<Vec<f64>> {
    let mut res = residual(m, &x, u)?;
    for _ in 0..MAX_NEWTON_STEPS {
        if res < RESIDUAL_TOL {
            return Some(x);
        }
        let f = m.eval_real(&x, u).ok()?;
        let j = m.eval_jacobian_real(&x, u).ok()?;
        let dx = solve_dense(j, f)?;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(xi, d)| xi - t * d).collect();
            if let Some(r) = residual(m, &trial, u) {
                if r.is_finite() && r < res {
                    accepted = Some((trial, r));
                    break;
                }
            }
            t *= 0.5;
        }
        let (next, r) = accepted?;
        x = next;
        res = r;
    }
    (res < RESIDUAL_TOL).then_some(x)
}

fn inside(m: &SystemModel, x: &[f64]) -> bool {
    m.x0()
        .components()
        .iter()
        .zip(x)
        .all(|(c, &v)| v >= c.lo() - 1e-9 && v <= c.hi() + 1e-9)
}

/// Parameter samples: the midpoint, both corners and `extra` random points.
pub fn parameter_samples(m: &SystemModel, extra: usize, seed: u64) -> Vec<Vec<f64>> {
    let u = m.u().components();
    if u.is_empty() {
        return vec![vec![]];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![
        u.iter().map(|c| 0.5 * (c.lo() + c.hi())).collect(),
        u.iter().map(|c| c.lo()).collect(),
        u.iter().map(|c| c.hi()).collect::<Vec<f64>>(),
    ];
    for _ in 0..extra {
        out.push(u.iter().map(|c| rng.gen_range(c.lo()..=c.hi())).collect());
    }
    out
}

/// Distinct roots in `X0` found from `starts` random starting points, for
/// the parameter value `u`.
pub fn roots_for(m: &SystemModel, u: &[f64], starts: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<Vec<f64>> = Vec::new();
    for _ in 0..starts {
        let x0: Vec<f64> = m
            .x0()
            .components()
            .iter()
            .map(|c| rng.gen_range(c.lo()..=c.hi()))
            .collect();
        if let Some(r) = newton_from(m, x0, u) {
            let fresh = found
                .iter()
                .all(|f| f.iter().zip(&r).any(|(a, b)| (a - b).abs() > DEDUP_TOL));
            if inside(m, &r) && fresh {
                found.push(r);
            }
        }
    }
    found
}

/// All `(x, u)` roots found over the parameter samples.
pub fn oracle_roots(
    m: &SystemModel,
    starts: usize,
    extra_params: usize,
    seed: u64,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    parameter_samples(m, extra_params, seed)
        .into_iter()
        .flat_map(|u| {
            roots_for(m, &u, starts, seed)
                .into_iter()
                .map(move |x| (x, u.clone()))
        })
        .collect()
}

/// True when `x` lies in some retained box, allowing `slack` for the
/// oracle's own residual.
pub fn covered(report: &RunReport, x: &[f64], slack: f64) -> bool {
    report.retained.iter().any(|b| {
        b.components()
            .iter()
            .zip(x)
            .all(|(c, &v)| v >= c.lo() - slack && v <= c.hi() + slack)
    })
}
