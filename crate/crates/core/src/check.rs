//! Fast invariant battery with an exact rational oracle.
//!
//! Every property draws its inputs from a seeded ChaCha stream, so a run is
//! reproducible from `(seed, trials)`. Exact values are computed with
//! `BigRational`, which represents every finite `f64` exactly.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::counters::OpCounters;
use crate::expr::{eval_interval, Expr};
use crate::ibox::{subdivide_uniform, IntervalBox};
use crate::interval::Interval;
use crate::linalg::{self, IntervalMatrix};
use crate::models::known_root_suite;
use crate::solvers::{solve, Method, SolverConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckConfig {
    pub seed: u64,
    /// Trials per interval operation.
    pub op_trials: usize,
    /// Expression/box pairs for the natural-extension properties.
    pub expr_trials: usize,
    /// Random matrices for the linear-algebra enclosures.
    pub matrix_trials: usize,
    pub laplace_max_n: usize,
    /// Seeded solver configurations per known-root system.
    pub solver_configs: usize,
}

impl Default for CheckConfig {
    fn default() -> CheckConfig {
        CheckConfig {
            seed: 0,
            op_trials: 10_000,
            expr_trials: 1_000,
            matrix_trials: 1_000,
            laplace_max_n: 5,
            solver_configs: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub trials: u64,
    pub failures: u64,
    /// Description of the first counterexample, if any.
    pub first_failure: Option<String>,
}

impl PropertyResult {
    fn new(name: impl Into<String>) -> PropertyResult {
        PropertyResult {
            name: name.into(),
            trials: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub results: Vec<PropertyResult>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(PropertyResult::passed)
    }

    pub fn failing(&self) -> Vec<&PropertyResult> {
        self.results.iter().filter(|r| !r.passed()).collect()
    }
}

/// Runs the full battery.
pub fn run_checks(cfg: &CheckConfig) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut results = containment_trials(&mut rng, cfg.op_trials);
    let (iso, range) = extension_trials(&mut rng, cfg.expr_trials);
    results.push(iso);
    results.push(range);
    results.push(subdivision_refinement_trials(
        &mut rng,
        cfg.expr_trials / 10 + 1,
    ));
    results.push(laplace_recurrence(&mut rng, cfg.laplace_max_n));
    results.push(linalg_enclosure_trials(&mut rng, cfg.matrix_trials));
    results.push(known_root_soundness(cfg.seed, cfg.solver_configs));
    CheckReport {
        seed: cfg.seed,
        results,
    }
}

/// Exact rational value of a finite `f64`.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

/// True when the exact value `q` lies in `iv` (infinite ends are open-ended).
pub fn interval_contains(iv: &Interval, q: &BigRational) -> bool {
    if iv.is_empty() {
        return false;
    }
    let lo_ok = iv.lo() == f64::NEG_INFINITY || rational(iv.lo()) <= *q;
    let hi_ok = iv.hi() == f64::INFINITY || *q <= rational(iv.hi());
    lo_ok && hi_ok
}

/// Exact value of `e` at a real point; `None` on division by zero.
pub fn eval_rational(e: &Expr, x: &[f64], u: &[f64]) -> Option<BigRational> {
    Some(match e {
        Expr::Const(v) => rational(*v),
        Expr::State(i) => rational(x[*i]),
        Expr::Param(j) => rational(u[*j]),
        Expr::Neg(a) => -eval_rational(a, x, u)?,
        Expr::Add(a, b) => eval_rational(a, x, u)? + eval_rational(b, x, u)?,
        Expr::Sub(a, b) => eval_rational(a, x, u)? - eval_rational(b, x, u)?,
        Expr::Mul(a, b) => eval_rational(a, x, u)? * eval_rational(b, x, u)?,
        Expr::Div(a, b) => {
            let d = eval_rational(b, x, u)?;
            if d.is_zero() {
                return None;
            }
            eval_rational(a, x, u)? / d
        }
        Expr::Pow(a, k) => num_traits::pow(eval_rational(a, x, u)?, *k as usize),
    })
}

fn random_scale(rng: &mut ChaCha8Rng) -> f64 {
    [1e-3, 0.1, 1.0, 10.0, 1e3, 1e8][rng.gen_range(0..6)]
}

/// A random interval, occasionally a single point.
pub fn random_interval(rng: &mut ChaCha8Rng) -> Interval {
    let s = random_scale(rng);
    let lo = s * rng.gen_range(-1.0..1.0);
    if rng.gen_bool(0.05) {
        return Interval::point(lo);
    }
    Interval::new(lo, lo + s * rng.gen_range(0.0..1.0))
}

/// A random representable point of `iv`, sometimes an endpoint.
pub fn random_point(rng: &mut ChaCha8Rng, iv: &Interval) -> f64 {
    match rng.gen_range(0..10) {
        0 => iv.lo(),
        1 => iv.hi(),
        _ => {
            let t: f64 = rng.gen_range(0.0..=1.0);
            (iv.lo() + t * (iv.hi() - iv.lo())).clamp(iv.lo(), iv.hi())
        }
    }
}

fn same_sign_interval(rng: &mut ChaCha8Rng) -> Interval {
    let s = random_scale(rng);
    let lo = s * rng.gen_range(1e-3..1.0);
    let hi = lo + s * rng.gen_range(0.0..1.0);
    if rng.gen_bool(0.5) {
        Interval::new(lo, hi)
    } else {
        Interval::new(-hi, -lo)
    }
}

fn zero_straddling_interval(rng: &mut ChaCha8Rng) -> Interval {
    let s = random_scale(rng);
    match rng.gen_range(0..4) {
        0 => Interval::new(0.0, s * rng.gen_range(1e-3..1.0)),
        1 => Interval::new(-s * rng.gen_range(1e-3..1.0), 0.0),
        _ => Interval::new(-s * rng.gen_range(1e-3..1.0), s * rng.gen_range(1e-3..1.0)),
    }
}

/// Containment sampling for add, sub, mul, div, extended division and
/// intersection: the exact result of the real operation on sampled points
/// must lie in the computed interval result.
pub fn containment_trials(rng: &mut ChaCha8Rng, trials: usize) -> Vec<PropertyResult> {
    let mut add = PropertyResult::new("containment/add");
    let mut sub = PropertyResult::new("containment/sub");
    let mut mul = PropertyResult::new("containment/mul");
    let mut div = PropertyResult::new("containment/div");
    let mut ext = PropertyResult::new("containment/extended_div");
    let mut meet = PropertyResult::new("containment/intersect");
    for _ in 0..trials {
        let (a, b) = (random_interval(rng), random_interval(rng));
        let (x, y) = (random_point(rng, &a), random_point(rng, &b));
        let (qx, qy) = (rational(x), rational(y));
        let r = a + b;
        add.record(interval_contains(&r, &(&qx + &qy)), || {
            format!("{a} + {b} = {r} misses {x} + {y}")
        });
        let r = a - b;
        sub.record(interval_contains(&r, &(&qx - &qy)), || {
            format!("{a} - {b} = {r} misses {x} - {y}")
        });
        let r = a * b;
        mul.record(interval_contains(&r, &(&qx * &qy)), || {
            format!("{a} * {b} = {r} misses {x} * {y}")
        });

        let d = same_sign_interval(rng);
        let yd = random_point(rng, &d);
        let ok = match a.checked_div(d) {
            Ok(r) => interval_contains(&r, &(&qx / rational(yd))),
            Err(_) => false,
        };
        div.record(ok, || format!("{a} / {d} misses {x} / {yd}"));

        let z = zero_straddling_interval(rng);
        let yz = random_point(rng, &z);
        if yz != 0.0 {
            let pieces = a.extended_div(z);
            let q = &qx / rational(yz);
            let ok = pieces.pieces().iter().any(|p| interval_contains(p, &q));
            ext.record(ok, || format!("{a} / {z} = {pieces:?} misses {x} / {yz}"));
        }

        let (c1, c2) = (random_interval(rng), random_interval(rng));
        let c1 = Interval::new(x - (c1.hi() - c1.lo()), x + (c2.hi() - c2.lo()));
        let c1 = c1.hull(&Interval::point(x));
        let r = a.intersect(&c1);
        meet.record(interval_contains(&r, &qx), || {
            format!("{a} ∩ {c1} = {r} misses {x}")
        });
    }
    vec![add, sub, mul, div, ext, meet]
}

/// A dyadic number `k/8` with `|k/8| <= 4`, so grid cut points stay exact.
fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    f64::from(rng.gen_range(-32i32..=32)) / 8.0
}

fn dyadic_interval(rng: &mut ChaCha8Rng) -> Interval {
    let (a, b) = (dyadic(rng), dyadic(rng));
    Interval::new(a.min(b), a.max(b))
}

fn dyadic_box(rng: &mut ChaCha8Rng, n: usize) -> IntervalBox {
    IntervalBox::new((0..n).map(|_| dyadic_interval(rng)).collect())
}

/// A random expression in `n` states with at most `depth` levels.
pub fn random_expr(rng: &mut ChaCha8Rng, n: usize, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.7) {
            Expr::State(rng.gen_range(0..n))
        } else {
            Expr::Const(dyadic(rng))
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_expr(rng, n, depth - 1);
    match rng.gen_range(0..7) {
        0 => Expr::Add(Box::new(sub(rng)), Box::new(sub(rng))),
        1 => Expr::Sub(Box::new(sub(rng)), Box::new(sub(rng))),
        2 | 3 => Expr::Mul(Box::new(sub(rng)), Box::new(sub(rng))),
        4 => Expr::Div(Box::new(sub(rng)), Box::new(sub(rng))),
        5 => Expr::Neg(Box::new(sub(rng))),
        _ => Expr::Pow(Box::new(sub(rng)), rng.gen_range(2..=4)),
    }
}

fn sub_box(rng: &mut ChaCha8Rng, x: &IntervalBox) -> IntervalBox {
    IntervalBox::new(
        x.components()
            .iter()
            .map(|c| {
                let a = random_point(rng, c);
                let b = random_point(rng, c);
                Interval::new(a.min(b), a.max(b))
            })
            .collect(),
    )
}

fn eval_box(e: &Expr, x: &IntervalBox) -> Interval {
    let mut c = OpCounters::new();
    eval_interval(e, x.components(), &[], &mut c)
}

/// Inclusion isotonicity (`Y ⊆ X ⇒ F(Y) ⊆ F(X)`) and range enclosure
/// (`f(x) ∈ F(X)` for sampled `x ∈ X`) on random expression/box pairs.
pub fn extension_trials(rng: &mut ChaCha8Rng, trials: usize) -> (PropertyResult, PropertyResult) {
    let mut iso = PropertyResult::new("isotonicity");
    let mut range = PropertyResult::new("range_enclosure");
    for _ in 0..trials {
        let n = rng.gen_range(1..=3);
        let e = random_expr(rng, n, 3);
        let x = dyadic_box(rng, n);
        let y = sub_box(rng, &x);
        let (fx, fy) = (eval_box(&e, &x), eval_box(&e, &y));
        iso.record(fy.subset_of(&fx), || {
            format!("F({y}) = {fy} not within F({x}) = {fx} for {e:?}")
        });
        for _ in 0..4 {
            let p: Vec<f64> = y
                .components()
                .iter()
                .map(|c| random_point(rng, c))
                .collect();
            if let Some(q) = eval_rational(&e, &p, &[]) {
                range.record(interval_contains(&fy, &q), || {
                    format!("f({p:?}) escapes F({y}) = {fy} for {e:?}")
                });
            }
        }
    }
    (iso, range)
}

/// Refinement by uniform subdivision: the hull of `F` over an `m`-grid is
/// nested and non-widening as `m` runs through 1, 2, 4, 8.
pub fn subdivision_refinement_trials(rng: &mut ChaCha8Rng, trials: usize) -> PropertyResult {
    let mut res = PropertyResult::new("subdivision_refinement");
    for _ in 0..trials {
        let n = rng.gen_range(1..=2);
        let e = random_expr(rng, n, 3);
        let x = dyadic_box(rng, n);
        let mut prev: Option<Interval> = None;
        for m in [1usize, 2, 4, 8] {
            let hull = subdivide_uniform(&x, m)
                .expect("valid grid")
                .iter()
                .map(|b| eval_box(&e, b))
                .fold(Interval::EMPTY, |acc, v| acc.hull(&v));
            if let Some(p) = prev {
                res.record(hull.subset_of(&p), || {
                    format!("m={m}: {hull} not within {p} for {e:?} on {x}")
                });
            }
            prev = Some(hull);
        }
    }
    res
}

fn random_interval_matrix(rng: &mut ChaCha8Rng, n: usize) -> IntervalMatrix {
    let dominant = rng.gen_bool(0.5);
    let rad = [0.0, 1e-3, 0.05, 0.3][rng.gen_range(0..4)];
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut c: f64 = rng.gen_range(-2.0..2.0);
            if dominant && i == j {
                c += 4.0 * n as f64 * c.signum();
            }
            let r = rad * rng.gen_range(0.0..1.0);
            entries.push(Interval::new(c - r, c + r));
        }
    }
    IntervalMatrix::from_entries(n, entries)
}

/// Exact determinant by fraction-valued Gaussian elimination.
pub fn rational_det(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= m[k][k].clone();
        for r in k + 1..n {
            let f = &m[r][k] / &m[k][k];
            for c in k..n {
                let v = &f * &m[k][c];
                m[r][c] -= v;
            }
        }
    }
    det
}

/// Exact inverse by Gauss-Jordan; `None` when singular.
pub fn rational_inverse(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(p, k);
        let piv = m[k][k].clone();
        for v in m[k].iter_mut() {
            *v /= piv.clone();
        }
        for r in 0..n {
            if r != k && !m[r][k].is_zero() {
                let f = m[r][k].clone();
                for c in 0..2 * n {
                    let v = &f * &m[k][c];
                    m[r][c] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Point matrices sampled from random interval matrices (`n <= 4`) must
/// have their exact determinant and inverse inside every enclosure that
/// the corresponding routine produced.
pub fn linalg_enclosure_trials(rng: &mut ChaCha8Rng, trials: usize) -> PropertyResult {
    let mut res = PropertyResult::new("linalg_enclosure");
    for _ in 0..trials {
        let n = rng.gen_range(1..=4);
        let a = random_interval_matrix(rng, n);
        let point: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| random_point(rng, &a.get(i, j))).collect())
            .collect();
        let exact: Vec<Vec<BigRational>> = point
            .iter()
            .map(|r| r.iter().map(|&v| rational(v)).collect())
            .collect();
        let det = rational_det(&exact);
        let inv = rational_inverse(&exact);
        let mut c = OpCounters::new();
        for (name, d) in [
            ("det_laplace", linalg::det_laplace(&a, &mut c)),
            ("det_gauss", linalg::det_gauss(&a, &mut c)),
        ] {
            if let Ok(d) = d {
                res.record(interval_contains(&d, &det), || {
                    format!("{name} = {d} misses det of {point:?}")
                });
            }
        }
        let Some(inv) = inv else { continue };
        for (name, m) in [
            ("inverse_gauss", linalg::inverse_gauss(&a, &mut c)),
            ("krawczyk_inverse", linalg::krawczyk_inverse(&a, &mut c)),
            ("inverse_adjugate", linalg::inverse_adjugate(&a, &mut c)),
        ] {
            if let Ok(m) = m {
                let ok =
                    (0..n).all(|i| (0..n).all(|j| interval_contains(&m.get(i, j), &inv[i][j])));
                res.record(ok, || format!("{name} misses the inverse of {point:?}"));
            }
        }
    }
    res
}

/// The Laplace determinant performs exactly `M(n) = n (M(n−1) + 1)`
/// interval multiplications, `M(1) = 0`.
pub fn laplace_recurrence(rng: &mut ChaCha8Rng, max_n: usize) -> PropertyResult {
    let mut res = PropertyResult::new("laplace_recurrence");
    let mut expected = 0u64;
    for n in 1..=max_n.min(linalg::LAPLACE_DET_CAP) {
        if n > 1 {
            expected = n as u64 * (expected + 1);
        }
        let a = random_interval_matrix(rng, n);
        let mut c = OpCounters::new();
        let ok = linalg::det_laplace(&a, &mut c).is_ok() && c.iv_mul == expected;
        res.record(ok, || {
            format!("n={n}: {} muls, expected {expected}", c.iv_mul)
        });
    }
    res
}

/// Solver configuration number `k` of the seeded soundness sweep.
pub fn seeded_config(method: Method, seed: u64, k: usize) -> SolverConfig {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let eps = 10f64.powf(rng.gen_range(-3.0..-1.0));
    let m = rng.gen_range(1..=40);
    let n_it = rng.gen_range(1..=100);
    let cfg = SolverConfig::new(method).seed(seed).max_boxes(5_000_000);
    match method {
        Method::Bisection => cfg.eps(eps),
        Method::SubdivisionFilter => cfg.grid(m),
        Method::Icp => cfg.grid(m).iterations(n_it),
        Method::Newton | Method::Krawczyk => cfg.eps(eps).iterations(n_it),
    }
}

/// Every analytic root of the known-root systems lies in the union of the
/// retained boxes, for all methods and `configs` seeded configurations.
pub fn known_root_soundness(seed: u64, configs: usize) -> PropertyResult {
    let mut res = PropertyResult::new("known_root_soundness");
    for case in known_root_suite() {
        for method in Method::ALL {
            for k in 0..configs {
                let cfg = seeded_config(method, seed, k);
                let model = &case.model;
                match solve(model, &cfg) {
                    Ok(report) => {
                        for (xr, _) in &case.roots {
                            let ok = !report.budget_exceeded() && report.encloses(xr);
                            res.record(ok, || {
                                format!("{method} ({cfg:?}) lost root {xr:?} of {}", model.name())
                            });
                        }
                    }
                    Err(e) => res.record(false, || format!("{method} on {}: {e}", model.name())),
                }
            }
        }
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::round;

    #[test]
    fn rational_oracle_basics() {
        let m = vec![
            vec![rational(2.0), rational(1.0)],
            vec![rational(1.0), rational(3.0)],
        ];
        assert_eq!(rational_det(&m), rational(5.0));
        let inv = rational_inverse(&m).unwrap();
        assert_eq!(inv[0][0], rational(3.0) / rational(5.0));
        let e = Expr::State(0).powi(2) - Expr::Const(2.0);
        assert_eq!(eval_rational(&e, &[1.5], &[]), Some(rational(0.25)));
    }

    #[test]
    fn small_battery_passes() {
        let cfg = CheckConfig {
            seed: 3,
            op_trials: 500,
            expr_trials: 100,
            matrix_trials: 100,
            laplace_max_n: 5,
            solver_configs: 1,
        };
        let report = run_checks(&cfg);
        assert!(report.all_passed(), "{:?}", report.failing());
    }

    #[test]
    fn injected_fault_is_caught() {
        round::inject_rounding_fault(true);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let res = containment_trials(&mut rng, 200);
        round::inject_rounding_fault(false);
        assert!(!res[0].passed());
    }
}
