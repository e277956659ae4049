//! The five enclosure algorithms: bisection, subdivision with filtering,
//! constraint propagation, interval Newton and interval Krawczyk.
//!
//! Every solver consumes a [`SystemModel`] and a [`SolverConfig`] and
//! returns a [`RunReport`]. Adaptive methods use an explicit LIFO worklist
//! that visits boxes in the same order as the recursive formulation (left
//! half first).

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::contractor::Hc4Contractor;
use crate::counters::OpCounters;
use crate::error::SolveError;
use crate::ibox::{GridIter, IntervalBox};
use crate::interval::Interval;
use crate::linalg::{self, IntervalMatrix, RealMatrix};
use crate::model::{all_contain_zero, SystemModel};

/// Default safety cap on processed boxes.
pub const DEFAULT_MAX_BOXES: u64 = 200_000_000;
/// Environment variable overriding [`DEFAULT_MAX_BOXES`].
pub const MAX_BOXES_ENV: &str = "IVSOLVE_MAX_BOXES";
/// Tolerance used by constraint propagation when none is configured.
pub const DEFAULT_ICP_EPSILON: f64 = 1e-3;

/// `IVSOLVE_MAX_BOXES` if set to a positive integer, else the default.
pub fn default_max_boxes() -> u64 {
    std::env::var(MAX_BOXES_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_BOXES)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bisection,
    SubdivisionFilter,
    Icp,
    Newton,
    Krawczyk,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Bisection,
        Method::SubdivisionFilter,
        Method::Icp,
        Method::Newton,
        Method::Krawczyk,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Bisection => "bisection",
            Method::SubdivisionFilter => "subdivision",
            Method::Icp => "icp",
            Method::Newton => "newton",
            Method::Krawczyk => "krawczyk",
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, Method::SubdivisionFilter | Method::Icp)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = SolveError;

    fn from_str(s: &str) -> Result<Method, SolveError> {
        match s.to_ascii_lowercase().as_str() {
            "bisection" => Ok(Method::Bisection),
            "subdivision" | "subdivision_filter" | "subdivision-filter" | "sf" => {
                Ok(Method::SubdivisionFilter)
            }
            "icp" | "propagation" | "constraint_propagation" => Ok(Method::Icp),
            "newton" => Ok(Method::Newton),
            "krawczyk" => Ok(Method::Krawczyk),
            other => Err(SolveError::InvalidParameter(format!(
                "unknown method `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    /// Tolerance `ε` (bisection, Newton, Krawczyk; optional for ICP).
    pub epsilon: Option<f64>,
    /// Subdivisions per dimension (grid methods).
    pub m: Option<usize>,
    /// Iteration cap per box (`N_it`; the `l` of constraint propagation).
    pub n_it: Option<u32>,
    pub max_boxes: u64,
    pub seed: u64,
    /// When false, retained boxes are counted but not stored.
    pub store_retained: bool,
}

impl SolverConfig {
    pub fn new(method: Method) -> SolverConfig {
        SolverConfig {
            method,
            epsilon: None,
            m: None,
            n_it: None,
            max_boxes: default_max_boxes(),
            seed: 0,
            store_retained: true,
        }
    }

    pub fn eps(mut self, eps: f64) -> SolverConfig {
        self.epsilon = Some(eps);
        self
    }

    pub fn grid(mut self, m: usize) -> SolverConfig {
        self.m = Some(m);
        self
    }

    pub fn iterations(mut self, n_it: u32) -> SolverConfig {
        self.n_it = Some(n_it);
        self
    }

    pub fn max_boxes(mut self, max_boxes: u64) -> SolverConfig {
        self.max_boxes = max_boxes;
        self
    }

    pub fn seed(mut self, seed: u64) -> SolverConfig {
        self.seed = seed;
        self
    }

    pub fn store_retained(mut self, store: bool) -> SolverConfig {
        self.store_retained = store;
        self
    }

    fn epsilon_required(&self) -> Result<f64, SolveError> {
        let eps = self
            .epsilon
            .ok_or(SolveError::MissingParameter("epsilon"))?;
        check_epsilon(eps)
    }

    fn m_required(&self) -> Result<usize, SolveError> {
        match self.m.ok_or(SolveError::MissingParameter("m"))? {
            0 => Err(SolveError::InvalidParameter("m must be at least 1".into())),
            m => Ok(m),
        }
    }

    fn n_it_required(&self) -> Result<u32, SolveError> {
        match self.n_it.ok_or(SolveError::MissingParameter("n_it"))? {
            0 => Err(SolveError::InvalidParameter(
                "n_it must be at least 1".into(),
            )),
            k => Ok(k),
        }
    }

    /// Checks that the parameters required by the method are present.
    pub fn validate(&self) -> Result<(), SolveError> {
        match self.method {
            Method::Bisection => {
                self.epsilon_required()?;
            }
            Method::SubdivisionFilter => {
                self.m_required()?;
            }
            Method::Icp => {
                self.m_required()?;
                self.n_it_required()?;
                if let Some(eps) = self.epsilon {
                    check_epsilon(eps)?;
                }
            }
            Method::Newton | Method::Krawczyk => {
                self.epsilon_required()?;
                self.n_it_required()?;
            }
        }
        Ok(())
    }
}

fn check_epsilon(eps: f64) -> Result<f64, SolveError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(eps)
    } else {
        Err(SolveError::InvalidParameter(format!(
            "epsilon must be positive and finite, got {eps}"
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    /// The box budget ran out; the report holds partial results.
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub model: String,
    pub n: usize,
    pub config: SolverConfig,
    pub status: RunStatus,
    pub n_proc: u64,
    pub n_keep: u64,
    /// Inner iterations per box that entered the iteration branch. Every
    /// grid box does so under constraint propagation; zero means Newton or
    /// Krawczyk never passed the determinant gate.
    pub avg_iter: f64,
    pub total_iter: u64,
    /// Boxes on which the inner iteration ran at least once.
    pub iterated_boxes: u64,
    /// Largest worklist length seen (adaptive methods).
    pub peak_worklist: u64,
    /// Retained boxes sorted lexicographically; empty when storage is off.
    pub retained: Vec<IntervalBox>,
    pub counters: OpCounters,
    pub wall_time_s: f64,
}

impl RunReport {
    fn start(model: &SystemModel, cfg: &SolverConfig) -> RunReport {
        RunReport {
            method: cfg.method,
            model: model.name().to_string(),
            n: model.n(),
            config: cfg.clone(),
            status: RunStatus::Complete,
            n_proc: 0,
            n_keep: 0,
            avg_iter: 0.0,
            total_iter: 0,
            iterated_boxes: 0,
            peak_worklist: 0,
            retained: Vec::new(),
            counters: OpCounters::new(),
            wall_time_s: 0.0,
        }
    }

    fn keep(&mut self, b: IntervalBox) {
        self.n_keep += 1;
        if self.config.store_retained {
            self.retained.push(b);
        }
    }

    fn finish(mut self, started: Instant) -> RunReport {
        self.retained.sort_by(|a, b| a.lex_cmp(b));
        self.avg_iter = if self.iterated_boxes > 0 {
            self.total_iter as f64 / self.iterated_boxes as f64
        } else {
            0.0
        };
        self.wall_time_s = started.elapsed().as_secs_f64();
        self
    }

    pub fn budget_exceeded(&self) -> bool {
        self.status == RunStatus::BudgetExceeded
    }

    /// Inner iterations per processed box.
    pub fn avg_iter_per_processed_box(&self) -> f64 {
        if self.n_proc == 0 {
            0.0
        } else {
            self.total_iter as f64 / self.n_proc as f64
        }
    }

    /// True when some retained box contains `x`.
    pub fn encloses(&self, x: &[f64]) -> bool {
        self.retained.iter().any(|b| b.contains_point(x))
    }
}

/// Runs the configured method.
pub fn solve(model: &SystemModel, cfg: &SolverConfig) -> Result<RunReport, SolveError> {
    match cfg.method {
        Method::Bisection => solve_bisection(model, cfg),
        Method::SubdivisionFilter => solve_subdivision_filter(model, cfg),
        Method::Icp => solve_icp(model, cfg),
        Method::Newton => solve_newton(model, cfg),
        Method::Krawczyk => solve_krawczyk(model, cfg),
    }
}

fn with_method(model_cfg: &SolverConfig, method: Method) -> SolverConfig {
    SolverConfig {
        method,
        ..model_cfg.clone()
    }
}

/// Recursive interval bisection with a depth-first worklist.
pub fn solve_bisection(model: &SystemModel, cfg: &SolverConfig) -> Result<RunReport, SolveError> {
    let cfg = with_method(cfg, Method::Bisection);
    cfg.validate()?;
    let eps = cfg.epsilon_required()?;
    let started = Instant::now();
    let mut r = RunReport::start(model, &cfg);
    let u = model.u().components();
    let mut c = OpCounters::new();
    let mut stack = vec![model.x0().clone()];
    while let Some(x) = stack.pop() {
        if r.n_proc >= cfg.max_boxes {
            r.status = RunStatus::BudgetExceeded;
            break;
        }
        r.n_proc += 1;
        let f = model.eval(x.components(), u, &mut c);
        if !all_contain_zero(&f) {
            continue;
        }
        let d = x.diam(&mut c).unwrap_or(0.0);
        if d <= eps {
            r.keep(x);
            continue;
        }
        match x.bisect(x.widest_axis()) {
            Ok((left, right)) => {
                stack.push(right);
                stack.push(left);
                r.peak_worklist = r.peak_worklist.max(stack.len() as u64);
            }
            Err(_) => r.keep(x),
        }
    }
    r.counters = c;
    Ok(r.finish(started))
}

/// Uniform `m^n` grid filtered by the inclusion test.
pub fn solve_subdivision_filter(
    model: &SystemModel,
    cfg: &SolverConfig,
) -> Result<RunReport, SolveError> {
    let cfg = with_method(cfg, Method::SubdivisionFilter);
    cfg.validate()?;
    let m = cfg.m_required()?;
    let started = Instant::now();
    let mut r = RunReport::start(model, &cfg);
    let u = model.u().components();
    // The gate on X0 is not a grid box and is kept out of the run counters.
    let mut gate = OpCounters::new();
    if !all_contain_zero(&model.eval(model.x0().components(), u, &mut gate)) {
        return Ok(r.finish(started));
    }
    let grid =
        GridIter::new(model.x0(), m).map_err(|e| SolveError::InvalidParameter(e.to_string()))?;
    if grid.total() > cfg.max_boxes {
        r.status = RunStatus::BudgetExceeded;
        return Ok(r.finish(started));
    }
    let mut c = OpCounters::new();
    for xf in grid {
        r.n_proc += 1;
        if all_contain_zero(&model.eval(xf.components(), u, &mut c)) {
            r.keep(xf);
        }
    }
    r.counters = c;
    Ok(r.finish(started))
}

/// Constraint propagation: HC4 sweeps on each box of a uniform grid.
pub fn solve_icp(model: &SystemModel, cfg: &SolverConfig) -> Result<RunReport, SolveError> {
    let cfg = with_method(cfg, Method::Icp);
    cfg.validate()?;
    let m = cfg.m_required()?;
    let l = cfg.n_it_required()?;
    let tol = cfg.epsilon.unwrap_or(DEFAULT_ICP_EPSILON) / 10.0;
    let started = Instant::now();
    let mut r = RunReport::start(model, &cfg);
    let grid =
        GridIter::new(model.x0(), m).map_err(|e| SolveError::InvalidParameter(e.to_string()))?;
    if grid.total() > cfg.max_boxes {
        r.status = RunStatus::BudgetExceeded;
        return Ok(r.finish(started));
    }
    let contractor = Hc4Contractor::new(model);
    let mut c = OpCounters::new();
    for xi in grid {
        r.n_proc += 1;
        r.iterated_boxes += 1;
        let mut x_old = xi;
        let mut d_old = x_old.diam(&mut c).unwrap_or(0.0);
        let mut x_new = x_old.clone();
        for _ in 0..l {
            r.total_iter += 1;
            x_new = contractor.contract(&x_old, &mut c).ibox;
            if x_new.is_empty() {
                break;
            }
            let d_new = x_new.diam(&mut c).unwrap_or(0.0);
            if d_old - d_new <= tol {
                break;
            }
            x_old = x_new.clone();
            d_old = d_new;
        }
        if !x_new.is_empty() {
            r.keep(x_new);
        }
    }
    r.counters = c;
    Ok(r.finish(started))
}

/// Interval Newton method with bisection fallback.
pub fn solve_newton(model: &SystemModel, cfg: &SolverConfig) -> Result<RunReport, SolveError> {
    newton_like(model, &with_method(cfg, Method::Newton))
}

/// Interval Krawczyk method with bisection fallback.
pub fn solve_krawczyk(model: &SystemModel, cfg: &SolverConfig) -> Result<RunReport, SolveError> {
    newton_like(model, &with_method(cfg, Method::Krawczyk))
}

/// Per-box linear operator, fixed while the box is iterated.
enum Step {
    /// Enclosure of `J(X)⁻¹`.
    Newton(IntervalMatrix),
    /// `Y = mid(J)⁻¹` and `I − Y·J(X)`.
    Krawczyk(RealMatrix, IntervalMatrix),
}

fn prepare_step(method: Method, j: &IntervalMatrix, c: &mut OpCounters) -> Option<Step> {
    match method {
        Method::Newton => linalg::inverse_gauss(j, c).ok().map(Step::Newton),
        _ => {
            let y = linalg::real_inverse(&linalg::mid_matrix(j)).ok()?;
            c.inversions += 1;
            let yj = linalg::real_mat_interval_mat(&y, j, c).ok()?;
            let n = j.n();
            let mut e = IntervalMatrix::filled(n, Interval::ZERO);
            for a in 0..n {
                for b in 0..n {
                    let id = if a == b {
                        Interval::ONE
                    } else {
                        Interval::ZERO
                    };
                    e.set(a, b, arith::sub(id, yj.get(a, b), c));
                }
            }
            Some(Step::Krawczyk(y, e))
        }
    }
}

/// One Newton or Krawczyk image of `x` (before intersection).
fn apply_step(
    step: &Step,
    model: &SystemModel,
    x: &IntervalBox,
    c: &mut OpCounters,
) -> Option<Vec<Interval>> {
    let x0 = x.midpoint().ok()?;
    let x0_iv: Vec<Interval> = x0.iter().map(|&v| Interval::point(v)).collect();
    let fmid = model.eval(&x0_iv, model.u().components(), c);
    match step {
        Step::Newton(inv) => {
            let corr = linalg::mat_vec(inv, &fmid, c).ok()?;
            Some(
                x0_iv
                    .iter()
                    .zip(corr)
                    .map(|(&m, d)| arith::sub(m, d, c))
                    .collect(),
            )
        }
        Step::Krawczyk(y, e) => {
            let yf = linalg::real_mat_vec(y, &fmid, c).ok()?;
            let dx: Vec<Interval> = x
                .components()
                .iter()
                .zip(&x0_iv)
                .map(|(&xi, &mi)| arith::sub(xi, mi, c))
                .collect();
            let lin = linalg::mat_vec(e, &dx, c).ok()?;
            Some(
                x0_iv
                    .iter()
                    .zip(yf)
                    .zip(lin)
                    .map(|((&m, a), b)| {
                        let t = arith::sub(m, a, c);
                        arith::add(t, b, c)
                    })
                    .collect(),
            )
        }
    }
}

fn newton_like(model: &SystemModel, cfg: &SolverConfig) -> Result<RunReport, SolveError> {
    cfg.validate()?;
    let eps = cfg.epsilon_required()?;
    let n_it = cfg.n_it_required()?;
    let tol = eps / 10.0;
    let started = Instant::now();
    let mut r = RunReport::start(model, cfg);
    let u = model.u().components();
    let mut c = OpCounters::new();
    let mut stack = vec![model.x0().clone()];
    while let Some(x) = stack.pop() {
        if r.n_proc >= cfg.max_boxes {
            r.status = RunStatus::BudgetExceeded;
            break;
        }
        r.n_proc += 1;
        if !all_contain_zero(&model.eval(x.components(), u, &mut c)) {
            continue;
        }
        let j = model.eval_jacobian(x.components(), u, &mut c);
        let regular = matches!(linalg::det_gauss(&j, &mut c), Ok(d) if !d.contains_zero());
        let step = if regular {
            prepare_step(cfg.method, &j, &mut c)
        } else {
            None
        };
        if let Some(step) = step {
            r.iterated_boxes += 1;
            let mut xc = x;
            let mut d_old = xc.diam(&mut c).unwrap_or(0.0);
            let mut x_new = xc.clone();
            for _ in 0..n_it {
                r.total_iter += 1;
                let image = match apply_step(&step, model, &xc, &mut c) {
                    Some(v) => v,
                    None => {
                        x_new = xc.clone();
                        break;
                    }
                };
                x_new = IntervalBox::new(image).intersect(&xc);
                if x_new.is_empty() {
                    break;
                }
                let d_new = x_new.diam(&mut c).unwrap_or(0.0);
                if d_old - d_new < tol {
                    break;
                }
                xc = x_new.clone();
                d_old = d_new;
            }
            if !x_new.is_empty() {
                r.keep(x_new);
            }
            continue;
        }
        let d = x.diam(&mut c).unwrap_or(0.0);
        if d > eps {
            match x.bisect(x.widest_axis()) {
                Ok((left, right)) => {
                    stack.push(right);
                    stack.push(left);
                    r.peak_worklist = r.peak_worklist.max(stack.len() as u64);
                }
                Err(_) => r.keep(x),
            }
        } else {
            r.keep(x);
        }
    }
    r.counters = c;
    Ok(r.finish(started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    fn sqrt2(lo: f64, hi: f64) -> SystemModel {
        SystemModel::new(
            "sqrt2",
            vec![Expr::State(0).powi(2) - Expr::Const(2.0)],
            IntervalBox::from_bounds(&[(lo, hi)]),
            IntervalBox::new(vec![]),
        )
        .unwrap()
    }

    #[test]
    fn one_newton_step_on_sqrt2() {
        let m = sqrt2(1.0, 2.0);
        let mut c = OpCounters::new();
        let j = m.eval_jacobian(m.x0().components(), &[], &mut c);
        let step = prepare_step(Method::Newton, &j, &mut c).unwrap();
        let img = apply_step(&step, &m, m.x0(), &mut c).unwrap();
        let x = IntervalBox::new(img).intersect(m.x0());
        assert_eq!(x[0], Interval::new(1.375, 1.4375));
    }

    #[test]
    fn one_krawczyk_step_on_sqrt2() {
        let m = sqrt2(1.0, 2.0);
        let mut c = OpCounters::new();
        let j = m.eval_jacobian(m.x0().components(), &[], &mut c);
        let step = prepare_step(Method::Krawczyk, &j, &mut c).unwrap();
        let img = apply_step(&step, &m, m.x0(), &mut c).unwrap();
        let x = IntervalBox::new(img).intersect(m.x0());
        assert!((x[0].lo() - 1.25).abs() < 1e-12);
        assert!((x[0].hi() - 19.0 / 12.0).abs() < 1e-12);
        assert!(x[0].contains_point(std::f64::consts::SQRT_2));
    }

    #[test]
    fn excluded_domain_is_discarded_immediately() {
        let m = sqrt2(3.0, 4.0);
        for method in [Method::Bisection, Method::Newton, Method::Krawczyk] {
            let r = solve(&m, &SolverConfig::new(method).eps(1e-3).iterations(10)).unwrap();
            assert_eq!((r.n_proc, r.n_keep, r.total_iter), (1, 0, 0), "{method}");
        }
        let r = solve(&m, &SolverConfig::new(Method::SubdivisionFilter).grid(4)).unwrap();
        assert_eq!((r.n_proc, r.n_keep), (0, 0));
    }

    #[test]
    fn tiny_domain_is_retained_whole() {
        let m = sqrt2(1.414, 1.4143);
        let r = solve(&m, &SolverConfig::new(Method::Bisection).eps(1e-3)).unwrap();
        assert_eq!((r.n_proc, r.n_keep), (1, 1));
        let r = solve(&m, &SolverConfig::new(Method::SubdivisionFilter).grid(1)).unwrap();
        assert_eq!((r.n_proc, r.n_keep), (1, 1));
    }

    #[test]
    fn icp_single_iteration_average() {
        let m = sqrt2(0.0, 2.0);
        let r = solve(&m, &SolverConfig::new(Method::Icp).grid(7).iterations(1)).unwrap();
        assert_eq!(r.n_proc, 7);
        assert_eq!(r.avg_iter, 1.0);
        assert!(r.encloses(&[std::f64::consts::SQRT_2]));
    }

    #[test]
    fn missing_parameters_are_reported() {
        let m = sqrt2(0.0, 2.0);
        assert_eq!(
            solve(&m, &SolverConfig::new(Method::Bisection)),
            Err(SolveError::MissingParameter("epsilon"))
        );
        assert_eq!(
            solve(&m, &SolverConfig::new(Method::Icp).grid(3)),
            Err(SolveError::MissingParameter("n_it"))
        );
    }

    #[test]
    fn budget_is_flagged() {
        let m = sqrt2(0.0, 2.0);
        let r = solve(
            &m,
            &SolverConfig::new(Method::Bisection).eps(1e-9).max_boxes(10),
        )
        .unwrap();
        assert!(r.budget_exceeded());
        assert_eq!(r.n_proc, 10);
    }
}
