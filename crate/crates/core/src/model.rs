//! Systems `f(x, u) = 0` with a search box `X0` and a parameter box `U`.

use serde::Serialize;

use crate::counters::{CostConvention, OpCounters};
use crate::error::{EvalError, ModelError};
use crate::expr::{derivative, eval_interval, eval_real, op_count_with, Expr};
use crate::ibox::IntervalBox;
use crate::interval::Interval;
use crate::linalg::IntervalMatrix;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemModel {
    name: String,
    state_names: Vec<String>,
    param_names: Vec<String>,
    equations: Vec<Expr>,
    x0: IntervalBox,
    u: IntervalBox,
    #[serde(skip)]
    jacobian: Vec<Vec<Expr>>,
}

impl SystemModel {
    /// Builds a model with default variable names `x1..xn` and `u1..up`.
    pub fn new(
        name: impl Into<String>,
        equations: Vec<Expr>,
        x0: IntervalBox,
        u: IntervalBox,
    ) -> Result<SystemModel, ModelError> {
        let states = (1..=x0.dim()).map(|i| format!("x{i}")).collect();
        let params = (1..=u.dim()).map(|j| format!("u{j}")).collect();
        SystemModel::with_names(name, states, params, equations, x0, u)
    }

    pub fn with_names(
        name: impl Into<String>,
        state_names: Vec<String>,
        param_names: Vec<String>,
        equations: Vec<Expr>,
        x0: IntervalBox,
        u: IntervalBox,
    ) -> Result<SystemModel, ModelError> {
        let n = state_names.len();
        let p = param_names.len();
        if n == 0 || equations.len() != n {
            return Err(ModelError::DimensionMismatch(format!(
                "{} equations for {n} states",
                equations.len()
            )));
        }
        if x0.dim() != n || u.dim() != p {
            return Err(ModelError::DimensionMismatch(format!(
                "X0 has dimension {} and U has dimension {}, expected {n} and {p}",
                x0.dim(),
                u.dim()
            )));
        }
        if x0.is_empty() || u.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        for eq in &equations {
            let (max_state, max_param) = eq.max_indices();
            if let Some(i) = max_state.filter(|&i| i >= n) {
                return Err(ModelError::IndexOutOfBounds {
                    kind: "state",
                    index: i,
                    dim: n,
                });
            }
            if let Some(j) = max_param.filter(|&j| j >= p) {
                return Err(ModelError::IndexOutOfBounds {
                    kind: "parameter",
                    index: j,
                    dim: p,
                });
            }
        }
        let jacobian = jacobian_exprs(&equations, n);
        Ok(SystemModel {
            name: name.into(),
            state_names,
            param_names,
            equations,
            x0,
            u,
            jacobian,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.state_names.len()
    }

    /// Parameter dimension.
    pub fn p(&self) -> usize {
        self.param_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn equations(&self) -> &[Expr] {
        &self.equations
    }

    pub fn x0(&self) -> &IntervalBox {
        &self.x0
    }

    pub fn u(&self) -> &IntervalBox {
        &self.u
    }

    /// Symbolic Jacobian, `jacobian()[i][j] = ∂f_i/∂x_j`.
    pub fn jacobian(&self) -> &[Vec<Expr>] {
        &self.jacobian
    }

    pub fn with_x0(&self, x0: IntervalBox) -> Result<SystemModel, ModelError> {
        SystemModel::with_names(
            self.name.clone(),
            self.state_names.clone(),
            self.param_names.clone(),
            self.equations.clone(),
            x0,
            self.u.clone(),
        )
    }

    pub fn with_u(&self, u: IntervalBox) -> Result<SystemModel, ModelError> {
        SystemModel::with_names(
            self.name.clone(),
            self.state_names.clone(),
            self.param_names.clone(),
            self.equations.clone(),
            self.x0.clone(),
            u,
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> SystemModel {
        self.name = name.into();
        self
    }

    /// Total operation count `k` over all equations.
    pub fn op_count(&self, convention: CostConvention) -> u64 {
        self.equations
            .iter()
            .map(|e| op_count_with(e, convention))
            .sum()
    }

    /// `F(X, U)`, one counted system evaluation.
    pub fn eval(&self, x: &[Interval], u: &[Interval], c: &mut OpCounters) -> Vec<Interval> {
        c.f_evals += 1;
        self.equations
            .iter()
            .map(|e| eval_interval(e, x, u, c))
            .collect()
    }

    pub fn eval_box(&self, x: &IntervalBox, c: &mut OpCounters) -> Vec<Interval> {
        self.eval(x.components(), self.u.components(), c)
    }

    pub fn eval_real(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>, EvalError> {
        if x.len() != self.n() {
            return Err(EvalError::Dimension {
                what: "state",
                expected: self.n(),
                got: x.len(),
            });
        }
        if u.len() != self.p() {
            return Err(EvalError::Dimension {
                what: "parameter",
                expected: self.p(),
                got: u.len(),
            });
        }
        self.equations.iter().map(|e| eval_real(e, x, u)).collect()
    }

    /// Interval Jacobian `J(X, U)`, one counted Jacobian evaluation.
    pub fn eval_jacobian(
        &self,
        x: &[Interval],
        u: &[Interval],
        c: &mut OpCounters,
    ) -> IntervalMatrix {
        c.j_evals += 1;
        let n = self.n();
        let mut entries = Vec::with_capacity(n * n);
        for row in &self.jacobian {
            for d in row {
                entries.push(eval_interval(d, x, u, c));
            }
        }
        IntervalMatrix::from_entries(n, entries)
    }

    pub fn eval_jacobian_real(&self, x: &[f64], u: &[f64]) -> Result<Vec<Vec<f64>>, EvalError> {
        self.jacobian
            .iter()
            .map(|row| row.iter().map(|d| eval_real(d, x, u)).collect())
            .collect()
    }
}

fn jacobian_exprs(equations: &[Expr], n: usize) -> Vec<Vec<Expr>> {
    equations
        .iter()
        .map(|e| (0..n).map(|j| derivative(e, j)).collect())
        .collect()
}

/// `0 ∈ F_i` for every component.
pub fn all_contain_zero(f: &[Interval]) -> bool {
    f.iter().all(Interval::contains_zero)
}
