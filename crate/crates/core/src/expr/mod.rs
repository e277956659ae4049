//! Expression trees for `f(x, u)`: real and natural-interval evaluation,
//! symbolic differentiation, and operation counting.

mod diff;
mod dsl;

use std::ops;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::counters::{ceil_log2, CostConvention, OpCounters};
use crate::error::EvalError;
use crate::interval::Interval;
use crate::round;

pub use diff::derivative;
pub use dsl::{parse_box, parse_expr, parse_system, print_expr, print_system};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Const(f64),
    State(usize),
    Param(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Literal folding: only applied when the result is exactly representable,
/// so a folded constant never differs from the interval it replaces.
fn fold_exact(lo: f64, hi: f64) -> Option<f64> {
    (lo == hi && lo.is_finite()).then_some(lo)
}

// Smart constructors that fold exact constants; not operator impls.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn state(i: usize) -> Expr {
        Expr::State(i)
    }

    pub fn param(j: usize) -> Expr {
        Expr::Param(j)
    }

    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(c) => Expr::Const(-c),
            e => Expr::Neg(Box::new(e)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
            if let Some(v) = fold_exact(round::add_down(*x, *y), round::add_up(*x, *y)) {
                return Expr::Const(v);
            }
        }
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
            if let Some(v) = fold_exact(round::sub_down(*x, *y), round::sub_up(*x, *y)) {
                return Expr::Const(v);
            }
        }
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
            if let Some(v) = fold_exact(round::mul_down(*x, *y), round::mul_up(*x, *y)) {
                return Expr::Const(v);
            }
        }
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
            if *y != 0.0 {
                if let Some(v) = fold_exact(round::div_down(*x, *y), round::div_up(*x, *y)) {
                    return Expr::Const(v);
                }
            }
        }
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, k: u32) -> Expr {
        if let Expr::Const(x) = &a {
            let iv = Interval::point(*x).powi(k);
            if let Some(v) = fold_exact(iv.lo(), iv.hi()) {
                return Expr::Const(v);
            }
        }
        Expr::Pow(Box::new(a), k)
    }

    pub fn powi(self, k: u32) -> Expr {
        Expr::pow(self, k)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Expr::Const(_) | Expr::State(_) | Expr::Param(_))
    }

    /// Largest state and parameter index referenced, if any.
    pub fn max_indices(&self) -> (Option<usize>, Option<usize>) {
        fn walk(e: &Expr, s: &mut Option<usize>, p: &mut Option<usize>) {
            match e {
                Expr::Const(_) => {}
                Expr::State(i) => *s = Some(s.map_or(*i, |m| m.max(*i))),
                Expr::Param(j) => *p = Some(p.map_or(*j, |m| m.max(*j))),
                Expr::Neg(a) | Expr::Pow(a, _) => walk(a, s, p),
                Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                    walk(a, s, p);
                    walk(b, s, p);
                }
            }
        }
        let (mut s, mut p) = (None, None);
        walk(self, &mut s, &mut p);
        (s, p)
    }

    /// Whether the expression depends on state variable `i`.
    pub fn depends_on_state(&self, i: usize) -> bool {
        match self {
            Expr::State(j) => *j == i,
            Expr::Const(_) | Expr::Param(_) => false,
            Expr::Neg(a) | Expr::Pow(a, _) => a.depends_on_state(i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.depends_on_state(i) || b.depends_on_state(i)
            }
        }
    }

    /// Number of nodes, leaves included.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::State(_) | Expr::Param(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) => 1 + a.size(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Relabels state and parameter indices.
    pub fn relabel(
        &self,
        state: &impl Fn(usize) -> usize,
        param: &impl Fn(usize) -> usize,
    ) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::State(i) => Expr::State(state(*i)),
            Expr::Param(j) => Expr::Param(param(*j)),
            Expr::Neg(a) => Expr::Neg(Box::new(a.relabel(state, param))),
            Expr::Pow(a, k) => Expr::Pow(Box::new(a.relabel(state, param)), *k),
            Expr::Add(a, b) => Expr::Add(
                Box::new(a.relabel(state, param)),
                Box::new(b.relabel(state, param)),
            ),
            Expr::Sub(a, b) => Expr::Sub(
                Box::new(a.relabel(state, param)),
                Box::new(b.relabel(state, param)),
            ),
            Expr::Mul(a, b) => Expr::Mul(
                Box::new(a.relabel(state, param)),
                Box::new(b.relabel(state, param)),
            ),
            Expr::Div(a, b) => Expr::Div(
                Box::new(a.relabel(state, param)),
                Box::new(b.relabel(state, param)),
            ),
        }
    }
}

/// Number of non-leaf nodes (`k` in the `C_F = c·k` cost model).
pub fn op_count(e: &Expr) -> u64 {
    op_count_with(e, CostConvention::Uniform)
}

/// Operation count under either cost convention.
pub fn op_count_with(e: &Expr, convention: CostConvention) -> u64 {
    match e {
        Expr::Const(_) | Expr::State(_) | Expr::Param(_) => 0,
        Expr::Neg(a) => 1 + op_count_with(a, convention),
        Expr::Pow(a, k) => {
            let own = match convention {
                CostConvention::Uniform => 1,
                CostConvention::Refined => ceil_log2(*k),
            };
            own + op_count_with(a, convention)
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            1 + op_count_with(a, convention) + op_count_with(b, convention)
        }
    }
}

/// Plain floating-point evaluation, the sampling oracle for enclosure tests.
///
/// Powers use the same squaring schedule as interval powers so the computed
/// value always lies in the natural extension evaluated on point boxes.
pub fn eval_real(e: &Expr, x: &[f64], u: &[f64]) -> Result<f64, EvalError> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::State(i) => *x.get(*i).ok_or(EvalError::Dimension {
            what: "state",
            expected: *i + 1,
            got: x.len(),
        })?,
        Expr::Param(j) => *u.get(*j).ok_or(EvalError::Dimension {
            what: "parameter",
            expected: *j + 1,
            got: u.len(),
        })?,
        Expr::Neg(a) => -eval_real(a, x, u)?,
        Expr::Add(a, b) => eval_real(a, x, u)? + eval_real(b, x, u)?,
        Expr::Sub(a, b) => eval_real(a, x, u)? - eval_real(b, x, u)?,
        Expr::Mul(a, b) => eval_real(a, x, u)? * eval_real(b, x, u)?,
        Expr::Div(a, b) => {
            let d = eval_real(b, x, u)?;
            if d == 0.0 {
                return Err(EvalError::DivByZero);
            }
            eval_real(a, x, u)? / d
        }
        Expr::Pow(a, k) => round::pow_nearest(eval_real(a, x, u)?, *k),
    })
}

/// Natural interval extension: every node replaced by its counted interval
/// operation. Division by an interval containing zero takes the hull of the
/// extended-division pieces (recorded in `extended_divs`).
///
/// Panics if a variable index is outside `x` or `u`.
pub fn eval_interval(e: &Expr, x: &[Interval], u: &[Interval], c: &mut OpCounters) -> Interval {
    match e {
        Expr::Const(v) => Interval::point(*v),
        Expr::State(i) => x[*i],
        Expr::Param(j) => u[*j],
        Expr::Neg(a) => {
            let a = eval_interval(a, x, u, c);
            arith::neg(a, c)
        }
        Expr::Add(a, b) => {
            let a = eval_interval(a, x, u, c);
            let b = eval_interval(b, x, u, c);
            arith::add(a, b, c)
        }
        Expr::Sub(a, b) => {
            let a = eval_interval(a, x, u, c);
            let b = eval_interval(b, x, u, c);
            arith::sub(a, b, c)
        }
        Expr::Mul(a, b) => {
            let a = eval_interval(a, x, u, c);
            let b = eval_interval(b, x, u, c);
            arith::mul(a, b, c)
        }
        Expr::Div(a, b) => {
            let a = eval_interval(a, x, u, c);
            let b = eval_interval(b, x, u, c);
            arith::div_hull(a, b, c)
        }
        Expr::Pow(a, k) => {
            let a = eval_interval(a, x, u, c);
            arith::powi(a, *k, c)
        }
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(self, rhs)
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Expr {
        Expr::State(i)
    }

    fn c(v: f64) -> Expr {
        Expr::Const(v)
    }

    fn example() -> Vec<Expr> {
        vec![x(0) + x(1), x(0) * (c(1.0) + x(1))]
    }

    #[test]
    fn literal_folding_only_when_exact() {
        assert_eq!(c(1.0) + c(2.0), c(3.0));
        assert_eq!(c(1.0) / c(4.0), c(0.25));
        assert!(matches!(c(1.0) / c(3.0), Expr::Div(..)));
        assert_eq!(-c(2.0), c(-2.0));
        assert_eq!(c(3.0).powi(2), c(9.0));
    }

    #[test]
    fn eval_real_examples() {
        let f = example();
        assert_eq!(eval_real(&f[0], &[1.0, 3.0], &[]).unwrap(), 4.0);
        assert_eq!(eval_real(&f[1], &[2.0, 4.0], &[]).unwrap(), 10.0);
        // 0.5 + a/(1 + y^10) - g z with y = 1, a = 4, g = 1, z = 2
        let hill = c(0.5) + Expr::Param(0) / (c(1.0) + x(0).powi(10)) - Expr::Param(1) * x(1);
        assert_eq!(eval_real(&hill, &[1.0, 2.0], &[4.0, 1.0]).unwrap(), 0.5);
        assert_eq!(
            eval_real(&(x(0) / x(1)), &[1.0, 0.0], &[]),
            Err(EvalError::DivByZero)
        );
    }

    #[test]
    fn eval_interval_examples() {
        let f = example();
        let b = [Interval::new(1.0, 2.0), Interval::new(3.0, 4.0)];
        let mut ctr = OpCounters::new();
        assert_eq!(
            eval_interval(&f[0], &b, &[], &mut ctr),
            Interval::new(4.0, 6.0)
        );
        assert_eq!(
            eval_interval(&f[1], &b, &[], &mut ctr),
            Interval::new(4.0, 10.0)
        );
        assert_eq!(ctr.interval_ops(CostConvention::Uniform), 3);
        assert_eq!(
            eval_interval(&c(2.5), &b, &[], &mut ctr),
            Interval::point(2.5)
        );
        let unit = [Interval::new(0.0, 1.0)];
        assert_eq!(
            eval_interval(&(x(0) - x(0)), &unit, &[], &mut ctr),
            Interval::new(-1.0, 1.0)
        );
    }

    #[test]
    fn op_count_examples() {
        let f = example();
        assert_eq!(op_count(&f[0]) + op_count(&f[1]), 3);
        assert_eq!(op_count(&c(1.0)), 0);
        assert_eq!(op_count(&(x(0) + x(1))), 1);
        let p = x(0).powi(10);
        assert_eq!(op_count(&p), 1);
        assert_eq!(op_count_with(&p, CostConvention::Refined), 4);
    }
}
