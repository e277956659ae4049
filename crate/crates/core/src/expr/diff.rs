//! Symbolic differentiation with respect to a state variable.
//!
//! Derivative trees are built with constructors that drop additive zeros and
//! multiplicative ones and annihilate products with zero. These rewrites are
//! exact in interval arithmetic (`0·X = [0,0]`, `1·X = X`, `X + 0 = X`), so
//! they never change an enclosure; they only keep the trees small.

use super::Expr;

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == v)
}

fn s_add(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) {
        b
    } else if is_const(&b, 0.0) {
        a
    } else {
        Expr::add(a, b)
    }
}

fn s_sub(a: Expr, b: Expr) -> Expr {
    if is_const(&b, 0.0) {
        a
    } else if is_const(&a, 0.0) {
        Expr::neg(b)
    } else {
        Expr::sub(a, b)
    }
}

fn s_mul(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        Expr::Const(0.0)
    } else if is_const(&a, 1.0) {
        b
    } else if is_const(&b, 1.0) {
        a
    } else {
        Expr::mul(a, b)
    }
}

fn s_div(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) {
        Expr::Const(0.0)
    } else if is_const(&b, 1.0) {
        a
    } else {
        Expr::div(a, b)
    }
}

fn s_pow(a: Expr, k: u32) -> Expr {
    match k {
        0 => Expr::Const(1.0),
        1 => a,
        _ => Expr::pow(a, k),
    }
}

/// `∂e/∂x_i` as a new expression.
pub fn derivative(e: &Expr, i: usize) -> Expr {
    if !e.depends_on_state(i) {
        return Expr::Const(0.0);
    }
    match e {
        Expr::State(j) => Expr::Const(if *j == i { 1.0 } else { 0.0 }),
        Expr::Const(_) | Expr::Param(_) => Expr::Const(0.0),
        Expr::Neg(a) => {
            let da = derivative(a, i);
            if is_const(&da, 0.0) {
                da
            } else {
                Expr::neg(da)
            }
        }
        Expr::Add(a, b) => s_add(derivative(a, i), derivative(b, i)),
        Expr::Sub(a, b) => s_sub(derivative(a, i), derivative(b, i)),
        Expr::Mul(a, b) => {
            let left = s_mul(derivative(a, i), (**b).clone());
            let right = s_mul((**a).clone(), derivative(b, i));
            s_add(left, right)
        }
        Expr::Div(a, b) => {
            let da = derivative(a, i);
            let db = derivative(b, i);
            if is_const(&db, 0.0) {
                // (a/b)' = a'/b when b does not depend on x_i
                s_div(da, (**b).clone())
            } else {
                let num = s_sub(s_mul(da, (**b).clone()), s_mul((**a).clone(), db));
                s_div(num, s_pow((**b).clone(), 2))
            }
        }
        Expr::Pow(a, k) => {
            let da = derivative(a, i);
            let outer = s_mul(Expr::Const(f64::from(*k)), s_pow((**a).clone(), k - 1));
            s_mul(outer, da)
        }
    }
}
