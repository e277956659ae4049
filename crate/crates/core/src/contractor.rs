//! Forward-backward (HC4) contraction of boxes against `f_i(x, u) = 0`.

use crate::arith;
use crate::counters::OpCounters;
use crate::expr::Expr;
use crate::ibox::IntervalBox;
use crate::interval::Interval;
use crate::model::SystemModel;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Node {
    Const(f64),
    State(usize),
    Param(usize),
    Neg(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Pow(usize, u32),
}

impl Node {
    fn children(&self) -> (Option<usize>, Option<usize>) {
        match *self {
            Node::Const(_) | Node::State(_) | Node::Param(_) => (None, None),
            Node::Neg(a) | Node::Pow(a, _) => (Some(a), None),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                (Some(a), Some(b))
            }
        }
    }
}

/// An expression flattened in post-order; children precede parents.
#[derive(Clone, Debug)]
struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    fn compile(e: &Expr) -> Tape {
        let mut nodes = Vec::with_capacity(e.size());
        push(e, &mut nodes);
        Tape { nodes }
    }
}

fn push(e: &Expr, out: &mut Vec<Node>) -> usize {
    let node = match e {
        Expr::Const(v) => Node::Const(*v),
        Expr::State(i) => Node::State(*i),
        Expr::Param(j) => Node::Param(*j),
        Expr::Neg(a) => Node::Neg(push(a, out)),
        Expr::Add(a, b) => {
            let (a, b) = (push(a, out), push(b, out));
            Node::Add(a, b)
        }
        Expr::Sub(a, b) => {
            let (a, b) = (push(a, out), push(b, out));
            Node::Sub(a, b)
        }
        Expr::Mul(a, b) => {
            let (a, b) = (push(a, out), push(b, out));
            Node::Mul(a, b)
        }
        Expr::Div(a, b) => {
            let (a, b) = (push(a, out), push(b, out));
            Node::Div(a, b)
        }
        Expr::Pow(a, k) => Node::Pow(push(a, out), *k),
    };
    out.push(node);
    out.len() - 1
}

/// Outcome of one contractor call.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionResult {
    /// Contracted box; empty when infeasibility was certified.
    pub ibox: IntervalBox,
    pub changed: bool,
    /// `box_diam(input) − box_diam(output)`; the input diameter when empty.
    pub width_reduction: f64,
}

/// HC4 contractor for all equations of a model, with compiled tapes.
#[derive(Clone, Debug)]
pub struct Hc4Contractor {
    tapes: Vec<Tape>,
    u: Vec<Interval>,
}

impl Hc4Contractor {
    pub fn new(m: &SystemModel) -> Hc4Contractor {
        Hc4Contractor {
            tapes: m.equations().iter().map(Tape::compile).collect(),
            u: m.u().components().to_vec(),
        }
    }

    /// One sweep over the equations in model order.
    pub fn contract(&self, x: &IntervalBox, c: &mut OpCounters) -> ContractionResult {
        c.contractor_calls += 1;
        let before = uncounted_diam(x);
        let mut comps = x.components().to_vec();
        let mut scratch = Vec::new();
        for tape in &self.tapes {
            if !revise(tape, Interval::ZERO, &mut comps, &self.u, &mut scratch, c) {
                let empty = IntervalBox::new(vec![Interval::EMPTY; x.dim()]);
                return ContractionResult {
                    ibox: empty,
                    changed: true,
                    width_reduction: before,
                };
            }
        }
        let out = IntervalBox::new(comps);
        let changed = out != *x;
        let after = uncounted_diam(&out);
        ContractionResult {
            ibox: out,
            changed,
            width_reduction: (before - after).max(0.0),
        }
    }
}

fn uncounted_diam(x: &IntervalBox) -> f64 {
    x.components()
        .iter()
        .map(|c| c.diam().unwrap_or(0.0))
        .fold(0.0, f64::max)
}

/// Forward evaluation, root intersection with `target`, backward projection.
/// Narrows `x` in place; returns `false` when some node became empty.
fn revise(
    tape: &Tape,
    target: Interval,
    x: &mut [Interval],
    u: &[Interval],
    v: &mut Vec<Interval>,
    c: &mut OpCounters,
) -> bool {
    v.clear();
    for node in &tape.nodes {
        let val = match *node {
            Node::Const(k) => Interval::point(k),
            Node::State(i) => x[i],
            Node::Param(j) => u[j],
            Node::Neg(a) => arith::neg(v[a], c),
            Node::Add(a, b) => arith::add(v[a], v[b], c),
            Node::Sub(a, b) => arith::sub(v[a], v[b], c),
            Node::Mul(a, b) => arith::mul(v[a], v[b], c),
            Node::Div(a, b) => arith::div_hull(v[a], v[b], c),
            Node::Pow(a, k) => arith::powi(v[a], k, c),
        };
        v.push(val);
    }
    let root = v.len() - 1;
    v[root] = v[root].intersect(&target);
    if v[root].is_empty() {
        return false;
    }
    for idx in (0..tape.nodes.len()).rev() {
        let z = v[idx];
        if z.is_empty() {
            return false;
        }
        match tape.nodes[idx] {
            Node::Const(_) | Node::Param(_) => {}
            Node::State(i) => {
                x[i] = x[i].intersect(&z);
                if x[i].is_empty() {
                    return false;
                }
            }
            Node::Neg(a) => {
                v[a] = v[a].intersect(&arith::neg(z, c));
            }
            Node::Add(a, b) => {
                v[a] = v[a].intersect(&arith::sub(z, v[b], c));
                v[b] = v[b].intersect(&arith::sub(z, v[a], c));
            }
            Node::Sub(a, b) => {
                v[a] = v[a].intersect(&arith::add(z, v[b], c));
                v[b] = v[b].intersect(&arith::sub(v[a], z, c));
            }
            Node::Mul(a, b) => {
                v[a] = factor_preimage(z, v[b], v[a], c);
                v[b] = factor_preimage(z, v[a], v[b], c);
            }
            Node::Div(a, b) => {
                v[a] = v[a].intersect(&arith::mul(z, v[b], c));
                v[b] = factor_preimage(v[a], z, v[b], c);
            }
            Node::Pow(a, k) => {
                v[a] = z.pow_preimage(k, v[a]);
            }
        }
        let (a, b) = tape.nodes[idx].children();
        if a.is_some_and(|a| v[a].is_empty()) || b.is_some_and(|b| v[b].is_empty()) {
            return false;
        }
    }
    true
}

/// `{y ∈ domain : ∃ w ∈ other, w·y ∈ z}`, enclosed. When both `z` and
/// `other` contain zero every `y` qualifies, which plain division misses.
fn factor_preimage(z: Interval, other: Interval, domain: Interval, c: &mut OpCounters) -> Interval {
    if z.contains_zero() && other.contains_zero() {
        return domain;
    }
    arith::extended_div(z, other, c).intersect_hull(&domain)
}

/// Contracts the state box `x` with respect to `e(x, u) ∈ target`.
/// Parameters are read but never narrowed.
pub fn hc4_revise(
    e: &Expr,
    target: Interval,
    x: &IntervalBox,
    u: &IntervalBox,
    c: &mut OpCounters,
) -> IntervalBox {
    let tape = Tape::compile(e);
    let mut comps = x.components().to_vec();
    let mut scratch = Vec::new();
    if revise(&tape, target, &mut comps, u.components(), &mut scratch, c) {
        IntervalBox::new(comps)
    } else {
        IntervalBox::new(vec![Interval::EMPTY; x.dim()])
    }
}

/// One contractor call: `hc4_revise` for every equation in model order.
pub fn contract_system(m: &SystemModel, x: &IntervalBox, c: &mut OpCounters) -> ContractionResult {
    Hc4Contractor::new(m).contract(x, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_constraint() -> Expr {
        Expr::State(0) + Expr::State(1)
    }

    #[test]
    fn projection_examples() {
        let mut c = OpCounters::new();
        let u = IntervalBox::new(vec![]);
        let x = IntervalBox::from_bounds(&[(0.0, 5.0), (-10.0, -8.0)]);
        assert!(hc4_revise(&sum_constraint(), Interval::ZERO, &x, &u, &mut c).is_empty());
        let x = IntervalBox::from_bounds(&[(0.0, 5.0), (-3.0, -1.0)]);
        assert_eq!(
            hc4_revise(&sum_constraint(), Interval::ZERO, &x, &u, &mut c),
            IntervalBox::from_bounds(&[(1.0, 3.0), (-3.0, -1.0)])
        );
        let p = IntervalBox::point(&[2.0, -2.0]);
        assert_eq!(
            hc4_revise(&sum_constraint(), Interval::ZERO, &p, &u, &mut c),
            p
        );
    }

    #[test]
    fn square_root_projection() {
        // x^2 - 2 = 0 on [0, 2] contracts to an enclosure of sqrt(2).
        let e = Expr::State(0).powi(2) - Expr::Const(2.0);
        let mut c = OpCounters::new();
        let x = IntervalBox::from_bounds(&[(0.0, 2.0)]);
        let r = hc4_revise(&e, Interval::ZERO, &x, &IntervalBox::new(vec![]), &mut c);
        assert!(r[0].contains_point(std::f64::consts::SQRT_2));
        assert!(r[0].diam().unwrap() < 1e-12);
    }

    #[test]
    fn product_with_zero_factor_keeps_other_factor() {
        // x * y = 0 holds at x = 0 for every y.
        let e = Expr::State(0) * Expr::State(1);
        let mut c = OpCounters::new();
        let x = IntervalBox::from_bounds(&[(-1.0, 1.0), (2.0, 3.0)]);
        let r = hc4_revise(&e, Interval::ZERO, &x, &IntervalBox::new(vec![]), &mut c);
        assert_eq!(r, IntervalBox::from_bounds(&[(0.0, 0.0), (2.0, 3.0)]));
        let e = Expr::State(0) * (Expr::Const(1.0) + Expr::State(1));
        let x = IntervalBox::cube(-0.25, 0.25, 2);
        let r = hc4_revise(&e, Interval::ZERO, &x, &IntervalBox::new(vec![]), &mut c);
        assert!(r.contains_point(&[0.0, 0.0]));
    }

    #[test]
    fn sweep_counts_one_call_and_keeps_points() {
        let m = SystemModel::new(
            "t",
            vec![
                Expr::State(0) - Expr::State(1),
                Expr::State(1) - Expr::Const(0.5),
            ],
            IntervalBox::from_bounds(&[(0.5, 0.5), (0.0, 1.0)]),
            IntervalBox::new(vec![]),
        )
        .unwrap();
        let mut c = OpCounters::new();
        let r = contract_system(&m, m.x0(), &mut c);
        assert_eq!(c.contractor_calls, 1);
        assert_eq!(r.ibox[0], Interval::point(0.5));
        assert!(r.ibox.subset_of(m.x0()));
    }
}
