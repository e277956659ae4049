//! Built-in benchmark systems and small systems with known roots.

use crate::error::ModelError;
use crate::expr::Expr;
use crate::ibox::IntervalBox;
use crate::interval::Interval;
use crate::model::SystemModel;

/// Hill exponent of the regulatory network.
pub const HILL_EXPONENT: u32 = 10;

fn x(i: usize) -> Expr {
    Expr::State(i)
}

fn p(j: usize) -> Expr {
    Expr::Param(j)
}

fn k(v: f64) -> Expr {
    Expr::Const(v)
}

/// Ring of `n` Hill-repressed genes:
/// `f_i = 0.5 + α_i / (1 + x_{i−1}^10) − γ x_i`, where `x_0` means `x_n`.
///
/// Parameters are `(α_1, …, α_n, γ)` over `[3.8, 4.2]^n × [0.95, 1.05]`,
/// and the search box is `[0, 10]^n`.
pub fn hill_network(n: usize) -> Result<SystemModel, ModelError> {
    if n < 2 {
        return Err(ModelError::DimensionMismatch(format!(
            "the Hill ring needs n >= 2, got {n}"
        )));
    }
    let gamma = p(n);
    let equations = (0..n)
        .map(|i| {
            let pred = (i + n - 1) % n;
            k(0.5) + p(i) / (k(1.0) + x(pred).powi(HILL_EXPONENT)) - gamma.clone() * x(i)
        })
        .collect();
    let mut u = vec![Interval::new(3.8, 4.2); n];
    u.push(Interval::new(0.95, 1.05));
    let states = (1..=n).map(|i| format!("x{i}")).collect();
    let mut params: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    params.push("g".into());
    SystemModel::with_names(
        format!("hill{n}"),
        states,
        params,
        equations,
        IntervalBox::cube(0.0, 10.0, n),
        IntervalBox::new(u),
    )
}

/// Names and ranges of the winner-take-all parameters, in model order.
pub const WTA_PARAMS: [(&str, f64, f64); 8] = [
    ("Dtot", 1.98, 2.02),
    ("Etot", 0.099, 0.101),
    ("KM", 0.0099, 0.0101),
    ("KMp", 0.099, 0.101),
    ("kcat", 0.0297, 0.0303),
    ("kcatp", 0.01188, 0.01212),
    ("kdeff", 0.00198, 0.00202),
    ("KA", 0.99, 1.01),
];

/// Transcriptional winner-take-all network of `n` switches competing for a
/// shared polymerase pool.
///
/// With `σ_i = x_i / (K_A + x_i)` the ON and OFF template concentrations are
/// `[D_i x_i] = D_tot σ_i` and `[D_i] = D_tot K_A / (K_A + x_i)`; the loads are
/// `L = Σ_j ([D_j x_j]/K_M + [D_j]/K'_M)` and `L_d = Σ_j x_j`, and
///
/// `f_i = E_tot/(1 + L) · (k_cat/K_M [D_i x_i] + k'_cat/K'_M [D_i]) − k_deff x_i/(1 + L_d)`.
///
/// The search box is `[0, 2]^n`.
pub fn wta_network(n: usize) -> Result<SystemModel, ModelError> {
    if n < 1 {
        return Err(ModelError::DimensionMismatch(
            "the WTA network needs n >= 1".into(),
        ));
    }
    let (d_tot, e_tot, k_m, k_mp, k_cat, k_catp, k_deff, k_a) =
        (p(0), p(1), p(2), p(3), p(4), p(5), p(6), p(7));
    let on = |i: usize| d_tot.clone() * x(i) / (k_a.clone() + x(i));
    let off = |i: usize| d_tot.clone() * k_a.clone() / (k_a.clone() + x(i));
    let load = (0..n)
        .map(|j| on(j) / k_m.clone() + off(j) / k_mp.clone())
        .reduce(|a, b| a + b)
        .unwrap_or(k(0.0));
    let load_d = (0..n).map(x).reduce(|a, b| a + b).unwrap_or(k(0.0));
    let equations = (0..n)
        .map(|i| {
            let production = e_tot.clone() / (k(1.0) + load.clone())
                * (k_cat.clone() / k_m.clone() * on(i) + k_catp.clone() / k_mp.clone() * off(i));
            let degradation = k_deff.clone() * x(i) / (k(1.0) + load_d.clone());
            production - degradation
        })
        .collect();
    let u = WTA_PARAMS
        .iter()
        .map(|&(_, lo, hi)| Interval::new(lo, hi))
        .collect();
    SystemModel::with_names(
        format!("wta{n}"),
        (1..=n).map(|i| format!("x{i}")).collect(),
        WTA_PARAMS
            .iter()
            .map(|&(name, _, _)| name.to_string())
            .collect(),
        equations,
        IntervalBox::cube(0.0, 2.0, n),
        IntervalBox::new(u),
    )
}

/// A system together with roots known in closed form.
#[derive(Clone, Debug)]
pub struct KnownRootCase {
    pub model: SystemModel,
    /// Pairs `(x, u)` with `f(x, u) = 0`, `x ∈ X0` and `u ∈ U`.
    pub roots: Vec<(Vec<f64>, Vec<f64>)>,
}

fn no_params() -> IntervalBox {
    IntervalBox::new(vec![])
}

fn case(model: Result<SystemModel, ModelError>, roots: Vec<(Vec<f64>, Vec<f64>)>) -> KnownRootCase {
    KnownRootCase {
        model: model.expect("built-in model is well formed"),
        roots,
    }
}

/// Small systems with analytically known roots.
pub fn known_root_suite() -> Vec<KnownRootCase> {
    let sqrt2 = SystemModel::new(
        "sqrt2",
        vec![x(0).powi(2) - k(2.0)],
        IntervalBox::from_bounds(&[(0.0, 2.0)]),
        no_params(),
    );
    let linear = SystemModel::new(
        "linear2",
        vec![k(2.0) * x(0) + x(1) - k(3.0), x(0) - x(1)],
        IntervalBox::cube(-5.0, 5.0, 2),
        no_params(),
    );
    let quadratics = SystemModel::new(
        "quadratics3",
        vec![
            x(0).powi(2) - k(1.0),
            x(1).powi(2) - k(4.0),
            x(2).powi(2) - k(9.0),
        ],
        IntervalBox::cube(-4.0, 4.0, 3),
        no_params(),
    );
    let mut quad_roots = Vec::new();
    for mask in 0..8u32 {
        let s = |bit: u32| if mask & (1 << bit) == 0 { 1.0 } else { -1.0 };
        quad_roots.push((vec![s(0), 2.0 * s(1), 3.0 * s(2)], vec![]));
    }
    let example = SystemModel::new(
        "example",
        vec![x(0) + x(1), x(0) * (k(1.0) + x(1))],
        IntervalBox::cube(-3.0, 3.0, 2),
        no_params(),
    );
    let param_sqrt = SystemModel::new(
        "param_sqrt",
        vec![x(0).powi(2) - p(0)],
        IntervalBox::from_bounds(&[(0.0, 2.0)]),
        IntervalBox::from_bounds(&[(2.0, 3.0)]),
    );
    vec![
        case(sqrt2, vec![(vec![2f64.sqrt()], vec![])]),
        case(linear, vec![(vec![1.0, 1.0], vec![])]),
        case(quadratics, quad_roots),
        case(
            example,
            vec![(vec![0.0, 0.0], vec![]), (vec![1.0, -1.0], vec![])],
        ),
        case(
            param_sqrt,
            [2.0f64, 2.5, 3.0]
                .iter()
                .map(|&u| (vec![u.sqrt()], vec![u]))
                .collect(),
        ),
    ]
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 7] = [
    "hill",
    "wta",
    "sqrt2",
    "linear2",
    "quadratics3",
    "example",
    "param_sqrt",
];

/// Looks up a built-in model; `n` sizes the parameterized networks.
pub fn builtin(name: &str, n: usize) -> Result<SystemModel, ModelError> {
    match name {
        "hill" => hill_network(n),
        "wta" => wta_network(n),
        other => known_root_suite()
            .into_iter()
            .find(|c| c.model.name() == other)
            .map(|c| c.model)
            .ok_or_else(|| {
                ModelError::DimensionMismatch(format!("unknown built-in model `{other}`"))
            }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eval_real, parse_system, print_system};

    #[test]
    fn hill_shape() {
        let m = hill_network(2).unwrap();
        assert_eq!((m.n(), m.p()), (2, 3));
        assert_eq!(m.x0().volume(), 100.0);
        let f1 = eval_real(&m.equations()[0], &[1.0, 1.0], &[4.0, 4.0, 1.0]).unwrap();
        assert_eq!(f1, 1.5);
        assert!(hill_network(1).is_err());
    }

    #[test]
    fn wta_shape() {
        let m = wta_network(2).unwrap();
        assert_eq!(m.x0(), &IntervalBox::cube(0.0, 2.0, 2));
        assert_eq!(m.u()[7], Interval::new(0.99, 1.01));
        assert_eq!(m.p(), 8);
    }

    #[test]
    fn wta_production_positive_at_origin() {
        let m = wta_network(3).unwrap();
        let mid: Vec<f64> = m.u().midpoint().unwrap();
        let f = m.eval_real(&[0.0; 3], &mid).unwrap();
        assert!(f.iter().all(|&v| v > 0.0), "{f:?}");
    }

    #[test]
    fn known_roots_are_roots() {
        for c in known_root_suite() {
            for (xr, ur) in &c.roots {
                assert!(c.model.x0().contains_point(xr));
                assert!(c.model.u().contains_point(ur));
                let f = c.model.eval_real(xr, ur).unwrap();
                assert!(
                    f.iter().all(|v| v.abs() < 1e-12),
                    "{}: {f:?}",
                    c.model.name()
                );
            }
        }
    }

    #[test]
    fn builtins_round_trip_through_text() {
        for m in [hill_network(3).unwrap(), wta_network(2).unwrap()] {
            assert_eq!(parse_system(&print_system(&m)).unwrap(), m);
        }
    }
}
