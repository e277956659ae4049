//! Validated enclosure of all steady states of uncertain nonlinear systems
//! `f(x, u) = 0`, `x ∈ X0`, `u ∈ U`, with outward-rounded interval
//! arithmetic and instrumented operation counts.
//!
//! ```
//! use ivsolve_core::models::hill_network;
//! use ivsolve_core::solvers::{solve, Method, SolverConfig};
//!
//! let model = hill_network(2).unwrap();
//! let cfg = SolverConfig::new(Method::Newton).eps(1e-3).iterations(100);
//! let report = solve(&model, &cfg).unwrap();
//! assert!(report.n_keep >= 1);
//! ```

pub mod arith;
pub mod bench;
pub mod check;
pub mod contractor;
pub mod counters;
pub mod error;
pub mod expr;
pub mod ibox;
pub mod interval;
pub mod linalg;
pub mod model;
pub mod models;
pub mod round;
pub mod solvers;

pub use counters::{CostConvention, OpCounters};
pub use error::*;
pub use expr::Expr;
pub use ibox::IntervalBox;
pub use interval::Interval;
pub use model::SystemModel;
