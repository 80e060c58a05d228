//! Solvers for min-max regret 0-1 integer programs with interval objective
//! coefficients: an exact cut-pooling decomposition, the AMU and SBA scenario
//! heuristics, and the branch-and-bound engine they share.

pub mod bench;
pub mod benders;
pub mod bruteforce;
pub mod error;
pub mod heuristics;
pub mod instance_io;
pub mod lp;
pub mod milp;
pub mod model;
pub mod regret;
pub mod report;

pub use benders::{solve_bda, DEFAULT_EPSILON};
pub use error::{Error, Result};
pub use heuristics::{solve_amu, solve_sba, SbaParams};
pub use model::{BinarySolution, IntervalIlpInstance, LinearConstraint, Scenario, Sense};
pub use regret::{robustness_cost, RegretEvaluation};
pub use bench::{run_algorithm, SolveOptions};
pub use report::{Algorithm, SolveReport, SolveStatus};
