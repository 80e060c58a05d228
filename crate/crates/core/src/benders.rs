//! Exact decomposition for min-max regret.
//!
//! The master problem
//!
//! ```text
//! min  Σ u_i x_i − θ
//! s.t. θ ≤ Σ (l_i + (u_i − l_i) x_i) y_i    for every y in the pool
//!      x feasible, binary
//! ```
//!
//! relaxes the full formulation, which has one row per feasible `y`. Its
//! optimum is a lower bound; evaluating `Z` at the master's solution gives an
//! upper bound and the adversary `y` that becomes the next cut.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::milp::{solve_milp, MilpProblem, MilpStatus};
use crate::model::{BinarySolution, IntervalIlpInstance, LinearConstraint};
use crate::regret::{robustness_cost, scenario_at, EvaluationStatus, RegretEvaluation};
use crate::report::{Algorithm, BoundRecord, SolveReport, SolveStatus};

pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Adversary solutions materialised so far, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CutPool {
    cuts: Vec<BinarySolution>,
}

impl CutPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` and leaves the pool untouched if `y` is already pooled.
    pub fn insert(&mut self, y: BinarySolution) -> bool {
        if self.contains(&y) {
            return false;
        }
        self.cuts.push(y);
        true
    }

    pub fn contains(&self, y: &BinarySolution) -> bool {
        self.cuts.contains(y)
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BinarySolution> {
        self.cuts.iter()
    }
}

/// Loop bookkeeping; `lower ≤ upper` up to tolerance throughout.
#[derive(Debug, Clone)]
pub struct BendersState {
    pub lower: f64,
    pub upper: f64,
    pub incumbent: RegretEvaluation,
    pub pool: CutPool,
    pub iterations: usize,
    pub elapsed: Duration,
}

/// Master problem over the pooled cuts. Column `n` is `θ`.
pub fn build_master(
    instance: &IntervalIlpInstance,
    pool: &CutPool,
    time_limit: Duration,
) -> Result<MilpProblem> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let n = instance.n();
    let mut rows = instance.le_rows();
    for y in pool.iter() {
        instance.check_dim(y.len())?;
        let mut terms = Vec::new();
        let mut rhs = 0.0;
        for i in (0..n).filter(|&i| y.is_set(i)) {
            let spread = instance.upper[i] - instance.lower[i];
            if spread != 0.0 {
                terms.push((i, -spread));
            }
            rhs += instance.lower[i];
        }
        terms.push((n, 1.0));
        rows.push(LinearConstraint::le(terms, rhs));
    }
    Ok(MilpProblem {
        objective: instance.upper.clone(),
        theta_objective: Some(-1.0),
        rows,
        time_limit,
        cutoff: None,
    })
}

pub fn solve_bda(
    instance: &IntervalIlpInstance,
    epsilon: f64,
    time_limit: Duration,
) -> Result<SolveReport> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParams(format!("epsilon must be non-negative, got {epsilon}")));
    }
    instance.validate()?;
    let start = Instant::now();
    let remaining = || time_limit.saturating_sub(start.elapsed());
    let finish = |mut report: SolveReport| {
        report.elapsed = start.elapsed();
        Ok(report)
    };

    // Seed: the mean-scenario optimum bounds θ in the first master and
    // doubles as the feasibility check.
    let mean = scenario_at(instance, 0.5)?;
    let seed = solve_milp(&MilpProblem::for_scenario(instance, &mean, remaining()))?;
    let seed_x = match (seed.status, seed.x) {
        (MilpStatus::Infeasible, _) => {
            return finish(SolveReport::empty(Algorithm::Bda, SolveStatus::Infeasible))
        }
        (_, None) => return finish(SolveReport::empty(Algorithm::Bda, SolveStatus::TimeLimit)),
        (_, Some(x)) => x,
    };
    let seed_eval = robustness_cost(instance, &seed_x, remaining())?;
    let mut pool = CutPool::new();
    pool.insert(seed_x);

    let mut state = BendersState {
        lower: 0.0f64.min(seed_eval.z),
        upper: seed_eval.z,
        incumbent: seed_eval,
        pool,
        iterations: 0,
        elapsed: start.elapsed(),
    };
    let mut trace = vec![BoundRecord {
        iteration: 0,
        lower: state.lower,
        upper: state.upper,
    }];

    let status = loop {
        if remaining().is_zero() {
            break SolveStatus::TimeLimit;
        }
        state.iterations += 1;
        let mut master = build_master(instance, &state.pool, remaining())?;
        master.cutoff = Some(state.upper);
        let result = solve_milp(&master)?;

        let candidate = match result.status {
            MilpStatus::Infeasible => {
                // No master point beats the incumbent: the bounds meet.
                state.lower = state.upper;
                None
            }
            MilpStatus::TimeLimit => {
                state.lower = state.lower.max(result.dual_bound.min(state.upper));
                None
            }
            MilpStatus::Optimal => {
                state.lower = state.lower.max(result.objective.min(state.upper));
                result.x
            }
        };

        let mut evaluation_timed_out = false;
        let mut adversary = None;
        if let Some(x) = candidate {
            let eval = robustness_cost(instance, &x, remaining())?;
            evaluation_timed_out = eval.status == EvaluationStatus::TimeLimit;
            adversary = Some(eval.adversary.clone());
            if eval.z < state.upper {
                state.upper = eval.z;
                state.lower = state.lower.min(state.upper);
                state.incumbent = eval;
            }
        }
        state.elapsed = start.elapsed();
        trace.push(BoundRecord {
            iteration: state.iterations,
            lower: state.lower,
            upper: state.upper,
        });

        if state.upper - state.lower <= epsilon {
            break SolveStatus::Optimal;
        }
        if result.status == MilpStatus::TimeLimit || evaluation_timed_out {
            break SolveStatus::TimeLimit;
        }
        let Some(y) = adversary else {
            break SolveStatus::TimeLimit;
        };
        if !state.pool.insert(y) {
            return Err(Error::StalledDecomposition {
                gap: state.upper - state.lower,
            });
        }
    };

    finish(SolveReport {
        algorithm: Algorithm::Bda,
        status,
        incumbent: Some(state.incumbent.x.clone()),
        z: Some(state.upper),
        lower_bound: Some(state.lower),
        iterations: state.iterations,
        cuts: state.pool.len(),
        scenarios_solved: 0,
        elapsed: state.elapsed,
        trace,
        evaluation: Some(state.incumbent),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{ex1, x};

    const LONG: Duration = Duration::from_secs(60);

    #[test]
    fn master_from_one_cut() {
        let inst = ex1();
        let mut pool = CutPool::new();
        pool.insert(x(&[0, 1]));
        let m = build_master(&inst, &pool, LONG).unwrap();
        assert_eq!(m.objective, vec![3.0, 2.0]);
        assert_eq!(m.theta_objective, Some(-1.0));
        assert_eq!(m.rows[1], LinearConstraint::le(vec![(2, 1.0)], 2.0));
    }

    #[test]
    fn master_from_two_cuts() {
        let inst = ex1();
        let mut pool = CutPool::new();
        pool.insert(x(&[0, 1]));
        pool.insert(x(&[1, 0]));
        let m = build_master(&inst, &pool, LONG).unwrap();
        assert_eq!(m.rows.len(), 3);
        assert_eq!(m.rows[2], LinearConstraint::le(vec![(0, -2.0), (2, 1.0)], 1.0));
    }

    #[test]
    fn empty_pool_is_an_error() {
        assert_eq!(
            build_master(&ex1(), &CutPool::new(), LONG),
            Err(Error::EmptyPool)
        );
    }

    #[test]
    fn pool_rejects_duplicates() {
        let mut pool = CutPool::new();
        assert!(pool.insert(x(&[1, 0])));
        assert!(!pool.insert(x(&[1, 0])));
        assert_eq!(pool.len(), 1);
    }

    #[test]
    fn ex1_converges_in_two_iterations() {
        let r = solve_bda(&ex1(), DEFAULT_EPSILON, LONG).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.z, Some(1.0));
        assert_eq!(r.iterations, 2);
        assert_eq!(r.cuts, 2);
        let bounds: Vec<(f64, f64)> = r.trace.iter().map(|b| (b.lower, b.upper)).collect();
        assert_eq!(bounds[1], (0.0, 1.0));
        assert!((bounds[2].0 - 1.0).abs() <= 1e-6 && bounds[2].1 == 1.0);
    }

    #[test]
    fn degenerate_instance_needs_one_iteration() {
        let inst = IntervalIlpInstance::new(
            "flat",
            vec![4.0, 1.0, 2.0],
            vec![4.0, 1.0, 2.0],
            vec![LinearConstraint::le(vec![(0, -1.0), (1, -1.0), (2, -1.0)], -2.0)],
        )
        .unwrap();
        let r = solve_bda(&inst, DEFAULT_EPSILON, LONG).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.z, Some(0.0));
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn zero_time_limit_reports_seed() {
        let r = solve_bda(&ex1(), DEFAULT_EPSILON, Duration::ZERO).unwrap();
        assert_eq!(r.status, SolveStatus::TimeLimit);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.z, Some(1.0));
        assert_eq!(r.lower_bound, Some(0.0));
    }

    #[test]
    fn infeasible_instance() {
        let mut inst = ex1();
        inst.constraints
            .push(LinearConstraint::le(vec![(0, 1.0), (1, 1.0)], 0.0));
        let r = solve_bda(&inst, DEFAULT_EPSILON, LONG).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.z.is_none());
    }
}
