//! Scenario construction and robustness-cost evaluation.
//!
//! For a fixed `x` the regret `F(x,S) − F(S)` is maximised by the scenario
//! that charges `upper_i` on the selected columns and `lower_i` elsewhere,
//! so `Z(x)` costs a single deterministic solve.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::milp::{solve_milp, MilpProblem, MilpStatus};
use crate::model::{BinarySolution, IntervalIlpInstance, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluationStatus {
    Exact,
    /// The adversary solve ran out of time; `z` uses its dual bound and
    /// overestimates the true robustness cost.
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretEvaluation {
    pub x: BinarySolution,
    pub worst_scenario: Scenario,
    /// `F(x, S^x)`.
    pub f_x: f64,
    /// `F(S^x)`, or the adversary's dual bound under a time limit.
    pub f_star: f64,
    pub adversary: BinarySolution,
    pub z: f64,
    pub status: EvaluationStatus,
}

/// `c_i = l_i + (u_i − l_i)·x_i`.
pub fn worst_case_scenario(instance: &IntervalIlpInstance, x: &BinarySolution) -> Result<Scenario> {
    instance.check_dim(x.len())?;
    let costs = (0..instance.n())
        .map(|i| {
            if x.is_set(i) {
                instance.upper[i]
            } else {
                instance.lower[i]
            }
        })
        .collect();
    Scenario::new(instance, costs)
}

/// `c_i(λ) = l_i + λ(u_i − l_i)`; `λ = 0.5` is the mean scenario and `λ = 1`
/// the upper one.
pub fn scenario_at(instance: &IntervalIlpInstance, lambda: f64) -> Result<Scenario> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    let costs = instance
        .lower
        .iter()
        .zip(&instance.upper)
        .map(|(&l, &u)| {
            if lambda == 0.0 {
                l
            } else if lambda == 1.0 {
                u
            } else {
                (l + lambda * (u - l)).clamp(l, u)
            }
        })
        .collect();
    Scenario::new(instance, costs)
}

/// Computes `Z(x) = F(x, S^x) − F(S^x)` with one call to the MILP engine.
pub fn robustness_cost(
    instance: &IntervalIlpInstance,
    x: &BinarySolution,
    time_limit: Duration,
) -> Result<RegretEvaluation> {
    if !instance.is_feasible(x)? {
        return Err(Error::InfeasibleSolution);
    }
    let worst = worst_case_scenario(instance, x)?;
    let f_x = worst.cost(x)?;
    let result = solve_milp(&MilpProblem::for_scenario(instance, &worst, time_limit))?;
    let (adversary, f_star, status) = match result.status {
        MilpStatus::Optimal => (
            result.x.expect("optimal result carries a solution"),
            result.objective,
            EvaluationStatus::Exact,
        ),
        MilpStatus::TimeLimit => (
            result.x.unwrap_or_else(|| x.clone()),
            result.dual_bound.min(f_x),
            EvaluationStatus::TimeLimit,
        ),
        MilpStatus::Infeasible => {
            return Err(Error::NumericalBreakdown(
                "adversary problem infeasible although the candidate is feasible".into(),
            ))
        }
    };
    Ok(RegretEvaluation {
        x: x.clone(),
        worst_scenario: worst,
        f_x,
        f_star,
        adversary,
        z: f_x - f_star,
        status,
    })
}
