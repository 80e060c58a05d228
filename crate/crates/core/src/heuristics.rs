//! Scenario-sweep heuristics.
//!
//! Both solve the deterministic program in a handful of interpolated
//! scenarios `l + λ(u − l)` and keep the candidate with the smallest
//! robustness cost. AMU inspects `λ ∈ {0.5, 1}`; SBA sweeps
//! `λ = α, α + γ, …` up to `β`.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::milp::{solve_milp, MilpProblem, MilpStatus};
use crate::model::{BinarySolution, IntervalIlpInstance};
use crate::regret::{robustness_cost, scenario_at, EvaluationStatus, RegretEvaluation};
use crate::report::{Algorithm, SolveReport, SolveStatus};

/// Slack absorbing floating-point accumulation in `α + δγ`.
const STEP_TOL: f64 = 1e-9;
const MAX_SCENARIOS: f64 = 10_000.0;
const MIN_SCENARIO_BUDGET: Duration = Duration::from_secs(1);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbaParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for SbaParams {
    fn default() -> Self {
        SbaParams {
            alpha: 0.5,
            beta: 1.0,
            gamma: 0.05,
        }
    }
}

impl SbaParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = SbaParams { alpha, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let SbaParams { alpha, beta, gamma } = *self;
        if !(0.0 <= alpha && alpha <= beta && beta <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "need 0 ≤ alpha ≤ beta ≤ 1, got alpha = {alpha}, beta = {beta}"
            )));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParams(format!("gamma must lie in (0, 1], got {gamma}")));
        }
        if (beta - alpha) / gamma > MAX_SCENARIOS {
            return Err(Error::InvalidParams(format!(
                "gamma = {gamma} would inspect more than {MAX_SCENARIOS} scenarios"
            )));
        }
        Ok(())
    }
}

/// `α + δγ` for `δ = 0, 1, …` while the value stays within `β`.
pub fn target_lambdas(p: &SbaParams) -> Vec<f64> {
    let mut out = Vec::new();
    let mut delta = 0u32;
    loop {
        let v = p.alpha + f64::from(delta) * p.gamma;
        if v > p.beta + STEP_TOL {
            break;
        }
        let v = if (v - p.beta).abs() <= STEP_TOL { p.beta } else { v };
        out.push(v.min(1.0));
        delta += 1;
    }
    out
}

/// Mean and upper scenarios, ties resolved toward the mean candidate.
pub fn solve_amu(instance: &IntervalIlpInstance, time_limit: Duration) -> Result<SolveReport> {
    sweep(instance, &[0.5, 1.0], Algorithm::Amu, time_limit)
}

pub fn solve_sba(
    instance: &IntervalIlpInstance,
    params: &SbaParams,
    time_limit: Duration,
) -> Result<SolveReport> {
    params.validate()?;
    sweep(instance, &target_lambdas(params), Algorithm::Sba, time_limit)
}

fn sweep(
    instance: &IntervalIlpInstance,
    lambdas: &[f64],
    algorithm: Algorithm,
    time_limit: Duration,
) -> Result<SolveReport> {
    instance.validate()?;
    let start = Instant::now();
    let mut memo: HashMap<BinarySolution, RegretEvaluation> = HashMap::new();
    let mut best: Option<RegretEvaluation> = None;
    let mut scenarios_solved = 0;
    let mut truncated = false;

    for (k, &lambda) in lambdas.iter().enumerate() {
        let slots = (lambdas.len() - k) as u32;
        let budget = (time_limit.saturating_sub(start.elapsed()) / slots).max(MIN_SCENARIO_BUDGET);
        let scenario = scenario_at(instance, lambda)?;
        let result = solve_milp(&MilpProblem::for_scenario(instance, &scenario, budget))?;
        scenarios_solved += 1;
        let x = match result.status {
            MilpStatus::Infeasible => return Err(Error::InfeasibleInstance),
            MilpStatus::TimeLimit => {
                truncated = true;
                match result.x {
                    Some(x) => x,
                    None => continue,
                }
            }
            MilpStatus::Optimal => result.x.expect("optimal result carries a solution"),
        };
        let eval = match memo.get(&x) {
            Some(e) => e.clone(),
            None => {
                let e = robustness_cost(instance, &x, budget)?;
                memo.insert(x, e.clone());
                e
            }
        };
        truncated |= eval.status == EvaluationStatus::TimeLimit;
        if best.as_ref().is_none_or(|b| eval.z < b.z) {
            best = Some(eval);
        }
    }

    let status = if truncated {
        SolveStatus::TimeLimit
    } else {
        SolveStatus::Feasible
    };
    let mut report = SolveReport::empty(algorithm, status);
    report.scenarios_solved = scenarios_solved;
    report.iterations = scenarios_solved;
    if let Some(b) = best {
        report.incumbent = Some(b.x.clone());
        report.z = Some(b.z);
        report.evaluation = Some(b);
    }
    report.elapsed = start.elapsed();
    Ok(report)
}
