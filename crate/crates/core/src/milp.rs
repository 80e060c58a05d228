//! Depth-first branch and bound for 0-1 programs, optionally with a single
//! free continuous column `θ`.
//!
//! Search order is fixed so that results are reproducible: children are
//! explored 0-branch first, branching takes the lowest-index column whose
//! relaxation value is fractional (or the lowest unfixed column when the
//! relaxation gives no usable point), and the incumbent only changes on a
//! strict improvement.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpProblem, LpStatus};
use crate::model::{BinarySolution, IntervalIlpInstance, LinearConstraint, Scenario, Sense};

const INTEGRALITY_TOL: f64 = 1e-6;
const IMPROVEMENT_TOL: f64 = 1e-9;
const ROW_TOL: f64 = 1e-9;
/// Slack allowed between a rounded leaf's objective and its relaxation bound
/// before the node is fathomed.
const FATHOM_TOL: f64 = 1e-7;
const TIME_CHECK_INTERVAL: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct MilpProblem {
    /// Costs of the binary columns `0..n`.
    pub objective: Vec<f64>,
    /// Objective coefficient of the continuous column, stored at index `n`.
    pub theta_objective: Option<f64>,
    /// `≤` rows over the binary columns and, when present, column `n`.
    pub rows: Vec<LinearConstraint>,
    pub time_limit: Duration,
    pub cutoff: Option<f64>,
}

impl MilpProblem {
    /// The deterministic 0-1 program of `instance` under `scenario`.
    pub fn for_scenario(
        instance: &IntervalIlpInstance,
        scenario: &Scenario,
        time_limit: Duration,
    ) -> Self {
        MilpProblem {
            objective: scenario.costs().to_vec(),
            theta_objective: None,
            rows: instance.le_rows(),
            time_limit,
            cutoff: None,
        }
    }

    pub fn n(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let cols = self.n() + usize::from(self.theta_objective.is_some());
        for row in &self.rows {
            if row.sense != Sense::Le {
                return Err(Error::InvalidParams("MILP rows must be in ≤ form".into()));
            }
            if let Some(&(j, _)) = row.terms.iter().find(|&&(j, _)| j >= cols) {
                return Err(Error::InvalidParams(format!(
                    "row references column {j} but there are {cols} columns"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpResult {
    pub status: MilpStatus,
    /// Best solution found; absent when infeasible or when time ran out first.
    pub x: Option<BinarySolution>,
    pub theta: Option<f64>,
    /// Incumbent objective, `+∞` without an incumbent.
    pub objective: f64,
    pub nodes: usize,
    pub dual_bound: f64,
}

/// Partial assignment: `None` is unfixed.
type Fixing = Vec<Option<bool>>;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum NodeBound {
    /// Relaxation infeasible: the subtree is empty.
    Infeasible,
    /// No usable relaxation value (iteration limit or unbounded relaxation).
    Unknown,
    /// Relaxation value and its point over the binary columns.
    Value(f64, Vec<f64>),
}

impl NodeBound {
    pub(crate) fn value(&self) -> f64 {
        match self {
            NodeBound::Infeasible => f64::INFINITY,
            NodeBound::Unknown => f64::NEG_INFINITY,
            NodeBound::Value(v, _) => *v,
        }
    }
}

/// LP relaxation of the node with fixed columns substituted out.
pub(crate) fn lower_bound(p: &MilpProblem, fixing: &[Option<bool>]) -> Result<NodeBound> {
    let n = p.n();
    let has_theta = p.theta_objective.is_some();
    let mut lp_col = vec![usize::MAX; n + 1];
    let mut free = Vec::new();
    let mut constant = 0.0;
    for j in 0..n {
        match fixing[j] {
            None => {
                lp_col[j] = free.len();
                free.push(j);
            }
            Some(true) => constant += p.objective[j],
            Some(false) => {}
        }
    }
    let theta_col = free.len();
    if has_theta {
        lp_col[n] = theta_col;
    }
    let cols = free.len() + usize::from(has_theta);

    let mut rows = Vec::with_capacity(p.rows.len());
    for row in &p.rows {
        let mut rhs = row.rhs;
        let mut terms = Vec::with_capacity(row.terms.len());
        for &(j, a) in &row.terms {
            if j == n {
                terms.push((theta_col, a));
            } else {
                match fixing[j] {
                    None => terms.push((lp_col[j], a)),
                    Some(true) => rhs -= a,
                    Some(false) => {}
                }
            }
        }
        if terms.is_empty() {
            if rhs < -ROW_TOL {
                return Ok(NodeBound::Infeasible);
            }
            continue;
        }
        rows.push(LinearConstraint::le(terms, rhs));
    }

    if cols == 0 {
        return Ok(NodeBound::Value(constant, point(fixing, &[], &free)));
    }

    let mut objective: Vec<f64> = free.iter().map(|&j| p.objective[j]).collect();
    let mut bounds = vec![(0.0, 1.0); free.len()];
    if let Some(c) = p.theta_objective {
        objective.push(c);
        bounds.push((f64::NEG_INFINITY, f64::INFINITY));
    }
    let sol = solve_lp(&LpProblem {
        objective,
        bounds,
        rows,
    })?;
    Ok(match sol.status {
        LpStatus::Optimal => {
            let x = sol.x.expect("optimal LP carries a point");
            NodeBound::Value(
                constant + sol.objective.expect("optimal LP carries a value"),
                point(fixing, &x, &free),
            )
        }
        LpStatus::Infeasible => NodeBound::Infeasible,
        LpStatus::Unbounded | LpStatus::IterationLimit => NodeBound::Unknown,
    })
}

fn point(fixing: &[Option<bool>], lp_x: &[f64], free: &[usize]) -> Vec<f64> {
    let mut x: Vec<f64> = fixing
        .iter()
        .map(|f| match f {
            Some(true) => 1.0,
            _ => 0.0,
        })
        .collect();
    for (k, &j) in free.iter().enumerate() {
        x[j] = lp_x[k];
    }
    x
}

/// Objective and `θ` of a complete binary assignment, `None` if infeasible.
fn evaluate_leaf(p: &MilpProblem, x: &BinarySolution) -> Result<Option<(f64, Option<f64>)>> {
    let n = p.n();
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    for row in &p.rows {
        let mut lhs = 0.0;
        let mut g = 0.0;
        for &(j, a) in &row.terms {
            if j == n {
                g = a;
            } else if x.is_set(j) {
                lhs += a;
            }
        }
        let slack = row.rhs - lhs;
        if g > 0.0 {
            upper = upper.min(slack / g);
        } else if g < 0.0 {
            lower = lower.max(slack / g);
        } else if slack < -ROW_TOL {
            return Ok(None);
        }
    }
    let base: f64 = p
        .objective
        .iter()
        .zip(x.bits())
        .filter(|(_, &b)| b == 1)
        .map(|(c, _)| c)
        .sum();
    let Some(c) = p.theta_objective else {
        return Ok(Some((base, None)));
    };
    if lower > upper + ROW_TOL {
        return Ok(None);
    }
    let theta = if c < 0.0 {
        upper
    } else if c > 0.0 {
        lower
    } else if upper.is_finite() {
        upper
    } else if lower.is_finite() {
        lower
    } else {
        0.0
    };
    if !theta.is_finite() {
        return Err(Error::UnboundedRelaxation);
    }
    Ok(Some((base + c * theta, Some(theta))))
}

struct Node {
    fixing: Fixing,
    /// Relaxation value of the parent, a valid bound for this subtree.
    bound: f64,
}

struct Incumbent {
    x: BinarySolution,
    theta: Option<f64>,
    objective: f64,
}

pub fn solve_milp(p: &MilpProblem) -> Result<MilpResult> {
    p.validate()?;
    let n = p.n();
    let deadline = Instant::now().checked_add(p.time_limit);
    let cutoff = p.cutoff.unwrap_or(f64::INFINITY);

    let mut stack = vec![Node {
        fixing: vec![None; n],
        bound: f64::NEG_INFINITY,
    }];
    let mut incumbent: Option<Incumbent> = None;
    let mut nodes = 0usize;
    let mut timed_out = false;

    while let Some(node) = stack.pop() {
        if nodes > 0
            && nodes.is_multiple_of(TIME_CHECK_INTERVAL)
            && deadline.is_some_and(|d| Instant::now() >= d)
        {
            stack.push(node);
            timed_out = true;
            break;
        }
        nodes += 1;

        let threshold = incumbent.as_ref().map_or(cutoff, |i| i.objective.min(cutoff));
        if node.bound >= threshold - IMPROVEMENT_TOL {
            continue;
        }

        let bound = lower_bound(p, &node.fixing)?;
        let value = bound.value();
        if value >= threshold - IMPROVEMENT_TOL {
            continue;
        }

        let first_unfixed = node.fixing.iter().position(Option::is_none);
        let branch_on = match &bound {
            NodeBound::Infeasible => continue,
            NodeBound::Unknown => match first_unfixed {
                Some(j) => j,
                None => {
                    let x = BinarySolution::from_bools(node.fixing.iter().map(|f| f == &Some(true)));
                    if let Some((obj, theta)) = evaluate_leaf(p, &x)? {
                        offer(&mut incumbent, x, theta, obj, cutoff);
                    }
                    continue;
                }
            },
            NodeBound::Value(b, x_lp) => {
                let fractional = (0..n).find(|&j| {
                    node.fixing[j].is_none() && {
                        let v = x_lp[j];
                        v.min(1.0 - v) > INTEGRALITY_TOL
                    }
                });
                match fractional {
                    Some(j) => j,
                    None => {
                        let x = BinarySolution::from_bools(x_lp.iter().map(|&v| v > 0.5));
                        let leaf = evaluate_leaf(p, &x)?;
                        if let Some((obj, theta)) = leaf {
                            offer(&mut incumbent, x, theta, obj, cutoff);
                            if obj <= b + FATHOM_TOL {
                                continue;
                            }
                        }
                        match first_unfixed {
                            Some(j) => j,
                            None => continue,
                        }
                    }
                }
            }
        };

        let mut one = node.fixing.clone();
        one[branch_on] = Some(true);
        let mut zero = node.fixing;
        zero[branch_on] = Some(false);
        stack.push(Node {
            fixing: one,
            bound: value,
        });
        stack.push(Node {
            fixing: zero,
            bound: value,
        });
    }

    let objective = incumbent.as_ref().map_or(f64::INFINITY, |i| i.objective);
    let status = if timed_out {
        MilpStatus::TimeLimit
    } else if incumbent.is_some() {
        MilpStatus::Optimal
    } else {
        MilpStatus::Infeasible
    };
    let dual_bound = if timed_out {
        stack.iter().map(|nd| nd.bound).fold(objective, f64::min)
    } else {
        objective
    };
    Ok(MilpResult {
        status,
        x: incumbent.as_ref().map(|i| i.x.clone()),
        theta: incumbent.as_ref().and_then(|i| i.theta),
        objective,
        nodes,
        dual_bound,
    })
}

fn offer(
    incumbent: &mut Option<Incumbent>,
    x: BinarySolution,
    theta: Option<f64>,
    objective: f64,
    cutoff: f64,
) {
    if objective >= cutoff - IMPROVEMENT_TOL {
        return;
    }
    let better = incumbent
        .as_ref()
        .is_none_or(|i| objective < i.objective - IMPROVEMENT_TOL);
    if better {
        *incumbent = Some(Incumbent {
            x,
            theta,
            objective,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{ex1, x};
    use proptest::prelude::*;

    const LONG: Duration = Duration::from_secs(60);

    fn ex1_upper() -> MilpProblem {
        let inst = ex1();
        let s = Scenario::new(&inst, vec![3.0, 2.0]).unwrap();
        MilpProblem::for_scenario(&inst, &s, LONG)
    }

    #[test]
    fn ex1_upper_scenario_optimum() {
        let r = solve_milp(&ex1_upper()).unwrap();
        assert_eq!(r.status, MilpStatus::Optimal);
        assert_eq!(r.x.unwrap(), x(&[0, 1]));
        assert_eq!(r.objective, 2.0);
        assert_eq!(r.dual_bound, 2.0);
    }

    #[test]
    fn unconstrained_negative_cost() {
        let p = MilpProblem {
            objective: vec![-1.0],
            theta_objective: None,
            rows: vec![],
            time_limit: LONG,
            cutoff: None,
        };
        let r = solve_milp(&p).unwrap();
        assert_eq!(r.x.unwrap(), x(&[1]));
        assert_eq!(r.objective, -1.0);
    }

    #[test]
    fn master_shape_single_cut() {
        // min 3x1 + 2x2 − θ, θ ≤ 2, x1 + x2 ≥ 1.
        let mut p = ex1_upper();
        p.theta_objective = Some(-1.0);
        p.rows.push(LinearConstraint::le(vec![(2, 1.0)], 2.0));
        let r = solve_milp(&p).unwrap();
        assert_eq!(r.status, MilpStatus::Optimal);
        assert_eq!(r.x.unwrap(), x(&[0, 1]));
        assert_eq!(r.theta, Some(2.0));
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn infeasible_program() {
        let mut p = ex1_upper();
        p.rows.push(LinearConstraint::le(vec![(0, 1.0), (1, 1.0)], 0.0));
        let r = solve_milp(&p).unwrap();
        assert_eq!(r.status, MilpStatus::Infeasible);
        assert!(r.x.is_none());
    }

    #[test]
    fn cutoff_prunes_everything_not_better() {
        let mut p = ex1_upper();
        p.cutoff = Some(2.0);
        assert_eq!(solve_milp(&p).unwrap().status, MilpStatus::Infeasible);
        p.cutoff = Some(2.5);
        assert_eq!(solve_milp(&p).unwrap().objective, 2.0);
    }

    #[test]
    fn node_bounds() {
        let p = ex1_upper();
        assert_eq!(lower_bound(&p, &[None, None]).unwrap().value(), 2.0);
        assert_eq!(
            lower_bound(&p, &[Some(true), Some(true)]).unwrap().value(),
            5.0
        );
        assert_eq!(
            lower_bound(&p, &[Some(false), Some(false)]).unwrap(),
            NodeBound::Infeasible
        );
        assert_eq!(
            lower_bound(&p, &[Some(false), Some(false)]).unwrap().value(),
            f64::INFINITY
        );
    }

    #[test]
    fn fully_fixed_master_node_matches_closed_form() {
        let mut p = ex1_upper();
        p.theta_objective = Some(-1.0);
        p.rows.push(LinearConstraint::le(vec![(2, 1.0)], 2.0));
        p.rows.push(LinearConstraint::le(vec![(0, -2.0), (2, 1.0)], 1.0));
        // x = (1,0): 3 − min(2, 3) = 1.
        let b = lower_bound(&p, &[Some(true), Some(false)]).unwrap().value();
        assert!((b - 1.0).abs() < 1e-12);
        let leaf = evaluate_leaf(&p, &x(&[1, 0])).unwrap().unwrap();
        assert_eq!(leaf, (1.0, Some(2.0)));
    }

    #[test]
    fn zero_time_limit_returns_after_first_batch() {
        // 14 columns, pairwise exclusive, every relaxation fractional.
        let n = 14;
        let rows = (0..n - 1)
            .map(|j| LinearConstraint::le(vec![(j, 2.0), (j + 1, 2.0)], 3.0))
            .collect();
        let p = MilpProblem {
            objective: (0..n).map(|j| -1.0 - j as f64 * 1e-3).collect(),
            theta_objective: None,
            rows,
            time_limit: Duration::ZERO,
            cutoff: None,
        };
        let r = solve_milp(&p).unwrap();
        assert_eq!(r.status, MilpStatus::TimeLimit);
        assert_eq!(r.nodes, TIME_CHECK_INTERVAL);
        assert!(r.dual_bound <= r.objective);
    }

    // Oracle: plain enumeration with θ taken from the tightest row.
    fn enumerate(p: &MilpProblem) -> Option<f64> {
        let n = p.n();
        let mut best: Option<f64> = None;
        for mask in 0u32..(1 << n) {
            let xs: Vec<f64> = (0..n).map(|j| f64::from(mask >> j & 1)).collect();
            let mut theta_cap = f64::INFINITY;
            let mut ok = true;
            for r in &p.rows {
                let mut lhs = 0.0;
                let mut g = 0.0;
                for &(j, a) in &r.terms {
                    if j == n { g = a } else { lhs += a * xs[j] }
                }
                if g > 0.0 {
                    theta_cap = theta_cap.min((r.rhs - lhs) / g);
                } else if lhs > r.rhs + 1e-9 {
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            let mut obj: f64 = p.objective.iter().zip(&xs).map(|(c, v)| c * v).sum();
            if let Some(c) = p.theta_objective {
                obj += c * theta_cap;
            }
            best = Some(best.map_or(obj, |b: f64| b.min(obj)));
        }
        best
    }

    fn arb_milp(with_theta: bool) -> impl Strategy<Value = MilpProblem> {
        (1usize..=8).prop_flat_map(move |n| {
            let row = proptest::collection::vec(-5i32..=5, n).prop_flat_map(move |a| {
                let sum_pos: i32 = a.iter().filter(|&&v| v > 0).sum();
                (Just(a), -6i32..=sum_pos.max(0) + 2)
            });
            let row = row.prop_map(|(a, b)| {
                let mut terms: Vec<_> = a
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(j, &v)| (j, f64::from(v)))
                    .collect();
                if terms.is_empty() {
                    terms.push((0, 1.0));
                }
                LinearConstraint::le(terms, f64::from(b))
            });
            let cut = (proptest::collection::vec(0i32..=6, n), 0i32..=10).prop_map(move |(g, h)| {
                let mut terms: Vec<_> = g
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(j, &v)| (j, -f64::from(v)))
                    .collect();
                terms.push((n, 1.0));
                LinearConstraint::le(terms, f64::from(h))
            });
            (
                proptest::collection::vec(-9i32..=9, n),
                proptest::collection::vec(row, 0..=4),
                proptest::collection::vec(cut, 1..=3),
            )
                .prop_map(move |(c, mut rows, cuts)| {
                    if with_theta {
                        rows.extend(cuts);
                    }
                    MilpProblem {
                        objective: c.into_iter().map(f64::from).collect(),
                        theta_objective: with_theta.then_some(-1.0),
                        rows,
                        time_limit: LONG,
                        cutoff: None,
                    }
                })
        })
    }

    proptest! {
        #[test]
        fn pure_binary_matches_enumeration(p in arb_milp(false)) {
            let r = solve_milp(&p).unwrap();
            match enumerate(&p) {
                None => prop_assert_eq!(r.status, MilpStatus::Infeasible),
                Some(best) => {
                    prop_assert_eq!(r.status, MilpStatus::Optimal);
                    prop_assert!((r.objective - best).abs() <= 1e-6);
                    prop_assert!((r.dual_bound - r.objective).abs() <= 1e-6);
                    let x = r.x.unwrap();
                    let xs = x.as_f64();
                    for row in &p.rows {
                        prop_assert!(row.activity(&xs) <= row.rhs + 1e-9);
                    }
                }
            }
        }

        #[test]
        fn master_shape_matches_enumeration(p in arb_milp(true)) {
            let r = solve_milp(&p).unwrap();
            match enumerate(&p) {
                None => prop_assert_eq!(r.status, MilpStatus::Infeasible),
                Some(best) => {
                    prop_assert_eq!(r.status, MilpStatus::Optimal);
                    prop_assert!((r.objective - best).abs() <= 1e-6);
                }
            }
        }

        #[test]
        fn deterministic_across_runs(p in arb_milp(true)) {
            let a = solve_milp(&p).unwrap();
            let b = solve_milp(&p).unwrap();
            prop_assert_eq!(a.x, b.x);
            prop_assert_eq!(a.objective.to_bits(), b.objective.to_bits());
            prop_assert_eq!(a.nodes, b.nodes);
        }
    }
}
