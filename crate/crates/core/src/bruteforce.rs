//! Exhaustive enumeration of `{0,1}^n`. Reference answers for tests and the
//! `brute` CLI algorithm; none of the solvers call into this module.

use crate::error::{Error, Result};
use crate::model::{BinarySolution, IntervalIlpInstance};

pub const MAX_VARIABLES: usize = 25;

fn guard(instance: &IntervalIlpInstance) -> Result<usize> {
    let n = instance.n();
    if n > MAX_VARIABLES {
        return Err(Error::TooLarge(n));
    }
    Ok(n)
}

/// Feasible points in lexicographic order, `x_1` most significant.
pub fn enumerate_feasible(instance: &IntervalIlpInstance) -> Result<Vec<BinarySolution>> {
    let n = guard(instance)?;
    let mut out = Vec::new();
    for k in 0u32..(1u32 << n) {
        let x = BinarySolution::from_bools((0..n).map(|i| k >> (n - 1 - i) & 1 == 1));
        if instance.is_feasible(&x)? {
            out.push(x);
        }
    }
    Ok(out)
}

/// Regret of `x` against every `y` in `feasible` under `x`'s worst scenario.
fn regret_over(instance: &IntervalIlpInstance, x: &BinarySolution, feasible: &[BinarySolution]) -> f64 {
    let n = instance.n();
    let costs: Vec<f64> = (0..n)
        .map(|i| instance.lower[i] + (instance.upper[i] - instance.lower[i]) * f64::from(x.bits()[i]))
        .collect();
    let price = |y: &BinarySolution| -> f64 {
        y.bits()
            .iter()
            .zip(&costs)
            .map(|(&b, &c)| f64::from(b) * c)
            .sum()
    };
    let best = feasible.iter().map(price).fold(f64::INFINITY, f64::min);
    price(x) - best
}

pub fn exact_robustness(instance: &IntervalIlpInstance, x: &BinarySolution) -> Result<f64> {
    guard(instance)?;
    if !instance.is_feasible(x)? {
        return Err(Error::InfeasibleSolution);
    }
    let feasible = enumerate_feasible(instance)?;
    Ok(regret_over(instance, x, &feasible))
}

/// Lexicographically smallest minimiser of `Z` and its value.
pub fn exact_minmax_regret(instance: &IntervalIlpInstance) -> Result<(BinarySolution, f64)> {
    guard(instance)?;
    let feasible = enumerate_feasible(instance)?;
    let mut best: Option<(usize, f64)> = None;
    for (k, x) in feasible.iter().enumerate() {
        let z = regret_over(instance, x, &feasible);
        if best.is_none_or(|(_, b)| z < b) {
            best = Some((k, z));
        }
    }
    let (k, z) = best.ok_or(Error::InfeasibleInstance)?;
    Ok((feasible[k].clone(), z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{ex1, x};
    use crate::model::LinearConstraint;

    #[test]
    fn ex1_feasible_set() {
        assert_eq!(
            enumerate_feasible(&ex1()).unwrap(),
            vec![x(&[0, 1]), x(&[1, 0]), x(&[1, 1])]
        );
    }

    #[test]
    fn unconstrained_lists_everything() {
        let inst = IntervalIlpInstance::new("free", vec![0.0; 2], vec![1.0; 2], vec![]).unwrap();
        assert_eq!(enumerate_feasible(&inst).unwrap().len(), 4);
    }

    #[test]
    fn empty_feasible_set() {
        let mut inst = ex1();
        inst.constraints
            .push(LinearConstraint::le(vec![(0, 1.0), (1, 1.0)], 0.0));
        assert!(enumerate_feasible(&inst).unwrap().is_empty());
        assert_eq!(exact_minmax_regret(&inst), Err(Error::InfeasibleInstance));
    }

    #[test]
    fn ex1_regret_values() {
        let inst = ex1();
        assert_eq!(exact_robustness(&inst, &x(&[1, 0])).unwrap(), 1.0);
        assert_eq!(exact_robustness(&inst, &x(&[1, 1])).unwrap(), 3.0);
        assert_eq!(exact_robustness(&inst, &x(&[0, 1])).unwrap(), 1.0);
        assert_eq!(exact_minmax_regret(&inst).unwrap(), (x(&[0, 1]), 1.0));
        assert_eq!(
            exact_robustness(&inst, &x(&[0, 0])),
            Err(Error::InfeasibleSolution)
        );
    }

    #[test]
    fn degenerate_intervals_give_zero() {
        let inst = IntervalIlpInstance::new(
            "flat",
            vec![4.0, 1.0, 2.0],
            vec![4.0, 1.0, 2.0],
            vec![LinearConstraint::le(vec![(0, -1.0), (1, -1.0), (2, -1.0)], -2.0)],
        )
        .unwrap();
        assert_eq!(exact_minmax_regret(&inst).unwrap(), (x(&[0, 1, 1]), 0.0));
        assert_eq!(exact_robustness(&inst, &x(&[0, 1, 1])).unwrap(), 0.0);
    }

    #[test]
    fn refuses_large_instances() {
        let inst = IntervalIlpInstance::new("big", vec![0.0; 26], vec![1.0; 26], vec![]).unwrap();
        assert_eq!(enumerate_feasible(&inst), Err(Error::TooLarge(26)));
        assert_eq!(exact_minmax_regret(&inst), Err(Error::TooLarge(26)));
    }
}
