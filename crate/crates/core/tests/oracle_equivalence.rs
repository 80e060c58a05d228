use std::time::Duration;

use mmr_core::bruteforce::{enumerate_feasible, exact_minmax_regret, exact_robustness};
use mmr_core::instance_io::{parse_rilp, write_rilp};
use mmr_core::{
    robustness_cost, solve_amu, solve_bda, solve_sba, Error, IntervalIlpInstance,
    LinearConstraint, SbaParams, Sense, SolveStatus,
};
use proptest::prelude::*;

const LIMIT: Duration = Duration::from_secs(600);

fn quarter(lo: i32, hi: i32) -> impl Strategy<Value = f64> {
    (lo..=hi).prop_map(|v| f64::from(v) / 4.0)
}

fn row(n: usize) -> impl Strategy<Value = LinearConstraint> {
    (
        proptest::collection::vec(proptest::option::weighted(0.6, quarter(-20, 20)), n),
        0..3usize,
        quarter(-30, 30),
    )
        .prop_map(|(coefs, s, rhs)| {
            let mut terms: Vec<(usize, f64)> = coefs
                .into_iter()
                .enumerate()
                .filter_map(|(i, c)| c.map(|c| (i, c)))
                .collect();
            if terms.is_empty() {
                terms.push((0, 1.0));
            }
            LinearConstraint::new(terms, [Sense::Le, Sense::Ge, Sense::Eq][s], rhs)
        })
}

fn instance() -> impl Strategy<Value = IntervalIlpInstance> {
    (1..=7usize).prop_flat_map(|n| {
        (
            proptest::collection::vec((quarter(-8, 80), quarter(0, 60)), n),
            proptest::collection::vec(row(n), 0..4),
        )
            .prop_map(move |(iv, rows)| {
                let lower = iv.iter().map(|p| p.0).collect();
                let upper = iv.iter().map(|p| p.0 + p.1).collect();
                IntervalIlpInstance::new("prop", lower, upper, rows).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn robustness_cost_matches_enumeration(inst in instance()) {
        for x in enumerate_feasible(&inst).unwrap() {
            let fast = robustness_cost(&inst, &x, LIMIT).unwrap();
            let slow = exact_robustness(&inst, &x).unwrap();
            prop_assert!((fast.z - slow).abs() <= 1e-7, "x = {x}: {} vs {slow}", fast.z);
            prop_assert!(fast.z >= -1e-9);
            prop_assert!(inst.is_feasible(&fast.adversary).unwrap());
        }
    }

    #[test]
    fn solvers_agree_with_enumeration(inst in instance()) {
        let bda = solve_bda(&inst, 1e-6, LIMIT).unwrap();
        match exact_minmax_regret(&inst) {
            Err(Error::InfeasibleInstance) => {
                prop_assert_eq!(bda.status, SolveStatus::Infeasible);
                prop_assert_eq!(solve_amu(&inst, LIMIT), Err(Error::InfeasibleInstance));
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
            Ok((_, z_star)) => {
                prop_assert_eq!(bda.status, SolveStatus::Optimal);
                prop_assert!((bda.z.unwrap() - z_star).abs() <= 1e-6);
                let amu = solve_amu(&inst, LIMIT).unwrap().z.unwrap();
                let sba = solve_sba(&inst, &SbaParams::default(), LIMIT).unwrap().z.unwrap();
                prop_assert!(amu >= z_star - 1e-9);
                prop_assert!(amu <= 2.0 * z_star + 1e-9);
                prop_assert!(sba <= amu + 1e-9);
            }
        }
    }

    #[test]
    fn text_round_trip(inst in instance()) {
        let back = parse_rilp(&write_rilp(&inst)).unwrap();
        prop_assert_eq!(back, inst.normalize().unwrap());
    }
}
