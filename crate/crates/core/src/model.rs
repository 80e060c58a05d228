//! Instance, scenario and solution types shared by every solver.
//!
//! An [`IntervalIlpInstance`] is a 0-1 program `min c·x, Ax ≤ b` whose cost
//! vector is only known componentwise to lie in `[lower_i, upper_i]`.
//! Constraints may be written with any [`Sense`]; [`IntervalIlpInstance::normalize`]
//! rewrites them into the all-`≤` form the solvers consume.

use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance used for every row feasibility test.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Le => "LE",
            Sense::Ge => "GE",
            Sense::Eq => "EQ",
        }
    }
}

impl std::str::FromStr for Sense {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "LE" => Ok(Sense::Le),
            "GE" => Ok(Sense::Ge),
            "EQ" => Ok(Sense::Eq),
            other => Err(format!("unknown row sense `{other}`")),
        }
    }
}

/// One sparse row `Σ coeff·x_index  (sense)  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn new(terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Self {
        LinearConstraint { terms, sense, rhs }
    }

    pub fn le(terms: Vec<(usize, f64)>, rhs: f64) -> Self {
        Self::new(terms, Sense::Le, rhs)
    }

    /// Left-hand side evaluated at a dense point.
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    fn activity_binary(&self, x: &BinarySolution) -> f64 {
        self.terms
            .iter()
            .map(|&(j, a)| if x.is_set(j) { a } else { 0.0 })
            .sum()
    }

    pub fn is_satisfied_by(&self, x: &BinarySolution) -> bool {
        let lhs = self.activity_binary(x);
        match self.sense {
            Sense::Le => lhs <= self.rhs + FEASIBILITY_TOL,
            Sense::Ge => lhs >= self.rhs - FEASIBILITY_TOL,
            Sense::Eq => (lhs - self.rhs).abs() <= FEASIBILITY_TOL,
        }
    }

    fn check(&self, n: usize, row: usize) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::MalformedInstance(format!("row {} has no terms", row + 1)));
        }
        if !self.rhs.is_finite() {
            return Err(Error::MalformedInstance(format!("row {} has a non-finite rhs", row + 1)));
        }
        let mut seen = vec![false; n];
        for &(j, a) in &self.terms {
            if j >= n {
                return Err(Error::MalformedInstance(format!(
                    "row {} references variable {} but n = {}",
                    row + 1,
                    j + 1,
                    n
                )));
            }
            if seen[j] {
                return Err(Error::MalformedInstance(format!(
                    "row {} repeats variable {}",
                    row + 1,
                    j + 1
                )));
            }
            if !a.is_finite() {
                return Err(Error::MalformedInstance(format!(
                    "row {} has a non-finite coefficient",
                    row + 1
                )));
            }
            seen[j] = true;
        }
        Ok(())
    }

    /// `≤` rows equivalent to `self`, with terms sorted by variable index.
    fn to_le_rows(&self) -> Vec<LinearConstraint> {
        let mut terms = self.terms.clone();
        terms.sort_by_key(|&(j, _)| j);
        let negated = || terms.iter().map(|&(j, a)| (j, -a)).collect::<Vec<_>>();
        match self.sense {
            Sense::Le => vec![LinearConstraint::le(terms.clone(), self.rhs)],
            Sense::Ge => vec![LinearConstraint::le(negated(), -self.rhs)],
            Sense::Eq => vec![
                LinearConstraint::le(terms.clone(), self.rhs),
                LinearConstraint::le(negated(), -self.rhs),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalIlpInstance {
    pub name: String,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
}

impl IntervalIlpInstance {
    /// Builds and validates an instance. Rows may use any sense.
    pub fn new(
        name: impl Into<String>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        constraints: Vec<LinearConstraint>,
    ) -> Result<Self> {
        let instance = IntervalIlpInstance {
            name: name.into(),
            lower,
            upper,
            constraints,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn n(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.lower.len();
        if n == 0 {
            return Err(Error::MalformedInstance("instance has no variables".into()));
        }
        if self.upper.len() != n {
            return Err(Error::MalformedInstance(format!(
                "{} lower bounds but {} upper bounds",
                n,
                self.upper.len()
            )));
        }
        for (i, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !l.is_finite() || !u.is_finite() {
                return Err(Error::MalformedInstance(format!(
                    "interval of variable {} is not finite",
                    i + 1
                )));
            }
            if l > u {
                return Err(Error::MalformedInstance(format!(
                    "variable {} has lower {} above upper {}",
                    i + 1,
                    l,
                    u
                )));
            }
        }
        for (r, row) in self.constraints.iter().enumerate() {
            row.check(n, r)?;
        }
        Ok(())
    }

    /// Canonical form: every row `≤`, GE rows negated, EQ rows split in two,
    /// terms sorted by index.
    pub fn normalize(&self) -> Result<IntervalIlpInstance> {
        self.validate()?;
        Ok(IntervalIlpInstance {
            name: self.name.clone(),
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            constraints: self.le_rows(),
        })
    }

    pub fn is_normalized(&self) -> bool {
        self.constraints
            .iter()
            .all(|c| c.sense == Sense::Le && c.terms.windows(2).all(|w| w[0].0 < w[1].0))
    }

    /// Rows in `≤` form without re-validating; used to feed the MILP engine.
    pub(crate) fn le_rows(&self) -> Vec<LinearConstraint> {
        self.constraints.iter().flat_map(|c| c.to_le_rows()).collect()
    }

    pub fn is_feasible(&self, x: &BinarySolution) -> Result<bool> {
        self.check_dim(x.len())?;
        Ok(self.constraints.iter().all(|c| c.is_satisfied_by(x)))
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found,
            });
        }
        Ok(())
    }

    /// True when every interval is a single point.
    pub fn is_degenerate(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(l, u)| l == u)
    }
}

/// One concrete cost vector inside the instance's box.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    costs: Vec<f64>,
}

impl Scenario {
    pub fn new(instance: &IntervalIlpInstance, costs: Vec<f64>) -> Result<Self> {
        instance.check_dim(costs.len())?;
        for (i, &c) in costs.iter().enumerate() {
            let (l, u) = (instance.lower[i], instance.upper[i]);
            if !(l <= c && c <= u) {
                return Err(Error::ScenarioOutOfBounds {
                    index: i,
                    value: c,
                    lower: l,
                    upper: u,
                });
            }
        }
        Ok(Scenario { costs })
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    /// `F(x, S) = Σ c_i x_i`, summed in index order.
    pub fn cost(&self, x: &BinarySolution) -> Result<f64> {
        if x.len() != self.costs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.costs.len(),
                found: x.len(),
            });
        }
        let mut total = 0.0;
        for (c, &b) in self.costs.iter().zip(x.bits()) {
            if b == 1 {
                total += c;
            }
        }
        Ok(total)
    }
}

/// A point of `{0,1}^n`. Ordering is lexicographic on the bit string, so
/// `x_1` is the most significant position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinarySolution {
    bits: Vec<u8>,
}

impl BinarySolution {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidSolution(format!(
                "entry {} is {}, expected 0 or 1",
                i + 1,
                bits[i]
            )));
        }
        Ok(BinarySolution { bits })
    }

    pub fn zeros(n: usize) -> Self {
        BinarySolution { bits: vec![0; n] }
    }

    pub fn ones(n: usize) -> Self {
        BinarySolution { bits: vec![1; n] }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(it: I) -> Self {
        BinarySolution {
            bits: it.into_iter().map(u8::from).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_set(&self, i: usize) -> bool {
        self.bits[i] == 1
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| f64::from(b)).collect()
    }
}

impl fmt::Display for BinarySolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.bits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::{ex1, x};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_negates_ge_rows() {
        let inst = IntervalIlpInstance::new(
            "ge",
            vec![0.0; 2],
            vec![1.0; 2],
            vec![LinearConstraint::new(vec![(1, 1.0), (0, 1.0)], Sense::Ge, 1.0)],
        )
        .unwrap();
        let norm = inst.normalize().unwrap();
        assert_eq!(
            norm.constraints,
            vec![LinearConstraint::le(vec![(0, -1.0), (1, -1.0)], -1.0)]
        );
        assert!(norm.is_normalized());
    }

    #[test]
    fn normalize_splits_equalities() {
        let inst = IntervalIlpInstance::new(
            "eq",
            vec![0.0],
            vec![1.0],
            vec![LinearConstraint::new(vec![(0, 1.0)], Sense::Eq, 1.0)],
        )
        .unwrap();
        let norm = inst.normalize().unwrap();
        assert_eq!(
            norm.constraints,
            vec![
                LinearConstraint::le(vec![(0, 1.0)], 1.0),
                LinearConstraint::le(vec![(0, -1.0)], -1.0),
            ]
        );
    }

    #[test]
    fn normalize_rejects_bad_indices() {
        let mut inst = ex1();
        inst.constraints[0].terms.push((2, 1.0));
        assert!(matches!(inst.normalize(), Err(Error::MalformedInstance(_))));

        let mut inst = ex1();
        inst.constraints[0].terms.push((0, 1.0));
        assert!(matches!(inst.normalize(), Err(Error::MalformedInstance(_))));
    }

    #[test]
    fn new_rejects_inverted_interval() {
        let r = IntervalIlpInstance::new("bad", vec![3.0], vec![1.0], vec![]);
        assert!(matches!(r, Err(Error::MalformedInstance(_))));
        let r = IntervalIlpInstance::new("empty", vec![], vec![], vec![]);
        assert!(matches!(r, Err(Error::MalformedInstance(_))));
    }

    #[test]
    fn feasibility_on_ex1() {
        let inst = ex1();
        assert!(!inst.is_feasible(&x(&[0, 0])).unwrap());
        assert!(inst.is_feasible(&x(&[1, 0])).unwrap());
        assert!(inst.is_feasible(&x(&[1, 1])).unwrap());
        assert!(matches!(
            inst.is_feasible(&x(&[1])),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn cost_examples() {
        let inst = ex1();
        let s = Scenario::new(&inst, vec![3.0, 2.0]).unwrap();
        assert_eq!(s.cost(&x(&[1, 0])).unwrap(), 3.0);
        assert_eq!(s.cost(&x(&[1, 1])).unwrap(), 5.0);
        assert_eq!(s.cost(&x(&[0, 0])).unwrap(), 0.0);
        assert!(s.cost(&x(&[0, 0, 1])).is_err());
    }

    #[test]
    fn scenario_outside_box_is_rejected() {
        let inst = ex1();
        assert!(matches!(
            Scenario::new(&inst, vec![3.5, 2.0]),
            Err(Error::ScenarioOutOfBounds { index: 0, .. })
        ));
    }

    #[test]
    fn binary_solution_rejects_non_binary() {
        assert!(BinarySolution::new(vec![0, 2]).is_err());
        assert_eq!(x(&[0, 1]).to_string(), "(0,1)");
        assert!(x(&[0, 1]) < x(&[1, 0]));
    }

    fn arb_instance() -> impl Strategy<Value = IntervalIlpInstance> {
        (1usize..6).prop_flat_map(|n| {
            let row = (
                proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n),
                proptest::collection::vec(-3i32..=3, n),
                0u8..3,
                -3i32..=3,
            )
                .prop_map(|(idx, coef, sense, rhs)| {
                    let sense = [Sense::Le, Sense::Ge, Sense::Eq][sense as usize];
                    let terms = idx.into_iter().rev().map(|j| (j, f64::from(coef[j]))).collect();
                    LinearConstraint::new(terms, sense, f64::from(rhs))
                });
            (
                proptest::collection::vec((0i32..5, 0i32..5), n),
                proptest::collection::vec(row, 0..4),
            )
                .prop_map(move |(iv, rows)| {
                    let lower = iv.iter().map(|&(a, _)| f64::from(a)).collect();
                    let upper = iv.iter().map(|&(a, d)| f64::from(a + d)).collect();
                    IntervalIlpInstance::new("p", lower, upper, rows).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(inst in arb_instance()) {
            let once = inst.normalize().unwrap();
            prop_assert_eq!(once.normalize().unwrap(), once);
        }

        #[test]
        fn feasibility_survives_normalization(inst in arb_instance(), mask in any::<u32>()) {
            let n = inst.n();
            let sol = BinarySolution::from_bools((0..n).map(|i| mask >> i & 1 == 1));
            let norm = inst.normalize().unwrap();
            prop_assert_eq!(inst.is_feasible(&sol).unwrap(), norm.is_feasible(&sol).unwrap());
        }

        #[test]
        fn cost_ignores_unselected_and_grows_with_selected(
            inst in arb_instance(), mask in any::<u32>(), i in 0usize..6, bump in 0.0f64..1.0
        ) {
            let n = inst.n();
            let i = i % n;
            let sol = BinarySolution::from_bools((0..n).map(|k| mask >> k & 1 == 1));
            let base = Scenario::new(&inst, inst.lower.clone()).unwrap();
            let mut costs = inst.lower.clone();
            costs[i] += bump * (inst.upper[i] - inst.lower[i]);
            let raised = Scenario::new(&inst, costs).unwrap();
            let (c0, c1) = (base.cost(&sol).unwrap(), raised.cost(&sol).unwrap());
            if sol.is_set(i) {
                prop_assert!(c1 >= c0);
            } else {
                prop_assert_eq!(c1, c0);
            }
        }
    }
}
