use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::model::BinarySolution;
use crate::regret::RegretEvaluation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Bda,
    Amu,
    Sba,
    Brute,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Bda => "bda",
            Algorithm::Amu => "amu",
            Algorithm::Sba => "sba",
            Algorithm::Brute => "brute",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bda" | "bld" => Ok(Algorithm::Bda),
            "amu" => Ok(Algorithm::Amu),
            "sba" => Ok(Algorithm::Sba),
            "brute" => Ok(Algorithm::Brute),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    /// Proven min-max regret optimum.
    Optimal,
    /// Heuristic finished every scenario it planned to inspect.
    Feasible,
    TimeLimit,
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::Infeasible => "infeasible",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Bounds after one decomposition iteration; iteration 0 is the seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRecord {
    pub iteration: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub status: SolveStatus,
    pub incumbent: Option<BinarySolution>,
    /// Robustness cost of the incumbent (an upper bound on the optimum).
    pub z: Option<f64>,
    /// Only exact methods report one.
    pub lower_bound: Option<f64>,
    pub iterations: usize,
    pub cuts: usize,
    pub scenarios_solved: usize,
    pub elapsed: Duration,
    pub trace: Vec<BoundRecord>,
    pub evaluation: Option<RegretEvaluation>,
}

impl SolveReport {
    pub(crate) fn empty(algorithm: Algorithm, status: SolveStatus) -> Self {
        SolveReport {
            algorithm,
            status,
            incumbent: None,
            z: None,
            lower_bound: None,
            iterations: 0,
            cuts: 0,
            scenarios_solved: 0,
            elapsed: Duration::ZERO,
            trace: Vec::new(),
            evaluation: None,
        }
    }

    pub fn gap(&self) -> Option<f64> {
        Some(self.z? - self.lower_bound?)
    }
}
