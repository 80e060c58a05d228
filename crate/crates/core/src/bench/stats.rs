//! Relative deviations, mean ± sample standard deviation, and the Wilcoxon
//! signed-rank test.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest sample size handled by exact enumeration.
pub const EXACT_LIMIT: usize = 20;
const ZERO_BASELINE: f64 = 1e-12;

/// `(heuristic − baseline) / baseline`.
pub fn relative_deviation(heuristic: f64, baseline: f64) -> Result<f64> {
    if baseline <= ZERO_BASELINE {
        return Err(Error::ZeroBaseline(baseline));
    }
    Ok((heuristic - baseline) / baseline)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSd {
    pub mean: f64,
    /// Sample standard deviation; zero for a single observation.
    pub sd: f64,
    pub count: usize,
}

impl MeanSd {
    pub fn of(values: &[f64]) -> Option<MeanSd> {
        let k = values.len();
        if k == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / k as f64;
        let sd = if k < 2 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (k - 1) as f64).sqrt()
        };
        Some(MeanSd { mean, sd, count: k })
    }

    pub fn scaled(self, factor: f64) -> MeanSd {
        MeanSd {
            mean: self.mean * factor,
            sd: self.sd * factor.abs(),
            count: self.count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Sum of ranks of the positive differences.
    pub w_plus: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    /// Pairs left after dropping zero differences.
    pub informative: usize,
    pub exact: bool,
}

/// Non-zero differences `a − b` and their ranks doubled, so that average
/// ranks of ties stay integral.
fn signed_ranks(pairs: &[(f64, f64)]) -> (Vec<bool>, Vec<u64>, Vec<usize>) {
    let mut diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    diffs.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    let k = diffs.len();
    let mut doubled = vec![0u64; k];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < k {
        let mut j = i;
        while j + 1 < k && diffs[j + 1].abs() == diffs[i].abs() {
            j += 1;
        }
        // Positions i+1..=j+1 share the average rank (i+j+2)/2.
        for r in &mut doubled[i..=j] {
            *r = (i + j + 2) as u64;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    let positive = diffs.iter().map(|d| *d > 0.0).collect();
    (positive, doubled, ties)
}

/// Exact two-sided p-value from the null distribution of `W+`, computed by
/// counting sign assignments per attainable rank sum.
pub fn wilcoxon_exact(pairs: &[(f64, f64)]) -> WilcoxonResult {
    let (positive, doubled, _) = signed_ranks(pairs);
    let k = positive.len();
    let w2: u64 = positive.iter().zip(&doubled).filter(|(p, _)| **p).map(|(_, r)| r).sum();
    if k == 0 {
        return WilcoxonResult {
            w_plus: 0.0,
            p_value: 1.0,
            informative: 0,
            exact: true,
        };
    }
    let total: u64 = doubled.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in &doubled {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let at_least: u64 = counts[w2 as usize..].iter().sum();
    let at_most: u64 = counts[..=w2 as usize].iter().sum();
    let tail = at_least.min(at_most);
    let p = ((2 * tail) as f64 / (1u64 << k) as f64).min(1.0);
    WilcoxonResult {
        w_plus: w2 as f64 / 2.0,
        p_value: p,
        informative: k,
        exact: true,
    }
}

/// Normal approximation with tie and continuity corrections.
pub fn wilcoxon_normal(pairs: &[(f64, f64)]) -> WilcoxonResult {
    let (positive, doubled, ties) = signed_ranks(pairs);
    let k = positive.len();
    let w_plus: f64 = positive
        .iter()
        .zip(&doubled)
        .filter(|(p, _)| **p)
        .map(|(_, &r)| r as f64 / 2.0)
        .sum();
    let kf = k as f64;
    let mean = kf * (kf + 1.0) / 4.0;
    let tie_term: f64 = ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum::<f64>() / 48.0;
    let var = kf * (kf + 1.0) * (2.0 * kf + 1.0) / 24.0 - tie_term;
    let p_value = if k == 0 || var <= 0.0 {
        1.0
    } else {
        let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        (2.0 * normal.cdf(-z)).min(1.0)
    };
    WilcoxonResult {
        w_plus,
        p_value,
        informative: k,
        exact: false,
    }
}

/// Two-sided signed-rank test on `a − b`; exact up to 20 informative pairs.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> WilcoxonResult {
    let informative = pairs.iter().filter(|(a, b)| a - b != 0.0).count();
    if informative <= EXACT_LIMIT {
        wilcoxon_exact(pairs)
    } else {
        wilcoxon_normal(pairs)
    }
}
