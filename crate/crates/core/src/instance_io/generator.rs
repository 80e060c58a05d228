//! Seeded random instances with cover rows.
//!
//! Draw order for a given seed, all from one SplitMix64 stream:
//!
//! 1. for each variable `i`: base cost `c_i ∈ [c_min, c_max]`, then
//!    `l_i ∈ [(1−ρ)c_i, c_i]`, then `u_i ∈ [c_i, (1+ρ)c_i]`, both rounded to
//!    six decimals;
//! 2. for each row: one membership draw per variable (probability =
//!    density), repeated until the row is non-empty, and a coefficient in
//!    `[1, 50]` right after each selected membership draw.
//!
//! Each row reads `Σ a_i x_i ≥ ⌈rhs_fraction · Σ a_i⌉` and is stored in
//! `≤` form, so the all-ones vector is always feasible.

use crate::error::{Error, Result};
use crate::model::{IntervalIlpInstance, LinearConstraint};

const COEFFICIENT_MAX: u64 = 50;
const INTERVAL_SCALE: f64 = 1e6;

/// SplitMix64 (Steele, Lea & Flood), the seeding generator of the xoshiro
/// family. Fixed constants make streams identical on every platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[lo, hi]`, rejection sampled.
    pub fn range_u64(&mut self, lo: u64, hi: u64) -> u64 {
        let span = hi - lo + 1;
        if span == 0 {
            return self.next_u64();
        }
        let threshold = span.wrapping_neg() % span;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return lo + r % span;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    pub n: usize,
    pub m: usize,
    pub density: f64,
    pub c_min: u64,
    pub c_max: u64,
    pub spread: f64,
    pub rhs_fraction: f64,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            n: 10,
            m: 5,
            density: 0.3,
            c_min: 1,
            c_max: 100,
            spread: 0.5,
            rhs_fraction: 0.5,
            seed: 1,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad(format!("density must lie in (0, 1], got {}", self.density));
        }
        if self.c_min < 1 || self.c_min > self.c_max {
            return bad(format!(
                "cost range must satisfy 1 ≤ c_min ≤ c_max, got [{}, {}]",
                self.c_min, self.c_max
            ));
        }
        if !(self.spread > 0.0 && self.spread <= 1.0) {
            return bad(format!("spread must lie in (0, 1], got {}", self.spread));
        }
        if !(self.rhs_fraction > 0.0 && self.rhs_fraction <= 1.0) {
            return bad(format!("rhs fraction must lie in (0, 1], got {}", self.rhs_fraction));
        }
        Ok(())
    }
}

fn quantize(v: f64) -> f64 {
    (v * INTERVAL_SCALE).round() / INTERVAL_SCALE
}

pub fn generate_instance(p: &GeneratorParams) -> Result<IntervalIlpInstance> {
    p.validate()?;
    let mut rng = SplitMix64::new(p.seed);

    let mut lower = Vec::with_capacity(p.n);
    let mut upper = Vec::with_capacity(p.n);
    for _ in 0..p.n {
        let c = rng.range_u64(p.c_min, p.c_max) as f64;
        let l = quantize(c * (1.0 - p.spread * rng.next_f64()));
        let u = quantize(c * (1.0 + p.spread * rng.next_f64()));
        lower.push(l.min(c));
        upper.push(u.max(c));
    }

    let mut constraints = Vec::with_capacity(p.m);
    for _ in 0..p.m {
        let terms = loop {
            let mut terms = Vec::new();
            for i in 0..p.n {
                if rng.next_f64() < p.density {
                    terms.push((i, rng.range_u64(1, COEFFICIENT_MAX)));
                }
            }
            if !terms.is_empty() {
                break terms;
            }
        };
        let total: u64 = terms.iter().map(|&(_, a)| a).sum();
        let rhs = (p.rhs_fraction * total as f64).ceil();
        let terms = terms.into_iter().map(|(i, a)| (i, -(a as f64))).collect();
        constraints.push(LinearConstraint::le(terms, -rhs));
    }

    IntervalIlpInstance::new(
        format!("gen_n{}_m{}_s{}", p.n, p.m, p.seed),
        lower,
        upper,
        constraints,
    )
}
