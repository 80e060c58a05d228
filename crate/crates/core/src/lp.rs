//! Bounded-variable primal simplex on a dense tableau.
//!
//! Columns carry explicit `[lo, hi]` bounds (either side may be infinite),
//! every row is `a·x ≤ b` and receives a slack. Rows whose slack would start
//! negative get an artificial column and phase 1 drives the artificial sum to
//! zero. Pricing is Dantzig's largest reduced cost until too many degenerate
//! pivots have been seen, then Bland's lowest-index rule for the rest of the
//! solve.

use crate::error::{Error, Result};
use crate::model::{LinearConstraint, Sense};

const PIVOT_TOL: f64 = 1e-10;
const REDUCED_COST_TOL: f64 = 1e-9;
const PHASE1_TOL: f64 = 1e-7;
const DEGENERATE_STEP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    /// Minimised.
    pub objective: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
    /// `≤` rows only.
    pub rows: Vec<LinearConstraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Option<Vec<f64>>,
    pub objective: Option<f64>,
    pub iterations: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, iterations: usize) -> Self {
        LpSolution {
            status,
            x: None,
            objective: None,
            iterations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Position {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free column parked at zero.
    Zero,
}

enum Step {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    tab: Vec<f64>,
    basis: Vec<usize>,
    position: Vec<Position>,
    value: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    reduced: Vec<f64>,
    iterations: usize,
    iteration_cap: usize,
    degenerate: usize,
    degenerate_cap: usize,
    bland: bool,
}

impl Tableau {
    fn row(&self, i: usize) -> &[f64] {
        &self.tab[i * self.cols..(i + 1) * self.cols]
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.tab[i * self.cols + j]
    }

    fn recompute_reduced_costs(&mut self) {
        self.reduced.clone_from(&self.cost);
        for i in 0..self.rows {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.tab[i * self.cols..(i + 1) * self.cols];
                for (d, &a) in self.reduced.iter_mut().zip(row) {
                    *d -= cb * a;
                }
            }
        }
        for i in 0..self.rows {
            self.reduced[self.basis[i]] = 0.0;
        }
    }

    /// Entering column and its direction of motion (+1 up, −1 down).
    fn price(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.cols {
            let d = self.reduced[j];
            let dir = match self.position[j] {
                Position::Basic => continue,
                _ if self.lo[j] == self.hi[j] => continue,
                Position::AtLower if d < -REDUCED_COST_TOL => 1.0,
                Position::AtUpper if d > REDUCED_COST_TOL => -1.0,
                Position::Zero if d.abs() > REDUCED_COST_TOL => -d.signum(),
                _ => continue,
            };
            if self.bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, score)| d.abs() > score) {
                best = Some((j, dir, d.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn iterate(&mut self) -> Result<Option<Step>> {
        loop {
            let Some((q, dir)) = self.price() else {
                return Ok(Some(Step::Optimal));
            };
            if self.iterations >= self.iteration_cap {
                return Ok(None);
            }
            self.iterations += 1;

            // Ratio test over the basic columns.
            let mut leave: Option<(usize, f64, bool)> = None;
            let mut tiny_pivot = false;
            for i in 0..self.rows {
                let alpha = self.entry(i, q) * dir;
                let b = self.basis[i];
                let (ratio, to_upper) = if alpha > PIVOT_TOL {
                    if self.lo[b] == f64::NEG_INFINITY {
                        continue;
                    }
                    ((self.value[b] - self.lo[b]) / alpha, false)
                } else if alpha < -PIVOT_TOL {
                    if self.hi[b] == f64::INFINITY {
                        continue;
                    }
                    ((self.hi[b] - self.value[b]) / -alpha, true)
                } else {
                    if alpha != 0.0 {
                        tiny_pivot = true;
                    }
                    continue;
                };
                let ratio = ratio.max(0.0);
                let better = match leave {
                    None => true,
                    Some((r, best, _)) => {
                        if ratio < best - DEGENERATE_STEP {
                            true
                        } else if ratio <= best + DEGENERATE_STEP {
                            if self.bland {
                                b < self.basis[r]
                            } else {
                                alpha.abs() > self.entry(r, q).abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio, to_upper));
                }
            }

            let flip = self.hi[q] - self.lo[q];
            let flip_wins = flip.is_finite() && leave.is_none_or(|(_, r, _)| flip < r);
            let step = if flip_wins {
                flip
            } else if let Some((_, r, _)) = leave {
                r
            } else if tiny_pivot {
                return Err(Error::NumericalBreakdown(format!(
                    "no pivot above {PIVOT_TOL:e} in column {q}"
                )));
            } else {
                return Ok(Some(Step::Unbounded));
            };

            if step <= DEGENERATE_STEP {
                self.degenerate += 1;
                if self.degenerate > self.degenerate_cap {
                    self.bland = true;
                }
            }

            if step > 0.0 {
                for i in 0..self.rows {
                    let a = self.entry(i, q);
                    if a != 0.0 {
                        self.value[self.basis[i]] -= a * dir * step;
                    }
                }
                self.value[q] += dir * step;
            }

            if flip_wins {
                if dir > 0.0 {
                    self.position[q] = Position::AtUpper;
                    self.value[q] = self.hi[q];
                } else {
                    self.position[q] = Position::AtLower;
                    self.value[q] = self.lo[q];
                }
                continue;
            }

            let (r, _, to_upper) = leave.expect("pivot row chosen above");
            let out = self.basis[r];
            if to_upper {
                self.position[out] = Position::AtUpper;
                self.value[out] = self.hi[out];
            } else {
                self.position[out] = Position::AtLower;
                self.value[out] = self.lo[out];
            }
            self.pivot(r, q);
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let p = self.entry(r, q);
        {
            let row = &mut self.tab[r * cols..(r + 1) * cols];
            for a in row.iter_mut() {
                *a /= p;
            }
            row[q] = 1.0;
        }
        let pivot_row: Vec<f64> = self.row(r).to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.tab[i * cols + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.tab[i * cols..(i + 1) * cols];
            for (a, &pr) in row.iter_mut().zip(&pivot_row) {
                *a -= f * pr;
            }
            row[q] = 0.0;
        }
        let f = self.reduced[q];
        if f != 0.0 {
            for (d, &pr) in self.reduced.iter_mut().zip(&pivot_row) {
                *d -= f * pr;
            }
            self.reduced[q] = 0.0;
        }
        self.basis[r] = q;
        self.position[q] = Position::Basic;
    }
}

fn validate(p: &LpProblem) -> Result<()> {
    let n = p.objective.len();
    if p.bounds.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.bounds.len(),
        });
    }
    for (j, &(lo, hi)) in p.bounds.iter().enumerate() {
        if lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::InvalidParams(format!(
                "column {j} has empty bound range [{lo}, {hi}]"
            )));
        }
    }
    for row in &p.rows {
        if row.sense != Sense::Le {
            return Err(Error::InvalidParams("LP rows must be in ≤ form".into()));
        }
        if let Some(&(j, _)) = row.terms.iter().find(|&&(j, _)| j >= n) {
            return Err(Error::InvalidParams(format!(
                "row references column {j} but there are {n} columns"
            )));
        }
    }
    Ok(())
}

/// Solves `min c·x  s.t.  rows, lo ≤ x ≤ hi`.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    validate(p)?;
    let n = p.objective.len();
    let m = p.rows.len();

    let mut start = vec![0.0; n];
    let mut start_pos = vec![Position::Zero; n];
    for j in 0..n {
        let (lo, hi) = p.bounds[j];
        if lo.is_finite() {
            start[j] = lo;
            start_pos[j] = Position::AtLower;
        } else if hi.is_finite() {
            start[j] = hi;
            start_pos[j] = Position::AtUpper;
        }
    }
    let residual: Vec<f64> = p.rows.iter().map(|r| r.rhs - r.activity(&start)).collect();
    let artificial_rows: Vec<usize> = (0..m).filter(|&i| residual[i] < 0.0).collect();
    let n_art = artificial_rows.len();
    let cols = n + m + n_art;

    let mut lo = Vec::with_capacity(cols);
    let mut hi = Vec::with_capacity(cols);
    for &(l, h) in &p.bounds {
        lo.push(l);
        hi.push(h);
    }
    lo.extend(std::iter::repeat_n(0.0, m + n_art));
    hi.extend(std::iter::repeat_n(f64::INFINITY, m + n_art));

    let mut tab = vec![0.0; m * cols];
    let mut basis = vec![0; m];
    let mut value = start;
    value.extend(std::iter::repeat_n(0.0, m + n_art));
    let mut position = start_pos;
    position.extend(std::iter::repeat_n(Position::AtLower, m + n_art));

    let mut next_art = n + m;
    for (i, row) in p.rows.iter().enumerate() {
        let line = &mut tab[i * cols..(i + 1) * cols];
        let sign = if residual[i] < 0.0 { -1.0 } else { 1.0 };
        for &(j, a) in &row.terms {
            line[j] += sign * a;
        }
        line[n + i] = sign;
        if residual[i] < 0.0 {
            line[next_art] = 1.0;
            basis[i] = next_art;
            value[next_art] = -residual[i];
            position[next_art] = Position::Basic;
            next_art += 1;
        } else {
            basis[i] = n + i;
            value[n + i] = residual[i];
            position[n + i] = Position::Basic;
        }
    }

    let mut t = Tableau {
        rows: m,
        cols,
        tab,
        basis,
        position,
        value,
        lo,
        hi,
        cost: vec![0.0; cols],
        reduced: vec![0.0; cols],
        iterations: 0,
        iteration_cap: 100 * (m + n + 1),
        degenerate: 0,
        degenerate_cap: 2 * (m + n),
        bland: false,
    };

    if n_art > 0 {
        for c in &mut t.cost[n + m..] {
            *c = 1.0;
        }
        t.recompute_reduced_costs();
        match t.iterate()? {
            None => return Ok(LpSolution::without_point(LpStatus::IterationLimit, t.iterations)),
            Some(Step::Unbounded) => {
                return Err(Error::NumericalBreakdown(
                    "phase 1 objective reported unbounded".into(),
                ))
            }
            Some(Step::Optimal) => {}
        }
        let infeasibility: f64 = t.value[n + m..].iter().sum();
        if infeasibility > PHASE1_TOL {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, t.iterations));
        }
        for j in n + m..cols {
            t.hi[j] = 0.0;
            t.cost[j] = 0.0;
            if t.position[j] != Position::Basic {
                t.position[j] = Position::AtLower;
                t.value[j] = 0.0;
            }
        }
    }

    t.cost[..n].copy_from_slice(&p.objective);
    t.recompute_reduced_costs();
    match t.iterate()? {
        None => Ok(LpSolution::without_point(LpStatus::IterationLimit, t.iterations)),
        Some(Step::Unbounded) => Ok(LpSolution::without_point(LpStatus::Unbounded, t.iterations)),
        Some(Step::Optimal) => {
            let x = t.value[..n].to_vec();
            let objective = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            Ok(LpSolution {
                status: LpStatus::Optimal,
                x: Some(x),
                objective: Some(objective),
                iterations: t.iterations,
            })
        }
    }
}
