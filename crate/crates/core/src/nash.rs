//! Nash equilibria of small bimatrix games.
//!
//! Equilibria are found by enumerating supports. For every own-support `S`
//! and every set `E` of opponent strategies that should be made indifferent,
//! the indifference system is solved; systems without a unique solution are
//! skipped. The surviving mixed strategies are the vertices of each player's
//! best-response polytope, and every pair of them is checked for profitable
//! deviations. Allowing `|S| != |E|` is what keeps the search complete on
//! degenerate games, where duplicated payoff cells are the norm.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::payoff::PayoffMatrix;

/// Default tolerance for accepting a profile as an equilibrium.
pub const VERIFY_TOL: f64 = 1e-9;
/// Largest game (per side) the enumerator accepts.
pub const MAX_STRATEGIES: usize = 8;

const PIVOT_EPS: f64 = 1e-12;
const CONSISTENCY_EPS: f64 = 1e-9;
const PROB_EPS: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-7;
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::invalid("mixed strategy", "must not be empty"));
        }
        if let Some(p) = probabilities.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::invalid(
                "mixed strategy",
                format!("probabilities must be finite and >= 0, got {p}"),
            ));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "mixed strategy",
                format!("probabilities must sum to 1 within 1e-9, got {sum}"),
            ));
        }
        Ok(Self(probabilities))
    }

    pub fn pure(n: usize, index: usize) -> Self {
        let mut v = vec![0.0; n];
        v[index] = 1.0;
        Self(v)
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices played with positive probability.
    pub fn support(&self) -> Vec<usize> {
        support_of(&self.0)
    }

    /// Index of the pure strategy hit by a uniform draw `u` in `[0, 1)`.
    pub fn sample_index(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
        last
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Vec<f64> {
        s.0
    }
}

fn support_of(p: &[f64]) -> Vec<usize> {
    p.iter()
        .enumerate()
        .filter(|(_, &x)| x > PROB_EPS)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumProfile {
    pub sigma_row: MixedStrategy,
    pub sigma_col: MixedStrategy,
    pub payoff_row: f64,
    pub payoff_col: f64,
    /// Largest gain either player could get by deviating to a pure strategy.
    pub residual: f64,
}

impl EquilibriumProfile {
    pub fn payoff_sum(&self) -> f64 {
        self.payoff_row + self.payoff_col
    }

    fn distance(&self, other: &Self) -> f64 {
        self.sigma_row
            .0
            .iter()
            .zip(&other.sigma_row.0)
            .chain(self.sigma_col.0.iter().zip(&other.sigma_col.0))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_dims(m: &PayoffMatrix, row: &[f64], col: &[f64]) -> Result<()> {
    if row.len() != m.rows() || col.len() != m.cols() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", m.rows(), m.cols()),
            found: format!("{}x{}", row.len(), col.len()),
        });
    }
    Ok(())
}

/// Row player's payoff of each pure row against `col`.
fn row_values(m: &PayoffMatrix, col: &[f64]) -> Vec<f64> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.row_payoff(i, j) * col[j]).sum())
        .collect()
}

/// Column player's payoff of each pure column against `row`.
fn col_values(m: &PayoffMatrix, row: &[f64]) -> Vec<f64> {
    (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m.col_payoff(i, j) * row[i]).sum())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Bilinear expected payoffs `(σ_rᵀ A σ_c, σ_rᵀ B σ_c)`.
pub fn expected_payoffs(m: &PayoffMatrix, sigma_row: &MixedStrategy, sigma_col: &MixedStrategy) -> Result<(f64, f64)> {
    check_dims(m, &sigma_row.0, &sigma_col.0)?;
    let rv = row_values(m, &sigma_col.0);
    let cv = col_values(m, &sigma_row.0);
    Ok((dot(&sigma_row.0, &rv), dot(&sigma_col.0, &cv)))
}

fn residual_of(m: &PayoffMatrix, row: &[f64], col: &[f64]) -> (f64, f64, f64) {
    let rv = row_values(m, col);
    let cv = col_values(m, row);
    let u_row = dot(row, &rv);
    let u_col = dot(col, &cv);
    let residual = (max_of(&rv) - u_row).max(max_of(&cv) - u_col).max(0.0);
    (residual, u_row, u_col)
}

/// Max over both players of (best pure-response payoff − profile payoff).
pub fn deviation_residual(m: &PayoffMatrix, sigma_row: &MixedStrategy, sigma_col: &MixedStrategy) -> Result<f64> {
    check_dims(m, &sigma_row.0, &sigma_col.0)?;
    Ok(residual_of(m, &sigma_row.0, &sigma_col.0).0)
}

/// Recomputes the deviation residual of `profile` against `m`. The profile is
/// an equilibrium at tolerance `tol` iff the result is `<= tol`.
pub fn verify_equilibrium(m: &PayoffMatrix, profile: &EquilibriumProfile) -> Result<f64> {
    deviation_residual(m, &profile.sigma_row, &profile.sigma_col)
}

/// Set bits of `mask` as indices, ascending.
fn indices(mask: u32, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |i| mask & (1 << i) != 0)
}

/// Dense augmented system `[A | b]`, at most 9 equations in 9 unknowns.
struct System {
    a: [[f64; MAX_STRATEGIES + 2]; MAX_STRATEGIES + 1],
    eqs: usize,
    unknowns: usize,
}

impl System {
    /// Gaussian elimination with partial pivoting. `None` unless the system is
    /// consistent and has exactly one solution.
    fn solve(mut self) -> Option<[f64; MAX_STRATEGIES + 1]> {
        let (n, rhs) = (self.unknowns, self.unknowns);
        if self.eqs < n {
            return None;
        }
        for c in 0..n {
            let pivot = (c..self.eqs).max_by(|&x, &y| {
                self.a[x][c]
                    .abs()
                    .partial_cmp(&self.a[y][c].abs())
                    .unwrap_or(Ordering::Equal)
            })?;
            if self.a[pivot][c].abs() < PIVOT_EPS {
                return None;
            }
            self.a.swap(c, pivot);
            for r in c + 1..self.eqs {
                let f = self.a[r][c] / self.a[c][c];
                if f != 0.0 {
                    for k in c..=rhs {
                        self.a[r][k] -= f * self.a[c][k];
                    }
                }
            }
        }
        if (n..self.eqs).any(|r| self.a[r][rhs].abs() > CONSISTENCY_EPS) {
            return None;
        }
        let mut x = [0.0; MAX_STRATEGIES + 1];
        for c in (0..n).rev() {
            let s: f64 = (c + 1..n).map(|k| self.a[c][k] * x[k]).sum();
            x[c] = (self.a[c][rhs] - s) / self.a[c][c];
        }
        Some(x)
    }
}

/// Mixed strategies of one player that are vertices of its best-response
/// polytope. `opp(i, j)` is the opponent's payoff when this player plays `i`
/// and the opponent plays `j`.
fn vertex_candidates(own: usize, other: usize, opp: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    // Affine rescaling leaves the solutions unchanged and makes the pivot
    // threshold scale-free.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..own {
        for j in 0..other {
            lo = lo.min(opp(i, j));
            hi = hi.max(opp(i, j));
        }
    }
    let scale = if hi > lo { 1.0 / (hi - lo) } else { 0.0 };
    let norm = |i: usize, j: usize| (opp(i, j) - lo) * scale;

    let mut out: Vec<Vec<f64>> = Vec::new();
    for s_mask in 1u32..(1 << own) {
        let support: Vec<usize> = indices(s_mask, own).collect();
        for e_mask in 1u32..(1 << other) {
            let eqs = e_mask.count_ones() as usize + 1;
            let unknowns = support.len() + 1;
            if eqs < unknowns {
                continue;
            }
            let mut sys = System {
                a: [[0.0; MAX_STRATEGIES + 2]; MAX_STRATEGIES + 1],
                eqs,
                unknowns,
            };
            for (r, j) in indices(e_mask, other).enumerate() {
                for (c, &i) in support.iter().enumerate() {
                    sys.a[r][c] = norm(i, j);
                }
                sys.a[r][unknowns - 1] = -1.0;
            }
            let last = eqs - 1;
            for c in 0..support.len() {
                sys.a[last][c] = 1.0;
            }
            sys.a[last][unknowns] = 1.0;

            let Some(sol) = sys.solve() else { continue };
            if sol[..support.len()].iter().any(|&p| p < -PROB_EPS) {
                continue;
            }
            let mut x = vec![0.0; own];
            for (c, &i) in support.iter().enumerate() {
                x[i] = sol[c].max(0.0);
            }
            let total: f64 = x.iter().sum();
            x.iter_mut().for_each(|p| *p /= total);
            let dup = out
                .iter()
                .any(|y| y.iter().zip(&x).all(|(a, b)| (a - b).abs() <= PROB_EPS));
            if !dup {
                out.push(x);
            }
        }
    }
    out
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Ordering by support index sets, then by probability vectors (descending).
fn profile_order(a: &EquilibriumProfile, b: &EquilibriumProfile) -> Ordering {
    (a.sigma_row.support(), a.sigma_col.support())
        .cmp(&(b.sigma_row.support(), b.sigma_col.support()))
        .then_with(|| lex_cmp(&b.sigma_row.0, &a.sigma_row.0))
        .then_with(|| lex_cmp(&b.sigma_col.0, &a.sigma_col.0))
}

/// All extreme Nash equilibria of `m`, deduplicated and in a fixed order
/// (by support sets, lexicographically).
pub fn enumerate_equilibria(m: &PayoffMatrix, tol: f64) -> Result<Vec<EquilibriumProfile>> {
    if m.rows() > MAX_STRATEGIES || m.cols() > MAX_STRATEGIES {
        return Err(Error::DimensionMismatch {
            expected: format!("at most {MAX_STRATEGIES}x{MAX_STRATEGIES}"),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let xs = vertex_candidates(m.rows(), m.cols(), |i, j| m.col_payoff(i, j));
    let ys = vertex_candidates(m.cols(), m.rows(), |j, i| m.row_payoff(i, j));
    let col_vals: Vec<Vec<f64>> = xs.iter().map(|x| col_values(m, x)).collect();
    let row_vals: Vec<Vec<f64>> = ys.iter().map(|y| row_values(m, y)).collect();

    let mut found: Vec<EquilibriumProfile> = Vec::new();
    for (x, cv) in xs.iter().zip(&col_vals) {
        let best_col = max_of(cv);
        for (y, rv) in ys.iter().zip(&row_vals) {
            let u_row = dot(x, rv);
            let u_col = dot(y, cv);
            let residual = (max_of(rv) - u_row).max(best_col - u_col).max(0.0);
            if residual > tol {
                continue;
            }
            let profile = EquilibriumProfile {
                sigma_row: MixedStrategy(x.clone()),
                sigma_col: MixedStrategy(y.clone()),
                payoff_row: u_row,
                payoff_col: u_col,
                residual,
            };
            if !found.iter().any(|p| p.distance(&profile) < DEDUP_TOL) {
                found.push(profile);
            }
        }
    }
    if found.is_empty() {
        return Err(Error::NoEquilibrium {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    found.sort_by(profile_order);
    Ok(found)
}

/// How one profile is chosen when a game has several equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    /// Largest payoff sum; ties go to the smallest support sets, then to the
    /// lexicographically largest probability vectors.
    #[default]
    Welfare,
    /// First profile in enumeration order.
    First,
}

/// Picks one equilibrium from `candidates` according to `rule`.
pub fn select_equilibrium(
    candidates: &[EquilibriumProfile],
    m: &PayoffMatrix,
    rule: SelectionRule,
) -> Result<EquilibriumProfile> {
    let first = candidates.first().ok_or(Error::EmptyCandidates)?;
    if rule == SelectionRule::First {
        return Ok(first.clone());
    }
    let mut best: Option<(f64, &EquilibriumProfile)> = None;
    for c in candidates {
        let (u_r, u_c) = expected_payoffs(m, &c.sigma_row, &c.sigma_col)?;
        let sum = u_r + u_c;
        best = match best {
            None => Some((sum, c)),
            Some((bs, bp)) => {
                let eps = TIE_EPS * bs.abs().max(sum.abs()).max(1.0);
                let better = if sum > bs + eps {
                    true
                } else if sum < bs - eps {
                    false
                } else {
                    profile_order(c, bp) == Ordering::Less
                };
                if better {
                    Some((sum, c))
                } else {
                    Some((bs, bp))
                }
            }
        };
    }
    Ok(best.expect("nonempty").1.clone())
}

/// Enumerates and selects in one call.
pub fn solve(m: &PayoffMatrix, tol: f64, rule: SelectionRule) -> Result<EquilibriumProfile> {
    let all = enumerate_equilibria(m, tol)?;
    select_equilibrium(&all, m, rule)
}
