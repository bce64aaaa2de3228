//! Conformal predictive distribution with the signed-residual conformity score.
//!
//! Adding the candidate point `(x, y_c)` and refitting least squares gives
//! coefficients that are affine in `y_c`:
//!
//! ```text
//! beta(y_c) = beta_A + y_c * b,   A = X'X + x x',  b = A^-1 x,  beta_A = A^-1 X'y
//! ```
//!
//! so every conformity score `R_i(y_c) = y_i - x_i' beta(y_c)` is affine in
//! `y_c` too. [`ConformalScores`] stores those lines once per query (via
//! Sherman-Morrison on the retained `(X'X)^-1`) and evaluates the smoothed
//! p-value for any candidate in `O(n)`. This is the full augmented refit,
//! just written in closed form.

use super::{MatchQuery, Method, WinProb, TAU};
use crate::error::{Error, Result};
use crate::ratings::{Design, DesignRow, StrengthModel};

/// Conformity scores of the augmented fit as lines in the candidate value.
#[derive(Debug, Clone)]
pub struct ConformalScores {
    /// `R_i(y) = intercept[i] - y * slope[i]` for the observed points.
    intercept: Vec<f64>,
    slope: Vec<f64>,
    /// `R_{n+1}(y) = y * new_slope - new_intercept` for the candidate point.
    new_intercept: f64,
    new_slope: f64,
}

impl ConformalScores {
    pub fn new(design: &Design, model: &StrengthModel, row: &DesignRow) -> Result<Self> {
        if design.len() != model.n {
            return Err(Error::Invalid(format!(
                "model was fitted on {} games but the design holds {}",
                model.n,
                design.len()
            )));
        }
        let g = model.xtx_inv_times(row);
        let g = g.as_slice();
        let h = row.dot(g);
        let denom = 1.0 + h;
        if !denom.is_finite() || denom <= 0.0 {
            return Err(Error::RankDeficient(
                "augmented design is singular for this query".into(),
            ));
        }
        let fitted_query = row.dot(&model.beta);
        let shift = fitted_query / denom;

        let mut intercept = Vec::with_capacity(design.len());
        let mut slope = Vec::with_capacity(design.len());
        for (r, y) in design.rows.iter().zip(&design.y) {
            let xg = r.dot(g);
            // x_i' beta_A = x_i' beta_ols - (x_i' g) * (x' beta_ols) / (1 + h)
            intercept.push(y - (r.dot(&model.beta) - xg * shift));
            slope.push(xg / denom);
        }
        Ok(Self {
            intercept,
            slope,
            new_intercept: shift,
            new_slope: 1.0 / denom,
        })
    }

    pub fn n(&self) -> usize {
        self.intercept.len()
    }

    /// Conformity score of observed point `i` for candidate `y_c`.
    pub fn score(&self, i: usize, y_c: f64) -> f64 {
        self.intercept[i] - y_c * self.slope[i]
    }

    pub fn candidate_score(&self, y_c: f64) -> f64 {
        y_c * self.new_slope - self.new_intercept
    }

    /// Smoothed conformal p-value `pi(y_c, tau)`.
    pub fn pi(&self, y_c: f64, tau: f64) -> f64 {
        let target = self.candidate_score(y_c);
        let mut below = 0usize;
        let mut equal = 1usize; // the candidate ties with itself
        for i in 0..self.n() {
            let r = self.score(i, y_c);
            if r < target {
                below += 1;
            } else if r == target {
                equal += 1;
            }
        }
        (below as f64 + tau * equal as f64) / (self.n() + 1) as f64
    }
}

pub fn conformal_pi(
    design: &Design,
    model: &StrengthModel,
    query: &MatchQuery,
    y_c: f64,
    tau: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Invalid(format!("tau {tau} outside [0, 1]")));
    }
    let row = query.row(model.baseline);
    Ok(ConformalScores::new(design, model, &row)?.pi(y_c, tau))
}

/// `1 - pi(0, 1/2)`: chance the home (first-listed) team wins.
pub fn conformal_win_prob(
    design: &Design,
    model: &StrengthModel,
    query: &MatchQuery,
) -> Result<WinProb> {
    let p = 1.0 - conformal_pi(design, model, query, 0.0, TAU)?;
    Ok(WinProb::new(p, Method::Conformal))
}

/// Whether `y` lies in the level `1 - alpha` conformal prediction region
/// `{y : (n + 1) pi(y, tau) <= ceil((1 - alpha)(n + 1))}`.
pub fn in_conformal_region(
    design: &Design,
    model: &StrengthModel,
    query: &MatchQuery,
    y: f64,
    alpha: f64,
    tau: f64,
) -> Result<bool> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Invalid(format!("alpha {alpha} outside [0, 1)")));
    }
    let n1 = (design.len() + 1) as f64;
    let pi = conformal_pi(design, model, query, y, tau)?;
    // (n + 1) pi is a multiple of tau; round off accumulated error before comparing
    let lhs = (n1 * pi * 1e9).round() / 1e9;
    Ok(lhs <= ((1.0 - alpha) * n1).ceil())
}

/// Evaluation grid `lo, lo + step, ..., <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            lo: -80.0,
            hi: 80.0,
            step: 1.0,
        }
    }
}

impl Grid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Invalid(format!("bad grid {lo}:{hi}:{step}")));
        }
        Ok(Self { lo, hi, step })
    }

    /// Parses `lo:hi:step`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Invalid(format!("grid must be lo:hi:step, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        Self::new(v[0], v[1], v[2])
    }

    /// Points computed as `lo + k * step` so refined grids hit shared points exactly.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

/// The function `y_c -> pi(y_c, 1/2)` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CpdCurve {
    pub points: Vec<(f64, f64)>,
    pub tau: f64,
}

const MONOTONE_TOLERANCE: f64 = 1e-12;

pub fn cpd_curve(
    design: &Design,
    model: &StrengthModel,
    query: &MatchQuery,
    grid: &Grid,
) -> Result<CpdCurve> {
    let scores = ConformalScores::new(design, model, &query.row(model.baseline))?;
    let points: Vec<(f64, f64)> = grid
        .points()
        .into_iter()
        .map(|y| (y, scores.pi(y, TAU)))
        .collect();
    for w in points.windows(2) {
        if w[1].1 < w[0].1 - MONOTONE_TOLERANCE {
            return Err(Error::Internal(format!(
                "predictive distribution decreases between {} ({}) and {} ({})",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    Ok(CpdCurve { points, tau: TAU })
}
