use nalgebra::DVector;

use super::design::{Design, DesignRow};
use super::linear::theta_from_beta;
use crate::error::{Error, Result};
use crate::ingest::TeamId;
use crate::linalg::weighted_normal_equations;

pub const MAX_ITERATIONS: usize = 100;
/// Max-norm of the score vector at convergence.
pub const SCORE_TOLERANCE: f64 = 1e-8;
/// Any coefficient beyond this many log-odds is taken as separation.
pub const SEPARATION_BOUND: f64 = 50.0;
/// A Newton step must also be this small; under separation steps stay near 1.
const STEP_TOLERANCE: f64 = 1e-6;

/// Logistic win model `logit P(home wins) = mu * home + theta_home - theta_away`.
#[derive(Debug, Clone)]
pub struct LogisticModel {
    pub mu_hat: f64,
    pub theta_hat: Vec<f64>,
    pub baseline: TeamId,
    pub beta: Vec<f64>,
    /// Standard errors from the inverse Fisher information at the last iterate.
    pub std_errors: Vec<f64>,
    pub converged: bool,
    pub separation: bool,
    pub iterations: usize,
}

impl LogisticModel {
    pub fn row(&self, home: TeamId, away: TeamId, neutral: bool) -> DesignRow {
        DesignRow::new(home, away, neutral, self.baseline)
    }

    pub fn log_odds(&self, row: &DesignRow) -> f64 {
        row.dot(&self.beta)
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Maximum-likelihood fit by iteratively reweighted least squares.
///
/// No regularization. When the data are separable the iterate is returned
/// with `converged = false` and `separation = true`.
pub fn fit_logistic(design: &Design, wins: &[bool]) -> Result<LogisticModel> {
    if wins.len() != design.len() {
        return Err(Error::Invalid(format!(
            "{} outcomes for {} design rows",
            wins.len(),
            design.len()
        )));
    }
    let p = design.num_params();
    let mut beta = DVector::<f64>::zeros(p);
    let mut converged = false;
    let mut separation = false;
    let mut iterations = 0;
    let mut std_errors = vec![f64::NAN; p];

    while iterations < MAX_ITERATIONS {
        let b = beta.as_slice();
        let probs: Vec<f64> = design.rows.iter().map(|r| sigmoid(r.dot(b))).collect();
        let weights = probs.iter().map(|&q| q * (1.0 - q));
        let resid = probs
            .iter()
            .zip(wins)
            .map(|(&q, &z)| (if z { 1.0 } else { 0.0 }) - q);
        let (info, _) = weighted_normal_equations(
            &design.rows,
            weights,
            std::iter::repeat(0.0),
            p,
        );
        let mut score = DVector::<f64>::zeros(p);
        for (row, r) in design.rows.iter().zip(resid) {
            for &(c, x) in row.entries().iter().flatten() {
                score[c] += x * r;
            }
        }
        let Some(chol) = info.cholesky() else {
            separation = true;
            break;
        };
        let step = chol.solve(&score);
        std_errors = chol.inverse().diagonal().iter().map(|v| v.sqrt()).collect();

        if score.amax() < SCORE_TOLERANCE && step.amax() < STEP_TOLERANCE {
            converged = true;
            break;
        }
        beta += step;
        iterations += 1;
        if beta.amax() > SEPARATION_BOUND {
            separation = true;
            break;
        }
    }
    if separation {
        log::warn!(
            "logistic fit: separation detected after {iterations} iterations (|beta| > {SEPARATION_BOUND}); MLE does not exist"
        );
    } else if !converged {
        log::warn!("logistic fit: no convergence in {MAX_ITERATIONS} iterations");
    }

    let beta: Vec<f64> = beta.iter().copied().collect();
    Ok(LogisticModel {
        mu_hat: beta[0],
        theta_hat: theta_from_beta(&beta, design.num_teams, design.baseline),
        baseline: design.baseline,
        beta,
        std_errors,
        converged,
        separation,
        iterations,
    })
}
