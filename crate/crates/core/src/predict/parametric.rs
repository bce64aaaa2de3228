use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{MatchQuery, Method, WinProb};
use crate::error::{Error, Result};
use crate::ratings::logistic::sigmoid;
use crate::ratings::{LogisticModel, StrengthModel};

/// Win probability from the Student-t predictive of the linear model.
///
/// `P(mov > 0) = F_t(yhat / (sigma * sqrt(1 + h)))` with `n - p` degrees of freedom.
pub fn linear_t_win_prob(model: &StrengthModel, query: &MatchQuery) -> Result<WinProb> {
    let df = model.df();
    let sigma = match model.sigma_hat() {
        Some(s) if df >= 1 => s,
        _ => {
            return Err(Error::Invalid(format!(
                "t predictive needs n - p >= 1, have {} games and {} parameters",
                model.n, model.p_eff
            )))
        }
    };
    let row = query.row(model.baseline);
    let yhat = model.predict(&row);
    let p = if sigma == 0.0 {
        // a perfect fit leaves no predictive spread
        match yhat.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => 1.0,
            Some(std::cmp::Ordering::Less) => 0.0,
            _ => 0.5,
        }
    } else {
        let scale = sigma * (1.0 + model.leverage(&row)).sqrt();
        let t = StudentsT::new(0.0, 1.0, df as f64)
            .map_err(|e| Error::Internal(format!("t distribution: {e}")))?;
        // 1 - F(-z) written as F(z) to keep precision in the upper tail
        t.cdf(yhat / scale)
    };
    Ok(WinProb::new(p, Method::LinearT))
}

pub fn logistic_win_prob(model: &LogisticModel, query: &MatchQuery) -> WinProb {
    let eta = model.log_odds(&query.row(model.baseline));
    WinProb::new(sigmoid(eta), Method::Logistic)
}
