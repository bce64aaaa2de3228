use crate::error::{Error, Result};

/// Sum of independent Bernoulli variables with unequal success probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonBinomial {
    ps: Vec<f64>,
    /// `pmf[l] = P(L = l)` for `l = 0..=K`.
    pmf: Vec<f64>,
}

impl PoissonBinomial {
    pub fn new(ps: Vec<f64>) -> Result<Self> {
        if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Invalid(format!("success probability {p} outside [0, 1]")));
        }
        let mut pmf = vec![0.0; ps.len() + 1];
        pmf[0] = 1.0;
        for (k, &p) in ps.iter().enumerate() {
            for l in (1..=k + 1).rev() {
                pmf[l] = pmf[l] * (1.0 - p) + pmf[l - 1] * p;
            }
            pmf[0] *= 1.0 - p;
        }
        Ok(Self { ps, pmf })
    }

    pub fn ps(&self) -> &[f64] {
        &self.ps
    }

    pub fn len(&self) -> usize {
        self.ps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ps.is_empty()
    }

    /// `P(L = l)`; zero outside `0..=K`.
    pub fn pmf(&self, l: i64) -> f64 {
        if l < 0 {
            return 0.0;
        }
        self.pmf.get(l as usize).copied().unwrap_or(0.0)
    }

    /// `P(L <= l)`; 0 for `l < 0` and exactly 1 for `l >= K`.
    pub fn cdf(&self, l: i64) -> f64 {
        if l < 0 {
            return 0.0;
        }
        if l as usize >= self.ps.len() {
            return 1.0;
        }
        self.pmf[..=l as usize].iter().sum::<f64>().min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn degenerate_and_coins() {
        let zero = PoissonBinomial::new(vec![0.0; 5]).unwrap();
        assert_eq!(zero.cdf(0), 1.0);
        let coins = PoissonBinomial::new(vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(coins.cdf(1), 0.75, epsilon = 1e-15);
        assert_eq!(coins.cdf(-1), 0.0);
        assert_eq!(coins.cdf(2), 1.0);
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(PoissonBinomial::new(vec![0.2, 1.1]).is_err());
    }
}
