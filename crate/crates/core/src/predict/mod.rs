//! Single-game win probabilities by three routes.

mod conformal;
mod parametric;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use conformal::{
    conformal_pi, conformal_win_prob, cpd_curve, in_conformal_region, ConformalScores, CpdCurve,
    Grid,
};
pub use parametric::{linear_t_win_prob, logistic_win_prob};

use crate::error::{Error, Result};
use crate::ingest::{GameRecord, Phase, TeamId, TeamTable, Venue};
use crate::ratings::{
    build_design, fit_logistic, fit_strengths, Design, DesignRow, LogisticModel, Ranking,
    StrengthModel,
};
use crate::tourney::PairwiseMatrix;

/// Smoothing weight for ties in the conformal p-value.
pub const TAU: f64 = 0.5;

/// A game to predict. The first-listed team plays at home unless `neutral`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchQuery {
    pub home: TeamId,
    pub away: TeamId,
    pub neutral: bool,
}

impl MatchQuery {
    pub fn new(home: TeamId, away: TeamId, neutral: bool) -> Result<Self> {
        if home == away {
            return Err(Error::Invalid(format!("{home} cannot play itself")));
        }
        Ok(Self { home, away, neutral })
    }

    pub fn row(&self, baseline: TeamId) -> DesignRow {
        DesignRow::new(self.home, self.away, self.neutral, baseline)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Conformal,
    LinearT,
    Logistic,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Conformal, Method::LinearT, Method::Logistic];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Conformal => "conformal",
            Method::LinearT => "linear_t",
            Method::Logistic => "logistic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "conformal" | "cpd" => Ok(Method::Conformal),
            "linear_t" | "linear-t" | "t" | "linear" => Ok(Method::LinearT),
            "logistic" | "logit" => Ok(Method::Logistic),
            _ => Err(Error::Invalid(format!(
                "unknown method '{s}' (expected conformal, linear_t or logistic)"
            ))),
        }
    }
}

/// Probability that the first-listed team wins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WinProb {
    pub p: f64,
    pub method: Method,
}

impl WinProb {
    pub fn new(p: f64, method: Method) -> Self {
        Self { p, method }
    }
}

/// Regular-season games strictly before week `period`.
pub fn games_before(games: &[GameRecord], period: u32) -> Vec<GameRecord> {
    games
        .iter()
        .filter(|g| g.phase == Phase::Regular && g.period < period)
        .cloned()
        .collect()
}

/// Both fitted models over one training set.
#[derive(Debug, Clone)]
pub struct Predictor {
    pub design: Design,
    pub strengths: StrengthModel,
    pub logistic: LogisticModel,
}

impl Predictor {
    pub fn fit(games: &[GameRecord], teams: &TeamTable) -> Result<Self> {
        let design = build_design(games, teams)?;
        let wins: Vec<bool> = games.iter().map(GameRecord::home_won).collect();
        Self::from_design(design, &wins)
    }

    pub fn from_design(design: Design, wins: &[bool]) -> Result<Self> {
        let strengths = fit_strengths(&design)?;
        let logistic = fit_logistic(&design, wins)?;
        Ok(Self {
            design,
            strengths,
            logistic,
        })
    }

    pub fn win_prob(&self, method: Method, query: &MatchQuery) -> Result<WinProb> {
        self.check(query)?;
        match method {
            Method::Conformal => conformal_win_prob(&self.design, &self.strengths, query),
            Method::LinearT => linear_t_win_prob(&self.strengths, query),
            Method::Logistic => Ok(logistic_win_prob(&self.logistic, query)),
        }
    }

    pub fn cpd(&self, query: &MatchQuery, grid: &Grid) -> Result<CpdCurve> {
        self.check(query)?;
        cpd_curve(&self.design, &self.strengths, query, grid)
    }

    fn check(&self, query: &MatchQuery) -> Result<()> {
        let n = self.design.num_teams;
        if query.home.0 >= n || query.away.0 >= n {
            return Err(Error::UnknownTeams(vec![
                query.home.to_string(),
                query.away.to_string(),
            ]));
        }
        Ok(())
    }

    pub fn ranking(&self) -> Ranking {
        Ranking::from_strengths(&self.strengths.theta_hat, &self.design.team_names)
    }

    /// Win probabilities for every pair of `teams`.
    ///
    /// Under [`Venue::Neutral`] the lower id is listed first at a neutral
    /// site. Under [`Venue::HigherRankedHome`] the team ranked higher by
    /// `ranking` (or by fitted strength) is at home.
    pub fn pairwise(
        &self,
        method: Method,
        teams: &[TeamId],
        venue: Venue,
        ranking: Option<&Ranking>,
    ) -> Result<PairwiseMatrix> {
        let own;
        let ranking = match ranking {
            Some(r) => r,
            None => {
                own = self.ranking();
                &own
            }
        };
        PairwiseMatrix::try_from_fn(teams, |u, v| match venue {
            Venue::Neutral => Ok(self.win_prob(method, &MatchQuery::new(u, v, true)?)?.p),
            Venue::HigherRankedHome => {
                if ranking.rank(u) < ranking.rank(v) {
                    Ok(self.win_prob(method, &MatchQuery::new(u, v, false)?)?.p)
                } else {
                    Ok(1.0 - self.win_prob(method, &MatchQuery::new(v, u, false)?)?.p)
                }
            }
        })
    }
}
