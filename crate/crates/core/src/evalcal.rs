//! Calibration and log-loss of the three win-probability routes on
//! post-season games.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{season_split, GameRecord, League, TeamTable};
use crate::predict::{MatchQuery, Method, Predictor};

pub const BIN_WIDTH: f64 = 0.025;
pub const NUM_BINS: usize = 40;
/// Predictions are clamped into `[CLAMP, 1 - CLAMP]` before taking logs.
pub const CLAMP: f64 = 1e-6;

/// One evaluated game with a prediction from every method (ordered as [`Method::ALL`]).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord {
    pub league: League,
    pub season: String,
    pub home_won: bool,
    pub probs: [f64; 3],
}

impl EvalRecord {
    pub fn prob(&self, method: Method) -> f64 {
        self.probs[method_index(method)]
    }
}

fn method_index(m: Method) -> usize {
    Method::ALL.iter().position(|&x| x == m).expect("method listed")
}

/// Fits on the season's regular-season games and predicts each post-season game.
pub fn predict_postseason(
    games: &[GameRecord],
    teams: &TeamTable,
) -> Result<Vec<EvalRecord>> {
    let (regular, post) = season_split(games);
    if post.is_empty() {
        return Err(Error::Invalid("no post-season games to evaluate".into()));
    }
    let predictor = Predictor::fit(&regular, teams)?;
    post.iter()
        .map(|g| {
            let q = MatchQuery::new(g.home_team, g.away_team, g.neutral_site)?;
            let mut probs = [0.0; 3];
            for (i, m) in Method::ALL.into_iter().enumerate() {
                probs[i] = predictor.win_prob(m, &q)?.p;
            }
            Ok(EvalRecord {
                league: g.league,
                season: g.season.clone(),
                home_won: g.home_won(),
                probs,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    /// `None` for an empty bin.
    pub mean_p: Option<f64>,
    /// Observed home-win frequency; `None` for an empty bin.
    pub frequency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub bins: Vec<CalibrationBin>,
}

fn bin_of(p: f64) -> usize {
    ((p * NUM_BINS as f64).floor() as usize).min(NUM_BINS - 1)
}

pub fn calibration(ps: &[f64], outcomes: &[bool]) -> Result<CalibrationReport> {
    check_lengths(ps, outcomes)?;
    let mut count = [0usize; NUM_BINS];
    let mut sum_p = [0.0; NUM_BINS];
    let mut wins = [0usize; NUM_BINS];
    for (&p, &won) in ps.iter().zip(outcomes) {
        let b = bin_of(p);
        count[b] += 1;
        sum_p[b] += p;
        wins[b] += won as usize;
    }
    let bins = (0..NUM_BINS)
        .map(|b| {
            let n = count[b];
            CalibrationBin {
                lower: b as f64 * BIN_WIDTH,
                upper: (b + 1) as f64 * BIN_WIDTH,
                count: n,
                mean_p: (n > 0).then(|| sum_p[b] / n as f64),
                frequency: (n > 0).then(|| wins[b] as f64 / n as f64),
            }
        })
        .collect();
    Ok(CalibrationReport { bins })
}

fn check_lengths(ps: &[f64], outcomes: &[bool]) -> Result<()> {
    if ps.len() != outcomes.len() {
        return Err(Error::Invalid(format!(
            "{} predictions for {} outcomes",
            ps.len(),
            outcomes.len()
        )));
    }
    if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Invalid(format!("prediction {p} is not a probability")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLoss {
    /// Mean negative log-likelihood.
    pub mean: f64,
    pub games: usize,
    pub clamped: usize,
}

pub fn log_loss(ps: &[f64], outcomes: &[bool]) -> Result<LogLoss> {
    check_lengths(ps, outcomes)?;
    if ps.is_empty() {
        return Err(Error::Invalid("log loss of an empty set".into()));
    }
    let mut clamped = 0;
    let total: f64 = ps
        .iter()
        .zip(outcomes)
        .map(|(&p, &won)| {
            let c = p.clamp(CLAMP, 1.0 - CLAMP);
            if c != p {
                clamped += 1;
            }
            -(if won { c } else { 1.0 - c }).ln()
        })
        .sum();
    Ok(LogLoss {
        mean: total / ps.len() as f64,
        games: ps.len(),
        clamped,
    })
}

/// Each loss divided by the smallest in the group.
pub fn relative_losses(losses: &[f64]) -> Vec<f64> {
    let best = losses.iter().copied().fold(f64::INFINITY, f64::min);
    losses.iter().map(|l| l / best).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossRow {
    pub league: League,
    /// `None` for the pooled row.
    pub season: Option<String>,
    pub method: Method,
    pub games: usize,
    pub mean_loss: f64,
    pub relative: f64,
    pub clamped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    /// Per league and method, over all seasons.
    pub calibration: Vec<(League, Method, CalibrationReport)>,
    pub losses: Vec<LossRow>,
}

/// Losses per (league, season) and pooled per league at the game level.
pub fn evaluate(records: &[EvalRecord]) -> Result<EvalReport> {
    let mut groups: BTreeMap<(League, Option<String>), Vec<&EvalRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.league, Some(r.season.clone()))).or_default().push(r);
        groups.entry((r.league, None)).or_default().push(r);
    }
    let mut losses = Vec::new();
    let mut calib = Vec::new();
    for ((league, season), recs) in &groups {
        let outcomes: Vec<bool> = recs.iter().map(|r| r.home_won).collect();
        let per_method: Vec<LogLoss> = Method::ALL
            .iter()
            .map(|&m| {
                let ps: Vec<f64> = recs.iter().map(|r| r.prob(m)).collect();
                log_loss(&ps, &outcomes)
            })
            .collect::<Result<_>>()?;
        let rel = relative_losses(&per_method.iter().map(|l| l.mean).collect::<Vec<_>>());
        for ((&m, l), r) in Method::ALL.iter().zip(&per_method).zip(rel) {
            losses.push(LossRow {
                league: *league,
                season: season.clone(),
                method: m,
                games: l.games,
                mean_loss: l.mean,
                relative: r,
                clamped: l.clamped,
            });
        }
        if season.is_none() {
            for &m in &Method::ALL {
                let ps: Vec<f64> = recs.iter().map(|r| r.prob(m)).collect();
                calib.push((*league, m, calibration(&ps, &outcomes)?));
            }
        }
    }
    Ok(EvalReport {
        calibration: calib,
        losses,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn constant_half() {
        let outcomes = [true, false, true, false];
        let l = log_loss(&[0.5; 4], &outcomes).unwrap();
        assert_abs_diff_eq!(l.mean, 2f64.ln(), epsilon = 1e-15);
        let c = calibration(&[0.5; 4], &outcomes).unwrap();
        assert_eq!(c.bins[20].count, 4);
        assert_eq!(c.bins[20].frequency, Some(0.5));
        assert_eq!(c.bins[0].frequency, None);
        assert_eq!(c.bins.iter().map(|b| b.count).sum::<usize>(), 4);
    }

    #[test]
    fn clamps_certain_mistakes() {
        let l = log_loss(&[1.0, 0.0], &[false, true]).unwrap();
        assert_eq!(l.clamped, 2);
        assert_abs_diff_eq!(l.mean, -(CLAMP.ln()), epsilon = 1e-9);
    }

    #[test]
    fn base_rate_minimizes_constant_loss() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let outcomes: Vec<bool> = (0..5000).map(|_| rng.random_bool(0.62)).collect();
        let rate = outcomes.iter().filter(|&&w| w).count() as f64 / outcomes.len() as f64;
        let at = |p: f64| log_loss(&vec![p; outcomes.len()], &outcomes).unwrap().mean;
        let best = at(rate);
        for d in [-0.1, -0.01, -0.001, 0.001, 0.01, 0.1] {
            assert!(at(rate + d) > best);
        }
    }

    #[test]
    fn relative_loss_is_scale_free() {
        let losses = [0.61, 0.6, 0.64];
        let rel = relative_losses(&losses);
        let scaled: Vec<f64> = losses.iter().map(|l| l * 3.7).collect();
        for (a, b) in rel.iter().zip(relative_losses(&scaled)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        assert_eq!(rel[1], 1.0);
        assert!(rel.iter().all(|&r| r >= 1.0));
    }

    #[test]
    fn well_specified_simulator_is_calibrated() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 100_000;
        let ps: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let outcomes: Vec<bool> = ps.iter().map(|&p| rng.random::<f64>() < p).collect();
        let c = calibration(&ps, &outcomes).unwrap();
        for b in &c.bins {
            let (m, f) = (b.mean_p.unwrap(), b.frequency.unwrap());
            let se = (m * (1.0 - m) / b.count as f64).sqrt().max(1e-3);
            assert!((f - m).abs() < 4.0 * se, "bin {}: {f} vs {m}", b.lower);
        }
    }

    #[test]
    fn pooled_and_per_season_rows() {
        let rec = |season: &str, won: bool, p: [f64; 3]| EvalRecord {
            league: League::Women,
            season: season.into(),
            home_won: won,
            probs: p,
        };
        let records = vec![
            rec("2018-19", true, [0.7, 0.6, 0.8]),
            rec("2018-19", false, [0.4, 0.5, 0.3]),
            rec("2019-20", true, [0.6, 0.7, 0.5]),
        ];
        let r = evaluate(&records).unwrap();
        assert_eq!(r.losses.len(), 9);
        let pooled: Vec<&LossRow> = r.losses.iter().filter(|l| l.season.is_none()).collect();
        assert_eq!(pooled[0].games, 3);
        let want = -(0.7f64.ln() + 0.6f64.ln() + 0.6f64.ln()) / 3.0;
        assert_abs_diff_eq!(pooled[0].mean_loss, want, epsilon = 1e-15);
        assert_eq!(r.calibration.len(), 3);
    }
}
