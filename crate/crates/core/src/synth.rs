//! Synthetic leagues drawn from the margin-of-victory model itself.

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::ingest::{seed_order, BracketSpec, GameRecord, League, Phase, Slot, TeamId, TeamTable};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub conferences: usize,
    pub teams_per_conference: usize,
    /// Extra non-conference games per team, against random opponents.
    pub nonconference_games: usize,
    pub home_advantage: f64,
    pub strength_sd: f64,
    pub noise_sd: f64,
    pub neutral_fraction: f64,
    pub postseason_games: usize,
    pub league: League,
    pub season: String,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            conferences: 8,
            teams_per_conference: 8,
            nonconference_games: 10,
            home_advantage: 3.5,
            strength_sd: 10.0,
            noise_sd: 11.0,
            neutral_fraction: 0.1,
            postseason_games: 60,
            league: League::Women,
            season: "2019-20".into(),
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthLeague {
    pub teams: TeamTable,
    pub games: Vec<GameRecord>,
    /// Generating strengths by team id.
    pub strengths: Vec<f64>,
    pub home_advantage: f64,
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthLeague> {
    if cfg.conferences == 0 || cfg.teams_per_conference < 2 {
        return Err(Error::Invalid(
            "need at least one conference of two or more teams".into(),
        ));
    }
    if !(cfg.noise_sd > 0.0) || !(cfg.strength_sd >= 0.0) {
        return Err(Error::Invalid("standard deviations must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pairs = Vec::new();
    for c in 0..cfg.conferences {
        for t in 0..cfg.teams_per_conference {
            pairs.push((format!("C{:02} Team {:02}", c + 1, t + 1), format!("Conference {:02}", c + 1)));
        }
    }
    let teams = TeamTable::new(pairs)?;
    let n = teams.len();
    let strength = Normal::new(0.0, cfg.strength_sd).map_err(|e| Error::Invalid(e.to_string()))?;
    let noise = Normal::new(0.0, cfg.noise_sd).map_err(|e| Error::Invalid(e.to_string()))?;
    let strengths: Vec<f64> = (0..n).map(|_| strength.sample(&mut rng)).collect();

    let mut fixtures: Vec<(TeamId, TeamId, bool, Phase)> = Vec::new();
    for conf in teams.conferences() {
        let members = teams.members(conf.id);
        for &a in &members {
            for &b in &members {
                if a != b {
                    fixtures.push((a, b, false, Phase::Regular));
                }
            }
        }
    }
    for t in 0..n {
        for _ in 0..cfg.nonconference_games / 2 {
            let mut o = rng.random_range(0..n - 1);
            if o >= t {
                o += 1;
            }
            let neutral = rng.random_bool(cfg.neutral_fraction);
            fixtures.push((TeamId(t), TeamId(o), neutral, Phase::Regular));
        }
    }
    fixtures.shuffle(&mut rng);
    for _ in 0..cfg.postseason_games {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        fixtures.push((TeamId(a), TeamId(b), true, Phase::Postseason));
    }

    let start = NaiveDate::from_ymd_opt(2019, 11, 5).expect("valid date");
    let regular = fixtures.iter().filter(|f| f.3 == Phase::Regular).count();
    let per_day = regular.div_ceil(120).max(1);
    let mut games = Vec::with_capacity(fixtures.len());
    for (i, &(h, a, neutral, phase)) in fixtures.iter().enumerate() {
        let day = match phase {
            Phase::Regular => (i / per_day) as i64,
            Phase::Postseason => 125 + ((i - regular) / 8) as i64,
        };
        let home = if neutral { 0.0 } else { cfg.home_advantage };
        let mean = home + strengths[h.0] - strengths[a.0];
        let mut mov = (mean + noise.sample(&mut rng)).round() as i64;
        if mov == 0 {
            mov = if rng.random_bool(0.5) { 1 } else { -1 };
        }
        let base = 60 + rng.random_range(0..15) as i64;
        let (hp, ap) = if mov > 0 { (base + mov, base) } else { (base, base - mov) };
        games.push(GameRecord {
            season: cfg.season.clone(),
            league: cfg.league,
            date: start + Duration::days(day),
            period: (day / 7) as u32 + 1,
            home_team: h,
            away_team: a,
            home_points: hp as u32,
            away_points: ap as u32,
            neutral_site: neutral,
            phase,
        });
    }
    Ok(SynthLeague {
        teams,
        games,
        strengths,
        home_advantage: cfg.home_advantage,
    })
}

/// A seeded bracket for every conference, seeds by the given strengths.
/// Conferences whose size is not a power of two give the top seeds byes.
pub fn conference_brackets(teams: &TeamTable, strengths: &[f64]) -> Result<Vec<BracketSpec>> {
    teams
        .conferences()
        .iter()
        .map(|c| {
            let mut members = teams.members(c.id);
            members.sort_by(|a, b| strengths[b.0].total_cmp(&strengths[a.0]));
            let size = members.len().next_power_of_two();
            let mut leaves: Vec<Option<Slot>> = seed_order(size)
                .into_iter()
                .map(|s| members.get(s - 1).map(|&t| Slot::Team(t)))
                .collect();
            while leaves.len() > 1 {
                leaves = leaves
                    .chunks(2)
                    .map(|p| match (p[0].clone(), p[1].clone()) {
                        (Some(a), Some(b)) => Some(Slot::join(a, b)),
                        (x, None) | (None, x) => x,
                    })
                    .collect();
            }
            let root = leaves.pop().flatten().expect("conference has teams");
            BracketSpec::new(c.name.clone(), root)
        })
        .collect()
}
