use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::teams::{TeamId, TeamTable};
use crate::error::{Error, Result, RowError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum League {
    Women,
    Men,
}

impl fmt::Display for League {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            League::Women => "women",
            League::Men => "men",
        })
    }
}

impl FromStr for League {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "women" | "w" | "womens" => Ok(League::Women),
            "men" | "m" | "mens" => Ok(League::Men),
            other => Err(Error::Invalid(format!("unknown league '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "regular")]
    Regular,
    #[serde(rename = "post")]
    Postseason,
}

/// One played game. The margin of victory is always home minus away, even at
/// a neutral site where "home" is just the first-listed team.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameRecord {
    pub season: String,
    pub league: League,
    pub date: NaiveDate,
    /// Week index, starting at 1.
    pub period: u32,
    pub home_team: TeamId,
    pub away_team: TeamId,
    pub home_points: u32,
    pub away_points: u32,
    pub neutral_site: bool,
    pub phase: Phase,
}

impl GameRecord {
    pub fn mov(&self) -> f64 {
        f64::from(self.home_points) - f64::from(self.away_points)
    }

    pub fn home_won(&self) -> bool {
        self.home_points > self.away_points
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct GameRow {
    date: String,
    home: String,
    away: String,
    home_points: u32,
    away_points: u32,
    neutral: bool,
    phase: Phase,
    period: u32,
}

const HEADER: [&str; 8] = [
    "date",
    "home",
    "away",
    "home_points",
    "away_points",
    "neutral",
    "phase",
    "period",
];

fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(s, "%m/%d/%Y"))
        .ok()
}

/// Reads a games CSV. All rejected rows are collected and reported together.
pub fn read_games<R: Read>(
    reader: R,
    league: League,
    season: &str,
    teams: &TeamTable,
) -> Result<Vec<GameRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::Invalid(format!(
            "games header must be '{}', found '{}'",
            HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut games = Vec::new();
    let mut bad = Vec::new();
    let mut unknown: Vec<String> = Vec::new();
    for (i, row) in rdr.deserialize::<GameRow>().enumerate() {
        let line = i as u64 + 2;
        let mut reject = |message: String| bad.push(RowError { line, message });
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                reject(format!("malformed row: {e}"));
                continue;
            }
        };
        let Some(date) = parse_date(&row.date) else {
            reject(format!("bad date '{}'", row.date));
            continue;
        };
        let home = teams.id(&row.home);
        let away = teams.id(&row.away);
        for (name, id) in [(&row.home, home), (&row.away, away)] {
            if id.is_none() {
                reject(format!("unknown team '{name}'"));
                if !unknown.contains(name) {
                    unknown.push(name.clone());
                }
            }
        }
        let (Some(home), Some(away)) = (home, away) else {
            continue;
        };
        if home == away {
            reject(format!("team '{}' plays itself", row.home));
            continue;
        }
        if row.home_points == row.away_points {
            reject(format!(
                "tied score {}-{} (margin of victory cannot be 0)",
                row.home_points, row.away_points
            ));
            continue;
        }
        if row.period == 0 {
            reject("period must be >= 1".into());
            continue;
        }
        games.push(GameRecord {
            season: season.to_string(),
            league,
            date,
            period: row.period,
            home_team: home,
            away_team: away,
            home_points: row.home_points,
            away_points: row.away_points,
            neutral_site: row.neutral,
            phase: row.phase,
        });
    }
    if !unknown.is_empty() && bad.len() == unknown.len() {
        return Err(Error::UnknownTeams(unknown));
    }
    if !bad.is_empty() {
        return Err(Error::Rows(bad));
    }
    check_periods(&games)?;
    Ok(games)
}

fn check_periods(games: &[GameRecord]) -> Result<()> {
    let mut by_date: Vec<&GameRecord> = games.iter().collect();
    by_date.sort_by_key(|g| g.date);
    for w in by_date.windows(2) {
        if w[1].period < w[0].period {
            return Err(Error::Invalid(format!(
                "period decreases with date: {} is period {} but {} is period {}",
                w[0].date, w[0].period, w[1].date, w[1].period
            )));
        }
    }
    Ok(())
}

pub fn parse_games(
    path: impl AsRef<Path>,
    league: League,
    season: &str,
    teams: &TeamTable,
) -> Result<Vec<GameRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_games(file, league, season, teams)
}

pub fn write_games<W: Write>(writer: W, games: &[GameRecord], teams: &TeamTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for g in games {
        w.serialize(GameRow {
            date: g.date.format("%Y-%m-%d").to_string(),
            home: teams.name(g.home_team).to_string(),
            away: teams.name(g.away_team).to_string(),
            home_points: g.home_points,
            away_points: g.away_points,
            neutral: g.neutral_site,
            phase: g.phase,
            period: g.period,
        })?;
    }
    w.flush().map_err(|e| Error::io("<games csv>", e))?;
    Ok(())
}

/// Splits games into (regular season, postseason), preserving order.
pub fn season_split(games: &[GameRecord]) -> (Vec<GameRecord>, Vec<GameRecord>) {
    games
        .iter()
        .cloned()
        .partition(|g| g.phase == Phase::Regular)
}
