//! On-disk season layout: `<root>/<league>/<season>/` holding `games.csv`,
//! `teams.csv` and an optional `conf_brackets/` directory of bracket JSON.

use std::path::{Path, PathBuf};

use super::bracket::{parse_bracket, BracketSpec};
use super::games::{parse_games, GameRecord, League};
use super::teams::TeamTable;
use crate::error::{Error, Result};

/// Season label for the year the season ends in: 2020 gives "2019-20".
pub fn season_label(end_year: i32) -> String {
    format!("{}-{:02}", end_year - 1, end_year.rem_euclid(100))
}

/// Parses "2015..2021" (inclusive) or a comma list of end years or labels.
pub fn parse_seasons(spec: &str) -> Result<Vec<String>> {
    let bad = || Error::Invalid(format!("cannot read season list '{spec}'"));
    if let Some((a, b)) = spec.split_once("..") {
        let a: i32 = a.trim().parse().map_err(|_| bad())?;
        let b: i32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).map(season_label).collect());
    }
    spec.split(',')
        .map(|s| {
            let s = s.trim();
            if s.contains('-') {
                Ok(s.to_string())
            } else {
                s.parse().map(season_label).map_err(|_| bad())
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Season {
    pub league: League,
    pub label: String,
    pub dir: PathBuf,
    pub teams: TeamTable,
    pub games: Vec<GameRecord>,
}

impl Season {
    pub fn path(root: &Path, league: League, label: &str) -> PathBuf {
        root.join(league.to_string()).join(label)
    }

    pub fn load(root: &Path, league: League, label: &str) -> Result<Self> {
        let dir = Self::path(root, league, label);
        let teams = TeamTable::from_path(dir.join("teams.csv"))?;
        let games = parse_games(dir.join("games.csv"), league, label, &teams)?;
        Ok(Self {
            league,
            label: label.to_string(),
            dir,
            teams,
            games,
        })
    }

    /// Every `*.json` under `conf_brackets/`, in file-name order.
    pub fn conference_brackets(&self) -> Result<Vec<BracketSpec>> {
        read_bracket_dir(&self.dir.join("conf_brackets"), &self.teams)
    }
}

pub fn read_bracket_dir(dir: &Path, teams: &TeamTable) -> Result<Vec<BracketSpec>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Invalid(format!(
            "no bracket files in {}",
            dir.display()
        )));
    }
    paths.iter().map(|p| parse_bracket(p, teams)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(season_label(2020), "2019-20");
        assert_eq!(season_label(2000), "1999-00");
        assert_eq!(
            parse_seasons("2015..2017").unwrap(),
            ["2014-15", "2015-16", "2016-17"]
        );
        assert_eq!(parse_seasons("2021,2019-20").unwrap(), ["2020-21", "2019-20"]);
        assert!(parse_seasons("2017..2015").is_err());
        assert!(parse_seasons("soon").is_err());
    }

    #[test]
    fn round_trip_through_disk() {
        let league = crate::synth::generate(&crate::synth::SynthConfig::default()).unwrap();
        let root = tempfile::tempdir().unwrap();
        let dir = Season::path(root.path(), League::Women, "2019-20");
        std::fs::create_dir_all(dir.join("conf_brackets")).unwrap();
        league
            .teams
            .write(std::fs::File::create(dir.join("teams.csv")).unwrap())
            .unwrap();
        crate::ingest::write_games(
            std::fs::File::create(dir.join("games.csv")).unwrap(),
            &league.games,
            &league.teams,
        )
        .unwrap();
        let brackets =
            crate::synth::conference_brackets(&league.teams, &league.strengths).unwrap();
        for (i, b) in brackets.iter().enumerate() {
            let file = crate::ingest::ConferenceBracketFile::from_spec(b, &league.teams).unwrap();
            std::fs::write(
                dir.join("conf_brackets").join(format!("{i:02}.json")),
                serde_json::to_string(&file).unwrap(),
            )
            .unwrap();
        }
        let s = Season::load(root.path(), League::Women, "2019-20").unwrap();
        assert_eq!(s.games, league.games);
        assert_eq!(s.conference_brackets().unwrap(), brackets);
    }

    #[test]
    fn loose_names() {
        let t = TeamTable::new([("Oregon St.", "Pac-12"), ("St. Mary's (CA)", "WCC")]).unwrap();
        assert!(t.lookup("Oregon State").is_some());
        assert!(t.lookup("st marys ca").is_some());
        assert!(t.lookup("Oregon").is_none());
    }
}
