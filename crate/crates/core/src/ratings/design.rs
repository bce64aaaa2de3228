use crate::error::{Error, Result};
use crate::ingest::{GameRecord, TeamId, TeamTable};

/// One sparse row of the design matrix.
///
/// Column 0 is the home-court indicator; the remaining columns are the
/// strengths of every team except the pinned baseline. A row has `+1` in the
/// home (first-listed) team's column and `-1` in the away team's column; the
/// baseline team has no column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignRow {
    pub home: bool,
    pub plus: Option<usize>,
    pub minus: Option<usize>,
}

impl DesignRow {
    pub fn new(home_team: TeamId, away_team: TeamId, neutral: bool, baseline: TeamId) -> Self {
        Self {
            home: !neutral,
            plus: team_column(home_team, baseline),
            minus: team_column(away_team, baseline),
        }
    }

    /// Non-zero entries as `(column, value)`.
    pub fn entries(&self) -> [Option<(usize, f64)>; 3] {
        [
            self.home.then_some((0, 1.0)),
            self.plus.map(|c| (c, 1.0)),
            self.minus.map(|c| (c, -1.0)),
        ]
    }

    pub fn dot(&self, v: &[f64]) -> f64 {
        self.entries().iter().flatten().map(|&(c, x)| x * v[c]).sum()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for &(c, x) in self.entries().iter().flatten() {
            out[c] += x;
        }
        out
    }
}

/// Column of a team's strength parameter, or `None` for the baseline.
pub(crate) fn team_column(team: TeamId, baseline: TeamId) -> Option<usize> {
    use std::cmp::Ordering::*;
    match team.0.cmp(&baseline.0) {
        Less => Some(team.0 + 1),
        Equal => None,
        Greater => Some(team.0),
    }
}

/// Design matrix and margin-of-victory response for a set of games.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub rows: Vec<DesignRow>,
    pub y: Vec<f64>,
    pub num_teams: usize,
    pub baseline: TeamId,
    pub team_names: Vec<String>,
    /// (home, away) team of each row, kept for connectivity checks.
    pub matchups: Vec<(TeamId, TeamId)>,
}

impl Design {
    /// Builds a design directly from `(home, away, neutral, mov)` tuples.
    pub fn from_games(
        num_teams: usize,
        baseline: TeamId,
        games: impl IntoIterator<Item = (TeamId, TeamId, bool, f64)>,
    ) -> Result<Self> {
        if baseline.0 >= num_teams {
            return Err(Error::Invalid(format!(
                "baseline {baseline} outside 0..{num_teams}"
            )));
        }
        let mut rows = Vec::new();
        let mut y = Vec::new();
        let mut matchups = Vec::new();
        for (h, a, neutral, mov) in games {
            if h == a || h.0 >= num_teams || a.0 >= num_teams {
                return Err(Error::Invalid(format!("bad matchup {h} vs {a}")));
            }
            rows.push(DesignRow::new(h, a, neutral, baseline));
            y.push(mov);
            matchups.push((h, a));
        }
        Ok(Self {
            rows,
            y,
            num_teams,
            baseline,
            team_names: (0..num_teams).map(|i| format!("team{i}")).collect(),
            matchups,
        })
    }

    /// Parameter count: home advantage plus `num_teams - 1` free strengths.
    pub fn num_params(&self) -> usize {
        self.num_teams
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_for(&self, home: TeamId, away: TeamId, neutral: bool) -> DesignRow {
        DesignRow::new(home, away, neutral, self.baseline)
    }

    /// Dense copy of the design, row-major.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.to_dense(self.num_params()))
            .collect()
    }
}

pub fn build_design(games: &[GameRecord], teams: &TeamTable) -> Result<Design> {
    build_design_with_baseline(games, teams, teams.baseline())
}

pub fn build_design_with_baseline(
    games: &[GameRecord],
    teams: &TeamTable,
    baseline: TeamId,
) -> Result<Design> {
    let p = teams.len();
    let mut unknown: Vec<String> = games
        .iter()
        .flat_map(|g| [g.home_team, g.away_team])
        .filter(|t| t.0 >= p)
        .map(|t| t.to_string())
        .collect();
    unknown.dedup();
    if !unknown.is_empty() {
        return Err(Error::UnknownTeams(unknown));
    }
    let mut design = Design::from_games(
        p,
        baseline,
        games
            .iter()
            .map(|g| (g.home_team, g.away_team, g.neutral_site, g.mov())),
    )?;
    design.team_names = teams.names();
    Ok(design)
}
