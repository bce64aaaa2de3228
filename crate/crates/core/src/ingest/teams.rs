use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, RowError};

/// Dense team index. Ids follow alphabetical order of team names, so the
/// same roster always produces the same ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TeamId(pub usize);

impl TeamId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConferenceId(pub usize);

impl ConferenceId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Team {
    pub id: TeamId,
    pub name: String,
    pub conference: ConferenceId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conference {
    pub id: ConferenceId,
    pub name: String,
}

/// League roster: every team with its conference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeamTable {
    teams: Vec<Team>,
    conferences: Vec<Conference>,
    by_name: HashMap<String, TeamId>,
    conference_by_name: HashMap<String, ConferenceId>,
}

#[derive(Debug, Deserialize, Serialize)]
struct TeamRow {
    team: String,
    conference: String,
}

impl TeamTable {
    /// Builds a table from `(team name, conference name)` pairs in any order.
    pub fn new<I, S, C>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, C)>,
        S: Into<String>,
        C: Into<String>,
    {
        let mut pairs: Vec<(String, String)> = entries
            .into_iter()
            .map(|(t, c)| (t.into().trim().to_string(), c.into().trim().to_string()))
            .collect();
        if pairs.is_empty() {
            return Err(Error::Invalid("team table is empty".into()));
        }
        pairs.sort();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Invalid(format!(
                    "team '{}' listed more than once",
                    w[0].0
                )));
            }
        }
        if let Some((t, _)) = pairs.iter().find(|(t, c)| t.is_empty() || c.is_empty()) {
            return Err(Error::Invalid(format!("blank team or conference near '{t}'")));
        }

        let mut conf_names: Vec<&str> = pairs.iter().map(|(_, c)| c.as_str()).collect();
        conf_names.sort_unstable();
        conf_names.dedup();
        let conferences: Vec<Conference> = conf_names
            .iter()
            .enumerate()
            .map(|(i, name)| Conference {
                id: ConferenceId(i),
                name: name.to_string(),
            })
            .collect();
        let conference_by_name: HashMap<String, ConferenceId> = conferences
            .iter()
            .map(|c| (c.name.clone(), c.id))
            .collect();

        let teams: Vec<Team> = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (name, conf))| Team {
                id: TeamId(i),
                conference: conference_by_name[&conf],
                name,
            })
            .collect();
        let by_name = teams.iter().map(|t| (t.name.clone(), t.id)).collect();

        Ok(Self {
            teams,
            conferences,
            by_name,
            conference_by_name,
        })
    }

    /// Reads a `team,conference` CSV.
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["team", "conference"] {
            return Err(Error::Invalid(format!(
                "teams header must be 'team,conference', found '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        let mut bad = Vec::new();
        for (i, row) in rdr.deserialize::<TeamRow>().enumerate() {
            match row {
                Ok(r) => entries.push((r.team, r.conference)),
                Err(e) => bad.push(RowError {
                    line: i as u64 + 2,
                    message: e.to_string(),
                }),
            }
        }
        if !bad.is_empty() {
            return Err(Error::Rows(bad));
        }
        Self::new(entries)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(file)
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for t in &self.teams {
            w.serialize(TeamRow {
                team: t.name.clone(),
                conference: self.conferences[t.conference.0].name.clone(),
            })?;
        }
        w.flush().map_err(|e| Error::io("<teams csv>", e))?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.teams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.teams.is_empty()
    }

    pub fn teams(&self) -> &[Team] {
        &self.teams
    }

    pub fn ids(&self) -> impl Iterator<Item = TeamId> + '_ {
        self.teams.iter().map(|t| t.id)
    }

    pub fn conferences(&self) -> &[Conference] {
        &self.conferences
    }

    pub fn id(&self, name: &str) -> Option<TeamId> {
        self.by_name.get(name.trim()).copied()
    }

    /// Like [`TeamTable::id`] but tolerant of the usual spelling drift between
    /// sources: "State"/"St.", case, periods and apostrophes.
    pub fn lookup(&self, name: &str) -> Option<TeamId> {
        if let Some(id) = self.id(name) {
            return Some(id);
        }
        let key = loose_key(name);
        let mut hits = self.teams.iter().filter(|t| loose_key(&t.name) == key);
        match (hits.next(), hits.next()) {
            (Some(t), None) => Some(t.id),
            _ => None,
        }
    }

    /// Resolves a name or fails with [`Error::UnknownTeams`].
    pub fn require(&self, name: &str) -> Result<TeamId> {
        self.id(name)
            .ok_or_else(|| Error::UnknownTeams(vec![name.trim().to_string()]))
    }

    pub fn name(&self, id: TeamId) -> &str {
        &self.teams[id.0].name
    }

    pub fn conference_of(&self, id: TeamId) -> ConferenceId {
        self.teams[id.0].conference
    }

    pub fn conference_id(&self, name: &str) -> Option<ConferenceId> {
        self.conference_by_name.get(name.trim()).copied()
    }

    pub fn conference_name(&self, id: ConferenceId) -> &str {
        &self.conferences[id.0].name
    }

    pub fn members(&self, conf: ConferenceId) -> Vec<TeamId> {
        self.teams
            .iter()
            .filter(|t| t.conference == conf)
            .map(|t| t.id)
            .collect()
    }

    /// Alphabetically last team; its strength is pinned to zero.
    pub fn baseline(&self) -> TeamId {
        TeamId(self.teams.len() - 1)
    }

    pub fn names(&self) -> Vec<String> {
        self.teams.iter().map(|t| t.name.clone()).collect()
    }
}

fn loose_key(name: &str) -> String {
    name.split_whitespace()
        .map(|w| {
            let w: String = w
                .chars()
                .filter(|c| !matches!(c, '.' | '\'' | '(' | ')'))
                .flat_map(char::to_lowercase)
                .collect();
            if w == "state" { "st".to_string() } else { w }
        })
        .collect::<Vec<_>>()
        .join(" ")
}
