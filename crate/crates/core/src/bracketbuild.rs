//! Seeding a ranked field onto a four-region bracket and choosing exemplar
//! fields from open conference tournaments.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ChampionDistribution;
use crate::ingest::{RegionFile, SeedEntry, TeamId, TeamTable, TournamentFile, Venue};
use crate::ratings::Ranking;

pub const REGIONS: usize = 4;
pub const SEEDS: usize = 16;

/// Region (1..=4) and seed (1..=16) of the `r`-th slot, `r` in 1..=64.
///
/// Seed lines alternate direction: odd seeds run regions 1 to 4, even seeds
/// run 4 to 1.
pub fn s_curve_cell(r: usize) -> Result<(usize, usize)> {
    if !(1..=REGIONS * SEEDS).contains(&r) {
        return Err(Error::Invalid(format!("slot {r} outside 1..=64")));
    }
    let seed = (r - 1) / REGIONS + 1;
    let i = (r - 1) % REGIONS;
    let region = if seed % 2 == 1 { i + 1 } else { REGIONS - i };
    Ok((region, seed))
}

/// A team in the field and how it got there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldEntry {
    pub team: TeamId,
    /// Overall rank.
    pub rank: usize,
    pub automatic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeededEntry {
    pub team: TeamId,
    pub rank: usize,
    pub region: usize,
    pub seed: usize,
    pub play_in: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeededField {
    pub entries: Vec<SeededEntry>,
}

/// Places a 64- or 68-team field by the S-curve.
///
/// For 68 teams the four lowest-ranked at-large teams play in pairs
/// (best with worst, second with third), as do the four lowest-ranked
/// automatic qualifiers. Each pair takes one slot ranked by its better member.
pub fn s_curve_place(field: &[FieldEntry]) -> Result<SeededField> {
    let mut field = field.to_vec();
    field.sort_by_key(|e| e.rank);
    if field.windows(2).any(|w| w[0].rank == w[1].rank || w[0].team == w[1].team) {
        return Err(Error::Invalid("field has repeated ranks or teams".into()));
    }
    // slot: (team, optional play-in partner)
    let slots: Vec<(FieldEntry, Option<FieldEntry>)> = match field.len() {
        64 => field.iter().map(|&e| (e, None)).collect(),
        68 => {
            let pairs_from = |automatic: bool| -> Result<Vec<(FieldEntry, FieldEntry)>> {
                let group: Vec<FieldEntry> =
                    field.iter().filter(|e| e.automatic == automatic).copied().collect();
                if group.len() < 4 {
                    return Err(Error::Invalid(
                        "a 68-team field needs at least four teams of each bid type".into(),
                    ));
                }
                let low = &group[group.len() - 4..];
                Ok(vec![(low[0], low[3]), (low[1], low[2])])
            };
            let mut pairs = pairs_from(false)?;
            pairs.extend(pairs_from(true)?);
            let partnered: Vec<TeamId> = pairs.iter().map(|p| p.1.team).collect();
            field
                .iter()
                .filter(|e| !partnered.contains(&e.team))
                .map(|&e| (e, pairs.iter().find(|p| p.0.team == e.team).map(|p| p.1)))
                .collect()
        }
        n => {
            return Err(Error::Invalid(format!(
                "field must have 64 or 68 teams, got {n}"
            )))
        }
    };
    let mut entries = Vec::with_capacity(field.len());
    for (i, (e, partner)) in slots.iter().enumerate() {
        let (region, seed) = s_curve_cell(i + 1)?;
        for m in std::iter::once(e).chain(partner.as_ref()) {
            entries.push(SeededEntry {
                team: m.team,
                rank: m.rank,
                region,
                seed,
                play_in: partner.is_some(),
            });
        }
    }
    Ok(SeededField { entries })
}

impl SeededField {
    /// Bracket file with regions `Region 1..4`; play-in pairs share a seed line.
    pub fn to_tournament_file(&self, name: &str, teams: &TeamTable) -> TournamentFile {
        let mut regions: Vec<RegionFile> = (1..=REGIONS)
            .map(|r| RegionFile {
                name: format!("Region {r}"),
                seeds: vec![SeedEntry::Team(String::new()); SEEDS],
            })
            .collect();
        for region in 1..=REGIONS {
            for seed in 1..=SEEDS {
                let members: Vec<&SeededEntry> = self
                    .entries
                    .iter()
                    .filter(|e| e.region == region && e.seed == seed)
                    .collect();
                let names: Vec<String> = members.iter().map(|e| teams.name(e.team).to_string()).collect();
                regions[region - 1].seeds[seed - 1] = match names.as_slice() {
                    [a] => SeedEntry::Team(a.clone()),
                    [a, b] => SeedEntry::PlayIn([a.clone(), b.clone()]),
                    _ => unreachable!("every cell holds one team or one play-in pair"),
                };
            }
        }
        TournamentFile {
            name: name.to_string(),
            league: None,
            season: None,
            regions,
            play_ins: Vec::new(),
            completed: Vec::new(),
            venue: Venue::Neutral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldRule {
    /// Highest-ranked team still alive in each conference.
    Strongest,
    /// Lowest-ranked team still alive in each conference.
    Weakest,
    /// Champion drawn from each conference's champion distribution.
    Random,
}

impl fmt::Display for FieldRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldRule::Strongest => "strongest",
            FieldRule::Weakest => "weakest",
            FieldRule::Random => "random",
        })
    }
}

impl FromStr for FieldRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "strongest" => Ok(FieldRule::Strongest),
            "weakest" => Ok(FieldRule::Weakest),
            "random" => Ok(FieldRule::Random),
            _ => Err(Error::Invalid(format!(
                "unknown rule '{s}' (expected strongest, weakest or random)"
            ))),
        }
    }
}

/// Picks one champion per conference by `rule`, then fills the at-large bids
/// with the highest-ranked non-champions. Returned in rank order.
///
/// A team is alive when its champion probability is positive, so decided
/// conferences pass their champion through under every rule.
pub fn exemplar_field(
    rule: FieldRule,
    champions: &[ChampionDistribution],
    ranking: &Ranking,
    field_size: usize,
    seed: Option<u64>,
) -> Result<Vec<FieldEntry>> {
    if champions.len() > field_size {
        return Err(Error::Invalid(format!(
            "{} conferences do not fit in a field of {field_size}",
            champions.len()
        )));
    }
    let mut rng = match (rule, seed) {
        (FieldRule::Random, None) => {
            return Err(Error::Invalid("the random rule needs an explicit seed".into()))
        }
        (_, s) => ChaCha8Rng::seed_from_u64(s.unwrap_or(0)),
    };
    let mut auto = Vec::with_capacity(champions.len());
    for cd in champions {
        let mut alive: Vec<(TeamId, f64)> =
            cd.probs.iter().copied().filter(|&(_, p)| p > 0.0).collect();
        if alive.is_empty() {
            return Err(Error::Consistency(format!(
                "conference {} has no team that can win",
                cd.conference.0
            )));
        }
        alive.sort_by_key(|&(t, _)| ranking.rank(t));
        let pick = match rule {
            FieldRule::Strongest => alive[0].0,
            FieldRule::Weakest => alive[alive.len() - 1].0,
            FieldRule::Random => {
                let total: f64 = alive.iter().map(|x| x.1).sum();
                let mut u = rng.random::<f64>() * total;
                let mut chosen = alive[alive.len() - 1].0;
                for &(t, p) in &alive {
                    if u < p {
                        chosen = t;
                        break;
                    }
                    u -= p;
                }
                chosen
            }
        };
        auto.push(pick);
    }
    let mut field: Vec<FieldEntry> = auto
        .iter()
        .map(|&t| FieldEntry {
            team: t,
            rank: ranking.rank(t),
            automatic: true,
        })
        .collect();
    let at_large = field_size - auto.len();
    field.extend(
        ranking
            .order()
            .iter()
            .filter(|t| !auto.contains(t))
            .take(at_large)
            .map(|&t| FieldEntry {
                team: t,
                rank: ranking.rank(t),
                automatic: false,
            }),
    );
    if field.len() != field_size {
        return Err(Error::Invalid(format!(
            "only {} teams available for a field of {field_size}",
            field.len()
        )));
    }
    field.sort_by_key(|e| e.rank);
    Ok(field)
}
