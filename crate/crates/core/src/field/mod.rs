//! Chance of making a tournament field from partially played conference
//! tournaments.
//!
//! Every conference champion gets an automatic bid; the remaining
//! `field_size - K` at-large bids go to the highest-ranked non-champions, with
//! the ranking frozen. A non-champion ranked `u` receives an at-large bid
//! exactly when at most `t_u = field_size - u` champions are ranked below it.

mod poisson_binomial;

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

pub use poisson_binomial::PoissonBinomial;

use crate::error::{Error, Result};
use crate::ingest::{BracketSpec, ConferenceId, TeamId, TeamTable};
use crate::ratings::Ranking;
use crate::tourney::{closed_form, PairwiseMatrix};

/// Probabilities below this are treated as structurally zero when classifying.
const CERTAINTY: f64 = 1e-12;

/// Champion probabilities of one conference tournament.
#[derive(Debug, Clone, PartialEq)]
pub struct ChampionDistribution {
    pub conference: ConferenceId,
    pub probs: Vec<(TeamId, f64)>,
}

/// Champion distribution of every conference, from its (possibly pruned or
/// decided) bracket. Each conference of `teams` needs exactly one bracket.
pub fn conf_win_probs(
    teams: &TeamTable,
    brackets: &[BracketSpec],
    probs: &PairwiseMatrix,
) -> Result<Vec<ChampionDistribution>> {
    let mut by_conf: HashMap<ConferenceId, &BracketSpec> = HashMap::new();
    for b in brackets {
        let members = b.teams();
        let conf = teams.conference_of(members[0]);
        if let Some(t) = members.iter().find(|&&t| teams.conference_of(t) != conf) {
            return Err(Error::Consistency(format!(
                "bracket '{}' mixes {} ({}) with {} ({})",
                b.name,
                teams.name(members[0]),
                teams.conference_name(conf),
                teams.name(*t),
                teams.conference_name(teams.conference_of(*t)),
            )));
        }
        if by_conf.insert(conf, b).is_some() {
            return Err(Error::Consistency(format!(
                "two brackets for conference '{}'",
                teams.conference_name(conf)
            )));
        }
    }
    let missing: Vec<&str> = teams
        .conferences()
        .iter()
        .filter(|c| !by_conf.contains_key(&c.id))
        .map(|c| c.name.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Structure(format!(
            "no bracket or champion for conference(s): {}",
            missing.join(", ")
        )));
    }
    teams
        .conferences()
        .par_iter()
        .map(|c| {
            let rp = closed_form(by_conf[&c.id], probs)?;
            Ok(ChampionDistribution {
                conference: c.id,
                probs: rp.champion_distribution(),
            })
        })
        .collect()
}

/// One team's view of the conference tournaments.
#[derive(Debug, Clone, PartialEq)]
pub struct ConferenceOutcome {
    pub team: TeamId,
    /// Position of the team's own conference in `q_low` / `q_high`.
    pub own_conf: usize,
    /// Chance the team wins its own conference tournament.
    pub q_own: f64,
    /// Per conference: chance the champion is ranked below the team.
    pub q_low: Vec<f64>,
    /// Per conference: chance the champion is the team or ranked above it.
    pub q_high: Vec<f64>,
}

impl ConferenceOutcome {
    /// Count of lower-ranked champions.
    pub fn lower_champions(&self) -> PoissonBinomial {
        PoissonBinomial::new(self.q_low.clone()).expect("probabilities checked at construction")
    }

    /// Same count given the team wins its own tournament.
    pub fn lower_champions_if_won(&self) -> PoissonBinomial {
        let mut ps = self.q_low.clone();
        ps[self.own_conf] = 0.0;
        PoissonBinomial::new(ps).expect("probabilities checked at construction")
    }
}

/// `P(F_u = 1) = q_own + P(L <= t) - P(L' <= t) q_own`, where `L'` zeroes the
/// team's own conference.
pub fn make_field_prob(outcome: &ConferenceOutcome, t: i64) -> f64 {
    let q = outcome.q_own;
    let p = q + outcome.lower_champions().cdf(t) - outcome.lower_champions_if_won().cdf(t) * q;
    p.clamp(0.0, 1.0)
}

/// Where a team stands with respect to the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "u8")]
pub enum Situation {
    /// In the field whatever happens.
    Locked = 1,
    /// Still alive in its conference tournament; an at-large bid is possible.
    AliveBubble = 2,
    /// Out of its conference tournament; depends on other results.
    EliminatedBubble = 3,
    /// Must win its conference tournament.
    MustWin = 4,
    /// Cannot make the field.
    Out = 5,
}

impl From<Situation> for u8 {
    fn from(s: Situation) -> u8 {
        s as u8
    }
}

impl fmt::Display for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as u8)
    }
}

/// Situation from the structure of the outcome: which conferences certainly,
/// possibly or never produce a lower-ranked champion.
pub fn classify_situation(outcome: &ConferenceOutcome, t: i64) -> Situation {
    let own = outcome.own_conf;
    let q_own = outcome.q_own;
    // given the team does not win, its own conference's champion is lower
    // ranked with probability q_low / (1 - q_own)
    let own_low_possible = outcome.q_low[own] > CERTAINTY;
    let own_low_certain = q_own < 1.0 && outcome.q_low[own] >= 1.0 - q_own - CERTAINTY;
    let others = outcome.q_low.iter().enumerate().filter(|(k, _)| *k != own);
    let (mut certain, mut possible) = (0i64, 0i64);
    for (_, &p) in others {
        if p >= 1.0 - CERTAINTY {
            certain += 1;
        }
        if p > CERTAINTY {
            possible += 1;
        }
    }
    certain += own_low_certain as i64;
    possible += own_low_possible as i64;

    let eliminated = q_own <= CERTAINTY;
    let at_large_certain = possible <= t;
    let at_large_impossible = certain > t;
    if q_own >= 1.0 - CERTAINTY || at_large_certain {
        Situation::Locked
    } else if at_large_impossible {
        if eliminated {
            Situation::Out
        } else {
            Situation::MustWin
        }
    } else if eliminated {
        Situation::EliminatedBubble
    } else {
        Situation::AliveBubble
    }
}

/// Joint distribution of the team's position in the field and making it:
/// entry `r - 1` is `P(R_u = r, F_u = 1)` for field ranks `r = 1..=field_size`.
///
/// An at-large team, or a champion with at most `t` lower champions, keeps
/// position `u`. A champion with `l > t` lower champions is pushed up to
/// position `field_size - l` because the at-large pool above it is exhausted.
pub fn rank_distribution(outcome: &ConferenceOutcome, rank: usize, field_size: usize) -> Vec<f64> {
    let t = field_size as i64 - rank as i64;
    let mut dist = vec![0.0; field_size];
    if t >= 0 {
        dist[rank - 1] = outcome.lower_champions().cdf(t);
    }
    let won = outcome.lower_champions_if_won();
    for l in (t + 1).max(0)..=won.len() as i64 {
        let r = field_size as i64 - l;
        if r >= 1 {
            dist[r as usize - 1] += outcome.q_own * won.pmf(l);
        }
    }
    dist
}

/// One line of a field report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldRow {
    pub team: TeamId,
    pub name: String,
    pub conference: String,
    pub rank: usize,
    pub situation: Situation,
    pub threshold: i64,
    pub q_own: f64,
    pub probability: f64,
}

/// Rankings, conference membership and champion probabilities for a league.
#[derive(Debug, Clone)]
pub struct FieldContext {
    pub field_size: usize,
    pub ranking: Ranking,
    conferences: Vec<ConferenceId>,
    conf_slot: Vec<usize>,
    champ: Vec<f64>,
    names: Vec<String>,
    conf_names: Vec<String>,
}

impl FieldContext {
    pub fn new(
        field_size: usize,
        teams: &TeamTable,
        ranking: Ranking,
        champions: &[ChampionDistribution],
    ) -> Result<Self> {
        let k = teams.conferences().len();
        if field_size < k {
            return Err(Error::Invalid(format!(
                "field of {field_size} cannot hold {k} automatic bids"
            )));
        }
        if ranking.len() != teams.len() {
            return Err(Error::Invalid(format!(
                "ranking covers {} teams, roster has {}",
                ranking.len(),
                teams.len()
            )));
        }
        let conferences: Vec<ConferenceId> = teams.conferences().iter().map(|c| c.id).collect();
        let slot_of: HashMap<ConferenceId, usize> =
            conferences.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let conf_slot = teams.ids().map(|t| slot_of[&teams.conference_of(t)]).collect();
        let mut champ = vec![0.0; teams.len()];
        let mut seen = vec![false; k];
        for cd in champions {
            let slot = *slot_of.get(&cd.conference).ok_or_else(|| {
                Error::Invalid(format!("unknown conference id {}", cd.conference.0))
            })?;
            seen[slot] = true;
            let total: f64 = cd.probs.iter().map(|x| x.1).sum();
            if (total - 1.0).abs() > 1e-10 {
                return Err(Error::Consistency(format!(
                    "champion probabilities for '{}' sum to {total}",
                    teams.conference_name(cd.conference)
                )));
            }
            for &(t, p) in &cd.probs {
                if teams.conference_of(t) != cd.conference {
                    return Err(Error::Consistency(format!(
                        "{} is not in '{}'",
                        teams.name(t),
                        teams.conference_name(cd.conference)
                    )));
                }
                champ[t.0] = p;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Structure(format!(
                "no champion distribution for '{}'",
                teams.conference_name(conferences[missing])
            )));
        }
        Ok(Self {
            field_size,
            ranking,
            conf_slot,
            champ,
            names: teams.names(),
            conf_names: conferences
                .iter()
                .map(|&c| teams.conference_name(c).to_string())
                .collect(),
            conferences,
        })
    }

    pub fn num_conferences(&self) -> usize {
        self.conferences.len()
    }

    pub fn champion_prob(&self, team: TeamId) -> f64 {
        self.champ[team.0]
    }

    /// `t_u = field_size - rank`.
    pub fn threshold(&self, team: TeamId) -> i64 {
        self.field_size as i64 - self.ranking.rank(team) as i64
    }

    pub fn outcome(&self, team: TeamId) -> ConferenceOutcome {
        let k = self.conferences.len();
        let mut q_low = vec![0.0; k];
        let rank = self.ranking.rank(team);
        for &s in &self.ranking.order()[rank..] {
            q_low[self.conf_slot[s.0]] += self.champ[s.0];
        }
        let q_low: Vec<f64> = q_low.into_iter().map(|p: f64| p.clamp(0.0, 1.0)).collect();
        ConferenceOutcome {
            team,
            own_conf: self.conf_slot[team.0],
            q_own: self.champ[team.0],
            q_high: q_low.iter().map(|p| 1.0 - p).collect(),
            q_low,
        }
    }

    pub fn make_field_prob(&self, team: TeamId) -> f64 {
        make_field_prob(&self.outcome(team), self.threshold(team))
    }

    pub fn situation(&self, team: TeamId) -> Situation {
        classify_situation(&self.outcome(team), self.threshold(team))
    }

    pub fn rank_distribution(&self, team: TeamId) -> Vec<f64> {
        rank_distribution(&self.outcome(team), self.ranking.rank(team), self.field_size)
    }

    /// Every team, in rank order.
    pub fn report(&self) -> Vec<FieldRow> {
        self.ranking
            .order()
            .par_iter()
            .map(|&team| {
                let outcome = self.outcome(team);
                let t = self.threshold(team);
                FieldRow {
                    team,
                    name: self.names[team.0].clone(),
                    conference: self.conf_names[self.conf_slot[team.0]].clone(),
                    rank: self.ranking.rank(team),
                    situation: classify_situation(&outcome, t),
                    threshold: t,
                    q_own: outcome.q_own,
                    probability: make_field_prob(&outcome, t),
                }
            })
            .collect()
    }
}
