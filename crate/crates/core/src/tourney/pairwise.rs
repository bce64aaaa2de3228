use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::TeamId;

/// Win probabilities for every ordered pair of a set of teams.
///
/// Each unordered pair is evaluated once, in canonical order (lower id first),
/// and the reverse entry is filled as its complement, so
/// `p(u, v) + p(v, u) == 1` holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseMatrix {
    teams: Vec<TeamId>,
    index: HashMap<TeamId, usize>,
    /// Row-major `k x k`; the diagonal is unused and kept at 0.
    probs: Vec<f64>,
}

impl PairwiseMatrix {
    /// `f(u, v)` is asked for `P(u beats v)` with `u < v` only.
    pub fn try_from_fn<F>(teams: &[TeamId], f: F) -> Result<Self>
    where
        F: Fn(TeamId, TeamId) -> Result<f64> + Sync,
    {
        let mut teams = teams.to_vec();
        teams.sort();
        teams.dedup();
        let k = teams.len();
        let pairs: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
            .collect();
        let values: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j)| f(teams[i], teams[j]))
            .collect::<Result<_>>()?;
        let mut probs = vec![0.0; k * k];
        for (&(i, j), &p) in pairs.iter().zip(&values) {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Invalid(format!(
                    "P({} beats {}) = {p} is not a probability",
                    teams[i], teams[j]
                )));
            }
            probs[i * k + j] = p;
            probs[j * k + i] = 1.0 - p;
        }
        let index = teams.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        Ok(Self {
            teams,
            index,
            probs,
        })
    }

    pub fn from_fn<F>(teams: &[TeamId], f: F) -> Result<Self>
    where
        F: Fn(TeamId, TeamId) -> f64 + Sync,
    {
        Self::try_from_fn(teams, |u, v| Ok(f(u, v)))
    }

    /// Every game a coin flip.
    pub fn uniform(teams: &[TeamId]) -> Self {
        Self::from_fn(teams, |_, _| 0.5).expect("0.5 is a probability")
    }

    /// Independent uniform probabilities, for tests and benchmarks.
    pub fn random<R: Rng>(teams: &[TeamId], rng: &mut R) -> Self {
        let mut sorted = teams.to_vec();
        sorted.sort();
        sorted.dedup();
        let k = sorted.len();
        let draws: Vec<f64> = (0..k * (k.saturating_sub(1)) / 2)
            .map(|_| rng.random::<f64>())
            .collect();
        let pos = |i: usize, j: usize| i * (2 * k - i - 1) / 2 + (j - i - 1);
        let local: HashMap<TeamId, usize> =
            sorted.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        Self::from_fn(&sorted, |u, v| draws[pos(local[&u], local[&v])])
            .expect("uniform draws are probabilities")
    }

    pub fn teams(&self) -> &[TeamId] {
        &self.teams
    }

    pub fn len(&self) -> usize {
        self.teams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.teams.is_empty()
    }

    pub fn local(&self, team: TeamId) -> Option<usize> {
        self.index.get(&team).copied()
    }

    /// `P(u beats v)`; panics if either team is missing.
    pub fn p(&self, u: TeamId, v: TeamId) -> f64 {
        self.get(u, v)
            .unwrap_or_else(|| panic!("no probability for {u} vs {v}"))
    }

    pub fn get(&self, u: TeamId, v: TeamId) -> Option<f64> {
        Some(self.p_local(self.local(u)?, self.local(v)?))
    }

    pub(crate) fn p_local(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.teams.len() + j]
    }
}
