use std::collections::HashMap;

use super::PairwiseMatrix;
use crate::error::{Error, Result};
use crate::ingest::{BracketSpec, GameResult, Slot, TeamId};

const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// Advancement probabilities `q[u][r]`: the chance team `u` wins its round-`r`
/// game, for `r = 0..=rounds`. Round 0 is the play-in (1 for teams without one)
/// and `q[u][rounds]` is the chance of winning the bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundProbs {
    pub teams: Vec<TeamId>,
    pub rounds: u32,
    pub q: Vec<Vec<f64>>,
}

impl RoundProbs {
    pub fn index_of(&self, team: TeamId) -> Option<usize> {
        self.teams.iter().position(|&t| t == team)
    }

    pub fn get(&self, team: TeamId, round: u32) -> Option<f64> {
        self.index_of(team).map(|i| self.q[i][round as usize])
    }

    pub fn champion(&self, team: TeamId) -> Option<f64> {
        self.get(team, self.rounds)
    }

    /// `(team, P(wins the bracket))` for every team.
    pub fn champion_distribution(&self) -> Vec<(TeamId, f64)> {
        self.teams
            .iter()
            .zip(&self.q)
            .map(|(&t, row)| (t, row[self.rounds as usize]))
            .collect()
    }

    pub fn column(&self, round: u32) -> Vec<f64> {
        self.q.iter().map(|row| row[round as usize]).collect()
    }
}

/// Applies completed results to a bracket.
///
/// A result is applied when it names the two teams of a game whose children
/// are both decided (a team leaf or a play-in pair). Results may come in any
/// order. Returns the pruned tree and each loser with the round it lost in.
pub fn prune(bracket: &BracketSpec) -> Result<(Slot, Vec<(TeamId, u32)>)> {
    let mut root = bracket.root.clone();
    let mut pending: Vec<GameResult> = bracket.completed.clone();
    let mut eliminated = Vec::new();
    while !pending.is_empty() {
        let before = pending.len();
        pending.retain(|res| match apply(&mut root, res) {
            Some(round) => {
                eliminated.push((res.loser, round));
                false
            }
            None => true,
        });
        if pending.len() == before {
            let r = pending[0];
            return Err(Error::Consistency(format!(
                "{} beat {} does not match any playable game of bracket '{}'",
                r.winner, r.loser, bracket.name
            )));
        }
    }
    Ok((root, eliminated))
}

/// Replaces the game decided by `res` with the winner's leaf; returns its round.
fn apply(slot: &mut Slot, res: &GameResult) -> Option<u32> {
    let pair = |a: TeamId, b: TeamId| {
        (a == res.winner && b == res.loser) || (b == res.winner && a == res.loser)
    };
    match slot {
        Slot::Team(_) => None,
        Slot::PlayIn(a, b) => {
            if pair(*a, *b) {
                *slot = Slot::Team(res.winner);
                Some(0)
            } else {
                None
            }
        }
        Slot::Game { round, left, right } => {
            if let (Slot::Team(a), Slot::Team(b)) = (left.as_ref(), right.as_ref()) {
                if pair(*a, *b) {
                    let r = *round;
                    *slot = Slot::Team(res.winner);
                    return Some(r);
                }
                return None;
            }
            apply(left, res).or_else(|| apply(right, res))
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Node {
    Leaf(usize),
    PlayIn(usize, usize),
    Game { round: u32, left: usize, right: usize },
}

impl Node {
    pub(crate) fn height(&self) -> u32 {
        match self {
            Node::Leaf(_) | Node::PlayIn(..) => 0,
            Node::Game { round, .. } => *round,
        }
    }
}

/// A pruned bracket flattened in post-order with teams as matrix indices.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    /// Local index to team id, every team of the original bracket.
    pub teams: Vec<TeamId>,
    /// Local index to row/column of the pairwise matrix.
    pub matrix_index: Vec<usize>,
    pub nodes: Vec<Node>,
    pub rounds: u32,
    pub eliminated: Vec<(usize, u32)>,
}

impl Compiled {
    pub(crate) fn new(bracket: &BracketSpec, probs: &PairwiseMatrix) -> Result<Self> {
        bracket.validate()?;
        let rounds = bracket.rounds();
        let teams = bracket.teams();
        let local: HashMap<TeamId, usize> = teams.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let missing: Vec<String> = teams
            .iter()
            .filter(|t| probs.local(**t).is_none())
            .map(|t| t.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::Invalid(format!(
                "pairwise matrix lacks teams {}",
                missing.join(", ")
            )));
        }
        let matrix_index = teams.iter().map(|&t| probs.local(t).unwrap()).collect();
        let (root, eliminated) = prune(bracket)?;
        let mut nodes = Vec::new();
        flatten(&root, &local, &mut nodes);
        Ok(Self {
            teams,
            matrix_index,
            nodes,
            rounds,
            eliminated: eliminated.into_iter().map(|(t, r)| (local[&t], r)).collect(),
        })
    }

    pub(crate) fn root(&self) -> usize {
        self.nodes.len() - 1
    }
}

fn flatten(slot: &Slot, local: &HashMap<TeamId, usize>, out: &mut Vec<Node>) -> usize {
    let node = match slot {
        Slot::Team(t) => Node::Leaf(local[t]),
        Slot::PlayIn(a, b) => Node::PlayIn(local[a], local[b]),
        Slot::Game { round, left, right } => {
            let l = flatten(left, local, out);
            let r = flatten(right, local, out);
            Node::Game {
                round: *round,
                left: l,
                right: r,
            }
        }
    };
    out.push(node);
    out.len() - 1
}

/// Exact advancement probabilities by the bottom-up recursion
/// `P(u wins node) = P(u wins its child) * sum_s p(u, s) P(s wins the other child)`.
///
/// Completed games are pruned first; a team with a bye carries its
/// probability unchanged through the rounds it skips.
pub fn closed_form(bracket: &BracketSpec, probs: &PairwiseMatrix) -> Result<RoundProbs> {
    let c = Compiled::new(bracket, probs)?;
    let j = c.rounds as usize;
    let mut q = vec![vec![0.0; j + 1]; c.teams.len()];
    for &(u, lost) in &c.eliminated {
        for r in 0..lost as usize {
            q[u][r] = 1.0;
        }
    }
    let p = |u: usize, v: usize| probs.p_local(c.matrix_index[u], c.matrix_index[v]);

    let mut dist: Vec<Vec<(usize, f64)>> = vec![Vec::new(); c.nodes.len()];
    for (i, node) in c.nodes.iter().enumerate() {
        dist[i] = match *node {
            Node::Leaf(u) => {
                q[u][0] = 1.0;
                vec![(u, 1.0)]
            }
            Node::PlayIn(a, b) => {
                let pa = p(a, b);
                let pb = p(b, a);
                q[a][0] = pa;
                q[b][0] = pb;
                vec![(a, pa), (b, pb)]
            }
            Node::Game { round, left, right } => {
                let l = std::mem::take(&mut dist[left]);
                let r = std::mem::take(&mut dist[right]);
                for (child, d) in [(left, &l), (right, &r)] {
                    carry_byes(&mut q, d, c.nodes[child].height(), round);
                }
                let mut out = Vec::with_capacity(l.len() + r.len());
                for (mine, theirs) in [(&l, &r), (&r, &l)] {
                    for &(u, w) in mine.iter() {
                        let beat: f64 = theirs.iter().map(|&(s, x)| p(u, s) * x).sum();
                        let v = w * beat;
                        q[u][round as usize] = v;
                        out.push((u, v));
                    }
                }
                let total: f64 = out.iter().map(|x| x.1).sum();
                if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                    return Err(Error::Internal(format!(
                        "round {round} winner probabilities sum to {total}"
                    )));
                }
                out
            }
        };
    }
    let root = c.root();
    carry_byes(&mut q, &dist[root], c.nodes[root].height(), c.rounds + 1);
    Ok(RoundProbs {
        teams: c.teams,
        rounds: c.rounds,
        q,
    })
}

/// A subtree of height `from` feeding a game at round `to` skips rounds in between.
fn carry_byes(q: &mut [Vec<f64>], dist: &[(usize, f64)], from: u32, to: u32) {
    for &(u, w) in dist {
        for r in (from + 1)..to {
            q[u][r as usize] = w;
        }
    }
}

/// Teams `team` could face in each round, as `(round, opponents)`.
pub fn opponent_sets(root: &Slot, team: TeamId) -> Vec<(u32, Vec<TeamId>)> {
    let mut out = Vec::new();
    let mut node = root;
    loop {
        match node {
            Slot::Team(_) => break,
            Slot::PlayIn(a, b) => {
                let other = if *a == team { *b } else { *a };
                out.push((0, vec![other]));
                break;
            }
            Slot::Game { round, left, right } => {
                let (mine, other) = if left.contains(team) {
                    (left, right)
                } else if right.contains(team) {
                    (right, left)
                } else {
                    break;
                };
                out.push((*round, other.teams()));
                node = mine;
            }
        }
    }
    out.reverse();
    out
}
