use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::closed_form::{Compiled, Node};
use super::{PairwiseMatrix, RoundProbs};
use crate::error::{Error, Result};
use crate::ingest::BracketSpec;

/// Simulated advancement frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarlo {
    pub probs: RoundProbs,
    pub draws: u64,
    pub seed: u64,
}

impl MonteCarlo {
    /// Binomial standard error `sqrt(q (1 - q) / draws)` of an estimate.
    pub fn std_error(&self, estimate: f64) -> f64 {
        (estimate * (1.0 - estimate) / self.draws as f64).sqrt()
    }
}

const CHUNK: u64 = 4096;

/// Plays the bracket `draws` times.
///
/// Draw `i` uses a ChaCha8 stream keyed by `(seed, i)`, so the result does not
/// depend on the number of threads.
pub fn monte_carlo(
    bracket: &BracketSpec,
    probs: &PairwiseMatrix,
    draws: u64,
    seed: u64,
) -> Result<MonteCarlo> {
    if draws == 0 {
        return Err(Error::Invalid("draws must be positive".into()));
    }
    let c = Compiled::new(bracket, probs)?;
    let width = c.rounds as usize + 1;
    let cells = c.teams.len() * width;
    let chunks = draws.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut counts = vec![0u64; cells];
            let mut winners = vec![0usize; c.nodes.len()];
            let end = ((chunk + 1) * CHUNK).min(draws);
            for draw in chunk * CHUNK..end {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(draw);
                play(&c, probs, &mut rng, &mut winners, &mut counts, width);
            }
            counts
        })
        .reduce(
            || vec![0u64; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let mut q: Vec<Vec<f64>> = counts
        .chunks(width)
        .map(|row| row.iter().map(|&n| n as f64 / draws as f64).collect())
        .collect();
    for &(u, lost) in &c.eliminated {
        for r in 0..lost as usize {
            q[u][r] = 1.0;
        }
    }
    Ok(MonteCarlo {
        probs: RoundProbs {
            teams: c.teams,
            rounds: c.rounds,
            q,
        },
        draws,
        seed,
    })
}

fn play(
    c: &Compiled,
    probs: &PairwiseMatrix,
    rng: &mut ChaCha8Rng,
    winners: &mut [usize],
    counts: &mut [u64],
    width: usize,
) {
    let p = |u: usize, v: usize| probs.p_local(c.matrix_index[u], c.matrix_index[v]);
    let mut bump = |u: usize, from: u32, to: u32| {
        for r in from..to {
            counts[u * width + r as usize] += 1;
        }
    };
    for (i, node) in c.nodes.iter().enumerate() {
        winners[i] = match *node {
            Node::Leaf(u) => {
                bump(u, 0, 1);
                u
            }
            Node::PlayIn(a, b) => {
                let w = if rng.random::<f64>() < p(a, b) { a } else { b };
                bump(w, 0, 1);
                w
            }
            Node::Game { round, left, right } => {
                let (a, b) = (winners[left], winners[right]);
                bump(a, c.nodes[left].height() + 1, round);
                bump(b, c.nodes[right].height() + 1, round);
                let w = if rng.random::<f64>() < p(a, b) { a } else { b };
                bump(w, round, round + 1);
                w
            }
        };
    }
    let root = c.root();
    bump(winners[root], c.nodes[root].height() + 1, c.rounds + 1);
}
