//! Single-elimination tournament probabilities.

mod closed_form;
mod count;
mod montecarlo;
mod pairwise;

pub use closed_form::{closed_form, opponent_sets, prune, RoundProbs};
pub use count::bracket_count;
pub use montecarlo::{monte_carlo, MonteCarlo};
pub use pairwise::PairwiseMatrix;
