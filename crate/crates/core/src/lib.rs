//! Team strengths, single-game win probabilities and exact single-elimination
//! tournament probabilities for college basketball.
//!
//! The pipeline runs in one direction:
//!
//! 1. [`ingest`] reads game logs, team rosters and bracket files.
//! 2. [`ratings`] fits the margin-of-victory least-squares model and the
//!    logistic win model.
//! 3. [`predict`] turns a fitted model into win probabilities by three routes:
//!    a conformal predictive distribution, the normal-theory t predictive, and
//!    logistic regression.
//! 4. [`tourney`] evaluates a fixed bracket in closed form (with a Monte Carlo
//!    check), [`field`] computes the chance of making the tournament field from
//!    partially played conference tournaments, and [`bracketbuild`] seeds a
//!    field onto a bracket.
//! 5. [`evalcal`] scores the three routes on historical post-seasons.

pub mod bracketbuild;
pub mod error;
pub mod evalcal;
pub mod field;
pub mod ingest;
pub mod predict;
pub mod ratings;
pub mod synth;
pub mod tourney;

mod linalg;

pub use error::{Error, Result};
pub use ingest::{
    BracketSpec, ConferenceId, GameRecord, GameResult, League, Phase, Slot, TeamId, TeamTable,
};
pub use predict::{MatchQuery, Method, WinProb};
pub use ratings::{Design, DesignRow, LogisticModel, RankedTeam, StrengthModel};
pub use tourney::{PairwiseMatrix, RoundProbs};
