//! Margin-of-victory least squares and logistic win models.

mod design;
mod linear;
pub(crate) mod logistic;

pub use design::{build_design, build_design_with_baseline, Design, DesignRow};
pub use linear::{fit_strengths, rank_teams, RankedTeam, Ranking, StrengthModel};
pub use logistic::{fit_logistic, LogisticModel, MAX_ITERATIONS, SCORE_TOLERANCE, SEPARATION_BOUND};
