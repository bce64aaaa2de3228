//! Game logs, team rosters and bracket files.

mod bracket;
mod dataset;
mod games;
mod teams;

pub use bracket::{
    parse_bracket, read_bracket, BracketFile, BracketSpec, ConferenceBracketFile, GameResult,
    seed_order, PlayInFile, RegionFile, ResultFile, SeedEntry, Slot, TournamentFile, TreeNode,
    Venue,
};
pub use dataset::{parse_seasons, read_bracket_dir, season_label, Season};
pub use games::{
    parse_games, read_games, season_split, write_games, GameRecord, League, Phase,
};
pub use teams::{Conference, ConferenceId, Team, TeamId, TeamTable};
