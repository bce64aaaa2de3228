mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use marchcast_core::bracketbuild::FieldRule;
use marchcast_core::ingest::League;
use marchcast_core::Method;

/// Team strengths, win probabilities, tournament and field probabilities for
/// college basketball.
#[derive(Debug, Parser, Serialize)]
#[command(name = "marchcast", version, arg_required_else_help = true)]
struct Cli {
    /// Seed for every random draw; recorded in each output header.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write outputs and manifest.json here instead of printing to stdout.
    #[arg(short, long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Serialize)]
struct DataArgs {
    /// Dataset root laid out as <root>/<league>/<season>/{games,teams}.csv.
    #[arg(long, value_name = "DIR")]
    data: Option<PathBuf>,

    #[arg(long, default_value = "women")]
    league: League,

    #[arg(long, default_value = "2019-20")]
    season: String,

    /// Games CSV; overrides the dataset root.
    #[arg(long, value_name = "CSV", requires = "teams")]
    games: Option<PathBuf>,

    /// Teams CSV; overrides the dataset root.
    #[arg(long, value_name = "CSV", requires = "games")]
    teams: Option<PathBuf>,

    /// Fit only on regular-season games before this week.
    #[arg(long, value_name = "WEEK")]
    before_week: Option<u32>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MethodChoice {
    Conformal,
    #[value(alias = "linear_t", alias = "t")]
    Linear,
    Logistic,
    All,
}

impl MethodChoice {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Conformal => vec![Method::Conformal],
            MethodChoice::Linear => vec![Method::LinearT],
            MethodChoice::Logistic => vec![Method::Logistic],
            MethodChoice::All => Method::ALL.to_vec(),
        }
    }
}

fn field_size(s: &str) -> Result<usize, String> {
    match s {
        "64" => Ok(64),
        "68" => Ok(68),
        _ => Err(format!("field size must be 64 or 68, got '{s}'")),
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Fit strengths and list teams from strongest to weakest.
    Rank {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Probability that the home (first-listed) team wins.
    Winprob {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        home: String,
        #[arg(long)]
        away: String,
        #[arg(long)]
        neutral: bool,
        #[arg(long, value_enum, default_value = "all")]
        method: MethodChoice,
    },
    /// Conformal predictive distribution of the margin over a grid.
    Cpd {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        home: String,
        #[arg(long)]
        away: String,
        #[arg(long)]
        neutral: bool,
        /// lo:hi:step
        #[arg(long, default_value = "-80:80:1", allow_hyphen_values = true)]
        grid: String,
    },
    /// Exact probability of each team reaching each round of a bracket.
    Tournament {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_name = "JSON")]
        bracket: PathBuf,
        #[arg(long, default_value = "conformal")]
        method: Method,
        /// Add a column per round.
        #[arg(long)]
        round_by_round: bool,
        /// Also play the bracket this many times (needs --seed).
        #[arg(long, value_name = "N")]
        simulate: Option<u64>,
    },
    /// Probability of making the tournament field.
    Field {
        #[command(flatten)]
        data: DataArgs,
        /// Conference bracket JSON files (default: <season>/conf_brackets).
        #[arg(long, value_name = "DIR")]
        conf_brackets: Option<PathBuf>,
        #[arg(long, default_value = "64", value_parser = field_size)]
        field_size: usize,
        #[arg(long, default_value = "conformal")]
        method: Method,
        /// Also write this team's field-position distribution.
        #[arg(long, value_name = "TEAM")]
        rank_dist: Option<String>,
    },
    /// Seed an exemplar field onto a bracket.
    Bracket {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_name = "DIR")]
        conf_brackets: Option<PathBuf>,
        #[arg(long, default_value = "64", value_parser = field_size)]
        field_size: usize,
        #[arg(long, default_value = "conformal")]
        method: Method,
        #[arg(long)]
        rule: FieldRule,
    },
    /// Calibration and log-loss of the three methods on post-season games.
    Eval {
        #[arg(long, value_name = "DIR")]
        data: PathBuf,
        #[arg(long, default_value = "women")]
        league: League,
        /// Season end years, e.g. 2015..2021 or 2016,2018.
        #[arg(long, default_value = "2015..2021")]
        seasons: String,
        #[arg(long, value_enum, default_value = "all")]
        methods: MethodChoice,
        /// Also write every prediction with its outcome.
        #[arg(long)]
        plot_data: bool,
    },
    /// Write a synthetic season drawn from the margin model (needs --out-dir and --seed).
    Simulate {
        #[arg(long, default_value = "women")]
        league: League,
        #[arg(long, default_value = "2019-20")]
        season: String,
        #[arg(long, default_value_t = 12)]
        conferences: usize,
        #[arg(long, default_value_t = 10)]
        teams_per_conference: usize,
        #[arg(long, default_value_t = 10)]
        nonconference_games: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Rank { .. } => "rank",
            Command::Winprob { .. } => "winprob",
            Command::Cpd { .. } => "cpd",
            Command::Tournament { .. } => "tournament",
            Command::Field { .. } => "field",
            Command::Bracket { .. } => "bracket",
            Command::Eval { .. } => "eval",
            Command::Simulate { .. } => "simulate",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
