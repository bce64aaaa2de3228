use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};

use marchcast_core::bracketbuild::{exemplar_field, s_curve_place, FieldRule};
use marchcast_core::evalcal::{evaluate, predict_postseason};
use marchcast_core::field::{conf_win_probs, ChampionDistribution, FieldContext};
use marchcast_core::ingest::{
    parse_bracket, parse_games, parse_seasons, read_bracket_dir, season_split, write_games,
    ConferenceBracketFile, GameRecord, League, Season, TeamId, TeamTable,
};
use marchcast_core::predict::{games_before, Grid, Predictor};
use marchcast_core::ratings::{rank_teams, Ranking};
use marchcast_core::synth::{conference_brackets, generate, SynthConfig};
use marchcast_core::tourney::{closed_form, monte_carlo};
use marchcast_core::{MatchQuery, Method};

use crate::output::{emit, sig6, Artifacts, Table, VERSION};
use crate::{Cli, Command, DataArgs};

pub fn run(cli: &Cli) -> Result<()> {
    let mut art = Artifacts::default();
    match &cli.command {
        Command::Rank { data } => rank(cli, data, &mut art)?,
        Command::Winprob {
            data,
            home,
            away,
            neutral,
            method,
        } => {
            let d = load(data, &mut art)?;
            let predictor = d.fit()?;
            let q = d.query(home, away, *neutral)?;
            let mut t = Table::new(&["method", "home", "away", "neutral", "p"])?;
            for m in method.methods() {
                let p = predictor.win_prob(m, &q)?.p;
                t.row([
                    m.as_str(),
                    d.teams.name(q.home),
                    d.teams.name(q.away),
                    if q.neutral { "true" } else { "false" },
                    &sig6(p),
                ])?;
            }
            art.add("winprob.csv", t.finish(cli.seed)?);
        }
        Command::Cpd {
            data,
            home,
            away,
            neutral,
            grid,
        } => {
            let grid = Grid::parse(grid)?;
            let d = load(data, &mut art)?;
            let predictor = d.fit()?;
            let q = d.query(home, away, *neutral)?;
            let curve = predictor.cpd(&q, &grid)?;
            let mut t = Table::new(&["y_c", "pi"])?;
            t.comment(format!(
                "{} vs {}{}, tau={}",
                d.teams.name(q.home),
                d.teams.name(q.away),
                if q.neutral { " (neutral)" } else { "" },
                curve.tau
            ));
            for (y, pi) in &curve.points {
                t.row([sig6(*y), sig6(*pi)])?;
            }
            art.add("cpd.csv", t.finish(cli.seed)?);
        }
        Command::Tournament {
            data,
            bracket,
            method,
            round_by_round,
            simulate,
        } => tournament(cli, data, bracket, *method, *round_by_round, *simulate, &mut art)?,
        Command::Field {
            data,
            conf_brackets,
            field_size,
            method,
            rank_dist,
        } => {
            let d = load(data, &mut art)?;
            let (ctx, _) = field_setup(&d, conf_brackets.as_deref(), *field_size, *method, &mut art)?;
            let mut t = Table::new(&[
                "rank",
                "team",
                "conference",
                "situation",
                "threshold",
                "q_own",
                "probability",
            ])?;
            t.comment(format!("field size {field_size}, method {method}"));
            for r in ctx.report() {
                t.row([
                    r.rank.to_string(),
                    r.name,
                    r.conference,
                    r.situation.to_string(),
                    r.threshold.to_string(),
                    sig6(r.q_own),
                    sig6(r.probability),
                ])?;
            }
            art.add("field.csv", t.finish(cli.seed)?);
            if let Some(team) = rank_dist {
                let id = d.team(team)?;
                let mut t = Table::new(&["position", "probability"])?;
                t.comment(format!(
                    "{} (rank {}): P(position = r and in the field)",
                    d.teams.name(id),
                    ctx.ranking.rank(id)
                ));
                for (i, p) in ctx.rank_distribution(id).iter().enumerate() {
                    t.row([(i + 1).to_string(), sig6(*p)])?;
                }
                art.add("rank_dist.csv", t.finish(cli.seed)?);
            }
        }
        Command::Bracket {
            data,
            conf_brackets,
            field_size,
            method,
            rule,
        } => {
            let d = load(data, &mut art)?;
            let (ctx, champions) =
                field_setup(&d, conf_brackets.as_deref(), *field_size, *method, &mut art)?;
            if *rule == FieldRule::Random && cli.seed.is_none() {
                bail!("--rule random needs --seed");
            }
            let field = exemplar_field(*rule, &champions, &ctx.ranking, *field_size, cli.seed)?;
            let seeded = s_curve_place(&field)?;
            let seed = cli.seed.map_or("none".to_string(), |s| s.to_string());
            let mut file = seeded.to_tournament_file(
                &format!(
                    "{} {} {rule} field (marchcast {VERSION}, seed={seed})",
                    d.league, d.season
                ),
                &d.teams,
            );
            file.league = Some(d.league.to_string());
            file.season = Some(d.season.clone());
            let mut json = serde_json::to_vec_pretty(&file)?;
            json.push(b'\n');
            art.add("bracket.json", json);
        }
        Command::Eval {
            data,
            league,
            seasons,
            methods,
            plot_data,
        } => eval(cli, data, *league, seasons, &methods.methods(), *plot_data, &mut art)?,
        Command::Simulate {
            league,
            season,
            conferences,
            teams_per_conference,
            nonconference_games,
        } => {
            let Some(seed) = cli.seed else {
                bail!("simulate needs --seed");
            };
            ensure!(cli.out_dir.is_some(), "simulate needs --out-dir");
            let cfg = SynthConfig {
                conferences: *conferences,
                teams_per_conference: *teams_per_conference,
                nonconference_games: *nonconference_games,
                league: *league,
                season: season.clone(),
                seed,
                ..SynthConfig::default()
            };
            simulate(&cfg, &mut art)?;
        }
    }
    emit(&art, cli.out_dir.as_deref(), cli.command.name(), cli)
}

/// A loaded season plus its training set.
struct Loaded {
    league: League,
    season: String,
    teams: TeamTable,
    games: Vec<GameRecord>,
    season_dir: Option<PathBuf>,
    before_week: Option<u32>,
}

fn require(path: &Path) -> Result<()> {
    ensure!(path.exists(), "{} does not exist", path.display());
    Ok(())
}

fn load(args: &DataArgs, art: &mut Artifacts) -> Result<Loaded> {
    let (games, teams, season_dir) = match (&args.games, &args.teams, &args.data) {
        (Some(g), Some(t), _) => (g.clone(), t.clone(), None),
        (None, None, Some(root)) => {
            let dir = Season::path(root, args.league, &args.season);
            (dir.join("games.csv"), dir.join("teams.csv"), Some(dir))
        }
        _ => bail!("give --data <root>, or both --games and --teams"),
    };
    require(&games)?;
    require(&teams)?;
    art.input(&games);
    art.input(&teams);
    let table = TeamTable::from_path(&teams)?;
    let games = parse_games(&games, args.league, &args.season, &table)
        .with_context(|| format!("reading {}", games.display()))?;
    log::info!("{} teams, {} games", table.len(), games.len());
    Ok(Loaded {
        league: args.league,
        season: args.season.clone(),
        teams: table,
        games,
        season_dir,
        before_week: args.before_week,
    })
}

impl Loaded {
    fn training(&self) -> Vec<GameRecord> {
        match self.before_week {
            Some(w) => games_before(&self.games, w),
            None => season_split(&self.games).0,
        }
    }

    fn fit(&self) -> Result<Predictor> {
        let train = self.training();
        ensure!(!train.is_empty(), "no regular-season games to fit");
        Ok(Predictor::fit(&train, &self.teams)?)
    }

    fn team(&self, name: &str) -> Result<TeamId> {
        self.teams
            .lookup(name)
            .with_context(|| format!("unknown team '{name}'"))
    }

    fn query(&self, home: &str, away: &str, neutral: bool) -> Result<MatchQuery> {
        Ok(MatchQuery::new(self.team(home)?, self.team(away)?, neutral)?)
    }
}

fn rank(cli: &Cli, data: &DataArgs, art: &mut Artifacts) -> Result<()> {
    let d = load(data, art)?;
    let predictor = d.fit()?;
    let m = &predictor.strengths;
    let mut t = Table::new(&["rank", "team", "conference", "strength"])?;
    t.comment(format!(
        "home advantage {}, sigma {}, {} games",
        sig6(m.mu_hat),
        m.sigma_hat().map_or("n/a".into(), sig6),
        m.n
    ));
    for r in rank_teams(m) {
        t.row([
            r.rank.to_string(),
            r.name,
            d.teams
                .conference_name(d.teams.conference_of(r.team))
                .to_string(),
            sig6(r.strength),
        ])?;
    }
    art.add("strengths.csv", t.finish(cli.seed)?);
    Ok(())
}

fn tournament(
    cli: &Cli,
    data: &DataArgs,
    bracket: &Path,
    method: Method,
    round_by_round: bool,
    simulate: Option<u64>,
    art: &mut Artifacts,
) -> Result<()> {
    require(bracket)?;
    let d = load(data, art)?;
    art.input(bracket);
    let spec = parse_bracket(bracket, &d.teams)
        .with_context(|| format!("reading {}", bracket.display()))?;
    let predictor = d.fit()?;
    let probs = predictor.pairwise(method, &spec.teams(), spec.venue, None)?;
    let exact = closed_form(&spec, &probs)?;
    let mc = match simulate {
        Some(n) => {
            let Some(seed) = cli.seed else {
                bail!("--simulate needs --seed");
            };
            Some(monte_carlo(&spec, &probs, n, seed)?)
        }
        None => None,
    };

    let first = if spec.has_play_ins() { 0 } else { 1 };
    let mut columns = vec!["team".to_string(), "champion".to_string()];
    if round_by_round {
        columns.extend((first..=exact.rounds).map(|r| format!("round_{r}")));
    }
    if mc.is_some() {
        columns.extend(["simulated".into(), "std_error".into()]);
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = Table::new(&cols)?;
    t.comment(format!(
        "{}: method {method}, venue {:?}{}",
        spec.name,
        spec.venue,
        simulate.map_or(String::new(), |n| format!(", {n} simulated draws"))
    ));
    let mut order: Vec<usize> = (0..exact.teams.len()).collect();
    let top = exact.rounds as usize;
    order.sort_by(|&a, &b| {
        exact.q[b][top]
            .total_cmp(&exact.q[a][top])
            .then_with(|| d.teams.name(exact.teams[a]).cmp(d.teams.name(exact.teams[b])))
    });
    for i in order {
        let mut row = vec![d.teams.name(exact.teams[i]).to_string(), sig6(exact.q[i][top])];
        if round_by_round {
            row.extend((first..=exact.rounds).map(|r| sig6(exact.q[i][r as usize])));
        }
        if let Some(mc) = &mc {
            let q = mc.probs.q[i][top];
            row.push(sig6(q));
            row.push(sig6(mc.std_error(q)));
        }
        t.row(row)?;
    }
    art.add("tournament.csv", t.finish(cli.seed)?);
    Ok(())
}

fn field_setup(
    d: &Loaded,
    conf_brackets: Option<&Path>,
    field_size: usize,
    method: Method,
    art: &mut Artifacts,
) -> Result<(FieldContext, Vec<ChampionDistribution>)> {
    let dir = match (conf_brackets, &d.season_dir) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(s)) => s.join("conf_brackets"),
        (None, None) => bail!("give --conf-brackets <dir>"),
    };
    require(&dir)?;
    art.input(&dir);
    let brackets = read_bracket_dir(&dir, &d.teams)?;
    let predictor = d.fit()?;
    let ranking: Ranking = predictor.ranking();
    let mut members: Vec<TeamId> = brackets.iter().flat_map(|b| b.teams()).collect();
    members.sort();
    members.dedup();
    let venue = brackets[0].venue;
    ensure!(
        brackets.iter().all(|b| b.venue == venue),
        "conference brackets disagree on venue"
    );
    let probs = predictor.pairwise(method, &members, venue, Some(&ranking))?;
    let champions = conf_win_probs(&d.teams, &brackets, &probs)?;
    let ctx = FieldContext::new(field_size, &d.teams, ranking, &champions)?;
    Ok((ctx, champions))
}

fn eval(
    cli: &Cli,
    root: &Path,
    league: League,
    seasons: &str,
    methods: &[Method],
    plot_data: bool,
    art: &mut Artifacts,
) -> Result<()> {
    require(root)?;
    let mut records = Vec::new();
    for label in parse_seasons(seasons)? {
        let dir = Season::path(root, league, &label);
        require(&dir)?;
        art.input(&dir.join("games.csv"));
        art.input(&dir.join("teams.csv"));
        let s = Season::load(root, league, &label)?;
        let recs = predict_postseason(&s.games, &s.teams)
            .with_context(|| format!("{league} {label}"))?;
        log::info!("{league} {label}: {} post-season games", recs.len());
        records.extend(recs);
    }
    let report = evaluate(&records)?;

    let mut t = Table::new(&[
        "league",
        "season",
        "method",
        "games",
        "mean_log_loss",
        "relative",
        "clamped",
    ])?;
    for r in report.losses.iter().filter(|r| methods.contains(&r.method)) {
        t.row([
            r.league.to_string(),
            r.season.clone().unwrap_or_else(|| "pooled".into()),
            r.method.to_string(),
            r.games.to_string(),
            sig6(r.mean_loss),
            sig6(r.relative),
            r.clamped.to_string(),
        ])?;
    }
    art.add("losses.csv", t.finish(cli.seed)?);

    for (_, m, cal) in report.calibration.iter().filter(|c| methods.contains(&c.1)) {
        let mut t = Table::new(&["bin_lower", "bin_upper", "count", "mean_p", "frequency"])?;
        t.comment(format!("{league}, method {m}, seasons {seasons}"));
        for b in &cal.bins {
            let opt = |x: Option<f64>| x.map_or(String::new(), sig6);
            t.row([
                sig6(b.lower),
                sig6(b.upper),
                b.count.to_string(),
                opt(b.mean_p),
                opt(b.frequency),
            ])?;
        }
        art.add(format!("reliability_{m}.csv"), t.finish(cli.seed)?);
    }

    if plot_data {
        let mut t = Table::new(&["league", "season", "method", "p", "home_won"])?;
        for r in &records {
            for &m in methods {
                t.row([
                    r.league.to_string(),
                    r.season.clone(),
                    m.to_string(),
                    sig6(r.prob(m)),
                    (r.home_won as u8).to_string(),
                ])?;
            }
        }
        art.add("plot_data.csv", t.finish(cli.seed)?);
    }
    Ok(())
}

fn simulate(cfg: &SynthConfig, art: &mut Artifacts) -> Result<()> {
    let league = generate(cfg)?;
    let dir = PathBuf::from(cfg.league.to_string()).join(&cfg.season);

    let mut teams = Vec::new();
    league.teams.write(&mut teams)?;
    art.add(dir.join("teams.csv"), teams);

    let mut games = Vec::new();
    write_games(&mut games, &league.games, &league.teams)?;
    art.add(dir.join("games.csv"), games);

    for (i, b) in conference_brackets(&league.teams, &league.strengths)?
        .iter()
        .enumerate()
    {
        let file = ConferenceBracketFile::from_spec(b, &league.teams)?;
        let mut json = serde_json::to_vec_pretty(&file)?;
        json.push(b'\n');
        art.add(dir.join("conf_brackets").join(format!("{:02}.json", i + 1)), json);
    }

    let mut t = Table::new(&["team", "strength"])?;
    t.comment(format!("generating home advantage {}", sig6(cfg.home_advantage)));
    for id in league.teams.ids() {
        t.row([league.teams.name(id).to_string(), sig6(league.strengths[id.0])])?;
    }
    art.add(dir.join("truth.csv"), t.finish(Some(cfg.seed))?);
    Ok(())
}
