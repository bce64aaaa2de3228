use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::teams::{TeamId, TeamTable};
use crate::error::{Error, Result};

/// A node of a single-elimination bracket.
///
/// Rounds count upward from the first main-draw round (1). A play-in pair is
/// the extra round 0 that feeds a round-1 game. A team leaf sitting under a
/// game whose round is more than one above the leaf's own height has a bye
/// through the skipped rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    Team(TeamId),
    PlayIn(TeamId, TeamId),
    Game {
        round: u32,
        left: Box<Slot>,
        right: Box<Slot>,
    },
}

impl Slot {
    /// Joins two subtrees with a game one round above the taller of them.
    pub fn join(left: Slot, right: Slot) -> Slot {
        let round = left.height().max(right.height()) + 1;
        Slot::Game {
            round,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Round of the game at this node; 0 for leaves and play-in pairs.
    pub fn height(&self) -> u32 {
        match self {
            Slot::Team(_) | Slot::PlayIn(..) => 0,
            Slot::Game { round, .. } => *round,
        }
    }

    /// Teams in leaf order.
    pub fn teams(&self) -> Vec<TeamId> {
        let mut out = Vec::new();
        self.collect_teams(&mut out);
        out
    }

    fn collect_teams(&self, out: &mut Vec<TeamId>) {
        match self {
            Slot::Team(t) => out.push(*t),
            Slot::PlayIn(a, b) => out.extend([*a, *b]),
            Slot::Game { left, right, .. } => {
                left.collect_teams(out);
                right.collect_teams(out);
            }
        }
    }

    pub fn contains(&self, team: TeamId) -> bool {
        match self {
            Slot::Team(t) => *t == team,
            Slot::PlayIn(a, b) => *a == team || *b == team,
            Slot::Game { left, right, .. } => left.contains(team) || right.contains(team),
        }
    }

    /// Number of edges on the longest root-to-leaf path (play-ins count as one).
    pub fn depth(&self) -> u32 {
        match self {
            Slot::Team(_) => 0,
            Slot::PlayIn(..) => 1,
            Slot::Game { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn play_in_pairs(&self) -> Vec<(TeamId, TeamId)> {
        match self {
            Slot::Team(_) => Vec::new(),
            Slot::PlayIn(a, b) => vec![(*a, *b)],
            Slot::Game { left, right, .. } => {
                let mut v = left.play_in_pairs();
                v.extend(right.play_in_pairs());
                v
            }
        }
    }
}

/// A completed game inside a bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameResult {
    pub winner: TeamId,
    pub loser: TeamId,
}

/// Venue assumption for every game of a bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Venue {
    #[default]
    Neutral,
    /// The better-ranked team of each pairing plays at home.
    HigherRankedHome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketSpec {
    pub name: String,
    pub root: Slot,
    pub completed: Vec<GameResult>,
    pub venue: Venue,
}

impl BracketSpec {
    pub fn new(name: impl Into<String>, root: Slot) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            root,
            completed: Vec::new(),
            venue: Venue::Neutral,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_completed(mut self, completed: Vec<GameResult>) -> Result<Self> {
        self.completed = completed;
        self.validate()?;
        Ok(self)
    }

    /// Number of main-draw rounds.
    pub fn rounds(&self) -> u32 {
        self.root.height()
    }

    pub fn teams(&self) -> Vec<TeamId> {
        self.root.teams()
    }

    pub fn has_play_ins(&self) -> bool {
        !self.root.play_in_pairs().is_empty()
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let teams = self.teams();
        let mut seen = HashSet::new();
        for t in &teams {
            if !seen.insert(*t) {
                return Err(Error::Structure(format!("team {t} appears twice")));
            }
        }
        check_rounds(&self.root, None)?;
        for r in &self.completed {
            if r.winner == r.loser {
                return Err(Error::Consistency(format!(
                    "result has {} beating itself",
                    r.winner
                )));
            }
            for t in [r.winner, r.loser] {
                if !seen.contains(&t) {
                    return Err(Error::Consistency(format!(
                        "result names team {t} which is not in bracket '{}'",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_rounds(node: &Slot, parent_round: Option<u32>) -> Result<()> {
    match node {
        Slot::Team(_) => Ok(()),
        Slot::PlayIn(a, b) => {
            if a == b {
                return Err(Error::Structure(format!("play-in pairs {a} with itself")));
            }
            match parent_round {
                None | Some(1) => Ok(()),
                Some(r) => Err(Error::Structure(format!(
                    "play-in {a}/{b} feeds round {r}; play-ins may only feed round 1"
                ))),
            }
        }
        Slot::Game { round, left, right } => {
            if *round <= left.height() || *round <= right.height() {
                return Err(Error::Structure(format!(
                    "game at round {round} sits on a subtree of equal or later round"
                )));
            }
            check_rounds(left, Some(*round))?;
            check_rounds(right, Some(*round))
        }
    }
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultFile {
    pub winner: String,
    pub loser: String,
}

/// A seed line: a single team or a play-in pair sharing the slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedEntry {
    Team(String),
    PlayIn([String; 2]),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionFile {
    pub name: String,
    /// Teams in seed order: index 0 is the 1-seed.
    pub seeds: Vec<SeedEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayInFile {
    pub region: String,
    pub seed: usize,
    pub teams: [String; 2],
}

/// Seeded tournament bracket (March Madness style).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TournamentFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub league: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub season: Option<String>,
    pub regions: Vec<RegionFile>,
    /// Play-in pairs given separately; each replaces the named seed slot.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub play_ins: Vec<PlayInFile>,
    #[serde(default)]
    pub completed: Vec<ResultFile>,
    #[serde(default)]
    pub venue: Venue,
}

/// Explicit tree node: a team name, `null` (bye) or a two-element array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Bye,
    Team(String),
    Pair(Box<TreeNode>, Box<TreeNode>),
}

/// Conference tournament: an arbitrary tree, or a decided champion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConferenceBracketFile {
    pub conference: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeNode>,
    /// Set when the automatic bid is already decided.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub champion: Option<String>,
    #[serde(default)]
    pub completed: Vec<ResultFile>,
    #[serde(default)]
    pub venue: Venue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BracketFile {
    Tournament(TournamentFile),
    Conference(ConferenceBracketFile),
}

/// Standard seed order for a region of `n` (power of two) seeds, e.g.
/// `[1, 4, 2, 3]` for four. Adjacent entries meet in the first round.
pub fn seed_order(n: usize) -> Vec<usize> {
    let mut order = vec![1];
    let mut size = 1;
    while size < n {
        size *= 2;
        order = order.iter().flat_map(|&s| [s, size + 1 - s]).collect();
    }
    order
}

fn balanced(mut leaves: Vec<Slot>) -> Slot {
    while leaves.len() > 1 {
        let mut next = Vec::with_capacity(leaves.len() / 2);
        let mut it = leaves.into_iter();
        while let (Some(a), Some(b)) = (it.next(), it.next()) {
            next.push(Slot::join(a, b));
        }
        leaves = next;
    }
    leaves.pop().expect("non-empty leaves")
}

fn resolve_results(results: &[ResultFile], teams: &TeamTable) -> Result<Vec<GameResult>> {
    results
        .iter()
        .map(|r| {
            Ok(GameResult {
                winner: teams.require(&r.winner)?,
                loser: teams.require(&r.loser)?,
            })
        })
        .collect()
}

fn is_bye_name(s: &str) -> bool {
    s.trim().eq_ignore_ascii_case("bye")
}

impl TournamentFile {
    pub fn to_spec(&self, teams: &TeamTable) -> Result<BracketSpec> {
        let regions = self.regions.len();
        if regions == 0 || !regions.is_power_of_two() {
            return Err(Error::Structure(format!(
                "region count {regions} is not a power of two"
            )));
        }
        let size = self.regions[0].seeds.len();
        if size < 2 || !size.is_power_of_two() {
            return Err(Error::Structure(format!(
                "region '{}' has {size} seeds; need a power of two >= 2",
                self.regions[0].name
            )));
        }
        if let Some(r) = self.regions.iter().find(|r| r.seeds.len() != size) {
            return Err(Error::Structure(format!(
                "region '{}' has {} seeds, expected {size}",
                r.name,
                r.seeds.len()
            )));
        }

        let mut seeds: Vec<Vec<SeedEntry>> =
            self.regions.iter().map(|r| r.seeds.clone()).collect();
        for p in &self.play_ins {
            let ri = self
                .regions
                .iter()
                .position(|r| r.name == p.region)
                .ok_or_else(|| Error::Structure(format!("play-in region '{}' unknown", p.region)))?;
            if p.seed == 0 || p.seed > size {
                return Err(Error::Structure(format!("play-in seed {} out of range", p.seed)));
            }
            seeds[ri][p.seed - 1] = SeedEntry::PlayIn(p.teams.clone());
        }

        let mut unknown = Vec::new();
        let mut lookup = |name: &str| match teams.id(name) {
            Some(id) => Some(id),
            None => {
                unknown.push(name.trim().to_string());
                None
            }
        };
        let order = seed_order(size);
        let mut region_roots = Vec::with_capacity(regions);
        for region in &seeds {
            let mut leaves = Vec::with_capacity(size);
            for &s in &order {
                let leaf = match &region[s - 1] {
                    SeedEntry::Team(name) if is_bye_name(name) => {
                        return Err(Error::Structure(
                            "byes are not allowed in a seeded tournament bracket".into(),
                        ))
                    }
                    SeedEntry::Team(name) => lookup(name).map(Slot::Team),
                    SeedEntry::PlayIn([a, b]) => match (lookup(a), lookup(b)) {
                        (Some(a), Some(b)) => Some(Slot::PlayIn(a, b)),
                        _ => None,
                    },
                };
                if let Some(l) = leaf {
                    leaves.push(l);
                }
            }
            if leaves.len() == size {
                region_roots.push(balanced(leaves));
            }
        }
        if !unknown.is_empty() {
            return Err(Error::UnknownTeams(unknown));
        }
        let ordered: Vec<Slot> = seed_order(regions)
            .into_iter()
            .map(|r| region_roots[r - 1].clone())
            .collect();
        let spec = BracketSpec {
            name: self.name.clone(),
            root: balanced(ordered),
            completed: resolve_results(&self.completed, teams)?,
            venue: self.venue,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl ConferenceBracketFile {
    pub fn to_spec(&self, teams: &TeamTable) -> Result<BracketSpec> {
        let completed = resolve_results(&self.completed, teams)?;
        if let Some(champ) = &self.champion {
            let id = teams.require(champ)?;
            if let Some(tree) = &self.tree {
                let root = tree_to_slot(tree, teams)?;
                if !root.map(|r| r.contains(id)).unwrap_or(false) {
                    return Err(Error::Consistency(format!(
                        "champion '{champ}' is not in the '{}' tree",
                        self.conference
                    )));
                }
            }
            return Ok(BracketSpec {
                name: self.conference.clone(),
                root: Slot::Team(id),
                completed: Vec::new(),
                venue: self.venue,
            });
        }
        let tree = self.tree.as_ref().ok_or_else(|| {
            Error::Structure(format!(
                "conference '{}' has neither a tree nor a champion",
                self.conference
            ))
        })?;
        let root = tree_to_slot(tree, teams)?
            .ok_or_else(|| Error::Structure(format!("'{}' tree is all byes", self.conference)))?;
        let spec = BracketSpec {
            name: self.conference.clone(),
            root,
            completed,
            venue: self.venue,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Writes an unpruned spec back out as an explicit tree.
    pub fn from_spec(spec: &BracketSpec, teams: &TeamTable) -> Result<Self> {
        fn node(slot: &Slot, teams: &TeamTable) -> Result<TreeNode> {
            match slot {
                Slot::Team(t) => Ok(TreeNode::Team(teams.name(*t).to_string())),
                Slot::PlayIn(..) => Err(Error::Structure(
                    "conference trees do not carry play-in pairs".into(),
                )),
                Slot::Game { left, right, .. } => Ok(TreeNode::Pair(
                    Box::new(node(left, teams)?),
                    Box::new(node(right, teams)?),
                )),
            }
        }
        Ok(Self {
            conference: spec.name.clone(),
            tree: Some(node(&spec.root, teams)?),
            champion: None,
            completed: spec
                .completed
                .iter()
                .map(|r| ResultFile {
                    winner: teams.name(r.winner).to_string(),
                    loser: teams.name(r.loser).to_string(),
                })
                .collect(),
            venue: spec.venue,
        })
    }
}

fn tree_to_slot(node: &TreeNode, teams: &TeamTable) -> Result<Option<Slot>> {
    match node {
        TreeNode::Bye => Ok(None),
        TreeNode::Team(name) if is_bye_name(name) => Ok(None),
        TreeNode::Team(name) => Ok(Some(Slot::Team(teams.require(name)?))),
        TreeNode::Pair(a, b) => {
            let a = tree_to_slot(a, teams)?;
            let b = tree_to_slot(b, teams)?;
            Ok(match (a, b) {
                (Some(a), Some(b)) => Some(Slot::join(a, b)),
                (Some(x), None) | (None, Some(x)) => Some(x),
                (None, None) => None,
            })
        }
    }
}

impl BracketFile {
    pub fn to_spec(&self, teams: &TeamTable) -> Result<BracketSpec> {
        match self {
            BracketFile::Tournament(t) => t.to_spec(teams),
            BracketFile::Conference(c) => c.to_spec(teams),
        }
    }
}

pub fn read_bracket<R: Read>(reader: R, teams: &TeamTable) -> Result<BracketSpec> {
    let file: BracketFile = serde_json::from_reader(reader)?;
    file.to_spec(teams)
}

pub fn parse_bracket(path: impl AsRef<Path>, teams: &TeamTable) -> Result<BracketSpec> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_bracket(std::io::BufReader::new(file), teams)
}
