use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use super::design::{team_column, Design, DesignRow};
use crate::error::{Error, Result};
use crate::ingest::TeamId;
use crate::linalg::weighted_normal_equations;

/// Least-squares fit of `mov = mu * home + theta_home - theta_away + noise`.
#[derive(Debug, Clone)]
pub struct StrengthModel {
    /// Home-court advantage in points.
    pub mu_hat: f64,
    /// Strength of every team in points; the baseline entry is exactly 0.
    pub theta_hat: Vec<f64>,
    pub baseline: TeamId,
    /// Full coefficient vector `(mu, free thetas...)`.
    pub beta: Vec<f64>,
    /// `(X'X)^-1`, kept for leverages `x'(X'X)^-1 x`.
    pub xtx_inv: DMatrix<f64>,
    /// `RSS / (n - p)`; `None` when `n <= p`.
    pub sigma2_hat: Option<f64>,
    pub n: usize,
    pub p_eff: usize,
    pub residuals: Vec<f64>,
    pub team_names: Vec<String>,
}

impl StrengthModel {
    pub fn row(&self, home: TeamId, away: TeamId, neutral: bool) -> DesignRow {
        DesignRow::new(home, away, neutral, self.baseline)
    }

    pub fn predict(&self, row: &DesignRow) -> f64 {
        row.dot(&self.beta)
    }

    /// `(X'X)^-1 x` for a sparse row.
    pub fn xtx_inv_times(&self, row: &DesignRow) -> DVector<f64> {
        let mut out = DVector::zeros(self.p_eff);
        for &(c, x) in row.entries().iter().flatten() {
            out.axpy(x, &self.xtx_inv.column(c), 1.0);
        }
        out
    }

    /// `x'(X'X)^-1 x`.
    pub fn leverage(&self, row: &DesignRow) -> f64 {
        let e = row.entries();
        let mut h = 0.0;
        for &(i, xi) in e.iter().flatten() {
            for &(j, xj) in e.iter().flatten() {
                h += xi * xj * self.xtx_inv[(i, j)];
            }
        }
        h
    }

    pub fn sigma_hat(&self) -> Option<f64> {
        self.sigma2_hat.map(f64::sqrt)
    }

    pub fn df(&self) -> usize {
        self.n.saturating_sub(self.p_eff)
    }

    pub fn strength(&self, team: TeamId) -> f64 {
        self.theta_hat[team.0]
    }
}

/// Fits strengths by least squares through the Cholesky factor of `X'X`.
pub fn fit_strengths(design: &Design) -> Result<StrengthModel> {
    check_connected(design)?;
    if design.rows.iter().all(|r| !r.home) {
        return Err(Error::RankDeficient(
            "no home-court games, so the home advantage is not identifiable".into(),
        ));
    }
    let p = design.num_params();
    let n = design.len();
    let (xtx, xty) = weighted_normal_equations(
        &design.rows,
        std::iter::repeat(1.0),
        design.y.iter().copied(),
        p,
    );
    let chol = xtx
        .cholesky()
        .ok_or_else(|| Error::RankDeficient("X'X is not positive definite".into()))?;
    let beta = chol.solve(&xty);
    let xtx_inv = chol.inverse();

    let beta: Vec<f64> = beta.iter().copied().collect();
    let residuals: Vec<f64> = design
        .rows
        .iter()
        .zip(&design.y)
        .map(|(r, y)| y - r.dot(&beta))
        .collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let sigma2_hat = (n > p).then(|| rss / (n - p) as f64);

    Ok(StrengthModel {
        mu_hat: beta[0],
        theta_hat: theta_from_beta(&beta, design.num_teams, design.baseline),
        baseline: design.baseline,
        beta,
        xtx_inv,
        sigma2_hat,
        n,
        p_eff: p,
        residuals,
        team_names: design.team_names.clone(),
    })
}

pub(crate) fn theta_from_beta(beta: &[f64], num_teams: usize, baseline: TeamId) -> Vec<f64> {
    (0..num_teams)
        .map(|t| team_column(TeamId(t), baseline).map_or(0.0, |c| beta[c]))
        .collect()
}

fn check_connected(design: &Design) -> Result<()> {
    let n = design.num_teams;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in &design.matchups {
        let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    let base_root = roots[design.baseline.0];
    let mut detached: Vec<usize> = (0..n).filter(|&t| roots[t] != base_root).collect();
    if detached.is_empty() {
        return Ok(());
    }
    // report one component: the one holding the first detached team
    let r = roots[detached[0]];
    detached.retain(|&t| roots[t] == r);
    Err(Error::Disconnected(
        detached
            .into_iter()
            .map(|t| design.team_names[t].clone())
            .collect(),
    ))
}

/// One row of a ranking table.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedTeam {
    pub team: TeamId,
    pub name: String,
    pub strength: f64,
    /// 1 is the strongest team.
    pub rank: usize,
}

/// Teams ordered by strength, strongest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    order: Vec<TeamId>,
    rank_of: Vec<usize>,
}

impl Ranking {
    /// Orders by decreasing strength; equal strengths fall back to name order.
    pub fn from_strengths(strengths: &[f64], names: &[String]) -> Self {
        let mut order: Vec<TeamId> = (0..strengths.len()).map(TeamId).collect();
        order.sort_by(|a, b| {
            strengths[b.0]
                .partial_cmp(&strengths[a.0])
                .unwrap_or(Ordering::Equal)
                .then_with(|| names[a.0].cmp(&names[b.0]))
        });
        Self::from_order(order)
    }

    /// `order[0]` is rank 1.
    pub fn from_order(order: Vec<TeamId>) -> Self {
        let mut rank_of = vec![0; order.len()];
        for (i, t) in order.iter().enumerate() {
            rank_of[t.0] = i + 1;
        }
        Self { order, rank_of }
    }

    pub fn rank(&self, team: TeamId) -> usize {
        self.rank_of[team.0]
    }

    /// Team at 1-based `rank`.
    pub fn team(&self, rank: usize) -> TeamId {
        self.order[rank - 1]
    }

    pub fn order(&self) -> &[TeamId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

pub fn rank_teams(model: &StrengthModel) -> Vec<RankedTeam> {
    let ranking = Ranking::from_strengths(&model.theta_hat, &model.team_names);
    ranking
        .order()
        .iter()
        .enumerate()
        .map(|(i, &t)| RankedTeam {
            team: t,
            name: model.team_names[t.0].clone(),
            strength: model.theta_hat[t.0],
            rank: i + 1,
        })
        .collect()
}
