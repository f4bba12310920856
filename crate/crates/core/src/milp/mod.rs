//! Minimum-matches transshipment MILP: model construction, branch-and-bound,
//! solution-pool enumeration and configuration counting.

mod bnb;
mod build;
mod count;
mod enumerate;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{Constraint, LinearProgram, LpError};
use crate::model::{MatchIndex, MatchSolution, ModelError, Role, Side};
use crate::scalar::{is_zero, Scalar};

pub use bnb::{solve_bnb, BnbConfig, BnbOutcome, BnbResult, BnbStats};
pub use build::{build_fixed_interval_model, build_full_model, build_full_model_from_intervals, instance_intervals};
pub use count::{count_configurations, CountError};
pub use enumerate::{enumerate_optima, no_good_cut, OptimaSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MilpError {
    #[error("invalid model data: {0}")]
    Model(#[from] ModelError),
    #[error("utility `{0}` has no duty; run the minimum-utility stage first")]
    MissingDuty(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("relaxation is unbounded")]
    Unbounded,
    #[error("model is infeasible")]
    Infeasible,
    #[error("node limit of {0} reached")]
    NodeLimit(usize),
    #[error("enumeration cap must be at least 1")]
    ZeroCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelScope {
    /// One interval, one binary per pair and interval.
    FixedInterval,
    /// All intervals, one binary per pair.
    Full,
}

/// Which matches the objective counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveScope {
    /// Process-to-process matches only.
    ProcessPairs,
    /// Every permitted match, utilities included.
    AllPairs,
}

impl ObjectiveScope {
    pub fn default_for(scope: ModelScope) -> Self {
        match scope {
            ModelScope::FixedInterval => ObjectiveScope::ProcessPairs,
            ModelScope::Full => ObjectiveScope::AllPairs,
        }
    }
}

/// Hot utilities never serve cold utilities.
pub fn pair_allowed(hot: Role, cold: Role) -> bool {
    !(hot == Role::Utility && cold == Role::Utility)
}

pub fn pair_counted(scope: ObjectiveScope, hot: Role, cold: Role) -> bool {
    pair_allowed(hot, cold)
        && match scope {
            ObjectiveScope::ProcessPairs => hot == Role::Process && cold == Role::Process,
            ObjectiveScope::AllPairs => hot != Role::Residual && cold != Role::Residual,
        }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    /// Binary match existence `y`.
    Match(MatchIndex),
    /// Heat exchanged `q` inside one interval.
    Heat(MatchIndex),
    /// Residual leaving an interval, per hot item.
    Residual { hot: String, interval: usize },
    /// Total heat of a pair across intervals.
    PairTotal { hot: String, cold: String },
}

/// A hot or cold item of a model with its per-interval data.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelItem<S> {
    pub id: String,
    pub side: Side,
    pub role: Role,
    /// Load per model interval.
    pub loads: Vec<S>,
    /// Fixed residual entering each model interval from outside the model.
    pub entering: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel<S> {
    pub lp: LinearProgram<S>,
    /// Parallel to `lp.variables`.
    pub kinds: Vec<VarKind>,
    /// LP indices of the binaries, in [`MatchIndex`] order.
    pub binaries: Vec<usize>,
    /// Big-M bound per counted pair.
    pub big_m: BTreeMap<MatchIndex, S>,
    pub scope: ModelScope,
    pub objective_scope: ObjectiveScope,
    pub hot: Vec<ModelItem<S>>,
    pub cold: Vec<ModelItem<S>>,
    /// Interval indices covered by the model, hottest first.
    pub intervals: Vec<usize>,
    /// Number of rows belonging to the base formulation; later rows are cuts.
    pub base_rows: usize,
    lookup: HashMap<VarKind, usize>,
}

impl<S: Scalar> MilpModel<S> {
    pub(crate) fn new(scope: ModelScope, objective_scope: ObjectiveScope) -> Self {
        Self {
            lp: LinearProgram::new(),
            kinds: Vec::new(),
            binaries: Vec::new(),
            big_m: BTreeMap::new(),
            scope,
            objective_scope,
            hot: Vec::new(),
            cold: Vec::new(),
            intervals: Vec::new(),
            base_rows: 0,
            lookup: HashMap::new(),
        }
    }

    pub(crate) fn add_var(&mut self, kind: VarKind, lower: Option<S>, upper: Option<S>, cost: S) -> usize {
        let name = match &kind {
            VarKind::Match(k) => format!("y[{k}]"),
            VarKind::Heat(k) => format!("q[{k}]"),
            VarKind::Residual { hot, interval } => format!("R[{hot}@{interval}]"),
            VarKind::PairTotal { hot, cold } => format!("Q[{hot}-{cold}]"),
        };
        let j = self.lp.add_var(name, lower, upper, cost);
        if matches!(kind, VarKind::Match(_)) {
            self.binaries.push(j);
        }
        self.lookup.insert(kind.clone(), j);
        self.kinds.push(kind);
        j
    }

    pub(crate) fn finish(&mut self) {
        let kinds = &self.kinds;
        self.binaries.sort_by(|a, b| kinds[*a].cmp(&kinds[*b]));
        self.base_rows = self.lp.constraints.len();
    }

    pub fn var(&self, kind: &VarKind) -> Option<usize> {
        self.lookup.get(kind).copied()
    }

    pub fn binary_index(&self, k: &MatchIndex) -> Option<usize> {
        self.var(&VarKind::Match(k.clone()))
    }

    pub fn binary_keys(&self) -> impl Iterator<Item = &MatchIndex> {
        self.binaries.iter().map(move |&j| match &self.kinds[j] {
            VarKind::Match(k) => k,
            _ => unreachable!("binaries only hold match variables"),
        })
    }

    pub fn num_binaries(&self) -> usize {
        self.binaries.len()
    }

    pub fn item(&self, side: Side, id: &str) -> Option<&ModelItem<S>> {
        let items = match side {
            Side::Hot => &self.hot,
            Side::Cold => &self.cold,
        };
        items.iter().find(|i| i.id == id)
    }

    pub fn items(&self, side: Side) -> &[ModelItem<S>] {
        match side {
            Side::Hot => &self.hot,
            Side::Cold => &self.cold,
        }
    }

    /// Copy of the model with extra rows appended.
    pub fn with_constraints(&self, rows: impl IntoIterator<Item = Constraint<S>>) -> Self {
        let mut m = self.clone();
        m.lp.constraints.extend(rows);
        m
    }

    /// The cut rows added on top of the base formulation.
    pub fn extra_rows(&self) -> &[Constraint<S>] {
        &self.lp.constraints[self.base_rows..]
    }

    /// Reads a solution off an LP point with integral binaries.
    pub fn solution_from_point(&self, x: &[S]) -> MatchSolution<S> {
        let half = S::one() / S::from_int(2);
        let mut sol = MatchSolution {
            y: BTreeMap::new(),
            q: BTreeMap::new(),
            residuals: BTreeMap::new(),
            objective: 0,
        };
        for (j, kind) in self.kinds.iter().enumerate() {
            match kind {
                VarKind::Match(k) => {
                    let on = x[j] > half;
                    sol.objective += on as usize;
                    sol.y.insert(k.clone(), on);
                }
                VarKind::Heat(k) if !is_zero(&x[j]) => {
                    sol.q.insert(k.clone(), x[j].clone());
                }
                VarKind::Residual { hot, interval } if !is_zero(&x[j]) => {
                    sol.residuals.insert((hot.clone(), *interval), x[j].clone());
                }
                _ => {}
            }
        }
        sol
    }

    /// Change of total residual across each model interval in `x`.
    pub fn solution_delta_r(&self, x: &MatchSolution<S>) -> Vec<S> {
        self.intervals
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let leaving = self
                    .hot
                    .iter()
                    .filter_map(|h| x.residuals.get(&(h.id.clone(), t)))
                    .fold(S::zero(), |a, v| a + v.clone());
                let entering = match (self.scope, k) {
                    (ModelScope::FixedInterval, _) => self
                        .hot
                        .iter()
                        .fold(S::zero(), |a, h| a + h.entering[k].clone()),
                    (ModelScope::Full, 0) => S::zero(),
                    (ModelScope::Full, _) => {
                        let prev = self.intervals[k - 1];
                        self.hot
                            .iter()
                            .filter_map(|h| x.residuals.get(&(h.id.clone(), prev)))
                            .fold(S::zero(), |a, v| a + v.clone())
                    }
                };
                leaving - entering
            })
            .collect()
    }
}
