//! LP-based branch-and-bound over the match binaries.
//!
//! Every node re-solves the relaxation from scratch with its fixings applied
//! as variable bounds. Branching picks the most fractional binary (lowest
//! index on ties). Nodes are taken best bound first, deeper first on equal
//! bounds, then last-in first-out; the up branch (`y = 1`) is pushed last so
//! it is explored first.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{MilpError, MilpModel};
use crate::lp::{solve_parts, LpOutcome, LpSolution};
use crate::model::MatchSolution;
use crate::scalar::{approx_eq, is_zero, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BnbConfig {
    pub node_limit: usize,
    /// Only look for solutions with at most this many matches, and stop at
    /// the first one found.
    pub target: Option<usize>,
}

impl Default for BnbConfig {
    fn default() -> Self {
        Self {
            node_limit: 1_000_000,
            target: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BnbStats {
    /// Relaxations solved, root included.
    pub nodes: usize,
    pub pivots: usize,
    pub max_depth: usize,
    /// Ceiling of the root relaxation, when the root is feasible.
    pub root_bound: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BnbOutcome<S> {
    Optimal(MatchSolution<S>),
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BnbResult<S> {
    pub outcome: BnbOutcome<S>,
    pub stats: BnbStats,
}

impl<S> BnbResult<S> {
    pub fn solution(&self) -> Option<&MatchSolution<S>> {
        match &self.outcome {
            BnbOutcome::Optimal(x) => Some(x),
            BnbOutcome::Infeasible => None,
        }
    }
}

struct Node<S> {
    bound: usize,
    depth: usize,
    seq: usize,
    fixings: Vec<(usize, bool)>,
    lp: LpSolution<S>,
}

impl<S> PartialEq for Node<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S> Eq for Node<S> {}

impl<S> PartialOrd for Node<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Max-heap order: the greatest node is popped first.
impl<S> Ord for Node<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(self.seq.cmp(&other.seq))
    }
}

pub(super) fn ceil_bound<S: Scalar>(value: &S) -> usize {
    // The objective only counts binaries, so values are small and nonnegative.
    let v = if S::is_exact() {
        value.ceil()
    } else {
        (value.clone() - S::tolerance()).ceil()
    };
    v.to_f64_lossy().max(0.0) as usize
}

/// Position in `model.binaries` of the most fractional binary, if any.
pub(super) fn branching_candidate<S: Scalar>(model: &MilpModel<S>, x: &[S]) -> Option<usize> {
    let half = S::one() / S::from_int(2);
    let mut best: Option<(usize, S)> = None;
    for (pos, &j) in model.binaries.iter().enumerate() {
        let v = &x[j];
        if is_zero(v) || approx_eq(v, &S::one()) {
            continue;
        }
        let distance = (v.clone() - half.clone()).abs();
        if best.as_ref().is_none_or(|(_, d)| distance < *d) {
            best = Some((pos, distance));
        }
    }
    best.map(|(pos, _)| pos)
}

/// Solves the relaxation with some binaries fixed, counting nodes.
pub(super) struct Relaxer<'a, S> {
    model: &'a MilpModel<S>,
    variables: Vec<crate::lp::Variable<S>>,
    node_limit: usize,
}

impl<'a, S: Scalar> Relaxer<'a, S> {
    pub(super) fn new(model: &'a MilpModel<S>, node_limit: usize) -> Self {
        Self {
            model,
            variables: model.lp.variables.clone(),
            node_limit,
        }
    }

    pub(super) fn solve(
        &mut self,
        fixings: &[(usize, bool)],
        stats: &mut BnbStats,
    ) -> Result<Option<LpSolution<S>>, MilpError> {
        let model = self.model;
        for &(pos, up) in fixings {
            let j = model.binaries[pos];
            let v = if up { S::one() } else { S::zero() };
            self.variables[j].lower = Some(v.clone());
            self.variables[j].upper = Some(v);
        }
        let outcome = solve_parts(&self.variables, &model.lp.constraints, &model.lp.objective);
        for &(pos, _) in fixings {
            let j = model.binaries[pos];
            self.variables[j].lower = model.lp.variables[j].lower.clone();
            self.variables[j].upper = model.lp.variables[j].upper.clone();
        }
        stats.nodes += 1;
        if stats.nodes > self.node_limit {
            return Err(MilpError::NodeLimit(self.node_limit));
        }
        match outcome {
            LpOutcome::Optimal(sol) => {
                stats.pivots += sol.pivots;
                Ok(Some(sol))
            }
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => Err(MilpError::Unbounded),
        }
    }
}

/// Solves the model to a certified minimum number of matches.
pub fn solve_bnb<S: Scalar>(model: &MilpModel<S>, config: &BnbConfig) -> Result<BnbResult<S>, MilpError> {
    model.lp.validate()?;
    let mut stats = BnbStats::default();
    let mut relax = Relaxer::new(model, config.node_limit);
    let mut solve = |fixings: &[(usize, bool)], stats: &mut BnbStats| relax.solve(fixings, stats);

    let Some(root) = solve(&[], &mut stats)? else {
        return Ok(BnbResult {
            outcome: BnbOutcome::Infeasible,
            stats,
        });
    };
    let root_value = root.objective.clone();
    let root_bound = ceil_bound(&root.objective);
    stats.root_bound = Some(root_bound);

    // Best integer solution so far and its match count.
    let mut incumbent: Option<(usize, Vec<S>)> = None;
    let limit = |incumbent: &Option<(usize, Vec<S>)>| -> usize {
        let by_incumbent = incumbent.as_ref().map_or(usize::MAX, |(z, _)| *z);
        let by_target = config.target.map_or(usize::MAX, |t| t + 1);
        by_incumbent.min(by_target)
    };

    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let consider = |node: Node<S>, heap: &mut BinaryHeap<Node<S>>, incumbent: &mut Option<(usize, Vec<S>)>| {
        if node.bound >= limit(incumbent) {
            return;
        }
        if branching_candidate(model, &node.lp.x).is_none() {
            *incumbent = Some((node.bound, node.lp.x));
        } else {
            heap.push(node);
        }
    };
    consider(
        Node {
            bound: root_bound,
            depth: 0,
            seq,
            fixings: Vec::new(),
            lp: root,
        },
        &mut heap,
        &mut incumbent,
    );

    while let Some(node) = heap.pop() {
        if config.target.is_some() && incumbent.is_some() {
            break;
        }
        if node.bound >= limit(&incumbent) {
            continue;
        }
        let pos = branching_candidate(model, &node.lp.x).expect("queued nodes are fractional");
        for up in [false, true] {
            let mut fixings = node.fixings.clone();
            fixings.push((pos, up));
            let Some(lp) = solve(&fixings, &mut stats)? else {
                continue;
            };
            debug_assert!(
                lp.objective >= node.lp.objective.clone() - S::tolerance(),
                "child relaxation below its parent"
            );
            seq += 1;
            let depth = node.depth + 1;
            stats.max_depth = stats.max_depth.max(depth);
            consider(
                Node {
                    bound: ceil_bound(&lp.objective),
                    depth,
                    seq,
                    fixings,
                    lp,
                },
                &mut heap,
                &mut incumbent,
            );
        }
    }

    let outcome = match incumbent {
        Some((z, x)) => {
            debug_assert!(root_value <= S::from_int(z as i64) + S::tolerance(), "root bound above optimum");
            let mut sol = model.solution_from_point(&x);
            debug_assert_eq!(sol.objective, z);
            sol.objective = z;
            BnbOutcome::Optimal(sol)
        }
        None => BnbOutcome::Infeasible,
    };
    Ok(BnbResult { outcome, stats })
}
