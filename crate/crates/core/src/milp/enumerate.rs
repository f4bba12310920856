//! Solution pool: every optimal binary pattern.
//!
//! After one branch-and-bound solve fixes the optimum `z`, a single
//! depth-first tree keeps every node whose relaxation can still reach `z`
//! and branches until the binaries are fixed. Integral relaxations on the
//! way are recorded. Once `z` binaries are fixed at one the rest are fixed
//! at zero, so each optimal pattern ends one path.
//!
//! [`no_good_cut`] excludes a single pattern and is kept for callers that
//! extend a model by hand.

use std::collections::BTreeSet;

use super::bnb::{branching_candidate, ceil_bound, solve_bnb, BnbConfig, BnbStats, Relaxer};
use super::{MilpError, MilpModel};
use crate::lp::{Constraint, Relation};
use crate::model::MatchSolution;
use crate::scalar::{approx_eq, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimaSet<S> {
    pub objective: usize,
    /// Distinct in their binary pattern, in discovery order.
    pub solutions: Vec<MatchSolution<S>>,
    /// `true` when no further optimum exists.
    pub complete: bool,
    /// Search statistics: the initial solve, then the enumeration tree.
    pub solves: Vec<BnbStats>,
}

impl<S> OptimaSet<S> {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn total_nodes(&self) -> usize {
        self.solves.iter().map(|s| s.nodes).sum()
    }
}

/// `Σ_{y*=0} y − Σ_{y*=1} y ≥ 1 − |{y* = 1}|`: excludes exactly the pattern of `x`.
pub fn no_good_cut<S: Scalar>(model: &MilpModel<S>, x: &MatchSolution<S>) -> Constraint<S> {
    let mut terms = Vec::with_capacity(model.num_binaries());
    let mut ones = 0i64;
    for (k, &j) in model.binary_keys().zip(&model.binaries) {
        if x.y.get(k).copied().unwrap_or(false) {
            ones += 1;
            terms.push((j, -S::one()));
        } else {
            terms.push((j, S::one()));
        }
    }
    Constraint {
        name: format!("nogood[{}]", x.pattern_string()),
        terms,
        relation: Relation::Ge,
        rhs: S::from_int(1 - ones),
    }
}

/// Collects optimal patterns until none is left or `cap` are held.
pub fn enumerate_optima<S: Scalar>(
    model: &MilpModel<S>,
    cap: usize,
    config: &BnbConfig,
) -> Result<OptimaSet<S>, MilpError> {
    if cap == 0 {
        return Err(MilpError::ZeroCap);
    }
    let first = solve_bnb(model, config)?;
    let mut solves = vec![first.stats.clone()];
    let Some(x) = first.solution().cloned() else {
        return Err(MilpError::Infeasible);
    };
    let objective = x.objective;
    let unit_costs = model.binaries.iter().all(|&j| model.lp.objective[j] == S::one());
    let mut relax = Relaxer::new(model, config.node_limit);
    let mut stats = BnbStats::default();
    let mut seen = BTreeSet::from([x.pattern_string()]);
    let mut solutions = vec![x];
    let mut complete = true;
    let mut stack: Vec<Vec<(usize, bool)>> = vec![Vec::new()];
    'search: while let Some(fixings) = stack.pop() {
        let Some(lp) = relax.solve(&fixings, &mut stats)? else {
            continue;
        };
        if ceil_bound(&lp.objective) > objective {
            continue;
        }
        stats.max_depth = stats.max_depth.max(fixings.len());
        let fractional = branching_candidate(model, &lp.x);
        if fractional.is_none() {
            let found = model.solution_from_point(&lp.x);
            if found.objective == objective && seen.insert(found.pattern_string()) {
                if solutions.len() == cap {
                    complete = false;
                    break 'search;
                }
                solutions.push(found);
            }
        }
        let mut fixed = vec![None; model.num_binaries()];
        for &(pos, up) in &fixings {
            fixed[pos] = Some(up);
        }
        let ones = fixings.iter().filter(|f| f.1).count();
        if unit_costs && ones == objective {
            if fixed.iter().any(Option::is_none) {
                let mut leaf = fixings.clone();
                leaf.extend((0..fixed.len()).filter(|&p| fixed[p].is_none()).map(|p| (p, false)));
                stack.push(leaf);
            }
            continue;
        }
        // Fractional first; otherwise a free binary at one, so the down
        // branch looks for alternatives; otherwise any free binary.
        let one = S::one();
        let pos = fractional
            .or_else(|| (0..fixed.len()).find(|&p| fixed[p].is_none() && approx_eq(&lp.x[model.binaries[p]], &one)))
            .or_else(|| (0..fixed.len()).find(|&p| fixed[p].is_none()));
        let Some(pos) = pos else { continue };
        for up in [false, true] {
            let mut child = fixings.clone();
            child.push((pos, up));
            stack.push(child);
        }
    }
    solves.push(stats);
    Ok(OptimaSet {
        objective,
        solutions,
        complete,
        solves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{build_fixed_interval_model, ObjectiveScope};
    use crate::model::{IntervalProblem, Participant};
    use crate::Rational;

    fn model(hot: &[i64], cold: &[i64]) -> MilpModel<Rational> {
        let r = Rational::from_int;
        let h = hot.iter().enumerate().map(|(k, q)| Participant::process(format!("h{}", k + 1), r(*q)));
        let c = cold.iter().enumerate().map(|(k, q)| Participant::process(format!("c{}", k + 1), r(*q)));
        let p = IntervalProblem::new(1, "t1", None, h.collect(), c.collect()).unwrap();
        build_fixed_interval_model(&p, ObjectiveScope::ProcessPairs).unwrap()
    }

    fn patterns(set: &OptimaSet<Rational>) -> Vec<String> {
        let mut v: Vec<_> = set.solutions.iter().map(|x| x.pattern_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn one_by_one() {
        let set = enumerate_optima(&model(&[100], &[100]), 10, &BnbConfig::default()).unwrap();
        assert_eq!(set.objective, 1);
        assert_eq!(set.len(), 1);
        assert!(set.complete);
    }

    #[test]
    fn symmetric_pair_has_two_optima() {
        let set = enumerate_optima(&model(&[100, 100], &[100]), 10, &BnbConfig::default()).unwrap();
        assert_eq!(set.objective, 1);
        assert_eq!(patterns(&set), vec!["01", "10"]);
        assert!(set.complete);
    }

    #[test]
    fn both_matches_required() {
        let set = enumerate_optima(&model(&[50, 50], &[100]), 10, &BnbConfig::default()).unwrap();
        assert_eq!(set.objective, 2);
        assert_eq!(patterns(&set), vec!["11"]);
    }

    #[test]
    fn cap_marks_incomplete() {
        let set = enumerate_optima(&model(&[100, 100], &[100]), 1, &BnbConfig::default()).unwrap();
        assert_eq!(set.len(), 1);
        assert!(!set.complete);
        let exact = enumerate_optima(&model(&[100, 100], &[100]), 2, &BnbConfig::default()).unwrap();
        assert!(exact.complete);
    }

    #[test]
    fn zero_cap_and_infeasible() {
        let m = model(&[100], &[100]);
        assert_eq!(enumerate_optima(&m, 0, &BnbConfig::default()), Err(MilpError::ZeroCap));
        let bad = model(&[10], &[100]);
        assert_eq!(enumerate_optima(&bad, 5, &BnbConfig::default()), Err(MilpError::Infeasible));
    }

    #[test]
    fn cut_excludes_only_its_pattern() {
        let m = model(&[100, 100], &[100]);
        let set = enumerate_optima(&m, 10, &BnbConfig::default()).unwrap();
        let cut = no_good_cut(&m, &set.solutions[0]);
        let zero = Rational::from_int(0);
        let first = crate::model::solution_point(&m, &set.solutions[0]).unwrap();
        let second = crate::model::solution_point(&m, &set.solutions[1]).unwrap();
        assert!(cut.violation(&first) > zero);
        assert!(cut.violation(&second) <= zero);
    }
}
