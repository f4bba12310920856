use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::group::{Permutation, SymmetryGroup, DEFAULT_ELEMENT_BOUND};
use super::SymmetryError;
use crate::milp::MilpModel;
use crate::model::{solution_point, verify_solution, MatchSolution, Side};
use crate::scalar::{approx_eq, Scalar};

/// Relabels `x` by `g`, which must belong to `group`.
pub fn apply_permutation<S: Scalar, K>(
    x: &MatchSolution<S>,
    g: &Permutation,
    group: &SymmetryGroup<K>,
) -> Result<MatchSolution<S>, SymmetryError> {
    if !group.contains(g) {
        return Err(SymmetryError::NotInGroup(g.to_string()));
    }
    Ok(x.relabel(&g.hot, &g.cold))
}

fn value_cmp<S: Scalar>(a: &S, b: &S) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Lexicographic comparison of two maps read as functions that are zero
/// outside their keys.
fn dense_cmp<K: Ord, S: Scalar>(a: &BTreeMap<K, S>, b: &BTreeMap<K, S>) -> Ordering {
    let keys: BTreeSet<&K> = a.keys().chain(b.keys()).collect();
    let zero = S::zero();
    for k in keys {
        let o = value_cmp(a.get(k).unwrap_or(&zero), b.get(k).unwrap_or(&zero));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Total order on solutions: the y vector in index order (0 before 1), then
/// heat loads, then residuals, each read densely in index order.
pub fn solution_cmp<S: Scalar>(a: &MatchSolution<S>, b: &MatchSolution<S>) -> Ordering {
    a.y.values()
        .cmp(b.y.values())
        .then_with(|| a.y.keys().cmp(b.y.keys()))
        .then_with(|| dense_cmp(&a.q, &b.q))
        .then_with(|| dense_cmp(&a.residuals, &b.residuals))
}

/// Everything `x` says about hot item `h`, with `h` stripped from the keys.
type Row<S> = (Vec<bool>, BTreeMap<(String, Option<usize>), S>, BTreeMap<usize, S>);

fn hot_row<S: Scalar>(x: &MatchSolution<S>, h: &str) -> Row<S> {
    let y = x.y.iter().filter(|(k, _)| k.hot == h).map(|(_, v)| *v).collect();
    let q = x
        .q
        .iter()
        .filter(|(k, _)| k.hot == h)
        .map(|(k, v)| ((k.cold.clone(), k.interval), v.clone()))
        .collect();
    let r = x
        .residuals
        .iter()
        .filter(|((id, _), _)| id == h)
        .map(|((_, t), v)| (*t, v.clone()))
        .collect();
    (y, q, r)
}

fn row_cmp<S: Scalar>(a: &Row<S>, b: &Row<S>) -> Ordering {
    a.0.cmp(&b.0)
        .then_with(|| dense_cmp(&a.1, &b.1))
        .then_with(|| dense_cmp(&a.2, &b.2))
}

/// Sorts the rows of every hot class ascending.
fn sort_hot_rows<S: Scalar, K>(x: &MatchSolution<S>, group: &SymmetryGroup<K>) -> MatchSolution<S> {
    let mut map = BTreeMap::new();
    for class in group.nontrivial_classes(Side::Hot) {
        let mut rows: Vec<(&String, Row<S>)> = class.members.iter().map(|h| (h, hot_row(x, h))).collect();
        rows.sort_by(|a, b| row_cmp(&a.1, &b.1));
        for ((from, _), to) in rows.into_iter().zip(&class.members) {
            map.insert(from.clone(), to.clone());
        }
    }
    x.relabel(&map, &BTreeMap::new())
}

/// Minimal orbit member under [`solution_cmp`]. Groups up to the default
/// element bound are searched exhaustively. Larger ones combine every cold
/// arrangement with hot rows sorted inside their classes; when the cold side
/// alone is too large only the identity arrangement is tried, and the result
/// is a representative rather than a certified minimum.
pub fn canonical_form<S: Scalar, K>(x: &MatchSolution<S>, group: &SymmetryGroup<K>) -> MatchSolution<S> {
    let candidates: Vec<MatchSolution<S>> = match group.elements(DEFAULT_ELEMENT_BOUND) {
        Some(elements) => elements.iter().map(|g| x.relabel(&g.hot, &g.cold)).collect(),
        None => {
            let cold = group
                .side_elements(Side::Cold, DEFAULT_ELEMENT_BOUND)
                .unwrap_or_else(|| vec![Permutation::identity()]);
            cold.iter()
                .map(|g| sort_hot_rows(&x.relabel(&BTreeMap::new(), &g.cold), group))
                .collect()
        }
    };
    candidates
        .into_iter()
        .min_by(solution_cmp)
        .expect("the identity is always a candidate")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit<S> {
    pub members: Vec<MatchSolution<S>>,
    /// The cap stopped the closure early.
    pub partial: bool,
}

/// Closure of `{x}` under the generators, breadth first, up to `cap` members.
pub fn orbit<S: Scalar, K>(x: &MatchSolution<S>, group: &SymmetryGroup<K>, cap: usize) -> Orbit<S> {
    let generators: Vec<Permutation> = (0..group.generators.len()).map(|k| group.generator(k)).collect();
    let mut seen: HashSet<String> = [x.full_key()].into();
    let mut members = vec![x.clone()];
    let mut next = 0;
    while next < members.len() {
        for g in &generators {
            let image = members[next].relabel(&g.hot, &g.cold);
            if seen.insert(image.full_key()) {
                if members.len() == cap {
                    return Orbit { members, partial: true };
                }
                members.push(image);
            }
        }
        next += 1;
    }
    Orbit {
        members,
        partial: false,
    }
}

/// Groups solutions whose binary patterns lie in one orbit; indices keep
/// their input order and groups are ordered by first member.
pub fn orbit_decomposition<S: Scalar, K>(solutions: &[MatchSolution<S>], group: &SymmetryGroup<K>) -> Vec<Vec<usize>> {
    let mut by_pattern: BTreeMap<String, usize> = BTreeMap::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, x) in solutions.iter().enumerate() {
        let key = canonical_form(x, group).pattern_string();
        match by_pattern.get(&key) {
            Some(&k) => out[k].push(i),
            None => {
                by_pattern.insert(key, out.len());
                out.push(vec![i]);
            }
        }
    }
    out
}

/// Outcome of applying one generator to one solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionCheck {
    pub solution: usize,
    pub generator: usize,
    pub feasible: bool,
    pub same_objective: bool,
    pub same_delta_r: bool,
    /// The image's binary pattern is in the checked set.
    pub in_set: bool,
    pub violations: Vec<String>,
}

impl ActionCheck {
    pub fn passed(&self) -> bool {
        self.feasible && self.same_objective && self.same_delta_r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupActionReport {
    pub checks: Vec<ActionCheck>,
    /// Every image is feasible with equal objective and residual change.
    pub all_pass: bool,
    /// Every image lies in the set.
    pub closed: bool,
}

/// Applies every generator to every solution of `set` and re-checks the
/// image against `model` at the scalar's tolerance (zero for rationals).
pub fn verify_group_action<S: Scalar, K>(
    model: &MilpModel<S>,
    group: &SymmetryGroup<K>,
    set: &[MatchSolution<S>],
) -> GroupActionReport {
    let patterns: HashSet<String> = set.iter().map(MatchSolution::pattern_string).collect();
    let objective_of = |x: &MatchSolution<S>| solution_point(model, x).ok().map(|p| model.lp.objective_value(&p));
    let mut checks = Vec::new();
    for (i, x) in set.iter().enumerate() {
        let base_objective = objective_of(x);
        let base_delta = model.solution_delta_r(x);
        for k in 0..group.generators.len() {
            let g = group.generator(k);
            let image = x.relabel(&g.hot, &g.cold);
            let (feasible, violations) = match verify_solution(model, &image, &S::tolerance()) {
                Ok(rep) => (
                    rep.is_feasible(),
                    rep.violations
                        .iter()
                        .map(|v| format!("{} by {}", v.constraint, v.amount.to_exact_string()))
                        .collect(),
                ),
                Err(e) => (false, vec![e.to_string()]),
            };
            let image_objective = objective_of(&image);
            let same_objective = image.objective == x.objective
                && matches!((&base_objective, &image_objective), (Some(a), Some(b)) if approx_eq(a, b));
            let image_delta = model.solution_delta_r(&image);
            let same_delta_r = base_delta.iter().zip(&image_delta).all(|(a, b)| approx_eq(a, b));
            checks.push(ActionCheck {
                solution: i,
                generator: k,
                feasible,
                same_objective,
                same_delta_r,
                in_set: patterns.contains(&image.pattern_string()),
                violations,
            });
        }
    }
    GroupActionReport {
        all_pass: checks.iter().all(ActionCheck::passed),
        closed: checks.iter().all(|c| c.in_set),
        checks,
    }
}
