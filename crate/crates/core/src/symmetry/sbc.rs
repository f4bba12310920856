use std::collections::HashMap;

use serde::Serialize;

use super::group::{Permutation, SymmetryGroup};
use super::SymmetryError;
use crate::lp::{Constraint, Relation};
use crate::milp::MilpModel;
use crate::model::{MatchIndex, Side};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SbcKind {
    /// Trivial group, nothing to break.
    None,
    /// Consecutive members of each class ordered by their match vectors;
    /// used when only one side has nontrivial classes.
    Dominance,
    /// One row per group element: the pattern is the lexicographic minimum
    /// of its orbit.
    LexLeader,
    /// Dominance rows on both sides, for groups too large to list.
    DoubleLex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SbcSet<S> {
    pub kind: SbcKind,
    pub rows: Vec<Constraint<S>>,
    /// Exactly the lexicographically smallest pattern of every orbit survives.
    /// Double-lex rows keep at least one, possibly more.
    pub exact: bool,
}

fn weight<S: Scalar>(k: usize) -> Result<S, SymmetryError> {
    S::pow2(k as u32).ok_or(SymmetryError::WeightOverflow(k as u32))
}

/// `Σ w·y_a ≤ Σ w·y_b` over aligned match vectors, earliest entry heaviest.
fn dominance_row<S: Scalar>(name: String, model: &MilpModel<S>, a: &[MatchIndex], b: &[MatchIndex]) -> Result<Constraint<S>, SymmetryError> {
    let n = a.len();
    let mut terms = Vec::with_capacity(2 * n);
    for (r, (ka, kb)) in a.iter().zip(b).enumerate() {
        let w: S = weight(n - 1 - r)?;
        if let (Some(ja), Some(jb)) = (model.binary_index(ka), model.binary_index(kb)) {
            terms.push((ja, w.clone()));
            terms.push((jb, -w));
        }
    }
    Ok(Constraint {
        name,
        terms,
        relation: Relation::Le,
        rhs: S::zero(),
    })
}

fn dominance_rows<S: Scalar, K>(group: &SymmetryGroup<K>, model: &MilpModel<S>, side: Side) -> Result<Vec<Constraint<S>>, SymmetryError> {
    let keys: Vec<&MatchIndex> = model.binary_keys().collect();
    let vector = |id: &str| -> Vec<MatchIndex> {
        keys.iter()
            .filter(|k| match side {
                Side::Hot => k.hot == id,
                Side::Cold => k.cold == id,
            })
            .map(|k| (*k).clone())
            .collect()
    };
    let aligned = |from: &str, to: &str| -> Vec<MatchIndex> {
        vector(from)
            .into_iter()
            .map(|k| match side {
                Side::Hot => MatchIndex::new(to, k.cold, k.interval),
                Side::Cold => MatchIndex::new(k.hot, to, k.interval),
            })
            .collect()
    };
    let mut rows = Vec::new();
    for class in group.nontrivial_classes(side) {
        for pair in class.members.windows(2) {
            let a = vector(&pair[0]);
            let b = aligned(&pair[0], &pair[1]);
            rows.push(dominance_row(format!("sbc[{}<={}]", pair[0], pair[1]), model, &a, &b)?);
        }
    }
    Ok(rows)
}

fn lex_leader_rows<S: Scalar>(model: &MilpModel<S>, elements: &[Permutation]) -> Result<Vec<Constraint<S>>, SymmetryError> {
    let keys: Vec<&MatchIndex> = model.binary_keys().collect();
    let n = keys.len();
    let position: HashMap<&MatchIndex, usize> = keys.iter().enumerate().map(|(p, k)| (*k, p)).collect();
    let weights = (0..n).map(|p| weight::<S>(n - 1 - p)).collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for (e, g) in elements.iter().enumerate() {
        if g.is_identity() {
            continue;
        }
        let mut coef = vec![S::zero(); n];
        for (p, k) in keys.iter().enumerate() {
            let image = MatchIndex::new(g.map(Side::Hot, &k.hot), g.map(Side::Cold, &k.cold), k.interval);
            let Some(&q) = position.get(&image) else {
                continue;
            };
            coef[p] = coef[p].clone() + weights[p].clone();
            coef[q] = coef[q].clone() - weights[p].clone();
        }
        let terms: Vec<(usize, S)> = coef
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(p, c)| (model.binaries[p], c))
            .collect();
        if !terms.is_empty() {
            rows.push(Constraint {
                name: format!("sbc[lex{e}]"),
                terms,
                relation: Relation::Le,
                rhs: S::zero(),
            });
        }
    }
    Ok(rows)
}

/// Rows that keep the lexicographically smallest binary pattern of every
/// orbit (index order, 0 before 1). `group` must be a symmetry of `model`.
pub fn symmetry_breaking_constraints<S: Scalar, K>(
    group: &SymmetryGroup<K>,
    model: &MilpModel<S>,
    element_bound: u64,
) -> Result<SbcSet<S>, SymmetryError> {
    let hot = group.nontrivial_classes(Side::Hot).count() > 0;
    let cold = group.nontrivial_classes(Side::Cold).count() > 0;
    let set = match (hot, cold) {
        (false, false) => SbcSet {
            kind: SbcKind::None,
            rows: Vec::new(),
            exact: true,
        },
        (true, false) | (false, true) => SbcSet {
            kind: SbcKind::Dominance,
            rows: dominance_rows(group, model, if hot { Side::Hot } else { Side::Cold })?,
            exact: true,
        },
        (true, true) => match group.elements(element_bound) {
            Some(elements) => SbcSet {
                kind: SbcKind::LexLeader,
                rows: lex_leader_rows(model, &elements)?,
                exact: true,
            },
            None => {
                let mut rows = dominance_rows(group, model, Side::Hot)?;
                rows.extend(dominance_rows(group, model, Side::Cold)?);
                SbcSet {
                    kind: SbcKind::DoubleLex,
                    rows,
                    exact: false,
                }
            }
        },
    };
    Ok(set)
}
