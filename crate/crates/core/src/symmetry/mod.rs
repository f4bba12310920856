//! Permutation symmetry of equivalent streams: class detection, the direct
//! product of symmetric groups over the classes, its action on solutions,
//! orbits, canonical representatives and symmetry-breaking rows.

mod action;
mod group;
mod sbc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::{pair_allowed, pair_counted, MilpModel};
use crate::model::{HensInstance, Side};
use crate::scalar::Scalar;

pub use action::{
    apply_permutation, canonical_form, orbit, orbit_decomposition, solution_cmp, verify_group_action, ActionCheck,
    GroupActionReport, Orbit,
};
pub use group::{build_group, Permutation, SymmetryGroup, Transposition, DEFAULT_ELEMENT_BOUND};
pub use sbc::{symmetry_breaking_constraints, SbcKind, SbcSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("`{0}` belongs to more than one {1} class")]
    Overlap(String, Side),
    #[error("a {0} class sits among the {1} classes")]
    WrongSide(Side, Side),
    #[error("empty class")]
    EmptyClass,
    #[error("permutation is not an element of the group: {0}")]
    NotInGroup(String),
    #[error("dominance weight 2^{0} is not exactly representable")]
    WeightOverflow(u32),
}

/// How keys are compared when forming classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyMatch {
    #[default]
    Exact,
    /// Relative difference up to 10⁻⁹, for imported floating-point data.
    Relative,
}

impl KeyMatch {
    pub fn same<S: Scalar>(self, a: &S, b: &S) -> bool {
        match self {
            KeyMatch::Exact => a == b,
            KeyMatch::Relative => {
                let eps = S::parse_decimal("1e-9").expect("constant parses");
                let scale = if a.abs() > b.abs() { a.abs() } else { b.abs() };
                (a.clone() - b.clone()).abs() <= eps * scale
            }
        }
    }
}

/// Same-side items sharing a capacity or a load.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamClass<S> {
    pub side: Side,
    /// Sorted identifiers.
    pub members: Vec<String>,
    pub key: S,
}

impl<S> StreamClass<S> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() < 2
    }
}

fn sort_classes<S>(classes: &mut [StreamClass<S>]) {
    for c in classes.iter_mut() {
        c.members.sort();
    }
    classes.sort_by(|a, b| a.members[0].cmp(&b.members[0]));
}

/// Partition of `items` by key. Under [`KeyMatch::Relative`] an item joins
/// the first class whose first member is close enough.
pub fn equivalence_classes<S: Scalar>(side: Side, items: &[(String, S)], mode: KeyMatch) -> Vec<StreamClass<S>> {
    let mut sorted: Vec<&(String, S)> = items.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut classes: Vec<StreamClass<S>> = Vec::new();
    for (id, key) in sorted {
        match classes.iter_mut().find(|c| mode.same(&c.key, key)) {
            Some(c) => c.members.push(id.clone()),
            None => classes.push(StreamClass {
                side,
                members: vec![id.clone()],
                key: key.clone(),
            }),
        }
    }
    sort_classes(&mut classes);
    classes
}

/// Classes of process streams by flow-rate heat capacity.
pub fn fcp_classes<S: Scalar>(instance: &HensInstance<S>, side: Side, mode: KeyMatch) -> Vec<StreamClass<S>> {
    let items: Vec<(String, S)> = instance.streams_on(side).map(|s| (s.id.clone(), s.fcp.clone())).collect();
    equivalence_classes(side, &items, mode)
}

/// Classes of model items by interval load. Two items fall together when
/// their load and entering-residual profiles agree and they are permitted
/// and counted against the same opposite items, so every swap inside a class
/// maps the model onto itself. The key is the total load.
pub fn model_classes<S: Scalar>(model: &MilpModel<S>, mode: KeyMatch) -> (Vec<StreamClass<S>>, Vec<StreamClass<S>>) {
    let scope = model.objective_scope;
    let side_classes = |side: Side| {
        let items = model.items(side);
        let opposite = model.items(match side {
            Side::Hot => Side::Cold,
            Side::Cold => Side::Hot,
        });
        let pattern = |role| -> Vec<(bool, bool)> {
            opposite
                .iter()
                .map(|o| {
                    let (h, c) = match side {
                        Side::Hot => (role, o.role),
                        Side::Cold => (o.role, role),
                    };
                    (pair_allowed(h, c), pair_counted(scope, h, c))
                })
                .collect()
        };
        let mut order: Vec<usize> = (0..items.len()).collect();
        order.sort_by(|&a, &b| items[a].id.cmp(&items[b].id));
        let mut classes: Vec<(usize, StreamClass<S>)> = Vec::new();
        for i in order {
            let item = &items[i];
            let joins = classes.iter_mut().find(|(rep, _)| {
                let r = &items[*rep];
                pattern(r.role) == pattern(item.role)
                    && r.loads.iter().zip(&item.loads).all(|(a, b)| mode.same(a, b))
                    && r.entering.iter().zip(&item.entering).all(|(a, b)| mode.same(a, b))
            });
            match joins {
                Some((_, c)) => c.members.push(item.id.clone()),
                None => {
                    let total = item.loads.iter().fold(S::zero(), |a, v| a + v.clone());
                    classes.push((
                        i,
                        StreamClass {
                            side,
                            members: vec![item.id.clone()],
                            key: total,
                        },
                    ));
                }
            }
        }
        let mut classes: Vec<StreamClass<S>> = classes.into_iter().map(|(_, c)| c).collect();
        sort_classes(&mut classes);
        classes
    };
    (side_classes(Side::Hot), side_classes(Side::Cold))
}

/// Group of a model: [`model_classes`] fed to [`build_group`].
pub fn model_group<S: Scalar>(model: &MilpModel<S>, mode: KeyMatch) -> SymmetryGroup<S> {
    let (hot, cold) = model_classes(model, mode);
    build_group(hot, cold).expect("model classes partition their sides")
}
