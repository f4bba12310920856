use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;

use super::{StreamClass, SymmetryError};
use crate::model::Side;

/// Largest group whose elements are listed one by one.
pub const DEFAULT_ELEMENT_BOUND: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Transposition {
    pub side: Side,
    pub a: String,
    pub b: String,
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})", self.a, self.b)
    }
}

/// Relabelling of hot and cold identifiers. Fixed points are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Permutation {
    pub hot: BTreeMap<String, String>,
    pub cold: BTreeMap<String, String>,
}

impl Permutation {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_maps(hot: BTreeMap<String, String>, cold: BTreeMap<String, String>) -> Self {
        let strip = |m: BTreeMap<String, String>| m.into_iter().filter(|(a, b)| a != b).collect();
        Self {
            hot: strip(hot),
            cold: strip(cold),
        }
    }

    pub fn transposition(t: &Transposition) -> Self {
        let pair: BTreeMap<String, String> = [(t.a.clone(), t.b.clone()), (t.b.clone(), t.a.clone())].into();
        match t.side {
            Side::Hot => Self::from_maps(pair, BTreeMap::new()),
            Side::Cold => Self::from_maps(BTreeMap::new(), pair),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.hot.is_empty() && self.cold.is_empty()
    }

    pub fn map<'a>(&'a self, side: Side, id: &'a str) -> &'a str {
        let m = match side {
            Side::Hot => &self.hot,
            Side::Cold => &self.cold,
        };
        m.get(id).map_or(id, String::as_str)
    }

    /// `self ∘ other`: apply `other`, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        let side = |a: &BTreeMap<String, String>, b: &BTreeMap<String, String>, s: Side| {
            let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
            keys.into_iter()
                .map(|k| {
                    let mid = other.map(s, k);
                    (k.clone(), self.map(s, mid).to_string())
                })
                .collect::<BTreeMap<_, _>>()
        };
        Self::from_maps(side(&self.hot, &other.hot, Side::Hot), side(&self.cold, &other.cold, Side::Cold))
    }

    pub fn inverse(&self) -> Self {
        let inv = |m: &BTreeMap<String, String>| m.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        Self::from_maps(inv(&self.hot), inv(&self.cold))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("id");
        }
        let parts: Vec<String> = self
            .hot
            .iter()
            .chain(self.cold.iter())
            .map(|(a, b)| format!("{a}->{b}"))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Direct product of the symmetric groups of the classes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryGroup<S> {
    pub hot_classes: Vec<StreamClass<S>>,
    pub cold_classes: Vec<StreamClass<S>>,
    /// Adjacent transpositions inside each class.
    pub generators: Vec<Transposition>,
    pub order: BigUint,
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::from(1u32), |acc, k| acc * k)
}

/// Every arrangement of `0..n`, lexicographic.
fn arrangements(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

pub fn build_group<S>(hot_classes: Vec<StreamClass<S>>, cold_classes: Vec<StreamClass<S>>) -> Result<SymmetryGroup<S>, SymmetryError> {
    let mut generators = Vec::new();
    let mut order = BigUint::from(1u32);
    for (side, classes) in [(Side::Hot, &hot_classes), (Side::Cold, &cold_classes)] {
        let mut seen = BTreeSet::new();
        for class in classes {
            if class.side != side {
                return Err(SymmetryError::WrongSide(class.side, side));
            }
            if class.members.is_empty() {
                return Err(SymmetryError::EmptyClass);
            }
            for m in &class.members {
                if !seen.insert(m.as_str()) {
                    return Err(SymmetryError::Overlap(m.clone(), side));
                }
            }
            for pair in class.members.windows(2) {
                generators.push(Transposition {
                    side,
                    a: pair[0].clone(),
                    b: pair[1].clone(),
                });
            }
            order *= factorial(class.members.len());
        }
    }
    Ok(SymmetryGroup {
        hot_classes,
        cold_classes,
        generators,
        order,
    })
}

impl<S> SymmetryGroup<S> {
    pub fn classes(&self, side: Side) -> &[StreamClass<S>] {
        match side {
            Side::Hot => &self.hot_classes,
            Side::Cold => &self.cold_classes,
        }
    }

    pub fn nontrivial_classes(&self, side: Side) -> impl Iterator<Item = &StreamClass<S>> {
        self.classes(side).iter().filter(|c| !c.is_trivial())
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn class_of(&self, side: Side, id: &str) -> Option<usize> {
        self.classes(side).iter().position(|c| c.members.iter().any(|m| m == id))
    }

    pub fn generator(&self, k: usize) -> Permutation {
        Permutation::transposition(&self.generators[k])
    }

    /// Whether `g` only permutes identifiers within their own classes.
    pub fn contains(&self, g: &Permutation) -> bool {
        for (side, map) in [(Side::Hot, &g.hot), (Side::Cold, &g.cold)] {
            let mut images = BTreeSet::new();
            for (a, b) in map {
                match (self.class_of(side, a), self.class_of(side, b)) {
                    (Some(x), Some(y)) if x == y => {}
                    _ => return false,
                }
                if !images.insert(b) {
                    return false;
                }
            }
            // Moved points must be exactly the images of moved points.
            if map.keys().collect::<BTreeSet<_>>() != images {
                return false;
            }
        }
        true
    }

    /// All elements, or `None` when the order exceeds `bound`.
    pub fn elements(&self, bound: u64) -> Option<Vec<Permutation>> {
        if self.order > BigUint::from(bound) {
            return None;
        }
        Some(product_elements(&self.hot_classes, &self.cold_classes))
    }

    /// Elements moving only one side, or `None` when there are more than `bound`.
    pub(crate) fn side_elements(&self, side: Side, bound: u64) -> Option<Vec<Permutation>> {
        let classes = self.classes(side);
        let order = classes.iter().fold(BigUint::from(1u32), |acc, c| acc * factorial(c.len()));
        if order > BigUint::from(bound) {
            return None;
        }
        Some(match side {
            Side::Hot => product_elements(classes, &[]),
            Side::Cold => product_elements(&[], classes),
        })
    }
}

fn product_elements<S>(hot: &[StreamClass<S>], cold: &[StreamClass<S>]) -> Vec<Permutation> {
    let mut out = vec![Permutation::identity()];
    for (side, classes) in [(Side::Hot, hot), (Side::Cold, cold)] {
        for class in classes.iter().filter(|c| !c.is_trivial()) {
            let moves: Vec<Vec<(String, String)>> = arrangements(class.len())
                .into_iter()
                .map(|arr| {
                    class
                        .members
                        .iter()
                        .zip(arr)
                        .map(|(m, k)| (m.clone(), class.members[k].clone()))
                        .filter(|(a, b)| a != b)
                        .collect()
                })
                .collect();
            let mut next = Vec::with_capacity(out.len() * moves.len());
            for g in &out {
                for mv in &moves {
                    let mut h = g.clone();
                    match side {
                        Side::Hot => h.hot.extend(mv.iter().cloned()),
                        Side::Cold => h.cold.extend(mv.iter().cloned()),
                    }
                    next.push(h);
                }
            }
            out = next;
        }
    }
    out
}
