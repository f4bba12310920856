//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here calls the solver code under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hens_core::milp::ObjectiveScope;
use hens_core::model::{IntervalProblem, Participant, Role};
use hens_core::{Rational, Scalar};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_int(n)
}

/// Plain description of one interval problem.
#[derive(Debug, Clone)]
pub struct Case {
    /// (id, role, load, entering residual)
    pub hot: Vec<(String, Role, Rational, Rational)>,
    /// (id, role, load)
    pub cold: Vec<(String, Role, Rational)>,
    pub scope: ObjectiveScope,
}

impl Case {
    pub fn problem(&self) -> IntervalProblem<Rational> {
        let hot = self
            .hot
            .iter()
            .map(|(id, role, load, r)| Participant::new(id.clone(), *role, load.clone()).with_entering(r.clone()))
            .collect();
        let cold = self
            .cold
            .iter()
            .map(|(id, role, load)| Participant::new(id.clone(), *role, load.clone()))
            .collect();
        IntervalProblem::new(1, "t1", None, hot, cold).expect("generated data is valid")
    }

    fn allowed(h: Role, c: Role) -> bool {
        !(h == Role::Utility && c == Role::Utility)
    }

    fn counted(&self, h: Role, c: Role) -> bool {
        Self::allowed(h, c)
            && match self.scope {
                ObjectiveScope::ProcessPairs => h == Role::Process && c == Role::Process,
                ObjectiveScope::AllPairs => h != Role::Residual && c != Role::Residual,
            }
    }

    /// Counted pairs `(hot index, cold index)` in identifier order.
    pub fn binary_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (a, h) in self.hot.iter().enumerate() {
            for (b, c) in self.cold.iter().enumerate() {
                if self.counted(h.1, c.1) {
                    pairs.push((a, b));
                }
            }
        }
        pairs.sort_by(|x, y| (&self.hot[x.0].0, &self.cold[x.1].0).cmp(&(&self.hot[y.0].0, &self.cold[y.1].0)));
        pairs
    }

    /// Hall's condition for meeting every cold load exactly from the hot
    /// supplies over the usable edges.
    pub fn feasible(&self, on: &[bool]) -> bool {
        let pairs = self.binary_pairs();
        let m = self.cold.len();
        let mut edges = vec![vec![false; m]; self.hot.len()];
        for (a, h) in self.hot.iter().enumerate() {
            for (b, c) in self.cold.iter().enumerate() {
                if Self::allowed(h.1, c.1) && !self.counted(h.1, c.1) {
                    edges[a][b] = true;
                }
            }
        }
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if on[k] {
                edges[a][b] = true;
            }
        }
        for subset in 1u32..(1 << m) {
            let demand = (0..m)
                .filter(|b| subset >> b & 1 == 1)
                .fold(Rational::zero(), |acc, b| acc + self.cold[b].2.clone());
            let supply = self
                .hot
                .iter()
                .enumerate()
                .filter(|(a, _)| (0..m).any(|b| subset >> b & 1 == 1 && edges[*a][b]))
                .fold(Rational::zero(), |acc, (_, h)| acc + h.2.clone() + h.3.clone());
            if demand > supply {
                return false;
            }
        }
        true
    }

    /// Minimum match count and every minimum pattern, by brute force over
    /// patterns in order of increasing popcount. `None` when infeasible.
    pub fn exhaustive(&self) -> Option<(usize, BTreeSet<String>)> {
        let n = self.binary_pairs().len();
        if !self.feasible(&vec![true; n]) {
            return None;
        }
        for k in 0..=n {
            let mut found = BTreeSet::new();
            for bits in 0u64..(1u64 << n) {
                if bits.count_ones() as usize != k {
                    continue;
                }
                let on: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
                if self.feasible(&on) {
                    found.insert(on.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>());
                }
            }
            if !found.is_empty() {
                return Some((k, found));
            }
        }
        unreachable!("the full pattern is feasible")
    }

    /// Every pattern over the binaries, counted one by one.
    pub fn pattern_count(&self) -> usize {
        let n = self.binary_pairs().len();
        (0u64..(1u64 << n)).count()
    }
}

pub fn random_load(rng: &mut ChaCha8Rng) -> Rational {
    let den = *[1i64, 2, 3, 4].choose(rng).unwrap();
    q(rng.gen_range(1..=40), den)
}

/// Random interval with up to four hot and three cold process streams.
/// About one case in eight is left infeasible; the rest get enough supply.
pub fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let n_hot = rng.gen_range(1..=4);
    let n_cold = rng.gen_range(1..=3);
    let scope = if rng.gen_bool(0.5) {
        ObjectiveScope::ProcessPairs
    } else {
        ObjectiveScope::AllPairs
    };
    let mut hot: Vec<(String, Role, Rational, Rational)> = (0..n_hot)
        .map(|k| (format!("h{}", k + 1), Role::Process, random_load(rng), Rational::zero()))
        .collect();
    let mut cold: Vec<(String, Role, Rational)> = (0..n_cold)
        .map(|k| (format!("c{}", k + 1), Role::Process, random_load(rng)))
        .collect();
    if rng.gen_bool(0.25) {
        let k = rng.gen_range(0..n_hot);
        hot[k].3 = random_load(rng);
    }
    let supply = hot.iter().fold(Rational::zero(), |a, h| a + h.2.clone() + h.3.clone());
    let demand = cold.iter().fold(Rational::zero(), |a, c| a + c.2.clone());
    let utilities = scope == ObjectiveScope::ProcessPairs && rng.gen_bool(0.5);
    if supply < demand && !rng.gen_bool(0.125) {
        let gap = demand.clone() - supply.clone();
        if utilities {
            hot.push(("HU".into(), Role::Utility, gap, Rational::zero()));
        } else {
            let k = rng.gen_range(0..n_hot);
            hot[k].2 = hot[k].2.clone() + gap;
        }
    } else if supply > demand && utilities {
        cold.push(("CU".into(), Role::Utility, supply - demand));
    }
    Case { hot, cold, scope }
}

/// Interval whose hot and cold sides hold planted classes of equal
/// capacity; other capacities are pairwise distinct. Returns the case and
/// the planted class sizes per side.
pub fn planted_case(rng: &mut ChaCha8Rng, max_hot: usize, max_cold: usize) -> (Case, Vec<usize>, Vec<usize>) {
    let delta_t = int(rng.gen_range(5..=30));
    let mut used: BTreeSet<Rational> = BTreeSet::new();
    let mut fresh = |rng: &mut ChaCha8Rng| loop {
        let v = q(rng.gen_range(1..=60), *[1i64, 2, 5, 10].choose(rng).unwrap());
        if used.insert(v.clone()) {
            return v;
        }
    };
    let mut side = |rng: &mut ChaCha8Rng, max: usize, prefix: &str| {
        let total = rng.gen_range(2..=max);
        let mut sizes = Vec::new();
        let mut left = total;
        while left > 0 {
            let s = rng.gen_range(1..=left);
            sizes.push(s);
            left -= s;
        }
        let mut ids = Vec::new();
        let mut k = 0;
        for &s in &sizes {
            let fcp = fresh(rng);
            for _ in 0..s {
                k += 1;
                ids.push((format!("{prefix}{k}"), fcp.clone() * delta_t.clone()));
            }
        }
        (ids, sizes)
    };
    let (hot, hot_sizes) = side(rng, max_hot, "h");
    let (mut cold, cold_sizes) = side(rng, max_cold, "c");
    let supply = hot.iter().fold(Rational::zero(), |a, h| a + h.1.clone());
    let demand = cold.iter().fold(Rational::zero(), |a, c| a + c.1.clone());
    let mut hot: Vec<(String, Role, Rational, Rational)> =
        hot.into_iter().map(|(id, l)| (id, Role::Process, l, Rational::zero())).collect();
    // Close the gap with a utility so the planted classes stay intact.
    if supply < demand {
        hot.push(("HU".into(), Role::Utility, demand - supply, Rational::zero()));
    } else if supply > demand {
        cold.push(("CU".into(), supply - demand));
    }
    let cold = cold
        .into_iter()
        .map(|(id, l)| {
            let role = if id == "CU" { Role::Utility } else { Role::Process };
            (id, role, l)
        })
        .collect();
    (
        Case {
            hot,
            cold,
            scope: ObjectiveScope::ProcessPairs,
        },
        hot_sizes,
        cold_sizes,
    )
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Every arrangement of `items`.
pub fn arrangements<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in arrangements(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// Classes by (role, load, entering) per side, straight from the case data.
pub fn oracle_classes(case: &Case) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
    let mut hot: BTreeMap<(Role, Rational, Rational), Vec<String>> = BTreeMap::new();
    for h in &case.hot {
        hot.entry((h.1, h.2.clone(), h.3.clone())).or_default().push(h.0.clone());
    }
    let mut cold: BTreeMap<(Role, Rational), Vec<String>> = BTreeMap::new();
    for c in &case.cold {
        cold.entry((c.1, c.2.clone())).or_default().push(c.0.clone());
    }
    (hot.into_values().collect(), cold.into_values().collect())
}

/// All relabellings generated by permuting inside each class.
pub fn class_relabellings(classes: &[Vec<String>]) -> Vec<BTreeMap<String, String>> {
    let mut out = vec![BTreeMap::new()];
    for class in classes {
        let mut next = Vec::new();
        for base in &out {
            for arr in arrangements(class) {
                let mut m: BTreeMap<String, String> = base.clone();
                for (from, to) in class.iter().zip(arr) {
                    m.insert(from.clone(), to);
                }
                next.push(m);
            }
        }
        out = next;
    }
    out
}

/// Lexicographically smallest pattern of the orbit of `pattern` (0 < 1),
/// with patterns read over the case's binary pairs.
pub fn orbit_minimum(case: &Case, pattern: &str) -> String {
    let pairs = case.binary_pairs();
    let on: BTreeMap<(String, String), bool> = pairs
        .iter()
        .zip(pattern.chars())
        .map(|(&(a, b), ch)| ((case.hot[a].0.clone(), case.cold[b].0.clone()), ch == '1'))
        .collect();
    let (hc, cc) = oracle_classes(case);
    let mut best: Option<String> = None;
    for hm in class_relabellings(&hc) {
        for cm in class_relabellings(&cc) {
            let image: BTreeMap<(String, String), bool> = on
                .iter()
                .map(|((h, c), &v)| ((hm.get(h).unwrap_or(h).clone(), cm.get(c).unwrap_or(c).clone()), v))
                .collect();
            let s: String = image.values().map(|&b| if b { '1' } else { '0' }).collect();
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
    }
    best.unwrap()
}

/// Straight-line feasibility of a fixed-interval point, read against the
/// case data: bounds, balances, residual total, big-M and forbidden pairs.
pub fn straight_line_feasible(
    case: &Case,
    y: &BTreeMap<(String, String), bool>,
    qv: &BTreeMap<(String, String), Rational>,
    r: &BTreeMap<String, Rational>,
    objective: usize,
) -> bool {
    let zero = Rational::zero();
    let get_q = |h: &str, c: &str| qv.get(&(h.to_string(), c.to_string())).cloned().unwrap_or_else(Rational::zero);
    if qv.values().any(|v| *v < zero) || r.values().any(|v| *v < zero) {
        return false;
    }
    for h in &case.hot {
        let sent = case.cold.iter().fold(Rational::zero(), |a, c| a + get_q(&h.0, &c.0));
        let res = r.get(&h.0).cloned().unwrap_or_else(Rational::zero);
        if sent + res != h.2.clone() + h.3.clone() {
            return false;
        }
    }
    for c in &case.cold {
        let got = case.hot.iter().fold(Rational::zero(), |a, h| a + get_q(&h.0, &c.0));
        if got != c.2 {
            return false;
        }
    }
    let supply = case.hot.iter().fold(Rational::zero(), |a, h| a + h.2.clone() + h.3.clone());
    let demand = case.cold.iter().fold(Rational::zero(), |a, c| a + c.2.clone());
    let total_r = r.values().fold(Rational::zero(), |a, v| a + v.clone());
    if total_r != supply - demand {
        return false;
    }
    for h in &case.hot {
        for c in &case.cold {
            let flow = get_q(&h.0, &c.0);
            if !Case::allowed(h.1, c.1) {
                if flow != zero {
                    return false;
                }
            } else if case.counted(h.1, c.1) {
                let on = y.get(&(h.0.clone(), c.0.clone())).copied().unwrap_or(false);
                let cap = if h.2.clone() + h.3.clone() < c.2 { h.2.clone() + h.3.clone() } else { c.2.clone() };
                if flow > if on { cap } else { Rational::zero() } {
                    return false;
                }
            }
        }
    }
    objective == y.values().filter(|&&b| b).count()
}

pub fn one() -> Rational {
    Rational::one()
}
