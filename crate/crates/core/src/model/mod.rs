//! Streams, utilities, temperature intervals and match solutions.

mod intervals;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{is_negative, is_positive, Scalar};

pub use intervals::{build_intervals, IntervalLoads};
pub use verify::{solution_point, verify_solution, VerificationReport, VerifyError, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("temperature interval width must be positive, got {0}")]
    InvalidInterval(String),
    #[error("stream `{0}`: flow-rate heat capacity must be nonnegative")]
    NegativeCapacity(String),
    #[error("stream `{id}`: {side} stream needs {expected}")]
    TemperatureOrder {
        id: String,
        side: Side,
        expected: &'static str,
    },
    #[error("stream `{0}`: inlet and outlet temperatures must be given together")]
    PartialTemperatures(String),
    #[error("stream `{0}` has no temperatures; supply explicit interval loads instead")]
    MissingTemperatures(String),
    #[error("stream `{0}` spans no temperature interval")]
    SpansNoInterval(String),
    #[error("no process streams")]
    NoStreams,
    #[error("`{id}`: {what} must be nonnegative")]
    Negative { id: String, what: &'static str },
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("interval `{interval}`: unknown {side} identifier `{id}`")]
    UnknownId {
        interval: String,
        side: Side,
        id: String,
    },
    #[error("`{id}`: declared load {declared} but interval loads sum to {summed}")]
    LoadMismatch {
        id: String,
        declared: String,
        summed: String,
    },
    #[error("minimum temperature approach must be nonnegative")]
    NegativeApproach,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Hot,
    Cold,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Hot => "hot",
            Side::Cold => "cold",
        })
    }
}

/// What a participant of an interval is. Residual carriers hold heat
/// cascaded in from hotter intervals when the per-stream split is unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Process,
    Utility,
    Residual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stream<S> {
    pub id: String,
    pub side: Side,
    /// Flow-rate heat capacity, kW/K.
    pub fcp: S,
    pub t_in: Option<S>,
    pub t_out: Option<S>,
    /// Total heat load in kW, for streams known only by their load.
    pub load: Option<S>,
}

impl<S: Scalar> Stream<S> {
    pub fn new(id: impl Into<String>, side: Side, fcp: S, t_in: S, t_out: S) -> Result<Self, ModelError> {
        let stream = Self {
            id: id.into(),
            side,
            fcp,
            t_in: Some(t_in),
            t_out: Some(t_out),
            load: None,
        };
        stream.validate()?;
        Ok(stream)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if is_negative(&self.fcp) {
            return Err(ModelError::NegativeCapacity(self.id.clone()));
        }
        if let Some(load) = &self.load {
            if is_negative(load) {
                return Err(ModelError::Negative {
                    id: self.id.clone(),
                    what: "load",
                });
            }
        }
        match (&self.t_in, &self.t_out) {
            (Some(t_in), Some(t_out)) => {
                let ok = match self.side {
                    Side::Hot => t_in > t_out,
                    Side::Cold => t_in < t_out,
                };
                if !ok {
                    return Err(ModelError::TemperatureOrder {
                        id: self.id.clone(),
                        side: self.side,
                        expected: match self.side {
                            Side::Hot => "t_in > t_out",
                            Side::Cold => "t_in < t_out",
                        },
                    });
                }
                Ok(())
            }
            (None, None) => Ok(()),
            _ => Err(ModelError::PartialTemperatures(self.id.clone())),
        }
    }

    /// Declared load, or capacity times temperature span.
    pub fn total_load(&self) -> Option<S> {
        if let Some(load) = &self.load {
            return Some(load.clone());
        }
        match (&self.t_in, &self.t_out) {
            (Some(a), Some(b)) => Some(self.fcp.clone() * (a.clone() - b.clone()).abs()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Utility<S> {
    pub id: String,
    pub side: Side,
    pub temperature: Option<S>,
    /// Fixed duty in kW; `None` leaves it to the minimum-utility stage.
    pub duty: Option<S>,
    /// Cost per kW, 1 when absent.
    pub cost: Option<S>,
}

impl<S: Scalar> Utility<S> {
    pub fn new(id: impl Into<String>, side: Side, temperature: Option<S>, duty: Option<S>) -> Self {
        Self {
            id: id.into(),
            side,
            temperature,
            duty,
            cost: None,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (value, what) in [(&self.duty, "duty"), (&self.cost, "cost")] {
            if let Some(v) = value {
                if is_negative(v) {
                    return Err(ModelError::Negative {
                        id: self.id.clone(),
                        what,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn unit_cost(&self) -> S {
        self.cost.clone().unwrap_or_else(S::one)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureInterval<S> {
    /// 1-based, hottest first.
    pub index: usize,
    pub t_hi: S,
    pub t_lo: S,
}

impl<S: Scalar> TemperatureInterval<S> {
    pub fn new(index: usize, t_hi: S, t_lo: S) -> Result<Self, ModelError> {
        if !is_positive(&(t_hi.clone() - t_lo.clone())) {
            return Err(ModelError::InvalidInterval((t_hi - t_lo).to_exact_string()));
        }
        Ok(Self { index, t_hi, t_lo })
    }

    pub fn delta_t(&self) -> S {
        self.t_hi.clone() - self.t_lo.clone()
    }
}

/// Heat load of a stream across one interval: capacity times temperature change.
pub fn heat_load<S: Scalar>(fcp: &S, delta_t: &S) -> Result<S, ModelError> {
    if !is_positive(delta_t) {
        return Err(ModelError::InvalidInterval(delta_t.to_exact_string()));
    }
    Ok(fcp.clone() * delta_t.clone())
}

/// Stream instance: the full input of one synthesis problem.
#[derive(Debug, Clone, PartialEq)]
pub struct HensInstance<S> {
    pub name: Option<String>,
    pub dt_min: Option<S>,
    pub streams: Vec<Stream<S>>,
    pub utilities: Vec<Utility<S>>,
    /// Explicit per-interval loads; when present they replace interval construction.
    pub intervals: Vec<ExplicitInterval<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitInterval<S> {
    pub name: String,
    pub delta_t: Option<S>,
    pub hot: Vec<(String, S)>,
    pub cold: Vec<(String, S)>,
    /// Heat entering the interval from above, per hot identifier.
    pub entering: Vec<(String, S)>,
}

impl<S: Scalar> HensInstance<S> {
    pub fn new(streams: Vec<Stream<S>>, utilities: Vec<Utility<S>>) -> Self {
        Self {
            name: None,
            dt_min: None,
            streams,
            utilities,
            intervals: Vec::new(),
        }
    }

    pub fn stream(&self, id: &str) -> Option<&Stream<S>> {
        self.streams.iter().find(|s| s.id == id)
    }

    pub fn utility(&self, id: &str) -> Option<&Utility<S>> {
        self.utilities.iter().find(|u| u.id == id)
    }

    pub fn streams_on(&self, side: Side) -> impl Iterator<Item = &Stream<S>> {
        self.streams.iter().filter(move |s| s.side == side)
    }

    pub fn utilities_on(&self, side: Side) -> impl Iterator<Item = &Utility<S>> {
        self.utilities.iter().filter(move |u| u.side == side)
    }

    /// Side and role of a declared identifier.
    pub fn lookup(&self, id: &str) -> Option<(Side, Role)> {
        if let Some(s) = self.stream(id) {
            return Some((s.side, Role::Process));
        }
        self.utility(id).map(|u| (u.side, Role::Utility))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let mut seen = std::collections::BTreeSet::new();
        for id in self.streams.iter().map(|s| &s.id).chain(self.utilities.iter().map(|u| &u.id)) {
            if !seen.insert(id.as_str()) {
                return Err(ModelError::DuplicateId(id.clone()));
            }
        }
        if let Some(dt) = &self.dt_min {
            if is_negative(dt) {
                return Err(ModelError::NegativeApproach);
            }
        }
        for s in &self.streams {
            s.validate()?;
        }
        for u in &self.utilities {
            u.validate()?;
        }
        self.validate_explicit()
    }

    fn validate_explicit(&self) -> Result<(), ModelError> {
        if self.intervals.is_empty() {
            return Ok(());
        }
        let mut sums: BTreeMap<&str, S> = BTreeMap::new();
        for iv in &self.intervals {
            if let Some(dt) = &iv.delta_t {
                if !is_positive(dt) {
                    return Err(ModelError::InvalidInterval(dt.to_exact_string()));
                }
            }
            let lists = [
                (Side::Hot, &iv.hot, true),
                (Side::Cold, &iv.cold, true),
                (Side::Hot, &iv.entering, false),
            ];
            for (side, list, is_load) in lists {
                let mut local = std::collections::BTreeSet::new();
                for (id, value) in list {
                    match self.lookup(id) {
                        Some((s, _)) if s == side => {}
                        _ => {
                            return Err(ModelError::UnknownId {
                                interval: iv.name.clone(),
                                side,
                                id: id.clone(),
                            })
                        }
                    }
                    if !local.insert(id.as_str()) {
                        return Err(ModelError::DuplicateId(format!("{}:{}", iv.name, id)));
                    }
                    if is_negative(value) {
                        return Err(ModelError::Negative {
                            id: id.clone(),
                            what: if is_load { "interval load" } else { "entering residual" },
                        });
                    }
                    if is_load {
                        let entry = sums.entry(id.as_str()).or_insert_with(S::zero);
                        *entry = entry.clone() + value.clone();
                    }
                }
            }
        }
        for (id, summed) in sums {
            let declared = match self.stream(id) {
                Some(s) => s.total_load(),
                None => self.utility(id).and_then(|u| u.duty.clone()),
            };
            if let Some(declared) = declared {
                if !crate::scalar::approx_eq(&declared, &summed) {
                    return Err(ModelError::LoadMismatch {
                        id: id.to_string(),
                        declared: declared.to_exact_string(),
                        summed: summed.to_exact_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Total hot supply (process loads plus hot utility duties) and total
    /// cold demand, over the items whose load is known.
    pub fn supply_and_demand(&self) -> (S, S) {
        let mut supply = S::zero();
        let mut demand = S::zero();
        for s in &self.streams {
            if let Some(load) = s.total_load() {
                match s.side {
                    Side::Hot => supply = supply + load,
                    Side::Cold => demand = demand + load,
                }
            }
        }
        for u in &self.utilities {
            if let Some(duty) = &u.duty {
                match u.side {
                    Side::Hot => supply = supply + duty.clone(),
                    Side::Cold => demand = demand + duty.clone(),
                }
            }
        }
        (supply, demand)
    }
}

/// A hot or cold item taking part in one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Participant<S> {
    pub id: String,
    pub role: Role,
    /// Heat provided (hot) or required (cold) inside the interval, kW.
    pub load: S,
    /// Residual entering from the interval above; always zero on the cold side.
    pub entering_residual: S,
    pub fcp: Option<S>,
}

impl<S: Scalar> Participant<S> {
    pub fn new(id: impl Into<String>, role: Role, load: S) -> Self {
        Self {
            id: id.into(),
            role,
            load,
            entering_residual: S::zero(),
            fcp: None,
        }
    }

    pub fn process(id: impl Into<String>, load: S) -> Self {
        Self::new(id, Role::Process, load)
    }

    pub fn utility(id: impl Into<String>, load: S) -> Self {
        Self::new(id, Role::Utility, load)
    }

    pub fn with_fcp(mut self, fcp: S) -> Self {
        self.fcp = Some(fcp);
        self
    }

    pub fn with_entering(mut self, residual: S) -> Self {
        self.entering_residual = residual;
        self
    }
}

/// One fixed temperature interval with its loads and entering residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalProblem<S> {
    pub index: usize,
    pub name: String,
    pub bounds: Option<TemperatureInterval<S>>,
    pub delta_t: Option<S>,
    pub hot: Vec<Participant<S>>,
    pub cold: Vec<Participant<S>>,
    /// Change of total residual across the interval.
    pub delta_r: S,
}

impl<S: Scalar> IntervalProblem<S> {
    pub fn new(
        index: usize,
        name: impl Into<String>,
        delta_t: Option<S>,
        hot: Vec<Participant<S>>,
        cold: Vec<Participant<S>>,
    ) -> Result<Self, ModelError> {
        if let Some(dt) = &delta_t {
            if !is_positive(dt) {
                return Err(ModelError::InvalidInterval(dt.to_exact_string()));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in hot.iter().chain(cold.iter()) {
            if !seen.insert(p.id.clone()) {
                return Err(ModelError::DuplicateId(p.id.clone()));
            }
            if is_negative(&p.load) {
                return Err(ModelError::Negative {
                    id: p.id.clone(),
                    what: "interval load",
                });
            }
            if is_negative(&p.entering_residual) {
                return Err(ModelError::Negative {
                    id: p.id.clone(),
                    what: "entering residual",
                });
            }
        }
        if let Some(p) = cold.iter().find(|p| !p.entering_residual.is_zero()) {
            return Err(ModelError::Negative {
                id: p.id.clone(),
                what: "cold-side residual (must be zero)",
            });
        }
        let mut problem = Self {
            index,
            name: name.into(),
            bounds: None,
            delta_t,
            hot,
            cold,
            delta_r: S::zero(),
        };
        problem.delta_r = problem.balance_from_loads();
        Ok(problem)
    }

    /// Interval whose loads come from capacities: `Q = FCp · δT` for every stream.
    pub fn from_capacities(
        index: usize,
        delta_t: S,
        hot: &[(&str, S)],
        cold: &[(&str, S)],
    ) -> Result<Self, ModelError> {
        let make = |list: &[(&str, S)]| -> Result<Vec<Participant<S>>, ModelError> {
            list.iter()
                .map(|(id, fcp)| {
                    if is_negative(fcp) {
                        return Err(ModelError::NegativeCapacity(id.to_string()));
                    }
                    Ok(Participant::process(*id, heat_load(fcp, &delta_t)?).with_fcp(fcp.clone()))
                })
                .collect()
        };
        Self::new(index, format!("t{index}"), Some(delta_t.clone()), make(hot)?, make(cold)?)
    }

    pub fn with_bounds(mut self, bounds: TemperatureInterval<S>) -> Self {
        self.delta_t = Some(bounds.delta_t());
        self.bounds = Some(bounds);
        self
    }

    pub fn participants(&self, side: Side) -> &[Participant<S>] {
        match side {
            Side::Hot => &self.hot,
            Side::Cold => &self.cold,
        }
    }

    /// Σ hot loads (process and utility) − Σ cold loads (process and utility).
    pub fn balance_from_loads(&self) -> S {
        let hot = self.hot.iter().fold(S::zero(), |acc, p| acc + p.load.clone());
        let cold = self.cold.iter().fold(S::zero(), |acc, p| acc + p.load.clone());
        hot - cold
    }

    pub fn entering_total(&self) -> S {
        self.hot.iter().fold(S::zero(), |acc, p| acc + p.entering_residual.clone())
    }

    /// Total residual leaving the interval.
    pub fn leaving_total(&self) -> S {
        self.entering_total() + self.delta_r.clone()
    }

    fn is_capacity_form(&self) -> bool {
        self.delta_t.is_some()
            && self
                .hot
                .iter()
                .chain(self.cold.iter())
                .all(|p| p.role == Role::Process && p.fcp.is_some())
    }
}

/// Change of residual across `p`. Process-only intervals built from
/// capacities use `δT (Σ FCp_hot − Σ FCp_cold)`; anything else falls back to
/// the load balance including utility duties.
pub fn residual_delta<S: Scalar>(p: &IntervalProblem<S>) -> S {
    if p.is_capacity_form() {
        let dt = p.delta_t.clone().unwrap();
        let sum = |list: &[Participant<S>]| {
            list.iter().fold(S::zero(), |acc, q| acc + q.fcp.clone().unwrap())
        };
        dt * (sum(&p.hot) - sum(&p.cold))
    } else {
        p.balance_from_loads()
    }
}

/// Index of a match variable: a hot/cold pair, optionally within one interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatchIndex {
    pub hot: String,
    pub cold: String,
    pub interval: Option<usize>,
}

impl MatchIndex {
    pub fn new(hot: impl Into<String>, cold: impl Into<String>, interval: Option<usize>) -> Self {
        Self {
            hot: hot.into(),
            cold: cold.into(),
            interval,
        }
    }
}

impl fmt::Display for MatchIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.interval {
            Some(t) => write!(f, "{}-{}@{}", self.hot, self.cold, t),
            None => write!(f, "{}-{}", self.hot, self.cold),
        }
    }
}

/// One point of a match model: binaries, heat loads and hot residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchSolution<S> {
    pub y: BTreeMap<MatchIndex, bool>,
    pub q: BTreeMap<MatchIndex, S>,
    /// Residual leaving interval `t`, per hot identifier.
    pub residuals: BTreeMap<(String, usize), S>,
    pub objective: usize,
}

impl<S: Scalar> MatchSolution<S> {
    /// The binary vector in index order.
    pub fn pattern(&self) -> Vec<bool> {
        self.y.values().copied().collect()
    }

    pub fn pattern_string(&self) -> String {
        self.y.values().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn matched(&self) -> impl Iterator<Item = &MatchIndex> {
        self.y.iter().filter(|(_, &b)| b).map(|(k, _)| k)
    }

    /// Text key covering y, q and residuals; equal keys mean equal solutions.
    pub fn full_key(&self) -> String {
        let mut key = self.pattern_string();
        for (k, v) in &self.q {
            if !crate::scalar::is_zero(v) {
                key.push_str(&format!("|{k}={}", v.to_exact_string()));
            }
        }
        for ((h, t), v) in &self.residuals {
            if !crate::scalar::is_zero(v) {
                key.push_str(&format!("|R{h}@{t}={}", v.to_exact_string()));
            }
        }
        key
    }

    /// Relabels hot and cold identifiers; unmapped identifiers stay put.
    pub fn relabel(&self, hot: &BTreeMap<String, String>, cold: &BTreeMap<String, String>) -> Self {
        let h = |id: &String| hot.get(id).unwrap_or(id).clone();
        let c = |id: &String| cold.get(id).unwrap_or(id).clone();
        let map_index = |k: &MatchIndex| MatchIndex {
            hot: h(&k.hot),
            cold: c(&k.cold),
            interval: k.interval,
        };
        Self {
            y: self.y.iter().map(|(k, v)| (map_index(k), *v)).collect(),
            q: self.q.iter().map(|(k, v)| (map_index(k), v.clone())).collect(),
            residuals: self
                .residuals
                .iter()
                .map(|((id, t), v)| ((h(id), *t), v.clone()))
                .collect(),
            objective: self.objective,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(text: &str) -> Rational {
        Rational::parse_decimal(text).unwrap()
    }

    #[test]
    fn heat_load_examples() {
        assert_eq!(heat_load(&r("1.0"), &r("10")).unwrap(), r("10"));
        assert_eq!(heat_load(&r("2.5"), &r("200")).unwrap(), r("500"));
        assert_eq!(heat_load(&r("0"), &r("50")).unwrap(), r("0"));
        assert!(matches!(heat_load(&r("1"), &r("0")), Err(ModelError::InvalidInterval(_))));
        assert!(heat_load(&r("1"), &r("-5")).is_err());
    }

    #[test]
    fn table2_h5_heat_load_inverts() {
        // Load 500 kW at 2.5 kW/K spans 200 K.
        let dt = r("500") / r("2.5");
        assert_eq!(dt, r("200"));
        assert_eq!(heat_load(&r("2.5"), &dt).unwrap(), r("500"));
    }

    #[test]
    fn residual_delta_examples() {
        let balanced =
            IntervalProblem::from_capacities(1, r("50"), &[("h1", r("2"))], &[("c1", r("2"))]).unwrap();
        assert_eq!(residual_delta(&balanced), r("0"));

        let p = IntervalProblem::from_capacities(
            1,
            r("100"),
            &[("h1", r("1")), ("h2", r("1"))],
            &[("c1", r("1.5"))],
        )
        .unwrap();
        assert_eq!(residual_delta(&p), r("50"));
        assert_eq!(p.delta_r, r("50"));
    }

    #[test]
    fn residual_delta_table2_aggregate() {
        let hot: Vec<_> = [("H1", "280"), ("H2", "440"), ("H3", "345"), ("H4", "442"), ("H5", "500")]
            .iter()
            .map(|(id, q)| Participant::process(*id, r(q)))
            .chain([Participant::utility("HU1", r("110")), Participant::utility("HU2", r("195"))])
            .collect();
        let cold: Vec<_> = [("C1", "195"), ("C2", "360"), ("C3", "570"), ("C4", "625"), ("C5", "504")]
            .iter()
            .map(|(id, q)| Participant::process(*id, r(q)))
            .chain([Participant::utility("CU", r("60"))])
            .collect();
        let p = IntervalProblem::new(1, "aggregate", None, hot, cold).unwrap();
        assert_eq!(residual_delta(&p), r("-2"));
    }

    #[test]
    fn stream_invariants() {
        assert!(Stream::new("h", Side::Hot, r("1"), r("300"), r("400")).is_err());
        assert!(Stream::new("c", Side::Cold, r("1"), r("400"), r("300")).is_err());
        assert!(Stream::new("h", Side::Hot, r("-1"), r("400"), r("300")).is_err());
        let s = Stream::new("h", Side::Hot, r("2"), r("400"), r("300")).unwrap();
        assert_eq!(s.total_load(), Some(r("200")));
    }

    #[test]
    fn interval_rejects_negative_loads() {
        let err = IntervalProblem::new(1, "t", None, vec![Participant::process("h", r("-1"))], vec![]);
        assert!(err.is_err());
        assert!(TemperatureInterval::new(1, r("300"), r("300")).is_err());
    }

    #[test]
    fn relabel_moves_every_component() {
        let mut x = MatchSolution::<Rational> {
            y: BTreeMap::new(),
            q: BTreeMap::new(),
            residuals: BTreeMap::new(),
            objective: 1,
        };
        x.y.insert(MatchIndex::new("h1", "c1", Some(1)), true);
        x.y.insert(MatchIndex::new("h2", "c1", Some(1)), false);
        x.q.insert(MatchIndex::new("h1", "c1", Some(1)), r("100"));
        x.residuals.insert(("h2".into(), 1), r("100"));
        let swap: BTreeMap<_, _> = [("h1".to_string(), "h2".to_string()), ("h2".into(), "h1".into())].into();
        let y = x.relabel(&swap, &BTreeMap::new());
        assert!(y.y[&MatchIndex::new("h2", "c1", Some(1))]);
        assert_eq!(y.q[&MatchIndex::new("h2", "c1", Some(1))], r("100"));
        assert_eq!(y.residuals[&("h1".to_string(), 1)], r("100"));
        assert_eq!(y.relabel(&swap, &BTreeMap::new()), x);
    }
}
