use super::{pair_allowed, pair_counted, MilpError, MilpModel, ModelItem, ModelScope, ObjectiveScope, VarKind};
use crate::lp::{Relation, UtilityDuty};
use crate::model::{
    build_intervals, HensInstance, IntervalProblem, MatchIndex, ModelError, Participant, Role, Side,
};
use crate::scalar::{is_negative, is_positive, min_of, Scalar};

/// Identifier of the pseudo hot item carrying the residual that enters an
/// interval when the per-stream split of that residual is unknown.
pub const RESIDUAL_CARRIER: &str = "R_in";

/// Interval problems of an instance. Explicit interval loads are taken as
/// given; otherwise intervals are built from stream temperatures and every
/// utility needs a duty, either fixed in the instance or from `duties`.
/// With `carriers`, the cascade residual entering each built interval is
/// attached to a [`RESIDUAL_CARRIER`] participant.
pub fn instance_intervals<S: Scalar>(
    instance: &HensInstance<S>,
    dt_min: &S,
    duties: Option<&UtilityDuty<S>>,
    carriers: bool,
) -> Result<Vec<IntervalProblem<S>>, MilpError> {
    if !instance.intervals.is_empty() {
        return explicit_intervals(instance);
    }
    let built = build_intervals(&instance.streams, &instance.utilities, dt_min)?;
    let duty_of = |id: &str| -> Result<S, MilpError> {
        let u = instance.utility(id).expect("placed utilities are declared");
        u.duty
            .clone()
            .or_else(|| duties.and_then(|d| d.duty(id).cloned()))
            .ok_or_else(|| MilpError::MissingDuty(id.to_string()))
    };

    let mut out = Vec::with_capacity(built.len());
    let mut cascade = S::zero();
    for iv in built {
        let mut hot = Vec::new();
        let mut cold = Vec::new();
        if carriers && is_positive(&cascade) {
            hot.push(Participant::new(RESIDUAL_CARRIER, Role::Residual, S::zero()).with_entering(cascade.clone()));
        }
        for (id, q) in &iv.hot {
            let fcp = instance.stream(id).map(|s| s.fcp.clone());
            let mut p = Participant::process(id.clone(), q.clone());
            p.fcp = fcp;
            hot.push(p);
        }
        for id in &iv.hot_utilities {
            let d = duty_of(id)?;
            if is_positive(&d) {
                hot.push(Participant::utility(id.clone(), d));
            }
        }
        for (id, q) in &iv.cold {
            let fcp = instance.stream(id).map(|s| s.fcp.clone());
            let mut p = Participant::process(id.clone(), q.clone());
            p.fcp = fcp;
            cold.push(p);
        }
        for id in &iv.cold_utilities {
            let d = duty_of(id)?;
            if is_positive(&d) {
                cold.push(Participant::utility(id.clone(), d));
            }
        }
        let index = iv.interval.index;
        let problem = IntervalProblem::new(index, format!("t{index}"), None, hot, cold)?.with_bounds(iv.interval);
        cascade = cascade + problem.delta_r.clone();
        out.push(problem);
    }
    Ok(out)
}

fn explicit_intervals<S: Scalar>(instance: &HensInstance<S>) -> Result<Vec<IntervalProblem<S>>, MilpError> {
    let mut out = Vec::with_capacity(instance.intervals.len());
    for (k, iv) in instance.intervals.iter().enumerate() {
        let make = |id: &str, side: Side, load: S| -> Result<Participant<S>, ModelError> {
            let (s, role) = instance.lookup(id).ok_or_else(|| ModelError::UnknownId {
                interval: iv.name.clone(),
                side,
                id: id.to_string(),
            })?;
            if s != side {
                return Err(ModelError::UnknownId {
                    interval: iv.name.clone(),
                    side,
                    id: id.to_string(),
                });
            }
            let mut p = Participant::new(id, role, load);
            p.fcp = instance.stream(id).map(|s| s.fcp.clone());
            Ok(p)
        };
        let mut hot = iv
            .hot
            .iter()
            .map(|(id, q)| make(id, Side::Hot, q.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        for (id, r) in &iv.entering {
            match hot.iter_mut().find(|p| &p.id == id) {
                Some(p) => p.entering_residual = r.clone(),
                None => hot.push(make(id, Side::Hot, S::zero())?.with_entering(r.clone())),
            }
        }
        let cold = iv
            .cold
            .iter()
            .map(|(id, q)| make(id, Side::Cold, q.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(IntervalProblem::new(k + 1, iv.name.clone(), iv.delta_t.clone(), hot, cold)?);
    }
    Ok(out)
}

fn check_loads<S: Scalar>(p: &IntervalProblem<S>) -> Result<(), MilpError> {
    for q in p.hot.iter().chain(p.cold.iter()) {
        if is_negative(&q.load) || is_negative(&q.entering_residual) {
            return Err(ModelError::Negative {
                id: q.id.clone(),
                what: "interval load",
            }
            .into());
        }
    }
    Ok(())
}

/// Minimum-matches model of one fixed interval: hot balances with leaving
/// residuals, cold balances, the residual total, `q ≤ min{Q_i + R_i,in, Q_j}·y`
/// for counted pairs and `q = 0` for hot-utility/cold-utility pairs. Items
/// without load (and without entering residual) are left out.
pub fn build_fixed_interval_model<S: Scalar>(
    p: &IntervalProblem<S>,
    objective_scope: ObjectiveScope,
) -> Result<MilpModel<S>, MilpError> {
    check_loads(p)?;
    let t = p.index;
    let mut m = MilpModel::new(ModelScope::FixedInterval, objective_scope);
    m.intervals = vec![t];
    let hot: Vec<&Participant<S>> = p
        .hot
        .iter()
        .filter(|h| is_positive(&h.load) || is_positive(&h.entering_residual))
        .collect();
    let cold: Vec<&Participant<S>> = p.cold.iter().filter(|c| is_positive(&c.load)).collect();
    m.hot = hot
        .iter()
        .map(|h| ModelItem {
            id: h.id.clone(),
            side: Side::Hot,
            role: h.role,
            loads: vec![h.load.clone()],
            entering: vec![h.entering_residual.clone()],
        })
        .collect();
    m.cold = cold
        .iter()
        .map(|c| ModelItem {
            id: c.id.clone(),
            side: Side::Cold,
            role: c.role,
            loads: vec![c.load.clone()],
            entering: vec![S::zero()],
        })
        .collect();

    let mut hot_terms: Vec<Vec<(usize, S)>> = vec![Vec::new(); hot.len()];
    let mut cold_terms: Vec<Vec<(usize, S)>> = vec![Vec::new(); cold.len()];
    let mut big_m_rows = Vec::new();
    for (a, h) in hot.iter().enumerate() {
        for (b, c) in cold.iter().enumerate() {
            let key = MatchIndex::new(h.id.clone(), c.id.clone(), Some(t));
            if !pair_allowed(h.role, c.role) {
                let q = m.add_var(VarKind::Heat(key), Some(S::zero()), Some(S::zero()), S::zero());
                hot_terms[a].push((q, S::one()));
                cold_terms[b].push((q, S::one()));
                continue;
            }
            let q = m.add_var(VarKind::Heat(key.clone()), Some(S::zero()), None, S::zero());
            hot_terms[a].push((q, S::one()));
            cold_terms[b].push((q, S::one()));
            if pair_counted(objective_scope, h.role, c.role) {
                let y = m.add_var(VarKind::Match(key.clone()), Some(S::zero()), Some(S::one()), S::one());
                let u = min_of(&(h.load.clone() + h.entering_residual.clone()), &c.load);
                big_m_rows.push((format!("bigM[{key}]"), vec![(q, S::one()), (y, -u.clone())]));
                m.big_m.insert(key, u);
            }
        }
    }
    let mut residual_terms = Vec::with_capacity(hot.len());
    for (a, h) in hot.iter().enumerate() {
        let r = m.add_var(
            VarKind::Residual {
                hot: h.id.clone(),
                interval: t,
            },
            Some(S::zero()),
            None,
            S::zero(),
        );
        hot_terms[a].push((r, S::one()));
        residual_terms.push((r, S::one()));
    }
    for (a, h) in hot.iter().enumerate() {
        m.lp.add_constraint(
            format!("hot[{}@{t}]", h.id),
            std::mem::take(&mut hot_terms[a]),
            Relation::Eq,
            h.load.clone() + h.entering_residual.clone(),
        );
    }
    for (b, c) in cold.iter().enumerate() {
        m.lp.add_constraint(
            format!("cold[{}@{t}]", c.id),
            std::mem::take(&mut cold_terms[b]),
            Relation::Eq,
            c.load.clone(),
        );
    }
    m.lp.add_constraint(format!("residual[{t}]"), residual_terms, Relation::Eq, p.leaving_total());
    for (name, terms) in big_m_rows {
        m.lp.add_constraint(name, terms, Relation::Le, S::zero());
    }
    m.finish();
    Ok(m)
}

/// Full transshipment model over every interval of `instance`.
pub fn build_full_model<S: Scalar>(
    instance: &HensInstance<S>,
    dt_min: &S,
    duties: Option<&UtilityDuty<S>>,
    objective_scope: ObjectiveScope,
) -> Result<MilpModel<S>, MilpError> {
    let problems = instance_intervals(instance, dt_min, duties, false)?;
    build_full_model_from_intervals(&problems, objective_scope)
}

/// Full model: per-interval hot and cold balances with residuals cascading
/// down (`R_{i,0} = R_{i,T} = 0`), pair totals `Q_ij = Σ_t q_ijt` and one
/// binary per counted pair with `Q_ij ≤ U_ij·y_ij`.
pub fn build_full_model_from_intervals<S: Scalar>(
    problems: &[IntervalProblem<S>],
    objective_scope: ObjectiveScope,
) -> Result<MilpModel<S>, MilpError> {
    for p in problems {
        check_loads(p)?;
    }
    let n_t = problems.len();
    let mut m = MilpModel::new(ModelScope::Full, objective_scope);
    m.intervals = problems.iter().map(|p| p.index).collect();

    let collect = |side: Side| {
        let mut items: Vec<ModelItem<S>> = Vec::new();
        for (k, p) in problems.iter().enumerate() {
            for part in p.participants(side) {
                let pos = match items.iter().position(|i| i.id == part.id) {
                    Some(pos) => pos,
                    None => {
                        items.push(ModelItem {
                            id: part.id.clone(),
                            side,
                            role: part.role,
                            loads: vec![S::zero(); n_t],
                            entering: vec![S::zero(); n_t],
                        });
                        items.len() - 1
                    }
                };
                items[pos].loads[k] = part.load.clone();
                items[pos].entering[k] = part.entering_residual.clone();
            }
        }
        items
    };
    let hot = collect(Side::Hot);
    let cold = collect(Side::Cold);

    // available[i][k]: hot item i holds heat at or above interval k.
    let available: Vec<Vec<bool>> = hot
        .iter()
        .map(|h| {
            let mut acc = S::zero();
            (0..n_t)
                .map(|k| {
                    acc = acc.clone() + h.loads[k].clone() + h.entering[k].clone();
                    is_positive(&acc)
                })
                .collect()
        })
        .collect();

    let mut hot_rows: Vec<Vec<Vec<(usize, S)>>> = vec![vec![Vec::new(); n_t]; hot.len()];
    let mut cold_rows: Vec<Vec<Vec<(usize, S)>>> = vec![vec![Vec::new(); n_t]; cold.len()];
    let mut pair_rows = Vec::new();

    for (a, h) in hot.iter().enumerate() {
        for (b, c) in cold.iter().enumerate() {
            if !pair_allowed(h.role, c.role) {
                continue;
            }
            let mut q_vars = Vec::new();
            let mut reachable_demand = S::zero();
            for k in 0..n_t {
                if !available[a][k] || !is_positive(&c.loads[k]) {
                    continue;
                }
                let key = MatchIndex::new(h.id.clone(), c.id.clone(), Some(m.intervals[k]));
                let q = m.add_var(VarKind::Heat(key), Some(S::zero()), None, S::zero());
                hot_rows[a][k].push((q, S::one()));
                cold_rows[b][k].push((q, S::one()));
                q_vars.push(q);
                reachable_demand = reachable_demand + c.loads[k].clone();
            }
            if q_vars.is_empty() {
                continue;
            }
            let total = m.add_var(
                VarKind::PairTotal {
                    hot: h.id.clone(),
                    cold: c.id.clone(),
                },
                Some(S::zero()),
                None,
                S::zero(),
            );
            let mut link = vec![(total, S::one())];
            link.extend(q_vars.iter().map(|&q| (q, -S::one())));
            pair_rows.push((format!("link[{}-{}]", h.id, c.id), link, Relation::Eq));
            if pair_counted(objective_scope, h.role, c.role) {
                let key = MatchIndex::new(h.id.clone(), c.id.clone(), None);
                let y = m.add_var(VarKind::Match(key.clone()), Some(S::zero()), Some(S::one()), S::one());
                let supply = h
                    .loads
                    .iter()
                    .chain(h.entering.iter())
                    .fold(S::zero(), |acc, v| acc + v.clone());
                let u = min_of(&supply, &reachable_demand);
                pair_rows.push((format!("bigM[{key}]"), vec![(total, S::one()), (y, -u.clone())], Relation::Le));
                m.big_m.insert(key, u);
            }
        }
    }

    for (a, h) in hot.iter().enumerate() {
        for k in 0..n_t.saturating_sub(1) {
            if !available[a][k] {
                continue;
            }
            let r = m.add_var(
                VarKind::Residual {
                    hot: h.id.clone(),
                    interval: m.intervals[k],
                },
                Some(S::zero()),
                None,
                S::zero(),
            );
            hot_rows[a][k].push((r, S::one()));
            hot_rows[a][k + 1].push((r, -S::one()));
        }
    }

    for (a, h) in hot.iter().enumerate() {
        for k in 0..n_t {
            if !available[a][k] {
                continue;
            }
            let rhs = h.loads[k].clone() + h.entering[k].clone();
            m.lp.add_constraint(
                format!("hot[{}@{}]", h.id, m.intervals[k]),
                std::mem::take(&mut hot_rows[a][k]),
                Relation::Eq,
                rhs,
            );
        }
    }
    for (b, c) in cold.iter().enumerate() {
        for k in 0..n_t {
            if !is_positive(&c.loads[k]) {
                continue;
            }
            m.lp.add_constraint(
                format!("cold[{}@{}]", c.id, m.intervals[k]),
                std::mem::take(&mut cold_rows[b][k]),
                Relation::Eq,
                c.loads[k].clone(),
            );
        }
    }
    for (name, terms, rel) in pair_rows {
        m.lp.add_constraint(name, terms, rel, S::zero());
    }
    m.hot = hot;
    m.cold = cold;
    m.finish();
    Ok(m)
}
