//! Constraint-by-constraint check of a [`MatchSolution`] against a model.

use std::collections::BTreeMap;

use thiserror::Error;

use super::MatchSolution;
use crate::milp::{MilpModel, VarKind};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("solution has no value for binary `{0}`")]
    MissingBinary(String),
    #[error("solution refers to `{0}`, which the model does not have")]
    UnknownEntry(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation<S> {
    /// Row name, variable name, or `objective`.
    pub constraint: String,
    pub amount: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<S> {
    pub violations: Vec<Violation<S>>,
}

impl<S> VerificationReport<S> {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Model variable values implied by `x`. Pair totals are the sums of their
/// interval loads; missing loads and residuals are zero.
pub fn solution_point<S: Scalar>(model: &MilpModel<S>, x: &MatchSolution<S>) -> Result<Vec<S>, VerifyError> {
    for k in x.y.keys() {
        if model.binary_index(k).is_none() {
            return Err(VerifyError::UnknownEntry(format!("y[{k}]")));
        }
    }
    for k in x.q.keys() {
        if model.var(&VarKind::Heat(k.clone())).is_none() {
            return Err(VerifyError::UnknownEntry(format!("q[{k}]")));
        }
    }
    for (hot, t) in x.residuals.keys() {
        let kind = VarKind::Residual {
            hot: hot.clone(),
            interval: *t,
        };
        if model.var(&kind).is_none() {
            return Err(VerifyError::UnknownEntry(format!("R[{hot}@{t}]")));
        }
    }

    let mut totals: BTreeMap<(&str, &str), S> = BTreeMap::new();
    for (k, v) in &x.q {
        let e = totals.entry((k.hot.as_str(), k.cold.as_str())).or_insert_with(S::zero);
        *e = e.clone() + v.clone();
    }
    model
        .kinds
        .iter()
        .map(|kind| {
            Ok(match kind {
                VarKind::Match(k) => match x.y.get(k) {
                    Some(true) => S::one(),
                    Some(false) => S::zero(),
                    None => return Err(VerifyError::MissingBinary(k.to_string())),
                },
                VarKind::Heat(k) => x.q.get(k).cloned().unwrap_or_else(S::zero),
                VarKind::Residual { hot, interval } => x
                    .residuals
                    .get(&(hot.clone(), *interval))
                    .cloned()
                    .unwrap_or_else(S::zero),
                VarKind::PairTotal { hot, cold } => totals
                    .get(&(hot.as_str(), cold.as_str()))
                    .cloned()
                    .unwrap_or_else(S::zero),
            })
        })
        .collect()
}

/// Lists every bound, row (cuts included) and objective-count violation of
/// `x` larger than `tol`.
pub fn verify_solution<S: Scalar>(
    model: &MilpModel<S>,
    x: &MatchSolution<S>,
    tol: &S,
) -> Result<VerificationReport<S>, VerifyError> {
    let point = solution_point(model, x)?;
    let mut violations = Vec::new();
    for (v, value) in model.lp.variables.iter().zip(&point) {
        if let Some(lo) = &v.lower {
            let gap = lo.clone() - value.clone();
            if gap > *tol {
                violations.push(Violation {
                    constraint: format!("{} >= {}", v.name, lo.to_exact_string()),
                    amount: gap,
                });
            }
        }
        if let Some(hi) = &v.upper {
            let gap = value.clone() - hi.clone();
            if gap > *tol {
                violations.push(Violation {
                    constraint: format!("{} <= {}", v.name, hi.to_exact_string()),
                    amount: gap,
                });
            }
        }
    }
    for row in &model.lp.constraints {
        let amount = row.violation(&point);
        if amount > *tol {
            violations.push(Violation {
                constraint: row.name.clone(),
                amount,
            });
        }
    }
    let counted = x.y.values().filter(|&&b| b).count();
    if counted != x.objective {
        violations.push(Violation {
            constraint: "objective".into(),
            amount: S::from_int((counted as i64 - x.objective as i64).abs()),
        });
    }
    Ok(VerificationReport { violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{build_fixed_interval_model, ObjectiveScope};
    use crate::model::{IntervalProblem, MatchIndex, Participant};
    use crate::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_int(v)
    }

    fn one_by_one(y: bool, q: i64) -> (MilpModel<Rational>, MatchSolution<Rational>) {
        let p = IntervalProblem::new(
            1,
            "t1",
            None,
            vec![Participant::process("h1", r(100))],
            vec![Participant::process("c1", r(100))],
        )
        .unwrap();
        let m = build_fixed_interval_model(&p, ObjectiveScope::ProcessPairs).unwrap();
        let k = MatchIndex::new("h1", "c1", Some(1));
        let x = MatchSolution {
            y: [(k.clone(), y)].into(),
            q: [(k, r(q))].into(),
            residuals: BTreeMap::new(),
            objective: y as usize,
        };
        (m, x)
    }

    #[test]
    fn feasible_match() {
        let (m, x) = one_by_one(true, 100);
        assert!(verify_solution(&m, &x, &r(0)).unwrap().is_feasible());
    }

    #[test]
    fn big_m_violation() {
        let (m, x) = one_by_one(false, 100);
        let rep = verify_solution(&m, &x, &r(0)).unwrap();
        assert_eq!(rep.violations.len(), 1);
        assert!(rep.violations[0].constraint.starts_with("bigM"));
        assert_eq!(rep.violations[0].amount, r(100));
    }

    #[test]
    fn balance_violation_and_tolerance() {
        let (m, x) = one_by_one(true, 99);
        let rep = verify_solution(&m, &x, &r(0)).unwrap();
        assert!(rep.violations.iter().any(|v| v.constraint.starts_with("cold")));
        assert!(verify_solution(&m, &x, &r(1)).unwrap().is_feasible());
    }

    #[test]
    fn structural_errors() {
        let (m, mut x) = one_by_one(true, 100);
        x.y.clear();
        assert!(matches!(verify_solution(&m, &x, &r(0)), Err(VerifyError::MissingBinary(_))));
        let (m, mut x) = one_by_one(true, 100);
        x.q.insert(MatchIndex::new("h9", "c1", Some(1)), r(1));
        assert!(matches!(verify_solution(&m, &x, &r(0)), Err(VerifyError::UnknownEntry(_))));
    }

    #[test]
    fn wrong_objective_count() {
        let (m, mut x) = one_by_one(true, 100);
        x.objective = 2;
        let rep = verify_solution(&m, &x, &r(0)).unwrap();
        assert_eq!(rep.violations[0].constraint, "objective");
    }
}
