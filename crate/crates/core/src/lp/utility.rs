//! Minimum-utility transshipment LP.

use thiserror::Error;

use super::{solve_lp, LinearProgram, LpError, LpOutcome, Relation};
use crate::model::{IntervalLoads, Side, Utility};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UtilityError {
    #[error("no temperature intervals")]
    NoIntervals,
    #[error("utility `{0}` is not placed in any interval")]
    Unplaced(String),
    #[error("interval balances cannot be met with the available utilities")]
    Infeasible,
    #[error("utility cost LP is unbounded (negative utility cost?)")]
    Unbounded,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Utility duties and the residual cascade that minimise utility cost.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityDuty<S> {
    pub hot: Vec<(String, S)>,
    pub cold: Vec<(String, S)>,
    /// `R_0, …, R_T`; both ends are zero.
    pub residuals: Vec<S>,
    pub cost: S,
}

impl<S: Scalar> UtilityDuty<S> {
    pub fn duty(&self, id: &str) -> Option<&S> {
        self.hot.iter().chain(self.cold.iter()).find(|(u, _)| u == id).map(|(_, d)| d)
    }

    pub fn total_hot(&self) -> S {
        self.hot.iter().fold(S::zero(), |a, (_, d)| a + d.clone())
    }

    pub fn total_cold(&self) -> S {
        self.cold.iter().fold(S::zero(), |a, (_, d)| a + d.clone())
    }
}

/// Solves the LP transshipment model over prebuilt intervals:
/// `R_t − R_{t−1} + Σ QW − Σ QS = Σ Q_hot − Σ Q_cold` per interval,
/// `R_t ≥ 0`, `R_0 = R_T = 0`, minimising `Σ cost · duty`. Utilities with a
/// fixed duty keep it.
pub fn min_utility<S: Scalar>(
    intervals: &[IntervalLoads<S>],
    utilities: &[Utility<S>],
) -> Result<UtilityDuty<S>, UtilityError> {
    if intervals.is_empty() {
        return Err(UtilityError::NoIntervals);
    }
    let t_count = intervals.len();
    let mut lp = LinearProgram::new();

    let mut duty_var = Vec::with_capacity(utilities.len());
    for u in utilities {
        let (lo, hi) = match &u.duty {
            Some(d) => (Some(d.clone()), Some(d.clone())),
            None => (Some(S::zero()), None),
        };
        duty_var.push(lp.add_var(format!("duty_{}", u.id), lo, hi, u.unit_cost()));
    }
    // R_1 .. R_{T-1}
    let residual_var: Vec<usize> = (1..t_count).map(|t| lp.add_nonneg(format!("R_{t}"), S::zero())).collect();

    let placed = |id: &str| {
        intervals
            .iter()
            .position(|iv| iv.hot_utilities.iter().chain(iv.cold_utilities.iter()).any(|u| u == id))
    };
    let mut slot = Vec::with_capacity(utilities.len());
    for u in utilities {
        slot.push(placed(&u.id).ok_or_else(|| UtilityError::Unplaced(u.id.clone()))?);
    }

    for (k, iv) in intervals.iter().enumerate() {
        let mut terms = Vec::new();
        if k + 1 < t_count {
            terms.push((residual_var[k], S::one()));
        }
        if k > 0 {
            terms.push((residual_var[k - 1], -S::one()));
        }
        for (ui, u) in utilities.iter().enumerate() {
            if slot[ui] != k {
                continue;
            }
            let coef = match u.side {
                Side::Hot => -S::one(),
                Side::Cold => S::one(),
            };
            terms.push((duty_var[ui], coef));
        }
        let hot = iv.hot.iter().fold(S::zero(), |a, (_, q)| a + q.clone());
        let cold = iv.cold.iter().fold(S::zero(), |a, (_, q)| a + q.clone());
        lp.add_constraint(format!("balance_{}", iv.interval.index), terms, Relation::Eq, hot - cold);
    }

    let sol = match solve_lp(&lp)? {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Infeasible => return Err(UtilityError::Infeasible),
        LpOutcome::Unbounded => return Err(UtilityError::Unbounded),
    };
    let mut duty = UtilityDuty {
        hot: Vec::new(),
        cold: Vec::new(),
        residuals: Vec::with_capacity(t_count + 1),
        cost: sol.objective.clone(),
    };
    for (ui, u) in utilities.iter().enumerate() {
        let v = sol.x[duty_var[ui]].clone();
        match u.side {
            Side::Hot => duty.hot.push((u.id.clone(), v)),
            Side::Cold => duty.cold.push((u.id.clone(), v)),
        }
    }
    duty.residuals.push(S::zero());
    duty.residuals.extend(residual_var.iter().map(|&j| sol.x[j].clone()));
    duty.residuals.push(S::zero());
    Ok(duty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TemperatureInterval;
    use crate::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_int(v)
    }

    fn interval(k: usize, hot: i64, cold: i64) -> IntervalLoads<Rational> {
        IntervalLoads {
            interval: TemperatureInterval::new(k, r(1000 - 10 * k as i64), r(990 - 10 * k as i64)).unwrap(),
            hot: if hot > 0 { vec![(format!("H{k}"), r(hot))] } else { vec![] },
            cold: if cold > 0 { vec![(format!("C{k}"), r(cold))] } else { vec![] },
            hot_utilities: vec![],
            cold_utilities: vec![],
        }
    }

    fn utilities() -> Vec<Utility<Rational>> {
        vec![
            Utility::new("HU", Side::Hot, None, None),
            Utility::new("CU", Side::Cold, None, None),
        ]
    }

    #[test]
    fn balanced_single_interval() {
        let mut iv = interval(1, 100, 100);
        iv.hot_utilities.push("HU".into());
        iv.cold_utilities.push("CU".into());
        let d = min_utility(&[iv], &utilities()).unwrap();
        assert_eq!(d.duty("HU"), Some(&r(0)));
        assert_eq!(d.duty("CU"), Some(&r(0)));
        assert_eq!(d.residuals, vec![r(0), r(0)]);
    }

    #[test]
    fn deficit_forces_hot_utility() {
        let mut iv = interval(1, 100, 150);
        iv.hot_utilities.push("HU".into());
        let d = min_utility(&[iv], &utilities()[..1]).unwrap();
        assert_eq!(d.duty("HU"), Some(&r(50)));
    }

    #[test]
    fn pinch_between_deficit_and_surplus() {
        // Upper interval needs 80, lower has 30 spare: cascade cannot carry heat upward.
        let mut top = interval(1, 20, 100);
        let mut bottom = interval(2, 50, 20);
        top.hot_utilities.push("HU".into());
        bottom.cold_utilities.push("CU".into());
        let d = min_utility(&[top, bottom], &utilities()).unwrap();
        assert_eq!(d.duty("HU"), Some(&r(80)));
        assert_eq!(d.duty("CU"), Some(&r(30)));
        assert_eq!(d.residuals, vec![r(0), r(0), r(0)]);
    }

    #[test]
    fn surplus_without_cold_utility_is_infeasible() {
        let mut iv = interval(1, 100, 50);
        iv.hot_utilities.push("HU".into());
        assert_eq!(min_utility(&[iv], &utilities()[..1]), Err(UtilityError::Infeasible));
    }
}
