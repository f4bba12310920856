//! Dense two-phase primal simplex; Dantzig pricing with a fall back to
//! Bland's rule on long degenerate runs.
//!
//! Variables are shifted to their lower bound (or mirrored at their upper
//! bound, or split when free), finite upper bounds become rows, and every row
//! is brought to a nonnegative right-hand side. Slack columns with a `+1`
//! coefficient start in the basis; remaining rows get an artificial column.

use super::{Constraint, LinearProgram, LpError, Relation, Variable};
use crate::scalar::{approx_eq, is_negative, is_positive, is_zero, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub x: Vec<S>,
    pub objective: S,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S> {
    Optimal(LpSolution<S>),
    Infeasible,
    Unbounded,
}

impl<S> LpOutcome<S> {
    pub fn optimal(self) -> Option<LpSolution<S>> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 32;

/// Original variable = `constant + Σ ±column`.
struct ColumnMap<S> {
    constant: S,
    columns: Vec<(usize, bool)>,
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    /// Reduced costs; the last entry holds minus the objective value.
    z: Vec<S>,
    width: usize,
    pivots: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl<S: Scalar> Tableau<S> {
    fn rhs(&self, i: usize) -> &S {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.rows[r][e].clone();
        let pivot_row: Vec<(usize, S)> = (0..=self.width)
            .filter(|&j| !self.rows[r][j].is_zero())
            .map(|j| (j, self.rows[r][j].div_by(&piv)))
            .collect();
        for (j, v) in &pivot_row {
            self.rows[r][*j] = v.clone();
        }
        let eliminate = |row: &mut Vec<S>| {
            if row[e].is_zero() {
                return;
            }
            let factor = row[e].clone();
            for (j, v) in &pivot_row {
                row[*j].sub_mul_assign(&factor, v);
                if !S::is_exact() && is_zero(&row[*j]) {
                    row[*j] = S::zero();
                }
            }
            row[e] = S::zero();
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.z);
        self.basis[r] = e;
        self.pivots += 1;
    }

    /// Pivots over the columns below `limit`: most negative reduced cost
    /// first, Bland's rule once a run of degenerate pivots suggests cycling.
    fn run(&mut self, limit: usize) -> Step {
        let mut degenerate = 0usize;
        loop {
            let entering = if degenerate < DEGENERATE_RUN {
                (0..limit)
                    .filter(|&j| is_negative(&self.z[j]))
                    .fold(None, |best: Option<usize>, j| match best {
                        Some(b) if self.z[b] <= self.z[j] => Some(b),
                        _ => Some(j),
                    })
            } else {
                (0..limit).find(|&j| is_negative(&self.z[j]))
            };
            let Some(e) = entering else {
                return Step::Optimal;
            };
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !is_positive(a) {
                    continue;
                }
                let ratio = self.rhs(i).div_by(a);
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        if approx_eq(&ratio, best) {
                            self.basis[i] < self.basis[*k]
                        } else {
                            ratio < *best
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, ratio)) => {
                    if is_zero(&ratio) {
                        degenerate += 1;
                    } else {
                        degenerate = 0;
                    }
                    self.pivot(r, e)
                }
                None => return Step::Unbounded,
            }
        }
    }

    fn set_costs(&mut self, costs: &[S]) {
        let mut z: Vec<S> = costs.to_vec();
        z.resize(self.width + 1, S::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &z[b];
            if cb.is_zero() {
                continue;
            }
            let cb = cb.clone();
            for j in 0..=self.width {
                if !self.rows[i][j].is_zero() {
                    let a = self.rows[i][j].clone();
                    z[j].sub_mul_assign(&cb, &a);
                }
            }
        }
        self.z = z;
    }
}

/// Solves `lp` to a certified optimum. Infeasible and unbounded programs are
/// outcomes, not errors; malformed programs are errors.
pub fn solve_lp<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpOutcome<S>, LpError> {
    lp.validate()?;
    Ok(solve_parts(&lp.variables, &lp.constraints, &lp.objective))
}

/// Solves an already validated program given by its parts, so callers can
/// swap in tightened variable bounds without copying the rows.
pub(crate) fn solve_parts<S: Scalar>(variables: &[Variable<S>], constraints: &[Constraint<S>], objective: &[S]) -> LpOutcome<S> {
    let mut maps = Vec::with_capacity(variables.len());
    let mut structural = 0usize;
    let mut upper_rows: Vec<(usize, S)> = Vec::new();
    for v in variables {
        let map = match (&v.lower, &v.upper) {
            (Some(lo), Some(hi)) if approx_eq(lo, hi) => ColumnMap {
                constant: lo.clone(),
                columns: vec![],
            },
            (Some(lo), hi) => {
                let c = structural;
                structural += 1;
                if let Some(hi) = hi {
                    upper_rows.push((c, hi.clone() - lo.clone()));
                }
                ColumnMap {
                    constant: lo.clone(),
                    columns: vec![(c, false)],
                }
            }
            (None, Some(hi)) => {
                let c = structural;
                structural += 1;
                ColumnMap {
                    constant: hi.clone(),
                    columns: vec![(c, true)],
                }
            }
            (None, None) => {
                let c = structural;
                structural += 2;
                ColumnMap {
                    constant: S::zero(),
                    columns: vec![(c, false), (c + 1, true)],
                }
            }
        };
        maps.push(map);
    }

    // (dense coefficients over structural columns, relation, rhs)
    let mut raw: Vec<(Vec<S>, Relation, S)> = Vec::with_capacity(constraints.len() + upper_rows.len());
    for c in constraints {
        let mut coeffs = vec![S::zero(); structural];
        let mut rhs = c.rhs.clone();
        for (j, a) in &c.terms {
            let m = &maps[*j];
            rhs.sub_mul_assign(a, &m.constant);
            for &(col, neg) in &m.columns {
                if neg {
                    coeffs[col] = coeffs[col].clone() - a.clone();
                } else {
                    coeffs[col] = coeffs[col].clone() + a.clone();
                }
            }
        }
        if coeffs.iter().all(is_zero) {
            let ok = match c.relation {
                Relation::Eq => is_zero(&rhs),
                Relation::Le => !is_negative(&rhs),
                Relation::Ge => !is_positive(&rhs),
            };
            if !ok {
                return LpOutcome::Infeasible;
            }
            continue;
        }
        raw.push((coeffs, c.relation, rhs));
    }
    for (col, ub) in upper_rows {
        let mut coeffs = vec![S::zero(); structural];
        coeffs[col] = S::one();
        raw.push((coeffs, Relation::Le, ub));
    }

    let m = raw.len();
    let slacks = raw.iter().filter(|r| r.1 != Relation::Eq).count();
    let mut needs_artificial = Vec::with_capacity(m);
    let mut slack_col = vec![None; m];
    {
        let mut next = structural;
        for (i, (_, rel, rhs)) in raw.iter().enumerate() {
            let sign_flip = is_negative(rhs);
            if *rel != Relation::Eq {
                let coef_positive = (*rel == Relation::Le) != sign_flip;
                slack_col[i] = Some((next, coef_positive));
                next += 1;
            }
            needs_artificial.push(!matches!(slack_col[i], Some((_, true))));
        }
    }
    let artificials = needs_artificial.iter().filter(|&&b| b).count();
    let first_artificial = structural + slacks;
    let width = first_artificial + artificials;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = first_artificial;
    for (i, (coeffs, _, rhs)) in raw.into_iter().enumerate() {
        let flip = is_negative(&rhs);
        let mut row = vec![S::zero(); width + 1];
        for (j, a) in coeffs.into_iter().enumerate() {
            row[j] = if flip { -a } else { a };
        }
        row[width] = if flip { -rhs } else { rhs };
        if let Some((col, positive)) = slack_col[i] {
            row[col] = if positive { S::one() } else { -S::one() };
        }
        if needs_artificial[i] {
            row[next_art] = S::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(slack_col[i].unwrap().0);
        }
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        basis,
        z: Vec::new(),
        width,
        pivots: 0,
    };

    if artificials > 0 {
        let mut phase1 = vec![S::zero(); width];
        for c in phase1.iter_mut().skip(first_artificial) {
            *c = S::one();
        }
        tab.set_costs(&phase1);
        tab.run(width);
        let infeasibility = -tab.z[width].clone();
        if is_positive(&infeasibility) {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= first_artificial {
                match (0..first_artificial).find(|&j| !is_zero(&tab.rows[r][j])) {
                    Some(j) => tab.pivot(r, j),
                    None => {
                        tab.rows.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut costs = vec![S::zero(); width];
    for (j, m) in maps.iter().enumerate() {
        for &(col, neg) in &m.columns {
            costs[col] = if neg { -objective[j].clone() } else { objective[j].clone() };
        }
    }
    tab.set_costs(&costs);
    if let Step::Unbounded = tab.run(first_artificial) {
        return LpOutcome::Unbounded;
    }

    let mut values = vec![S::zero(); width];
    for (i, &b) in tab.basis.iter().enumerate() {
        values[b] = tab.rhs(i).clone();
    }
    let x: Vec<S> = maps
        .iter()
        .map(|m| {
            m.columns.iter().fold(m.constant.clone(), |acc, &(col, neg)| {
                if neg {
                    acc - values[col].clone()
                } else {
                    acc + values[col].clone()
                }
            })
        })
        .collect();
    let value = objective
        .iter()
        .zip(&x)
        .fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
    LpOutcome::Optimal(LpSolution {
        x,
        objective: value,
        pivots: tab.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_int(v)
    }

    #[test]
    fn single_lower_bound() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x", r(1));
        lp.add_constraint("x>=3", vec![(x, r(1))], Relation::Ge, r(3));
        let sol = solve_lp(&lp).unwrap().optimal().unwrap();
        assert_eq!(sol.x, vec![r(3)]);
        assert_eq!(sol.objective, r(3));
    }

    #[test]
    fn facet_optimum() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x", r(-1));
        let y = lp.add_nonneg("y", r(-1));
        lp.add_constraint("sum", vec![(x, r(1)), (y, r(1))], Relation::Le, r(1));
        let sol = solve_lp(&lp).unwrap().optimal().unwrap();
        assert_eq!(sol.objective, r(-1));
        assert_eq!(sol.x[0].clone() + sol.x[1].clone(), r(1));
        // Dual y = 1 on the row certifies the bound: -x - y >= -1.
    }

    #[test]
    fn infeasible_bounds() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", None, None, r(0));
        lp.add_constraint("lo", vec![(x, r(1))], Relation::Ge, r(1));
        lp.add_constraint("hi", vec![(x, r(1))], Relation::Le, r(0));
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x", r(-1));
        lp.add_constraint("lo", vec![(x, r(1))], Relation::Ge, r(1));
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn bounds_and_free_variables() {
        // min x - y, -2 <= x <= 5 (via bounds), y <= 4 (upper only), x + y = 1
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", Some(r(-2)), Some(r(5)), r(1));
        let y = lp.add_var("y", None, Some(r(4)), r(-1));
        lp.add_constraint("eq", vec![(x, r(1)), (y, r(1))], Relation::Eq, r(1));
        let sol = solve_lp(&lp).unwrap().optimal().unwrap();
        assert_eq!(sol.x, vec![r(-2), r(3)]);
        assert_eq!(sol.objective, r(-5));
    }

    #[test]
    fn fixed_variable_is_substituted() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", Some(r(2)), Some(r(2)), r(1));
        let y = lp.add_nonneg("y", r(1));
        lp.add_constraint("c", vec![(x, r(1)), (y, r(1))], Relation::Ge, r(5));
        let sol = solve_lp(&lp).unwrap().optimal().unwrap();
        assert_eq!(sol.x, vec![r(2), r(3)]);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x", r(1));
        let y = lp.add_nonneg("y", r(2));
        lp.add_constraint("a", vec![(x, r(1)), (y, r(1))], Relation::Eq, r(4));
        lp.add_constraint("b", vec![(x, r(2)), (y, r(2))], Relation::Eq, r(8));
        let sol = solve_lp(&lp).unwrap().optimal().unwrap();
        assert_eq!(sol.objective, r(4));
    }

    #[test]
    fn float_instantiation() {
        let mut lp = LinearProgram::<f64>::new();
        let x = lp.add_nonneg("x", -1.0);
        let y = lp.add_nonneg("y", -2.0);
        lp.add_constraint("a", vec![(x, 1.0), (y, 1.0)], Relation::Le, 4.0);
        lp.add_constraint("b", vec![(y, 1.0)], Relation::Le, 3.0);
        let sol = solve_lp(&lp).unwrap().optimal().unwrap();
        assert!((sol.objective + 7.0).abs() < 1e-9);
    }
}
