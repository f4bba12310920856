//! Exact linear programming: problem container, a two-phase simplex with
//! Bland's rule, and the minimum-utility transshipment stage.

mod simplex;
mod utility;

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

pub(crate) use simplex::solve_parts;
pub use simplex::{solve_lp, LpOutcome, LpSolution};
pub use utility::{min_utility, UtilityDuty, UtilityError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("constraint `{row}` references undeclared variable {index}")]
    UnknownVariable { row: String, index: usize },
    #[error("variable `{0}` has lower bound above upper bound")]
    EmptyBounds(String),
    #[error("objective has {got} coefficients for {expected} variables")]
    ObjectiveLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable<S> {
    pub name: String,
    /// `None` means unbounded below.
    pub lower: Option<S>,
    pub upper: Option<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub name: String,
    pub terms: Vec<(usize, S)>,
    pub relation: Relation,
    pub rhs: S,
}

impl<S: Scalar> Constraint<S> {
    pub fn lhs(&self, x: &[S]) -> S {
        self.terms
            .iter()
            .fold(S::zero(), |acc, (j, a)| acc + a.clone() * x[*j].clone())
    }

    /// Amount by which `x` violates the row; zero or negative when satisfied.
    pub fn violation(&self, x: &[S]) -> S {
        let diff = self.lhs(x) - self.rhs.clone();
        match self.relation {
            Relation::Eq => diff.abs(),
            Relation::Le => diff,
            Relation::Ge => -diff,
        }
    }
}

/// `min cᵀx` subject to linear rows and variable bounds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram<S> {
    pub variables: Vec<Variable<S>>,
    pub constraints: Vec<Constraint<S>>,
    pub objective: Vec<S>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new() -> Self {
        Self {
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: Option<S>, upper: Option<S>, cost: S) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.objective.push(cost);
        self.variables.len() - 1
    }

    /// Nonnegative variable with no upper bound.
    pub fn add_nonneg(&mut self, name: impl Into<String>, cost: S) -> usize {
        self.add_var(name, Some(S::zero()), None, cost)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, S)>,
        relation: Relation,
        rhs: S,
    ) -> usize {
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.objective.len() != self.variables.len() {
            return Err(LpError::ObjectiveLength {
                expected: self.variables.len(),
                got: self.objective.len(),
            });
        }
        for v in &self.variables {
            if let (Some(lo), Some(hi)) = (&v.lower, &v.upper) {
                if lo > hi {
                    return Err(LpError::EmptyBounds(v.name.clone()));
                }
            }
        }
        for c in &self.constraints {
            if let Some((j, _)) = c.terms.iter().find(|(j, _)| *j >= self.variables.len()) {
                return Err(LpError::UnknownVariable {
                    row: c.name.clone(),
                    index: *j,
                });
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[S]) -> S {
        self.objective
            .iter()
            .zip(x)
            .fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
    }
}

fn bound_text<S: Scalar>(v: &Option<S>, inf: &str) -> String {
    v.as_ref().map_or_else(|| inf.to_string(), |b| b.to_exact_string())
}

/// Plain-text tableau dump, one record per line:
///
/// ```text
/// lp <vars> <rows>
/// var <index> <name> <lower|-inf> <upper|inf> <cost>
/// row <index> <name> <=|>=|= <rhs> <term count> <var>:<coef> ...
/// end
/// ```
///
/// Numbers are exact (`p/q` when not a terminating decimal).
impl<S: Scalar> fmt::Display for LinearProgram<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lp {} {}", self.variables.len(), self.constraints.len())?;
        for (j, v) in self.variables.iter().enumerate() {
            writeln!(
                f,
                "var {j} {} {} {} {}",
                v.name,
                bound_text(&v.lower, "-inf"),
                bound_text(&v.upper, "inf"),
                self.objective[j].to_exact_string()
            )?;
        }
        for (i, c) in self.constraints.iter().enumerate() {
            write!(
                f,
                "row {i} {} {} {} {}",
                c.name,
                c.relation.symbol(),
                c.rhs.to_exact_string(),
                c.terms.len()
            )?;
            for (j, a) in &c.terms {
                write!(f, " {j}:{}", a.to_exact_string())?;
            }
            writeln!(f)?;
        }
        writeln!(f, "end")
    }
}
