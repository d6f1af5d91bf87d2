//! Sparse linear programs over nonnegative variables, a two-phase revised
//! simplex solver, and a plain-text exchange format.

mod simplex;
mod text;

use std::collections::HashSet;
use std::fmt;

pub use simplex::{solve, solve_with, Pricing, SolverOptions};
pub use text::{export_lp, fmt_g17, parse_lp};

use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("invalid LP model: {0}")]
    InvalidModel(String),
    #[error("numeric breakdown in simplex: {0}")]
    NumericBreakdown(String),
    #[error("simplex iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("LP text line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

/// A variable `0 <= x <= upper`; `upper = None` means unbounded above and
/// `Some(0)` fixes the variable at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Variable<T> {
    pub name: String,
    pub upper: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<T> {
    pub name: String,
    pub coeffs: Vec<(VarId, T)>,
    pub rel: Relation,
    pub rhs: T,
}

/// `minimize c·x` subject to linear rows and `0 <= x <= u`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LpModel<T> {
    vars: Vec<Variable<T>>,
    objective: Vec<(VarId, T)>,
    constraints: Vec<Constraint<T>>,
}

impl<T: Field> LpModel<T> {
    pub fn new() -> Self {
        LpModel { vars: Vec::new(), objective: Vec::new(), constraints: Vec::new() }
    }

    pub fn add_var(&mut self, name: impl Into<String>, upper: Option<T>) -> VarId {
        self.vars.push(Variable { name: name.into(), upper });
        VarId(self.vars.len() - 1)
    }

    /// Adds `c` to the objective coefficient of `v`.
    pub fn add_objective(&mut self, v: VarId, c: T) {
        match self.objective.iter_mut().find(|(w, _)| *w == v) {
            Some((_, a)) => *a = a.clone() + c,
            None => self.objective.push((v, c)),
        }
    }

    /// Adds a row; repeated variables have their coefficients summed.
    pub fn add_constraint(&mut self, name: impl Into<String>, coeffs: Vec<(VarId, T)>, rel: Relation, rhs: T) {
        let mut merged: Vec<(VarId, T)> = Vec::with_capacity(coeffs.len());
        for (v, c) in coeffs {
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some((_, a)) => *a = a.clone() + c,
                None => merged.push((v, c)),
            }
        }
        self.constraints.push(Constraint { name: name.into(), coeffs: merged, rel, rhs });
    }

    pub fn set_upper(&mut self, v: VarId, upper: Option<T>) {
        self.vars[v.0].upper = upper;
    }

    pub fn vars(&self) -> &[Variable<T>] {
        &self.vars
    }

    pub fn objective(&self) -> &[(VarId, T)] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    /// Unique well-formed names, declared references, nonnegative upper bounds.
    pub fn validate(&self) -> Result<(), LpError> {
        let mut seen = HashSet::new();
        for v in &self.vars {
            check_name(&v.name, "variable")?;
            if !seen.insert(v.name.as_str()) {
                return Err(LpError::InvalidModel(format!("duplicate variable `{}`", v.name)));
            }
            if let Some(u) = &v.upper {
                if *u < T::zero() {
                    return Err(LpError::InvalidModel(format!("negative upper bound on `{}`", v.name)));
                }
            }
        }
        let mut rows = HashSet::new();
        for c in &self.constraints {
            check_name(&c.name, "constraint")?;
            if !rows.insert(c.name.as_str()) {
                return Err(LpError::InvalidModel(format!("duplicate constraint `{}`", c.name)));
            }
            if let Some((v, _)) = c.coeffs.iter().find(|(v, _)| v.0 >= self.vars.len()) {
                return Err(LpError::InvalidModel(format!("constraint `{}` uses undeclared variable {}", c.name, v.0)));
            }
        }
        if let Some((v, _)) = self.objective.iter().find(|(v, _)| v.0 >= self.vars.len()) {
            return Err(LpError::InvalidModel(format!("objective uses undeclared variable {}", v.0)));
        }
        Ok(())
    }

    /// Largest violation of any row or bound by `x`.
    pub fn max_violation(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        for (v, xv) in self.vars.iter().zip(x) {
            worst = max(worst, -xv.clone());
            if let Some(u) = &v.upper {
                worst = max(worst, xv.clone() - u.clone());
            }
        }
        for c in &self.constraints {
            let lhs = c.coeffs.iter().fold(T::zero(), |a, (v, k)| a + k.clone() * x[v.0].clone());
            let gap = lhs - c.rhs.clone();
            worst = max(
                worst,
                match c.rel {
                    Relation::Le => gap,
                    Relation::Ge => -gap,
                    Relation::Eq => gap.abs(),
                },
            );
        }
        worst
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.objective.iter().fold(T::zero(), |a, (v, c)| a + c.clone() * x[v.0].clone())
    }

    /// Converts coefficients into another field through `f64`.
    pub fn map_scalar<U: Field>(&self) -> LpModel<U> {
        let conv = |t: &T| U::from_f64(t.to_f64());
        LpModel {
            vars: self.vars.iter().map(|v| Variable { name: v.name.clone(), upper: v.upper.as_ref().map(conv) }).collect(),
            objective: self.objective.iter().map(|(v, c)| (*v, conv(c))).collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    name: c.name.clone(),
                    coeffs: c.coeffs.iter().map(|(v, k)| (*v, conv(k))).collect(),
                    rel: c.rel,
                    rhs: conv(&c.rhs),
                })
                .collect(),
        }
    }
}

fn max<T: PartialOrd>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

fn check_name(name: &str, what: &str) -> Result<(), LpError> {
    let bad_start = name.starts_with(|c: char| c.is_ascii_digit() || c == '+' || c == '-' || c == '.');
    if name.is_empty() || bad_start || name.chars().any(|c| c.is_whitespace() || c == ':') {
        return Err(LpError::InvalidModel(format!("{what} name `{name}` is not a valid identifier")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    /// Present when optimal.
    pub objective: Option<T>,
    /// One value per variable when optimal, empty otherwise.
    pub values: Vec<T>,
    pub iterations: usize,
}

impl<T: Field> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn value(&self, v: VarId) -> T {
        self.values[v.0].clone()
    }
}
