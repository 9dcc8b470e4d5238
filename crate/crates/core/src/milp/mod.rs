//! Linear models with binary variables, a dense dual-simplex LP solver,
//! best-bound branch-and-bound, and LP-file import/export.

mod bnb;
mod lp_format;
mod simplex;

use std::time::Duration;

use crate::error::{Error, Result};

pub use bnb::{solve_mip, solve_mip_with_cuts, Cut, CutCallback, MipParams};
pub use lp_format::{export_lp_file, parse_lp, read_lp_file, sanitize_name, to_lp_string};
pub use simplex::solve_lp;

/// Index of a variable inside its [`MipModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    /// Amount by which `lhs rel rhs` is violated (0 when satisfied).
    pub fn violation(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Relation::Le => (lhs - rhs).max(0.0),
            Relation::Ge => (rhs - lhs).max(0.0),
            Relation::Eq => (lhs - rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub binary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * x[v.0]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipModel {
    sense: Sense,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(VarId, f64)>,
}

impl MipModel {
    pub fn new(sense: Sense) -> Self {
        MipModel {
            sense,
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn add_variable(&mut self, name: impl Into<String>, lower: f64, upper: f64, binary: bool) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
            binary,
        });
        VarId(self.variables.len() - 1)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.add_variable(name, lower, upper, false)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_variable(name, 0.0, 1.0, true)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> usize {
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, terms: Vec<(VarId, f64)>) {
        self.objective = terms;
    }

    pub fn set_bounds(&mut self, v: VarId, lower: f64, upper: f64) {
        let var = &mut self.variables[v.0];
        var.lower = lower;
        var.upper = upper;
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(VarId, f64)] {
        &self.objective
    }

    pub fn var(&self, v: VarId) -> &Variable {
        &self.variables[v.0]
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn find_variable(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.binary)
            .map(|(i, _)| VarId(i))
    }

    /// Checks bounds, binary ranges and coefficient finiteness.
    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        for v in &self.variables {
            if v.lower.is_nan()
                || v.upper.is_nan()
                || v.lower > v.upper
                || v.lower == f64::INFINITY
                || v.upper == f64::NEG_INFINITY
            {
                return Err(model_error(format!(
                    "variable {} has invalid bounds [{}, {}]",
                    v.name, v.lower, v.upper
                )));
            }
            if v.binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(model_error(format!(
                    "binary variable {} has bounds [{}, {}] outside [0, 1]",
                    v.name, v.lower, v.upper
                )));
            }
        }
        let check_terms = |what: &str, terms: &[(VarId, f64)]| -> Result<()> {
            for &(v, a) in terms {
                if v.0 >= n {
                    return Err(model_error(format!("{what} references unknown variable {}", v.0)));
                }
                if !a.is_finite() {
                    return Err(model_error(format!("{what} has non-finite coefficient {a}")));
                }
            }
            Ok(())
        };
        check_terms("objective", &self.objective)?;
        for c in &self.constraints {
            check_terms(&c.name, &c.terms)?;
            if !c.rhs.is_finite() {
                return Err(model_error(format!("constraint {} has non-finite rhs", c.name)));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, a)| a * x[v.0]).sum()
    }

    /// Largest bound, row or integrality violation of `x`, each row scaled by `1 + |rhs|`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &xv) in self.variables.iter().zip(x) {
            worst = worst.max(v.lower - xv).max(xv - v.upper);
            if v.binary {
                worst = worst.max((xv - xv.round()).abs());
            }
        }
        for c in &self.constraints {
            worst = worst.max(c.relation.violation(c.activity(x), c.rhs) / (1.0 + c.rhs.abs()));
        }
        worst
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.variables.len() && self.max_violation(x) <= tol
    }
}

fn model_error(msg: String) -> Error {
    Error::InvalidModel(msg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Values indexed by [`VarId`]; present iff a feasible point was found.
    pub incumbent: Option<Vec<f64>>,
    /// Objective value of the incumbent (NaN without one).
    pub objective: f64,
    /// Best proven bound in the model's sense.
    pub bound: f64,
    /// `|bound - objective| / max(|objective|, 1e-6)`, infinite without an incumbent.
    pub gap: f64,
    pub nodes: u64,
    pub runtime: Duration,
    /// LP bound at the root node, after any cut rounds there.
    pub root_bound: f64,
    pub cuts_added: usize,
}

impl SolveResult {
    pub fn value(&self, v: VarId) -> Option<f64> {
        self.incumbent.as_ref().map(|x| x[v.0])
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

pub(crate) fn relative_gap(bound: f64, value: f64) -> f64 {
    if !value.is_finite() {
        return f64::INFINITY;
    }
    (bound - value).abs() / value.abs().max(1e-6)
}
