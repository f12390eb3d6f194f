//! Self-contained linear programming and branch-and-bound MILP engine, plus
//! builders that translate the planning formulations into generic models.
//!
//! The engine is deliberately small: dense bounded-variable primal simplex
//! with Bland/Dantzig pricing, and best-first branch and bound over binary
//! variables. Inputs are integer-scaled (nanometers, shot counts), which
//! keeps the numerics honest at the scales this crate targets.

mod branch_bound;
mod builders;
mod simplex;

pub use branch_bound::{solve_milp, MilpConfig};
pub use builders::{
    build_1d_exact, build_1d_simplified, build_2d_exact, build_knapsack_relax, decode_1d_exact,
    decode_2d_exact,
};
pub use simplex::{solve_lp, solve_lp_with, SimplexOptions};

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// Objective sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Simplex pricing rule. Bland guarantees termination; Dantzig is usually
/// faster on well-conditioned instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    Bland,
    #[default]
    Dantzig,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    /// Finite lower bound.
    pub lower: f64,
    /// Upper bound, possibly `f64::INFINITY`.
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    /// Dense coefficient row, one entry per variable.
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub variables: Vec<Variable>,
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            variables: Vec::new(),
            sense,
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_variable(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.objective.push(0.0);
        self.variables.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    /// Add a constraint given sparse (index, coefficient) terms.
    pub fn add_constraint(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) {
        let mut coeffs = vec![0.0; self.variables.len()];
        for &(i, c) in terms {
            coeffs[i] += c;
        }
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Objective value of a full assignment.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective
            .iter()
            .zip(values)
            .map(|(c, v)| c * v)
            .sum()
    }

    /// Worst constraint/bound violation of an assignment, for verification.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (v, var) in values.iter().zip(&self.variables) {
            worst = worst.max(var.lower - v).max(v - var.upper);
        }
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(values).map(|(a, v)| a * v).sum();
            let viol = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

impl std::fmt::Display for LinearProgram {
    /// Human-readable model listing, used by the CLI `--dump-lp` flag.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sense = match self.sense {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        };
        write!(f, "{sense}")?;
        let mut first = true;
        for (c, v) in self.objective.iter().zip(&self.variables) {
            if *c != 0.0 {
                write!(f, "{} {c} {}", if first { ":" } else { " +" }, v.name)?;
                first = false;
            }
        }
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for con in &self.constraints {
            write!(f, " ")?;
            let mut first = true;
            for (a, v) in con.coeffs.iter().zip(&self.variables) {
                if *a != 0.0 {
                    write!(f, "{}{a} {}", if first { " " } else { " + " }, v.name)?;
                    first = false;
                }
            }
            let rel = match con.relation {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            writeln!(f, " {rel} {}", con.rhs)?;
        }
        writeln!(f, "bounds")?;
        for v in &self.variables {
            writeln!(f, "  {} <= {} <= {}", v.lower, v.name, v.upper)?;
        }
        Ok(())
    }
}

/// A linear program plus a set of variables restricted to {0,1}.
#[derive(Debug, Clone)]
pub struct MilpModel {
    pub base: LinearProgram,
    /// Indices of binary variables; each must have bounds within [0,1].
    pub integral: Vec<usize>,
    /// Integral variables branched preferentially while fractional. The
    /// planning models put selection variables here so the search decides
    /// what is on the stencil before how it is ordered.
    pub branch_priority: Vec<usize>,
    /// True when the optimal objective is known to be integral at integral
    /// points, enabling stronger bound pruning.
    pub integral_objective: bool,
}

impl std::fmt::Display for MilpModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.base)?;
        write!(f, "binary")?;
        for &i in &self.integral {
            write!(f, " {}", self.base.variables[i].name)?;
        }
        writeln!(f)
    }
}

/// Solve outcome shared by the LP and MILP entry points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NodeLimit,
    TimeLimit,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Structural variable values; empty when no solution is available.
    pub values: Vec<f64>,
    pub objective: f64,
    /// Branch-and-bound nodes processed (1 when the root LP was integral).
    pub nodes: u64,
    /// Total simplex pivots across all LP solves.
    pub pivots: u64,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}
