//! Best-first branch and bound over binary variables, bounded by the LP
//! relaxation.
//!
//! Nodes are explored in increasing bound order (ties by creation order) so
//! runs are deterministic for fixed limits. An incumbent is accepted only
//! after re-solving the LP with all binaries pinned to their rounded values,
//! which yields a cleanly feasible point regardless of relaxation noise.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use super::simplex::{solve_bounded, SimplexOptions};
use super::{MilpModel, PivotRule, Sense, SolveResult, SolveStatus};

#[derive(Debug, Clone)]
pub struct MilpConfig {
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
    pub pivot_rule: PivotRule,
    /// Pivot cap per node LP.
    pub iteration_limit: u64,
    /// Optional full assignment used to seed the incumbent. It must be
    /// integral on the binary variables; infeasible hints are ignored.
    pub initial_solution: Option<Vec<f64>>,
}

impl Default for MilpConfig {
    fn default() -> Self {
        MilpConfig {
            node_limit: 500_000,
            time_limit: None,
            pivot_rule: PivotRule::Dantzig,
            iteration_limit: 1_000_000,
            initial_solution: None,
        }
    }
}

const INT_TOL: f64 = 1e-6;

struct Node {
    bound: f64,
    seq: u64,
    values: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert so the smallest bound pops first.
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Search<'a> {
    model: &'a MilpModel,
    sign: f64,
    options: SimplexOptions,
    queue: BinaryHeap<Node>,
    incumbent: Option<(f64, Vec<f64>)>,
    nodes: u64,
    pivots: u64,
    seq: u64,
    deadline: Option<Instant>,
}

/// Solve a 0/1 MILP. Node and time limits return the best incumbent with a
/// non-optimal status rather than failing silently.
pub fn solve_milp(model: &MilpModel, config: &MilpConfig) -> SolveResult {
    let base = &model.base;
    debug_assert!(model.integral.iter().all(|&i| {
        base.variables[i].lower >= -INT_TOL && base.variables[i].upper <= 1.0 + INT_TOL
    }));

    let mut search = Search {
        model,
        // Internally we minimize; flip bounds for maximization models.
        sign: match base.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        },
        options: SimplexOptions {
            pivot_rule: config.pivot_rule,
            iteration_limit: config.iteration_limit,
        },
        queue: BinaryHeap::new(),
        incumbent: None,
        nodes: 0,
        pivots: 0,
        seq: 0,
        deadline: config.time_limit.map(|d| Instant::now() + d),
    };

    if let Some(hint) = &config.initial_solution {
        search.try_incumbent_from_hint(hint);
    }

    let root_lower: Vec<f64> = base.variables.iter().map(|v| v.lower).collect();
    let root_upper: Vec<f64> = base.variables.iter().map(|v| v.upper).collect();
    match search.expand(root_lower, root_upper) {
        Ok(()) => {}
        Err(status) => return search.finish(status),
    }

    loop {
        if search.nodes >= config.node_limit {
            return search.finish(SolveStatus::NodeLimit);
        }
        if let Some(deadline) = search.deadline {
            if Instant::now() >= deadline {
                return search.finish(SolveStatus::TimeLimit);
            }
        }
        let Some(node) = search.queue.pop() else {
            let status = if search.incumbent.is_some() {
                SolveStatus::Optimal
            } else {
                SolveStatus::Infeasible
            };
            return search.finish(status);
        };
        if search.cutoff(node.bound) {
            continue;
        }
        let Some(var) = search.branch_variable(&node.values) else {
            continue; // integral nodes never reach the queue
        };
        for fix in [0.0, 1.0] {
            let mut lower = node.lower.clone();
            let mut upper = node.upper.clone();
            lower[var] = fix;
            upper[var] = fix;
            if let Err(status) = search.expand(lower, upper) {
                return search.finish(status);
            }
        }
    }
}

impl<'a> Search<'a> {
    /// Solve one node LP; queue it, fathom it, or promote it to incumbent.
    fn expand(&mut self, lower: Vec<f64>, upper: Vec<f64>) -> Result<(), SolveStatus> {
        self.nodes += 1;
        let lp = solve_bounded(&self.model.base, &lower, &upper, self.options);
        self.pivots += lp.pivots;
        match lp.status {
            SolveStatus::Infeasible => return Ok(()),
            SolveStatus::Unbounded => return Err(SolveStatus::Unbounded),
            SolveStatus::IterationLimit => return Err(SolveStatus::IterationLimit),
            _ => {}
        }
        let bound = self.sign * lp.objective;
        if self.cutoff(bound) {
            return Ok(());
        }
        if self.branch_variable(&lp.values).is_none() {
            self.accept_incumbent(&lp.values, &lower, &upper);
            return Ok(());
        }
        self.seq += 1;
        self.queue.push(Node {
            bound,
            seq: self.seq,
            values: lp.values,
            lower,
            upper,
        });
        Ok(())
    }

    /// True when a node bound cannot lead to a strictly better solution.
    fn cutoff(&self, bound: f64) -> bool {
        let Some((best, _)) = &self.incumbent else {
            return false;
        };
        let gap = if self.model.integral_objective {
            1.0 - 1e-6
        } else {
            1e-9 * best.abs().max(1.0)
        };
        bound >= best - gap
    }

    /// Most fractional binary, preferring the priority set; ties go to the
    /// lowest index.
    fn branch_variable(&self, values: &[f64]) -> Option<usize> {
        let pick = |vars: &[usize]| -> Option<usize> {
            let mut best: Option<(usize, f64)> = None;
            for &i in vars {
                let v = values[i];
                let frac = (v - v.round()).abs();
                if frac <= INT_TOL {
                    continue;
                }
                let dist = (v - 0.5).abs();
                match best {
                    Some((_, d)) if d <= dist => {}
                    _ => best = Some((i, dist)),
                }
            }
            best.map(|(i, _)| i)
        };
        if !self.model.branch_priority.is_empty() {
            if let Some(i) = pick(&self.model.branch_priority) {
                return Some(i);
            }
        }
        pick(&self.model.integral)
    }

    /// Pin binaries at their rounded values and re-solve for the continuous
    /// part; adopt the result when it beats the incumbent.
    fn accept_incumbent(&mut self, values: &[f64], lower: &[f64], upper: &[f64]) {
        let mut lo = lower.to_vec();
        let mut up = upper.to_vec();
        for &i in &self.model.integral {
            let v = values[i].round();
            lo[i] = v;
            up[i] = v;
        }
        let clean = solve_bounded(&self.model.base, &lo, &up, self.options);
        self.pivots += clean.pivots;
        if clean.status != SolveStatus::Optimal {
            return;
        }
        let mut vals = clean.values;
        for &i in &self.model.integral {
            vals[i] = vals[i].round(); // exactly 0 or 1
        }
        let obj = self.sign * self.model.base.objective_value(&vals);
        if self.incumbent.as_ref().map_or(true, |(best, _)| obj < *best) {
            self.incumbent = Some((obj, vals));
        }
    }

    fn try_incumbent_from_hint(&mut self, hint: &[f64]) {
        if hint.len() != self.model.base.num_vars() {
            return;
        }
        if self
            .model
            .integral
            .iter()
            .any(|&i| (hint[i] - hint[i].round()).abs() > INT_TOL)
        {
            return;
        }
        let lower: Vec<f64> = self.model.base.variables.iter().map(|v| v.lower).collect();
        let upper: Vec<f64> = self.model.base.variables.iter().map(|v| v.upper).collect();
        self.accept_incumbent(hint, &lower, &upper);
    }

    fn finish(self, status: SolveStatus) -> SolveResult {
        let (objective, values) = match &self.incumbent {
            Some((obj, vals)) => (self.sign * obj, vals.clone()),
            None => (f64::NAN, Vec::new()),
        };
        SolveResult {
            status,
            values,
            objective,
            nodes: self.nodes,
            pivots: self.pivots,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LinearProgram, Relation};

    fn knapsack(values: &[f64], weights: &[f64], cap: f64) -> MilpModel {
        let mut lp = LinearProgram::new(Sense::Maximize);
        for (i, v) in values.iter().enumerate() {
            let x = lp.add_variable(format!("x{i}"), 0.0, 1.0);
            lp.set_objective(x, *v);
        }
        lp.add_constraint(
            &weights.iter().copied().enumerate().collect::<Vec<_>>(),
            Relation::Le,
            cap,
        );
        MilpModel {
            base: lp,
            integral: (0..values.len()).collect(),
            branch_priority: Vec::new(),
            integral_objective: false,
        }
    }

    #[test]
    fn integral_root_is_one_node() {
        // Weights equal values with a generous capacity: LP optimum is integral.
        let m = knapsack(&[1.0, 2.0], &[1.0, 1.0], 2.0);
        let r = solve_milp(&m, &MilpConfig::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.nodes, 1);
        assert!((r.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn ten_item_knapsack_matches_enumeration() {
        let values = [6.0, 5.0, 4.0, 3.0, 8.0, 7.0, 1.0, 2.0, 9.0, 4.0];
        let weights = [3.0, 2.0, 4.0, 1.0, 5.0, 6.0, 1.0, 2.0, 4.0, 3.0];
        let cap = 12.0;
        let mut best = 0.0f64;
        for mask in 0u32..1 << 10 {
            let (mut v, mut w) = (0.0, 0.0);
            for i in 0..10 {
                if mask >> i & 1 == 1 {
                    v += values[i];
                    w += weights[i];
                }
            }
            if w <= cap {
                best = best.max(v);
            }
        }
        let m = knapsack(&values, &weights, cap);
        let r = solve_milp(&m, &MilpConfig::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - best).abs() < 1e-9, "{} vs {}", r.objective, best);
        // Binary values come back exactly 0 or 1.
        for i in &m.integral {
            let v = r.values[*i];
            assert!(v == 0.0 || v == 1.0);
        }
    }

    #[test]
    fn node_limit_reports_incumbent_with_flag() {
        let values = [6.0, 5.0, 4.0, 3.0, 8.0, 7.0, 1.0, 2.0, 9.0, 4.0];
        let weights = [3.0, 2.0, 4.0, 1.0, 5.0, 6.0, 1.0, 2.0, 4.0, 3.0];
        let m = knapsack(&values, &weights, 12.0);
        let r = solve_milp(
            &m,
            &MilpConfig {
                node_limit: 2,
                ..MilpConfig::default()
            },
        );
        assert_eq!(r.status, SolveStatus::NodeLimit);
    }

    #[test]
    fn infeasible_model() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", 0.0, 1.0);
        lp.set_objective(x, 1.0);
        lp.add_constraint(&[(x, 1.0)], Relation::Ge, 2.0);
        let m = MilpModel {
            base: lp,
            integral: vec![x],
            branch_priority: Vec::new(),
            integral_objective: false,
        };
        let r = solve_milp(&m, &MilpConfig::default());
        assert_eq!(r.status, SolveStatus::Infeasible);
    }
}
