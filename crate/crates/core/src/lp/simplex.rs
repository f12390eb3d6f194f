//! Dense two-phase primal simplex with bounded variables.
//!
//! Constraints are normalized to `<=`/`=` rows with slack variables; rows
//! whose slack basis is infeasible get phase-1 artificials. Variable bounds
//! are handled natively (nonbasic variables rest at a bound and may flip),
//! so binary models do not pay one row per bound.

use super::{LinearProgram, PivotRule, Relation, Sense, SolveResult, SolveStatus};

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub pivot_rule: PivotRule,
    /// Pivot cap; exceeding it yields `SolveStatus::IterationLimit`.
    pub iteration_limit: u64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            pivot_rule: PivotRule::default(),
            iteration_limit: 1_000_000,
        }
    }
}

/// Solve with the given pricing rule and the default pivot cap.
pub fn solve_lp(lp: &LinearProgram, rule: PivotRule) -> SolveResult {
    solve_lp_with(
        lp,
        SimplexOptions {
            pivot_rule: rule,
            ..SimplexOptions::default()
        },
    )
}

pub fn solve_lp_with(lp: &LinearProgram, options: SimplexOptions) -> SolveResult {
    let lower: Vec<f64> = lp.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = lp.variables.iter().map(|v| v.upper).collect();
    solve_bounded(lp, &lower, &upper, options)
}

/// Solve with variable bounds overriding those in `lp`. Branch and bound uses
/// this to fix binaries per node without cloning the model.
pub(crate) fn solve_bounded(
    lp: &LinearProgram,
    lower: &[f64],
    upper: &[f64],
    options: SimplexOptions,
) -> SolveResult {
    let minimize: Vec<f64> = match lp.sense {
        Sense::Minimize => lp.objective.clone(),
        Sense::Maximize => lp.objective.iter().map(|c| -c).collect(),
    };
    let mut result = Tableau::build(lp, lower, upper, &minimize).run(options);
    // Stale basic values can drift over long pivot sequences; re-solve with
    // Bland when verification fails, which also guards against a Dantzig
    // cycle hiding behind the iteration cap.
    let needs_retry = match result.status {
        SolveStatus::Optimal => lp.max_violation(&result.values) > feasibility_tol(lp),
        SolveStatus::IterationLimit => options.pivot_rule != PivotRule::Bland,
        _ => false,
    };
    if needs_retry {
        let retry = Tableau::build(lp, lower, upper, &minimize).run(SimplexOptions {
            pivot_rule: PivotRule::Bland,
            iteration_limit: options.iteration_limit,
        });
        result = SolveResult {
            pivots: result.pivots + retry.pivots,
            ..retry
        };
    }
    if result.status == SolveStatus::Optimal || !result.values.is_empty() {
        result.objective = lp.objective_value(&result.values);
    } else if lp.sense == Sense::Maximize {
        result.objective = -result.objective;
    }
    result
}

fn feasibility_tol(lp: &LinearProgram) -> f64 {
    let mut scale = 1.0f64;
    for c in &lp.constraints {
        for a in &c.coeffs {
            scale = scale.max(a.abs());
        }
        scale = scale.max(c.rhs.abs());
    }
    1e-6 * scale.max(1.0)
}

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const RATIO_TIE: f64 = 1e-9;

struct Tableau {
    /// Row-reduced constraint matrix over structural + slack + artificial
    /// columns.
    rows: Vec<Vec<f64>>,
    /// Current reduced-cost row for the active phase.
    cost: Vec<f64>,
    /// Phase-2 reduced costs, maintained through phase-1 pivots.
    cost2: Vec<f64>,
    /// Basic variable values, one per row.
    basic_value: Vec<f64>,
    basis: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    /// Columns barred from entering (artificials after phase 1).
    barred: Vec<bool>,
    is_basic: Vec<bool>,
    num_structural: usize,
    num_artificial: usize,
    pivots: u64,
}

impl Tableau {
    fn build(lp: &LinearProgram, var_lower: &[f64], var_upper: &[f64], minimize: &[f64]) -> Tableau {
        let n = lp.num_vars();
        let m = lp.constraints.len();

        // Normalized rows: Ge becomes negated Le; Eq rows keep a fixed slack
        // so every row gets exactly one slack column.
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut rhs: Vec<f64> = Vec::with_capacity(m);
        let mut slack_fixed: Vec<bool> = Vec::with_capacity(m);
        for c in &lp.constraints {
            let (mut coeffs, mut b) = (c.coeffs.clone(), c.rhs);
            if c.relation == Relation::Ge {
                for a in &mut coeffs {
                    *a = -*a;
                }
                b = -b;
            }
            // Row equilibration keeps pivot magnitudes comparable across
            // constraints built from very different unit scales.
            let scale = coeffs
                .iter()
                .fold(0.0f64, |acc, a| acc.max(a.abs()))
                .max(b.abs());
            if scale > 0.0 {
                for a in &mut coeffs {
                    *a /= scale;
                }
                b /= scale;
            }
            rows.push(coeffs);
            rhs.push(b);
            slack_fixed.push(c.relation == Relation::Eq);
        }

        let mut lower: Vec<f64> = var_lower.to_vec();
        let mut upper: Vec<f64> = var_upper.to_vec();
        for fixed in &slack_fixed {
            lower.push(0.0);
            upper.push(if *fixed { 0.0 } else { f64::INFINITY });
        }

        // Residual of each row with all structural variables at their lower
        // bounds decides whether the slack can start basic.
        let mut residual = rhs.clone();
        for (r, row) in rows.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                residual[r] -= a * lower[j];
            }
        }

        let mut basis = Vec::with_capacity(m);
        let mut basic_value = Vec::with_capacity(m);
        let mut artificial_rows = Vec::new();
        for r in 0..m {
            if !slack_fixed[r] && residual[r] >= 0.0 {
                basis.push(n + r); // slack
                basic_value.push(residual[r]);
            } else {
                artificial_rows.push(r);
                basis.push(usize::MAX); // patched below
                basic_value.push(residual[r].abs());
            }
        }

        let num_artificial = artificial_rows.len();
        let ncols = n + m + num_artificial;
        let mut full_rows: Vec<Vec<f64>> = Vec::with_capacity(m);
        for (r, mut row) in rows.into_iter().enumerate() {
            row.resize(ncols, 0.0);
            row[n + r] = 1.0; // slack
            full_rows.push(row);
        }
        for (k, &r) in artificial_rows.iter().enumerate() {
            let col = n + m + k;
            full_rows[r][col] = if residual[r] < 0.0 { -1.0 } else { 1.0 };
            basis[r] = col;
            lower.push(0.0);
            upper.push(f64::INFINITY);
        }

        let mut cost2 = vec![0.0; ncols];
        cost2[..n].copy_from_slice(minimize);

        let mut t = Tableau {
            rows: full_rows,
            cost: vec![0.0; ncols],
            cost2,
            basic_value,
            basis: basis.clone(),
            lower,
            upper,
            at_upper: vec![false; ncols],
            barred: vec![false; ncols],
            is_basic: vec![false; ncols],
            num_structural: n,
            num_artificial,
            pivots: 0,
        };
        for &b in &basis {
            t.is_basic[b] = true;
        }
        // Phase-1 reduced costs: minimize the sum of artificials.
        if num_artificial > 0 {
            for k in 0..num_artificial {
                t.cost[n + m + k] = 1.0;
            }
            for r in 0..m {
                if t.basis[r] >= n + m {
                    let row = t.rows[r].clone();
                    for (j, a) in row.iter().enumerate() {
                        t.cost[j] -= a;
                    }
                }
            }
        }
        // Reduce phase-2 costs against the starting basis as well.
        for r in 0..m {
            let c = t.cost2[t.basis[r]];
            if c != 0.0 {
                let row = t.rows[r].clone();
                for (j, a) in row.iter().enumerate() {
                    t.cost2[j] -= c * a;
                }
            }
        }
        t
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            self.upper[j]
        } else {
            self.lower[j]
        }
    }

    fn run(mut self, options: SimplexOptions) -> SolveResult {
        let limit = options.iteration_limit;

        if self.num_artificial > 0 {
            match self.optimize(options.pivot_rule, limit) {
                Phase::Done => {}
                Phase::Unbounded => {
                    // Phase 1 is bounded below by zero; reaching this means a
                    // numerical breakdown, treat as iteration trouble.
                    return self.finish(SolveStatus::IterationLimit);
                }
                Phase::IterationLimit => return self.finish(SolveStatus::IterationLimit),
            }
            let infeasibility: f64 = (0..self.rows.len())
                .filter(|&r| self.basis[r] >= self.num_structural + self.rows.len())
                .map(|r| self.basic_value[r])
                .sum();
            if infeasibility > 1e-7 {
                return self.finish(SolveStatus::Infeasible);
            }
            self.retire_artificials();
        }

        self.cost = self.cost2.clone();
        match self.optimize(options.pivot_rule, limit) {
            Phase::Done => self.finish(SolveStatus::Optimal),
            Phase::Unbounded => self.finish(SolveStatus::Unbounded),
            Phase::IterationLimit => self.finish(SolveStatus::IterationLimit),
        }
    }

    /// Pivot basic artificials out (or pin them) so phase 2 never moves them.
    fn retire_artificials(&mut self) {
        let art_start = self.num_structural + self.rows.len();
        for r in 0..self.rows.len() {
            if self.basis[r] < art_start {
                continue;
            }
            let col = (0..art_start)
                .find(|&j| !self.is_basic[j] && self.rows[r][j].abs() > PIVOT_TOL
                    && self.upper[j] - self.lower[j] > RATIO_TIE);
            if let Some(j) = col {
                // Degenerate pivot: the artificial sits at zero, so no values
                // move, only the basis relabels.
                let entering_value = self.nonbasic_value(j);
                self.pivot_rows(r, j);
                self.basic_value[r] = entering_value;
            }
        }
        for k in 0..self.num_artificial {
            let j = art_start + k;
            self.barred[j] = true;
            self.upper[j] = 0.0;
        }
    }

    fn optimize(&mut self, rule: PivotRule, limit: u64) -> Phase {
        loop {
            if self.pivots >= limit {
                return Phase::IterationLimit;
            }
            let Some((enter, dir)) = self.choose_entering(rule) else {
                return Phase::Done;
            };
            match self.ratio_test(enter, dir) {
                Step::Unbounded => return Phase::Unbounded,
                Step::BoundFlip(delta) => {
                    self.apply_delta(enter, dir, delta);
                    self.at_upper[enter] = !self.at_upper[enter];
                    self.pivots += 1;
                }
                Step::Pivot(row, delta) => {
                    self.apply_delta(enter, dir, delta);
                    let entering_value = self.nonbasic_value(enter) + dir * delta;
                    let leaving = self.basis[row];
                    // The leaving variable lands on the bound it ran into.
                    self.at_upper[leaving] = dir * self.rows[row][enter] < 0.0;
                    self.pivot_rows(row, enter);
                    self.basic_value[row] = entering_value;
                    self.pivots += 1;
                }
            }
        }
    }

    /// Entering column and move direction: +1 rises off its lower bound, -1
    /// descends from its upper bound.
    fn choose_entering(&self, rule: PivotRule) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.cost.len() {
            if self.is_basic[j] || self.barred[j] {
                continue;
            }
            if self.upper[j] - self.lower[j] <= RATIO_TIE {
                continue; // fixed
            }
            let d = self.cost[j];
            let dir = if !self.at_upper[j] && d < -COST_TOL {
                1.0
            } else if self.at_upper[j] && d > COST_TOL {
                -1.0
            } else {
                continue;
            };
            match rule {
                PivotRule::Bland => return Some((j, dir)),
                PivotRule::Dantzig => {
                    if best.map_or(true, |(_, _, score)| d.abs() > score) {
                        best = Some((j, dir, d.abs()));
                    }
                }
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn ratio_test(&self, enter: usize, dir: f64) -> Step {
        let mut delta = self.upper[enter] - self.lower[enter]; // bound flip
        let mut leave: Option<usize> = None;
        for r in 0..self.rows.len() {
            let a = self.rows[r][enter];
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basis[r];
            let step = dir * a;
            let room = if step > 0.0 {
                // Basic value falls toward its lower bound.
                (self.basic_value[r] - self.lower[b]) / step
            } else {
                if self.upper[b].is_infinite() {
                    continue;
                }
                (self.upper[b] - self.basic_value[r]) / (-step)
            };
            let room = room.max(0.0);
            let take = match leave {
                None => room < delta,
                Some(cur) => {
                    if room < delta - RATIO_TIE {
                        true
                    } else {
                        // Tie: pick the smallest basic index; with Bland
                        // entering this guarantees termination.
                        room <= delta + RATIO_TIE && b < self.basis[cur]
                    }
                }
            };
            if take {
                delta = delta.min(room);
                leave = Some(r);
            }
        }
        match leave {
            None if delta.is_infinite() => Step::Unbounded,
            None => Step::BoundFlip(delta),
            Some(r) => Step::Pivot(r, delta),
        }
    }

    fn apply_delta(&mut self, enter: usize, dir: f64, delta: f64) {
        if delta == 0.0 {
            return;
        }
        for r in 0..self.rows.len() {
            let a = self.rows[r][enter];
            if a.abs() > 0.0 {
                self.basic_value[r] -= dir * a * delta;
            }
        }
    }

    fn pivot_rows(&mut self, row: usize, enter: usize) {
        let leaving = self.basis[row];
        self.is_basic[leaving] = false;
        self.is_basic[enter] = true;
        self.basis[row] = enter;

        let piv = self.rows[row][enter];
        let inv = 1.0 / piv;
        for v in self.rows[row].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = other[enter];
            if f != 0.0 {
                for (v, p) in other.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        let f = self.cost[enter];
        if f != 0.0 {
            for (v, p) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
        }
        let f2 = self.cost2[enter];
        if f2 != 0.0 {
            for (v, p) in self.cost2.iter_mut().zip(&pivot_row) {
                *v -= f2 * p;
            }
        }
    }

    fn finish(self, status: SolveStatus) -> SolveResult {
        let values = if status == SolveStatus::Optimal {
            let mut v: Vec<f64> = (0..self.num_structural)
                .map(|j| self.nonbasic_value(j))
                .collect();
            for (r, &b) in self.basis.iter().enumerate() {
                if b < self.num_structural {
                    v[b] = self.basic_value[r];
                }
            }
            v
        } else {
            Vec::new()
        };
        SolveResult {
            status,
            values,
            objective: 0.0, // filled by the caller in the original sense
            nodes: 0,
            pivots: self.pivots,
        }
    }
}

enum Phase {
    Done,
    Unbounded,
    IterationLimit,
}

enum Step {
    Pivot(usize, f64),
    BoundFlip(f64),
    Unbounded,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LinearProgram, Sense};

    #[test]
    fn maximize_single_variable() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", 0.0, 10.0);
        lp.set_objective(x, 1.0);
        lp.add_constraint(&[(x, 1.0)], Relation::Le, 3.0);
        let r = solve_lp(&lp, PivotRule::Bland);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 3.0).abs() < 1e-9);
        assert!((r.values[x] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_pair() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_variable("x", 0.0, 10.0);
        lp.set_objective(x, 1.0);
        lp.add_constraint(&[(x, 1.0)], Relation::Ge, 2.0);
        lp.add_constraint(&[(x, 1.0)], Relation::Le, 1.0);
        let r = solve_lp(&lp, PivotRule::Bland);
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_detection() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", 0.0, f64::INFINITY);
        lp.set_objective(x, 1.0);
        lp.add_constraint(&[(x, -1.0)], Relation::Le, 1.0);
        let r = solve_lp(&lp, PivotRule::Bland);
        assert_eq!(r.status, SolveStatus::Unbounded);
    }

    #[test]
    fn equality_and_upper_bounds() {
        // max x + 2y  s.t. x + y = 5, y <= 3, x <= 4  ->  (2, 3), obj 8.
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", 0.0, 4.0);
        let y = lp.add_variable("y", 0.0, 3.0);
        lp.set_objective(x, 1.0);
        lp.set_objective(y, 2.0);
        lp.add_constraint(&[(x, 1.0), (y, 1.0)], Relation::Eq, 5.0);
        for rule in [PivotRule::Bland, PivotRule::Dantzig] {
            let r = solve_lp(&lp, rule);
            assert_eq!(r.status, SolveStatus::Optimal);
            assert!((r.objective - 8.0).abs() < 1e-9, "{rule:?}: {}", r.objective);
        }
    }

    #[test]
    fn nonzero_lower_bounds() {
        // min x + y  s.t. x + y >= 7, x in [2, 10], y in [1, 3] -> obj 7.
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_variable("x", 2.0, 10.0);
        let y = lp.add_variable("y", 1.0, 3.0);
        lp.set_objective(x, 1.0);
        lp.set_objective(y, 1.0);
        lp.add_constraint(&[(x, 1.0), (y, 1.0)], Relation::Ge, 7.0);
        let r = solve_lp(&lp, PivotRule::Dantzig);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 7.0).abs() < 1e-9);
    }

    #[test]
    fn determinism_bit_for_bit() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        for i in 0..6 {
            let v = lp.add_variable(format!("v{i}"), 0.0, 1.0);
            lp.set_objective(v, 1.0 + (i as f64) * 0.37);
        }
        lp.add_constraint(
            &(0..6).map(|i| (i, 1.0 + (i % 3) as f64)).collect::<Vec<_>>(),
            Relation::Le,
            4.0,
        );
        let a = solve_lp(&lp, PivotRule::Dantzig);
        let b = solve_lp(&lp, PivotRule::Dantzig);
        assert_eq!(a.values, b.values);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        assert_eq!(a.pivots, b.pivots);
    }
}
