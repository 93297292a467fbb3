//! Dense two-phase simplex over any [`Scalar`].
//!
//! Pricing is Dantzig's rule until a run of degenerate pivots is seen, after
//! which the solver switches to Bland's rule for the rest of the phase. In
//! exact mode this terminates with an exact optimum; in float mode a
//! feasibility tolerance of `1e-9` is used and an iteration cap turns
//! stalling into [`Error::NumericFailure`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar, FLOAT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub bound: VarBound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S: Scalar> {
    pub name: String,
    pub coeffs: Vec<(usize, S)>,
    pub relation: Relation,
    pub rhs: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LPProblem<S: Scalar> {
    sense: Sense,
    vars: Vec<Variable>,
    objective: Vec<S>,
    constraints: Vec<Constraint<S>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LPSolution<S: Scalar> {
    pub status: LpStatus,
    /// Objective value in the problem's own sense; meaningful when optimal.
    pub value: S,
    /// One entry per problem variable.
    pub point: Vec<S>,
    /// Basic columns of the final tableau (internal column indices).
    pub basis: Vec<usize>,
    pub pivots: usize,
}

impl<S: Scalar> LPProblem<S> {
    pub fn new(sense: Sense) -> Self {
        LPProblem {
            sense,
            vars: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, bound: VarBound) -> usize {
        self.vars.push(Variable {
            name: name.into(),
            bound,
        });
        self.objective.push(S::zero());
        self.vars.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, c: S) {
        self.objective[var] = c;
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, S)>,
        relation: Relation,
        rhs: S,
    ) -> usize {
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn mode(&self) -> Mode {
        S::MODE
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn objective(&self) -> &[S] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint<S>] {
        &self.constraints
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Objective at `point`.
    pub fn evaluate(&self, point: &[S]) -> S {
        self.objective
            .iter()
            .zip(point)
            .fold(S::zero(), |acc, (c, x)| acc + c.clone() * x.clone())
    }

    /// Largest constraint or bound violation at `point` (zero if feasible).
    pub fn max_violation(&self, point: &[S]) -> S {
        let mut worst = S::zero();
        for (v, x) in self.vars.iter().zip(point) {
            if v.bound == VarBound::NonNegative && *x < S::zero() {
                worst = S::max_of(worst, -x.clone());
            }
        }
        for c in &self.constraints {
            let lhs = c
                .coeffs
                .iter()
                .fold(S::zero(), |acc, (j, a)| acc + a.clone() * point[*j].clone());
            let diff = lhs - c.rhs.clone();
            let viol = match c.relation {
                Relation::Le => S::max_of(diff, S::zero()),
                Relation::Ge => S::max_of(-diff, S::zero()),
                Relation::Eq => diff.abs_val(),
            };
            worst = S::max_of(worst, viol);
        }
        worst
    }

    pub fn is_feasible(&self, point: &[S]) -> bool {
        !self.max_violation(point).is_positive_tol()
    }

    pub fn solve(&self) -> Result<LPSolution<S>> {
        Tableau::build(self)?.run(self)
    }
}

/// Internal column bookkeeping: `(+part, Some(-part))` for split free
/// variables.
struct Tableau<S: Scalar> {
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    basis: Vec<usize>,
    columns: usize,
    structural: Vec<(usize, Option<usize>)>,
    artificial_start: usize,
    pivots: usize,
}

fn is_pos<S: Scalar>(x: &S) -> bool {
    match S::MODE {
        Mode::Exact => *x > S::zero(),
        Mode::Float => x.to_f64() > FLOAT_TOL,
    }
}

fn is_neg<S: Scalar>(x: &S) -> bool {
    match S::MODE {
        Mode::Exact => *x < S::zero(),
        Mode::Float => x.to_f64() < -FLOAT_TOL,
    }
}

impl<S: Scalar> Tableau<S> {
    fn build(p: &LPProblem<S>) -> Result<Self> {
        let mut structural = Vec::with_capacity(p.vars.len());
        let mut columns = 0;
        for v in &p.vars {
            match v.bound {
                VarBound::NonNegative => {
                    structural.push((columns, None));
                    columns += 1;
                }
                VarBound::Free => {
                    structural.push((columns, Some(columns + 1)));
                    columns += 2;
                }
            }
        }
        let m = p.constraints.len();
        let mut dense: Vec<Vec<S>> = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut relations = Vec::with_capacity(m);
        for c in &p.constraints {
            let mut row = vec![S::zero(); columns];
            for (j, a) in &c.coeffs {
                if *j >= p.vars.len() {
                    return Err(Error::InvalidParameter(format!(
                        "constraint {} references unknown variable {j}",
                        c.name
                    )));
                }
                let (pos, neg) = structural[*j];
                row[pos] = row[pos].clone() + a.clone();
                if let Some(neg) = neg {
                    row[neg] = row[neg].clone() - a.clone();
                }
            }
            let mut b = c.rhs.clone();
            let mut rel = c.relation;
            // `a·x ≥ 0` as `−a·x ≤ 0` starts from a slack, not an artificial
            if b < S::zero() || (b.is_zero() && rel == Relation::Ge) {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                b = -b;
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            dense.push(row);
            rhs.push(b);
            relations.push(rel);
        }
        // slacks and surpluses
        let slack_count = relations.iter().filter(|r| **r != Relation::Eq).count();
        let artificial_count = relations.iter().filter(|r| **r != Relation::Le).count();
        let artificial_start = columns + slack_count;
        let total = artificial_start + artificial_count;
        let mut basis = vec![0; m];
        let mut next_slack = columns;
        let mut next_art = artificial_start;
        for (i, row) in dense.iter_mut().enumerate() {
            row.resize(total, S::zero());
            match relations[i] {
                Relation::Le => {
                    row[next_slack] = S::one();
                    basis[i] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -S::one();
                    next_slack += 1;
                    row[next_art] = S::one();
                    basis[i] = next_art;
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = S::one();
                    basis[i] = next_art;
                    next_art += 1;
                }
            }
        }
        Ok(Tableau {
            rows: dense,
            rhs,
            basis,
            columns: total,
            structural,
            artificial_start,
            pivots: 0,
        })
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = S::one() / self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * inv.clone();
            }
        }
        self.rhs[r] = self.rhs[r].clone() * inv;
        self.rows[r][c] = S::one();
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for (j, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    row[j] = row[j].clone() - factor.clone() * pv.clone();
                }
            }
            row[c] = S::zero();
            self.rhs[i] = self.rhs[i].clone() - factor * pivot_rhs.clone();
            if S::MODE == Mode::Float && self.rhs[i].to_f64().abs() < 1e-13 {
                self.rhs[i] = S::zero();
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Reduced costs `c_j − c_B B⁻¹ A_j` for the given cost vector over the
    /// first `active` columns.
    fn reduced_costs(&self, cost: &[S], active: usize) -> Vec<S> {
        let mut d: Vec<S> = cost[..active].to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                let a = &self.rows[i][j];
                if !a.is_zero() {
                    *dj = dj.clone() - cb.clone() * a.clone();
                }
            }
        }
        d
    }

    /// Minimises `cost` over the current basis using the first `active`
    /// columns. Returns `false` if unbounded.
    fn optimize(&mut self, cost: &[S], active: usize) -> Result<bool> {
        let m = self.rows.len();
        let degenerate_limit = 2 * (m + active);
        let cap = 50 * (m + active) + 1000;
        let mut bland = false;
        let mut degenerate_run = 0;
        let mut iterations = 0;
        loop {
            iterations += 1;
            if iterations > cap {
                return Err(Error::NumericFailure(format!(
                    "simplex iteration cap {cap} reached"
                )));
            }
            let d = self.reduced_costs(cost, active);
            let entering = if bland {
                (0..active).find(|&j| is_neg(&d[j]))
            } else {
                let mut best: Option<usize> = None;
                for j in 0..active {
                    if is_neg(&d[j]) && best.map_or(true, |b| d[j] < d[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, S)> = None;
            for i in 0..m {
                let a = &self.rows[i][c];
                if !is_pos(a) {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best || (ratio == best && self.basis[i] < self.basis[r]) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leave else {
                return Ok(false);
            };
            if ratio.is_zero_tol() {
                degenerate_run += 1;
                if degenerate_run > degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
    }

    fn run(mut self, p: &LPProblem<S>) -> Result<LPSolution<S>> {
        let m = self.rows.len();
        let n_art = self.columns - self.artificial_start;
        if n_art > 0 {
            let mut cost = vec![S::zero(); self.columns];
            for c in cost.iter_mut().skip(self.artificial_start) {
                *c = S::one();
            }
            self.optimize(&cost, self.columns)?;
            let infeasibility = self
                .basis
                .iter()
                .zip(&self.rhs)
                .filter(|(b, _)| **b >= self.artificial_start)
                .fold(S::zero(), |acc, (_, v)| acc + v.clone());
            if is_pos(&infeasibility) {
                return Ok(self.finish(p, LpStatus::Infeasible));
            }
            // drive remaining artificials out of the basis
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] < self.artificial_start {
                    i += 1;
                    continue;
                }
                let col = (0..self.artificial_start).find(|&j| !self.rows[i][j].is_zero_tol());
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        // redundant row
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                    }
                }
            }
        }
        let _ = m;
        let active = self.artificial_start;
        let mut cost = vec![S::zero(); self.columns];
        for (v, &(pos, neg)) in self.structural.iter().enumerate() {
            let c = match p.sense {
                Sense::Minimize => p.objective[v].clone(),
                Sense::Maximize => -p.objective[v].clone(),
            };
            cost[pos] = c.clone();
            if let Some(neg) = neg {
                cost[neg] = -c;
            }
        }
        let bounded = self.optimize(&cost, active)?;
        let status = if bounded {
            LpStatus::Optimal
        } else {
            LpStatus::Unbounded
        };
        Ok(self.finish(p, status))
    }

    fn finish(&self, p: &LPProblem<S>, status: LpStatus) -> LPSolution<S> {
        let mut column_values = vec![S::zero(); self.columns];
        for (i, &b) in self.basis.iter().enumerate() {
            column_values[b] = self.rhs[i].clone();
        }
        let point: Vec<S> = self
            .structural
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => column_values[pos].clone() - column_values[neg].clone(),
                None => column_values[pos].clone(),
            })
            .collect();
        let value = match status {
            LpStatus::Optimal => p.evaluate(&point),
            _ => S::zero(),
        };
        LPSolution {
            status,
            value,
            point,
            basis: self.basis.clone(),
            pivots: self.pivots,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn textbook_maximisation() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let mut lp = LPProblem::<Rational>::new(Sense::Maximize);
        let x = lp.add_var("x", VarBound::NonNegative);
        let y = lp.add_var("y", VarBound::NonNegative);
        lp.set_objective(x, q(3, 1));
        lp.set_objective(y, q(5, 1));
        lp.add_constraint("a", vec![(x, q(1, 1))], Relation::Le, q(4, 1));
        lp.add_constraint("b", vec![(y, q(2, 1))], Relation::Le, q(12, 1));
        lp.add_constraint("c", vec![(x, q(3, 1)), (y, q(2, 1))], Relation::Le, q(18, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, q(36, 1));
        assert_eq!(s.point, vec![q(2, 1), q(6, 1)]);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x subject to x + y = 1, y ≤ 3, x free → x = −2
        let mut lp = LPProblem::<Rational>::new(Sense::Minimize);
        let x = lp.add_var("x", VarBound::Free);
        let y = lp.add_var("y", VarBound::NonNegative);
        lp.set_objective(x, q(1, 1));
        lp.add_constraint("sum", vec![(x, q(1, 1)), (y, q(1, 1))], Relation::Eq, q(1, 1));
        lp.add_constraint("cap", vec![(y, q(1, 1))], Relation::Le, q(3, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.point, vec![q(-2, 1), q(3, 1)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LPProblem::<Rational>::new(Sense::Minimize);
        let x = lp.add_var("x", VarBound::NonNegative);
        lp.add_constraint("neg", vec![(x, q(1, 1))], Relation::Le, q(-1, 1));
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);

        let mut lp = LPProblem::<f64>::new(Sense::Maximize);
        let x = lp.add_var("x", VarBound::NonNegative);
        lp.set_objective(x, 1.0);
        lp.add_constraint("ge", vec![(x, 1.0)], Relation::Ge, 1.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LPProblem::<Rational>::new(Sense::Minimize);
        let x = lp.add_var("x", VarBound::NonNegative);
        let y = lp.add_var("y", VarBound::NonNegative);
        lp.set_objective(x, q(1, 1));
        lp.set_objective(y, q(2, 1));
        let row = vec![(x, q(1, 1)), (y, q(1, 1))];
        lp.add_constraint("a", row.clone(), Relation::Eq, q(2, 1));
        lp.add_constraint("b", row.iter().map(|(j, v)| (*j, v.clone() * q(2, 1))).collect(), Relation::Eq, q(4, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, q(2, 1));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under naive Dantzig pricing
        let mut lp = LPProblem::<Rational>::new(Sense::Minimize);
        let v: Vec<usize> = (0..4).map(|i| lp.add_var(format!("x{i}"), VarBound::NonNegative)).collect();
        for (j, c) in [q(-3, 4), q(150, 1), q(-1, 50), q(6, 1)].into_iter().enumerate() {
            lp.set_objective(v[j], c);
        }
        lp.add_constraint(
            "r1",
            vec![(v[0], q(1, 4)), (v[1], q(-60, 1)), (v[2], q(-1, 25)), (v[3], q(9, 1))],
            Relation::Le,
            q(0, 1),
        );
        lp.add_constraint(
            "r2",
            vec![(v[0], q(1, 2)), (v[1], q(-90, 1)), (v[2], q(-1, 50)), (v[3], q(3, 1))],
            Relation::Le,
            q(0, 1),
        );
        lp.add_constraint("r3", vec![(v[2], q(1, 1))], Relation::Le, q(1, 1));
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, q(-1, 20));
    }

    #[test]
    fn float_matches_exact() {
        let mut lp = LPProblem::<f64>::new(Sense::Maximize);
        let x = lp.add_var("x", VarBound::NonNegative);
        let y = lp.add_var("y", VarBound::NonNegative);
        lp.set_objective(x, 3.0);
        lp.set_objective(y, 5.0);
        lp.add_constraint("a", vec![(x, 1.0)], Relation::Le, 4.0);
        lp.add_constraint("b", vec![(y, 2.0)], Relation::Le, 12.0);
        lp.add_constraint("c", vec![(x, 3.0), (y, 2.0)], Relation::Le, 18.0);
        let s = lp.solve().unwrap();
        assert!((s.value - 36.0).abs() < 1e-9);
        assert!(lp.is_feasible(&s.point));
    }
}
