//! Linear programs with primal and dual solutions, plus a branch-and-bound
//! solver for linear programs with complementarity constraints.
//!
//! A [`LinearProgram`] minimizes `cᵀy` over sparse rows of the form
//! `a·y ≥ b`, `a·y ≤ b` or `a·y = b` and simple bounds `l ≤ y ≤ u`.
//! Row multipliers follow the Lagrangian convention `c − Aᵀπ = d`: a `≥` row
//! carries `π ≥ 0`, a `≤` row carries `π ≤ 0` and an equality row is free.

mod dump;
mod lpcc;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::{LP_COMPLEMENTARITY, LP_DUALITY_GAP};

pub use dump::write_lp_text;
pub use lpcc::{solve_lpcc, ComplementarityPair, ComplementarityProblem, LpccSolution, LpccStatus, Sense};
pub use simplex::RevisedSimplex;

pub const INF: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub kind: RowKind,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, y: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * y[j]).sum()
    }

    /// Signed slack: nonnegative when the row is satisfied (zero for equalities).
    pub fn slack(&self, y: &[f64]) -> f64 {
        let act = self.activity(y);
        match self.kind {
            RowKind::Ge => act - self.rhs,
            RowKind::Le => self.rhs - act,
            RowKind::Eq => -(act - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, kind: RowKind, rhs: f64) -> usize {
        self.rows.push(Row { coeffs, kind, rhs });
        self.rows.len() - 1
    }

    pub fn add_ge(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.add_row(coeffs, RowKind::Ge, rhs)
    }

    pub fn add_le(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.add_row(coeffs, RowKind::Le, rhs)
    }

    pub fn add_eq(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.add_row(coeffs, RowKind::Eq, rhs)
    }

    pub fn objective_value(&self, y: &[f64]) -> f64 {
        self.objective.iter().zip(y).map(|(c, v)| c * v).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::MalformedLp(format!(
                "{} costs but {} lower and {} upper bounds",
                n,
                self.lower.len(),
                self.upper.len()
            )));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || !self.objective[j].is_finite() {
                return Err(Error::MalformedLp(format!("variable {j} has a non-finite cost or NaN bound")));
            }
            if l > u || l == INF || u == -INF {
                return Err(Error::MalformedLp(format!("variable {j} has empty bounds [{l}, {u}]")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::MalformedLp(format!("row {i} has a non-finite right-hand side")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(Error::MalformedLp(format!("row {i} references variable {j} of {n}")));
                }
                if !a.is_finite() {
                    return Err(Error::MalformedLp(format!("row {i} has a non-finite coefficient")));
                }
            }
        }
        Ok(())
    }

    /// Maximum violation of rows and bounds at `y`.
    pub fn max_violation(&self, y: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &v) in y.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        for row in &self.rows {
            let act = row.activity(y);
            let viol = match row.kind {
                RowKind::Ge => row.rhs - act,
                RowKind::Le => act - row.rhs,
                RowKind::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values; meaningful only when optimal.
    pub x: Vec<f64>,
    /// Row multipliers `π` (see module docs for signs).
    pub row_duals: Vec<f64>,
    /// Reduced costs `d = c − Aᵀπ` of the structural variables.
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    /// Dual objective evaluated from `π`, `d` and the finite bounds.
    pub dual_objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn duality_gap(&self) -> f64 {
        (self.objective - self.dual_objective).abs()
    }

    /// Strong duality and complementary slackness within the engine tolerances.
    pub fn certifies_optimality(&self, lp: &LinearProgram) -> bool {
        if !self.is_optimal() {
            return false;
        }
        if self.duality_gap() > LP_DUALITY_GAP * (1.0 + self.objective.abs()) {
            return false;
        }
        lp.rows.iter().zip(&self.row_duals).all(|(row, &pi)| {
            let sign_ok = match row.kind {
                RowKind::Ge => pi >= -LP_COMPLEMENTARITY,
                RowKind::Le => pi <= LP_COMPLEMENTARITY,
                RowKind::Eq => true,
            };
            let slack = row.slack(&self.x).abs();
            sign_ok && (slack * pi.abs()) <= LP_COMPLEMENTARITY * (1.0 + pi.abs())
        })
    }
}

/// A pluggable LP backend.
pub trait LpSolver: Sync {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution>;
}

/// Solves `lp` with the default engine.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    RevisedSimplex::default().solve(lp)
}
