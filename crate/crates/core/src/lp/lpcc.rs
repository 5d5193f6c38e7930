//! Linear programs with complementarity constraints, solved by depth-first
//! branch-and-bound over the complementarity pairs.

use serde::{Deserialize, Serialize};

use super::{solve_lp, LinearProgram, LpStatus, RowKind, INF};
use crate::error::{Error, Result};
use crate::tolerances::LPCC_COMPLEMENTARITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// `0 ≤ slack(row) ⊥ y[multiplier] ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplementarityPair {
    pub row: usize,
    pub multiplier: usize,
}

#[derive(Debug, Clone)]
pub struct ComplementarityProblem {
    pub lp: LinearProgram,
    pub pairs: Vec<ComplementarityPair>,
    pub sense: Sense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpccStatus {
    /// Tree exhausted; `objective` is certified.
    Optimal,
    /// Node limit reached; `bound` is a valid bound on the optimum.
    NodeLimit,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpccSolution {
    pub status: LpccStatus,
    /// Best complementary objective found (`NaN` when none).
    pub objective: f64,
    /// Optimistic bound: an upper bound when maximizing, a lower bound when minimizing.
    pub bound: f64,
    pub point: Option<Vec<f64>>,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fix {
    Open,
    SlackZero,
    MultiplierZero,
}

struct Node {
    fixes: Vec<Fix>,
    /// Relaxation value of the parent, in minimization form.
    parent_bound: f64,
}

impl ComplementarityProblem {
    fn validate(&self) -> Result<()> {
        self.lp.validate()?;
        for (k, pair) in self.pairs.iter().enumerate() {
            let row = self
                .lp
                .rows
                .get(pair.row)
                .ok_or_else(|| Error::MalformedLp(format!("pair {k} references row {}", pair.row)))?;
            if row.kind == RowKind::Eq {
                return Err(Error::MalformedLp(format!("pair {k} references an equality row")));
            }
            if pair.multiplier >= self.lp.num_vars() || self.lp.lower[pair.multiplier] < 0.0 {
                return Err(Error::MalformedLp(format!(
                    "pair {k} multiplier must be a nonnegative variable"
                )));
            }
        }
        Ok(())
    }

    fn node_lp(&self, fixes: &[Fix]) -> LinearProgram {
        let mut lp = self.lp.clone();
        if self.sense == Sense::Maximize {
            for c in lp.objective.iter_mut() {
                *c = -*c;
            }
        }
        for (pair, fix) in self.pairs.iter().zip(fixes) {
            match fix {
                Fix::Open => {}
                Fix::SlackZero => lp.rows[pair.row].kind = RowKind::Eq,
                Fix::MultiplierZero => lp.upper[pair.multiplier] = 0.0,
            }
        }
        lp
    }

    fn signed(&self, v: f64) -> f64 {
        match self.sense {
            Sense::Minimize => v,
            Sense::Maximize => -v,
        }
    }
}

/// Most violated open pair as `(index, slack·multiplier)`, or `None` when the
/// point is complementary.
fn most_violated(p: &ComplementarityProblem, fixes: &[Fix], y: &[f64]) -> Option<(usize, f64)> {
    let mut worst: Option<(usize, f64)> = None;
    for (k, pair) in p.pairs.iter().enumerate() {
        if fixes[k] != Fix::Open {
            continue;
        }
        let s = p.lp.rows[pair.row].slack(y).max(0.0);
        let m = y[pair.multiplier].max(0.0);
        if s.min(m) <= LPCC_COMPLEMENTARITY {
            continue;
        }
        let prod = s * m;
        if worst.map_or(true, |(_, w)| prod > w) {
            worst = Some((k, prod));
        }
    }
    worst
}

/// Solves `p` by branch-and-bound, exploring at most `node_limit` nodes.
pub fn solve_lpcc(p: &ComplementarityProblem, node_limit: usize) -> Result<LpccSolution> {
    p.validate()?;
    let tol = |v: f64| 1e-9 * (1.0 + v.abs());
    let mut incumbent = INF;
    let mut point: Option<Vec<f64>> = None;
    let mut nodes = 0usize;
    let mut stack = vec![Node {
        fixes: vec![Fix::Open; p.pairs.len()],
        parent_bound: -INF,
    }];

    while let Some(node) = stack.pop() {
        if node.parent_bound >= incumbent - tol(incumbent) {
            continue;
        }
        if nodes >= node_limit {
            stack.push(node);
            break;
        }
        nodes += 1;
        let sol = solve_lp(&p.node_lp(&node.fixes))?;
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::IterationLimit => {
                return Err(Error::Solver("LPCC node relaxation hit the iteration limit".into()))
            }
            LpStatus::Unbounded => {
                match node.fixes.iter().position(|f| *f == Fix::Open) {
                    Some(k) => push_children(&mut stack, &node.fixes, k, -INF),
                    None => {
                        return Ok(LpccSolution {
                            status: LpccStatus::Unbounded,
                            objective: p.signed(-INF),
                            bound: p.signed(-INF),
                            point: None,
                            nodes,
                        })
                    }
                }
                continue;
            }
            LpStatus::Optimal => {}
        }
        let value = sol.objective;
        if value >= incumbent - tol(incumbent) {
            continue;
        }
        let Some((branch, _)) = most_violated(p, &node.fixes, &sol.x) else {
            incumbent = value;
            point = Some(sol.x);
            continue;
        };

        // Complete the pattern suggested by the relaxation's multipliers.
        let completed: Vec<Fix> = node
            .fixes
            .iter()
            .zip(&p.pairs)
            .map(|(&f, pair)| match f {
                Fix::Open if sol.x[pair.multiplier] > LPCC_COMPLEMENTARITY => Fix::SlackZero,
                Fix::Open => Fix::MultiplierZero,
                fixed => fixed,
            })
            .collect();
        let heur = solve_lp(&p.node_lp(&completed))?;
        if heur.is_optimal() && heur.objective < incumbent {
            incumbent = heur.objective;
            point = Some(heur.x);
            if incumbent <= value + tol(value) {
                continue;
            }
        }
        push_children(&mut stack, &node.fixes, branch, value);
    }

    let open_bound = stack
        .iter()
        .map(|n| n.parent_bound)
        .fold(INF, f64::min);
    let exhausted = stack.iter().all(|n| n.parent_bound >= incumbent - tol(incumbent));
    let status = if exhausted {
        if point.is_some() {
            LpccStatus::Optimal
        } else {
            LpccStatus::Infeasible
        }
    } else {
        LpccStatus::NodeLimit
    };
    let bound = if exhausted { incumbent } else { open_bound.min(incumbent) };
    Ok(LpccSolution {
        status,
        objective: if point.is_some() { p.signed(incumbent) } else { f64::NAN },
        bound: p.signed(bound),
        point,
        nodes,
    })
}

fn push_children(stack: &mut Vec<Node>, fixes: &[Fix], k: usize, bound: f64) {
    for fix in [Fix::MultiplierZero, Fix::SlackZero] {
        let mut child = fixes.to_vec();
        child[k] = fix;
        stack.push(Node {
            fixes: child,
            parent_bound: bound,
        });
    }
}
