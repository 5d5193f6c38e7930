//! Discrete optimal transport with 1-norm ground cost.

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, INF};

pub type WeightedPoint = (f64, Vec<f64>);

/// Wasserstein-1 distance between two finite distributions.
pub fn wasserstein_1_discrete(p: &[WeightedPoint], q: &[WeightedPoint]) -> Result<f64> {
    let total = |d: &[WeightedPoint]| d.iter().map(|(w, _)| *w).sum::<f64>();
    let (wp, wq) = (total(p), total(q));
    if (wp - wq).abs() > 1e-9 * (1.0 + wp.abs()) || p.iter().chain(q).any(|(w, _)| !(*w >= 0.0)) {
        return Err(Error::WeightMismatch(wp, wq));
    }
    let dim = p.first().or(q.first()).map_or(0, |(_, v)| v.len());
    if p.iter().chain(q).any(|(_, v)| v.len() != dim) {
        return Err(Error::invalid("transport points have different dimensions"));
    }
    let mut lp = LinearProgram::new();
    let mut plan = vec![vec![0usize; q.len()]; p.len()];
    for (i, (_, a)) in p.iter().enumerate() {
        for (j, (_, b)) in q.iter().enumerate() {
            let cost: f64 = a.iter().zip(b).map(|(u, v)| (u - v).abs()).sum();
            plan[i][j] = lp.add_var(cost, 0.0, INF);
        }
    }
    for (i, (w, _)) in p.iter().enumerate() {
        lp.add_eq(plan[i].iter().map(|&v| (v, 1.0)).collect(), *w);
    }
    for (j, (w, _)) in q.iter().enumerate() {
        lp.add_eq(plan.iter().map(|row| (row[j], 1.0)).collect(), *w);
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective.max(0.0)),
        s => Err(Error::Solver(format!("transport LP ended {s:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_distributions_are_at_distance_zero() {
        let p = vec![(0.3, vec![1.0, 2.0]), (0.7, vec![-1.0, 4.0])];
        assert!(wasserstein_1_discrete(&p, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn point_masses_use_one_norm() {
        let d = wasserstein_1_discrete(&[(1.0, vec![0.0, 3.0])], &[(1.0, vec![2.0, -1.0])]).unwrap();
        assert!((d - 6.0).abs() < 1e-12);
    }

    #[test]
    fn split_mass_to_midpoint() {
        let p = vec![(0.5, vec![0.0]), (0.5, vec![2.0])];
        let d = wasserstein_1_discrete(&p, &[(1.0, vec![1.0])]).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_weights_are_rejected() {
        let r = wasserstein_1_discrete(&[(1.0, vec![0.0])], &[(0.5, vec![0.0])]);
        assert!(matches!(r, Err(Error::WeightMismatch(..))));
    }
}
