//! Bounded-variable revised simplex.
//!
//! Every row `i` gets a logical variable `s_i = a_i·y` whose bounds encode
//! the row sense, so the working system is `[A | −I] (y, s) = 0` with the
//! all-logical starting basis `B₀ = −I`. The basis inverse is kept in product
//! form (a file of eta columns) and rebuilt from scratch periodically.
//! Phase 1 minimizes the sum of basic bound violations; the Harris ratio test
//! and a Bland fallback after long degenerate runs keep the iteration finite.

use super::{LinearProgram, LpSolution, LpSolver, LpStatus, RowKind, INF};
use crate::error::{Error, Result};
use crate::tolerances::{LP_FEASIBILITY, LP_OPTIMALITY, LP_PIVOT};

#[derive(Debug, Clone)]
pub struct RevisedSimplex {
    /// Defaults to `50·(rows + cols) + 1000`.
    pub max_iterations: Option<usize>,
    pub refactor_interval: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
}

impl Default for RevisedSimplex {
    fn default() -> Self {
        RevisedSimplex {
            max_iterations: None,
            refactor_interval: 80,
            bland_after: 60,
        }
    }
}

impl LpSolver for RevisedSimplex {
    fn solve(&self, lp: &LinearProgram) -> Result<LpSolution> {
        lp.validate()?;
        let scaled = Scaled::new(lp);
        let limit = self
            .max_iterations
            .unwrap_or(50 * (scaled.m + scaled.n) + 1000);
        let mut engine = Engine::new(&scaled, self.refactor_interval, self.bland_after);
        let status = engine.run(limit)?;
        Ok(engine.extract(lp, status))
    }
}

/// The problem after geometric row/column scaling.
struct Scaled {
    m: usize,
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<f64>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    obj_scale: f64,
}

fn pow2_round(v: f64) -> f64 {
    if !v.is_finite() || v <= 0.0 {
        return 1.0;
    }
    2f64.powi(v.log2().round() as i32)
}

impl Scaled {
    fn new(lp: &LinearProgram) -> Self {
        let m = lp.num_rows();
        let n = lp.num_vars();

        // Merge duplicate (row, col) entries and build CSC.
        let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                if a != 0.0 {
                    triplets.push((j, i, a));
                }
            }
        }
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut col_ptr = vec![0usize; n + 1];
        let mut row_idx = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (j, i, a) in triplets {
            if last == Some((j, i)) {
                *vals.last_mut().unwrap() += a;
                continue;
            }
            last = Some((j, i));
            row_idx.push(i);
            vals.push(a);
            col_ptr[j + 1] += 1;
        }
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }

        let mut row_scale = vec![1.0; m];
        let mut col_scale = vec![1.0; n];
        for _ in 0..6 {
            let mut rmax = vec![0.0f64; m];
            let mut rmin = vec![INF; m];
            for j in 0..n {
                for k in col_ptr[j]..col_ptr[j + 1] {
                    let v = (vals[k] * col_scale[j]).abs();
                    if v > 0.0 {
                        let i = row_idx[k];
                        rmax[i] = rmax[i].max(v);
                        rmin[i] = rmin[i].min(v);
                    }
                }
            }
            for i in 0..m {
                if rmax[i] > 0.0 {
                    row_scale[i] = 1.0 / (rmax[i] * rmin[i]).sqrt();
                }
            }
            for j in 0..n {
                let (mut cmax, mut cmin) = (0.0f64, INF);
                for k in col_ptr[j]..col_ptr[j + 1] {
                    let v = (vals[k] * row_scale[row_idx[k]]).abs();
                    if v > 0.0 {
                        cmax = cmax.max(v);
                        cmin = cmin.min(v);
                    }
                }
                if cmax > 0.0 {
                    col_scale[j] = 1.0 / (cmax * cmin).sqrt();
                }
            }
        }
        for s in row_scale.iter_mut().chain(col_scale.iter_mut()) {
            *s = pow2_round(*s);
        }
        for j in 0..n {
            for k in col_ptr[j]..col_ptr[j + 1] {
                vals[k] *= row_scale[row_idx[k]] * col_scale[j];
            }
        }

        let cmax = (0..n)
            .map(|j| (lp.objective[j] * col_scale[j]).abs())
            .fold(0.0f64, f64::max);
        let obj_scale = if cmax > 0.0 { pow2_round(1.0 / cmax) } else { 1.0 };

        let mut cost = vec![0.0; n + m];
        let mut lo = vec![0.0; n + m];
        let mut hi = vec![0.0; n + m];
        for j in 0..n {
            cost[j] = lp.objective[j] * col_scale[j] * obj_scale;
            lo[j] = lp.lower[j] / col_scale[j];
            hi[j] = lp.upper[j] / col_scale[j];
        }
        for (i, row) in lp.rows.iter().enumerate() {
            let b = row.rhs * row_scale[i];
            let (l, u) = match row.kind {
                RowKind::Ge => (b, INF),
                RowKind::Le => (-INF, b),
                RowKind::Eq => (b, b),
            };
            lo[n + i] = l;
            hi[n + i] = u;
        }

        Scaled {
            m,
            n,
            col_ptr,
            row_idx,
            vals,
            cost,
            lo,
            hi,
            row_scale,
            col_scale,
            obj_scale,
        }
    }

    fn col_nnz(&self, j: usize) -> usize {
        if j < self.n {
            self.col_ptr[j + 1] - self.col_ptr[j]
        } else {
            1
        }
    }

    #[inline]
    fn for_col(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n {
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                f(self.row_idx[k], self.vals[k]);
            }
        } else {
            f(j - self.n, -1.0);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    Lower,
    Upper,
    Free,
}

struct Eta {
    pos: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

enum Step {
    Flip(f64),
    Pivot { pos: usize, theta: f64, to_upper: bool },
    Unbounded,
}

struct Engine<'a> {
    p: &'a Scaled,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    etas: Vec<Eta>,
    since_refactor: usize,
    refactor_interval: usize,
    bland_after: usize,
    degenerate_streak: usize,
    bland: bool,
    iterations: usize,
}

impl<'a> Engine<'a> {
    fn new(p: &'a Scaled, refactor_interval: usize, bland_after: usize) -> Self {
        let nt = p.n + p.m;
        let mut x = vec![0.0; nt];
        let mut state = vec![VarState::Basic; nt];
        for j in 0..p.n {
            let (l, u) = (p.lo[j], p.hi[j]);
            if l.is_finite() {
                x[j] = l;
                state[j] = VarState::Lower;
            } else if u.is_finite() {
                x[j] = u;
                state[j] = VarState::Upper;
            } else {
                state[j] = VarState::Free;
            }
        }
        let basis: Vec<usize> = (p.n..nt).collect();
        let mut e = Engine {
            p,
            x,
            state,
            basis,
            etas: Vec::new(),
            since_refactor: 0,
            refactor_interval: refactor_interval.max(1),
            bland_after,
            degenerate_streak: 0,
            bland: false,
            iterations: 0,
        };
        e.recompute_basics();
        e
    }

    fn apply_etas(&self, v: &mut [f64]) {
        for eta in &self.etas {
            let t = v[eta.pos];
            if t == 0.0 {
                continue;
            }
            let t = t / eta.pivot;
            v[eta.pos] = t;
            for &(i, a) in &eta.entries {
                v[i] -= a * t;
            }
        }
    }

    /// `B⁻¹ M_j` in basis-position space.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.p.m];
        self.p.for_col(j, |i, a| v[i] = -a);
        self.apply_etas(&mut v);
        v
    }

    /// `c_Bᵀ B⁻¹`, returned in row space.
    fn btran(&self, mut u: Vec<f64>) -> Vec<f64> {
        for eta in self.etas.iter().rev() {
            let mut s = u[eta.pos];
            for &(i, a) in &eta.entries {
                s -= u[i] * a;
            }
            u[eta.pos] = s / eta.pivot;
        }
        for v in u.iter_mut() {
            *v = -*v;
        }
        u
    }

    fn push_eta(&mut self, pos: usize, alpha: &[f64]) {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != pos && a.abs() > 1e-14)
            .map(|(i, &a)| (i, a))
            .collect();
        self.etas.push(Eta {
            pos,
            pivot: alpha[pos],
            entries,
        });
    }

    fn recompute_basics(&mut self) {
        let mut w = vec![0.0; self.p.m];
        for j in 0..self.p.n + self.p.m {
            if self.state[j] != VarState::Basic && self.x[j] != 0.0 {
                let xj = self.x[j];
                self.p.for_col(j, |i, a| w[i] += a * xj);
            }
        }
        // x_B = −B⁻¹w and B₀⁻¹ = −I, so only the etas remain.
        self.apply_etas(&mut w);
        for (pos, &v) in self.basis.iter().enumerate() {
            self.x[v] = w[pos];
        }
    }

    fn park_nonbasic(&mut self, j: usize) {
        let (l, u) = (self.p.lo[j], self.p.hi[j]);
        let xj = self.x[j];
        if l.is_finite() && (!u.is_finite() || (xj - l).abs() <= (u - xj).abs()) {
            self.x[j] = l;
            self.state[j] = VarState::Lower;
        } else if u.is_finite() {
            self.x[j] = u;
            self.state[j] = VarState::Upper;
        } else {
            self.x[j] = 0.0;
            self.state[j] = VarState::Free;
        }
    }

    /// Rebuilds the eta file for the current basic set, starting from `−I`.
    fn reinvert(&mut self) {
        let p = self.p;
        let mut in_target = vec![false; p.n + p.m];
        for &v in &self.basis {
            in_target[v] = true;
        }
        let mut occupant: Vec<usize> = (p.n..p.n + p.m).collect();
        let mut structurals: Vec<usize> = self.basis.iter().copied().filter(|&v| v < p.n).collect();
        structurals.sort_by_key(|&j| (p.col_nnz(j), j));
        self.etas.clear();
        for j in structurals {
            let alpha = self.ftran(j);
            let mut best: Option<(usize, f64)> = None;
            for (pos, &occ) in occupant.iter().enumerate() {
                if occ >= p.n && !in_target[occ] {
                    let a = alpha[pos].abs();
                    if a > LP_PIVOT && best.map_or(true, |(_, b)| a > b) {
                        best = Some((pos, a));
                    }
                }
            }
            match best {
                Some((pos, _)) => {
                    self.push_eta(pos, &alpha);
                    occupant[pos] = j;
                }
                None => {
                    in_target[j] = false;
                    self.park_nonbasic(j);
                }
            }
        }
        for &v in &occupant {
            self.state[v] = VarState::Basic;
        }
        self.basis = occupant;
        self.since_refactor = 0;
        self.recompute_basics();
    }

    fn infeasibility(&self, v: usize) -> f64 {
        let xv = self.x[v];
        if xv < self.p.lo[v] - LP_FEASIBILITY {
            -1.0
        } else if xv > self.p.hi[v] + LP_FEASIBILITY {
            1.0
        } else {
            0.0
        }
    }

    fn run(&mut self, limit: usize) -> Result<LpStatus> {
        let p = self.p;
        loop {
            if self.iterations >= limit {
                return Ok(LpStatus::IterationLimit);
            }
            if self.since_refactor >= self.refactor_interval {
                self.reinvert();
            }

            let phase1 = self.basis.iter().any(|&v| self.infeasibility(v) != 0.0);
            let cb: Vec<f64> = self
                .basis
                .iter()
                .map(|&v| if phase1 { self.infeasibility(v) } else { p.cost[v] })
                .collect();
            let y = self.btran(cb);

            let entering = self.price(&y, phase1);
            let Some((q, dq)) = entering else {
                if self.since_refactor > 0 {
                    self.reinvert();
                    continue;
                }
                return Ok(if phase1 { LpStatus::Infeasible } else { LpStatus::Optimal });
            };

            let dir = if dq < 0.0 { 1.0 } else { -1.0 };
            let alpha = self.ftran(q);
            match self.ratio_test(q, dir, &alpha, phase1) {
                Step::Unbounded => {
                    if phase1 {
                        if self.since_refactor > 0 {
                            self.reinvert();
                            continue;
                        }
                        return Err(Error::Solver("phase 1 ray without a breakpoint".into()));
                    }
                    return Ok(LpStatus::Unbounded);
                }
                Step::Flip(theta) => {
                    self.move_along(q, dir, theta, &alpha);
                    let to_upper = dir > 0.0;
                    self.x[q] = if to_upper { p.hi[q] } else { p.lo[q] };
                    self.state[q] = if to_upper { VarState::Upper } else { VarState::Lower };
                    self.note_step(theta);
                }
                Step::Pivot { pos, theta, to_upper } => {
                    self.move_along(q, dir, theta, &alpha);
                    let leaving = self.basis[pos];
                    if to_upper {
                        self.x[leaving] = p.hi[leaving];
                        self.state[leaving] = VarState::Upper;
                    } else {
                        self.x[leaving] = p.lo[leaving];
                        self.state[leaving] = VarState::Lower;
                    }
                    self.state[q] = VarState::Basic;
                    self.basis[pos] = q;
                    self.push_eta(pos, &alpha);
                    self.since_refactor += 1;
                    self.note_step(theta);
                }
            }
            self.iterations += 1;
        }
    }

    fn note_step(&mut self, theta: f64) {
        if theta <= 1e-12 {
            self.degenerate_streak += 1;
            if self.degenerate_streak > self.bland_after {
                self.bland = true;
            }
        } else {
            self.degenerate_streak = 0;
            self.bland = false;
        }
    }

    fn move_along(&mut self, q: usize, dir: f64, theta: f64, alpha: &[f64]) {
        if theta == 0.0 {
            return;
        }
        self.x[q] += dir * theta;
        for (pos, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                let v = self.basis[pos];
                self.x[v] -= dir * a * theta;
            }
        }
    }

    fn reduced_cost(&self, j: usize, y: &[f64], phase1: bool) -> f64 {
        let p = self.p;
        let c = if phase1 { 0.0 } else { p.cost[j] };
        if j < p.n {
            let mut d = c;
            for k in p.col_ptr[j]..p.col_ptr[j + 1] {
                d -= y[p.row_idx[k]] * p.vals[k];
            }
            d
        } else {
            c + y[j - p.n]
        }
    }

    fn price(&self, y: &[f64], phase1: bool) -> Option<(usize, f64)> {
        let p = self.p;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..p.n + p.m {
            let st = self.state[j];
            if st == VarState::Basic || p.lo[j] == p.hi[j] {
                continue;
            }
            let d = self.reduced_cost(j, y, phase1);
            let eligible = match st {
                VarState::Lower => d < -LP_OPTIMALITY,
                VarState::Upper => d > LP_OPTIMALITY,
                VarState::Free => d.abs() > LP_OPTIMALITY,
                VarState::Basic => false,
            };
            if !eligible {
                continue;
            }
            if self.bland {
                return Some((j, d));
            }
            if best.map_or(true, |(_, b)| d.abs() > b.abs()) {
                best = Some((j, d));
            }
        }
        best
    }

    fn ratio_test(&self, q: usize, dir: f64, alpha: &[f64], phase1: bool) -> Step {
        let p = self.p;
        // (position, exact ratio, |alpha|, leaves at upper)
        let mut cands: Vec<(usize, f64, f64, bool)> = Vec::new();
        let mut theta_max = INF;
        for (pos, &a) in alpha.iter().enumerate() {
            if a.abs() <= LP_PIVOT {
                continue;
            }
            let v = self.basis[pos];
            let delta = -dir * a;
            let (l, u, xv) = (p.lo[v], p.hi[v], self.x[v]);
            let below = phase1 && xv < l - LP_FEASIBILITY;
            let above = phase1 && xv > u + LP_FEASIBILITY;
            let hit = if below {
                (delta > 0.0).then(|| ((l - xv) / delta, false))
            } else if above {
                (delta < 0.0).then(|| ((xv - u) / -delta, true))
            } else if delta < 0.0 && l.is_finite() {
                Some(((xv - l) / -delta, false))
            } else if delta > 0.0 && u.is_finite() {
                Some(((u - xv) / delta, true))
            } else {
                None
            };
            if let Some((ratio, to_upper)) = hit {
                let relaxed = ratio + LP_FEASIBILITY / delta.abs();
                theta_max = theta_max.min(relaxed);
                cands.push((pos, ratio.max(0.0), a.abs(), to_upper));
            }
        }

        let range = p.hi[q] - p.lo[q];
        if cands.is_empty() {
            return if range.is_finite() { Step::Flip(range) } else { Step::Unbounded };
        }

        let chosen = if self.bland {
            let min_ratio = cands.iter().map(|c| c.1).fold(INF, f64::min);
            cands
                .iter()
                .filter(|c| c.1 <= min_ratio + 1e-12)
                .min_by_key(|c| self.basis[c.0])
                .copied()
        } else {
            cands
                .iter()
                .filter(|c| c.1 <= theta_max)
                .max_by(|a, b| a.2.partial_cmp(&b.2).unwrap().then(b.0.cmp(&a.0)))
                .copied()
        };
        let (pos, theta, _, to_upper) = chosen.expect("Harris bound admits the minimum ratio");
        if range.is_finite() && range <= theta {
            return Step::Flip(range);
        }
        Step::Pivot { pos, theta, to_upper }
    }

    fn extract(&mut self, lp: &LinearProgram, status: LpStatus) -> LpSolution {
        let p = self.p;
        let (m, n) = (p.m, p.n);
        if status == LpStatus::Optimal && self.since_refactor > 0 {
            self.reinvert();
        }
        let cb: Vec<f64> = self.basis.iter().map(|&v| p.cost[v]).collect();
        let y = self.btran(cb);

        let x: Vec<f64> = (0..n).map(|j| self.x[j] * p.col_scale[j]).collect();
        let row_duals: Vec<f64> = (0..m).map(|i| y[i] * p.row_scale[i] / p.obj_scale).collect();
        let reduced_costs: Vec<f64> = (0..n)
            .map(|j| {
                if self.state[j] == VarState::Basic {
                    0.0
                } else {
                    self.reduced_cost(j, &y, false) / (p.col_scale[j] * p.obj_scale)
                }
            })
            .collect();

        let objective = lp.objective_value(&x);
        let mut dual_objective = 0.0;
        for (i, row) in lp.rows.iter().enumerate() {
            let pi = row_duals[i];
            let bound = match (row.kind, pi >= 0.0) {
                (RowKind::Eq, _) => row.rhs,
                (RowKind::Ge, true) | (RowKind::Le, false) => row.rhs,
                _ => row.activity(&x),
            };
            dual_objective += pi * bound;
        }
        for j in 0..n {
            let d = reduced_costs[j];
            if d == 0.0 {
                continue;
            }
            let bound = if d > 0.0 { lp.lower[j] } else { lp.upper[j] };
            dual_objective += d * if bound.is_finite() { bound } else { x[j] };
        }

        LpSolution {
            status,
            x,
            row_duals,
            reduced_costs,
            objective,
            dual_objective,
            iterations: self.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_lp;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_lower_bound_row() {
        let mut lp = LinearProgram::new();
        let y = lp.add_var(1.0, -INF, INF);
        lp.add_ge(vec![(y, 1.0)], 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        assert!((s.row_duals[0] - 1.0).abs() < 1e-12);
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new();
        let y = lp.add_var(-1.0, -INF, INF);
        lp.add_ge(vec![(y, 1.0)], 0.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible_rows() {
        let mut lp = LinearProgram::new();
        let y = lp.add_var(0.0, 0.0, INF);
        lp.add_ge(vec![(y, 1.0)], 2.0);
        lp.add_le(vec![(y, 1.0)], 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn two_variable_vertex() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.0, 0.0, INF);
        let y = lp.add_var(2.0, 0.0, INF);
        lp.add_ge(vec![(x, 1.0), (y, 1.0)], 2.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-12 && s.x[1].abs() < 1e-12);
        assert!((s.objective - 2.0).abs() < 1e-12);
        assert!((s.row_duals[0] - 1.0).abs() < 1e-12);
        assert!(s.certifies_optimality(&lp));
    }

    #[test]
    fn bounded_flip_and_badly_scaled_rows() {
        let mut lp = LinearProgram::new();
        let a = lp.add_var(-1.0, 0.0, 1e-3);
        let b = lp.add_var(-1e6, 0.0, INF);
        lp.add_le(vec![(a, 1e4), (b, 1e-2)], 5.0);
        let s = solve_lp(&lp).unwrap();
        assert!(s.certifies_optimality(&lp), "{s:?}");
        assert!(lp.max_violation(&s.x) < 1e-7);
    }

    fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
        let n = rng.gen_range(1..8);
        let m = rng.gen_range(1..8);
        let mut lp = LinearProgram::new();
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        for &v in &x0 {
            let lo = if rng.gen_bool(0.7) { v - rng.gen_range(0.0..3.0) } else { -INF };
            let hi = if rng.gen_bool(0.7) { v + rng.gen_range(0.0..3.0) } else { INF };
            lp.add_var(rng.gen_range(-3.0..3.0), lo, hi);
        }
        for _ in 0..m {
            let mut coeffs = Vec::new();
            for j in 0..n {
                if rng.gen_bool(0.6) {
                    coeffs.push((j, rng.gen_range(-4.0..4.0)));
                }
            }
            let act: f64 = coeffs.iter().map(|&(j, a)| a * x0[j]).sum();
            match rng.gen_range(0..3) {
                0 => lp.add_ge(coeffs, act - rng.gen_range(0.0..2.0)),
                1 => lp.add_le(coeffs, act + rng.gen_range(0.0..2.0)),
                _ => lp.add_eq(coeffs, act),
            };
        }
        lp
    }

    #[test]
    fn random_lps_satisfy_strong_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut optimal = 0;
        for _ in 0..300 {
            let lp = random_lp(&mut rng);
            let s = solve_lp(&lp).unwrap();
            match s.status {
                LpStatus::Optimal => {
                    optimal += 1;
                    assert!(s.certifies_optimality(&lp), "{lp:?}\n{s:?}");
                    assert!(lp.max_violation(&s.x) < 1e-6);
                }
                LpStatus::Unbounded => {}
                other => panic!("feasible by construction, got {other:?}"),
            }
        }
        assert!(optimal > 100);
    }

    #[test]
    fn row_permutation_keeps_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let lp = random_lp(&mut rng);
            let mut perm = lp.clone();
            perm.rows.reverse();
            let (a, b) = (solve_lp(&lp).unwrap(), solve_lp(&perm).unwrap());
            assert_eq!(a.status, b.status);
            if a.is_optimal() {
                assert!((a.objective - b.objective).abs() <= 1e-8 * (1.0 + a.objective.abs()));
            }
        }
    }
}
