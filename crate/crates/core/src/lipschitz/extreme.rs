//! Uniform Lipschitz bounds of the load-shedding function over the capacity
//! box, from its KKT system.
//!
//! The KKT system couples the primal and the dual only through complementary
//! slackness. The relaxation at each node is therefore the dual polytope
//! alone, and a dual point is realizable when the rows in its support can all
//! be tight at some primal point. Non-realizable supports are split on a
//! subset of rows that cannot be tight together, read off the reduced costs of
//! an elastic feasibility LP.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FacetSet;
use crate::grid::{CompactForm, GridCase, Mode, OperationModel};
use crate::lp::{solve_lp, LinearProgram, LpStatus, RowKind, INF};
use crate::uncertainty::site_facets;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremeOptions {
    pub node_limit: usize,
    /// Margin that keeps the probed coordinate away from its support edge,
    /// relative to that coordinate's upper bound.
    pub floor: f64,
    /// Cap on the bound, in units of the period length.
    pub cap: f64,
    /// Random operating points solved up front for an initial incumbent.
    pub warm_starts: usize,
    pub seed: u64,
    /// Period of the probed component.
    pub period: usize,
}

impl Default for ExtremeOptions {
    fn default() -> Self {
        ExtremeOptions {
            node_limit: 20_000,
            floor: 1e-6,
            cap: 1e4,
            warm_starts: 16,
            seed: 0,
            period: 0,
        }
    }
}

/// Which coordinate of `ζ` the bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Wind { site: usize },
    Demand { load: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentBound {
    /// Valid upper bound on the slope magnitude.
    pub value: f64,
    /// Largest slope realized by a KKT point.
    pub best_found: f64,
    /// True when the search closed, so `value` is the KKT optimum.
    pub certified: bool,
    pub nodes: usize,
}

/// Uniform bounds per wind site and for demand (max over load buses).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremeBounds {
    pub wind: Vec<ComponentBound>,
    pub demand_components: Vec<ComponentBound>,
    pub demand: f64,
}

impl ExtremeBounds {
    pub fn wind_values(&self) -> Vec<f64> {
        self.wind.iter().map(|b| b.value).collect()
    }

    pub fn certified(&self) -> bool {
        self.wind.iter().chain(&self.demand_components).all(|b| b.certified)
    }
}

/// KKT data of the extreme-operation LP in compact form.
pub struct KktSystem {
    pub(crate) form: CompactForm,
    model: OperationModel,
    x_upper: Vec<f64>,
    facets: Vec<FacetSet>,
    demand_max: Vec<f64>,
    period_hours: f64,
    /// Column view of `A₁` and `A₂`.
    cols1: Vec<Vec<(usize, f64)>>,
    cols2: Vec<Vec<(usize, f64)>>,
}

#[derive(Debug, Clone, PartialEq)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Node {
    bound: OrdF64,
    /// Rows whose multiplier is fixed to zero.
    zero: Vec<usize>,
    /// Rows forced tight.
    tight: Vec<usize>,
}

enum Check {
    Realizable,
    /// Rows of the support that cannot all be tight.
    Conflict(Vec<usize>),
    /// The forced-tight rows alone admit no primal point.
    Infeasible,
}

impl KktSystem {
    pub fn new(case: &GridCase) -> Result<Self> {
        let model = OperationModel::new(case, Mode::Extreme)?;
        let form = CompactForm::from_model(&model);
        let facets = site_facets(case)?.into_iter().cloned().collect();
        let n = form.num_vars();
        let mut cols1 = vec![Vec::new(); n];
        for (r, row) in form.a1.iter().enumerate() {
            for &(j, a) in row {
                cols1[j].push((r, a));
            }
        }
        let mut cols2 = vec![Vec::new(); n];
        for (e, row) in form.a2.iter().enumerate() {
            for &(j, a) in row {
                cols2[j].push((e, a));
            }
        }
        let layout = case.uncertainty_layout();
        Ok(KktSystem {
            form,
            x_upper: case.capacity_bounds(),
            facets,
            demand_max: layout.load_buses.iter().map(|&b| case.buses[b].demand_max_mw).collect(),
            period_hours: case.period_hours,
            model,
            cols1,
            cols2,
        })
    }

    fn nx(&self) -> usize {
        self.x_upper.len()
    }

    fn nz(&self) -> usize {
        self.model.z_layout.len()
    }

    fn coordinate(&self, target: Target, period: usize) -> usize {
        match target {
            Target::Wind { site } => self.model.z_layout.wind(site, period),
            Target::Demand { load } => self.model.z_layout.demand(load, period),
        }
    }

    /// Primal system over `(x, ζ, y)`: capacity box, extreme support, and the
    /// operation rows, all as `≥` except the equalities. Row `r < n_ineq` is
    /// inequality `r` of the compact form.
    pub(crate) fn primal(&self, target: Target, opts: &ExtremeOptions) -> LinearProgram {
        let (nx, nz) = (self.nx(), self.nz());
        let zl = &self.model.z_layout;
        let xl = &self.model.x_layout;
        let mut lp = LinearProgram::new();
        for &u in &self.x_upper {
            lp.add_var(0.0, 0.0, u);
        }
        for _ in 0..nz {
            lp.add_var(0.0, 0.0, INF);
        }
        for _ in 0..self.form.num_vars() {
            lp.add_var(0.0, -INF, INF);
        }
        let (xv, zv, yv) = (|k: usize| k, |m: usize| nx + m, |j: usize| nx + nz + j);
        for r in 0..self.form.a1.len() {
            let mut coeffs: Vec<(usize, f64)> = self.form.a1[r].iter().map(|&(j, a)| (yv(j), a)).collect();
            coeffs.extend(self.form.b1[r].iter().map(|&(k, a)| (xv(k), -a)));
            coeffs.extend(self.form.b2[r].iter().map(|&(m, a)| (zv(m), -a)));
            lp.add_ge(coeffs, self.form.b3[r]);
        }
        for e in 0..self.form.a2.len() {
            let mut coeffs: Vec<(usize, f64)> = self.form.a2[e].iter().map(|&(j, a)| (yv(j), a)).collect();
            coeffs.extend(self.form.b4[e].iter().map(|&(k, a)| (xv(k), -a)));
            coeffs.extend(self.form.b5[e].iter().map(|&(m, a)| (zv(m), -a)));
            lp.add_eq(coeffs, self.form.b6[e]);
        }
        for (site, f) in self.facets.iter().enumerate() {
            let xw = xv(xl.wind(site));
            for t in 0..zl.periods {
                let z = zv(zl.wind(site, t));
                lp.add_le(vec![(z, 1.0), (xw, -1.0)], 0.0);
                for facet in &f.facets {
                    lp.add_le(vec![(z, 1.0), (xw, -facet.a1)], facet.a2 * f.xi_max + facet.a3);
                }
            }
        }
        for (k, &cap) in self.demand_max.iter().enumerate() {
            for t in 0..zl.periods {
                lp.upper[zv(zl.demand(k, t))] = cap;
            }
        }
        let a = zv(self.coordinate(target, opts.period));
        match target {
            Target::Wind { site } => {
                lp.lower[a] = opts.floor * self.x_upper[xl.wind(site)].max(1.0);
            }
            Target::Demand { load } => {
                let cap = self.demand_max[load];
                lp.upper[a] = cap - opts.floor * cap.max(1.0);
            }
        }
        lp
    }

    /// Dual polytope with the slope of `target` as objective (minimized, so
    /// the slope magnitude is its negation) and the cap row last.
    pub(crate) fn dual(&self, target: Target, opts: &ExtremeOptions) -> LinearProgram {
        let n1 = self.form.a1.len();
        let a = self.coordinate(target, opts.period);
        // Wind slopes are nonpositive and demand slopes nonnegative; both are
        // maximized in magnitude.
        let sign = match target {
            Target::Wind { .. } => 1.0,
            Target::Demand { .. } => -1.0,
        };
        let mut lp = LinearProgram::new();
        let mut gamma: Vec<(usize, f64)> = Vec::new();
        for r in 0..n1 {
            let c = self.form.b2[r].iter().filter(|&&(m, _)| m == a).map(|&(_, v)| v).sum::<f64>();
            let v = lp.add_var(sign * c, 0.0, INF);
            if c != 0.0 {
                gamma.push((v, sign * c));
            }
        }
        for e in 0..self.form.a2.len() {
            let c = self.form.b5[e].iter().filter(|&&(m, _)| m == a).map(|&(_, v)| v).sum::<f64>();
            let v = lp.add_var(sign * c, -INF, INF);
            if c != 0.0 {
                gamma.push((v, sign * c));
            }
        }
        for j in 0..self.form.num_vars() {
            let mut coeffs = self.cols1[j].clone();
            coeffs.extend(self.cols2[j].iter().map(|&(e, v)| (n1 + e, v)));
            lp.add_eq(coeffs, self.form.c[j]);
        }
        lp.add_ge(gamma, -opts.cap * self.period_hours);
        lp
    }

    fn check(&self, primal: &LinearProgram, support: &[usize], tight: &[usize]) -> Result<Check> {
        let mut lp = primal.clone();
        for c in lp.objective.iter_mut() {
            *c = 0.0;
        }
        for &r in tight {
            lp.rows[r].kind = RowKind::Eq;
        }
        let free: Vec<usize> = support.iter().copied().filter(|r| !tight.contains(r)).collect();
        let mut slack = Vec::with_capacity(free.len());
        for &r in &free {
            let s = lp.add_var(1.0, 0.0, INF);
            lp.rows[r].coeffs.push((s, -1.0));
            lp.rows[r].kind = RowKind::Eq;
            slack.push(s);
        }
        let sol = solve_lp(&lp)?;
        match sol.status {
            LpStatus::Infeasible => return Ok(Check::Infeasible),
            LpStatus::Optimal => {}
            s => return Err(Error::Solver(format!("realizability LP ended {s:?}"))),
        }
        let scale = 1.0 + lp.rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        if sol.objective <= 1e-8 * scale {
            return Ok(Check::Realizable);
        }
        // Σ (1 − d_r) s_r ≥ v > 0 holds on the feasible set, so the rows with
        // d_r < 1 cannot all be tight.
        let mut conflict: Vec<usize> = free
            .iter()
            .zip(&slack)
            .filter(|&(_, &s)| sol.reduced_costs[s] < 1.0 - 1e-9)
            .map(|(&r, _)| r)
            .collect();
        if conflict.len() < free.len() && !self.all_tight_infeasible(primal, &conflict, tight)? {
            conflict = free;
        }
        if conflict.is_empty() {
            return Ok(Check::Infeasible);
        }
        Ok(Check::Conflict(self.shrink(primal, conflict, tight)?))
    }

    /// Deletion filter: drops rows while the rest still cannot all be tight,
    /// leaving a minimal conflict.
    fn shrink(&self, primal: &LinearProgram, mut rows: Vec<usize>, tight: &[usize]) -> Result<Vec<usize>> {
        let mut i = 0;
        while i < rows.len() && rows.len() > 1 {
            let mut trial = rows.clone();
            trial.remove(i);
            if self.all_tight_infeasible(primal, &trial, tight)? {
                rows = trial;
            } else {
                i += 1;
            }
        }
        Ok(rows)
    }

    /// Rows with positive slack at every primal point; their multipliers
    /// vanish at every KKT point.
    fn never_tight(&self, primal: &LinearProgram) -> Result<Vec<usize>> {
        let n1 = self.form.a1.len();
        let mut out = Vec::new();
        for r in 0..n1 {
            let mut lp = primal.clone();
            lp.objective.iter_mut().for_each(|c| *c = 0.0);
            for &(j, a) in &primal.rows[r].coeffs {
                lp.objective[j] += a;
            }
            let sol = solve_lp(&lp)?;
            let rhs = primal.rows[r].rhs;
            if sol.status == LpStatus::Optimal && sol.objective - rhs > 1e-7 * (1.0 + rhs.abs()) {
                out.push(r);
            }
        }
        Ok(out)
    }

    fn all_tight_infeasible(&self, primal: &LinearProgram, rows: &[usize], tight: &[usize]) -> Result<bool> {
        let mut lp = primal.clone();
        for &r in rows.iter().chain(tight) {
            lp.rows[r].kind = RowKind::Eq;
        }
        Ok(solve_lp(&lp)?.status == LpStatus::Infeasible)
    }

    /// Slopes realized by LP solves at random operating points.
    fn warm_start(&self, target: Target, opts: &ExtremeOptions) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
        let zl = &self.model.z_layout;
        let xl = &self.model.x_layout;
        let a = self.coordinate(target, opts.period);
        let mut best = 0.0f64;
        for _ in 0..opts.warm_starts {
            let x: Vec<f64> = self.x_upper.iter().map(|&u| rng.gen_range(0.0..=u)).collect();
            let mut z = vec![0.0; self.nz()];
            for (site, f) in self.facets.iter().enumerate() {
                let xw = x[xl.wind(site)];
                let top = xw.min(f.envelope(xw, f.xi_max)).max(0.0);
                for t in 0..zl.periods {
                    z[zl.wind(site, t)] = rng.gen_range(0.0..=top);
                }
            }
            for (k, &cap) in self.demand_max.iter().enumerate() {
                for t in 0..zl.periods {
                    z[zl.demand(k, t)] = rng.gen_range(0.0..=cap);
                }
            }
            let eval = self.model.evaluate(&x, &z)?;
            if eval.value.is_none() {
                continue;
            }
            let slope = self.model.zeta_sensitivity(&eval.solution)[a];
            let v = match target {
                Target::Wind { .. } if z[a] > 0.0 => -slope,
                Target::Demand { load } if z[a] < self.demand_max[load] => slope,
                _ => continue,
            };
            best = best.max(v);
        }
        Ok(best)
    }

    /// Best-first search over dual supports.
    pub fn solve(&self, target: Target, opts: &ExtremeOptions) -> Result<ComponentBound> {
        if opts.period >= self.model.z_layout.periods {
            return Err(Error::invalid(format!("period {} out of range", opts.period)));
        }
        let primal = self.primal(target, opts);
        if solve_lp(&primal)?.status == LpStatus::Infeasible {
            // The probed coordinate cannot move: the function does not depend on it.
            return Ok(ComponentBound { value: 0.0, best_found: 0.0, certified: true, nodes: 0 });
        }
        let mut dual = self.dual(target, opts);
        for r in self.never_tight(&primal)? {
            dual.upper[r] = 0.0;
        }
        let n1 = self.form.a1.len();
        let cap = opts.cap * self.period_hours;
        let tol = |v: f64| 1e-9 * (1.0 + v.abs());
        let mut incumbent = self.warm_start(target, opts)?;
        let mut heap = BinaryHeap::new();
        heap.push(Node { bound: OrdF64(INF), zero: Vec::new(), tight: Vec::new() });
        let mut nodes = 0usize;
        while let Some(node) = heap.peek() {
            if node.bound.0 <= incumbent + tol(incumbent) {
                heap.clear();
                break;
            }
            if nodes >= opts.node_limit {
                break;
            }
            let node = heap.pop().expect("peeked");
            nodes += 1;
            let mut lp = dual.clone();
            for &r in &node.zero {
                lp.upper[r] = 0.0;
            }
            let sol = solve_lp(&lp)?;
            match sol.status {
                LpStatus::Infeasible => continue,
                LpStatus::Optimal => {}
                s => return Err(Error::Solver(format!("dual relaxation ended {s:?}"))),
            }
            let value = -sol.objective;
            if value <= incumbent + tol(incumbent) {
                continue;
            }
            let lam_scale = sol.x[..n1].iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let mut support: Vec<usize> = (0..n1).filter(|&r| sol.x[r] > 1e-9 * lam_scale).collect();
            for &r in &node.tight {
                if !support.contains(&r) {
                    support.push(r);
                }
            }
            match self.check(&primal, &support, &node.tight)? {
                Check::Realizable => incumbent = value,
                Check::Infeasible => {}
                Check::Conflict(mut rows) => {
                    rows.sort_by(|&a, &b| sol.x[a].total_cmp(&sol.x[b]).then(a.cmp(&b)));
                    for k in 0..rows.len() {
                        let mut zero = node.zero.clone();
                        zero.push(rows[k]);
                        let mut tight = node.tight.clone();
                        tight.extend_from_slice(&rows[..k]);
                        heap.push(Node { bound: OrdF64(value), zero, tight });
                    }
                }
            }
        }
        let open = heap.peek().map_or(f64::NEG_INFINITY, |n| n.bound.0);
        let certified = open <= incumbent + tol(incumbent);
        let value = if certified { incumbent } else { open.min(cap) };
        if value >= cap * (1.0 - 1e-9) {
            log::warn!("{target:?}: slope bound reached the cap {cap}");
        }
        Ok(ComponentBound {
            value: value.max(0.0),
            best_found: incumbent.max(0.0),
            certified: certified && value < cap * (1.0 - 1e-9),
            nodes,
        })
    }
}

/// Uniform extreme bounds for every wind site and load bus.
pub fn extreme_bounds(case: &GridCase, opts: &ExtremeOptions) -> Result<ExtremeBounds> {
    use rayon::prelude::*;
    let kkt = KktSystem::new(case)?;
    let layout = case.uncertainty_layout();
    let wind = (0..layout.sites)
        .into_par_iter()
        .map(|site| kkt.solve(Target::Wind { site }, opts))
        .collect::<Result<Vec<_>>>()?;
    let demand_components = (0..layout.load_buses.len())
        .into_par_iter()
        .map(|load| kkt.solve(Target::Demand { load }, opts))
        .collect::<Result<Vec<_>>>()?;
    let demand = demand_components.iter().map(|b| b.value).fold(0.0, f64::max);
    Ok(ExtremeBounds { wind, demand_components, demand })
}

pub fn extreme_bound_wind(case: &GridCase, site: usize, opts: &ExtremeOptions) -> Result<ComponentBound> {
    KktSystem::new(case)?.solve(Target::Wind { site }, opts)
}

pub fn extreme_bound_demand(case: &GridCase, opts: &ExtremeOptions) -> Result<ComponentBound> {
    let kkt = KktSystem::new(case)?;
    let mut best: Option<ComponentBound> = None;
    for load in 0..case.uncertainty_layout().load_buses.len() {
        let b = kkt.solve(Target::Demand { load }, opts)?;
        best = Some(match best {
            Some(c) => ComponentBound {
                value: c.value.max(b.value),
                best_found: c.best_found.max(b.best_found),
                certified: c.certified && b.certified,
                nodes: c.nodes + b.nodes,
            },
            None => b,
        });
    }
    Ok(best.unwrap_or(ComponentBound { value: 0.0, best_found: 0.0, certified: true, nodes: 0 }))
}
