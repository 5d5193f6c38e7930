//! Operation LPs whose right-hand sides are affine in capacities `x` and
//! uncertain injections `ζ`.

use serde::{Deserialize, Serialize};

use super::{CapacityLayout, GridCase, UncertaintyLayout};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpSolution, LpStatus, RowKind, INF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Fuel cost with no shedding allowed.
    Normal,
    /// Load shedding energy.
    Extreme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowTag {
    Fuel { gen: usize, t: usize, piece: usize },
    RampLower { gen: usize, t: usize },
    RampUpper { gen: usize, t: usize },
    ChargeCap { storage: usize, t: usize },
    DischargeCap { storage: usize, t: usize },
    Energy { storage: usize, t: usize },
    SocLower { storage: usize, t: usize },
    SocUpper { storage: usize, t: usize },
    Flow { line: usize, t: usize },
    ShedCap { load: usize, t: usize },
    Balance { bus: usize, t: usize },
}

/// Column offsets of the operation variables; each block is indexed by
/// entity then period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarIndex {
    pub periods: usize,
    pub pg: usize,
    pub fg: Option<usize>,
    pub psc: usize,
    pub psd: usize,
    pub e: usize,
    pub pl: usize,
    pub theta: usize,
    pub pc: usize,
    pub pd: Option<usize>,
    pub total: usize,
}

impl VarIndex {
    fn at(&self, block: usize, k: usize, t: usize) -> usize {
        block + k * self.periods + t
    }
    pub fn pg(&self, g: usize, t: usize) -> usize {
        self.at(self.pg, g, t)
    }
    pub fn fg(&self, g: usize, t: usize) -> Option<usize> {
        self.fg.map(|b| self.at(b, g, t))
    }
    pub fn psc(&self, s: usize, t: usize) -> usize {
        self.at(self.psc, s, t)
    }
    pub fn psd(&self, s: usize, t: usize) -> usize {
        self.at(self.psd, s, t)
    }
    pub fn e(&self, s: usize, t: usize) -> usize {
        self.at(self.e, s, t)
    }
    pub fn pl(&self, l: usize, t: usize) -> usize {
        self.at(self.pl, l, t)
    }
    pub fn theta(&self, b: usize, t: usize) -> usize {
        self.at(self.theta, b, t)
    }
    pub fn pc(&self, b: usize, t: usize) -> usize {
        self.at(self.pc, b, t)
    }
    pub fn pd(&self, load: usize, t: usize) -> Option<usize> {
        self.pd.map(|b| self.at(b, load, t))
    }
}

/// Operation LP template: rows carry the constant part of their right-hand
/// side; `rhs_x` and `rhs_z` hold the sparse affine terms.
#[derive(Debug, Clone)]
pub struct OperationModel {
    pub mode: Mode,
    pub lp: LinearProgram,
    pub rhs_x: Vec<Vec<(usize, f64)>>,
    pub rhs_z: Vec<Vec<(usize, f64)>>,
    pub tags: Vec<RowTag>,
    pub vars: VarIndex,
    pub x_layout: CapacityLayout,
    pub z_layout: UncertaintyLayout,
    storage_bus: Vec<usize>,
    charge_efficiency: f64,
    discharge_efficiency: f64,
}

struct Builder {
    lp: LinearProgram,
    rhs_x: Vec<Vec<(usize, f64)>>,
    rhs_z: Vec<Vec<(usize, f64)>>,
    tags: Vec<RowTag>,
}

impl Builder {
    fn row(
        &mut self,
        tag: RowTag,
        coeffs: Vec<(usize, f64)>,
        kind: RowKind,
        rhs: f64,
        rx: Vec<(usize, f64)>,
        rz: Vec<(usize, f64)>,
    ) {
        self.lp.add_row(coeffs, kind, rhs);
        self.rhs_x.push(rx);
        self.rhs_z.push(rz);
        self.tags.push(tag);
    }
}

impl OperationModel {
    pub fn new(case: &GridCase, mode: Mode) -> Result<Self> {
        case.validate()?;
        let t_n = case.periods;
        let dt = case.period_hours;
        let (n_g, n_s, n_l, n_b) = (
            case.generators.len(),
            case.storage_sites.len(),
            case.lines.len(),
            case.buses.len(),
        );
        let z_layout = case.uncertainty_layout();
        let x_layout = case.capacity_layout();
        let n_d = z_layout.load_buses.len();

        let mut lp = LinearProgram::new();
        let mut add_block = |count: usize, cost: f64, lo: f64, hi: f64| {
            let start = lp.num_vars();
            for _ in 0..count * t_n {
                lp.add_var(cost, lo, hi);
            }
            start
        };
        let pg = add_block(n_g, 0.0, 0.0, 0.0);
        let fg = (mode == Mode::Normal).then(|| add_block(n_g, 1.0, -INF, INF));
        let psc = add_block(n_s, 0.0, 0.0, INF);
        let psd = add_block(n_s, 0.0, 0.0, INF);
        let e = add_block(n_s, 0.0, -INF, INF);
        let pl = add_block(n_l, 0.0, 0.0, 0.0);
        let theta = add_block(n_b, 0.0, -INF, INF);
        let pc = add_block(n_b, 0.0, 0.0, INF);
        let pd = (mode == Mode::Extreme).then(|| add_block(n_d, dt, 0.0, INF));
        let vars = VarIndex {
            periods: t_n,
            pg,
            fg,
            psc,
            psd,
            e,
            pl,
            theta,
            pc,
            pd,
            total: lp.num_vars(),
        };
        for (g, gen) in case.generators.iter().enumerate() {
            for t in 0..t_n {
                lp.lower[vars.pg(g, t)] = gen.p_min_mw;
                lp.upper[vars.pg(g, t)] = gen.p_max_mw;
            }
        }
        for (l, line) in case.lines.iter().enumerate() {
            for t in 0..t_n {
                lp.lower[vars.pl(l, t)] = -line.capacity_mw;
                lp.upper[vars.pl(l, t)] = line.capacity_mw;
            }
        }
        let reference = case.reference_bus();
        for t in 0..t_n {
            lp.lower[vars.theta(reference, t)] = 0.0;
            lp.upper[vars.theta(reference, t)] = 0.0;
        }

        let mut b = Builder {
            lp,
            rhs_x: Vec::new(),
            rhs_z: Vec::new(),
            tags: Vec::new(),
        };
        let prev = |t: usize| if t == 0 { t_n - 1 } else { t - 1 };

        if let Some(_) = fg {
            for (g, gen) in case.generators.iter().enumerate() {
                for t in 0..t_n {
                    for (k, piece) in gen.fuel.iter().enumerate() {
                        b.row(
                            RowTag::Fuel { gen: g, t, piece: k },
                            vec![(vars.fg(g, t).unwrap(), 1.0), (vars.pg(g, t), -piece.slope_cny_per_mwh * dt)],
                            RowKind::Ge,
                            piece.offset_cny,
                            vec![],
                            vec![],
                        );
                    }
                }
            }
        }
        if t_n > 1 {
            for (g, gen) in case.generators.iter().enumerate() {
                for t in 0..t_n {
                    let coeffs = vec![(vars.pg(g, t), 1.0), (vars.pg(g, prev(t)), -1.0)];
                    b.row(
                        RowTag::RampLower { gen: g, t },
                        coeffs.clone(),
                        RowKind::Ge,
                        gen.ramp_min_mw_per_h * dt,
                        vec![],
                        vec![],
                    );
                    b.row(
                        RowTag::RampUpper { gen: g, t },
                        coeffs,
                        RowKind::Le,
                        gen.ramp_max_mw_per_h * dt,
                        vec![],
                        vec![],
                    );
                }
            }
        }
        let (eta_c, eta_d) = (case.charge_efficiency, case.discharge_efficiency);
        for s in 0..n_s {
            let xp = x_layout.power(s);
            let xe = x_layout.energy(s);
            for t in 0..t_n {
                b.row(RowTag::ChargeCap { storage: s, t }, vec![(vars.psc(s, t), 1.0)], RowKind::Le, 0.0, vec![(xp, 1.0)], vec![]);
                b.row(RowTag::DischargeCap { storage: s, t }, vec![(vars.psd(s, t), 1.0)], RowKind::Le, 0.0, vec![(xp, 1.0)], vec![]);
                let mut coeffs = Vec::new();
                if t_n > 1 {
                    coeffs.push((vars.e(s, t), 1.0));
                    coeffs.push((vars.e(s, prev(t)), -1.0));
                }
                coeffs.push((vars.psc(s, t), -eta_c * dt));
                coeffs.push((vars.psd(s, t), dt / eta_d));
                b.row(RowTag::Energy { storage: s, t }, coeffs, RowKind::Eq, 0.0, vec![], vec![]);
                b.row(RowTag::SocLower { storage: s, t }, vec![(vars.e(s, t), 1.0)], RowKind::Ge, 0.0, vec![(xe, case.soc_min)], vec![]);
                b.row(RowTag::SocUpper { storage: s, t }, vec![(vars.e(s, t), 1.0)], RowKind::Le, 0.0, vec![(xe, case.soc_max)], vec![]);
            }
        }
        let bus_of = |id: usize| case.bus_index(id).expect("validated bus id");
        for (l, line) in case.lines.iter().enumerate() {
            let (i, j) = (bus_of(line.from), bus_of(line.to));
            let inv = 1.0 / line.reactance_pu;
            for t in 0..t_n {
                b.row(
                    RowTag::Flow { line: l, t },
                    vec![(vars.pl(l, t), 1.0), (vars.theta(i, t), -inv), (vars.theta(j, t), inv)],
                    RowKind::Eq,
                    0.0,
                    vec![],
                    vec![],
                );
            }
        }
        if mode == Mode::Extreme {
            for k in 0..n_d {
                for t in 0..t_n {
                    b.row(
                        RowTag::ShedCap { load: k, t },
                        vec![(vars.pd(k, t).unwrap(), 1.0)],
                        RowKind::Le,
                        0.0,
                        vec![],
                        vec![(z_layout.demand(k, t), 1.0)],
                    );
                }
            }
        }
        let storage_bus: Vec<usize> = case.storage_sites.iter().map(|s| bus_of(s.bus)).collect();
        for bus in 0..n_b {
            let load = z_layout.load_buses.iter().position(|&lb| lb == bus);
            for t in 0..t_n {
                let mut coeffs = Vec::new();
                for (l, line) in case.lines.iter().enumerate() {
                    if bus_of(line.to) == bus {
                        coeffs.push((vars.pl(l, t), 1.0));
                    }
                    if bus_of(line.from) == bus {
                        coeffs.push((vars.pl(l, t), -1.0));
                    }
                }
                for (g, gen) in case.generators.iter().enumerate() {
                    if bus_of(gen.bus) == bus {
                        coeffs.push((vars.pg(g, t), 1.0));
                    }
                }
                for (s, &sb) in storage_bus.iter().enumerate() {
                    if sb == bus {
                        coeffs.push((vars.psd(s, t), 1.0));
                        coeffs.push((vars.psc(s, t), -1.0));
                    }
                }
                coeffs.push((vars.pc(bus, t), -1.0));
                let mut rz = Vec::new();
                if let Some(k) = load {
                    if let Some(v) = vars.pd(k, t) {
                        coeffs.push((v, 1.0));
                    }
                    rz.push((z_layout.demand(k, t), 1.0));
                }
                for (w, site) in case.wind_sites.iter().enumerate() {
                    if bus_of(site.bus) == bus {
                        rz.push((z_layout.wind(w, t), -1.0));
                    }
                }
                b.row(RowTag::Balance { bus, t }, coeffs, RowKind::Eq, 0.0, vec![], rz);
            }
        }

        Ok(OperationModel {
            mode,
            lp: b.lp,
            rhs_x: b.rhs_x,
            rhs_z: b.rhs_z,
            tags: b.tags,
            vars,
            x_layout,
            z_layout,
            storage_bus,
            charge_efficiency: eta_c,
            discharge_efficiency: eta_d,
        })
    }

    fn check_dims(&self, x: &[f64], z: &[f64]) -> Result<()> {
        if x.len() != self.x_layout.len() {
            return Err(Error::DimensionMismatch {
                context: "capacity vector",
                expected: self.x_layout.len(),
                actual: x.len(),
            });
        }
        if z.len() != self.z_layout.len() {
            return Err(Error::DimensionMismatch {
                context: "uncertainty vector",
                expected: self.z_layout.len(),
                actual: z.len(),
            });
        }
        Ok(())
    }

    pub fn rhs(&self, r: usize, x: &[f64], z: &[f64]) -> f64 {
        self.lp.rows[r].rhs
            + self.rhs_x[r].iter().map(|&(k, a)| a * x[k]).sum::<f64>()
            + self.rhs_z[r].iter().map(|&(m, a)| a * z[m]).sum::<f64>()
    }

    /// The LP for fixed `(x, ζ)`.
    pub fn instantiate(&self, x: &[f64], z: &[f64]) -> Result<LinearProgram> {
        self.check_dims(x, z)?;
        let mut lp = self.lp.clone();
        for r in 0..lp.rows.len() {
            lp.rows[r].rhs = self.rhs(r, x, z);
        }
        Ok(lp)
    }

    pub fn evaluate(&self, x: &[f64], z: &[f64]) -> Result<Evaluation> {
        let lp = self.instantiate(x, z)?;
        let solution = solve_lp(&lp)?;
        match solution.status {
            LpStatus::Optimal => Ok(Evaluation {
                value: Some(solution.objective),
                solution,
            }),
            LpStatus::Infeasible => Ok(Evaluation { value: None, solution }),
            other => Err(Error::Solver(format!("{:?} operation LP ended {other:?}", self.mode))),
        }
    }

    /// `∂g/∂ζ` read from the row multipliers of an optimal solve.
    pub fn zeta_sensitivity(&self, sol: &LpSolution) -> Vec<f64> {
        let mut out = vec![0.0; self.z_layout.len()];
        for (r, terms) in self.rhs_z.iter().enumerate() {
            for &(m, a) in terms {
                out[m] += sol.row_duals[r] * a;
            }
        }
        out
    }

    /// Removes simultaneous charging and discharging from `y` (spilling the
    /// efficiency loss as curtailment) and reports whether the result is
    /// still feasible for `lp` with the same objective.
    pub fn complementarity_free(&self, lp: &LinearProgram, y: &[f64]) -> bool {
        let mut y = y.to_vec();
        let before = lp.objective_value(&y);
        let ratio = self.charge_efficiency * self.discharge_efficiency;
        for (s, &bus) in self.storage_bus.iter().enumerate() {
            for t in 0..self.vars.periods {
                let (ic, id) = (self.vars.psc(s, t), self.vars.psd(s, t));
                let a = y[ic].min(y[id] / ratio).max(0.0);
                if a == 0.0 {
                    continue;
                }
                y[ic] -= a;
                y[id] -= a * ratio;
                y[self.vars.pc(bus, t)] += a * (1.0 - ratio);
            }
        }
        let scale = 1.0 + lp.objective_value(&y).abs();
        let tol = 1e-6 * (1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let simultaneous = (0..self.storage_bus.len()).any(|s| {
            (0..self.vars.periods).any(|t| y[self.vars.psc(s, t)] > tol && y[self.vars.psd(s, t)] > tol)
        });
        !simultaneous && lp.max_violation(&y) <= tol && (before - lp.objective_value(&y)).abs() <= 1e-9 * scale
    }
}

/// Result of one operation solve; `value` is `None` when infeasible.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: Option<f64>,
    pub solution: LpSolution,
}

pub fn build_constraints(case: &GridCase, mode: Mode, x: &[f64], z: &[f64]) -> Result<LinearProgram> {
    OperationModel::new(case, mode)?.instantiate(x, z)
}

pub fn eval_gn(case: &GridCase, x: &[f64], z: &[f64]) -> Result<Evaluation> {
    OperationModel::new(case, Mode::Normal)?.evaluate(x, z)
}

pub fn eval_ge(case: &GridCase, x: &[f64], z: &[f64]) -> Result<Evaluation> {
    OperationModel::new(case, Mode::Extreme)?.evaluate(x, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::compact::{CompactForm, IneqSource};
    use crate::grid::tests::{one_bus, storage_site, two_bus, wind_site};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn value(e: Evaluation) -> f64 {
        e.value.expect("feasible")
    }

    #[test]
    fn single_bus_fuel_cost() {
        let c = one_bus(100.0, 10.0);
        assert!((value(eval_gn(&c, &[], &[50.0]).unwrap()) - 500.0).abs() < 1e-7);
        let mut c = c;
        c.wind_sites.push(wind_site(1));
        assert!((value(eval_gn(&c, &[40.0], &[20.0, 50.0]).unwrap()) - 300.0).abs() < 1e-7);
    }

    #[test]
    fn single_bus_shedding() {
        let c = one_bus(30.0, 10.0);
        assert!((value(eval_ge(&c, &[], &[50.0]).unwrap()) - 20.0).abs() < 1e-7);
        assert!(value(eval_ge(&c, &[], &[0.0]).unwrap()).abs() < 1e-9);
        // Normal operation cannot shed, so this demand is unserved.
        assert!(eval_gn(&c, &[], &[50.0]).unwrap().value.is_none());
    }

    #[test]
    fn zero_demand_costs_nothing() {
        let c = one_bus(30.0, 10.0);
        assert!(value(eval_gn(&c, &[], &[0.0]).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn row_tally() {
        for t_n in [1usize, 3] {
            let c = two_bus(t_n);
            let (g, k, s, l, b, d) = (1, 2, 1, 1, 2, 1);
            let ramps = if t_n > 1 { 2 * g * t_n } else { 0 };
            let common = ramps + 5 * s * t_n + l * t_n + b * t_n;
            let n = OperationModel::new(&c, Mode::Normal).unwrap();
            assert_eq!(n.lp.num_rows(), common + g * k * t_n);
            let e = OperationModel::new(&c, Mode::Extreme).unwrap();
            assert_eq!(e.lp.num_rows(), common + d * t_n);
        }
    }

    #[test]
    fn flow_row_uses_angle_difference() {
        let m = OperationModel::new(&two_bus(1), Mode::Extreme).unwrap();
        let r = m.tags.iter().position(|t| matches!(t, RowTag::Flow { .. })).unwrap();
        let row = &m.lp.rows[r];
        assert_eq!(row.kind, RowKind::Eq);
        let mut coeffs = row.coeffs.clone();
        coeffs.sort_by_key(|&(j, _)| j);
        assert_eq!(
            coeffs,
            vec![(m.vars.pl(0, 0), 1.0), (m.vars.theta(0, 0), -5.0), (m.vars.theta(1, 0), 5.0)]
        );
        assert_eq!((m.lp.lower[m.vars.theta(0, 0)], m.lp.upper[m.vars.theta(0, 0)]), (0.0, 0.0));
    }

    fn random_point(c: &GridCase, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = c.capacity_bounds().iter().map(|&u| rng.gen_range(0.0..=u)).collect();
        let zl = c.uncertainty_layout();
        let mut z = vec![0.0; zl.len()];
        for t in 0..c.periods {
            for w in 0..zl.sites {
                z[zl.wind(w, t)] = rng.gen_range(0.0..=x[w]);
            }
            for (k, &b) in zl.load_buses.iter().enumerate() {
                z[zl.demand(k, t)] = rng.gen_range(0.0..=c.buses[b].demand_max_mw);
            }
        }
        (x, z)
    }

    #[test]
    fn compact_form_reproduces_rows() {
        let c = two_bus(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for mode in [Mode::Normal, Mode::Extreme] {
            let m = OperationModel::new(&c, mode).unwrap();
            let f = CompactForm::from_model(&m);
            for _ in 0..20 {
                let (x, z) = random_point(&c, &mut rng);
                let lp = m.instantiate(&x, &z).unwrap();
                let ineq = f.ineq_rhs(&x, &z);
                for (i, src) in f.ineq_source.iter().enumerate() {
                    let want = match *src {
                        IneqSource::Row { index, negated } => {
                            if negated { -lp.rows[index].rhs } else { lp.rows[index].rhs }
                        }
                        IneqSource::Lower(j) => lp.lower[j],
                        IneqSource::Upper(j) => -lp.upper[j],
                    };
                    assert!((ineq[i] - want).abs() <= 1e-10);
                }
                for (i, &r) in f.eq_source.iter().enumerate() {
                    assert!((f.eq_rhs(&x, &z)[i] - lp.rows[r].rhs).abs() <= 1e-10);
                }
            }
            let (x, z) = random_point(&c, &mut rng);
            let a = solve_lp(&m.instantiate(&x, &z).unwrap()).unwrap();
            let b = solve_lp(&f.to_lp(&x, &z)).unwrap();
            assert_eq!(a.status, b.status);
            if a.status == LpStatus::Optimal {
                assert!((a.objective - b.objective).abs() <= 1e-6 * (1.0 + a.objective.abs()));
            }
        }
    }

    #[test]
    fn demand_column_hits_balance_and_shed_rows() {
        let c = two_bus(2);
        let m = OperationModel::new(&c, Mode::Extreme).unwrap();
        for t in 0..2 {
            let col = m.z_layout.demand(0, t);
            let mut hits: Vec<RowTag> = (0..m.tags.len())
                .filter(|&r| m.rhs_z[r].iter().any(|&(k, _)| k == col))
                .map(|r| m.tags[r])
                .collect();
            hits.sort_by_key(|t| format!("{t:?}"));
            assert_eq!(hits, vec![RowTag::Balance { bus: 1, t }, RowTag::ShedCap { load: 0, t }]);
        }
    }

    #[test]
    fn extreme_objective_weights_shedding_only() {
        let mut c = two_bus(2);
        c.period_hours = 0.5;
        let m = OperationModel::new(&c, Mode::Extreme).unwrap();
        for (j, &v) in m.lp.objective.iter().enumerate() {
            let is_pd = (0..2).any(|t| m.vars.pd(0, t) == Some(j));
            assert_eq!(v, if is_pd { 0.5 } else { 0.0 });
        }
    }

    #[test]
    fn simultaneous_storage_use_is_removable() {
        let mut c = one_bus(100.0, 10.0);
        c.wind_sites.push(wind_site(1));
        c.storage_sites.push(storage_site(1));
        let m = OperationModel::new(&c, Mode::Normal).unwrap();
        let x = [40.0, 10.0, 20.0];
        let z = [40.0, 10.0];
        let lp = m.instantiate(&x, &z).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!(m.complementarity_free(&lp, &sol.x));
        let mut y = sol.x.clone();
        let ratio = 0.95 * 0.95;
        let a = 4.0;
        y[m.vars.psc(0, 0)] += a;
        y[m.vars.psd(0, 0)] += a * ratio;
        y[m.vars.pc(0, 0)] -= a * (1.0 - ratio);
        assert!(y[m.vars.pc(0, 0)] >= 0.0);
        assert!(lp.max_violation(&y) < 1e-9);
        assert!(m.complementarity_free(&lp, &y));
    }

    #[test]
    fn shedding_bounded_by_demand_energy() {
        let c = two_bus(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = OperationModel::new(&c, Mode::Extreme).unwrap();
        for _ in 0..10 {
            let (x, z) = random_point(&c, &mut rng);
            let v = value(m.evaluate(&x, &z).unwrap());
            let total: f64 = (0..3).map(|t| z[m.z_layout.demand(0, t)]).sum();
            assert!(v >= -1e-9 && v <= total + 1e-7);
        }
    }

    #[test]
    fn relabeling_buses_keeps_values() {
        let c = two_bus(2);
        let mut r = c.clone();
        for b in &mut r.buses {
            b.id += 10;
        }
        r.buses.reverse();
        for g in &mut r.generators {
            g.bus += 10;
        }
        for l in &mut r.lines {
            l.from += 10;
            l.to += 10;
        }
        r.wind_sites[0].bus += 10;
        r.storage_sites[0].bus += 10;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let (x, z) = random_point(&c, &mut rng);
            for mode in [Mode::Normal, Mode::Extreme] {
                let a = OperationModel::new(&c, mode).unwrap().evaluate(&x, &z).unwrap().value;
                let b = OperationModel::new(&r, mode).unwrap().evaluate(&x, &z).unwrap().value;
                match (a, b) {
                    (Some(a), Some(b)) => assert!((a - b).abs() < 1e-6 * (1.0 + a.abs())),
                    (None, None) => {}
                    other => panic!("feasibility differs: {other:?}"),
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn shedding_is_convex_and_monotone(seed in any::<u64>(), alpha in 0.0f64..=1.0, bump in 0.0f64..10.0) {
            let c = two_bus(2);
            let m = OperationModel::new(&c, Mode::Extreme).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, z1) = random_point(&c, &mut rng);
            let (_, mut z2) = random_point(&c, &mut rng);
            for w in 0..2 {
                z2[m.z_layout.wind(0, w)] = z2[m.z_layout.wind(0, w)].min(x[0]);
            }
            let g = |z: &[f64]| value(m.evaluate(&x, z).unwrap());
            let mid: Vec<f64> = z1.iter().zip(&z2).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
            prop_assert!(g(&mid) <= alpha * g(&z1) + (1.0 - alpha) * g(&z2) + 1e-6);

            let base = g(&z1);
            let mut more_wind = z1.clone();
            more_wind[m.z_layout.wind(0, 0)] += bump;
            prop_assert!(g(&more_wind) <= base + 1e-6);
            let mut more_load = z1.clone();
            more_load[m.z_layout.demand(0, 1)] += bump;
            prop_assert!(g(&more_load) >= base - 1e-6);
        }
    }
}
