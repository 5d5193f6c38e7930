//! The sizing LP over capacities and one operation block per scenario.

use serde::{Deserialize, Serialize};

use super::{Aggregate, Objective, SizingProblem};
use crate::error::Result;
use crate::grid::{Mode, OperationModel};
use crate::lp::{solve_lp, LinearProgram, LpSolution, LpStatus, INF};
use crate::uncertainty::{site_facets, Scenario};

/// Scenario block: operation variables start at `base` in template order.
#[derive(Debug, Clone)]
pub struct Block {
    pub scenario: usize,
    pub mode: Mode,
    pub base: usize,
    /// Wind variables by site and period.
    pub wind: Vec<Vec<usize>>,
    pub epigraph: usize,
}

#[derive(Debug, Clone)]
pub struct MasterLp {
    pub lp: LinearProgram,
    pub x: Vec<usize>,
    pub normal: Vec<Block>,
    pub extreme: Vec<Block>,
    /// Constant `ε^{DN}·L^{DN}` left out of the LP objective.
    pub constant: f64,
    pub worst: Option<usize>,
}

/// Normal-condition slope estimates fed into the master objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalSlopes {
    pub wind: Vec<f64>,
    pub demand: f64,
}

impl NormalSlopes {
    pub fn zero(sites: usize) -> Self {
        NormalSlopes { wind: vec![0.0; sites], demand: 0.0 }
    }
}

fn add_block(
    lp: &mut LinearProgram,
    model: &OperationModel,
    prob: &SizingProblem,
    x: &[usize],
    n: usize,
    s: &Scenario,
) -> Result<Block> {
    let zl = &model.z_layout;
    let base = lp.num_vars();
    for j in 0..model.lp.num_vars() {
        lp.add_var(0.0, model.lp.lower[j], model.lp.upper[j]);
    }
    let facets = if prob.wake { Some(site_facets(&prob.case)?) } else { None };
    let mut wind = Vec::with_capacity(zl.sites);
    for site in 0..zl.sites {
        let xw = x[model.x_layout.wind(site)];
        let mut row = Vec::with_capacity(zl.periods);
        for t in 0..zl.periods {
            let v = lp.add_var(0.0, 0.0, INF);
            let xi = s.xi[site][t];
            lp.add_le(vec![(v, 1.0), (xw, -xi)], 0.0);
            if let Some(f) = &facets {
                for facet in &f[site].facets {
                    lp.add_le(vec![(v, 1.0), (xw, -facet.a1)], facet.a2 * xi + facet.a3);
                }
            }
            row.push(v);
        }
        wind.push(row);
    }
    let zvar = |m: usize| -> Option<usize> {
        (m < zl.wind_len()).then(|| wind[m / zl.periods][m % zl.periods])
    };
    let demand_value = |m: usize| -> f64 {
        let k = (m - zl.wind_len()) / zl.periods;
        s.demand[k][(m - zl.wind_len()) % zl.periods]
    };
    for (r, row) in model.lp.rows.iter().enumerate() {
        let mut coeffs: Vec<(usize, f64)> = row.coeffs.iter().map(|&(j, a)| (base + j, a)).collect();
        coeffs.extend(model.rhs_x[r].iter().map(|&(k, a)| (x[k], -a)));
        let mut rhs = row.rhs;
        for &(m, a) in &model.rhs_z[r] {
            match zvar(m) {
                Some(v) => coeffs.push((v, -a)),
                None => rhs += a * demand_value(m),
            }
        }
        lp.add_row(coeffs, row.kind, rhs);
    }
    let epigraph = lp.add_var(0.0, -INF, INF);
    let mut coeffs = vec![(epigraph, 1.0)];
    coeffs.extend(
        model.lp.objective.iter().enumerate().filter(|(_, &c)| c != 0.0).map(|(j, &c)| (base + j, -c)),
    );
    lp.add_ge(coeffs, 0.0);
    Ok(Block { scenario: n, mode: model.mode, base, wind, epigraph })
}

/// Builds the master LP for the given normal-condition slopes.
pub fn build_master_lp(prob: &SizingProblem, slopes: &NormalSlopes) -> Result<MasterLp> {
    prob.validate()?;
    let case = &prob.case;
    let normal_model = OperationModel::new(case, Mode::Normal)?;
    let extreme_model = OperationModel::new(case, Mode::Extreme)?;
    let xl = case.capacity_layout();
    let costs = case.capacity_costs();
    let mut lp = LinearProgram::new();
    let x: Vec<usize> = case.capacity_bounds().iter().map(|&u| lp.add_var(0.0, 0.0, u)).collect();

    let mut normal = Vec::new();
    let mut extreme = Vec::new();
    for (n, s) in prob.scenarios.scenarios.iter().enumerate() {
        match s.label {
            crate::uncertainty::Condition::Normal => normal.push(add_block(&mut lp, &normal_model, prob, &x, n, s)?),
            crate::uncertainty::Condition::Extreme => extreme.push(add_block(&mut lp, &extreme_model, prob, &x, n, s)?),
        }
    }
    let r = &prob.radii;
    let l = &prob.extreme;
    // Compensation terms `Σ ε·L·x^W` for the normal and extreme conditions.
    let normal_comp: Vec<(usize, f64)> = (0..xl.wind)
        .map(|i| (x[xl.wind(i)], r.wind_normal * slopes.wind[i]))
        .filter(|&(_, c)| c != 0.0)
        .collect();
    let extreme_comp: Vec<(usize, f64)> = (0..xl.wind)
        .map(|i| (x[xl.wind(i)], r.wind_extreme * l.wind[i]))
        .filter(|&(_, c)| c != 0.0)
        .collect();
    let constant = r.demand_normal * slopes.demand;

    // Expected or worst fuel cost as a linear expression.
    let mut worst = None;
    let fuel: Vec<(usize, f64)> = match prob.aggregate {
        Aggregate::Average => {
            let w = 1.0 / normal.len() as f64;
            normal_comp.iter().copied().chain(normal.iter().map(|b| (b.epigraph, w))).collect()
        }
        Aggregate::Worst => {
            let eta = lp.add_var(0.0, -INF, INF);
            for b in &normal {
                lp.add_ge(vec![(eta, 1.0), (b.epigraph, -1.0)], 0.0);
            }
            worst = Some(eta);
            vec![(eta, 1.0)]
        }
    };
    match prob.aggregate {
        Aggregate::Average if !extreme.is_empty() => {
            let w = 1.0 / extreme.len() as f64;
            let mut coeffs = extreme_comp.clone();
            coeffs.extend(extreme.iter().map(|b| (b.epigraph, w)));
            lp.add_le(coeffs, prob.g_cap - r.demand_extreme * l.demand);
        }
        Aggregate::Average => {
            lp.add_le(extreme_comp.clone(), prob.g_cap - r.demand_extreme * l.demand);
        }
        Aggregate::Worst => {
            for b in &extreme {
                lp.add_le(vec![(b.epigraph, 1.0)], prob.g_cap);
            }
        }
    }
    let invest: Vec<(usize, f64)> = x.iter().zip(&costs).map(|(&v, &c)| (v, c)).collect();
    match prob.objective {
        Objective::FuelCost { budget } => {
            for &(v, c) in &fuel {
                lp.objective[v] += c;
            }
            if let Some(b) = budget {
                lp.add_le(invest, b);
            }
        }
        Objective::Investment { fuel_cap } => {
            for &(v, c) in &invest {
                lp.objective[v] += c;
            }
            lp.add_le(fuel, fuel_cap - constant);
        }
    }
    Ok(MasterLp { lp, x, normal, extreme, constant, worst })
}

/// Solved master LP.
#[derive(Debug, Clone)]
pub struct MasterSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub investment: f64,
    /// Estimated fuel cost term (`I^F`), including the constant.
    pub fuel: f64,
    pub g_normal: Vec<f64>,
    pub g_extreme: Vec<f64>,
    pub lp: LpSolution,
}

impl MasterLp {
    pub fn solve(&self, prob: &SizingProblem, slopes: &NormalSlopes) -> Result<MasterSolution> {
        let sol = solve_lp(&self.lp)?;
        let ok = sol.status == LpStatus::Optimal;
        let x: Vec<f64> = if ok { self.x.iter().map(|&v| sol.x[v]).collect() } else { vec![] };
        let g = |blocks: &[Block]| -> Vec<f64> {
            if ok { blocks.iter().map(|b| sol.x[b.epigraph]).collect() } else { vec![] }
        };
        let (g_normal, g_extreme) = (g(&self.normal), g(&self.extreme));
        let investment = if ok { prob.case.investment(&x) } else { f64::NAN };
        let fuel = if ok {
            let xl = prob.case.capacity_layout();
            let comp: f64 = (0..xl.wind).map(|i| prob.radii.wind_normal * slopes.wind[i] * x[xl.wind(i)]).sum();
            match self.worst {
                Some(eta) => sol.x[eta],
                None => comp + g_normal.iter().sum::<f64>() / g_normal.len() as f64 + self.constant,
            }
        } else {
            f64::NAN
        };
        Ok(MasterSolution { status: sol.status, x, investment, fuel, g_normal, g_extreme, lp: sol })
    }

    /// Operation variables and wind values of one block.
    pub fn block_point(&self, sol: &LpSolution, b: &Block, model: &OperationModel, demand: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
        let y = sol.x[b.base..b.base + model.lp.num_vars()].to_vec();
        let zl = &model.z_layout;
        let mut z = vec![0.0; zl.len()];
        for (site, row) in b.wind.iter().enumerate() {
            for (t, &v) in row.iter().enumerate() {
                z[zl.wind(site, t)] = sol.x[v];
            }
        }
        for (k, row) in demand.iter().enumerate() {
            for (t, &d) in row.iter().enumerate() {
                z[zl.demand(k, t)] = d;
            }
        }
        (y, z)
    }

    /// Number of master variables implied by the case and scenario counts.
    pub fn expected_vars(prob: &SizingProblem) -> Result<usize> {
        let n = OperationModel::new(&prob.case, Mode::Normal)?.lp.num_vars();
        let e = OperationModel::new(&prob.case, Mode::Extreme)?.lp.num_vars();
        let zl = prob.case.uncertainty_layout();
        let per = zl.wind_len() + 1;
        let (sn, se) = (prob.scenarios.normal().len(), prob.scenarios.extreme().len());
        let worst = usize::from(prob.aggregate == Aggregate::Worst);
        Ok(prob.case.capacity_layout().len() + sn * (n + per) + se * (e + per) + worst)
    }
}
