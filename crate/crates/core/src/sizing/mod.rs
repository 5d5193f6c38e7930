//! Capacity sizing: the master LP, the iterative slope update, rounding to
//! whole turbine columns, and budget sweeps.

mod master;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridCase, Mode, OperationModel};
use crate::lipschitz::{normal_bounds, ExtremeBounds};
use crate::lp::LpStatus;
use crate::uncertainty::{empirical_distribution, AmbiguityRadii, ScenarioSet};

pub use master::{build_master_lp, Block, MasterLp, MasterSolution, NormalSlopes};

/// What the master LP minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Objective {
    /// Fuel-cost term, optionally under an investment budget (CNY).
    FuelCost { budget: Option<f64> },
    /// Investment, with the fuel-cost term capped (CNY).
    Investment { fuel_cap: f64 },
}

/// How scenario values are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregate {
    /// Sample average plus the Lipschitz compensation terms.
    Average,
    /// Worst scenario (robust baseline).
    Worst,
}

/// Uniform slope bounds of the shedding function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremeSlopes {
    pub wind: Vec<f64>,
    pub demand: f64,
}

impl From<&ExtremeBounds> for ExtremeSlopes {
    fn from(b: &ExtremeBounds) -> Self {
        ExtremeSlopes { wind: b.wind_values(), demand: b.demand }
    }
}

#[derive(Debug, Clone)]
pub struct SizingProblem {
    pub case: GridCase,
    pub scenarios: ScenarioSet,
    pub radii: AmbiguityRadii,
    pub extreme: ExtremeSlopes,
    /// Cap on expected shedding (MWh).
    pub g_cap: f64,
    pub objective: Objective,
    /// Use the wake envelope; off means available wind is `ξ̂·x`.
    pub wake: bool,
    pub aggregate: Aggregate,
}

impl SizingProblem {
    pub fn validate(&self) -> Result<()> {
        self.case.validate()?;
        if self.scenarios.normal().is_empty() {
            return Err(Error::invalid("sizing needs at least one normal scenario"));
        }
        if self.scenarios.periods != self.case.periods {
            return Err(Error::DimensionMismatch {
                context: "scenario periods",
                expected: self.case.periods,
                actual: self.scenarios.periods,
            });
        }
        if self.extreme.wind.len() != self.case.wind_sites.len() {
            return Err(Error::DimensionMismatch {
                context: "extreme wind slopes",
                expected: self.case.wind_sites.len(),
                actual: self.extreme.wind.len(),
            });
        }
        if !(self.g_cap >= 0.0) {
            return Err(Error::invalid(format!("shedding cap must be nonnegative, got {}", self.g_cap)));
        }
        match self.objective {
            Objective::FuelCost { budget: Some(b) } if !(b >= 0.0) => {
                Err(Error::invalid(format!("budget must be nonnegative, got {b}")))
            }
            _ => Ok(()),
        }
    }

    /// Fuel-cost slopes at the normal atoms of `x`; `None` when some normal
    /// scenario is infeasible at `x`.
    pub fn normal_slopes(&self, x: &[f64]) -> Result<Option<NormalSlopes>> {
        let model = OperationModel::new(&self.case, Mode::Normal)?;
        let atoms = empirical_distribution(&self.case, &self.scenarios.normal(), x, self.wake)?.atoms;
        let b = normal_bounds(&model, x, &atoms)?;
        if !b.infeasible.is_empty() {
            return Ok(None);
        }
        Ok(Some(NormalSlopes { wind: b.wind, demand: b.demand }))
    }

    /// Left side of the extreme cap recomputed from fresh shedding solves.
    pub fn extreme_lhs(&self, x: &[f64]) -> Result<f64> {
        let model = OperationModel::new(&self.case, Mode::Extreme)?;
        let scen = self.scenarios.extreme();
        let xl = self.case.capacity_layout();
        let comp: f64 = (0..xl.wind)
            .map(|i| self.radii.wind_extreme * self.extreme.wind[i] * x[xl.wind(i)])
            .sum::<f64>()
            + self.radii.demand_extreme * self.extreme.demand;
        if scen.is_empty() {
            return Ok(comp);
        }
        let atoms = empirical_distribution(&self.case, &scen, x, self.wake)?.atoms;
        let values = atoms
            .iter()
            .map(|z| model.evaluate(x, z).map(|e| e.value.unwrap_or(f64::INFINITY)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(match self.aggregate {
            Aggregate::Average => comp + values.iter().sum::<f64>() / values.len() as f64,
            Aggregate::Worst => values.iter().copied().fold(0.0, f64::max),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizingStatus {
    Converged,
    Infeasible,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub x: Vec<f64>,
    pub slopes: NormalSlopes,
    pub objective: f64,
    pub investment: f64,
    pub fuel: f64,
    /// `‖x_k − x_{k−1}‖_∞`.
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingSolution {
    pub status: SizingStatus,
    pub x: Vec<f64>,
    pub investment: f64,
    /// Estimated fuel-cost term `I^F` (CNY).
    pub fuel: f64,
    pub objective: f64,
    /// Epigraph values per normal and extreme scenario.
    pub g_normal: Vec<f64>,
    pub g_extreme: Vec<f64>,
    /// Shedding per extreme scenario re-solved at `x`.
    pub g_extreme_tested: Vec<f64>,
    /// Extreme cap left side from fresh shedding solves.
    pub extreme_lhs: f64,
    /// Every block solution is free of simultaneous charging and discharging
    /// once rebalanced.
    pub complementarity_free: bool,
    /// Slopes used in the final master solve.
    pub slopes: NormalSlopes,
    pub trace: Vec<IterationRecord>,
}

impl SizingSolution {
    fn infeasible(trace: Vec<IterationRecord>, sites: usize) -> Self {
        SizingSolution {
            status: SizingStatus::Infeasible,
            x: vec![],
            investment: f64::NAN,
            fuel: f64::NAN,
            objective: f64::NAN,
            g_normal: vec![],
            g_extreme: vec![],
            g_extreme_tested: vec![],
            extreme_lhs: f64::NAN,
            complementarity_free: true,
            slopes: NormalSlopes::zero(sites),
            trace,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationOptions {
    /// Convergence tolerance on `‖Δx‖_∞` (MW or MWh).
    pub tol_x: f64,
    pub max_iterations: usize,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions { tol_x: 0.1, max_iterations: 50 }
    }
}

/// One master solve at fixed slopes.
pub fn solve_master(prob: &SizingProblem, slopes: &NormalSlopes) -> Result<MasterSolution> {
    build_master_lp(prob, slopes)?.solve(prob, slopes)
}

fn objective_of(prob: &SizingProblem, m: &MasterSolution) -> f64 {
    match prob.objective {
        Objective::FuelCost { .. } => m.fuel,
        Objective::Investment { .. } => m.investment,
    }
}

/// Alternates master solves with slope updates at the new capacities until
/// the capacities settle.
pub fn algorithm2(prob: &SizingProblem, opts: &IterationOptions) -> Result<SizingSolution> {
    let sites = prob.case.wind_sites.len();
    let mut slopes = NormalSlopes::zero(sites);
    let mut prev = vec![0.0; prob.case.capacity_layout().len()];
    let mut trace = Vec::new();
    let master = build_master_lp(prob, &slopes)?;
    let mut lp = master.clone();
    for k in 1..=opts.max_iterations {
        let sol = lp.solve(prob, &slopes)?;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Ok(SizingSolution::infeasible(trace, sites)),
            s => return Err(Error::Solver(format!("master LP ended {s:?}"))),
        }
        let step = sol.x.iter().zip(&prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        trace.push(IterationRecord {
            x: sol.x.clone(),
            slopes: slopes.clone(),
            objective: objective_of(prob, &sol),
            investment: sol.investment,
            fuel: sol.fuel,
            step,
        });
        log::info!("iteration {k}: objective {:.6e}, step {step:.3e}", objective_of(prob, &sol));
        let done = step <= opts.tol_x;
        if done || k == opts.max_iterations {
            let status = if done { SizingStatus::Converged } else { SizingStatus::IterationLimit };
            return Ok(SizingSolution {
                status,
                g_extreme_tested: tested_shedding(prob, &sol.x)?,
                complementarity_free: blocks_complementarity_free(prob, &lp, &sol)?,
                extreme_lhs: prob.extreme_lhs(&sol.x)?,
                objective: objective_of(prob, &sol),
                x: sol.x,
                investment: sol.investment,
                fuel: sol.fuel,
                g_normal: sol.g_normal,
                g_extreme: sol.g_extreme,
                slopes,
                trace,
            });
        }
        slopes = prob
            .normal_slopes(&sol.x)?
            .ok_or_else(|| Error::Solver("master capacities are infeasible for a normal scenario".into()))?;
        prev = sol.x;
        lp = build_master_lp(prob, &slopes)?;
    }
    unreachable!("loop returns on its last iteration")
}

/// Shedding of each extreme scenario at `x` from the operation model alone.
pub fn tested_shedding(prob: &SizingProblem, x: &[f64]) -> Result<Vec<f64>> {
    let model = OperationModel::new(&prob.case, Mode::Extreme)?;
    let scen = prob.scenarios.extreme();
    if scen.is_empty() {
        return Ok(vec![]);
    }
    empirical_distribution(&prob.case, &scen, x, prob.wake)?
        .atoms
        .iter()
        .map(|z| model.evaluate(x, z).map(|e| e.value.unwrap_or(f64::INFINITY)))
        .collect()
}

fn blocks_complementarity_free(prob: &SizingProblem, m: &MasterLp, sol: &MasterSolution) -> Result<bool> {
    let normal = OperationModel::new(&prob.case, Mode::Normal)?;
    let extreme = OperationModel::new(&prob.case, Mode::Extreme)?;
    for (blocks, model) in [(&m.normal, &normal), (&m.extreme, &extreme)] {
        for b in blocks {
            let demand = &prob.scenarios.scenarios[b.scenario].demand;
            let (y, z) = m.block_point(&sol.lp, b, model, demand);
            if !model.complementarity_free(&model.instantiate(&sol.x, &z)?, &y) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Re-runs one update from the returned capacities and reports how far the
/// master moves them (`‖Δx‖_∞`).
pub fn fixed_point_step(prob: &SizingProblem, sol: &SizingSolution) -> Result<f64> {
    let slopes = prob
        .normal_slopes(&sol.x)?
        .ok_or_else(|| Error::Solver("capacities are infeasible for a normal scenario".into()))?;
    let next = solve_master(prob, &slopes)?;
    if next.status != LpStatus::Optimal {
        return Err(Error::Solver(format!("fixed-point master ended {:?}", next.status)));
    }
    Ok(next.x.iter().zip(&sol.x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Wind capacities rounded to whole turbine columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rounding {
    pub x: Vec<f64>,
    pub objective: f64,
    pub relative_change: f64,
    pub extreme_lhs: f64,
    /// Rounded capacities break the extreme cap or a normal scenario.
    pub violates: bool,
}

/// Nearest multiple of `step` within `[0, upper]`.
pub fn round_to_multiple(v: f64, step: f64, upper: f64) -> f64 {
    if !(step > 0.0) {
        return v;
    }
    ((v / step).round() * step).clamp(0.0, upper)
}

/// Rounds each wind capacity to the nearest whole column of turbines and
/// re-evaluates the objective at the rounded point.
pub fn round_capacities(prob: &SizingProblem, sol: &SizingSolution) -> Result<Rounding> {
    let xl = prob.case.capacity_layout();
    let bounds = prob.case.capacity_bounds();
    let mut x = sol.x.clone();
    for (i, site) in prob.case.wind_sites.iter().enumerate() {
        let k = xl.wind(i);
        x[k] = round_to_multiple(x[k], site.column_mw(), bounds[k]);
    }
    let fixed = fixed_point_value(prob, &x)?;
    let extreme_lhs = prob.extreme_lhs(&x)?;
    let objective = fixed.unwrap_or(f64::INFINITY);
    let violates = fixed.is_none() || extreme_lhs > prob.g_cap + 1e-5;
    let relative_change = (objective - sol.objective).abs() / sol.objective.abs().max(1e-12);
    log::info!("rounding changed the objective by {:.3}%", 100.0 * relative_change);
    Ok(Rounding { x, objective, relative_change, extreme_lhs, violates })
}

/// Objective at fixed capacities with slopes evaluated there; `None` when a
/// normal scenario is infeasible.
pub fn fixed_point_value(prob: &SizingProblem, x: &[f64]) -> Result<Option<f64>> {
    let Some(slopes) = prob.normal_slopes(x)? else {
        return Ok(None);
    };
    let mut m = build_master_lp(prob, &slopes)?;
    for (&v, &val) in m.x.iter().zip(x) {
        m.lp.lower[v] = val;
        m.lp.upper[v] = val;
    }
    // The fixed point is judged on the fuel-cost term whatever the objective.
    let mut p = prob.clone();
    p.objective = Objective::FuelCost { budget: None };
    let sol = m.solve(&p, &slopes)?;
    Ok((sol.status == LpStatus::Optimal).then(|| objective_of(prob, &sol)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub budget: f64,
    pub status: SizingStatus,
    pub investment: f64,
    pub fuel: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

/// One iterative solve per budget.
pub fn pareto_sweep(prob: &SizingProblem, budgets: &[f64], opts: &IterationOptions) -> Result<Vec<FrontierPoint>> {
    use rayon::prelude::*;
    if budgets.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("budgets must be sorted ascending"));
    }
    budgets
        .par_iter()
        .map(|&b| {
            let mut p = prob.clone();
            p.objective = Objective::FuelCost { budget: Some(b) };
            let s = algorithm2(&p, opts)?;
            Ok(FrontierPoint {
                budget: b,
                status: s.status,
                investment: s.investment,
                fuel: s.fuel,
                iterations: s.trace.len(),
                x: s.x,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests;
