//! Baseline sizing methods, out-of-sample testing and sensitivity sweeps.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridCase, Mode, OperationModel};
use crate::sizing::{algorithm2, Aggregate, Objective, IterationOptions, SizingProblem, SizingSolution, SizingStatus};
use crate::uncertainty::{atom, AmbiguityRadii, Condition, ScenarioSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Dro,
    /// Sample average without wake envelope.
    Sp1,
    /// Sample average with wake envelope.
    Sp2,
    /// Worst scenario.
    Ro,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 4] = [BaselineKind::Dro, BaselineKind::Sp1, BaselineKind::Sp2, BaselineKind::Ro];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Dro => "DRO",
            BaselineKind::Sp1 => "SP1",
            BaselineKind::Sp2 => "SP2",
            BaselineKind::Ro => "RO",
        }
    }
}

impl std::str::FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaselineKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown method {s:?}; expected DRO, SP1, SP2 or RO")))
    }
}

/// The sizing problem a method actually solves.
pub fn baseline_problem(kind: BaselineKind, prob: &SizingProblem) -> Result<SizingProblem> {
    let mut p = prob.clone();
    let zero = || AmbiguityRadii::for_case(0.0, &prob.case, &prob.scenarios);
    match kind {
        BaselineKind::Dro => {}
        BaselineKind::Sp1 => {
            p.radii = zero()?;
            p.wake = false;
        }
        BaselineKind::Sp2 => p.radii = zero()?,
        BaselineKind::Ro => {
            p.radii = zero()?;
            p.aggregate = Aggregate::Worst;
        }
    }
    Ok(p)
}

pub fn run_baseline(kind: BaselineKind, prob: &SizingProblem, opts: &IterationOptions) -> Result<SizingSolution> {
    algorithm2(&baseline_problem(kind, prob)?, opts)
}

/// Held-out performance of fixed capacities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutOfSample {
    /// Mean shedding over extreme scenarios (MWh); `None` without any.
    pub shedding_mean: Option<f64>,
    /// Mean fuel cost over feasible normal scenarios (CNY).
    pub fuel_mean: Option<f64>,
    /// Normal scenarios the capacities cannot serve.
    pub violations: usize,
    pub normal_count: usize,
    pub extreme_count: usize,
}

/// Runs the operation models on every held-out scenario at fixed `x`.
pub fn out_of_sample(case: &GridCase, x: &[f64], held_out: &ScenarioSet, wake: bool) -> Result<OutOfSample> {
    let normal = OperationModel::new(case, Mode::Normal)?;
    let extreme = OperationModel::new(case, Mode::Extreme)?;
    let values: Vec<(Condition, Option<f64>)> = held_out
        .scenarios
        .par_iter()
        .map(|s| {
            let z = atom(case, s, x, wake)?;
            let model = if s.label == Condition::Normal { &normal } else { &extreme };
            Ok((s.label, model.evaluate(x, &z)?.value))
        })
        .collect::<Result<_>>()?;
    let mean = |label: Condition| -> Option<f64> {
        let v: Vec<f64> = values.iter().filter(|(l, _)| *l == label).filter_map(|(_, v)| *v).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    };
    let count = |label: Condition| values.iter().filter(|(l, _)| *l == label).count();
    let violations = values.iter().filter(|(l, v)| *l == Condition::Normal && v.is_none()).count();
    let infeasible_extreme = values.iter().any(|(l, v)| *l == Condition::Extreme && v.is_none());
    if infeasible_extreme {
        return Err(Error::Solver("shedding problem infeasible on a held-out scenario".into()));
    }
    Ok(OutOfSample {
        shedding_mean: mean(Condition::Extreme),
        fuel_mean: mean(Condition::Normal),
        violations,
        normal_count: count(Condition::Normal),
        extreme_count: count(Condition::Extreme),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: BaselineKind,
    pub budget: Option<f64>,
    pub status: SizingStatus,
    pub x: Vec<f64>,
    pub investment: f64,
    /// Fuel-cost term from the sizing LP (CNY).
    pub estimated_fuel: f64,
    /// Extreme cap left side at the solution (MWh).
    pub estimated_shedding: f64,
    pub tested: Option<OutOfSample>,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub methods: Vec<MethodResult>,
}

/// Sizes with every requested method and tests each on `held_out`.
pub fn compare_methods(
    prob: &SizingProblem,
    kinds: &[BaselineKind],
    held_out: Option<&ScenarioSet>,
    opts: &IterationOptions,
) -> Result<EvalReport> {
    let methods = kinds
        .iter()
        .map(|&kind| {
            let p = baseline_problem(kind, prob)?;
            let start = Instant::now();
            let s = algorithm2(&p, opts)?;
            let runtime_s = start.elapsed().as_secs_f64();
            // Tested values always use the envelope: the wake is physical.
            let tested = match held_out {
                Some(h) if !s.x.is_empty() => Some(out_of_sample(&p.case, &s.x, h, true)?),
                _ => None,
            };
            Ok(MethodResult {
                method: kind,
                budget: match p.objective {
                    Objective::FuelCost { budget } => budget,
                    Objective::Investment { .. } => None,
                },
                status: s.status,
                investment: s.investment,
                estimated_fuel: s.fuel,
                estimated_shedding: s.extreme_lhs,
                x: s.x,
                tested,
                runtime_s,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EvalReport { methods })
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl EvalReport {
    /// One row per method; capacities as `x0;x1;…`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Output(e.to_string());
        w.write_record([
            "method",
            "budget_cny",
            "status",
            "capacities",
            "investment_cny",
            "estimated_fuel_cny",
            "estimated_shedding_mwh",
            "tested_fuel_cny",
            "tested_shedding_mwh",
            "violations",
            "runtime_s",
        ])
        .map_err(err)?;
        for m in &self.methods {
            let t = m.tested.as_ref();
            w.write_record([
                m.method.name().to_string(),
                opt(m.budget),
                status_name(m.status).to_string(),
                join(&m.x),
                m.investment.to_string(),
                m.estimated_fuel.to_string(),
                m.estimated_shedding.to_string(),
                opt(t.and_then(|t| t.fuel_mean)),
                opt(t.and_then(|t| t.shedding_mean)),
                t.map(|t| t.violations.to_string()).unwrap_or_default(),
                m.runtime_s.to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::Output(e.to_string()))
    }
}

pub fn status_name(s: SizingStatus) -> &'static str {
    match s {
        SizingStatus::Converged => "converged",
        SizingStatus::Infeasible => "infeasible",
        SizingStatus::IterationLimit => "iteration_limit",
    }
}

pub fn join(x: &[f64]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Knob {
    Eps0,
    GCap,
    /// Multiplier on storage power and energy costs.
    CostScale,
}

impl std::str::FromStr for Knob {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps0" => Ok(Knob::Eps0),
            "g-cap" | "g_cap" => Ok(Knob::GCap),
            "kappa" | "cost-scale" | "cost_scale" => Ok(Knob::CostScale),
            _ => Err(Error::invalid(format!("unknown sweep knob {s:?}; expected eps0, g-cap or kappa"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub knob: Knob,
    pub value: f64,
    pub status: SizingStatus,
    pub x: Vec<f64>,
    pub investment: f64,
    pub fuel: f64,
    pub tested: Option<OutOfSample>,
}

/// The problem with one knob set.
pub fn with_knob(prob: &SizingProblem, knob: Knob, value: f64) -> Result<SizingProblem> {
    if !value.is_finite() {
        return Err(Error::invalid(format!("sweep value must be finite, got {value}")));
    }
    let mut p = prob.clone();
    match knob {
        Knob::Eps0 => p.radii = AmbiguityRadii::for_case(value, &p.case, &p.scenarios)?,
        Knob::GCap => p.g_cap = value,
        Knob::CostScale => {
            if !(value >= 0.0) {
                return Err(Error::invalid(format!("cost scale must be nonnegative, got {value}")));
            }
            // Unit multiplication keeps the unswept row bit-for-bit.
            if value != 1.0 {
                for s in &mut p.case.storage_sites {
                    s.power_cost_cny_per_mw *= value;
                    s.energy_cost_cny_per_mwh *= value;
                }
            }
        }
    }
    Ok(p)
}

/// Re-solves once per value; failures of a single cell are recorded as
/// infeasible rows and the sweep continues.
pub fn sensitivity_sweep(
    prob: &SizingProblem,
    knob: Knob,
    values: &[f64],
    held_out: Option<&ScenarioSet>,
    opts: &IterationOptions,
) -> Result<Vec<SweepRow>> {
    values
        .par_iter()
        .map(|&value| {
            let p = with_knob(prob, knob, value)?;
            let s = match algorithm2(&p, opts) {
                Ok(s) => s,
                Err(e) => {
                    log::warn!("sweep {knob:?}={value} failed: {e}");
                    return Ok(SweepRow {
                        knob,
                        value,
                        status: SizingStatus::Infeasible,
                        x: vec![],
                        investment: f64::NAN,
                        fuel: f64::NAN,
                        tested: None,
                    });
                }
            };
            let tested = match held_out {
                Some(h) if !s.x.is_empty() => Some(out_of_sample(&p.case, &s.x, h, true)?),
                _ => None,
            };
            Ok(SweepRow { knob, value, status: s.status, investment: s.investment, fuel: s.fuel, x: s.x, tested })
        })
        .collect()
}

pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Output(e.to_string());
    w.write_record(["knob", "value", "status", "capacities", "investment_cny", "fuel_cny", "tested_fuel_cny", "tested_shedding_mwh"])
        .map_err(err)?;
    for r in rows {
        let t = r.tested.as_ref();
        w.write_record([
            serde_json::to_value(r.knob).map_err(|e| Error::Output(e.to_string()))?.as_str().unwrap_or("").to_string(),
            r.value.to_string(),
            status_name(r.status).to_string(),
            join(&r.x),
            r.investment.to_string(),
            r.fuel.to_string(),
            opt(t.and_then(|t| t.fuel_mean)),
            opt(t.and_then(|t| t.shedding_mean)),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))
}

#[cfg(test)]
mod tests;
