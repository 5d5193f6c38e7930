//! Jensen single-wake model, turbine power curve and the farm sweep that
//! samples available power over (capacity, inflow speed).

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurbineSpec {
    pub cut_in_ms: f64,
    pub rated_ms: f64,
    pub cut_out_ms: f64,
    pub rated_power_mw: f64,
    pub thrust_coefficient: f64,
    pub rotor_diameter_m: f64,
    pub hub_height_m: f64,
    pub roughness_m: f64,
}

impl TurbineSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.cut_in_ms
            && self.cut_in_ms < self.rated_ms
            && self.rated_ms < self.cut_out_ms
            && self.rated_power_mw > 0.0
            && self.rotor_diameter_m > 0.0;
        if !ok {
            return Err(Error::invalid(format!(
                "turbine needs 0 < cut-in < rated < cut-out and positive power and diameter: {self:?}"
            )));
        }
        if !(0.0..=1.0).contains(&self.thrust_coefficient) {
            return Err(Error::invalid(format!(
                "thrust coefficient {} outside [0, 1]",
                self.thrust_coefficient
            )));
        }
        if !(self.roughness_m > 0.0 && self.hub_height_m > self.roughness_m) {
            return Err(Error::invalid(format!(
                "hub height {} m must exceed roughness length {} m > 0",
                self.hub_height_m, self.roughness_m
            )));
        }
        Ok(())
    }

    /// Wake decay constant `0.5 / ln(H/Z)`.
    pub fn wake_decay(&self) -> f64 {
        0.5 / (self.hub_height_m / self.roughness_m).ln()
    }

    /// Multiplicative speed factor between adjacent turbines `d` metres apart.
    pub fn wake_factor(&self, d: f64) -> f64 {
        let ratio = self.rotor_diameter_m / (self.rotor_diameter_m + 2.0 * self.wake_decay() * d);
        1.0 - (1.0 - (1.0 - self.thrust_coefficient).sqrt()) * ratio * ratio
    }
}

fn default_grid_points() -> usize {
    60
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarmLayout {
    pub rows: usize,
    pub row_length_m: f64,
    pub max_turbines_per_row: usize,
    pub max_speed_ms: f64,
    #[serde(default = "default_grid_points")]
    pub speed_grid_points: usize,
}

impl FarmLayout {
    pub fn validate(&self) -> Result<()> {
        if self.rows < 1
            || self.max_turbines_per_row < 2
            || !(self.row_length_m > 0.0)
            || self.speed_grid_points < 1
            || !(self.max_speed_ms > 0.0)
        {
            return Err(Error::invalid(format!(
                "layout needs rows >= 1, max turbines per row >= 2, positive row length and speed, grid points >= 1: {self:?}"
            )));
        }
        Ok(())
    }
}

pub fn downstream_speed(v1: f64, spec: &TurbineSpec, d: f64) -> Result<f64> {
    spec.validate()?;
    if !(v1 >= 0.0) || !(d > 0.0) {
        return Err(Error::invalid(format!("need v1 >= 0 and d > 0, got v1={v1}, d={d}")));
    }
    Ok(v1 * spec.wake_factor(d))
}

pub fn turbine_power(v: f64, spec: &TurbineSpec) -> f64 {
    if v <= spec.cut_in_ms || v > spec.cut_out_ms {
        0.0
    } else if v <= spec.rated_ms {
        spec.rated_power_mw * xi_transform(v, spec)
    } else {
        spec.rated_power_mw
    }
}

/// Auxiliary wind variable; not capped above rated speed.
pub fn xi_transform(v: f64, spec: &TurbineSpec) -> f64 {
    if v <= spec.cut_in_ms {
        return 0.0;
    }
    let vc2 = spec.cut_in_ms * spec.cut_in_ms;
    (v * v - vc2) / (spec.rated_ms * spec.rated_ms - vc2)
}

pub fn farm_available_power(
    n_per_row: usize,
    v_initial: f64,
    spec: &TurbineSpec,
    layout: &FarmLayout,
) -> Result<f64> {
    if n_per_row < 1 || n_per_row > layout.max_turbines_per_row {
        return Err(Error::invalid(format!(
            "turbines per row {n_per_row} outside 1..={}",
            layout.max_turbines_per_row
        )));
    }
    if !(v_initial >= 0.0) {
        return Err(Error::invalid(format!("inflow speed {v_initial} is negative")));
    }
    Ok(farm_power_unchecked(n_per_row, v_initial, spec, layout))
}

fn farm_power_unchecked(n: usize, v1: f64, spec: &TurbineSpec, layout: &FarmLayout) -> f64 {
    let factor = if n > 1 {
        spec.wake_factor(layout.row_length_m / (n - 1) as f64)
    } else {
        1.0
    };
    let mut v = v1;
    let mut row = 0.0;
    for _ in 0..n {
        row += turbine_power(v, spec);
        v *= factor;
    }
    layout.rows as f64 * row
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WakeSample {
    pub x_mw: f64,
    pub xi: f64,
    pub f_mw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WakeSamples {
    pub samples: Vec<WakeSample>,
    pub x_max: f64,
    pub xi_max: f64,
    pub p_max: f64,
}

/// Samples available farm power for every row size and inflow grid speed.
/// Samples are ordered by turbines per row, then by speed.
pub fn sweep(spec: &TurbineSpec, layout: &FarmLayout) -> Result<WakeSamples> {
    spec.validate()?;
    layout.validate()?;
    let unit = spec.rated_power_mw * layout.rows as f64;
    let steps = layout.speed_grid_points;
    let samples: Vec<WakeSample> = (1..=layout.max_turbines_per_row)
        .into_par_iter()
        .flat_map_iter(|n| {
            (0..=steps).map(move |k| {
                let nu = k as f64 * layout.max_speed_ms / steps as f64;
                let f = if nu > spec.cut_out_ms {
                    0.0
                } else {
                    farm_power_unchecked(n, nu, spec, layout)
                };
                WakeSample {
                    x_mw: unit * n as f64,
                    xi: xi_transform(nu, spec),
                    f_mw: f,
                }
            })
        })
        .collect();
    let p_max = samples.iter().map(|s| s.f_mw).fold(0.0, f64::max);
    Ok(WakeSamples {
        samples,
        x_max: unit * layout.max_turbines_per_row as f64,
        xi_max: xi_transform(layout.max_speed_ms, spec),
        p_max,
    })
}

pub fn write_samples_csv<W: Write>(samples: &WakeSamples, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| Error::Output(e.to_string());
    w.write_record(["x_mw", "xi", "f_mw"]).map_err(fail)?;
    for s in &samples.samples {
        w.write_record([s.x_mw.to_string(), s.xi.to_string(), s.f_mw.to_string()])
            .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))?;
    Ok(())
}
