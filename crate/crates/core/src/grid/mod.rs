//! Transmission grid description and the operation problems built on it.

mod compact;
mod model;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FacetSet;
use crate::wake::{FarmLayout, TurbineSpec};

pub use compact::{compact_form, CompactForm};
pub use model::{
    build_constraints, eval_ge, eval_gn, Evaluation, Mode, OperationModel, RowTag, VarIndex,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: usize,
    #[serde(default)]
    pub demand_max_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuelPiece {
    pub slope_cny_per_mwh: f64,
    pub offset_cny: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub bus: usize,
    pub p_min_mw: f64,
    pub p_max_mw: f64,
    /// Lower limit on `p_t − p_{t−1}` per hour; not positive.
    pub ramp_min_mw_per_h: f64,
    pub ramp_max_mw_per_h: f64,
    pub fuel: Vec<FuelPiece>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    pub reactance_pu: f64,
    pub capacity_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindSite {
    pub bus: usize,
    pub turbine: TurbineSpec,
    pub layout: FarmLayout,
    pub unit_cost_cny_per_mw: f64,
    /// Selected envelope; filled by the wake pipeline when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<FacetSet>,
}

impl WindSite {
    pub fn capacity_max_mw(&self) -> f64 {
        self.turbine.rated_power_mw * (self.layout.rows * self.layout.max_turbines_per_row) as f64
    }

    /// Capacity of one column of turbines across all rows.
    pub fn column_mw(&self) -> f64 {
        self.turbine.rated_power_mw * self.layout.rows as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageSite {
    pub bus: usize,
    pub power_max_mw: f64,
    pub energy_max_mwh: f64,
    pub power_cost_cny_per_mw: f64,
    pub energy_cost_cny_per_mwh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCase {
    pub name: String,
    pub periods: usize,
    pub period_hours: f64,
    pub buses: Vec<Bus>,
    #[serde(default)]
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub lines: Vec<Line>,
    #[serde(default)]
    pub wind_sites: Vec<WindSite>,
    #[serde(default)]
    pub storage_sites: Vec<StorageSite>,
    pub charge_efficiency: f64,
    pub discharge_efficiency: f64,
    pub soc_min: f64,
    pub soc_max: f64,
}

/// Position of each capacity in the decision vector `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapacityLayout {
    pub wind: usize,
    pub storage: usize,
}

impl CapacityLayout {
    pub fn len(&self) -> usize {
        self.wind + 2 * self.storage
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn wind(&self, i: usize) -> usize {
        i
    }

    pub fn power(&self, s: usize) -> usize {
        self.wind + s
    }

    pub fn energy(&self, s: usize) -> usize {
        self.wind + self.storage + s
    }
}

/// Position of each uncertain quantity in `ζ`: wind per site and period,
/// then demand per load bus and period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncertaintyLayout {
    pub periods: usize,
    pub sites: usize,
    /// Bus indices (positions in `GridCase::buses`) that carry demand.
    pub load_buses: Vec<usize>,
}

impl UncertaintyLayout {
    pub fn len(&self) -> usize {
        (self.sites + self.load_buses.len()) * self.periods
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn wind(&self, site: usize, t: usize) -> usize {
        site * self.periods + t
    }

    pub fn demand(&self, load: usize, t: usize) -> usize {
        (self.sites + load) * self.periods + t
    }

    pub fn wind_len(&self) -> usize {
        self.sites * self.periods
    }
}

impl GridCase {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let case: GridCase = serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
        case.validate()?;
        Ok(case)
    }

    /// Position of bus `id` in `buses`.
    pub fn bus_index(&self, id: usize) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    /// Bus with the lowest id; its angle is fixed to zero.
    pub fn reference_bus(&self) -> usize {
        (0..self.buses.len()).min_by_key(|&b| self.buses[b].id).unwrap_or(0)
    }

    pub fn capacity_layout(&self) -> CapacityLayout {
        CapacityLayout {
            wind: self.wind_sites.len(),
            storage: self.storage_sites.len(),
        }
    }

    pub fn uncertainty_layout(&self) -> UncertaintyLayout {
        UncertaintyLayout {
            periods: self.periods,
            sites: self.wind_sites.len(),
            load_buses: (0..self.buses.len())
                .filter(|&b| self.buses[b].demand_max_mw > 0.0)
                .collect(),
        }
    }

    /// Upper capacity bounds in `x` order.
    pub fn capacity_bounds(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.wind_sites.iter().map(|w| w.capacity_max_mw()).collect();
        out.extend(self.storage_sites.iter().map(|s| s.power_max_mw));
        out.extend(self.storage_sites.iter().map(|s| s.energy_max_mwh));
        out
    }

    /// Investment cost coefficients in `x` order.
    pub fn capacity_costs(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.wind_sites.iter().map(|w| w.unit_cost_cny_per_mw).collect();
        out.extend(self.storage_sites.iter().map(|s| s.power_cost_cny_per_mw));
        out.extend(self.storage_sites.iter().map(|s| s.energy_cost_cny_per_mwh));
        out
    }

    pub fn investment(&self, x: &[f64]) -> f64 {
        self.capacity_costs().iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(format!("case {}: {m}", self.name)));
        if self.periods < 1 {
            return bad("periods must be at least 1".into());
        }
        if !(self.period_hours > 0.0) {
            return bad("period length must be positive".into());
        }
        if self.buses.is_empty() {
            return bad("no buses".into());
        }
        let ids: BTreeSet<usize> = self.buses.iter().map(|b| b.id).collect();
        if ids.len() != self.buses.len() {
            return bad("duplicate bus ids".into());
        }
        for b in &self.buses {
            if !(b.demand_max_mw >= 0.0) {
                return bad(format!("bus {} has negative demand bound", b.id));
            }
        }
        for eta in [self.charge_efficiency, self.discharge_efficiency] {
            if !(eta > 0.0 && eta <= 1.0) {
                return bad(format!("efficiency {eta} outside (0, 1]"));
            }
        }
        if !(0.0 <= self.soc_min && self.soc_min < self.soc_max && self.soc_max <= 1.0) {
            return bad("need 0 <= soc_min < soc_max <= 1".into());
        }
        let known = |bus: usize, what: &str| -> Result<()> {
            if ids.contains(&bus) {
                Ok(())
            } else {
                Err(Error::invalid(format!("case {}: {what} refers to unknown bus {bus}", self.name)))
            }
        };
        for g in &self.generators {
            known(g.bus, "generator")?;
            if !(g.p_min_mw <= g.p_max_mw) || !g.p_min_mw.is_finite() || !g.p_max_mw.is_finite() {
                return bad(format!("generator at bus {} has bad limits", g.bus));
            }
            if !(g.ramp_min_mw_per_h <= 0.0 && g.ramp_max_mw_per_h >= 0.0) {
                return bad(format!("generator at bus {} needs ramp_min <= 0 <= ramp_max", g.bus));
            }
            if g.fuel.is_empty() {
                return bad(format!("generator at bus {} has no fuel pieces", g.bus));
            }
        }
        for l in &self.lines {
            known(l.from, "line")?;
            known(l.to, "line")?;
            if l.from == l.to || !(l.reactance_pu > 0.0) || !(l.capacity_mw >= 0.0) {
                return bad(format!("line {}-{} needs distinct ends, positive reactance", l.from, l.to));
            }
        }
        for w in &self.wind_sites {
            known(w.bus, "wind site")?;
            w.turbine.validate()?;
            w.layout.validate()?;
        }
        for s in &self.storage_sites {
            known(s.bus, "storage site")?;
            if !(s.power_max_mw >= 0.0 && s.energy_max_mwh >= 0.0) {
                return bad(format!("storage at bus {} has negative bounds", s.bus));
            }
        }
        // Connectivity by union of line endpoints.
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for l in &self.lines {
            adj.entry(l.from).or_default().push(l.to);
            adj.entry(l.to).or_default().push(l.from);
        }
        let start = self.buses[self.reference_bus()].id;
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(b) = stack.pop() {
            for &n in adj.get(&b).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        if seen.len() != ids.len() {
            return bad("network is not connected".into());
        }
        Ok(())
    }

    /// The same case with `site` facets replaced.
    pub fn with_facets(&self, facets: Vec<FacetSet>) -> Result<Self> {
        if facets.len() != self.wind_sites.len() {
            return Err(Error::DimensionMismatch {
                context: "facet sets per wind site",
                expected: self.wind_sites.len(),
                actual: facets.len(),
            });
        }
        let mut out = self.clone();
        for (w, f) in out.wind_sites.iter_mut().zip(facets) {
            w.facets = Some(f);
        }
        Ok(out)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// One bus with a single linear-cost generator and demand bound 100 MW.
    pub fn one_bus(p_max: f64, slope: f64) -> GridCase {
        GridCase {
            name: "one".into(),
            periods: 1,
            period_hours: 1.0,
            buses: vec![Bus { id: 1, demand_max_mw: 100.0 }],
            generators: vec![Generator {
                bus: 1,
                p_min_mw: 0.0,
                p_max_mw: p_max,
                ramp_min_mw_per_h: -1000.0,
                ramp_max_mw_per_h: 1000.0,
                fuel: vec![FuelPiece { slope_cny_per_mwh: slope, offset_cny: 0.0 }],
            }],
            lines: vec![],
            wind_sites: vec![],
            storage_sites: vec![],
            charge_efficiency: 0.95,
            discharge_efficiency: 0.95,
            soc_min: 0.1,
            soc_max: 0.9,
        }
    }

    pub fn wind_site(bus: usize) -> WindSite {
        WindSite {
            bus,
            turbine: crate::wake::tests::spec(),
            layout: FarmLayout {
                rows: 2,
                row_length_m: 600.0,
                max_turbines_per_row: 10,
                max_speed_ms: 20.0,
                speed_grid_points: 20,
            },
            unit_cost_cny_per_mw: 1000.0,
            facets: None,
        }
    }

    pub fn storage_site(bus: usize) -> StorageSite {
        StorageSite {
            bus,
            power_max_mw: 20.0,
            energy_max_mwh: 40.0,
            power_cost_cny_per_mw: 100.0,
            energy_cost_cny_per_mwh: 50.0,
        }
    }

    /// Two buses, one line, a generator and wind at bus 1, load and storage
    /// at bus 2.
    pub fn two_bus(periods: usize) -> GridCase {
        let mut c = one_bus(60.0, 10.0);
        c.name = "two".into();
        c.periods = periods;
        c.buses = vec![Bus { id: 1, demand_max_mw: 0.0 }, Bus { id: 2, demand_max_mw: 60.0 }];
        c.generators[0].p_min_mw = 5.0;
        c.generators[0].ramp_min_mw_per_h = -15.0;
        c.generators[0].ramp_max_mw_per_h = 20.0;
        c.generators[0].fuel.push(FuelPiece { slope_cny_per_mwh: 25.0, offset_cny: -450.0 });
        c.lines = vec![Line { from: 1, to: 2, reactance_pu: 0.2, capacity_mw: 45.0 }];
        c.wind_sites = vec![wind_site(1)];
        c.storage_sites = vec![storage_site(2)];
        c
    }

    #[test]
    fn validation_catches_islands_and_bad_ramps() {
        let mut c = one_bus(50.0, 10.0);
        assert!(c.validate().is_ok());
        c.buses.push(Bus { id: 2, demand_max_mw: 0.0 });
        assert!(c.validate().is_err());
        c.lines.push(Line { from: 1, to: 2, reactance_pu: 0.1, capacity_mw: 10.0 });
        assert!(c.validate().is_ok());
        c.generators[0].ramp_min_mw_per_h = 5.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = one_bus(50.0, 10.0);
        let text = serde_json::to_string(&c).unwrap();
        let back: GridCase = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
