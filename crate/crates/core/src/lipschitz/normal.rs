//! Scenario-point Lipschitz estimates of the fuel-cost function.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Mode, OperationModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalBounds {
    /// Per wind site, CNY per MW.
    pub wind: Vec<f64>,
    pub demand: f64,
    /// Scenarios at which the fuel-cost LP was infeasible; the bounds cover
    /// the remaining ones.
    pub infeasible: Vec<usize>,
}

/// Largest local slopes of `g^N(x, ·)` read from the duals at each atom.
pub fn normal_bounds(model: &OperationModel, x: &[f64], atoms: &[Vec<f64>]) -> Result<NormalBounds> {
    if model.mode != Mode::Normal {
        return Err(Error::invalid("normal bounds need the fuel-cost model"));
    }
    let zl = &model.z_layout;
    let slopes = atoms
        .par_iter()
        .map(|z| {
            let eval = model.evaluate(x, z)?;
            Ok(eval.value.map(|_| model.zeta_sensitivity(&eval.solution)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut wind = vec![0.0f64; zl.sites];
    let mut demand = 0.0f64;
    let mut infeasible = Vec::new();
    for (n, s) in slopes.into_iter().enumerate() {
        let Some(grad) = s else {
            infeasible.push(n);
            continue;
        };
        for (site, w) in wind.iter_mut().enumerate() {
            for t in 0..zl.periods {
                *w = w.max(-grad[zl.wind(site, t)]);
            }
        }
        for k in 0..zl.load_buses.len() {
            for t in 0..zl.periods {
                demand = demand.max(grad[zl.demand(k, t)].abs());
            }
        }
    }
    Ok(NormalBounds { wind, demand, infeasible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::tests::{one_bus, wind_site};

    #[test]
    fn marginal_fuel_rate_sets_the_wind_bound() {
        let mut c = one_bus(100.0, 10.0);
        c.period_hours = 2.0;
        c.wind_sites.push(wind_site(1));
        let m = OperationModel::new(&c, Mode::Normal).unwrap();
        let b = normal_bounds(&m, &[40.0], &[vec![20.0, 50.0], vec![10.0, 70.0]]).unwrap();
        assert!((b.wind[0] - 20.0).abs() < 1e-7);
        assert!((b.demand - 20.0).abs() < 1e-7);
        assert!(b.infeasible.is_empty());
    }

    #[test]
    fn infeasible_scenarios_are_reported() {
        let c = one_bus(30.0, 10.0);
        let m = OperationModel::new(&c, Mode::Normal).unwrap();
        let b = normal_bounds(&m, &[], &[vec![20.0], vec![50.0]]).unwrap();
        assert_eq!(b.infeasible, vec![1]);
        assert!((b.demand - 10.0).abs() < 1e-7);
    }
}
