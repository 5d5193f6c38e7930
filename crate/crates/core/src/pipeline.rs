//! Glue from raw inputs to a sizing problem: wake envelopes per site and
//! cached extreme slope bounds.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{select_facets, upper_hull_facets, FacetSet, Selection};
use crate::grid::{GridCase, WindSite};
use crate::lipschitz::{load_or_compute, ExtremeBounds, ExtremeOptions};
use crate::sizing::{Aggregate, ExtremeSlopes, Objective, SizingProblem};
use crate::uncertainty::{AmbiguityRadii, ScenarioSet};
use crate::wake::{sweep, WakeSamples};

/// Default envelope tolerance as a fraction of the largest sampled power.
pub const TOL_HULL_FRACTION: f64 = 0.01;

pub struct Envelope {
    pub samples: WakeSamples,
    pub full: FacetSet,
    pub selection: Selection,
}

/// Sweep, upper hull and facet selection for one site. `tol_hull` in MW
/// defaults to 1% of the largest sampled power.
pub fn site_envelope(site: &WindSite, tol_hull: Option<f64>) -> Result<Envelope> {
    let samples = sweep(&site.turbine, &site.layout)?;
    let full = upper_hull_facets(&samples)?;
    let tol = tol_hull.unwrap_or(TOL_HULL_FRACTION * full.p_max_mw);
    let selection = select_facets(&full, tol)?;
    Ok(Envelope { samples, full, selection })
}

/// The case with every site's envelope filled in. Sites that already carry
/// facets keep them unless `refit` is set.
pub fn with_envelopes(case: &GridCase, tol_hull: Option<f64>, refit: bool) -> Result<GridCase> {
    let mut out = case.clone();
    for site in &mut out.wind_sites {
        if refit || site.facets.is_none() {
            site.facets = Some(site_envelope(site, tol_hull)?.selection.selected);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub eps0: f64,
    pub g_cap: f64,
    pub objective: Objective,
    pub wake: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { eps0: 0.05, g_cap: 220.0, objective: Objective::FuelCost { budget: None }, wake: true }
    }
}

/// Builds the sizing problem, computing extreme bounds through the cache in
/// `cache`.
pub fn build_problem(
    case: &GridCase,
    scenarios: ScenarioSet,
    settings: &Settings,
    bounds_opts: &ExtremeOptions,
    cache: &Path,
) -> Result<(SizingProblem, ExtremeBounds)> {
    case.validate()?;
    let bounds = load_or_compute(case, bounds_opts, cache)?;
    let prob = SizingProblem {
        radii: AmbiguityRadii::for_case(settings.eps0, case, &scenarios)?,
        case: case.clone(),
        scenarios,
        extreme: ExtremeSlopes::from(&bounds),
        g_cap: settings.g_cap,
        objective: settings.objective,
        wake: settings.wake,
        aggregate: Aggregate::Average,
    };
    prob.validate()?;
    Ok((prob, bounds))
}
