//! Scenarios, decision-dependent empirical distributions, supports and
//! ambiguity radii.

mod transport;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FacetSet;
use crate::grid::{GridCase, UncertaintyLayout};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::wake::xi_transform;

pub use transport::{wasserstein_1_discrete, WeightedPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Normal,
    Extreme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    WindSpeed,
    Demand,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Record {
    scenario_id: String,
    label: Condition,
    period: usize,
    entity_id: usize,
    kind: Kind,
    value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub label: Condition,
    /// Wind speed (m/s) per site and period.
    pub wind_speed: Vec<Vec<f64>>,
    /// `ξ̂` per site and period.
    pub xi: Vec<Vec<f64>>,
    /// Demand (MW) per load bus and period, in `UncertaintyLayout` order.
    pub demand: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    pub periods: usize,
    pub scenarios: Vec<Scenario>,
}

impl ScenarioSet {
    pub fn with_label(&self, label: Condition) -> Vec<&Scenario> {
        self.scenarios.iter().filter(|s| s.label == label).collect()
    }

    pub fn normal(&self) -> Vec<&Scenario> {
        self.with_label(Condition::Normal)
    }

    pub fn extreme(&self) -> Vec<&Scenario> {
        self.with_label(Condition::Extreme)
    }

    /// Builds a scenario from raw speeds, converting them with each site's
    /// turbine curve.
    pub fn scenario(
        case: &GridCase,
        id: impl Into<String>,
        label: Condition,
        wind_speed: Vec<Vec<f64>>,
        demand: Vec<Vec<f64>>,
    ) -> Result<Scenario> {
        let layout = case.uncertainty_layout();
        let id = id.into();
        let shape_ok = |v: &Vec<Vec<f64>>, n: usize| v.len() == n && v.iter().all(|r| r.len() == case.periods);
        if !shape_ok(&wind_speed, layout.sites) || !shape_ok(&demand, layout.load_buses.len()) {
            return Err(Error::invalid(format!("scenario {id}: data does not match case dimensions")));
        }
        for (k, &b) in layout.load_buses.iter().enumerate() {
            let cap = case.buses[b].demand_max_mw;
            if let Some(v) = demand[k].iter().find(|v| !(**v >= 0.0 && **v <= cap)) {
                return Err(Error::invalid(format!(
                    "scenario {id}: demand {v} at bus {} outside [0, {cap}]",
                    case.buses[b].id
                )));
            }
        }
        if wind_speed.iter().flatten().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid(format!("scenario {id}: wind speeds must be finite and nonnegative")));
        }
        let xi = wind_speed
            .iter()
            .zip(&case.wind_sites)
            .map(|(row, site)| row.iter().map(|&v| xi_transform(v, &site.turbine)).collect())
            .collect();
        Ok(Scenario { id, label, wind_speed, xi, demand })
    }

    pub fn read_csv(path: &Path, case: &GridCase) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, case, path)
    }

    pub fn parse_csv(text: &str, case: &GridCase, origin: &Path) -> Result<Self> {
        let layout = case.uncertainty_layout();
        let t_n = case.periods;
        let mut order: Vec<String> = Vec::new();
        let mut raw: BTreeMap<String, (Condition, Vec<Vec<Option<f64>>>, Vec<Vec<Option<f64>>>)> = BTreeMap::new();
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        for rec in reader.deserialize::<Record>() {
            let r = rec.map_err(|e| Error::parse(origin, e))?;
            if r.period < 1 || r.period > t_n {
                return Err(Error::parse(origin, format!("scenario {}: period {} outside 1..={t_n}", r.scenario_id, r.period)));
            }
            let entry = raw.entry(r.scenario_id.clone()).or_insert_with(|| {
                order.push(r.scenario_id.clone());
                (r.label, vec![vec![None; t_n]; layout.sites], vec![vec![None; t_n]; layout.load_buses.len()])
            });
            if entry.0 != r.label {
                return Err(Error::parse(origin, format!("scenario {} has mixed labels", r.scenario_id)));
            }
            let slot = match r.kind {
                Kind::WindSpeed => entry
                    .1
                    .get_mut(r.entity_id)
                    .ok_or_else(|| Error::parse(origin, format!("unknown wind site {}", r.entity_id)))?,
                Kind::Demand => {
                    let k = case
                        .bus_index(r.entity_id)
                        .and_then(|b| layout.load_buses.iter().position(|&lb| lb == b))
                        .ok_or_else(|| Error::parse(origin, format!("bus {} carries no demand", r.entity_id)))?;
                    &mut entry.2[k]
                }
            };
            let cell = &mut slot[r.period - 1];
            if cell.is_some() {
                return Err(Error::parse(origin, format!(
                    "scenario {}: duplicate {:?} for entity {} period {}",
                    r.scenario_id, r.kind, r.entity_id, r.period
                )));
            }
            *cell = Some(r.value);
        }
        let mut scenarios = Vec::with_capacity(order.len());
        for id in order {
            let (label, wind, demand) = raw.remove(&id).expect("recorded id");
            let fill = |m: Vec<Vec<Option<f64>>>| -> Result<Vec<Vec<f64>>> {
                m.into_iter()
                    .map(|row| row.into_iter().collect::<Option<Vec<f64>>>())
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::parse(origin, format!("scenario {id} is missing values")))
            };
            let (wind, demand) = (fill(wind)?, fill(demand)?);
            scenarios.push(Self::scenario(case, id, label, wind, demand)?);
        }
        Ok(ScenarioSet { periods: t_n, scenarios })
    }

    pub fn write_csv<W: std::io::Write>(&self, case: &GridCase, out: W) -> Result<()> {
        let layout = case.uncertainty_layout();
        let mut w = csv::Writer::from_writer(out);
        let fail = |e: csv::Error| Error::Output(e.to_string());
        for s in &self.scenarios {
            for t in 0..self.periods {
                for (site, row) in s.wind_speed.iter().enumerate() {
                    w.serialize(Record {
                        scenario_id: s.id.clone(),
                        label: s.label,
                        period: t + 1,
                        entity_id: site,
                        kind: Kind::WindSpeed,
                        value: row[t],
                    })
                    .map_err(fail)?;
                }
                for (k, row) in s.demand.iter().enumerate() {
                    w.serialize(Record {
                        scenario_id: s.id.clone(),
                        label: s.label,
                        period: t + 1,
                        entity_id: case.buses[layout.load_buses[k]].id,
                        kind: Kind::Demand,
                        value: row[t],
                    })
                    .map_err(fail)?;
                }
            }
        }
        w.flush().map_err(|e| Error::Output(e.to_string()))
    }
}

/// Available wind power (MW) at capacity `x` and `ξ̂`: the facet envelope
/// capped by the wake-free bound `ξ̂·x`, clipped at zero.
pub fn available_wind(x: f64, xi: f64, facets: Option<&FacetSet>) -> f64 {
    let env = facets.map_or(f64::INFINITY, |f| f.envelope(x, xi));
    env.min(xi * x).max(0.0)
}

/// Per-site facet sets; every site must carry one.
pub fn site_facets(case: &GridCase) -> Result<Vec<&FacetSet>> {
    case.wind_sites
        .iter()
        .enumerate()
        .map(|(i, w)| {
            w.facets
                .as_ref()
                .ok_or_else(|| Error::invalid(format!("wind site {i} has no facets; run the wake stage first")))
        })
        .collect()
}

/// Point `ζ̂_n(x)` in `UncertaintyLayout` order. With `wake` false the facets
/// are ignored and wind is `ξ̂·x`.
pub fn atom(case: &GridCase, s: &Scenario, x: &[f64], wake: bool) -> Result<Vec<f64>> {
    let layout = case.uncertainty_layout();
    let facets = if wake { Some(site_facets(case)?) } else { None };
    let mut z = vec![0.0; layout.len()];
    for site in 0..layout.sites {
        let f = facets.as_ref().map(|v| v[site]);
        for t in 0..layout.periods {
            z[layout.wind(site, t)] = available_wind(x[case.capacity_layout().wind(site)], s.xi[site][t], f);
        }
    }
    for k in 0..layout.load_buses.len() {
        for t in 0..layout.periods {
            z[layout.demand(k, t)] = s.demand[k][t];
        }
    }
    Ok(z)
}

/// Uniformly weighted atoms `ζ̂_n(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Empirical {
    pub atoms: Vec<Vec<f64>>,
    pub weight: f64,
}

impl Empirical {
    pub fn points(&self) -> Vec<WeightedPoint> {
        self.atoms.iter().map(|a| (self.weight, a.clone())).collect()
    }
}

pub fn empirical_distribution(case: &GridCase, scenarios: &[&Scenario], x: &[f64], wake: bool) -> Result<Empirical> {
    if scenarios.is_empty() {
        return Err(Error::invalid("empirical distribution needs at least one scenario"));
    }
    let atoms = scenarios
        .iter()
        .map(|s| atom(case, s, x, wake))
        .collect::<Result<Vec<_>>>()?;
    Ok(Empirical { weight: 1.0 / atoms.len() as f64, atoms })
}

/// Membership in `Ξ^{WE}(x) × Ξ^{DE}`.
pub fn in_extreme_support(case: &GridCase, x: &[f64], z: &[f64], tol: f64) -> Result<bool> {
    let layout = case.uncertainty_layout();
    check_len(&layout, z)?;
    let facets = site_facets(case)?;
    for site in 0..layout.sites {
        let xw = x[case.capacity_layout().wind(site)];
        let cap = facets[site].envelope(xw, facets[site].xi_max);
        for t in 0..layout.periods {
            let v = z[layout.wind(site, t)];
            if v < -tol || v > xw + tol || v > cap + tol {
                return Ok(false);
            }
        }
    }
    for (k, &b) in layout.load_buses.iter().enumerate() {
        for t in 0..layout.periods {
            let v = z[layout.demand(k, t)];
            if v < -tol || v > case.buses[b].demand_max_mw + tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_len(layout: &UncertaintyLayout, z: &[f64]) -> Result<()> {
    if z.len() != layout.len() {
        return Err(Error::DimensionMismatch {
            context: "uncertainty vector",
            expected: layout.len(),
            actual: z.len(),
        });
    }
    Ok(())
}

/// True when `target` is a convex combination of `points`.
pub fn in_convex_hull(points: &[Vec<f64>], target: &[f64], tol: f64) -> Result<bool> {
    if points.is_empty() {
        return Ok(false);
    }
    let mut lp = LinearProgram::new();
    let lam: Vec<usize> = points.iter().map(|_| lp.add_var(0.0, 0.0, f64::INFINITY)).collect();
    lp.add_eq(lam.iter().map(|&l| (l, 1.0)).collect(), 1.0);
    // Elastic rows: minimize the total deviation.
    for (d, &v) in target.iter().enumerate() {
        let up = lp.add_var(1.0, 0.0, f64::INFINITY);
        let dn = lp.add_var(1.0, 0.0, f64::INFINITY);
        let mut row: Vec<(usize, f64)> = lam.iter().zip(points).map(|(&l, p)| (l, p[d])).collect();
        row.push((up, 1.0));
        row.push((dn, -1.0));
        lp.add_eq(row, v);
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(format!("hull membership LP ended {:?}", sol.status)));
    }
    Ok(sol.objective <= tol)
}

/// Membership in the normal support: each wind site's trajectory lies in the
/// hull of that site's atoms, and demand in the hull of the demand atoms.
pub fn in_normal_support(case: &GridCase, empirical: &Empirical, z: &[f64], tol: f64) -> Result<bool> {
    let layout = case.uncertainty_layout();
    check_len(&layout, z)?;
    let block = |v: &[f64], idx: &dyn Fn(usize) -> usize, n: usize| -> Vec<f64> { (0..n).map(|k| v[idx(k)]).collect() };
    for site in 0..layout.sites {
        let idx = |t: usize| layout.wind(site, t);
        let pts: Vec<Vec<f64>> = empirical.atoms.iter().map(|a| block(a, &idx, layout.periods)).collect();
        if !in_convex_hull(&pts, &block(z, &idx, layout.periods), tol)? {
            return Ok(false);
        }
    }
    let n_d = layout.load_buses.len() * layout.periods;
    let off = layout.wind_len();
    let idx = |k: usize| off + k;
    let pts: Vec<Vec<f64>> = empirical.atoms.iter().map(|a| block(a, &idx, n_d)).collect();
    in_convex_hull(&pts, &block(z, &idx, n_d), tol)
}

/// Wasserstein radii derived from a single scalar `ε₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityRadii {
    pub eps0: f64,
    /// Per wind site, in units of `x^W` (the ball radius is `ε·x^W`).
    pub wind_extreme: f64,
    pub demand_extreme: f64,
    pub wind_normal: f64,
    pub demand_normal: f64,
}

impl AmbiguityRadii {
    /// `ε^W = ε₀/|S|^{1/T}` and `ε^D = N_D·ε₀/|S|^{1/(N_D·T)}`.
    pub fn new(eps0: f64, extreme: usize, normal: usize, periods: usize, load_buses: usize) -> Result<Self> {
        if !(eps0 >= 0.0) || !eps0.is_finite() {
            return Err(Error::invalid(format!("eps0 must be finite and nonnegative, got {eps0}")));
        }
        if periods == 0 {
            return Err(Error::invalid("periods must be positive"));
        }
        let wind = |n: usize| if n == 0 { 0.0 } else { eps0 / (n as f64).powf(1.0 / periods as f64) };
        let demand = |n: usize| {
            if n == 0 || load_buses == 0 {
                0.0
            } else {
                let nd = load_buses as f64;
                nd * eps0 / (n as f64).powf(1.0 / (nd * periods as f64))
            }
        };
        Ok(AmbiguityRadii {
            eps0,
            wind_extreme: wind(extreme),
            demand_extreme: demand(extreme),
            wind_normal: wind(normal),
            demand_normal: demand(normal),
        })
    }

    pub fn for_case(eps0: f64, case: &GridCase, scenarios: &ScenarioSet) -> Result<Self> {
        Self::new(
            eps0,
            scenarios.extreme().len(),
            scenarios.normal().len(),
            case.periods,
            case.uncertainty_layout().load_buses.len(),
        )
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::geometry::Facet;
    use crate::grid::tests::two_bus;
    use proptest::prelude::*;

    pub fn simple_facets() -> FacetSet {
        FacetSet {
            facets: vec![
                Facet { a1: 0.9, a2: 50.0, a3: 0.0 },
                Facet { a1: 0.0, a2: 0.0, a3: 30.0 },
            ],
            x_max_mw: 40.0,
            xi_max: 2.0,
            p_max_mw: 30.0,
        }
    }

    #[test]
    fn available_wind_examples() {
        let one = FacetSet { facets: vec![Facet { a1: 0.9, a2: 50.0, a3: 0.0 }], ..simple_facets() };
        assert_eq!(available_wind(0.0, 0.7, Some(&one)), 0.0);
        assert_eq!(available_wind(80.0, 0.0, Some(&one)), 0.0);
        assert!((available_wind(100.0, 0.5, Some(&one)) - 50.0).abs() < 1e-12);
        assert!((available_wind(100.0, 0.5, None) - 50.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn available_wind_is_concave_nondecreasing_and_capped(
            x in 0.0f64..40.0, a in 0.0f64..2.0, b in 0.0f64..2.0, s in 0.0f64..1.0
        ) {
            let f = simple_facets();
            let g = |xi: f64| available_wind(x, xi, Some(&f));
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(g(lo) <= g(hi) + 1e-12);
            prop_assert!(g(s * a + (1.0 - s) * b) + 1e-9 >= s * g(a) + (1.0 - s) * g(b));
            prop_assert!(g(a) <= a * x + 1e-12);
        }
    }

    fn case_with_facets() -> GridCase {
        two_bus(2).with_facets(vec![simple_facets()]).unwrap()
    }

    fn scen(case: &GridCase, id: &str, label: Condition, v: f64, d: f64) -> Scenario {
        ScenarioSet::scenario(case, id, label, vec![vec![v, v + 2.0]], vec![vec![d, d / 2.0]]).unwrap()
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let case = case_with_facets();
        let set = ScenarioSet {
            periods: 2,
            scenarios: vec![
                scen(&case, "a", Condition::Normal, 7.0, 30.0),
                scen(&case, "b", Condition::Extreme, 11.0, 55.0),
            ],
        };
        let mut buf = Vec::new();
        set.write_csv(&case, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back = ScenarioSet::parse_csv(&text, &case, Path::new("mem")).unwrap();
        assert_eq!(back, set);
        assert_eq!(back.normal().len(), 1);

        let missing: String = text.lines().take(text.lines().count() - 1).collect::<Vec<_>>().join("\n");
        assert!(ScenarioSet::parse_csv(&missing, &case, Path::new("mem")).is_err());
        let over = text.replace(",demand,55", ",demand,61");
        assert!(ScenarioSet::parse_csv(&over, &case, Path::new("mem")).is_err());
    }

    #[test]
    fn empirical_atoms_follow_capacity() {
        let case = case_with_facets();
        let s = [scen(&case, "a", Condition::Extreme, 9.0, 20.0)];
        let refs: Vec<&Scenario> = s.iter().collect();
        for x in [[10.0, 0.0, 0.0], [35.0, 0.0, 0.0]] {
            let e = empirical_distribution(&case, &refs, &x, true).unwrap();
            assert_eq!(e.weight, 1.0);
            for t in 0..2 {
                let want = available_wind(x[0], s[0].xi[0][t], Some(&simple_facets()));
                assert_eq!(e.atoms[0][t], want);
            }
        }
        let e = empirical_distribution(&case, &refs, &[35.0, 0.0, 0.0], false).unwrap();
        assert!((e.atoms[0][0] - s[0].xi[0][0] * 35.0).abs() < 1e-12);
    }

    #[test]
    fn supports_contain_their_atoms() {
        let case = case_with_facets();
        let s: Vec<Scenario> = (0..4)
            .map(|k| scen(&case, &k.to_string(), Condition::Normal, 5.0 + 2.0 * k as f64, 10.0 * k as f64))
            .collect();
        let refs: Vec<&Scenario> = s.iter().collect();
        let x = [30.0, 5.0, 10.0];
        let e = empirical_distribution(&case, &refs, &x, true).unwrap();
        for a in &e.atoms {
            assert!(in_normal_support(&case, &e, a, 1e-9).unwrap());
            assert!(in_extreme_support(&case, &x, a, 1e-9).unwrap());
        }
        let mid: Vec<f64> = e.atoms[0].iter().zip(&e.atoms[3]).map(|(a, b)| 0.5 * (a + b)).collect();
        assert!(in_normal_support(&case, &e, &mid, 1e-9).unwrap());
        let mut out = e.atoms[0].clone();
        out[2] = 61.0;
        assert!(!in_extreme_support(&case, &x, &out, 1e-9).unwrap());
        let mut beyond = e.atoms[3].clone();
        beyond[3] += 5.0;
        assert!(!in_normal_support(&case, &e, &beyond, 1e-9).unwrap());
    }

    #[test]
    fn radii_formulas() {
        let r = AmbiguityRadii::new(0.05, 16, 81, 2, 2).unwrap();
        assert!((r.wind_extreme - 0.05 / 4.0).abs() < 1e-15);
        assert!((r.wind_normal - 0.05 / 9.0).abs() < 1e-15);
        assert!((r.demand_extreme - 2.0 * 0.05 / 2.0).abs() < 1e-15);
        assert!((r.demand_normal - 0.1 / 3.0).abs() < 1e-15);
        let z = AmbiguityRadii::new(0.0, 16, 81, 2, 2).unwrap();
        assert_eq!([z.wind_extreme, z.demand_extreme, z.wind_normal, z.demand_normal], [0.0; 4]);
    }
}
