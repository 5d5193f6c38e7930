use super::*;
use crate::grid::tests::{one_bus, two_bus, wind_site};
use crate::grid::{eval_ge, eval_gn};
use crate::uncertainty::tests::simple_facets;
use crate::uncertainty::{atom, Condition, Scenario};

fn one_bus_wind() -> GridCase {
    let mut c = one_bus(50.0, 10.0);
    c.wind_sites.push(wind_site(1));
    c.with_facets(vec![simple_facets()]).unwrap()
}

fn scenarios(case: &GridCase, normal: &[(f64, f64)], extreme: &[(f64, f64)]) -> ScenarioSet {
    let mk = |i: usize, label, &(v, d): &(f64, f64)| -> Scenario {
        ScenarioSet::scenario(case, format!("{label:?}{i}"), label, vec![vec![v; case.periods]], vec![vec![d; case.periods]])
            .unwrap()
    };
    let mut s: Vec<Scenario> = normal.iter().enumerate().map(|(i, p)| mk(i, Condition::Normal, p)).collect();
    s.extend(extreme.iter().enumerate().map(|(i, p)| mk(i, Condition::Extreme, p)));
    ScenarioSet { periods: case.periods, scenarios: s }
}

fn problem(case: GridCase, set: ScenarioSet, eps0: f64, budget: Option<f64>) -> SizingProblem {
    let radii = AmbiguityRadii::for_case(eps0, &case, &set).unwrap();
    let sites = case.wind_sites.len();
    SizingProblem {
        case,
        scenarios: set,
        radii,
        extreme: ExtremeSlopes { wind: vec![1.0; sites], demand: 1.0 },
        g_cap: 5.0,
        objective: Objective::FuelCost { budget },
        wake: true,
        aggregate: Aggregate::Average,
    }
}

/// Sample value of the fuel cost at fixed capacities, evaluated scenario by
/// scenario outside the master LP.
fn saa_value(prob: &SizingProblem, x: &[f64]) -> Option<f64> {
    let vals: Option<Vec<f64>> = prob
        .scenarios
        .normal()
        .iter()
        .map(|s| eval_gn(&prob.case, x, &atom(&prob.case, s, x, prob.wake).unwrap()).unwrap().value)
        .collect();
    let vals = vals?;
    Some(match prob.aggregate {
        Aggregate::Average => vals.iter().sum::<f64>() / vals.len() as f64,
        Aggregate::Worst => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

fn grid_minimum(prob: &SizingProblem, budget: f64) -> f64 {
    let upper = prob.case.capacity_bounds()[0];
    (0..=400)
        .map(|k| upper * k as f64 / 400.0)
        .filter(|&x| prob.case.investment(&[x]) <= budget + 1e-9)
        .filter_map(|x| saa_value(prob, &[x]))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn zero_radius_matches_scenario_average() {
    let case = one_bus_wind();
    let set = scenarios(&case, &[(8.0, 40.0), (11.0, 30.0), (5.0, 45.0)], &[]);
    for aggregate in [Aggregate::Average, Aggregate::Worst] {
        for budget in [0.0, 12_000.0, 25_000.0, 1e9] {
            let mut p = problem(case.clone(), set.clone(), 0.0, Some(budget));
            p.aggregate = aggregate;
            let s = algorithm2(&p, &IterationOptions::default()).unwrap();
            assert_eq!(s.status, SizingStatus::Converged);
            assert!(s.trace.len() <= 2);
            let at = saa_value(&p, &s.x).unwrap();
            assert!((at - s.objective).abs() < 1e-6 * at.abs().max(1.0), "{aggregate:?} {budget}: {at} vs {}", s.objective);
            let best = grid_minimum(&p, budget);
            assert!(s.objective <= best + 1e-6, "{aggregate:?} {budget}: {} above grid {best}", s.objective);
        }
    }
}

#[test]
fn zero_budget_builds_nothing() {
    let case = one_bus_wind();
    let set = scenarios(&case, &[(8.0, 40.0)], &[]);
    let s = algorithm2(&problem(case, set, 0.0, Some(0.0)), &IterationOptions::default()).unwrap();
    assert!(s.x.iter().all(|&v| v.abs() < 1e-9));
    assert!((s.objective - 400.0).abs() < 1e-6);
}

#[test]
fn master_size_matches_block_count() {
    let case = two_bus(2).with_facets(vec![simple_facets()]).unwrap();
    let set = scenarios(&case, &[(8.0, 40.0), (11.0, 30.0)], &[(3.0, 50.0)]);
    for aggregate in [Aggregate::Average, Aggregate::Worst] {
        let mut p = problem(case.clone(), set.clone(), 0.1, None);
        p.aggregate = aggregate;
        let m = build_master_lp(&p, &NormalSlopes::zero(1)).unwrap();
        assert_eq!(m.lp.num_vars(), MasterLp::expected_vars(&p).unwrap());
        assert_eq!((m.normal.len(), m.extreme.len()), (2, 1));
    }
}

#[test]
fn extreme_cap_holds_at_solution() {
    let mut case = two_bus(2).with_facets(vec![simple_facets()]).unwrap();
    case.generators[0].p_max_mw = 30.0;
    let set = scenarios(&case, &[(8.0, 25.0), (11.0, 20.0)], &[(9.0, 55.0), (13.0, 50.0)]);
    let mut p = problem(case, set, 0.0, None);
    p.g_cap = 20.0;
    let s = algorithm2(&p, &IterationOptions::default()).unwrap();
    assert_eq!(s.status, SizingStatus::Converged);
    assert!(s.extreme_lhs <= p.g_cap + 1e-6, "{}", s.extreme_lhs);
    assert!(s.complementarity_free);
    for (n, sc) in p.scenarios.extreme().iter().enumerate() {
        let z = atom(&p.case, sc, &s.x, true).unwrap();
        let g = eval_ge(&p.case, &s.x, &z).unwrap().value.unwrap();
        assert!(g <= s.g_extreme[n] + 1e-6);
        assert!((g - s.g_extreme_tested[n]).abs() < 1e-9);
    }
}

#[test]
fn unreachable_cap_is_infeasible() {
    let mut case = one_bus_wind();
    case.generators[0].p_max_mw = 10.0;
    let set = scenarios(&case, &[(8.0, 5.0)], &[(0.0, 90.0)]);
    let mut p = problem(case, set, 0.0, None);
    p.g_cap = 1.0;
    let s = algorithm2(&p, &IterationOptions::default()).unwrap();
    assert_eq!(s.status, SizingStatus::Infeasible);
}

#[test]
fn positive_radius_converges_and_costs_more() {
    let case = one_bus_wind();
    let set = scenarios(&case, &[(8.0, 40.0), (11.0, 30.0), (5.0, 45.0)], &[(4.0, 80.0)]);
    let mut p0 = problem(case.clone(), set.clone(), 0.0, Some(15_000.0));
    p0.g_cap = 50.0;
    let mut p1 = problem(case, set, 0.5, Some(15_000.0));
    p1.g_cap = 50.0;
    let opts = IterationOptions::default();
    let (s0, s1) = (algorithm2(&p0, &opts).unwrap(), algorithm2(&p1, &opts).unwrap());
    assert_eq!(s1.status, SizingStatus::Converged);
    assert!(s1.trace.last().unwrap().step <= opts.tol_x);
    assert!(s1.objective >= s0.objective - 1e-6);
    assert!(fixed_point_step(&p1, &s1).unwrap() <= opts.tol_x);
    assert!(s0.complementarity_free && s1.complementarity_free);
}

#[test]
fn rounding_to_columns() {
    assert_eq!(round_to_multiple(359.0, 50.0, 1000.0), 350.0);
    assert_eq!(round_to_multiple(376.0, 50.0, 1000.0), 400.0);
    assert_eq!(round_to_multiple(990.0, 50.0, 960.0), 960.0);
    let case = one_bus_wind();
    let set = scenarios(&case, &[(8.0, 40.0), (11.0, 30.0)], &[]);
    let p = problem(case, set, 0.0, Some(13_000.0));
    let s = algorithm2(&p, &IterationOptions::default()).unwrap();
    let r = round_capacities(&p, &s).unwrap();
    let col = p.case.wind_sites[0].column_mw();
    assert!((r.x[0] / col - (r.x[0] / col).round()).abs() < 1e-12);
    assert!((r.x[0] - s.x[0]).abs() <= col / 2.0 + 1e-9);
    assert!((r.objective - saa_value(&p, &r.x).unwrap()).abs() < 1e-6);
}

#[test]
fn frontier_trades_investment_for_fuel() {
    let case = one_bus_wind();
    let set = scenarios(&case, &[(8.0, 40.0), (11.0, 30.0), (5.0, 45.0)], &[]);
    let p = problem(case, set, 0.2, None);
    let budgets = [0.0, 5_000.0, 10_000.0, 20_000.0, 40_000.0];
    let f = pareto_sweep(&p, &budgets, &IterationOptions::default()).unwrap();
    for w in f.windows(2) {
        assert!(w[1].fuel <= w[0].fuel + 1e-6);
        assert!(w[1].investment >= w[0].investment - 1e-6 || w[1].fuel >= w[0].fuel - 1e-6);
    }
    for pt in &f {
        assert!(pt.investment <= pt.budget + 1e-6);
    }
    assert!(pareto_sweep(&p, &[2.0, 1.0], &IterationOptions::default()).is_err());
}

#[test]
fn investment_objective_meets_fuel_cap() {
    let case = one_bus_wind();
    let set = scenarios(&case, &[(8.0, 40.0), (11.0, 30.0)], &[]);
    let mut p = problem(case, set, 0.0, None);
    let free = saa_value(&p, &[0.0]).unwrap();
    p.objective = Objective::Investment { fuel_cap: 0.8 * free };
    let s = algorithm2(&p, &IterationOptions::default()).unwrap();
    assert_eq!(s.status, SizingStatus::Converged);
    assert!(s.fuel <= 0.8 * free + 1e-6);
    assert!(s.investment > 0.0);
    assert!((s.objective - s.investment).abs() < 1e-9);
}

#[test]
fn validation_rejects_bad_inputs() {
    let case = one_bus_wind();
    let set = scenarios(&case, &[(8.0, 40.0)], &[]);
    let mut p = problem(case.clone(), set.clone(), 0.0, Some(-1.0));
    assert!(p.validate().is_err());
    p.objective = Objective::FuelCost { budget: None };
    p.g_cap = -1.0;
    assert!(p.validate().is_err());
    let only_extreme = scenarios(&case, &[], &[(8.0, 40.0)]);
    assert!(problem(case, only_extreme, 0.0, None).validate().is_err());
}
