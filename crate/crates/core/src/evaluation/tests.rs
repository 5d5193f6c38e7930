use super::*;
use crate::grid::tests::two_bus;
use crate::oracle::brute_force_lp;
use crate::sizing::{ExtremeSlopes, Objective};
use crate::uncertainty::tests::simple_facets;
use crate::uncertainty::Scenario;

fn case() -> GridCase {
    let mut c = two_bus(2).with_facets(vec![simple_facets()]).unwrap();
    c.generators[0].p_max_mw = 30.0;
    c
}

fn set(case: &GridCase, normal: &[(f64, f64)], extreme: &[(f64, f64)]) -> ScenarioSet {
    let mk = |i: usize, label, &(v, d): &(f64, f64)| -> Scenario {
        let speeds = vec![vec![v, v + 1.0]];
        let demand = vec![vec![d, 0.9 * d]];
        ScenarioSet::scenario(case, format!("s{i}"), label, speeds, demand).unwrap()
    };
    let mut s: Vec<Scenario> = normal.iter().enumerate().map(|(i, p)| mk(i, Condition::Normal, p)).collect();
    s.extend(extreme.iter().enumerate().map(|(i, p)| mk(100 + i, Condition::Extreme, p)));
    ScenarioSet { periods: case.periods, scenarios: s }
}

fn problem(scen: ScenarioSet, eps0: f64, objective: Objective) -> SizingProblem {
    let case = case();
    SizingProblem {
        radii: AmbiguityRadii::for_case(eps0, &case, &scen).unwrap(),
        case,
        scenarios: scen,
        extreme: ExtremeSlopes { wind: vec![1.0], demand: 1.0 },
        g_cap: 30.0,
        objective,
        wake: true,
        aggregate: Aggregate::Average,
    }
}

fn training() -> ScenarioSet {
    set(&case(), &[(8.0, 25.0), (11.0, 20.0), (6.0, 28.0)], &[(9.0, 55.0), (13.0, 50.0)])
}

const BUDGET: Objective = Objective::FuelCost { budget: Some(15_000.0) };

#[test]
fn single_scenario_methods_coincide() {
    let p = problem(set(&case(), &[(8.0, 25.0)], &[(9.0, 55.0)]), 0.0, BUDGET);
    let o = IterationOptions::default();
    let v: Vec<f64> = [BaselineKind::Dro, BaselineKind::Sp2, BaselineKind::Ro]
        .iter()
        .map(|&k| run_baseline(k, &p, &o).unwrap().fuel)
        .collect();
    assert!((v[0] - v[1]).abs() < 1e-6 && (v[1] - v[2]).abs() < 1e-6, "{v:?}");
}

#[test]
fn method_ordering_on_shared_data() {
    let o = IterationOptions::default();
    for budget in [20_000.0, 30_000.0, 40_000.0] {
        let p = problem(training(), 0.05, Objective::FuelCost { budget: Some(budget) });
        let f = |k| {
            let s = run_baseline(k, &p, &o).unwrap();
            assert_eq!(s.status, SizingStatus::Converged, "{k:?} {budget}");
            s.fuel
        };
        let (sp1, sp2, dro, ro) = (f(BaselineKind::Sp1), f(BaselineKind::Sp2), f(BaselineKind::Dro), f(BaselineKind::Ro));
        assert!(sp1 <= sp2 + 1e-6, "{budget}: {sp1} {sp2}");
        assert!(sp2 <= dro + 1e-6, "{budget}: {sp2} {dro}");
        assert!(dro <= ro + 1e-6, "{budget}: {dro} {ro}");
    }
}

#[test]
fn training_set_reproduces_sample_means() {
    let p = problem(training(), 0.0, BUDGET);
    let r = compare_methods(&p, &[BaselineKind::Sp2], Some(&p.scenarios), &IterationOptions::default()).unwrap();
    let m = &r.methods[0];
    let t = m.tested.as_ref().unwrap();
    assert_eq!((t.normal_count, t.extreme_count, t.violations), (3, 2, 0));
    assert!((t.fuel_mean.unwrap() - m.estimated_fuel).abs() < 1e-6 * m.estimated_fuel.abs().max(1.0));
    let s = run_baseline(BaselineKind::Sp2, &p, &IterationOptions::default()).unwrap();
    let mean = s.g_extreme_tested.iter().sum::<f64>() / 2.0;
    assert!((t.shedding_mean.unwrap() - mean).abs() < 1e-9);
}

#[test]
fn zero_demand_sheds_nothing() {
    let c = case();
    let held = set(&c, &[(8.0, 0.0)], &[(0.0, 0.0), (14.0, 0.0)]);
    let t = out_of_sample(&c, &[10.0, 5.0, 10.0], &held, true).unwrap();
    assert_eq!(t.shedding_mean, Some(0.0));
    let empty = ScenarioSet { periods: 2, scenarios: vec![] };
    let t = out_of_sample(&c, &[10.0, 5.0, 10.0], &empty, true).unwrap();
    assert_eq!((t.shedding_mean, t.fuel_mean), (None, None));
}

#[test]
fn undersized_scenarios_count_as_violations() {
    let c = case();
    // Demand above what the generator can ever cover without wind.
    let held = set(&c, &[(0.0, 50.0), (8.0, 10.0)], &[]);
    let t = out_of_sample(&c, &[0.0, 0.0, 0.0], &held, true).unwrap();
    assert_eq!(t.violations, 1);
    assert!(t.fuel_mean.is_some());
}

#[test]
fn tested_shedding_matches_vertex_enumeration() {
    let mut c = crate::grid::tests::one_bus(20.0, 10.0);
    c.wind_sites.push(crate::grid::tests::wind_site(1));
    let c = c.with_facets(vec![simple_facets()]).unwrap();
    let s = ScenarioSet::scenario(&c, "e", Condition::Extreme, vec![vec![9.0]], vec![vec![70.0]]).unwrap();
    let held = ScenarioSet { periods: 1, scenarios: vec![s.clone()] };
    let x = [12.0];
    let t = out_of_sample(&c, &x, &held, true).unwrap();
    let lp = OperationModel::new(&c, Mode::Extreme).unwrap().instantiate(&x, &atom(&c, &s, &x, true).unwrap()).unwrap();
    let brute = brute_force_lp(&lp).unwrap();
    assert!((t.shedding_mean.unwrap() - brute).abs() < 1e-7, "{t:?} vs {brute}");
}

#[test]
fn unit_cost_scale_is_the_plain_solve() {
    let p = problem(training(), 0.05, BUDGET);
    let o = IterationOptions::default();
    let rows = sensitivity_sweep(&p, Knob::CostScale, &[1.0], None, &o).unwrap();
    let plain = algorithm2(&p, &o).unwrap();
    assert_eq!(rows[0].x, plain.x);
    assert_eq!(rows[0].fuel.to_bits(), plain.fuel.to_bits());
}

#[test]
fn investment_trends() {
    let base = problem(training(), 0.0, Objective::FuelCost { budget: None });
    let free = algorithm2(&base, &IterationOptions::default()).unwrap().fuel;
    let p = problem(training(), 0.0, Objective::Investment { fuel_cap: 1.05 * free });
    let o = IterationOptions::default();
    let eps = sensitivity_sweep(&p, Knob::Eps0, &[0.0, 0.02], None, &o).unwrap();
    assert!(eps.iter().all(|r| r.status == SizingStatus::Converged), "{eps:?}");
    assert!(eps[1].investment >= eps[0].investment - 1e-6, "{eps:?}");
    let cap = sensitivity_sweep(&p, Knob::GCap, &[10.0, 40.0], None, &o).unwrap();
    assert!(cap.iter().all(|r| r.status != SizingStatus::IterationLimit));
    if cap[0].status == SizingStatus::Converged {
        assert!(cap[1].investment <= cap[0].investment + 1e-6, "{cap:?}");
    }
}

#[test]
fn reports_write_csv() {
    let p = problem(training(), 0.0, BUDGET);
    let r = compare_methods(&p, &BaselineKind::ALL, Some(&p.scenarios), &IterationOptions::default()).unwrap();
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let mut rd = csv::Reader::from_reader(buf.as_slice());
    assert_eq!(rd.headers().unwrap().len(), 11);
    let names: Vec<String> = rd.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(names, ["DRO", "SP1", "SP2", "RO"]);
    assert_eq!("sp2".parse::<BaselineKind>().unwrap(), BaselineKind::Sp2);
    assert!("kappa".parse::<Knob>().is_ok() && "nope".parse::<Knob>().is_err());
}
