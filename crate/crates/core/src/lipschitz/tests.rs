use super::*;
use crate::grid::tests::{one_bus, two_bus, wind_site};
use crate::grid::{Bus, GridCase, Line, Mode, OperationModel};
use crate::oracle::{kkt_pattern_max, max_difference_quotient};
use crate::uncertainty::tests::simple_facets;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn with_wind(mut c: GridCase, bus: usize) -> GridCase {
    c.wind_sites.push(wind_site(bus));
    let n = c.wind_sites.len();
    c.with_facets(vec![simple_facets(); n]).unwrap()
}

/// Generation alone cannot saturate the line, so wind reduces shedding.
fn two_with_facets() -> GridCase {
    let mut c = two_bus(2).with_facets(vec![simple_facets()]).unwrap();
    c.generators[0].p_max_mw = 30.0;
    c
}

fn opts() -> ExtremeOptions {
    ExtremeOptions::default()
}

#[test]
fn no_generation_gives_one_period_per_mw() {
    let c = with_wind(one_bus(0.0, 10.0), 1);
    let kkt = KktSystem::new(&c).unwrap();
    for target in [Target::Wind { site: 0 }, Target::Demand { load: 0 }] {
        let b = kkt.solve(target, &opts()).unwrap();
        assert!(b.certified);
        assert!((b.value - 1.0).abs() < 1e-7, "{target:?}: {b:?}");
        let brute = kkt_pattern_max(&kkt, target, &opts()).unwrap();
        assert!((brute - b.value).abs() < 1e-7);
    }
}

#[test]
fn ample_generation_gives_zero_demand_slope() {
    let c = one_bus(200.0, 10.0);
    let b = extreme_bound_demand(&c, &opts()).unwrap();
    assert!(b.certified && b.value.abs() < 1e-9);
}

fn islanded() -> GridCase {
    let mut c = one_bus(50.0, 10.0);
    c.buses.push(Bus { id: 2, demand_max_mw: 0.0 });
    c.lines.push(Line { from: 1, to: 2, reactance_pu: 0.1, capacity_mw: 0.0 });
    with_wind(c, 2)
}

#[test]
fn islanded_wind_has_zero_bound() {
    let b = extreme_bound_wind(&islanded(), 0, &opts()).unwrap();
    assert!(b.certified && b.value.abs() < 1e-9, "{b:?}");
}

#[test]
fn search_matches_pattern_enumeration_on_two_buses() {
    let mut c = with_wind(one_bus(30.0, 10.0), 1);
    c.buses.push(Bus { id: 2, demand_max_mw: 40.0 });
    c.lines.push(Line { from: 1, to: 2, reactance_pu: 0.1, capacity_mw: 25.0 });
    let kkt = KktSystem::new(&c).unwrap();
    for target in [Target::Wind { site: 0 }, Target::Demand { load: 0 }, Target::Demand { load: 1 }] {
        let b = kkt.solve(target, &opts()).unwrap();
        let brute = kkt_pattern_max(&kkt, target, &opts()).unwrap();
        assert!(b.certified);
        assert!((brute - b.value).abs() < 1e-7, "{target:?}: {} vs {brute}", b.value);
    }
}

#[test]
fn any_period_gives_the_same_wind_bound() {
    let c = two_with_facets();
    let kkt = KktSystem::new(&c).unwrap();
    let a = kkt.solve(Target::Wind { site: 0 }, &opts()).unwrap();
    let b = kkt.solve(Target::Wind { site: 0 }, &ExtremeOptions { period: 1, ..opts() }).unwrap();
    assert!(a.certified && b.certified);
    assert!((a.value - b.value).abs() < 1e-7);
}

fn sample(c: &GridCase, rng: &mut ChaCha8Rng, margin: f64) -> (Vec<f64>, Vec<f64>) {
    let x: Vec<f64> = c.capacity_bounds().iter().map(|&u| rng.gen_range(0.0..=u)).collect();
    let zl = c.uncertainty_layout();
    let mut z = vec![0.0; zl.len()];
    for (site, w) in c.wind_sites.iter().enumerate() {
        let f = w.facets.as_ref().unwrap();
        let top = (x[site].min(f.envelope(x[site], f.xi_max)) - margin).max(0.0);
        for t in 0..c.periods {
            z[zl.wind(site, t)] = rng.gen_range(0.0..=top);
        }
    }
    for (k, &b) in zl.load_buses.iter().enumerate() {
        for t in 0..c.periods {
            z[zl.demand(k, t)] = rng.gen_range(0.0..=c.buses[b].demand_max_mw - margin);
        }
    }
    (x, z)
}

#[test]
fn bounds_dominate_difference_quotients() {
    let c = two_with_facets();
    let bounds = extreme_bounds(&c, &opts()).unwrap();
    assert!(bounds.certified());
    eprintln!("{bounds:?}");
    let m = OperationModel::new(&c, Mode::Extreme).unwrap();
    let zl = c.uncertainty_layout();
    let wind: Vec<usize> = (0..2).map(|t| zl.wind(0, t)).collect();
    let demand: Vec<usize> = (0..2).map(|t| zl.demand(0, t)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let (x, z) = sample(&c, &mut rng, 0.5);
        let h = 0.25;
        let qw = max_difference_quotient(&m, &x, &z, &wind, h).unwrap();
        let qd = max_difference_quotient(&m, &x, &z, &demand, h).unwrap();
        assert!(qw <= bounds.wind[0].value + 1e-6, "{qw} > {:?}", bounds.wind[0]);
        assert!(qd <= bounds.demand + 1e-6, "{qd} > {}", bounds.demand);
    }
}

#[test]
fn lifting_a_line_limit_does_not_lower_the_bound() {
    let mut c = with_wind(one_bus(30.0, 10.0), 1);
    c.buses.push(Bus { id: 2, demand_max_mw: 40.0 });
    c.lines.push(Line { from: 1, to: 2, reactance_pu: 0.1, capacity_mw: 25.0 });
    let tight = extreme_bound_wind(&c, 0, &opts()).unwrap();
    c.lines[0].capacity_mw = 1e4;
    let loose = extreme_bound_wind(&c, 0, &opts()).unwrap();
    assert!(tight.certified && loose.certified);
    assert!(loose.value + 1e-9 >= tight.value);
}

#[test]
fn normal_bounds_dominate_probes_at_scenarios() {
    let c = two_with_facets();
    let m = OperationModel::new(&c, Mode::Normal).unwrap();
    let zl = c.uncertainty_layout();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = vec![30.0, 10.0, 20.0];
    let atoms: Vec<Vec<f64>> = (0..6)
        .map(|_| {
            let mut z = vec![0.0; zl.len()];
            for t in 0..2 {
                z[zl.wind(0, t)] = rng.gen_range(0.0..20.0);
                z[zl.demand(0, t)] = rng.gen_range(5.0..25.0);
            }
            z
        })
        .collect();
    let b = normal_bounds(&m, &x, &atoms).unwrap();
    assert!(b.infeasible.is_empty());
    let coords: Vec<usize> = (0..zl.len()).collect();
    for z in &atoms {
        for h in [1e-3, -1e-3] {
            let q = max_difference_quotient(&m, &x, z, &coords, h).unwrap();
            assert!(q <= b.wind[0].max(b.demand) + 1e-6, "{q} vs {b:?}");
        }
    }
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let c = with_wind(one_bus(0.0, 10.0), 1);
    let a = load_or_compute(&c, &opts(), dir.path()).unwrap();
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let b = load_or_compute(&c, &opts(), dir.path()).unwrap();
    assert_eq!(a, b);
}
