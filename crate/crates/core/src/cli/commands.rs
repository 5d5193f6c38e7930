use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{EvalArgs, OracleCommand, SizeArgs, SizingArgs, WakeArgs};
use crate::error::{Error, Result};
use crate::evaluation::{
    compare_methods, join, sensitivity_sweep, status_name, write_sweep_csv, BaselineKind, EvalReport, Knob, SweepRow,
};
use crate::grid::{GridCase, Mode, OperationModel};
use crate::lipschitz::{cache_dir, ExtremeBounds, ExtremeOptions, KktSystem, Target};
use crate::pipeline::{build_problem, site_envelope, with_envelopes, Settings};
use crate::sizing::{
    algorithm2, pareto_sweep, round_capacities, IterationOptions, Objective, Rounding, SizingProblem, SizingSolution,
    SizingStatus,
};
use crate::uncertainty::{atom, AmbiguityRadii, ScenarioSet};

/// Written beside every run's outputs so the run can be repeated exactly.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub config_sha256: String,
    /// Input path to SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Output(e.to_string()))
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Outputs { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn write_with(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(name, &buf)
    }

    fn finish(mut self, command: &str, config: serde_json::Value, inputs: &[&Path]) -> Result<Manifest> {
        let mut hashes = BTreeMap::new();
        for p in inputs {
            let bytes = std::fs::read(p).map_err(|e| Error::io(*p, e))?;
            hashes.insert(p.display().to_string(), sha256(&bytes));
        }
        let text = serde_json::to_string(&config).map_err(|e| Error::Output(e.to_string()))?;
        self.written.push("manifest.json".into());
        let m = Manifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_sha256: sha256(text.as_bytes()),
            config,
            inputs: hashes,
            outputs: self.written.clone(),
        };
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, to_json(&m)? + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(m)
    }
}

fn config_of(pairs: &[(&str, serde_json::Value)]) -> serde_json::Value {
    serde_json::Value::Object(pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
}

/// Sweep and envelope per site: `sweep_site{i}.csv`, `facets_site{i}.csv`,
/// and the case with facets filled in.
pub fn cmd_wake(args: &WakeArgs) -> Result<Manifest> {
    let c = &args.common;
    let case = GridCase::load(&c.case)?;
    let mut out = Outputs::new(&c.out)?;
    let mut fitted = case.clone();
    for (i, site) in case.wind_sites.iter().enumerate() {
        let env = site_envelope(site, c.tol_hull)?;
        out.write_with(&format!("sweep_site{i}.csv"), |b| crate::wake::write_samples_csv(&env.samples, b))?;
        out.write_with(&format!("facets_site{i}.csv"), |b| env.selection.selected.write_csv(b))?;
        log::info!(
            "site {i}: {} of {} facets, error {:.4} MW",
            env.selection.indices.len(),
            env.full.facets.len(),
            env.selection.final_error
        );
        fitted.wind_sites[i].facets = Some(env.selection.selected);
    }
    out.write("case_with_facets.json", (to_json(&fitted)? + "\n").as_bytes())?;
    let config = config_of(&[("case", c.case.display().to_string().into()), ("tol_hull", c.tol_hull.into())]);
    out.finish("wake", config, &[&c.case])
}

struct Prepared {
    prob: SizingProblem,
    bounds: ExtremeBounds,
    opts: IterationOptions,
}

fn prepare(common: &super::Common, s: &SizingArgs) -> Result<Prepared> {
    if !(s.tol_x > 0.0) {
        return Err(Error::invalid(format!("--tol-x must be positive, got {}", s.tol_x)));
    }
    if s.budgets.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("--budgets must be ascending"));
    }
    let case = with_envelopes(&GridCase::load(&common.case)?, common.tol_hull, false)?;
    let scenarios = ScenarioSet::read_csv(&s.scenarios, &case)?;
    let settings = Settings {
        eps0: s.eps0,
        g_cap: s.g_cap,
        objective: match s.fuel_cap {
            Some(cap) => Objective::Investment { fuel_cap: cap },
            None => Objective::FuelCost { budget: None },
        },
        wake: true,
    };
    let bounds_opts = ExtremeOptions { node_limit: s.node_limit, seed: common.seed, ..ExtremeOptions::default() };
    let cache = cache_dir(&common.out.join("cache"));
    let (prob, bounds) = build_problem(&case, scenarios, &settings, &bounds_opts, &cache)?;
    if !bounds.certified() {
        log::warn!("some shedding slope bounds hit the node limit; using the search bound");
    }
    Ok(Prepared { prob, bounds, opts: IterationOptions { tol_x: s.tol_x, max_iterations: s.max_iter } })
}

fn sizing_config(common: &super::Common, s: &SizingArgs) -> Vec<(&'static str, serde_json::Value)> {
    vec![
        ("case", common.case.display().to_string().into()),
        ("scenarios", s.scenarios.display().to_string().into()),
        ("eps0", s.eps0.into()),
        ("g_cap", s.g_cap.into()),
        ("budgets", s.budgets.clone().into()),
        ("fuel_cap", s.fuel_cap.into()),
        ("tol_hull", common.tol_hull.into()),
        ("tol_x", s.tol_x.into()),
        ("max_iter", s.max_iter.into()),
        ("node_limit", s.node_limit.into()),
        ("seed", common.seed.into()),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeRun {
    pub budget: Option<f64>,
    pub status: &'static str,
    pub solution: SizingSolution,
    pub rounding: Option<Rounding>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeReport {
    pub case: String,
    pub radii: AmbiguityRadii,
    pub g_cap: f64,
    pub objective: Objective,
    pub extreme_bounds: ExtremeBounds,
    pub runs: Vec<SizeRun>,
}

fn size_run(prob: &SizingProblem, budget: Option<f64>, solution: SizingSolution) -> Result<SizeRun> {
    let rounding = if solution.status == SizingStatus::Converged { Some(round_capacities(prob, &solution)?) } else { None };
    Ok(SizeRun { budget, status: status_name(solution.status), solution, rounding })
}

/// Sizes once per budget (or once unbudgeted) and writes `report.json` and
/// `frontier.csv`.
pub fn cmd_size(args: &SizeArgs) -> Result<SizeReport> {
    let (c, s) = (&args.common, &args.sizing);
    if s.fuel_cap.is_some() && !s.budgets.is_empty() {
        return Err(Error::invalid("--fuel-cap and --budgets are alternative objectives"));
    }
    let Prepared { prob, bounds, opts } = prepare(c, s)?;
    let mut out = Outputs::new(&c.out)?;
    let runs = if s.budgets.is_empty() {
        vec![size_run(&prob, None, algorithm2(&prob, &opts)?)?]
    } else {
        let frontier = pareto_sweep(&prob, &s.budgets, &opts)?;
        // Re-solving per budget keeps the full solution for the report.
        frontier
            .iter()
            .map(|pt| {
                let mut p = prob.clone();
                p.objective = Objective::FuelCost { budget: Some(pt.budget) };
                size_run(&p, Some(pt.budget), algorithm2(&p, &opts)?)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let report = SizeReport {
        case: prob.case.name.clone(),
        radii: prob.radii,
        g_cap: prob.g_cap,
        objective: prob.objective,
        extreme_bounds: bounds,
        runs,
    };
    out.write("report.json", (to_json(&report)? + "\n").as_bytes())?;
    out.write_with("frontier.csv", |b| write_frontier(&report.runs, b))?;
    out.finish("size", config_of(&sizing_config(c, s)), &[&c.case, &s.scenarios])?;
    Ok(report)
}

fn write_frontier<W: Write>(runs: &[SizeRun], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Output(e.to_string());
    w.write_record(["budget_cny", "status", "investment_cny", "fuel_cny", "capacities", "iterations"]).map_err(err)?;
    for r in runs {
        let s = &r.solution;
        w.write_record([
            r.budget.map(|b| b.to_string()).unwrap_or_default(),
            r.status.to_string(),
            s.investment.to_string(),
            s.fuel.to_string(),
            join(&s.x),
            s.trace.len().to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalOutput {
    pub methods: EvalReport,
    pub sweeps: Vec<Vec<SweepRow>>,
}

fn parse_sweep(spec: &str) -> Result<(Knob, Vec<f64>)> {
    let (knob, values) = spec
        .split_once('=')
        .ok_or_else(|| Error::invalid(format!("sweep {spec:?} must look like knob=v1,v2")))?;
    let values = values
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad sweep value {v:?}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((knob.parse()?, values))
}

/// Method comparison per budget (`methods.csv`) and sensitivity sweeps
/// (`sweep_{knob}.csv`), collected in `eval.json`.
pub fn cmd_eval(args: &EvalArgs) -> Result<EvalOutput> {
    let (c, s) = (&args.common, &args.sizing);
    let sweeps_spec = args.sweep.iter().map(|x| parse_sweep(x)).collect::<Result<Vec<_>>>()?;
    let mut kinds = vec![BaselineKind::Dro];
    for m in &args.methods {
        let k: BaselineKind = m.parse()?;
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    let Prepared { prob, opts, .. } = prepare(c, s)?;
    let held = match &args.heldout {
        Some(p) => Some(ScenarioSet::read_csv(p, &prob.case)?),
        None => {
            log::warn!("no held-out scenarios; tested fields stay empty");
            None
        }
    };
    let mut out = Outputs::new(&c.out)?;
    let mut methods = EvalReport { methods: vec![] };
    let budgets: Vec<Option<f64>> = if s.budgets.is_empty() { vec![None] } else { s.budgets.iter().map(|&b| Some(b)).collect() };
    for b in budgets {
        let mut p = prob.clone();
        if let Some(b) = b {
            p.objective = Objective::FuelCost { budget: Some(b) };
        }
        methods.methods.extend(compare_methods(&p, &kinds, held.as_ref(), &opts)?.methods);
    }
    out.write_with("methods.csv", |buf| methods.write_csv(buf))?;
    let mut sweeps = Vec::new();
    for (knob, values) in sweeps_spec {
        let rows = sensitivity_sweep(&prob, knob, &values, held.as_ref(), &opts)?;
        let name = serde_json::to_value(knob).map_err(|e| Error::Output(e.to_string()))?;
        out.write_with(&format!("sweep_{}.csv", name.as_str().unwrap_or("knob")), |buf| write_sweep_csv(&rows, buf))?;
        sweeps.push(rows);
    }
    let result = EvalOutput { methods, sweeps };
    out.write("eval.json", (to_json(&result)? + "\n").as_bytes())?;
    let mut config = sizing_config(c, s);
    config.push(("heldout", args.heldout.as_ref().map(|p| p.display().to_string()).into()));
    config.push(("methods", args.methods.clone().into()));
    config.push(("sweep", args.sweep.clone().into()));
    let mut inputs: Vec<&Path> = vec![&c.case, &s.scenarios];
    if let Some(h) = &args.heldout {
        inputs.push(h);
    }
    out.finish("eval", config_of(&config), &inputs)?;
    Ok(result)
}

/// Prints oracle results as `key,value` lines.
pub fn cmd_oracle(which: &OracleCommand, out: &mut dyn Write) -> Result<()> {
    let w = |out: &mut dyn Write, line: String| writeln!(out, "{line}").map_err(|e| Error::Output(e.to_string()));
    match which {
        OracleCommand::Facets { case, site, grid_points } => {
            let case = GridCase::load(case)?;
            let mut ws = case
                .wind_sites
                .get(*site)
                .cloned()
                .ok_or_else(|| Error::invalid(format!("case has no wind site {site}")))?;
            ws.layout.speed_grid_points = *grid_points;
            let samples = crate::wake::sweep(&ws.turbine, &ws.layout)?;
            let pts: Vec<[f64; 3]> = samples.samples.iter().map(|s| [s.x_mw, s.xi, s.f_mw]).collect();
            let brute = crate::oracle::brute_force_upper_facets(&pts);
            let hull = crate::geometry::upper_hull_facets(&samples)?;
            let gap = pts
                .iter()
                .map(|p| (hull.envelope(p[0], p[1]) - brute.iter().map(|f| f.eval(p[0], p[1])).fold(f64::INFINITY, f64::min)).abs())
                .fold(0.0, f64::max);
            w(out, format!("samples,{}", pts.len()))?;
            w(out, format!("brute_force_facets,{}", brute.len()))?;
            w(out, format!("hull_facets,{}", hull.facets.len()))?;
            w(out, format!("max_envelope_gap_mw,{gap}"))?;
        }
        OracleCommand::Shed { case, scenarios, scenario, x } => {
            let case = with_envelopes(&GridCase::load(case)?, None, false)?;
            let set = ScenarioSet::read_csv(scenarios, &case)?;
            let s = set
                .scenarios
                .iter()
                .find(|s| &s.id == scenario)
                .ok_or_else(|| Error::invalid(format!("no scenario {scenario:?}")))?;
            let z = atom(&case, s, x, true)?;
            let model = OperationModel::new(&case, Mode::Extreme)?;
            let lp = model.instantiate(x, &z)?;
            let brute = crate::oracle::brute_force_lp(&lp);
            w(out, format!("simplex_mwh,{}", model.evaluate(x, &z)?.value.map_or("infeasible".into(), |v| v.to_string())))?;
            w(out, format!("vertex_enumeration_mwh,{}", brute.map_or("infeasible".into(), |v| v.to_string())))?;
        }
        OracleCommand::Lipschitz { case } => {
            let case = with_envelopes(&GridCase::load(case)?, None, false)?;
            let kkt = KktSystem::new(&case)?;
            let opts = ExtremeOptions::default();
            let layout = case.uncertainty_layout();
            let targets = (0..layout.sites)
                .map(|site| Target::Wind { site })
                .chain((0..layout.load_buses.len()).map(|load| Target::Demand { load }));
            for t in targets {
                let search = kkt.solve(t, &opts)?;
                let brute = crate::oracle::kkt_pattern_max(&kkt, t, &opts)?;
                w(out, format!("{t:?},search,{},enumeration,{brute}", search.value))?;
            }
        }
    }
    Ok(())
}
