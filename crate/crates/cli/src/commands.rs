use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use conevol::antipodal::{
    antipodal_pairs, extremal_body_scaled, random_slab_body, trapezoid_equality, truncated_pyramid, verify_theorem1,
    AntipodalReport,
};
use conevol::measure::{check_scc_with, DiscreteMeasure, SccCheck, SccOptions};
use conevol::phi::{phi, rho0};
use conevol::planar::{pentagon_scan_point, ScanRecord, SolverOptions};
use conevol::polytope::io::{PolytopeInput, PolytopeOutput};
use conevol::polytope::{random_polytope, HullOptions, RandomOptions};
use conevol::Polytope64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command};
use crate::emit::{flag, joined, num, opt, Emitted, Table};
use crate::range::{parse_grid, parse_int_grid, parse_vector};

fn read_input(path: Option<&Path>) -> Result<Value> {
    let text = match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
            s
        }
    };
    serde_json::from_str(&text).context("malformed JSON input")
}

fn hull_options(cli: &Cli) -> HullOptions {
    HullOptions {
        coplanar_tol: cli.coplanar_tol.unwrap_or(HullOptions::default().coplanar_tol),
        ..HullOptions::default()
    }
}

fn polytope_from(v: Value, cli: &Cli) -> Result<Polytope64> {
    let input: PolytopeInput<f64> = serde_json::from_value(v).context("expected {\"dim\", \"vertices\"}")?;
    Ok(input.build_with(&hull_options(cli))?)
}

/// A measure file, or a polytope file whose cone volume measure is taken.
fn measure_from(v: Value, cli: &Cli) -> Result<DiscreteMeasure<f64>> {
    if v.get("atoms").is_some() {
        return serde_json::from_value(v).context("invalid measure");
    }
    if v.get("vertices").is_some() {
        return Ok(polytope_from(v, cli)?.cone_volume_measure()?);
    }
    bail!("input needs either \"atoms\" or \"vertices\"")
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn one_or_many(mut items: Vec<Value>) -> Value {
    if items.len() == 1 {
        items.pop().unwrap_or(Value::Null)
    } else {
        Value::Array(items)
    }
}

fn pool(cli: &Cli) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()?)
}

pub fn run(cli: &Cli) -> Result<Emitted> {
    match &cli.command {
        Command::Phi { alpha, beta, n } => cmd_phi(cli, alpha, beta, n),
        Command::Rho0 { gamma, n } => cmd_rho0(cli, gamma, n),
        Command::ConeVolume { input } => cmd_cone_volume(cli, input.as_deref()),
        Command::CheckScc { input, essential } => cmd_check_scc(cli, input.as_deref(), *essential),
        Command::VerifyAntipodal { input, direction } => cmd_verify(cli, input.as_deref(), direction.as_deref()),
        Command::Extremal {
            base,
            alpha,
            beta,
            direction,
            scale,
        } => cmd_extremal(cli, base.as_deref(), *alpha, *beta, direction.as_deref(), *scale),
        Command::Trapezoid { alpha, beta } => {
            let body = trapezoid_equality(*alpha, *beta)?;
            body_with_report(&body, &[0.0, 1.0])
        }
        Command::TruncatedPyramid { n, r } => cmd_pyramid(cli, *n, *r),
        Command::PentagonScan { alpha, beta, eps } => cmd_scan(cli, *alpha, *beta, eps),
        Command::RandomBody { n, m, symmetric, slab } => cmd_random(cli, *n, *m, *symmetric, *slab),
    }
}

fn cmd_phi(cli: &Cli, alpha: &str, beta: &str, n: &str) -> Result<Emitted> {
    let (a, b, ns) = (parse_grid(alpha)?, parse_grid(beta)?, parse_int_grid(n)?);
    let mut jobs = Vec::with_capacity(a.len() * b.len() * ns.len());
    for &x in &a {
        for &y in &b {
            jobs.extend(ns.iter().map(|&k| (x, y, k)));
        }
    }
    let results = pool(cli)?.install(|| {
        jobs.par_iter()
            .map(|&(x, y, k)| phi(x, y, k).map(|r| (x, y, k, r)))
            .collect::<conevol::Result<Vec<_>>>()
    })?;
    let mut table = Table::new(["alpha", "beta", "n", "phi", "rho0", "bracket_lo", "bracket_hi", "iterations", "residual"]);
    let mut items = Vec::new();
    for (x, y, k, r) in results {
        table.push(vec![
            num(x),
            num(y),
            k.to_string(),
            num(r.phi),
            num(r.rho0),
            num(r.bracket_lo),
            num(r.bracket_hi),
            r.iterations.to_string(),
            num(r.residual),
        ]);
        let mut v = to_value(&r)?;
        v["alpha"] = json!(x);
        v["beta"] = json!(y);
        v["n"] = json!(k);
        items.push(v);
    }
    Ok(Emitted {
        json: one_or_many(items),
        table,
        ok: true,
    })
}

fn cmd_rho0(cli: &Cli, gamma: &str, n: &str) -> Result<Emitted> {
    let (g, ns) = (parse_grid(gamma)?, parse_int_grid(n)?);
    let jobs: Vec<(f64, usize)> = g.iter().flat_map(|&x| ns.iter().map(move |&k| (x, k))).collect();
    let results = pool(cli)?.install(|| {
        jobs.par_iter()
            .map(|&(x, k)| rho0(x, k))
            .collect::<conevol::Result<Vec<_>>>()
    })?;
    let mut table = Table::new(["gamma", "n", "rho0", "tau", "bracket_lo", "bracket_hi", "iterations", "residual"]);
    let mut items = Vec::new();
    for r in results {
        table.push(vec![
            num(r.gamma),
            r.n.to_string(),
            num(r.rho0),
            opt(r.tau),
            num(r.bracket_lo),
            num(r.bracket_hi),
            r.iterations.to_string(),
            num(r.residual),
        ]);
        items.push(to_value(&r)?);
    }
    Ok(Emitted {
        json: one_or_many(items),
        table,
        ok: true,
    })
}

fn measure_table(mu: &DiscreteMeasure<f64>) -> Table {
    let mut headers: Vec<String> = (1..=mu.dim()).map(|k| format!("u{k}")).collect();
    headers.push("w".into());
    let mut t = Table::new(headers);
    for a in mu.atoms() {
        let mut row: Vec<String> = a.u.iter().map(|&x| num(x)).collect();
        row.push(num(a.w));
        t.push(row);
    }
    t
}

#[derive(Serialize)]
struct ConeVolumeOut<'a> {
    #[serde(flatten)]
    measure: &'a DiscreteMeasure<f64>,
    volume: f64,
    total_mass: f64,
}

fn cmd_cone_volume(cli: &Cli, input: Option<&Path>) -> Result<Emitted> {
    let p = polytope_from(read_input(input)?, cli)?;
    let mu = p.cone_volume_measure()?;
    let out = ConeVolumeOut {
        measure: &mu,
        volume: p.volume(),
        total_mass: mu.total_mass(),
    };
    Ok(Emitted {
        json: to_value(&out)?,
        table: measure_table(&mu),
        ok: true,
    })
}

fn scc_table(c: &SccCheck<f64>) -> Table {
    let mut t = Table::new(["dim", "atom_ids", "mass_in", "bound", "slack", "status"]);
    for r in &c.reports {
        let ids: Vec<String> = r.atom_ids.iter().map(usize::to_string).collect();
        let status = serde_json::to_value(r.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        t.push(vec![r.dim.to_string(), ids.join(";"), num(r.mass_in), num(r.bound), num(r.slack), status]);
    }
    t
}

fn scc_options(cli: &Cli, essential: bool) -> SccOptions {
    SccOptions {
        equality_tol: cli.equality_tol.unwrap_or(SccOptions::default().equality_tol),
        essential_only: essential,
    }
}

fn cmd_check_scc(cli: &Cli, input: Option<&Path>, essential: bool) -> Result<Emitted> {
    let mu = measure_from(read_input(input)?, cli)?;
    let c = check_scc_with(&mu, &scc_options(cli, essential))?;
    log::info!("{} candidate subspaces checked", c.reports.len());
    Ok(Emitted {
        json: to_value(&c)?,
        table: scc_table(&c),
        ok: c.satisfied(),
    })
}

const REPORT_COLUMNS: [&str; 14] = [
    "direction",
    "alpha",
    "beta",
    "rho0",
    "body_volume",
    "phi_value",
    "slack",
    "relative_slack",
    "inequality_holds",
    "equality",
    "facets_homothetic",
    "hull_equals_body",
    "height_ratio_observed",
    "height_ratio_predicted",
];

fn report_row(r: &AntipodalReport<f64>) -> Vec<String> {
    let d = &r.equality_diagnostics;
    vec![
        joined(&r.direction),
        num(r.alpha),
        num(r.beta),
        num(r.rho0),
        num(r.body_volume),
        num(r.phi_value),
        num(r.slack),
        num(r.relative_slack),
        flag(Some(r.inequality_holds)),
        flag(Some(r.equality)),
        flag(Some(d.facets_homothetic)),
        flag(Some(d.hull_equals_body)),
        num(d.height_ratio_observed),
        num(d.height_ratio_predicted),
    ]
}

fn flag_bug(r: &AntipodalReport<f64>) {
    if !r.inequality_holds {
        log::error!(
            "volume bound violated along {:?} (slack {}); the bound is a theorem, so this indicates a bug",
            r.direction,
            r.slack
        );
    }
}

fn cmd_verify(cli: &Cli, input: Option<&Path>, direction: Option<&str>) -> Result<Emitted> {
    let p = polytope_from(read_input(input)?, cli)?;
    let directions = match direction {
        Some(d) => vec![parse_vector(d)?],
        None => antipodal_pairs(&p.cone_volume_measure()?).into_iter().map(|q| q.u).collect(),
    };
    let reports = directions
        .iter()
        .map(|u| verify_theorem1(&p, u))
        .collect::<conevol::Result<Vec<_>>>()?;
    let mut table = Table::new(REPORT_COLUMNS);
    let mut ok = true;
    for r in &reports {
        flag_bug(r);
        ok &= r.inequality_holds;
        table.push(report_row(r));
    }
    let json = match direction {
        Some(_) => to_value(&reports[0])?,
        None => to_value(&reports)?,
    };
    Ok(Emitted { json, table, ok })
}

#[derive(Serialize)]
struct BodyOut {
    #[serde(flatten)]
    polytope: PolytopeOutput<f64>,
    report: AntipodalReport<f64>,
}

fn body_with_report(body: &Polytope64, u: &[f64]) -> Result<Emitted> {
    let report = verify_theorem1(body, u)?;
    flag_bug(&report);
    let mut table = Table::new(REPORT_COLUMNS);
    table.push(report_row(&report));
    let ok = report.inequality_holds;
    Ok(Emitted {
        json: to_value(&BodyOut {
            polytope: PolytopeOutput::from(body),
            report,
        })?,
        table,
        ok,
    })
}

fn cmd_extremal(
    cli: &Cli,
    base: Option<&Path>,
    alpha: f64,
    beta: f64,
    direction: Option<&str>,
    scale: f64,
) -> Result<Emitted> {
    let base = polytope_from(read_input(base)?, cli)?;
    let n = base.dim() + 1;
    let u = match direction {
        Some(d) => parse_vector(d)?,
        None => (0..n).map(|k| if k + 1 == n { 1.0 } else { 0.0 }).collect(),
    };
    let body = extremal_body_scaled(&base, alpha, beta, &u, scale)?;
    let unit = conevol::linalg::normalized(&u).ok_or_else(|| anyhow!("zero direction"))?;
    body_with_report(&body, &unit)
}

#[derive(Serialize)]
struct PyramidOut {
    #[serde(flatten)]
    polytope: PolytopeOutput<f64>,
    scc: SccCheck<f64>,
}

fn cmd_pyramid(cli: &Cli, n: usize, r: f64) -> Result<Emitted> {
    let (p, mut check) = truncated_pyramid(n, r)?;
    if cli.equality_tol.is_some() {
        check = check_scc_with(&p.cone_volume_measure()?, &scc_options(cli, true))?;
    }
    // The violation is the point of this example; it is not a failed run.
    let table = scc_table(&check);
    Ok(Emitted {
        json: to_value(&PyramidOut {
            polytope: PolytopeOutput::from(&p),
            scc: check,
        })?,
        table,
        ok: true,
    })
}

fn cmd_scan(cli: &Cli, alpha: f64, beta: f64, eps: &str) -> Result<Emitted> {
    let grid = parse_grid(eps)?;
    let mut opts = SolverOptions {
        seed: cli.seed,
        ..SolverOptions::default()
    };
    if let Some(t) = cli.solver_tol {
        opts.accept_tol = t;
    }
    let records: Vec<ScanRecord<f64>> = pool(cli)?.install(|| {
        grid.par_iter()
            .map(|&e| pentagon_scan_point(alpha, beta, e, &opts))
            .collect::<conevol::Result<Vec<_>>>()
    })?;
    let mut table = Table::new([
        "eps",
        "outcome",
        "residual",
        "l1_over_l4",
        "V_T",
        "V_complement",
        "theorem_b_regime",
        "restarea_holds",
        "corollary2_holds",
        "iterations",
    ]);
    let mut ok = true;
    for s in &records {
        let outcome = serde_json::to_value(s.record.outcome)?;
        table.push(vec![
            num(s.eps),
            outcome.as_str().unwrap_or_default().to_string(),
            num(s.record.residual),
            opt(s.record.trapezoid_ratio),
            opt(s.v_t),
            opt(s.v_complement),
            s.theorem_b_regime.to_string(),
            flag(s.restarea_holds),
            flag(s.corollary2_holds),
            s.record.iterations.to_string(),
        ]);
        if s.restarea_holds == Some(false) || s.corollary2_holds == Some(false) {
            log::warn!("solved instance at eps = {} fails a diagnostic", s.eps);
            ok = false;
        }
    }
    log::info!(
        "{} of {} grid points solved; unsolved points are consistent with, not proof of, nonexistence",
        records.iter().filter(|s| s.record.support_numbers.is_some()).count(),
        records.len()
    );
    Ok(Emitted {
        json: to_value(&records)?,
        table,
        ok,
    })
}

#[derive(Serialize)]
struct Slab {
    u: Vec<f64>,
    a: f64,
    b: f64,
}

#[derive(Serialize)]
struct RandomOut {
    #[serde(flatten)]
    polytope: PolytopeOutput<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slab: Option<Slab>,
}

fn cmd_random(cli: &Cli, n: usize, m: usize, symmetric: bool, slab: bool) -> Result<Emitted> {
    let (p, s) = if slab {
        let s = random_slab_body::<f64>(n, m, cli.seed)?;
        let info = Slab {
            u: s.u.clone(),
            a: s.a,
            b: s.b,
        };
        (s.polytope, Some(info))
    } else {
        let opts = RandomOptions {
            symmetric,
            require_origin_interior: true,
        };
        (random_polytope::<f64>(n, m, cli.seed, opts)?, None)
    };
    let headers: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
    let mut table = Table::new(headers);
    for v in p.vertices() {
        table.push(v.iter().map(|&x| num(x)).collect());
    }
    Ok(Emitted {
        json: to_value(&RandomOut {
            polytope: PolytopeOutput::from(&p),
            slab: s,
        })?,
        table,
        ok: true,
    })
}
