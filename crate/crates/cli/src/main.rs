//! `affsel`: checks and affine selections for set-valued functions, with JSON reports.

mod plot;
mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use affsel_core::checkers::{check_concave, check_condition1, check_condition2, check_convex, TripleGrid};
use affsel_core::instances::{self, listed_fibers, BUILTIN_NAMES};
use affsel_core::io::parse;
use affsel_core::selectors::{
    affine_selection_endpoint, affine_selection_family, fixed_point, sandwich_affine, solve_affine,
    transversal_solve, Objective, SelectError, SelectionStatus,
};
use affsel_core::svf::{format_violations, SvFunction};
use affsel_core::{CheckError, CheckOutcome, Tolerances};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use report::{Report, Status};

#[derive(Parser)]
#[command(name = "affsel", version, about = "Affine selections of set-valued functions on an interval")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Feasibility tolerance (overrides SVF_EPS).
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Seed for generated corpora.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the report here; for emit-plot, the CSV goes here instead.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock duration in the report.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    /// Dense lattice with N+1 points per axis.
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Breakpoint-combos policy.
    #[arg(long)]
    combos: bool,
}

#[derive(Args, Clone, Copy)]
struct ObjectiveArg {
    #[arg(long, value_enum, default_value = "chebyshev")]
    objective: ObjectiveKind,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveKind {
    Chebyshev,
    Lexmin,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o.objective {
            ObjectiveKind::Chebyshev => Objective::Chebyshev,
            ObjectiveKind::Lexmin => Objective::Lexmin,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Induction,
    Endpoint,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an instance.
    Validate { instance: String },
    /// Check convexity on a grid.
    CheckConvex {
        instance: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Check concavity on a grid.
    CheckConcave {
        instance: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Check the intersection condition on a grid.
    CheckCond2 {
        instance: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Check the envelope condition of a scalar instance.
    CheckCond1 {
        instance: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Affine map between the envelopes of a scalar instance.
    SolveSandwich {
        instance: String,
        #[command(flatten)]
        objective: ObjectiveArg,
    },
    /// Affine selection of any instance.
    SolveAffine {
        instance: String,
        #[command(flatten)]
        objective: ObjectiveArg,
        /// Selector for graph instances.
        #[arg(long, value_enum, default_value = "induction")]
        method: Method,
    },
    /// Fixed point of a scalar self-map.
    FixedPoint {
        instance: String,
        #[command(flatten)]
        objective: ObjectiveArg,
    },
    /// Affine transversal of the listed fibers of a fiber family.
    Transversal {
        instance: String,
        /// Restrict to these abscissae.
        #[arg(long, value_delimiter = ',')]
        at: Vec<f64>,
    },
    /// Reproduce a builtin's expected outcome, or run a seeded corpus
    /// (sandwich-corpus, convex-corpus).
    Verify {
        name: String,
        /// Dense grid resolution used next to the combos grid.
        #[arg(long, default_value_t = 8)]
        grid: usize,
    },
    /// CSV of lower, upper and (optionally) the sandwich map over 101 samples.
    EmitPlot {
        instance: String,
        #[command(flatten)]
        objective: ObjectiveArg,
        #[arg(long)]
        no_map: bool,
        /// Also write an SVG line plot.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::CheckConvex { .. } => "check-convex",
            Command::CheckConcave { .. } => "check-concave",
            Command::CheckCond2 { .. } => "check-cond2",
            Command::CheckCond1 { .. } => "check-cond1",
            Command::SolveSandwich { .. } => "solve-sandwich",
            Command::SolveAffine { .. } => "solve-affine",
            Command::FixedPoint { .. } => "fixed-point",
            Command::Transversal { .. } => "transversal",
            Command::Verify { .. } => "verify",
            Command::EmitPlot { .. } => "emit-plot",
        }
    }

    fn target(&self) -> &str {
        match self {
            Command::Validate { instance }
            | Command::CheckConvex { instance, .. }
            | Command::CheckConcave { instance, .. }
            | Command::CheckCond2 { instance, .. }
            | Command::CheckCond1 { instance, .. }
            | Command::SolveSandwich { instance, .. }
            | Command::SolveAffine { instance, .. }
            | Command::FixedPoint { instance, .. }
            | Command::Transversal { instance, .. }
            | Command::EmitPlot { instance, .. } => instance,
            Command::Verify { name, .. } => name,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    let tol = match tolerances(cli.eps) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let started = Instant::now();
    let mut rep = Report::new(cli.command.name(), cli.command.target(), &tol);
    let mut csv = None;
    if let Err(Failure(status, msg)) = run(&cli, &tol, &mut rep, &mut csv) {
        rep = rep.fail(status, msg);
    }
    if cli.timings {
        rep.duration_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    let text = rep.to_json();
    let written = match (&cli.command, csv) {
        (Command::EmitPlot { .. }, Some(bytes)) => match &cli.out {
            Some(path) => fs::write(path, bytes).and_then(|_| io::stdout().write_all(text.as_bytes())),
            None => io::stdout().write_all(&bytes).and_then(|_| io::stderr().write_all(text.as_bytes())),
        },
        _ => {
            let to_file = match &cli.out {
                Some(path) => fs::write(path, &text),
                None => Ok(()),
            };
            to_file.and_then(|_| io::stdout().write_all(text.as_bytes()))
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(rep.status.exit_code() as u8)
}

fn tolerances(flag: Option<f64>) -> Result<Tolerances<f64>, String> {
    let eps = match flag {
        Some(e) => Some(e),
        None => match std::env::var("SVF_EPS") {
            Ok(s) => Some(s.trim().parse::<f64>().map_err(|_| format!("SVF_EPS={s:?} is not a number"))?),
            Err(_) => None,
        },
    };
    match eps {
        None => Ok(Tolerances::default()),
        Some(e) if e.is_finite() && e > 0.0 => Ok(Tolerances::with_eps(e)),
        Some(e) => Err(format!("eps must be positive and finite, got {e}")),
    }
}

struct Failure(Status, String);

impl Failure {
    fn error(e: impl ToString) -> Self {
        Failure(Status::Error, e.to_string())
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        Failure::error(e)
    }
}

impl From<SelectError> for Failure {
    fn from(e: SelectError) -> Self {
        Failure::error(e)
    }
}

/// Instance text from a file, `builtin:NAME`, or a bare builtin name.
fn source(spec: &str) -> Result<String, Failure> {
    let name = spec.strip_prefix("builtin:");
    if name.is_none() && Path::new(spec).exists() {
        return fs::read_to_string(spec).map_err(|e| Failure(Status::Invalid, format!("{spec}: {e}")));
    }
    let name = name.unwrap_or(spec);
    instances::builtin::<f64>(name)
        .map(|b| b.text)
        .map_err(|_| Failure(Status::Invalid, format!("{spec}: no such file or builtin")))
}

fn load(spec: &str, rep: &mut Report) -> Result<SvFunction<f64>, Failure> {
    let text = source(spec)?;
    let doc = parse(&text).map_err(|e| Failure(Status::Invalid, e.to_string()))?;
    doc.validate::<f64>().map_err(|vs| {
        rep.violations = Some(vs.iter().map(ToString::to_string).collect());
        Failure(Status::Invalid, format_violations(&vs))
    })
}

fn grids(f: &SvFunction<f64>, args: GridArgs, eps: f64) -> Vec<TripleGrid<f64>> {
    let mut out = Vec::new();
    if args.combos {
        out.push(TripleGrid::combos(f.natural_abscissae(eps)));
    }
    if let Some(n) = args.grid {
        let d = f.domain();
        out.push(TripleGrid::dense(d.a, d.b, n));
    }
    if out.is_empty() {
        out.push(TripleGrid::default_for(f));
    }
    out
}

/// Runs every grid, keeping the first violation.
fn check_all(
    rep: &mut Report,
    grids: &[TripleGrid<f64>],
    mut check: impl FnMut(&TripleGrid<f64>) -> Result<CheckOutcome, CheckError>,
) -> Result<(), Failure> {
    rep.grid = Some(grids.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + "));
    for g in grids {
        let out = check(g)?;
        let before = rep.status;
        let witness = rep.witness.take();
        rep.absorb_check(&out);
        if before == Status::Violation {
            rep.status = before;
            rep.witness = witness;
        }
    }
    Ok(())
}

fn run(cli: &Cli, tol: &Tolerances<f64>, rep: &mut Report, csv: &mut Option<Vec<u8>>) -> Result<(), Failure> {
    let eps = tol.eps;
    match &cli.command {
        Command::Validate { instance } => {
            let f = load(instance, rep)?;
            let d = f.domain();
            rep.status = Status::Pass;
            rep.details = Some(json!({
                "kind": f.kind(),
                "dim": f.dim(),
                "domain": [d.a, d.b],
                "abscissae": f.natural_abscissae(eps).len(),
            }));
        }
        Command::CheckConvex { instance, grid } => {
            let f = load(instance, rep)?;
            check_all(rep, &grids(&f, *grid, eps), |g| check_convex(&f, g, eps))?;
        }
        Command::CheckConcave { instance, grid } => {
            let f = load(instance, rep)?;
            check_all(rep, &grids(&f, *grid, eps), |g| check_concave(&f, g, eps))?;
        }
        Command::CheckCond2 { instance, grid } => {
            let f = load(instance, rep)?;
            check_all(rep, &grids(&f, *grid, eps), |g| check_condition2(&f, g, eps))?;
        }
        Command::CheckCond1 { instance, grid } => {
            let f = load(instance, rep)?;
            let (lo, hi) = f.inf_sup(eps).map_err(Failure::error)?;
            let args = if grid.grid.is_none() {
                GridArgs { combos: true, ..*grid }
            } else {
                *grid
            };
            let mut gs = Vec::new();
            if args.combos {
                gs.push(TripleGrid::combos(lo.xs.clone()));
            }
            if let Some(n) = args.grid {
                let d = f.domain();
                gs.push(TripleGrid::dense(d.a, d.b, n));
            }
            check_all(rep, &gs, |g| check_condition1(&lo, &hi, g, eps))?;
        }
        Command::SolveSandwich { instance, objective } => {
            let f = load(instance, rep)?;
            let (lo, hi) = f.inf_sup(eps).map_err(Failure::error)?;
            let out = sandwich_affine(&lo, &hi, (*objective).into(), tol)?;
            rep.absorb_selection(&out);
            if let Some(m) = &out.map {
                rep.details = Some(json!({ "alpha": m.d[0], "beta": m.c[0], "slack": out.slack }));
            }
        }
        Command::SolveAffine {
            instance,
            objective,
            method,
        } => {
            let f = load(instance, rep)?;
            let out = match (&f, method) {
                (SvFunction::Graph(g), Method::Endpoint) => affine_selection_endpoint(g, tol)?,
                _ => solve_affine(&f, (*objective).into(), tol)?,
            };
            rep.absorb_selection(&out);
        }
        Command::FixedPoint { instance, objective } => {
            let f = load(instance, rep)?;
            match fixed_point(&f, (*objective).into(), tol) {
                Ok(fp) => {
                    rep.status = Status::Found;
                    rep.map = Some(report::map(&fp.map));
                    rep.details = Some(json!({ "x_star": fp.x_star, "slack": fp.slack }));
                }
                Err(e @ (SelectError::NoSelection { .. } | SelectError::Condition2 { .. })) => {
                    rep.status = Status::Infeasible;
                    rep.details = Some(json!({ "reason": e.to_string() }));
                }
                Err(e) => return Err(Failure::error(e)),
            }
        }
        Command::Transversal { instance, at } => {
            let f = load(instance, rep)?;
            let SvFunction::Fibers(fam) = &f else {
                return Err(Failure(Status::Invalid, "transversal needs a fibers instance".into()));
            };
            let out = if at.is_empty() {
                affine_selection_family(fam, tol)?
            } else {
                let fibers = listed_fibers(fam, at);
                if fibers.len() != at.len() {
                    return Err(Failure(Status::Invalid, "--at names an abscissa with no listed fiber".into()));
                }
                transversal_solve(&fibers, tol)?
            };
            rep.absorb_selection(&out);
        }
        Command::Verify { name, grid } => verify(name, *grid, cli.seed, tol, rep)?,
        Command::EmitPlot {
            instance,
            objective,
            no_map,
            svg,
        } => {
            let f = load(instance, rep)?;
            let (lo, hi) = f
                .inf_sup(eps)
                .map_err(|e| Failure(Status::Invalid, format!("emit-plot needs a scalar instance: {e}")))?;
            let sel = if *no_map {
                None
            } else {
                let out = sandwich_affine(&lo, &hi, (*objective).into(), tol)?;
                rep.absorb_selection(&out);
                out.map
            };
            rep.status = Status::Pass;
            let series = plot::sample(&lo, &hi, sel.as_ref());
            let mut bytes = Vec::new();
            plot::write_csv(&series, &mut bytes).map_err(Failure::error)?;
            *csv = Some(bytes);
            if let Some(path) = svg {
                fs::write(path, plot::svg(&series)).map_err(Failure::error)?;
            }
            rep.details = Some(json!({ "rows": series.x.len(), "columns": if series.h.is_some() { 4 } else { 3 } }));
        }
    }
    Ok(())
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Violation
    }
}

fn verdict(out: &CheckOutcome) -> &'static str {
    if out.passed() {
        "pass"
    } else {
        "violation"
    }
}

fn verify(name: &str, grid: usize, seed: u64, tol: &Tolerances<f64>, rep: &mut Report) -> Result<(), Failure> {
    match name {
        "sadowska" => verify_sadowska(grid, tol, rep),
        "sandwich-corpus" => {
            let s = instances::sandwich_corpus(seed, 500, tol);
            rep.status = pass_if(s.clean());
            rep.details = Some(json!({
                "seed": seed,
                "instances": s.instances,
                "feasible": s.feasible,
                "infeasible": s.infeasible,
                "disagreements": s.disagreements,
                "oracle_disagreements": s.oracle_disagreements,
                "bad_witnesses": s.bad_witnesses,
                "errors": s.errors,
            }));
            Ok(())
        }
        "convex-corpus" => {
            let s = instances::convex_corpus(seed, 200, tol);
            rep.status = pass_if(s.clean());
            rep.details = Some(json!({
                "seed": seed,
                "instances": s.instances,
                "found_induction": s.found_induction,
                "found_endpoint": s.found_endpoint,
            }));
            Ok(())
        }
        _ if BUILTIN_NAMES.contains(&name) => verify_builtin(name, tol, rep),
        _ => Err(Failure(
            Status::Invalid,
            format!(
                "unknown verification target {name:?}; expected a builtin ({}) or sandwich-corpus / convex-corpus",
                BUILTIN_NAMES.join(", ")
            ),
        )),
    }
}

fn verify_sadowska(grid: usize, tol: &Tolerances<f64>, rep: &mut Report) -> Result<(), Failure> {
    let sad = instances::builtin::<f64>("sadowska").map_err(Failure::error)?;
    let Some(SvFunction::Fibers(fam)) = &sad.instance else {
        return Err(Failure::error("sadowska is not a fiber family"));
    };
    let f = sad.instance.as_ref().expect("checked above");
    let first4 = transversal_solve(&fam.fibers[..4], tol)?;
    rep.absorb_selection(&first4);
    let with_f4 = transversal_solve(&fam.fibers[..5], tol)?;
    let whole = affine_selection_family(fam, tol)?;

    let mut ok = first4.status == SelectionStatus::Found
        && first4.uniqueness.as_ref().is_some_and(|u| u.unique)
        && with_f4.status == SelectionStatus::Infeasible
        && whole.status == SelectionStatus::Infeasible;

    let miss = match &first4.map {
        Some(h) => {
            let ok_map = [h.c[0] + 2.0, h.c[1] - 1.0, h.d[0] - 1.0, h.d[1] + 1.0]
                .iter()
                .all(|e| e.abs() <= 1e-9);
            ok &= ok_map;
            let p = h.eval(4.0);
            let f4 = &fam.fibers[4].1;
            let l1 = f4.membership_slack(&p);
            let lower = f4.distance_lower_bound(&p);
            ok &= lower >= 3.5;
            json!({ "x": 4.0, "value": p, "distance_l1": l1, "distance_lower_bound": lower })
        }
        None => Value::Null,
    };

    let xs = fam.abscissae();
    let combos = check_condition2(f, &TripleGrid::combos(xs.clone()), tol.eps)?;
    let dense = check_condition2(f, &TripleGrid::dense(xs[0], xs[xs.len() - 1], grid), tol.eps)?;
    ok &= combos.passed() && dense.passed();
    rep.grid = Some(format!("{} + {}", TripleGrid::combos(xs.clone()), TripleGrid::dense(xs[0], xs[xs.len() - 1], grid)));
    rep.checked = Some(combos.checked + dense.checked);

    rep.status = pass_if(ok);
    rep.details = Some(json!({
        "with_f4": with_f4.status.as_str(),
        "with_f4_certificate": with_f4.certificate.as_ref().map(report::certificate),
        "whole_family": whole.status.as_str(),
        "miss": miss,
        "condition2": { "combos": verdict(&combos), "dense": verdict(&dense) },
    }));
    Ok(())
}

fn verify_builtin(name: &str, tol: &Tolerances<f64>, rep: &mut Report) -> Result<(), Failure> {
    let b = instances::builtin::<f64>(name).map_err(Failure::error)?;
    let exp = b.expected;
    let expected = json!({
        "valid": exp.valid,
        "selection": exp.selection,
        "unique": exp.unique,
        "condition2": exp.condition2,
    });
    let Some(f) = &b.instance else {
        let vs = parse(&b.text)
            .map_err(Failure::error)?
            .validate::<f64>()
            .err()
            .unwrap_or_default();
        rep.violations = Some(vs.iter().map(ToString::to_string).collect());
        rep.status = pass_if(!exp.valid);
        rep.details = Some(json!({ "valid": false, "expected": expected }));
        return Ok(());
    };
    let sel = solve_affine(f, Objective::Chebyshev, tol);
    let selection = match &sel {
        Ok(r) => Some(r.status != SelectionStatus::Infeasible),
        Err(SelectError::NoSelection { .. }) => Some(false),
        Err(_) => None,
    };
    let unique = sel.as_ref().ok().and_then(|r| r.uniqueness.as_ref()).map(|u| u.unique);
    let grid = TripleGrid::default_for(f);
    let c2 = check_condition2(f, &grid, tol.eps)?;
    if let Ok(r) = &sel {
        rep.map = r.map.as_ref().map(report::map);
    }
    rep.grid = Some(grid.to_string());
    rep.checked = Some(c2.checked);
    rep.witness = c2.witness.as_ref().map(|w| report::witness(w, None));

    let agrees = |want: Option<bool>, got: Option<bool>| want.is_none() || got.is_none() || want == got;
    let ok = exp.valid
        && selection.is_some()
        && agrees(exp.selection, selection)
        && agrees(exp.unique, unique)
        && agrees(exp.condition2, Some(c2.passed()));
    rep.status = pass_if(ok);
    rep.details = Some(json!({
        "valid": true,
        "selection": selection,
        "unique": unique,
        "condition2": c2.passed(),
        "expected": expected,
    }));
    Ok(())
}
