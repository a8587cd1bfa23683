//! `mm`: run multi-marginal monotonicity and splitting checks on JSON inputs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mmono::convex::{
    c_conjugate, check_envelope_criterion, check_prox_partition, check_splitting_inequality, splitting_slacks,
    relax_to_c_conjugate, ConvexFn, SplittingDomain, SplittingTuple,
};
use mmono::gallery::{case_by_id, run_case_with_tol, CASES};
use mmono::monotone::{
    check_n_c_cyclic, check_pairwise_c_monotone, check_partition_identity, classify_maximality, CyclicOptions,
    DEFAULT_BUDGET, DEFAULT_SEED,
};
use mmono::{CheckReport, Error, GammaSet, Grid, Verdict, DEFAULT_TOL};

const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "mm", version, about = "Multi-marginal monotonicity and splitting checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise c-monotonicity of Γ.
    Monotone(GammaArgs),
    /// n-c-cyclic monotonicity of Γ.
    Cyclic {
        #[command(flatten)]
        gamma: GammaArgs,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Maximality classification of Γ.
    Maximal(GammaArgs),
    /// Resolvent samples, partition identity and firm nonexpansiveness.
    Resolvents(GammaArgs),
    /// c ≤ ⊕f_i on the product grid, with equality on Γ if given.
    Splitting {
        #[command(flatten)]
        common: TupleArgs,
        /// Γ whose points must satisfy equality.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// c-conjugate of the other entries, as a grid function.
    Conjugate {
        #[command(flatten)]
        common: TupleArgs,
        /// Entry to replace (1-based).
        #[arg(long)]
        index: usize,
        /// Where to write the resulting function as JSON.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Relax a splitting tuple into a c-conjugate one.
    Relax {
        #[command(flatten)]
        common: TupleArgs,
        #[arg(long, default_value_t = 1)]
        passes: usize,
        /// Where to write the relaxed tuple as JSON.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Σ e_{f_i*} ≤ q at the grid nodes, with equality on S(Γ) if Γ is given.
    Envelope {
        #[command(flatten)]
        common: TupleArgs,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Σ prox_{f_i} = Id at the grid nodes.
    ProxPartition {
        #[command(flatten)]
        common: TupleArgs,
    },
    /// Built-in instances.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Subcommand)]
enum GalleryAction {
    /// List case ids.
    List {
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run every expected check of a case.
    Run {
        id: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write gamma.json (and tuple.json when present) for a case.
    Export {
        id: String,
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    grid_lo: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    grid_hi: f64,
    #[arg(long, default_value_t = 5)]
    grid_steps: usize,
}

#[derive(Args)]
struct OutArgs {
    /// Absolute tolerance; defaults to MM_DEFAULT_TOL or 1e-9.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct GammaArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct TupleArgs {
    #[arg(long)]
    tuple: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    out: OutArgs,
    /// CSV plot data destination.
    #[arg(long)]
    emit_plot: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Failure before any verdict: bad usage, unreadable or invalid input.
struct UsageError(String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

type Run<T> = Result<T, UsageError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(UsageError(msg)) => {
            eprintln!("mm: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn resolve_tol(cli: Option<f64>) -> Run<f64> {
    let tol = match cli {
        Some(t) => t,
        None => match std::env::var("MM_DEFAULT_TOL") {
            Ok(v) => v.trim().parse().map_err(|_| UsageError(format!("MM_DEFAULT_TOL is not a number: {v}")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(UsageError(format!("tolerance must be finite and non-negative, got {tol}")));
    }
    Ok(tol)
}

fn read(path: &Path) -> Run<String> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn load_gamma(path: &Path) -> Run<GammaSet> {
    GammaSet::from_json_str(&read(path)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn load_tuple(path: &Path) -> Run<SplittingTuple> {
    SplittingTuple::from_json_str(&read(path)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn cube(args: &GridArgs, d: usize) -> Run<Grid> {
    Ok(Grid::cube(d, args.grid_lo, args.grid_hi, args.grid_steps)?)
}

fn write_file(path: &Path, text: &str) -> Run<()> {
    fs::write(path, text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON value serializes")
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive",
    }
}

/// One header row and one data row: check, verdict, margin, then metrics.
fn report_csv(r: &CheckReport) -> String {
    let mut head = vec!["check".to_string(), "verdict".into(), "margin".into()];
    let mut row = vec![csv_field(&r.check), verdict_str(r.verdict).into(), num(r.margin)];
    for (k, v) in &r.metrics {
        head.push(csv_field(k));
        row.push(num(*v));
    }
    format!("{}\n{}\n", head.join(","), row.join(","))
}

fn emit(r: &CheckReport, format: Format) -> u8 {
    match format {
        Format::Json => println!("{}", pretty(&r.to_json())),
        Format::Csv => print!("{}", report_csv(r)),
    }
    r.verdict.exit_code() as u8
}

fn dispatch(cmd: Command) -> Run<u8> {
    match cmd {
        Command::Monotone(a) => {
            let gamma = load_gamma(&a.input)?;
            let grid = cube(&a.grid, gamma.config().d)?;
            let r = check_pairwise_c_monotone(&gamma, Some(&grid), resolve_tol(a.out.tol)?)?;
            Ok(emit(&r, a.out.format))
        }
        Command::Cyclic { gamma: a, order, budget, seed } => {
            let gamma = load_gamma(&a.input)?;
            let grid = cube(&a.grid, gamma.config().d)?;
            let opts = CyclicOptions { order, tol: resolve_tol(a.out.tol)?, budget, seed };
            let r = check_n_c_cyclic(&gamma, Some(&grid), &opts)?;
            Ok(emit(&r, a.out.format))
        }
        Command::Maximal(a) => {
            let gamma = load_gamma(&a.input)?;
            let grid = cube(&a.grid, gamma.config().d)?;
            let r = classify_maximality(&gamma, Some(&grid), resolve_tol(a.out.tol)?)?;
            Ok(emit(&r, a.out.format))
        }
        Command::Resolvents(a) => {
            let gamma = load_gamma(&a.input)?;
            let grid = cube(&a.grid, gamma.config().d)?;
            let r = match check_partition_identity(&gamma, Some(&grid), resolve_tol(a.out.tol)?) {
                Ok(r) => r,
                Err(e @ Error::IllDefinedResolvent { .. }) => {
                    CheckReport::new("partition_identity", Verdict::Fail, f64::NEG_INFINITY).with_note(e.to_string())
                }
                Err(e) => return Err(e.into()),
            };
            Ok(emit(&r, a.out.format))
        }
        Command::Splitting { common: a, input } => {
            let tuple = load_tuple(&a.tuple)?;
            let tol = resolve_tol(a.out.tol)?;
            let grid = cube(&a.grid, tuple.dim())?;
            let on = match &input {
                Some(p) => {
                    let gamma = load_gamma(p)?;
                    gamma.materialize(Some(&grid))?
                }
                None => Vec::new(),
            };
            let domain = SplittingDomain::Grids(vec![grid; tuple.len()]);
            let r = check_splitting_inequality(&tuple, &domain, &on, tol)?;
            if let Some(path) = &a.emit_plot {
                write_file(path, &splitting_plot(&tuple, &domain)?)?;
            }
            Ok(emit(&r, a.out.format))
        }
        Command::Conjugate { common: a, index, output } => {
            let tuple = load_tuple(&a.tuple)?;
            if index == 0 || index > tuple.len() {
                return Err(UsageError(format!("--index must be in 1..={}", tuple.len())));
            }
            resolve_tol(a.out.tol)?;
            let grid = cube(&a.grid, tuple.dim())?;
            let f = c_conjugate(&tuple, index - 1, &vec![grid; tuple.len()])?;
            let finite = f.values().iter().filter(|v| v.is_finite()).count();
            let verdict = if finite > 0 { Verdict::Pass } else { Verdict::Fail };
            let mut r = CheckReport::new("c_conjugate", verdict, f64::INFINITY)
                .with_metric("nodes", f.values().len() as f64)
                .with_metric("finite_nodes", finite as f64);
            if finite == 0 {
                r = r.with_note("the conjugate is +inf at every node");
            }
            if let Some(path) = &output {
                write_file(path, &pretty(&ConvexFn::Grid(f).to_json_value()))?;
            }
            Ok(emit(&r, a.out.format))
        }
        Command::Relax { common: a, passes, output } => {
            let tuple = load_tuple(&a.tuple)?;
            let tol = resolve_tol(a.out.tol)?;
            let grid = cube(&a.grid, tuple.dim())?;
            let grids = vec![grid; tuple.len()];
            let pre = check_splitting_inequality(&tuple, &SplittingDomain::Grids(grids.clone()), &[], tol)?;
            if pre.failed() {
                let mut r = CheckReport::new("relax", Verdict::Fail, pre.margin)
                    .with_note("precondition c <= sum of entries fails on the product grid");
                r.witness = pre.witness;
                return Ok(emit(&r, a.out.format));
            }
            let relaxed = match relax_to_c_conjugate(&tuple, &grids, passes) {
                Ok(x) => x,
                Err(Error::Precondition(msg)) => {
                    let r = CheckReport::new("relax", Verdict::Fail, f64::NEG_INFINITY).with_note(msg);
                    return Ok(emit(&r, a.out.format));
                }
                Err(e) => return Err(e.into()),
            };
            let mut r = CheckReport::new("relax", Verdict::Pass, -relaxed.last_pass_change)
                .with_metric("last_pass_change", relaxed.last_pass_change);
            for (k, (all, inner)) in relaxed.pass_changes.iter().zip(&relaxed.interior_changes).enumerate() {
                r = r
                    .with_metric(&format!("pass_{}_change", k + 1), *all)
                    .with_metric(&format!("pass_{}_interior_change", k + 1), *inner);
            }
            if let Some(path) = &output {
                write_file(path, &pretty(&relaxed.tuple.to_json_value()))?;
            }
            Ok(emit(&r, a.out.format))
        }
        Command::Envelope { common: a, input } => {
            let tuple = load_tuple(&a.tuple)?;
            let tol = resolve_tol(a.out.tol)?;
            let grid = cube(&a.grid, tuple.dim())?;
            let gamma = input.as_deref().map(load_gamma).transpose()?;
            let e = check_envelope_criterion(&tuple, &grid.nodes(), gamma.as_ref(), tol)?;
            if let Some(path) = &a.emit_plot {
                let d = tuple.dim();
                let mut out = String::new();
                let cols: Vec<String> = (1..=d).map(|k| format!("s{k}")).collect();
                let _ = writeln!(out, "{},sum_conjugate_envelopes,q", cols.join(","));
                for row in &e.rows {
                    let s: Vec<String> = row.s.iter().map(|v| num(*v)).collect();
                    let _ = writeln!(out, "{},{},{}", s.join(","), num(row.sum), num(row.q));
                }
                write_file(path, &out)?;
            }
            Ok(emit(&e.report, a.out.format))
        }
        Command::ProxPartition { common: a } => {
            let tuple = load_tuple(&a.tuple)?;
            let grid = cube(&a.grid, tuple.dim())?;
            let r = check_prox_partition(&tuple, &grid.nodes(), resolve_tol(a.out.tol)?)?;
            Ok(emit(&r, a.out.format))
        }
        Command::Gallery { action } => gallery(action),
    }
}

fn splitting_plot(tuple: &SplittingTuple, domain: &SplittingDomain) -> Run<String> {
    let slacks = splitting_slacks(tuple, domain)?;
    let (n, d) = (tuple.len(), tuple.dim());
    let mut out = String::new();
    let cols: Vec<String> = (1..=n).flat_map(|i| (1..=d).map(move |k| format!("x{i}_{k}"))).collect();
    let _ = writeln!(out, "{},slack", cols.join(","));
    for (k, s) in slacks.iter().enumerate() {
        let p = domain.point(k);
        let coords: Vec<String> = p.blocks().iter().flat_map(|b| b.iter().map(|v| num(*v))).collect();
        let _ = writeln!(out, "{},{}", coords.join(","), num(*s));
    }
    Ok(out)
}

fn gallery(action: GalleryAction) -> Run<u8> {
    match action {
        GalleryAction::List { out } => {
            match out.format {
                Format::Json => {
                    let v: Vec<Value> =
                        CASES.iter().map(|(id, alias, title)| json!({"id": id, "alias": alias, "title": title})).collect();
                    println!("{}", pretty(&Value::Array(v)));
                }
                Format::Csv => {
                    println!("id,alias,title");
                    for (id, alias, title) in CASES {
                        println!("{},{},{}", csv_field(id), csv_field(alias), csv_field(title));
                    }
                }
            }
            Ok(0)
        }
        GalleryAction::Run { id, out } => {
            let tol = resolve_tol(out.tol)?;
            let case = case_by_id(&id)?;
            let outcomes = run_case_with_tol(&case, tol)?;
            let all = outcomes.iter().all(|o| o.matches());
            match out.format {
                Format::Json => {
                    let list: Vec<Value> = outcomes
                        .iter()
                        .map(|o| {
                            json!({
                                "check": o.check,
                                "expected": verdict_str(o.expected),
                                "verdict": verdict_str(o.report.verdict),
                                "matches": o.matches(),
                                "report": o.report.to_json(),
                            })
                        })
                        .collect();
                    let v = json!({"id": case.id, "title": case.title, "all_match": all, "outcomes": list});
                    println!("{}", pretty(&v));
                }
                Format::Csv => {
                    println!("check,expected,verdict,matches,margin");
                    for o in &outcomes {
                        println!(
                            "{},{},{},{},{}",
                            csv_field(&o.check),
                            verdict_str(o.expected),
                            verdict_str(o.report.verdict),
                            o.matches(),
                            num(o.report.margin)
                        );
                    }
                }
            }
            Ok(if all { 0 } else { 1 })
        }
        GalleryAction::Export { id, dir } => {
            let case = case_by_id(&id)?;
            fs::create_dir_all(&dir).map_err(|e| UsageError(format!("{}: {e}", dir.display())))?;
            write_file(&dir.join("gamma.json"), &pretty(&case.gamma.to_json_value()))?;
            if let Some(t) = &case.tuple {
                write_file(&dir.join("tuple.json"), &pretty(&t.to_json_value()))?;
            }
            Ok(0)
        }
    }
}
