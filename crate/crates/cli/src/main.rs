//! `fillbound`: command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 infeasible input,
//! 3 resource cap hit (the best-effort result is still written).

mod check;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fillbound::corpus::dir::{read_instance, write_instance};
use fillbound::corpus::{generate, GeneratorSpec};
use fillbound::homology::{hf1_estimate_threads, SearchConfig};
use fillbound::io::{read_chain, read_json, write_atomic, write_json};
use fillbound::pipeline::{bound_calculator, full_fill, log2_rhs, BoundParams, FillingReportJson, PipelineConfig};
use fillbound::Error;

#[derive(Parser)]
#[command(name = "fillbound", version, about = "Homological fillings of integer 1-cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every random choice; printed in every report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Branch-and-bound node budget of the exact solver.
    #[arg(long, global = true, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Output file or directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an instance directory.
    Check { dir: PathBuf },
    /// Fill a 1-cycle through the bubble tree and compare with the bound.
    Fill { dir: PathBuf, cycle: PathBuf },
    /// Sampled HF₁ curve as CSV and SVG.
    Hf1 {
        dir: PathBuf,
        #[arg(long)]
        l_max: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Generate a corpus instance directory.
    Gen {
        generator: String,
        /// Generator parameter as key=value; repeatable.
        #[arg(long = "param", short = 'p')]
        params: Vec<String>,
    },
    /// Evaluate the bound constants for a parameter file.
    Bounds { params: PathBuf },
}

enum Failure {
    Validation(String),
    Infeasible(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Consistency(_) | Error::DistortionViolated { .. } => Failure::Validation(e.to_string()),
            Error::TooLarge(_) => Failure::Cap(e.to_string()),
            _ => Failure::Infeasible(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn threads() -> usize {
    std::env::var("FILLBOUND_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn search(cli: &Cli) -> SearchConfig {
    SearchConfig { node_budget: cli.budget as usize, ..SearchConfig::default() }
}

fn emit(cli: &Cli, default_name: &str, text: &str) -> Outcome {
    match &cli.out {
        Some(p) => {
            let path = if p.is_dir() { p.join(default_name) } else { p.clone() };
            write_atomic(&path, text.as_bytes()).map_err(Failure::from)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_check(cli: &Cli, dir: &Path) -> Outcome {
    let rep = check::check_dir(dir)?;
    let text = match cli.format {
        Format::Table => check::render_table(&rep),
        Format::Json => serde_json::to_string_pretty(&rep).unwrap() + "\n",
        Format::Csv => check::render_csv(&rep),
    };
    emit(cli, "check.txt", &text)?;
    if rep.passed() {
        Ok(())
    } else {
        Err(Failure::Validation(format!("{} invariant(s) failed", rep.items.iter().filter(|i| !i.pass && i.gating).count())))
    }
}

fn cmd_fill(cli: &Cli, dir: &Path, cycle: &Path) -> Outcome {
    let (inst, _) = read_instance::<f64>(dir)?;
    let c = read_chain(cycle)?;
    let config = PipelineConfig { search: search(cli), ..PipelineConfig::default() };
    let report = full_fill(&inst, &c, config)?;
    let json = FillingReportJson::from(&report);
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("report.json"));
    let out = if out.is_dir() { out.join("report.json") } else { out };
    let mut value = serde_json::to_value(&json).unwrap();
    value["seed"] = cli.seed.into();
    write_json(&out, &value)?;
    println!("seed {}", cli.seed);
    println!("input mass1 {:.6}", report.input_mass);
    println!("filling mass2 {:.6}", report.mass);
    println!(
        "bound: log2(mass2) = {:.4} vs log2(f1*mass1 + f2) = {:.6e} -> {}",
        report.mass.log2(),
        report.rhs_log2,
        if report.bound_holds { "holds" } else { "VIOLATED" }
    );
    println!("{:<8} {:<6} {:<8} {:>12} {:>12} {:>6}", "body", "branch", "neck", "piece mass1", "fill mass2", "arcs");
    for t in &report.trace {
        println!(
            "{:<8} {:<6} {:<8} {:>12.4} {:>12.4} {:>6}",
            t.body,
            t.branch,
            t.neck.as_deref().unwrap_or("-"),
            t.piece_mass1,
            t.filling_mass,
            t.arcs
        );
    }
    println!("report written to {}", out.display());
    if report.bound_holds {
        Ok(())
    } else {
        Err(Failure::Validation("bound inequality violated".into()))
    }
}

fn cmd_hf1(cli: &Cli, dir: &Path, l_max: f64, steps: usize, samples: usize) -> Outcome {
    if steps == 0 || !(l_max > 0.0) {
        return Err(Failure::Infeasible("need steps ≥ 1 and l_max > 0".into()));
    }
    let (inst, _) = read_instance::<f64>(dir)?;
    let pool = hf1_estimate_threads(&inst.complex, l_max, samples, cli.seed, &search(cli), threads())?;
    let ls: Vec<f64> = (1..=steps).map(|i| l_max * i as f64 / steps as f64).collect();
    let curve: Vec<(f64, f64)> = ls
        .iter()
        .map(|&l| (l, pool.iter().filter(|s| s.mass1 <= l).map(|s| s.fill_mass).fold(0.0, f64::max)))
        .collect();
    let metric = fillbound::nerve::SkeletonMetric::new(&inst.complex);
    let bounds = bound_calculator(&inst.bound_params(&metric)?)?;
    let bound: Vec<(f64, f64)> = ls.iter().map(|&l| (l, log2_rhs(&bounds, l))).collect();
    let mut csv = String::from("l,estimate,bound_log2\n");
    for ((l, e), (_, b)) in curve.iter().zip(&bound) {
        csv += &format!("{l},{e},{b}\n");
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    write_atomic(&out.join("hf1.csv"), csv.as_bytes())?;
    write_atomic(&out.join("hf1.svg"), plot::hf1_svg(&curve, &bound, cli.seed).as_bytes())?;
    println!("seed {}; {} samples within l_max; written {}/hf1.csv and hf1.svg", cli.seed, pool.len(), out.display());
    let capped = pool.iter().filter(|s| !s.optimal).count();
    if capped > 0 {
        return Err(Failure::Cap(format!("{capped} sample(s) hit the node budget; estimates are upper bounds on those fills")));
    }
    Ok(())
}

fn cmd_gen(cli: &Cli, generator: &str, params: &[String]) -> Outcome {
    let params = check::parse_params(params).map_err(Failure::Infeasible)?;
    let spec = GeneratorSpec { generator: generator.to_string(), params };
    let ci = generate(&spec, cli.seed)?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(ci.name()));
    write_instance(&out, &ci)?;
    println!("{} written to {} (seed {})", ci.name(), out.display(), cli.seed);
    Ok(())
}

fn cmd_bounds(cli: &Cli, path: &Path) -> Outcome {
    let p: BoundParams = read_json(path)?;
    let b = bound_calculator(&p)?;
    let rows = [
        ("g1", b.g1_log2, b.exact.as_ref().map(|e| e.g1.clone())),
        ("g2", b.g2_log2, b.exact.as_ref().map(|e| e.g2.clone())),
        ("h", b.h_log2, b.exact.as_ref().map(|e| e.h.clone())),
        ("f1", b.f1_log2, b.exact.as_ref().map(|e| e.f1.clone())),
        ("f2", b.f2_log2, b.exact.as_ref().map(|e| e.f2.clone())),
        ("F", b.area_log2, b.exact.as_ref().map(|e| e.area.clone())),
    ];
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&b).unwrap() + "\n",
        Format::Csv => {
            let mut s = String::from("quantity,log2,exact\n");
            for (n, l, e) in &rows {
                s += &format!("{n},{l},{}\n", e.clone().unwrap_or_default());
            }
            s
        }
        Format::Table => {
            let mut s = format!("{:<4} {:>24} {}\n", "", "log2", if b.exact.is_some() { "exact" } else { "" });
            for (n, l, e) in &rows {
                s += &format!("{n:<4} {l:>24.12e} {}\n", e.clone().unwrap_or_default());
            }
            s
        }
    };
    emit(cli, "bounds.txt", &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Check { dir } => cmd_check(&cli, dir),
        Command::Fill { dir, cycle } => cmd_fill(&cli, dir, cycle),
        Command::Hf1 { dir, l_max, steps, samples } => cmd_hf1(&cli, dir, *l_max, *steps, *samples),
        Command::Gen { generator, params } => cmd_gen(&cli, generator, params),
        Command::Bounds { params } => cmd_bounds(&cli, params),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("validation failure: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("resource cap: {m}");
            ExitCode::from(3)
        }
    }
}
