use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use toric_kstab::catalog::{catalog, CATALOG_NAMES};
use toric_kstab::geometry::translate;
use toric_kstab::invariants::centering_constants;
use toric_kstab::pl::{make_pl, PlFunction};
use toric_kstab::report::{self, AnalyzeOptions, Table};
use toric_kstab::reproduce::run_all;
use toric_kstab::search::ScanConfig;
use toric_kstab::spec::{emit_spec, parse_pl, parse_spec};
use toric_kstab::{ExactPolytope, Rational};

#[derive(Parser)]
#[command(name = "toric-kstab", version, about = "Exact stability invariants of toric polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Table,
    Structured,
}

#[derive(Args)]
struct Input {
    /// Built-in polytope: cp2, cp1xcp1, cp2_1blowup, cp2_2blowup, cp2_3blowup, hexagon(l,m)
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    catalog: Option<String>,
    /// Polytope spec file (JSON)
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Translate the polytope so its barycenter is the origin
    #[arg(long)]
    center: bool,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 360)]
    directions: usize,
    #[arg(long, default_value_t = 100)]
    offsets: usize,
    #[arg(long, default_value_t = 2)]
    refine: usize,
}

impl ScanArgs {
    fn config(&self) -> ScanConfig {
        ScanConfig { direction_count: self.directions, offset_count: self.offsets, refine_rounds: self.refine }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Invariants, extremal potential and sufficient conditions
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Also report the degeneration of these PL functions
        #[arg(long)]
        pl: Vec<String>,
        /// Also run the simple-PL scan
        #[arg(long)]
        scan: bool,
        #[command(flatten)]
        scan_args: ScanArgs,
        #[command(flatten)]
        output: Output,
    },
    /// The functional L(u) in boundary and cone form
    Lfun {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        pl: String,
        #[command(flatten)]
        output: Output,
    },
    /// Relative Futaki invariant of the degeneration induced by a PL function
    RelativeFutaki {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        pl: String,
        #[command(flatten)]
        output: Output,
    },
    /// Scan simple PL functions for the coercivity constant and destabilizers
    Scan {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        scan_args: ScanArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Lattice sums of a PL function against their continuum expansion
    Ehrhart {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        pl: String,
        #[arg(long)]
        k: i64,
        #[command(flatten)]
        output: Output,
    },
    /// List catalog polytopes, or print one as a spec file
    Catalog { name: Option<String> },
    /// Run the acceptance suite
    Reproduce,
}

struct Loaded {
    polytope: ExactPolytope,
    name: Option<String>,
    /// Canonical input text, hashed into the report provenance.
    input: String,
}

/// Input errors exit with status 2.
struct InputError(anyhow::Error);

fn load(input: &Input, extra: &[&str]) -> Result<Loaded, InputError> {
    let (polytope, name, mut text) = match (&input.catalog, &input.spec) {
        (Some(name), _) => {
            let p = catalog(name).map_err(|e| InputError(e.into()))?;
            (p, Some(name.clone()), format!("catalog:{name}"))
        }
        (None, Some(path)) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(InputError)?;
            let p = parse_spec(&text).with_context(|| format!("parsing {}", path.display())).map_err(InputError)?;
            let name = toric_kstab::spec::parse_spec_file(&text).ok().and_then(|s| s.name);
            (p, name, text)
        }
        (None, None) => return Err(InputError(anyhow::anyhow!("one of --catalog or --spec is required"))),
    };
    let polytope = if input.center {
        text.push_str("\ncentered");
        let shift = centering_constants(&polytope);
        translate(&polytope, &shift).map_err(|e| InputError(e.into()))?
    } else {
        polytope
    };
    for e in extra {
        text.push('\n');
        text.push_str(e);
    }
    Ok(Loaded { polytope, name, input: text })
}

fn pl_on(p: &ExactPolytope, expr: &str) -> Result<PlFunction<Rational>, InputError> {
    let pieces = parse_pl(expr, p.dim()).with_context(|| format!("parsing `{expr}`")).map_err(InputError)?;
    make_pl(pieces, p).with_context(|| format!("building `{expr}`")).map_err(InputError)
}

fn emit<R: Serialize + Table>(report: &R, output: &Output) -> Result<()> {
    let text = match output.format {
        Format::Table => report.table(),
        Format::Structured => serde_json::to_string_pretty(report)? + "\n",
    };
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Runs a command and returns whether everything it checked came out clear.
fn run(command: Command) -> Result<bool, InputError> {
    let fail = |e: anyhow::Error| InputError(e);
    match command {
        Command::Analyze { input, pl, scan, scan_args, output } => {
            let extra: Vec<&str> = pl.iter().map(String::as_str).collect();
            let loaded = load(&input, &extra)?;
            let degenerations = pl
                .iter()
                .map(|s| Ok((s.clone(), pl_on(&loaded.polytope, s)?)))
                .collect::<Result<Vec<_>, InputError>>()?;
            let opts =
                AnalyzeOptions { name: loaded.name.as_deref(), degenerations, scan: scan.then(|| scan_args.config()) };
            let r = report::analyze(&loaded.polytope, opts, &loaded.input).map_err(|e| fail(e.into()))?;
            emit(&r, &output).map_err(fail)?;
            Ok(r.all_clear())
        }
        Command::Lfun { input, pl, output } => {
            let loaded = load(&input, &[&pl])?;
            let u = pl_on(&loaded.polytope, &pl)?;
            let r = report::lfun(&loaded.polytope, loaded.name.as_deref(), &pl, &u, &loaded.input)
                .map_err(|e| fail(e.into()))?;
            emit(&r, &output).map_err(fail)?;
            Ok(!r.negative)
        }
        Command::RelativeFutaki { input, pl, output } => {
            let loaded = load(&input, &[&pl])?;
            let u = pl_on(&loaded.polytope, &pl)?;
            let r = report::relative_futaki_report(&loaded.polytope, loaded.name.as_deref(), &pl, &u, &loaded.input)
                .map_err(|e| fail(e.into()))?;
            emit(&r, &output).map_err(fail)?;
            Ok(!r.degeneration.destabilizing)
        }
        Command::Scan { input, scan_args, output } => {
            let loaded = load(&input, &[])?;
            let r = report::scan_report(&loaded.polytope, loaded.name.as_deref(), &scan_args.config(), &loaded.input)
                .map_err(|e| fail(e.into()))?;
            emit(&r, &output).map_err(fail)?;
            Ok(!r.scan.destabilizer_found)
        }
        Command::Ehrhart { input, pl, k, output } => {
            let loaded = load(&input, &[&pl, &k.to_string()])?;
            let u = pl_on(&loaded.polytope, &pl)?;
            let r = report::ehrhart(&loaded.polytope, loaded.name.as_deref(), &pl, &u, k, &loaded.input)
                .map_err(|e| fail(e.into()))?;
            emit(&r, &output).map_err(fail)?;
            Ok(true)
        }
        Command::Catalog { name: None } => {
            for n in CATALOG_NAMES {
                println!("{n}");
            }
            Ok(true)
        }
        Command::Catalog { name: Some(name) } => {
            let p = catalog(&name).map_err(|e| fail(e.into()))?;
            print!("{}", emit_spec(&p, Some(&name)));
            Ok(true)
        }
        Command::Reproduce => {
            let outcomes = run_all();
            for o in &outcomes {
                println!("{o}");
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            println!("{passed} of {} criteria passed", outcomes.len());
            Ok(passed == outcomes.len())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
