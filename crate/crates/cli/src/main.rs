//! `lqthr`: threshold curves, bundled-table regression checks, and
//! desk-scale null-space condition verification for ℓq minimization.
//!
//! Subcommands:
//!
//! * `curve`      — compute a threshold curve over a sparsity grid, CSV/TSV out
//! * `table`      — recompute a bundled reference table and report deltas
//! * `verify`     — Monte Carlo null-space condition check on a small instance
//! * `plotscript` — emit a gnuplot script plotting curve CSVs in the
//!                  (alpha, beta) plane
//!
//! Exit codes: 0 success, 2 partial numerical failure, 3 I/O error,
//! 4 usage error.  `LQTHR_THREADS` caps worker parallelism; all randomness
//! flows from `--seed`, and identical invocations produce identical output.

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use lq_thresholds::inner_opt::Exponent;
use lq_thresholds::nullspace_check::{verify_condition, ProblemInstance};
use lq_thresholds::reference;
use lq_thresholds::special_math::QuadratureSpec;
use lq_thresholds::width_bound::{alpha_for_beta, curve, ThresholdKind};
use lqthr::grid::parse_beta_grid;
use lqthr::records::{emit, CurveRecord, Format};

const EXIT_SUCCESS: i32 = 0;
const EXIT_PARTIAL: i32 = 2;
const EXIT_IO: i32 = 3;
const EXIT_USAGE: i32 = 4;

#[derive(Parser)]
#[command(
    name = "lqthr",
    version,
    about = "Threshold bounds and null-space checks for lq minimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a threshold curve over a sparsity grid
    Curve(CurveArgs),
    /// Recompute a bundled reference table and report per-row deltas
    Table(TableArgs),
    /// Sample null-space directions of a small instance and measure
    /// condition margins
    Verify(VerifyArgs),
    /// Emit a gnuplot script for curve CSVs (alpha horizontal, beta
    /// vertical)
    Plotscript(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Sectional,
    Strong,
    Weak,
}

impl From<KindArg> for ThresholdKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Sectional => ThresholdKind::Sectional,
            KindArg::Strong => ThresholdKind::Strong,
            KindArg::Weak => ThresholdKind::Weak,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Tsv,
}

impl From<FormatArg> for Format {
    fn from(format: FormatArg) -> Self {
        match format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Tsv => Format::Tsv,
        }
    }
}

#[derive(Args)]
struct CurveArgs {
    /// Recovery notion
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Exponent q in [0, 1]
    #[arg(long)]
    q: f64,
    /// Sparsity grid start:stop:count (inclusive linear spacing in (0, 1))
    #[arg(long)]
    beta: String,
    /// Quadrature node budget per half line
    #[arg(long, default_value_t = 1024)]
    nodes: usize,
    /// Quadrature truncation point
    #[arg(long, default_value_t = 8.0)]
    truncation: f64,
    /// Seed for randomized stages (curve computation is deterministic;
    /// accepted for interface uniformity)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct TableArgs {
    /// Table identifier: sec-q05, sec-q03, sec-q01, str-q05, str-q03,
    /// str-q01, weak-q05, weak-q03
    id: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Ambient dimension (columns)
    #[arg(long)]
    n: usize,
    /// Measurement count (rows)
    #[arg(long)]
    m: usize,
    /// Sparsity count
    #[arg(long)]
    k: usize,
    /// Exponent q in [0, 1]
    #[arg(long)]
    q: f64,
    /// Number of sampled null directions
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Seed for the instance and the direction samples
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Condition to check
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Polish the worst sampled direction by coordinate descent
    #[arg(long)]
    refine: bool,
    /// Explicit matrix entries 'r1c1,r1c2;r2c1,r2c2' (rows separated by
    /// ';') overriding the generated Gaussian matrix; must match --n/--m
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(Args)]
struct PlotArgs {
    /// Curve CSV files, one plotted series each, in this order
    inputs: Vec<PathBuf>,
    /// Output path for the gnuplot script
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => EXIT_SUCCESS,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    if let Some(code) = configure_threads() {
        return code;
    }
    match cli.command {
        Command::Curve(args) => cmd_curve(args),
        Command::Table(args) => cmd_table(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Plotscript(args) => cmd_plotscript(args),
    }
}

/// Apply the LQTHR_THREADS cap to the global worker pool, if set.
fn configure_threads() -> Option<i32> {
    let raw = std::env::var("LQTHR_THREADS").ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n >= 1 => {
            // Ignore "already initialized": the cap is best-effort.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            None
        }
        _ => {
            eprintln!("error: LQTHR_THREADS must be a positive integer, got '{raw}'");
            Some(EXIT_USAGE)
        }
    }
}

fn parse_exponent(q: f64) -> Result<Exponent, i32> {
    Exponent::new(q).map_err(|err| {
        eprintln!("error: {err}");
        EXIT_USAGE
    })
}

fn write_output(text: &str, out: Option<&PathBuf>) -> i32 {
    match out {
        Some(path) => {
            if let Err(err) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {err}", path.display());
                return EXIT_IO;
            }
        }
        None => {
            if let Err(err) = std::io::stdout().write_all(text.as_bytes()) {
                eprintln!("error: cannot write to stdout: {err}");
                return EXIT_IO;
            }
        }
    }
    EXIT_SUCCESS
}

fn cmd_curve(args: CurveArgs) -> i32 {
    let beta_grid = match parse_beta_grid(&args.beta) {
        Ok(grid) => grid,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let q = match parse_exponent(args.q) {
        Ok(q) => q,
        Err(code) => return code,
    };
    let spec = match QuadratureSpec::new(args.nodes, args.truncation, vec![]) {
        Ok(spec) => spec,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };
    let kind = ThresholdKind::from(args.kind);
    let points = match curve(kind, q, &beta_grid, &spec) {
        Ok(points) => points,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };
    let mut any_failed = false;
    let records: Vec<CurveRecord> = points
        .into_iter()
        .map(|(beta, result)| match result {
            Ok(pt) => CurveRecord::Point {
                beta,
                alpha: pt.alpha,
                nu: pt.duals.nu(),
                gamma: pt.duals.gamma(),
                xtilde: pt.x_mag,
                objective: pt.objective,
            },
            Err(err) => {
                any_failed = true;
                CurveRecord::Failure {
                    beta,
                    message: err.to_string(),
                }
            }
        })
        .collect();
    let text = emit(&records, args.format.into());
    let io_status = write_output(&text, args.out.as_ref());
    if io_status != EXIT_SUCCESS {
        return io_status;
    }
    if any_failed {
        EXIT_PARTIAL
    } else {
        EXIT_SUCCESS
    }
}

fn cmd_table(args: TableArgs) -> i32 {
    let Some(table) = reference::by_id(&args.id) else {
        let known: Vec<&str> = reference::all_tables().iter().map(|t| t.id).collect();
        eprintln!(
            "error: unknown table id '{}'; known ids: {}",
            args.id,
            known.join(", ")
        );
        return EXIT_USAGE;
    };
    let q = Exponent::new(table.q).expect("bundled table exponent is valid");
    let spec = QuadratureSpec::default();
    let tolerance = table.tolerance();
    println!(
        "# table {}: {} thresholds at q = {}, alpha tolerance {:.4}",
        table.id,
        table.kind.name(),
        table.q,
        tolerance
    );
    let results: Vec<_> = table
        .rows
        .par_iter()
        .map(|row| alpha_for_beta(table.kind, row.beta, q, &spec))
        .collect();
    let mut within = 0usize;
    for (row, result) in table.rows.iter().zip(&results) {
        match result {
            Ok(pt) => {
                let delta = pt.alpha - row.alpha;
                let ok = delta.abs() <= tolerance;
                if ok {
                    within += 1;
                }
                let mut line = format!(
                    "beta={:.6} | alpha ref={:.6} got={:.6} delta={:+.6}",
                    row.beta, row.alpha, pt.alpha, delta
                );
                if let (Some(x_ref), Some(x_got)) = (row.x_mag, pt.x_mag) {
                    line.push_str(&format!(
                        " | xtilde ref={:.6} got={:.6} delta={:+.6}",
                        x_ref,
                        x_got,
                        x_got - x_ref
                    ));
                }
                line.push_str(&format!(
                    " | nu ref={:.6} got={:.6} delta={:+.6} | gamma ref={:.6} got={:.6} delta={:+.6}",
                    row.nu,
                    pt.duals.nu(),
                    pt.duals.nu() - row.nu,
                    row.gamma,
                    pt.duals.gamma(),
                    pt.duals.gamma() - row.gamma
                ));
                line.push_str(if ok { " | ok" } else { " | FAIL" });
                println!("{line}");
            }
            Err(err) => {
                println!("beta={:.6} | error: {err} | FAIL", row.beta);
            }
        }
    }
    let total = table.rows.len();
    let pass = within == total;
    println!(
        "# table {}: {}/{} alphas within {:.4} -> {}",
        table.id,
        within,
        total,
        tolerance,
        if pass { "PASS" } else { "FAIL" }
    );
    if pass {
        EXIT_SUCCESS
    } else {
        EXIT_PARTIAL
    }
}

fn parse_matrix_literal(raw: &str) -> Result<Vec<Vec<f64>>, String> {
    let mut rows = Vec::new();
    for (r, row_text) in raw.split(';').enumerate() {
        let mut row = Vec::new();
        for (c, entry) in row_text.split(',').enumerate() {
            let value: f64 = entry
                .trim()
                .parse()
                .map_err(|_| format!("matrix entry ({r},{c}) '{entry}' is not a number"))?;
            row.push(value);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    let q = match parse_exponent(args.q) {
        Ok(q) => q,
        Err(code) => return code,
    };
    if args.samples == 0 {
        eprintln!("error: --samples must be at least 1");
        return EXIT_USAGE;
    }
    let instance = if let Some(matrix) = &args.matrix {
        let rows = match parse_matrix_literal(matrix) {
            Ok(rows) => rows,
            Err(msg) => {
                eprintln!("error: {msg}");
                return EXIT_USAGE;
            }
        };
        if rows.len() != args.m || rows.first().map_or(0, Vec::len) != args.n {
            eprintln!(
                "error: --matrix has shape {}x{}, but --m {} --n {} were given",
                rows.len(),
                rows.first().map_or(0, Vec::len),
                args.m,
                args.n
            );
            return EXIT_USAGE;
        }
        match ProblemInstance::from_rows(&rows, args.k) {
            Ok(instance) => instance,
            Err(err) => {
                eprintln!("error: {err}");
                return EXIT_USAGE;
            }
        }
    } else {
        match ProblemInstance::gaussian(args.n, args.m, args.k, args.seed) {
            Ok(instance) => instance,
            Err(err) => {
                eprintln!("error: {err}");
                return EXIT_USAGE;
            }
        }
    };
    let kind = ThresholdKind::from(args.kind);
    let report = match verify_condition(&instance, kind, q, args.samples, args.refine, args.seed) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_PARTIAL;
        }
    };
    println!("kind={}", kind.name());
    println!("q={:.6}", args.q);
    println!("n={}", instance.n());
    println!("m={}", instance.m());
    println!("k={}", instance.k());
    println!("samples={}", report.samples);
    println!("seed={}", args.seed);
    println!("refine={}", args.refine);
    println!(
        "matrix={}",
        if args.matrix.is_some() {
            "explicit"
        } else {
            "generated"
        }
    );
    println!("violation_fraction={:.6}", report.violation_fraction);
    println!("min_margin={:.6}", report.min_margin);
    let direction = report
        .worst_direction
        .iter()
        .map(|v| format!("{v:.6}"))
        .collect::<Vec<_>>()
        .join(",");
    println!("worst_direction={direction}");
    EXIT_SUCCESS
}

fn cmd_plotscript(args: PlotArgs) -> i32 {
    if args.inputs.is_empty() {
        eprintln!("error: no input curve files given");
        return EXIT_IO;
    }
    let mut series = Vec::new();
    for path in &args.inputs {
        let text = match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(err) => {
                eprintln!("error: cannot read {}: {err}", path.display());
                return EXIT_IO;
            }
        };
        if text.lines().next() != Some(Format::Csv.header().as_str()) {
            eprintln!(
                "error: {} does not start with the curve CSV header '{}'",
                path.display(),
                Format::Csv.header()
            );
            return EXIT_IO;
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        series.push((path, stem));
    }
    let mut script = String::new();
    script.push_str("# Threshold curves in the (alpha, beta) plane:\n");
    script.push_str("# aspect ratio m/n horizontal, sparsity ratio k/n vertical.\n");
    script.push_str("set datafile separator ','\n");
    script.push_str("set xlabel 'alpha = m / n'\n");
    script.push_str("set ylabel 'beta = k / n'\n");
    script.push_str("set xrange [0:1]\n");
    script.push_str("set yrange [0:1]\n");
    script.push_str("set key bottom right\n");
    let plots: Vec<String> = series
        .iter()
        .map(|(path, stem)| {
            format!(
                "'{}' using 2:1 with linespoints title '{}'",
                path.display(),
                stem
            )
        })
        .collect();
    script.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    match std::fs::write(&args.out, &script) {
        Ok(()) => EXIT_SUCCESS,
        Err(err) => {
            eprintln!("error: cannot write {}: {err}", args.out.display());
            EXIT_IO
        }
    }
}
