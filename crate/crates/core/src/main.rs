//! Command-line front end: parse graph files, synthesize or verify Weyl
//! matrices, scan for Dirichlet eigenvalues, apply the DtN map, print
//! growth plans.
//!
//! Exit codes: 0 success, 1 general error, 2 graph parse error, 3 numerical
//! singularity (Dirichlet eigenvalue / singular step or system), 4 graph
//! validation failure, 5 verification tolerance exceeded.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use weyltree::{
    apply_dtn, compare, dirichlet_scan, direct_weyl, parse_graph, synthesize, BoundaryData,
    GrowthPlan, MetricTree, ParseError, ScanOptions, SolverOptions, SpectralParameter, VertexId,
    WeylError, WeylMatrix,
};

#[derive(Parser)]
#[command(
    name = "weyltree",
    version,
    about = "Weyl matrices and Dirichlet-to-Neumann maps of quantum tree graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the Weyl matrix at each spectral parameter
    Weyl(WeylArgs),
    /// Run the synthesis against the direct global assembly and report the deviation
    Verify(VerifyArgs),
    /// Scan a real-lambda interval for Dirichlet eigenvalues
    Spectrum(SpectrumArgs),
    /// Apply the Dirichlet-to-Neumann map to a boundary vector
    Dtn(DtnArgs),
    /// Print the growth plan used by the synthesis
    Plan(PlanArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Table,
}

/// `re` or `re,im`, exponent notation allowed.
#[derive(Clone, Copy, Debug)]
struct ComplexArg(Complex64);

impl FromStr for ComplexArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut parts = s.splitn(2, ',');
        let re: f64 = parts
            .next()
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| format!("cannot parse `{s}` as re[,im]"))?;
        let im: f64 = match parts.next() {
            Some(im) => im
                .trim()
                .parse()
                .map_err(|_| format!("cannot parse `{s}` as re[,im]"))?,
            None => 0.0,
        };
        Ok(ComplexArg(Complex64::new(re, im)))
    }
}

#[derive(Clone, Copy, Debug)]
struct IntervalArg(f64, f64);

impl FromStr for IntervalArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 2 {
            return Err(format!("cannot parse `{s}` as a,b"));
        }
        let a: f64 = parts[0].trim().parse().map_err(|_| format!("cannot parse `{s}` as a,b"))?;
        let b: f64 = parts[1].trim().parse().map_err(|_| format!("cannot parse `{s}` as a,b"))?;
        Ok(IntervalArg(a, b))
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Graph file
    #[arg(long)]
    graph: PathBuf,
    /// Root leaf for the synthesis (default: smallest leaf id)
    #[arg(long)]
    root: Option<u64>,
    /// Integration steps per unit length and per unit of (1 + |rho|)
    #[arg(long)]
    steps_per_unit: Option<f64>,
    /// Decimal digits in emitted numbers
    #[arg(long, default_value_t = 12)]
    precision: usize,
}

#[derive(Args)]
struct WeylArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Spectral parameter rho as re[,im]; repeatable
    #[arg(long, required = true)]
    rho: Vec<ComplexArg>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Spectral parameter rho as re[,im]; repeatable
    #[arg(long, required = true)]
    rho: Vec<ComplexArg>,
    /// Largest acceptable relative deviation between the two computations
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Real-lambda window a,b
    #[arg(long)]
    interval: IntervalArg,
    /// Grid points across the window
    #[arg(long, default_value_t = 400)]
    grid: usize,
}

#[derive(Args)]
struct DtnArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Spectral parameter rho as re[,im]; repeatable
    #[arg(long, required = true)]
    rho: Vec<ComplexArg>,
    /// Dirichlet values in canonical leaf order, flattened re,im pairs
    #[arg(long)]
    f: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    common: CommonArgs,
}

enum CliError {
    General(String),
    Parse(ParseError),
    Singular(WeylError),
    Validation(Vec<String>),
    Tolerance { max_deviation: f64, tolerance: f64 },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::General(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Singular(_) => 3,
            CliError::Validation(_) => 4,
            CliError::Tolerance { .. } => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::General(msg) => write!(f, "{msg}"),
            CliError::Parse(e) => write!(f, "{e}"),
            CliError::Singular(e) => write!(f, "{e}"),
            CliError::Validation(violations) => {
                write!(f, "graph validation failed: {}", violations.join("; "))
            }
            CliError::Tolerance {
                max_deviation,
                tolerance,
            } => write!(
                f,
                "max deviation {max_deviation:.3e} exceeds tolerance {tolerance:.3e}"
            ),
        }
    }
}

impl From<WeylError> for CliError {
    fn from(e: WeylError) -> Self {
        match e {
            WeylError::DirichletEigenvalue { .. }
            | WeylError::SingularStep { .. }
            | WeylError::StepResidual { .. }
            | WeylError::SingularSystem { .. } => CliError::Singular(e),
            other => CliError::General(other.to_string()),
        }
    }
}

fn load_tree(path: &Path) -> Result<MetricTree, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::General(format!("cannot read {}: {e}", path.display())))?;
    let tree = parse_graph(&text).map_err(CliError::Parse)?;
    let report = tree.validate();
    if !report.is_ok() {
        return Err(CliError::Validation(
            report.violations.iter().map(|v| v.to_string()).collect(),
        ));
    }
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(tree)
}

fn solver_options(common: &CommonArgs) -> SolverOptions {
    let mut options = SolverOptions::default();
    if let Some(steps) = common.steps_per_unit {
        options.steps_per_unit = steps;
    }
    options
}

fn pick_root(tree: &MetricTree, root: Option<u64>) -> Result<VertexId, CliError> {
    match root {
        Some(id) => {
            let v = VertexId(id);
            if !tree.is_leaf(v) {
                return Err(CliError::General(format!("--root {id} is not a leaf")));
            }
            Ok(v)
        }
        None => tree
            .leaf_order()
            .first()
            .copied()
            .ok_or_else(|| CliError::General("graph has no leaves".into())),
    }
}

fn make_plan(tree: &MetricTree, root: Option<u64>) -> Result<GrowthPlan, CliError> {
    let root_leaf = pick_root(tree, root)?;
    tree.plan_growth(root_leaf)
        .map_err(|e| CliError::General(e.to_string()))
}

fn fmt_f(x: f64, precision: usize) -> String {
    // map -0.0 to 0.0 so emitted text has one spelling of zero
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.precision$}")
}

fn fmt_complex_pair(z: Complex64, precision: usize) -> String {
    format!("{},{}", fmt_f(z.re, precision), fmt_f(z.im, precision))
}

fn fmt_complex_cell(z: Complex64, precision: usize) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    format!("{re:.precision$}{im:+.precision$}i")
}

fn matrix_header(out: &mut String, m: &WeylMatrix, rho: Complex64, precision: usize) {
    let _ = writeln!(out, "# rho = {}", fmt_complex_pair(rho, precision));
    let _ = writeln!(out, "# lambda = {}", fmt_complex_pair(m.lambda(), precision));
    let leaf_list: Vec<String> = m.leaves().iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "# leaves: {}", leaf_list.join(" "));
}

fn render_matrix(m: &WeylMatrix, rho: Complex64, format: Format, precision: usize) -> String {
    let mut out = String::new();
    matrix_header(&mut out, m, rho, precision);
    match format {
        Format::Csv => {
            for i in 0..m.dim() {
                let cells: Vec<String> = (0..m.dim())
                    .map(|j| fmt_complex_pair(m.entry(i, j), precision))
                    .collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
        }
        Format::Table => {
            let cells: Vec<Vec<String>> = (0..m.dim())
                .map(|i| {
                    (0..m.dim())
                        .map(|j| fmt_complex_cell(m.entry(i, j), precision))
                        .collect()
                })
                .collect();
            let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
            for row in &cells {
                let padded: Vec<String> =
                    row.iter().map(|cell| format!("{cell:>width$}")).collect();
                let _ = writeln!(out, "{}", padded.join("  "));
            }
        }
    }
    out
}

fn run_weyl(args: &WeylArgs) -> Result<(), CliError> {
    let tree = load_tree(&args.common.graph)?;
    let plan = make_plan(&tree, args.common.root)?;
    let options = solver_options(&args.common);
    let mut blocks = Vec::new();
    for rho_arg in &args.rho {
        let rho = SpectralParameter::from_rho(rho_arg.0);
        let result = synthesize(&tree, &plan, rho, &options)?;
        blocks.push(render_matrix(
            &result.weyl,
            rho_arg.0,
            args.format,
            args.common.precision,
        ));
    }
    print!("{}", blocks.join("\n"));
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let tree = load_tree(&args.common.graph)?;
    let plan = make_plan(&tree, args.common.root)?;
    let options = solver_options(&args.common);
    let mut max_deviation = 0.0_f64;
    let mut out = String::new();
    for rho_arg in &args.rho {
        let rho = SpectralParameter::from_rho(rho_arg.0);
        let synthesis = synthesize(&tree, &plan, rho, &options)?;
        let direct = direct_weyl(&tree, rho, &options)?;
        let deviation = compare(&synthesis.weyl, &direct.weyl)?;
        max_deviation = max_deviation.max(deviation);
        let _ = writeln!(
            out,
            "rho={} lambda={} deviation={deviation:.3e} synthesis_rcond={:.3e} oracle_rcond={:.3e}",
            fmt_complex_pair(rho_arg.0, args.common.precision),
            fmt_complex_pair(rho.lambda(), args.common.precision),
            synthesis.min_rcond,
            direct.rcond,
        );
    }
    let _ = writeln!(out, "max_deviation={max_deviation:.3e}");
    print!("{out}");
    if max_deviation > args.tolerance {
        return Err(CliError::Tolerance {
            max_deviation,
            tolerance: args.tolerance,
        });
    }
    Ok(())
}

fn run_spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let tree = load_tree(&args.common.graph)?;
    let options = ScanOptions {
        solver: solver_options(&args.common),
        ..ScanOptions::default()
    };
    let IntervalArg(a, b) = args.interval;
    let found = dirichlet_scan(&tree, (a, b), args.grid, &options)?;
    let mut out = String::new();
    for lambda in found {
        let _ = writeln!(out, "{}", fmt_f(lambda, args.common.precision));
    }
    print!("{out}");
    Ok(())
}

fn parse_boundary_vector(text: &str, leaves: usize) -> Result<Vec<Complex64>, CliError> {
    let numbers: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::General(format!("cannot parse `{s}` in --f as a number")))
        })
        .collect::<Result<_, _>>()?;
    if numbers.len() != 2 * leaves {
        return Err(CliError::General(format!(
            "--f needs {} numbers (re,im per leaf), got {}",
            2 * leaves,
            numbers.len()
        )));
    }
    Ok(numbers
        .chunks(2)
        .map(|pair| Complex64::new(pair[0], pair[1]))
        .collect())
}

fn run_dtn(args: &DtnArgs) -> Result<(), CliError> {
    let tree = load_tree(&args.common.graph)?;
    let plan = make_plan(&tree, args.common.root)?;
    let options = solver_options(&args.common);
    let leaves = tree.leaf_order();
    let f_values = parse_boundary_vector(&args.f, leaves.len())?;
    let mut blocks = Vec::new();
    for rho_arg in &args.rho {
        let rho = SpectralParameter::from_rho(rho_arg.0);
        let result = synthesize(&tree, &plan, rho, &options)?;
        let neumann = apply_dtn(&result.weyl, &BoundaryData::dirichlet(f_values.clone()))?;
        let mut out = String::new();
        matrix_header(&mut out, &result.weyl, rho_arg.0, args.common.precision);
        match args.format {
            Format::Csv => {
                for (leaf, value) in leaves.iter().zip(&neumann.values) {
                    let _ = writeln!(
                        out,
                        "{leaf},{}",
                        fmt_complex_pair(*value, args.common.precision)
                    );
                }
            }
            Format::Table => {
                for (leaf, value) in leaves.iter().zip(&neumann.values) {
                    let _ = writeln!(
                        out,
                        "{leaf:>6}  {}",
                        fmt_complex_cell(*value, args.common.precision)
                    );
                }
            }
        }
        blocks.push(out);
    }
    print!("{}", blocks.join("\n"));
    Ok(())
}

fn run_plan(args: &PlanArgs) -> Result<(), CliError> {
    let tree = load_tree(&args.common.graph)?;
    let plan = make_plan(&tree, args.common.root)?;
    let root_edge = tree
        .edge_by_id(plan.root_edge)
        .expect("plan references tree edges");
    let far = root_edge
        .other_endpoint(plan.root_leaf)
        .expect("root leaf sits on the root edge");
    let mut out = String::new();
    let _ = writeln!(
        out,
        "root edge {}: leaf {} at x=0, vertex {far} at x=L",
        plan.root_edge, plan.root_leaf
    );
    for (i, step) in plan.steps.iter().enumerate() {
        let described: Vec<String> = step
            .edges
            .iter()
            .map(|edge_id| {
                let edge = tree.edge_by_id(*edge_id).expect("plan references tree edges");
                let new_leaf = edge
                    .other_endpoint(step.anchor)
                    .expect("step edges touch their anchor");
                format!("{edge_id} (new leaf {new_leaf})")
            })
            .collect();
        let _ = writeln!(
            out,
            "step {}: anchor {}, attach {}",
            i + 1,
            step.anchor,
            described.join(", ")
        );
    }
    let leaf_list: Vec<String> = tree.leaf_order().iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "leaves: {}", leaf_list.join(" "));
    print!("{out}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Weyl(args) => run_weyl(args),
        Command::Verify(args) => run_verify(args),
        Command::Spectrum(args) => run_spectrum(args),
        Command::Dtn(args) => run_dtn(args),
        Command::Plan(args) => run_plan(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
