//! Subcommand definitions and dispatch.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use reluforge_core::{
    ball_indicator, compile_circuit_with_report, depth_vs_width_sweep, l1_radial, legendre_report,
    multiplier, optimal_pwl_oracle, restrict_to_line, slab_probability, square, triangle_wave,
    BallIndicatorOptions, Circuit, Error as CoreError, LineRestriction, Network, RadialPwl,
};

use crate::util::{atomic_write, parse_knots, parse_seeds, parse_vector};

pub enum ExitKind {
    Validation,
    Runtime,
}

pub struct CmdError {
    pub kind: ExitKind,
    pub message: String,
}

pub fn validation(message: impl Into<String>) -> CmdError {
    CmdError { kind: ExitKind::Validation, message: message.into() }
}

pub fn runtime(message: impl Into<String>) -> CmdError {
    CmdError { kind: ExitKind::Runtime, message: message.into() }
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> CmdError {
        let kind = match e {
            CoreError::Io(_)
            | CoreError::NonFinite(_)
            | CoreError::Diverged(_)
            | CoreError::RejectionLimit(_) => ExitKind::Runtime,
            _ => ExitKind::Validation,
        };
        CmdError { kind, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(
    name = "reluforge",
    version,
    about = "Explicit ReLU network constructions, linear-region analysis, and approximation bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a network and save it in the relunet text format
    Build {
        #[command(subcommand)]
        what: BuildCmd,
    },
    /// Evaluate a saved network at a point
    Eval(EvalArgs),
    /// Report the size of a saved network and its segments along a line
    Inspect(InspectArgs),
    /// Fourier-Legendre coefficient report for a built-in function
    Bounds(BoundsArgs),
    /// Optimal n-piece piecewise-linear fit on [0, 1]
    Oracle(OracleArgs),
    /// Monte-Carlo slab probability on the L1 sphere
    Slab(SlabArgs),
    /// Depth-vs-width training sweep on the ball-indicator task
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum BuildCmd {
    /// Approximate two-input product on [-M, M]^2
    Multiplier(MultiplierArgs),
    /// Approximate squaring map on [-M, M]
    Square(MultiplierArgs),
    /// Shell indicator of the Euclidean unit ball
    Ball(BallArgs),
    /// Compile an add/mul circuit file
    Circuit(CircuitArgs),
    /// Exact network for f(||x||_1) with piecewise-linear f
    L1radial(L1RadialArgs),
    /// Triangle wave phi^i
    Triangle(TriangleArgs),
}

#[derive(Args)]
struct MultiplierArgs {
    /// Magnitude bound M
    #[arg(long = "M")]
    magnitude: f64,
    /// Target accuracy
    #[arg(long)]
    eps: f64,
    /// Output network file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BallArgs {
    /// Input dimension
    #[arg(long)]
    d: usize,
    /// L2 error budget
    #[arg(long)]
    delta: f64,
    /// Half-width of the unconstrained shell around the unit sphere
    #[arg(long)]
    shell: f64,
    /// Emit 1 inside the ball instead of outside
    #[arg(long)]
    complement: bool,
    /// Output network file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CircuitArgs {
    /// Circuit description file
    #[arg(long)]
    spec: PathBuf,
    /// End-to-end accuracy target
    #[arg(long)]
    eps: f64,
    /// Output network file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct L1RadialArgs {
    /// Input dimension
    #[arg(long)]
    d: usize,
    /// Constant term of the radial profile
    #[arg(long = "const", default_value_t = 0.0, allow_negative_numbers = true)]
    constant: f64,
    /// Initial slope of the radial profile
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    slope: f64,
    /// Hinge knots as t:jump,t:jump,...
    #[arg(long, default_value = "")]
    knots: String,
    /// Output network file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TriangleArgs {
    /// Number of compositions
    #[arg(long)]
    i: u32,
    /// Output network file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Network file
    #[arg(long)]
    net: PathBuf,
    /// Input point as comma-separated coordinates
    #[arg(long)]
    x: String,
}

#[derive(Args)]
struct InspectArgs {
    /// Network file
    #[arg(long)]
    net: PathBuf,
    /// Line base point (defaults to the origin)
    #[arg(long)]
    base: Option<String>,
    /// Line direction (defaults to the first axis)
    #[arg(long)]
    dir: Option<String>,
    /// Line parameter range start
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    from: f64,
    /// Line parameter range end
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    to: f64,
    /// Write the breakpoint CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetFn {
    /// x^2
    X2,
    /// e^x
    Exp,
    /// sin(3x)
    Sin3x,
}

impl TargetFn {
    fn eval(self, x: f64) -> f64 {
        match self {
            TargetFn::X2 => x * x,
            TargetFn::Exp => x.exp(),
            TargetFn::Sin3x => (3.0 * x).sin(),
        }
    }
}

#[derive(Args)]
struct BoundsArgs {
    /// Target function
    #[arg(long, value_enum)]
    f: TargetFn,
    /// Interval start
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    /// Interval length
    #[arg(long, default_value_t = 1.0)]
    len: f64,
    /// Largest coefficient degree
    #[arg(long, default_value_t = 20)]
    max_i: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Target function
    #[arg(long, value_enum)]
    f: TargetFn,
    /// Number of linear pieces
    #[arg(long)]
    n: usize,
    /// Candidate-knot grid resolution
    #[arg(long)]
    grid: usize,
    /// Fit a continuous function on the chosen partition
    #[arg(long)]
    continuous: bool,
    /// Write the partition CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SlabArgs {
    /// Sphere dimension
    #[arg(long)]
    d: usize,
    /// Slab width
    #[arg(long)]
    eps: f64,
    /// Monte-Carlo sample count per estimate
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weight vector (defaults to the facet-aligned d*e1)
    #[arg(long)]
    w: Option<String>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Input dimension
    #[arg(long, default_value_t = 20)]
    d: usize,
    /// Sample-count and width scale in (0, 1]
    #[arg(long, default_value_t = 0.2)]
    scale: f64,
    /// Comma-separated seeds, one sweep repetition each
    #[arg(long, default_value = "0,1,2,3,4")]
    seeds: String,
    /// Training length per run, in batches
    #[arg(long, default_value_t = 12_000)]
    max_batches: usize,
    /// Output directory for per-run curves and summary.csv
    #[arg(long)]
    out_dir: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.cmd {
        Cmd::Build { what } => build(what),
        Cmd::Eval(args) => eval(args),
        Cmd::Inspect(args) => inspect(args),
        Cmd::Bounds(args) => bounds(args),
        Cmd::Oracle(args) => oracle(args),
        Cmd::Slab(args) => slab(args),
        Cmd::Experiment(args) => experiment(args),
    }
}

fn save_net(net: &Network, path: &Path) -> Result<(), CmdError> {
    let text = net.to_text()?;
    atomic_write(path, &text)?;
    println!(
        "wrote {} (input={} depth={} width={})",
        path.display(),
        net.input_dim(),
        net.depth(),
        net.width()
    );
    Ok(())
}

fn build(what: BuildCmd) -> Result<(), CmdError> {
    match what {
        BuildCmd::Multiplier(a) => {
            let net = multiplier(a.magnitude, a.eps)?;
            save_net(&net, &a.out)
        }
        BuildCmd::Square(a) => {
            let net = square(a.magnitude, a.eps)?;
            save_net(&net, &a.out)
        }
        BuildCmd::Ball(a) => {
            let net = ball_indicator(
                a.d,
                a.delta,
                a.shell,
                BallIndicatorOptions { complement: a.complement },
            )?;
            save_net(&net, &a.out)
        }
        BuildCmd::Circuit(a) => {
            let text = std::fs::read_to_string(&a.spec)
                .map_err(|e| validation(format!("cannot read {}: {e}", a.spec.display())))?;
            let circuit = Circuit::parse(&text)?;
            let (net, report) = compile_circuit_with_report(&circuit, a.eps)?;
            println!(
                "ops={} bound={} per_op_delta={} growth_factor={} predicted_sup_error={}",
                report.op_count,
                report.bound,
                report.per_op_delta,
                report.growth_factor,
                report.predicted_sup_error
            );
            save_net(&net, &a.out)
        }
        BuildCmd::L1radial(a) => {
            let knots = parse_knots(&a.knots).map_err(validation)?;
            let profile = RadialPwl::new(a.constant, a.slope, knots)?;
            let net = l1_radial(&profile, a.d)?;
            save_net(&net, &a.out)
        }
        BuildCmd::Triangle(a) => {
            let net = triangle_wave(a.i)?;
            save_net(&net, &a.out)
        }
    }
}

fn eval(args: EvalArgs) -> Result<(), CmdError> {
    let net = Network::load(&args.net)?;
    let x = parse_vector(&args.x).map_err(validation)?;
    let out = net.evaluate(&x)?;
    let rendered: Vec<String> = out.iter().map(|v| format!("{v}")).collect();
    println!("{}", rendered.join(","));
    Ok(())
}

fn inspect(args: InspectArgs) -> Result<(), CmdError> {
    let net = Network::load(&args.net)?;
    println!(
        "input={} depth={} width={} params={}",
        net.input_dim(),
        net.depth(),
        net.width(),
        net.num_params()
    );
    if net.output_dim() != 1 {
        return Ok(()); // segment analysis is defined for scalar outputs
    }
    let dim = net.input_dim();
    let base = match &args.base {
        Some(s) => parse_vector(s).map_err(validation)?,
        None => vec![0.0; dim],
    };
    let dir = match &args.dir {
        Some(s) => parse_vector(s).map_err(validation)?,
        None => {
            let mut v = vec![0.0; dim];
            v[0] = 1.0;
            v
        }
    };
    let line = LineRestriction::new(base, dir, (args.from, args.to))?;
    let pwl = restrict_to_line(&net, &line)?;
    println!("segments={}", pwl.segment_count());
    let mut csv = String::from("t_break,slope_left,slope_right\n");
    for (i, b) in pwl.breakpoints().iter().enumerate() {
        writeln!(
            csv,
            "{},{},{}",
            b,
            pwl.segments()[i].slope,
            pwl.segments()[i + 1].slope
        )
        .expect("string write");
    }
    emit(args.out.as_deref(), &csv)
}

fn bounds(args: BoundsArgs) -> Result<(), CmdError> {
    let f = args.f;
    let report = legendre_report(move |x| f.eval(x), args.a, args.len, args.max_i)?;
    let mut csv = String::from("i,a_i\n");
    for (i, c) in report.coefficients.iter().enumerate() {
        writeln!(csv, "{i},{c:.6}").expect("string write");
    }
    writeln!(csv, "linear_fit_error,{:.6e}", report.linear_fit_error).expect("string write");
    writeln!(csv, "parseval_tail,{:.6e}", report.tail_estimate).expect("string write");
    emit(args.out.as_deref(), &csv)
}

fn oracle(args: OracleArgs) -> Result<(), CmdError> {
    let f = args.f;
    let fit = optimal_pwl_oracle(move |x| f.eval(x), args.n, args.grid, args.continuous)?;
    println!("error={}", fit.error);
    let mut csv = String::from("breakpoint\n");
    for b in &fit.breakpoints {
        writeln!(csv, "{b}").expect("string write");
    }
    emit(args.out.as_deref(), &csv)
}

fn slab(args: SlabArgs) -> Result<(), CmdError> {
    let w = match &args.w {
        Some(s) => parse_vector(s).map_err(validation)?,
        None => {
            let mut w = vec![0.0; args.d];
            if args.d > 0 {
                w[0] = args.d as f64;
            }
            w
        }
    };
    let full = slab_probability(&w, args.eps, args.d, args.samples, args.seed)?;
    let half = slab_probability(&w, args.eps / 2.0, args.d, args.samples, args.seed + 1)?;
    println!("estimate={} ci={}", full.estimate, full.ci_halfwidth);
    println!("estimate_half={} ci_half={}", half.estimate, half.ci_halfwidth);
    let ratio = if half.estimate > 0.0 { full.estimate / half.estimate } else { f64::NAN };
    println!("ratio={ratio}");
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<(), CmdError> {
    let seeds = parse_seeds(&args.seeds).map_err(validation)?;
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| runtime(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let mut summary = String::from("arch,seed,final_valid_rmse,params\n");
    if !seeds.is_empty() {
        let table = depth_vs_width_sweep(args.d, args.scale, &seeds, args.max_batches)?;
        for (idx, cell) in table.cells.iter().enumerate() {
            let mut csv = String::from("batch,train_rmse,valid_rmse\n");
            for p in &cell.run.curves {
                writeln!(csv, "{},{},{}", p.batch, p.train_rmse, p.valid_rmse)
                    .expect("string write");
            }
            // the index keeps names unique when tiny scales collapse widths
            let path = args
                .out_dir
                .join(format!("{:02}-{}-seed{}.csv", idx, cell.label(), cell.seed));
            atomic_write(&path, &csv)?;
            writeln!(
                summary,
                "{},{},{},{}",
                cell.label(),
                cell.seed,
                cell.final_valid_rmse,
                cell.params
            )
            .expect("string write");
        }
    }
    let path = args.out_dir.join("summary.csv");
    atomic_write(&path, &summary)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn emit(path: Option<&Path>, content: &str) -> Result<(), CmdError> {
    match path {
        Some(p) => atomic_write(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
