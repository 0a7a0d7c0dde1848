//! `povmkit` — qubit POVM compatibility, uncertainty-game, and
//! moment-matrix computations as machine-readable reports.
//!
//! Exit codes: 0 success, 2 usage error, 3 indeterminate numeric verdict,
//! 4 out-of-tolerance value in `repro-all`.

mod checks;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use povmkit_core::{
    empirical_conditional_entropy, empirical_correlation, joint_table, moments, noisy_spin,
    run_game, sample_table, sharp_spin, solve_feasibility, threshold_with_gap, Axis, DensityOp,
    GrandPovmProblem, SolveConfig, ThresholdMode, Verdict, Xoshiro256StarStar,
};
use report::{OutputFormat, Report};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "povmkit",
    version,
    about = "Generalized qubit measurements: joint measurability, entropic uncertainty with memory, moment-matrix positivity"
)]
struct Cli {
    /// Report serialization format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bisection search for joint-measurability unsharpness thresholds.
    Thresholds(ThresholdsArgs),
    /// The singlet prediction game at a given unsharpness (or a sweep).
    Game(GameArgs),
    /// Sequential unsharp-sharp trine statistics and moment-matrix analysis.
    Moments(MomentsArgs),
    /// Grand-POVM feasibility for explicit axes at fixed unsharpness.
    Compat(CompatArgs),
    /// Recompute every headline number; nonzero exit on any miss.
    ReproAll(ReproArgs),
}

#[derive(Args)]
struct SolverArgs {
    /// Iteration cap for the feasibility solver.
    #[arg(long, default_value_t = 20_000)]
    max_iter: usize,
    /// Residual below which a witness extraction is attempted.
    #[arg(long, default_value_t = 1e-8)]
    tol_feas: f64,
    /// Residual above which a stalled run is declared infeasible.
    #[arg(long, default_value_t = 1e-5)]
    tol_infeas: f64,
}

impl SolverArgs {
    fn config(&self) -> SolveConfig {
        SolveConfig {
            max_iter: self.max_iter,
            tol_feas: self.tol_feas,
            tol_infeas: self.tol_infeas,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ThresholdSet {
    /// Noisy σx and σz.
    PairXz,
    /// Noisy σx, σy, σz, one grand POVM.
    TripleXyz,
    /// Trine axes, all pairs.
    TrinePair,
    /// Trine axes, one grand POVM.
    TrineTriple,
    /// Axes given via --axes.
    Custom,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Pairwise,
    Full,
}

#[derive(Args)]
struct ThresholdsArgs {
    /// Which observable set to analyze.
    #[arg(long, value_enum)]
    set: ThresholdSet,
    /// Semicolon-separated axis triples "x,y,z;..." (used with --set custom).
    #[arg(long)]
    axes: Option<String>,
    /// Marginal scope for --set custom.
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    mode: ModeArg,
    /// Bisection termination gap on the unsharpness.
    #[arg(long, default_value_t = 1e-3)]
    gap: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct GameArgs {
    /// Bob's unsharpness in [0, 1].
    #[arg(long, conflicts_with = "sweep")]
    eta: Option<f64>,
    /// Sweep "start:end:step" over the unsharpness.
    #[arg(long)]
    sweep: Option<String>,
    /// Monte Carlo sample count per table (adds empirical entropies).
    #[arg(long)]
    samples: Option<u64>,
    /// PRNG seed for sampling.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct MomentsArgs {
    /// Unsharpness of the first (fuzzy) measurement in [0, 1].
    #[arg(long)]
    eta: f64,
    /// Monte Carlo sample count per pair table (adds empirical correlations).
    #[arg(long)]
    samples: Option<u64>,
    /// PRNG seed for sampling.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct CompatArgs {
    /// Semicolon-separated axis triples "x,y,z;...", two or three of them.
    #[arg(long)]
    axes: String,
    /// Shared unsharpness in [0, 1].
    #[arg(long)]
    eta: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct ReproArgs {
    /// PRNG seed for the sampling checks.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

struct UsageError(String);

fn parse_axes(text: &str) -> Result<Vec<Axis>, UsageError> {
    let mut axes = Vec::new();
    for part in text.split(';') {
        let comps: Vec<&str> = part.split(',').collect();
        if comps.len() != 3 {
            return Err(UsageError(format!(
                "axis '{part}' must have three comma-separated components"
            )));
        }
        let mut v = [0.0f64; 3];
        for (slot, c) in v.iter_mut().zip(&comps) {
            *slot = c
                .trim()
                .parse()
                .map_err(|_| UsageError(format!("cannot parse '{c}' as a number")))?;
        }
        let axis = Axis::new(v[0], v[1], v[2])
            .map_err(|_| UsageError(format!("axis '{part}' has zero length")))?;
        axes.push(axis);
    }
    Ok(axes)
}

fn parse_sweep(text: &str) -> Result<Vec<f64>, UsageError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(UsageError(format!("sweep '{text}' must be start:end:step")));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| UsageError(format!("cannot parse '{p}' as a number")))
        })
        .collect::<Result<_, _>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if step <= 0.0 || end < start {
        return Err(UsageError("sweep needs end ≥ start and step > 0".into()));
    }
    let mut etas = Vec::new();
    let mut k = 0u32;
    loop {
        let eta = start + f64::from(k) * step;
        if eta > end + 1e-12 {
            break;
        }
        etas.push(eta.min(end));
        k += 1;
    }
    Ok(etas)
}

fn check_eta(eta: f64) -> Result<(), UsageError> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(UsageError(format!("eta {eta} outside [0, 1]")))
    }
}

fn tuple_string(tuple: &[i8]) -> String {
    tuple
        .iter()
        .map(|&t| if t > 0 { '+' } else { '-' })
        .collect()
}

fn cmd_thresholds(args: &ThresholdsArgs) -> Result<Report, UsageError> {
    let (axes, mode, set_name): (Vec<Axis>, ThresholdMode, &str) = match args.set {
        ThresholdSet::PairXz => (vec![Axis::x(), Axis::z()], ThresholdMode::Full, "pair-xz"),
        ThresholdSet::TripleXyz => (
            vec![Axis::x(), Axis::y(), Axis::z()],
            ThresholdMode::Full,
            "triple-xyz",
        ),
        ThresholdSet::TrinePair => (
            moments::trine_axes().to_vec(),
            ThresholdMode::Pairwise,
            "trine-pair",
        ),
        ThresholdSet::TrineTriple => (
            moments::trine_axes().to_vec(),
            ThresholdMode::Full,
            "trine-triple",
        ),
        ThresholdSet::Custom => {
            let text = args
                .axes
                .as_deref()
                .ok_or_else(|| UsageError("--set custom requires --axes".into()))?;
            let axes = parse_axes(text)?;
            let mode = match args.mode {
                ModeArg::Pairwise => ThresholdMode::Pairwise,
                ModeArg::Full => ThresholdMode::Full,
            };
            (axes, mode, "custom")
        }
    };
    if !(2..=3).contains(&axes.len()) {
        return Err(UsageError(format!(
            "{} axes given; thresholds need 2 or 3",
            axes.len()
        )));
    }

    let search = threshold_with_gap(&axes, mode, &args.solver.config(), args.gap)
        .map_err(|e| UsageError(e.to_string()))?;

    let mut report = Report::new("thresholds");
    report
        .input("set", set_name)
        .input(
            "mode",
            match mode {
                ThresholdMode::Pairwise => "pairwise",
                ThresholdMode::Full => "full",
            },
        )
        .input("gap", args.gap)
        .input("max_iter", args.solver.max_iter)
        .input("tol_feas", args.solver.tol_feas)
        .input("tol_infeas", args.solver.tol_infeas);
    for (i, axis) in axes.iter().enumerate() {
        let u = axis.unit();
        report.input(&format!("axis.{i}"), format!("{},{},{}", u[0], u[1], u[2]));
    }
    report.number("eta_star", search.eta_star);
    report.integer("probes", search.probes.len() as u64);
    for (i, probe) in search.probes.iter().enumerate() {
        let prefix = format!("probe.{i:02}");
        report.number(&format!("{prefix}.eta"), probe.eta);
        report.flag(&format!("{prefix}.feasible"), probe.feasible);
        report.number(&format!("{prefix}.residual"), probe.residual);
        report.integer(&format!("{prefix}.iterations"), probe.iterations as u64);
    }
    Ok(report)
}

fn game_report(eta: f64, samples: Option<u64>, seed: u64) -> Result<Report, UsageError> {
    check_eta(eta)?;
    let game = run_game(eta).map_err(|e| UsageError(e.to_string()))?;
    let mut report = Report::new("game");
    report.input("eta", eta);
    report
        .number("eta", game.eta)
        .number("lhs", game.lhs)
        .number("closed_form", game.closed_form)
        .number("bound_no_memory", game.bound_no_memory)
        .number("bound_with_memory", game.bound_with_memory)
        .flag("steering_violated", game.steering_violated);

    if let Some(n) = samples {
        if n == 0 {
            return Err(UsageError("--samples must be at least 1".into()));
        }
        let rho = povmkit_core::singlet();
        let table_x = joint_table(
            &rho,
            &sharp_spin(&Axis::x()),
            &noisy_spin(&Axis::x(), eta).map_err(|e| UsageError(e.to_string()))?,
        )
        .map_err(|e| UsageError(e.to_string()))?;
        let table_z = joint_table(
            &rho,
            &sharp_spin(&Axis::z()),
            &noisy_spin(&Axis::z(), eta).map_err(|e| UsageError(e.to_string()))?,
        )
        .map_err(|e| UsageError(e.to_string()))?;
        // Substreams 0 and 1 of the seed sample the X and Z tables.
        let run_x = sample_table(&table_x, n, stream_seed(seed, 0)).unwrap();
        let run_z = sample_table(&table_z, n, stream_seed(seed, 1)).unwrap();
        let h_x = empirical_conditional_entropy(&run_x);
        let h_z = empirical_conditional_entropy(&run_z);
        report
            .integer("samples", n)
            .number("empirical_h_xx", h_x)
            .number("empirical_h_zz", h_z)
            .number("empirical_lhs", h_x + h_z);
        report.seed(seed);
    }
    Ok(report)
}

/// Derives per-table seeds with the documented substream rule.
fn stream_seed(seed: u64, index: u64) -> u64 {
    let mut rng = Xoshiro256StarStar::substream(seed, index);
    rng.next_u64()
}

fn cmd_game(args: &GameArgs) -> Result<Vec<Report>, UsageError> {
    let etas = match (&args.eta, &args.sweep) {
        (Some(eta), None) => vec![*eta],
        (None, Some(sweep)) => parse_sweep(sweep)?,
        (None, None) => return Err(UsageError("game needs --eta or --sweep".into())),
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    };
    etas.iter()
        .map(|&eta| game_report(eta, args.samples, args.seed))
        .collect()
}

fn cmd_moments(args: &MomentsArgs) -> Result<Report, UsageError> {
    check_eta(args.eta)?;
    let axes = moments::trine_axes();
    let mixed = DensityOp::maximally_mixed(2);
    let correlations = moments::sequential_correlations(&axes, &mixed, args.eta)
        .map_err(|e| UsageError(e.to_string()))?;
    let matrix = moments::build_moment_matrix(&correlations);
    let eigenvalues = moments::moment_eigenvalues(&matrix);

    let mut report = Report::new("moments");
    report.input("eta", args.eta);
    report
        .number("c12", correlations.c12())
        .number("c23", correlations.c23())
        .number("c13", correlations.c13());
    for (i, row) in matrix.entries().iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            report.number(&format!("matrix.{i}{j}"), v);
        }
    }
    for (i, &e) in eigenvalues.iter().enumerate() {
        report.number(&format!("eigenvalue.{i}"), e);
    }
    report.number("min_eigenvalue", eigenvalues[0]);
    report.flag("positive", eigenvalues[0] >= -1e-12);
    report.number("lgi_value", moments::lgi_value(&correlations));

    if let Some(n) = args.samples {
        if n == 0 {
            return Err(UsageError("--samples must be at least 1".into()));
        }
        let pairs = [(0usize, 1usize, "c12"), (1, 2, "c23"), (0, 2, "c13")];
        for (stream, (k, l, name)) in pairs.iter().enumerate() {
            let table = moments::sequential_pair_table(&mixed, &axes[*k], &axes[*l], args.eta)
                .map_err(|e| UsageError(e.to_string()))?;
            let run = sample_table(&table, n, stream_seed(args.seed, stream as u64)).unwrap();
            report.number(&format!("empirical_{name}"), empirical_correlation(&run));
        }
        report.integer("samples", n);
        report.seed(args.seed);
    }
    Ok(report)
}

fn cmd_compat(args: &CompatArgs) -> Result<(Report, Verdict), UsageError> {
    check_eta(args.eta)?;
    let axes = parse_axes(&args.axes)?;
    let problem = GrandPovmProblem::noisy_spins(&axes, args.eta)
        .map_err(|e| UsageError(e.to_string()))?;
    let outcome = solve_feasibility(&problem, &args.solver.config());

    let mut report = Report::new("compat");
    report
        .input("eta", args.eta)
        .input("max_iter", args.solver.max_iter)
        .input("tol_feas", args.solver.tol_feas)
        .input("tol_infeas", args.solver.tol_infeas);
    for (i, axis) in axes.iter().enumerate() {
        let u = axis.unit();
        report.input(&format!("axis.{i}"), format!("{},{},{}", u[0], u[1], u[2]));
    }
    report
        .text("verdict", outcome.verdict)
        .number("residual", outcome.residual)
        .integer("iterations", outcome.iterations as u64);
    if let Some(witness) = &outcome.witness {
        // Print in canonical order: all-plus tuple first.
        for idx in (0..witness.effects().len()).rev() {
            let effect = witness.effects()[idx];
            let key = tuple_string(&witness.outcome_tuple(idx));
            report.number(&format!("witness.{key}.a"), effect.a);
            report.number(&format!("witness.{key}.bx"), effect.b[0]);
            report.number(&format!("witness.{key}.by"), effect.b[1]);
            report.number(&format!("witness.{key}.bz"), effect.b[2]);
        }
    }
    Ok((report, outcome.verdict))
}

fn cmd_repro_all(args: &ReproArgs) -> (Report, bool) {
    let checks = checks::run_all(args.seed);
    let mut report = Report::new("repro-all");
    report.input("seed", args.seed);
    report.seed(args.seed);
    let mut all_pass = true;
    for check in &checks {
        report.number(check.name, check.value);
        report.text(&format!("{}.expected", check.name), &check.expected);
        report.flag(&format!("{}.pass", check.name), check.pass);
        all_pass &= check.pass;
    }
    report.flag("all_pass", all_pass);
    (report, all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let run = || -> Result<(Vec<Report>, ExitCode), UsageError> {
        match &cli.command {
            Command::Thresholds(args) => Ok((vec![cmd_thresholds(args)?], ExitCode::SUCCESS)),
            Command::Game(args) => Ok((cmd_game(args)?, ExitCode::SUCCESS)),
            Command::Moments(args) => Ok((vec![cmd_moments(args)?], ExitCode::SUCCESS)),
            Command::Compat(args) => {
                let (report, verdict) = cmd_compat(args)?;
                let code = if verdict == Verdict::Indeterminate {
                    ExitCode::from(3)
                } else {
                    ExitCode::SUCCESS
                };
                Ok((vec![report], code))
            }
            Command::ReproAll(args) => {
                let (report, all_pass) = cmd_repro_all(args);
                let code = if all_pass {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(4)
                };
                Ok((vec![report], code))
            }
        }
    };

    match run() {
        Ok((reports, code)) => {
            print!("{}", report::render(&reports, cli.format));
            code
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
