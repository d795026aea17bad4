//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::canonical::TrialParams;
use crate::chart::render_svg;
use crate::designs::{Design, Family};
use crate::document::DesignDocument;
use crate::error::Error;
use crate::integrate::{self, Sidedness};
use crate::performance::{self, PerformanceCurve, PerformanceSummary};
use crate::simulate::{rounded_schedule, simulate_trials, SimConfig, SimResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const DEFAULT_OMEGA: f64 = 0.5;

#[derive(Debug, Parser)]
#[command(name = "gsdesign", version, about = "Group sequential trial designs for normal outcomes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two-sided, interim efficacy boundaries fixed at 3.
    HaybittlePeto(DesignArgs),
    /// Two-sided Wang–Tsiatis family (Pocock at omega 0.5, O'Brien–Fleming at 0).
    WangTsiatis(DesignArgs),
    /// Two-sided power family of inner wedge designs.
    InnerWedge(DesignArgs),
    /// Two-sided double triangular test.
    DoubleTriangular(DesignArgs),
    /// One-sided power family.
    PowerFamily(DesignArgs),
    /// One-sided triangular test.
    Triangular(DesignArgs),
    /// Monte Carlo simulation of a saved design.
    Simulate(SimulateArgs),
    /// Power and expected sample size curves of a saved design.
    Curves(CurvesArgs),
}

#[derive(Debug, Args)]
struct DesignArgs {
    /// Maximum number of analyses.
    #[arg(short = 'l', long = "stages", default_value_t = 3)]
    stages: usize,
    /// Clinically relevant difference.
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    delta: f64,
    /// Type-I error rate.
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    alpha: f64,
    /// Type-II error rate.
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    beta: f64,
    /// Outcome standard deviation(s): one value for both arms or `s0,s1`.
    #[arg(long, value_delimiter = ',', default_value = "1", allow_negative_numbers = true)]
    sigma: Vec<f64>,
    /// Arm-1 to arm-0 allocation ratio.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    ratio: f64,
    /// Boundary shape (families with a shape parameter; default 0.5).
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Add the performance summary and curves.
    #[arg(long)]
    performance: bool,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    tau_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tau_max: Option<f64>,
    #[arg(long, default_value_t = performance::DEFAULT_CURVE_POINTS)]
    tau_points: usize,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG chart of the curves.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Design document produced with `--format json`.
    #[arg(long)]
    design: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    reps: u64,
    /// Treatment effect to simulate under.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    tau: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurvesArgs {
    #[arg(long)]
    design: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

/// A failure carrying its exit code and one-line diagnostic.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { field, reason } => Failure::usage(format!("{field} {reason} ({})", flag_for(field))),
            e if e.is_validation() => Failure::usage(e.to_string()),
            e => Failure {
                code: EXIT_NUMERICAL,
                message: e.to_string(),
            },
        }
    }
}

fn flag_for(field: &str) -> String {
    match field {
        "sigma0" | "sigma1" => "--sigma".into(),
        "n" | "information" | "stage" | "boundary" | "constants" => "design".into(),
        "tau range" => "--tau-min/--tau-max".into(),
        "tau points" => "--tau-points".into(),
        "replicates" => "--reps".into(),
        other => format!("--{other}"),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                let _ = write!(stderr, "{e}");
                return EXIT_USAGE;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("error: invalid arguments");
            let _ = writeln!(stderr, "{line}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, &args, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, argv: &[OsString], stdout: &mut dyn Write) -> Result<(), Failure> {
    let family = match &command {
        Command::HaybittlePeto(_) => Family::HaybittlePeto,
        Command::WangTsiatis(_) => Family::WangTsiatis,
        Command::InnerWedge(_) => Family::InnerWedge,
        Command::DoubleTriangular(_) => Family::DoubleTriangular,
        Command::PowerFamily(_) => Family::PowerFamily,
        Command::Triangular(_) => Family::Triangular,
        Command::Simulate(args) => return simulate(args, argv, stdout),
        Command::Curves(args) => return curves(args, argv, stdout),
    };
    let (Command::HaybittlePeto(args)
    | Command::WangTsiatis(args)
    | Command::InnerWedge(args)
    | Command::DoubleTriangular(args)
    | Command::PowerFamily(args)
    | Command::Triangular(args)) = command
    else {
        unreachable!("handled above")
    };
    design_command(family, &args, argv, stdout)
}

fn params_from(family: Family, args: &DesignArgs) -> Result<TrialParams, Failure> {
    let (sigma0, sigma1) = match args.sigma.as_slice() {
        [s] => (*s, *s),
        [s0, s1] => (*s0, *s1),
        _ => return Err(Failure::usage("--sigma takes one or two values")),
    };
    let omega = if family.takes_omega() {
        Some(args.omega.unwrap_or(DEFAULT_OMEGA))
    } else {
        args.omega
    };
    if !family.takes_omega() && omega.is_some() {
        return Err(Failure::usage(format!("omega not accepted by {family} (--omega)")));
    }
    let params = TrialParams {
        stages: args.stages,
        delta: args.delta,
        alpha: args.alpha,
        beta: args.beta,
        sigma0,
        sigma1,
        ratio: args.ratio,
        omega,
    };
    params.validate()?;
    Ok(params)
}

fn tau_grid(design: &Design, grid: &GridArgs) -> (f64, f64, usize) {
    let (lo, hi) = performance::default_tau_range(design);
    (grid.tau_min.unwrap_or(lo), grid.tau_max.unwrap_or(hi), grid.tau_points)
}

fn design_command(family: Family, args: &DesignArgs, argv: &[OsString], stdout: &mut dyn Write) -> Result<(), Failure> {
    let params = params_from(family, args)?;
    let design = family.design(&params)?;
    let wants_curves = args.performance || args.output.format == Format::Csv || args.output.svg.is_some();
    let curve = if wants_curves {
        let (lo, hi, points) = tau_grid(&design, &args.grid);
        Some(performance::curves(&design, lo, hi, points)?)
    } else {
        None
    };
    let summary = if args.performance {
        Some(performance::summarize(&design)?)
    } else {
        None
    };

    let body = match args.output.format {
        Format::Json => DesignDocument::new(&design, summary, curve.clone().filter(|_| args.performance)).to_json(),
        Format::Csv => curve.as_ref().expect("computed for csv").to_csv(),
        Format::Text => text_report(&design, summary.as_ref()),
    };
    emit(&body, args.output.out.as_deref(), argv, stdout)?;
    if let (Some(path), Some(curve)) = (&args.output.svg, &curve) {
        write_file(path, &render_svg(curve, &title(&design)))?;
    }
    Ok(())
}

fn load_design(path: &Path) -> Result<Design, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e} (--design)", path.display())))?;
    Ok(DesignDocument::from_json(&text)?.to_design()?)
}

fn curves(args: &CurvesArgs, argv: &[OsString], stdout: &mut dyn Write) -> Result<(), Failure> {
    let design = load_design(&args.design)?;
    let (lo, hi, points) = tau_grid(&design, &args.grid);
    let curve = performance::curves(&design, lo, hi, points)?;
    let body = match args.output.format {
        Format::Csv => curve.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&curve).expect("finite curve values");
            s.push('\n');
            s
        }
        Format::Text => curve_table(&curve),
    };
    emit(&body, args.output.out.as_deref(), argv, stdout)?;
    if let Some(path) = &args.output.svg {
        write_file(path, &render_svg(&curve, &title(&design)))?;
    }
    Ok(())
}

fn simulate(args: &SimulateArgs, argv: &[OsString], stdout: &mut dyn Write) -> Result<(), Failure> {
    let design = load_design(&args.design)?;
    let result = simulate_trials(&SimConfig {
        design: &design,
        replicates: args.reps,
        seed: args.seed,
        tau: args.tau,
    })?;
    let body = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&result).expect("finite simulation results");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("stage,reject,accept,stop\n");
            for l in 0..result.reject_at.len() {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    l + 1,
                    result.reject_at[l],
                    result.accept_at[l],
                    result.stage_stop_frequencies[l]
                );
            }
            s
        }
        Format::Text => simulation_report(&design, &result)?,
    };
    emit(&body, args.out.as_deref(), argv, stdout)
}

fn emit(body: &str, out: Option<&Path>, argv: &[OsString], stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => {
            write_file(path, body)?;
            write_file(&sidecar_path(path), &provenance(argv))
        }
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write output: {e}"))),
    }
}

/// `<path>.meta.json`, holding provenance kept out of the data file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn provenance(argv: &[OsString]) -> String {
    let generated = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = serde_json::json!({
        "tool": "gsdesign",
        "version": env!("CARGO_PKG_VERSION"),
        "arguments": argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>(),
        "generated_unix_seconds": generated,
    });
    let mut s = serde_json::to_string_pretty(&meta).expect("plain json");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn title(design: &Design) -> String {
    format!("{} design, L = {}", design.family, design.params.stages)
}

fn display_name(family: Family) -> &'static str {
    match family {
        Family::HaybittlePeto => "Haybittle-Peto design",
        Family::WangTsiatis => "Wang-Tsiatis design",
        Family::InnerWedge => "Power family of inner wedge designs",
        Family::DoubleTriangular => "Double triangular test",
        Family::PowerFamily => "One-sided power family design",
        Family::Triangular => "Triangular test",
    }
}

fn text_report(design: &Design, summary: Option<&PerformanceSummary>) -> String {
    let p = &design.params;
    let mut s = String::new();
    let _ = write!(s, "{}, L = {}", display_name(design.family), p.stages);
    if let Some(w) = p.omega {
        let _ = write!(s, ", omega = {w}");
    }
    s.push('\n');
    let two_sided = design.family.sidedness() == Sidedness::TwoSided;
    if two_sided {
        let _ = writeln!(s, "Hypotheses: H0: tau = 0 versus H1: tau != 0");
    } else {
        let _ = writeln!(s, "Hypotheses: H0: tau <= 0 versus H1: tau > 0");
    }
    let _ = writeln!(
        s,
        "Desired: P(reject H0 | tau = 0) <= {}, P(reject H0 | tau = {}{}) >= {}",
        p.alpha,
        if two_sided { "+/-" } else { "" },
        p.delta,
        1.0 - p.beta
    );
    let _ = writeln!(s, "Progress:");
    if design.family.is_searched() {
        let _ = writeln!(s, "  boundary constants calibrated for the type-I error rate");
        let _ = writeln!(s, "  group size calibrated for power");
    } else {
        let _ = writeln!(s, "  boundaries and final information from closed-form expressions");
    }
    let _ = writeln!(s, "  operating characteristics computed by numerical integration");

    let (n0, n1) = design.integer_group_sizes();
    let _ = writeln!(
        s,
        "Group size: n = {:.1} (arm 0) and {:.1} (arm 1) per stage; recruit {} and {}",
        design.schedule.group_size, design.schedule.arm1_group_size, n0, n1
    );
    let (lower, upper) = if two_sided { ("a", "r") } else { ("f", "e") };
    let _ = writeln!(s, "{:>5} {:>10} {:>10} {:>12} {:>10}", "stage", lower, upper, "I", "N");
    for l in 0..p.stages {
        let _ = writeln!(
            s,
            "{:>5} {:>10.4} {:>10.4} {:>12.4} {:>10.1}",
            l + 1,
            design.bounds.futility()[l],
            design.bounds.efficacy()[l],
            design.schedule.info[l],
            design.schedule.cumulative_samples[l]
        );
    }
    let _ = writeln!(
        s,
        "Operating characteristics: P(reject H0 | 0) = {:.3}, P(reject H0 | {}) = {:.3}",
        design.attained_alpha, p.delta, design.attained_power
    );
    if let Some(perf) = summary {
        let _ = writeln!(
            s,
            "Sample size: E(N | 0) = {:.1}, E(N | {}) = {:.1}, max E(N) = {:.1}, max N = {:.1}",
            perf.ess_null, p.delta, perf.ess_alt, perf.max_ess, perf.max_n
        );
    } else {
        let _ = writeln!(s, "Maximum sample size: {:.1}", design.max_n());
    }
    s
}

fn curve_table(curve: &PerformanceCurve) -> String {
    let mut s = format!("{:>10} {:>10} {:>12}\n", "tau", "power", "E(N)");
    for ((t, p), e) in curve.tau.iter().zip(&curve.power).zip(&curve.ess) {
        let _ = writeln!(s, "{t:>10.4} {p:>10.4} {e:>12.1}");
    }
    s
}

fn simulation_report(design: &Design, r: &SimResult) -> Result<String, Failure> {
    let schedule = rounded_schedule(design)?;
    let predicted = integrate::stopping_probabilities(&design.bounds, &schedule, r.tau)?;
    let predicted_n = integrate::expected_sample_size(&design.bounds, &schedule, r.tau)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} replicates of the {} (seed {}) at tau = {}",
        r.replicates,
        display_name(design.family).to_lowercase(),
        r.seed,
        r.tau
    );
    let _ = writeln!(s, "Per-stage recruitment: {} (arm 0), {} (arm 1)", r.group_sizes.0, r.group_sizes.1);
    let _ = writeln!(s, "{:>16} {:>12} {:>10} {:>12}", "", "simulated", "se", "integrated");
    let _ = writeln!(
        s,
        "{:>16} {:>12.5} {:>10.5} {:>12.5}",
        "P(reject)",
        r.reject_rate,
        r.reject_se,
        predicted.rejection()
    );
    let _ = writeln!(
        s,
        "{:>16} {:>12.5} {:>10.5} {:>12.5}",
        "P(accept)",
        r.accept_rate,
        r.accept_se,
        predicted.acceptance()
    );
    let _ = writeln!(s, "{:>16} {:>12.2} {:>10.2} {:>12.2}", "E(N)", r.mean_n, r.mean_n_se, predicted_n);
    for (l, (f, p)) in r.stage_stop_frequencies.iter().zip(predicted.stop_at()).enumerate() {
        let _ = writeln!(
            s,
            "{:>16} {:>12.5} {:>10.5} {:>12.5}",
            format!("stop at {}", l + 1),
            f,
            r.rate_se(*f),
            p
        );
    }
    Ok(s)
}
