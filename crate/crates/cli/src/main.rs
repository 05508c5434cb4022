use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use haus_cli::suite::{self, linspace, pairs_csv};
use haus_cli::svg::{Plot, Series};
use haus_core::hardy::h1_norm_estimate;
use haus_core::hausdorff::{
    kernel_eval, multiplier_eval, partial_hausdorff_convolution, partial_hausdorff_direct, partial_hausdorff_spectral,
};
use haus_core::io::{read_signal_file, write_report, write_signal_csv, write_text, WeightConfig};
use haus_core::verify::{
    boundedness_sweep, convergence_sweep, dyadic_grid, hormander_check, multiplier_rate_conditions,
};
use haus_core::weights::check_admissibility;
use haus_core::{
    BoundednessBudget, ExperimentReport, HausError, HormanderSettings, MaximalConfig, OperatorConfig, Result,
    SampledSignal, ScaleSpec, WeightSpec,
};
use serde::Deserialize;
use serde_json::{Map, Value};

/// Hausdorff operators, their partial integrals and H1 estimates.
#[derive(Parser, Debug)]
#[command(name = "haus", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a weight is admissible and print the report as JSON.
    Check(CheckArgs),
    /// Tabulate the Fourier multiplier K^ as CSV `x,khat`.
    Multiplier(MultiplierArgs),
    /// Tabulate the kernel K (or K_eps) as CSV `s,k`.
    Kernel(KernelArgs),
    /// Apply F_eps to a signal CSV.
    Apply(ApplyArgs),
    /// Run one experiment and write its report.
    Sweep(SweepArgs),
    /// Run the canned example suite into a bundle directory.
    Examples(ExamplesArgs),
    /// Estimate the H1 norm of a signal CSV.
    H1norm(H1Args),
}

#[derive(Args, Debug, Clone, Default)]
struct WeightArgs {
    /// Weight as a JSON object, or a family name combined with --p, --alpha, --table.
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Two-column CSV `t,phi` for the tabulated family.
    #[arg(long)]
    table: Option<PathBuf>,
    /// JSON file whose keys override the command-line flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MultiplierArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long, default_value_t = 801)]
    points: usize,
    /// Evaluate K^(eps x) instead of K^(x).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
    s_min: f64,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    s_max: f64,
    #[arg(long, default_value_t = 801)]
    points: usize,
    /// Evaluate K_eps(s) = K(s/eps)/eps instead of K(s).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Engine {
    Spectral,
    Convolution,
    Direct,
}

const DIRECT_MAX_POINTS: usize = 32;

#[derive(Args, Debug)]
struct ApplyArgs {
    #[command(flatten)]
    weight: WeightArgs,
    /// Input signal CSV with header `x,value`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = Engine::Spectral)]
    path: Engine,
    /// Evaluation points for the direct engine (at most 32).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    at: Vec<f64>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SweepKind {
    Boundedness,
    Convergence,
    Hormander,
    RateConditions,
}

impl SweepKind {
    fn name(self) -> &'static str {
        match self {
            SweepKind::Boundedness => "boundedness",
            SweepKind::Convergence => "convergence",
            SweepKind::Hormander => "hormander",
            SweepKind::RateConditions => "rate-conditions",
        }
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long, value_enum)]
    kind: Option<SweepKind>,
    /// Decreasing epsilon grid; defaults depend on the kind.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Use eps = 2^-k for k = 0..=KMAX.
    #[arg(long, conflicts_with = "eps")]
    kmax: Option<u32>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Outer radius of the multiplier rate scan.
    #[arg(long, default_value_t = 1.0)]
    d: f64,
    /// Input signal CSVs; built-in atoms are used when absent.
    #[arg(long)]
    input: Vec<PathBuf>,
    /// Directory receiving `<kind>.json`, `<kind>.csv`, `<kind>_summary.csv` and `<kind>.svg`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExamplesArgs {
    #[arg(long, default_value = "haus-examples")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct H1Args {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    s_min: Option<f64>,
    #[arg(long)]
    s_max: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Keys accepted in a `--config` file.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    weight: Option<WeightConfig>,
    epsilon: Option<f64>,
    eps: Option<Vec<f64>>,
    kmax: Option<u32>,
    sigma: Option<f64>,
    d: Option<f64>,
    x_min: Option<f64>,
    x_max: Option<f64>,
    s_min: Option<f64>,
    s_max: Option<f64>,
    points: Option<usize>,
    input: Option<Value>,
    output: Option<PathBuf>,
    svg: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    path: Option<Engine>,
    kind: Option<SweepKind>,
    at: Option<Vec<f64>>,
    budget: Option<BoundednessBudget>,
    hormander: Option<HormanderSettings>,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<(Self, Option<PathBuf>)> {
        let Some(path) = path else {
            return Ok((Self::default(), None));
        };
        let text = std::fs::read_to_string(path).map_err(|e| HausError::Io(format!("{}: {e}", path.display())))?;
        let value: Map<String, Value> =
            serde_json::from_str(&text).map_err(|e| HausError::Config(format!("{}: {e}", path.display())))?;
        let cfg = serde_json::from_value(Value::Object(value))
            .map_err(|e| HausError::Config(format!("{}: {e}", path.display())))?;
        Ok((cfg, path.parent().map(Path::to_path_buf)))
    }

    fn inputs(&self) -> Result<Option<Vec<PathBuf>>> {
        match &self.input {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(vec![s.into()])),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| {
                    v.as_str()
                        .map(PathBuf::from)
                        .ok_or_else(|| HausError::Config("`input` entries must be strings".into()))
                })
                .collect::<Result<_>>()
                .map(Some),
            Some(_) => Err(HausError::Config("`input` must be a path or a list of paths".into())),
        }
    }
}

fn weight_from(args: &WeightArgs, file: &FileConfig, base: Option<&Path>) -> Result<WeightSpec> {
    if let Some(w) = &file.weight {
        return w.build(base);
    }
    let text = args
        .weight
        .as_deref()
        .ok_or_else(|| HausError::Config("no weight given; use --weight or a config file".into()))?;
    let cfg = if text.trim_start().starts_with('{') {
        WeightConfig::from_json(text)?
    } else {
        WeightConfig {
            family: text.to_string(),
            p: args.p,
            alpha: args.alpha,
            table: args.table.clone(),
        }
    };
    cfg.build(None)
}

fn operator(w: WeightSpec, epsilon: f64) -> Result<OperatorConfig> {
    OperatorConfig::new(w, ScaleSpec::Reciprocal, epsilon)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => write_text(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json<S: serde::Serialize>(v: &S) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| HausError::Format(e.to_string()))
}

fn cmd_check(args: CheckArgs) -> Result<bool> {
    let (file, base) = FileConfig::load(args.weight.config.as_deref())?;
    let w = weight_from(&args.weight, &file, base.as_deref())?;
    let report = check_admissibility(&w, &ScaleSpec::Reciprocal)?;
    emit(file.output.as_deref().or(args.output.as_deref()), &json(&report)?)?;
    Ok(report.passed)
}

fn cmd_multiplier(args: MultiplierArgs) -> Result<bool> {
    let (file, base) = FileConfig::load(args.weight.config.as_deref())?;
    let w = weight_from(&args.weight, &file, base.as_deref())?;
    let cfg = operator(w.clone(), file.epsilon.or(args.epsilon).unwrap_or(1.0))?;
    let scaled = file.epsilon.or(args.epsilon).is_some();
    let xs = linspace(
        file.x_min.unwrap_or(args.x_min),
        file.x_max.unwrap_or(args.x_max),
        file.points.unwrap_or(args.points),
    );
    let rows: Vec<(f64, f64)> = xs
        .into_iter()
        .map(|x| {
            let arg = if scaled { cfg.epsilon() * x } else { x };
            Ok((x, multiplier_eval(&cfg, arg)?))
        })
        .collect::<Result<_>>()?;
    emit(file.output.as_deref().or(args.output.as_deref()), &pairs_csv("x,khat", &rows))?;
    if let Some(svg) = file.svg.as_deref().or(args.svg.as_deref()) {
        let plot = Plot::new(format!("Multiplier of {w}"), "x", "K^(x)").with(Series::new(w.to_string(), rows));
        write_text(svg, &plot.render())?;
    }
    Ok(true)
}

fn cmd_kernel(args: KernelArgs) -> Result<bool> {
    let (file, base) = FileConfig::load(args.weight.config.as_deref())?;
    let w = weight_from(&args.weight, &file, base.as_deref())?;
    let eps = file.epsilon.or(args.epsilon);
    let cfg = operator(w.clone(), eps.unwrap_or(1.0))?;
    let ss = linspace(
        file.s_min.unwrap_or(args.s_min),
        file.s_max.unwrap_or(args.s_max),
        file.points.unwrap_or(args.points),
    );
    let mut rows = Vec::with_capacity(ss.len());
    for s in ss {
        match kernel_eval(&cfg, s, eps.is_some()) {
            Ok(v) => rows.push((s, v)),
            Err(HausError::Singular(msg)) => eprintln!("note: skipping s = {s}: {msg}"),
            Err(e) => return Err(e),
        }
    }
    emit(file.output.as_deref().or(args.output.as_deref()), &pairs_csv("s,k", &rows))?;
    if let Some(svg) = file.svg.as_deref().or(args.svg.as_deref()) {
        let plot = Plot::new(format!("Kernel of {w}"), "s", "K(s)").with(Series::new(w.to_string(), rows));
        write_text(svg, &plot.render())?;
    }
    Ok(true)
}

fn cmd_apply(args: ApplyArgs) -> Result<bool> {
    let (file, base) = FileConfig::load(args.weight.config.as_deref())?;
    let w = weight_from(&args.weight, &file, base.as_deref())?;
    let input = file
        .inputs()?
        .and_then(|v| v.into_iter().next())
        .or(args.input)
        .ok_or_else(|| HausError::Config("no input signal given; use --input".into()))?;
    let f = read_signal_file(&input)?;
    let cfg = operator(w, file.epsilon.unwrap_or(args.epsilon))?;
    let engine = file.path.unwrap_or(args.path);
    let output = file.output.as_deref().or(args.output.as_deref());

    let result = match engine {
        Engine::Spectral => partial_hausdorff_spectral(&cfg, &f)?,
        Engine::Convolution => partial_hausdorff_convolution(&cfg, &f)?,
        Engine::Direct => {
            let at = file.at.clone().unwrap_or(args.at);
            let points: Vec<f64> = if at.is_empty() {
                (0..f.len()).map(|i| f.x(i)).collect()
            } else {
                at
            };
            if points.len() > DIRECT_MAX_POINTS {
                return Err(HausError::Config(format!(
                    "the direct engine is limited to {DIRECT_MAX_POINTS} points ({} requested); pass --at",
                    points.len()
                )));
            }
            let rows: Vec<(f64, f64)> = points
                .iter()
                .map(|&x| Ok((x, partial_hausdorff_direct(&cfg, &f, x)?)))
                .collect::<Result<_>>()?;
            emit(output, &pairs_csv("x,value", &rows))?;
            return Ok(true);
        }
    };
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let mut buf = Vec::new();
    write_signal_csv(&result.signal, &mut buf)?;
    emit(output, &String::from_utf8_lossy(&buf))?;
    if let Some(svg) = file.svg.as_deref().or(args.svg.as_deref()) {
        write_text(svg, &signal_plot(&f, &result.signal, cfg.epsilon()).render())?;
    }
    Ok(true)
}

fn signal_plot(f: &SampledSignal, g: &SampledSignal, eps: f64) -> Plot {
    let pts = |s: &SampledSignal| (0..s.len()).map(|i| (s.x(i), s.values()[i])).collect();
    Plot::new(format!("F_eps at eps = {eps}"), "x", "value")
        .with(Series::new("f", pts(f)))
        .with(Series::new("F_eps f", pts(g)))
}

fn cmd_sweep(args: SweepArgs) -> Result<bool> {
    let (file, base) = FileConfig::load(args.weight.config.as_deref())?;
    let w = weight_from(&args.weight, &file, base.as_deref())?;
    let kind = file
        .kind
        .or(args.kind)
        .ok_or_else(|| HausError::Config("no sweep kind given; use --kind".into()))?;
    let eps = match (file.eps.clone(), file.kmax.or(args.kmax)) {
        (Some(e), _) => Some(e),
        (None, Some(k)) => Some(dyadic_grid(k)),
        (None, None) if !args.eps.is_empty() => Some(args.eps.clone()),
        _ => None,
    };
    let sigma = file.sigma.unwrap_or(args.sigma);
    let inputs = match file.inputs()? {
        Some(v) => v,
        None => args.input.clone(),
    };
    let signals: Vec<SampledSignal> = inputs.iter().map(|p| read_signal_file(p)).collect::<Result<_>>()?;
    let a = ScaleSpec::Reciprocal;

    let report = match kind {
        SweepKind::Boundedness => {
            let signals = if signals.is_empty() { suite::boundedness_atoms()? } else { signals };
            let eps = eps.unwrap_or_else(|| suite::BOUNDEDNESS_EPS.to_vec());
            boundedness_sweep(&w, &a, &signals, &eps, &file.budget.unwrap_or_default())?
        }
        SweepKind::Convergence => {
            let f = match signals.len() {
                0 => suite::convergence_atom()?,
                1 => signals.into_iter().next().unwrap(),
                n => return Err(HausError::Config(format!("convergence takes one input signal, got {n}"))),
            };
            convergence_sweep(&w, &a, &f, sigma, &eps.unwrap_or_else(|| dyadic_grid(8)))?
        }
        SweepKind::Hormander => {
            let mut settings = file.hormander.clone().unwrap_or_default();
            if let Some(e) = eps {
                settings.eps_grid = e;
            }
            hormander_check(&operator(w.clone(), 1.0)?, &settings)?
        }
        SweepKind::RateConditions => {
            multiplier_rate_conditions(&operator(w.clone(), 1.0)?, sigma, file.d.unwrap_or(args.d))?
        }
    };
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    match file.out_dir.as_deref().or(args.out_dir.as_deref()) {
        Some(dir) => {
            let name = kind.name();
            write_report(&report, &dir.join(format!("{name}.json")), Some(&dir.join(format!("{name}.csv"))))?;
            write_text(&dir.join(format!("{name}_summary.csv")), &summary_csv(&report))?;
            write_text(&dir.join(format!("{name}.svg")), &sweep_plot(kind, &report).render())?;
        }
        None => emit(None, &report.to_json()?)?,
    }
    Ok(report.passed)
}

fn summary_csv(r: &ExperimentReport) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    format!(
        "key,value\nexperiment_id,{}\npassed,{}\nfitted_rate,{}\nbound_constant,{}\nconfig_digest,{}\n",
        r.experiment_id,
        r.passed,
        opt(r.fitted_rate),
        opt(r.bound_constant),
        r.config_digest
    )
}

fn sweep_plot(kind: SweepKind, r: &ExperimentReport) -> Plot {
    let keys: &[&str] = match kind {
        SweepKind::Boundedness => &["ratio_min", "ratio_max", "l2_ratio_max"],
        SweepKind::Convergence => &["h1_error", "l2_error", "k_upper"],
        SweepKind::Hormander => &["sup_as_written", "sup_standard", "limit_3_over_pi"],
        SweepKind::RateConditions => &["ratio_sup", "annulus"],
    };
    let x_label = if kind == SweepKind::RateConditions { "R" } else { "eps" };
    let mut plot = Plot::new(r.experiment_id.clone(), x_label, "value").log_log();
    for k in keys {
        let pts = r.epsilon_grid.iter().copied().zip(r.series(k)).collect();
        plot = plot.with(Series::new(*k, pts));
    }
    plot
}

fn cmd_examples(args: ExamplesArgs) -> Result<bool> {
    let outcomes = suite::run_examples(&args.out_dir)?;
    let mut ok = true;
    for o in &outcomes {
        for c in &o.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            println!("{mark} {} | {}: {}", o.name, c.name, c.detail);
        }
        ok &= o.passed();
    }
    Ok(ok)
}

fn cmd_h1norm(args: H1Args) -> Result<bool> {
    let f = read_signal_file(&args.input)?;
    let mut cfg = MaximalConfig::for_signal(&f)?;
    if args.s_min.is_some() || args.s_max.is_some() {
        cfg = MaximalConfig::new(args.s_min.unwrap_or(cfg.s_min()), args.s_max.unwrap_or(cfg.s_max()))?;
    }
    let est = h1_norm_estimate(&f, &cfg)?;
    for w in &est.warnings {
        eprintln!("warning: {w}");
    }
    emit(args.output.as_deref(), &json(&est)?)?;
    Ok(true)
}

fn exit_code(e: &HausError) -> u8 {
    match e {
        HausError::Io(_) => 3,
        HausError::Config(_)
        | HausError::Parameter(_)
        | HausError::InvalidInput(_)
        | HausError::Format(_)
        | HausError::Domain(_)
        | HausError::Aliasing { .. }
        | HausError::OutOfRange { .. }
        | HausError::Unsupported(_) => 2,
        _ => 1,
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("HAUS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| HausError::Config(format!("HAUS_THREADS must be a non-negative integer, got `{v}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HausError::Config(e.to_string()))?;
    }
    Ok(())
}

fn main2(cli: Cli) -> Result<bool> {
    init_threads()?;
    match cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Multiplier(a) => cmd_multiplier(a),
        Command::Kernel(a) => cmd_kernel(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Examples(a) => cmd_examples(a),
        Command::H1norm(a) => cmd_h1norm(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main2(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("haus: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
