//! Command-line front end: pmf tables, divergence reports, bound
//! certification, parameter sweeps, and the verification suites.
//!
//! Exit codes: 0 success, 1 bound violation, 2 input error, 3 numerical
//! escalation failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use poibin::bernoulli::BernoulliVector;
use poibin::bounds::{catalog, check_instance};
use poibin::contour::contour_pmf;
use poibin::divergence::divergence_report;
use poibin::harness::{
    default_corpus, empirical_constants, run_suite, run_sweep, FamilySpec, Suite, SweepRecord,
    DEFAULT_SEED, RNG_NAME,
};
use poibin::io::{fmt_g17, read_probability_file, write_bound_table, write_sweep_csv, CSV_SCHEMA};
use poibin::pmf::{dft_default_nodes, dft_pmf, dp_pmf, LogPmf};
use poibin::poisson::poisson_pmf;
use poibin::{Error, PrecisionMode, PrecisionPolicy, Result, TruncationPolicy};

#[derive(Parser)]
#[command(name = "poibin", version, about = "Poisson-binomial laws, informational distances to the matched Poisson law, and certified bound checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Dp,
    Dft,
    Contour,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Precision {
    Binary64,
    Extended,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Probability file: one decimal per line, '#' comments, blank lines
    /// ignored.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Inline family, e.g. equal:n=10,p=0.3 | allones:n=5 |
    /// random:n=12,seed=7 | twoblock:nh=5,ph=0.9,nl=50,pl=0.01 |
    /// geometric:n=64,a=0.9,g=0.5 | oneheavy:ph=0.99,nt=31,pt=0.02
    #[arg(long)]
    family: Option<String>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output path (stdout when omitted). A `<path>.meta.json` sidecar
    /// carries run information; the data file itself stays reproducible.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Clone)]
struct NumericArgs {
    /// Comma-separated α grid for the Rényi/Tsallis/Vajda families.
    #[arg(long, default_value = "0.5,1,1.5,2,3,4")]
    alpha: String,
    #[arg(long, value_enum, default_value = "binary64")]
    precision: Precision,
    /// Decimal digits carried in extended mode (30..=31).
    #[arg(long, default_value_t = 31)]
    digits: u32,
    /// Optional JSON config file mirroring the flags; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the table (k, w_k, v_k, w_k − v_k).
    Pmf {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum, default_value = "dp")]
        method: Method,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Full divergence report for one instance.
    Divergence {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate the bound catalog on one instance (or print the catalog).
    Bounds {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Print the machine-readable catalog instead of evaluating.
        #[arg(long)]
        catalog: bool,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep a family list (default corpus when none given).
    Sweep {
        /// Repeatable inline family; sweeps the default corpus when absent.
        #[arg(long)]
        family: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        numeric: NumericArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a verification suite: core | asymptotic | structure | all.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        numeric: NumericArgs,
        /// Optional CSV dump of the sweep records behind the core suite.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// JSON config mirroring the flags; explicit command-line values override.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alpha: Option<String>,
    precision: Option<String>,
    digits: Option<u32>,
    seed: Option<u64>,
}

struct Numeric {
    alphas: Vec<f64>,
    policy: PrecisionPolicy,
    trunc: TruncationPolicy,
    seed_override: Option<u64>,
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // negation rejects NaN orders
fn parse_alphas(spec: &str) -> Result<Vec<f64>> {
    let mut alphas = Vec::new();
    for piece in spec.split(',') {
        let a: f64 = piece
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad α value {piece:?}")))?;
        if !(a > 0.0) {
            return Err(Error::InvalidConfig(format!("α must be positive, got {a}")));
        }
        alphas.push(a);
    }
    if alphas.is_empty() {
        return Err(Error::InvalidConfig("empty α grid".into()));
    }
    Ok(alphas)
}

impl NumericArgs {
    fn resolve(&self) -> Result<Numeric> {
        let file: FileConfig = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidConfig(format!("config file: {e}")))?
            }
            None => FileConfig::default(),
        };
        // Flags that remain at their defaults yield to the config file.
        let alpha_spec = if self.alpha == "0.5,1,1.5,2,3,4" {
            file.alpha.clone().unwrap_or_else(|| self.alpha.clone())
        } else {
            self.alpha.clone()
        };
        let precision = match (self.precision, file.precision.as_deref()) {
            (Precision::Binary64, Some("extended")) => Precision::Extended,
            (p, _) => p,
        };
        let digits = if self.digits == 31 {
            file.digits.unwrap_or(31)
        } else {
            self.digits
        };
        let mode = match precision {
            Precision::Binary64 => PrecisionMode::Binary64,
            Precision::Extended => PrecisionMode::Extended,
        };
        let policy = PrecisionPolicy {
            mode,
            extended_digits: digits,
            sum_strategy: Default::default(),
        };
        policy.validate()?;
        Ok(Numeric {
            alphas: parse_alphas(&alpha_spec)?,
            policy,
            trunc: TruncationPolicy::default(),
            seed_override: file.seed,
        })
    }
}

fn load_instance(args: &InstanceArgs) -> Result<BernoulliVector<f64>> {
    match (&args.input, &args.family) {
        (Some(path), None) => read_probability_file(path),
        (None, Some(spec)) => spec.parse::<FamilySpec>()?.to_vector(),
        _ => Err(Error::InvalidConfig(
            "exactly one of --input or --family is required".into(),
        )),
    }
}

struct Sink {
    out: Box<dyn Write>,
    path: Option<PathBuf>,
}

impl Sink {
    fn open(path: &Option<PathBuf>) -> Result<Self> {
        match path {
            Some(p) => Ok(Self {
                out: Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
                path: Some(p.clone()),
            }),
            None => Ok(Self {
                out: Box::new(std::io::stdout().lock()),
                path: None,
            }),
        }
    }

    /// Run metadata lives next to the data file, never inside it.
    fn write_sidecar(&self, command: &str, seed: Option<u64>, policy: &PrecisionPolicy) {
        let Some(path) = &self.path else { return };
        let meta = serde_json::json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "seed": seed,
            "rng": RNG_NAME,
            "precision": format!("{}", policy.mode),
            "unix_time": std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        });
        let mut sidecar = path.clone().into_os_string();
        sidecar.push(".meta.json");
        let _ = std::fs::write(Path::new(&sidecar), format!("{meta:#}\n"));
    }
}

fn pmf_by_method(
    bv: &BernoulliVector<f64>,
    method: Method,
    policy: &PrecisionPolicy,
) -> Result<LogPmf<f64>> {
    match method {
        Method::Dp => match policy.mode {
            PrecisionMode::Binary64 => Ok(dp_pmf(bv)),
            PrecisionMode::Extended => {
                let ext: BernoulliVector<poibin::Extended> = bv.convert();
                let pmf = dp_pmf(&ext);
                Ok(downcast_pmf(&pmf, poibin::pmf::Provenance::Dp))
            }
        },
        Method::Dft => match policy.mode {
            PrecisionMode::Binary64 => dft_pmf(bv, 1.0, dft_default_nodes(bv.n())),
            PrecisionMode::Extended => {
                let ext: BernoulliVector<poibin::Extended> = bv.convert();
                let pmf = dft_pmf(
                    &ext,
                    poibin::Extended::from_f64(1.0),
                    dft_default_nodes(bv.n()),
                )?;
                Ok(downcast_pmf(&pmf, poibin::pmf::Provenance::Dft))
            }
        },
        Method::Contour => {
            let mut mass = Vec::with_capacity(bv.n() + 1);
            for k in 0..=bv.n() {
                mass.push(contour_pmf(bv, k, None)?.probability);
            }
            Ok(LogPmf::from_linear(
                mass,
                poibin::pmf::Support::ExactFinite,
                poibin::pmf::Provenance::Contour,
            ))
        }
    }
}

fn downcast_pmf(
    pmf: &LogPmf<poibin::Extended>,
    provenance: poibin::pmf::Provenance<f64>,
) -> LogPmf<f64> {
    use poibin::Real;
    LogPmf::from_log(
        (0..pmf.len()).map(|k| pmf.log_mass(k).to_f64()).collect(),
        poibin::pmf::Support::ExactFinite,
        provenance,
    )
}

fn cmd_pmf(
    instance: &InstanceArgs,
    method: Method,
    numeric: &NumericArgs,
    output: &OutputArgs,
) -> Result<i32> {
    let nums = numeric.resolve()?;
    let bv = load_instance(instance)?;
    if method == Method::Contour && bv.is_degenerate() {
        return Err(Error::DegenerateInstance);
    }
    let w = pmf_by_method(&bv, method, &nums.policy)?;
    let v = poisson_pmf(bv.lambda(), w.len(), &nums.trunc)?;
    let mut sink = Sink::open(&output.out)?;
    match output.format {
        Format::Csv => {
            writeln!(sink.out, "{CSV_SCHEMA}")?;
            writeln!(sink.out, "k,w,v,diff")?;
            for k in 0..w.len().max(v.len()) {
                let wk = w.mass(k);
                let vk = v.mass(k);
                writeln!(
                    sink.out,
                    "{k},{},{},{}",
                    fmt_g17(wk),
                    fmt_g17(vk),
                    fmt_g17(wk - vk)
                )?;
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = (0..w.len().max(v.len()))
                .map(|k| {
                    let (wk, vk) = (w.mass(k), v.mass(k));
                    serde_json::json!({"k": k, "w": wk, "v": vk, "diff": wk - vk})
                })
                .collect();
            serde_json::to_writer_pretty(&mut sink.out, &rows)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            writeln!(sink.out)?;
        }
    }
    sink.out.flush()?;
    sink.write_sidecar("pmf", None, &nums.policy);
    Ok(0)
}

fn cmd_divergence(
    instance: &InstanceArgs,
    numeric: &NumericArgs,
    output: &OutputArgs,
) -> Result<i32> {
    let nums = numeric.resolve()?;
    let bv = load_instance(instance)?;
    let rep = divergence_report(&bv, &nums.alphas, &nums.policy, &nums.trunc)?;
    let mut sink = Sink::open(&output.out)?;
    match output.format {
        Format::Json => {
            let value = serde_json::json!({
                "summary": bv.summary(),
                "report": rep,
            });
            serde_json::to_writer_pretty(&mut sink.out, &value)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            writeln!(sink.out)?;
        }
        Format::Csv => {
            let rec = SweepRecord {
                index: 0,
                family: instance
                    .family
                    .clone()
                    .unwrap_or_else(|| "input-file".into()),
                seed: None,
                summary: bv.summary(),
                report: Some(rep),
                checks: Vec::new(),
                records: Vec::new(),
                error: None,
            };
            write_sweep_csv(&mut sink.out, &[rec], &nums.alphas)?;
        }
    }
    sink.out.flush()?;
    sink.write_sidecar("divergence", None, &nums.policy);
    Ok(0)
}

fn cmd_bounds(
    instance: &InstanceArgs,
    show_catalog: bool,
    numeric: &NumericArgs,
    output: &OutputArgs,
) -> Result<i32> {
    let nums = numeric.resolve()?;
    let mut sink = Sink::open(&output.out)?;
    if show_catalog {
        match output.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut sink.out, &catalog())
                    .map_err(|e| Error::InvalidConfig(e.to_string()))?;
                writeln!(sink.out)?;
            }
            Format::Csv => {
                writeln!(sink.out, "{CSV_SCHEMA}")?;
                writeln!(sink.out, "name,citation,side,constants,applicability")?;
                for spec in catalog() {
                    let constants = spec
                        .constants
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect::<Vec<_>>()
                        .join(";");
                    writeln!(
                        sink.out,
                        "{},{},{:?},{},{}",
                        spec.name,
                        poibin::io::csv_field(spec.citation),
                        spec.side,
                        poibin::io::csv_field(&constants),
                        poibin::io::csv_field(spec.applicability)
                    )?;
                }
            }
        }
        sink.out.flush()?;
        return Ok(0);
    }
    let bv = load_instance(instance)?;
    let rep = divergence_report(&bv, &nums.alphas, &nums.policy, &nums.trunc)?;
    let (checks, ratios) = check_instance(&bv.summary(), &rep, &nums.alphas);
    let violated = checks.iter().any(|c| c.applicable && !c.holds);
    match output.format {
        Format::Csv => write_bound_table(&mut sink.out, &checks)?,
        Format::Json => {
            let value = serde_json::json!({
                "summary": bv.summary(),
                "checks": checks,
                "ratio_records": ratios,
            });
            serde_json::to_writer_pretty(&mut sink.out, &value)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            writeln!(sink.out)?;
        }
    }
    sink.out.flush()?;
    sink.write_sidecar("bounds", None, &nums.policy);
    Ok(if violated { 1 } else { 0 })
}

fn cmd_sweep(
    families: &[String],
    seed: u64,
    numeric: &NumericArgs,
    output: &OutputArgs,
) -> Result<i32> {
    let nums = numeric.resolve()?;
    let seed = nums.seed_override.unwrap_or(seed);
    let specs: Vec<FamilySpec> = if families.is_empty() {
        default_corpus(seed)
    } else {
        families
            .iter()
            .map(|s| s.parse::<FamilySpec>())
            .collect::<Result<_>>()?
    };
    let records = run_sweep(&specs, &nums.alphas, &nums.policy, &nums.trunc);
    let mut sink = Sink::open(&output.out)?;
    match output.format {
        Format::Csv => write_sweep_csv(&mut sink.out, &records, &nums.alphas)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink.out, &records)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            writeln!(sink.out)?;
        }
    }
    sink.out.flush()?;
    sink.write_sidecar("sweep", Some(seed), &nums.policy);

    let violations: usize = records
        .iter()
        .map(|r| r.failed_checks().len())
        .sum();
    let errors = records.iter().filter(|r| r.error.is_some()).count();
    eprintln!(
        "sweep: {} instances, {} check violations, {} evaluation errors",
        records.len(),
        violations,
        errors
    );
    for e in empirical_constants(&records) {
        eprintln!(
            "  ratio {}: min {:.6e} ({}), max {:.6e} ({}), count {}",
            e.name, e.min, e.argmin, e.max, e.argmax, e.count
        );
    }
    Ok(if violations > 0 { 1 } else { 0 })
}

fn cmd_verify(
    suite: &str,
    seed: u64,
    numeric: &NumericArgs,
    out: &Option<PathBuf>,
) -> Result<i32> {
    let nums = numeric.resolve()?;
    let seed = nums.seed_override.unwrap_or(seed);
    let suite: Suite = suite.parse()?;
    let report = run_suite(suite, seed, &nums.alphas, &nums.policy, &nums.trunc)?;
    let mut failed = 0usize;
    for o in &report.outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {}: {}", o.name, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    if let Some(sw) = &report.stirling {
        println!("stirling-mode checkpoints (n, theta):");
        for (n, hi, lo) in &sw.theta_checkpoints {
            println!("  {n:>8}  {}", fmt_g17(hi + lo));
        }
    }
    if !report.bv_rows.is_empty() {
        println!("small-lambda2 limit table (lambda, n, chi2/(lambda2/lambda)^2, in_regime):");
        for r in &report.bv_rows {
            println!(
                "  {:>6} {:>6}  {}  {}",
                r.lambda,
                r.n,
                fmt_g17(r.ratio),
                r.in_regime
            );
        }
    }
    println!(
        "verify {suite:?}: {}/{} checks passed (seed {seed}, rng {RNG_NAME})",
        report.outcomes.len() - failed,
        report.outcomes.len()
    );
    if let Some(path) = out {
        let mut sink = Sink::open(&Some(path.clone()))?;
        write_sweep_csv(&mut sink.out, &report.records, &nums.alphas)?;
        sink.out.flush()?;
        sink.write_sidecar("verify", Some(seed), &nums.policy);
    }
    Ok(if failed > 0 { 1 } else { 0 })
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::EscalationFailure | Error::QuadratureNonConvergence { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Pmf {
            instance,
            method,
            numeric,
            output,
        } => cmd_pmf(instance, *method, numeric, output),
        Command::Divergence {
            instance,
            numeric,
            output,
        } => cmd_divergence(instance, numeric, output),
        Command::Bounds {
            instance,
            catalog,
            numeric,
            output,
        } => cmd_bounds(instance, *catalog, numeric, output),
        Command::Sweep {
            family,
            seed,
            numeric,
            output,
        } => cmd_sweep(family, *seed, numeric, output),
        Command::Verify {
            suite,
            seed,
            numeric,
            out,
        } => cmd_verify(suite, *seed, numeric, out),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err) as u8)
        }
    }
}
