//! Command-line front end: `eval`, `search`, `emit-plot`, `bessel-table`.
//!
//! Settings come from flags and optionally from a JSON file given with
//! `--config`; flags win over file values. Exit status is 0 on success, 1 on
//! usage or I/O errors and 2 when a correlator lands above Tsirelson's bound.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::chsh::{chsh_correlator_guarded, BilinearSet, ChshParams, ChshResult, Classification};
use crate::error::{Error, Result};
use crate::kernels::{HadamardKernel, KernelGuard};
use crate::quad::{tensor_oracle_with_error, IntegralEstimate, QuadPlan};
use crate::search::{persist_records, random_search, Interval, ParamRanges, SearchRecord};
use crate::special::{bessel_j0, bessel_k0, bessel_y0};
use crate::testfns::{DiamondSide, DiamondTestFunction};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ABOVE_TSIRELSON: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "diamond-chsh", version, about = "Bell-CHSH correlators for diamond-smeared Weyl operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the correlator for one parameter set.
    Eval(EvalArgs),
    /// Random search over the parameter box.
    Search(SearchArgs),
    /// Sample one test function on a grid over its support box.
    EmitPlot(PlotArgs),
    /// Tabulate J0, Y0, K0 on a grid.
    BesselTable(BesselArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON file with default values for any flag
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    seed: Option<u64>,
    /// points per replicate (power of two)
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    /// also run the tensor Gauss-Legendre oracle
    #[arg(long)]
    cross_check: bool,
    /// worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a_prime: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eta_prime: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b_prime: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma_prime: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mass: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r_prime: Option<f64>,
    /// tensor oracle level used with --cross-check
    #[arg(long)]
    oracle_level: Option<usize>,
    /// light-cone floor on |λ| (must be <= 1e-12 unless --unchecked-guard)
    #[arg(long)]
    lambda_floor: Option<f64>,
    /// accept any positive --lambda-floor (fault injection)
    #[arg(long)]
    unchecked_guard: bool,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long, value_name = "LO,HI")]
    range_a: Option<Interval>,
    #[arg(long, value_name = "LO,HI")]
    range_eta: Option<Interval>,
    #[arg(long, value_name = "LO,HI")]
    range_b: Option<Interval>,
    #[arg(long, value_name = "LO,HI")]
    range_sigma: Option<Interval>,
    #[arg(long, value_name = "LO,HI")]
    range_a_prime: Option<Interval>,
    #[arg(long, value_name = "LO,HI")]
    range_eta_prime: Option<Interval>,
    #[arg(long, value_name = "LO,HI")]
    range_b_prime: Option<Interval>,
    #[arg(long, value_name = "LO,HI")]
    range_sigma_prime: Option<Interval>,
    #[arg(long, value_name = "LO,HI")]
    range_mass: Option<Interval>,
    #[arg(long, value_name = "LO,HI")]
    range_r: Option<Interval>,
    #[arg(long, value_name = "LO,HI")]
    range_r_prime: Option<Interval>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    side: Option<String>,
    #[arg(long)]
    sharpness: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    amplitude: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    /// grid intervals per axis; the grid has (n + 1)² samples
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Debug, Args)]
struct BesselArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, allow_negative_numbers = true)]
    min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    max: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, value_enum)]
    scale: Option<GridScale>,
}

/// Values accepted in a `--config` file. All keys are optional.
#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub replicates: Option<usize>,
    pub cross_check: Option<bool>,
    pub threads: Option<usize>,
    pub a: Option<f64>,
    pub eta: Option<f64>,
    pub b: Option<f64>,
    pub sigma: Option<f64>,
    pub a_prime: Option<f64>,
    pub eta_prime: Option<f64>,
    pub b_prime: Option<f64>,
    pub sigma_prime: Option<f64>,
    pub mass: Option<f64>,
    pub r: Option<f64>,
    pub r_prime: Option<f64>,
    pub oracle_level: Option<usize>,
    pub lambda_floor: Option<f64>,
    pub samples: Option<usize>,
    pub top_k: Option<usize>,
    /// parameter name (`a`, `eta`, ..., `mass`, `r_prime`) → `[lo, hi]`
    pub ranges: Option<BTreeMap<String, [f64; 2]>>,
    pub side: Option<DiamondSide>,
    pub sharpness: Option<f64>,
    pub amplitude: Option<f64>,
    pub radius: Option<f64>,
    pub resolution: Option<usize>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    pub scale: Option<GridScale>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Settings shared by all subcommands after merging flags over the file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub plan: QuadPlan,
    pub cross_check: bool,
    pub threads: Option<usize>,
}

fn resolve_common(args: &CommonArgs) -> Result<(RunConfig, FileConfig)> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let defaults = QuadPlan::default();
    let plan = QuadPlan {
        points_per_replicate: args.points.or(file.points).unwrap_or(defaults.points_per_replicate),
        replicates: args.replicates.or(file.replicates).unwrap_or(defaults.replicates),
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        target_rel_error: defaults.target_rel_error,
    };
    plan.validate()?;
    let threads = args.threads.or(file.threads);
    if threads == Some(0) {
        return Err(Error::invalid("threads", "must be at least 1"));
    }
    Ok((
        RunConfig {
            out: args.out.clone().or_else(|| file.out.clone()),
            format: args.format.or(file.format).unwrap_or(OutputFormat::Csv),
            plan,
            cross_check: args.cross_check || file.cross_check.unwrap_or(false),
            threads,
        },
        file,
    ))
}

/// Runs the CLI on `args` (including the program name), writing normal
/// output to `stdout` and diagnostics to `stderr`. Returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let status = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = write!(stderr, "{}", e.render());
            return status;
        }
    };
    let outcome = match &cli.command {
        Command::Eval(a) => cmd_eval(a, stdout, stderr),
        Command::Search(a) => cmd_search(a, stdout),
        Command::EmitPlot(a) => cmd_emit_plot(a, stdout),
        Command::BesselTable(a) => cmd_bessel_table(a, stdout),
    };
    match outcome {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid("threads", e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

/// Sends `body` to the configured output file, or to stdout when none is set.
fn emit(cfg: &RunConfig, body: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => stdout.write_all(body).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn required(name: &'static str, flag: Option<f64>, file: Option<f64>) -> Result<f64> {
    flag.or(file)
        .ok_or_else(|| Error::invalid(name, "missing (pass the flag or set it in --config)"))
}

/// One bilinear compared against the tensor oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub oracle_value: f64,
    pub oracle_error: f64,
    pub discrepancy: f64,
    pub discrepancy_in_errors: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub params: ChshParams,
    pub plan: QuadPlan,
    pub result: ChshResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<Vec<CrossCheck>>,
}

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("quantity,value,std_error");
        if self.cross_check.is_some() {
            s.push_str(",oracle_value,oracle_error,discrepancy,discrepancy_in_errors");
        }
        s.push('\n');
        for (i, (name, e)) in BilinearSet::NAMES
            .iter()
            .zip(self.result.bilinears.to_array())
            .enumerate()
        {
            s.push_str(&format!("{name},{},{}", e.value, e.std_error));
            if let Some(cc) = &self.cross_check {
                let c = &cc[i];
                s.push_str(&format!(
                    ",{},{},{},{}",
                    c.oracle_value, c.oracle_error, c.discrepancy, c.discrepancy_in_errors
                ));
            }
            s.push('\n');
        }
        s.push_str(&format!(
            "correlator,{},{}\n",
            self.result.correlator, self.result.correlator_error
        ));
        s.push_str(&format!("classification,{},\n", self.result.classification));
        s
    }
}

fn cross_check(params: &ChshParams, result: &ChshResult, level: usize) -> Result<Vec<CrossCheck>> {
    let s = params.scenario()?;
    let kernel = HadamardKernel::new(s.mass);
    s.bilinear_pairs()
        .iter()
        .zip(result.bilinears.to_array())
        .zip(BilinearSet::NAMES)
        .map(|(((u, v), est), name): ((_, IntegralEstimate), &str)| {
            let (oracle_value, oracle_error) = tensor_oracle_with_error(u, v, &kernel, level)?;
            let discrepancy = est.value - oracle_value;
            let combined = est.std_error.hypot(oracle_error);
            Ok(CrossCheck {
                name: name.to_string(),
                oracle_value,
                oracle_error,
                discrepancy,
                discrepancy_in_errors: if combined > 0.0 {
                    discrepancy.abs() / combined
                } else {
                    0.0
                },
            })
        })
        .collect()
}

fn cmd_eval(args: &EvalArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let (cfg, file) = resolve_common(&args.common)?;
    let params = ChshParams {
        a: required("a", args.a, file.a)?,
        eta: required("eta", args.eta, file.eta)?,
        b: required("b", args.b, file.b)?,
        sigma: required("sigma", args.sigma, file.sigma)?,
        a_prime: required("a_prime", args.a_prime, file.a_prime)?,
        eta_prime: required("eta_prime", args.eta_prime, file.eta_prime)?,
        b_prime: required("b_prime", args.b_prime, file.b_prime)?,
        sigma_prime: required("sigma_prime", args.sigma_prime, file.sigma_prime)?,
        m: required("mass", args.mass, file.mass)?,
        r: required("r", args.r, file.r)?,
        r_prime: required("r_prime", args.r_prime, file.r_prime)?,
    };
    let scenario = params.scenario()?;
    let guard = match args.lambda_floor.or(file.lambda_floor) {
        None => KernelGuard::default(),
        Some(floor) if args.unchecked_guard => {
            if !(floor.is_finite() && floor > 0.0) {
                return Err(Error::invalid("lambda_floor", "must be positive"));
            }
            KernelGuard::new_unchecked(floor)
        }
        Some(floor) => KernelGuard::new(floor)?,
    };
    let level = args.oracle_level.or(file.oracle_level).unwrap_or(4);
    if cfg.cross_check && !(2..=8).contains(&level) {
        return Err(Error::invalid("oracle_level", "must lie in 2..=8"));
    }

    let plan = cfg.plan;
    let (result, checks) = with_threads(cfg.threads, || -> Result<_> {
        let result = chsh_correlator_guarded(&scenario, guard, &plan)?;
        let checks = if cfg.cross_check {
            Some(cross_check(&params, &result, level)?)
        } else {
            None
        };
        Ok((result, checks))
    })??;

    for (name, e) in BilinearSet::NAMES.iter().zip(result.bilinears.to_array()) {
        if e.relative_error() > plan.target_rel_error {
            log::warn!(
                "{name}: relative error {:.2e} above target {:.0e}",
                e.relative_error(),
                plan.target_rel_error
            );
        }
    }

    let report = EvalReport {
        params,
        plan,
        result,
        cross_check: checks,
    };
    let body = match cfg.format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => serde_json::to_string_pretty(&report)? + "\n",
    };
    emit(&cfg, body.as_bytes(), stdout)?;

    if result.classification == Classification::AboveTsirelson {
        let _ = writeln!(
            stderr,
            "correlator {} exceeds Tsirelson's bound: numerical fault",
            result.correlator
        );
        return Ok(EXIT_ABOVE_TSIRELSON);
    }
    Ok(EXIT_OK)
}

fn search_ranges(args: &SearchArgs, file: &FileConfig) -> Result<ParamRanges> {
    let mut ranges = ParamRanges::default();
    if let Some(map) = &file.ranges {
        for (name, [lo, hi]) in map {
            let slot = ranges
                .get_mut(name)
                .ok_or_else(|| Error::invalid("ranges", format!("unknown parameter {name:?}")))?;
            *slot = Interval::new(*lo, *hi)?;
        }
    }
    let flags = [
        ("a", args.range_a),
        ("eta", args.range_eta),
        ("b", args.range_b),
        ("sigma", args.range_sigma),
        ("a_prime", args.range_a_prime),
        ("eta_prime", args.range_eta_prime),
        ("b_prime", args.range_b_prime),
        ("sigma_prime", args.range_sigma_prime),
        ("m", args.range_mass),
        ("r", args.range_r),
        ("r_prime", args.range_r_prime),
    ];
    for (name, iv) in flags {
        if let Some(iv) = iv {
            *ranges.get_mut(name).expect("known parameter") = iv;
        }
    }
    ranges.validate()?;
    Ok(ranges)
}

/// Fixed-width table of records, one per line, parameters then `C`.
pub fn format_table(records: &[SearchRecord]) -> String {
    let mut s = format!(
        "{:>6} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>7} {:>8}  {}\n",
        "#", "a", "eta", "b", "sigma", "a'", "eta'", "b'", "sigma'", "m", "r", "r'", "<C>", "+/-", "class"
    );
    for rec in records {
        s.push_str(&format!("{:>6}", rec.sample_index));
        for v in rec.params.to_array() {
            s.push_str(&format!(" {v:>9.6}"));
        }
        s.push_str(&format!(
            " {:>7.3} {:>8.1e}  {}\n",
            rec.result.correlator, rec.result.correlator_error, rec.result.classification
        ));
    }
    s
}

fn cmd_search(args: &SearchArgs, stdout: &mut dyn Write) -> Result<i32> {
    let (cfg, file) = resolve_common(&args.common)?;
    let ranges = search_ranges(args, &file)?;
    let samples = args.samples.or(file.samples).unwrap_or(100_000);
    let top_k = args.top_k.or(file.top_k).unwrap_or(3);
    if top_k == 0 || top_k > samples {
        return Err(Error::invalid(
            "top_k",
            format!("need 1 <= top_k <= samples, got top_k = {top_k}, samples = {samples}"),
        ));
    }
    let out = cfg
        .out
        .clone()
        .ok_or_else(|| Error::invalid("out", "search needs --out for the record file"))?;
    let plan = cfg.plan;
    let seed = plan.seed;
    let records = with_threads(cfg.threads, || random_search(&ranges, samples, seed, &plan, top_k))??;
    persist_records(&records, &out)?;
    stdout
        .write_all(format_table(&records).as_bytes())
        .map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })?;
    let status = if records
        .iter()
        .any(|r| r.result.classification == Classification::AboveTsirelson)
    {
        EXIT_ABOVE_TSIRELSON
    } else {
        EXIT_OK
    };
    Ok(status)
}

/// `(t, x, value)` rows over an `(n + 1) × (n + 1)` grid spanning the support box.
pub fn plot_grid(f: &DiamondTestFunction, resolution: usize) -> Vec<(f64, f64, f64)> {
    let b = f.support_box();
    let n = resolution as f64;
    let mut rows = Vec::with_capacity((resolution + 1) * (resolution + 1));
    for i in 0..=resolution {
        let t = b.t_min + (b.t_max - b.t_min) * i as f64 / n;
        for j in 0..=resolution {
            let x = b.x_min + (b.x_max - b.x_min) * j as f64 / n;
            rows.push((t, x, f.evaluate(crate::kernels::SpacetimePoint::new(t, x))));
        }
    }
    rows
}

fn cmd_emit_plot(args: &PlotArgs, stdout: &mut dyn Write) -> Result<i32> {
    let (cfg, file) = resolve_common(&args.common)?;
    let side = match &args.side {
        Some(s) => s.parse()?,
        None => file.side.unwrap_or(DiamondSide::Right),
    };
    let f = DiamondTestFunction::new(
        side,
        args.radius.or(file.radius).unwrap_or(2.0),
        args.sharpness.or(file.sharpness).unwrap_or(0.1),
        args.amplitude.or(file.amplitude).unwrap_or(1.0),
    )?;
    let resolution = args.resolution.or(file.resolution).unwrap_or(100);
    if resolution == 0 {
        return Err(Error::invalid("resolution", "must be at least 1"));
    }
    let mut body = String::from("t,x,value\n");
    for (t, x, v) in plot_grid(&f, resolution) {
        body.push_str(&format!("{t},{x},{v}\n"));
    }
    emit(&cfg, body.as_bytes(), stdout)?;
    Ok(EXIT_OK)
}

/// Grid of `count` abscissae from `min` to `max`.
pub fn bessel_grid(min: f64, max: f64, count: usize, scale: GridScale) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite()) || min <= 0.0 {
        return Err(Error::invalid(
            "min",
            format!("Y0 and K0 are only defined for x > 0, grid starts at {min}"),
        ));
    }
    if max < min || count == 0 {
        return Err(Error::invalid("count", "need count >= 1 and max >= min"));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let steps = (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            let u = i as f64 / steps;
            if i == 0 {
                return min;
            }
            if i == count - 1 {
                return max;
            }
            match scale {
                GridScale::Linear => min + (max - min) * u,
                GridScale::Log => (min.ln() + (max.ln() - min.ln()) * u).exp(),
            }
        })
        .collect())
}

fn cmd_bessel_table(args: &BesselArgs, stdout: &mut dyn Write) -> Result<i32> {
    let (cfg, file) = resolve_common(&args.common)?;
    let min = args.min.or(file.min).unwrap_or(1e-3);
    let max = args.max.or(file.max).unwrap_or(min.max(100.0));
    let count = args.count.or(file.count).unwrap_or(if min == max { 1 } else { 100 });
    let scale = args.scale.or(file.scale).unwrap_or(GridScale::Log);
    let grid = bessel_grid(min, max, count, scale)?;
    let mut body = String::from("x,j0,y0,k0\n");
    for x in grid {
        body.push_str(&format!("{x},{},{},{}\n", bessel_j0(x)?, bessel_y0(x)?, bessel_k0(x)?));
    }
    emit(&cfg, body.as_bytes(), stdout)?;
    Ok(EXIT_OK)
}
