//! Command-line front end: dataset ingestion, rank tests across lag orders,
//! quantile-table generation, and the Monte Carlo experiment drivers.
//!
//! Every subcommand writes its artifacts under `--out-dir` together with a
//! `<command>-manifest.json` echoing the full invocation and seed. Summaries
//! are JSON; `--format csv` additionally writes per-replication tables as
//! CSV files. Exit codes: 0 success, 2 validation/input error, 3
//! numeric-domain error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hdcoint::asymptotics::{test_constants, wachter_params, wachter_pdf, WachterParams};
use hdcoint::ensembles::{
    airy_sum_quantiles, projector_model_spectrum, sample_jacobi_spectrum, AiryQuantileTable,
    JacobiParams, ProjectorModelSpec,
};
use hdcoint::experiments::{
    airy1_reference, null_density_experiment, order_sweep, power_experiment, prop5_check,
    size_experiment, Airy1Reference, ExperimentResult, NumericTable, PowerScenario, SweepInput,
};
use hdcoint::inference::modified_lr_report;
use hdcoint::io::{
    ingest, read_airy_sums_csv, read_airy_sums_reader, read_json, read_quantile_table_csv,
    read_quantile_table_reader, write_airy_sums_csv, write_json, write_panel_csv,
    write_quantile_table_csv, DatasetConfig, SimulateConfig, Transform,
};
use hdcoint::model::simulate;
use hdcoint::seed::derive;
use hdcoint::spectra::modified_spectrum;
use hdcoint::stats::{histogram, ks_distance_two_sample};
use hdcoint::{Error, Result};

/// Default quantile table (regenerate with `make-assets`).
const DEFAULT_TABLE_CSV: &str = include_str!("../../assets/airy-quantiles-default.csv");
/// Raw partial sums behind the default table, for Monte Carlo p-values.
const DEFAULT_SUMS_CSV: &str = include_str!("../../assets/airy-sums-default.csv");
/// Default reference sample of the rescaled largest-eigenvalue limit law.
const DEFAULT_REFERENCE_JSON: &str = include_str!("../../assets/airy1-reference-default.json");

#[derive(Parser)]
#[command(
    name = "hdcoint",
    version,
    about = "Cointegration tests for high-dimensional VAR(k) panels: simulation, \
             canonical-correlation spectra, random-matrix critical values, and \
             Monte Carlo experiment drivers"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Master seed; all stochastic output derives from it deterministically.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores). Changes runtime only, never
    /// numbers.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for output artifacts (created if absent).
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// `json` writes JSON summaries only; `csv` also writes
    /// per-replication tables as CSV files.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl FormatArg {
    fn as_str(self) -> &'static str {
        match self {
            FormatArg::Json => "json",
            FormatArg::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransformArg {
    None,
    Log,
}

impl From<TransformArg> for Transform {
    fn from(t: TransformArg) -> Transform {
        match t {
            TransformArg::None => Transform::None,
            TransformArg::Log => Transform::Log,
        }
    }
}

/// Flags shared by every subcommand that reads a panel CSV.
#[derive(Args)]
struct IngestFlags {
    /// The file has no header row of series names.
    #[arg(long)]
    no_header: bool,
    /// 0-based index of a date/label column (ignored for computation,
    /// echoed in provenance).
    #[arg(long)]
    date_column: Option<usize>,
    /// Cell transform applied on ingestion.
    #[arg(long, value_enum, default_value_t = TransformArg::None)]
    transform: TransformArg,
    /// Free-text sampling-frequency note echoed into provenance.
    #[arg(long)]
    frequency_note: Option<String>,
}

impl IngestFlags {
    fn config(&self, path: &Path) -> DatasetConfig {
        DatasetConfig {
            path: path.to_path_buf(),
            has_header: !self.no_header,
            date_column: self.date_column,
            transform: self.transform.into(),
            frequency_note: self.frequency_note.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a VAR(k) panel from a JSON config and write it as CSV.
    Simulate {
        /// Simulation config (JSON; see `SimulateConfig` docs for the shape).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (default `<out-dir>/panel-seed<seed>.csv`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the rank tests on a panel CSV for each requested lag order.
    Test {
        /// Input panel CSV.
        data: PathBuf,
        #[command(flatten)]
        ingest: IngestFlags,
        /// Lag orders to test, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        k: Vec<usize>,
        /// Ranks r to test (null: rank <= r against rank > r).
        #[arg(long, value_delimiter = ',', default_value = "1")]
        r: Vec<usize>,
        /// Test level.
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        /// Quantile table CSV (default: the embedded generated table).
        #[arg(long)]
        table: Option<PathBuf>,
        /// Raw partial-sum sidecar CSV enabling Monte Carlo p-values.
        #[arg(long)]
        sums: Option<PathBuf>,
    },
    /// Generate a critical-value table for sums of the top rescaled
    /// eigenvalue limits.
    Quantiles {
        /// Largest number of summed eigenvalues.
        #[arg(long, default_value_t = 3)]
        r: usize,
        /// Quantile levels.
        #[arg(long, value_delimiter = ',', default_value = "0.9,0.95,0.975,0.99")]
        alphas: Vec<f64>,
        /// Tridiagonal matrix dimension per draw.
        #[arg(long, default_value_t = 10_000)]
        dim: usize,
        /// Monte Carlo replications.
        #[arg(long, default_value_t = 20_000)]
        reps: usize,
    },
    /// Empirical size of the rank-0 test on pure random walks.
    McSize {
        /// Panel dimension N.
        #[arg(long)]
        n: usize,
        /// Sample length T.
        #[arg(long)]
        t: usize,
        /// Lag orders fitted to each simulated panel.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        k: Vec<usize>,
        /// Test level.
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        /// Replications.
        #[arg(long, default_value_t = 1_000)]
        reps: usize,
        /// Quantile table CSV (default: the embedded generated table).
        #[arg(long)]
        table: Option<PathBuf>,
        /// Raw partial-sum sidecar CSV.
        #[arg(long)]
        sums: Option<PathBuf>,
    },
    /// Distribution of the rescaled statistic under a configured null DGP,
    /// compared against the stored limit-law reference sample.
    McDensity {
        /// Simulation config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Lag order fitted by the test.
        #[arg(long)]
        k_test: usize,
        /// Replications.
        #[arg(long, default_value_t = 2_000)]
        reps: usize,
        /// Reference sample JSON (default: the embedded generated sample).
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Eigenvalue spectra across candidate lag orders, counting outliers
    /// above the bulk edge at each order.
    OrderSweep {
        /// Simulation config (JSON); exactly one of --config/--data.
        #[arg(long, conflicts_with = "data")]
        config: Option<PathBuf>,
        /// Observed panel CSV; exactly one of --config/--data.
        #[arg(long)]
        data: Option<PathBuf>,
        #[command(flatten)]
        ingest: IngestFlags,
        /// Lag orders to sweep, comma-separated.
        #[arg(long, value_delimiter = ',')]
        k_range: Vec<usize>,
        /// Outlier margin above the bulk edge.
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
    },
    /// Rejection rate and outlier frequency under a configured alternative.
    Power {
        /// Simulation config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Replications.
        #[arg(long, default_value_t = 500)]
        reps: usize,
        /// Test level.
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        /// Outlier margin above the bulk edge.
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
        /// Quantile table CSV (default: the embedded generated table).
        #[arg(long)]
        table: Option<PathBuf>,
        /// Raw partial-sum sidecar CSV.
        #[arg(long)]
        sums: Option<PathBuf>,
    },
    /// Compare the projector-model largest eigenvalue against its
    /// matrix-Beta (Jacobi) law by two-sample KS distance.
    ProjectorCheck {
        /// Number of rotated subspace copies removed (lag-order analogue).
        #[arg(long)]
        k: usize,
        /// Distinguished subspace dimension N.
        #[arg(long)]
        n: usize,
        /// Ambient dimension (>= (k+1) N).
        #[arg(long)]
        t: usize,
        /// Replications per law.
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
    },
    /// Per-path check of the stationary rank-one alternative: squared
    /// correlation vs its closed form, and the variational bound on the
    /// largest canonical eigenvalue.
    Prop5Check {
        /// AR coefficient of the stationary coordinate (|beta| < 1).
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        /// Innovation variance of the stationary coordinate.
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        /// Panel dimension N.
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Sample length T.
        #[arg(long, default_value_t = 20_000)]
        t: usize,
        /// Replications (independent paths).
        #[arg(long, default_value_t = 500)]
        reps: usize,
    },
    /// Regenerate the embedded default artifacts (quantile table, sum
    /// sidecar, limit-law reference) with full provenance.
    #[command(hide = true)]
    MakeAssets {
        /// Tridiagonal dimension for the quantile table.
        #[arg(long, default_value_t = 10_000)]
        dim: usize,
        /// Replications for the quantile table.
        #[arg(long, default_value_t = 20_000)]
        reps: usize,
        /// Largest number of summed eigenvalues in the table.
        #[arg(long, default_value_t = 3)]
        r: usize,
        /// Seed for the quantile table.
        #[arg(long, default_value_t = 424_242)]
        table_seed: u64,
        /// Draw count for the limit-law reference sample.
        #[arg(long, default_value_t = 50_000)]
        ref_count: usize,
        /// Tridiagonal dimension for the reference sample.
        #[arg(long, default_value_t = 100_000)]
        ref_dim: usize,
        /// Seed for the reference sample.
        #[arg(long, default_value_t = 77)]
        ref_seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        // Ignore the error when a pool already exists (repeat calls in-process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    fs::create_dir_all(&g.out_dir)?;
    match &cli.command {
        Command::Simulate { config, out } => run_simulate(g, config, out.as_deref()),
        Command::Test { data, ingest, k, r, alpha, table, sums } => {
            run_test(g, data, ingest, k, r, *alpha, table.as_deref(), sums.as_deref())
        }
        Command::Quantiles { r, alphas, dim, reps } => run_quantiles(g, *r, alphas, *dim, *reps),
        Command::McSize { n, t, k, alpha, reps, table, sums } => {
            run_mc_size(g, *n, *t, k, *alpha, *reps, table.as_deref(), sums.as_deref())
        }
        Command::McDensity { config, k_test, reps, reference } => {
            run_mc_density(g, config, *k_test, *reps, reference.as_deref())
        }
        Command::OrderSweep { config, data, ingest, k_range, threshold } => {
            run_order_sweep(g, config.as_deref(), data.as_deref(), ingest, k_range, *threshold)
        }
        Command::Power { config, reps, alpha, threshold, table, sums } => {
            run_power(g, config, *reps, *alpha, *threshold, table.as_deref(), sums.as_deref())
        }
        Command::ProjectorCheck { k, n, t, reps } => run_projector_check(g, *k, *n, *t, *reps),
        Command::Prop5Check { beta, sigma2, n, t, reps } => {
            run_prop5_check(g, *beta, *sigma2, *n, *t, *reps)
        }
        Command::MakeAssets { dim, reps, r, table_seed, ref_count, ref_dim, ref_seed } => {
            run_make_assets(g, *dim, *reps, *r, *table_seed, *ref_count, *ref_dim, *ref_seed)
        }
    }
}

/// Load the quantile table, defaulting to the embedded artifact. Raw sums
/// are attached when available (embedded defaults, or `--sums`), enabling
/// Monte Carlo p-values; a user table without a sidecar yields `null`
/// p-values.
fn load_table(table: Option<&Path>, sums: Option<&Path>) -> Result<AiryQuantileTable> {
    let mut t = match table {
        Some(p) => read_quantile_table_csv(p)?,
        None => read_quantile_table_reader(DEFAULT_TABLE_CSV.as_bytes())?,
    };
    let raw = match (sums, table) {
        (Some(p), _) => Some(read_airy_sums_csv(p)?),
        (None, None) => Some(read_airy_sums_reader(DEFAULT_SUMS_CSV.as_bytes())?),
        (None, Some(_)) => None,
    };
    if let Some(raw) = raw {
        t.attach_samples(raw)?;
    }
    Ok(t)
}

fn load_reference(reference: Option<&Path>) -> Result<Airy1Reference> {
    match reference {
        Some(p) => read_json(p),
        None => Ok(serde_json::from_str(DEFAULT_REFERENCE_JSON)?),
    }
}

/// Write `<command>-manifest.json`: full parameter echo, seed, and the list
/// of artifacts the run produced.
fn write_manifest(
    g: &GlobalArgs,
    command: &str,
    params: Value,
    outputs: &[PathBuf],
) -> Result<()> {
    let manifest = json!({
        "command": command,
        "argv": std::env::args().collect::<Vec<_>>(),
        "seed": g.seed,
        "threads": g.threads,
        "format": g.format.as_str(),
        "out_dir": g.out_dir,
        "params": params,
        "outputs": outputs,
    });
    write_json(&manifest, &g.out_dir.join(format!("{command}-manifest.json")))
}

/// Non-finite floats have no JSON number representation; map them to null.
fn json_f64(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn write_numeric_table(table: &NumericTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Write an experiment result as `<id>-seed<seed>.json`, plus one CSV per
/// attached table under `--format csv`.
fn write_experiment(g: &GlobalArgs, res: &ExperimentResult) -> Result<Vec<PathBuf>> {
    let stem = format!("{}-seed{}", res.experiment, res.seed);
    let json_path = g.out_dir.join(format!("{stem}.json"));
    write_json(res, &json_path)?;
    let mut outputs = vec![json_path];
    if g.format == FormatArg::Csv {
        for table in &res.tables {
            let path = g.out_dir.join(format!("{stem}-{}.csv", table.name));
            write_numeric_table(table, &path)?;
            outputs.push(path);
        }
    }
    Ok(outputs)
}

fn run_simulate(g: &GlobalArgs, config: &Path, out: Option<&Path>) -> Result<()> {
    let cfg: SimulateConfig = read_json(config)?;
    let spec = cfg.to_var_spec()?;
    let panel = simulate(&spec, g.seed)?;
    let out = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| g.out_dir.join(format!("panel-seed{}.csv", g.seed)));
    write_panel_csv(&panel, &out)?;
    println!(
        "wrote {} ({} series x {} rows, k = {})",
        out.display(),
        panel.n(),
        panel.t_len() + 1,
        spec.k
    );
    write_manifest(g, "simulate", json!({ "config": config, "spec": cfg }), &[out])
}

#[allow(clippy::too_many_arguments)]
fn run_test(
    g: &GlobalArgs,
    data: &Path,
    ingest_flags: &IngestFlags,
    k_list: &[usize],
    r_list: &[usize],
    alpha: f64,
    table: Option<&Path>,
    sums: Option<&Path>,
) -> Result<()> {
    let table = load_table(table, sums)?;
    let dcfg = ingest_flags.config(data);
    let panel = ingest(&dcfg)?;
    let (n, t) = (panel.n(), panel.t_len());
    let mut outputs = Vec::new();

    for &k in k_list {
        let spectrum = modified_spectrum(&panel, k)?;
        let consts = test_constants(n, t, k)?;
        let w = wachter_params(2.0, t as f64 / n as f64 - k as f64)?;

        let hist_path = g.out_dir.join(format!("test-k{k}-spectrum-hist.csv"));
        write_spectrum_histogram(&spectrum.values, &w, &hist_path)?;
        outputs.push(hist_path);

        for &r in r_list {
            let report = modified_lr_report(&spectrum, r, alpha, &table)?;
            let rescaled = report.centered_rescaled.unwrap_or(f64::NAN);
            let doc = json!({
                "spectrum": spectrum.values,
                "statistic": {
                    "kind": report.statistic_kind,
                    "r": r,
                    "value": json_f64(report.raw),
                    "degenerate": report.degenerate,
                },
                "rescaled": json_f64(rescaled),
                "decision": report.decision,
                "p_value": match report.p_value_mc {
                    Some(p) => json!({ "value": p, "stderr": report.p_value_stderr }),
                    None => Value::Null,
                },
                "constants": {
                    "c1": consts.c1,
                    "c2": consts.c2,
                    "lambda_plus": w.lambda_plus,
                    "lambda_minus": w.lambda_minus,
                },
                "provenance": {
                    "n": n, "t": t, "k": k, "r": r, "alpha": alpha,
                    "procedure": "modified",
                    "quantile_used": report.quantile_used,
                    "table_id": report.provenance.table_id,
                    "data": dcfg.path,
                    "has_header": dcfg.has_header,
                    "date_column": dcfg.date_column,
                    "transform": dcfg.transform.to_string(),
                    "frequency_note": dcfg.frequency_note,
                },
            });
            let path = g.out_dir.join(format!("test-k{k}-r{r}.json"));
            write_json(&doc, &path)?;
            outputs.push(path);
            println!(
                "k={k} r={r} raw={:.6} rescaled={rescaled:.4} quantile={:.4} -> {}",
                report.raw,
                report.quantile_used,
                match report.p_value_mc {
                    Some(p) => format!("{} (MC p = {p:.4})", report.decision),
                    None => report.decision.to_string(),
                }
            );
        }
    }
    write_manifest(
        g,
        "test",
        json!({
            "data": data, "k_list": k_list, "r_list": r_list, "alpha": alpha,
            "has_header": dcfg.has_header, "date_column": dcfg.date_column,
            "transform": dcfg.transform.to_string(),
            "frequency_note": dcfg.frequency_note,
            "table_id": table.table_id(),
        }),
        &outputs,
    )
}

/// Histogram of a spectrum on `[0, 1]` with the limiting bulk density
/// evaluated at bin midpoints, for overlay plotting.
fn write_spectrum_histogram(values: &[f64], w: &WachterParams, path: &Path) -> Result<()> {
    let (edges, counts) = histogram(values, 0.0, 1.0, 40);
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(["bin_left", "bin_right", "count", "limit_pdf"])?;
    for (i, count) in counts.iter().enumerate() {
        let mid = 0.5 * (edges[i] + edges[i + 1]);
        wtr.write_record([
            edges[i].to_string(),
            edges[i + 1].to_string(),
            count.to_string(),
            wachter_pdf(mid, w).to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

fn run_quantiles(g: &GlobalArgs, r: usize, alphas: &[f64], dim: usize, reps: usize) -> Result<()> {
    let table = airy_sum_quantiles(r, alphas, dim, reps, g.seed)?;
    let stem = format!("airy-quantiles-dim{dim}-reps{reps}-seed{}", g.seed);
    let csv_path = g.out_dir.join(format!("{stem}.csv"));
    let json_path = g.out_dir.join(format!("{stem}.json"));
    let sums_path = g.out_dir.join(format!("airy-sums-dim{dim}-reps{reps}-seed{}.csv", g.seed));
    write_quantile_table_csv(&table, &csv_path)?;
    write_json(&table, &json_path)?;
    write_airy_sums_csv(&table, &sums_path)?;
    for cell in &table.cells {
        println!(
            "r={} alpha={:.3} quantile={:+.4} (se {:.4})",
            cell.r, cell.alpha, cell.quantile, cell.stderr
        );
    }
    write_manifest(
        g,
        "quantiles",
        json!({ "r": r, "alphas": alphas, "dim": dim, "reps": reps }),
        &[csv_path, json_path, sums_path],
    )
}

#[allow(clippy::too_many_arguments)]
fn run_mc_size(
    g: &GlobalArgs,
    n: usize,
    t: usize,
    k_list: &[usize],
    alpha: f64,
    reps: usize,
    table: Option<&Path>,
    sums: Option<&Path>,
) -> Result<()> {
    let table = load_table(table, sums)?;
    let res = size_experiment(n, t, k_list, alpha, reps, g.seed, &table)?;
    if let hdcoint::experiments::ExperimentSummary::Size { rates } = &res.summary {
        for rate in rates {
            println!(
                "k={} rejections={}/{} rate={:.4} (se {:.4})",
                rate.k, rate.rejections, rate.reps, rate.rate, rate.stderr
            );
        }
    }
    let outputs = write_experiment(g, &res)?;
    write_manifest(
        g,
        "mc-size",
        json!({ "n": n, "t": t, "k_list": k_list, "alpha": alpha, "reps": reps,
                "table_id": table.table_id() }),
        &outputs,
    )
}

fn run_mc_density(
    g: &GlobalArgs,
    config: &Path,
    k_test: usize,
    reps: usize,
    reference: Option<&Path>,
) -> Result<()> {
    let reference = load_reference(reference)?;
    let cfg: SimulateConfig = read_json(config)?;
    let spec = cfg.to_var_spec()?;
    let res = null_density_experiment(&spec, k_test, reps, g.seed, &reference)?;
    if let hdcoint::experiments::ExperimentSummary::NullDensity { ks_distance, .. } = &res.summary
    {
        println!(
            "KS distance to {} over {reps} reps: {ks_distance:.4}",
            reference.reference_id()
        );
    }
    let outputs = write_experiment(g, &res)?;
    write_manifest(
        g,
        "mc-density",
        json!({ "config": config, "spec": cfg, "k_test": k_test, "reps": reps,
                "reference_id": reference.reference_id() }),
        &outputs,
    )
}

fn run_order_sweep(
    g: &GlobalArgs,
    config: Option<&Path>,
    data: Option<&Path>,
    ingest_flags: &IngestFlags,
    k_range: &[usize],
    threshold: f64,
) -> Result<()> {
    let (res, source) = match (config, data) {
        (Some(c), None) => {
            let cfg: SimulateConfig = read_json(c)?;
            let spec = cfg.to_var_spec()?;
            let res = order_sweep(SweepInput::Dgp { spec: &spec, seed: g.seed }, k_range, threshold)?;
            (res, json!({ "config": c, "spec": cfg }))
        }
        (None, Some(d)) => {
            let dcfg = ingest_flags.config(d);
            let panel = ingest(&dcfg)?;
            let res = order_sweep(SweepInput::Panel(&panel), k_range, threshold)?;
            (res, json!({ "data": d, "has_header": dcfg.has_header,
                          "date_column": dcfg.date_column,
                          "transform": dcfg.transform.to_string() }))
        }
        _ => {
            return Err(Error::InvalidParam(
                "pass exactly one of --config (simulate) or --data (observed panel)".into(),
            ))
        }
    };
    if let hdcoint::experiments::ExperimentSummary::OrderSweep { per_order, transition_order } =
        &res.summary
    {
        for oc in per_order {
            println!(
                "k'={} edge={:.4} outliers={}",
                oc.k_prime, oc.lambda_plus, oc.outliers
            );
        }
        match transition_order {
            Some(k) => println!("outliers vanish from k' = {k}"),
            None => println!("no clean outlier transition in the swept range"),
        }
    }
    let outputs = write_experiment(g, &res)?;
    write_manifest(
        g,
        "order-sweep",
        json!({ "source": source, "k_range": k_range, "threshold": threshold }),
        &outputs,
    )
}

#[allow(clippy::too_many_arguments)]
fn run_power(
    g: &GlobalArgs,
    config: &Path,
    reps: usize,
    alpha: f64,
    threshold: f64,
    table: Option<&Path>,
    sums: Option<&Path>,
) -> Result<()> {
    let table = load_table(table, sums)?;
    let cfg: SimulateConfig = read_json(config)?;
    let spec = cfg.to_var_spec()?;
    let res = power_experiment(&spec, reps, g.seed, alpha, &table, threshold)?;
    if let hdcoint::experiments::ExperimentSummary::Power {
        rejection_rate,
        rejection_stderr,
        outlier_fraction,
        mean_top_eigenvalue,
        lambda_plus,
        ..
    } = &res.summary
    {
        println!(
            "rejection rate {rejection_rate:.4} (se {rejection_stderr:.4}); \
             outlier fraction {outlier_fraction:.4}; \
             mean top eigenvalue {mean_top_eigenvalue:.4} vs edge {lambda_plus:.4}"
        );
    }
    let outputs = write_experiment(g, &res)?;
    write_manifest(
        g,
        "power",
        json!({ "config": config, "spec": cfg, "reps": reps, "alpha": alpha,
                "threshold": threshold, "table_id": table.table_id() }),
        &outputs,
    )
}

fn run_projector_check(g: &GlobalArgs, k: usize, n: usize, t: usize, reps: usize) -> Result<()> {
    if reps == 0 {
        return Err(Error::InvalidParam("need at least one replication".into()));
    }
    // Exact finite-size law of the projector model's nonzero eigenvalues:
    // matrix Beta with p = N/2 and q = (T - (k+1)N + 1)/2.
    let jp = JacobiParams {
        n,
        p: n as f64 / 2.0,
        q: (t as f64 - ((k + 1) * n) as f64 + 1.0) / 2.0,
    };
    use rayon::prelude::*;
    let pairs: Vec<(f64, f64)> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let spec = ProjectorModelSpec { k, n, t_amb: t, seed: derive(g.seed, 2 * i) };
            let proj = projector_model_spectrum(&spec)?;
            let jac = sample_jacobi_spectrum(&jp, derive(g.seed, 2 * i + 1))?;
            Ok((proj.values[0], jac[0]))
        })
        .collect::<Result<_>>()?;
    let proj: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let jac: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let ks = ks_distance_two_sample(&proj, &jac);

    println!(
        "projector (k={k}, N={n}, T={t}) vs Jacobi(N={n}, p={}, q={}): \
         KS distance {ks:.4} over {reps} reps per law",
        jp.p, jp.q
    );
    let doc = json!({
        "experiment": "projector-check",
        "k": k, "n": n, "t_ambient": t, "reps": reps, "seed": g.seed,
        "jacobi": { "n": jp.n, "p": jp.p, "q": jp.q },
        "ks_distance": ks,
    });
    let json_path = g.out_dir.join(format!("projector-check-seed{}.json", g.seed));
    write_json(&doc, &json_path)?;
    let mut outputs = vec![json_path];
    if g.format == FormatArg::Csv {
        let table = NumericTable::new(
            "samples",
            &["projector_lambda1", "jacobi_lambda1"],
            pairs.iter().map(|&(a, b)| vec![a, b]).collect(),
        );
        let path = g.out_dir.join(format!("projector-check-seed{}-samples.csv", g.seed));
        write_numeric_table(&table, &path)?;
        outputs.push(path);
    }
    write_manifest(
        g,
        "projector-check",
        json!({ "k": k, "n": n, "t_ambient": t, "reps": reps,
                "jacobi": { "p": jp.p, "q": jp.q } }),
        &outputs,
    )
}

fn run_prop5_check(
    g: &GlobalArgs,
    beta: f64,
    sigma2: f64,
    n: usize,
    t: usize,
    reps: usize,
) -> Result<()> {
    let sc = PowerScenario { beta, sigma2, n, t, seed: g.seed };
    let res = prop5_check(&sc, reps)?;
    if let hdcoint::experiments::ExperimentSummary::PowerBound {
        within_tol_fraction,
        tol,
        worst_abs_error,
        bound_violations,
        min_bound_slack,
    } = &res.summary
    {
        println!(
            "|corr^2 - formula| <= {tol} on {:.1}% of {reps} paths \
             (worst {worst_abs_error:.4}); variational bound violations: {bound_violations} \
             (min slack {min_bound_slack:.2e})",
            within_tol_fraction * 100.0
        );
    }
    let outputs = write_experiment(g, &res)?;
    write_manifest(
        g,
        "prop5-check",
        json!({ "beta": beta, "sigma2": sigma2, "n": n, "t": t, "reps": reps }),
        &outputs,
    )
}

#[allow(clippy::too_many_arguments)]
fn run_make_assets(
    g: &GlobalArgs,
    dim: usize,
    reps: usize,
    r: usize,
    table_seed: u64,
    ref_count: usize,
    ref_dim: usize,
    ref_seed: u64,
) -> Result<()> {
    let alphas = [0.90, 0.95, 0.975, 0.99];

    let start = std::time::Instant::now();
    let table = airy_sum_quantiles(r, &alphas, dim, reps, table_seed)?;
    let table_elapsed = start.elapsed().as_secs_f64();
    let table_csv = g.out_dir.join("airy-quantiles-default.csv");
    let sums_csv = g.out_dir.join("airy-sums-default.csv");
    write_quantile_table_csv(&table, &table_csv)?;
    write_airy_sums_csv(&table, &sums_csv)?;
    println!("quantile table {} in {table_elapsed:.1}s", table.table_id());

    let start = std::time::Instant::now();
    let reference = airy1_reference(ref_count, ref_dim, ref_seed)?;
    let ref_elapsed = start.elapsed().as_secs_f64();
    let ref_json = g.out_dir.join("airy1-reference-default.json");
    write_json(&reference, &ref_json)?;
    println!("reference sample {} in {ref_elapsed:.1}s", reference.reference_id());

    let manifest_path = g.out_dir.join("assets-provenance.json");
    write_json(
        &json!({
            "table": { "id": table.table_id(), "r_max": r, "alphas": alphas,
                        "dim": dim, "reps": reps, "seed": table_seed,
                        "elapsed_seconds": table_elapsed },
            "reference": { "id": reference.reference_id(), "count": ref_count,
                            "dim": ref_dim, "seed": ref_seed,
                            "elapsed_seconds": ref_elapsed },
        }),
        &manifest_path,
    )?;
    write_manifest(
        g,
        "make-assets",
        json!({ "dim": dim, "reps": reps, "r": r, "table_seed": table_seed,
                "ref_count": ref_count, "ref_dim": ref_dim, "ref_seed": ref_seed }),
        &[table_csv, sums_csv, ref_json, manifest_path],
    )
}
