//! The `sfvg` command line: scans, risk series, networks, synthetic data and
//! single-segment graph dumps.
//!
//! Exit codes: 0 success, 1 data error, 2 usage or parameter error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::infotheory::{sf_index, weight_pdf, DEFAULT_BINS};
use crate::ingest::{
    align_to_calendar, compute_returns, dataset_files, load_price_file, write_price_csv, ReturnMode, ReturnSeries,
};
use crate::netcorr::{check_threshold, correlation_matrix, threshold_network, Curve, NetError, Support};
use crate::synth::{market_ids, synth_prices, Scenario, MIN_LENGTH};
use crate::visibility::{build_vg_fast, WeightMode};
use crate::windows::{
    flag_crises, sf_risk_series, sliding_sf, BinRange, RiskParams, RiskSeries, ScanParams, SfSeries, WindowError,
    DEFAULT_LEVEL, DEFAULT_MIN_RUN, DEFAULT_RISK_WINDOW, DEFAULT_STEP, DEFAULT_WINDOW, MIN_WINDOW,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Data(_) => 1,
            Self::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Data(m) => m,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "sfvg", version, about = "Visibility-graph SF index, SF_R risk curves and market networks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sliding-window SF scan of every market in a dataset directory
    Sf(SfArgs),
    /// Daily SF_R risk series and flagged crisis periods
    Risk(RiskArgs),
    /// Correlation threshold networks from a directory of risk or SF curves
    Network(NetworkArgs),
    /// Write seeded synthetic price files
    Synth(SynthArgs),
    /// Dump the visibility graph of one segment of a price file
    Graph(GraphArgs),
}

#[derive(Debug, Args)]
struct Analysis {
    /// Histogram bins for the weight distribution
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    /// Return definition: log or simple
    #[arg(long, default_value_t = ReturnMode::Log)]
    returns: ReturnMode,
    /// Edge weights: signed or absolute amplitude differences
    #[arg(long, default_value_t = WeightMode::Signed)]
    weights: WeightMode,
    /// Histogram range: the whole-series weight range or each window's own
    #[arg(long, default_value_t = BinRange::Series)]
    bin_range: BinRange,
    /// Worker threads (0 = one per core)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct SfArgs {
    /// Directory of `date,close` CSV files
    data: PathBuf,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: usize,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: usize,
    #[command(flatten)]
    analysis: Analysis,
    /// Output directory
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RiskArgs {
    /// Directory of `date,close` CSV files
    data: PathBuf,
    /// Trailing window in business days
    #[arg(long, default_value_t = DEFAULT_RISK_WINDOW)]
    window: usize,
    /// SF_R level a crisis must exceed
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: f64,
    /// Minimum number of consecutive days above the level
    #[arg(long, default_value_t = DEFAULT_MIN_RUN)]
    min_run: usize,
    #[command(flatten)]
    analysis: Analysis,
    /// Output directory
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    /// `<market>.sfr.csv` files written by `risk`
    Sfr,
    /// `<market>.sf.csv` files written by `sf`
    Sf,
}

#[derive(Debug, Args)]
struct NetworkArgs {
    /// Directory holding the curves
    input: PathBuf,
    /// Comma-separated correlation thresholds in [-1, 1]
    #[arg(long, value_delimiter = ',', default_value = "0.8,0.9", allow_negative_numbers = true)]
    thresholds: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Source::Sfr)]
    source: Source,
    /// Dates to correlate over: common to all markets, or per pair
    #[arg(long, default_value_t = Support::Common)]
    support: Support,
    /// Output directory
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value = "burst")]
    scenario: Scenario,
    /// Number of prices per market
    #[arg(long, default_value_t = 2016)]
    length: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of markets sharing a common factor
    #[arg(long, default_value_t = 1)]
    markets: usize,
    /// Output directory
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Dot,
    Csv,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// A `date,close` CSV file
    file: PathBuf,
    /// First return index of the segment
    #[arg(long, default_value_t = 0)]
    start: usize,
    /// Segment length; defaults to the rest of the series
    #[arg(long)]
    len: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = ReturnMode::Log)]
    returns: ReturnMode,
    #[arg(long, default_value_t = WeightMode::Signed)]
    weights: WeightMode,
    #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
    format: GraphFormat,
    /// Output file; standard output when omitted
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sf(a) => cmd_sf(&a),
        Command::Risk(a) => cmd_risk(&a),
        Command::Network(a) => cmd_network(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Graph(a) => cmd_graph(&a),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn data(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}

fn check_window(window: usize) -> CliResult<()> {
    if window < MIN_WINDOW {
        return Err(usage(format!("invalid --window {window}: must be at least {MIN_WINDOW}")));
    }
    Ok(())
}

fn check_analysis(a: &Analysis) -> CliResult<()> {
    if a.bins < 2 {
        return Err(usage(format!("invalid --bins {}: must be at least 2", a.bins)));
    }
    Ok(())
}

fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| data(format!("thread pool: {e}")))
}

fn create_out_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| data(format!("{}: {e}", dir.display())))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> CliResult<()> {
    let wrap = |e: io::Error| data(format!("{}: {e}", path.display()));
    let mut out = BufWriter::new(File::create(path).map_err(wrap)?);
    body(&mut out).map_err(wrap)?;
    out.flush().map_err(wrap)
}

/// Loads, calendar-aligns and differences every price file in `dir`.
fn load_returns(dir: &Path, mode: ReturnMode) -> CliResult<Vec<ReturnSeries>> {
    if !dir.is_dir() {
        return Err(data(format!("{}: not a directory", dir.display())));
    }
    let files = dataset_files(dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
    if files.is_empty() {
        return Err(data(format!("no input files in {}", dir.display())));
    }
    files
        .par_iter()
        .map(|path| {
            let prices = load_price_file(path).map_err(|e| data(e.to_string()))?;
            let aligned = align_to_calendar(&prices).map_err(|e| data(format!("{}: {e}", path.display())))?;
            compute_returns(&aligned, mode).map_err(|e| data(format!("{}: {e}", path.display())))
        })
        .collect()
}

/// Keeps successful markets; a failed market is reported and skipped.
fn keep_ok<T>(results: Vec<(String, Result<T, WindowError>)>) -> CliResult<Vec<T>> {
    let mut kept = Vec::new();
    for (market, r) in results {
        match r {
            Ok(v) => kept.push(v),
            Err(e) => eprintln!("warning: skipping {market}: {e}"),
        }
    }
    if kept.is_empty() {
        return Err(data("no market could be processed"));
    }
    Ok(kept)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn cmd_sf(a: &SfArgs) -> CliResult<()> {
    check_window(a.window)?;
    if a.step < 1 {
        return Err(usage("invalid --step 0: must be at least 1"));
    }
    check_analysis(&a.analysis)?;
    let params = ScanParams {
        window: a.window,
        step: a.step,
        bins: a.analysis.bins,
        weights: a.analysis.weights,
        range: a.analysis.bin_range,
    };
    let series = pool(a.analysis.jobs)?.install(|| -> CliResult<Vec<SfSeries>> {
        let returns = load_returns(&a.data, a.analysis.returns)?;
        let results = returns.par_iter().map(|r| (r.market_id().to_string(), sliding_sf(r, &params))).collect();
        keep_ok(results)
    })?;

    create_out_dir(&a.out)?;
    for s in &series {
        write_file(&a.out.join(format!("{}.sf.csv", s.market_id)), |w| s.write_csv(w))?;
    }
    write_file(&a.out.join("all.sf.csv"), |w| {
        writeln!(w, "market,window_end,sf")?;
        for s in &series {
            for (date, p) in &s.points {
                writeln!(w, "{},{date},{}", s.market_id, fmt_opt(p.map(|p| p.sf)))?;
            }
        }
        Ok(())
    })?;
    println!("wrote SF scans of {} market(s) to {}", series.len(), a.out.display());
    Ok(())
}

fn cmd_risk(a: &RiskArgs) -> CliResult<()> {
    check_window(a.window)?;
    check_analysis(&a.analysis)?;
    if !a.level.is_finite() {
        return Err(usage(format!("invalid --level {}", a.level)));
    }
    if a.min_run < 1 {
        return Err(usage("invalid --min-run 0: must be at least 1"));
    }
    let params = RiskParams {
        window: a.window,
        bins: a.analysis.bins,
        weights: a.analysis.weights,
        range: a.analysis.bin_range,
    };
    let series = pool(a.analysis.jobs)?.install(|| -> CliResult<Vec<RiskSeries>> {
        let returns = load_returns(&a.data, a.analysis.returns)?;
        let results = returns.par_iter().map(|r| (r.market_id().to_string(), sf_risk_series(r, &params))).collect();
        keep_ok(results)
    })?;

    create_out_dir(&a.out)?;
    let mut flagged = 0;
    for s in &series {
        write_file(&a.out.join(format!("{}.sfr.csv", s.market_id)), |w| s.write_csv(w))?;
    }
    write_file(&a.out.join("crises.csv"), |w| {
        writeln!(w, "market,start,end,peak_date,peak_sfr")?;
        for s in &series {
            for c in flag_crises(s, a.level, a.min_run) {
                writeln!(w, "{},{},{},{},{}", s.market_id, c.start, c.end, c.peak_date, c.peak_sfr)?;
                flagged += 1;
            }
        }
        Ok(())
    })?;
    println!("wrote SF_R series of {} market(s) and {flagged} crisis period(s) to {}", series.len(), a.out.display());
    Ok(())
}

fn curve_files(dir: &Path, source: Source) -> CliResult<Vec<(String, PathBuf)>> {
    let suffix = match source {
        Source::Sfr => ".sfr.csv",
        Source::Sf => ".sf.csv",
    };
    let entries = fs::read_dir(dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<(String, PathBuf)> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter_map(|p| {
            let name = p.file_name()?.to_str()?;
            let market = name.strip_suffix(suffix)?;
            (!market.is_empty() && !(source == Source::Sf && market == "all")).then(|| (market.to_string(), p.clone()))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn read_curve(market: &str, path: &Path, source: Source) -> CliResult<Curve> {
    let wrap = |e: io::Error| data(format!("{}: {e}", path.display()));
    let input = BufReader::new(File::open(path).map_err(wrap)?);
    Ok(match source {
        Source::Sfr => Curve::from(&RiskSeries::read_csv(market, input).map_err(wrap)?),
        Source::Sf => Curve::from(&SfSeries::read_csv(market, input).map_err(wrap)?),
    })
}

/// `0.8` -> `0.8`, `-1` -> `-1`: the shortest decimal that reads back the same.
fn threshold_label(tau: f64) -> String {
    tau.to_string()
}

fn cmd_network(a: &NetworkArgs) -> CliResult<()> {
    if a.thresholds.is_empty() {
        return Err(usage("--thresholds needs at least one value"));
    }
    for &tau in &a.thresholds {
        check_threshold(tau).map_err(|e| usage(format!("invalid --thresholds: {e}")))?;
    }
    if !a.input.is_dir() {
        return Err(data(format!("{}: not a directory", a.input.display())));
    }
    let files = curve_files(&a.input, a.source)?;
    if files.len() < 2 {
        return Err(usage(format!("need at least two markets, found {} in {}", files.len(), a.input.display())));
    }
    let curves = files.iter().map(|(m, p)| read_curve(m, p, a.source)).collect::<CliResult<Vec<_>>>()?;
    let matrix = correlation_matrix(&curves, a.support).map_err(|e| match e {
        NetError::TooFewSeries(_) | NetError::BadThreshold(_) => usage(e.to_string()),
        other => data(other.to_string()),
    })?;

    create_out_dir(&a.out)?;
    write_file(&a.out.join("corr.csv"), |w| matrix.write_csv(w))?;
    for &tau in &a.thresholds {
        let net = threshold_network(&matrix, tau).map_err(|e| usage(e.to_string()))?;
        let stem = format!("net_{}", threshold_label(tau));
        write_file(&a.out.join(format!("{stem}.dot")), |w| w.write_all(net.to_dot().as_bytes()))?;
        write_file(&a.out.join(format!("{stem}.json")), |w| w.write_all(net.to_json().as_bytes()))?;
        write_file(&a.out.join(format!("{stem}.csv")), |w| net.write_edge_csv(w))?;
        println!("threshold {tau}: {} node(s), {} edge(s)", net.nodes.len(), net.edges.len());
    }
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> CliResult<()> {
    if a.length < MIN_LENGTH {
        return Err(usage(format!("invalid --length {}: must be at least {MIN_LENGTH}", a.length)));
    }
    if a.markets < 1 {
        return Err(usage("invalid --markets 0: must be at least 1"));
    }
    create_out_dir(&a.out)?;
    for (k, id) in market_ids(a.scenario, a.markets).iter().enumerate() {
        let prices = synth_prices(id, a.scenario, a.length, a.seed, k, a.markets).map_err(|e| data(e.to_string()))?;
        write_file(&a.out.join(format!("{id}.csv")), |w| write_price_csv(&prices, w))?;
    }
    println!("wrote {} {} market(s) of {} days to {}", a.markets, a.scenario, a.length, a.out.display());
    Ok(())
}

fn cmd_graph(a: &GraphArgs) -> CliResult<()> {
    if a.bins < 2 {
        return Err(usage(format!("invalid --bins {}: must be at least 2", a.bins)));
    }
    let prices = load_price_file(&a.file).map_err(|e| data(e.to_string()))?;
    let aligned = align_to_calendar(&prices).map_err(|e| data(e.to_string()))?;
    let returns = compute_returns(&aligned, a.returns).map_err(|e| data(e.to_string()))?;
    let total = returns.len();
    let len = a.len.unwrap_or(total.saturating_sub(a.start));
    if len < 2 || a.start + len > total {
        return Err(usage(format!(
            "segment [{}, {}) does not fit the {total} returns of {}",
            a.start,
            a.start + len,
            a.file.display()
        )));
    }
    let graph = build_vg_fast(&returns.values()[a.start..a.start + len], a.weights).map_err(|e| data(e.to_string()))?;
    let dump = |w: &mut dyn Write| -> io::Result<()> {
        match a.format {
            GraphFormat::Dot => w.write_all(graph.to_dot().as_bytes()),
            GraphFormat::Csv => graph.write_edge_csv(w),
        }
    };
    match &a.out {
        Some(path) => write_file(path, |w| dump(w))?,
        None => dump(&mut io::stdout().lock()).map_err(|e| data(e.to_string()))?,
    }
    let summary = weight_pdf(&graph, a.bins).map_err(|e| data(e.to_string())).map(|pdf| sf_index(&pdf));
    match summary? {
        Ok(p) => eprintln!(
            "nodes={} edges={} S={} F={} SF={}",
            graph.node_count(),
            graph.edge_count(),
            p.shannon,
            p.fisher,
            p.sf
        ),
        Err(e) => eprintln!("nodes={} edges={} SF undefined: {e}", graph.node_count(), graph.edge_count()),
    }
    Ok(())
}
