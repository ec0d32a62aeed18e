//! Sliding-window SF scans, the daily SF_R risk series and crisis flags.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use chrono::NaiveDate;
use rayon::prelude::*;
use thiserror::Error;

use crate::infotheory::{sf_index, weight_pdf, weight_pdf_in_range, weight_range, InfoError, SfPoint, DEFAULT_BINS};
use crate::ingest::ReturnSeries;
use crate::visibility::{build_vg_fast, VisibilityError, WeightMode};

pub const DEFAULT_WINDOW: usize = 504;
pub const DEFAULT_STEP: usize = 63;
pub const DEFAULT_RISK_WINDOW: usize = 252;
pub const DEFAULT_LEVEL: f64 = 1.0;
pub const DEFAULT_MIN_RUN: usize = 5;
pub const MIN_WINDOW: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WindowError {
    #[error("series has {len} points, window needs {window}")]
    SeriesTooShort { len: usize, window: usize },
    #[error("bad window parameters: {0}")]
    BadWindowParams(String),
    #[error("global SF is undefined or zero ({0}); SF_R cannot be formed")]
    DegenerateGlobal(String),
    #[error(transparent)]
    Visibility(#[from] VisibilityError),
    #[error(transparent)]
    Info(#[from] InfoError),
}

/// Where the histogram range of a window comes from.
///
/// `Series` bins every window over the weight range of the whole-series
/// graph. A window's graph is the whole-series graph restricted to the
/// window, so its weights always fall inside that range, and a volatile
/// stretch spreads mass over more bins instead of squeezing the calm part of
/// the window into a few central ones. `Graph` uses each window's own
/// extremes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinRange {
    #[default]
    Series,
    Graph,
}

impl FromStr for BinRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "series" => Ok(Self::Series),
            "graph" => Ok(Self::Graph),
            other => Err(format!("unknown bin range `{other}` (expected series or graph)")),
        }
    }
}

impl fmt::Display for BinRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Series => "series",
            Self::Graph => "graph",
        })
    }
}

/// SF of one segment: visibility graph, weight histogram, quantifiers.
/// `range` fixes the histogram range; `None` uses the graph's own extremes.
pub fn segment_sf(
    segment: &[f64],
    bins: usize,
    weights: WeightMode,
    range: Option<(f64, f64)>,
) -> Result<SfPoint, WindowError> {
    let graph = build_vg_fast(segment, weights)?;
    let pdf = match range {
        Some((lo, hi)) => weight_pdf_in_range(&graph, bins, lo, hi)?,
        None => weight_pdf(&graph, bins)?,
    };
    Ok(sf_index(&pdf)?)
}

// A degenerate Fisher value marks the window as missing; anything else is fatal.
fn window_sf(
    segment: &[f64],
    bins: usize,
    weights: WeightMode,
    range: Option<(f64, f64)>,
) -> Result<Option<SfPoint>, WindowError> {
    match segment_sf(segment, bins, weights, range) {
        Ok(p) => Ok(Some(p)),
        Err(WindowError::Info(InfoError::DegenerateFisher { .. })) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Weight range of the visibility graph of the whole series.
pub fn series_weight_range(values: &[f64], weights: WeightMode) -> Result<(f64, f64), WindowError> {
    let graph = build_vg_fast(values, weights)?;
    let w: Vec<f64> = graph.weights().collect();
    Ok(weight_range(&w).ok_or(InfoError::NoEdges)?)
}

/// Number of windows of `window` points, `step` apart, that fit in `len`.
pub fn window_count(len: usize, window: usize, step: usize) -> usize {
    if len < window || step == 0 {
        0
    } else {
        (len - window) / step + 1
    }
}

fn validate(window: usize, step: usize, bins: usize) -> Result<(), WindowError> {
    if window < MIN_WINDOW {
        return Err(WindowError::BadWindowParams(format!("window must be >= {MIN_WINDOW}, got {window}")));
    }
    if step < 1 {
        return Err(WindowError::BadWindowParams("step must be >= 1".into()));
    }
    if bins < 2 {
        return Err(WindowError::BadWindowParams(format!("bins must be >= 2, got {bins}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanParams {
    pub window: usize,
    pub step: usize,
    pub bins: usize,
    pub weights: WeightMode,
    pub range: BinRange,
}

impl Default for ScanParams {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            step: DEFAULT_STEP,
            bins: DEFAULT_BINS,
            weights: WeightMode::Signed,
            range: BinRange::Series,
        }
    }
}

impl ScanParams {
    pub fn validate(&self) -> Result<(), WindowError> {
        validate(self.window, self.step, self.bins)
    }
}

/// SF values of successive windows, each labeled by its last date.
#[derive(Debug, Clone, PartialEq)]
pub struct SfSeries {
    pub market_id: String,
    pub points: Vec<(NaiveDate, Option<SfPoint>)>,
}

pub fn sliding_sf(returns: &ReturnSeries, params: &ScanParams) -> Result<SfSeries, WindowError> {
    params.validate()?;
    let values = returns.values();
    if values.len() < params.window {
        return Err(WindowError::SeriesTooShort { len: values.len(), window: params.window });
    }
    let range = match params.range {
        BinRange::Series => Some(series_weight_range(values, params.weights)?),
        BinRange::Graph => None,
    };
    let count = window_count(values.len(), params.window, params.step);
    let points = (0..count)
        .into_par_iter()
        .map(|w| {
            let start = w * params.step;
            let end = start + params.window;
            let sf = window_sf(&values[start..end], params.bins, params.weights, range)?;
            Ok((returns.dates()[end - 1], sf))
        })
        .collect::<Result<Vec<_>, WindowError>>()?;
    Ok(SfSeries { market_id: returns.market_id().to_string(), points })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskParams {
    pub window: usize,
    pub bins: usize,
    pub weights: WeightMode,
    pub range: BinRange,
}

impl Default for RiskParams {
    fn default() -> Self {
        Self { window: DEFAULT_RISK_WINDOW, bins: DEFAULT_BINS, weights: WeightMode::Signed, range: BinRange::Series }
    }
}

impl RiskParams {
    pub fn with_window(window: usize) -> Self {
        Self { window, ..Self::default() }
    }
}

/// Daily ratio of trailing-window SF to the SF of the whole series.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskSeries {
    pub market_id: String,
    pub global_sf: SfPoint,
    pub points: Vec<(NaiveDate, Option<f64>)>,
}

impl RiskSeries {
    pub fn values(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

/// The trailing window ending at day `d` covers indices `d - window + 1 ..= d`.
pub fn sf_risk_series(returns: &ReturnSeries, params: &RiskParams) -> Result<RiskSeries, WindowError> {
    let RiskParams { window, bins, weights, range } = *params;
    validate(window, 1, bins)?;
    let values = returns.values();
    if values.len() < window {
        return Err(WindowError::SeriesTooShort { len: values.len(), window });
    }
    let global_sf = match segment_sf(values, bins, weights, None) {
        Ok(p) if p.sf > 0.0 => p,
        Ok(p) => return Err(WindowError::DegenerateGlobal(format!("sf = {}", p.sf))),
        Err(e) => return Err(WindowError::DegenerateGlobal(e.to_string())),
    };
    let range = match range {
        BinRange::Series => Some(series_weight_range(values, weights)?),
        BinRange::Graph => None,
    };
    let points = (window - 1..values.len())
        .into_par_iter()
        .map(|end| {
            let sf = window_sf(&values[end + 1 - window..=end], bins, weights, range)?;
            Ok((returns.dates()[end], sf.map(|p| p.sf / global_sf.sf)))
        })
        .collect::<Result<Vec<_>, WindowError>>()?;
    Ok(RiskSeries { market_id: returns.market_id().to_string(), global_sf, points })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrisisPeriod {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub peak_date: NaiveDate,
    pub peak_sfr: f64,
}

/// Maximal runs of at least `min_run` consecutive points with `sfr > level`.
/// Missing values break a run.
pub fn flag_crises(risk: &RiskSeries, level: f64, min_run: usize) -> Vec<CrisisPeriod> {
    let mut periods = Vec::new();
    let mut run: Option<(usize, usize)> = None; // (start index, peak index)
    let close = |run: (usize, usize), last: usize, periods: &mut Vec<CrisisPeriod>| {
        if last + 1 - run.0 >= min_run.max(1) {
            let (peak_date, peak) = risk.points[run.1];
            periods.push(CrisisPeriod {
                start: risk.points[run.0].0,
                end: risk.points[last].0,
                peak_date,
                peak_sfr: peak.expect("peak inside run"),
            });
        }
    };
    for (k, (_, v)) in risk.points.iter().enumerate() {
        match (*v, run) {
            (Some(x), Some((s, p))) if x > level => {
                let peak = risk.points[p].1.expect("peak inside run");
                run = Some((s, if x > peak { k } else { p }));
            }
            (Some(x), None) if x > level => run = Some((k, k)),
            (_, Some(r)) => {
                close(r, k - 1, &mut periods);
                run = None;
            }
            (_, None) => {}
        }
    }
    if let Some(r) = run {
        close(r, risk.points.len() - 1, &mut periods);
    }
    periods
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_date(s: &str, line: usize) -> io::Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").map_err(|e| bad_line(line, format!("bad date `{s}`: {e}")))
}

fn parse_f64(s: &str, line: usize) -> io::Result<f64> {
    s.trim().parse().map_err(|_| bad_line(line, format!("bad number `{s}`")))
}

fn parse_opt(s: &str, line: usize) -> io::Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(s, line).map(Some)
    }
}

fn bad_line(line: usize, msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, format!("line {line}: {msg}"))
}

fn expect_header(line: Option<(usize, String)>, header: &str) -> io::Result<()> {
    match line {
        Some((_, l)) if l.trim() == header => Ok(()),
        Some((n, l)) => Err(bad_line(n, format!("expected header `{header}`, found `{l}`"))),
        None => Err(bad_line(0, format!("missing header `{header}`"))),
    }
}

fn split_fields(line: &str, n: usize, at: usize) -> io::Result<Vec<&str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != n {
        return Err(bad_line(at, format!("expected {n} fields, found {}", fields.len())));
    }
    Ok(fields)
}

fn numbered_lines<R: BufRead>(input: R) -> impl Iterator<Item = io::Result<(usize, String)>> {
    input.lines().enumerate().map(|(k, l)| l.map(|l| (k + 1, l)))
}

pub const SF_HEADER: &str = "window_end,shannon,fisher,sf";

impl SfSeries {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{SF_HEADER}")?;
        for (date, p) in &self.points {
            writeln!(
                out,
                "{date},{},{},{}",
                fmt_opt(p.map(|p| p.shannon)),
                fmt_opt(p.map(|p| p.fisher)),
                fmt_opt(p.map(|p| p.sf))
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(market_id: &str, input: R) -> io::Result<Self> {
        let mut lines = numbered_lines(input);
        expect_header(lines.next().transpose()?, SF_HEADER)?;
        let mut points = Vec::new();
        for l in lines {
            let (n, line) = l?;
            if line.trim().is_empty() {
                continue;
            }
            let f = split_fields(&line, 4, n)?;
            let date = parse_date(f[0], n)?;
            let p = match (parse_opt(f[1], n)?, parse_opt(f[2], n)?, parse_opt(f[3], n)?) {
                (Some(shannon), Some(fisher), Some(sf)) => Some(SfPoint { shannon, fisher, sf }),
                (None, None, None) => None,
                _ => return Err(bad_line(n, "partially missing SF point".into())),
            };
            points.push((date, p));
        }
        Ok(Self { market_id: market_id.to_string(), points })
    }
}

pub const RISK_HEADER: &str = "date,sfr";

impl RiskSeries {
    /// `# global_sf=..` comment, a second comment with the global S and F,
    /// then `date,sfr` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# global_sf={}", self.global_sf.sf)?;
        writeln!(out, "# global_shannon={},global_fisher={}", self.global_sf.shannon, self.global_sf.fisher)?;
        writeln!(out, "{RISK_HEADER}")?;
        for (date, v) in &self.points {
            writeln!(out, "{date},{}", fmt_opt(*v))?;
        }
        Ok(())
    }

    /// Reads the format written by [`RiskSeries::write_csv`]. Only the
    /// `global_sf` comment is required; S and F default to NaN without it.
    pub fn read_csv<R: BufRead>(market_id: &str, input: R) -> io::Result<Self> {
        let mut global_sf = SfPoint { shannon: f64::NAN, fisher: f64::NAN, sf: f64::NAN };
        let mut seen_sf = false;
        let mut header_done = false;
        let mut points = Vec::new();
        for l in numbered_lines(input) {
            let (n, line) = l?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                for item in comment.split(',') {
                    if let Some((key, value)) = item.trim().split_once('=') {
                        match key.trim() {
                            "global_sf" => {
                                global_sf.sf = parse_f64(value, n)?;
                                seen_sf = true;
                            }
                            "global_shannon" => global_sf.shannon = parse_f64(value, n)?,
                            "global_fisher" => global_sf.fisher = parse_f64(value, n)?,
                            _ => {}
                        }
                    }
                }
                continue;
            }
            if !header_done {
                expect_header(Some((n, line.clone())), RISK_HEADER)?;
                header_done = true;
                continue;
            }
            let f = split_fields(&line, 2, n)?;
            points.push((parse_date(f[0], n)?, parse_opt(f[1], n)?));
        }
        if !seen_sf {
            return Err(bad_line(1, "missing `# global_sf=` comment".into()));
        }
        if !header_done {
            return Err(bad_line(0, format!("missing header `{RISK_HEADER}`")));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "dates must be strictly increasing"));
        }
        Ok(Self { market_id: market_id.to_string(), global_sf, points })
    }
}

pub const CRISIS_HEADER: &str = "start,end,peak_date,peak_sfr";

pub fn write_crises_csv<W: Write>(periods: &[CrisisPeriod], mut out: W) -> io::Result<()> {
    writeln!(out, "{CRISIS_HEADER}")?;
    for p in periods {
        writeln!(out, "{},{},{},{}", p.start, p.end, p.peak_date, p.peak_sfr)?;
    }
    Ok(())
}

pub fn read_crises_csv<R: BufRead>(input: R) -> io::Result<Vec<CrisisPeriod>> {
    let mut lines = numbered_lines(input);
    expect_header(lines.next().transpose()?, CRISIS_HEADER)?;
    let mut out = Vec::new();
    for l in lines {
        let (n, line) = l?;
        if line.trim().is_empty() {
            continue;
        }
        let f = split_fields(&line, 4, n)?;
        out.push(CrisisPeriod {
            start: parse_date(f[0], n)?,
            end: parse_date(f[1], n)?,
            peak_date: parse_date(f[2], n)?,
            peak_sfr: parse_f64(f[3], n)?,
        });
    }
    Ok(out)
}
