//! Price ingestion, business-day alignment and return computation.
//!
//! Input files are plain `date,close` CSVs, one market per file. The file
//! stem becomes the market identifier.

use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, Weekday};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
    #[error("line {line}: non-positive price {price} on {date}")]
    NonPositivePrice { line: u64, date: NaiveDate, price: f64 },
    #[error("line {line}: {date} falls on a weekend")]
    WeekendDate { line: u64, date: NaiveDate },
    #[error("series is empty")]
    EmptySeries,
    #[error("series has {len} points, need at least {need}")]
    SeriesTooShort { len: usize, need: usize },
    #[error("invalid series: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<IngestError>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn is_weekend(date: NaiveDate) -> bool {
    matches!(date.weekday(), Weekday::Sat | Weekday::Sun)
}

/// All Monday-to-Friday dates in `[start, end]`.
pub fn business_days(start: NaiveDate, end: NaiveDate) -> Vec<NaiveDate> {
    start.iter_days().take_while(|d| *d <= end).filter(|d| !is_weekend(*d)).collect()
}

/// Daily closing prices of a single market on business days.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    market_id: String,
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(market_id: impl Into<String>, dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self, IngestError> {
        if dates.len() != prices.len() {
            return Err(IngestError::Invalid(format!("{} dates but {} prices", dates.len(), prices.len())));
        }
        for w in dates.windows(2) {
            if w[1] == w[0] {
                return Err(IngestError::DuplicateDate(w[0]));
            }
            if w[1] < w[0] {
                return Err(IngestError::Invalid(format!("dates out of order at {}", w[1])));
            }
        }
        for (i, (&date, &price)) in dates.iter().zip(&prices).enumerate() {
            if is_weekend(date) {
                return Err(IngestError::WeekendDate { line: i as u64 + 1, date });
            }
            if !price.is_finite() {
                return Err(IngestError::Invalid(format!("non-finite price on {date}")));
            }
            if price <= 0.0 {
                return Err(IngestError::NonPositivePrice { line: i as u64 + 1, date, price });
            }
        }
        Ok(Self { market_id: market_id.into(), dates, prices })
    }

    pub fn market_id(&self) -> &str {
        &self.market_id
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// Multiplies every price by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Result<Self, IngestError> {
        Self::new(self.market_id.clone(), self.dates.clone(), self.prices.iter().map(|p| p * factor).collect())
    }
}

/// Per-day return values, dated by the later day of each price pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    market_id: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(market_id: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self, IngestError> {
        if dates.len() != values.len() {
            return Err(IngestError::Invalid(format!("{} dates but {} values", dates.len(), values.len())));
        }
        if dates.windows(2).any(|w| w[1] <= w[0]) {
            return Err(IngestError::Invalid("dates must be strictly increasing".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(IngestError::Invalid(format!("non-finite return on {}", dates[pos])));
        }
        Ok(Self { market_id: market_id.into(), dates, values })
    }

    /// Wraps raw values with consecutive business dates starting at 1995-01-02.
    pub fn from_values(market_id: impl Into<String>, values: Vec<f64>) -> Result<Self, IngestError> {
        let start = NaiveDate::from_ymd_opt(1995, 1, 2).expect("valid date");
        let dates = business_day_sequence(start, values.len());
        Self::new(market_id, dates, values)
    }

    pub fn market_id(&self) -> &str {
        &self.market_id
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `count` consecutive business days beginning at the first business day on
/// or after `start`.
pub fn business_day_sequence(start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    start.iter_days().filter(|d| !is_weekend(*d)).take(count).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReturnMode {
    #[default]
    Log,
    Simple,
}

impl FromStr for ReturnMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "log" => Ok(Self::Log),
            "simple" => Ok(Self::Simple),
            other => Err(format!("unknown return mode `{other}` (expected log or simple)")),
        }
    }
}

impl fmt::Display for ReturnMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Log => "log",
            Self::Simple => "simple",
        })
    }
}

/// Parses a `date,close` CSV. Rows may appear in any order; the result is
/// sorted by date.
pub fn parse_price_csv<R: Read>(market_id: &str, raw: R) -> Result<PriceSeries, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(raw);

    let mut rows: Vec<(NaiveDate, f64, u64)> = Vec::new();
    let mut header_seen = false;
    for record in reader.records() {
        let record = record.map_err(|e| IngestError::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if !header_seen {
            let header: Vec<&str> = record.iter().collect();
            if header != ["date", "close"] {
                return Err(IngestError::MalformedRow {
                    line,
                    reason: format!("expected header `date,close`, found `{}`", header.join(",")),
                });
            }
            header_seen = true;
            continue;
        }
        if record.len() != 2 {
            return Err(IngestError::MalformedRow {
                line,
                reason: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| IngestError::MalformedRow { line, reason: format!("bad date `{}`: {e}", &record[0]) })?;
        let price: f64 = record[1]
            .parse()
            .map_err(|_| IngestError::MalformedRow { line, reason: format!("bad close `{}`", &record[1]) })?;
        if !price.is_finite() {
            return Err(IngestError::MalformedRow { line, reason: format!("non-finite close `{}`", &record[1]) });
        }
        if price <= 0.0 {
            return Err(IngestError::NonPositivePrice { line, date, price });
        }
        if is_weekend(date) {
            return Err(IngestError::WeekendDate { line, date });
        }
        rows.push((date, price, line));
    }
    if !header_seen {
        return Err(IngestError::MalformedRow { line: 1, reason: "missing header `date,close`".into() });
    }

    rows.sort_by_key(|r| r.0);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(IngestError::DuplicateDate(w[0].0));
    }
    let (dates, prices) = rows.into_iter().map(|(d, p, _)| (d, p)).unzip();
    PriceSeries::new(market_id, dates, prices)
}

/// Writes a series in the format read by [`parse_price_csv`].
pub fn write_price_csv<W: std::io::Write>(series: &PriceSeries, mut out: W) -> std::io::Result<()> {
    writeln!(out, "date,close")?;
    for (d, p) in series.dates.iter().zip(&series.prices) {
        writeln!(out, "{d},{p}")?;
    }
    Ok(())
}

/// Reads one price file; the market id is the file stem.
pub fn load_price_file(path: &Path) -> Result<PriceSeries, IngestError> {
    let wrap = |e: IngestError| IngestError::File { path: path.to_path_buf(), source: Box::new(e) };
    let market = market_id_from_path(path);
    let file = File::open(path).map_err(|e| wrap(e.into()))?;
    parse_price_csv(&market, file).map_err(wrap)
}

pub fn market_id_from_path(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Lists the `*.csv` files of a dataset directory in name order.
pub fn dataset_files(dir: &Path) -> Result<Vec<PathBuf>, IngestError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "csv"))
        .collect();
    files.sort();
    Ok(files)
}

/// Fills every missing business day between the first and last observation by
/// linear interpolation of prices. Interpolation runs over business-day
/// positions, so weekends carry no weight.
pub fn align_to_calendar(series: &PriceSeries) -> Result<PriceSeries, IngestError> {
    let (Some(&first), Some(&last)) = (series.dates.first(), series.dates.last()) else {
        return Err(IngestError::EmptySeries);
    };
    let calendar = business_days(first, last);

    // Calendar position of every observation; both sequences are sorted.
    let mut anchors = Vec::with_capacity(series.len());
    let mut pos = 0;
    for date in &series.dates {
        while calendar[pos] != *date {
            pos += 1;
        }
        anchors.push(pos);
    }

    let mut prices = vec![0.0; calendar.len()];
    for (k, &at) in anchors.iter().enumerate() {
        prices[at] = series.prices[k];
    }
    for (k, w) in anchors.windows(2).enumerate() {
        let (left, right) = (w[0], w[1]);
        let (p0, p1) = (series.prices[k], series.prices[k + 1]);
        let span = (right - left) as f64;
        for (step, price) in prices[left + 1..right].iter_mut().enumerate() {
            *price = p0 + (p1 - p0) * ((step + 1) as f64 / span);
        }
    }
    PriceSeries::new(series.market_id.clone(), calendar, prices)
}

/// Day-over-day returns of a (calendar-aligned) price series.
pub fn compute_returns(series: &PriceSeries, mode: ReturnMode) -> Result<ReturnSeries, IngestError> {
    if series.len() < 2 {
        return Err(IngestError::SeriesTooShort { len: series.len(), need: 2 });
    }
    let values = series
        .prices
        .windows(2)
        .map(|w| match mode {
            ReturnMode::Log => (w[1] / w[0]).ln(),
            ReturnMode::Simple => (w[1] - w[0]) / w[0],
        })
        .collect();
    ReturnSeries::new(series.market_id.clone(), series.dates[1..].to_vec(), values)
}
