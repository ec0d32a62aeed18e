//! Seeded synthetic price series.
//!
//! Every market draws Gaussian daily log returns. Markets of one dataset share
//! a common factor with a per-market loading, so their risk curves correlate
//! to different degrees.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::ingest::{business_day_sequence, IngestError, PriceSeries};

pub const MIN_LENGTH: usize = 600;
pub const BURST_LEN: usize = 60;
pub const BURST_FACTOR: f64 = 5.0;
pub const DAILY_SIGMA: f64 = 0.01;
pub const TREND_DRIFT: f64 = 0.0005;
pub const START_PRICE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Gaussian,
    Burst,
    Trend,
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "burst" => Ok(Self::Burst),
            "trend" => Ok(Self::Trend),
            other => Err(format!("unknown scenario `{other}` (expected gaussian, burst or trend)")),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gaussian => "gaussian",
            Self::Burst => "burst",
            Self::Trend => "trend",
        })
    }
}

pub fn start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(1995, 1, 2).expect("valid date")
}

/// Half-open range of return indices with quintupled volatility for a price
/// series of `length` points (`length - 1` returns), centred on the midpoint.
pub fn burst_interval(length: usize) -> (usize, usize) {
    let returns = length.saturating_sub(1);
    let start = returns.saturating_sub(BURST_LEN) / 2;
    (start, (start + BURST_LEN).min(returns))
}

fn volatility(scenario: Scenario, length: usize) -> Vec<f64> {
    let mut sigma = vec![DAILY_SIGMA; length - 1];
    if scenario == Scenario::Burst {
        let (a, b) = burst_interval(length);
        sigma[a..b].iter_mut().for_each(|s| *s *= BURST_FACTOR);
    }
    sigma
}

/// Loading of market `k` out of `markets` on the common factor.
fn loading(k: usize, markets: usize) -> f64 {
    if markets <= 1 {
        0.0
    } else {
        0.2 + 0.7 * k as f64 / (markets - 1) as f64
    }
}

/// Log returns of market `k` in a dataset of `markets` markets.
pub fn synth_returns(scenario: Scenario, length: usize, seed: u64, k: usize, markets: usize) -> Vec<f64> {
    let n = length - 1;
    let sigma = volatility(scenario, length);
    let drift = if scenario == Scenario::Trend { TREND_DRIFT } else { 0.0 };
    let rho = loading(k, markets);

    let mut common_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut own_rng = ChaCha8Rng::seed_from_u64(seed);
    own_rng.set_stream(k as u64 + 1);

    (0..n)
        .map(|t| {
            let z_common: f64 = StandardNormal.sample(&mut common_rng);
            let z_own: f64 = StandardNormal.sample(&mut own_rng);
            let z = rho.sqrt() * z_common + (1.0 - rho).sqrt() * z_own;
            drift + sigma[t] * z
        })
        .collect()
}

/// Prices on consecutive business days starting 1995-01-02.
pub fn synth_prices(
    market_id: &str,
    scenario: Scenario,
    length: usize,
    seed: u64,
    k: usize,
    markets: usize,
) -> Result<PriceSeries, IngestError> {
    if length < MIN_LENGTH {
        return Err(IngestError::SeriesTooShort { len: length, need: MIN_LENGTH });
    }
    let returns = synth_returns(scenario, length, seed, k, markets);
    let mut prices = Vec::with_capacity(length);
    let mut p = START_PRICE;
    prices.push(p);
    for r in returns {
        p *= r.exp();
        prices.push(p);
    }
    PriceSeries::new(market_id, business_day_sequence(start_date(), length), prices)
}

/// Market ids of a generated dataset.
pub fn market_ids(scenario: Scenario, markets: usize) -> Vec<String> {
    if markets == 1 {
        vec![scenario.to_string()]
    } else {
        (0..markets).map(|k| format!("{scenario}{k:02}")).collect()
    }
}

pub fn synth_dataset(
    scenario: Scenario,
    length: usize,
    seed: u64,
    markets: usize,
) -> Result<Vec<PriceSeries>, IngestError> {
    market_ids(scenario, markets)
        .iter()
        .enumerate()
        .map(|(k, id)| synth_prices(id, scenario, length, seed, k, markets))
        .collect()
}
