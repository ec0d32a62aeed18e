//! Edge-weight distribution of a visibility graph and the entropic
//! quantifiers computed over it.
//!
//! * Normalized Shannon entropy `S = -sum p ln p / ln N`, `0` for a single
//!   active bin and `1` for a flat histogram.
//! * Discrete Fisher information
//!   `F = F0 * sum_{i=1}^{N-1} (sqrt(p_{i+1}) - sqrt(p_i))^2` with `F0 = 1`
//!   when all mass sits in the first or last bin and `F0 = 1/2` otherwise.
//! * The SF index `S / F`.

use thiserror::Error;

use crate::visibility::WeightedVisibilityGraph;

pub const DEFAULT_BINS: usize = 50;

/// Fisher values below this cannot be divided by.
pub const FISHER_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfoError {
    #[error("graph has no edges")]
    NoEdges,
    #[error("need at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error("invalid distribution: {0}")]
    InvalidPdf(String),
    #[error("Fisher information {fisher:e} is below {FISHER_EPSILON:e}; SF is undefined")]
    DegenerateFisher { fisher: f64 },
}

/// Normalized histogram of edge weights over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPdf {
    lo: f64,
    hi: f64,
    p: Vec<f64>,
}

impl WeightPdf {
    /// Wraps an explicit probability vector.
    pub fn new(p: Vec<f64>, lo: f64, hi: f64) -> Result<Self, InfoError> {
        if p.len() < 2 {
            return Err(InfoError::TooFewBins(p.len()));
        }
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(InfoError::InvalidPdf(format!("lo {lo} > hi {hi}")));
        }
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(InfoError::InvalidPdf("probabilities must be finite and non-negative".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(InfoError::InvalidPdf(format!("probabilities sum to {total}")));
        }
        Ok(Self { lo, hi, p })
    }

    pub fn bins(&self) -> usize {
        self.p.len()
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }
}

/// Bin of `w` among `bins` equal-width bins over `[lo, hi]`; the top edge
/// belongs to the last bin.
#[inline]
pub fn bin_index(w: f64, lo: f64, hi: f64, bins: usize) -> usize {
    if hi <= lo || w <= lo {
        return 0;
    }
    let k = ((w - lo) / (hi - lo) * bins as f64) as usize;
    k.min(bins - 1)
}

/// Smallest and largest value, or `None` for an empty slice.
pub fn weight_range(weights: &[f64]) -> Option<(f64, f64)> {
    if weights.is_empty() {
        return None;
    }
    Some(weights.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &w| (lo.min(w), hi.max(w))))
}

/// Histogram of arbitrary weights with the range taken from their extremes.
pub fn histogram_pdf(weights: &[f64], bins: usize) -> Result<WeightPdf, InfoError> {
    if bins < 2 {
        return Err(InfoError::TooFewBins(bins));
    }
    let (lo, hi) = weight_range(weights).ok_or(InfoError::NoEdges)?;
    histogram_pdf_in_range(weights, bins, lo, hi)
}

/// Histogram over a fixed `[lo, hi]`, e.g. the range of a larger graph the
/// weights were drawn from. Weights outside the range fall into the end bins.
pub fn histogram_pdf_in_range(weights: &[f64], bins: usize, lo: f64, hi: f64) -> Result<WeightPdf, InfoError> {
    if bins < 2 {
        return Err(InfoError::TooFewBins(bins));
    }
    if weights.is_empty() {
        return Err(InfoError::NoEdges);
    }
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(InfoError::InvalidPdf(format!("bad bin range [{lo}, {hi}]")));
    }
    let mut counts = vec![0usize; bins];
    for &w in weights {
        counts[bin_index(w, lo, hi, bins)] += 1;
    }
    let total = weights.len() as f64;
    let p = counts.into_iter().map(|c| c as f64 / total).collect();
    Ok(WeightPdf { lo, hi, p })
}

/// The distribution `P_w` of a graph's edge weights.
pub fn weight_pdf(graph: &WeightedVisibilityGraph, bins: usize) -> Result<WeightPdf, InfoError> {
    if bins < 2 {
        return Err(InfoError::TooFewBins(bins));
    }
    let weights: Vec<f64> = graph.weights().collect();
    histogram_pdf(&weights, bins)
}

/// `P_w` binned over an externally fixed range.
pub fn weight_pdf_in_range(
    graph: &WeightedVisibilityGraph,
    bins: usize,
    lo: f64,
    hi: f64,
) -> Result<WeightPdf, InfoError> {
    let weights: Vec<f64> = graph.weights().collect();
    histogram_pdf_in_range(&weights, bins, lo, hi)
}

pub fn shannon_norm(pdf: &WeightPdf) -> f64 {
    let h: f64 = pdf.p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum();
    (h / (pdf.bins() as f64).ln()).clamp(0.0, 1.0) + 0.0
}

pub fn fisher(pdf: &WeightPdf) -> f64 {
    let p = &pdf.p;
    let boundary_delta = p[0] == 1.0 || p[p.len() - 1] == 1.0;
    let f0 = if boundary_delta { 1.0 } else { 0.5 };
    let sum: f64 = p.windows(2).map(|w| (w[1].sqrt() - w[0].sqrt()).powi(2)).sum();
    (f0 * sum).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfPoint {
    pub shannon: f64,
    pub fisher: f64,
    pub sf: f64,
}

pub fn sf_index(pdf: &WeightPdf) -> Result<SfPoint, InfoError> {
    let shannon = shannon_norm(pdf);
    let fisher = fisher(pdf);
    if fisher < FISHER_EPSILON {
        return Err(InfoError::DegenerateFisher { fisher });
    }
    Ok(SfPoint { shannon, fisher, sf: shannon / fisher })
}
