//! Weighted natural visibility graphs.
//!
//! Points `(a, y_a)` and `(b, y_b)` of a segment see each other when every
//! intermediate point lies strictly below the straight line joining them.
//! Time coordinates are the integer indices of the segment. Every edge
//! `(i, j)` with `i < j` carries the amplitude difference `y_j - y_i`
//! (or its absolute value).
//!
//! [`build_vg_naive`] checks every pair against every intermediate point and
//! is kept as the reference; [`build_vg_fast`] splits the segment at its
//! maximum, which no edge can cross, and only scans outward from each split
//! point. Both share one exact orientation predicate, so they agree exactly.

mod orient;

use std::cmp::Ordering;
use std::fmt::{self, Write as _};
use std::io::{self, Write};
use std::str::FromStr;

use thiserror::Error;

pub use orient::orient2d;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VisibilityError {
    #[error("index {index} out of range for segment of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("indices must satisfy a < b, got a={a}, b={b}")]
    NonIncreasingIndices { a: usize, b: usize },
    #[error("segment has {len} points, need at least 2")]
    SegmentTooShort { len: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    #[default]
    Signed,
    Absolute,
}

impl WeightMode {
    #[inline]
    pub fn weight(self, from: f64, to: f64) -> f64 {
        match self {
            Self::Signed => to - from,
            Self::Absolute => (to - from).abs(),
        }
    }
}

impl FromStr for WeightMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "signed" => Ok(Self::Signed),
            "absolute" => Ok(Self::Absolute),
            other => Err(format!("unknown weight mode `{other}` (expected signed or absolute)")),
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Signed => "signed",
            Self::Absolute => "absolute",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Visibility graph of a segment; edges are sorted by `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedVisibilityGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedVisibilityGraph {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.iter().map(|e| e.w)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.i] += 1;
            deg[e.j] += 1;
        }
        deg
    }

    /// Graphviz rendering with a `weight` attribute on every edge.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph vg {\n");
        for k in 0..self.n {
            let _ = writeln!(out, "  {k};");
        }
        for e in &self.edges {
            let _ = writeln!(out, "  {} -- {} [weight={}];", e.i, e.j, e.w);
        }
        out.push_str("}\n");
        out
    }

    /// Edge list as CSV with header `i,j,w`.
    pub fn write_edge_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "i,j,w")?;
        for e in &self.edges {
            writeln!(out, "{},{},{}", e.i, e.j, e.w)?;
        }
        Ok(())
    }
}

fn check_segment(segment: &[f64]) -> Result<(), VisibilityError> {
    if segment.len() < 2 {
        return Err(VisibilityError::SegmentTooShort { len: segment.len() });
    }
    match segment.iter().position(|y| !y.is_finite()) {
        Some(index) => Err(VisibilityError::NonFinite { index }),
        None => Ok(()),
    }
}

/// True when point `c` lies strictly below the line through `a` and `b`
/// (`a < c < b`).
#[inline]
fn below(segment: &[f64], a: usize, b: usize, c: usize) -> bool {
    let pa = (a as f64, segment[a]);
    let pb = (b as f64, segment[b]);
    let pc = (c as f64, segment[c]);
    orient2d(pa, pb, pc) == Ordering::Less
}

/// Visibility criterion between indices `a < b` of `segment`.
pub fn visible(segment: &[f64], a: usize, b: usize) -> Result<bool, VisibilityError> {
    for index in [a, b] {
        if index >= segment.len() {
            return Err(VisibilityError::IndexOutOfRange { index, len: segment.len() });
        }
    }
    if a >= b {
        return Err(VisibilityError::NonIncreasingIndices { a, b });
    }
    if let Some(index) = (a..=b).find(|&k| !segment[k].is_finite()) {
        return Err(VisibilityError::NonFinite { index });
    }
    Ok((a + 1..b).all(|c| below(segment, a, b, c)))
}

/// All-pairs reference construction, `O(n^2)` pairs each checked against
/// every intermediate point.
pub fn build_vg_naive(segment: &[f64], mode: WeightMode) -> Result<WeightedVisibilityGraph, VisibilityError> {
    check_segment(segment)?;
    let n = segment.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if (i + 1..j).all(|c| below(segment, i, j, c)) {
                edges.push(Edge { i, j, w: mode.weight(segment[i], segment[j]) });
            }
        }
    }
    Ok(WeightedVisibilityGraph { n, edges })
}

/// Divide and conquer on the maximum of each sub-range.
///
/// The maximum `m` of `[lo, hi]` blocks every pair straddling it, so the
/// range splits into `[lo, m-1]` and `[m+1, hi]` after linking `m` to what it
/// sees. Scanning outward from `m`, a point is visible exactly when the
/// last visible point lies strictly below the new sight line. Average cost is
/// `O(n log n)` on noisy data; monotone input degrades to `O(n^2)`.
pub fn build_vg_fast(segment: &[f64], mode: WeightMode) -> Result<WeightedVisibilityGraph, VisibilityError> {
    check_segment(segment)?;
    let n = segment.len();
    let mut edges = Vec::with_capacity(3 * n);
    let mut stack = vec![(0usize, n - 1)];

    while let Some((lo, hi)) = stack.pop() {
        if lo >= hi {
            continue;
        }
        let mut m = lo;
        for k in lo + 1..=hi {
            if segment[k] > segment[m] {
                m = k;
            }
        }

        // Left of the maximum: edges (k, m).
        if m > lo {
            let mut horizon = m - 1;
            edges.push(Edge { i: horizon, j: m, w: mode.weight(segment[horizon], segment[m]) });
            for k in (lo..m - 1).rev() {
                if below(segment, k, m, horizon) {
                    edges.push(Edge { i: k, j: m, w: mode.weight(segment[k], segment[m]) });
                    horizon = k;
                }
            }
            stack.push((lo, m - 1));
        }
        // Right of the maximum: edges (m, k).
        if m < hi {
            let mut horizon = m + 1;
            edges.push(Edge { i: m, j: horizon, w: mode.weight(segment[m], segment[horizon]) });
            for k in m + 2..=hi {
                if below(segment, m, k, horizon) {
                    edges.push(Edge { i: m, j: k, w: mode.weight(segment[m], segment[k]) });
                    horizon = k;
                }
            }
            stack.push((m + 1, hi));
        }
    }

    edges.sort_unstable_by_key(|e| (e.i, e.j));
    Ok(WeightedVisibilityGraph { n, edges })
}
