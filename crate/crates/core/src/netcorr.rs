//! Cross-market Pearson correlation of risk curves and threshold networks.
//!
//! A network at threshold τ links markets i < j whenever `r[i][j] ≥ τ`. The
//! comparison is inclusive and on the signed coefficient, so for τ ≥ 0 an
//! anti-correlated pair is never linked.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::windows::{RiskSeries, SfSeries};

/// Fewer common dates than this make a correlation meaningless.
pub const MIN_COMMON_DATES: usize = 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("need at least two markets, got {0}")]
    TooFewSeries(usize),
    #[error("market `{0}` appears twice")]
    DuplicateMarket(String),
    #[error("only {found} common dates{between}, need at least {MIN_COMMON_DATES}")]
    InsufficientOverlap { found: usize, between: String },
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least two observations, got {0}")]
    TooFewPoints(usize),
    #[error("correlation undefined: {0} is constant")]
    ZeroVariance(String),
    #[error("threshold {0} outside [-1, 1]")]
    BadThreshold(f64),
}

/// A dated curve of one market, with gaps where the value is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub market_id: String,
    pub points: Vec<(NaiveDate, Option<f64>)>,
}

impl From<&RiskSeries> for Curve {
    fn from(r: &RiskSeries) -> Self {
        Self { market_id: r.market_id.clone(), points: r.points.clone() }
    }
}

impl From<&SfSeries> for Curve {
    fn from(s: &SfSeries) -> Self {
        Self { market_id: s.market_id.clone(), points: s.points.iter().map(|(d, p)| (*d, p.map(|p| p.sf))).collect() }
    }
}

impl Curve {
    fn defined_dates(&self) -> BTreeSet<NaiveDate> {
        self.points.iter().filter(|p| p.1.is_some()).map(|p| p.0).collect()
    }

    fn values_on(&self, dates: &[NaiveDate]) -> Vec<f64> {
        let mut by_date: Vec<(NaiveDate, f64)> = self.points.iter().filter_map(|(d, v)| v.map(|v| (*d, v))).collect();
        by_date.sort_by_key(|p| p.0);
        dates
            .iter()
            .map(|d| {
                let k = by_date.binary_search_by_key(d, |p| p.0).expect("date in support");
                by_date[k].1
            })
            .collect()
    }
}

/// Curves restricted to the dates where every one of them is defined.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedCurves {
    pub markets: Vec<String>,
    pub dates: Vec<NaiveDate>,
    /// One row per market, one column per date.
    pub values: Vec<Vec<f64>>,
}

fn check_markets(curves: &[Curve]) -> Result<(), NetError> {
    if curves.len() < 2 {
        return Err(NetError::TooFewSeries(curves.len()));
    }
    let mut seen = BTreeSet::new();
    for c in curves {
        if !seen.insert(c.market_id.as_str()) {
            return Err(NetError::DuplicateMarket(c.market_id.clone()));
        }
    }
    Ok(())
}

pub fn align_common_dates(curves: &[Curve]) -> Result<AlignedCurves, NetError> {
    check_markets(curves)?;
    let mut common = curves[0].defined_dates();
    for c in &curves[1..] {
        let other = c.defined_dates();
        common.retain(|d| other.contains(d));
    }
    if common.len() < MIN_COMMON_DATES {
        return Err(NetError::InsufficientOverlap { found: common.len(), between: String::new() });
    }
    let dates: Vec<NaiveDate> = common.into_iter().collect();
    Ok(AlignedCurves {
        markets: curves.iter().map(|c| c.market_id.clone()).collect(),
        values: curves.iter().map(|c| c.values_on(&dates)).collect(),
        dates,
    })
}

/// Sample Pearson coefficient, clamped to [-1, 1].
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, NetError> {
    if x.len() != y.len() {
        return Err(NetError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(NetError::TooFewPoints(x.len()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(NetError::ZeroVariance("first argument".into()));
    }
    if syy == 0.0 {
        return Err(NetError::ZeroVariance("second argument".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Which dates a pair of markets is correlated over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Support {
    /// Dates where all markets are defined; every entry uses the same dates.
    #[default]
    Common,
    /// Dates where both markets of the pair are defined.
    Pairwise,
}

impl FromStr for Support {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "common" => Ok(Self::Common),
            "pairwise" => Ok(Self::Pairwise),
            other => Err(format!("unknown support `{other}` (expected common or pairwise)")),
        }
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Common => "common",
            Self::Pairwise => "pairwise",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub markets: Vec<String>,
    pub r: Vec<Vec<f64>>,
    /// Number of dates each entry was computed over.
    pub support: Vec<Vec<usize>>,
}

fn pair_r(x: &[f64], y: &[f64], a: &str, b: &str) -> Result<f64, NetError> {
    pearson(x, y).map_err(|e| match e {
        NetError::ZeroVariance(which) => {
            NetError::ZeroVariance(format!("curve of `{}`", if which.starts_with("first") { a } else { b }))
        }
        other => other,
    })
}

impl CorrelationMatrix {
    fn from_pairs(markets: Vec<String>, pairs: Vec<((usize, usize), f64, usize)>, diag: Vec<usize>) -> Self {
        let k = markets.len();
        let mut r = vec![vec![1.0; k]; k];
        let mut support = vec![vec![0; k]; k];
        for (i, s) in diag.into_iter().enumerate() {
            support[i][i] = s;
        }
        for ((i, j), v, s) in pairs {
            r[i][j] = v;
            r[j][i] = v;
            support[i][j] = s;
            support[j][i] = s;
        }
        Self { markets, r, support }
    }

    pub fn len(&self) -> usize {
        self.markets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markets.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "market,{}", self.markets.join(","))?;
        for (m, row) in self.markets.iter().zip(&self.r) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{m},{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Reads the coefficients back; supports are not stored in the file.
    pub fn read_csv<R: BufRead>(input: R) -> io::Result<(Vec<String>, Vec<Vec<f64>>)> {
        let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
        let mut lines = input.lines();
        let header = lines.next().transpose()?.ok_or_else(|| bad("empty matrix file".into()))?;
        let mut cols = header.split(',');
        if cols.next() != Some("market") {
            return Err(bad(format!("bad matrix header `{header}`")));
        }
        let markets: Vec<String> = cols.map(str::to_string).collect();
        let mut r = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut f = line.split(',');
            let name = f.next().unwrap_or_default();
            if markets.get(r.len()).map(String::as_str) != Some(name) {
                return Err(bad(format!("line {}: unexpected row `{name}`", n + 2)));
            }
            let row = f
                .map(|v| v.parse::<f64>().map_err(|e| bad(format!("line {}: {e}", n + 2))))
                .collect::<io::Result<Vec<f64>>>()?;
            if row.len() != markets.len() {
                return Err(bad(format!("line {}: expected {} values", n + 2, markets.len())));
            }
            r.push(row);
        }
        if r.len() != markets.len() {
            return Err(bad(format!("expected {} rows, found {}", markets.len(), r.len())));
        }
        Ok((markets, r))
    }
}

fn upper_pairs(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect()
}

pub fn correlation_matrix(curves: &[Curve], support: Support) -> Result<CorrelationMatrix, NetError> {
    let markets: Vec<String> = curves.iter().map(|c| c.market_id.clone()).collect();
    match support {
        Support::Common => {
            let aligned = align_common_dates(curves)?;
            let n = aligned.dates.len();
            let pairs = upper_pairs(markets.len())
                .into_par_iter()
                .map(|(i, j)| {
                    let v = pair_r(&aligned.values[i], &aligned.values[j], &markets[i], &markets[j])?;
                    Ok(((i, j), v, n))
                })
                .collect::<Result<Vec<_>, NetError>>()?;
            Ok(CorrelationMatrix::from_pairs(markets, pairs, vec![n; curves.len()]))
        }
        Support::Pairwise => {
            check_markets(curves)?;
            let diag = curves.iter().map(|c| c.defined_dates().len()).collect();
            let pairs = upper_pairs(markets.len())
                .into_par_iter()
                .map(|(i, j)| {
                    let (a, b) = (&curves[i], &curves[j]);
                    let other = b.defined_dates();
                    let dates: Vec<NaiveDate> = a.defined_dates().into_iter().filter(|d| other.contains(d)).collect();
                    if dates.len() < MIN_COMMON_DATES {
                        return Err(NetError::InsufficientOverlap {
                            found: dates.len(),
                            between: format!(" between `{}` and `{}`", a.market_id, b.market_id),
                        });
                    }
                    let v = pair_r(&a.values_on(&dates), &b.values_on(&dates), &a.market_id, &b.market_id)?;
                    Ok(((i, j), v, dates.len()))
                })
                .collect::<Result<Vec<_>, NetError>>()?;
            Ok(CorrelationMatrix::from_pairs(markets, pairs, diag))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetEdge {
    pub i: usize,
    pub j: usize,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdNetwork {
    pub threshold: f64,
    pub nodes: Vec<String>,
    pub edges: Vec<NetEdge>,
}

pub fn check_threshold(tau: f64) -> Result<(), NetError> {
    if (-1.0..=1.0).contains(&tau) {
        Ok(())
    } else {
        Err(NetError::BadThreshold(tau))
    }
}

pub fn threshold_network(matrix: &CorrelationMatrix, tau: f64) -> Result<ThresholdNetwork, NetError> {
    check_threshold(tau)?;
    let edges = upper_pairs(matrix.len())
        .into_iter()
        .filter(|&(i, j)| matrix.r[i][j] >= tau)
        .map(|(i, j)| NetEdge { i, j, r: matrix.r[i][j] })
        .collect();
    Ok(ThresholdNetwork { threshold: tau, nodes: matrix.markets.clone(), edges })
}

pub const EDGE_HEADER: &str = "a,b,r";

impl ThresholdNetwork {
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges.iter().map(|e| (e.i, e.j)).collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for e in &self.edges {
            d[e.i] += 1;
            d[e.j] += 1;
        }
        d
    }

    pub fn to_dot(&self) -> String {
        let mut s = format!("graph net {{\n  // threshold {}\n", self.threshold);
        for n in &self.nodes {
            s.push_str(&format!("  \"{n}\";\n"));
        }
        for e in &self.edges {
            s.push_str(&format!("  \"{}\" -- \"{}\" [r={}];\n", self.nodes[e.i], self.nodes[e.j], e.r));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> String {
        let value = json!({
            "threshold": self.threshold,
            "nodes": self.nodes.iter().map(|n| json!({ "id": n })).collect::<Vec<_>>(),
            "edges": self
                .edges
                .iter()
                .map(|e| json!({ "source": self.nodes[e.i], "target": self.nodes[e.j], "r": e.r }))
                .collect::<Vec<_>>(),
        });
        let mut s = serde_json::to_string_pretty(&value).expect("json value serializes");
        s.push('\n');
        s
    }

    pub fn write_edge_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{EDGE_HEADER}")?;
        for e in &self.edges {
            writeln!(out, "{},{},{}", self.nodes[e.i], self.nodes[e.j], e.r)?;
        }
        Ok(())
    }

    /// Rebuilds a network from an edge list and the full node list.
    pub fn read_edge_csv<R: BufRead>(threshold: f64, nodes: Vec<String>, input: R) -> io::Result<Self> {
        let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
        let mut lines = input.lines();
        match lines.next().transpose()? {
            Some(h) if h == EDGE_HEADER => {}
            other => return Err(bad(format!("expected header `{EDGE_HEADER}`, found {other:?}"))),
        }
        let index = |name: &str, n: usize| {
            nodes.iter().position(|x| x == name).ok_or_else(|| bad(format!("line {n}: unknown node `{name}`")))
        };
        let mut edges = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(bad(format!("line {}: expected 3 fields", k + 2)));
            }
            let r = f[2].parse().map_err(|e| bad(format!("line {}: {e}", k + 2)))?;
            edges.push(NetEdge { i: index(f[0], k + 2)?, j: index(f[1], k + 2)?, r });
        }
        Ok(Self { threshold, nodes, edges })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::business_day_sequence;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn day0() -> NaiveDate {
        NaiveDate::from_ymd_opt(2001, 1, 1).unwrap()
    }

    fn curve(id: &str, offset: usize, values: &[Option<f64>]) -> Curve {
        let dates = business_day_sequence(day0(), offset + values.len());
        Curve { market_id: id.into(), points: dates[offset..].iter().copied().zip(values.iter().copied()).collect() }
    }

    fn noisy(n: usize, seed: u64) -> Vec<Option<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Some(rng.random::<f64>())).collect()
    }

    fn random_matrix(k: usize, rng: &mut impl Rng) -> CorrelationMatrix {
        let markets = (0..k).map(|i| format!("m{i}")).collect();
        let pairs = upper_pairs(k).into_iter().map(|p| (p, rng.random_range(-1.0..=1.0), 0)).collect();
        CorrelationMatrix::from_pairs(markets, pairs, vec![0; k])
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 4.0, 7.0, 3.0];
        assert_eq!(pearson(&x, &x).unwrap(), 1.0);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(pearson(&x, &neg).unwrap(), -1.0);
        assert!(matches!(pearson(&x, &[2.0; 5]), Err(NetError::ZeroVariance(_))));
        assert_eq!(pearson(&x, &[1.0; 4]), Err(NetError::LengthMismatch(5, 4)));
        assert_eq!(pearson(&[1.0], &[1.0]), Err(NetError::TooFewPoints(1)));
        // numpy.corrcoef([1,2,4,7,3],[2,1,5,5,0])[0,1]
        let r = pearson(&x, &[2.0, 1.0, 5.0, 5.0, 0.0]).unwrap();
        assert!((r - 0.6981132075471699).abs() < 1e-12, "{r}");
    }

    #[test]
    fn identical_dates_are_all_kept() {
        let a = curve("a", 0, &noisy(40, 1));
        let b = curve("b", 0, &noisy(40, 2));
        let al = align_common_dates(&[a.clone(), b]).unwrap();
        assert_eq!(al.dates.len(), 40);
        assert_eq!(al.values[0], a.points.iter().map(|p| p.1.unwrap()).collect::<Vec<_>>());
    }

    #[test]
    fn disjoint_ranges_do_not_overlap() {
        let a = curve("a", 0, &noisy(40, 1));
        let b = curve("b", 50, &noisy(40, 2));
        assert_eq!(
            align_common_dates(&[a, b]),
            Err(NetError::InsufficientOverlap { found: 0, between: String::new() })
        );
    }

    #[test]
    fn staggered_ranges_match_set_oracle() {
        let mut a = noisy(120, 1);
        a[70] = None;
        a[71] = None;
        let curves = [curve("a", 0, &a), curve("b", 20, &noisy(110, 2)), curve("c", 35, &noisy(60, 3))];
        let al = align_common_dates(&curves).unwrap();

        let sets: Vec<std::collections::HashSet<NaiveDate>> =
            curves.iter().map(|c| c.points.iter().filter(|p| p.1.is_some()).map(|p| p.0).collect()).collect();
        let mut oracle: Vec<NaiveDate> =
            sets[0].iter().filter(|d| sets[1..].iter().all(|s| s.contains(d))).copied().collect();
        oracle.sort();
        assert_eq!(al.dates, oracle);
        assert_eq!(al.dates.len(), 58);
        for (c, row) in curves.iter().zip(&al.values) {
            for (d, v) in al.dates.iter().zip(row) {
                assert_eq!(Some(*v), c.points.iter().find(|p| p.0 == *d).unwrap().1);
            }
        }
    }

    #[test]
    fn too_few_or_duplicate_markets() {
        let a = curve("a", 0, &noisy(40, 1));
        assert_eq!(align_common_dates(std::slice::from_ref(&a)), Err(NetError::TooFewSeries(1)));
        assert_eq!(align_common_dates(&[a.clone(), a]), Err(NetError::DuplicateMarket("a".into())));
    }

    #[test]
    fn copies_give_all_ones() {
        let base = noisy(80, 4);
        let curves: Vec<Curve> = (0..4).map(|k| curve(&format!("m{k}"), 0, &base)).collect();
        for support in [Support::Common, Support::Pairwise] {
            let m = correlation_matrix(&curves, support).unwrap();
            assert!(m.r.iter().flatten().all(|&v| v == 1.0));
            assert!(m.support.iter().flatten().all(|&s| s == 80));
        }
    }

    #[test]
    fn constant_curve_is_named() {
        let curves = [curve("a", 0, &noisy(40, 1)), curve("flat", 0, &[Some(1.0); 40])];
        assert_eq!(correlation_matrix(&curves, Support::Common), Err(NetError::ZeroVariance("curve of `flat`".into())));
    }

    #[test]
    fn pairwise_support_differs_from_common() {
        let curves = [curve("a", 0, &noisy(100, 1)), curve("b", 0, &noisy(100, 2)), curve("c", 60, &noisy(40, 3))];
        let common = correlation_matrix(&curves, Support::Common).unwrap();
        let pairwise = correlation_matrix(&curves, Support::Pairwise).unwrap();
        assert_eq!(common.support[0][1], 40);
        assert_eq!(pairwise.support[0][1], 100);
        assert_eq!(pairwise.support[0][2], 40);
        assert_eq!(common.r[0][2], pairwise.r[0][2]);
        assert_ne!(common.r[0][1], pairwise.r[0][1]);
        let short = [curve("a", 0, &noisy(100, 1)), curve("b", 80, &noisy(40, 2))];
        assert!(matches!(
            correlation_matrix(&short, Support::Pairwise),
            Err(NetError::InsufficientOverlap { found: 20, .. })
        ));
    }

    #[test]
    fn threshold_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_matrix(6, &mut rng);
        assert_eq!(threshold_network(&m, -1.0).unwrap().edges.len(), 15);
        assert_eq!(threshold_network(&m, 1.0).unwrap().edges.len(), 0);
        assert_eq!(threshold_network(&m, 1.0 + 1e-9), Err(NetError::BadThreshold(1.0 + 1e-9)));
        assert!(threshold_network(&m, f64::NAN).is_err());
        let net = threshold_network(&m, 0.0).unwrap();
        assert_eq!(net.nodes.len(), 6);
        assert!(net.edges.iter().all(|e| e.i < e.j && e.r >= 0.0));
    }

    #[test]
    fn threshold_is_inclusive() {
        let markets = vec!["a".to_string(), "b".to_string()];
        let m = CorrelationMatrix::from_pairs(markets, vec![((0, 1), 0.8, 0)], vec![0, 0]);
        assert_eq!(threshold_network(&m, 0.8).unwrap().edges.len(), 1);
    }

    #[test]
    fn exports() {
        let markets = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let m = CorrelationMatrix::from_pairs(
            markets,
            vec![((0, 1), 0.95, 0), ((0, 2), 0.1, 0), ((1, 2), -0.5, 0)],
            vec![0; 3],
        );
        let net = threshold_network(&m, 0.9).unwrap();
        let dot = net.to_dot();
        assert!(dot.starts_with("graph net {"));
        assert!(dot.contains("\"a\" -- \"b\" [r=0.95];"));
        assert!(dot.contains("\"c\";"));

        let v: serde_json::Value = serde_json::from_str(&net.to_json()).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 3);
        assert_eq!(v["edges"][0]["source"], "a");
        assert_eq!(v["edges"][0]["r"], 0.95);

        let mut buf = Vec::new();
        net.write_edge_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "a,b,r\na,b,0.95\n");
        assert_eq!(ThresholdNetwork::read_edge_csv(0.9, net.nodes.clone(), buf.as_slice()).unwrap(), net);

        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"market,a,b,c\na,1,0.95,0.1\n"));
        assert_eq!(CorrelationMatrix::read_csv(buf.as_slice()).unwrap(), (m.markets.clone(), m.r.clone()));
    }

    #[test]
    fn degrees_count_both_ends() {
        let markets = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let m = CorrelationMatrix::from_pairs(
            markets,
            vec![((0, 1), 0.9, 0), ((0, 2), 0.9, 0), ((1, 2), 0.1, 0)],
            vec![0; 3],
        );
        assert_eq!(threshold_network(&m, 0.5).unwrap().degrees(), vec![2, 1, 1]);
    }

    fn vec_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (3usize..60)
            .prop_flat_map(|n| (prop::collection::vec(-100.0f64..100.0, n), prop::collection::vec(-100.0f64..100.0, n)))
    }

    proptest! {
        #[test]
        fn nesting_is_monotone(seed in any::<u64>(), k in 2usize..12, t1 in -1.0f64..=1.0, t2 in -1.0f64..=1.0) {
            let m = random_matrix(k, &mut ChaCha8Rng::seed_from_u64(seed));
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let high = threshold_network(&m, hi).unwrap().edge_set();
            let low = threshold_network(&m, lo).unwrap().edge_set();
            prop_assert!(high.is_subset(&low));
        }

        #[test]
        fn pearson_symmetry_affine_and_negation(
            (x, y) in vec_pair(), a in 0.01f64..100.0, b in -50.0f64..50.0,
        ) {
            let Ok(r) = pearson(&x, &y) else { return Ok(()) };
            prop_assert!(r.abs() <= 1.0);
            prop_assert_eq!(pearson(&y, &x).unwrap(), r);
            let scaled: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            prop_assert!((pearson(&scaled, &y).unwrap() - r).abs() < 1e-9);
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            prop_assert!((pearson(&neg, &y).unwrap() + r).abs() < 1e-12);
        }

        #[test]
        fn matrix_is_symmetric_with_unit_diagonal(seed in any::<u64>(), k in 2usize..7) {
            let curves: Vec<Curve> = (0..k).map(|i| curve(&format!("m{i}"), 0, &noisy(50, seed ^ i as u64))).collect();
            let m = correlation_matrix(&curves, Support::Common).unwrap();
            for i in 0..k {
                prop_assert_eq!(m.r[i][i], 1.0);
                for j in 0..k {
                    prop_assert_eq!(m.r[i][j], m.r[j][i]);
                    prop_assert!(m.r[i][j].abs() <= 1.0 + 1e-12);
                }
            }
        }
    }
}
