use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sfvg_core::ingest::{compute_returns, load_price_file, ReturnMode};
use sfvg_core::synth::burst_interval;
use sfvg_core::windows::{RiskSeries, SfSeries};
use tempfile::TempDir;

fn sfvg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfvg")).args(args).output().expect("run sfvg")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn synth(dir: &Path, extra: &[&str]) {
    let mut args = vec!["synth", "-o", p(dir)];
    args.extend_from_slice(extra);
    let o = sfvg(&args);
    assert!(o.status.success(), "{}", stderr(&o));
}

fn std_dev(x: &[f64]) -> f64 {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

fn edges(path: &Path) -> BTreeSet<String> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn synth_is_deterministic_and_bursty() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    synth(&a, &["--scenario", "burst", "--seed", "7"]);
    synth(&b, &["--scenario", "burst", "--seed", "7"]);
    let bytes = fs::read(a.join("burst.csv")).unwrap();
    assert_eq!(bytes, fs::read(b.join("burst.csv")).unwrap());
    assert!(bytes.starts_with(b"date,close\n1995-01-02,100\n"));

    let prices = load_price_file(&a.join("burst.csv")).unwrap();
    let r = compute_returns(&prices, ReturnMode::Log).unwrap();
    let (lo, hi) = burst_interval(prices.len());
    let outside: Vec<f64> = r.values()[..lo].iter().chain(&r.values()[hi..]).copied().collect();
    assert!(std_dev(&r.values()[lo..hi]) > 3.0 * std_dev(&outside));

    let o = sfvg(&["synth", "--length", "100", "-o", p(&a)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("length"));
}

#[test]
fn sf_writes_per_market_and_combined_files() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("data");
    let out = tmp.path().join("out");
    synth(&data, &["--scenario", "gaussian", "--markets", "3", "--length", "800"]);
    let o = sfvg(&["sf", p(&data), "--window", "504", "--step", "63", "--bins", "50", "-o", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));

    let mut rows = 0;
    for m in ["gaussian00", "gaussian01", "gaussian02"] {
        let text = fs::read(out.join(format!("{m}.sf.csv"))).unwrap();
        let s = SfSeries::read_csv(m, text.as_slice()).unwrap();
        // 799 returns -> floor((799 - 504) / 63) + 1 windows
        assert_eq!(s.points.len(), 5);
        let mut again = Vec::new();
        s.write_csv(&mut again).unwrap();
        assert_eq!(again, text);
        rows += s.points.len();
    }
    let all = fs::read_to_string(out.join("all.sf.csv")).unwrap();
    assert!(all.starts_with("market,window_end,sf\ngaussian00,"));
    assert_eq!(all.lines().count(), rows + 1);
}

#[test]
fn sf_parameter_and_data_errors() {
    let tmp = TempDir::new().unwrap();
    let o = sfvg(&["sf", p(tmp.path()), "--window", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("window"));

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let o = sfvg(&["sf", p(&empty), "-o", p(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no input files"));

    let bad = tmp.path().join("bad");
    fs::create_dir(&bad).unwrap();
    fs::write(bad.join("x.csv"), "date,close\n2008-01-02,1\n2008-01-03,oops\n").unwrap();
    let o = sfvg(&["sf", p(&bad), "-o", p(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("x.csv") && msg.contains("line 3"), "{msg}");
}

#[test]
fn risk_defaults_skip_short_markets_and_flag_the_burst() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("data");
    let out = tmp.path().join("out");
    synth(&data, &["--scenario", "burst", "--seed", "42", "--length", "2016"]);
    fs::write(data.join("tiny.csv"), "date,close\n2008-01-02,1\n2008-01-03,2\n2008-01-04,3\n").unwrap();

    let o = sfvg(&["risk", p(&data), "-o", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning: skipping tiny"));
    assert!(!out.join("tiny.sfr.csv").exists());

    let text = fs::read(out.join("burst.sfr.csv")).unwrap();
    let risk = RiskSeries::read_csv("burst", text.as_slice()).unwrap();
    // default window 252 over 2015 returns
    assert_eq!(risk.points.len(), 2015 - 251);
    let mut again = Vec::new();
    risk.write_csv(&mut again).unwrap();
    assert_eq!(again, text);

    // some flagged period's trailing windows cover part of the burst
    let prices = load_price_file(&data.join("burst.csv")).unwrap();
    let dates = compute_returns(&prices, ReturnMode::Log).unwrap().dates().to_vec();
    let (a, b) = burst_interval(2016);
    let crises = fs::read_to_string(out.join("crises.csv")).unwrap();
    assert!(crises.starts_with("market,start,end,peak_date,peak_sfr\n"));
    let covers = crises.lines().skip(1).any(|l| {
        let f: Vec<&str> = l.split(',').collect();
        let (start, end): (chrono::NaiveDate, chrono::NaiveDate) = (f[1].parse().unwrap(), f[2].parse().unwrap());
        start <= dates[b - 1 + 251] && end >= dates[a]
    });
    assert!(covers, "{crises}");
}

#[test]
fn network_nesting_and_validation() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("data");
    let risk = tmp.path().join("risk");
    let net = tmp.path().join("net");
    synth(&data, &["--scenario", "gaussian", "--markets", "5", "--length", "1200"]);
    let o = sfvg(&["risk", p(&data), "-o", p(&risk)]);
    assert!(o.status.success(), "{}", stderr(&o));

    let o = sfvg(&["network", p(&risk), "--thresholds", "0.8,0.9", "-o", p(&net)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["corr.csv", "net_0.8.dot", "net_0.8.json", "net_0.8.csv", "net_0.9.dot", "net_0.9.json", "net_0.9.csv"] {
        assert!(net.join(f).exists(), "{f}");
    }
    assert!(edges(&net.join("net_0.9.csv")).is_subset(&edges(&net.join("net_0.8.csv"))));
    let everything = sfvg(&["network", p(&risk), "--thresholds", "-1", "-o", p(&net)]);
    assert!(everything.status.success());
    assert_eq!(edges(&net.join("net_-1.csv")).len(), 10);

    let o = sfvg(&["network", p(&risk), "--thresholds", "1.5", "-o", p(&net)]);
    assert_eq!(o.status.code(), Some(2));

    let single = tmp.path().join("single");
    fs::create_dir(&single).unwrap();
    fs::copy(risk.join("gaussian00.sfr.csv"), single.join("gaussian00.sfr.csv")).unwrap();
    let o = sfvg(&["network", p(&single), "-o", p(&net)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("need at least two markets"));
}

#[test]
fn network_from_sf_curves() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("data");
    let sf = tmp.path().join("sf");
    synth(&data, &["--scenario", "gaussian", "--markets", "3", "--length", "3000"]);
    assert!(sfvg(&["sf", p(&data), "--step", "5", "-o", p(&sf)]).status.success());
    let o = sfvg(&["network", p(&sf), "--source", "sf", "--thresholds", "0", "-o", p(&sf)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let corr = fs::read_to_string(sf.join("corr.csv")).unwrap();
    assert!(corr.starts_with("market,gaussian00,gaussian01,gaussian02\n"));
}

#[test]
fn graph_dump() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &["--scenario", "gaussian", "--length", "600"]);
    let file = tmp.path().join("gaussian.csv");
    let o = sfvg(&["graph", p(&file), "--start", "10", "--len", "64"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dot = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(dot.starts_with("graph vg {"));
    assert!(stderr(&o).contains("nodes=64"));

    let csv = tmp.path().join("g.csv");
    assert!(sfvg(&["graph", p(&file), "--len", "8", "--format", "csv", "-o", p(&csv)]).status.success());
    assert!(fs::read_to_string(&csv).unwrap().starts_with("i,j,w\n"));

    let o = sfvg(&["graph", p(&file), "--start", "590", "--len", "64"]);
    assert_eq!(o.status.code(), Some(2));
}
