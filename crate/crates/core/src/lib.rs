//! Instability index for financial return series.
//!
//! Each return window becomes a weighted natural visibility graph; the
//! distribution of its edge weights gives a normalized Shannon entropy S and
//! Fisher information F, and their ratio SF. Sliding SF scans, the daily
//! SF_R risk ratio, crisis flags and cross-market correlation networks build
//! on that index.
//!
//! - [`ingest`]: price CSVs, business-day alignment, returns
//! - [`visibility`]: graph construction with an exact orientation test
//! - [`infotheory`]: weight histograms, S, F and SF
//! - [`windows`]: sliding scans, SF_R, crisis periods
//! - [`netcorr`]: Pearson matrices and threshold networks
//! - [`synth`]: seeded synthetic markets
//! - [`cli`]: the `sfvg` command line

pub mod cli;
pub mod infotheory;
pub mod ingest;
pub mod netcorr;
pub mod synth;
pub mod visibility;
pub mod windows;
