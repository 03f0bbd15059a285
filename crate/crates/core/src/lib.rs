//! Benford first-significant-digit analysis for social network counts.
//!
//! - [`digits`]: digit extraction, the expected distribution, histograms
//! - [`stats`]: Pearson r, MAD, chi-square and the combined report
//! - [`ingest`]: streaming edge-list and CSV readers
//! - [`ego`]: per-user egocentric scoring and classification
//! - [`synth`]: seeded conforming and anomalous populations

pub mod digits;
pub mod ego;
pub mod error;
pub mod ingest;
pub mod rng;
pub mod stats;
pub mod synth;

pub use digits::{benford_expected, fsd, BenfordExpected, FsdHistogram, DIGITS};
pub use ego::{classify, scan_egos, Bin, ClassificationThresholds, EgoOptions, EgoReport, EgoSummary};
pub use error::{ConfigError, DomainError, IngestError, LookupError, StatsError};
pub use stats::{chi_square, conformance, conformance_with, mad, pearson_r, ChiSquare, ConformanceReport};
