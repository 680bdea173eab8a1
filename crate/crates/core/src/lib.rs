//! MOSUM-based change-point detection for paired mHealth-style time series.
//!
//! The crate detects local shifts in the mean and variance of a single series
//! (joint detection) and simultaneous cross-series shifts in a pair of series
//! (bivariate detection). Per-time detector pairs are fused into a Mahalanobis
//! distance, thresholded against a Monte-Carlo critical value, screened to
//! local maxima, and optionally wrapped in bootstrap confidence intervals.
//! Two rules then combine the per-detector results into *hotspots*: unions of
//! time intervals in which both a cross-series detector and the anchor series
//! detector indicate change.
//!
//! Modules mirror the processing stages:
//!
//! - [`series`]: ingestion and the randomized inverse-CDF transform that maps
//!   discrete ordinal scores to continuous latent values.
//! - [`local_stats`]: rolling local moments and moment differences.
//! - [`detectors`]: standardized detectors, local correlations, and
//!   Mahalanobis distance traces for all six detector kinds.
//! - [`critical_values`]: Monte-Carlo critical values with a persistent cache.
//! - [`segmentation`]: threshold exceedance, local-maxima screening, and
//!   bootstrap confidence intervals for change-point locations.
//! - [`hotspots`]: the thresholding rule and the confidence-interval rule.
//! - [`simbench`]: synthetic scenario generation and the power/FDR and
//!   hit-rate/interval-length benchmark harness.
//!
//! Everything is deterministic given a seed: parallel Monte-Carlo work derives
//! one child seed per replication so results are independent of scheduling.

#![forbid(unsafe_code)]

pub mod critical_values;
pub mod detectors;
pub mod dist;
mod error;
pub mod hotspots;
pub mod local_stats;
pub mod seeds;
pub mod segmentation;
pub mod series;
pub mod simbench;

pub use error::{Error, Result};
