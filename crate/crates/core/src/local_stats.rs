//! Rolling local moments and moment differences.
//!
//! For a bandwidth `G`, every interior time point `k` compares the windows
//! `(k-G, k]` and `(k, k+G]`: differences of window means and variances, and
//! locally averaged scales (standard deviation, kurtosis scale, third
//! moment) that standardize those differences. Boundary points fall back to
//! CUSUM-style statistics on the first/last `2G` observations, weighted so
//! their null variance matches the interior formulas.
//!
//! All traces are computed from prefix sums over the globally centered
//! series, which makes each per-`k` value an O(1) query and keeps the raw
//! moment expansions well conditioned.

use serde::{Deserialize, Serialize};

use crate::series::ContinuousSeries;
use crate::{Error, Result};

/// Analysis window configuration shared by every detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    /// Series length in time points.
    pub n: usize,
    /// Bandwidth `G`: half-width of the comparison windows.
    pub bandwidth: usize,
    /// Screening fraction in (0, 1); emitted change points are separated by
    /// more than `ceil(eta * G)`.
    pub eta: f64,
    /// Significance level in (0, 1).
    pub alpha: f64,
}

impl WindowConfig {
    pub fn new(n: usize, bandwidth: usize, eta: f64, alpha: f64) -> Result<Self> {
        if bandwidth == 0 {
            return Err(Error::InvalidConfig("bandwidth must be >= 1".into()));
        }
        if n < 2 * bandwidth {
            return Err(Error::BandwidthTooLarge {
                bandwidth,
                min_len: 2 * bandwidth,
                n,
            });
        }
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "eta must be in (0, 1), got {eta}"
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in (0, 1), got {alpha}"
            )));
        }
        Ok(Self {
            n,
            bandwidth,
            eta,
            alpha,
        })
    }

    /// Suppression radius used by local-maxima screening.
    pub fn screening_radius(&self) -> usize {
        (self.eta * self.bandwidth as f64).ceil() as usize
    }

    pub(crate) fn check_series(&self, series: &ContinuousSeries) -> Result<()> {
        if series.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: series.len(),
            });
        }
        Ok(())
    }
}

/// Position of a time point relative to the rolling windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    LeftBoundary,
    Interior,
    RightBoundary,
}

/// Region of 1-based time point `k` under `cfg`.
pub fn region_of(cfg: &WindowConfig, k: usize) -> Region {
    debug_assert!(k >= 1 && k <= cfg.n);
    if k < cfg.bandwidth {
        Region::LeftBoundary
    } else if k <= cfg.n - cfg.bandwidth {
        Region::Interior
    } else {
        Region::RightBoundary
    }
}

/// All rolling moments of one series under one window configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMoments {
    /// Difference of local means around each `k`.
    pub d_mean: Vec<f64>,
    /// Difference of local variances around each `k`.
    pub d_var: Vec<f64>,
    /// Locally averaged standard deviation.
    pub s_bar: Vec<f64>,
    /// Locally averaged kurtosis scale (square root of the averaged
    /// variance-of-squared-deviations).
    pub v_bar: Vec<f64>,
    /// Locally averaged third central moment.
    pub k_bar: Vec<f64>,
    /// Region tag per time point.
    pub regions: Vec<Region>,
    pub cfg: WindowConfig,
}

/// Prefix sums of the centered series and its powers, 1-based inclusive
/// window queries in O(1).
#[derive(Debug, Clone)]
pub(crate) struct SeriesSums {
    p1: Vec<f64>,
    p2: Vec<f64>,
    p3: Vec<f64>,
    p4: Vec<f64>,
    pub(crate) center: f64,
}

impl SeriesSums {
    pub(crate) fn new(values: &[f64]) -> Self {
        let n = values.len();
        let center = values.iter().sum::<f64>() / n as f64;
        let mut p1 = Vec::with_capacity(n + 1);
        let mut p2 = Vec::with_capacity(n + 1);
        let mut p3 = Vec::with_capacity(n + 1);
        let mut p4 = Vec::with_capacity(n + 1);
        p1.push(0.0);
        p2.push(0.0);
        p3.push(0.0);
        p4.push(0.0);
        let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
        for &x in values {
            let u = x - center;
            let u2 = u * u;
            s1 += u;
            s2 += u2;
            s3 += u2 * u;
            s4 += u2 * u2;
            p1.push(s1);
            p2.push(s2);
            p3.push(s3);
            p4.push(s4);
        }
        Self {
            p1,
            p2,
            p3,
            p4,
            center,
        }
    }

    /// Sum of centered values over `[a, b]`, 1-based inclusive.
    #[inline]
    pub(crate) fn sum(&self, a: usize, b: usize) -> f64 {
        self.p1[b] - self.p1[a - 1]
    }

    /// Mean of the centered series over `[a, b]`.
    #[inline]
    pub(crate) fn mean(&self, a: usize, b: usize) -> f64 {
        self.sum(a, b) / (b - a + 1) as f64
    }

    /// Population variance over `[a, b]`.
    #[inline]
    pub(crate) fn var(&self, a: usize, b: usize) -> f64 {
        let m = (b - a + 1) as f64;
        let mu = self.mean(a, b);
        ((self.p2[b] - self.p2[a - 1]) / m - mu * mu).max(0.0)
    }

    /// Third central moment over `[a, b]`.
    #[inline]
    pub(crate) fn m3(&self, a: usize, b: usize) -> f64 {
        let m = (b - a + 1) as f64;
        let mu = self.mean(a, b);
        let r2 = (self.p2[b] - self.p2[a - 1]) / m;
        let r3 = (self.p3[b] - self.p3[a - 1]) / m;
        r3 - 3.0 * mu * r2 + 2.0 * mu * mu * mu
    }

    /// Fourth central moment over `[a, b]`.
    #[inline]
    pub(crate) fn m4(&self, a: usize, b: usize) -> f64 {
        let m = (b - a + 1) as f64;
        let mu = self.mean(a, b);
        let mu2 = mu * mu;
        let r2 = (self.p2[b] - self.p2[a - 1]) / m;
        let r3 = (self.p3[b] - self.p3[a - 1]) / m;
        let r4 = (self.p4[b] - self.p4[a - 1]) / m;
        r4 - 4.0 * mu * r3 + 6.0 * mu2 * r2 - 3.0 * mu2 * mu2
    }

    /// Variance of squared deviations over `[a, b]`:
    /// mean of ((x - mean)^2 - var)^2.
    #[inline]
    pub(crate) fn v2(&self, a: usize, b: usize) -> f64 {
        let var = self.var(a, b);
        (self.m4(a, b) - var * var).max(0.0)
    }

    /// Sum of squared deviations from an external center `mu` over `[a, b]`.
    #[inline]
    fn ssd_from(&self, a: usize, b: usize, mu: f64) -> f64 {
        let m = (b - a + 1) as f64;
        (self.p2[b] - self.p2[a - 1]) - 2.0 * mu * self.sum(a, b) + m * mu * mu
    }
}

fn check_range(n: usize, t1: usize, t2: usize) -> Result<()> {
    if t1 == 0 || t1 > t2 || t2 > n {
        return Err(Error::SegmentOutOfRange { t1, t2, n });
    }
    Ok(())
}

/// Arithmetic mean of `series[t1..=t2]` (1-based inclusive).
pub fn segment_mean(series: &ContinuousSeries, t1: usize, t2: usize) -> Result<f64> {
    check_range(series.len(), t1, t2)?;
    let slice = &series.values()[t1 - 1..t2];
    Ok(slice.iter().sum::<f64>() / slice.len() as f64)
}

/// Population variance of `series[t1..=t2]` (divisor `t2 - t1 + 1`).
pub fn segment_var(series: &ContinuousSeries, t1: usize, t2: usize) -> Result<f64> {
    check_range(series.len(), t1, t2)?;
    let slice = &series.values()[t1 - 1..t2];
    let mean = slice.iter().sum::<f64>() / slice.len() as f64;
    Ok(slice.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / slice.len() as f64)
}

fn left_weight(k: usize, g: usize) -> f64 {
    2.0 / ((k * (2 * g - k)) as f64).sqrt()
}

fn right_weight(k: usize, g: usize, n: usize) -> f64 {
    let m = n + 1 - k;
    2.0 / ((m * (2 * g - m)) as f64).sqrt()
}

fn compute_d_mean(sums: &SeriesSums, cfg: &WindowConfig) -> Vec<f64> {
    let (n, g) = (cfg.n, cfg.bandwidth);
    let left_mean = sums.mean(1, 2 * g);
    let right_mean = sums.mean(n - 2 * g + 1, n);
    (1..=n)
        .map(|k| match region_of(cfg, k) {
            Region::LeftBoundary => left_weight(k, g) * (k as f64 * left_mean - sums.sum(1, k)),
            Region::Interior => sums.mean(k + 1, k + g) - sums.mean(k - g + 1, k),
            Region::RightBoundary => {
                let m = n + 1 - k;
                right_weight(k, g, n) * (m as f64 * right_mean - sums.sum(k, n))
            }
        })
        .collect()
}

fn compute_d_var(sums: &SeriesSums, cfg: &WindowConfig) -> Vec<f64> {
    let (n, g) = (cfg.n, cfg.bandwidth);
    let left_mean = sums.mean(1, 2 * g);
    let left_var = sums.var(1, 2 * g);
    let right_mean = sums.mean(n - 2 * g + 1, n);
    let right_var = sums.var(n - 2 * g + 1, n);
    (1..=n)
        .map(|k| match region_of(cfg, k) {
            Region::LeftBoundary => {
                left_weight(k, g) * (k as f64 * left_var - sums.ssd_from(1, k, left_mean))
            }
            Region::Interior => sums.var(k + 1, k + g) - sums.var(k - g + 1, k),
            Region::RightBoundary => {
                let m = n + 1 - k;
                right_weight(k, g, n) * (m as f64 * right_var - sums.ssd_from(k, n, right_mean))
            }
        })
        .collect()
}

fn compute_scales(sums: &SeriesSums, cfg: &WindowConfig) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (n, g) = (cfg.n, cfg.bandwidth);
    let left = (sums.var(1, 2 * g), sums.v2(1, 2 * g), sums.m3(1, 2 * g));
    let right = (
        sums.var(n - 2 * g + 1, n),
        sums.v2(n - 2 * g + 1, n),
        sums.m3(n - 2 * g + 1, n),
    );
    let mut s_bar = Vec::with_capacity(n);
    let mut v_bar = Vec::with_capacity(n);
    let mut k_bar = Vec::with_capacity(n);
    for k in 1..=n {
        let (s2, v2, m3) = match region_of(cfg, k) {
            Region::LeftBoundary => left,
            Region::RightBoundary => right,
            Region::Interior => (
                0.5 * (sums.var(k + 1, k + g) + sums.var(k - g + 1, k)),
                0.5 * (sums.v2(k + 1, k + g) + sums.v2(k - g + 1, k)),
                0.5 * (sums.m3(k + 1, k + g) + sums.m3(k - g + 1, k)),
            ),
        };
        s_bar.push(s2.sqrt());
        v_bar.push(v2.sqrt());
        k_bar.push(m3);
    }
    (s_bar, v_bar, k_bar)
}

/// Difference of local means around every time point.
pub fn mean_diff_trace(series: &ContinuousSeries, cfg: &WindowConfig) -> Result<Vec<f64>> {
    cfg.check_series(series)?;
    Ok(compute_d_mean(&SeriesSums::new(series.values()), cfg))
}

/// Difference of local variances around every time point.
pub fn var_diff_trace(series: &ContinuousSeries, cfg: &WindowConfig) -> Result<Vec<f64>> {
    cfg.check_series(series)?;
    Ok(compute_d_var(&SeriesSums::new(series.values()), cfg))
}

/// Locally averaged scales `(s_bar, v_bar, k_bar)` at every time point.
pub fn averaged_scales(
    series: &ContinuousSeries,
    cfg: &WindowConfig,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    cfg.check_series(series)?;
    Ok(compute_scales(&SeriesSums::new(series.values()), cfg))
}

/// Computes all rolling moments of one series in a single pass.
pub fn local_moments(series: &ContinuousSeries, cfg: &WindowConfig) -> Result<LocalMoments> {
    cfg.check_series(series)?;
    let sums = SeriesSums::new(series.values());
    Ok(local_moments_from_sums(&sums, cfg))
}

pub(crate) fn local_moments_from_sums(sums: &SeriesSums, cfg: &WindowConfig) -> LocalMoments {
    let (s_bar, v_bar, k_bar) = compute_scales(sums, cfg);
    LocalMoments {
        d_mean: compute_d_mean(sums, cfg),
        d_var: compute_d_var(sums, cfg),
        s_bar,
        v_bar,
        k_bar,
        regions: (1..=cfg.n).map(|k| region_of(cfg, k)).collect(),
        cfg: *cfg,
    }
}
