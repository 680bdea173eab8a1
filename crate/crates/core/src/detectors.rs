//! Standardized detectors and Mahalanobis distance traces.
//!
//! At each time point the mean detector and the variance detector of a
//! series (or one detector from each series of a pair) form a 2-vector:
//! each component is the local moment difference divided by its locally
//! averaged scale, carrying a `sqrt(G/2)` factor so that under a stationary
//! null each component matches the unit scale of the random-walk functional
//! behind the Monte-Carlo critical value. The squared Mahalanobis length of
//! that vector under the locally estimated 2x2 correlation is the per-time
//! test statistic.

use serde::{Deserialize, Serialize};

use crate::local_stats::{local_moments_from_sums, LocalMoments, Region, SeriesSums, WindowConfig};
use crate::series::ContinuousSeries;
use crate::{Error, Result};

/// Correlation clamp keeping the 2x2 matrix invertible.
pub const RHO_CLAMP: f64 = 0.999;
/// Scales below this are treated as degenerate (locally constant data).
const DEGENERATE_EPS: f64 = 1e-12;

/// Which local feature a detector component tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Mean,
    Variance,
}

/// The six detector targets: two univariate joint detectors and the four
/// cross-series combinations (feature of Y paired with feature of X).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    /// Joint mean+variance detector of the anchor series Y.
    UniY,
    /// Joint mean+variance detector of the paired series X.
    UniX,
    /// Mean of Y with mean of X.
    MeanMean,
    /// Mean of Y with variance of X.
    MeanVar,
    /// Variance of Y with mean of X.
    VarMean,
    /// Variance of Y with variance of X.
    VarVar,
}

impl DetectorKind {
    /// All six kinds in canonical order.
    pub fn all() -> [DetectorKind; 6] {
        [
            DetectorKind::UniY,
            DetectorKind::UniX,
            DetectorKind::MeanMean,
            DetectorKind::MeanVar,
            DetectorKind::VarMean,
            DetectorKind::VarVar,
        ]
    }

    /// The four cross-series kinds in canonical order.
    pub fn cross_kinds() -> [DetectorKind; 4] {
        [
            DetectorKind::MeanMean,
            DetectorKind::MeanVar,
            DetectorKind::VarMean,
            DetectorKind::VarVar,
        ]
    }

    pub fn is_cross(self) -> bool {
        !matches!(self, DetectorKind::UniY | DetectorKind::UniX)
    }

    /// Features tracked by the (first, second) components.
    pub fn components(self) -> (Feature, Feature) {
        match self {
            DetectorKind::UniY | DetectorKind::UniX => (Feature::Mean, Feature::Variance),
            DetectorKind::MeanMean => (Feature::Mean, Feature::Mean),
            DetectorKind::MeanVar => (Feature::Mean, Feature::Variance),
            DetectorKind::VarMean => (Feature::Variance, Feature::Mean),
            DetectorKind::VarVar => (Feature::Variance, Feature::Variance),
        }
    }

    /// Short token used in CLI flags and file names.
    pub fn token(self) -> &'static str {
        match self {
            DetectorKind::UniY => "y",
            DetectorKind::UniX => "x",
            DetectorKind::MeanMean => "yx",
            DetectorKind::MeanVar => "yx2",
            DetectorKind::VarMean => "y2x",
            DetectorKind::VarVar => "y2x2",
        }
    }

    pub fn parse_token(token: &str) -> Option<DetectorKind> {
        DetectorKind::all()
            .into_iter()
            .find(|k| k.token() == token.to_ascii_lowercase())
    }
}

impl std::fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            DetectorKind::UniY => "Y",
            DetectorKind::UniX => "X",
            DetectorKind::MeanMean => "YX",
            DetectorKind::MeanVar => "YX2",
            DetectorKind::VarMean => "Y2X",
            DetectorKind::VarVar => "Y2X2",
        };
        f.write_str(label)
    }
}

/// Per-time detector values for one detector kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorTrace {
    pub kind: DetectorKind,
    /// First standardized component per time point.
    pub t1: Vec<f64>,
    /// Second standardized component per time point.
    pub t2: Vec<f64>,
    /// Local correlation estimate, clamped to [-0.999, 0.999].
    pub rho: Vec<f64>,
    /// Mahalanobis distance per time point, always >= 0.
    pub d2: Vec<f64>,
    pub cfg: WindowConfig,
    /// 1-based time points where a degenerate scale forced the 0/0
    /// convention or the ratio sentinel.
    pub degenerate: Vec<usize>,
}

impl DetectorTrace {
    pub fn len(&self) -> usize {
        self.d2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d2.is_empty()
    }

    /// Region of 1-based `k` under this trace's configuration.
    pub fn region(&self, k: usize) -> Region {
        crate::local_stats::region_of(&self.cfg, k)
    }
}

/// Ratio with the degenerate-scale convention: 0/0 is 0, and a nonzero
/// numerator over a vanishing scale saturates at `num / 1e-12`.
fn guarded_ratio(num: f64, den: f64) -> (f64, bool) {
    if den < DEGENERATE_EPS {
        if num == 0.0 {
            (0.0, true)
        } else {
            (num / DEGENERATE_EPS, true)
        }
    } else {
        (num / den, false)
    }
}

/// Closed-form Mahalanobis distance of `(t1, t2)` under unit variances and
/// correlation `rho` (|rho| < 1).
pub(crate) fn mahalanobis(t1: f64, t2: f64, rho: f64) -> f64 {
    ((t1 * t1 - 2.0 * rho * t1 * t2 + t2 * t2) / (1.0 - rho * rho)).max(0.0)
}

fn component_trace(
    moments: &LocalMoments,
    feature: Feature,
    degenerate: &mut Vec<usize>,
    seen: &mut [bool],
) -> Vec<f64> {
    let scale = (moments.cfg.bandwidth as f64 / 2.0).sqrt();
    let (diffs, scales) = match feature {
        Feature::Mean => (&moments.d_mean, &moments.s_bar),
        Feature::Variance => (&moments.d_var, &moments.v_bar),
    };
    diffs
        .iter()
        .zip(scales)
        .enumerate()
        .map(|(i, (&num, &den))| {
            let (ratio, flagged) = guarded_ratio(num, den);
            if flagged && !seen[i] {
                seen[i] = true;
                degenerate.push(i + 1);
            }
            scale * ratio
        })
        .collect()
}

/// Standardized mean-change detector trace.
pub fn t1_trace(series: &ContinuousSeries, cfg: &WindowConfig) -> Result<Vec<f64>> {
    let moments = crate::local_stats::local_moments(series, cfg)?;
    let mut seen = vec![false; cfg.n];
    Ok(component_trace(
        &moments,
        Feature::Mean,
        &mut Vec::new(),
        &mut seen,
    ))
}

/// Standardized variance-change detector trace.
pub fn t2_trace(series: &ContinuousSeries, cfg: &WindowConfig) -> Result<Vec<f64>> {
    let moments = crate::local_stats::local_moments(series, cfg)?;
    let mut seen = vec![false; cfg.n];
    Ok(component_trace(
        &moments,
        Feature::Variance,
        &mut Vec::new(),
        &mut seen,
    ))
}

fn assemble_trace(
    kind: DetectorKind,
    t1: Vec<f64>,
    t2: Vec<f64>,
    rho_raw: Vec<(f64, bool)>,
    cfg: WindowConfig,
    mut degenerate: Vec<usize>,
    seen: Vec<bool>,
) -> DetectorTrace {
    let mut rho = Vec::with_capacity(cfg.n);
    let mut d2 = Vec::with_capacity(cfg.n);
    let mut seen = seen;
    for (i, (raw, flagged)) in rho_raw.into_iter().enumerate() {
        if flagged && !seen[i] {
            seen[i] = true;
            degenerate.push(i + 1);
        }
        let clamped = raw.clamp(-RHO_CLAMP, RHO_CLAMP);
        rho.push(clamped);
        d2.push(mahalanobis(t1[i], t2[i], clamped));
    }
    degenerate.sort_unstable();
    DetectorTrace {
        kind,
        t1,
        t2,
        rho,
        d2,
        cfg,
        degenerate,
    }
}

/// Joint mean+variance detector of a single series.
pub fn joint_univariate(
    series: &ContinuousSeries,
    cfg: &WindowConfig,
    kind: DetectorKind,
) -> Result<DetectorTrace> {
    if kind.is_cross() {
        return Err(Error::InvalidKind {
            kind,
            reason: "joint_univariate accepts only the univariate kinds".into(),
        });
    }
    cfg.check_series(series)?;
    let sums = SeriesSums::new(series.values());
    let moments = local_moments_from_sums(&sums, cfg);
    let mut degenerate = Vec::new();
    let mut seen = vec![false; cfg.n];
    let t1 = component_trace(&moments, Feature::Mean, &mut degenerate, &mut seen);
    let t2 = component_trace(&moments, Feature::Variance, &mut degenerate, &mut seen);
    let rho_raw: Vec<(f64, bool)> = (0..cfg.n)
        .map(|i| {
            let den = moments.s_bar[i] * moments.v_bar[i];
            let (ratio, flagged) = guarded_rho(moments.k_bar[i], den);
            (ratio, flagged)
        })
        .collect();
    Ok(assemble_trace(
        kind, t1, t2, rho_raw, *cfg, degenerate, seen,
    ))
}

/// Correlation ratio with a zero fallback on degenerate scales.
fn guarded_rho(num: f64, den: f64) -> (f64, bool) {
    if den < DEGENERATE_EPS {
        (0.0, true)
    } else {
        (num / den, false)
    }
}

/// Prefix sums of centered cross products for a pair of series.
struct PairSums {
    uv: Vec<f64>,
    uuv: Vec<f64>,
    uvv: Vec<f64>,
    uuvv: Vec<f64>,
}

impl PairSums {
    fn new(y: &[f64], x: &[f64], y_center: f64, x_center: f64) -> Self {
        let n = y.len();
        let mut uv = Vec::with_capacity(n + 1);
        let mut uuv = Vec::with_capacity(n + 1);
        let mut uvv = Vec::with_capacity(n + 1);
        let mut uuvv = Vec::with_capacity(n + 1);
        uv.push(0.0);
        uuv.push(0.0);
        uvv.push(0.0);
        uuvv.push(0.0);
        let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let u = y[i] - y_center;
            let v = x[i] - x_center;
            s1 += u * v;
            s2 += u * u * v;
            s3 += u * v * v;
            s4 += u * u * v * v;
            uv.push(s1);
            uuv.push(s2);
            uvv.push(s3);
            uuvv.push(s4);
        }
        Self { uv, uuv, uvv, uuvv }
    }

    #[inline]
    fn window_mean(p: &[f64], a: usize, b: usize) -> f64 {
        (p[b] - p[a - 1]) / (b - a + 1) as f64
    }

    /// Centered cross moment over `[a, b]` matching the detector pair:
    /// each component contributes its centered power (1 for a mean
    /// component, 2 for a variance component), and the variance-variance
    /// pair is additionally centered by the window variances.
    fn cross_moment(
        &self,
        y: &SeriesSums,
        x: &SeriesSums,
        pair: (Feature, Feature),
        a: usize,
        b: usize,
    ) -> f64 {
        let mu = y.mean(a, b);
        let mv = x.mean(a, b);
        let m11 = Self::window_mean(&self.uv, a, b);
        match pair {
            (Feature::Mean, Feature::Mean) => m11 - mu * mv,
            (Feature::Mean, Feature::Variance) => {
                let m12 = Self::window_mean(&self.uvv, a, b);
                let rvv = x.var(a, b) + mv * mv; // raw second moment of v
                m12 - 2.0 * mv * m11 - mu * rvv + 2.0 * mu * mv * mv
            }
            (Feature::Variance, Feature::Mean) => {
                let m21 = Self::window_mean(&self.uuv, a, b);
                let ruu = y.var(a, b) + mu * mu;
                m21 - 2.0 * mu * m11 - mv * ruu + 2.0 * mv * mu * mu
            }
            (Feature::Variance, Feature::Variance) => {
                let m12 = Self::window_mean(&self.uvv, a, b);
                let m21 = Self::window_mean(&self.uuv, a, b);
                let m22 = Self::window_mean(&self.uuvv, a, b);
                let ruu = y.var(a, b) + mu * mu;
                let rvv = x.var(a, b) + mv * mv;
                let centered = m22 - 2.0 * mv * m21 - 2.0 * mu * m12
                    + mv * mv * ruu
                    + mu * mu * rvv
                    + 4.0 * mu * mv * m11
                    - 3.0 * mu * mu * mv * mv;
                centered - y.var(a, b) * x.var(a, b)
            }
        }
    }
}

/// Cross-series joint detector for one of the four cross kinds.
///
/// The first component tracks the declared feature of `y`, the second the
/// declared feature of `x`; the local correlation is the matching centered
/// cross moment scaled by the two components' local scales.
pub fn joint_bivariate(
    y: &ContinuousSeries,
    x: &ContinuousSeries,
    kind: DetectorKind,
    cfg: &WindowConfig,
) -> Result<DetectorTrace> {
    if !kind.is_cross() {
        return Err(Error::InvalidKind {
            kind,
            reason: "joint_bivariate accepts only the cross kinds".into(),
        });
    }
    if y.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: x.len(),
        });
    }
    cfg.check_series(y)?;
    let (n, g) = (cfg.n, cfg.bandwidth);

    let y_sums = SeriesSums::new(y.values());
    let x_sums = SeriesSums::new(x.values());
    let y_moments = local_moments_from_sums(&y_sums, cfg);
    let x_moments = local_moments_from_sums(&x_sums, cfg);
    let pair_sums = PairSums::new(y.values(), x.values(), y_sums.center, x_sums.center);

    let pair = kind.components();
    let mut degenerate = Vec::new();
    let mut seen = vec![false; n];
    let t1 = component_trace(&y_moments, pair.0, &mut degenerate, &mut seen);
    let t2 = component_trace(&x_moments, pair.1, &mut degenerate, &mut seen);

    let scale_of = |moments: &LocalMoments, feature: Feature, i: usize| match feature {
        Feature::Mean => moments.s_bar[i],
        Feature::Variance => moments.v_bar[i],
    };

    let cross_left = pair_sums.cross_moment(&y_sums, &x_sums, pair, 1, 2 * g);
    let cross_right = pair_sums.cross_moment(&y_sums, &x_sums, pair, n - 2 * g + 1, n);
    let rho_raw: Vec<(f64, bool)> = (1..=n)
        .map(|k| {
            let cross = match crate::local_stats::region_of(cfg, k) {
                Region::LeftBoundary => cross_left,
                Region::RightBoundary => cross_right,
                Region::Interior => {
                    0.5 * (pair_sums.cross_moment(&y_sums, &x_sums, pair, k + 1, k + g)
                        + pair_sums.cross_moment(&y_sums, &x_sums, pair, k - g + 1, k))
                }
            };
            let den = scale_of(&y_moments, pair.0, k - 1) * scale_of(&x_moments, pair.1, k - 1);
            guarded_rho(cross, den)
        })
        .collect();

    Ok(assemble_trace(
        kind, t1, t2, rho_raw, *cfg, degenerate, seen,
    ))
}
