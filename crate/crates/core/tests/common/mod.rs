//! Naive re-implementations used as independent oracles.
//!
//! Everything here is written as direct per-window two-pass loops with no
//! prefix sums and no shared code with the library implementation. The
//! Mahalanobis distance goes through an explicit 2x2 linear solve instead
//! of the closed form, and the threshold oracle uses a different RNG
//! family and stream layout.

#![allow(dead_code)]

use hotspot_core::detectors::DetectorKind;
use rand::prelude::*;

pub fn mean(v: &[f64], a: usize, b: usize) -> f64 {
    v[a - 1..b].iter().sum::<f64>() / (b - a + 1) as f64
}

pub fn var(v: &[f64], a: usize, b: usize) -> f64 {
    let m = mean(v, a, b);
    v[a - 1..b].iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (b - a + 1) as f64
}

pub fn third_moment(v: &[f64], a: usize, b: usize) -> f64 {
    let m = mean(v, a, b);
    v[a - 1..b].iter().map(|x| (x - m).powi(3)).sum::<f64>() / (b - a + 1) as f64
}

pub fn squared_dev_var(v: &[f64], a: usize, b: usize) -> f64 {
    let m = mean(v, a, b);
    let s2 = var(v, a, b);
    v[a - 1..b]
        .iter()
        .map(|x| ((x - m) * (x - m) - s2).powi(2))
        .sum::<f64>()
        / (b - a + 1) as f64
}

/// Direct evaluation of the three-case local mean difference.
pub fn d_mean(v: &[f64], g: usize) -> Vec<f64> {
    let n = v.len();
    (1..=n)
        .map(|k| {
            if k < g {
                let c = 2.0 / ((k * (2 * g - k)) as f64).sqrt();
                let w = mean(v, 1, 2 * g);
                c * (1..=k).map(|t| w - v[t - 1]).sum::<f64>()
            } else if k <= n - g {
                mean(v, k + 1, k + g) - mean(v, k - g + 1, k)
            } else {
                let m = n + 1 - k;
                let c = 2.0 / ((m * (2 * g - m)) as f64).sqrt();
                let w = mean(v, n - 2 * g + 1, n);
                c * (k..=n).map(|t| w - v[t - 1]).sum::<f64>()
            }
        })
        .collect()
}

/// Direct evaluation of the three-case local variance difference.
pub fn d_var(v: &[f64], g: usize) -> Vec<f64> {
    let n = v.len();
    (1..=n)
        .map(|k| {
            if k < g {
                let c = 2.0 / ((k * (2 * g - k)) as f64).sqrt();
                let w_mean = mean(v, 1, 2 * g);
                let w_var = var(v, 1, 2 * g);
                c * (1..=k)
                    .map(|t| w_var - (v[t - 1] - w_mean) * (v[t - 1] - w_mean))
                    .sum::<f64>()
            } else if k <= n - g {
                var(v, k + 1, k + g) - var(v, k - g + 1, k)
            } else {
                let m = n + 1 - k;
                let c = 2.0 / ((m * (2 * g - m)) as f64).sqrt();
                let w_mean = mean(v, n - 2 * g + 1, n);
                let w_var = var(v, n - 2 * g + 1, n);
                c * (k..=n)
                    .map(|t| w_var - (v[t - 1] - w_mean) * (v[t - 1] - w_mean))
                    .sum::<f64>()
            }
        })
        .collect()
}

/// Locally averaged scales: (s_bar, v_bar, k_bar).
pub fn scales(v: &[f64], g: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = v.len();
    let mut s_bar = Vec::new();
    let mut v_bar = Vec::new();
    let mut k_bar = Vec::new();
    for k in 1..=n {
        let (s2, v2, m3) = if k < g {
            (
                var(v, 1, 2 * g),
                squared_dev_var(v, 1, 2 * g),
                third_moment(v, 1, 2 * g),
            )
        } else if k <= n - g {
            (
                0.5 * (var(v, k + 1, k + g) + var(v, k - g + 1, k)),
                0.5 * (squared_dev_var(v, k + 1, k + g) + squared_dev_var(v, k - g + 1, k)),
                0.5 * (third_moment(v, k + 1, k + g) + third_moment(v, k - g + 1, k)),
            )
        } else {
            (
                var(v, n - 2 * g + 1, n),
                squared_dev_var(v, n - 2 * g + 1, n),
                third_moment(v, n - 2 * g + 1, n),
            )
        };
        s_bar.push(s2.sqrt());
        v_bar.push(v2.max(0.0).sqrt());
        k_bar.push(m3);
    }
    (s_bar, v_bar, k_bar)
}

const EPS: f64 = 1e-12;
const CLAMP: f64 = 0.999;

fn guarded(num: f64, den: f64) -> f64 {
    if den < EPS {
        if num == 0.0 {
            0.0
        } else {
            num / EPS
        }
    } else {
        num / den
    }
}

/// Mahalanobis distance via an explicit 2x2 linear solve (Gaussian
/// elimination), independent of the closed form.
pub fn solve_mahalanobis(t1: f64, t2: f64, rho: f64) -> f64 {
    // Solve [1 rho; rho 1] z = [t1; t2].
    let pivot = rho / 1.0;
    let r2 = 1.0 - pivot * rho;
    let b2 = t2 - pivot * t1;
    let z2 = b2 / r2;
    let z1 = t1 - rho * z2;
    (t1 * z1 + t2 * z2).max(0.0)
}

pub struct NaiveTrace {
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    pub rho: Vec<f64>,
    pub d2: Vec<f64>,
}

/// Joint univariate detector trace via the naive path.
pub fn univariate_trace(v: &[f64], g: usize) -> NaiveTrace {
    let n = v.len();
    let scale = (g as f64 / 2.0).sqrt();
    let dm = d_mean(v, g);
    let dv = d_var(v, g);
    let (s_bar, v_bar, k_bar) = scales(v, g);
    let mut out = NaiveTrace {
        t1: Vec::new(),
        t2: Vec::new(),
        rho: Vec::new(),
        d2: Vec::new(),
    };
    for i in 0..n {
        let t1 = scale * guarded(dm[i], s_bar[i]);
        let t2 = scale * guarded(dv[i], v_bar[i]);
        let rho_raw = if s_bar[i] * v_bar[i] < EPS {
            0.0
        } else {
            k_bar[i] / (s_bar[i] * v_bar[i])
        };
        let rho = rho_raw.clamp(-CLAMP, CLAMP);
        out.t1.push(t1);
        out.t2.push(t2);
        out.rho.push(rho);
        out.d2.push(solve_mahalanobis(t1, t2, rho));
    }
    out
}

fn cross_moment(y: &[f64], x: &[f64], kind: DetectorKind, a: usize, b: usize) -> f64 {
    let my = mean(y, a, b);
    let mx = mean(x, a, b);
    let m = (b - a + 1) as f64;
    match kind {
        DetectorKind::MeanMean => {
            (a..=b)
                .map(|t| (y[t - 1] - my) * (x[t - 1] - mx))
                .sum::<f64>()
                / m
        }
        DetectorKind::MeanVar => {
            (a..=b)
                .map(|t| (y[t - 1] - my) * (x[t - 1] - mx) * (x[t - 1] - mx))
                .sum::<f64>()
                / m
        }
        DetectorKind::VarMean => {
            (a..=b)
                .map(|t| (y[t - 1] - my) * (y[t - 1] - my) * (x[t - 1] - mx))
                .sum::<f64>()
                / m
        }
        DetectorKind::VarVar => {
            let sy = var(y, a, b);
            let sx = var(x, a, b);
            (a..=b)
                .map(|t| {
                    ((y[t - 1] - my) * (y[t - 1] - my) - sy)
                        * ((x[t - 1] - mx) * (x[t - 1] - mx) - sx)
                })
                .sum::<f64>()
                / m
        }
        _ => panic!("not a cross kind"),
    }
}

/// Cross-series detector trace via the naive path.
pub fn bivariate_trace(y: &[f64], x: &[f64], kind: DetectorKind, g: usize) -> NaiveTrace {
    let n = y.len();
    let scale = (g as f64 / 2.0).sqrt();
    let (sy, vy, _) = scales(y, g);
    let (sx, vx, _) = scales(x, g);
    let (dy, first_scale): (Vec<f64>, &[f64]) = match kind {
        DetectorKind::MeanMean | DetectorKind::MeanVar => (d_mean(y, g), &sy),
        _ => (d_var(y, g), &vy),
    };
    let (dx, second_scale): (Vec<f64>, &[f64]) = match kind {
        DetectorKind::MeanMean | DetectorKind::VarMean => (d_mean(x, g), &sx),
        _ => (d_var(x, g), &vx),
    };
    let mut out = NaiveTrace {
        t1: Vec::new(),
        t2: Vec::new(),
        rho: Vec::new(),
        d2: Vec::new(),
    };
    for k in 1..=n {
        let i = k - 1;
        let t1 = scale * guarded(dy[i], first_scale[i]);
        let t2 = scale * guarded(dx[i], second_scale[i]);
        let cm = if k < g {
            cross_moment(y, x, kind, 1, 2 * g)
        } else if k <= n - g {
            0.5 * (cross_moment(y, x, kind, k + 1, k + g) + cross_moment(y, x, kind, k - g + 1, k))
        } else {
            cross_moment(y, x, kind, n - 2 * g + 1, n)
        };
        let den = first_scale[i] * second_scale[i];
        let rho_raw = if den < EPS { 0.0 } else { cm / den };
        let rho = rho_raw.clamp(-CLAMP, CLAMP);
        out.t1.push(t1);
        out.t2.push(t2);
        out.rho.push(rho);
        out.d2.push(solve_mahalanobis(t1, t2, rho));
    }
    out
}

/// Independent Monte-Carlo threshold with a different RNG family and a
/// flat (walk-free) increment layout.
pub fn threshold(n: usize, alpha: f64, replications: usize, seed: u64) -> f64 {
    let grid: Vec<usize> = (25..=((n - 1) / 2).min(200)).collect();
    let max_g = *grid.last().unwrap();
    let len = n + max_g;
    let mut maxima = Vec::with_capacity(replications);
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..replications {
        let draw = |rng: &mut StdRng| -> Vec<f64> {
            // Box-Muller increments accumulated into a walk.
            let mut walk = vec![0.0f64];
            let mut acc = 0.0;
            for _ in 0..len {
                let u1: f64 = 1.0 - rng.gen::<f64>();
                let u2: f64 = rng.gen();
                acc += (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                walk.push(acc);
            }
            walk
        };
        let w1 = draw(&mut rng);
        let w2 = draw(&mut rng);
        let mut best = 0.0f64;
        for &g in &grid {
            let norm = (2.0 * g as f64).sqrt();
            for h in g..=n {
                let t1 = (w1[h + g] - 2.0 * w1[h] + w1[h - g]) / norm;
                let t2 = (w2[h + g] - 2.0 * w2[h] + w2[h - g]) / norm;
                best = best.max((t1 * t1 + t2 * t2).sqrt());
            }
        }
        maxima.push(best);
    }
    maxima.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = ((1.0 - alpha) * replications as f64).ceil() as usize;
    maxima[rank.clamp(1, replications) - 1]
}

/// Standard normal draw helper for test data.
pub fn normal_draw(rng: &mut StdRng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// A random test series mixing scales and occasional level shifts.
pub fn random_series(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let base: f64 = rng.gen_range(-5.0..5.0);
    let scale: f64 = rng.gen_range(0.2..3.0);
    let shift_at: usize = rng.gen_range(1..=n);
    let shift: f64 = rng.gen_range(-2.0..2.0);
    (0..n)
        .map(|i| {
            let mut v = base + scale * normal_draw(rng);
            if i >= shift_at {
                v += shift;
            }
            v
        })
        .collect()
}
