//! Discrete Hardy–Littlewood maximal operators.
//!
//! Balls are node sets `{y : |y - c| <= m h}` for `m = 1..=N`, clipped to the
//! box; the average of `|f|` over a ball is its node sum over its node count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_norm, GridFunction, GridSpec, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaximalMode {
    Centered,
    Uncentered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalConfig {
    pub mode: MaximalMode,
}

impl MaximalConfig {
    pub fn centered() -> Self {
        Self {
            mode: MaximalMode::Centered,
        }
    }

    pub fn uncentered() -> Self {
        Self {
            mode: MaximalMode::Uncentered,
        }
    }

    /// Radii `m h`, `m = 1..=N`.
    pub fn radii(&self, spec: &GridSpec) -> Vec<f64> {
        let h = spec.spacing();
        (1..=spec.points()).map(|m| m as f64 * h).collect()
    }

    pub fn apply(&self, f: &GridFunction) -> GridFunction {
        match self.mode {
            MaximalMode::Centered => maximal_centered(f),
            MaximalMode::Uncentered => maximal_uncentered(f),
        }
    }
}

impl Default for MaximalConfig {
    fn default() -> Self {
        Self::centered()
    }
}

/// Smallest radius multiple `m >= 1` whose ball around `a` contains `b`.
#[inline]
fn radius_bucket(a: &[usize; MAX_DIM], b: &[usize; MAX_DIM], dim: usize) -> usize {
    let d2: usize = (0..dim).map(|k| a[k].abs_diff(b[k]).pow(2)).sum();
    let mut m = (d2 as f64).sqrt().ceil() as usize;
    // guard against sqrt rounding at perfect squares
    while m > 0 && (m - 1) * (m - 1) >= d2 {
        m -= 1;
    }
    while m * m < d2 {
        m += 1;
    }
    m.max(1)
}

/// Ball averages `avg[m-1]` of `|f|` around `center` for `m = 1..=N`.
fn ball_averages(
    spec: &GridSpec,
    abs: &[f64],
    multis: &[[usize; MAX_DIM]],
    center: usize,
) -> Vec<f64> {
    let n = spec.points();
    let mut sums = vec![0.0; n + 1];
    let mut counts = vec![0usize; n + 1];
    let c = &multis[center];
    for (y, my) in multis.iter().enumerate() {
        let m = radius_bucket(c, my, spec.dim());
        if m <= n {
            sums[m] += abs[y];
            counts[m] += 1;
        }
    }
    let mut out = Vec::with_capacity(n);
    let (mut s, mut k) = (0.0, 0usize);
    for m in 1..=n {
        s += sums[m];
        k += counts[m];
        out.push(s / k as f64);
    }
    out
}

/// Centered maximal function `sup_m avg_{B(x, m h)} |f|`.
pub fn maximal_centered(f: &GridFunction) -> GridFunction {
    let spec = *f.spec();
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let values = if spec.dim() == 1 {
        centered_1d(&abs)
    } else {
        let multis: Vec<_> = (0..spec.len()).map(|i| spec.multi_index(i)).collect();
        (0..spec.len())
            .into_par_iter()
            .map(|x| {
                ball_averages(&spec, &abs, &multis, x)
                    .into_iter()
                    .fold(0.0, f64::max)
            })
            .collect()
    };
    GridFunction::from_parts(spec, values)
}

fn centered_1d(abs: &[f64]) -> Vec<f64> {
    let n = abs.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut sum = abs[i];
            let mut count = 1usize;
            let mut best = 0.0_f64;
            for m in 1..=n {
                let left = i.checked_sub(m);
                let right = (i + m < n).then_some(i + m);
                if left.is_none() && right.is_none() {
                    // every larger ball is the whole domain
                    break;
                }
                if let Some(l) = left {
                    sum += abs[l];
                    count += 1;
                }
                if let Some(r) = right {
                    sum += abs[r];
                    count += 1;
                }
                best = best.max(sum / count as f64);
            }
            best
        })
        .collect()
}

/// Uncentered maximal function.
///
/// In 1-D this is the exact sup over all node intervals containing `x`.
/// In higher dimensions the sup runs over all grid-centered balls
/// `B(c, m h)` that contain `x`.
pub fn maximal_uncentered(f: &GridFunction) -> GridFunction {
    let spec = *f.spec();
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let values = if spec.dim() == 1 {
        uncentered_1d(&abs)
    } else {
        uncentered_balls(&spec, &abs)
    };
    GridFunction::from_parts(spec, values)
}

/// O(N²) sweep: for each left end `a`, a backward pass over right ends gives
/// `R_a(i) = max_{b >= i} avg[a, b]`, and `M(i) = max_{a <= i} R_a(i)`.
fn uncentered_1d(abs: &[f64]) -> Vec<f64> {
    let n = abs.len();
    let mut best = vec![0.0_f64; n];
    let mut avgs = vec![0.0_f64; n];
    for a in 0..n {
        let mut sum = 0.0;
        for b in a..n {
            sum += abs[b];
            avgs[b] = sum / (b - a + 1) as f64;
        }
        let mut running = 0.0_f64;
        for i in (a..n).rev() {
            running = running.max(avgs[i]);
            if running > best[i] {
                best[i] = running;
            }
        }
    }
    best
}

fn uncentered_balls(spec: &GridSpec, abs: &[f64]) -> Vec<f64> {
    let n = spec.points();
    let multis: Vec<_> = (0..spec.len()).map(|i| spec.multi_index(i)).collect();
    // per center: suffix max of ball averages, then scatter to members
    let per_center: Vec<Vec<f64>> = (0..spec.len())
        .into_par_iter()
        .map(|c| {
            let mut avg = ball_averages(spec, abs, &multis, c);
            for m in (0..n - 1).rev() {
                avg[m] = avg[m].max(avg[m + 1]);
            }
            avg
        })
        .collect();
    (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let mx = &multis[x];
            per_center
                .iter()
                .zip(&multis)
                .filter_map(|(suffix, mc)| {
                    let m = radius_bucket(mc, mx, spec.dim());
                    (m <= n).then(|| suffix[m - 1])
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Empirical weak-(1,1) constant
/// `max_α α · |{Tf > α}| / ‖f‖₁` for an operator output `Tf`.
pub fn weak11_constant(tf: &GridFunction, f: &GridFunction, alphas: &[f64]) -> Result<f64> {
    if tf.spec() != f.spec() {
        return Err(Error::GridMismatch);
    }
    if let Some(a) = alphas.iter().find(|&&a| !(a > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "level α = {a} must be positive"
        )));
    }
    let l1 = lp_norm(f, 1.0);
    if l1 == 0.0 {
        return Err(Error::Degenerate("‖f‖₁ = 0".into()));
    }
    let vol = f.spec().cell_volume();
    Ok(alphas
        .iter()
        .map(|&a| {
            let count = tf.values().iter().filter(|&&v| v > a).count();
            a * count as f64 * vol / l1
        })
        .fold(0.0, f64::max))
}

/// Level set heights spread geometrically between the extremes of `tf`.
pub fn level_grid(tf: &GridFunction, levels: usize) -> Vec<f64> {
    let max = tf.max_abs();
    let min_pos = tf
        .values()
        .iter()
        .filter(|&&v| v > 0.0)
        .fold(f64::INFINITY, |m, &v| m.min(v));
    if !(max > 0.0) || levels == 0 {
        return Vec::new();
    }
    let lo = min_pos.min(max);
    if levels == 1 || lo == max {
        return vec![lo];
    }
    let ratio = (max / lo).ln() / (levels - 1) as f64;
    (0..levels).map(|k| lo * (ratio * k as f64).exp()).collect()
}

/// `‖Mf‖_p / ‖f‖_p`.
pub fn strong_pp_ratio(f: &GridFunction, p: f64, cfg: &MaximalConfig) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must exceed 1")));
    }
    let denom = lp_norm(f, p);
    if denom == 0.0 {
        return Err(Error::Degenerate("‖f‖_p = 0".into()));
    }
    Ok(lp_norm(&cfg.apply(f), p) / denom)
}

/// `(M(|f|^q))^{1/q}`.
pub fn corollary_op(f: &GridFunction, q: f64, cfg: &MaximalConfig) -> Result<GridFunction> {
    if !(q >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "q = {q} must be at least 1"
        )));
    }
    let powered = f.map(|v| v.abs().powf(q));
    Ok(cfg.apply(&powered).map(|v| v.powf(1.0 / q)))
}
