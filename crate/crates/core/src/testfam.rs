//! Deterministic test-function generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec, HalfLineFunction, HalfLineGrid};

/// `exp(-1/t)` for `t > 0`, else 0.
fn smooth_edge(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// C^∞ monotone step: 1 for `t <= 0`, 0 for `t >= 1`.
pub fn smooth_step_down(t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let a = smooth_edge(1.0 - t);
        a / (a + smooth_edge(t))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `exp(-|x - c|² / (2 w²))`.
    Gaussian { center: Vec<f64>, width: f64 },
    /// `exp(1 - 1/(1 - t²))` with `t = |x - c| / r`, peak 1, support `|x - c| < r`.
    Bump { center: Vec<f64>, radius: f64 },
    /// 1 on `|x| <= r_in`, 0 on `|x| >= r_out`, smooth and radially monotone between.
    Plateau { r_in: f64, r_out: f64 },
    /// `x^{-1/p}` on `[1, T]`, 0 elsewhere (1-D).
    PowerCutoff { p: f64, t_max: f64 },
    /// Random trigonometric polynomial with modes `0 < |k|_∞ <= max_mode`.
    RandomBandlimited { seed: u64, max_mode: usize },
}

/// Values below this at the box boundary count as decayed.
pub const BOUNDARY_DECAY: f64 = 1e-12;

impl TestFunction {
    pub fn gaussian(center: Vec<f64>, width: f64) -> Self {
        Self::Gaussian { center, width }
    }

    pub fn bump(center: Vec<f64>, radius: f64) -> Self {
        Self::Bump { center, radius }
    }

    pub fn plateau(r_in: f64, r_out: f64) -> Self {
        Self::Plateau { r_in, r_out }
    }

    pub fn power_cutoff(p: f64, t_max: f64) -> Self {
        Self::PowerCutoff { p, t_max }
    }

    pub fn random_bandlimited(seed: u64, max_mode: usize) -> Self {
        Self::RandomBandlimited { seed, max_mode }
    }

    /// Standard Gaussian `e^{-|x|²/2}` at the origin.
    pub fn standard_gaussian(dim: usize) -> Self {
        Self::gaussian(vec![0.0; dim], 1.0)
    }

    /// Unit bump at the origin.
    pub fn unit_bump(dim: usize) -> Self {
        Self::bump(vec![0.0; dim], 1.0)
    }

    /// The plateau with `r_in = 1`, `r_out = 2`.
    pub fn unit_plateau() -> Self {
        Self::plateau(1.0, 2.0)
    }

    pub fn name(&self) -> String {
        match self {
            Self::Gaussian { width, .. } => format!("gaussian(w={width})"),
            Self::Bump { radius, .. } => format!("bump(r={radius})"),
            Self::Plateau { r_in, r_out } => format!("plateau({r_in},{r_out})"),
            Self::PowerCutoff { p, t_max } => format!("power_cutoff(p={p},T={t_max})"),
            Self::RandomBandlimited { seed, max_mode } => {
                format!("bandlimited(seed={seed},K={max_mode})")
            }
        }
    }

    fn check_center(center: &[f64], spec: &GridSpec) -> Result<()> {
        if center.len() != spec.dim() {
            return Err(Error::InvalidArgument(format!(
                "center has {} coordinates on a {}-D grid",
                center.len(),
                spec.dim()
            )));
        }
        Ok(())
    }

    fn validate(&self, spec: &GridSpec) -> Result<()> {
        let l = spec.half_width();
        match self {
            Self::Gaussian { center, width } => {
                Self::check_center(center, spec)?;
                if !(*width > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "width {width} must be positive"
                    )));
                }
                let reach = width * (-2.0 * BOUNDARY_DECAY.ln()).sqrt();
                if center.iter().any(|c| c.abs() + reach > l) {
                    return Err(Error::InvalidArgument(format!(
                        "gaussian of width {width} does not decay inside the box of half-width {l}"
                    )));
                }
            }
            Self::Bump { center, radius } => {
                Self::check_center(center, spec)?;
                if !(*radius > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "radius {radius} must be positive"
                    )));
                }
                if center.iter().any(|c| c.abs() + radius > l) {
                    return Err(Error::InvalidArgument(format!(
                        "bump support exceeds the box of half-width {l}"
                    )));
                }
            }
            Self::Plateau { r_in, r_out } => {
                if !(*r_in > 0.0 && r_out > r_in) {
                    return Err(Error::InvalidArgument(format!(
                        "plateau needs 0 < r_in < r_out (got {r_in}, {r_out})"
                    )));
                }
                if *r_out > l {
                    return Err(Error::InvalidArgument(format!(
                        "plateau support {r_out} exceeds the box of half-width {l}"
                    )));
                }
            }
            Self::PowerCutoff { p, t_max } => {
                if spec.dim() != 1 {
                    return Err(Error::InvalidArgument(
                        "power cutoff is one-dimensional".into(),
                    ));
                }
                Self::check_power(*p, *t_max)?;
                if *t_max > l {
                    return Err(Error::InvalidArgument(format!(
                        "cutoff T = {t_max} exceeds the box of half-width {l}"
                    )));
                }
            }
            Self::RandomBandlimited { max_mode, .. } => {
                if *max_mode == 0 || *max_mode >= spec.points() / 2 {
                    return Err(Error::InvalidArgument(format!(
                        "max mode {max_mode} must lie in 1..{}",
                        spec.points() / 2
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_power(p: f64, t_max: f64) -> Result<()> {
        if !(p > 0.0) || !(t_max > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "power cutoff needs p > 0 and T > 1 (got p = {p}, T = {t_max})"
            )));
        }
        Ok(())
    }

    /// Samples the function on a grid.
    pub fn generate(&self, spec: &GridSpec) -> Result<GridFunction> {
        self.validate(spec)?;
        match self {
            Self::Gaussian { center, width } => GridFunction::from_fn(*spec, |x| {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum();
                (-0.5 * r2 / (width * width)).exp()
            }),
            Self::Bump { center, radius } => GridFunction::from_fn(*spec, |x| {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum();
                let t2 = r2 / (radius * radius);
                if t2 < 1.0 {
                    (1.0 - 1.0 / (1.0 - t2)).exp()
                } else {
                    0.0
                }
            }),
            Self::Plateau { r_in, r_out } => GridFunction::from_fn(*spec, |x| {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                smooth_step_down((r - r_in) / (r_out - r_in))
            }),
            Self::PowerCutoff { p, t_max } => {
                GridFunction::from_fn(*spec, |x| power_profile(x[0], *p, *t_max))
            }
            Self::RandomBandlimited { seed, max_mode } => Ok(bandlimited(spec, *seed, *max_mode)),
        }
    }

    /// Samples a radial profile on the half-line grid (1-D functions only).
    pub fn generate_half_line(&self, grid: &HalfLineGrid) -> Result<HalfLineFunction> {
        match self {
            Self::PowerCutoff { p, t_max } => {
                Self::check_power(*p, *t_max)?;
                HalfLineFunction::from_fn(grid.clone(), |x| power_profile(x, *p, *t_max))
            }
            Self::Plateau { r_in, r_out } => {
                if !(*r_in > 0.0 && r_out > r_in) {
                    return Err(Error::InvalidArgument(
                        "plateau needs 0 < r_in < r_out".into(),
                    ));
                }
                HalfLineFunction::from_fn(grid.clone(), |x| {
                    smooth_step_down((x - r_in) / (r_out - r_in))
                })
            }
            other => Err(Error::InvalidArgument(format!(
                "{} has no half-line form",
                other.name()
            ))),
        }
    }
}

fn power_profile(x: f64, p: f64, t_max: f64) -> f64 {
    if (1.0..=t_max).contains(&x) {
        x.powf(-1.0 / p)
    } else {
        0.0
    }
}

fn bandlimited(spec: &GridSpec, seed: u64, max_mode: usize) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = spec.dim();
    let k = max_mode as i64;
    let scale = PI / spec.half_width();
    // one representative of each ±k pair
    let mut modes = Vec::new();
    let side = (2 * k + 1) as usize;
    for idx in 0..side.pow(dim as u32) {
        let mut rem = idx;
        let mut mode = [0i64; 3];
        for slot in mode.iter_mut().take(dim) {
            *slot = (rem % side) as i64 - k;
            rem /= side;
        }
        let first_nonzero = mode[..dim].iter().find(|&&m| m != 0);
        if let Some(&m) = first_nonzero {
            if m > 0 {
                let norm = mode[..dim]
                    .iter()
                    .map(|m| (m * m) as f64)
                    .sum::<f64>()
                    .sqrt();
                let amp = 1.0 / (1.0 + norm);
                let a = amp * rng.random_range(-1.0..1.0);
                let b = amp * rng.random_range(-1.0..1.0);
                modes.push((mode, a, b));
            }
        }
    }
    let values = (0..spec.len())
        .map(|i| {
            let x = spec.coords(i);
            modes
                .iter()
                .map(|(m, a, b)| {
                    let phase: f64 = (0..dim).map(|d| scale * m[d] as f64 * x[d]).sum();
                    a * phase.cos() + b * phase.sin()
                })
                .sum()
        })
        .collect();
    GridFunction::from_parts(*spec, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{lp_norm, GridSpec};

    #[test]
    fn plateau_levels() {
        let spec = GridSpec::new(1, 4.0, 64).unwrap();
        let f = TestFunction::unit_plateau().generate(&spec).unwrap();
        for (i, v) in f.values().iter().enumerate() {
            let r = spec.axis_coord(i).abs();
            if r <= 1.0 {
                assert_eq!(*v, 1.0);
            }
            if r >= 2.0 {
                assert_eq!(*v, 0.0);
            }
            assert!((0.0..=1.0).contains(v));
        }
        // nodes at exactly |x| = 0.5 (N = 8) and |x| = 3 (N = 12)
        for (n, x, expected) in [(8, 0.5, 1.0), (12, 3.0, 0.0)] {
            let spec = GridSpec::new(1, 4.0, n).unwrap();
            let i = spec.nearest_node(&[x]);
            assert_eq!(spec.axis_coord(i), x);
            let f = TestFunction::unit_plateau().generate(&spec).unwrap();
            assert_eq!(f.values()[i], expected);
        }
    }

    #[test]
    fn plateau_is_monotone() {
        let steps: Vec<f64> = (0..=100)
            .map(|k| smooth_step_down(k as f64 / 100.0))
            .collect();
        assert!(steps.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn bandlimited_is_deterministic() {
        let spec = GridSpec::new(2, 3.0, 16).unwrap();
        let a = TestFunction::random_bandlimited(7, 3)
            .generate(&spec)
            .unwrap();
        let b = TestFunction::random_bandlimited(7, 3)
            .generate(&spec)
            .unwrap();
        let c = TestFunction::random_bandlimited(8, 3)
            .generate(&spec)
            .unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.mean().abs() < 1e-12);
    }

    #[test]
    fn rejects_oversized_supports() {
        let spec = GridSpec::new(1, 2.0, 32).unwrap();
        assert!(TestFunction::bump(vec![1.5], 1.0).generate(&spec).is_err());
        assert!(TestFunction::plateau(1.0, 3.0).generate(&spec).is_err());
        assert!(TestFunction::gaussian(vec![0.0], 1.0)
            .generate(&spec)
            .is_err());
        assert!(TestFunction::random_bandlimited(1, 16)
            .generate(&spec)
            .is_err());
        assert!(TestFunction::plateau(2.0, 1.0).generate(&spec).is_err());
        assert!(TestFunction::bump(vec![0.0, 0.0], 1.0)
            .generate(&spec)
            .is_err());
    }

    #[test]
    fn even_generators_are_reflection_symmetric() {
        let spec = GridSpec::new(2, 8.0, 32).unwrap();
        for tf in [
            TestFunction::standard_gaussian(2),
            TestFunction::unit_bump(2),
            TestFunction::unit_plateau(),
        ] {
            let f = tf.generate(&spec).unwrap();
            for i in 0..spec.len() {
                let m = spec.multi_index(i);
                let refl = spec.linear_index(&[31 - m[0], 31 - m[1]]);
                assert_eq!(f.values()[i], f.values()[refl], "{}", tf.name());
            }
        }
    }

    #[test]
    fn compact_supports_hold_on_grid() {
        let spec = GridSpec::new(1, 4.0, 256).unwrap();
        let f = TestFunction::bump(vec![0.5], 1.0).generate(&spec).unwrap();
        for (i, v) in f.values().iter().enumerate() {
            if (spec.axis_coord(i) - 0.5).abs() >= 1.0 {
                assert!(*v < 1e-12);
            }
        }
    }

    #[test]
    fn smooth_norms_converge_at_second_order() {
        let norm = |n: usize| {
            let spec = GridSpec::new(1, 2.0, n).unwrap();
            lp_norm(&TestFunction::unit_bump(1).generate(&spec).unwrap(), 2.0)
        };
        let (a, b, c) = (norm(32), norm(64), norm(128));
        let reference = norm(4096);
        let (e1, e2, e3) = (
            (a - reference).abs(),
            (b - reference).abs(),
            (c - reference).abs(),
        );
        assert!(
            e2 <= e1 / 4.0 + 1e-15 && e3 <= e2 / 4.0 + 1e-15,
            "{e1} {e2} {e3}"
        );
    }

    #[test]
    fn power_cutoff_on_half_line() {
        let grid = HalfLineGrid::uniform(10.0, 20).unwrap();
        let f = TestFunction::power_cutoff(2.0, 4.0)
            .generate_half_line(&grid)
            .unwrap();
        for (x, v) in grid.nodes().iter().zip(f.values()) {
            if (1.0..=4.0).contains(x) {
                assert!((v - x.powf(-0.5)).abs() < 1e-15);
            } else {
                assert_eq!(*v, 0.0);
            }
        }
        assert!(TestFunction::power_cutoff(2.0, 0.5)
            .generate_half_line(&grid)
            .is_err());
    }
}
