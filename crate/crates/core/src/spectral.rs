//! Fourier multipliers on the periodic box and the direct Riesz kernel sum.
//!
//! The box `[-L, L)^n` is treated as a torus with physical frequencies
//! `ξ = π k / L`, `k ∈ [-N/2, N/2)^n`. Multipliers `|ξ|^{±s}` send the zero
//! mode to zero (homogeneous spaces are defined modulo constants).

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{lp_norm, neumaier_sum, GridFunction, GridSpec, MAX_DIM};

/// Relative size of the imaginary part tolerated when returning to real values.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// Coefficients of the discrete Fourier transform of a grid function, stored
/// in FFT order along every axis (index `j` is frequency `j` for `j < N/2`,
/// `j - N` otherwise). Unnormalized: the inverse divides by `N^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFunction {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectrumFunction {
    pub fn forward(f: &GridFunction) -> Self {
        let mut coeffs: Vec<Complex64> =
            f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform(f.spec(), &mut coeffs, false);
        Self {
            spec: *f.spec(),
            coeffs,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Integer frequency for FFT-order index `j`.
    pub fn integer_frequency(&self, j: usize) -> i64 {
        let n = self.spec.points();
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Physical frequency vector `ξ = π k / L` of coefficient `idx`.
    pub fn frequency(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.spec.multi_index(idx);
        let scale = PI / self.spec.half_width();
        let mut xi = [0.0; MAX_DIM];
        for axis in 0..self.spec.dim() {
            xi[axis] = scale * self.integer_frequency(m[axis]) as f64;
        }
        xi
    }

    /// Multiplies coefficient `k` by `m(ξ_k, k)`.
    pub fn apply<F>(&self, m: F) -> Self
    where
        F: Fn(&[f64], &[i64]) -> Complex64,
    {
        let dim = self.spec.dim();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let xi = self.frequency(idx);
                let mi = self.spec.multi_index(idx);
                let mut k = [0i64; MAX_DIM];
                for axis in 0..dim {
                    k[axis] = self.integer_frequency(mi[axis]);
                }
                c * m(&xi[..dim], &k[..dim])
            })
            .collect();
        Self {
            spec: self.spec,
            coeffs,
        }
    }

    /// Inverse transform; fails if the result is not real to
    /// [`IMAGINARY_TOLERANCE`] relative to its largest magnitude.
    pub fn inverse(&self) -> Result<GridFunction> {
        let mut data = self.coeffs.clone();
        transform(&self.spec, &mut data, true);
        let norm = 1.0 / self.spec.len() as f64;
        let mut peak = 0.0_f64;
        let mut residue = 0.0_f64;
        for c in &data {
            peak = peak.max(c.norm() * norm);
            residue = residue.max(c.im.abs() * norm);
        }
        if residue > IMAGINARY_TOLERANCE * peak {
            return Err(Error::ImaginaryResidue {
                residue: residue / peak,
                tolerance: IMAGINARY_TOLERANCE,
            });
        }
        Ok(GridFunction::from_parts(
            self.spec,
            data.into_iter().map(|c| c.re * norm).collect(),
        ))
    }

    /// `h^n / N^n Σ_k w(ξ_k) |c_k|²`, the discrete Plancherel pairing.
    pub fn weighted_energy<F: Fn(&[f64]) -> f64>(&self, w: F) -> f64 {
        let dim = self.spec.dim();
        let sum = neumaier_sum(self.coeffs.iter().enumerate().map(|(idx, c)| {
            let xi = self.frequency(idx);
            w(&xi[..dim]) * c.norm_sqr()
        }));
        sum * self.spec.cell_volume() / self.spec.len() as f64
    }
}

/// In-place n-D FFT along every axis of a row-major array.
fn transform(spec: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = spec.points();
    let dim = spec.dim();
    let mut planner = FftPlanner::new();
    let fft: Arc<dyn Fft<f64>> = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let total = spec.len();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + k * stride];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
    }
}

fn norm(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `(-Δ)^{s/2} f` via the multiplier `|ξ|^s`, zero mode sent to zero.
pub fn frac_laplacian(f: &GridFunction, s: f64) -> Result<GridFunction> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "order s = {s} must be nonnegative"
        )));
    }
    SpectrumFunction::forward(f)
        .apply(|xi, _| {
            let r = norm(xi);
            if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(r.powf(s), 0.0)
            }
        })
        .inverse()
}

/// `I_α f = (-Δ)^{-α/2} f` via the multiplier `|ξ|^{-α}`; the zero mode of
/// `f` is projected out.
///
/// On the torus the multiplier is bounded for every `α > 0`, so unlike
/// [`riesz_kernel_convolution`] this does not require `α < n`.
pub fn riesz_potential(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "order α = {alpha} must be positive"
        )));
    }
    SpectrumFunction::forward(f)
        .apply(|xi, _| {
            let r = norm(xi);
            if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(r.powf(-alpha), 0.0)
            }
        })
        .inverse()
}

/// Spectral gradient, one component per axis. The Nyquist mode of the
/// differentiated axis is dropped so the output stays real.
pub fn gradient(f: &GridFunction) -> Result<Vec<GridFunction>> {
    let spectrum = SpectrumFunction::forward(f);
    let nyquist = -(f.spec().points() as i64) / 2;
    (0..f.spec().dim())
        .map(|axis| {
            spectrum
                .apply(|xi, k| {
                    if k[axis] == nyquist {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(0.0, xi[axis])
                    }
                })
                .inverse()
        })
        .collect()
}

/// Pointwise Euclidean length of the gradient.
pub fn gradient_magnitude(f: &GridFunction) -> Result<GridFunction> {
    let grads = gradient(f)?;
    let values = (0..f.spec().len())
        .map(|i| {
            grads
                .iter()
                .map(|g| g.values()[i].powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    Ok(GridFunction::from_parts(*f.spec(), values))
}

/// `‖(-Δ)^{s/2} f‖_p`.
pub fn sobolev_norm(f: &GridFunction, s: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "p = {p} must be at least 1"
        )));
    }
    Ok(lp_norm(&frac_laplacian(f, s)?, p))
}

/// Normalization `C_{n,α} = Γ((n-α)/2) / (2^α π^{n/2} Γ(α/2))` of the Riesz
/// kernel, making `C |x|^{α-n}` the inverse of `(-Δ)^{α/2}` on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszConstant {
    pub dim: usize,
    pub alpha: f64,
    pub value: f64,
}

impl RieszConstant {
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        let n = dim as f64;
        if !(alpha > 0.0 && alpha < n) {
            return Err(Error::InvalidArgument(format!(
                "Riesz constant needs 0 < α < n (α = {alpha}, n = {dim})"
            )));
        }
        let value =
            gamma((n - alpha) / 2.0) / (2f64.powf(alpha) * PI.powf(n / 2.0) * gamma(alpha / 2.0));
        Ok(Self { dim, alpha, value })
    }
}

/// Largest points-per-axis accepted by the O(N^{2n}) direct sums.
pub fn direct_sum_cap(dim: usize) -> usize {
    match dim {
        1 => 4096,
        2 => 128,
        _ => 24,
    }
}

pub(crate) fn check_cost_cap(spec: &GridSpec) -> Result<()> {
    let cap = direct_sum_cap(spec.dim());
    if spec.points() > cap {
        return Err(Error::CostCap {
            dim: spec.dim(),
            points: spec.points(),
            cap,
        });
    }
    Ok(())
}

/// Surface area of the unit sphere in `R^n`.
fn sphere_area(dim: usize) -> f64 {
    let n = dim as f64;
    2.0 * PI.powf(n / 2.0) / gamma(n / 2.0)
}

/// `∫ |z|^{α-n} dz` over the cell centered at the origin. Exact in 1-D;
/// in higher dimensions the cell is replaced by the ball of equal volume.
pub fn diagonal_cell_integral(dim: usize, alpha: f64, h: f64) -> f64 {
    let n = dim as f64;
    let unit_ball = sphere_area(dim) / n;
    let rho = h / unit_ball.powf(1.0 / n);
    sphere_area(dim) * rho.powf(alpha) / alpha
}

/// Quadrature weights `w(δ) ≈ ∫_cell |x - y|^{α-n} dy` indexed by the
/// absolute index offset `δ ∈ [0, N)^n` between two nodes.
pub(crate) fn kernel_table(spec: &GridSpec, alpha: f64) -> Vec<f64> {
    let dim = spec.dim();
    let h = spec.spacing();
    let vol = spec.cell_volume();
    let n = dim as f64;
    (0..spec.len())
        .map(|idx| {
            let m = spec.multi_index(idx);
            let d2: usize = m[..dim].iter().map(|&k| k * k).sum();
            if d2 == 0 {
                diagonal_cell_integral(dim, alpha, h)
            } else {
                (h * (d2 as f64).sqrt()).powf(alpha - n) * vol
            }
        })
        .collect()
}

/// Index of the absolute offset between nodes `a` and `b` in a kernel table.
#[inline]
pub(crate) fn offset_index(spec: &GridSpec, a: &[usize; MAX_DIM], b: &[usize; MAX_DIM]) -> usize {
    let n = spec.points();
    (0..spec.dim()).fold(0, |acc, axis| acc * n + a[axis].abs_diff(b[axis]))
}

/// Direct whole-space evaluation of `C_{n,α} ∫ |x-y|^{α-n} f(y) dy` over the
/// box. The singular diagonal cell uses [`diagonal_cell_integral`].
pub fn riesz_kernel_convolution(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    let spec = *f.spec();
    let constant = RieszConstant::new(spec.dim(), alpha)?;
    check_cost_cap(&spec)?;
    let table = kernel_table(&spec, alpha);
    let multis: Vec<[usize; MAX_DIM]> = (0..spec.len()).map(|i| spec.multi_index(i)).collect();
    let values = f.values();
    let out = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let mx = &multis[x];
            let sum = neumaier_sum(
                multis
                    .iter()
                    .zip(values)
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(my, &v)| table[offset_index(&spec, mx, my)] * v),
            );
            constant.value * sum
        })
        .collect();
    Ok(GridFunction::from_parts(spec, out))
}

/// Comparison of the spectral and direct Riesz potentials on a sub-box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszCrossCheck {
    /// `sup |spectral - direct| / sup |direct|` over the region.
    pub raw_relative_error: f64,
    /// Mean of `spectral - direct` over the region.
    pub offset: f64,
    /// Relative sup error after removing `offset`.
    pub relative_error: f64,
}

/// Compares [`riesz_potential`] with [`riesz_kernel_convolution`] on the
/// nodes with every coordinate inside `[-fraction L, fraction L]`.
///
/// The periodic multiplier drops the zero mode, so the torus potential
/// differs from the whole-space one by an (almost) constant shift
/// proportional to the mass of `f`. Both the raw gap and the gap modulo
/// that constant are reported.
pub fn cross_validate_riesz(
    f: &GridFunction,
    alpha: f64,
    fraction: f64,
) -> Result<RieszCrossCheck> {
    let spectral = riesz_potential(f, alpha)?;
    let direct = riesz_kernel_convolution(f, alpha)?;
    let spec = *f.spec();
    let bound = fraction * spec.half_width();
    let region: Vec<usize> = (0..spec.len())
        .filter(|&i| {
            spec.coords(i)[..spec.dim()]
                .iter()
                .all(|c| c.abs() <= bound)
        })
        .collect();
    if region.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no nodes inside fraction {fraction}"
        )));
    }
    let diff: Vec<f64> = region
        .iter()
        .map(|&i| spectral.values()[i] - direct.values()[i])
        .collect();
    let scale = region
        .iter()
        .fold(0.0_f64, |m, &i| m.max(direct.values()[i].abs()));
    if scale == 0.0 {
        return Err(Error::Degenerate(
            "direct potential vanishes on the region".into(),
        ));
    }
    let offset = neumaier_sum(diff.iter().copied()) / diff.len() as f64;
    let raw = diff.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let shifted = diff.iter().fold(0.0_f64, |m, d| m.max((d - offset).abs()));
    Ok(RieszCrossCheck {
        raw_relative_error: raw / scale,
        offset,
        relative_error: shifted / scale,
    })
}
