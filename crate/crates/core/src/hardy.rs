//! Hardy-type inequality checks and the kernel-split operators behind the
//! fractional Hardy bound.
//!
//! The fractional inequality `∫ |u|^p |x|^{-sp} <= C ‖u‖^p_{Ẇ^{s,p}}` reduces,
//! via `u = I_s f`, to boundedness of
//! `A f(x) = ∫ |f(y)| |x - y|^{s-n} |x|^{-s} dy`. The kernel is split at
//! `|x - y| = κ |x|` into a near part `A₁` (controlled by the maximal
//! function) and a far part `A₂`, which is dominated by `B₂` whose adjoint is
//! `T`. Everything here is evaluated by direct quadrature on small grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    lp_norm, neumaier_sum, weighted_integral, Exponents, GridFunction, GridSpec, HalfLineFunction,
    HalfLineGrid, MAX_DIM,
};
use crate::maximal::{corollary_op, MaximalConfig};
use crate::spectral::{
    check_cost_cap, gradient_magnitude, kernel_table, offset_index, sobolev_norm,
};
use crate::testfam::TestFunction;

/// Threshold of the near/far kernel split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    kappa: f64,
}

impl SplitConfig {
    pub const DEFAULT_KAPPA: f64 = 100.0;

    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa >= 2.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "split threshold κ = {kappa} must be at least 2"
            )));
        }
        Ok(Self { kappa })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `κ - 1`, the radius factor of the majorant region.
    pub fn inner_factor(&self) -> f64 {
        self.kappa - 1.0
    }

    /// Pair `(x, y)` at distance `dist` lies in the near region `|x - y| <= κ|x|`.
    #[inline]
    pub fn is_near(&self, dist: f64, x_norm: f64) -> bool {
        dist <= self.kappa * x_norm
    }

    /// Pair lies in the majorant region `|y| >= (κ - 1)|x|`. Shared by
    /// [`b2_majorant`] and [`dual_t`].
    #[inline]
    pub fn in_majorant(&self, x_norm: f64, y_norm: f64) -> bool {
        y_norm >= self.inner_factor() * x_norm
    }

    /// Factor `((κ + 1)/κ)^{n-s}` with `|x - y|^{s-n} <= factor · |y|^{s-n}`
    /// on the far region.
    pub fn kernel_domination_factor(&self, dim: usize, s: f64) -> f64 {
        ((self.kappa + 1.0) / self.kappa).powf(dim as f64 - s)
    }
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            kappa: Self::DEFAULT_KAPPA,
        }
    }
}

/// Grid parameters recorded with a result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub dim: usize,
    pub points: usize,
    pub half_width: f64,
}

impl From<&GridSpec> for GridMeta {
    fn from(spec: &GridSpec) -> Self {
        Self {
            dim: spec.dim(),
            points: spec.points(),
            half_width: spec.half_width(),
        }
    }
}

impl GridMeta {
    fn half_line(grid: &HalfLineGrid) -> Self {
        Self {
            dim: 1,
            points: grid.len(),
            half_width: grid.x_max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyResult {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Constant multiplying the right-hand side (1 when none applies).
    pub constant: f64,
    pub p: f64,
    pub s: f64,
    pub q: Option<f64>,
    pub grid: GridMeta,
    pub pass: bool,
}

impl HardyResult {
    #[allow(clippy::too_many_arguments)]
    fn new(
        lhs: f64,
        rhs: f64,
        constant: f64,
        p: f64,
        s: f64,
        q: Option<f64>,
        grid: GridMeta,
        pass: bool,
    ) -> Self {
        Self {
            lhs,
            rhs,
            ratio: lhs / rhs,
            constant,
            p,
            s,
            q,
            grid,
            pass,
        }
    }
}

/// One-dimensional Hardy inequality
/// `∫₀^∞ (F/x)^p < (p/(p-1))^p ∫₀^∞ f^p`, `F(x) = ∫₀^x f`.
///
/// `f` is taken to vanish beyond the grid, so `F` is constant there and the
/// tail `∫_{x_max}^∞ (F/x)^p` is added in closed form.
pub fn classical_hardy_check(f: &HalfLineFunction, p: f64) -> Result<HardyResult> {
    classical_hardy_check_with_constant(f, p, (p / (p - 1.0)).powf(p))
}

/// [`classical_hardy_check`] against an arbitrary constant.
pub fn classical_hardy_check_with_constant(
    f: &HalfLineFunction,
    p: f64,
    constant: f64,
) -> Result<HardyResult> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponents(format!("p = {p} must exceed 1")));
    }
    if f.values().iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidArgument("f must be nonnegative".into()));
    }
    if f.values().iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate("f vanishes identically".into()));
    }
    let grid = f.grid();
    let mut running = 0.0;
    let mut comp = 0.0;
    let mut lhs_terms = Vec::with_capacity(grid.len());
    for ((&v, &w), &x) in f.values().iter().zip(grid.widths()).zip(grid.nodes()) {
        let cell = v * w;
        let big_f = running + comp + 0.5 * cell;
        lhs_terms.push((big_f / x).powf(p) * w);
        // compensated running total of ∫ f
        let t = running + cell;
        if running.abs() >= cell.abs() {
            comp += (running - t) + cell;
        } else {
            comp += (cell - t) + running;
        }
        running = t;
    }
    let total = running + comp;
    let x_max = grid.x_max();
    lhs_terms.push(total.powf(p) * x_max.powf(1.0 - p) / (p - 1.0));
    let lhs = neumaier_sum(lhs_terms);
    let rhs = constant * f.integrate_with(|v| v.powf(p));
    Ok(HardyResult::new(
        lhs,
        rhs,
        constant,
        p,
        0.0,
        None,
        GridMeta::half_line(grid),
        lhs < rhs,
    ))
}

/// Cells per factor of ten used by the sharpness sweep.
pub const SWEEP_CELLS_PER_DECADE: usize = 2000;

/// Ratios for the near-extremizers `x^{-1/p} 1_{[1, T]}`; they approach 1
/// like `1 - 1/((p-1) ln T)` roughly, never reaching it.
pub fn classical_sharpness_sweep(p: f64, t_list: &[f64]) -> Result<Vec<HardyResult>> {
    classical_sharpness_sweep_with(p, t_list, SWEEP_CELLS_PER_DECADE)
}

pub fn classical_sharpness_sweep_with(
    p: f64,
    t_list: &[f64],
    cells_per_decade: usize,
) -> Result<Vec<HardyResult>> {
    if t_list.iter().any(|&t| !(t >= 10.0)) {
        return Err(Error::InvalidArgument(
            "every cutoff T must be at least 10".into(),
        ));
    }
    if t_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("cutoffs T must increase".into()));
    }
    t_list
        .iter()
        .map(|&t| {
            let grid = HalfLineGrid::graded(1.0, t, 4, cells_per_decade)?;
            let f = TestFunction::power_cutoff(p, t).generate_half_line(&grid)?;
            classical_hardy_check(&f, p)
        })
        .collect()
}

/// `∫ |u|^p |x|^{-q} <= (p/(n-q))^q ‖u‖_p^{p-q} ‖∇u‖_p^q`.
pub fn cazenave_check(u: &GridFunction, p: f64, q: f64) -> Result<HardyResult> {
    let spec = u.spec();
    let n = spec.dim() as f64;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponents(format!(
            "p = {p} must lie in [1, ∞)"
        )));
    }
    if !(q >= 0.0 && q <= p && q < n) {
        return Err(Error::InvalidExponents(format!(
            "q = {q} must satisfy 0 <= q <= p and q < n = {n}"
        )));
    }
    let lhs = weighted_integral(u, p, q, 0.0)?;
    let lp_power = weighted_integral(u, p, 0.0, 0.0)?;
    let grad = lp_norm(&gradient_magnitude(u)?, p);
    let constant = (p / (n - q)).powf(q);
    let rhs = constant * lp_power.powf((p - q) / p) * grad.powf(q);
    Ok(HardyResult::new(
        lhs,
        rhs,
        constant,
        p,
        q / p,
        Some(q),
        spec.into(),
        lhs <= rhs,
    ))
}

/// Quotient `Q = ∫ |u|^p |x|^{-sp} / ‖u‖^p_{Ẇ^{s,p}}` for the zero-mode
/// projection of `u` (homogeneous norms do not see constants).
pub fn fractional_hardy_quotient(u: &GridFunction, s: f64, p: f64) -> Result<HardyResult> {
    let spec = u.spec();
    Exponents::new(spec.dim(), s, p)?;
    let v = u.zero_mean();
    let denom = sobolev_norm(&v, s, p)?.powf(p);
    if !(denom > 0.0) {
        return Err(Error::Degenerate("Sobolev norm vanishes".into()));
    }
    let lhs = weighted_integral(&v, p, s * p, 0.0)?;
    let q = lhs / denom;
    Ok(HardyResult::new(
        lhs,
        denom,
        1.0,
        p,
        s,
        None,
        spec.into(),
        q.is_finite(),
    ))
}

/// Largest fractional Hardy quotient over a family.
pub fn empirical_constant(family: &[GridFunction], s: f64, p: f64) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty test family".into()));
    }
    family.iter().try_fold(0.0_f64, |best, u| {
        Ok(best.max(fractional_hardy_quotient(u, s, p)?.ratio))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    pub eps: f64,
    /// `∫_{|x| > ε} |u|^p |x|^{-n}`.
    pub lhs: f64,
    /// `‖u‖^p_{Ẇ^{s,p}}`, independent of `ε`.
    pub rhs: f64,
    pub ratio: f64,
}

/// Endpoint `s p = n`: the truncated weighted integral grows like
/// `ln(1/ε)` while the Sobolev side stays fixed.
pub fn endpoint_blowup(
    u: &GridFunction,
    exps: &Exponents,
    eps_list: &[f64],
) -> Result<Vec<BlowupRow>> {
    let exps = Exponents::endpoint(exps.dim, exps.s, exps.p)?;
    if exps.dim != u.spec().dim() {
        return Err(Error::InvalidArgument(
            "exponent dimension differs from the grid".into(),
        ));
    }
    if let Some(e) = eps_list.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "cutoff ε = {e} must be positive"
        )));
    }
    let rhs = sobolev_norm(u, exps.s, exps.p)?.powf(exps.p);
    eps_list
        .iter()
        .map(|&eps| {
            let lhs = weighted_integral(u, exps.p, exps.dim as f64, eps)?;
            Ok(BlowupRow {
                eps,
                lhs,
                rhs,
                ratio: lhs / rhs,
            })
        })
        .collect()
}

/// Compares `‖u‖^p_{Ẇ^{s,p}}` with `‖u‖_p^{p(1-s)} ‖∇u‖_p^{ps}`, using the
/// zero-mode projection of `u`. At `p = 2` the ratio is at most 1.
pub fn interpolation_check(u: &GridFunction, s: f64, p: f64) -> Result<HardyResult> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!(
            "s = {s} must lie in [0, 1]"
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "p = {p} must be at least 1"
        )));
    }
    let v = u.zero_mean();
    let lhs = sobolev_norm(&v, s, p)?.powf(p);
    let lp = lp_norm(&v, p);
    let grad = lp_norm(&gradient_magnitude(&v)?, p);
    let rhs = lp.powf(p * (1.0 - s)) * grad.powf(p * s);
    let ratio = lhs / rhs;
    let pass = if p == 2.0 {
        ratio <= 1.0 + 1e-8
    } else {
        ratio.is_finite()
    };
    Ok(HardyResult::new(
        lhs,
        rhs,
        1.0,
        p,
        s,
        None,
        u.spec().into(),
        pass,
    ))
}

/// `Σ_{j <= 0} 2^{js} = 1 / (1 - 2^{-s})`.
pub fn dyadic_sum(s: f64) -> f64 {
    1.0 / (1.0 - 2f64.powf(-s))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitParts {
    pub near: GridFunction,
    pub far: GridFunction,
    /// The unsplit operator `A f`, summed independently.
    pub full: GridFunction,
}

fn check_order(s: f64, dim: usize) -> Result<()> {
    if !(s > 0.0 && s < dim as f64) {
        return Err(Error::InvalidArgument(format!(
            "order s = {s} must lie in (0, n = {dim})"
        )));
    }
    Ok(())
}

/// `A₁ f`, `A₂ f` and `A f` by direct quadrature of
/// `|f(y)| |x - y|^{s-n} |x|^{-s}`; the diagonal cell uses the same
/// singular cell integral as the Riesz kernel sum.
pub fn split_operator(f: &GridFunction, s: f64, cfg: &SplitConfig) -> Result<SplitParts> {
    let spec = *f.spec();
    check_order(s, spec.dim())?;
    check_cost_cap(&spec)?;
    let table = kernel_table(&spec, s);
    let radii = spec.radii();
    let multis: Vec<[usize; MAX_DIM]> = (0..spec.len()).map(|i| spec.multi_index(i)).collect();
    let h = spec.spacing();
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let sums: Vec<(f64, f64, f64)> = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let mx = &multis[x];
            let mut near = Vec::new();
            let mut far = Vec::new();
            let mut full = Vec::with_capacity(spec.len());
            for (y, my) in multis.iter().enumerate() {
                if abs[y] == 0.0 {
                    continue;
                }
                let term = table[offset_index(&spec, mx, my)] * abs[y];
                let d2: usize = (0..spec.dim()).map(|k| mx[k].abs_diff(my[k]).pow(2)).sum();
                let dist = h * (d2 as f64).sqrt();
                if cfg.is_near(dist, radii[x]) {
                    near.push(term);
                } else {
                    far.push(term);
                }
                full.push(term);
            }
            let w = radii[x].powf(-s);
            (
                neumaier_sum(near) * w,
                neumaier_sum(far) * w,
                neumaier_sum(full) * w,
            )
        })
        .collect();
    Ok(SplitParts {
        near: GridFunction::from_parts(spec, sums.iter().map(|t| t.0).collect()),
        far: GridFunction::from_parts(spec, sums.iter().map(|t| t.1).collect()),
        full: GridFunction::from_parts(spec, sums.iter().map(|t| t.2).collect()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A1Bound {
    /// `sup A₁f / Mf` over nodes with `Mf > 0`.
    pub sup_ratio: f64,
    /// `Σ_{j <= 0} 2^{js}`.
    pub dyadic_factor: f64,
}

/// Pointwise control of the near part by the maximal function, `A₁ f <= C Mf`.
/// `mf` must be the centered maximal function of `|f|`.
pub fn a1_maximal_bound(
    f: &GridFunction,
    s: f64,
    cfg: &SplitConfig,
    mf: &GridFunction,
) -> Result<A1Bound> {
    if mf.spec() != f.spec() {
        return Err(Error::GridMismatch);
    }
    let parts = split_operator(f, s, cfg)?;
    let sup_ratio = parts
        .near
        .values()
        .iter()
        .zip(mf.values())
        .filter(|(_, &m)| m > 0.0)
        .map(|(&a, &m)| a / m)
        .fold(0.0, f64::max);
    Ok(A1Bound {
        sup_ratio,
        dyadic_factor: dyadic_sum(s),
    })
}

/// Output of [`b2_majorant`], tagged with the region it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Majorant {
    pub values: GridFunction,
    pub cfg: SplitConfig,
    pub s: f64,
}

/// Output of [`dual_t`], tagged with the region it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct DualOutput {
    pub values: GridFunction,
    pub cfg: SplitConfig,
    pub s: f64,
}

/// `B₂ f(x) = |x|^{-s} Σ_{|y| >= (κ-1)|x|} f(y) |y|^{s-n} h^n`.
pub fn b2_majorant(f: &GridFunction, s: f64, cfg: &SplitConfig) -> Result<Majorant> {
    let spec = *f.spec();
    check_order(s, spec.dim())?;
    check_cost_cap(&spec)?;
    let n = spec.dim() as f64;
    let vol = spec.cell_volume();
    let radii = spec.radii();
    let values = f.values();
    let out = (0..spec.len())
        .into_par_iter()
        .map(|x| {
            let rx = radii[x];
            let sum = neumaier_sum(
                radii
                    .iter()
                    .zip(values)
                    .filter(|(&ry, &v)| v != 0.0 && cfg.in_majorant(rx, ry))
                    .map(|(&ry, &v)| v * ry.powf(s - n)),
            );
            sum * vol * rx.powf(-s)
        })
        .collect();
    Ok(Majorant {
        values: GridFunction::from_parts(spec, out),
        cfg: *cfg,
        s,
    })
}

/// `T g(y) = |y|^{s-n} Σ_{|x| <= |y|/(κ-1)} g(x) |x|^{-s} h^n`, the adjoint
/// of `B₂`. Membership uses the same predicate as [`b2_majorant`].
pub fn dual_t(g: &GridFunction, s: f64, cfg: &SplitConfig) -> Result<DualOutput> {
    let spec = *g.spec();
    check_order(s, spec.dim())?;
    check_cost_cap(&spec)?;
    let n = spec.dim() as f64;
    let vol = spec.cell_volume();
    let radii = spec.radii();
    let values = g.values();
    let out = (0..spec.len())
        .into_par_iter()
        .map(|y| {
            let ry = radii[y];
            let sum = neumaier_sum(
                radii
                    .iter()
                    .zip(values)
                    .filter(|(&rx, &v)| v != 0.0 && cfg.in_majorant(rx, ry))
                    .map(|(&rx, &v)| v * rx.powf(-s)),
            );
            sum * vol * ry.powf(s - n)
        })
        .collect();
    Ok(DualOutput {
        values: GridFunction::from_parts(spec, out),
        cfg: *cfg,
        s,
    })
}

/// `|⟨B₂f, g⟩ - ⟨Tg, f⟩| / max(|⟨B₂f, g⟩|, tiny)` for precomputed operators.
pub fn duality_residual(
    b2: &Majorant,
    t: &DualOutput,
    f: &GridFunction,
    g: &GridFunction,
) -> Result<f64> {
    if b2.cfg != t.cfg {
        return Err(Error::MaskMismatch {
            left: b2.cfg.kappa(),
            right: t.cfg.kappa(),
        });
    }
    if b2.s != t.s {
        return Err(Error::InvalidArgument(
            "operators built with different orders s".into(),
        ));
    }
    let left = b2.values.inner(g)?;
    let right = t.values.inner(f)?;
    Ok((left - right).abs() / left.abs().max(f64::MIN_POSITIVE))
}

/// Relative gap in the discrete Fubini identity `⟨B₂f, g⟩ = ⟨Tg, f⟩`.
pub fn duality_check(f: &GridFunction, g: &GridFunction, s: f64, cfg: &SplitConfig) -> Result<f64> {
    if f.spec() != g.spec() {
        return Err(Error::GridMismatch);
    }
    let b2 = b2_majorant(f, s, cfg)?;
    let t = dual_t(g, s, cfg)?;
    if f.values().iter().all(|&v| v == 0.0) || g.values().iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    duality_residual(&b2, &t, f, g)
}

/// `sup_y |Tg(y)| / (M(|g|^q))^{1/q}(y)`, skipping nodes where the
/// denominator vanishes. The maximal function is evaluated at `y`.
pub fn t_maximal_bound(g: &GridFunction, s: f64, q: f64, cfg: &SplitConfig) -> Result<f64> {
    let n = g.spec().dim() as f64;
    check_order(s, g.spec().dim())?;
    if !(q > n / (n - s)) {
        return Err(Error::InvalidExponents(format!(
            "q = {q} must exceed n / (n - s) = {}",
            n / (n - s)
        )));
    }
    let t = dual_t(g, s, cfg)?;
    let m = corollary_op(g, q, &MaximalConfig::centered())?;
    Ok(t.values
        .values()
        .iter()
        .zip(m.values())
        .filter(|(_, &d)| d > 0.0)
        .map(|(&v, &d)| v.abs() / d)
        .fold(0.0, f64::max))
}

/// Both sides of the Hölder step for `Tg` at one node `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderTerms {
    pub y_norm: f64,
    pub t_abs: f64,
    /// `|y|^{s-n} (Σ |g|^q h^n)^{1/q} (Σ |x|^{-sq'} h^n)^{1/q'}` over the region.
    pub holder_bound: f64,
    /// `C |y|^{-n/q} (Σ |g|^q h^n)^{1/q}` with
    /// `C = (|S^{n-1}| (κ-1)^{sq'-n} / (n - sq'))^{1/q'}`.
    pub scaled_bound: f64,
    /// Discrete `Σ_{|x| <= R} |x|^{-sq'} h^n` with `R = |y|/(κ-1)`.
    pub measure_sum: f64,
    /// Continuum `∫_{|x| <= R} |x|^{-sq'} dx`.
    pub measure_integral: f64,
}

/// Evaluates the Hölder chain bounding `|Tg(y)|` at every node.
pub fn holder_chain(
    g: &GridFunction,
    s: f64,
    q: f64,
    cfg: &SplitConfig,
) -> Result<Vec<HolderTerms>> {
    let spec = *g.spec();
    let dim = spec.dim();
    let n = dim as f64;
    check_order(s, dim)?;
    if !(q > n / (n - s)) {
        return Err(Error::InvalidExponents(format!(
            "q = {q} must exceed n / (n - s)"
        )));
    }
    let qc = q / (q - 1.0);
    let beta = s * qc;
    let sphere = 2.0 * std::f64::consts::PI.powf(n / 2.0) / statrs::function::gamma::gamma(n / 2.0);
    let constant = (sphere * cfg.inner_factor().powf(beta - n) / (n - beta)).powf(1.0 / qc);
    let t = dual_t(g, s, cfg)?;
    let vol = spec.cell_volume();
    let radii = spec.radii();
    Ok(radii
        .iter()
        .enumerate()
        .map(|(y, &ry)| {
            let members = || {
                radii
                    .iter()
                    .zip(g.values())
                    .filter(move |(&rx, _)| cfg.in_majorant(rx, ry))
            };
            let g_q = neumaier_sum(members().map(|(_, &v)| v.abs().powf(q))) * vol;
            let measure_sum = neumaier_sum(members().map(|(&rx, _)| rx.powf(-beta))) * vol;
            let radius = ry / cfg.inner_factor();
            HolderTerms {
                y_norm: ry,
                t_abs: t.values.values()[y].abs(),
                holder_bound: ry.powf(s - n) * g_q.powf(1.0 / q) * measure_sum.powf(1.0 / qc),
                scaled_bound: constant * ry.powf(-n / q) * g_q.powf(1.0 / q),
                measure_sum,
                measure_integral: sphere * radius.powf(n - beta) / (n - beta),
            }
        })
        .collect())
}

/// `‖B₂ f‖_p / ‖f‖_p`.
pub fn b2_strong_ratio(f: &GridFunction, s: f64, p: f64, cfg: &SplitConfig) -> Result<f64> {
    let denom = lp_norm(f, p);
    if denom == 0.0 {
        return Err(Error::Degenerate("‖f‖_p = 0".into()));
    }
    Ok(lp_norm(&b2_majorant(f, s, cfg)?.values, p) / denom)
}

/// `‖T g‖_{p'} / ‖g‖_{p'}`.
pub fn t_strong_ratio(g: &GridFunction, s: f64, p_conj: f64, cfg: &SplitConfig) -> Result<f64> {
    let denom = lp_norm(g, p_conj);
    if denom == 0.0 {
        return Err(Error::Degenerate("‖g‖_p' = 0".into()));
    }
    Ok(lp_norm(&dual_t(g, s, cfg)?.values, p_conj) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maximal::maximal_centered;
    use crate::spectral::{riesz_kernel_convolution, RieszConstant};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(l: f64, n: usize) -> GridSpec {
        GridSpec::new(1, l, n).unwrap()
    }

    fn random_nonneg(spec: GridSpec, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..spec.len())
            .map(|_| rng.random_range(0.0..1.0))
            .collect();
        GridFunction::new(spec, v).unwrap()
    }

    #[test]
    fn split_config_regions() {
        assert!(SplitConfig::new(1.5).is_err());
        let cfg = SplitConfig::default();
        assert_eq!(cfg.kappa(), 100.0);
        assert_eq!(cfg.inner_factor(), 99.0);
        // ties go to the near region
        assert!(cfg.is_near(100.0, 1.0));
        assert!(!cfg.is_near(100.0 + 1e-12, 1.0));
    }

    #[test]
    fn far_region_lies_in_majorant_region() {
        for kappa in [2.0, 3.5, 10.0, 100.0] {
            let cfg = SplitConfig::new(kappa).unwrap();
            let spec = GridSpec::new(2, 1.0, 16).unwrap();
            let radii = spec.radii();
            for x in 0..spec.len() {
                let cx = spec.coords(x);
                for y in 0..spec.len() {
                    let cy = spec.coords(y);
                    let d = ((cx[0] - cy[0]).powi(2) + (cx[1] - cy[1]).powi(2)).sqrt();
                    if !cfg.is_near(d, radii[x]) {
                        assert!(cfg.in_majorant(radii[x], radii[y]));
                    }
                }
            }
        }
    }

    #[test]
    fn classical_indicator() {
        let grid = HalfLineGrid::uniform(4.0, 4096).unwrap();
        let f = HalfLineFunction::from_fn(grid, |x| if x <= 1.0 { 1.0 } else { 0.0 }).unwrap();
        let r = classical_hardy_check(&f, 2.0).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-6, "{}", r.lhs);
        assert!((r.rhs - 4.0).abs() < 1e-12);
        assert!((r.ratio - 0.5).abs() < 1e-6);
        assert!(r.pass);
        let scaled = classical_hardy_check(&f.scale(3.0), 2.0).unwrap();
        assert!((scaled.ratio - r.ratio).abs() < 1e-12);
    }

    #[test]
    fn classical_rejects_excluded_inputs() {
        let grid = HalfLineGrid::uniform(4.0, 64).unwrap();
        let zero = HalfLineFunction::from_fn(grid.clone(), |_| 0.0).unwrap();
        assert!(matches!(
            classical_hardy_check(&zero, 2.0),
            Err(Error::Degenerate(_))
        ));
        let neg = HalfLineFunction::from_fn(grid.clone(), |x| 1.0 - x).unwrap();
        assert!(classical_hardy_check(&neg, 2.0).is_err());
        let one = HalfLineFunction::from_fn(grid, |_| 1.0).unwrap();
        assert!(classical_hardy_check(&one, 1.0).is_err());
    }

    #[test]
    fn sharpness_follows_closed_form() {
        let rows = classical_sharpness_sweep(2.0, &[1e2, 1e4, 1e6]).unwrap();
        for (r, t) in rows.iter().zip([1e2f64, 1e4, 1e6]) {
            // LHS = 4 ln T - 16 + 16/√T - 4/T + 4 (1 - 1/√T)² ... exact form:
            let sq = t.sqrt();
            let exact_lhs = 4.0 * (t.ln() - 4.0 * (1.0 - 1.0 / sq) + (1.0 - 1.0 / t))
                + 4.0 * (sq - 1.0).powi(2) / t;
            let exact_rhs = 4.0 * t.ln();
            assert!(
                (r.lhs / exact_lhs - 1.0).abs() < 1e-5,
                "{} vs {exact_lhs}",
                r.lhs
            );
            assert!((r.rhs / exact_rhs - 1.0).abs() < 1e-5);
            assert!(r.ratio < 1.0);
        }
        assert!(rows.windows(2).all(|w| w[1].ratio > w[0].ratio));
        assert!((rows[2].ratio - (1.0 - 2.0 / 1e6f64.ln())).abs() < 2e-3);
        assert!(classical_sharpness_sweep(2.0, &[5.0]).is_err());
        assert!(classical_sharpness_sweep(2.0, &[100.0, 10.0]).is_err());
    }

    #[test]
    fn cazenave_gaussian_2d() {
        let spec = GridSpec::new(2, 8.0, 256).unwrap();
        let u = TestFunction::standard_gaussian(2).generate(&spec).unwrap();
        let r = cazenave_check(&u, 2.0, 1.0).unwrap();
        let pi = std::f64::consts::PI;
        assert!((r.lhs / pi.powf(1.5) - 1.0).abs() < 0.02);
        assert!((r.rhs / (2.0 * pi) - 1.0).abs() < 0.02);
        assert!(r.pass);
        let scaled = cazenave_check(&u.scale(-4.0), 2.0, 1.0).unwrap();
        assert_eq!(scaled.pass, r.pass);
        assert!((scaled.ratio - r.ratio).abs() < 1e-12);
    }

    #[test]
    fn cazenave_degenerate_exponent() {
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        let u = TestFunction::standard_gaussian(2).generate(&spec).unwrap();
        let r = cazenave_check(&u, 3.0, 0.0).unwrap();
        assert_eq!(r.lhs, r.rhs);
        assert!(r.pass);
        assert!(cazenave_check(&u, 2.0, 2.0).is_err());
        assert!(cazenave_check(&u, 1.0, 1.5).is_err());
    }

    #[test]
    fn fractional_quotient_basics() {
        let spec = line(8.0, 512);
        let u = TestFunction::unit_bump(1).generate(&spec).unwrap();
        let q0 = fractional_hardy_quotient(&u, 0.0, 2.0).unwrap();
        assert!((q0.ratio - 1.0).abs() < 1e-12);
        let a = fractional_hardy_quotient(&u, 0.3, 2.0).unwrap();
        let b = fractional_hardy_quotient(&u.scale(7.0), 0.3, 2.0).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-12 * a.ratio);
        assert!(fractional_hardy_quotient(&u, 0.5, 2.0).is_err());
        assert!(fractional_hardy_quotient(&GridFunction::zeros(spec), 0.3, 2.0).is_err());
    }

    #[test]
    fn fractional_quotient_refines() {
        let q = |n: usize| {
            let spec = line(8.0, n);
            let u = TestFunction::unit_bump(1).generate(&spec).unwrap();
            fractional_hardy_quotient(&u, 0.3, 2.0).unwrap().ratio
        };
        let (a, b) = (q(512), q(1024));
        assert!((a / b - 1.0).abs() < 0.1, "{a} {b}");
    }

    #[test]
    fn empirical_constant_is_a_max() {
        let spec = line(8.0, 256);
        let fam: Vec<_> = [TestFunction::unit_bump(1), TestFunction::unit_plateau()]
            .iter()
            .map(|t| t.generate(&spec).unwrap())
            .collect();
        let single = empirical_constant(&fam[..1], 0.3, 2.0).unwrap();
        assert_eq!(
            single,
            fractional_hardy_quotient(&fam[0], 0.3, 2.0).unwrap().ratio
        );
        assert!(empirical_constant(&fam, 0.3, 2.0).unwrap() >= single);
        assert!(empirical_constant(&[], 0.3, 2.0).is_err());
    }

    #[test]
    fn endpoint_rows() {
        let spec = line(4.0, 8192);
        let u = TestFunction::unit_plateau().generate(&spec).unwrap();
        let e = Exponents::endpoint(1, 0.5, 2.0).unwrap();
        let rows = endpoint_blowup(&u, &e, &[0.1, 0.05, 0.025]).unwrap();
        assert!(rows
            .windows(2)
            .all(|w| w[1].lhs > w[0].lhs && w[1].rhs == w[0].rhs));
        for w in rows.windows(2) {
            let inc = w[1].lhs - w[0].lhs;
            assert!((inc / (2.0 * 2f64.ln()) - 1.0).abs() < 0.15, "{inc}");
        }
        let bad = Exponents::new(1, 0.3, 2.0).unwrap();
        assert!(endpoint_blowup(&u, &bad, &[0.1]).is_err());
        assert!(endpoint_blowup(&u, &e, &[0.0]).is_err());
    }

    #[test]
    fn interpolation_endpoints() {
        let spec = line(16.0, 512);
        let u = TestFunction::standard_gaussian(1).generate(&spec).unwrap();
        for s in [0.0, 1.0] {
            let r = interpolation_check(&u, s, 2.0).unwrap();
            assert!((r.ratio - 1.0).abs() < 1e-10, "s = {s}: {}", r.ratio);
        }
        let r0 = interpolation_check(&u, 0.0, 3.0).unwrap();
        assert!((r0.ratio - 1.0).abs() < 1e-10);
        let half = interpolation_check(&u, 0.5, 2.0).unwrap();
        assert!(half.ratio <= 1.0 && half.pass);
        let scaled = interpolation_check(&u.scale(0.25), 0.5, 2.0).unwrap();
        assert!((scaled.ratio - half.ratio).abs() < 1e-12);
        assert!(interpolation_check(&u, 1.5, 2.0).is_err());
    }

    #[test]
    fn dyadic_factor() {
        assert!((dyadic_sum(1.0) - 2.0).abs() < 1e-15);
        // partial sums converge to the closed form
        let s = 0.3;
        let partial: f64 = (0..2000).map(|j| 2f64.powf(-(j as f64) * s)).sum();
        assert!((partial - dyadic_sum(s)).abs() < 1e-12);
    }

    #[test]
    fn split_partition_identity() {
        let spec = line(4.0, 128);
        let f = TestFunction::unit_bump(1).generate(&spec).unwrap();
        for kappa in [2.0, 10.0, 100.0] {
            let parts = split_operator(&f, 0.3, &SplitConfig::new(kappa).unwrap()).unwrap();
            let sum = parts.near.add(&parts.far).unwrap();
            let gap = sum.sub(&parts.full).unwrap().max_abs() / parts.full.max_abs();
            assert!(gap < 1e-12);
        }
        let zero =
            split_operator(&GridFunction::zeros(spec), 0.3, &SplitConfig::default()).unwrap();
        assert_eq!(zero.near.max_abs() + zero.far.max_abs(), 0.0);
    }

    #[test]
    fn split_far_part_is_small_on_support() {
        let spec = line(4.0, 512);
        let f = TestFunction::unit_bump(1).generate(&spec).unwrap();
        let parts = split_operator(&f, 0.3, &SplitConfig::default()).unwrap();
        for i in 0..spec.len() {
            if spec.axis_coord(i).abs() < 1.0 {
                assert!(parts.far.values()[i] <= 0.25 * parts.full.values()[i]);
            }
        }
    }

    #[test]
    fn full_operator_is_scaled_riesz_kernel() {
        // for f >= 0, C_{n,s} |x|^s A f = riesz_kernel_convolution(f, s)
        let spec = line(3.0, 96);
        let f = random_nonneg(spec, 3);
        let s = 0.4;
        let parts = split_operator(&f, s, &SplitConfig::default()).unwrap();
        let direct = riesz_kernel_convolution(&f, s).unwrap();
        let c = RieszConstant::new(1, s).unwrap().value;
        let radii = spec.radii();
        for ((r, a), d) in radii.iter().zip(parts.full.values()).zip(direct.values()) {
            assert!((c * r.powf(s) * a / d - 1.0).abs() < 1e-12);
        }
        // and the fractional weighted integral of that potential is C^p ‖A f‖_p^p
        let p = 2.0;
        let w = weighted_integral(&direct, p, s * p, 0.0).unwrap();
        let a = c.powf(p) * lp_norm(&parts.full, p).powf(p);
        assert!((w / a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn a1_bound_for_constants() {
        let spec = line(2.0, 64);
        let f = GridFunction::constant(spec, 1.0);
        let mf = maximal_centered(&f);
        let b = a1_maximal_bound(&f, 0.3, &SplitConfig::default(), &mf).unwrap();
        // near region of radius κ|x| holds at most ∫_{|z|<κ|x|} |z|^{s-1} = 2 κ^s |x|^s / s
        let ceiling = 2.0 * 100f64.powf(0.3) / 0.3;
        assert!(
            b.sup_ratio > 0.0 && b.sup_ratio <= ceiling * 1.01,
            "{}",
            b.sup_ratio
        );
        assert!((b.dyadic_factor - dyadic_sum(0.3)).abs() < 1e-15);
    }

    #[test]
    fn majorant_dominates_far_part() {
        let spec = line(4.0, 64);
        for kappa in [2.0, 10.0, 100.0] {
            let cfg = SplitConfig::new(kappa).unwrap();
            for seed in 0..5 {
                let f = random_nonneg(spec, seed);
                let a2 = split_operator(&f, 0.3, &cfg).unwrap().far;
                let b2 = b2_majorant(&f, 0.3, &cfg).unwrap().values;
                for (a, b) in a2.values().iter().zip(b2.values()) {
                    assert!(a <= b, "κ = {kappa}: {a} > {b}");
                }
            }
        }
    }

    #[test]
    fn majorant_with_domination_factor_holds_termwise() {
        // a single far spike on the same side as x: here |x - y| < |y|, so the
        // bare majorant needs the ((κ+1)/κ)^{n-s} factor
        let spec = line(4.0, 64);
        let s = 0.3;
        for kappa in [2.0, 10.0, 100.0] {
            let cfg = SplitConfig::new(kappa).unwrap();
            let factor = cfg.kernel_domination_factor(1, s);
            for y in 0..spec.len() {
                let mut v = vec![0.0; spec.len()];
                v[y] = 1.0;
                let f = GridFunction::new(spec, v).unwrap();
                let a2 = split_operator(&f, s, &cfg).unwrap().far;
                let b2 = b2_majorant(&f, s, &cfg).unwrap().values;
                for (a, b) in a2.values().iter().zip(b2.values()) {
                    assert!(*a <= factor * b * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn b2_empty_region() {
        let spec = line(4.0, 64);
        let f = TestFunction::bump(vec![0.0], 0.5).generate(&spec).unwrap();
        let b2 = b2_majorant(&f, 0.3, &SplitConfig::default()).unwrap();
        for (i, v) in b2.values.values().iter().enumerate() {
            if 99.0 * spec.axis_coord(i).abs() > 0.5 {
                assert_eq!(*v, 0.0);
            }
        }
        assert_eq!(
            b2_majorant(&GridFunction::zeros(spec), 0.3, &SplitConfig::default())
                .unwrap()
                .values
                .max_abs(),
            0.0
        );
    }

    #[test]
    fn dual_t_empty_region() {
        let spec = line(1.0, 64);
        let g = GridFunction::constant(spec, 1.0);
        let t = dual_t(&g, 0.3, &SplitConfig::default()).unwrap();
        let h = spec.spacing();
        for (i, v) in t.values.values().iter().enumerate() {
            if spec.axis_coord(i).abs() / 99.0 < h / 2.0 {
                assert_eq!(*v, 0.0);
            }
        }
        assert_eq!(
            dual_t(&GridFunction::zeros(spec), 0.3, &SplitConfig::default())
                .unwrap()
                .values
                .max_abs(),
            0.0
        );
    }

    #[test]
    fn discrete_fubini() {
        let spec = line(4.0, 64);
        for kappa in [2.0, 3.0, 10.0, 100.0] {
            let cfg = SplitConfig::new(kappa).unwrap();
            for seed in 0..4 {
                let f = random_nonneg(spec, seed);
                let g = random_nonneg(spec, 100 + seed);
                assert!(duality_check(&f, &g, 0.3, &cfg).unwrap() <= 1e-10);
            }
        }
        let f = random_nonneg(spec, 1);
        assert_eq!(
            duality_check(&f, &GridFunction::zeros(spec), 0.3, &SplitConfig::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn mismatched_masks_are_flagged() {
        let spec = line(4.0, 64);
        let f = random_nonneg(spec, 1);
        let b2 = b2_majorant(&f, 0.3, &SplitConfig::new(10.0).unwrap()).unwrap();
        let t = dual_t(&f, 0.3, &SplitConfig::new(100.0).unwrap()).unwrap();
        assert!(matches!(
            duality_residual(&b2, &t, &f, &f),
            Err(Error::MaskMismatch { .. })
        ));
    }

    #[test]
    fn holder_step_termwise() {
        let spec = line(4.0, 64);
        let g = TestFunction::unit_bump(1).generate(&spec).unwrap();
        let h = spec.spacing();
        for kappa in [2.0, 10.0, 100.0] {
            let cfg = SplitConfig::new(kappa).unwrap();
            for t in holder_chain(&g, 0.3, 2.0, &cfg).unwrap() {
                assert!(t.t_abs <= t.holder_bound * (1.0 + 1e-12));
                // midpoint sums of the convex weight stay below the integral
                // over the region widened by half a cell
                let widened =
                    2.0 * (t.y_norm / cfg.inner_factor() + h / 2.0).powf(1.0 - 0.6) / (1.0 - 0.6);
                assert!(t.measure_sum <= widened * (1.0 + 1e-12));
            }
        }
        assert!(holder_chain(&g, 0.3, 1.4, &SplitConfig::default()).is_err());
    }

    #[test]
    fn t_bound_edge_cases() {
        let spec = line(4.0, 64);
        let zero = GridFunction::zeros(spec);
        assert_eq!(
            t_maximal_bound(&zero, 0.3, 2.0, &SplitConfig::default()).unwrap(),
            0.0
        );
        assert!(t_maximal_bound(&zero, 0.3, 1.2, &SplitConfig::default()).is_err());
        // κ = 100 needs L / 99 > h / 2 for the region to hold any node
        let spec = line(4.0, 512);
        let g = TestFunction::unit_bump(1).generate(&spec).unwrap();
        let b = t_maximal_bound(&g, 0.3, 2.0, &SplitConfig::default()).unwrap();
        assert!(b.is_finite() && b > 0.0);
    }

    #[test]
    fn strong_ratios_are_finite() {
        let spec = line(4.0, 128);
        let f = TestFunction::unit_bump(1).generate(&spec).unwrap();
        let cfg = SplitConfig::new(10.0).unwrap();
        assert!(b2_strong_ratio(&f, 0.3, 2.0, &cfg).unwrap().is_finite());
        assert!(t_strong_ratio(&f, 0.3, 2.0, &cfg).unwrap().is_finite());
    }
}
