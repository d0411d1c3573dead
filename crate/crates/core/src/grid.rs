//! Sampled functions on staggered uniform grids and their quadrature.
//!
//! Every grid is cell-centered on the cube `[-L, L]^n`: the node of cell `k`
//! along an axis sits at `(k + 1/2) h - L` with `h = 2L / N`. The origin is
//! never a node, so weights like `|x|^-a` can be evaluated directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, points: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width {half_width} must be positive"
            )));
        }
        if points < 8 || !points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per axis {points} must be even and at least 8"
            )));
        }
        Ok(Self {
            dim,
            half_width,
            points,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Points per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Volume of one cell, `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of nodes, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node coordinate along one axis. Computed as `(2k + 1 - N) L / N`, so
    /// reflection `k -> N - 1 - k` negates it exactly.
    pub fn axis_coord(&self, k: usize) -> f64 {
        let n = self.points as f64;
        (2.0 * k as f64 + 1.0 - n) * self.half_width / n
    }

    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.axis_coord(k)).collect()
    }

    /// Row-major multi-index of a linear index (axis 0 varies slowest).
    pub fn multi_index(&self, mut idx: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        for axis in (0..self.dim).rev() {
            out[axis] = idx % self.points;
            idx /= self.points;
        }
        out
    }

    pub fn linear_index(&self, multi: &[usize]) -> usize {
        multi[..self.dim]
            .iter()
            .fold(0, |acc, &k| acc * self.points + k)
    }

    /// Coordinates of the node with the given linear index.
    pub fn coords(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.multi_index(idx);
        let mut out = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            out[axis] = self.axis_coord(m[axis]);
        }
        out
    }

    /// Euclidean norm `|x|` of every node, in linear order.
    pub fn radii(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let c = self.coords(i);
                c[..self.dim].iter().map(|v| v * v).sum::<f64>().sqrt()
            })
            .collect()
    }

    /// Index of the node closest to `point` (per-axis rounding, clamped).
    pub fn nearest_node(&self, point: &[f64]) -> usize {
        let h = self.spacing();
        let mut multi = [0usize; MAX_DIM];
        for axis in 0..self.dim {
            let k = ((point[axis] + self.half_width) / h - 0.5).round();
            multi[axis] = k.clamp(0.0, (self.points - 1) as f64) as usize;
        }
        self.linear_index(&multi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite value at node {i}")));
        }
        Ok(Self { spec, values })
    }

    /// Crate-internal constructor for values already known to be finite.
    pub(crate) fn from_parts(spec: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::constant(spec, 0.0)
    }

    pub fn constant(spec: GridSpec, c: f64) -> Self {
        Self {
            spec,
            values: vec![c; spec.len()],
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(spec: GridSpec, f: F) -> Result<Self> {
        let values = (0..spec.len())
            .map(|i| {
                let c = spec.coords(i);
                f(&c[..spec.dim()])
            })
            .collect();
        Self::new(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            spec: self.spec,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Average over the nodes (the torus zero mode).
    pub fn mean(&self) -> f64 {
        neumaier_sum(self.values.iter().copied()) / self.values.len() as f64
    }

    /// `f - mean(f)`.
    pub fn zero_mean(&self) -> Self {
        let m = self.mean();
        self.map(|v| v - m)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Shifts the samples by whole cells along each axis; vacated cells are zero.
    pub fn shift(&self, offset: &[isize]) -> Self {
        let spec = self.spec;
        let n = spec.points() as isize;
        let mut out = vec![0.0; spec.len()];
        for (i, &v) in self.values.iter().enumerate() {
            let m = spec.multi_index(i);
            let mut target = [0usize; MAX_DIM];
            let mut inside = true;
            for axis in 0..spec.dim() {
                let t = m[axis] as isize + offset[axis];
                if !(0..n).contains(&t) {
                    inside = false;
                    break;
                }
                target[axis] = t as usize;
            }
            if inside {
                out[spec.linear_index(&target)] = v;
            }
        }
        Self::from_parts(spec, out)
    }

    /// L² inner product `h^n Σ f g`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        let sum = neumaier_sum(self.values.iter().zip(&other.values).map(|(a, b)| a * b));
        Ok(sum * self.spec.cell_volume())
    }
}

/// Exponent triple `(n, s, p)` with an optional Hölder exponent `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub dim: usize,
    pub s: f64,
    pub p: f64,
    pub q: Option<f64>,
}

impl Exponents {
    /// Exponents satisfying `p > 1`, `0 <= s` and `s p < n`.
    pub fn new(dim: usize, s: f64, p: f64) -> Result<Self> {
        let e = Self::endpoint_unchecked(dim, s, p)?;
        if !(p > 1.0) {
            return Err(Error::InvalidExponents(format!("p = {p} must exceed 1")));
        }
        if s * p >= dim as f64 {
            return Err(Error::InvalidExponents(format!(
                "s p = {} must be below n = {dim}",
                s * p
            )));
        }
        Ok(e)
    }

    /// The endpoint `s p = n`, where the weighted integral diverges.
    pub fn endpoint(dim: usize, s: f64, p: f64) -> Result<Self> {
        let e = Self::endpoint_unchecked(dim, s, p)?;
        if !(p > 1.0) {
            return Err(Error::InvalidExponents(format!("p = {p} must exceed 1")));
        }
        if (s * p - dim as f64).abs() > 1e-12 * dim as f64 {
            return Err(Error::InvalidExponents(format!(
                "endpoint requires s p = n, got s p = {}",
                s * p
            )));
        }
        Ok(e)
    }

    /// Exponents for weak-type checks, where `p = 1` is allowed.
    pub fn weak(dim: usize, s: f64, p: f64) -> Result<Self> {
        let e = Self::endpoint_unchecked(dim, s, p)?;
        if !(p >= 1.0) {
            return Err(Error::InvalidExponents(format!(
                "p = {p} must be at least 1"
            )));
        }
        Ok(e)
    }

    fn endpoint_unchecked(dim: usize, s: f64, p: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidExponents(format!(
                "dimension {dim} not in 1..=3"
            )));
        }
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::InvalidExponents(format!(
                "s = {s} must be nonnegative"
            )));
        }
        if !p.is_finite() {
            return Err(Error::InvalidExponents(format!("p = {p} must be finite")));
        }
        Ok(Self { dim, s, p, q: None })
    }

    /// Attaches a Hölder exponent `q` with `n / (n - s) < q <= p'`.
    pub fn with_holder(mut self, q: f64) -> Result<Self> {
        let n = self.dim as f64;
        let lower = n / (n - self.s);
        if !(q > lower) {
            return Err(Error::InvalidExponents(format!(
                "q = {q} must exceed n / (n - s) = {lower}"
            )));
        }
        if q > self.p_conjugate() * (1.0 + 1e-12) {
            return Err(Error::InvalidExponents(format!(
                "q = {q} must not exceed p' = {}",
                self.p_conjugate()
            )));
        }
        self.q = Some(q);
        Ok(self)
    }

    /// `p' = p / (p - 1)`; infinite for `p = 1`.
    pub fn p_conjugate(&self) -> f64 {
        conjugate(self.p)
    }

    pub fn q_conjugate(&self) -> Option<f64> {
        self.q.map(conjugate)
    }

    /// Weight exponent `s p` of the fractional Hardy integral.
    pub fn weight(&self) -> f64 {
        self.s * self.p
    }
}

/// Hölder conjugate of `p`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Midpoint rule: `h^n Σ f`.
pub fn integrate(f: &GridFunction) -> f64 {
    neumaier_sum(f.values.iter().copied()) * f.spec.cell_volume()
}

/// `h^n Σ_{|x_k| > cutoff} |f(x_k)|^p / |x_k|^a`.
///
/// A weight with `a >= n` is only accepted together with a positive inner
/// cutoff; use [`weighted_integral_divergent`] to evaluate it anyway.
pub fn weighted_integral(f: &GridFunction, p: f64, a: f64, inner_cutoff: f64) -> Result<f64> {
    if a >= f.spec.dim() as f64 && !(inner_cutoff > 0.0) {
        return Err(Error::DivergentWeight {
            exponent: a,
            dim: f.spec.dim(),
        });
    }
    weighted_integral_divergent(f, p, a, inner_cutoff)
}

/// Same as [`weighted_integral`] without the integrability guard.
pub fn weighted_integral_divergent(
    f: &GridFunction,
    p: f64,
    a: f64,
    inner_cutoff: f64,
) -> Result<f64> {
    if !(p > 0.0) || !a.is_finite() || inner_cutoff < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "weighted integral needs p > 0, finite a, cutoff >= 0 (p = {p}, a = {a}, cutoff = {inner_cutoff})"
        )));
    }
    let radii = f.spec.radii();
    let sum = neumaier_sum(
        f.values
            .iter()
            .zip(&radii)
            .filter(|(_, &r)| r > inner_cutoff)
            .map(|(&v, &r)| v.abs().powf(p) * r.powf(-a)),
    );
    Ok(sum * f.spec.cell_volume())
}

/// `(∫ |f|^p)^{1/p}`.
pub fn lp_norm(f: &GridFunction, p: f64) -> f64 {
    assert!(p >= 1.0, "lp_norm requires p >= 1, got {p}");
    if p == 1.0 {
        return neumaier_sum(f.values.iter().map(|v| v.abs())) * f.spec.cell_volume();
    }
    // Scale by the max to keep |f|^p in range.
    let m = f.max_abs();
    if m == 0.0 {
        return 0.0;
    }
    let sum = neumaier_sum(f.values.iter().map(|v| (v.abs() / m).powf(p)));
    m * (sum * f.spec.cell_volume()).powf(1.0 / p)
}

/// Cell-centered grid on the half-line `(0, x_max]`, uniform or geometric.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineGrid {
    edges: Vec<f64>,
    nodes: Vec<f64>,
    widths: Vec<f64>,
}

impl HalfLineGrid {
    /// `cells` equal cells on `(0, x_max]`.
    pub fn uniform(x_max: f64, cells: usize) -> Result<Self> {
        if !(x_max > 0.0) || cells == 0 {
            return Err(Error::InvalidGrid(format!(
                "half-line grid needs x_max > 0 and cells > 0 (x_max = {x_max}, cells = {cells})"
            )));
        }
        let edges = (0..=cells)
            .map(|k| x_max * k as f64 / cells as f64)
            .collect();
        Self::from_edges(edges)
    }

    /// `uniform_cells` equal cells on `(0, x_split]` followed by geometric
    /// cells on `[x_split, x_max]` with `cells_per_decade` cells per factor 10.
    pub fn graded(
        x_split: f64,
        x_max: f64,
        uniform_cells: usize,
        cells_per_decade: usize,
    ) -> Result<Self> {
        if !(x_split > 0.0 && x_max > x_split) || uniform_cells == 0 || cells_per_decade == 0 {
            return Err(Error::InvalidGrid(format!(
                "graded grid needs 0 < x_split < x_max and positive cell counts \
                 (x_split = {x_split}, x_max = {x_max})"
            )));
        }
        let mut edges: Vec<f64> = (0..=uniform_cells)
            .map(|k| x_split * k as f64 / uniform_cells as f64)
            .collect();
        let decades = (x_max / x_split).log10();
        let geo = ((decades * cells_per_decade as f64).ceil() as usize).max(1);
        let ratio = (x_max / x_split).ln() / geo as f64;
        for k in 1..geo {
            edges.push(x_split * (ratio * k as f64).exp());
        }
        edges.push(x_max);
        Self::from_edges(edges)
    }

    fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("cell edges must increase".into()));
        }
        let nodes = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let widths = edges.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self {
            edges,
            nodes,
            widths,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn x_max(&self) -> f64 {
        *self.edges.last().expect("grid has edges")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineFunction {
    grid: HalfLineGrid,
    values: Vec<f64>,
}

impl HalfLineFunction {
    pub fn new(grid: HalfLineGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite half-line value".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: HalfLineGrid, f: F) -> Result<Self> {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &HalfLineGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Midpoint rule `Σ w_k g(f_k)`.
    pub fn integrate_with<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        neumaier_sum(
            self.values
                .iter()
                .zip(&self.grid.widths)
                .map(|(&v, &w)| g(v) * w),
        )
    }
}
