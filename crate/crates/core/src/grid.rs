//! Spectral grids on the supported surfaces.
//!
//! Sphere charts use Gauss–Legendre nodes in `cos(theta)` times uniform
//! azimuthal nodes; charts whose two coordinates are both periodic (the
//! cylinder, the ring and periodic custom charts) use uniform Fourier grids.
//! Nodes are stored row-major: node `j * n2 + k` has `q1 = axis1[j]`,
//! `q2 = axis2[k]`.
//!
//! The polar derivative is applied per azimuthal parity class. Even azimuthal
//! orders are polynomials in `x = cos(theta)` and odd orders are `sin(theta)`
//! times a polynomial; both are differentiated exactly through a Legendre
//! transform, and the classes are separated by the shift `phi -> phi + pi`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use faer::{c64, Mat, MatRef};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{Chart, ChartKind, Frame};
use crate::legendre::{gauss_legendre, normalized_legendre, spherical_harmonic};
use crate::operators::ScalarOp;

/// Smallest accepted number of nodes along a spectral direction.
pub const MIN_NODES: usize = 8;
/// Largest accepted total node count; operators are dense.
pub const MAX_NODES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Gauss–Legendre in `cos(q1)` times Fourier in `q2`.
    Polar,
    /// Fourier in every direction (`n2 == 1` for a curve).
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coord {
    Q1,
    Q2,
}

pub struct Grid {
    chart: Chart,
    layout: Layout,
    n1: usize,
    n2: usize,
    axis1: Vec<f64>,
    axis2: Vec<f64>,
    weights: Vec<f64>,
    d1: Mat<c64>,
    d2: Mat<c64>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("chart", &self.chart.describe())
            .field("layout", &self.layout)
            .field("n1", &self.n1)
            .field("n2", &self.n2)
            .finish()
    }
}

/// Builds the grid for `chart` at resolution `n1 x n2`.
pub fn build_grid(chart: &Chart, n1: usize, n2: usize) -> Result<Arc<Grid>> {
    let layout = match chart.kind() {
        ChartKind::Sphere { .. } => Layout::Polar,
        _ if chart.surface_coords().all(|c| c.domain.periodic) => Layout::Periodic,
        _ => {
            return Err(Error::UnsupportedChart(format!(
                "no spectral grid for {}: both surface coordinates must be periodic",
                chart.describe()
            )))
        }
    };
    check_resolution(chart, layout, n1, n2)?;
    let grid = match layout {
        Layout::Polar => polar_grid(chart, n1, n2)?,
        Layout::Periodic => periodic_grid(chart, n1, n2)?,
    };
    Ok(Arc::new(grid))
}

fn check_resolution(chart: &Chart, layout: Layout, n1: usize, n2: usize) -> Result<()> {
    let curve = chart.dimension() == 1;
    if n1 < MIN_NODES {
        return Err(Error::Resolution(format!("N1 = {n1} is below the minimum {MIN_NODES}")));
    }
    if curve {
        if n2 != 1 {
            return Err(Error::Resolution(format!("a ring grid has N2 = 1, got {n2}")));
        }
    } else if n2 < MIN_NODES {
        return Err(Error::Resolution(format!("N2 = {n2} is below the minimum {MIN_NODES}")));
    }
    if n2 > 1 && !n2.is_multiple_of(2) {
        return Err(Error::Resolution(format!("Fourier size N2 = {n2} must be even")));
    }
    if layout == Layout::Periodic && !n1.is_multiple_of(2) {
        return Err(Error::Resolution(format!("Fourier size N1 = {n1} must be even")));
    }
    if n1 * n2 > MAX_NODES {
        return Err(Error::Resolution(format!(
            "{n1}x{n2} = {} nodes exceeds the dense limit {MAX_NODES}",
            n1 * n2
        )));
    }
    Ok(())
}

/// Fourier differentiation matrix on `n` (even) uniform nodes over a period
/// `length`. The Nyquist mode is differentiated to zero.
pub fn fourier_diff_matrix(n: usize, length: f64) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    let scale = 2.0 * PI / length;
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let k = i as i64 - j as i64;
                let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                d[i * n + j] = scale * 0.5 * sign / (0.5 * k as f64 * h).tan();
            }
        }
    }
    d
}

/// Differentiation matrix in `x` on the Gauss–Legendre nodes, exact for
/// polynomials of degree below `x.len()`: `D = V' V^T W`.
fn legendre_diff_matrix(x: &[f64], w: &[f64]) -> Vec<f64> {
    let n = x.len();
    let tables: Vec<_> = x.iter().map(|&xi| normalized_legendre(n, xi)).collect();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n).map(|l| tables[i].1[l] * tables[j].0[l]).sum();
            d[i * n + j] = s * w[j];
        }
    }
    d
}

fn polar_grid(chart: &Chart, n1: usize, n2: usize) -> Result<Grid> {
    let (x, glw) = gauss_legendre(n1);
    let theta: Vec<f64> = x.iter().map(|x| x.acos()).collect();
    let s: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
    let phi: Vec<f64> = (0..n2).map(|k| 2.0 * PI * k as f64 / n2 as f64).collect();
    let area = chart.area_factor();

    let mut weights = Vec::with_capacity(n1 * n2);
    for j in 0..n1 {
        for &p in &phi {
            let hh = chart.eval_on_surface(&area, theta[j], p)?;
            weights.push(glw[j] / s[j] * hh * 2.0 * PI / n2 as f64);
        }
    }

    // even family: f = p(x), df/dtheta = -sin(theta) p'(x)
    // odd family:  f = sin(theta) q(x), df/dtheta = x q - sin^2(theta) q'(x)
    let dx = legendre_diff_matrix(&x, &glw);
    let mut de = vec![0.0; n1 * n1];
    let mut dodd = vec![0.0; n1 * n1];
    for i in 0..n1 {
        for j in 0..n1 {
            de[i * n1 + j] = -s[i] * dx[i * n1 + j];
            let diag = if i == j { x[i] / s[i] } else { 0.0 };
            dodd[i * n1 + j] = diag - s[i] * s[i] * dx[i * n1 + j] / s[j];
        }
    }

    let n = n1 * n2;
    let half = n2 / 2;
    let mut d1 = Mat::<c64>::zeros(n, n);
    for i in 0..n1 {
        for j in 0..n1 {
            let same = 0.5 * (de[i * n1 + j] + dodd[i * n1 + j]);
            let shifted = 0.5 * (de[i * n1 + j] - dodd[i * n1 + j]);
            for k in 0..n2 {
                d1[(i * n2 + k, j * n2 + k)] += c64::new(same, 0.0);
                d1[(i * n2 + k, j * n2 + (k + half) % n2)] += c64::new(shifted, 0.0);
            }
        }
    }
    let dphi = fourier_diff_matrix(n2, 2.0 * PI);
    let d2 = block_diag(n1, n2, &dphi);

    Ok(Grid {
        chart: chart.clone(),
        layout: Layout::Polar,
        n1,
        n2,
        axis1: theta,
        axis2: phi,
        weights,
        d1,
        d2,
    })
}

/// `I_{n1} (x) D` for a Fourier matrix `D` acting on the fast index.
fn block_diag(n1: usize, n2: usize, d: &[f64]) -> Mat<c64> {
    let n = n1 * n2;
    let mut m = Mat::<c64>::zeros(n, n);
    for j in 0..n1 {
        for a in 0..n2 {
            for b in 0..n2 {
                m[(j * n2 + a, j * n2 + b)] = c64::new(d[a * n2 + b], 0.0);
            }
        }
    }
    m
}

fn periodic_grid(chart: &Chart, n1: usize, n2: usize) -> Result<Grid> {
    let dom1 = chart.q1().domain;
    let axis1: Vec<f64> = (0..n1)
        .map(|j| dom1.min + dom1.length() * j as f64 / n1 as f64)
        .collect();
    let (axis2, len2) = match chart.q2() {
        Some(q2) => {
            let d = q2.domain;
            let a = (0..n2).map(|k| d.min + d.length() * k as f64 / n2 as f64).collect();
            (a, d.length())
        }
        None => (vec![0.0], 1.0),
    };
    let area = chart.area_factor();
    let cell = dom1.length() / n1 as f64 * len2 / n2 as f64;
    let mut weights = Vec::with_capacity(n1 * n2);
    for &u in &axis1 {
        for &v in &axis2 {
            weights.push(chart.eval_on_surface(&area, u, v)? * cell);
        }
    }

    let n = n1 * n2;
    let dq1 = fourier_diff_matrix(n1, dom1.length());
    let mut d1 = Mat::<c64>::zeros(n, n);
    for a in 0..n1 {
        for b in 0..n1 {
            for k in 0..n2 {
                d1[(a * n2 + k, b * n2 + k)] = c64::new(dq1[a * n1 + b], 0.0);
            }
        }
    }
    let d2 = if n2 > 1 {
        block_diag(n1, n2, &fourier_diff_matrix(n2, len2))
    } else {
        Mat::<c64>::zeros(n, n)
    };

    Ok(Grid {
        chart: chart.clone(),
        layout: Layout::Periodic,
        n1,
        n2,
        axis1,
        axis2,
        weights,
        d1,
        d2,
    })
}

/// A spectral mode used to build band-limited states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Spherical harmonic `Y_l^m`.
    Harmonic { l: usize, m: i64 },
    /// `exp(i n u1 + i k u2)` with `u` the coordinates scaled to period `2 pi`.
    Fourier { n: i64, k: i64 },
}

/// Weighted-orthonormal basis of a band of modes, one column per mode.
#[derive(Debug, Clone)]
pub struct Band {
    pub modes: Vec<Mode>,
    pub basis: Mat<c64>,
}

impl Band {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

/// Which band of modes to span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandKind {
    /// Modes well inside the truncation (`l <= N1/2`, `|n| <= N/4`), on which
    /// products of a few operators remain exactly resolved.
    Test,
    /// Every mode on which the Hamiltonian acts exactly
    /// (`l <= N1 - 2`, or below the Nyquist frequency).
    Resolved,
}

impl Grid {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis1(&self) -> &[f64] {
        &self.axis1
    }

    pub fn axis2(&self) -> &[f64] {
        &self.axis2
    }

    /// Surface coordinates of node `i`.
    pub fn node(&self, i: usize) -> (f64, f64) {
        (self.axis1[i / self.n2], self.axis2[i % self.n2])
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn d1(&self) -> MatRef<'_, c64> {
        self.d1.as_ref()
    }

    pub fn d2(&self) -> MatRef<'_, c64> {
        self.d2.as_ref()
    }

    /// Cartesian frame at every node, for charts with a known embedding.
    pub fn frames(&self) -> Result<Vec<Frame>> {
        self.nodes()
            .map(|(u, v)| {
                self.chart.frame(u, v).ok_or_else(|| {
                    Error::UnsupportedChart(format!(
                        "{} has no Cartesian embedding",
                        self.chart.describe()
                    ))
                })
            })
            .collect()
    }

    /// Evaluates a surface expression at every node.
    pub fn sample_expr(&self, e: &Expr) -> Result<Vec<f64>> {
        let e = self.chart.on_surface(e);
        self.nodes()
            .enumerate()
            .map(|(i, (u, v))| {
                let value = self.chart.eval_on_surface(&e, u, v)?;
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(Error::NonFinite { node: i, value })
                }
            })
            .collect()
    }

    /// Values of a mode at every node (not normalized).
    pub fn mode_values(&self, mode: Mode) -> Vec<c64> {
        match mode {
            Mode::Harmonic { l, m } => self
                .nodes()
                .map(|(t, p)| spherical_harmonic(l, m, t, p))
                .collect(),
            Mode::Fourier { n, k } => {
                let d1 = self.chart.q1().domain;
                let d2 = self.chart.q2().map(|c| c.domain);
                self.nodes()
                    .map(|(u, v)| {
                        let mut arg = 2.0 * PI * n as f64 * (u - d1.min) / d1.length();
                        if let Some(d2) = d2 {
                            arg += 2.0 * PI * k as f64 * (v - d2.min) / d2.length();
                        }
                        c64::from_polar(1.0, arg)
                    })
                    .collect()
            }
        }
    }

    /// Modes spanning the given band, in a fixed order.
    pub fn band_modes(&self, kind: BandKind) -> Vec<Mode> {
        match self.layout {
            Layout::Polar => {
                let lmax = match kind {
                    BandKind::Test => self.n1 / 2,
                    BandKind::Resolved => self.n1 - 2,
                };
                // azimuthal orders must stay below the Nyquist frequency
                let lmax = lmax.min(self.n2 / 2 - 1);
                let mut modes = Vec::new();
                for l in 0..=lmax {
                    for m in -(l as i64)..=(l as i64) {
                        modes.push(Mode::Harmonic { l, m });
                    }
                }
                modes
            }
            Layout::Periodic => {
                let limit = |n: usize| match kind {
                    BandKind::Test => (n / 4) as i64,
                    BandKind::Resolved => (n / 2) as i64 - 1,
                };
                let n1max = limit(self.n1);
                let n2max = if self.n2 > 1 { limit(self.n2) } else { 0 };
                let mut modes = Vec::new();
                for n in -n1max..=n1max {
                    for k in -n2max..=n2max {
                        modes.push(Mode::Fourier { n, k });
                    }
                }
                modes
            }
        }
    }

    /// Weighted-orthonormal basis of the band.
    pub fn band(&self, kind: BandKind) -> Band {
        let modes = self.band_modes(kind);
        let n = self.len();
        let mut basis = Mat::<c64>::zeros(n, modes.len());
        for (c, &mode) in modes.iter().enumerate() {
            for (i, v) in self.mode_values(mode).into_iter().enumerate() {
                basis[(i, c)] = v;
            }
        }
        // Harmonics, and Fourier modes on built-in charts, are discretely
        // orthogonal already; modes of custom charts are orthogonalized
        // against the varying area factor.
        let orthogonalize = self.chart.kind() == ChartKind::Custom;
        for c in 0..modes.len() {
            if orthogonalize {
                for _ in 0..2 {
                    for p in 0..c {
                        let proj: c64 = (0..n)
                            .map(|i| basis[(i, p)].conj() * basis[(i, c)] * self.weights[i])
                            .sum();
                        for i in 0..n {
                            let b = basis[(i, p)];
                            basis[(i, c)] -= proj * b;
                        }
                    }
                }
            }
            let norm = weighted_norm(&self.weights, basis.col_as_slice(c));
            for i in 0..n {
                basis[(i, c)] /= norm;
            }
        }
        Band { modes, basis }
    }

    /// Pseudo-random normalized states with complex Gaussian coefficients on
    /// the test band, reproducible from `seed`.
    pub fn test_states(self: &Arc<Self>, count: usize, seed: u64) -> Vec<SurfaceState> {
        self.random_states(&self.band(BandKind::Test), count, seed)
    }

    pub fn random_states(self: &Arc<Self>, band: &Band, count: usize, seed: u64) -> Vec<SurfaceState> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let coeffs: Vec<c64> = (0..band.len())
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        c64::new(re, im)
                    })
                    .collect();
                let values = (0..self.len())
                    .map(|i| (0..band.len()).map(|c| band.basis[(i, c)] * coeffs[c]).sum())
                    .collect();
                let mut s = SurfaceState {
                    grid: Arc::clone(self),
                    values,
                };
                s.normalize().expect("random state has positive norm");
                s
            })
            .collect()
    }
}

/// Complex wavefunction sampled at the grid nodes.
#[derive(Debug, Clone)]
pub struct SurfaceState {
    grid: Arc<Grid>,
    values: Vec<c64>,
}

impl SurfaceState {
    pub fn new(grid: &Arc<Grid>, values: Vec<c64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "state has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some((node, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                node,
                value: if v.re.is_finite() { v.im } else { v.re },
            });
        }
        Ok(SurfaceState {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> c64) -> Result<Self> {
        let values = grid.nodes().map(|(u, v)| f(u, v)).collect();
        SurfaceState::new(grid, values)
    }

    /// A single mode, normalized.
    pub fn mode(grid: &Arc<Grid>, mode: Mode) -> Result<Self> {
        let mut s = SurfaceState::new(grid, grid.mode_values(mode))?;
        s.normalize()?;
        Ok(s)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[c64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<c64> {
        self.values
    }

    pub fn same_grid(&self, other: &SurfaceState) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
    }

    pub fn inner(&self, other: &SurfaceState) -> Result<c64> {
        inner_product(&self.grid, self, other)
    }

    pub fn norm(&self) -> f64 {
        weighted_norm(&self.grid.weights, &self.values)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument("cannot normalize a zero state".into()));
        }
        for v in &mut self.values {
            *v /= n;
        }
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn scaled(&self, c: c64) -> SurfaceState {
        SurfaceState {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `self - other`.
    pub fn sub(&self, other: &SurfaceState) -> Result<SurfaceState> {
        self.zip(other, |a, b| a - b)
    }

    /// `self + other`.
    pub fn add(&self, other: &SurfaceState) -> Result<SurfaceState> {
        self.zip(other, |a, b| a + b)
    }

    fn zip(&self, other: &SurfaceState, f: impl Fn(c64, c64) -> c64) -> Result<SurfaceState> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        Ok(SurfaceState {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        })
    }
}

pub(crate) fn weighted_norm(w: &[f64], v: &[c64]) -> f64 {
    w.iter().zip(v).map(|(w, v)| w * v.norm_sqr()).sum::<f64>().sqrt()
}

/// `sum_i w_i conj(a_i) b_i`.
pub fn inner_product(g: &Arc<Grid>, a: &SurfaceState, b: &SurfaceState) -> Result<c64> {
    if !Arc::ptr_eq(g, &a.grid) || !Arc::ptr_eq(g, &b.grid) {
        return Err(Error::GridMismatch);
    }
    Ok(g.weights
        .iter()
        .zip(a.values.iter().zip(&b.values))
        .map(|(w, (a, b))| a.conj() * b * *w)
        .sum())
}

/// Multiplication by a surface expression.
pub fn mult_op(g: &Arc<Grid>, f: &Expr) -> Result<ScalarOp> {
    let values = g.sample_expr(f)?;
    Ok(ScalarOp::diagonal(
        g,
        values.into_iter().map(|v| c64::new(v, 0.0)).collect(),
        f.to_string(),
    ))
}

/// Multiplication by a function of the surface coordinates.
pub fn mult_op_fn(g: &Arc<Grid>, label: &str, f: impl Fn(f64, f64) -> f64) -> Result<ScalarOp> {
    let values = g
        .nodes()
        .enumerate()
        .map(|(i, (u, v))| {
            let value = f(u, v);
            if value.is_finite() {
                Ok(c64::new(value, 0.0))
            } else {
                Err(Error::NonFinite { node: i, value })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalarOp::diagonal(g, values, label))
}

/// Spectral derivative along a surface coordinate.
pub fn deriv_op(g: &Arc<Grid>, coord: Coord) -> ScalarOp {
    match coord {
        Coord::Q1 => ScalarOp::dense(g, g.d1.clone(), format!("d/d{}", g.chart.q1().name)),
        Coord::Q2 => {
            let name = g.chart.q2().map_or("q2", |c| c.name.as_str());
            ScalarOp::dense(g, g.d2.clone(), format!("d/d{name}"))
        }
    }
}
