//! Operator algebra on a grid.
//!
//! A [`ScalarOp`] is an `N x N` complex matrix acting on nodal values of a
//! wavefunction; multiplication operators are stored as diagonals and
//! everything else densely. A [`VectorOp`] holds the three Cartesian
//! components of a vector operator, so dot and cross products of
//! non-commuting operators are plain ordered sums of matrix products.
//!
//! Adjoints are taken with respect to the quadrature inner product,
//! `A† = W⁻¹ Aᴴ W`.

mod assembly;
mod export;

use std::sync::Arc;

use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::grid::{weighted_norm, Band, Grid, SurfaceState};

pub use assembly::{
    angular_momentum, bare_momentum, force_closed_form, force_heisenberg, hamiltonian,
    laplacian, normal_field, position_op, surface_gradient, surface_momentum,
    symmetrized_tangential_contraction, torque, velocity_squared, ForceParts, OperatorSet,
    TangentField,
};
pub use export::{read_operator, write_operator, CQOP_MAGIC};

#[derive(Debug, Clone)]
enum Repr {
    Diagonal(Vec<c64>),
    Dense(Mat<c64>),
}

/// Linear operator on wavefunctions sampled on a grid.
#[derive(Debug, Clone)]
pub struct ScalarOp {
    grid: Arc<Grid>,
    repr: Repr,
    label: String,
}

impl ScalarOp {
    pub fn diagonal(grid: &Arc<Grid>, values: Vec<c64>, label: impl Into<String>) -> ScalarOp {
        assert_eq!(values.len(), grid.len(), "diagonal length must match the grid");
        ScalarOp {
            grid: Arc::clone(grid),
            repr: Repr::Diagonal(values),
            label: label.into(),
        }
    }

    pub fn dense(grid: &Arc<Grid>, matrix: Mat<c64>, label: impl Into<String>) -> ScalarOp {
        assert!(
            matrix.nrows() == grid.len() && matrix.ncols() == grid.len(),
            "matrix shape must match the grid"
        );
        ScalarOp {
            grid: Arc::clone(grid),
            repr: Repr::Dense(matrix),
            label: label.into(),
        }
    }

    pub fn identity(grid: &Arc<Grid>) -> ScalarOp {
        ScalarOp::constant(grid, c64::new(1.0, 0.0))
    }

    pub fn zero(grid: &Arc<Grid>) -> ScalarOp {
        ScalarOp::constant(grid, c64::new(0.0, 0.0))
    }

    pub fn constant(grid: &Arc<Grid>, c: c64) -> ScalarOp {
        ScalarOp::diagonal(grid, vec![c; grid.len()], format!("{c}"))
    }

    /// Multiplication by real nodal values.
    pub fn real_diagonal(grid: &Arc<Grid>, values: &[f64], label: impl Into<String>) -> ScalarOp {
        ScalarOp::diagonal(grid, values.iter().map(|v| c64::new(*v, 0.0)).collect(), label)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> ScalarOp {
        self.label = label.into();
        self
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.repr, Repr::Diagonal(_))
    }

    pub fn diagonal_values(&self) -> Option<&[c64]> {
        match &self.repr {
            Repr::Diagonal(d) => Some(d),
            Repr::Dense(_) => None,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> c64 {
        match &self.repr {
            Repr::Diagonal(d) if i == j => d[i],
            Repr::Diagonal(_) => c64::new(0.0, 0.0),
            Repr::Dense(m) => m[(i, j)],
        }
    }

    pub fn to_dense(&self) -> Mat<c64> {
        match &self.repr {
            Repr::Diagonal(d) => {
                let mut m = Mat::<c64>::zeros(d.len(), d.len());
                for (i, v) in d.iter().enumerate() {
                    m[(i, i)] = *v;
                }
                m
            }
            Repr::Dense(m) => m.clone(),
        }
    }

    fn check(&self, other: &ScalarOp) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn derived(&self, repr: Repr, label: String) -> ScalarOp {
        ScalarOp {
            grid: Arc::clone(&self.grid),
            repr,
            label,
        }
    }

    fn combine(&self, other: &ScalarOp, b: c64, label: String) -> Result<ScalarOp> {
        self.check(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Diagonal(x), Repr::Diagonal(y)) => {
                Repr::Diagonal(x.iter().zip(y).map(|(x, y)| x + b * y).collect())
            }
            (Repr::Dense(x), Repr::Diagonal(y)) => {
                let mut m = x.clone();
                for (i, y) in y.iter().enumerate() {
                    m[(i, i)] += b * y;
                }
                Repr::Dense(m)
            }
            (Repr::Diagonal(x), Repr::Dense(y)) => {
                let mut m = Mat::<c64>::from_fn(y.nrows(), y.ncols(), |i, j| b * y[(i, j)]);
                for (i, x) in x.iter().enumerate() {
                    m[(i, i)] += x;
                }
                Repr::Dense(m)
            }
            (Repr::Dense(x), Repr::Dense(y)) => {
                Repr::Dense(Mat::<c64>::from_fn(x.nrows(), x.ncols(), |i, j| {
                    x[(i, j)] + b * y[(i, j)]
                }))
            }
        };
        Ok(self.derived(repr, label))
    }

    pub fn add(&self, other: &ScalarOp) -> Result<ScalarOp> {
        self.combine(other, c64::new(1.0, 0.0), format!("({} + {})", self.label, other.label))
    }

    pub fn sub(&self, other: &ScalarOp) -> Result<ScalarOp> {
        self.combine(other, c64::new(-1.0, 0.0), format!("({} - {})", self.label, other.label))
    }

    pub fn scale(&self, c: c64) -> ScalarOp {
        let repr = match &self.repr {
            Repr::Diagonal(d) => Repr::Diagonal(d.iter().map(|v| v * c).collect()),
            Repr::Dense(m) => Repr::Dense(Mat::<c64>::from_fn(m.nrows(), m.ncols(), |i, j| {
                m[(i, j)] * c
            })),
        };
        self.derived(repr, format!("{c}*{}", self.label))
    }

    pub fn scale_real(&self, c: f64) -> ScalarOp {
        self.scale(c64::new(c, 0.0))
    }

    /// The product `self * other` (apply `other` first).
    pub fn compose(&self, other: &ScalarOp) -> Result<ScalarOp> {
        self.check(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Diagonal(x), Repr::Diagonal(y)) => {
                Repr::Diagonal(x.iter().zip(y).map(|(x, y)| x * y).collect())
            }
            (Repr::Diagonal(x), Repr::Dense(y)) => {
                Repr::Dense(Mat::<c64>::from_fn(y.nrows(), y.ncols(), |i, j| x[i] * y[(i, j)]))
            }
            (Repr::Dense(x), Repr::Diagonal(y)) => {
                Repr::Dense(Mat::<c64>::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * y[j]))
            }
            (Repr::Dense(x), Repr::Dense(y)) => Repr::Dense(x * y),
        };
        Ok(self.derived(repr, format!("{}*{}", self.label, other.label)))
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &ScalarOp) -> Result<ScalarOp> {
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        Ok(ab.sub(&ba)?.with_label(format!("[{}, {}]", self.label, other.label)))
    }

    /// Adjoint under the quadrature inner product, `W⁻¹ Aᴴ W`.
    pub fn weighted_adjoint(&self) -> ScalarOp {
        let w = self.grid.weights();
        let repr = match &self.repr {
            Repr::Diagonal(d) => Repr::Diagonal(d.iter().map(|v| v.conj()).collect()),
            Repr::Dense(m) => Repr::Dense(Mat::<c64>::from_fn(m.nrows(), m.ncols(), |i, j| {
                m[(j, i)].conj() * (w[j] / w[i])
            })),
        };
        self.derived(repr, format!("{}†", self.label))
    }

    /// Applies the operator to each column of `block`.
    pub fn apply_block(&self, block: MatRef<'_, c64>) -> Mat<c64> {
        assert_eq!(block.nrows(), self.n());
        match &self.repr {
            Repr::Diagonal(d) => {
                Mat::<c64>::from_fn(block.nrows(), block.ncols(), |i, j| d[i] * block[(i, j)])
            }
            Repr::Dense(m) => m * block,
        }
    }

    pub fn apply(&self, psi: &SurfaceState) -> Result<SurfaceState> {
        if !Arc::ptr_eq(&self.grid, psi.grid()) {
            return Err(Error::GridMismatch);
        }
        let v = psi.values();
        let out = match &self.repr {
            Repr::Diagonal(d) => d.iter().zip(v).map(|(d, v)| d * v).collect(),
            Repr::Dense(m) => (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
                .collect(),
        };
        SurfaceState::new(&self.grid, out)
    }

    /// Galerkin compression `Qᴴ W A Q` onto a weighted-orthonormal band.
    pub fn compress(&self, band: &Band) -> Mat<c64> {
        let aq = self.apply_block(band.basis.as_ref());
        let w = self.grid.weights();
        let waq = Mat::<c64>::from_fn(aq.nrows(), aq.ncols(), |i, j| aq[(i, j)] * w[i]);
        band.basis.adjoint() * &waq
    }

    /// Spectral norm of `K - Kᴴ` for the compression `K` onto `band`. For
    /// an operator that is exact on the band this equals the norm of the
    /// anti-Hermitian defect `A - A†` restricted to it.
    pub fn hermiticity_residual(&self, band: &Band) -> f64 {
        let k = self.compress(band);
        let defect = Mat::<c64>::from_fn(k.nrows(), k.ncols(), |i, j| {
            // i (K - Kᴴ) is Hermitian with the same spectral norm
            c64::new(0.0, 1.0) * (k[(i, j)] - k[(j, i)].conj())
        });
        hermitian_norm(defect.as_ref())
    }
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn hermitian_norm(m: MatRef<'_, c64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let eig = m
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("Hermitian eigenvalue iteration converges");
    eig.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Weighted norm of each column of a block of nodal vectors.
pub fn column_norms(grid: &Grid, block: MatRef<'_, c64>) -> Vec<f64> {
    (0..block.ncols())
        .map(|j| {
            let col: Vec<c64> = (0..block.nrows()).map(|i| block[(i, j)]).collect();
            weighted_norm(grid.weights(), &col)
        })
        .collect()
}

/// Cartesian components of a vector operator.
#[derive(Debug, Clone)]
pub struct VectorOp {
    comps: [ScalarOp; 3],
    label: String,
}

impl VectorOp {
    pub fn new(x: ScalarOp, y: ScalarOp, z: ScalarOp, label: impl Into<String>) -> Result<VectorOp> {
        x.check(&y)?;
        x.check(&z)?;
        Ok(VectorOp {
            comps: [x, y, z],
            label: label.into(),
        })
    }

    /// Multiplication by a Cartesian vector field given per node.
    pub fn field(grid: &Arc<Grid>, values: &[[f64; 3]], label: impl Into<String>) -> VectorOp {
        let label = label.into();
        let comp = |c: usize| {
            let v: Vec<f64> = values.iter().map(|v| v[c]).collect();
            ScalarOp::real_diagonal(grid, &v, format!("{label}_{}", AXES[c]))
        };
        VectorOp {
            comps: [comp(0), comp(1), comp(2)],
            label,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.comps[0].grid()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> VectorOp {
        self.label = label.into();
        self
    }

    pub fn components(&self) -> &[ScalarOp; 3] {
        &self.comps
    }

    pub fn component(&self, c: usize) -> &ScalarOp {
        &self.comps[c]
    }

    pub fn x(&self) -> &ScalarOp {
        &self.comps[0]
    }

    pub fn y(&self) -> &ScalarOp {
        &self.comps[1]
    }

    pub fn z(&self) -> &ScalarOp {
        &self.comps[2]
    }

    fn zip(
        &self,
        other: &VectorOp,
        label: String,
        f: impl Fn(&ScalarOp, &ScalarOp) -> Result<ScalarOp>,
    ) -> Result<VectorOp> {
        let [a, b, c] = [0, 1, 2].map(|i| f(&self.comps[i], &other.comps[i]));
        VectorOp::new(a?, b?, c?, label)
    }

    pub fn map(&self, label: impl Into<String>, f: impl Fn(&ScalarOp) -> Result<ScalarOp>) -> Result<VectorOp> {
        let [a, b, c] = [0, 1, 2].map(|i| f(&self.comps[i]));
        VectorOp::new(a?, b?, c?, label)
    }

    pub fn add(&self, other: &VectorOp) -> Result<VectorOp> {
        self.zip(other, format!("({} + {})", self.label, other.label), |a, b| a.add(b))
    }

    pub fn sub(&self, other: &VectorOp) -> Result<VectorOp> {
        self.zip(other, format!("({} - {})", self.label, other.label), |a, b| a.sub(b))
    }

    pub fn scale(&self, c: c64) -> VectorOp {
        let comps = self.comps.clone().map(|op| op.scale(c));
        VectorOp {
            comps,
            label: format!("{c}*{}", self.label),
        }
    }

    pub fn scale_real(&self, c: f64) -> VectorOp {
        self.scale(c64::new(c, 0.0))
    }

    /// `s * V_c` for each component.
    pub fn left_mul(&self, s: &ScalarOp) -> Result<VectorOp> {
        self.map(format!("{}*{}", s.label, self.label), |v| s.compose(v))
    }

    /// `V_c * s` for each component.
    pub fn right_mul(&self, s: &ScalarOp) -> Result<VectorOp> {
        self.map(format!("{}*{}", self.label, s.label), |v| v.compose(s))
    }

    /// `sum_c A_c B_c`, keeping the operator order.
    pub fn dot(&self, other: &VectorOp) -> Result<ScalarOp> {
        let mut acc = self.comps[0].compose(&other.comps[0])?;
        for c in 1..3 {
            acc = acc.add(&self.comps[c].compose(&other.comps[c])?)?;
        }
        Ok(acc.with_label(format!("{}·{}", self.label, other.label)))
    }

    /// `(A ∧ B)_i = eps_ijk A_j B_k`, keeping the operator order.
    pub fn cross(&self, other: &VectorOp) -> Result<VectorOp> {
        let comp = |j: usize, k: usize| -> Result<ScalarOp> {
            self.comps[j]
                .compose(&other.comps[k])?
                .sub(&self.comps[k].compose(&other.comps[j])?)
        };
        VectorOp::new(
            comp(1, 2)?,
            comp(2, 0)?,
            comp(0, 1)?,
            format!("{}∧{}", self.label, other.label),
        )
    }

    /// Componentwise commutator `[A_c, s]`.
    pub fn commutator(&self, s: &ScalarOp) -> Result<VectorOp> {
        self.map(format!("[{}, {}]", self.label, s.label), |v| v.commutator(s))
    }

    pub fn weighted_adjoint(&self) -> VectorOp {
        VectorOp {
            comps: self.comps.clone().map(|c| c.weighted_adjoint()),
            label: format!("{}†", self.label),
        }
    }

    pub fn apply(&self, psi: &SurfaceState) -> Result<[SurfaceState; 3]> {
        let [a, b, c] = [0, 1, 2].map(|i| self.comps[i].apply(psi));
        Ok([a?, b?, c?])
    }

    /// Hermiticity residual of each component on `band`.
    pub fn hermiticity_residuals(&self, band: &Band) -> [f64; 3] {
        [0, 1, 2].map(|c| self.comps[c].hermiticity_residual(band))
    }
}

pub const AXES: [&str; 3] = ["x", "y", "z"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Chart, PhysParams};
    use crate::grid::{build_grid, BandKind};

    fn grid() -> Arc<Grid> {
        build_grid(&Chart::sphere(1.0, PhysParams::default()).unwrap(), 8, 16).unwrap()
    }

    fn max_diff(a: &ScalarOp, b: &ScalarOp) -> f64 {
        let (a, b) = (a.to_dense(), b.to_dense());
        let mut m = 0.0f64;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                m = m.max((a[(i, j)] - b[(i, j)]).norm());
            }
        }
        m
    }

    fn random_dense(g: &Arc<Grid>, seed: u64) -> ScalarOp {
        let states = g.test_states(g.len(), seed);
        let m = Mat::<c64>::from_fn(g.len(), g.len(), |i, j| states[j].values()[i]);
        ScalarOp::dense(g, m, "A")
    }

    #[test]
    fn diagonal_and_dense_paths_agree() {
        let g = grid();
        let d = ScalarOp::real_diagonal(&g, &(0..g.len()).map(|i| i as f64 * 0.1).collect::<Vec<_>>(), "d");
        let a = random_dense(&g, 3);
        let dd = ScalarOp::dense(&g, d.to_dense(), "d");
        assert!(max_diff(&d.compose(&a).unwrap(), &dd.compose(&a).unwrap()) < 1e-13);
        assert!(max_diff(&a.compose(&d).unwrap(), &a.compose(&dd).unwrap()) < 1e-13);
        assert!(max_diff(&d.add(&a).unwrap(), &dd.add(&a).unwrap()) < 1e-15);
        assert!(max_diff(&a.sub(&d).unwrap(), &a.sub(&dd).unwrap()) < 1e-15);
    }

    #[test]
    fn weighted_adjoint_satisfies_inner_product_identity() {
        let g = grid();
        let a = random_dense(&g, 5);
        let adj = a.weighted_adjoint();
        let s = g.test_states(2, 9);
        let lhs = s[0].inner(&a.apply(&s[1]).unwrap()).unwrap();
        let rhs = adj.apply(&s[0]).unwrap().inner(&s[1]).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
        let h = a.add(&adj).unwrap();
        assert!(h.hermiticity_residual(&g.band(BandKind::Test)) < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let (g, h) = (grid(), grid());
        let a = ScalarOp::identity(&g);
        let b = ScalarOp::identity(&h);
        assert!(matches!(a.compose(&b), Err(Error::GridMismatch)));
        assert!(matches!(VectorOp::new(a.clone(), a.clone(), b, "v"), Err(Error::GridMismatch)));
    }

    #[test]
    fn cross_product_is_antisymmetric_for_commuting_fields() {
        let g = grid();
        let r: Vec<[f64; 3]> = g.frames().unwrap().iter().map(|f| f.normal).collect();
        let e: Vec<[f64; 3]> = g.frames().unwrap().iter().map(|f| f.e1).collect();
        let a = VectorOp::field(&g, &r, "r");
        let b = VectorOp::field(&g, &e, "t");
        let ab = a.cross(&b).unwrap();
        let ba = b.cross(&a).unwrap();
        for c in 0..3 {
            assert!(max_diff(&ab.component(c).add(ba.component(c)).unwrap(), &ScalarOp::zero(&g)) < 1e-15);
        }
        let rr = a.dot(&a).unwrap();
        assert!(max_diff(&rr, &ScalarOp::identity(&g)) < 1e-15);
    }
}
