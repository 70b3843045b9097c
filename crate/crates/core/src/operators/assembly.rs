//! Assembly of the surface operators: momentum, Hamiltonian, velocity,
//! angular momentum, force and torque.

use std::sync::Arc;

use faer::c64;

use super::{ScalarOp, VectorOp};
use crate::error::{Error, Result};
use crate::geometry::{ChartKind, Frame};
use crate::grid::{deriv_op, Coord, Grid};

const I: c64 = c64 { re: 0.0, im: 1.0 };

fn frames(g: &Arc<Grid>) -> Result<Vec<Frame>> {
    g.frames()
}

/// Radius of a built-in chart; custom charts have no force closed form.
fn builtin_radius(g: &Grid) -> Result<f64> {
    g.chart().kind().radius().ok_or_else(|| {
        Error::UnsupportedChart(format!(
            "{}: only the sphere, cylinder and ring are supported",
            g.chart().describe()
        ))
    })
}

fn scale_factors(g: &Arc<Grid>) -> Result<(Vec<f64>, Vec<f64>)> {
    let chart = g.chart();
    let h1 = g.sample_expr(&chart.q1().scale)?;
    let h2 = g.sample_expr(&chart.h2())?;
    Ok((h1, h2))
}

fn mean_curvature_values(g: &Arc<Grid>) -> Result<Vec<f64>> {
    g.sample_expr(&g.chart().mean_curvature()?)
}

fn has_q2(g: &Grid) -> bool {
    g.chart().q2().is_some()
}

/// Multiplication by the unit normal `q̂3`.
pub fn normal_field(g: &Arc<Grid>) -> Result<VectorOp> {
    let n: Vec<[f64; 3]> = frames(g)?.iter().map(|f| f.normal).collect();
    Ok(VectorOp::field(g, &n, "n"))
}

/// `(q̂1/h1) ∂1` as a vector operator (the first tangential direction).
fn gradient_q1(g: &Arc<Grid>, frames: &[Frame], h1: &[f64]) -> Result<VectorOp> {
    let d1 = deriv_op(g, Coord::Q1);
    let comp = |c: usize| -> Result<ScalarOp> {
        let coef: Vec<f64> = frames.iter().zip(h1).map(|(f, h)| f.e1[c] / h).collect();
        ScalarOp::real_diagonal(g, &coef, "e1/h1").compose(&d1)
    };
    VectorOp::new(comp(0)?, comp(1)?, comp(2)?, "grad1")
}

/// Tangential gradient `∇' = (q̂1/h1)∂1 + (q̂2/h2)∂2` in Cartesian components.
pub fn surface_gradient(g: &Arc<Grid>) -> Result<VectorOp> {
    let fr = frames(g)?;
    let (h1, h2) = scale_factors(g)?;
    let mut grad = gradient_q1(g, &fr, &h1)?;
    if has_q2(g) {
        let d2 = deriv_op(g, Coord::Q2);
        let comp = |c: usize| -> Result<ScalarOp> {
            let coef: Vec<f64> = fr.iter().zip(&h2).map(|(f, h)| f.e2[c] / h).collect();
            ScalarOp::real_diagonal(g, &coef, "e2/h2").compose(&d2)
        };
        grad = grad.add(&VectorOp::new(comp(0)?, comp(1)?, comp(2)?, "grad2")?)?;
    }
    Ok(grad.with_label("∇'"))
}

/// `-iħ∇'`, which lacks the curvature term and is not Hermitian.
pub fn bare_momentum(g: &Arc<Grid>) -> Result<VectorOp> {
    let hbar = g.chart().params().hbar;
    Ok(surface_gradient(g)?.scale(-I * hbar).with_label("-iħ∇'"))
}

/// Hermitian surface momentum `p = -iħ(∇' + q̂3 M)`.
pub fn surface_momentum(g: &Arc<Grid>) -> Result<VectorOp> {
    let hbar = g.chart().params().hbar;
    let m = mean_curvature_values(g)?;
    let nm: Vec<[f64; 3]> = frames(g)?
        .iter()
        .zip(&m)
        .map(|(f, m)| f.normal.map(|c| c * m))
        .collect();
    let geometric = VectorOp::field(g, &nm, "nM");
    Ok(surface_gradient(g)?
        .add(&geometric)?
        .scale(-I * hbar)
        .with_label("p"))
}

/// The two terms of the surface Laplacian,
/// `(1/h1h2) ∂1 (h2/h1) ∂1` and `(1/h1h2) ∂2 (h1/h2) ∂2`.
fn laplacian_terms(g: &Arc<Grid>) -> Result<(ScalarOp, Option<ScalarOp>)> {
    let (h1, h2) = scale_factors(g)?;
    let inv_area: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| 1.0 / (a * b)).collect();
    let inv_area = ScalarOp::real_diagonal(g, &inv_area, "1/h1h2");
    let d1 = deriv_op(g, Coord::Q1);
    let r1: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| b / a).collect();
    let t1 = inv_area.compose(&d1.compose(&ScalarOp::real_diagonal(g, &r1, "h2/h1").compose(&d1)?)?)?;
    let t2 = if has_q2(g) {
        let d2 = deriv_op(g, Coord::Q2);
        let r2: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| a / b).collect();
        Some(inv_area.compose(&d2.compose(&ScalarOp::real_diagonal(g, &r2, "h1/h2").compose(&d2)?)?)?)
    } else {
        None
    };
    Ok((t1, t2))
}

/// Surface Laplacian `∇'²`.
pub fn laplacian(g: &Arc<Grid>) -> Result<ScalarOp> {
    let (t1, t2) = laplacian_terms(g)?;
    let lap = match t2 {
        Some(t2) => t1.add(&t2)?,
        None => t1,
    };
    Ok(lap.with_label("∇'²"))
}

fn velocity_from_laplacian(g: &Arc<Grid>, lap: &ScalarOp) -> Result<ScalarOp> {
    let p = g.chart().params();
    let k = p.hbar * p.hbar / (p.mass * p.mass);
    let m2: Vec<f64> = mean_curvature_values(g)?.iter().map(|m| k * m * m).collect();
    lap.scale_real(-k).add(&ScalarOp::real_diagonal(g, &m2, "ħ²M²/m²"))
}

/// `H = -(ħ²/2m)∇'² - (ħ²/2m)(M² - K)`.
pub fn hamiltonian(g: &Arc<Grid>) -> Result<ScalarOp> {
    hamiltonian_from_laplacian(g, &laplacian(g)?)
}

fn hamiltonian_from_laplacian(g: &Arc<Grid>, lap: &ScalarOp) -> Result<ScalarOp> {
    let chart = g.chart();
    let vgeo = g.sample_expr(&chart.geometric_potential()?)?;
    let kin = chart.params().kinetic();
    Ok(lap
        .scale_real(-kin)
        .add(&ScalarOp::real_diagonal(g, &vgeo, "Vgeo"))?
        .with_label("H"))
}

/// `v² = -(ħ²/m²)∇'² + (ħ²/m²)M²`.
pub fn velocity_squared(g: &Arc<Grid>) -> Result<ScalarOp> {
    Ok(velocity_from_laplacian(g, &laplacian(g)?)?.with_label("v²"))
}

/// Position on the embedded surface.
pub fn position_op(g: &Arc<Grid>) -> Result<VectorOp> {
    let r: Vec<[f64; 3]> = frames(g)?.iter().map(|f| f.position).collect();
    Ok(VectorOp::field(g, &r, "R"))
}

/// Orbital angular momentum `L = R ∧ p`.
pub fn angular_momentum(g: &Arc<Grid>) -> Result<VectorOp> {
    builtin_radius(g)?;
    Ok(position_op(g)?.cross(&surface_momentum(g)?)?.with_label("L"))
}

/// Closed-form force and its two pieces.
#[derive(Debug, Clone)]
pub struct ForceParts {
    /// `F1 + F2`.
    pub total: VectorOp,
    /// `-(m/R) q̂3 v²`, the normal multiplying from the left. On the
    /// cylinder and the ring `v²` is the ring velocity squared.
    pub f1: VectorOp,
    /// `(ħ²/mR²)` times the gradient along the curved direction.
    pub f2: VectorOp,
}

/// `F = -q̂3 (m v²/R) + (ħ²/mR²)∇'` with the flat axial direction dropped
/// from both terms on the cylinder.
pub fn force_closed_form(g: &Arc<Grid>) -> Result<ForceParts> {
    builtin_radius(g)?;
    let v2 = match g.chart().kind() {
        ChartKind::Sphere { .. } => velocity_squared(g)?,
        _ => velocity_from_laplacian(g, &laplacian_terms(g)?.0)?,
    };
    force_from_velocity(g, &v2)
}

/// Assembles the force from the velocity squared entering `F1`.
fn force_from_velocity(g: &Arc<Grid>, v2: &ScalarOp) -> Result<ForceParts> {
    let radius = builtin_radius(g)?;
    let p = g.chart().params();
    let fr = frames(g)?;
    let (h1, _) = scale_factors(g)?;
    let grad = match g.chart().kind() {
        ChartKind::Sphere { .. } => surface_gradient(g)?,
        // only the azimuthal motion is accelerated
        _ => gradient_q1(g, &fr, &h1)?,
    };
    let normal: Vec<[f64; 3]> = fr.iter().map(|f| f.normal).collect();
    let f1 = VectorOp::field(g, &normal, "n")
        .right_mul(v2)?
        .scale_real(-p.mass / radius)
        .with_label("F1");
    let f2 = grad
        .scale_real(p.hbar * p.hbar / (p.mass * radius * radius))
        .with_label("F2");
    let total = f1.add(&f2)?.with_label("F");
    Ok(ForceParts { total, f1, f2 })
}

/// Every operator of a built-in chart, sharing one Laplacian assembly.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub laplacian: ScalarOp,
    pub hamiltonian: ScalarOp,
    pub velocity_squared: ScalarOp,
    pub gradient: VectorOp,
    pub bare_momentum: VectorOp,
    pub momentum: VectorOp,
    pub position: VectorOp,
    pub normal: VectorOp,
    pub angular_momentum: VectorOp,
    pub force: ForceParts,
}

impl OperatorSet {
    pub fn build(g: &Arc<Grid>) -> Result<OperatorSet> {
        builtin_radius(g)?;
        let (t1, t2) = laplacian_terms(g)?;
        let (lap, ring_v2) = match t2 {
            Some(t2) => {
                let ring_v2 = match g.chart().kind() {
                    ChartKind::Sphere { .. } => None,
                    _ => Some(velocity_from_laplacian(g, &t1)?),
                };
                (t1.add(&t2)?, ring_v2)
            }
            None => (t1, None),
        };
        let lap = lap.with_label("∇'²");
        let hamiltonian = hamiltonian_from_laplacian(g, &lap)?;
        let velocity_squared = velocity_from_laplacian(g, &lap)?.with_label("v²");
        let force = force_from_velocity(g, ring_v2.as_ref().unwrap_or(&velocity_squared))?;
        let momentum = surface_momentum(g)?;
        let position = position_op(g)?;
        let angular_momentum = position.cross(&momentum)?.with_label("L");
        Ok(OperatorSet {
            gradient: surface_gradient(g)?,
            bare_momentum: bare_momentum(g)?,
            normal: normal_field(g)?,
            laplacian: lap,
            hamiltonian,
            velocity_squared,
            momentum,
            position,
            angular_momentum,
            force,
        })
    }
}

/// `F = (1/iħ)[p, H]` componentwise, from matrix products.
pub fn force_heisenberg(g: &Arc<Grid>) -> Result<VectorOp> {
    builtin_radius(g)?;
    let hbar = g.chart().params().hbar;
    let h = hamiltonian(g)?;
    Ok(surface_momentum(g)?
        .commutator(&h)?
        .scale(-I / hbar)
        .with_label("F_heis"))
}

/// Symmetrized torque `½(R∧F - F∧R)`.
pub fn torque(r: &VectorOp, f: &VectorOp) -> Result<VectorOp> {
    let rf = r.cross(f)?;
    let fr = f.cross(r)?;
    Ok(rf
        .sub(&fr)?
        .scale_real(0.5)
        .with_label(format!("τ[{}]", f.label())))
}

/// A tangent vector field given by Cartesian components per node.
#[derive(Debug, Clone)]
pub struct TangentField {
    grid: Arc<Grid>,
    values: Vec<[f64; 3]>,
    label: String,
}

const TANGENT_TOL: f64 = 1e-12;

impl TangentField {
    /// `t = a1 q̂1 + a2 q̂2` from coefficient functions of `(q1, q2)`.
    pub fn from_coefficients(
        g: &Arc<Grid>,
        label: impl Into<String>,
        f: impl Fn(f64, f64) -> (f64, f64),
    ) -> Result<TangentField> {
        let fr = frames(g)?;
        let values = g
            .nodes()
            .zip(&fr)
            .map(|((u, v), fr)| {
                let (a1, a2) = f(u, v);
                [0, 1, 2].map(|c| a1 * fr.e1[c] + a2 * fr.e2[c])
            })
            .collect();
        TangentField::from_cartesian(g, values, label)
    }

    /// Validates that every vector is orthogonal to the surface normal.
    pub fn from_cartesian(
        g: &Arc<Grid>,
        values: Vec<[f64; 3]>,
        label: impl Into<String>,
    ) -> Result<TangentField> {
        if values.len() != g.len() {
            return Err(Error::InvalidArgument(format!(
                "tangent field has {} vectors for {} nodes",
                values.len(),
                g.len()
            )));
        }
        for (node, (t, f)) in values.iter().zip(frames(g)?).enumerate() {
            let normal: f64 = (0..3).map(|c| t[c] * f.normal[c]).sum();
            let size = t.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !normal.is_finite() || normal.abs() > TANGENT_TOL * size.max(1.0) {
                return Err(Error::NotTangential {
                    node,
                    component: normal,
                });
            }
        }
        Ok(TangentField {
            grid: Arc::clone(g),
            values,
            label: label.into(),
        })
    }

    /// The displacement `dr/ε`: `θ̂ + sinθ φ̂` on the sphere, `θ̂ + ẑ` on the
    /// cylinder, `θ̂` on the ring.
    pub fn displacement(g: &Arc<Grid>) -> Result<TangentField> {
        match g.chart().kind() {
            ChartKind::Sphere { .. } => {
                TangentField::from_coefficients(g, "dr", |t, _| (1.0, t.sin()))
            }
            ChartKind::Cylinder { .. } => TangentField::from_coefficients(g, "dr", |_, _| (1.0, 1.0)),
            ChartKind::Ring { .. } => TangentField::from_coefficients(g, "dr", |_, _| (1.0, 0.0)),
            ChartKind::Custom => Err(Error::UnsupportedChart("custom chart".into())),
        }
    }

    pub fn values(&self) -> &[[f64; 3]] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn as_vector_op(&self) -> VectorOp {
        VectorOp::field(&self.grid, &self.values, self.label.clone())
    }
}

/// `½ Σ_c (t_c F_c + F_c t_c)`.
pub fn symmetrized_tangential_contraction(t: &TangentField, f: &VectorOp) -> Result<ScalarOp> {
    let tv = t.as_vector_op();
    let left = tv.dot(f)?;
    let right = f.dot(&tv)?;
    Ok(left
        .add(&right)?
        .scale_real(0.5)
        .with_label(format!("½({0}·{1} + {1}·{0})", t.label, f.label())))
}
