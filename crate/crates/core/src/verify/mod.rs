//! The identity suite: runs every operator identity for a built-in chart on
//! a grid and collects residuals into a [`Report`].
//!
//! Identities are checked as state residuals on a family of pseudo-random
//! band-limited states, never as raw matrix equalities: truncation makes
//! exact matrix identities impossible near the band edge. Hermiticity is
//! measured on the Galerkin compression onto the test band.

mod convergence;
mod report;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::geometry::ChartKind;
use crate::grid::{BandKind, Grid, Mode};
use crate::operators::{
    column_norms, force_heisenberg, symmetrized_tangential_contraction, torque, OperatorSet,
    ScalarOp, TangentField, VectorOp,
};

pub use convergence::{convergence_study, smooth_states, ConvergenceRow, ConvergenceTable};
pub use report::{Bound, CheckResult, Report, Summary};

/// Number of pseudo-random test states per check.
pub const TEST_STATES: usize = 16;

const I: c64 = c64 { re: 0.0, im: 1.0 };

const SPHERE: u8 = 1;
const CYLINDER: u8 = 2;
const RING: u8 = 4;
const ALL: u8 = SPHERE | CYLINDER | RING;

/// A registered check: its id, description, bound type, default tolerance
/// and the charts it applies to.
#[derive(Debug, Clone, Copy)]
pub struct CheckSpec {
    pub id: &'static str,
    pub description: &'static str,
    pub bound: Bound,
    pub tolerance: f64,
    charts: u8,
}

const fn ceiling(id: &'static str, description: &'static str, tolerance: f64, charts: u8) -> CheckSpec {
    CheckSpec {
        id,
        description,
        bound: Bound::Ceiling,
        tolerance,
        charts,
    }
}

const fn floor(id: &'static str, description: &'static str, tolerance: f64, charts: u8) -> CheckSpec {
    CheckSpec {
        id,
        description,
        bound: Bound::Floor,
        tolerance,
        charts,
    }
}

/// Enforced checks in execution order.
pub const CHECKS: &[CheckSpec] = &[
    ceiling("quadrature.area", "relative error of the quadrature surface area", 1e-12, ALL),
    ceiling("hermiticity.p", "anti-Hermitian part of the surface momentum components", 1e-10, ALL),
    ceiling("hermiticity.H", "anti-Hermitian part of the Hamiltonian", 1e-10, ALL),
    ceiling("hermiticity.v2", "anti-Hermitian part of the velocity squared", 1e-10, ALL),
    ceiling("hermiticity.L", "anti-Hermitian part of the angular momentum components", 1e-10, ALL),
    ceiling("hermiticity.F", "anti-Hermitian part of the total force components", 1e-10, ALL),
    floor(
        "counterexample.bare_momentum",
        "anti-Hermitian defect of -iħ∇' relative to 2ħ|M| (must stay large)",
        0.5,
        ALL,
    ),
    ceiling("spectrum.eigenvalues", "relative error of the band spectrum of H against the analytic levels", 1e-10, ALL),
    ceiling("identity.h_v2", "H = ½mv² - ħ²/2mR² (sphere) or ½mv² - ħ²/4mR² (cylinder, ring)", 1e-9, ALL),
    ceiling("identity.h_v2_general", "H = ½mv² - (ħ²/2m)(2M² - K)", 1e-9, ALL),
    ceiling("identity.h_l2", "H = L·L/2mR²", 1e-9, SPHERE),
    ceiling("identity.v2_pp", "m²v² = p·p", 1e-9, ALL),
    ceiling("identity.rp_antisymmetry", "R∧p = -p∧R", 1e-10, SPHERE | RING),
    ceiling("identity.velocity", "(1/iħ)[R, H] = p/m (in-plane components on the cylinder)", 1e-9, ALL),
    ceiling("conservation.lz_h", "[Lz, H] = 0", 1e-10, ALL),
    ceiling("force.equivalence", "(1/iħ)[p, H] from matrix products against the closed-form force", 1e-8, ALL),
    ceiling(
        "torque.pieces",
        "τ⁽¹⁾ = -2iħL/mR² and τ⁽²⁾ = +2iħL/mR² (sphere); ∓iħLz/mR² (cylinder, ring)",
        1e-8,
        ALL,
    ),
    ceiling("torque.net", "net torque ½(R∧F - F∧R) vanishes (z component on the cylinder and ring)", 1e-9, ALL),
    floor(
        "torque.ablation",
        "net torque without F⁽²⁾ relative to (2ħ/mR²)L (must stay large)",
        0.1,
        ALL,
    ),
    ceiling("radiality.total", "symmetrized contraction of the total force with the displacement dr", 1e-8, ALL),
];

/// Reported but not enforced: forms whose agreement is informative rather
/// than a requirement.
pub const DIAGNOSTICS: &[CheckSpec] = &[
    ceiling("torque.pieces_observed", "τ⁽¹⁾ = -iħL/mR² and τ⁽²⁾ = +iħL/mR²", 1e-8, SPHERE),
    ceiling(
        "torque.piece_hermiticity",
        "anti-Hermitian part of τ⁽¹⁾ components (no target)",
        f64::INFINITY,
        ALL,
    ),
    ceiling(
        "radiality.f1_form",
        "½(dr·F⁽¹⁾ + F⁽¹⁾·dr) = (ħ²/mR)(-(2/R)∇'·dr + cotθ/R²)",
        1e-6,
        SPHERE,
    ),
    ceiling(
        "radiality.f2_form",
        "½(dr·F⁽²⁾ + F⁽²⁾·dr) = (ħ²/mR)((dr/R)·∇' + (1/R)∇'·dr)",
        1e-6,
        SPHERE,
    ),
    ceiling(
        "radiality.f1_derived",
        "½(dr·F⁽¹⁾ + F⁽¹⁾·dr) = (ħ²/mR)(-(1/R)dr·∇' - cotθ/R²)",
        1e-6,
        SPHERE,
    ),
    ceiling(
        "radiality.rotation",
        "symmetrized contraction of the total force with sinθ φ̂",
        1e-8,
        SPHERE,
    ),
];

const NOTE_CURVATURE: &str = "sphere: K = 1/R² = M², so the geometric potential -(ħ²/2m)(M² - K) \
vanishes; a Gaussian curvature of 1/(2R²) would contradict this and is not used";
const NOTE_H_V2: &str = "H = ½mv² - (ħ²/m²)(M² - K²) is dimensionally inconsistent with the \
Hamiltonian and velocity operators; the relation checked is H = ½mv² - (ħ²/2m)(2M² - K)";
const NOTE_TORQUE: &str = "sphere: the torque pieces evaluate to ∓iħL/mR², half of ∓2iħL/mR²; \
their sum vanishes as claimed (see torque.pieces_observed)";
const NOTE_RADIALITY: &str = "sphere: with dr = θ̂ + sinθ φ̂ the symmetrized contraction of the \
total force tends to -(ħ²/2mR³)cotθ, not zero; the θ̂ part of dr is not a symmetry direction. \
The contraction with the rotation field sinθ φ̂ alone vanishes (see radiality.rotation)";
const NOTE_CYLINDER: &str = "cylinder: the axial coordinate z is periodic on the grid, so \
multiplication by z is discontinuous; velocity and torque checks use the in-plane (velocity) and \
axial (torque) components that do not involve it";

/// Check ids applicable to a chart kind, in execution order.
pub fn check_ids(kind: ChartKind) -> Vec<&'static str> {
    let bit = chart_bit(kind);
    CHECKS
        .iter()
        .filter(|c| c.charts & bit != 0)
        .map(|c| c.id)
        .collect()
}

/// Looks up a registered check or diagnostic.
pub fn check_spec(id: &str) -> Option<&'static CheckSpec> {
    CHECKS.iter().chain(DIAGNOSTICS).find(|c| c.id == id)
}

fn chart_bit(kind: ChartKind) -> u8 {
    match kind {
        ChartKind::Sphere { .. } => SPHERE,
        ChartKind::Cylinder { .. } => CYLINDER,
        ChartKind::Ring { .. } => RING,
        ChartKind::Custom => 0,
    }
}

/// Tolerance overrides by check id; unset ids use the registered defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tolerances {
    overrides: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn new() -> Tolerances {
        Tolerances::default()
    }

    /// Overrides the tolerance of a registered check.
    pub fn set(&mut self, id: &str, value: f64) -> Result<()> {
        if check_spec(id).is_none() {
            return Err(Error::InvalidArgument(format!("unknown check id '{id}'")));
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tolerance for {id} must be positive and finite, got {value}"
            )));
        }
        self.overrides.insert(id.to_string(), value);
        Ok(())
    }

    pub fn get(&self, spec: &CheckSpec) -> f64 {
        self.overrides.get(spec.id).copied().unwrap_or(spec.tolerance)
    }

    pub fn overrides(&self) -> &BTreeMap<String, f64> {
        &self.overrides
    }
}

/// Runs the full suite with default tolerances.
pub fn run_suite(g: &Arc<Grid>, seed: u64) -> Result<Report> {
    run_suite_with(g, seed, &Tolerances::default())
}

/// Runs every registered check for the grid's chart in order.
pub fn run_suite_with(g: &Arc<Grid>, seed: u64, tol: &Tolerances) -> Result<Report> {
    let kind = g.chart().kind();
    if matches!(kind, ChartKind::Custom) {
        return Err(Error::UnsupportedChart(
            "the identity suite needs a sphere, cylinder or ring chart".into(),
        ));
    }
    let suite = Suite::new(g, seed)?;
    let bit = chart_bit(kind);
    let mut checks = Vec::new();
    for spec in CHECKS.iter().filter(|c| c.charts & bit != 0) {
        checks.push(suite.run(spec, tol)?);
    }
    let mut diagnostics = Vec::new();
    for spec in DIAGNOSTICS.iter().filter(|c| c.charts & bit != 0) {
        diagnostics.push(suite.run(spec, tol)?);
    }
    let mut notes = vec![NOTE_CURVATURE.to_string(), NOTE_H_V2.to_string()];
    match kind {
        ChartKind::Sphere { .. } => {
            notes.push(NOTE_TORQUE.to_string());
            notes.push(NOTE_RADIALITY.to_string());
        }
        ChartKind::Cylinder { .. } => notes.push(NOTE_CYLINDER.to_string()),
        _ => {}
    }
    Ok(Report::new(g.chart().describe(), g.resolution(), seed, checks, diagnostics, notes))
}

/// Shared state of one suite run: assembled operators and the test block.
pub(crate) struct Suite {
    g: Arc<Grid>,
    ops: OperatorSet,
    psi: Mat<c64>,
    hbar: f64,
    mass: f64,
    radius: f64,
    /// Assemble the Heisenberg force from matrix products rather than by
    /// applying the commutator to the states.
    products: bool,
}

type Block = Mat<c64>;

fn lin(terms: &[(c64, &Block)]) -> Block {
    let (r, c) = (terms[0].1.nrows(), terms[0].1.ncols());
    Mat::<c64>::from_fn(r, c, |i, j| terms.iter().map(|(a, b)| *a * b[(i, j)]).sum())
}

fn re(x: f64) -> c64 {
    c64::new(x, 0.0)
}

fn state_block(states: &[crate::grid::SurfaceState]) -> Block {
    let n = states.first().map_or(0, |s| s.values().len());
    Mat::<c64>::from_fn(n, states.len(), |i, j| states[j].values()[i])
}

impl Suite {
    pub(crate) fn new(g: &Arc<Grid>, seed: u64) -> Result<Suite> {
        let states = g.test_states(TEST_STATES, seed);
        Suite::with_states(g, state_block(&states))
    }

    pub(crate) fn with_states(g: &Arc<Grid>, psi: Block) -> Result<Suite> {
        let params = g.chart().params();
        let radius = g
            .chart()
            .kind()
            .radius()
            .ok_or_else(|| Error::UnsupportedChart("custom chart".into()))?;
        Ok(Suite {
            g: Arc::clone(g),
            ops: OperatorSet::build(g)?,
            psi,
            hbar: params.hbar,
            mass: params.mass,
            radius,
            products: true,
        })
    }

    pub(crate) fn by_application(mut self) -> Suite {
        self.products = false;
        self
    }

    fn is_sphere(&self) -> bool {
        matches!(self.g.chart().kind(), ChartKind::Sphere { .. })
    }

    fn ap(&self, op: &ScalarOp, b: &Block) -> Block {
        op.apply_block(b.as_ref())
    }

    fn apv(&self, op: &VectorOp, b: &Block) -> [Block; 3] {
        [0, 1, 2].map(|c| self.ap(op.component(c), b))
    }

    /// Largest weighted norm over the columns of a scalar residual block.
    fn worst(&self, b: &Block) -> f64 {
        column_norms(&self.g, b.as_ref()).into_iter().fold(0.0, f64::max)
    }

    /// Per-column norms of a vector residual over the selected components.
    fn vec_norms(&self, b: &[Block; 3], comps: &[usize]) -> Vec<f64> {
        let mut acc = vec![0.0; b[0].ncols()];
        for &c in comps {
            for (a, n) in acc.iter_mut().zip(column_norms(&self.g, b[c].as_ref())) {
                *a += n * n;
            }
        }
        acc.into_iter().map(f64::sqrt).collect()
    }

    fn worst_vec(&self, b: &[Block; 3], comps: &[usize]) -> f64 {
        self.vec_norms(b, comps).into_iter().fold(0.0, f64::max)
    }

    /// Components in which torque identities hold: all three on the sphere,
    /// only the axial one on the cylinder and ring.
    fn torque_components(&self) -> &'static [usize] {
        if self.is_sphere() {
            &[0, 1, 2]
        } else {
            &[2]
        }
    }

    fn displacement(&self) -> Result<TangentField> {
        TangentField::displacement(&self.g)
    }

    fn run(&self, spec: &CheckSpec, tol: &Tolerances) -> Result<CheckResult> {
        let start = Instant::now();
        let residual = self.residual(spec.id)?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        Ok(CheckResult::new(
            spec,
            residual,
            tol.get(spec),
            self.g.resolution(),
            wall_ms,
        ))
    }

    pub(crate) fn residual(&self, id: &str) -> Result<f64> {
        let test = || self.g.band(BandKind::Test);
        let herm = |v: &VectorOp| -> f64 {
            let band = test();
            v.hermiticity_residuals(&band).into_iter().fold(0.0, f64::max)
        };
        let (h, m, r) = (self.hbar, self.mass, self.radius);
        let psi = &self.psi;
        let ops = &self.ops;
        Ok(match id {
            "quadrature.area" => {
                let exact = self
                    .g
                    .chart()
                    .area()
                    .ok_or_else(|| Error::UnsupportedChart("no analytic area".into()))?;
                let sum: f64 = self.g.weights().iter().sum();
                (sum - exact).abs() / exact
            }
            "hermiticity.p" => herm(&ops.momentum),
            "hermiticity.H" => ops.hamiltonian.hermiticity_residual(&test()),
            "hermiticity.v2" => ops.velocity_squared.hermiticity_residual(&test()),
            "hermiticity.L" => herm(&ops.angular_momentum),
            "hermiticity.F" => herm(&ops.force.total),
            "counterexample.bare_momentum" => {
                let mean = self.g.sample_expr(&self.g.chart().mean_curvature()?)?;
                let m_abs = mean.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                herm(&ops.bare_momentum) / (2.0 * h * m_abs)
            }
            "spectrum.eigenvalues" => self.spectrum_error()?,
            "identity.h_v2" => {
                let shift = if self.is_sphere() { 0.5 } else { 0.25 } * h * h / (m * r * r);
                let hp = self.ap(&ops.hamiltonian, psi);
                let vp = self.ap(&ops.velocity_squared, psi);
                self.worst(&lin(&[(re(1.0), &hp), (re(-0.5 * m), &vp), (re(shift), psi)]))
            }
            "identity.h_v2_general" => {
                let curv = self.g.chart().curvature()?;
                let mm = self.g.sample_expr(&curv.mean)?;
                let kk = self.g.sample_expr(&curv.gaussian)?;
                let shift: Vec<f64> = mm
                    .iter()
                    .zip(&kk)
                    .map(|(m2, k)| h * h / (2.0 * m) * (2.0 * m2 * m2 - k))
                    .collect();
                let shift = ScalarOp::real_diagonal(&self.g, &shift, "(ħ²/2m)(2M²-K)");
                let hp = self.ap(&ops.hamiltonian, psi);
                let vp = self.ap(&ops.velocity_squared, psi);
                let sp = self.ap(&shift, psi);
                self.worst(&lin(&[(re(1.0), &hp), (re(-0.5 * m), &vp), (re(1.0), &sp)]))
            }
            "identity.h_l2" => {
                let hp = self.ap(&ops.hamiltonian, psi);
                let l = self.apv(&ops.angular_momentum, psi);
                let ll: Vec<Block> = (0..3)
                    .map(|c| self.ap(ops.angular_momentum.component(c), &l[c]))
                    .collect();
                let k = -1.0 / (2.0 * m * r * r);
                self.worst(&lin(&[
                    (re(1.0), &hp),
                    (re(k), &ll[0]),
                    (re(k), &ll[1]),
                    (re(k), &ll[2]),
                ]))
            }
            "identity.v2_pp" => {
                let vp = self.ap(&ops.velocity_squared, psi);
                let p = self.apv(&ops.momentum, psi);
                let pp: Vec<Block> = (0..3)
                    .map(|c| self.ap(ops.momentum.component(c), &p[c]))
                    .collect();
                self.worst(&lin(&[
                    (re(m * m), &vp),
                    (re(-1.0), &pp[0]),
                    (re(-1.0), &pp[1]),
                    (re(-1.0), &pp[2]),
                ]))
            }
            "identity.rp_antisymmetry" => {
                let rp = ops.position.cross(&ops.momentum)?;
                let pr = ops.momentum.cross(&ops.position)?;
                let a = self.apv(&rp, psi);
                let b = self.apv(&pr, psi);
                let sum = [0, 1, 2].map(|c| lin(&[(re(1.0), &a[c]), (re(1.0), &b[c])]));
                self.worst_vec(&sum, &[0, 1, 2])
            }
            "identity.velocity" => {
                let comps: &[usize] = if matches!(self.g.chart().kind(), ChartKind::Cylinder { .. }) {
                    &[0, 1]
                } else {
                    &[0, 1, 2]
                };
                let hp = self.ap(&ops.hamiltonian, psi);
                let res = [0, 1, 2].map(|c| {
                    let rc = ops.position.component(c);
                    let rhp = self.ap(rc, &hp);
                    let hrp = self.ap(&ops.hamiltonian, &self.ap(rc, psi));
                    let pp = self.ap(ops.momentum.component(c), psi);
                    lin(&[(-I / h, &rhp), (I / h, &hrp), (re(-1.0 / m), &pp)])
                });
                self.worst_vec(&res, comps)
            }
            "conservation.lz_h" => {
                let lz = ops.angular_momentum.z();
                let a = self.ap(lz, &self.ap(&ops.hamiltonian, psi));
                let b = self.ap(&ops.hamiltonian, &self.ap(lz, psi));
                self.worst(&lin(&[(re(1.0), &a), (re(-1.0), &b)]))
            }
            "force.equivalence" => {
                let diff = if self.products {
                    let heis = force_heisenberg(&self.g)?;
                    self.apv(&heis.sub(&ops.force.total)?, psi)
                } else {
                    let hp = self.ap(&ops.hamiltonian, psi);
                    let f = self.apv(&ops.force.total, psi);
                    [0, 1, 2].map(|c| {
                        let pc = ops.momentum.component(c);
                        let php = self.ap(pc, &hp);
                        let hpp = self.ap(&ops.hamiltonian, &self.ap(pc, psi));
                        lin(&[(-I / h, &php), (I / h, &hpp), (re(-1.0), &f[c])])
                    })
                };
                self.worst_vec(&diff, &[0, 1, 2])
            }
            "torque.pieces" | "torque.pieces_observed" => {
                let factor = if self.is_sphere() && id == "torque.pieces" { 2.0 } else { 1.0 };
                let k = I * (factor * h / (m * r * r));
                let comps = self.torque_components();
                let l = self.apv(&ops.angular_momentum, psi);
                let t1 = self.apv(&torque(&ops.position, &ops.force.f1)?, psi);
                let t2 = self.apv(&torque(&ops.position, &ops.force.f2)?, psi);
                let r1 = [0, 1, 2].map(|c| lin(&[(re(1.0), &t1[c]), (k, &l[c])]));
                let r2 = [0, 1, 2].map(|c| lin(&[(re(1.0), &t2[c]), (-k, &l[c])]));
                self.worst_vec(&r1, comps).max(self.worst_vec(&r2, comps))
            }
            "torque.net" => {
                let t = torque(&ops.position, &ops.force.total)?;
                self.worst_vec(&self.apv(&t, psi), self.torque_components())
            }
            "torque.ablation" => {
                let comps = self.torque_components();
                let t1 = self.vec_norms(&self.apv(&torque(&ops.position, &ops.force.f1)?, psi), comps);
                let l = self.vec_norms(&self.apv(&ops.angular_momentum, psi), comps);
                let k = 2.0 * h / (m * r * r);
                t1.iter()
                    .zip(&l)
                    .map(|(t, l)| t / (k * l))
                    .fold(f64::INFINITY, f64::min)
            }
            "torque.piece_hermiticity" => herm(&torque(&ops.position, &ops.force.f1)?),
            "radiality.total" => {
                let c = symmetrized_tangential_contraction(&self.displacement()?, &ops.force.total)?;
                self.worst(&self.ap(&c, psi))
            }
            "radiality.rotation" => {
                let t = TangentField::from_coefficients(&self.g, "sinθφ̂", |th, _| (0.0, th.sin()))?;
                let c = symmetrized_tangential_contraction(&t, &ops.force.total)?;
                self.worst(&self.ap(&c, psi))
            }
            "radiality.f1_form" | "radiality.f1_derived" | "radiality.f2_form" => {
                self.sphere_radiality_form(id)?
            }
            other => return Err(Error::InvalidArgument(format!("unknown check id '{other}'"))),
        })
    }

    /// Residual of a closed-form expression for one piece of the sphere's
    /// symmetrized force contraction.
    fn sphere_radiality_form(&self, id: &str) -> Result<f64> {
        let (h, m, r) = (self.hbar, self.mass, self.radius);
        let psi = &self.psi;
        let dr = self.displacement()?;
        let drv = dr.as_vector_op();
        let grad = &self.ops.gradient;
        let pre = h * h / (m * r);
        let cot: Vec<f64> = self.g.nodes().map(|(t, _)| t.cos() / t.sin()).collect();
        let cot = ScalarOp::real_diagonal(&self.g, &cot, "cotθ");
        let cot_p = self.ap(&cot, psi);
        // ∇'·dr acting on ψ means Σ_c ∇'_c (dr_c ψ); dr·∇' means Σ_c dr_c ∇'_c ψ
        let grad_dot_dr = |b: &Block| -> Block {
            let parts: Vec<Block> = (0..3)
                .map(|c| self.ap(grad.component(c), &self.ap(drv.component(c), b)))
                .collect();
            lin(&[(re(1.0), &parts[0]), (re(1.0), &parts[1]), (re(1.0), &parts[2])])
        };
        let dr_dot_grad = |b: &Block| -> Block {
            let parts: Vec<Block> = (0..3)
                .map(|c| self.ap(drv.component(c), &self.ap(grad.component(c), b)))
                .collect();
            lin(&[(re(1.0), &parts[0]), (re(1.0), &parts[1]), (re(1.0), &parts[2])])
        };
        let (piece, target) = match id {
            "radiality.f1_form" => {
                let c = symmetrized_tangential_contraction(&dr, &self.ops.force.f1)?;
                let gd = grad_dot_dr(psi);
                let target = lin(&[(re(-2.0 * pre / r), &gd), (re(pre / (r * r)), &cot_p)]);
                (self.ap(&c, psi), target)
            }
            "radiality.f1_derived" => {
                let c = symmetrized_tangential_contraction(&dr, &self.ops.force.f1)?;
                let dg = dr_dot_grad(psi);
                let target = lin(&[(re(-pre / r), &dg), (re(-pre / (r * r)), &cot_p)]);
                (self.ap(&c, psi), target)
            }
            _ => {
                let c = symmetrized_tangential_contraction(&dr, &self.ops.force.f2)?;
                let gd = grad_dot_dr(psi);
                let dg = dr_dot_grad(psi);
                let target = lin(&[(re(pre / r), &dg), (re(pre / r), &gd)]);
                (self.ap(&c, psi), target)
            }
        };
        Ok(self.worst(&lin(&[(re(1.0), &piece), (re(-1.0), &target)])))
    }

    /// Largest relative deviation of the Galerkin spectrum of `H` on the
    /// resolved band from the analytic levels of the band's modes.
    fn spectrum_error(&self) -> Result<f64> {
        let band = self.g.band(BandKind::Resolved);
        let mut computed = band_spectrum(&self.ops.hamiltonian, &band)?;
        let mut exact: Vec<f64> = band
            .modes
            .iter()
            .map(|&mode| analytic_level(&self.g, mode))
            .collect::<Result<_>>()?;
        computed.sort_by(f64::total_cmp);
        exact.sort_by(f64::total_cmp);
        let floor = self.hbar * self.hbar / (2.0 * self.mass * self.radius * self.radius);
        Ok(computed
            .iter()
            .zip(&exact)
            .map(|(c, e)| (c - e).abs() / e.abs().max(floor))
            .fold(0.0, f64::max))
    }
}

/// Eigenvalues of the Hermitian part of the compression of `h` onto `band`.
pub fn band_spectrum(h: &ScalarOp, band: &crate::grid::Band) -> Result<Vec<f64>> {
    let k = h.compress(band);
    let sym = Mat::<c64>::from_fn(k.nrows(), k.ncols(), |i, j| (k[(i, j)] + k[(j, i)].conj()) * 0.5);
    let vals = sym
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::LinAlg(format!("{e:?}")))?;
    let mut v: Vec<f64> = vals.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Analytic energy of a mode on a built-in chart.
pub fn analytic_level(g: &Grid, mode: Mode) -> Result<f64> {
    let p = g.chart().params();
    let kin = p.hbar * p.hbar / (2.0 * p.mass);
    match (g.chart().kind(), mode) {
        (ChartKind::Sphere { radius }, Mode::Harmonic { l, .. }) => {
            Ok(kin * (l * (l + 1)) as f64 / (radius * radius))
        }
        (ChartKind::Cylinder { radius, length }, Mode::Fourier { n, k }) => {
            let kz = 2.0 * std::f64::consts::PI * k as f64 / length;
            Ok(kin * ((n * n) as f64 / (radius * radius) + kz * kz - 0.25 / (radius * radius)))
        }
        (ChartKind::Ring { radius }, Mode::Fourier { n, .. }) => {
            Ok(kin * ((n * n) as f64 - 0.25) / (radius * radius))
        }
        _ => Err(Error::UnsupportedChart("no analytic spectrum for this chart".into())),
    }
}
