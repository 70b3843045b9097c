//! Time evolution in the eigenbasis of the Hamiltonian.
//!
//! The Hamiltonian is diagonalized on the resolved band of its grid, where
//! the discrete operator is exact and Hermitian, so each step is a diagonal
//! phase and the propagator is unitary to round-off. Observables are
//! transformed to the eigenbasis once and evaluated for every step with a
//! single matrix product.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use faer::{c64, Mat, Side};

use crate::error::{Error, Result};
use crate::geometry::ChartKind;
use crate::grid::{Band, BandKind, Grid, SurfaceState};
use crate::operators::{torque, OperatorSet, ScalarOp, VectorOp};

/// Relative Hermiticity tolerance for the Hamiltonian before propagation.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Largest accepted deviation of the captured norm of an initial state.
pub const BAND_TOL: f64 = 1e-8;

/// Expectation values at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
    pub lz: f64,
    pub force: [f64; 3],
    pub position: [f64; 3],
    pub momentum: [f64; 3],
    pub torque: [f64; 3],
}

/// Result of a propagation: the eigendecomposition used and the observable
/// series, one entry per step including `t = 0`.
#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub initial: SurfaceState,
    pub dt: f64,
    pub steps: usize,
    pub energies: Vec<f64>,
    pub series: Vec<Observables>,
    coefficients: Vec<c64>,
    vectors: Arc<Mat<c64>>,
}

/// Diagonalized Hamiltonian with observables expressed in its eigenbasis.
pub struct Evolver {
    grid: Arc<Grid>,
    hbar: f64,
    energies: Vec<f64>,
    /// Weighted-orthonormal eigenvectors as nodal columns.
    vectors: Arc<Mat<c64>>,
    weighted: Mat<c64>,
    observables: Vec<(Slot, Mat<c64>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Lz,
    Force(usize),
    Position(usize),
    Momentum(usize),
    Torque(usize),
}

impl Evolver {
    /// Diagonalizes `h` on the resolved band of its grid.
    pub fn new(h: &ScalarOp) -> Result<Evolver> {
        let grid = Arc::clone(h.grid());
        Evolver::with_band(h, &grid.band(BandKind::Resolved))
    }

    pub fn with_band(h: &ScalarOp, band: &Band) -> Result<Evolver> {
        Evolver::assemble(h, band, &OperatorSet::build(h.grid())?)
    }

    /// Diagonalizes the Hamiltonian of an assembled operator set on the
    /// resolved band, reusing its observables.
    pub fn with_operators(ops: &OperatorSet) -> Result<Evolver> {
        let h = &ops.hamiltonian;
        Evolver::assemble(h, &h.grid().band(BandKind::Resolved), ops)
    }

    fn assemble(h: &ScalarOp, band: &Band, ops: &OperatorSet) -> Result<Evolver> {
        let grid = Arc::clone(h.grid());
        if !matches!(
            grid.chart().kind(),
            ChartKind::Sphere { .. } | ChartKind::Cylinder { .. } | ChartKind::Ring { .. }
        ) {
            return Err(Error::UnsupportedChart(
                "evolution observables need a built-in chart".into(),
            ));
        }
        let k = h.compress(band);
        let scale = (0..k.nrows()).fold(1.0f64, |m, i| m.max(k[(i, i)].norm()));
        let defect = Mat::<c64>::from_fn(k.nrows(), k.ncols(), |i, j| {
            c64::new(0.0, 1.0) * (k[(i, j)] - k[(j, i)].conj())
        });
        let residual = crate::operators::hermitian_norm(defect.as_ref()) / scale;
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                residual,
                tolerance: HERMITIAN_TOL,
            });
        }
        let sym = Mat::<c64>::from_fn(k.nrows(), k.ncols(), |i, j| {
            (k[(i, j)] + k[(j, i)].conj()) * 0.5
        });
        let eig = sym
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::LinAlg(format!("{e:?}")))?;
        let energies: Vec<f64> = (0..k.nrows()).map(|i| eig.S()[i].re).collect();
        let vectors = &band.basis * eig.U();
        let w = grid.weights();
        let weighted = Mat::<c64>::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
            vectors[(i, j)] * w[i]
        });

        let mut ev = Evolver {
            grid: Arc::clone(&grid),
            hbar: grid.chart().params().hbar,
            energies,
            vectors: Arc::new(vectors),
            weighted,
            observables: Vec::new(),
        };
        let force = &ops.force.total;
        let tau = torque(&ops.position, force)?;
        ev.add(Slot::Lz, ops.angular_momentum.z());
        for c in 0..3 {
            ev.add(Slot::Force(c), force.component(c));
            ev.add(Slot::Position(c), ops.position.component(c));
            ev.add(Slot::Momentum(c), ops.momentum.component(c));
            ev.add(Slot::Torque(c), tau.component(c));
        }
        Ok(ev)
    }

    fn add(&mut self, slot: Slot, op: &ScalarOp) {
        let av = op.apply_block(self.vectors.as_ref().as_ref());
        let m = self.weighted.adjoint() * &av;
        self.observables.push((slot, m));
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Eigen-coefficients of `psi`, failing when part of it lies outside
    /// the band.
    pub fn coefficients(&self, psi: &SurfaceState) -> Result<Vec<c64>> {
        if !Arc::ptr_eq(psi.grid(), &self.grid) {
            return Err(Error::GridMismatch);
        }
        let v = psi.values();
        let coeffs: Vec<c64> = (0..self.weighted.ncols())
            .map(|j| (0..v.len()).map(|i| self.weighted[(i, j)].conj() * v[i]).sum())
            .collect();
        let captured = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let norm = psi.norm();
        if (captured - norm).abs() > BAND_TOL * norm.max(1.0) {
            return Err(Error::OutsideBand {
                captured: captured / norm,
            });
        }
        Ok(coeffs)
    }

    /// Evolves `psi0` for `steps` steps of `dt`, logging observables at each.
    pub fn run(&self, psi0: &SurfaceState, dt: f64, steps: usize) -> Result<EvolutionRun> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        let c0 = self.coefficients(psi0)?;
        let nb = c0.len();
        let times: Vec<f64> = (0..=steps).map(|s| s as f64 * dt).collect();
        let coeffs = Mat::<c64>::from_fn(nb, times.len(), |k, s| {
            c0[k] * c64::from_polar(1.0, -self.energies[k] * times[s] / self.hbar)
        });
        let mut series: Vec<Observables> = times
            .iter()
            .enumerate()
            .map(|(s, &t)| {
                let mut norm2 = 0.0;
                let mut e = 0.0;
                for k in 0..nb {
                    let p = coeffs[(k, s)].norm_sqr();
                    norm2 += p;
                    e += p * self.energies[k];
                }
                Observables {
                    t,
                    norm: norm2.sqrt(),
                    energy: e / norm2,
                    lz: 0.0,
                    force: [0.0; 3],
                    position: [0.0; 3],
                    momentum: [0.0; 3],
                    torque: [0.0; 3],
                }
            })
            .collect();
        for (slot, m) in &self.observables {
            let ac = m * &coeffs;
            for (s, obs) in series.iter_mut().enumerate() {
                let v: c64 = (0..nb).map(|k| coeffs[(k, s)].conj() * ac[(k, s)]).sum();
                let v = v.re / (obs.norm * obs.norm);
                match *slot {
                    Slot::Lz => obs.lz = v,
                    Slot::Force(c) => obs.force[c] = v,
                    Slot::Position(c) => obs.position[c] = v,
                    Slot::Momentum(c) => obs.momentum[c] = v,
                    Slot::Torque(c) => obs.torque[c] = v,
                }
            }
        }
        Ok(EvolutionRun {
            initial: psi0.clone(),
            dt,
            steps,
            energies: self.energies.clone(),
            series,
            coefficients: c0,
            vectors: Arc::clone(&self.vectors),
        })
    }
}

/// Evolves `psi0` under `h`; see [`Evolver`].
pub fn propagate(h: &ScalarOp, psi0: &SurfaceState, dt: f64, steps: usize) -> Result<EvolutionRun> {
    Evolver::new(h)?.run(psi0, dt, steps)
}

impl EvolutionRun {
    /// The state after `step` steps, reconstructed on the grid.
    pub fn state_at(&self, step: usize) -> Result<SurfaceState> {
        let t = step as f64 * self.dt;
        let hbar = self.initial.grid().chart().params().hbar;
        let n = self.vectors.nrows();
        let c: Vec<c64> = self
            .coefficients
            .iter()
            .zip(&self.energies)
            .map(|(c, e)| c * c64::from_polar(1.0, -e * t / hbar))
            .collect();
        let values = (0..n)
            .map(|i| (0..c.len()).map(|k| self.vectors[(i, k)] * c[k]).sum())
            .collect();
        SurfaceState::new(self.initial.grid(), values)
    }

    /// Largest deviation of a scalar series from its initial value.
    pub fn max_drift(&self, f: impl Fn(&Observables) -> f64) -> f64 {
        let f0 = f(&self.series[0]);
        self.series.iter().map(|o| (f(o) - f0).abs()).fold(0.0, f64::max)
    }

    pub fn max_torque(&self) -> f64 {
        self.series
            .iter()
            .flat_map(|o| o.torque)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest relative mismatch between the fourth-order central difference
    /// of `<p>` and `<F>`, normalized by the largest `|<F>|` in the run.
    pub fn ehrenfest_residual(&self) -> f64 {
        let s = &self.series;
        let scale = s
            .iter()
            .map(|o| o.force.iter().map(|f| f * f).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 2..s.len().saturating_sub(2) {
            for c in 0..3 {
                let dp = (s[i - 2].momentum[c] - 8.0 * s[i - 1].momentum[c]
                    + 8.0 * s[i + 1].momentum[c]
                    - s[i + 2].momentum[c])
                    / (12.0 * self.dt);
                worst = worst.max((dp - s[i].force[c]).abs() / scale);
            }
        }
        worst
    }

    /// Cosine between `<F>` and `-<R>` at a step; `None` when either
    /// vanishes.
    pub fn force_direction_cosine(&self, step: usize) -> Option<f64> {
        let o = self.series.get(step)?;
        let (f, r) = (norm3(&o.force), norm3(&o.position));
        let scale = self.series[0].energy.abs().max(1.0);
        if f <= 1e-9 * scale || r <= 1e-12 {
            return None;
        }
        Some(-dot3(&o.force, &o.position) / (f * r))
    }

    /// Mean of [`force_direction_cosine`](Self::force_direction_cosine)
    /// over the steps where it is defined.
    pub fn mean_force_direction_cosine(&self) -> Option<f64> {
        let c: Vec<f64> = (0..self.series.len())
            .filter_map(|s| self.force_direction_cosine(s))
            .collect();
        (!c.is_empty()).then(|| c.iter().sum::<f64>() / c.len() as f64)
    }

    /// Time average of the inward component of `<F>` along `<R>`, divided
    /// by the time average of `|<F>|`. Steps where the packet has spread
    /// out and `<F>` is small carry little weight.
    pub fn weighted_force_direction_cosine(&self) -> Option<f64> {
        let (mut inward, mut total) = (0.0, 0.0);
        for o in &self.series {
            let r = norm3(&o.position);
            if r > 1e-12 {
                inward -= dot3(&o.force, &o.position) / r;
                total += norm3(&o.force);
            }
        }
        (total > 0.0).then(|| inward / total)
    }

    /// Writes the series as CSV with header `t,norm,E,Lz,Fx,Fy,Fz,x,y,z`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,norm,E,Lz,Fx,Fy,Fz,x,y,z")?;
        for o in &self.series {
            let fields = [
                o.t,
                o.norm,
                o.energy,
                o.lz,
                o.force[0],
                o.force[1],
                o.force[2],
                o.position[0],
                o.position[1],
                o.position[2],
            ];
            let row: Vec<String> = fields.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Mean force on a state next to its classical centripetal magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Centripetal {
    pub force: [f64; 3],
    pub position: [f64; 3],
    /// `m<v²>/R`, with only the azimuthal motion counted on the cylinder.
    pub expected: f64,
}

impl Centripetal {
    pub fn magnitude(&self) -> f64 {
        norm3(&self.force)
    }

    /// `|<F>| / (m<v²>/R)`.
    pub fn ratio(&self) -> f64 {
        self.magnitude() / self.expected
    }

    /// Angle in degrees between `<F>` and `-<R>`.
    pub fn angle_deg(&self) -> f64 {
        let c = -dot3(&self.force, &self.position) / (norm3(&self.force) * norm3(&self.position));
        c.clamp(-1.0, 1.0).acos().to_degrees()
    }
}

/// `<F>` and `m<v²>/R` for a normalized state on a built-in chart.
pub fn centripetal_force(ops: &OperatorSet, psi: &SurfaceState) -> Result<Centripetal> {
    let g = psi.grid();
    let p = g.chart().params();
    let radius = g
        .chart()
        .kind()
        .radius()
        .ok_or_else(|| Error::UnsupportedChart("centripetal force needs a built-in chart".into()))?;
    let mut v2 = expectation_real(&ops.velocity_squared, psi)?;
    if let ChartKind::Cylinder { .. } = g.chart().kind() {
        // the centripetal piece involves only the azimuthal motion
        v2 -= ops.momentum.z().apply(psi)?.norm().powi(2) / (p.mass * p.mass);
    }
    let re3 = |v: [c64; 3]| v.map(|x| x.re);
    Ok(Centripetal {
        force: re3(expectation_vec(&ops.force.total, psi)?),
        position: re3(expectation_vec(&ops.position, psi)?),
        expected: p.mass * v2 / radius,
    })
}

/// `<psi|A psi>` under the quadrature inner product, for normalized `psi`.
pub fn expectation(a: &ScalarOp, psi: &SurfaceState) -> Result<c64> {
    psi.inner(&a.apply(psi)?)
}

/// Componentwise expectation of a vector operator.
pub fn expectation_vec(a: &VectorOp, psi: &SurfaceState) -> Result<[c64; 3]> {
    let [x, y, z] = a.apply(psi)?;
    Ok([psi.inner(&x)?, psi.inner(&y)?, psi.inner(&z)?])
}

/// Real expectation of a Hermitian operator; fails when the imaginary part
/// exceeds `1e-10` of the scale of the value.
pub fn expectation_real(a: &ScalarOp, psi: &SurfaceState) -> Result<f64> {
    let v = expectation(a, psi)?;
    if v.im.abs() > 1e-10 * v.re.abs().max(1.0) {
        return Err(Error::NotHermitian {
            residual: v.im.abs(),
            tolerance: 1e-10,
        });
    }
    Ok(v.re)
}

/// Default packet width in radians.
pub const DEFAULT_SIGMA: f64 = 0.3;
/// Default azimuthal wavenumber of a packet.
pub const DEFAULT_L0: i64 = 4;

/// A normalized Gaussian packet `exp(-d²/4σ²)` centered at `(q1, q2)`, with
/// `l0` phase windings along the azimuthal coordinate; `d` is the angular
/// geodesic distance (great-circle angle on the sphere,
/// `sqrt(Δθ² + (Δz/R)²)` on the cylinder).
///
/// On the sphere the phase `e^{i l0 φ}` is carried by `(sinθ e^{iφ})^l0`,
/// which agrees with it to second order around the equator but stays
/// smooth at the poles, where `e^{i l0 φ}` alone is discontinuous and would
/// spread the packet over every angular momentum.
pub fn gaussian_packet(
    g: &Arc<Grid>,
    center: (f64, f64),
    sigma: f64,
    l0: i64,
) -> Result<SurfaceState> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("packet width must be positive, got {sigma}")));
    }
    let kind = g.chart().kind();
    let wrap = |a: f64, period: f64| a - period * (a / period).round();
    let (c1, c2) = center;
    let winding = |u: f64| c64::from_polar(1.0, l0 as f64 * u);
    let state = SurfaceState::from_fn(g, |u, v| {
        let (d, phase) = match kind {
            ChartKind::Sphere { .. } => {
                let cosd = u.cos() * c1.cos() + u.sin() * c1.sin() * (v - c2).cos();
                let w = c64::from_polar(u.sin(), v);
                let w = if l0 < 0 { w.conj() } else { w };
                (cosd.clamp(-1.0, 1.0).acos(), w.powi(l0.unsigned_abs() as i32))
            }
            ChartKind::Cylinder { radius, length } => {
                let dt = wrap(u - c1, 2.0 * PI);
                let dz = wrap(v - c2, length) / radius;
                ((dt * dt + dz * dz).sqrt(), winding(u))
            }
            ChartKind::Ring { .. } => (wrap(u - c1, 2.0 * PI).abs(), winding(u)),
            ChartKind::Custom => (f64::NAN, c64::new(1.0, 0.0)),
        };
        phase * (-d * d / (4.0 * sigma * sigma)).exp()
    });
    match state {
        Ok(s) => s.normalized(),
        Err(Error::NonFinite { .. }) => Err(Error::UnsupportedChart(
            "Gaussian packets need a built-in chart".into(),
        )),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Chart, PhysParams};
    use crate::grid::{build_grid, Mode};
    use crate::operators::hamiltonian;

    #[test]
    fn stationary_state_is_stationary() {
        let g = build_grid(&Chart::sphere(1.0, PhysParams::default()).unwrap(), 10, 20).unwrap();
        let h = hamiltonian(&g).unwrap();
        let y = SurfaceState::mode(&g, Mode::Harmonic { l: 1, m: 1 }).unwrap();
        let run = propagate(&h, &y, 0.01, 50).unwrap();
        assert!(run.max_drift(|o| o.energy) < 1e-12);
        assert!((run.series[0].energy - 1.0).abs() < 1e-12);
        assert!((run.series[0].lz - 1.0).abs() < 1e-12);
        let last = run.state_at(50).unwrap();
        let overlap = y.inner(&last).unwrap().norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_band_state_is_rejected() {
        let g = build_grid(&Chart::sphere(1.0, PhysParams::default()).unwrap(), 8, 16).unwrap();
        let h = hamiltonian(&g).unwrap();
        // a narrow packet is not representable at this resolution
        let psi = gaussian_packet(&g, (PI / 2.0, 0.0), 0.05, 0).unwrap();
        assert!(matches!(propagate(&h, &psi, 0.01, 2), Err(Error::OutsideBand { .. })));
    }

    #[test]
    fn csv_has_full_precision() {
        let g = build_grid(&Chart::ring(1.0, PhysParams::default()).unwrap(), 16, 1).unwrap();
        let h = hamiltonian(&g).unwrap();
        let psi = SurfaceState::mode(&g, Mode::Fourier { n: 2, k: 0 }).unwrap();
        let run = propagate(&h, &psi, 0.1, 3).unwrap();
        let mut buf = Vec::new();
        run.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,norm,E,Lz,Fx,Fy,Fz,x,y,z");
        assert_eq!(lines.len(), 5);
        let e: f64 = lines[2].split(',').nth(2).unwrap().parse().unwrap();
        assert!((e - (2.0 - 0.125)).abs() < 1e-12);
    }
}
