use std::f64::consts::PI;
use std::sync::Arc;

use tlq_core::verify::band_spectrum;
use tlq_core::{
    build_grid, c64, run_suite, torque, BandKind, Chart, Grid, Mode, OperatorSet, PhysParams,
    SurfaceState,
};

fn sphere(n1: usize, n2: usize) -> Arc<Grid> {
    build_grid(&Chart::sphere(1.0, PhysParams::default()).unwrap(), n1, n2).unwrap()
}

fn cylinder(length: f64, n: usize) -> Arc<Grid> {
    build_grid(&Chart::cylinder(1.0, length, PhysParams::default()).unwrap(), n, n).unwrap()
}

fn harmonic(g: &Arc<Grid>, l: usize, m: i64) -> SurfaceState {
    SurfaceState::mode(g, Mode::Harmonic { l, m }).unwrap()
}

/// `‖a - c b‖`.
fn distance(a: &SurfaceState, b: &SurfaceState, c: c64) -> f64 {
    a.sub(&b.scaled(c)).unwrap().norm()
}

/// State multiplied pointwise by a function of the node.
fn times(psi: &SurfaceState, f: impl Fn(f64, f64) -> f64) -> SurfaceState {
    let g = psi.grid();
    let vals = psi
        .values()
        .iter()
        .zip(g.nodes())
        .map(|(v, (u, w))| v * f(u, w))
        .collect();
    SurfaceState::new(g, vals).unwrap()
}

#[test]
fn angular_momentum_on_eigenstates() {
    let g = sphere(12, 24);
    let ops = OperatorSet::build(&g).unwrap();
    let y31 = harmonic(&g, 3, 1);
    let lz = ops.angular_momentum.z().apply(&y31).unwrap();
    assert!(distance(&lz, &y31, c64::new(1.0, 0.0)) < 1e-12);

    let l2 = ops.angular_momentum.dot(&ops.angular_momentum).unwrap();
    for m in -2..=2 {
        let y = harmonic(&g, 2, m);
        assert!(distance(&l2.apply(&y).unwrap(), &y, c64::new(6.0, 0.0)) < 1e-10, "m = {m}");
    }

    let c = cylinder(2.0 * PI, 16);
    let ops = OperatorSet::build(&c).unwrap();
    let psi = SurfaceState::mode(&c, Mode::Fourier { n: 2, k: 0 }).unwrap();
    let lz = ops.angular_momentum.z().apply(&psi).unwrap();
    assert!(distance(&lz, &psi, c64::new(2.0, 0.0)) < 1e-12);
}

#[test]
fn position_components() {
    let g = sphere(8, 16);
    let ops = OperatorSet::build(&g).unwrap();
    let r2 = ops.position.dot(&ops.position).unwrap();
    let psi = g.test_states(1, 3).remove(0);
    assert!(distance(&r2.apply(&psi).unwrap(), &psi, c64::new(1.0, 0.0)) < 1e-13);
    for c in ops.position.components() {
        assert!(c.hermiticity_residual(&g.band(BandKind::Test)) < 1e-14);
    }

    let cyl = build_grid(&Chart::cylinder(2.0, 10.0, PhysParams::default()).unwrap(), 8, 8).unwrap();
    let ops = OperatorSet::build(&cyl).unwrap();
    let psi = cyl.test_states(1, 3).remove(0);
    let [x, y, _] = ops.position.apply(&psi).unwrap();
    let [xx, _, _] = ops.position.apply(&x).unwrap();
    let [_, yy, _] = ops.position.apply(&y).unwrap();
    assert!(distance(&xx.add(&yy).unwrap(), &psi, c64::new(4.0, 0.0)) < 1e-12);
}

#[test]
fn force_on_constant_state_is_radial() {
    let g = sphere(12, 24);
    let ops = OperatorSet::build(&g).unwrap();
    let y00 = harmonic(&g, 0, 0);
    let f = ops.force.total.apply(&y00).unwrap();
    let normal = [
        |u: f64, v: f64| u.sin() * v.cos(),
        |u: f64, v: f64| u.sin() * v.sin(),
        |u: f64, _: f64| u.cos(),
    ];
    for (c, n) in normal.iter().enumerate() {
        let expected = times(&y00, |u, v| -n(u, v));
        assert!(distance(&f[c], &expected, c64::new(1.0, 0.0)) < 1e-12, "component {c}");
    }
}

#[test]
fn cylinder_force_uses_ring_velocity() {
    let g = cylinder(2.0 * PI, 16);
    let ops = OperatorSet::build(&g).unwrap();
    // e^{iθ} e^{iz}: the axial motion must not enter F1
    let psi = SurfaceState::mode(&g, Mode::Fourier { n: 1, k: 1 }).unwrap();
    let f1 = ops.force.f1.apply(&psi).unwrap();
    for (c, n) in [|u: f64| u.cos(), |u: f64| u.sin()].iter().enumerate() {
        let expected = times(&psi, |u, _| -1.25 * n(u));
        assert!(distance(&f1[c], &expected, c64::new(1.0, 0.0)) < 1e-12, "component {c}");
    }
    assert!(f1[2].norm() < 1e-14);
}

#[test]
fn torque_pieces_on_sphere() {
    let g = sphere(12, 24);
    let ops = OperatorSet::build(&g).unwrap();
    let y11 = harmonic(&g, 1, 1);
    let t1 = torque(&ops.position, &ops.force.f1).unwrap();
    let t2 = torque(&ops.position, &ops.force.f2).unwrap();
    let z1 = t1.z().apply(&y11).unwrap();
    let z2 = t2.z().apply(&y11).unwrap();
    // the pieces come out as ∓iħLz/mR², half of ∓2iħLz/mR²
    assert!(distance(&z1, &y11, c64::new(0.0, -1.0)) < 1e-12);
    assert!(distance(&z2, &y11, c64::new(0.0, 1.0)) < 1e-12);
    assert!(distance(&z1, &y11, c64::new(0.0, -2.0)) > 0.9);
    let net = torque(&ops.position, &ops.force.total).unwrap();
    for psi in g.test_states(4, 11) {
        let t = net.apply(&psi).unwrap();
        assert!(t.iter().map(|s| s.norm()).fold(0.0, f64::max) < 1e-9);
    }
}

#[test]
fn ring_suite_passes() {
    let g = build_grid(&Chart::ring(1.0, PhysParams::default()).unwrap(), 64, 1).unwrap();
    let report = run_suite(&g, 7).unwrap();
    assert!(report.all_pass(), "{report}");
    assert!(report.check("torque.net").unwrap().residual <= 1e-10);
}

#[test]
fn cylinder_ground_state() {
    let g = cylinder(10.0, 32);
    let ops = OperatorSet::build(&g).unwrap();
    let levels = band_spectrum(&ops.hamiltonian, &g.band(BandKind::Resolved)).unwrap();
    assert!((levels[0] + 0.125).abs() < 1e-12);
    // next level: the lowest axial mode, (2π/10)²/2 - 1/8
    let kz = 2.0 * PI / 10.0;
    assert!((levels[1] - (0.5 * kz * kz - 0.125)).abs() < 1e-12);
}

#[test]
fn cylinder_quadrature_is_exact() {
    for n in [16, 32] {
        let g = cylinder(10.0, n);
        let area: f64 = g.weights().iter().sum();
        assert!((area / (20.0 * PI) - 1.0).abs() < 1e-12);
    }
}
