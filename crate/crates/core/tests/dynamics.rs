use std::f64::consts::PI;
use std::sync::Arc;

use tlq_core::dynamics::{centripetal_force, expectation_real, expectation_vec, gaussian_packet};
use tlq_core::{build_grid, Chart, Evolver, Grid, Mode, OperatorSet, PhysParams, SurfaceState};

fn sphere(n1: usize, n2: usize) -> Arc<Grid> {
    build_grid(&Chart::sphere(1.0, PhysParams::default()).unwrap(), n1, n2).unwrap()
}

fn harmonic(g: &Arc<Grid>, l: usize, m: i64) -> SurfaceState {
    SurfaceState::mode(g, Mode::Harmonic { l, m }).unwrap()
}

#[test]
fn superposition_conserves_energy_and_lz() {
    let g = sphere(12, 24);
    let ops = OperatorSet::build(&g).unwrap();
    let psi = harmonic(&g, 1, 1)
        .add(&harmonic(&g, 2, 1))
        .unwrap()
        .normalized()
        .unwrap();
    let run = Evolver::with_operators(&ops).unwrap().run(&psi, 0.01, 1000).unwrap();
    assert_eq!(run.series.len(), 1001);
    for o in &run.series {
        assert!((o.energy - 2.0).abs() <= 1e-10, "t = {}: E = {}", o.t, o.energy);
        assert!((o.lz - 1.0).abs() <= 1e-10, "t = {}: Lz = {}", o.t, o.lz);
        assert!((o.norm - 1.0).abs() <= 1e-12);
    }
    assert!(run.max_torque() <= 1e-9);
    // the probability density beats at the level spacing 3 - 1 = 2
    let (a, b) = (run.state_at(0).unwrap(), run.state_at(157).unwrap());
    assert!(a.inner(&b).unwrap().norm() < 0.99);
}

#[test]
fn eigenstate_expectations() {
    let g = sphere(12, 24);
    let ops = OperatorSet::build(&g).unwrap();
    assert!((expectation_real(&ops.hamiltonian, &harmonic(&g, 2, 0)).unwrap() - 3.0).abs() < 1e-12);
    for (l, m) in [(0, 0), (1, 0), (1, 1), (2, -1), (3, 2), (4, 4)] {
        let f = expectation_vec(&ops.force.total, &harmonic(&g, l, m)).unwrap();
        assert!(f.iter().all(|c| c.norm() <= 1e-10), "Y_{l}^{m}: {f:?}");
    }
}

#[test]
fn packet_force_points_to_the_center() {
    let g = sphere(24, 48);
    let ops = OperatorSet::build(&g).unwrap();
    let packet = gaussian_packet(&g, (PI / 2.0, 0.0), 0.3, 4).unwrap();
    assert!((packet.norm() - 1.0).abs() < 1e-12);
    let c = centripetal_force(&ops, &packet).unwrap();
    assert!(c.force[0] < 0.0);
    assert!(c.angle_deg() <= 5.0, "angle {}", c.angle_deg());
    assert!((c.ratio() - 1.0).abs() <= 0.1, "ratio {}", c.ratio());
}

#[test]
fn narrow_packet_is_rejected_outside_the_band() {
    let g = sphere(12, 24);
    let packet = gaussian_packet(&g, (PI / 2.0, 0.0), 0.15, 4).unwrap();
    let h = tlq_core::hamiltonian(&g).unwrap();
    assert!(Evolver::new(&h).unwrap().run(&packet, 0.01, 1).is_err());
}

#[test]
fn runs_are_deterministic() {
    let g = sphere(8, 16);
    let h = tlq_core::hamiltonian(&g).unwrap();
    let psi = g.test_states(1, 5).remove(0);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    tlq_core::propagate(&h, &psi, 0.05, 20).unwrap().write_csv(&mut a).unwrap();
    tlq_core::propagate(&h, &psi, 0.05, 20).unwrap().write_csv(&mut b).unwrap();
    assert_eq!(a, b);
}
