//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use tlq_core::{build_grid, Chart, Grid, PhysParams};

/// Sphere of unit radius at `n x 2n`.
pub fn sphere(n: usize) -> Arc<Grid> {
    let chart = Chart::sphere(1.0, PhysParams::default()).expect("valid sphere");
    build_grid(&chart, n, 2 * n).expect("valid resolution")
}

/// Cylinder of unit radius and axial period 10 at `n x n`.
pub fn cylinder(n: usize) -> Arc<Grid> {
    let chart = Chart::cylinder(1.0, 10.0, PhysParams::default()).expect("valid cylinder");
    build_grid(&chart, n, n).expect("valid resolution")
}
