//! Thin-layer quantization on curved surfaces.
//!
//! A quantum particle squeezed onto a surface acquires a curvature-dependent
//! Hermitian momentum, a geometric potential and, through the Heisenberg
//! equation, a force operator with a piece that has no classical
//! counterpart. This crate builds those operators as dense matrices on
//! spectral grids for the sphere, the cylinder and the ring, and checks the
//! operator identities between them.
//!
//! * [`expr`] parses and differentiates scale-factor expressions.
//! * [`geometry`] defines charts and their curvature.
//! * [`grid`] builds spectral grids, quadrature and derivative matrices.
//! * [`operators`] assembles momentum, Hamiltonian, force and torque.
//! * [`verify`] runs the identity suite and convergence studies.
//! * [`dynamics`] evolves states in the Hamiltonian eigenbasis.
//!
//! ```no_run
//! use tlq_core::{build_grid, hamiltonian, Chart, PhysParams};
//!
//! let chart = Chart::sphere(1.0, PhysParams::default())?;
//! let grid = build_grid(&chart, 16, 32)?;
//! let h = hamiltonian(&grid)?;
//! assert!(h.hermiticity_residual(&grid.band(tlq_core::BandKind::Test)) < 1e-10);
//! # Ok::<(), tlq_core::Error>(())
//! ```

pub mod dynamics;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod grid;
pub mod legendre;
pub mod operators;
pub mod verify;

pub use faer::c64;

pub use dynamics::{expectation, gaussian_packet, propagate, EvolutionRun, Evolver, Observables};
pub use error::{Error, Result};
pub use expr::{Expr, ParseError};
pub use geometry::{builtin_chart, BuiltinKind, Chart, ChartKind, CurvatureData, Domain, PhysParams};
pub use grid::{
    build_grid, deriv_op, inner_product, mult_op, Band, BandKind, Coord, Grid, Mode, SurfaceState,
};
pub use operators::{
    angular_momentum, force_closed_form, force_heisenberg, hamiltonian, laplacian, position_op,
    surface_gradient, surface_momentum, symmetrized_tangential_contraction, torque,
    velocity_squared, ForceParts, OperatorSet, ScalarOp, TangentField, VectorOp,
};
pub use verify::{
    convergence_study, run_suite, run_suite_with, CheckResult, ConvergenceTable, Report, Tolerances,
};
