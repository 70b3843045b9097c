//! Residuals of the force, torque and radiality identities across a sequence
//! of resolutions.
//!
//! Band-limited states make these identities exact at every resolution, so
//! the study uses smooth states with infinite spectral support instead:
//! exponentials of the embedding coordinates, whose truncation error decays
//! spectrally and exposes the convergence of the discretization.

use std::f64::consts::PI;
use std::sync::Arc;

use faer::{c64, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{Suite, TEST_STATES};
use crate::error::{Error, Result};
use crate::geometry::{Chart, ChartKind};
use crate::grid::{build_grid, Grid, SurfaceState};

/// Checks tracked by [`convergence_study`].
pub const CONVERGENCE_CHECKS: &[&str] = &[
    "force.equivalence",
    "torque.pieces",
    "torque.net",
    "radiality.total",
    "radiality.f1_form",
];

/// Residuals at or below this level count as converged.
pub const CONVERGENCE_FLOOR: f64 = 1e-12;

/// Required residual reduction per resolution step.
pub const CONVERGENCE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub id: String,
    pub residuals: Vec<f64>,
    /// Residuals never increase.
    pub monotone: bool,
    /// Each step shrinks the residual at least tenfold or reaches the floor.
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub chart: String,
    pub resolutions: Vec<[usize; 2]>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn row(&self, id: &str) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// CSV with one row per resolution and one column per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n1,n2");
        for r in &self.rows {
            out.push(',');
            out.push_str(&r.id);
        }
        out.push('\n');
        for (i, res) in self.resolutions.iter().enumerate() {
            out.push_str(&format!("{},{}", res[0], res[1]));
            for r in &self.rows {
                out.push_str(&format!(",{:.16e}", r.residuals[i]));
            }
            out.push('\n');
        }
        out
    }
}

impl std::fmt::Display for ConvergenceTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.chart)?;
        write!(f, "{:<20}", "check")?;
        for r in &self.resolutions {
            write!(f, " {:>12}", format!("{}x{}", r[0], r[1]))?;
        }
        writeln!(f, " {:>9} {:>9}", "monotone", "converged")?;
        for row in &self.rows {
            write!(f, "{:<20}", row.id)?;
            for v in &row.residuals {
                write!(f, " {v:>12.3e}")?;
            }
            writeln!(f, " {:>9} {:>9}", row.monotone, row.converged)?;
        }
        Ok(())
    }
}

fn converged(residuals: &[f64]) -> bool {
    residuals
        .windows(2)
        .all(|w| w[1] <= CONVERGENCE_FLOOR || w[1] * CONVERGENCE_FACTOR <= w[0])
}

/// Smooth, non-band-limited normalized states: `exp(c·x)` for random complex
/// `c`, where `x` collects the periodic embedding coordinates of the chart.
pub fn smooth_states(g: &Arc<Grid>, count: usize, seed: u64) -> Result<Vec<SurfaceState>> {
    let kind = g.chart().kind();
    let features = |u: f64, v: f64| -> Vec<f64> {
        match kind {
            ChartKind::Sphere { .. } => vec![u.sin() * v.cos(), u.sin() * v.sin(), u.cos()],
            ChartKind::Cylinder { length, .. } => {
                let w = 2.0 * PI * v / length;
                vec![u.cos(), u.sin(), w.cos(), w.sin()]
            }
            ChartKind::Ring { .. } => vec![u.cos(), u.sin()],
            ChartKind::Custom => Vec::new(),
        }
    };
    if kind == ChartKind::Custom {
        return Err(Error::UnsupportedChart("smooth states need a built-in chart".into()));
    }
    let dim = features(0.5, 0.5).len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let c: Vec<c64> = (0..dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    c64::new(re, im)
                })
                .collect();
            SurfaceState::from_fn(g, |u, v| {
                let x = features(u, v);
                c.iter().zip(&x).map(|(c, x)| c * x).sum::<c64>().exp()
            })?
            .normalized()
        })
        .collect()
}

/// Residuals of the force, torque and radiality identities at each
/// resolution, on the same smooth state family.
pub fn convergence_study(
    chart: &Chart,
    resolutions: &[(usize, usize)],
    seed: u64,
) -> Result<ConvergenceTable> {
    if resolutions.len() < 2 {
        return Err(Error::InvalidArgument(
            "a convergence study needs at least two resolutions".into(),
        ));
    }
    if resolutions
        .windows(2)
        .any(|w| w[1].0 < w[0].0 || w[1].1 < w[0].1 || w[1] == w[0])
    {
        return Err(Error::InvalidArgument("resolutions must be increasing".into()));
    }
    let kind = chart.kind();
    let ids: Vec<&str> = CONVERGENCE_CHECKS
        .iter()
        .copied()
        .filter(|id| {
            super::check_spec(id).is_some_and(|s| s.charts & super::chart_bit(kind) != 0)
        })
        .collect();
    let mut residuals = vec![Vec::new(); ids.len()];
    for &(n1, n2) in resolutions {
        let g = build_grid(chart, n1, n2)?;
        let states = smooth_states(&g, TEST_STATES, seed)?;
        let block = Mat::<c64>::from_fn(g.len(), states.len(), |i, j| states[j].values()[i]);
        let suite = Suite::with_states(&g, block)?.by_application();
        for (k, id) in ids.iter().enumerate() {
            residuals[k].push(suite.residual(id)?);
        }
    }
    let rows = ids
        .iter()
        .zip(residuals)
        .map(|(id, r)| ConvergenceRow {
            id: id.to_string(),
            monotone: r.windows(2).all(|w| w[1] <= w[0]),
            converged: converged(&r),
            residuals: r,
        })
        .collect();
    Ok(ConvergenceTable {
        chart: chart.describe(),
        resolutions: resolutions.iter().map(|&(a, b)| [a, b]).collect(),
        rows,
    })
}
