use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use serde_json::json;
use tlq_core::dynamics::{centripetal_force, gaussian_packet, Evolver};
use tlq_core::operators::write_operator;
use tlq_core::verify::{analytic_level, band_spectrum, convergence_study, run_suite_with};
use tlq_core::{
    angular_momentum, build_grid, force_closed_form, hamiltonian, laplacian, surface_momentum,
    velocity_squared, BandKind, Chart, ChartKind, Grid, Mode, OperatorSet,
    SurfaceState,
};

use crate::args::{
    ConvergenceArgs, CurvatureArgs, EvolveArgs, ExportArgs, GridArgs, OperatorName, SpectrumArgs,
    VerifyArgs,
};
use crate::{usage, CmdResult, Failure};

fn grid(chart: &Chart, args: &GridArgs) -> Result<Arc<Grid>, Failure> {
    let (n1, n2) = args.resolution(chart);
    Ok(build_grid(chart, n1, n2)?)
}

fn out_file(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Rounds away representation noise so exact constants print exactly.
fn clean(v: f64) -> f64 {
    if v.abs() < 1e-14 {
        return 0.0;
    }
    let scale = 10f64.powi(12 - v.abs().log10().ceil() as i32);
    (v * scale).round() / scale
}

pub fn curvature(a: &CurvatureArgs) -> CmdResult {
    let chart = a.chart.load()?;
    let c = chart.curvature()?;
    let at = |u: f64, v: f64| -> Result<[f64; 3], Failure> {
        Ok([
            chart.eval_on_surface(&c.mean, u, v)?,
            chart.eval_on_surface(&c.gaussian, u, v)?,
            chart.eval_on_surface(&c.potential, u, v)?,
        ])
    };
    let d1 = chart.q1().domain;
    let d2 = chart.q2().map(|q| q.domain);
    let value = if chart.kind() == ChartKind::Custom {
        let mut rows = Vec::new();
        println!("{:>12} {:>12} {:>14} {:>14} {:>14}", "q1", "q2", "M", "K", "Vgeo");
        for i in 0..5 {
            for j in 0..5 {
                let u = d1.min + (i as f64 + 0.5) / 5.0 * d1.length();
                let v = d2.map_or(0.0, |d| d.min + (j as f64 + 0.5) / 5.0 * d.length());
                let [m, k, vg] = at(u, v)?;
                println!("{u:>12.6} {v:>12.6} {m:>14.6e} {k:>14.6e} {vg:>14.6e}");
                rows.push(json!({"q1": u, "q2": v, "M": m, "K": k, "Vgeo": vg}));
                if d2.is_none() {
                    break;
                }
            }
        }
        json!({"chart": chart.describe(), "samples": rows})
    } else {
        let u = 0.5 * (d1.min + d1.max);
        let v = d2.map_or(0.0, |d| 0.5 * (d.min + d.max));
        let [m, k, vg] = at(u, v)?.map(clean);
        println!("M = {m}");
        println!("K = {k}");
        println!("Vgeo = {vg}");
        json!({"chart": chart.describe(), "M": m, "K": k, "Vgeo": vg})
    };
    if let Some(dir) = &a.out {
        let mut f = out_file(dir, "curvature.json")?;
        writeln!(f, "{}", serde_json::to_string_pretty(&value).expect("json"))?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn verify(a: &VerifyArgs) -> CmdResult {
    let chart = a.chart.load()?;
    let tol = a.tolerances()?;
    let g = grid(&chart, &a.grid)?;
    let report = run_suite_with(&g, a.grid.seed, &tol)?;
    if a.json {
        println!("{}", report.to_json());
    } else {
        println!("{report}");
    }
    if let Some(dir) = &a.out {
        writeln!(out_file(dir, "report.json")?, "{}", report.to_json())?;
        writeln!(out_file(dir, "report.txt")?, "{report}")?;
    }
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn spectrum(a: &SpectrumArgs) -> CmdResult {
    let chart = a.chart.load()?;
    let g = grid(&chart, &a.grid)?;
    let band = g.band(BandKind::Resolved);
    if a.count == 0 || a.count > band.len() {
        return Err(usage(format!(
            "--count must be between 1 and {} at this resolution",
            band.len()
        )));
    }
    let energies = band_spectrum(&hamiltonian(&g)?, &band)?;
    let exact: Option<Vec<f64>> = match chart.kind() {
        ChartKind::Custom => None,
        _ => {
            let mut e: Vec<f64> = band
                .modes
                .iter()
                .map(|&m| analytic_level(&g, m))
                .collect::<Result<_, _>>()?;
            e.sort_by(f64::total_cmp);
            Some(e)
        }
    };
    let p = chart.params();
    let floor = chart
        .kind()
        .radius()
        .map_or(f64::MIN_POSITIVE, |r| p.hbar * p.hbar / (2.0 * p.mass * r * r));
    let mut text = String::from("index,energy,exact,rel_err\n");
    for (i, e) in energies.iter().take(a.count).enumerate() {
        match &exact {
            Some(x) => {
                let rel = (e - x[i]).abs() / x[i].abs().max(floor);
                text.push_str(&format!("{i},{e:.16e},{:.16e},{rel:.3e}\n", x[i]));
            }
            None => text.push_str(&format!("{i},{e:.16e},,\n")),
        }
    }
    print!("{text}");
    if let Some(dir) = &a.out {
        out_file(dir, "spectrum.csv")?.write_all(text.as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn initial_state(a: &EvolveArgs, chart: &Chart, g: &Arc<Grid>) -> Result<SurfaceState, Failure> {
    if a.packet {
        let sigma = a
            .sigma
            .ok_or_else(|| usage("a packet needs its width: pass --sigma"))?;
        let center = a.center.unwrap_or(match chart.kind() {
            ChartKind::Sphere { .. } => (PI / 2.0, 0.0),
            ChartKind::Cylinder { length, .. } => (0.0, length / 2.0),
            _ => (0.0, 0.0),
        });
        return Ok(gaussian_packet(g, center, sigma, a.l0)?);
    }
    let (x, y) = a
        .mode
        .ok_or_else(|| usage("choose an initial state with --packet or --mode"))?;
    let mode = match chart.kind() {
        ChartKind::Sphere { .. } => {
            let l = usize::try_from(x).map_err(|_| usage("harmonic degree must be non-negative"))?;
            if y.unsigned_abs() as usize > l {
                return Err(usage(format!("|m| must not exceed l for Y_{l}^{y}")));
            }
            Mode::Harmonic { l, m: y }
        }
        _ => Mode::Fourier { n: x, k: y },
    };
    Ok(SurfaceState::mode(g, mode)?)
}

pub fn evolve(a: &EvolveArgs) -> CmdResult {
    let chart = a.chart.load()?;
    if !(a.dt > 0.0 && a.dt.is_finite()) {
        return Err(usage("--dt must be positive"));
    }
    let g = grid(&chart, &a.grid)?;
    let psi = initial_state(a, &chart, &g)?;
    let ops = OperatorSet::build(&g)?;
    let run = Evolver::with_operators(&ops)?.run(&psi, a.dt, a.steps)?;

    let o = &run.series[0];
    let centripetal = centripetal_force(&ops, &psi)?;
    let summary = json!({
        "chart": chart.describe(),
        "resolution": g.resolution(),
        "dt": a.dt,
        "steps": a.steps,
        "initial": {"energy": o.energy, "lz": o.lz, "force": o.force, "position": o.position},
        "max_norm_drift": run.max_drift(|o| o.norm),
        "max_energy_drift": run.max_drift(|o| o.energy),
        "max_lz_drift": run.max_drift(|o| o.lz),
        "max_torque": run.max_torque(),
        "ehrenfest_residual": run.ehrenfest_residual(),
        "initial_force_direction_cosine": run.force_direction_cosine(0),
        "mean_force_direction_cosine": run.mean_force_direction_cosine(),
        "weighted_force_direction_cosine": run.weighted_force_direction_cosine(),
        "centripetal_ratio": centripetal.ratio(),
    });
    let summary = serde_json::to_string_pretty(&summary).expect("json");
    match &a.out {
        Some(dir) => {
            run.write_csv(out_file(dir, "evolution.csv")?)?;
            writeln!(out_file(dir, "summary.json")?, "{summary}")?;
            println!("{summary}");
        }
        None => {
            run.write_csv(io::stdout().lock())?;
            eprintln!("{summary}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn convergence(a: &ConvergenceArgs) -> CmdResult {
    let chart = a.chart.load()?;
    let table = convergence_study(&chart, &a.res, a.seed)?;
    println!("{table}");
    if let Some(dir) = &a.out {
        out_file(dir, "convergence.csv")?.write_all(table.to_csv().as_bytes())?;
        writeln!(out_file(dir, "convergence.json")?, "{}", table.to_json())?;
    }
    Ok(if table.rows.iter().all(|r| r.converged) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn export(a: &ExportArgs) -> CmdResult {
    let chart = a.chart.load()?;
    let g = grid(&chart, &a.grid)?;
    let component = |v: tlq_core::VectorOp, c: usize| v.component(c).clone();
    let (name, op) = match a.op {
        OperatorName::H => ("H", hamiltonian(&g)?),
        OperatorName::V2 => ("v2", velocity_squared(&g)?),
        OperatorName::Laplacian => ("laplacian", laplacian(&g)?),
        OperatorName::Px => ("px", component(surface_momentum(&g)?, 0)),
        OperatorName::Py => ("py", component(surface_momentum(&g)?, 1)),
        OperatorName::Pz => ("pz", component(surface_momentum(&g)?, 2)),
        OperatorName::Lx => ("Lx", component(angular_momentum(&g)?, 0)),
        OperatorName::Ly => ("Ly", component(angular_momentum(&g)?, 1)),
        OperatorName::Lz => ("Lz", component(angular_momentum(&g)?, 2)),
        OperatorName::Fx => ("Fx", component(force_closed_form(&g)?.total, 0)),
        OperatorName::Fy => ("Fy", component(force_closed_form(&g)?.total, 1)),
        OperatorName::Fz => ("Fz", component(force_closed_form(&g)?.total, 2)),
    };
    let file = format!("{name}.cqop");
    write_operator(&op, out_file(&a.out, &file)?)?;
    println!("{} ({}x{})", a.out.join(&file).display(), op.n(), op.n());
    Ok(ExitCode::SUCCESS)
}
