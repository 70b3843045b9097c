use std::fmt;

use serde::Serialize;

use super::CheckSpec;

/// Whether a residual must stay below its tolerance or above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Ceiling,
    /// Counterexample checks: the residual must reach the tolerance.
    Floor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub description: String,
    pub residual: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
    pub resolution: [usize; 2],
    pub wall_ms: f64,
}

impl CheckResult {
    pub(crate) fn new(
        spec: &CheckSpec,
        residual: f64,
        tolerance: f64,
        resolution: (usize, usize),
        wall_ms: f64,
    ) -> CheckResult {
        let pass = match spec.bound {
            Bound::Ceiling => residual <= tolerance,
            Bound::Floor => residual >= tolerance,
        };
        CheckResult {
            id: spec.id.to_string(),
            description: spec.description.to_string(),
            residual,
            tolerance,
            bound: spec.bound,
            pass,
            resolution: [resolution.0, resolution.1],
            wall_ms,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
}

/// Outcome of a suite run. `diagnostics` are reported alongside the
/// checks but do not count towards the summary.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub chart: String,
    pub resolution: [usize; 2],
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub diagnostics: Vec<CheckResult>,
    pub notes: Vec<String>,
    pub summary: Summary,
}

impl Report {
    pub(crate) fn new(
        chart: String,
        resolution: (usize, usize),
        seed: u64,
        checks: Vec<CheckResult>,
        diagnostics: Vec<CheckResult>,
        notes: Vec<String>,
    ) -> Report {
        let pass = checks.iter().filter(|c| c.pass).count();
        let summary = Summary {
            pass,
            fail: checks.len() - pass,
        };
        Report {
            chart,
            resolution: [resolution.0, resolution.1],
            seed,
            checks,
            diagnostics,
            notes,
            summary,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().chain(&self.diagnostics).find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn write_rows(f: &mut fmt::Formatter<'_>, rows: &[CheckResult], enforced: bool) -> fmt::Result {
    writeln!(
        f,
        "{:<30} {:>12} {:>10} {:>4} {:>6} {:>9}",
        "check", "residual", "tolerance", "", "result", "ms"
    )?;
    for c in rows {
        let op = match c.bound {
            Bound::Ceiling => "<=",
            Bound::Floor => ">=",
        };
        let result = match (enforced, c.pass) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, true) => "ok",
            (false, false) => "differs",
        };
        let tol = if c.tolerance.is_finite() {
            format!("{:>10.1e}", c.tolerance)
        } else {
            format!("{:>10}", "-")
        };
        writeln!(
            f,
            "{:<30} {:>12.3e} {} {:>4} {:>6} {:>9.1}",
            c.id, c.residual, tol, op, result, c.wall_ms
        )?;
    }
    Ok(())
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}  {}x{}  seed {}",
            self.chart, self.resolution[0], self.resolution[1], self.seed
        )?;
        write_rows(f, &self.checks, true)?;
        if !self.diagnostics.is_empty() {
            writeln!(f)?;
            writeln!(f, "diagnostics (not enforced)")?;
            write_rows(f, &self.diagnostics, false)?;
        }
        if !self.notes.is_empty() {
            writeln!(f)?;
            for n in &self.notes {
                writeln!(f, "note: {n}")?;
            }
        }
        writeln!(f)?;
        write!(f, "{} passed, {} failed", self.summary.pass, self.summary.fail)
    }
}
