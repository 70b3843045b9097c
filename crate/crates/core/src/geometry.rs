//! Surface charts and their curvature.
//!
//! A chart is an orthogonal curvilinear coordinate system `(q1, q2, q3)`
//! given by its scale factors, with the surface obtained by fixing
//! `q3 = a`. The normal coordinate must have unit scale factor. Mean and
//! Gaussian curvature and the curvature-induced potential are derived by
//! exact symbolic differentiation of `h1*h2` along the normal.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{is_variable_name, Expr};

/// Physical constants carried by a chart. Natural units by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

impl PhysParams {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        let p = PhysParams { hbar, mass };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidChart(format!("hbar must be positive, got {}", self.hbar)));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::InvalidChart(format!("mass must be positive, got {}", self.mass)));
        }
        Ok(())
    }

    /// `hbar^2 / 2m`, the kinetic prefactor.
    pub fn kinetic(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub min: f64,
    pub max: f64,
    pub periodic: bool,
}

impl Domain {
    pub fn length(&self) -> f64 {
        self.max - self.min
    }

    /// Interior sample points, avoiding the end points.
    fn samples(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        (0..n).map(move |i| self.min + self.length() * (i as f64 + 0.5) / n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinKind {
    Sphere,
    Cylinder,
    Ring,
}

impl std::str::FromStr for BuiltinKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(BuiltinKind::Sphere),
            "cylinder" => Ok(BuiltinKind::Cylinder),
            "ring" => Ok(BuiltinKind::Ring),
            other => Err(Error::InvalidArgument(format!("unknown chart `{other}`"))),
        }
    }
}

/// Which surface a chart describes. Built-in kinds know their embedding in
/// Cartesian space; custom charts are known only through scale factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartKind {
    Sphere { radius: f64 },
    Cylinder { radius: f64, length: f64 },
    Ring { radius: f64 },
    Custom,
}

impl ChartKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChartKind::Sphere { .. } => "sphere",
            ChartKind::Cylinder { .. } => "cylinder",
            ChartKind::Ring { .. } => "ring",
            ChartKind::Custom => "custom",
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            ChartKind::Sphere { radius }
            | ChartKind::Cylinder { radius, .. }
            | ChartKind::Ring { radius } => Some(radius),
            ChartKind::Custom => None,
        }
    }
}

/// A tangential surface coordinate: its name, scale factor and range.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceCoord {
    pub name: String,
    pub scale: Expr,
    pub domain: Domain,
}

#[derive(Debug, Clone)]
pub struct Chart {
    kind: ChartKind,
    q1: SurfaceCoord,
    q2: Option<SurfaceCoord>,
    q3: String,
    h3: Expr,
    a: f64,
    params: PhysParams,
}

/// Orthonormal frame and position at a surface point, in Cartesian components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub normal: [f64; 3],
    pub position: [f64; 3],
}

/// Curvature quantities on the surface, as expressions in `(q1, q2)`.
#[derive(Debug, Clone)]
pub struct CurvatureData {
    pub mean: Expr,
    pub gaussian: Expr,
    pub potential: Expr,
    /// `d3^2(h1 h2)/(2 h1 h2) - (d3(h1 h2))^2/(2 h1 h2)^2`, equal to `K - M^2`.
    pub bracket: Expr,
}

const SAMPLES_PER_AXIS: usize = 9;
const UNIT_H3_TOL: f64 = 1e-12;

impl Chart {
    pub fn sphere(radius: f64, params: PhysParams) -> Result<Chart> {
        positive("sphere radius", radius)?;
        Chart::new(
            ChartKind::Sphere { radius },
            coord("theta", "r", 0.0, PI, false),
            Some(coord("phi", "r*sin(theta)", 0.0, 2.0 * PI, true)),
            "r",
            radius,
            params,
        )
    }

    pub fn cylinder(radius: f64, length: f64, params: PhysParams) -> Result<Chart> {
        positive("cylinder radius", radius)?;
        positive("cylinder period Lz", length)?;
        Chart::new(
            ChartKind::Cylinder { radius, length },
            coord("theta", "r", 0.0, 2.0 * PI, true),
            Some(coord("z", "1", 0.0, length, true)),
            "r",
            radius,
            params,
        )
    }

    /// The cylinder chart with the axial coordinate removed.
    pub fn ring(radius: f64, params: PhysParams) -> Result<Chart> {
        positive("ring radius", radius)?;
        Chart::new(
            ChartKind::Ring { radius },
            coord("theta", "r", 0.0, 2.0 * PI, true),
            None,
            "r",
            radius,
            params,
        )
    }

    /// Builds a custom chart and validates it on a sample grid.
    pub fn custom(
        coords: [&str; 3],
        h: [Expr; 3],
        a: f64,
        domains: [Domain; 2],
        params: PhysParams,
    ) -> Result<Chart> {
        let [h1, h2, h3] = h;
        Chart::with_normal_scale(
            ChartKind::Custom,
            SurfaceCoord {
                name: coords[0].to_string(),
                scale: h1,
                domain: domains[0],
            },
            Some(SurfaceCoord {
                name: coords[1].to_string(),
                scale: h2,
                domain: domains[1],
            }),
            coords[2],
            h3,
            a,
            params,
        )
    }

    fn new(
        kind: ChartKind,
        q1: SurfaceCoord,
        q2: Option<SurfaceCoord>,
        q3: &str,
        a: f64,
        params: PhysParams,
    ) -> Result<Chart> {
        Chart::with_normal_scale(kind, q1, q2, q3, Expr::Num(1.0), a, params)
    }

    fn with_normal_scale(
        kind: ChartKind,
        q1: SurfaceCoord,
        q2: Option<SurfaceCoord>,
        q3: &str,
        h3: Expr,
        a: f64,
        params: PhysParams,
    ) -> Result<Chart> {
        let chart = Chart {
            kind,
            q1,
            q2,
            q3: q3.to_string(),
            h3,
            a,
            params,
        };
        chart.validate()?;
        Ok(chart)
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !self.a.is_finite() {
            return Err(Error::InvalidChart("surface value a must be finite".into()));
        }
        let mut names = vec![self.q1.name.as_str(), self.q3.as_str()];
        if let Some(q2) = &self.q2 {
            names.insert(1, q2.name.as_str());
        }
        for n in &names {
            if !is_variable_name(n) {
                return Err(Error::InvalidChart(format!("`{n}` is not a valid coordinate name")));
            }
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidChart(format!("coordinate `{n}` appears twice")));
            }
        }
        for c in self.surface_coords() {
            let d = c.domain;
            if !(d.min.is_finite() && d.max.is_finite() && d.min < d.max) {
                return Err(Error::InvalidChart(format!(
                    "domain of `{}` must satisfy min < max",
                    c.name
                )));
            }
        }
        for h in self.scale_factors() {
            if let Some(v) = h.free_vars().into_iter().find(|v| !names.contains(&v.as_str())) {
                return Err(Error::InvalidChart(format!(
                    "scale factor `{h}` uses `{v}`, which is not a coordinate"
                )));
            }
        }

        // h3 = 1 and h1, h2 > 0 over a sample of the surface interior
        for (u, v) in self.sample_points(SAMPLES_PER_AXIS) {
            let b = self.bindings(u, v, self.a);
            let h3 = self.h3.evaluate(b.as_slice())?;
            if (h3 - 1.0).abs() > UNIT_H3_TOL {
                return Err(Error::InvalidChart(format!(
                    "normal scale factor must equal 1 on the surface, got {h3} at ({u}, {v})"
                )));
            }
            for c in self.surface_coords() {
                let h = c.scale.evaluate(b.as_slice())?;
                if h <= 0.0 {
                    return Err(Error::InvalidChart(format!(
                        "scale factor of `{}` is {h} at ({u}, {v}); must be positive",
                        c.name
                    )));
                }
            }
        }
        Ok(())
    }

    fn sample_points(&self, n: usize) -> Vec<(f64, f64)> {
        let us: Vec<f64> = self.q1.domain.samples(n).collect();
        match &self.q2 {
            Some(q2) => us
                .iter()
                .flat_map(|&u| q2.domain.samples(n).map(move |v| (u, v)))
                .collect(),
            None => us.into_iter().map(|u| (u, 0.0)).collect(),
        }
    }

    fn bindings(&self, u: f64, v: f64, w: f64) -> Vec<(String, f64)> {
        let mut b = vec![(self.q1.name.clone(), u), (self.q3.clone(), w)];
        if let Some(q2) = &self.q2 {
            b.push((q2.name.clone(), v));
        }
        b
    }

    /// Bindings for a surface point, with `q3 = a`.
    pub fn surface_bindings(&self, u: f64, v: f64) -> Vec<(String, f64)> {
        self.bindings(u, v, self.a)
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn params(&self) -> PhysParams {
        self.params
    }

    pub fn with_params(mut self, params: PhysParams) -> Result<Chart> {
        params.validate()?;
        self.params = params;
        Ok(self)
    }

    pub fn surface_value(&self) -> f64 {
        self.a
    }

    pub fn q1(&self) -> &SurfaceCoord {
        &self.q1
    }

    pub fn q2(&self) -> Option<&SurfaceCoord> {
        self.q2.as_ref()
    }

    pub fn normal_coord(&self) -> &str {
        &self.q3
    }

    pub fn h3(&self) -> &Expr {
        &self.h3
    }

    pub fn surface_coords(&self) -> impl Iterator<Item = &SurfaceCoord> {
        std::iter::once(&self.q1).chain(self.q2.as_ref())
    }

    fn scale_factors(&self) -> impl Iterator<Item = &Expr> {
        self.surface_coords().map(|c| &c.scale).chain(std::iter::once(&self.h3))
    }

    /// Scale factor of the second coordinate; 1 when the surface is a curve.
    pub fn h2(&self) -> Expr {
        self.q2.as_ref().map_or(Expr::Num(1.0), |c| c.scale.clone())
    }

    /// `h1*h2` as a function of all three coordinates.
    pub fn area_factor(&self) -> Expr {
        Expr::mul(self.q1.scale.clone(), self.h2())
    }

    /// Expression restricted to the surface (`q3` replaced by `a`).
    pub fn on_surface(&self, e: &Expr) -> Expr {
        e.substitute(&self.q3, self.a)
    }

    pub fn eval_on_surface(&self, e: &Expr, u: f64, v: f64) -> Result<f64> {
        Ok(e.evaluate(self.surface_bindings(u, v).as_slice())?)
    }

    pub fn dimension(&self) -> usize {
        if self.q2.is_some() {
            2
        } else {
            1
        }
    }

    /// Cartesian frame at a surface point, for charts with a known embedding.
    pub fn frame(&self, u: f64, v: f64) -> Option<Frame> {
        match self.kind {
            ChartKind::Sphere { radius } => {
                let (st, ct) = u.sin_cos();
                let (sp, cp) = v.sin_cos();
                let normal = [st * cp, st * sp, ct];
                Some(Frame {
                    e1: [ct * cp, ct * sp, -st],
                    e2: [-sp, cp, 0.0],
                    normal,
                    position: normal.map(|c| radius * c),
                })
            }
            ChartKind::Cylinder { radius, .. } => {
                let (s, c) = u.sin_cos();
                Some(Frame {
                    e1: [-s, c, 0.0],
                    e2: [0.0, 0.0, 1.0],
                    normal: [c, s, 0.0],
                    position: [radius * c, radius * s, v],
                })
            }
            ChartKind::Ring { radius } => {
                let (s, c) = u.sin_cos();
                Some(Frame {
                    e1: [-s, c, 0.0],
                    e2: [0.0, 0.0, 0.0],
                    normal: [c, s, 0.0],
                    position: [radius * c, radius * s, 0.0],
                })
            }
            ChartKind::Custom => None,
        }
    }

    /// Analytic surface area for built-in charts.
    pub fn area(&self) -> Option<f64> {
        match self.kind {
            ChartKind::Sphere { radius } => Some(4.0 * PI * radius * radius),
            ChartKind::Cylinder { radius, length } => Some(2.0 * PI * radius * length),
            ChartKind::Ring { radius } => Some(2.0 * PI * radius),
            ChartKind::Custom => None,
        }
    }

    pub fn describe(&self) -> String {
        match self.kind {
            ChartKind::Sphere { radius } => format!("sphere R={radius}"),
            ChartKind::Cylinder { radius, length } => format!("cylinder R={radius} Lz={length}"),
            ChartKind::Ring { radius } => format!("ring R={radius}"),
            ChartKind::Custom => {
                let h: Vec<String> = self.scale_factors().map(|e| e.to_string()).collect();
                format!("custom h=({}) a={}", h.join(", "), self.a)
            }
        }
    }

    /// Reads a chart from the JSON schema
    /// `{"coords","h","a","domains","hbar","mass"}`.
    pub fn from_json_str(text: &str) -> Result<Chart> {
        let file: ChartFile = serde_json::from_str(text).map_err(|e| Error::ChartFile {
            path: "<input>".into(),
            message: format!("line {} column {}: {e}", e.line(), e.column()),
        })?;
        file.into_chart()
    }

    pub fn from_json_file(path: &Path) -> Result<Chart> {
        let text = std::fs::read_to_string(path)?;
        Chart::from_json_str(&text).map_err(|e| match e {
            Error::ChartFile { message, .. } => Error::ChartFile {
                path: path.display().to_string(),
                message,
            },
            other => other,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let q2 = self.q2.as_ref().ok_or_else(|| {
            Error::UnsupportedChart("the chart file format describes two-dimensional surfaces".into())
        })?;
        let file = ChartFile {
            coords: [self.q1.name.clone(), q2.name.clone(), self.q3.clone()],
            h: [self.q1.scale.clone(), q2.scale.clone(), self.h3.clone()],
            a: self.a,
            domains: [self.q1.domain.into(), q2.domain.into()],
            hbar: self.params.hbar,
            mass: self.params.mass,
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    /// Mean curvature `M = -(1/(2 h1 h2)) d3(h1 h2)` on the surface.
    pub fn mean_curvature(&self) -> Result<Expr> {
        let hh = self.area_factor();
        let d = hh.differentiate(&self.q3)?;
        let m = Expr::neg(Expr::div(d, Expr::mul(Expr::Num(2.0), hh)));
        Ok(self.on_surface(&m))
    }

    /// The bracket `W = K - M^2` from the normal derivatives of `h1 h2`.
    fn bracket(&self) -> Result<Expr> {
        let hh = self.area_factor();
        let d1 = hh.differentiate(&self.q3)?;
        let d2 = d1.differentiate(&self.q3)?;
        let two_hh = Expr::mul(Expr::Num(2.0), hh);
        let w = Expr::sub(
            Expr::div(d2, two_hh.clone()),
            Expr::div(Expr::pow(d1, 2), Expr::pow(two_hh, 2)),
        );
        Ok(self.on_surface(&w))
    }

    /// Gaussian curvature `K = M^2 + W`.
    pub fn gaussian_curvature(&self) -> Result<Expr> {
        Ok(Expr::add(Expr::pow(self.mean_curvature()?, 2), self.bracket()?))
    }

    /// Geometric potential `-(hbar^2/2m)(M^2 - K)`.
    pub fn geometric_potential(&self) -> Result<Expr> {
        Ok(self.curvature()?.potential)
    }

    pub fn curvature(&self) -> Result<CurvatureData> {
        let mean = self.mean_curvature()?;
        let bracket = self.bracket()?;
        let gaussian = Expr::add(Expr::pow(mean.clone(), 2), bracket.clone());
        let potential = Expr::mul(
            Expr::Num(-self.params.kinetic()),
            Expr::sub(Expr::pow(mean.clone(), 2), gaussian.clone()),
        );
        Ok(CurvatureData {
            mean,
            gaussian,
            potential,
            bracket,
        })
    }
}

pub fn builtin_chart(
    kind: BuiltinKind,
    radius: f64,
    length: Option<f64>,
    params: PhysParams,
) -> Result<Chart> {
    match kind {
        BuiltinKind::Sphere => Chart::sphere(radius, params),
        BuiltinKind::Cylinder => {
            let length = length.ok_or_else(|| {
                Error::InvalidChart("cylinder needs an axial period Lz".into())
            })?;
            Chart::cylinder(radius, length, params)
        }
        BuiltinKind::Ring => Chart::ring(radius, params),
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidChart(format!("{what} must be positive, got {v}")))
    }
}

fn coord(name: &str, scale: &str, min: f64, max: f64, periodic: bool) -> SurfaceCoord {
    SurfaceCoord {
        name: name.to_string(),
        scale: Expr::parse(scale).expect("built-in scale factor"),
        domain: Domain { min, max, periodic },
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartFile {
    coords: [String; 3],
    h: [Expr; 3],
    a: f64,
    domains: [DomainFile; 2],
    #[serde(default = "one")]
    hbar: f64,
    #[serde(default = "one")]
    mass: f64,
}

fn one() -> f64 {
    1.0
}

/// Domain bounds may be written as numbers or constant expressions ("2*pi").
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Bound {
    Num(f64),
    Expr(String),
}

impl Bound {
    fn value(&self) -> Result<f64> {
        match self {
            Bound::Num(v) => Ok(*v),
            Bound::Expr(s) => {
                let e = Expr::parse(s).map_err(|source| Error::Parse {
                    context: "domain bound".into(),
                    source,
                })?;
                Ok(e.evaluate(&[] as &[(&str, f64)])?)
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainFile {
    min: Bound,
    max: Bound,
    periodic: bool,
}

impl From<Domain> for DomainFile {
    fn from(d: Domain) -> Self {
        DomainFile {
            min: Bound::Num(d.min),
            max: Bound::Num(d.max),
            periodic: d.periodic,
        }
    }
}

impl ChartFile {
    fn into_chart(self) -> Result<Chart> {
        let domains = [self.domains[0].resolve()?, self.domains[1].resolve()?];
        let coords = [
            self.coords[0].as_str(),
            self.coords[1].as_str(),
            self.coords[2].as_str(),
        ];
        Chart::custom(
            coords,
            self.h.clone(),
            self.a,
            domains,
            PhysParams::new(self.hbar, self.mass)?,
        )
    }
}

impl DomainFile {
    fn resolve(&self) -> Result<Domain> {
        Ok(Domain {
            min: self.min.value()?,
            max: self.max.value()?,
            periodic: self.periodic,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(chart: &Chart, e: &Expr, u: f64, v: f64) -> f64 {
        chart.eval_on_surface(e, u, v).unwrap()
    }

    fn flat() -> Chart {
        Chart::custom(
            ["x", "y", "w"],
            [Expr::Num(1.0), Expr::Num(1.0), Expr::Num(1.0)],
            0.0,
            [
                Domain { min: 0.0, max: 1.0, periodic: true },
                Domain { min: 0.0, max: 1.0, periodic: true },
            ],
            PhysParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn builtin_scale_factors() {
        let s = Chart::sphere(1.0, PhysParams::default()).unwrap();
        assert_eq!(s.q2().unwrap().scale.to_string(), "r*sin(theta)");
        let c = builtin_chart(BuiltinKind::Cylinder, 2.0, Some(10.0), PhysParams::default()).unwrap();
        assert_eq!(c.q1().scale.to_string(), "r");
        assert!(Chart::sphere(-1.0, PhysParams::default()).is_err());
        assert!(Chart::cylinder(1.0, 0.0, PhysParams::default()).is_err());
        assert!(builtin_chart(BuiltinKind::Cylinder, 1.0, None, PhysParams::default()).is_err());
    }

    #[test]
    fn sphere_curvature() {
        let s = Chart::sphere(1.0, PhysParams::default()).unwrap();
        let c = s.curvature().unwrap();
        for (u, v) in [(0.3, 0.1), (1.2, 4.0), (2.9, 6.0)] {
            assert!((at(&s, &c.mean, u, v) + 1.0).abs() < 1e-15);
            assert!((at(&s, &c.gaussian, u, v) - 1.0).abs() < 1e-15);
            assert!(at(&s, &c.potential, u, v).abs() < 1e-15);
        }
    }

    #[test]
    fn cylinder_curvature() {
        let c2 = Chart::cylinder(2.0, 10.0, PhysParams::default()).unwrap();
        assert!((at(&c2, &c2.mean_curvature().unwrap(), 1.0, 2.0) + 0.25).abs() < 1e-15);
        let c1 = Chart::cylinder(1.0, 10.0, PhysParams::default()).unwrap();
        let k = c1.gaussian_curvature().unwrap();
        assert!(at(&c1, &k, 1.0, 2.0).abs() < 1e-15);
        let v = c1.geometric_potential().unwrap();
        assert!((at(&c1, &v, 1.0, 2.0) + 0.125).abs() < 1e-15);
    }

    #[test]
    fn ring_matches_cylinder() {
        let r = Chart::ring(1.0, PhysParams::default()).unwrap();
        let c = r.curvature().unwrap();
        assert!((at(&r, &c.mean, 0.4, 0.0) + 0.5).abs() < 1e-15);
        assert!((at(&r, &c.potential, 0.4, 0.0) + 0.125).abs() < 1e-15);
    }

    #[test]
    fn flat_chart_has_no_curvature() {
        let f = flat();
        let c = f.curvature().unwrap();
        assert_eq!(c.mean, Expr::Num(0.0));
        assert!(at(&f, &c.gaussian, 0.2, 0.3).abs() < 1e-15);
        assert!(at(&f, &c.potential, 0.2, 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonunit_normal_scale() {
        let err = Chart::custom(
            ["u", "v", "w"],
            [Expr::Num(1.0), Expr::Num(1.0), Expr::parse("2*w").unwrap()],
            1.0,
            [
                Domain { min: 0.0, max: 1.0, periodic: true },
                Domain { min: 0.0, max: 1.0, periodic: true },
            ],
            PhysParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidChart(_)), "{err}");
    }

    #[test]
    fn rejects_nonpositive_scale() {
        let err = Chart::custom(
            ["u", "v", "w"],
            [Expr::parse("cos(u)").unwrap(), Expr::Num(1.0), Expr::Num(1.0)],
            1.0,
            [
                Domain { min: 0.0, max: 6.0, periodic: true },
                Domain { min: 0.0, max: 1.0, periodic: true },
            ],
            PhysParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidChart(_)), "{err}");
    }

    #[test]
    fn json_round_trip_and_errors() {
        let text = r#"{"coords":["theta","phi","r"],"h":["r","r*sin(theta)","1"],"a":2,
            "domains":[{"min":0,"max":"pi","periodic":false},{"min":0,"max":"2*pi","periodic":true}],
            "hbar":1,"mass":1}"#;
        let chart = Chart::from_json_str(text).unwrap();
        assert_eq!(chart.kind(), ChartKind::Custom);
        let m = chart.mean_curvature().unwrap();
        assert!((at(&chart, &m, 1.0, 1.0) + 0.5).abs() < 1e-15);
        let again = Chart::from_json_str(&chart.to_json().unwrap()).unwrap();
        assert_eq!(again.q2().unwrap().scale, chart.q2().unwrap().scale);

        let err = Chart::from_json_str("{\"coords\": [").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        let bad_expr = text.replace("r*sin(theta)", "r*sin(");
        assert!(Chart::from_json_str(&bad_expr).is_err());
    }

    #[test]
    fn scaling_radius() {
        let s1 = Chart::sphere(1.0, PhysParams::default()).unwrap();
        let s2 = Chart::sphere(2.0, PhysParams::default()).unwrap();
        let (c1, c2) = (s1.curvature().unwrap(), s2.curvature().unwrap());
        let (u, v) = (0.7, 2.1);
        assert!((at(&s2, &c2.mean, u, v) - 0.5 * at(&s1, &c1.mean, u, v)).abs() < 1e-15);
        assert!((at(&s2, &c2.gaussian, u, v) - 0.25 * at(&s1, &c1.gaussian, u, v)).abs() < 1e-15);
    }
}
