//! The run configuration: one TOML document with a section per command.
//! Every section is optional and unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curvature::{heaviside, Curvature};
use crate::error::Result as CoreResult;
use crate::estimates::default_d_grid;
use crate::geometry::Space;
use crate::lorentz::endpoint_exponent;
use crate::quadrature::QuadratureConfig;
use crate::radial_transform::{PlaneOffset, RadialProfile};

/// A configuration problem, located by field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn at<T>(field: impl std::fmt::Display, r: CoreResult<T>) -> Result<T, ConfigError> {
    r.map_err(|e| ConfigError(format!("{field}: {e}")))
}

fn fail<T>(field: impl std::fmt::Display, msg: impl std::fmt::Display) -> Result<T, ConfigError> {
    Err(ConfigError(format!("{field}: {msg}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSection>,
    pub identities: IdentitiesSection,
    pub transform: TransformSection,
    pub endpoint: EndpointSection,
    pub lemma: LemmaSection,
    pub hypergeo: HypergeoSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 20_240_601,
            quadrature: None,
            identities: IdentitiesSection::default(),
            transform: TransformSection::default(),
            endpoint: EndpointSection::default(),
            lemma: LemmaSection::default(),
            hypergeo: HypergeoSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    #[serde(default = "default_subdivisions")]
    pub max_subdivisions: usize,
}

fn default_subdivisions() -> usize {
    QuadratureConfig::default().max_subdivisions
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentitiesSection {
    /// Random `(t, r)` pairs per curvature.
    pub samples: usize,
    /// `t` and `r` are drawn from `[-t_max, t_max]`.
    pub t_max: f64,
    /// Bound on residuals divided by `max(1, largest term)`.
    pub tol: f64,
    /// Random right triangles per curvature for the Pythagoras cross-check.
    pub triangles: usize,
    pub n: usize,
    pub pythagoras_tol: f64,
}

impl Default for IdentitiesSection {
    fn default() -> Self {
        IdentitiesSection { samples: 10_000, t_max: 4.0, tol: 1e-12, triangles: 10_000, n: 3, pythagoras_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range {
    fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            m => (0..m).map(|i| self.start + (self.stop - self.start) * i as f64 / (m - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransformSection {
    pub curvature: Curvature,
    pub n: usize,
    pub k: usize,
    pub profile: RadialProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_range: Option<Range>,
    /// Pass when `|raw - oracle_raw| <= tol * max(1, |oracle_raw|)` on every row.
    pub tol: f64,
}

impl Default for TransformSection {
    fn default() -> Self {
        TransformSection {
            curvature: Curvature::Flat,
            n: 3,
            k: 2,
            profile: RadialProfile::ball(1.0).expect("unit ball"),
            d: None,
            d_range: None,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EndpointSection {
    pub curvature: Curvature,
    pub n: usize,
    pub k: usize,
    /// Random nonnegative step profiles in the family.
    pub profiles: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<f64>>,
    /// Ball radii for the scale-flatness check (flat space only).
    pub scale_radii: Vec<f64>,
    /// Ball radii for the sub-endpoint probe; empty disables the probe.
    pub probe_radii: Vec<f64>,
    /// The probe exponent as a fraction of the endpoint exponent.
    pub probe_fraction: f64,
    /// Relative slack above the extremal constant.
    pub tol: f64,
}

impl Default for EndpointSection {
    fn default() -> Self {
        EndpointSection {
            curvature: Curvature::Flat,
            n: 3,
            k: 2,
            profiles: 50,
            d: None,
            scale_radii: vec![0.5, 1.0, 2.0, 4.0, 8.0],
            probe_radii: vec![1.0, 0.5, 0.2, 0.1],
            probe_fraction: 0.8,
            tol: crate::estimates::ENDPOINT_SLACK,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaSection {
    pub curvatures: Vec<Curvature>,
    pub p: Vec<f64>,
    /// Values of `η`; cells range over all pairs `(η1, η2)`.
    pub eta: Vec<f64>,
    /// Random unions per cell; twice as many are drawn for the refinement.
    pub cases: usize,
    /// Also sweep the curvature-function form with `γ` over `eta`.
    pub corollary: bool,
    /// Bound on `|max_ratio - 1|` for the `p = 1` cells.
    pub tol: f64,
}

impl Default for LemmaSection {
    fn default() -> Self {
        LemmaSection {
            curvatures: Curvature::ALL.to_vec(),
            p: vec![1.0, 1.5, 2.0, 3.0],
            eta: vec![0.5, 1.0, 2.0],
            cases: 200,
            corollary: true,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppellCase {
    pub curvature: Curvature,
    pub p: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussCase {
    pub curvature: Curvature,
    pub p: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HypergeoSection {
    /// Random points per residual check.
    pub points: usize,
    /// Residual tolerance for the transformations and reductions. The
    /// series comparison allows `10 tol`, the `2 ln 2` check `tol / 10`,
    /// and evaluation routes must agree to `10 tol`.
    pub tol: f64,
    pub appell: Vec<AppellCase>,
    pub gauss: Vec<GaussCase>,
}

impl Default for HypergeoSection {
    fn default() -> Self {
        let mut appell = Vec::new();
        let mut gauss = Vec::new();
        for c in Curvature::ALL {
            let (b_appell, b_gauss) = if c == Curvature::Spherical { (0.8, 0.5) } else { (3.0, 2.0) };
            for p in [1.0, 2.0, 3.0] {
                for (eta1, eta2) in [(1.5, 2.5), (3.0, 1.0)] {
                    appell.push(AppellCase { curvature: c, p, eta1, eta2, a: 0.3, b: b_appell });
                    gauss.push(GaussCase { curvature: c, p, eta1, eta2, b: b_gauss });
                }
            }
        }
        HypergeoSection { points: 200, tol: 1e-9, appell, gauss }
    }
}

/// Reads and parses a configuration file; a missing path gives the defaults.
pub fn load(path: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError(e.to_string().trim_end().to_string()))
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        fail(field, format!("must be finite and > 0, got {v}"))
    }
}

impl RunConfig {
    pub fn quadrature_or(&self, fallback: QuadratureConfig) -> QuadratureConfig {
        match &self.quadrature {
            Some(q) => QuadratureConfig {
                rel_tol: q.rel_tol,
                abs_tol: q.abs_tol,
                max_subdivisions: q.max_subdivisions,
                singular_exponent_left: None,
            },
            None => fallback,
        }
    }

    fn validate_quadrature(&self) -> Result<(), ConfigError> {
        let q = self.quadrature_or(QuadratureConfig::default());
        q.validate().map_err(|e| ConfigError(format!("quadrature: {e}")))
    }

    pub fn validate_identities(&self) -> Result<(), ConfigError> {
        let s = &self.identities;
        positive("identities.t_max", s.t_max)?;
        positive("identities.tol", s.tol)?;
        positive("identities.pythagoras_tol", s.pythagoras_tol)?;
        if s.samples == 0 {
            return fail("identities.samples", "must be >= 1");
        }
        at("identities.n", Space::new(Curvature::Flat, s.n)).map(|_| ())
    }

    /// The offsets of the transform grid.
    pub fn transform_grid(&self) -> Vec<f64> {
        let s = &self.transform;
        match (&s.d, &s.d_range) {
            (Some(d), _) => d.clone(),
            (None, Some(r)) => r.values(),
            (None, None) => {
                let top = if s.curvature == Curvature::Spherical { 1.5 } else { 1.2 * s.profile.support_radius() };
                Range { start: 0.0, stop: top, count: 13 }.values()
            }
        }
    }

    pub fn validate_transform(&self) -> Result<Space, ConfigError> {
        self.validate_quadrature()?;
        let s = &self.transform;
        if s.d.is_some() && s.d_range.is_some() {
            return fail("transform", "give either d or d_range, not both");
        }
        positive("transform.tol", s.tol)?;
        let space = at("transform.n", Space::new(s.curvature, s.n))?;
        at("transform.profile", s.profile.check_for(&space))?;
        let grid = self.transform_grid();
        if grid.is_empty() {
            return fail("transform.d", "offset grid is empty");
        }
        for (i, &d) in grid.iter().enumerate() {
            at(format!("transform.d[{i}]"), PlaneOffset::new(&space, s.k, d))?;
        }
        Ok(space)
    }

    pub fn endpoint_grid(&self) -> Vec<f64> {
        let s = &self.endpoint;
        s.d.clone().unwrap_or_else(|| default_d_grid(s.curvature))
    }

    pub fn validate_endpoint(&self) -> Result<Space, ConfigError> {
        let s = &self.endpoint;
        let space = at("endpoint.n", Space::new(s.curvature, s.n))?;
        at("endpoint.k", PlaneOffset::new(&space, s.k, 0.0))?;
        at("endpoint", endpoint_exponent(&space, s.k))?;
        if s.profiles == 0 {
            return fail("endpoint.profiles", "must be >= 1");
        }
        positive("endpoint.tol", s.tol)?;
        for (i, &d) in self.endpoint_grid().iter().enumerate() {
            at(format!("endpoint.d[{i}]"), PlaneOffset::new(&space, s.k, d))?;
        }
        for (name, radii) in [("endpoint.scale_radii", &s.scale_radii), ("endpoint.probe_radii", &s.probe_radii)] {
            for (i, &r) in radii.iter().enumerate() {
                let field = format!("{name}[{i}]");
                positive(&field, r)?;
                at(&field, RadialProfile::ball(r).and_then(|f| f.check_for(&space)))?;
            }
        }
        if s.probe_radii.len() == 1 {
            return fail("endpoint.probe_radii", "needs at least two radii or none");
        }
        if !(s.probe_fraction > 0.0 && s.probe_fraction < 1.0) {
            return fail("endpoint.probe_fraction", format!("must lie in (0, 1), got {}", s.probe_fraction));
        }
        let p = at("endpoint", endpoint_exponent(&space, s.k))?;
        if !s.probe_radii.is_empty() && s.probe_fraction * p < 1.0 {
            return fail(
                "endpoint.probe_fraction",
                format!("probe exponent {} is below 1 for endpoint exponent {p}", s.probe_fraction * p),
            );
        }
        Ok(space)
    }

    pub fn validate_lemma(&self) -> Result<(), ConfigError> {
        let s = &self.lemma;
        if s.cases == 0 {
            return fail("lemma.cases", "must be >= 1");
        }
        if s.curvatures.is_empty() || s.p.is_empty() || s.eta.is_empty() {
            return fail("lemma", "curvatures, p and eta must be non-empty");
        }
        for (i, &p) in s.p.iter().enumerate() {
            if !(p >= 1.0) || !p.is_finite() {
                return fail(format!("lemma.p[{i}]"), format!("must be finite and >= 1, got {p}"));
            }
        }
        for (i, &e) in s.eta.iter().enumerate() {
            positive(&format!("lemma.eta[{i}]"), e)?;
        }
        positive("lemma.tol", s.tol)
    }

    pub fn validate_hypergeo(&self) -> Result<(), ConfigError> {
        self.validate_quadrature()?;
        let s = &self.hypergeo;
        if s.points == 0 {
            return fail("hypergeo.points", "must be >= 1");
        }
        positive("hypergeo.tol", s.tol)?;
        let common = |field: &str, p: f64, eta1: f64, eta2: f64| -> Result<(), ConfigError> {
            if !(p >= 1.0) || !p.is_finite() {
                return fail(format!("{field}.p"), format!("must be finite and >= 1, got {p}"));
            }
            positive(&format!("{field}.eta1"), eta1)?;
            positive(&format!("{field}.eta2"), eta2)
        };
        let limit = |c: Curvature| 1.0 / (1.0 - heaviside(-c.as_f64()));
        for (i, t) in s.appell.iter().enumerate() {
            let field = format!("hypergeo.appell[{i}]");
            common(&field, t.p, t.eta1, t.eta2)?;
            if !(t.a > 0.0 && t.a < t.b && t.b < limit(t.curvature)) {
                return fail(field, format!("need 0 < a < b < {}, got a = {}, b = {}", limit(t.curvature), t.a, t.b));
            }
        }
        for (i, t) in s.gauss.iter().enumerate() {
            let field = format!("hypergeo.gauss[{i}]");
            common(&field, t.p, t.eta1, t.eta2)?;
            if !(t.b > 0.0 && t.b < limit(t.curvature)) {
                return fail(field, format!("need 0 < b < {}, got b = {}", limit(t.curvature), t.b));
            }
            let h = heaviside(t.curvature.as_f64());
            if !(t.eta1 > h) {
                return fail(format!("{field}.eta1"), format!("the integral over (0, b) needs eta1 > {h}"));
            }
        }
        Ok(())
    }
}
