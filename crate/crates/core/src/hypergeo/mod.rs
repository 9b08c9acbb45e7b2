//! Gauss `2F1` and Appell `F1` from their Euler integrals, a power-series
//! oracle for `2F1`, the two variable transformations, and dual-route checks
//! of the hypergeometric forms of the integral inequality.
//!
//! Parameter roles follow the integral forms:
//!
//! ```text
//! 2F1(α, β; γ; z)        = Γ(γ)/(Γ(β)Γ(γ-β)) ∫_0^1 u^{β-1} (1-u)^{γ-β-1} (1-zu)^{-α} du
//! F1(α; β1, β2; γ; x, y) = Γ(γ)/(Γ(α)Γ(γ-α)) ∫_0^1 u^{α-1} (1-u)^{γ-α-1} (1-ux)^{-β1} (1-uy)^{-β2} du
//! ```
//!
//! Each integral is split at `u = 1/2`. The upper half is taken in
//! `v = 1 - u`, where `1 - zu = (1 - z) + vz` is formed without cancellation.

mod gamma;

pub use gamma::gamma;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{heaviside, Curvature};
use crate::error::{Error, Result};
use crate::estimates::{lemma_exponents, lemma_sides, IntervalUnion, SweepCase};
use crate::quadrature::{integrate, QuadratureConfig};

/// Relative agreement required between evaluation routes of the same side.
pub const ROUTE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub z: f64,
}

impl GaussParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, z: f64) -> Result<Self> {
        let p = GaussParams { alpha, beta, gamma, z };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let GaussParams { alpha, beta, gamma, z } = *self;
        if ![alpha, beta, gamma, z].iter().all(|v| v.is_finite()) {
            return Err(Error::domain(format!("2F1 parameters must be finite, got {self:?}")));
        }
        if !(gamma > beta && beta > 0.0) {
            return Err(Error::domain(format!("2F1 integral needs γ > β > 0, got β = {beta}, γ = {gamma}")));
        }
        if !(z < 1.0) {
            return Err(Error::domain(format!("2F1 integral needs z < 1, got {z}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppellParams {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
    pub x: f64,
    pub y: f64,
}

impl AppellParams {
    pub fn new(alpha: f64, beta1: f64, beta2: f64, gamma: f64, x: f64, y: f64) -> Result<Self> {
        let p = AppellParams { alpha, beta1, beta2, gamma, x, y };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let AppellParams { alpha, beta1, beta2, gamma, x, y } = *self;
        if ![alpha, beta1, beta2, gamma, x, y].iter().all(|v| v.is_finite()) {
            return Err(Error::domain(format!("F1 parameters must be finite, got {self:?}")));
        }
        if !(gamma > alpha && alpha > 0.0) {
            return Err(Error::domain(format!("F1 integral needs γ > α > 0, got α = {alpha}, γ = {gamma}")));
        }
        if !(x < 1.0 && y < 1.0) {
            return Err(Error::domain(format!("F1 integral needs x < 1 and y < 1, got x = {x}, y = {y}")));
        }
        Ok(())
    }
}

/// `Γ(γ) / (Γ(s) Γ(γ - s))`, the reciprocal of `B(s, γ - s)`.
fn beta_normalizer(s: f64, gamma_: f64) -> f64 {
    gamma(gamma_) / (gamma(s) * gamma(gamma_ - s))
}

/// `∫_0^1 u^a (1-u)^b k(u, 1-u) du` for `a, b > -1`. The kernel `k` receives
/// both `u` and `1 - u` so it can pick the accurate one.
fn beta_kernel_integral(a: f64, b: f64, k: impl Fn(f64, f64) -> f64, cfg: &QuadratureConfig) -> Result<f64> {
    let declare = |e: f64| {
        let base = cfg.without_singularity();
        if e == e.floor() && e >= 0.0 {
            base
        } else {
            base.with_left_singularity(e)
        }
    };
    let lower = integrate(|u: f64| u.powf(a) * (1.0 - u).powf(b) * k(u, 1.0 - u), 0.0, 0.5, &declare(a))?;
    let upper = integrate(|v: f64| (1.0 - v).powf(a) * v.powf(b) * k(1.0 - v, v), 0.0, 0.5, &declare(b))?;
    Ok(lower.value + upper.value)
}

/// `1 - zu`, given `u` and `w = 1 - u`.
fn one_minus(z: f64, u: f64, w: f64) -> f64 {
    if u <= 0.5 {
        1.0 - z * u
    } else {
        (1.0 - z) + w * z
    }
}

/// Gauss' hypergeometric function by its Euler integral.
pub fn gauss_2f1(p: &GaussParams, cfg: &QuadratureConfig) -> Result<f64> {
    p.validate()?;
    if p.z == 0.0 || p.alpha == 0.0 {
        return Ok(1.0);
    }
    let GaussParams { alpha, beta, gamma: g, z } = *p;
    let integral = beta_kernel_integral(beta - 1.0, g - beta - 1.0, |u, w| one_minus(z, u, w).powf(-alpha), cfg)?;
    Ok(beta_normalizer(beta, g) * integral)
}

/// Appell's `F1` by its Euler integral.
pub fn appell_f1(p: &AppellParams, cfg: &QuadratureConfig) -> Result<f64> {
    p.validate()?;
    let AppellParams { alpha, beta1, beta2, gamma: g, x, y } = *p;
    if (x == 0.0 || beta1 == 0.0) && (y == 0.0 || beta2 == 0.0) {
        return Ok(1.0);
    }
    let kernel = |u: f64, w: f64| one_minus(x, u, w).powf(-beta1) * one_minus(y, u, w).powf(-beta2);
    let integral = beta_kernel_integral(alpha - 1.0, g - alpha - 1.0, kernel, cfg)?;
    Ok(beta_normalizer(alpha, g) * integral)
}

/// A truncated series with a bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// `Σ (α)_m (β)_m / ((γ)_m m!) z^m` for `|z| < 1`, summed until the tail
/// bound drops below `1e-16 |sum|` or `max_terms` terms have been added.
///
/// Past `m0 = 2(|α| + |β| + |γ|) + 2` the term ratio is at most
/// `q = |z| max(1, (m+|α|)(m+|β|)/((m-|γ|)(m+1)))`, and the tail after term
/// `t_m` is bounded by `|t_m| q / (1 - q)` whenever `q < 1`.
pub fn gauss_series_oracle(p: &GaussParams, max_terms: usize) -> Result<SeriesValue> {
    let GaussParams { alpha, beta, gamma: g, z } = *p;
    if !(z.abs() < 1.0) {
        return Err(Error::domain(format!("2F1 series diverges for |z| >= 1, got z = {z}")));
    }
    if g <= 0.0 && g == g.floor() {
        return Err(Error::domain(format!("2F1 series undefined for γ = {g}")));
    }
    let (aa, ab, ag) = (alpha.abs(), beta.abs(), g.abs());
    let m0 = 2.0 * (aa + ab + ag) + 2.0;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut tail_bound = f64::INFINITY;
    let mut terms = 1;
    while terms < max_terms {
        let m = (terms - 1) as f64;
        term *= (alpha + m) * (beta + m) / ((g + m) * (m + 1.0)) * z;
        sum += term;
        terms += 1;
        if term == 0.0 {
            tail_bound = 0.0;
            break;
        }
        let next = m + 1.0;
        if next > m0 {
            let growth = (next + aa) * (next + ab) / ((next - ag) * (next + 1.0));
            let q = z.abs() * growth.max(1.0);
            if q < 1.0 {
                tail_bound = term.abs() * q / (1.0 - q);
                if tail_bound <= 1e-16 * sum.abs() {
                    break;
                }
            }
        }
    }
    Ok(SeriesValue { value: sum, tail_bound, terms })
}

/// `|2F1(α,β;γ;z) - (1-z)^{-α} 2F1(α, γ-β; γ; z/(z-1))|`.
pub fn check_pfaff_2f1(p: &GaussParams, cfg: &QuadratureConfig) -> Result<f64> {
    p.validate()?;
    let direct = gauss_2f1(p, cfg)?;
    let w = p.z / (p.z - 1.0);
    let moved = GaussParams::new(p.alpha, p.gamma - p.beta, p.gamma, w)?;
    let transformed = (1.0 - p.z).powf(-p.alpha) * gauss_2f1(&moved, cfg)?;
    Ok((direct - transformed).abs())
}

/// `|F1(α;β1,β2;γ;x,y) - (1-x)^{-α} F1(α; γ-β1-β2, β2; γ; x/(x-1), (y-x)/(1-x))|`.
pub fn check_f1_transform(p: &AppellParams, cfg: &QuadratureConfig) -> Result<f64> {
    p.validate()?;
    let direct = appell_f1(p, cfg)?;
    let moved = AppellParams::new(
        p.alpha,
        p.gamma - p.beta1 - p.beta2,
        p.beta2,
        p.gamma,
        p.x / (p.x - 1.0),
        (p.y - p.x) / (1.0 - p.x),
    )?;
    let transformed = (1.0 - p.x).powf(-p.alpha) * appell_f1(&moved, cfg)?;
    Ok((direct - transformed).abs())
}

/// One way of evaluating both sides of an inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteCheck {
    pub route: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Largest relative deviation of either side from the quadrature route.
    pub discrepancy: f64,
    pub agrees: bool,
}

/// A displayed hypergeometric form, evaluated as written. Its two sides are
/// the quadrature sides divided by a common positive factor when the display
/// is consistent, so only the ratio is comparable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrintedFormCheck {
    pub form: String,
    pub ratio: Option<f64>,
    /// `|ratio / primitive_ratio - 1|`, absent when the form cannot be evaluated.
    pub discrepancy: Option<f64>,
    pub consistent: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    /// Quadrature sides of the integral inequality.
    pub case: SweepCase,
    pub routes: Vec<RouteCheck>,
    pub printed: Vec<PrintedFormCheck>,
}

impl TheoremCheck {
    pub fn routes_agree(&self) -> bool {
        self.routes.iter().all(|r| r.agrees)
    }

    /// Displayed forms that disagree with the quadrature ratio.
    pub fn warnings(&self) -> impl Iterator<Item = &PrintedFormCheck> {
        self.printed.iter().filter(|f| !f.consistent)
    }
}

fn rel_dev(x: f64, reference: f64) -> f64 {
    if x == reference {
        0.0
    } else {
        ((x - reference) / reference).abs()
    }
}

fn route(name: &str, lhs: f64, rhs: f64, primitive: &SweepCase) -> RouteCheck {
    let discrepancy = rel_dev(lhs, primitive.lhs).max(rel_dev(rhs, primitive.rhs));
    RouteCheck { route: name.into(), lhs, rhs, discrepancy, agrees: discrepancy <= ROUTE_TOL }
}

fn printed(form: &str, note: &str, sides: Result<(f64, f64)>, primitive: &SweepCase) -> PrintedFormCheck {
    let (ratio, discrepancy) = match (sides, primitive.ratio) {
        (Ok((l, r)), Some(prim)) => {
            let ratio = l / r;
            (Some(ratio), Some(rel_dev(ratio, prim)))
        }
        (Ok((l, r)), None) => (Some(l / r), None),
        (Err(_), _) => (None, None),
    };
    let consistent = matches!(discrepancy, Some(d) if d <= ROUTE_TOL);
    let note = match (&ratio, consistent) {
        (None, _) => format!("{note}; outside the integral-representation domain"),
        (Some(_), true) => note.to_string(),
        (Some(_), false) => format!("{note}; disagrees with the quadrature ratio"),
    };
    PrintedFormCheck { form: form.into(), ratio, discrepancy, consistent, note }
}

fn check_theorem_params(p: f64, eta1: f64, eta2: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::domain(format!("p must be finite and >= 1, got {p}")));
    }
    if !(eta1 > 0.0 && eta2 > 0.0) || !eta1.is_finite() || !eta2.is_finite() {
        return Err(Error::domain(format!("η1, η2 must be finite and > 0, got {eta1}, {eta2}")));
    }
    Ok(())
}

fn upper_limit(c: Curvature) -> f64 {
    1.0 / (1.0 - heaviside(-c.as_f64()))
}

fn primitive_case(c: Curvature, p: f64, eta1: f64, eta2: f64, a: f64, b: f64) -> Result<SweepCase> {
    let (lhs, rhs) = lemma_sides(c, p, eta1, eta2, &IntervalUnion::single(a, b)?)?;
    let ratio = if rhs > 0.0 { Some(lhs / rhs) } else { None };
    let label = format!("c={} p={p} eta1={eta1} eta2={eta2} a={a} b={b}", c.value());
    Ok(SweepCase { index: 0, label, lhs, rhs, ratio })
}

/// The interval inequality on `(a, b)`, `0 < a < b`, evaluated by quadrature,
/// by Appell's function directly, and after the variable transformation; the
/// displayed special forms are reported alongside.
///
/// With `e1, e2` the lemma exponents, `t = a + (b-a)u` gives
/// `∫_a^b = (b-a) a^{e1} (1-ca)^{e2} F1(1; -e1, -e2; 2; 1-b/a, c(b-a)/(1-ca))`.
pub fn verify_appell_inequality(
    c: Curvature,
    p: f64,
    eta1: f64,
    eta2: f64,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<TheoremCheck> {
    check_theorem_params(p, eta1, eta2)?;
    if !(a > 0.0 && a < b && b < upper_limit(c)) {
        return Err(Error::domain(format!("need 0 < a < b < {}, got a = {a}, b = {b}", upper_limit(c))));
    }
    let case = primitive_case(c, p, eta1, eta2, a, b)?;
    let cf = c.as_f64();
    let h = heaviside(cf);
    let side = |e1: f64, e2: f64| -> Result<(f64, f64)> {
        let scale = (b - a) * a.powf(e1) * (1.0 - cf * a).powf(e2);
        let x = 1.0 - b / a;
        let y = cf * (b - a) / (1.0 - cf * a);
        let direct = scale * appell_f1(&AppellParams::new(1.0, -e1, -e2, 2.0, x, y)?, cfg)?;
        let xt = 1.0 - a / b;
        let yt = (b - a) / ((1.0 - cf * a) * b);
        let moved = AppellParams::new(1.0, 2.0 + e1 + e2, -e2, 2.0, xt, yt)?;
        let transformed = scale * (a / b) * appell_f1(&moved, cfg)?;
        Ok((direct, transformed))
    };
    let (e1, e2) = lemma_exponents(c, eta1, eta2);
    let (l_direct, l_moved) = side(e1, e2)?;
    let (r_direct, r_moved) = if p == 1.0 {
        (l_direct, l_moved)
    } else {
        let (ep1, ep2) = lemma_exponents(c, p * eta1, p * eta2);
        let (d, m) = side(ep1, ep2)?;
        (d.powf(1.0 / p), m.powf(1.0 / p))
    };
    let routes = vec![
        route("appell_direct", l_direct, r_direct, &case),
        route("appell_transformed", l_moved, r_moved, &case),
    ];

    let q = 1.0 - 1.0 / p;
    let xt = 1.0 - a / b;
    let yt = (b - a) / ((1.0 - cf * a) * b);
    let f1 = |b1: f64, b2: f64, x: f64, y: f64| appell_f1(&AppellParams::new(1.0, b1, b2, 2.0, x, y)?, cfg);
    let s = 0.5 * (eta1 + eta2);
    let mut forms = vec![printed(
        "appell_unified",
        "second argument list of the right side reconstructed as (1-H+p(η1+η2)/2, (H+1-pη2)/2)",
        (|| {
            let l = (1.0 - cf * a).powf(-(h + 1.0) * q / 2.0)
                * a.powf((1.0 - h) * q / 2.0)
                * xt.powf(q)
                * f1(1.0 + s - h, (h + 1.0 - eta2) / 2.0, xt, yt)?;
            let r = f1(1.0 - h + p * s, (h + 1.0 - p * eta2) / 2.0, xt, yt)?.powf(1.0 / p);
            Ok((l, r))
        })(),
        &case,
    )];
    match c {
        Curvature::Hyperbolic => forms.push(printed(
            "appell_hyperbolic",
            "evaluated as displayed",
            (|| {
                let l = (a / (1.0 + a)).powf(q / 2.0) * xt.powf(q) * f1(1.0 + s, 1.0 - eta2 / 2.0, xt, yt)?;
                let r = f1(1.0 - p * s, (1.0 - p * eta2) / 2.0, xt, yt)?.powf(1.0 / p);
                Ok((l, r))
            })(),
            &case,
        )),
        Curvature::Flat => {
            forms.push(printed(
                "appell_flat",
                "evaluated as displayed",
                (|| {
                    let l = xt.powf(q) * f1(s, 1.0 - eta2 / 2.0, xt, xt)?;
                    let r = f1(p * s, 1.0 - p * eta2 / 2.0, xt, xt)?.powf(1.0 / p);
                    Ok((l, r))
                })(),
                &case,
            ));
            forms.push(printed(
                "gauss_flat",
                "evaluated as displayed, including the a^{-1/p'} factor",
                (|| {
                    let f = |al: f64| gauss_2f1(&GaussParams::new(al, 1.0, 2.0, xt)?, cfg);
                    let l = a.powf(-q) * xt.powf(q) * f(1.0 + eta1 / 2.0)?;
                    let r = f(1.0 + p * eta1 / 2.0)?.powf(1.0 / p);
                    Ok((l, r))
                })(),
                &case,
            ));
        }
        Curvature::Spherical => forms.push(printed(
            "appell_spherical",
            "missing fourth parameter of the left side taken as 2",
            (|| {
                let l = (1.0 - a).powf(-q) * xt.powf(q) * f1(s, 1.0 - eta2 / 2.0, xt, yt)?;
                let r = f1(p * s, 1.0 - p * eta2 / 2.0, xt, yt)?.powf(1.0 / p);
                Ok((l, r))
            })(),
            &case,
        )),
    }
    Ok(TheoremCheck { case, routes, printed: forms })
}

/// The inequality on `(0, b)`, evaluated by quadrature and through `2F1`:
/// `∫_0^b t^{e1} (1-ct)^{e2} dt = b^{e1+1}/(e1+1) 2F1(-e2, e1+1; e1+2; cb)`,
/// directly and after the Pfaff transformation.
pub fn verify_gauss_inequality(
    c: Curvature,
    p: f64,
    eta1: f64,
    eta2: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<TheoremCheck> {
    check_theorem_params(p, eta1, eta2)?;
    if !(b > 0.0 && b < upper_limit(c)) {
        return Err(Error::domain(format!("need 0 < b < {}, got b = {b}", upper_limit(c))));
    }
    let h = heaviside(c.as_f64());
    if !(eta1 > h) {
        return Err(Error::domain(format!("the integral over (0, b) diverges unless η1 > {h}, got {eta1}")));
    }
    let case = primitive_case(c, p, eta1, eta2, 0.0, b)?;
    let z = c.as_f64() * b;
    let side = |e1: f64, e2: f64| -> Result<(f64, f64)> {
        let scale = b.powf(e1 + 1.0) / (e1 + 1.0);
        let direct = scale * gauss_2f1(&GaussParams::new(-e2, e1 + 1.0, e1 + 2.0, z)?, cfg)?;
        let w = z / (z - 1.0);
        let moved = (1.0 - z).powf(e2) * gauss_2f1(&GaussParams::new(-e2, 1.0, e1 + 2.0, w)?, cfg)?;
        Ok((direct, scale * moved))
    };
    let (e1, e2) = lemma_exponents(c, eta1, eta2);
    let (l_direct, l_moved) = side(e1, e2)?;
    let (r_direct, r_moved) = if p == 1.0 {
        (l_direct, l_moved)
    } else {
        let (ep1, ep2) = lemma_exponents(c, p * eta1, p * eta2);
        let (d, m) = side(ep1, ep2)?;
        (d.powf(1.0 / p), m.powf(1.0 / p))
    };
    let routes =
        vec![route("gauss_direct", l_direct, r_direct, &case), route("gauss_pfaff", l_moved, r_moved, &case)];

    let q = 1.0 - 1.0 / p;
    let f = |al: f64, be: f64, ga: f64, z: f64| gauss_2f1(&GaussParams::new(al, be, ga, z)?, cfg);
    let mut forms = vec![printed(
        "gauss_unified",
        "evaluated as displayed, with coefficients (η1-H-1)/2 and ((pη1-H+1)/2)^{1/p}",
        (|| {
            let l = b.powf((1.0 - h) * q / 2.0)
                * ((eta1 - h - 1.0) / 2.0)
                * f((1.0 + h - eta2) / 2.0, (eta1 - h + 1.0) / 2.0, (eta1 - h + 3.0) / 2.0, z)?;
            let r = ((p * eta1 - h + 1.0) / 2.0).powf(1.0 / p)
                * f((1.0 + h - p * eta2) / 2.0, (p * eta1 - h + 1.0) / 2.0, (p * eta1 - h + 3.0) / 2.0, z)?
                    .powf(1.0 / p);
            Ok((l, r))
        })(),
        &case,
    )];
    match c {
        Curvature::Hyperbolic => {
            forms.push(printed(
                "gauss_hyperbolic",
                "evaluated as displayed, with second parameter (η1-1)/2 on the left",
                (|| {
                    let l = b.powf(q / 2.0)
                        * ((eta2 - 1.0) / 2.0)
                        * f((1.0 - eta2) / 2.0, (eta1 - 1.0) / 2.0, (eta1 + 3.0) / 2.0, -b)?;
                    let r = ((p * eta1 + 1.0) / 2.0).powf(1.0 / p)
                        * f((1.0 - p * eta2) / 2.0, (p * eta1 + 1.0) / 2.0, (p * eta1 + 3.0) / 2.0, -b)?
                            .powf(1.0 / p);
                    Ok((l, r))
                })(),
                &case,
            ));
            let w = b / (1.0 + b);
            forms.push(printed(
                "gauss_hyperbolic_pfaff",
                "evaluated as displayed, argument b/(1+b)",
                (|| {
                    let l = w.powf(q / 2.0) * ((eta2 - 1.0) / 2.0) * f((1.0 - eta2) / 2.0, 1.0, (eta1 + 3.0) / 2.0, w)?;
                    let r = ((p * eta1 + 1.0) / 2.0).powf(1.0 / p)
                        * f(1.0 - p * eta2 / 2.0, 1.0, (p * eta1 + 3.0) / 2.0, w)?.powf(1.0 / p);
                    Ok((l, r))
                })(),
                &case,
            ));
        }
        Curvature::Spherical => forms.push(printed(
            "gauss_spherical",
            "evaluated as displayed",
            (|| {
                let l = (eta1 / 2.0 - 1.0) * f(1.0 - eta2 / 2.0, eta1 / 2.0, 1.0 + eta1 / 2.0, b)?;
                let r = (p * eta1 / 2.0).powf(1.0 / p)
                    * f(1.0 - p * eta2 / 2.0, p * eta1 / 2.0, 1.0 + p * eta1 / 2.0, b)?.powf(1.0 / p);
                Ok((l, r))
            })(),
            &case,
        )),
        Curvature::Flat => {}
    }
    Ok(TheoremCheck { case, routes, printed: forms })
}

/// Tolerances of the residual suite.
pub const SERIES_TOL: f64 = 1e-8;
pub const REDUCTION_TOL: f64 = 1e-9;
pub const TRANSFORM_TOL: f64 = 1e-9;
pub const LOG2_TOL: f64 = 1e-10;

/// Maxima of the residual suite over random in-domain parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub points: usize,
    /// `max |integral - series| / (1 + |series|)` with `|z| <= 0.8`.
    pub series_max_error: f64,
    /// Largest series tail bound used by the oracle.
    pub series_max_tail: f64,
    /// `F1` with `y = 0` and with `x = y` against the matching `2F1`.
    pub reduction_max_error: f64,
    pub pfaff_max_residual: f64,
    pub f1_transform_max_residual: f64,
    /// `|2F1(1,1;2;1/2) - 2 ln 2|`.
    pub log2_error: f64,
    pub passed: bool,
}

/// Quadrature settings of the residual suite.
pub fn suite_quadrature() -> QuadratureConfig {
    QuadratureConfig::with_tolerances(1e-13, 1e-15)
}

/// Runs the residual suite on `n` random points per check, drawn from a
/// ChaCha8 stream seeded with `seed`.
pub fn residual_suite(n: usize, seed: u64, cfg: &QuadratureConfig) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = |rng: &mut ChaCha8Rng, zmax: f64| {
        let beta = rng.gen_range(0.1..4.0);
        GaussParams {
            alpha: rng.gen_range(-3.0..3.0),
            beta,
            gamma: beta + rng.gen_range(0.1..4.0),
            z: rng.gen_range(-zmax..zmax),
        }
    };
    let mut series_max_error: f64 = 0.0;
    let mut series_max_tail: f64 = 0.0;
    let mut reduction_max_error: f64 = 0.0;
    let mut pfaff_max_residual: f64 = 0.0;
    let mut f1_transform_max_residual: f64 = 0.0;
    for _ in 0..n {
        let g = gauss(&mut rng, 0.8);
        let s = gauss_series_oracle(&g, 100_000)?;
        let v = gauss_2f1(&g, cfg)?;
        series_max_error = series_max_error.max((v - s.value).abs() / (1.0 + s.value.abs()));
        series_max_tail = series_max_tail.max(s.tail_bound);

        let g = gauss(&mut rng, 0.9);
        pfaff_max_residual = pfaff_max_residual.max(check_pfaff_2f1(&g, cfg)?);

        let alpha = rng.gen_range(0.2..3.0);
        let ap = AppellParams {
            alpha,
            beta1: rng.gen_range(-1.5..1.5),
            beta2: rng.gen_range(-1.5..1.5),
            gamma: alpha + rng.gen_range(0.2..3.0),
            x: rng.gen_range(-0.5..0.5),
            y: rng.gen_range(-0.5..0.5),
        };
        f1_transform_max_residual = f1_transform_max_residual.max(check_f1_transform(&ap, cfg)?);

        let y0 = AppellParams { y: 0.0, ..ap };
        let flat = gauss_2f1(&GaussParams::new(ap.beta1, ap.alpha, ap.gamma, ap.x)?, cfg)?;
        reduction_max_error = reduction_max_error.max((appell_f1(&y0, cfg)? - flat).abs());
        let diag = AppellParams { y: ap.x, ..ap };
        let merged = gauss_2f1(&GaussParams::new(ap.beta1 + ap.beta2, ap.alpha, ap.gamma, ap.x)?, cfg)?;
        reduction_max_error = reduction_max_error.max((appell_f1(&diag, cfg)? - merged).abs());
    }
    let log2 = gauss_2f1(&GaussParams::new(1.0, 1.0, 2.0, 0.5)?, cfg)?;
    let log2_error = (log2 - 2.0 * std::f64::consts::LN_2).abs();
    let passed = series_max_error <= SERIES_TOL
        && reduction_max_error <= REDUCTION_TOL
        && pfaff_max_residual <= TRANSFORM_TOL
        && f1_transform_max_residual <= TRANSFORM_TOL
        && log2_error <= LOG2_TOL;
    Ok(SuiteReport {
        points: n,
        series_max_error,
        series_max_tail,
        reduction_max_error,
        pfaff_max_residual,
        f1_transform_max_residual,
        log2_error,
        passed,
    })
}
