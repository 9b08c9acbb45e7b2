//! Totally-geodesic k-plane transform of radial step functions.
//!
//! For a plane `ξ` of dimension `k` at distance `d` from the origin, the
//! transform of a radial `f` has the closed form
//!
//! ```text
//! s_c'(d) R_k f(ξ) = K ∫_d^U f(t) B(t)^{k/2-1} s_c^{k-1}(t) dt,
//! B(t) = 1 - ((ln s_c)'(t) / (ln s_c)'(d))^2
//! ```
//!
//! with `K = |S^{k-1}|` and `U` the support radius on the two unbounded
//! spaces. The bracket is evaluated as
//! `B(t) = s_c(t-d) s_c(t+d) / (s_c'(d)^2 s_c(t)^2)`, which is free of
//! cancellation near `t = d` and equals 1 at `d = 0` without a special case.
//!
//! On the sphere `ξ` is a great k-sphere, invariant under the antipodal map,
//! so only the even part `(f(t) + f(π - t)) / 2` contributes. The closed form
//! there uses `K = 2|S^{k-1}|` and `U = π/2`.
//!
//! Behaviour of the kernel at `t = d` by plane dimension:
//!
//! | k    | factor near `t = d` | quadrature                   |
//! |------|---------------------|------------------------------|
//! | 1    | `(t - d)^{-1/2}`    | left singularity `λ = -1/2`  |
//! | 2    | 1                   | plain                        |
//! | >= 3 | `(t - d)^{k/2 - 1}` | plain (vanishes at `d`)      |

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{s_c, s_c_prime, Curvature};
use crate::error::{Error, Result};
use crate::geometry::{embedded_distance, foot_and_tangent, geodesic_point, hypotenuse, Space};
use crate::quadrature::{integrate, QuadratureConfig};

/// A radial step function: value `values[i]` on the annulus
/// `(breakpoints[i], breakpoints[i+1]]` of geodesic radii, zero beyond the
/// last breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileSpec")]
pub struct RadialProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileSpec {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<ProfileSpec> for RadialProfile {
    type Error = Error;
    fn try_from(s: ProfileSpec) -> Result<Self> {
        RadialProfile::new(s.breakpoints, s.values)
    }
}

impl RadialProfile {
    /// `breakpoints` must start at 0, increase strictly and have one more
    /// entry than `values`.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySupport("profile has no annuli".into()));
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::domain(format!(
                "profile needs {} breakpoints for {} values, got {}",
                values.len() + 1,
                values.len(),
                breakpoints.len()
            )));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::domain(format!("first breakpoint must be 0, got {}", breakpoints[0])));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("profile breakpoints and values must be finite"));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::domain(format!(
                "breakpoints must increase strictly, got {} then {}",
                w[0], w[1]
            )));
        }
        Ok(RadialProfile { breakpoints, values })
    }

    /// Indicator of the geodesic ball of radius `r`.
    pub fn ball(r: f64) -> Result<Self> {
        Self::new(vec![0.0, r], vec![1.0])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The outer radius `ρ_m` of the support.
    pub fn support_radius(&self) -> f64 {
        *self.breakpoints.last().expect("non-empty")
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// Checks the profile against the radius range of `space`.
    pub fn check_for(&self, space: &Space) -> Result<()> {
        let max = space.max_radius();
        if self.support_radius() > max {
            return Err(Error::domain(format!(
                "profile radius {} exceeds the largest radius {max} of the space",
                self.support_radius()
            )));
        }
        Ok(())
    }

    /// `f` at geodesic radius `r`.
    pub fn value_at(&self, r: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b < r);
        match i {
            0 => self.values[0],
            i if i > self.values.len() => 0.0,
            i => self.values[i - 1],
        }
    }

    pub fn scaled(&self, alpha: f64) -> RadialProfile {
        RadialProfile {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    /// `alpha f + beta g` on the merged breakpoints.
    pub fn linear_combination(alpha: f64, f: &RadialProfile, beta: f64, g: &RadialProfile) -> RadialProfile {
        let mut bps: Vec<f64> = f.breakpoints.iter().chain(&g.breakpoints).copied().collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let values = bps
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                alpha * f.value_at(mid) + beta * g.value_at(mid)
            })
            .collect();
        RadialProfile { breakpoints: bps, values }
    }

    /// A random profile with 1 to `max_pieces` annuli. Radii lie in
    /// `[0.05, 3]` on the unbounded spaces and in `(0, π]` on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, c: Curvature, max_pieces: usize, nonnegative: bool) -> RadialProfile {
        let m = rng.gen_range(1..=max_pieces.max(1));
        let (lo, hi) = match c {
            Curvature::Spherical => (0.02, PI),
            _ => (0.05, 3.0),
        };
        let mut radii: Vec<f64> = (0..m).map(|_| rng.gen_range(lo..hi)).collect();
        if c == Curvature::Spherical && rng.gen_bool(0.3) {
            radii[0] = PI;
        }
        radii.sort_by(f64::total_cmp);
        let mut bps = vec![0.0];
        for r in radii {
            if r - bps.last().unwrap() > 1e-3 {
                bps.push(r);
            }
        }
        let values = (1..bps.len())
            .map(|_| if nonnegative { rng.gen_range(0.0..2.0) } else { rng.gen_range(-2.0..2.0) })
            .collect();
        RadialProfile { breakpoints: bps, values }
    }
}

/// A k-dimensional totally-geodesic submanifold, up to rotation about `o`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneOffset {
    pub k: usize,
    pub d: f64,
}

impl PlaneOffset {
    pub fn new(space: &Space, k: usize, d: f64) -> Result<Self> {
        let p = PlaneOffset { k, d };
        p.check_for(space)?;
        Ok(p)
    }

    pub fn check_for(&self, space: &Space) -> Result<()> {
        let n = space.dim();
        if self.k < 1 || self.k >= n {
            return Err(Error::domain(format!("plane dimension k must satisfy 1 <= k <= {}, got {}", n - 1, self.k)));
        }
        if !(self.d >= 0.0) || !self.d.is_finite() {
            return Err(Error::domain(format!("plane offset d must be finite and >= 0, got {}", self.d)));
        }
        if space.curvature() == Curvature::Spherical && self.d >= PI / 2.0 {
            return Err(Error::domain(format!("spherical plane offset must be < π/2, got {}", self.d)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformValue {
    /// `R_k f(ξ)`.
    pub raw: f64,
    /// `s_c'(d) R_k f(ξ)`.
    pub weighted: f64,
}

impl TransformValue {
    fn from_raw(c: Curvature, d: f64, raw: f64) -> Self {
        TransformValue { raw, weighted: s_c_prime(c, d) * raw }
    }
}

/// `|S^{k-1}| = 2 π^{k/2} / Γ(k/2)`, by the recurrence `|S^{m+1}| = 2π |S^{m-1}| / m`.
pub fn surface_area_sphere(k: usize) -> f64 {
    assert!(k >= 1, "sphere dimension k - 1 needs k >= 1");
    let mut area = if k % 2 == 1 { 2.0 } else { 2.0 * PI };
    let mut m = if k % 2 == 1 { 1 } else { 2 };
    while m < k {
        area *= 2.0 * PI / m as f64;
        m += 2;
    }
    area
}

/// Volume `ω_k = |S^{k-1}| / k` of the unit k-ball.
pub fn unit_ball_volume(k: usize) -> f64 {
    surface_area_sphere(k) / k as f64
}

/// The constant `K` of the closed form.
pub fn transform_constant(c: Curvature, k: usize) -> f64 {
    match c {
        Curvature::Spherical => 2.0 * surface_area_sphere(k),
        _ => surface_area_sphere(k),
    }
}

/// Upper limit of the closed-form integral: the support radius, or `π/2`
/// on the sphere.
pub fn closed_form_upper_limit(c: Curvature, f: &RadialProfile) -> f64 {
    match c {
        Curvature::Spherical => PI / 2.0,
        _ => f.support_radius(),
    }
}

/// The bracket `B(t)` at `t = d + u`.
#[inline]
pub fn bracket(c: Curvature, d: f64, u: f64) -> f64 {
    let t = d + u;
    let (sd, st) = (s_c_prime(c, d), s_c(c, t));
    s_c(c, u) * s_c(c, t + d) / (sd * sd * st * st)
}

/// The closed-form kernel `B(t)^{k/2-1} s_c^{k-1}(t)` at `t = d + u`, `u > 0`.
#[inline]
pub fn transform_kernel(c: Curvature, k: usize, d: f64, u: f64) -> f64 {
    let t = d + u;
    let st = s_c(c, t);
    match k {
        1 => bracket(c, d, u).sqrt().recip(),
        2 => st,
        _ => bracket(c, d, u).powf(0.5 * k as f64 - 1.0) * st.powi(k as i32 - 1),
    }
}

/// Left-singularity exponent of [`transform_kernel`] at `u = 0`.
pub fn kernel_singularity(k: usize) -> Option<f64> {
    (k == 1).then_some(-0.5)
}

/// Value of the profile that the closed form integrates at radius `t`:
/// `f` itself, or its even part on the sphere.
fn closed_form_value(c: Curvature, f: &RadialProfile, t: f64) -> f64 {
    match c {
        Curvature::Spherical => 0.5 * (f.value_at(t) + f.value_at(PI - t)),
        _ => f.value_at(t),
    }
}

/// Sorted cut points in `(lo, hi)` at which the closed-form integrand jumps.
fn closed_form_cuts(c: Curvature, f: &RadialProfile, lo: f64, hi: f64) -> Vec<f64> {
    let mut cuts: Vec<f64> = f.breakpoints[1..].to_vec();
    if c == Curvature::Spherical {
        cuts.extend(f.breakpoints[1..].iter().map(|b| PI - b));
    }
    cuts.retain(|&b| b > lo && b < hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

fn validate(space: &Space, plane: &PlaneOffset, f: &RadialProfile) -> Result<()> {
    plane.check_for(space)?;
    f.check_for(space)
}

/// The transform via the closed-form radial integral.
pub fn kplane_transform(
    space: &Space,
    plane: &PlaneOffset,
    f: &RadialProfile,
    cfg: &QuadratureConfig,
) -> Result<TransformValue> {
    validate(space, plane, f)?;
    let c = space.curvature();
    let (k, d) = (plane.k, plane.d);
    let upper = closed_form_upper_limit(c, f);
    if d >= upper {
        return Ok(TransformValue::from_raw(c, d, 0.0));
    }

    let mut edges = vec![d];
    edges.extend(closed_form_cuts(c, f, d, upper));
    edges.push(upper);

    let base = cfg.without_singularity();
    let mut weighted = 0.0;
    for (i, w) in edges.windows(2).enumerate() {
        let value = closed_form_value(c, f, 0.5 * (w[0] + w[1]));
        // reflected cuts can land within an ulp of a breakpoint and vanish after the shift by d
        if value == 0.0 || w[1] - d <= w[0] - d {
            continue;
        }
        // integrate in the offset u = t - d so that s_c(t - d) is exact
        let piece_cfg = match (i, kernel_singularity(k)) {
            (0, Some(l)) => base.with_left_singularity(l),
            _ => base,
        };
        let r = integrate(|u| transform_kernel(c, k, d, u), w[0] - d, w[1] - d, &piece_cfg)?;
        weighted += value * r.value;
    }
    weighted *= transform_constant(c, k);
    Ok(TransformValue { raw: weighted / s_c_prime(c, d), weighted })
}

/// Smallest `x` in `[lo, hi]` with `g(x) >= target`, for `g` non-decreasing.
fn bisect(g: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// The transform by polar coordinates on `ξ` about the foot point:
/// `|S^{k-1}| ∫ f(h(r)) s_c^{k-1}(r) dr` with `h(r)` the hypotenuse of the
/// right triangle with legs `d` and `r`. Radii range over `(0, π)` on the
/// sphere; elsewhere up to where `h` leaves the support.
pub fn kplane_transform_oracle(
    space: &Space,
    plane: &PlaneOffset,
    f: &RadialProfile,
    cfg: &QuadratureConfig,
) -> Result<TransformValue> {
    validate(space, plane, f)?;
    let c = space.curvature();
    let (k, d) = (plane.k, plane.d);
    let h = |r: f64| hypotenuse(c, d, r).expect("legs in range");

    let r_max = match c {
        Curvature::Spherical => PI,
        _ => {
            let rho = f.support_radius();
            if d >= rho {
                return Ok(TransformValue::from_raw(c, d, 0.0));
            }
            // h(r) >= r on these spaces, so r <= ρ_m bounds the support
            bisect(h, rho, 0.0, rho)
        }
    };
    let h_max = h(r_max);
    let mut cuts: Vec<f64> = f.breakpoints[1..]
        .iter()
        .filter(|&&b| b > d && b < h_max)
        .map(|&b| bisect(h, b, 0.0, r_max))
        .collect();
    cuts.sort_by(f64::total_cmp);
    let mut edges = vec![0.0];
    edges.extend(cuts.into_iter().filter(|&r| r > 0.0 && r < r_max));
    edges.push(r_max);

    let base = cfg.without_singularity();
    let mut raw = 0.0;
    for w in edges.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let value = f.value_at(h(0.5 * (w[0] + w[1])));
        if value == 0.0 {
            continue;
        }
        let r = integrate(|r| s_c(c, r).powi(k as i32 - 1), w[0], w[1], &base)?;
        raw += value * r.value;
    }
    raw *= surface_area_sphere(k);
    Ok(TransformValue::from_raw(c, d, raw))
}

/// The X-ray transform (`k = 1`) by integrating `f` along an explicit
/// geodesic in ambient coordinates, with radii measured only through
/// [`embedded_distance`]. The seed picks the direction of the foot point and
/// of the geodesic; the result does not depend on it.
pub fn xray_embedded_oracle(
    space: &Space,
    d: f64,
    f: &RadialProfile,
    direction_seed: u64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    validate(space, &PlaneOffset { k: 1, d }, f)?;
    let c = space.curvature();
    let origin = space.origin();
    let (x0, v) = foot_and_tangent(space, d, direction_seed);
    let dist = |s: f64| {
        let p = geodesic_point(c, &x0.coords, &v, s);
        embedded_distance(space, &origin, &p)
    };
    // validate the geodesic once before the hot loop
    dist(0.0)?;
    let dist = |s: f64| dist(s).expect("geodesic stays on the manifold");

    let half = match c {
        Curvature::Spherical => PI,
        _ => f.support_radius() + d,
    };
    let base = cfg.without_singularity();
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let g = |s: f64| dist(sign * s);
        let far = g(half);
        let mut edges = vec![0.0];
        edges.extend(
            f.breakpoints[1..]
                .iter()
                .filter(|&&b| b > d && b < far)
                .map(|&b| bisect(g, b, 0.0, half)),
        );
        edges.push(half);
        for w in edges.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let r = integrate(|s| f.value_at(g(s)), w[0], w[1], &base)?;
            total += r.value;
        }
    }
    Ok(total)
}

/// k-volume of the section of the Euclidean ball `B(0, R)` by a k-plane at
/// distance `d`: `ω_k (R^2 - d^2)_+^{k/2}`.
pub fn euclidean_ball_slice(n: usize, k: usize, d: f64, radius: f64) -> Result<f64> {
    if n < 2 || k < 1 || k >= n {
        return Err(Error::domain(format!("need n >= 2 and 1 <= k <= n - 1, got n = {n}, k = {k}")));
    }
    if !(d >= 0.0 && radius >= 0.0) || !d.is_finite() || !radius.is_finite() {
        return Err(Error::domain(format!("need finite d, R >= 0, got d = {d}, R = {radius}")));
    }
    let chord2 = (radius - d) * (radius + d);
    Ok(if chord2 <= 0.0 { 0.0 } else { unit_ball_volume(k) * chord2.powf(0.5 * k as f64) })
}
