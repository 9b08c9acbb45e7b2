//! Model spaces, the unified right-triangle relation, disc areas and an
//! embedded-coordinates distance oracle.
//!
//! All three spaces live in `R^{n+1}` with common origin `o = e_{n+1}`:
//! the unit sphere, the upper sheet of the hyperboloid `x·x = -1` under the
//! form `x·y = Σ x_i y_i - x_{n+1} y_{n+1}`, and the hyperplane `x_{n+1} = 1`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{s_c, Curvature};
use crate::error::{Error, Result};

/// Tolerance for an embedded point to count as on the manifold.
pub const MANIFOLD_TOL: f64 = 1e-9;

/// A simply connected model space: a curvature label and the dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    curvature: Curvature,
    n: usize,
}

impl Space {
    pub fn new(curvature: Curvature, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("dimension n must be >= 2, got {n}")));
        }
        Ok(Space { curvature, n })
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The origin `o = e_{n+1}`.
    pub fn origin(&self) -> EmbeddedPoint {
        let mut coords = vec![0.0; self.n + 1];
        coords[self.n] = 1.0;
        EmbeddedPoint { coords }
    }

    /// Largest geodesic distance between two points (`π` on the sphere).
    pub fn max_radius(&self) -> f64 {
        match self.curvature {
            Curvature::Spherical => PI,
            _ => f64::INFINITY,
        }
    }

    /// Checks that `p` lies on this model space.
    pub fn check_point(&self, p: &EmbeddedPoint) -> Result<()> {
        if p.coords.len() != self.n + 1 {
            return Err(Error::OffManifold(format!(
                "expected {} coordinates, got {}",
                self.n + 1,
                p.coords.len()
            )));
        }
        if p.coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::OffManifold("non-finite coordinate".into()));
        }
        let last = p.coords[self.n];
        let spatial: f64 = p.coords[..self.n].iter().map(|x| x * x).sum();
        let (defect, scale) = match self.curvature {
            Curvature::Flat => (last - 1.0, 1.0),
            Curvature::Spherical => (spatial + last * last - 1.0, 1.0),
            Curvature::Hyperbolic => {
                if last < 1.0 - MANIFOLD_TOL {
                    return Err(Error::OffManifold(format!(
                        "hyperboloid point must have last coordinate >= 1, got {last}"
                    )));
                }
                (spatial - last * last + 1.0, last * last)
            }
        };
        if defect.abs() > MANIFOLD_TOL * scale {
            return Err(Error::OffManifold(format!(
                "constraint defect {defect:e} exceeds tolerance for curvature {}",
                self.curvature
            )));
        }
        Ok(())
    }
}

/// A point in the ambient `R^{n+1}` coordinates of a model space.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedPoint {
    pub coords: Vec<f64>,
}

impl EmbeddedPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        EmbeddedPoint { coords }
    }
}

/// Inverse of `h ↦ s_c^2(h/2)` on the principal range (`[0, π]` on the sphere).
///
/// On the sphere `cos^2(h/2)` is passed separately so that angles close to
/// `π` are not lost to cancellation in `1 - sin^2`.
fn half_angle_inverse(c: Curvature, sin2: f64, cos2: f64) -> f64 {
    match c {
        Curvature::Flat => 2.0 * sin2.max(0.0).sqrt(),
        Curvature::Hyperbolic => 2.0 * sin2.max(0.0).sqrt().asinh(),
        Curvature::Spherical => 2.0 * sin2.max(0.0).sqrt().atan2(cos2.max(0.0).sqrt()),
    }
}

/// Length of the hypotenuse of a right geodesic triangle with legs `a`, `b`:
/// `s_c^2(h/2) = s_c^2(a/2) + s_c^2(b/2) - 2c s_c^2(a/2) s_c^2(b/2)`.
pub fn hypotenuse(c: Curvature, a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!("legs must be finite and >= 0, got a={a}, b={b}")));
    }
    if c == Curvature::Spherical && (a > PI || b > PI) {
        return Err(Error::domain(format!("spherical legs must be <= π, got a={a}, b={b}")));
    }
    let x = s_c(c, 0.5 * a).powi(2);
    let y = s_c(c, 0.5 * b).powi(2);
    let sin2 = x + y - 2.0 * c.as_f64() * x * y;
    let cos2 = match c {
        Curvature::Spherical => {
            // cos^2(h/2) = cos^2(a/2) cos^2(b/2) + sin^2(a/2) sin^2(b/2)
            let (ca, cb) = ((0.5 * a).cos().powi(2), (0.5 * b).cos().powi(2));
            let cos2 = ca * cb + x * y;
            if sin2 > 1.0 + 1e-12 || cos2 < -1e-12 {
                return Err(Error::domain(format!(
                    "spherical hypotenuse out of range: sin^2(h/2) = {sin2}"
                )));
            }
            cos2
        }
        _ => 0.0,
    };
    Ok(half_angle_inverse(c, sin2, cos2))
}

/// Area of a geodesic disc of radius `r` in the 2-dimensional model space:
/// `4π s_c^2(r/2)`.
pub fn disc_area(c: Curvature, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("radius must be finite and >= 0, got {r}")));
    }
    if c == Curvature::Spherical && r > 2.0 * PI {
        return Err(Error::domain(format!("spherical disc radius must be <= 2π, got {r}")));
    }
    Ok(4.0 * PI * s_c(c, 0.5 * r).powi(2))
}

/// Radial density `s_c^{n-1}(r)` of the polar decomposition of the volume.
pub fn polar_weight(space: &Space, r: f64) -> f64 {
    s_c(space.curvature, r).powi(space.n as i32 - 1)
}

fn minkowski(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() - 1;
    x[..n].iter().zip(&y[..n]).map(|(a, b)| a * b).sum::<f64>() - x[n] * y[n]
}

fn euclid_norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

/// Geodesic distance computed from ambient coordinates only.
///
/// Sphere: the angle between the unit vectors (`arccos` of the clamped inner
/// product, evaluated as `2 atan2(|x-y|, |x+y|)`). Hyperboloid: `arccosh` of
/// minus the Minkowski product, switching to `2 asinh(|x-y|_M / 2)` for
/// nearby points. Flat: Euclidean distance of the first `n` coordinates.
pub fn embedded_distance(space: &Space, x: &EmbeddedPoint, y: &EmbeddedPoint) -> Result<f64> {
    space.check_point(x)?;
    space.check_point(y)?;
    let (x, y) = (&x.coords, &y.coords);
    let n = space.n;
    Ok(match space.curvature {
        Curvature::Flat => euclid_norm(x[..n].iter().zip(&y[..n]).map(|(a, b)| a - b)),
        Curvature::Spherical => {
            let diff = euclid_norm(x.iter().zip(y).map(|(a, b)| a - b));
            let sum = euclid_norm(x.iter().zip(y).map(|(a, b)| a + b));
            2.0 * diff.atan2(sum)
        }
        Curvature::Hyperbolic => {
            let cosh_d = (-minkowski(x, y)).max(1.0);
            if cosh_d < 1.5 {
                let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                let chord2 = minkowski(&diff, &diff).max(0.0);
                2.0 * (0.5 * chord2.sqrt()).asinh()
            } else {
                cosh_d.acosh()
            }
        }
    })
}

/// Two orthonormal directions in the spatial coordinates `R^n`, drawn from
/// `seed`. The first is the direction from `o` to the foot point, the second
/// a tangent orthogonal to it.
pub(crate) fn orthonormal_pair(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = euclid_norm(v.iter().copied());
            if norm > 0.1 && norm <= 1.0 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    };
    let u = draw(&mut rng);
    loop {
        let w = draw(&mut rng);
        let proj: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
        let v: Vec<f64> = w.iter().zip(&u).map(|(wi, ui)| wi - proj * ui).collect();
        let norm = euclid_norm(v.iter().copied());
        if norm > 0.1 {
            return (u, v.into_iter().map(|x| x / norm).collect());
        }
    }
}

/// Point at geodesic distance `s` from `base` along the unit tangent
/// `dir` (given in spatial coordinates, `dir ⟂ base`).
pub(crate) fn geodesic_point(c: Curvature, base: &[f64], dir: &[f64], s: f64) -> EmbeddedPoint {
    let n = base.len() - 1;
    let mut coords = vec![0.0; n + 1];
    match c {
        Curvature::Flat => {
            for i in 0..n {
                coords[i] = base[i] + s * dir[i];
            }
            coords[n] = 1.0;
        }
        Curvature::Spherical => {
            let (sn, cs) = s.sin_cos();
            for i in 0..=n {
                coords[i] = cs * base[i] + sn * dir.get(i).copied().unwrap_or(0.0);
            }
        }
        Curvature::Hyperbolic => {
            let (sh, ch) = (s.sinh(), s.cosh());
            for i in 0..=n {
                coords[i] = ch * base[i] + sh * dir.get(i).copied().unwrap_or(0.0);
            }
        }
    }
    EmbeddedPoint { coords }
}

/// The foot point `x0` at distance `d` from `o` along `u`, and a unit tangent
/// at `x0` orthogonal to the geodesic from `o` to `x0`.
pub(crate) fn foot_and_tangent(space: &Space, d: f64, seed: u64) -> (EmbeddedPoint, Vec<f64>) {
    let (u, v) = orthonormal_pair(space.n, seed);
    let origin = space.origin();
    let x0 = geodesic_point(space.curvature, &origin.coords, &u, d);
    // v has no component along o or u, so it is tangent at x0 in all three
    // models and orthogonal to the o-x0 geodesic.
    (x0, v)
}

/// Vertex `x` of a right triangle `o, x0, x` with the right angle at `x0`,
/// `d(o, x0) = d` and `d(x0, x) = r`. The seed selects the directions.
pub fn right_triangle_vertex(space: &Space, d: f64, r: f64, direction_seed: u64) -> Result<EmbeddedPoint> {
    let max = space.max_radius();
    for (name, v) in [("d", d), ("r", r)] {
        if !(v >= 0.0) || !v.is_finite() || v > max {
            return Err(Error::domain(format!("{name} = {v} outside the radius range [0, {max}]")));
        }
    }
    let (x0, v) = foot_and_tangent(space, d, direction_seed);
    Ok(geodesic_point(space.curvature, &x0.coords, &v, r))
}
