//! Measures of radial sets and `L^{p,1}` norms of radial step functions.
//!
//! The norm of an indicator is `μ(E)^{1/p}` (no factor `p`), extended to
//! step functions by the layer-cake sum over the distinct levels of `|f|`.

use serde::{Deserialize, Serialize};

use crate::curvature::{s_c, Curvature};
use crate::error::{Error, Result};
use crate::geometry::Space;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::radial_transform::{surface_area_sphere, RadialProfile};

/// A finite disjoint union of geodesic-radius intervals `(a, b)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RadialSet {
    intervals: Vec<(f64, f64)>,
}

impl RadialSet {
    /// Intervals must be non-empty, sorted and pairwise disjoint, starting at
    /// radius 0 or later.
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(a >= 0.0) || !b.is_finite() || !(a < b) {
                return Err(Error::domain(format!("radial interval ({a}, {b}) needs finite 0 <= a < b")));
            }
        }
        if let Some(w) = intervals.windows(2).find(|w| w[1].0 < w[0].1) {
            return Err(Error::domain(format!(
                "radial intervals must be sorted and disjoint, got ({}, {}) then ({}, {})",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
        Ok(RadialSet { intervals })
    }

    pub fn empty() -> Self {
        RadialSet::default()
    }

    pub fn ball(r: f64) -> Result<Self> {
        RadialSet::new(vec![(0.0, r)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    fn check_for(&self, space: &Space) -> Result<()> {
        let max = space.max_radius();
        match self.intervals.last() {
            Some(&(_, b)) if b > max => Err(Error::domain(format!(
                "radial set reaches radius {b}, beyond the largest radius {max} of the space"
            ))),
            _ => Ok(()),
        }
    }
}

/// `μ(E) = |S^{n-1}| ∫_E s_c^{n-1}(r) dr`.
pub fn radial_set_measure(space: &Space, set: &RadialSet) -> Result<f64> {
    set.check_for(space)?;
    let c: Curvature = space.curvature();
    let power = space.dim() as i32 - 1;
    // relative accuracy only: small sets have tiny measures
    let cfg = QuadratureConfig { rel_tol: 1e-12, abs_tol: 1e-300, ..QuadratureConfig::default() };
    let mut total = 0.0;
    for &(a, b) in set.intervals() {
        total += integrate(|r| s_c(c, r).powi(power), a, b, &cfg)?.value;
    }
    Ok(surface_area_sphere(space.dim()) * total)
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("Lorentz exponent p must be finite and >= 1, got {p}")))
    }
}

/// `‖χ_E‖_{L^{p,1}} = μ(E)^{1/p}`.
pub fn lorentz_norm_char(space: &Space, set: &RadialSet, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(radial_set_measure(space, set)?.powf(1.0 / p))
}

/// The set `{r : |f(r)| >= level}`, merging adjacent annuli.
pub fn level_set(f: &RadialProfile, level: f64) -> RadialSet {
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for (w, v) in f.breakpoints().windows(2).zip(f.values()) {
        if v.abs() >= level {
            match intervals.last_mut() {
                Some(last) if last.1 == w[0] => last.1 = w[1],
                _ => intervals.push((w[0], w[1])),
            }
        }
    }
    RadialSet { intervals }
}

/// Layer-cake norm `Σ_j (L_j - L_{j-1}) μ({|f| >= L_j})^{1/p}` over the
/// distinct positive levels `L_1 < L_2 < …` of `|f|`.
pub fn lorentz_norm_simple(space: &Space, f: &RadialProfile, p: f64) -> Result<f64> {
    check_p(p)?;
    let mut levels: Vec<f64> = f.values().iter().map(|v| v.abs()).filter(|&v| v > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut norm = 0.0;
    let mut prev = 0.0;
    for level in levels {
        norm += (level - prev) * lorentz_norm_char(space, &level_set(f, level), p)?;
        prev = level;
    }
    Ok(norm)
}

/// Critical exponent of the weighted `L^{p,1} -> L^∞` bound: `n/k` on the
/// flat space and the sphere, `(n-1)/(k-1)` on hyperbolic space (`k >= 2`).
pub fn endpoint_exponent(space: &Space, k: usize) -> Result<f64> {
    let n = space.dim();
    if k < 1 || k >= n {
        return Err(Error::domain(format!("plane dimension k must satisfy 1 <= k <= {}, got {k}", n - 1)));
    }
    match space.curvature() {
        Curvature::Hyperbolic if k == 1 => Err(Error::UnsupportedEndpoint { curvature: -1, k }),
        Curvature::Hyperbolic => Ok((n - 1) as f64 / (k - 1) as f64),
        _ => Ok(n as f64 / k as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn space(c: Curvature, n: usize) -> Space {
        Space::new(c, n).unwrap()
    }

    #[test]
    fn measures() {
        let m = radial_set_measure(&space(Curvature::Flat, 3), &RadialSet::ball(1.0).unwrap()).unwrap();
        assert!((m - 4.0 * PI / 3.0).abs() < 1e-12);
        let m = radial_set_measure(&space(Curvature::Spherical, 2), &RadialSet::ball(PI / 2.0).unwrap()).unwrap();
        assert!((m - 2.0 * PI).abs() < 1e-12);
        let m = radial_set_measure(&space(Curvature::Hyperbolic, 2), &RadialSet::ball(1.0).unwrap()).unwrap();
        assert!((m - 2.0 * PI * (1.0f64.cosh() - 1.0)).abs() < 1e-12);
        let m = radial_set_measure(&space(Curvature::Spherical, 3), &RadialSet::ball(PI).unwrap()).unwrap();
        assert!((m - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn set_validation() {
        assert!(RadialSet::new(vec![(0.5, 0.2)]).is_err());
        assert!(RadialSet::new(vec![(0.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(RadialSet::new(vec![(-0.1, 1.0)]).is_err());
        assert!(RadialSet::new(vec![(0.0, f64::INFINITY)]).is_err());
        let far = RadialSet::ball(4.0).unwrap();
        assert!(radial_set_measure(&space(Curvature::Spherical, 3), &far).is_err());
    }

    #[test]
    fn char_norms() {
        let flat = space(Curvature::Flat, 3);
        let v = lorentz_norm_char(&flat, &RadialSet::ball(1.0).unwrap(), 1.5).unwrap();
        assert!((v - (4.0 * PI / 3.0f64).powf(2.0 / 3.0)).abs() < 1e-12);
        assert_eq!(lorentz_norm_char(&flat, &RadialSet::empty(), 2.0).unwrap(), 0.0);
        let v = lorentz_norm_char(&space(Curvature::Spherical, 3), &RadialSet::ball(PI).unwrap(), 3.0).unwrap();
        assert!((v - (2.0 * PI * PI).powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(lorentz_norm_char(&flat, &RadialSet::empty(), 0.5).is_err());
    }

    #[test]
    fn simple_norms() {
        let flat = space(Curvature::Flat, 3);
        let ball = RadialProfile::ball(1.0).unwrap();
        let e = RadialSet::ball(1.0).unwrap();
        let a = lorentz_norm_simple(&flat, &ball, 1.5).unwrap();
        assert!((a - lorentz_norm_char(&flat, &e, 1.5).unwrap()).abs() < 1e-14);
        let b = lorentz_norm_simple(&flat, &ball.scaled(2.0), 1.5).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-13);

        let two_level = RadialProfile::new(vec![0.0, 1.0, 2.0], vec![2.0, 1.0]).unwrap();
        let mu = |r: f64| 4.0 * PI * r.powi(3) / 3.0;
        let expected = mu(2.0).powf(2.0 / 3.0) + mu(1.0).powf(2.0 / 3.0);
        assert!((lorentz_norm_simple(&flat, &two_level, 1.5).unwrap() - expected).abs() < 1e-11);
    }

    #[test]
    fn level_sets_merge() {
        let f = RadialProfile::new(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(level_set(&f, 1.0).intervals(), &[(0.0, 2.0)]);
        assert_eq!(level_set(&f, 2.0).intervals(), &[(1.0, 2.0)]);
        assert_eq!(level_set(&f, 0.5).intervals(), &[(0.0, 3.0)]);
    }

    #[test]
    fn endpoint_exponents() {
        assert_eq!(endpoint_exponent(&space(Curvature::Flat, 4), 2).unwrap(), 2.0);
        assert_eq!(endpoint_exponent(&space(Curvature::Hyperbolic, 4), 2).unwrap(), 3.0);
        assert_eq!(endpoint_exponent(&space(Curvature::Spherical, 3), 1).unwrap(), 3.0);
        assert_eq!(
            endpoint_exponent(&space(Curvature::Hyperbolic, 3), 1),
            Err(Error::UnsupportedEndpoint { curvature: -1, k: 1 })
        );
        assert!(endpoint_exponent(&space(Curvature::Flat, 3), 3).is_err());
    }

    fn any_curvature() -> impl Strategy<Value = Curvature> {
        prop_oneof![Just(Curvature::Hyperbolic), Just(Curvature::Flat), Just(Curvature::Spherical)]
    }

    proptest! {
        #[test]
        fn measure_is_additive(c in any_curvature(), n in 2usize..6, a in 0.0f64..1.0, m in 0.0f64..1.0, b in 0.0f64..1.0) {
            let sp = space(c, n);
            let (lo, hi) = (a, a + 0.1 + 2.0 * b);
            let mid = lo + (hi - lo) * (0.05 + 0.9 * m);
            let whole = radial_set_measure(&sp, &RadialSet::new(vec![(lo, hi)]).unwrap()).unwrap();
            let left = radial_set_measure(&sp, &RadialSet::new(vec![(lo, mid)]).unwrap()).unwrap();
            let right = radial_set_measure(&sp, &RadialSet::new(vec![(mid, hi)]).unwrap()).unwrap();
            let both = radial_set_measure(&sp, &RadialSet::new(vec![(lo, mid), (mid, hi)]).unwrap()).unwrap();
            prop_assert!((whole - left - right).abs() <= 1e-9 * whole.max(1e-3));
            prop_assert!((whole - both).abs() <= 1e-9 * whole.max(1e-3));
        }

        #[test]
        fn char_norm_monotone_and_power(c in any_curvature(), n in 2usize..6, r in 0.05f64..3.0, s in 0.0f64..1.0, p in 1.0f64..4.0) {
            let sp = space(c, n);
            let small = RadialSet::ball(r * s.max(0.01)).unwrap();
            let large = RadialSet::ball(r).unwrap();
            let (ns, nl) = (lorentz_norm_char(&sp, &small, p).unwrap(), lorentz_norm_char(&sp, &large, p).unwrap());
            prop_assert!(ns <= nl);
            let mu = radial_set_measure(&sp, &large).unwrap();
            prop_assert!((nl.powf(p) - mu).abs() <= 1e-12 * mu);
        }

        #[test]
        fn nested_quasi_triangle(c in any_curvature(), n in 2usize..6, r1 in 0.05f64..1.5, r2 in 0.05f64..1.5,
                                 a in 0.1f64..2.0, b in 0.1f64..2.0, p in 1.0f64..4.0) {
            let sp = space(c, n);
            let f = RadialProfile::ball(r1).unwrap().scaled(a);
            let g = RadialProfile::ball(r1 + r2).unwrap().scaled(b);
            let h = RadialProfile::linear_combination(1.0, &f, 1.0, &g);
            let lhs = lorentz_norm_simple(&sp, &h, p).unwrap();
            let rhs = lorentz_norm_simple(&sp, &f, p).unwrap() + lorentz_norm_simple(&sp, &g, p).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-10));
        }
    }
}
