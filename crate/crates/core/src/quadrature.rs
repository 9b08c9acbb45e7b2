//! One-dimensional adaptive quadrature.
//!
//! Globally adaptive bisection driven by the 10-point Gauss / 21-point
//! Kronrod pair, with QUADPACK-style error rescaling. An integrable
//! `(t - a)^λ` singularity at the left endpoint can be declared in the
//! configuration; the engine then integrates in `w` with
//! `t = a + (b - a) w^{1/(1+λ)}`, which makes the transformed integrand bounded.
//!
//! Infinite limits are not accepted. Callers truncate at the compact support
//! of their integrand.
//!
//! [`graded_gauss_legendre`] is an independent fixed-rule path (composite
//! Gauss–Legendre on a mesh graded geometrically toward `a`) used to
//! cross-check the substitution path on singular integrands.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),

    #[error("integrand returned {value} at t = {abscissa}")]
    NonFinite { abscissa: f64, value: f64 },

    #[error(
        "tolerance not met after {subdivisions} subdivisions: value {value}, error estimate {error_estimate:e}"
    )]
    NotConverged { value: f64, error_estimate: f64, subdivisions: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Exponent `λ > -1` of a `(t - a)^λ` factor at the left endpoint.
    #[serde(default)]
    pub singular_exponent_left: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 1 << 15,
            singular_exponent_left: None,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureConfig { rel_tol, abs_tol, ..Default::default() }
    }

    pub fn with_left_singularity(self, lambda: f64) -> Self {
        QuadratureConfig { singular_exponent_left: Some(lambda), ..self }
    }

    pub fn without_singularity(self) -> Self {
        QuadratureConfig { singular_exponent_left: None, ..self }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(QuadratureError::InvalidConfig(format!(
                "tolerances must be > 0 (rel_tol = {}, abs_tol = {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadratureError::InvalidConfig("max_subdivisions must be >= 1".into()));
        }
        if let Some(l) = self.singular_exponent_left {
            if !(l > -1.0) || !l.is_finite() {
                return Err(QuadratureError::InvalidConfig(format!(
                    "singular exponent must be finite and > -1, got {l}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl IntegrationResult {
    pub const ZERO: IntegrationResult = IntegrationResult { value: 0.0, error_estimate: 0.0, evaluations: 0 };

    /// Sum of two results over adjacent or unrelated pieces.
    pub fn combine(self, other: IntegrationResult) -> IntegrationResult {
        IntegrationResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrand wrapper that counts evaluations and reports the first
/// non-finite sample, in the original variable.
struct Sampler<'f, F> {
    f: &'f F,
    evaluations: Cell<usize>,
    bad: Cell<Option<(f64, f64)>>,
}

impl<'f, F: Fn(f64) -> f64> Sampler<'f, F> {
    fn new(f: &'f F) -> Self {
        Sampler { f, evaluations: Cell::new(0), bad: Cell::new(None) }
    }

    fn eval(&self, t: f64, scale: f64, origin: f64) -> f64 {
        self.evaluations.set(self.evaluations.get() + 1);
        let v = (self.f)(t) * scale;
        if !v.is_finite() {
            if self.bad.get().is_none() {
                self.bad.set(Some((origin, v)));
            }
            return 0.0;
        }
        v
    }
}

/// Left-singular change of variable, `t = a + len * w^q` with `q = 1/(1+λ)`.
#[derive(Clone, Copy)]
enum Map {
    Identity,
    Power { a: f64, len: f64, q: f64 },
}

impl Map {
    /// Original abscissa and the Jacobian at `w`.
    #[inline]
    fn apply(self, w: f64) -> (f64, f64) {
        match self {
            Map::Identity => (w, 1.0),
            Map::Power { a, len, q } => {
                let wq1 = w.powf(q - 1.0);
                (a + len * wq1 * w, len * q * wq1)
            }
        }
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(s: &Sampler<'_, F>, map: Map, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |w: f64| {
        let (t, jac) = map.apply(w);
        s.eval(t, jac, t)
    };

    let fc = eval(center);
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..5 {
        let jtw = 2 * j + 1;
        let x = half * XGK[jtw];
        let (f1, f2) = (eval(center - x), eval(center + x));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let x = half * XGK[jtwm1];
        let (f1, f2) = (eval(center - x), eval(center + x));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let abs_half = half.abs();
    Segment {
        a,
        b,
        value: res_k * half,
        error: rescale_error(err, res_abs * abs_half, res_asc * abs_half),
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// When `cfg.singular_exponent_left = Some(λ)`, `f` may behave like
/// `(t - a)^λ` near `a`; it is never evaluated at `a` itself.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<IntegrationResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    let (map, lo, hi) = match cfg.singular_exponent_left {
        Some(l) if l != 0.0 => (Map::Power { a, len: b - a, q: 1.0 / (1.0 + l) }, 0.0, 1.0),
        _ => (Map::Identity, a, b),
    };

    let sampler = Sampler::new(&f);
    let check = |s: &Sampler<'_, F>| match s.bad.get() {
        Some((abscissa, value)) => Err(QuadratureError::NonFinite { abscissa, value }),
        None => Ok(()),
    };

    let first = gauss_kronrod(&sampler, map, lo, hi);
    check(&sampler)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    // Segments too narrow to bisect are parked; their error is final.
    let mut frozen_err = 0.0;
    heap.push(first);
    let mut subdivisions = 1;

    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if heap.is_empty() || subdivisions >= cfg.max_subdivisions {
            return Err(QuadratureError::NotConverged {
                value: total,
                error_estimate: total_err,
                subdivisions,
            });
        }
        let seg = heap.pop().expect("heap not empty");
        let mid = 0.5 * (seg.a + seg.b);
        let width_floor = 1e3 * f64::EPSILON * seg.a.abs().max(seg.b.abs()).max(f64::MIN_POSITIVE);
        if seg.b - seg.a <= width_floor || mid <= seg.a || mid >= seg.b {
            frozen_err += seg.error;
            if heap.is_empty() && frozen_err > tol {
                return Err(QuadratureError::NotConverged {
                    value: total,
                    error_estimate: total_err,
                    subdivisions,
                });
            }
            continue;
        }
        let left = gauss_kronrod(&sampler, map, seg.a, mid);
        let right = gauss_kronrod(&sampler, map, mid, seg.b);
        check(&sampler)?;
        total += left.value + right.value - seg.value;
        total_err += left.error + right.error - seg.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }

    Ok(IntegrationResult { value: total, error_estimate: total_err.max(0.0), evaluations: sampler.evaluations.get() })
}

/// Integrates `f` over `[a, b]` with optional power singularities at either
/// end: `(t - a)^left` and `(b - t)^right`. With a right singularity the
/// interval is split at its midpoint and the right half is reflected.
pub fn integrate_endpoints<F>(
    f: F,
    a: f64,
    b: f64,
    left: Option<f64>,
    right: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<IntegrationResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    let base = cfg.without_singularity();
    let left_cfg = |l: Option<f64>| match l {
        Some(l) => base.with_left_singularity(l),
        None => base,
    };
    match right {
        None => integrate(&f, a, b, &left_cfg(left)),
        Some(r) => {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(QuadratureError::InvalidInterval { a, b });
            }
            let mid = 0.5 * (a + b);
            let lo = integrate(&f, a, mid, &left_cfg(left))?;
            let hi = integrate(|s: f64| f(b - s), 0.0, b - mid, &left_cfg(Some(r)))?;
            Ok(lo.combine(hi))
        }
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule order must be >= 1");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            x = 0.0;
            dp = 1.0;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n == 1 {
        weights[0] = 2.0;
    }
    (nodes, weights)
}

/// Fixed composite Gauss–Legendre rule on a mesh graded geometrically toward
/// `a` with ratio `sigma`: cells `[a + L σ^{j+1}, a + L σ^j]` for
/// `j < levels`. The innermost cell `[a, a + L σ^levels]` is dropped.
pub fn graded_gauss_legendre<F>(f: F, a: f64, b: f64, order: usize, levels: usize, sigma: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let (x, w) = gauss_legendre(order);
    let len = b - a;
    let mut total = 0.0;
    let mut hi = 1.0;
    for _ in 0..levels {
        let lo = hi * sigma;
        let (c, h) = (0.5 * (lo + hi) * len, 0.5 * (hi - lo) * len);
        total += x.iter().zip(&w).map(|(xi, wi)| wi * f(a + c + h * xi)).sum::<f64>() * h;
        hi = lo;
    }
    total
}
