//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; the process exits non-zero if
//! any criterion fails. All tolerances and runtime budgets are pinned here.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use kplane::curvature::{identity_terms, Curvature};
use kplane::estimates::{
    corollary_sweep, default_d_grid, endpoint_sweep, lemma_sweep, scale_flatness, subendpoint_probe,
};
use kplane::geometry::{embedded_distance, hypotenuse, right_triangle_vertex};
use kplane::hypergeo::{gamma, residual_suite, suite_quadrature};
use kplane::lorentz::endpoint_exponent;
use kplane::radial_transform::{
    euclidean_ball_slice, kplane_transform, kplane_transform_oracle, xray_embedded_oracle,
};
use kplane::{Error, PlaneOffset, QuadratureConfig, RadialProfile, Space};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const IDENTITY_TOL: f64 = 1e-12;
const IDENTITY_BUDGET: Duration = Duration::from_secs(5);
const PYTHAGORAS_TOL: f64 = 1e-10;
const PYTHAGORAS_BUDGET: Duration = Duration::from_secs(10);
const ORACLE_ABS_TOL: f64 = 1e-8;
const ORACLE_REL_TOL: f64 = 1e-6;
const XRAY_TOL: f64 = 1e-8;
const TRANSFORM_BUDGET: Duration = Duration::from_secs(300);
const BALL_REL_TOL: f64 = 1e-8;
const SPHERE_REL_TOL: f64 = 1e-8;
const DRIFT_LIMIT: f64 = 0.05;
const UNIT_P_TOL: f64 = 1e-12;
const FLATNESS_TOL: f64 = 1e-6;
const PROBE_FRACTION: f64 = 0.8;
const PROBE_GROWTH: f64 = 3.0;
const PROBE_LAW_TOL: f64 = 1e-6;
const SERIES_TOL: f64 = 1e-8;
const REDUCTION_TOL: f64 = 1e-9;
const TRANSFORM_RESIDUAL_TOL: f64 = 1e-9;
const LOG2_TOL: f64 = 1e-10;

const SAMPLES: usize = 10_000;
const SEED: u64 = 0x5eed_2024;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn space(c: Curvature, n: usize) -> Space {
    Space::new(c, n).expect("valid space")
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Residuals of the six identities over random `(c, t, r)`. A residual
/// passes when it is below the tolerance in absolute terms or relative to
/// the largest term that cancelled.
fn identities() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_abs = 0.0f64;
    let mut worst_scaled = 0.0f64;
    for _ in 0..SAMPLES {
        let c = Curvature::ALL[rng.gen_range(0..3)];
        let t = rng.gen_range(-4.0..4.0);
        let r = rng.gen_range(-4.0..4.0);
        for (lhs, rhs, scale) in identity_terms(c, t, r) {
            let abs = (lhs - rhs).abs();
            worst_abs = worst_abs.max(abs);
            worst_scaled = worst_scaled.max(abs / scale.max(1.0));
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst_scaled < IDENTITY_TOL && elapsed < IDENTITY_BUDGET,
        format!(
            "{SAMPLES} samples, max residual {worst_scaled:.3e} (absolute {worst_abs:.3e}), {elapsed:.2?} of {IDENTITY_BUDGET:?}"
        ),
    )
}

fn pythagoras() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    for c in Curvature::ALL {
        let leg = if c == Curvature::Spherical { PI } else { 3.0 };
        for _ in 0..SAMPLES {
            let s = space(c, rng.gen_range(2..=5));
            let (d, r) = (rng.gen_range(0.0..=leg), rng.gen_range(0.0..=leg));
            let x = right_triangle_vertex(&s, d, r, rng.gen()).unwrap();
            let e = embedded_distance(&s, &s.origin(), &x).unwrap();
            worst = worst.max((e - hypotenuse(c, d, r).unwrap()).abs());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst < PYTHAGORAS_TOL && elapsed < PYTHAGORAS_BUDGET,
        format!("{} triangles, max |embedded - hypotenuse| {worst:.3e}, {elapsed:.2?}", 3 * SAMPLES),
    )
}

fn offsets(c: Curvature) -> [f64; 8] {
    match c {
        Curvature::Spherical => [0.0, 0.05, 0.2, 0.5, 0.9, 1.2, 1.4, 1.55],
        _ => [0.0, 0.05, 0.2, 0.5, 0.9, 1.3, 1.8, 2.5],
    }
}

fn transform_oracles() -> Verdict {
    let start = Instant::now();
    let cfg = QuadratureConfig::default();
    let mut jobs = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    for c in Curvature::ALL {
        for n in 3..=5 {
            let profiles: Vec<RadialProfile> = (0..20).map(|_| RadialProfile::random(&mut rng, c, 5, false)).collect();
            for k in 1..n {
                for (i, f) in profiles.iter().enumerate() {
                    for d in offsets(c) {
                        jobs.push((c, n, k, i as u64, f.clone(), d));
                    }
                }
            }
        }
    }
    let results: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|(c, n, k, i, f, d)| {
            let s = space(*c, *n);
            let plane = PlaneOffset::new(&s, *k, *d).unwrap();
            let closed = kplane_transform(&s, &plane, f, &cfg).unwrap().raw;
            let polar = kplane_transform_oracle(&s, &plane, f, &cfg).unwrap().raw;
            let polar_excess = (closed - polar).abs() / ORACLE_ABS_TOL.max(ORACLE_REL_TOL * polar.abs());
            let xray_err = if *k == 1 {
                let x = xray_embedded_oracle(&s, *d, f, SEED ^ i, &cfg).unwrap();
                (closed - x).abs() / x.abs().max(1.0)
            } else {
                0.0
            };
            (polar_excess, xray_err)
        })
        .collect();
    let worst_polar = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let worst_xray = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let elapsed = start.elapsed();
    verdict(
        worst_polar <= 1.0 && worst_xray <= XRAY_TOL && elapsed < TRANSFORM_BUDGET,
        format!(
            "{} evaluations, worst polar error {worst_polar:.3e} of allowance, worst X-ray error {worst_xray:.3e}, {elapsed:.2?}",
            jobs.len()
        ),
    )
}

fn euclidean_balls() -> Verdict {
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 2..=5 {
        let s = space(Curvature::Flat, n);
        for k in 1..n {
            for radius in [0.5, 1.0, 3.0] {
                let f = RadialProfile::ball(radius).unwrap();
                for frac in [0.0, 0.3, 0.7, 0.99, 1.5] {
                    let d = frac * radius;
                    let raw = kplane_transform(&s, &PlaneOffset::new(&s, k, d).unwrap(), &f, &cfg).unwrap().raw;
                    // ω_k (R^2 - d^2)_+^{k/2}, with ω_k from the Gamma function
                    let omega = PI.powf(k as f64 / 2.0) / gamma(k as f64 / 2.0 + 1.0);
                    let want = omega * (radius * radius - d * d).max(0.0).powf(k as f64 / 2.0);
                    let err = if want == 0.0 { raw.abs() } else { rel(raw, want) };
                    worst = worst.max(err);
                    let lib = euclidean_ball_slice(n, k, d, radius).unwrap();
                    worst = worst.max(if want == 0.0 { lib.abs() } else { rel(lib, want) });
                    count += 1;
                }
            }
        }
    }
    verdict(worst <= BALL_REL_TOL, format!("{count} (n, k, d, R) points, max relative error {worst:.3e}"))
}

fn sphere_constant() -> Verdict {
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    for k in 1..=6usize {
        for n in [k + 1, k + 2] {
            let s = space(Curvature::Spherical, n);
            let f = RadialProfile::ball(PI).unwrap();
            let raw = kplane_transform(&s, &PlaneOffset::new(&s, k, 0.0).unwrap(), &f, &cfg).unwrap().raw;
            // 2 |S^{k-1}| ∫_0^{π/2} sin^{k-1}, with the Wallis integral in Gamma form
            let m = (k - 1) as f64;
            let area = 2.0 * PI.powf(k as f64 / 2.0) / gamma(k as f64 / 2.0);
            let wallis = PI.sqrt() * gamma((m + 1.0) / 2.0) / (2.0 * gamma(m / 2.0 + 1.0));
            let want = 2.0 * area * wallis;
            worst = worst.max(rel(raw, want));
        }
    }
    verdict(worst <= SPHERE_REL_TOL, format!("max relative error {worst:.3e} over k = 1..6, n in {{k+1, k+2}}"))
}

fn inequality_sweeps() -> Verdict {
    let ps = [1.0, 1.5, 2.0, 3.0];
    let etas = [0.5, 1.0, 2.0];
    let mut cells = Vec::new();
    for c in Curvature::ALL {
        for p in ps {
            for e1 in etas {
                for e2 in etas {
                    cells.push((c, p, e1, Some(e2)));
                }
                cells.push((c, p, e1, None));
            }
        }
    }
    let results: Vec<(bool, f64, f64)> = cells
        .par_iter()
        .map(|&(c, p, e1, e2)| {
            let r = match e2 {
                Some(e2) => lemma_sweep(c, p, e1, e2, 200, SEED + 6).unwrap(),
                None => corollary_sweep(c, p, e1, 200, SEED + 6).unwrap(),
            };
            let drift = r.metrics["refinement_drift"];
            let unit = if p == 1.0 {
                r.cases.iter().filter_map(|x| x.ratio).map(|x| (x - 1.0).abs()).fold(0.0, f64::max)
            } else {
                0.0
            };
            let ok = r.tolerance_verdict
                && r.max_ratio.is_finite()
                && drift < DRIFT_LIMIT
                && r.counterexamples() == 0
                && unit <= UNIT_P_TOL;
            (ok, drift, unit)
        })
        .collect();
    let failing = results.iter().filter(|r| !r.0).count();
    let drift = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let unit = results.iter().map(|r| r.2).fold(0.0, f64::max);
    verdict(
        failing == 0,
        format!(
            "{} cells x 200 unions, {failing} failing, max drift {drift:.4}, max |ratio - 1| at p = 1 {unit:.1e}",
            cells.len()
        ),
    )
}

fn endpoint_bounds() -> Verdict {
    let mut cells = Vec::new();
    for c in Curvature::ALL {
        for n in 2..=5 {
            for k in 1..n {
                if !(c == Curvature::Hyperbolic && k == 1) {
                    cells.push((c, n, k));
                }
            }
        }
    }
    let bounded: Vec<(bool, f64)> = cells
        .par_iter()
        .map(|&(c, n, k)| {
            let r = endpoint_sweep(&space(c, n), k, 50, SEED + 7, &default_d_grid(c)).unwrap();
            (r.tolerance_verdict, r.max_ratio / r.metrics["extremal_constant"])
        })
        .collect();
    let unbounded = bounded.iter().filter(|b| !b.0).count();
    let closest = bounded.iter().map(|b| b.1).fold(0.0, f64::max);

    let radii = [0.5, 1.0, 2.0, 4.0, 8.0];
    let mut flat_drift = 0.0f64;
    let mut flat_ok = true;
    // one decade of radius, decreasing
    let scales = [1.0, 0.5, 0.2, 0.1];
    let mut probe_ok = true;
    let mut min_growth_k2 = f64::INFINITY;
    let mut law_err = 0.0f64;
    for n in 2..=5 {
        for k in 1..n {
            let s = space(Curvature::Flat, n);
            let r = scale_flatness(&s, k, &radii).unwrap();
            flat_drift = flat_drift.max(r.metrics["drift"]);
            flat_ok &= r.tolerance_verdict && r.metrics["drift"] < FLATNESS_TOL;

            let p_test = PROBE_FRACTION * endpoint_exponent(&s, k).unwrap();
            let probe = subendpoint_probe(&s, k, p_test, &scales).unwrap();
            let growth = probe.metrics["growth_factor"];
            // ratio ∝ R^{k - n/p_test}, so one decade multiplies it by 10^{n/p_test - k}
            let law = 10f64.powf(n as f64 / p_test - k as f64);
            law_err = law_err.max(rel(growth, law));
            probe_ok &= probe.tolerance_verdict && rel(growth, law) < PROBE_LAW_TOL;
            if k >= 2 {
                min_growth_k2 = min_growth_k2.min(growth);
                probe_ok &= growth > PROBE_GROWTH;
            }
        }
    }
    verdict(
        unbounded == 0 && flat_ok && probe_ok,
        format!(
            "{} (c, n, k) families of 50, {unbounded} unbounded, max ratio / extremal constant {closest:.9}; \
             flatness drift {flat_drift:.1e}; probe growth per decade >= {min_growth_k2:.3} for k >= 2, \
             law error {law_err:.1e}",
            cells.len()
        ),
    )
}

fn hyperbolic_xray_rejected() -> Verdict {
    let mut ok = true;
    for n in 2..=5 {
        let s = space(Curvature::Hyperbolic, n);
        let expected = Error::UnsupportedEndpoint { curvature: -1, k: 1 };
        ok &= endpoint_exponent(&s, 1) == Err(expected.clone());
        ok &= endpoint_sweep(&s, 1, 3, SEED, &[0.0]).err() == Some(expected);
    }
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    std::fs::write(&config, "[endpoint]\ncurvature = -1\nn = 3\nk = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_kplane"))
        .args(["endpoint", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&out.stderr);
    ok &= out.status.code() == Some(2) && stderr.contains("unsupported endpoint");
    verdict(ok, format!("library error for n = 2..5, CLI exit {:?}", out.status.code()))
}

fn hypergeometric() -> Verdict {
    let r = residual_suite(200, SEED + 9, &suite_quadrature()).unwrap();
    let ok = r.series_max_error <= SERIES_TOL
        && r.reduction_max_error <= REDUCTION_TOL
        && r.pfaff_max_residual < TRANSFORM_RESIDUAL_TOL
        && r.f1_transform_max_residual < TRANSFORM_RESIDUAL_TOL
        && r.log2_error <= LOG2_TOL;
    verdict(
        ok,
        format!(
            "200 points: series {:.1e}, reductions {:.1e}, Pfaff {:.1e}, F1 {:.1e}, 2F1(1,1;2;1/2) error {:.1e}",
            r.series_max_error,
            r.reduction_max_error,
            r.pfaff_max_residual,
            r.f1_transform_max_residual,
            r.log2_error
        ),
    )
}

const DETERMINISM_CONFIG: &str = r#"
seed = 77

[identities]
samples = 2000
triangles = 2000

[transform]
curvature = 1
n = 4
k = 1
d_range = { start = 0.0, stop = 1.5, count = 7 }

[transform.profile]
breakpoints = [0.0, 0.4, 1.1, 2.0]
values = [2.0, -0.5, 1.0]

[endpoint]
curvature = -1
n = 4
k = 2
profiles = 8

[lemma]
p = [1.0, 2.0]
eta = [0.5, 2.0]
cases = 20

[hypergeo]
points = 20
"#;

fn run_all(config: &Path, out: &Path, jobs: &str) -> bool {
    ["identities", "transform", "endpoint", "lemma", "hypergeo"].iter().all(|cmd| {
        let status = Command::new(env!("CARGO_BIN_EXE_kplane"))
            .arg(cmd)
            .arg("--config")
            .arg(config)
            .arg("--out")
            .arg(out)
            .args(["--jobs", jobs])
            .output()
            .unwrap()
            .status;
        status.code() == Some(0)
    })
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, DETERMINISM_CONFIG).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let ran = run_all(&config, &a, "1") && run_all(&config, &b, "4");
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let differing: Vec<String> = names
        .iter()
        .filter(|n| std::fs::read(a.join(n)).ok() != std::fs::read(b.join(n)).ok())
        .map(|n| n.to_string_lossy().into_owned())
        .collect();
    verdict(
        ran && differing.is_empty() && names.len() >= 11,
        format!("{} files compared across --jobs 1 and --jobs 4, differing: {differing:?}", names.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("curvature identities", identities),
        ("unified Pythagoras vs embedding", pythagoras),
        ("transform oracle equivalence", transform_oracles),
        ("Euclidean ball slices", euclidean_balls),
        ("sphere constant", sphere_constant),
        ("integral inequality sweeps", inequality_sweeps),
        ("endpoint boundedness", endpoint_bounds),
        ("hyperbolic X-ray endpoint rejected", hyperbolic_xray_rejected),
        ("hypergeometric suite", hypergeometric),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| verdict(false, "panicked".into()));
        if !v.pass {
            failed += 1;
        }
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{status}] {name}: {} ({:.2?})", i + 1, v.detail, start.elapsed());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
