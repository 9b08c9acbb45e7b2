//! The five commands. Each validates its section, computes, writes its files
//! and returns whether every verdict passed.

use std::f64::consts::{LN_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::output::{fmt_num, fmt_opt, OutDir};
use super::CommandError;
use crate::curvature::{identity_terms, Curvature, IDENTITY_NAMES};
use crate::estimates::{
    corollary_sweep, endpoint_family, endpoint_ratio, extremal_constant, lemma_sweep, scale_flatness,
    subendpoint_probe, SweepReport,
};
use crate::geometry::{embedded_distance, hypotenuse, right_triangle_vertex, Space};
use crate::hypergeo::{
    gauss_2f1, residual_suite, suite_quadrature, verify_appell_inequality, verify_gauss_inequality, GaussParams,
    SuiteReport, TheoremCheck,
};
use crate::lorentz::endpoint_exponent;
use crate::quadrature::QuadratureConfig;
use crate::radial_transform::{kplane_transform, kplane_transform_oracle, PlaneOffset};

/// What a command reports back to the runner.
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
}

/// `-1` under `--self-test`: each command flips the sign of one side of a
/// checked relation, so a healthy build must fail.
fn sign(self_test: bool) -> f64 {
    if self_test {
        -1.0
    } else {
        1.0
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "true"
    } else {
        "false"
    }
}

#[derive(Serialize)]
struct IdentityRow {
    curvature: Curvature,
    check: String,
    samples: usize,
    max_residual: f64,
    tol: f64,
    pass: bool,
}

pub fn identities(cfg: &RunConfig, out: &mut OutDir, self_test: bool) -> Result<Outcome, CommandError> {
    cfg.validate_identities()?;
    let s = &cfg.identities;
    let flip = sign(self_test);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for c in Curvature::ALL {
        let mut worst = [0.0f64; IDENTITY_NAMES.len()];
        for _ in 0..s.samples {
            let t = rng.gen_range(-s.t_max..=s.t_max);
            let r = rng.gen_range(-s.t_max..=s.t_max);
            for (w, (lhs, rhs, scale)) in worst.iter_mut().zip(identity_terms(c, t, r)) {
                *w = w.max((lhs - flip * rhs).abs() / scale.max(1.0));
            }
        }
        for (name, &w) in IDENTITY_NAMES.iter().zip(&worst) {
            rows.push(IdentityRow {
                curvature: c,
                check: name.to_string(),
                samples: s.samples,
                max_residual: w,
                tol: s.tol,
                pass: w < s.tol,
            });
        }

        let space = Space::new(c, s.n)?;
        let leg_max = if c == Curvature::Spherical { PI } else { 3.0 };
        let mut worst = 0.0f64;
        for _ in 0..s.triangles {
            let d = rng.gen_range(0.0..=leg_max);
            let r = rng.gen_range(0.0..=leg_max);
            let x = right_triangle_vertex(&space, d, r, rng.gen())?;
            let embedded = embedded_distance(&space, &space.origin(), &x)?;
            worst = worst.max((embedded - hypotenuse(c, d, r)?).abs());
        }
        rows.push(IdentityRow {
            curvature: c,
            check: "pythagoras_embedded".into(),
            samples: s.triangles,
            max_residual: worst,
            tol: s.pythagoras_tol,
            pass: worst < s.pythagoras_tol,
        });
    }
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.curvature.to_string(),
                r.check.clone(),
                r.samples.to_string(),
                fmt_num(r.max_residual),
                fmt_num(r.tol),
                verdict(r.pass).into(),
            ]
        })
        .collect();
    out.csv("identities.csv", &["curvature", "check", "samples", "max_residual", "tol", "pass"], &csv_rows)?;
    let pass = rows.iter().all(|r| r.pass);
    let worst_identity = rows.iter().filter(|r| r.check != "pythagoras_embedded").map(|r| r.max_residual);
    let worst_identity = worst_identity.fold(0.0, f64::max);
    let worst_pyth = rows.iter().filter(|r| r.check == "pythagoras_embedded").map(|r| r.max_residual).fold(0.0, f64::max);

    #[derive(Serialize)]
    struct Report<'a> {
        max_identity_residual: f64,
        max_pythagoras_residual: f64,
        pass: bool,
        rows: &'a [IdentityRow],
    }
    let report =
        Report { max_identity_residual: worst_identity, max_pythagoras_residual: worst_pyth, pass, rows: &rows };
    out.json("identities.json", &report)?;
    Ok(Outcome {
        pass,
        summary: format!(
            "max identity residual {}, max Pythagoras residual {}",
            fmt_num(worst_identity),
            fmt_num(worst_pyth)
        ),
    })
}

#[derive(Serialize)]
struct TransformRow {
    d: f64,
    raw: f64,
    weighted: f64,
    oracle_raw: f64,
    abs_diff: f64,
}

pub fn transform(cfg: &RunConfig, out: &mut OutDir, self_test: bool) -> Result<Outcome, CommandError> {
    let space = cfg.validate_transform()?;
    let s = &cfg.transform;
    let quad = cfg.quadrature_or(QuadratureConfig::default());
    let flip = sign(self_test);
    let rows = cfg
        .transform_grid()
        .par_iter()
        .map(|&d| -> crate::Result<TransformRow> {
            let plane = PlaneOffset::new(&space, s.k, d)?;
            let v = kplane_transform(&space, &plane, &s.profile, &quad)?;
            let o = kplane_transform_oracle(&space, &plane, &s.profile, &quad)?;
            let abs_diff = (v.raw - flip * o.raw).abs();
            Ok(TransformRow { d, raw: v.raw, weighted: v.weighted, oracle_raw: o.raw, abs_diff })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![fmt_num(r.d), fmt_num(r.raw), fmt_num(r.weighted), fmt_num(r.oracle_raw), fmt_num(r.abs_diff)])
        .collect();
    out.csv("transform.csv", &["d", "raw", "weighted", "oracle_raw", "abs_diff"], &csv_rows)?;
    let pass = rows.iter().all(|r| r.abs_diff <= s.tol * r.oracle_raw.abs().max(1.0));
    let max_abs_diff = rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max);

    #[derive(Serialize)]
    struct Report<'a> {
        curvature: Curvature,
        n: usize,
        k: usize,
        tol: f64,
        max_abs_diff: f64,
        pass: bool,
        rows: &'a [TransformRow],
    }
    out.json(
        "transform.json",
        &Report { curvature: s.curvature, n: s.n, k: s.k, tol: s.tol, max_abs_diff, pass, rows: &rows },
    )?;
    Ok(Outcome { pass, summary: format!("{} offsets, max |raw - oracle| {}", rows.len(), fmt_num(max_abs_diff)) })
}

#[derive(Serialize)]
struct Flatness {
    drift: f64,
    pass: bool,
}

#[derive(Serialize)]
struct Probe {
    p_test: f64,
    growth_factor: f64,
    fitted_exponent: f64,
    flat_exponent: f64,
    divergence_trend: bool,
}

fn ratio_rows(report: &SweepReport, radii: &[f64]) -> Vec<Vec<String>> {
    radii.iter().zip(&report.cases).map(|(&r, c)| vec![fmt_num(r), fmt_opt(c.ratio)]).collect()
}

pub fn endpoint(cfg: &RunConfig, out: &mut OutDir, self_test: bool) -> Result<Outcome, CommandError> {
    let space = cfg.validate_endpoint()?;
    let s = &cfg.endpoint;
    let c = space.curvature();
    let p = endpoint_exponent(&space, s.k)?;
    let bound = sign(self_test) * extremal_constant(&space, s.k)?;
    let grid = cfg.endpoint_grid();
    let family = endpoint_family(c, s.profiles, cfg.seed);
    let curves = family.par_iter().map(|f| endpoint_ratio(&space, s.k, f, &grid)).collect::<crate::Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut best: (f64, usize, f64) = (f64::NEG_INFINITY, 0, 0.0);
    for (i, curve) in curves.iter().enumerate() {
        for (&d, case) in grid.iter().zip(&curve.cases) {
            rows.push(vec![i.to_string(), fmt_num(d), fmt_opt(case.ratio)]);
            if let Some(r) = case.ratio {
                if r > best.0 || r.is_nan() {
                    best = (r, i, d);
                }
            }
        }
    }
    out.csv("endpoint.csv", &["profile", "d", "ratio"], &rows)?;
    let bounded = best.0.is_finite() && best.0 <= bound * (1.0 + s.tol);

    let flatness = if c == Curvature::Flat && !s.scale_radii.is_empty() {
        let r = scale_flatness(&space, s.k, &s.scale_radii)?;
        out.csv("endpoint_scale.csv", &["radius", "ratio"], &ratio_rows(&r, &s.scale_radii))?;
        Some(Flatness { drift: r.metrics["drift"], pass: r.tolerance_verdict })
    } else {
        None
    };
    let probe = if s.probe_radii.is_empty() {
        None
    } else {
        let p_test = s.probe_fraction * p;
        let r = subendpoint_probe(&space, s.k, p_test, &s.probe_radii)?;
        out.csv("endpoint_probe.csv", &["radius", "ratio"], &ratio_rows(&r, &s.probe_radii))?;
        Some(Probe {
            p_test,
            growth_factor: r.metrics["growth_factor"],
            fitted_exponent: r.metrics["fitted_exponent"],
            flat_exponent: r.metrics["flat_exponent"],
            divergence_trend: r.tolerance_verdict,
        })
    };
    let pass = bounded && flatness.as_ref().is_none_or(|f| f.pass);

    #[derive(Serialize)]
    struct Report {
        curvature: Curvature,
        n: usize,
        k: usize,
        p: f64,
        profiles: usize,
        extremal_constant: f64,
        max_ratio: f64,
        arg_max_profile: usize,
        arg_max_d: f64,
        bounded: bool,
        scale_flatness: Option<Flatness>,
        probe: Option<Probe>,
        pass: bool,
    }
    let report = Report {
        curvature: c,
        n: s.n,
        k: s.k,
        p,
        profiles: s.profiles,
        extremal_constant: bound,
        max_ratio: best.0,
        arg_max_profile: best.1,
        arg_max_d: best.2,
        bounded,
        scale_flatness: flatness,
        probe,
        pass,
    };
    out.json("endpoint.json", &report)?;
    Ok(Outcome {
        pass,
        summary: format!("max ratio {} against extremal constant {}", fmt_num(best.0), fmt_num(bound)),
    })
}

#[derive(Serialize)]
struct LemmaCell {
    form: &'static str,
    curvature: Curvature,
    p: f64,
    eta1: f64,
    eta2: Option<f64>,
    cases: usize,
    max_ratio: f64,
    refined_max_ratio: f64,
    refinement_drift: f64,
    counterexamples: f64,
    arg_max_set: String,
    pass: bool,
}

pub fn lemma(cfg: &RunConfig, out: &mut OutDir, self_test: bool) -> Result<Outcome, CommandError> {
    cfg.validate_lemma()?;
    let s = &cfg.lemma;
    let flip = sign(self_test);
    let mut jobs: Vec<(&'static str, Curvature, f64, f64, Option<f64>)> = Vec::new();
    for &c in &s.curvatures {
        for &p in &s.p {
            for &e1 in &s.eta {
                for &e2 in &s.eta {
                    jobs.push(("lemma", c, p, e1, Some(e2)));
                }
            }
        }
    }
    if s.corollary {
        for &c in &s.curvatures {
            for &p in &s.p {
                for &g in &s.eta {
                    jobs.push(("corollary", c, p, g, None));
                }
            }
        }
    }
    let cells = jobs
        .par_iter()
        .map(|&(form, c, p, e1, e2)| -> crate::Result<LemmaCell> {
            let report = match e2 {
                Some(e2) => lemma_sweep(c, p, e1, e2, s.cases, cfg.seed)?,
                None => corollary_sweep(c, p, e1, s.cases, cfg.seed)?,
            };
            let unit_ok = p != 1.0 || (flip * report.max_ratio - 1.0).abs() <= s.tol;
            Ok(LemmaCell {
                form,
                curvature: c,
                p,
                eta1: e1,
                eta2: e2,
                cases: s.cases,
                max_ratio: report.max_ratio,
                refined_max_ratio: report.metrics["refined_max_ratio"],
                refinement_drift: report.metrics["refinement_drift"],
                counterexamples: report.metrics["counterexamples"],
                arg_max_set: report.arg_max_case().map(|c| c.label.clone()).unwrap_or_default(),
                pass: report.tolerance_verdict && unit_ok,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|r| {
            vec![
                r.form.into(),
                r.curvature.to_string(),
                fmt_num(r.p),
                fmt_num(r.eta1),
                fmt_opt(r.eta2),
                r.cases.to_string(),
                fmt_num(r.max_ratio),
                fmt_num(r.refined_max_ratio),
                fmt_num(r.refinement_drift),
                fmt_num(r.counterexamples),
                r.arg_max_set.clone(),
                verdict(r.pass).into(),
            ]
        })
        .collect();
    let header = [
        "form",
        "curvature",
        "p",
        "eta1",
        "eta2",
        "cases",
        "max_ratio",
        "refined_max_ratio",
        "refinement_drift",
        "counterexamples",
        "arg_max_set",
        "pass",
    ];
    out.csv("lemma.csv", &header, &rows)?;
    let pass = cells.iter().all(|c| c.pass);
    let failing = cells.iter().filter(|c| !c.pass).count();
    let max_drift = cells.iter().map(|c| c.refinement_drift).fold(0.0, f64::max);

    #[derive(Serialize)]
    struct Report<'a> {
        cells: &'a [LemmaCell],
        max_refinement_drift: f64,
        failing_cells: usize,
        pass: bool,
    }
    out.json("lemma.json", &Report { cells: &cells, max_refinement_drift: max_drift, failing_cells: failing, pass })?;
    Ok(Outcome {
        pass,
        summary: format!("{} cells, {failing} failing, max refinement drift {}", cells.len(), fmt_num(max_drift)),
    })
}

#[derive(Serialize)]
struct CheckRecord {
    kind: &'static str,
    index: usize,
    curvature: Curvature,
    p: f64,
    eta1: f64,
    eta2: f64,
    a: f64,
    b: f64,
    check: TheoremCheck,
}

pub fn hypergeo(cfg: &RunConfig, out: &mut OutDir, self_test: bool) -> Result<Outcome, CommandError> {
    cfg.validate_hypergeo()?;
    let s = &cfg.hypergeo;
    let quad = cfg.quadrature_or(suite_quadrature());
    let mut suite: SuiteReport = residual_suite(s.points, cfg.seed, &quad)?;
    let log2 = gauss_2f1(&GaussParams::new(1.0, 1.0, 2.0, 0.5)?, &quad)?;
    suite.log2_error = (log2 - sign(self_test) * 2.0 * LN_2).abs();
    let tol = s.tol;
    suite.passed = suite.series_max_error <= 10.0 * tol
        && suite.reduction_max_error <= tol
        && suite.pfaff_max_residual <= tol
        && suite.f1_transform_max_residual <= tol
        && suite.log2_error <= tol / 10.0;

    let appell = s.appell.par_iter().enumerate().map(|(i, t)| {
        verify_appell_inequality(t.curvature, t.p, t.eta1, t.eta2, t.a, t.b, &quad).map(|check| CheckRecord {
            kind: "appell",
            index: i,
            curvature: t.curvature,
            p: t.p,
            eta1: t.eta1,
            eta2: t.eta2,
            a: t.a,
            b: t.b,
            check,
        })
    });
    let mut records = appell.collect::<crate::Result<Vec<_>>>()?;
    let gauss = s.gauss.par_iter().enumerate().map(|(i, t)| {
        verify_gauss_inequality(t.curvature, t.p, t.eta1, t.eta2, t.b, &quad).map(|check| CheckRecord {
            kind: "gauss",
            index: i,
            curvature: t.curvature,
            p: t.p,
            eta1: t.eta1,
            eta2: t.eta2,
            a: 0.0,
            b: t.b,
            check,
        })
    });
    records.extend(gauss.collect::<crate::Result<Vec<_>>>()?);
    for r in &mut records {
        for route in &mut r.check.routes {
            route.agrees = route.discrepancy <= 10.0 * tol;
        }
    }

    let prefix = |r: &CheckRecord| {
        vec![
            r.kind.to_string(),
            r.index.to_string(),
            r.curvature.to_string(),
            fmt_num(r.p),
            fmt_num(r.eta1),
            fmt_num(r.eta2),
            fmt_num(r.a),
            fmt_num(r.b),
        ]
    };
    let mut route_rows = Vec::new();
    let mut printed_rows = Vec::new();
    let mut warnings = 0usize;
    for r in &records {
        let case = &r.check.case;
        let mut row = prefix(r);
        row.extend(["quadrature".into(), fmt_num(case.lhs), fmt_num(case.rhs), fmt_num(0.0), "true".into()]);
        route_rows.push(row);
        for route in &r.check.routes {
            let mut row = prefix(r);
            row.extend([
                route.route.clone(),
                fmt_num(route.lhs),
                fmt_num(route.rhs),
                fmt_num(route.discrepancy),
                verdict(route.agrees).into(),
            ]);
            route_rows.push(row);
        }
        for form in &r.check.printed {
            let mut row = prefix(r);
            row.extend([
                form.form.clone(),
                fmt_opt(form.ratio),
                fmt_opt(case.ratio),
                fmt_opt(form.discrepancy),
                verdict(form.consistent).into(),
                form.note.clone(),
            ]);
            printed_rows.push(row);
            if !form.consistent {
                warnings += 1;
                eprintln!("warning: {} check {} ({}): {}", r.kind, r.index, form.form, form.note);
            }
        }
    }
    let head = ["check", "index", "curvature", "p", "eta1", "eta2", "a", "b"];
    let mut header: Vec<&str> = head.to_vec();
    header.extend(["route", "lhs", "rhs", "discrepancy", "agrees"]);
    out.csv("hypergeo_routes.csv", &header, &route_rows)?;
    let mut header: Vec<&str> = head.to_vec();
    header.extend(["form", "ratio", "quadrature_ratio", "discrepancy", "consistent", "note"]);
    out.csv("hypergeo_printed.csv", &header, &printed_rows)?;

    let routes_agree = records.iter().all(|r| r.check.routes.iter().all(|x| x.agrees));
    let pass = suite.passed && routes_agree;

    #[derive(Serialize)]
    struct Report<'a> {
        suite: &'a SuiteReport,
        routes_agree: bool,
        printed_form_warnings: usize,
        pass: bool,
        checks: &'a [CheckRecord],
    }
    out.json(
        "hypergeo.json",
        &Report { suite: &suite, routes_agree, printed_form_warnings: warnings, pass, checks: &records },
    )?;
    Ok(Outcome {
        pass,
        summary: format!(
            "series {}, reductions {}, Pfaff {}, F1 transform {}, routes agree: {routes_agree}, \
             {warnings} printed-form warnings",
            fmt_num(suite.series_max_error),
            fmt_num(suite.reduction_max_error),
            fmt_num(suite.pfaff_max_residual),
            fmt_num(suite.f1_transform_max_residual),
        ),
    })
}
