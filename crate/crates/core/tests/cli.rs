//! End-to-end runs of the `kplane` binary.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

struct Run {
    dir: TempDir,
}

impl Run {
    fn new(config: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("run.toml"), config).unwrap();
        Run { dir }
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn exec(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_kplane"))
            .args(args)
            .arg("--config")
            .arg(self.dir.path().join("run.toml"))
            .arg("--out")
            .arg(self.out())
            .output()
            .unwrap()
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.out().join(name)).unwrap()
    }
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows of a CSV written by the tool, after the comment and header.
fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(2).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

fn is_sha256(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase())
}

#[test]
fn euclidean_ball_demo_matches_slice_volume() {
    let run = Run::new(
        "seed = 5\n[transform]\ncurvature = 0\nn = 3\nk = 2\nd = [0.0, 0.5, 0.9, 1.0, 1.2]\n\
         [transform.profile]\nbreakpoints = [0.0, 1.0]\nvalues = [1.0]\n",
    );
    let o = run.exec(&["transform"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("transform: PASS"));

    let text = run.read("transform.csv");
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    let fields: Vec<&str> = comment.split(' ').collect();
    assert_eq!(fields[..3], ["#", "kplane", env!("CARGO_PKG_VERSION")]);
    assert!(is_sha256(fields[3].strip_prefix("config_sha256=").unwrap()));
    assert_eq!(fields[4], "seed=5");
    assert_eq!(lines.next(), Some("d,raw,weighted,oracle_raw,abs_diff"));

    // π (1 - d^2) for a disc of radius sqrt(1 - d^2)
    for r in rows(&text) {
        let want = PI * (1.0 - r[0] * r[0]).max(0.0);
        assert!((r[1] - want).abs() <= 1e-10 * want.max(1.0), "d={}: {} vs {want}", r[0], r[1]);
        assert_eq!(r[1], r[2]);
    }

    let json: serde_json::Value = serde_json::from_str(&run.read("transform.json")).unwrap();
    assert_eq!(json["meta"]["seed"], 5);
    assert_eq!(json["meta"]["config_sha256"].as_str().unwrap(), &fields[3]["config_sha256=".len()..]);
}

#[test]
fn sphere_constant_function_integrates_to_great_sphere_area() {
    let run = Run::new(&format!(
        "[transform]\ncurvature = 1\nn = 3\nk = 2\nd = [0.0]\n[transform.profile]\nbreakpoints = [0.0, {PI:?}]\nvalues = [1.0]\n"
    ));
    let o = run.exec(&["transform"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = &rows(&run.read("transform.csv"))[0];
    assert!((r[1] - 4.0 * PI).abs() < 1e-10, "{}", r[1]);
}

#[test]
fn rejected_inputs_exit_with_usage_code() {
    let cases = [
        ("transform", "[transform.profile]\nbreakpoints = [0.0]\nvalues = []\n", "profile"),
        ("endpoint", "[endpoint]\ncurvature = -1\nn = 4\nk = 1\n", "unsupported endpoint"),
        ("identities", "[identities]\nsamples = 10\nbogus = 1\n", "line 3"),
        ("lemma", "[lemma]\np = [0.5]\n", "lemma.p"),
        ("hypergeo", "[[hypergeo.gauss]]\ncurvature = 1\np = 2.0\neta1 = 0.5\neta2 = 1.0\nb = 0.5\n", "hypergeo.gauss[0].eta1"),
        ("transform", "[transform\n", "TOML"),
    ];
    for (cmd, config, needle) in cases {
        let run = Run::new(config);
        let o = run.exec(&[cmd]);
        assert_eq!(o.status.code(), Some(2), "{cmd} with {config:?}: {}", stderr(&o));
        assert!(stderr(&o).contains(needle), "{cmd}: {:?} lacks {needle:?}", stderr(&o));
    }
}

#[test]
fn missing_config_file_and_bad_arguments() {
    let o = Command::new(env!("CARGO_BIN_EXE_kplane"))
        .args(["identities", "--config", "/nonexistent/run.toml"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_kplane")).arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_kplane")).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn self_test_flips_every_command_to_failure() {
    let config = "[identities]\nsamples = 200\ntriangles = 200\n[lemma]\np = [1.0]\neta = [1.0]\ncases = 5\n\
                  [endpoint]\nprofiles = 4\n[hypergeo]\npoints = 5\n";
    for cmd in ["identities", "transform", "endpoint", "lemma", "hypergeo"] {
        let run = Run::new(config);
        assert_eq!(run.exec(&[cmd]).status.code(), Some(0), "{cmd}");
        let o = run.exec(&[cmd, "--self-test"]);
        assert_eq!(o.status.code(), Some(1), "{cmd}: {}", stderr(&o));
        assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    }
}

#[test]
fn endpoint_outputs_on_flat_space() {
    let run = Run::new("[endpoint]\ncurvature = 0\nn = 3\nk = 2\nprofiles = 6\n");
    let o = run.exec(&["endpoint"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(run.read("endpoint.csv").lines().nth(1), Some("profile,d,ratio"));

    let scale = rows(&run.read("endpoint_scale.csv"));
    let (lo, hi) = scale.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r[1]), hi.max(r[1])));
    assert_eq!(scale.len(), 5);
    assert!(hi / lo - 1.0 < 1e-6);

    // R^{k - n/p} with p = 0.8 * 3/2: growth 10^{1/2} as R falls from 1 to 0.1
    let probe = rows(&run.read("endpoint_probe.csv"));
    assert!(probe.windows(2).all(|w| w[1][1] > w[0][1]));
    let growth = probe.last().unwrap()[1] / probe[0][1];
    assert!((growth - 10f64.sqrt()).abs() < 1e-9, "{growth}");

    let json: serde_json::Value = serde_json::from_str(&run.read("endpoint.json")).unwrap();
    assert!(json["report"].is_object());
}

#[test]
fn tolerance_override_applies_to_selected_command() {
    let run = Run::new("[identities]\nsamples = 500\ntriangles = 500\n");
    let o = run.exec(&["identities", "--tol", "1e-40"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let o = run.exec(&["identities", "--tol", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hypergeo_writes_route_and_printed_tables() {
    let run = Run::new("[hypergeo]\npoints = 10\n");
    let o = run.exec(&["hypergeo"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["hypergeo_routes.csv", "hypergeo_printed.csv", "hypergeo.json"] {
        assert!(Path::new(&run.out().join(name)).exists(), "{name}");
    }
    // the printed forms with known typos are reported, not fatal
    assert!(stderr(&o).contains("warning:"));
}
