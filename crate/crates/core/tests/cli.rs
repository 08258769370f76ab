use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tripartite::bell::w_correlator_closed;
use tripartite::cli::{
    exit_code, run_battery, BatteryConfig, Outcome, EXIT_INPUT, EXIT_IO, EXIT_OK,
    EXIT_VERIFICATION,
};
use tripartite::entanglement::EntanglementProfile;
use tripartite::qcore::UnitVector;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tripartite"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(report: &str, key: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no {key} in {report}"))
        .trim()
        .to_string()
}

const GHZ: &str = "[ghz]\ntheta = \"pi/4\"\ntheta3 = \"pi/2\"\n";
const W: &str = "[w]\nalpha = \"1/sqrt(3)\"\nbeta = \"1/sqrt(3)\"\ngamma = \"1/sqrt(3)\"\n";
const PRODUCT: &str = "raw = [[1, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0]]\n";

#[test]
fn analyze_examples() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (GHZ, "5.65685425", "violates"),
        (W, "4.35464843", "violates"),
        (PRODUCT, "4.00000000", "no violation"),
    ];
    for (text, smax, verdict) in cases {
        let path = write(dir.path(), "state.toml", text);
        let o = bin(&["analyze", path.to_str().unwrap(), "--starts", "10"]);
        assert_eq!(o.status.code(), Some(EXIT_OK));
        let r = stdout(&o);
        assert_eq!(field(&r, "smax_numeric"), smax, "{r}");
        assert_eq!(field(&r, "verdict"), verdict);
    }
    let path = write(dir.path(), "ghz.toml", GHZ);
    let r = stdout(&bin(&["analyze", path.to_str().unwrap(), "--starts", "5"]));
    assert_eq!(field(&r, "tau"), "1.00000000");
    assert_eq!(field(&r, "family"), "GHZ-class");
    assert_eq!(field(&r, "smax_closed"), "5.65685425 (high branch)");
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for text in ["[ghz]\ntheta = 1\n", "not toml", "[w]\nalpha = 1\nbeta = 1\ngamma = 1\n"] {
        let path = write(dir.path(), "bad.toml", text);
        let o = bin(&["analyze", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(EXIT_INPUT), "{text}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(bin(&["analyze", "/nonexistent/state.toml"]).status.code(), Some(EXIT_INPUT));
    assert_eq!(bin(&["sweep-ghz", "--steps", "1"]).status.code(), Some(EXIT_INPUT));
    assert_eq!(bin(&["sweep-w", "--c12", "0.3,x"]).status.code(), Some(EXIT_INPUT));
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(EXIT_INPUT));

    let state = write(dir.path(), "ghz.toml", GHZ);
    let settings = write(dir.path(), "settings.toml", "a = [0, 0]\n");
    let o = bin(&[
        "simulate",
        state.to_str().unwrap(),
        "--settings",
        settings.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_INPUT));
}

#[test]
fn unwritable_output_exits_3() {
    let o = bin(&["--out", "/nonexistent/dir/out.csv", "sweep-ghz", "--steps", "2", "--starts", "2"]);
    assert_eq!(o.status.code(), Some(EXIT_IO));
}

#[test]
fn ghz_sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = bin(&[
            "--seed", "3", "--jobs", "2", "--out", out.to_str().unwrap(),
            "sweep-ghz", "--steps", "5", "--starts", "10",
        ]);
        assert_eq!(o.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(out).unwrap()
    };
    let first = run("a.csv");
    assert_eq!(first, run("b.csv"));

    let mut lines = first.lines();
    assert_eq!(
        lines.next(),
        Some("theta,theta3,tau,c12_sq,smax_closed,smax_numeric,branch,gap")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 15);
    assert!(first.ends_with('\n'));
    for r in &rows {
        assert_eq!(r.len(), 8);
        let gap: f64 = r[7].parse().unwrap();
        assert!(gap.abs() <= 1e-3);
        if r[2] == "0" {
            assert_eq!(r[4], "4.00000000");
        }
    }
    assert_eq!(rows[0][1], "0.392699082");
}

#[test]
fn w_sweep_curves() {
    let o = bin(&["sweep-w", "--steps", "5", "--starts", "10", "--c12", "2/3"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c12,c23,c31,sum_c,smax_closed,smax_numeric,gap"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let top = rows.last().unwrap();
    assert!((top[3] - 2.0).abs() < 1e-8);
    assert!((top[4] - 4.3546).abs() < 1e-4);
    for w in rows.windows(2) {
        assert!(w[1][4] >= w[0][4] - 1e-9);
    }
    assert!(String::from_utf8_lossy(&o.stderr).contains("omitted"));
}

#[test]
fn simulate_reports() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "ghz.toml", GHZ);
    let o = bin(&["simulate", state.to_str().unwrap(), "--shots", "100"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let r = stdout(&o);
    assert_eq!(field(&r, "exact"), "5.65685425");
    let stderr: f64 = field(&r, "stderr").parse().unwrap();
    assert!(stderr > 0.05);
    let _: f64 = field(&r, "z_score").parse().unwrap();

    let settings = write(
        dir.path(),
        "settings.toml",
        "a = [\"pi/2\", 0]\na_prime = [\"pi/2\", \"pi/2\"]\nb = [\"pi/2\", 0]\n\
         b_prime = [\"pi/2\", \"pi/2\"]\nc = [\"pi/2\", 0]\nc_prime = [\"pi/2\", \"pi/2\"]\n",
    );
    let o = bin(&[
        "simulate", state.to_str().unwrap(), "--settings", settings.to_str().unwrap(),
        "--shots", "1000",
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
}

#[test]
fn verify_passes_on_a_correct_build() {
    let o = bin(&["verify", "--samples", "200"]);
    let r = stdout(&o);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{r}");
    assert!(r.contains("result: PASS"));
    for suite in ["w-correlator", "monogamy-haar", "branch-continuity", "mermin-factor", "ceiling-spectrum"] {
        assert!(r.lines().any(|l| l.starts_with(suite)), "{suite}");
    }
}

fn sign_flipped(p: &EntanglementProfile, a: &UnitVector, b: &UnitVector, c: &UnitVector) -> f64 {
    let (sa, ca) = a.polar().sin_cos();
    let (sb, cb) = b.polar().sin_cos();
    let (sc, cc) = c.polar().sin_cos();
    let (pa, pb, pc) = (a.azimuth(), b.azimuth(), c.azimuth());
    // wrong sign on the c23 term
    cb * (-ca * cc + p.c31 * sa * sc * (pa - pc).cos())
        + sb * (-p.c23 * ca * sc * (pb - pc).cos() + p.c12 * sa * cc * (pa - pb).cos())
}

#[test]
fn mutated_w_correlator_fails_verification() {
    let cfg = BatteryConfig {
        samples: 100,
        w_correlator: sign_flipped,
        ..BatteryConfig::default()
    };
    let report = run_battery(&cfg).unwrap();
    assert!(!report.passed());
    let suite = report.suite("w-correlator").unwrap();
    assert!(suite.failures > 0);
    assert!(!suite.kept.is_empty());
    assert!(report.suites.iter().filter(|s| s.failures > 0).count() == 1);
    let text = report.to_string();
    assert!(text.contains("result: FAIL"));
    assert!(text.contains("[[failure]]"));
    assert!(text.contains("suite = \"w-correlator\""));
    let outcome = Ok(Outcome {
        body: text,
        failed: !report.passed(),
    });
    assert_eq!(exit_code(&outcome), EXIT_VERIFICATION);

    let correct = run_battery(&BatteryConfig {
        samples: 100,
        w_correlator: w_correlator_closed,
        ..BatteryConfig::default()
    })
    .unwrap();
    assert!(correct.passed());
}
