//! End-to-end runs of the `coinrep` binary. Set `BLESS=1` to rewrite the
//! golden files after an intended change.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn coinrep<I, S>(args: I) -> Run
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = Command::new(env!("CARGO_BIN_EXE_coinrep")).args(args).output().unwrap();
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn triple(v: &Value) -> [f64; 3] {
    ["p1", "p2", "p3"].map(|k| v[k].as_f64().unwrap())
}

fn max_diff(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}

fn check_golden(name: &str, text: &str) {
    let path = golden(name);
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(&path, text).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, want, "{name} differs from golden file");
}

#[test]
fn check_maximally_mixed() {
    let r = coinrep(["check".as_ref(), fixture("center.json").as_os_str()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["quantum"], true);
    assert_eq!(v["pure"], false);
    let s = v["entropy_vn"].as_f64().unwrap();
    assert!((s - std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn check_cube_corner_is_not_quantum() {
    let r = coinrep(["check".as_ref(), fixture("corner.json").as_os_str()]);
    assert_eq!(r.code, 2);
    let v = r.json();
    assert_eq!(v["quantum"], false);
    assert!(v["lambda"].is_null());
    assert!((v["margin"].as_f64().unwrap() + 0.5).abs() < 1e-15);
}

#[test]
fn check_spectrum() {
    let r = coinrep(["check".as_ref(), fixture("mixed.json").as_os_str(), "--q".as_ref(), "3".as_ref()]);
    assert_eq!(r.code, 0);
    let v = r.json();
    let root = (0.25f64 - 0.11).sqrt();
    let lambda: Vec<f64> = v["lambda"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((lambda[0] - (0.5 + root)).abs() < 1e-12);
    assert!((lambda[1] - (0.5 - root)).abs() < 1e-12);
    assert!((lambda[0] - 0.874166).abs() < 1e-6);
    assert_eq!(v["entropy_tsallis"]["q"], 3.0);
    let b = &v["bloch"];
    assert!((b["c"].as_f64().unwrap() - 0.6).abs() < 1e-15);
}

#[test]
fn input_errors_exit_one() {
    for name in ["future.json", "not_json.json", "missing.json"] {
        let r = coinrep(["check".as_ref(), fixture(name).as_os_str()]);
        assert_eq!(r.code, 1, "{name}: {}", r.stderr);
        assert!(r.stdout.is_empty());
        assert!(!r.stderr.is_empty());
    }
    assert_eq!(coinrep(["frobnicate"]).code, 1);
    assert_eq!(coinrep(["--help"]).code, 0);
}

#[test]
fn superpose_with_axis_key_keeps_one_input() {
    // A pure key on the z axis has weights (1, 0) or (0, 1).
    for (key, want) in [("up.json", "pure1.json"), ("down.json", "pure2.json")] {
        let r = coinrep([
            "superpose".as_ref(),
            fixture("pure1.json").as_os_str(),
            fixture("pure2.json").as_os_str(),
            fixture(key).as_os_str(),
            "--weights-convention".as_ref(),
            "key-population".as_ref(),
        ]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let got = triple(&r.json()["result"]);
        let want = triple(&read_json(&fixture(want))["payload"]);
        assert!(max_diff(got, want) < 1e-12, "{key}: {got:?} vs {want:?}");
    }
}

#[test]
fn superpose_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.json");
    let r = coinrep([
        "superpose".as_ref(),
        fixture("pure1.json").as_os_str(),
        fixture("pure2.json").as_os_str(),
        fixture("pure_key.json").as_os_str(),
        "--out".as_ref(),
        out.as_os_str(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let got = read_json(&out);
    assert_eq!(got["schema_version"], 1);
    assert_eq!(got["kind"], "probability-triple");
    let want = read_json(&golden("superpose_pure.json"));
    assert!(max_diff(triple(&got["payload"]), triple(&want["payload"])) < 1e-12);

    let report = r.json();
    assert!(report["purity_residual"].as_f64().unwrap() < 1e-12);
    assert!(report["normalizer"].as_f64().unwrap() > 0.0);
    let oracle = &report["oracle"];
    assert!(oracle["coefficient_state_deviation"].as_f64().unwrap() < 1e-12);
    assert!(oracle["weights_convention"].is_null());
    assert_eq!(oracle["operator_form_deviation"].as_object().unwrap().len(), 2);
}

#[test]
fn superpose_degenerate_denominator_exits_two() {
    let r = coinrep([
        "superpose".as_ref(),
        fixture("pure1.json").as_os_str(),
        fixture("down.json").as_os_str(),
        fixture("pure_key.json").as_os_str(),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("p3"), "{}", r.stderr);
}

#[test]
fn superpose_mixed_input_exits_two() {
    let r = coinrep([
        "superpose".as_ref(),
        fixture("center.json").as_os_str(),
        fixture("pure2.json").as_os_str(),
        fixture("pure_key.json").as_os_str(),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not pure"));
}

fn samples(traj: &Value) -> Vec<&Value> {
    traj["samples"].as_array().unwrap().iter().collect()
}

#[test]
fn evolve_zero_hamiltonian_is_constant() {
    let r = coinrep([
        "evolve".as_ref(),
        fixture("mixed.json").as_os_str(),
        "--obs".as_ref(),
        "0,0,0,0".as_ref(),
        "--t".as_ref(),
        "2".as_ref(),
        "--steps".as_ref(),
        "10".as_ref(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    let tr = &v["trajectories"][0];
    assert_eq!(tr["method"], "propagator");
    let s = samples(tr);
    assert_eq!(s.len(), 11);
    for row in s {
        assert!(max_diff(triple(row), [0.6, 0.7, 0.8]) < 1e-15);
    }
    assert!(v.get("max_deviation").is_none());
}

#[test]
fn evolve_both_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.json");
    let r = coinrep([
        "evolve".as_ref(),
        fixture("plus_x.json").as_os_str(),
        "--obs".as_ref(),
        "0,0,0.5,-0.5".as_ref(),
        "--t".as_ref(),
        "3.14159265".as_ref(),
        "--steps".as_ref(),
        "1000".as_ref(),
        "--method".as_ref(),
        "both".as_ref(),
        "--out".as_ref(),
        out.as_os_str(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = read_json(&out);
    assert!(v["max_deviation"].as_f64().unwrap() < 1e-8);
    let trs = v["trajectories"].as_array().unwrap();
    assert_eq!(trs.len(), 2);
    assert_eq!(trs[0]["method"], "propagator");
    assert_eq!(trs[1]["method"], "integrator");
    for tr in trs {
        let s = samples(tr);
        assert_eq!(s.len(), 1001);
        assert!(s.iter().all(|row| row["eigenvalue_drift"].as_f64().unwrap() < 1e-10));
        // Half a turn about z takes +x to -x.
        assert!(triple(s[1000])[0] < 1e-8);
    }
}

#[test]
fn evolve_rejects_bad_input() {
    let obs = |o: &str, state: &str| {
        coinrep([
            "evolve".as_ref(),
            fixture(state).as_os_str(),
            "--obs".as_ref(),
            o.as_ref(),
            "--t".as_ref(),
            "1".as_ref(),
        ])
    };
    assert_eq!(obs("0,0,1", "center.json").code, 1);
    assert_eq!(obs("0,0,one,1", "center.json").code, 1);
    assert_eq!(obs("-1,0,0.5,-2", "center.json").code, 0);
    let r = obs("0,0,1,0", "corner.json");
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not quantum"));
}

fn render(state: &str, layout: &str) -> String {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.svg");
    let r = coinrep([
        "render".as_ref(),
        fixture(state).as_os_str(),
        "--layout".as_ref(),
        layout.as_ref(),
        "--out".as_ref(),
        out.as_os_str(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn render_goldens() {
    for layout in ["triada", "tower", "triangle"] {
        let svg = render("triada.json", layout);
        assert_eq!(svg, render("triada.json", layout), "deterministic");
        check_golden(&format!("{layout}.svg"), &svg);
    }
}

#[test]
fn render_corner_triangle_coincides() {
    let svg = render("zero.json", "triangle");
    let polys: Vec<&str> = svg
        .lines()
        .filter(|l| l.contains("<polygon"))
        .map(|l| {
            let start = l.find("points=\"").unwrap() + 8;
            let len = l[start..].find('"').unwrap();
            &l[start..start + len]
        })
        .collect();
    assert_eq!(polys.len(), 2);
    assert_eq!(polys[0], polys[1]);
}

#[test]
fn render_io_failure_exits_one() {
    let r = coinrep([
        "render".as_ref(),
        fixture("center.json").as_os_str(),
        "--out".as_ref(),
        "/nonexistent-dir/out.svg".as_ref(),
    ]);
    assert_eq!(r.code, 1);
}

#[test]
fn matrix_parametrize_basis() {
    let r = coinrep(["matrix".as_ref(), "parametrize".as_ref(), fixture("diag10.json").as_os_str()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["kind"], "prob-table-15");
    for k in ["22", "33", "44"] {
        assert_eq!(v["payload"]["diag"][k], 1.0);
    }
    for (_, pair) in v["payload"]["pairs"].as_object().unwrap() {
        assert_eq!(pair, &serde_json::json!([0.5, 0.5]));
    }
}

fn amplitude(v: &Value) -> [[f64; 2]; 4] {
    let p = &v["payload"];
    let at = |part: &str, i: usize, j: usize| p[part][i][j].as_f64().unwrap();
    [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(i, j)| [at("re", i, j), at("im", i, j)])
}

#[test]
fn matrix_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.json");
    let back = dir.path().join("back.json");
    let r = coinrep([
        "matrix".as_ref(),
        "parametrize".as_ref(),
        fixture("amplitude.json").as_os_str(),
        "--out".as_ref(),
        table.as_os_str(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = coinrep(["matrix".as_ref(), "reconstruct".as_ref(), table.as_os_str(), "--out".as_ref(), back.as_os_str()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    check_golden("amplitude_round_trip.json", &std::fs::read_to_string(&back).unwrap());

    // Equal up to a global phase: |<a, b>| = 1 for unit vectors.
    let a = amplitude(&read_json(&fixture("amplitude.json")));
    let b = amplitude(&read_json(&back));
    let (mut re, mut im) = (0.0, 0.0);
    for k in 0..4 {
        re += a[k][0] * b[k][0] + a[k][1] * b[k][1];
        im += a[k][0] * b[k][1] - a[k][1] * b[k][0];
    }
    assert!((f64::hypot(re, im) - 1.0).abs() < 1e-12);
}

#[test]
fn matrix_domain_errors_exit_two() {
    let r = coinrep(["matrix".as_ref(), "reconstruct".as_ref(), fixture("inconsistent.json").as_os_str()]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    let r = coinrep(["matrix".as_ref(), "reconstruct".as_ref(), fixture("amplitude.json").as_os_str()]);
    assert_eq!(r.code, 1, "wrong kind is an input error");
}

#[test]
fn matrix_t_check() {
    let r = coinrep(["matrix", "t-check", "--samples", "2000"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert!(v["max_deviation"].as_f64().unwrap() < 1e-14);
    assert_eq!(v["is_permutation"], true);
    assert_eq!(v["samples"], 2000);
}

fn errata_json(extra: &[&str]) -> Value {
    let mut args = vec!["errata", "--json", "--samples", "2000"];
    args.extend_from_slice(extra);
    let r = coinrep(args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    r.json()
}

fn verdicts(v: &Value) -> Vec<(String, String)> {
    v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["id"].as_str().unwrap().to_string(), e["verdict"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn errata_default_run() {
    let r = coinrep(["errata"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("5 documented and 3 additional errata confirmed"));
    for id in ["bloch-c-component", "bloch-prefactor", "bistochastic-exponent", "kinetic-components", "t-block-list"] {
        assert!(r.stdout.contains(id), "{id}");
    }
}

#[test]
fn errata_json_ledger() {
    let v = errata_json(&[]);
    assert_eq!(v["documented_confirmed"], 5);
    assert_eq!(v["entries"].as_array().unwrap().len(), 8);
    assert!(verdicts(&v).iter().all(|(_, verdict)| verdict == "confirmed"));
    assert_eq!(v, errata_json(&[]), "same seed, same ledger");
}

#[test]
fn errata_verdicts_stable_across_seeds() {
    let base = verdicts(&errata_json(&["--seed", "0"]));
    for seed in ["1", "42", "123456789"] {
        assert_eq!(verdicts(&errata_json(&["--seed", seed])), base, "seed {seed}");
    }
}

#[test]
fn sequential_flag_gives_same_ledger() {
    assert_eq!(errata_json(&["--sequential"]), errata_json(&[]));
}
