use std::path::PathBuf;
use std::process::Command;

use coulomb_cli::{run, Command as Cmd, RunConfig};
use coulomb_core::series::TruncatedSeries;
use coulomb_core::BigRational;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn cfg(command: Cmd, file: &str) -> RunConfig {
    RunConfig::new(command, Some(data(file)))
}

fn hilbert(file: &str, order: u32) -> RunConfig {
    RunConfig { order, ..cfg(Cmd::Hilbert, file) }
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_coulomb")).args(args).output().expect("binary runs")
}

#[test]
fn hilbert_one_flavour() {
    let out = run(&hilbert("u1_one_flavor.th", 4));
    assert_eq!(out.status, 0);
    assert_eq!(out.stdout, "1 + 2*t + 3*t^2 + 4*t^3 + 5*t^4\n");
}

#[test]
fn pure_torus_is_divergent() {
    let out = run(&hilbert("u1_pure.th", 4));
    assert_eq!(out.status, 1);
    assert_eq!(out.stderr.trim(), "divergent: Coulomb branch is not a cone (witness coweight m=1, Δ=0)");
}

#[test]
fn present_charge_three() {
    let out = run(&RunConfig { order: 6, ..cfg(Cmd::Present, "u1_charge3.th") });
    assert_eq!(out.status, 0, "{}", out.stderr);
    assert!(out.stdout.starts_with("generators: w, x, y\n"), "{}", out.stdout);
    assert!(out.stdout.contains("relations:\n  x*y = w^3\n"), "{}", out.stdout);
}

#[test]
fn present_refuses_gl_factors() {
    let out = run(&cfg(Cmd::Present, "u2_one_flavor.th"));
    assert_eq!(out.status, 1);
    assert!(out.stderr.contains("gl factors"));
}

#[test]
fn from_quiver_anchors() {
    let out = run(&cfg(Cmd::FromQuiver, "jordan.quiver"));
    assert_eq!(out.stdout, "torus 1\nweight 0\nweight 1\n");
    let out = run(&cfg(Cmd::FromQuiver, "a1.quiver"));
    assert_eq!(out.stdout, "torus 1\nweight 1\nweight 1\n");
    let out = run(&cfg(Cmd::FromQuiver, "bad_edge.quiver"));
    assert_eq!(out.status, 2);
    assert!(out.stderr.contains("line 4"), "{}", out.stderr);
}

#[test]
fn from_quiver_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("jordan.th");
    let out = run(&RunConfig { output: Some(target.clone()), ..cfg(Cmd::FromQuiver, "jordan.quiver") });
    assert_eq!(out.status, 0);
    let written = std::fs::read_to_string(&target).unwrap();
    let th = coulomb_core::format::parse_theory(&written).unwrap();
    assert_eq!(th.weights(), &[vec![0], vec![1]]);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&hilbert("missing.th", 2)).status, 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.th");
    std::fs::write(&bad, "torus 1\nweight 1 2\n").unwrap();
    let out = run(&RunConfig { order: 2, ..RunConfig::new(Cmd::Hilbert, Some(bad)) });
    assert_eq!(out.status, 2);
    assert!(out.stderr.contains("line 2"));
    let shift = run(&RunConfig { shift: Some(vec![1, 2]), ..hilbert("u1_one_flavor.th", 2) });
    assert_eq!(shift.status, 2);
}

#[test]
fn poisson_brackets() {
    let out = run(&RunConfig { exprs: vec!["E[1]".into(), "E[-1]".into()], ..cfg(Cmd::Poisson, "u1_one_flavor.th") });
    assert_eq!(out.stdout, "E[0]\n");
    let out = run(&RunConfig { exprs: vec!["w2".into(), "E[1,-2]".into()], ..cfg(Cmd::Poisson, "rank2.th") });
    assert_eq!(out.stdout, "2*E[1,-2]\n");
    let out = run(&RunConfig { exprs: vec!["h".into(), "w".into()], ..cfg(Cmd::Poisson, "u1_one_flavor.th") });
    assert_eq!(out.status, 2);
    let out = run(&RunConfig { exprs: vec!["E[1".into(), "w".into()], ..cfg(Cmd::Poisson, "u1_one_flavor.th") });
    assert_eq!(out.status, 2);
}

#[test]
fn duality_table() {
    let out = run(&RunConfig { order: 4, ..cfg(Cmd::CheckDuality, "diagonal.seq") });
    assert_eq!(out.status, 0);
    assert!(out.stdout.ends_with("MATCH through t^4\n"), "{}", out.stdout);
    assert_eq!(out.stdout.lines().count(), 7);
}

#[test]
fn json_and_text_agree() {
    for (file, order, refined) in [("u1_one_flavor.th", 6, true), ("rank2.th", 6, true), ("u2_four_flavors.th", 6, false)] {
        let base = RunConfig { refined, ..hilbert(file, order) };
        let text = run(&base);
        let json = run(&RunConfig { json: true, ..base.clone() });
        assert_eq!(text.status, 0);
        let doc: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
        assert_eq!(doc["command"], "hilbert");
        let rank = if refined { doc["result"]["terms"][0]["fugacity"].as_array().unwrap().len() } else { 0 };
        let mut decoded = TruncatedSeries::zero(order, rank);
        for term in doc["result"]["terms"].as_array().unwrap() {
            let z: Vec<i64> = term["fugacity"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
            let c: BigRational = term["coeff"].as_str().unwrap().parse().unwrap();
            decoded.add_term(term["t"].as_u64().unwrap() as u32, z, c);
        }
        let parsed = TruncatedSeries::parse(text.stdout.trim(), order, rank).unwrap();
        assert_eq!(parsed, decoded, "{file}");
    }
}

#[test]
fn binary_exit_codes_and_seed() {
    let d = |f: &str| data(f).display().to_string();
    let ok = bin(&["hilbert", "--order", "2", &d("u1_one_flavor.th")]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "1 + 2*t + 3*t^2\n");
    assert_eq!(bin(&["hilbert", "--order", "2", &d("u1_pure.th")]).status.code(), Some(1));
    assert_eq!(bin(&["hilbert", &d("u1_pure.th")]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    let q = bin(&["quantize-check", &d("rank2.th"), "--trials", "5", "--seed", "42"]);
    assert_eq!(q.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&q.stdout).starts_with("seed: 42\n"));
    let neg = bin(&["poisson", &d("u1_one_flavor.th"), "--expr", "-w*E[1]", "E[-1]"]);
    assert_eq!(neg.status.code(), Some(0), "{}", String::from_utf8_lossy(&neg.stderr));
}

#[test]
fn repeated_runs_are_identical() {
    let d = data("rank2.th").display().to_string();
    let args = ["--json", "hilbert", "--order", "8", "--refined", d.as_str()];
    let one = Command::new(env!("CARGO_BIN_EXE_coulomb")).args(args).env("COULOMB_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_coulomb")).args(args).env("COULOMB_THREADS", "4").output().unwrap();
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(one.stdout, bin(&args).stdout);
}
