use std::path::Path;
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", self.stdout))
    }
}

fn run(dir: &Path, args: &[&str]) -> Run {
    run_env(dir, args, &[])
}

fn run_env(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mqwitness"));
    cmd.args(args).current_dir(dir).env_remove("WITNESS_N_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let files = [
        ("ghz3.json", r#"{"family": "ghz", "params": {"n": 3}}"#),
        ("w3.json", r#"{"family": "w", "params": {"n": 3}}"#),
        ("w4.json", r#"{"family": "w", "params": {"n": 4}}"#),
        ("psi4.json", r#"{"family": "psi4"}"#),
        ("d24.json", r#"{"family": "dicke", "params": {"m": 2, "n": 4}}"#),
        // |Φ+> ⊗ |0>
        ("phi_zero.json", r#"{"n": 3, "amplitudes": [[0.7071067811865476,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0.7071067811865476,0],[0,0]]}"#),
        ("product.json", r#"{"n": 2, "amplitudes": [[0.5,0],[0.5,0],[0.5,0],[0.5,0]]}"#),
        ("psmq_d24.json", r#"{"n": 4, "dicke_coeffs": [[0,0],[0,0],[1,0],[0,0],[0,0]]}"#),
        ("psmq_binomial.json", r#"{"n": 3, "dicke_coeffs": [[0.216,0],[0.4988306325798366,0],[0.665107510106449,0],[0.512,0]]}"#),
        ("psmq_split.json", r#"{"n": 3, "dicke_coeffs": [[0,0],[0.7071067811865476,0],[0,0],[0.7071067811865476,0]]}"#),
        ("bad.json", "{\n  \"n\": 3,\n  \"amplitudes\": [[1, 0],\n}"),
    ];
    for (name, body) in files {
        std::fs::write(dir.path().join(name), body).unwrap();
    }
    dir
}

#[test]
fn classify_examples() {
    let dir = workspace();
    let r = run(dir.path(), &["--json", "classify", "ghz3.json"]).json();
    assert_eq!(r["genuinely_entangled"], true);
    assert_eq!(r["smq"]["accepted"], false);
    assert_eq!(r["smq"]["rejection"]["reason"], "zero_term_present");

    let r = run(dir.path(), &["--json", "classify", "w4.json"]).json();
    assert_eq!(r["genuinely_entangled"], true);
    assert_eq!(r["smq"]["accepted"], true);
    assert_eq!(r["bipartition_ranks"].as_array().unwrap().len(), 7);

    let r = run(dir.path(), &["--json", "classify", "phi_zero.json"]).json();
    assert_eq!(r["genuinely_entangled"], false);
}

#[test]
fn classify_errors() {
    let dir = workspace();
    let r = run(dir.path(), &["classify", "bad.json"]);
    assert_ne!(r.code, 0);
    assert!(r.stderr.contains("bad.json:4:"), "{}", r.stderr);

    let r = run_env(dir.path(), &["classify", "w4.json"], &[("WITNESS_N_CAP", "3")]);
    assert_ne!(r.code, 0);
    assert!(r.stderr.contains("exceeds the cap"), "{}", r.stderr);
}

#[test]
fn build_examples() {
    let dir = workspace();
    let r = run(dir.path(), &["--json", "build", "psi4.json", "--out", "w_psi4.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.json()["expectation"].as_f64().unwrap() < 0.0);
    assert!(dir.path().join("w_psi4.json").exists());

    let r = run(dir.path(), &["--json", "build", "product.json"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json()["genuinely_entangled"], false);

    let r = run(dir.path(), &["--json", "build", "w3.json", "--b", "0.5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let j = r.json();
    assert_eq!(j["b"], 0.5);
    assert_eq!(j["inequality"]["b_upper"], "inf");
    assert!(j["expectation"].as_f64().unwrap() < 0.0);

    let r = run(dir.path(), &["build", "w3.json", "--b", "-1"]);
    assert_eq!(r.code, 64);
}

#[test]
fn build_rejects_b_outside_range() {
    let dir = workspace();
    let r = run(dir.path(), &["--json", "build", "ghz3.json"]);
    let b_upper = r.json()["inequality"]["b_upper"].as_f64().unwrap();
    let too_big = format!("{}", 2.0 * b_upper);
    let r = run(dir.path(), &["build", "ghz3.json", "--b", &too_big]);
    assert_eq!(r.code, 64, "{}", r.stderr);
}

#[test]
fn decompose_examples() {
    let dir = workspace();
    assert_eq!(run(dir.path(), &["build", "w3.json", "--out", "w_w3.json"]).code, 0);
    assert_eq!(run(dir.path(), &["build", "psi4.json", "--out", "w_psi4.json"]).code, 0);

    let r = run(dir.path(), &["--json", "decompose", "w_w3.json", "--out", "dec.json"]).json();
    assert_eq!(r["count"], 7);
    assert!(dir.path().join("dec.json").exists());
    let r = run(dir.path(), &["--json", "decompose", "w_w3.json", "--scheme", "w3opt"]).json();
    assert_eq!(r["count"], 5);
    let r = run(dir.path(), &["--json", "decompose", "w_psi4.json"]).json();
    assert_eq!(r["count"], 13);
    assert!(r["residual"].as_f64().unwrap() <= 1e-10);

    let r = run(dir.path(), &["decompose", "w_psi4.json", "--scheme", "w3opt"]);
    assert_eq!(r.code, 64);
}

#[test]
fn tolerance_examples() {
    let dir = workspace();
    assert_eq!(run(dir.path(), &["build", "--named", "dicke24", "--out", "w_d24.json"]).code, 0);
    let r = run(dir.path(), &["--json", "tolerance", "w_d24.json", "d24.json"]).json();
    assert!((r["p_max"].as_f64().unwrap() - 2.0 / 9.0).abs() <= 1e-9);

    assert_eq!(run(dir.path(), &["build", "ghz3.json", "--out", "w_ghz3.json"]).code, 0);
    let r = run(dir.path(), &["--json", "tolerance", "w_ghz3.json", "ghz3.json", "--optimize-b"]).json();
    assert!((r["p_max"].as_f64().unwrap() - 0.3336).abs() <= 5e-3);
    assert!(r["b_star"].as_f64().is_some());

    assert_eq!(run(dir.path(), &["build", "--named", "w_prime", "--n", "4", "--out", "w_wp4.json"]).code, 0);
    let r = run(dir.path(), &["--json", "tolerance", "w_wp4.json", "w4.json"]).json();
    assert!((r["p_max"].as_f64().unwrap() - 36.0 / 91.0).abs() <= 1e-9);

    let r = run(dir.path(), &["--json", "tolerance", "w_d24.json", "w4.json"]);
    assert_eq!(r.code, 3);
    assert_eq!(r.json()["detected"], false);
}

#[test]
fn symmetric_examples() {
    let dir = workspace();
    let r = run(dir.path(), &["--json", "symmetric", "psmq_d24.json"]).json();
    assert_eq!(r["classification"]["verdict"], "fully_entangled");

    // (0.6|0> + 0.8|1>)^{⊗3} in the Dicke basis
    let r = run(dir.path(), &["--json", "symmetric", "psmq_binomial.json"]).json();
    assert_eq!(r["classification"]["verdict"], "fully_separable");
    let ratio = &r["ratio"];
    assert!((ratio[0].as_f64().unwrap() - 4.0 / 3.0).abs() <= 1e-6, "{ratio}");

    let r = run(dir.path(), &["--json", "symmetric", "psmq_split.json"]).json();
    assert_eq!(r["classification"]["verdict"], "fully_entangled");
}

#[test]
fn config_file_and_flags() {
    let dir = workspace();
    std::fs::write(dir.path().join("run.toml"), "seed = 5\nrestarts = 8\n").unwrap();
    let r = run(dir.path(), &["--config", "run.toml", "selftest"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    std::fs::write(dir.path().join("bad.toml"), "n_cap = 40\n").unwrap();
    assert_eq!(run(dir.path(), &["--config", "bad.toml", "selftest"]).code, 64);
    assert_eq!(run(dir.path(), &["--config", "missing.toml", "selftest"]).code, 64);
    assert_eq!(run_env(dir.path(), &["selftest"], &[("WITNESS_N_CAP", "0")]).code, 64);
    assert_eq!(run(dir.path(), &["--help"]).code, 0);
}

#[test]
fn same_seed_same_bytes() {
    let dir = workspace();
    let a = run(dir.path(), &["--json", "--seed", "3", "selftest"]);
    let b = run(dir.path(), &["--json", "--seed", "3", "selftest"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
}
