use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_contact-mech"));
    c.env_remove("CONTACT_MECH_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn simulate(dir: &Path, config: &str) -> Output {
    let path = dir.join("config.json");
    fs::write(&path, config).unwrap();
    bin().args(["simulate", "--config", path.to_str().unwrap()]).output().unwrap()
}

fn last_row(csv: &str) -> Vec<f64> {
    csv.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect()
}

fn reports(out: &Output) -> Vec<Value> {
    serde_json::from_slice::<Vec<Value>>(&out.stdout).unwrap()
}

const REEB: &str = r#"{"schema": 1, "system": {"kind": "hamiltonian", "expression": "z"},
    "initial_state": [0, 1, 1], "t_span": [0, 1], "step": 0.001, "monitors": ["H", "R"],
    "output": {"trajectory": "out.csv", "diagnostics": "diag.json"}}"#;

#[test]
fn reeb_decay_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(dir.path(), REEB);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,q,p,z,H,R(H)");
    assert!(!csv.contains('\r'));
    let row = last_row(&csv);
    assert_eq!(row[0], 1.0);
    assert!((row[3] - (-1f64).exp()).abs() < 1e-8, "{row:?}");
    let diag: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("diag.json")).unwrap()).unwrap();
    assert_eq!(diag["pass"], true);
    assert_eq!(diag["samples"], 1001);
}

#[test]
fn simulate_is_byte_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    simulate(a.path(), REEB);
    simulate(b.path(), REEB);
    for f in ["out.csv", "diag.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn herglotz_conserved_quantity_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"schema": 1,
        "system": {"kind": "lagrangian", "expression": "qdot^2/2 - q^2/2 - gamma*z", "constants": {"gamma": 0.2}},
        "initial_state": [1, 0, 0], "t_span": [0, 5], "step": 0.001, "monitors": ["E", "conserved_I"],
        "output": {"trajectory": "h.csv", "diagnostics": "h.json"}}"#;
    let out = simulate(dir.path(), cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("h.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header, ["t", "q", "qdot", "z", "E", "I"]);
    let i: Vec<f64> = lines.map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    let spread = i.iter().fold(0.0f64, |m, v| m.max((v - i[0]).abs()));
    assert!(spread <= 1e-5 * i[0].abs(), "{spread}");
}

#[test]
fn malformed_config_exits_one_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    for (cfg, field) in [
        (REEB.replace("0.001", "\"small\""), "step"),
        (REEB.replace("[0, 1, 1]", "[0, 1]"), "initial_state"),
        (REEB.replace("\"z\"", "\"z * (q\""), "system.expression"),
        ("{\"schema\": 1".to_string(), "EOF"),
    ] {
        let out = simulate(dir.path(), &cfg);
        assert_eq!(out.status.code(), Some(1));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(field), "{field}: {err}");
    }
    assert_eq!(run(["simulate", "--config", "/nonexistent.json"].as_ref()).status.code(), Some(1));
}

#[test]
fn blow_up_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = REEB.replace("\"z\"", "\"-z^2\"").replace("[0, 1]", "[0, 2]");
    let out = simulate(dir.path(), &cfg);
    assert_eq!(out.status.code(), Some(2));
    let diag: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("diag.json")).unwrap()).unwrap();
    assert!(diag["blowup_at"].as_f64().unwrap() < 1.1);
    assert_eq!(diag["pass"], false);
}

#[test]
fn seed_flag_beats_environment_beats_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = REEB.replace("\"schema\": 1", "\"schema\": 1, \"seed\": 5");
    let path = dir.path().join("config.json");
    fs::write(&path, cfg).unwrap();
    let seed_of = |env: Option<&str>, flag: Option<&str>| {
        let mut c = bin();
        c.args(["simulate", "--config", path.to_str().unwrap()]);
        if let Some(e) = env {
            c.env("CONTACT_MECH_SEED", e);
        }
        if let Some(f) = flag {
            c.args(["--seed", f]);
        }
        assert!(c.output().unwrap().status.success());
        let diag: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("diag.json")).unwrap()).unwrap();
        diag["seed"].as_u64().unwrap()
    };
    assert_eq!(seed_of(None, None), 5);
    assert_eq!(seed_of(Some("8"), None), 8);
    assert_eq!(seed_of(Some("8"), Some("2")), 2);
}

#[test]
fn verify_with_zero_samples_is_vacuous() {
    let out = run(&["verify", "maps", "--samples", "0"]);
    assert!(out.status.success());
    let reps = reports(&out);
    assert!(!reps.is_empty());
    assert!(reps.iter().all(|r| r["pass"] == true && r["vacuous"] == true && r["samples"] == 0));
}

#[test]
fn verify_legendrian_passes() {
    let out = run(&["verify", "legendrian", "--samples", "50", "--seed", "3"]);
    assert!(out.status.success());
    let reps = reports(&out);
    for name in ["harmonic", "damped", "degenerate"] {
        let key = format!("legendre equivalence [{name}]");
        assert!(reps.iter().any(|r| r["name"] == key.as_str() && r["pass"] == true), "{key}");
    }
}

#[test]
fn verify_seed_changes_samples_not_verdicts() {
    let a = run(&["verify", "maps", "--samples", "20", "--seed", "1"]);
    let b = run(&["verify", "maps", "--samples", "20", "--seed", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn thermo_subcommands() {
    let chain = run(&["thermo", "legendre-chain"]);
    assert!(chain.status.success());
    let reps = reports(&chain);
    assert_eq!(reps.len(), 4);
    assert!(reps.iter().all(|r| r["pass"] == true && r["samples"] == 100));

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("gas.csv");
    let flow = run(&["thermo", "flow", "--trajectory", csv.to_str().unwrap()]);
    assert!(flow.status.success());
    let reps = reports(&flow);
    for key in
        ["gas R(H) = -1", "gas contact flow isothermal and isochoric", "gas evolution flow isothermal and isochoric"]
    {
        assert!(reps.iter().any(|r| r["name"] == key && r["pass"] == true), "{key}");
    }
    assert!(fs::read_to_string(csv).unwrap().starts_with("t,S,V,N,T,negP,mu,U,H\n"));

    assert!(run(&["thermo", "morse", "--r", "8.314"]).status.success());
    assert!(run(&["thermo", "potentials", "--u0", "2", "--c", "2.5"]).status.success());
}

#[test]
fn thermo_rejects_nonpositive_constants() {
    for args in [["thermo", "potentials", "--c", "-1"], ["thermo", "flow", "--r", "0"]] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["verify", "everything"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
