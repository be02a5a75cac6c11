use std::process::{Command, Output};

fn trxy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trxy")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

fn stderr_error(o: &Output) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).expect("stderr is json");
    v["error"].clone()
}

#[test]
fn list_curves_names_every_preset() {
    let o = trxy(&["list-curves", "--out", "json"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout_json(&o).as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap().to_string()).collect();
    for n in ["airy", "gamma", "dilog", "lambert-exp", "vertex", "gw-p1", "cubic"] {
        assert!(names.iter().any(|m| m == n), "{n} missing");
    }
}

#[test]
fn airy_one_one() {
    let o = trxy(&["compute", "--curve", "airy", "--g", "1", "--n", "1", "--method", "tr", "--jet-order", "1", "--base-points", "1", "--out", "json"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["method"], "tr");
    assert!(v["tensor"].is_object());
    // W_{1,1} = -1/(32 z^5) at z = 1 + e.
    let c = v["jet"]["coeffs"].as_array().unwrap();
    assert_eq!(c[0]["val"], "-1/32");
    assert_eq!(c[1]["val"], "5/32");
}

#[test]
fn methods_agree_on_lambert() {
    let run = |m: &str| {
        let o = trxy(&["compute", "--curve", "lambert-exp", "--g", "0", "--n", "3", "--method", m, "--jet-order", "1", "--out", "json"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout_json(&o)["jet"].clone()
    };
    assert_eq!(run("tr"), run("xy-cycles"));
}

#[test]
fn output_is_deterministic() {
    let args = ["compute", "--curve", "vertex", "--param", "f=2", "--g", "1", "--n", "2", "--jet-order", "2", "--seed", "7", "--out", "json"];
    let a = trxy(&args);
    let b = trxy(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn preconditions_exit_two_with_json() {
    let o = trxy(&["compute", "--curve", "airy", "--g", "0", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_error(&o)["code"], "invalid_argument");

    let o = trxy(&["compute", "--curve", "nope", "--g", "1", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_error(&o)["code"], "unknown_preset");

    let o = trxy(&["compute", "--curve", "airy", "--g", "0", "--n", "3", "--base-points", "1,2,1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = trxy(&["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));

    let o = trxy(&["compute", "--g", "x"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_error(&o)["code"], "usage");
}

#[test]
fn help_exits_zero() {
    assert!(trxy(&["--help"]).status.success());
    assert!(trxy(&["verify", "--help"]).status.success());
    assert!(trxy(&["--version"]).status.success());
}

#[test]
fn curve_file_toml() {
    let dir = std::env::temp_dir().join(format!("trxy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("airy.toml");
    std::fs::write(&path, "name = \"my-airy\"\nform = \"algebraic\"\n[x]\nrational = { num = [\"0\", \"0\", \"1\"] }\n[y]\nrational = { num = [\"0\", \"1\"] }\n").unwrap();
    let o = trxy(&["compute", "--curve-file", path.to_str().unwrap(), "--g", "1", "--n", "1", "--jet-order", "0", "--base-points", "1", "--out", "json"]);
    std::fs::remove_dir_all(&dir).ok();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["curve"], "my-airy");
    assert_eq!(v["jet"]["coeffs"][0]["val"], "-1/32");
}

#[test]
fn extract_values() {
    let value = |args: &[&str]| {
        let mut a = vec!["extract", "--out", "json"];
        a.extend_from_slice(args);
        let o = trxy(&a);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout_json(&o)["value"].as_str().unwrap().to_string()
    };
    assert_eq!(value(&["--invariant", "gw-p1", "--g", "2", "--b", "4"]), "1/1920");
    assert_eq!(value(&["--invariant", "gw-p1", "--g", "2", "--b", "2,2"]), "1/576");
    assert_eq!(value(&["--invariant", "gw-p1", "--g", "1", "--b", "2"]), "1/24");
    assert_eq!(value(&["--invariant", "gw-p1", "--g", "1", "--b", "2,1,1", "--contour", "3,1,2"]), value(&["--invariant", "gw-p1", "--g", "1", "--b", "2,1,1", "--method", "tr"]));
    assert_eq!(value(&["--invariant", "psi", "--g", "1", "--k", "1"]), "1/24");
    assert_eq!(value(&["--invariant", "psi", "--g", "2", "--k", "4", "--method", "xy"]), "1/1152");
    assert_eq!(value(&["--invariant", "rspin", "--r", "3", "--g", "0", "--k", "0,0,0", "--a", "1,1,2"]), "1");
    assert_eq!(value(&["--invariant", "hodge-linear", "--g", "1", "--k", "2"]), "1/24");
    assert_eq!(value(&["--invariant", "triple-hodge", "--f", "1", "--g", "1", "--k", "1"]), "-1/48");
}

#[test]
fn verify_dilog() {
    let o = trxy(&["verify", "--suite", "dilog", "--gmax", "5", "--out", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["suites"][0]["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_cauchy_is_seeded() {
    let a = trxy(&["verify", "--suite", "cauchy", "--seed", "3", "--out", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout_json(&a)["passed"], 1);
    assert_eq!(a.stdout, trxy(&["verify", "--suite", "cauchy", "--seed", "3", "--out", "json"]).stdout);
}

#[test]
fn verify_rspin() {
    assert_eq!(trxy(&["verify", "--suite", "rspin"]).status.code(), Some(0));
}
