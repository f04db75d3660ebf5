use std::process::{Command, Output};

use sprlab::{parse_ordinal, StepFun, C64};

fn sprlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sprlab"))
        .args(args)
        .env("SPRLAB_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = sprlab(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> Option<i32> {
    sprlab(args).status.code()
}

#[test]
fn ordinal_calculator() {
    assert_eq!(stdout(&["ord", "w+1 ⊕ w"]), "w+1 ⊕ w = w*2+1\n");
    assert_eq!(stdout(&["ord", "1+w"]), "1+w = w\n");
    assert_eq!(stdout(&["ord", "w*2 ⊙2 > w*3"]), "w*4 > w*3: true\n");
    let out = sprlab(&["ord", "w^"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 2"));
    let json: serde_json::Value = serde_json::from_str(&stdout(&["ord", "w^w", "--format", "json"])).unwrap();
    assert_eq!(json[0]["kind"], "limit");
}

#[test]
fn derived_sets() {
    assert_eq!(stdout(&["cb", "w^2", "2"]), "{w^2} (singleton)\n");
    assert_eq!(stdout(&["cb", "w", "2"]), "empty\n");
    assert_eq!(stdout(&["cb", "w^2", "1"]), "limit points {w*y : 1 <= y <= w}, maximum w^2\n");
    assert_eq!(code(&["cb", "w^2", "w^^"]), Some(2));
}

fn image(json: &str) -> StepFun {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    serde_json::from_value(v["image"].clone()).unwrap()
}

#[test]
fn build_c0_vector() {
    let x = image(&stdout(&["build", "c0", "--n", "2"]));
    let at = |s: &str| x.eval(&parse_ordinal(s).unwrap()).unwrap();
    let half = C64::new(0.5, 0.0);
    assert_eq!(at("2"), C64::new(1.0, 0.0));
    for zero in ["1", "3", "w", "w+1", "w+2", "w*3+1", "w^2"] {
        assert_eq!(at(zero), C64::new(0.0, 0.0), "at {zero}");
    }
    assert_eq!(at("w+3"), half);
    assert_eq!(at("w+4"), C64::new(0.0, 0.5));
    for block in ["w*2+1", "w*2+7", "w*3"] {
        assert_eq!(at(block), half, "at {block}");
    }
}

#[test]
fn build_real_and_errors() {
    let u = image(&stdout(&["build", "real", "--alpha", "1"]));
    assert_eq!(u.top(), &parse_ordinal("w^2").unwrap());
    assert!(u.is_constant());
    assert_eq!(u.top_value(), C64::new(1.0, 0.0));

    let f = r#"{"field":"real","top":[[1,1]],"pieces":[{"end":3,"value":[1.0,0.0]},{"end":[[1,1]],"value":[-1.0,0.0]}]}"#;
    let out = stdout(&["build", "complex", "--alpha", "1", "--input", f]);
    let tf = image(&out);
    assert_eq!(tf.sup_norm(), 1.0);
    assert!(out.contains("\"rotated\""));

    assert_eq!(code(&["build", "real", "--alpha", "w^"]), Some(2));
    assert_eq!(code(&["build", "real", "--alpha", "1", "--input", "/nonexistent/f.json"]), Some(3));
}

#[test]
fn verify_is_reproducible_and_catches_the_mutant() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = (0..2).map(|i| dir.path().join(format!("r{i}.json")).display().to_string()).collect();
    for p in &paths {
        assert_eq!(code(&["verify", "all", "--budget", "10", "--seed", "7", "--out", p]), Some(0));
    }
    let (a, b) = (std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
    assert_eq!(a, b);
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 7);

    assert_eq!(
        code(&["verify", "overlap", "--budget", "5", "--mutant-tail-offset", "1e-3"]),
        Some(1)
    );
    assert_eq!(code(&["verify", "all", "--budget", "0"]), Some(2));
    assert_eq!(code(&["verify", "everything"]), Some(2));
    assert_eq!(code(&["verify", "ordinal", "--out", "/nonexistent/dir/r.json"]), Some(3));
}

#[test]
fn estimates() {
    let csv = stdout(&["estimate", "--alpha", "1,2,w", "--field", "real", "--budget", "100", "--format", "csv"]);
    let again = stdout(&["estimate", "--alpha", "1,2,w", "--field", "real", "--budget", "100", "--format", "csv"]);
    assert_eq!(csv, again);
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("alpha,field,samples,worst_ratio,certificate,pass"));
    let overlap: Vec<&str> = rows.filter(|r| r.contains(",overlap,")).collect();
    assert_eq!(overlap.len(), 3);
    assert!(overlap.iter().all(|r| r.ends_with(",true")));

    let json = stdout(&["estimate", "--alpha", "1", "--field", "complex", "--budget", "100"]);
    let reports: serde_json::Value = serde_json::from_str(&json).unwrap();
    let certs = reports[0]["certificates"].as_array().unwrap();
    assert!(certs.iter().any(|c| c["name"] == "re-correlation" && c["passed"] == true));
    assert!(reports[0]["delta"].is_array());

    assert_eq!(code(&["estimate", "--alpha", "1", "--budget", "0"]), Some(2));
    assert_eq!(code(&["estimate", "--alpha", "1", "--tol", "0"]), Some(2));
}
