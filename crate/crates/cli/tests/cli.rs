//! End-to-end binary tests: exit codes, schema validation of every JSON
//! output, CSV layouts, and byte-identical determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tetrafractal"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .expect("repo root")
}

fn work_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tetrafractal-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("create work dir");
    dir
}

/// Validates a JSON value against one of the shipped schemas.
fn assert_schema(schema_file: &str, value: &serde_json::Value) {
    let path = repo_root().join("schemas").join(schema_file);
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).expect("read schema"))
            .expect("schema is JSON");
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(value).map(|e| e.to_string()).collect();
    assert!(
        errors.is_empty(),
        "{schema_file} violations: {}",
        errors.join("; ")
    );
}

fn json_stdout(args: &[&str], schema_file: &str) -> serde_json::Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).expect("JSON stdout");
    assert_schema(schema_file, &value);
    value
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["geometry", "--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["bogus"]).status.code(), Some(64));
    assert_eq!(run(&["geometry", "--bogus-flag"]).status.code(), Some(64));
    assert_eq!(run(&[]).status.code(), Some(64));
}

#[test]
fn domain_errors_exit_2() {
    // Depth beyond the supported maximum.
    assert_eq!(run(&["geometry", "--depth", "99"]).status.code(), Some(2));
    // Format mismatch.
    assert_eq!(run(&["truss", "--format", "json"]).status.code(), Some(2));
    assert_eq!(run(&["geometry", "--format", "csv"]).status.code(), Some(2));
    // Bad bound spec.
    assert_eq!(
        run(&["faults", "--bounds", "nonsense"]).status.code(),
        Some(2)
    );
    // Invalid thread-count variable.
    let out = bin()
        .args(["geometry", "--depth", "1"])
        .env("TETRAFRACTAL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_params_exit_2_with_diagnostics() {
    let dir = work_dir("badparams");
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\n  \"mass\": 0.7,\n  \"mas\": 1\n}\n").unwrap();
    let out = run(&["linearize", "--params", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "missing line diagnostics: {err}");
    assert!(err.contains("mas"), "missing field diagnostics: {err}");

    let broken = dir.join("broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    let out = run(&["sim", "--params", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn geometry_schema_and_values() {
    let v = json_stdout(&["geometry", "--depth", "2"], "geometry.schema.json");
    assert_eq!(v["depth"], 2);
    assert_eq!(v["module_poses"].as_array().unwrap().len(), 16);
    assert_eq!(v["rotors"].as_array().unwrap().len(), 16);
    let ratio = v["disk_report"]["area_ratio"].as_f64().unwrap();
    assert!((ratio - std::f64::consts::PI / (3.0 * 3.0f64.sqrt())).abs() < 1e-12);
    assert_eq!(v["disk_report"]["overlap_found"], false);
}

#[test]
fn inertia_schema_and_cross_check() {
    let v = json_stdout(
        &["inertia", "--n", "4", "--mass", "0.74", "--edge", "0.4891"],
        "inertia.schema.json",
    );
    assert_eq!(v["level"], 4);
    let mass = v["mass"].as_f64().unwrap();
    assert!((mass - 0.74 * 256.0).abs() < 1e-9);
    let err = v["check"]["recursion_vs_closed_form_error"].as_f64().unwrap();
    assert!(err < 1e-12);
}

#[test]
fn inertia_accepts_tensor_file() {
    let dir = work_dir("inertia");
    let path = dir.join("j.json");
    std::fs::write(
        &path,
        "[[0.012, 0.0, 0.0], [0.0, 0.011, 0.0], [0.0, 0.0, 0.014]]",
    )
    .unwrap();
    let v = json_stdout(
        &["inertia", "--n", "1", "--inertia", path.to_str().unwrap()],
        "inertia.schema.json",
    );
    assert_eq!(v["elementary"]["inertia"][2][2], 0.014);
}

#[test]
fn linearize_schema_and_trim() {
    let v = json_stdout(&["linearize"], "model.schema.json");
    assert_eq!(v["a"]["shape"][0], 12);
    assert_eq!(v["a"]["data"].as_array().unwrap().len(), 144);
    assert_eq!(v["b"]["shape"][1], 4);
    let hover = v["hover_speed"].as_f64().unwrap();
    assert!((hover - 426.01056324931665).abs() < 1e-9);
    assert_eq!(v["state_order"][3], "phi");
}

#[test]
fn assembly_maps_schema_and_shapes() {
    let v = json_stdout(&["assembly-maps", "--n", "2"], "maps.schema.json");
    assert_eq!(v["level"], 2);
    assert_eq!(v["rotor_count"], 64);
    assert_eq!(v["force"]["shape"][1], 64);
    assert_eq!(v["force"]["data"].as_array().unwrap().len(), 192);
    assert_eq!(v["rate_coupling"]["shape"][0], 3);
}

#[test]
fn params_override_changes_model() {
    let dir = work_dir("override");
    let path = dir.join("params.json");
    std::fs::write(&path, r#"{ "mass": 1.48 }"#).unwrap();
    let base = json_stdout(&["linearize"], "model.schema.json");
    let heavy = json_stdout(
        &["linearize", "--params", path.to_str().unwrap()],
        "model.schema.json",
    );
    let a = base["hover_speed"].as_f64().unwrap();
    let b = heavy["hover_speed"].as_f64().unwrap();
    // Doubling the mass scales the trim speed by sqrt(2).
    assert!((b / a - 2.0f64.sqrt()).abs() < 1e-12);
}

#[test]
fn truss_member_csv_layout() {
    let out = run(&["truss", "--n", "2", "--scenario", "top", "--payload", "10"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "member_id,node_i,node_j,length_m,axial_N,P_cr_N,margin_N"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 96);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    for record in reader.records() {
        let r = record.unwrap();
        assert_eq!(r.len(), 7);
        r.iter().skip(3).for_each(|f| {
            f.parse::<f64>().expect("numeric field");
        });
    }
}

#[test]
fn truss_sweep_csv_layout() {
    let out = run(&["truss", "--n", "1", "--scenario", "bottom3", "--sweep", "0:30:0.5"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("payload_kg,total_weight_N,module_thrust_N"));
    assert_eq!(lines.len(), 62);
    assert!(lines[1].starts_with("0,"));
    assert!(lines[61].starts_with("30,"));
}

#[test]
fn truss_rejects_payload_with_sweep() {
    let out = run(&["truss", "--payload", "5", "--sweep", "0:1:1"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn faults_schema_and_minimum() {
    let v = json_stdout(&["faults", "--max-card", "8"], "faults.schema.json");
    assert_eq!(v["min_failures"], 5);
    assert_eq!(
        v["witness"].as_array().unwrap(),
        &[
            serde_json::json!(0),
            serde_json::json!(3),
            serde_json::json!(4),
            serde_json::json!(9),
            serde_json::json!(12)
        ]
    );
    assert_eq!(v["allocation"]["shape"][0], 4);
    assert_eq!(v["allocation"]["shape"][1], 16);
    let stats = v["stats"].as_array().unwrap();
    assert_eq!(stats.len(), 6);
    for s in &stats[..5] {
        assert_eq!(s["infeasible"], 0, "cardinality {}", s["cardinality"]);
    }
    assert_eq!(stats[5]["infeasible"], 7);
    assert_eq!(stats[5]["feasible"], 4361);
}

#[test]
fn faults_measured_bound_and_sweep() {
    let v = json_stdout(
        &[
            "faults",
            "--bounds",
            "measured",
            "--max-card",
            "5",
            "--margins",
            "1.2,4.5",
        ],
        "faults.schema.json",
    );
    assert_eq!(v["min_failures"], 4);
    assert_eq!(v["bound"]["kind"], "hover_margin");
    let sweep = v["margin_sweep"].as_array().unwrap();
    assert_eq!(sweep.len(), 2);
    assert_eq!(sweep[0]["min_failures"], 1);
    assert_eq!(sweep[1]["min_failures"], 5);
}

#[test]
fn configs_schema_and_census() {
    let v = json_stdout(&["configs"], "configs.schema.json");
    assert_eq!(v["total"], 256);
    assert_eq!(v["torque_balanced"], 32);
    assert_eq!(v["hover_capable"], 28);
    assert_eq!(v["per_spin_class"], 14);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 3);
    let mut sizes: Vec<i64> = classes
        .iter()
        .map(|c| c["class_size"].as_i64().unwrap())
        .collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![4, 4, 6]);
    let members: usize = classes
        .iter()
        .map(|c| c["members"].as_array().unwrap().len())
        .sum();
    assert_eq!(members, 14);
}

#[test]
fn sim_csv_layout_and_settling() {
    let out = run(&["sim", "--perturb", "p=0.5", "--dt", "0.002", "--t", "6"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x,y,z,phi,theta,psi,u,v,w,p,q,r,w1,w2,w3,w4");
    assert_eq!(lines.len(), 3002);
    let last: Vec<f64> = lines[3001]
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(last.len(), 17);
    // Roll rate has settled by the end of the run.
    assert!(last[10].abs() < 0.01, "final p = {}", last[10]);
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("settled at"), "summary: {summary}");
}

#[test]
fn sim_rejects_out_of_envelope_perturbation() {
    assert_eq!(run(&["sim", "--perturb", "p=5"]).status.code(), Some(2));
    assert_eq!(run(&["sim", "--perturb", "zz=1"]).status.code(), Some(2));
}

#[test]
fn verify_all_passes_and_reports() {
    let dir = work_dir("verify");
    let path = dir.join("verify.json");
    let out = run(&["verify-all", "--out", path.to_str().unwrap()]);
    let table = stdout_str(&out);
    assert_eq!(
        out.status.code(),
        Some(0),
        "verify-all failed:\n{table}"
    );
    assert_eq!(table.matches("[PASS]").count(), 10);
    assert_eq!(table.matches("[FAIL]").count(), 0);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_schema("verify.schema.json", &v);
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["seed"], 2026);
}

#[test]
fn identical_inputs_are_byte_identical() {
    let dir = work_dir("determinism");
    for (tag, args) in [
        ("faults", vec!["faults", "--max-card", "5"]),
        ("sim", vec!["sim", "--perturb", "p=0.3,q=-0.2", "--t", "2"]),
        ("geometry", vec!["geometry", "--depth", "3"]),
        ("verify", vec!["verify-all", "--seed", "7"]),
    ] {
        let a = dir.join(format!("{tag}-a.out"));
        let b = dir.join(format!("{tag}-b.out"));
        for path in [&a, &b] {
            let mut full = args.clone();
            let out_arg;
            if tag == "verify" {
                out_arg = path.to_str().unwrap().to_string();
                full.extend(["--out", &out_arg]);
                run(&full);
            } else {
                out_arg = path.to_str().unwrap().to_string();
                full.extend(["--out", &out_arg]);
                let out = run(&full);
                assert!(out.status.success(), "{full:?}");
            }
        }
        let bytes_a = std::fs::read(&a).unwrap();
        let bytes_b = std::fs::read(&b).unwrap();
        assert_eq!(bytes_a, bytes_b, "{tag} output not deterministic");
        assert!(!bytes_a.is_empty());
    }
}

#[test]
fn params_schema_accepts_defaults_and_rejects_junk() {
    // The shipped params schema matches the parser's field set.
    let schema_ok = serde_json::json!({
        "mass": 0.74,
        "inertia": [[0.0111, 0.0, 0.0], [0.0, 0.0111, 0.0], [0.0, 0.0, 0.0111]],
        "drag_linear": [0.01, 0.01, 0.01]
    });
    assert_schema("params.schema.json", &schema_ok);

    let path = repo_root().join("schemas/params.schema.json");
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    assert!(!validator.is_valid(&serde_json::json!({ "mas": 1.0 })));
    assert!(!validator.is_valid(&serde_json::json!({ "mass": -1.0 })));

    // Gains schema likewise.
    let gains = serde_json::json!({
        "kp": [6.0, 6.0, 4.0],
        "ki": [9.0, 9.0, 4.0],
        "kd": [0.0, 0.0, 0.0],
        "integrator_limit": 2.0,
        "output_limit": 150.0
    });
    assert_schema("gains.schema.json", &gains);
}

#[test]
fn gains_file_is_honored() {
    let dir = work_dir("gains");
    let path = dir.join("gains.json");
    std::fs::write(
        &path,
        r#"{ "kp": [6.0, 6.0, 4.0], "ki": [9.0, 9.0, 4.0], "kd": [0.0, 0.0, 0.0],
            "integrator_limit": 2.0, "output_limit": 150.0 }"#,
    )
    .unwrap();
    let out = run(&[
        "sim",
        "--perturb",
        "p=0.4",
        "--gains",
        path.to_str().unwrap(),
        "--t",
        "4",
    ]);
    assert!(out.status.success());

    let bad = dir.join("bad-gains.json");
    std::fs::write(&bad, r#"{ "kp": [6.0, 6.0] }"#).unwrap();
    let out = run(&["sim", "--gains", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
