use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chiraforce")).args(args).output().expect("binary runs")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chiraforce-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn model_json(energy_ev: f64, m_bar: [f64; 3]) -> String {
    format!(
        r#"{{
  "schema": 1,
  "label": "probe",
  "ground_energy_eV": 0.0,
  "states": [
    {{
      "energy_eV": {energy_ev},
      "mu_D": [1.0, 0.5, -0.2],
      "m_bar_bohr_magnetons": [{}, {}, {}],
      "Q_au": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    }}
  ]
}}
"#,
        m_bar[0], m_bar[1], m_bar[2]
    )
}

#[test]
fn estimate_reports_inverse_fine_structure() {
    let out = run(&["estimate", "--d-nm", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let ratio = v["ratio"].as_f64().unwrap();
    assert!((ratio - 137.036).abs() < 1e-3, "{ratio}");
    assert!((v["d"].as_f64().unwrap() - 1e-8).abs() < 1e-20);
}

#[test]
fn estimate_sweep_as_csv() {
    let out = run(&["estimate", "--sweep", "1,2,4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4, "{text}");
}

#[test]
fn analytic_average_of_shipped_tensor() {
    let out = run(&["avg", data("tensor_rank2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["averaged_tensor"]["rank"], 2);
}

#[test]
fn exact_and_float_averages_agree() {
    let tensor = data("tensor_rank2.json");
    let float = json(&run(&["avg", tensor.to_str().unwrap()]));
    let exact = run(&["avg", tensor.to_str().unwrap(), "--exact"]);
    assert_eq!(exact.status.code(), Some(0), "{}", String::from_utf8_lossy(&exact.stderr));
    let exact = json(&exact);
    assert_eq!(float["averaged_tensor"]["components"].as_array().unwrap().len(), 9);
    assert!(exact.to_string().len() > 10);
}

#[test]
fn energy_and_force_on_shipped_inputs() {
    let (model, beam, profile, positions) =
        (data("example_model.json"), data("beam_left_1064.json"), data("profile_gaussian.json"), data("positions_line.json"));
    let energy = run(&["energy", "--model", model.to_str().unwrap(), "--beam", beam.to_str().unwrap()]);
    assert_eq!(energy.status.code(), Some(0), "{}", String::from_utf8_lossy(&energy.stderr));
    let v = json(&energy);
    assert!(v["energy_shift"]["part_G"].as_f64().unwrap() != 0.0);

    let force = run(&[
        "force",
        "--model",
        model.to_str().unwrap(),
        "--beam",
        beam.to_str().unwrap(),
        "--profile",
        profile.to_str().unwrap(),
        "--positions",
        positions.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(force.status.code(), Some(0), "{}", String::from_utf8_lossy(&force.stderr));
    let text = String::from_utf8(force.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 16);
}

#[test]
fn linear_beam_has_no_chiral_part() {
    let out = run(&[
        "energy",
        "--model",
        data("example_model.json").to_str().unwrap(),
        "--beam",
        data("beam_linear_1064.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["energy_shift"]["part_G"].as_f64().unwrap().abs() <= 1e-10 * v["energy_shift"]["part_alpha"].as_f64().unwrap().abs());
}

#[test]
fn out_flag_writes_file() {
    let dest = std::env::temp_dir().join(format!("chiraforce-out-{}.json", std::process::id()));
    let out = run(&["estimate", "--d-nm", "2", "--out", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert!(written["ratio"].is_number());
    std::fs::remove_file(dest).ok();
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["estimate"]).status.code(), Some(2));
    assert_eq!(run(&["energy", "--exact", "--model", "x", "--beam", "y"]).status.code(), Some(2));
    assert_eq!(run(&["avg", "/nonexistent/tensor.json"]).status.code(), Some(2));
}

#[test]
fn malformed_model_reports_line() {
    let text = model_json(4.0, [0.1, 0.2, 0.3]).replace("\"mu_D\": [1.0, 0.5, -0.2],", "\"mu_D\": [1.0, 0.5 -0.2],");
    let path = temp_file("malformed.json", &text);
    let out = run(&["energy", "--model", path.to_str().unwrap(), "--beam", data("beam_left_1064.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("malformed.json:8:25:"), "{err}");
}

#[test]
fn near_resonance_exits_three() {
    // 1064 nm photons carry 1.165 eV.
    let path = temp_file("resonant.json", &model_json(1.17, [0.1, 0.2, 0.3]));
    let out = run(&["energy", "--model", path.to_str().unwrap(), "--beam", data("beam_left_1064.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_fails_on_achiral_model() {
    // No magnetic moment: part_G vanishes, so the circular checks must fail.
    let path = temp_file("achiral.json", &model_json(4.0, [0.0, 0.0, 0.0]));
    let out = run(&["verify", "--model", path.to_str().unwrap(), "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert!(v["failures"].as_array().unwrap().iter().any(|f| f == "circular_antisymmetry"));
}

#[test]
fn exact_verify_passes() {
    let out = run(&["verify", "--exact"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["exact_only"], true);
}
