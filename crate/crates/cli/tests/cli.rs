use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heegner-lab"))
        .args(args)
        .env_remove("HEEGNER_LAB_CAP")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn lattice_info_cubic() {
    let out = run(&["lattice", "info", "--name", "Lambda_C"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["level"], 3);
    assert_eq!(v["discriminant"]["divisors"], serde_json::json!([3]));
}

#[test]
fn lattice_info_sharp_is_trivial() {
    let v = json(&run(&["lattice", "info", "--name", "Lambda_sharp"]));
    assert_eq!(v["order"], 1);
    assert_eq!(v["discriminant"]["divisors"], serde_json::json!([]));
}

#[test]
fn bad_parameters_exit_two() {
    let out = run(&["lattice", "info", "--name", "Lambda_HK_prim", "--n", "2", "--delta", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n ≡ 3 (mod 4)"));
    assert_eq!(run(&["lattice", "info", "--name", "Nope"]).status.code(), Some(2));
    assert_eq!(run(&["bound"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--g", "1"]).status.code(), Some(2));
    assert_eq!(run(&["embed", "--d", "3"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--g-range", "5:2"]).status.code(), Some(2));
}

#[test]
fn weil_exit_codes() {
    let out = run(&["weil", "check", "--name", "Lambda_GM", "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["relations"]["pass"], true);
    let tight = run(&["weil", "check", "--name", "Lambda_C", "--tol", "1e-18"]);
    assert_eq!(tight.status.code(), Some(1));
    assert_eq!(json(&tight)["relations"]["pass"], false);
    assert_eq!(run(&["weil", "check", "--name", "Lambda_sharp"]).status.code(), Some(0));
    assert_eq!(run(&["weil", "check", "--name", "Lambda_HK"]).status.code(), Some(2));
}

#[test]
fn certificate_for_genus_eight() {
    let v = json(&run(&["bound", "--g", "8", "--n-max", "10"]));
    let routes: Vec<&str> = v["routes"].as_array().unwrap().iter().map(|r| r["route"].as_str().unwrap()).collect();
    assert_eq!(routes, vec!["A", "C(7)", "C(6)", "C(3)", "uniform"]);
}

#[test]
fn genus_range_gives_one_document_per_genus() {
    let out = run(&["bound", "--g-range", "2:100"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let gs: Vec<i64> = text
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["g"].as_i64().unwrap())
        .collect();
    assert_eq!(gs, (2..=100).collect::<Vec<_>>());
}

#[test]
fn embed_fourteen() {
    let v = json(&run(&["embed", "--d", "14"]));
    assert_eq!(v["det_check"]["lhs"], "7/64");
    assert_eq!(v["det_check"]["pass"], true);
}

#[test]
fn heegner_subcommands() {
    let v = json(&run(&["heegner", "cubic", "--d", "14"]));
    assert_eq!(v["index"]["n"], "7/3");
    let v = json(&run(&["heegner", "gm", "--d", "12"]));
    assert_eq!(v["indices"][0]["n"], "3/2");
    let v = json(&run(&["heegner", "hk", "--n", "3", "--delta", "2", "--d", "6"]));
    assert_eq!(v["index"]["n"], "1/1");
    assert_eq!(run(&["heegner", "hk", "--n", "2", "--delta", "2", "--d", "6"]).status.code(), Some(2));
    let v = json(&run(&["heegner", "hilb", "--g", "10", "--n", "5"]));
    assert_eq!(v["heegner_index"]["n"], "9/20");
    let out = run(&["heegner", "cubic", "--d-range", "1:20"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 7);
}

#[test]
fn csv_reports() {
    let out = run(&["admissible", "--d", "26", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("input,clause,pass"));
    assert_eq!(lines.next(), Some("26,A,true"));
    let out = run(&["growth", "sandwich", "--k", "4", "--m-max", "50", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 51);
    assert_eq!(run(&["bound", "--g", "8", "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn growth_commands() {
    let v = json(&run(&["growth", "estimate", "--k", "11", "--m-max", "1000"]));
    let slope = v["slope"].as_f64().unwrap();
    assert!((10.0..=10.1).contains(&slope));
    assert_eq!(run(&["growth", "sandwich", "--k", "2"]).status.code(), Some(2));
    let v = json(&run(&["growth", "divisors", "--n-max", "20000"]));
    assert_eq!(v["pass"], true);
}

#[test]
fn series_file_and_output_file() {
    let dir = std::env::temp_dir().join(format!("heegner-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let series = dir.join("series.csv");
    let body: String = (1..=12).map(|i| format!("{i},{}\n", (i as f64).powi(3))).collect();
    std::fs::write(&series, body).unwrap();
    let v = json(&run(&["growth", "estimate", "--series", series.to_str().unwrap()]));
    assert!((v["slope"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    let out_file = dir.join("out.json");
    let out = run(&["embed", "--d", "2", "--out", out_file.to_str().unwrap()]);
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_file).unwrap()).unwrap();
    assert_eq!(v["det_check"]["lhs"], "1/64");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn meta_envelope_keeps_payload() {
    let plain = json(&run(&["bound", "--g", "14"]));
    let wrapped = json(&run(&["bound", "--g", "14", "--meta"]));
    assert_eq!(wrapped["payload"][0], plain);
    assert_eq!(wrapped["meta"]["tool"], "heegner-lab");
}

#[test]
fn cap_environment_variable() {
    let out = Command::new(env!("CARGO_BIN_EXE_heegner-lab"))
        .args(["lattice", "info", "--name", "Lambda_GM"])
        .env("HEEGNER_LAB_CAP", "2")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["discriminant"]["q_scope"], "generators");
}
