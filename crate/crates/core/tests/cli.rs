use std::process::{Command, Output};

use serde_json::Value;

fn ibeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ibeta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

#[test]
fn eval_b_one_is_exact_power() {
    let o = ibeta(&["eval", "--a", "100", "--b", "1", "--x", "0.9", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["value"].as_f64().unwrap(), 0.9f64.powf(100.0));
    assert_eq!(v["n_used"], 1);
    for key in ["error_estimate", "flags", "terms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn eval_fixed_terms_text() {
    let o = ibeta(&["eval", "--a", "400", "--b", "2.5", "--x", "0.95", "--terms", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("n_used         4"), "{out}");
    let value: f64 = out
        .lines()
        .next()
        .unwrap()
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(value > 0.0 && value < 1.0);
}

#[test]
fn invalid_arguments_exit_two_and_name_the_flag() {
    for (args, flag) in [
        (vec!["eval", "--a", "-1", "--b", "2", "--x", "0.5"], "--a"),
        (vec!["eval", "--a", "10", "--b", "2", "--x", "1.5"], "--x"),
        (vec!["eval", "--a", "10", "--b", "0", "--x", "0.5"], "--b"),
        (vec!["verify", "--grid", "bogus"], "--grid"),
    ] {
        let o = ibeta(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(flag), "{args:?}: {}", stderr(&o));
        assert_eq!(stderr(&o).trim().lines().count(), 1);
    }
}

#[test]
fn help_exits_zero() {
    let o = ibeta(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sweep"));
}

#[test]
fn coeffs_recurrence_at_b_one_fails() {
    let o = ibeta(&[
        "coeffs",
        "--b",
        "1",
        "--xi",
        "0.5",
        "--n-max",
        "4",
        "--method",
        "recurrence",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--method series"), "{}", stderr(&o));
    let o = ibeta(&[
        "coeffs", "--b", "1", "--xi", "0.5", "--n-max", "4", "--method", "series",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn coeffs_both_methods_agree() {
    let o = ibeta(&["coeffs", "--b", "2.5", "--xi", "0.3", "--n-max", "8", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("discrepancy"), "{text}");
}

#[test]
fn fseq_both_columns() {
    let o = ibeta(&[
        "fseq", "--a", "100", "--b", "2.5", "--xi", "0.1", "--n-max", "6", "--method", "both",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("quadrature") && out.contains("rel_diff"), "{out}");
    assert!(out.lines().count() >= 7);
}

#[test]
fn compare_at_unit_x_has_no_classical_column() {
    let o = ibeta(&[
        "compare", "--a", "300", "--b", "3", "--x", "1", "--terms", "3", "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["oracle_value"].as_f64(), Some(1.0));
    assert!(v.get("hyp_value").is_none());
    assert!(v.get("uniform_value").is_some());
}

#[test]
fn compare_shows_classical_breakdown() {
    let o = ibeta(&[
        "compare", "--a", "400", "--b", "2.5", "--x", "0.95", "--terms", "4", "--json",
    ]);
    let v = json(&o);
    let u = v["uniform_rel_error"].as_f64().unwrap();
    let h = v["hyp_rel_error"].as_f64().unwrap();
    assert!(h > 100.0 * u, "uniform {u:e} classical {h:e}");
}

#[test]
fn sweep_csv_is_deterministic() {
    let args = [
        "sweep",
        "--a-geom",
        "100:800:2",
        "--x-list",
        "0.5,0.9,1",
        "--b",
        "2.5",
        "--terms",
        "4",
    ];
    let first = ibeta(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let second = ibeta(&args);
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("a,x,N,uniform_value,oracle_value,rel_error,error_estimate,hyp_rel_error,error")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4 * 3);
    assert!(rows[0].starts_with("1e2,5e-1,4,"), "{}", rows[0]);
    assert!(rows[11].starts_with("8e2,1e0,4,"), "{}", rows[11]);
    assert!(!text.contains('\r'));
}

#[test]
fn sweep_json_to_file() {
    let dir = std::env::temp_dir().join(format!("ibeta-sweep-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let o = ibeta(&[
        "sweep",
        "--a-list",
        "200,400",
        "--x-list",
        "0.9",
        "--b",
        "2.5",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_small_grid_passes() {
    let o = ibeta(&["verify", "--grid", "small", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    let suites = v.as_array().unwrap();
    assert!(suites.len() >= 9);
    assert!(suites.iter().all(|s| s["passed"] == true));
}

fn column(out: &str, name: &str) -> Vec<String> {
    let mut lines = out.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    // Summary rows after the table have fewer fields.
    lines
        .map(|l| l.split('\t').collect::<Vec<_>>())
        .filter(|f| f.len() == header.len())
        .map(|f| f[idx].to_string())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn eval_prints_exact_power() {
    let o = ibeta(&["eval", "--a", "100", "--b", "1", "--x", "0.9"]);
    assert!(
        stdout(&o).starts_with("value          2.6561398887587544e-5\n"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn eval_fixed_terms_json() {
    let o = ibeta(&[
        "eval", "--a", "100", "--b", "2.5", "--x", "0.9", "--terms", "5", "--json",
    ]);
    let v = json(&o);
    assert_eq!(v["n_used"], 5);
    assert_eq!(v["terms"].as_array().unwrap().len(), 5);
    // mpmath.betainc(100, 2.5, 0, 0.9, regularized=True)
    let value = v["value"].as_f64().unwrap();
    assert!(((value - 7.334_216_112_251_035e-4) / value).abs() < 1e-8, "{value:e}");
}

#[test]
fn coeffs_series_at_b_one() {
    let o = ibeta(&[
        "coeffs", "--b", "1", "--xi", "0.7", "--n-max", "5", "--method", "series",
    ]);
    let d: Vec<f64> = column(&stdout(&o), "series").iter().map(|s| num(s)).collect();
    assert_eq!(d, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
}

#[test]
fn coeffs_cross_method_discrepancy() {
    let o = ibeta(&["coeffs", "--b", "2", "--xi", "1", "--n-max", "6", "--method", "both"]);
    for d in column(&stdout(&o), "discrepancy") {
        assert!(num(&d) <= 1e-12);
    }
}

#[test]
fn fseq_cross_method_and_margins() {
    let o = ibeta(&[
        "fseq", "--a", "100", "--b", "2.5", "--xi", "0.105", "--n-max", "8", "--method", "both",
    ]);
    let out = stdout(&o);
    for d in column(&out, "rel_diff") {
        assert!(num(&d) <= 1e-9);
    }
    for m in column(&out, "margin").iter().skip(1) {
        assert!(num(m) >= 0.0, "{out}");
    }
}

#[test]
fn fseq_origin_closed_forms() {
    let o = ibeta(&["fseq", "--a", "50", "--b", "1", "--xi", "0", "--n-max", "4"]);
    let f = column(&stdout(&o), "recurrence");
    let mut fact = 1.0;
    for (n, v) in f.iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        let want = fact / 50f64.powi(n as i32 + 1);
        assert!(((num(v) - want) / want).abs() <= 4.0 * f64::EPSILON, "n={n}");
    }
    let o = ibeta(&["fseq", "--a", "10", "--b", "3", "--xi", "0", "--n-max", "3"]);
    let f = column(&stdout(&o), "recurrence");
    for (n, want) in [1e-3, 3e-4, 1.2e-4, 6e-5].iter().enumerate() {
        assert!(((num(&f[n]) - want) / want).abs() <= 4.0 * f64::EPSILON, "n={n}");
    }
}

fn compare_json(args: &[&str]) -> Value {
    let mut all = vec!["compare"];
    all.extend_from_slice(args);
    all.push("--json");
    json(&ibeta(&all))
}

#[test]
fn compare_exact_case_agrees() {
    let v = compare_json(&["--a", "100", "--b", "1", "--x", "0.5", "--terms", "1"]);
    let oracle = v["oracle_value"].as_f64().unwrap();
    for key in ["uniform_value", "hyp_value"] {
        let got = v[key].as_f64().unwrap();
        assert!(((got - oracle) / oracle).abs() <= 1e-12, "{key}");
    }
}

fn csv_column(text: &str, name: &str) -> Vec<String> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let idx = reader.headers().unwrap().iter().position(|h| h == name).unwrap();
    reader.records().map(|r| r.unwrap()[idx].to_string()).collect()
}

#[test]
fn sweep_reproduces_convergence_order() {
    let o = ibeta(&[
        "sweep",
        "--a-geom",
        "200:1600:2",
        "--x-list",
        "0.9",
        "--b",
        "2.5",
        "--terms",
        "4",
    ]);
    let errs: Vec<f64> = csv_column(&stdout(&o), "rel_error").iter().map(|s| num(s)).collect();
    assert_eq!(errs.len(), 4);
    for w in errs.windows(2) {
        let r = w[1] / w[0];
        assert!((1.0 / 64.0..=0.25).contains(&r), "{errs:?}");
    }
}

#[test]
fn sweep_exact_row() {
    let o = ibeta(&[
        "sweep", "--a-list", "100", "--x-list", "1.0", "--b", "1", "--terms", "1",
    ]);
    assert_eq!(csv_column(&stdout(&o), "rel_error"), vec!["0e0"]);
}

#[test]
fn sweep_uniformity_in_x() {
    let o = ibeta(&[
        "sweep",
        "--a-list",
        "500",
        "--x-list",
        "0.5,0.9,0.99,0.999,1.0",
        "--b",
        "2.5",
        "--terms",
        "4",
    ]);
    let errs: Vec<f64> = csv_column(&stdout(&o), "rel_error").iter().map(|s| num(s)).collect();
    let max = errs.iter().cloned().fold(0.0, f64::max);
    let min = errs.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max / min < 100.0, "{errs:?}");
}
