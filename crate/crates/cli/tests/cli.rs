use std::path::Path;
use std::process::{Command, Output};

use fillbound::chart::ChartJson;
use fillbound::corpus::gen_perturbed_chart;
use fillbound::io::{read_json, write_json, ComplexJson};

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fillbound")).args(args).current_dir(cwd).output().unwrap()
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn gen(dir: &Path, name: &str, generator: &str, params: &[&str]) {
    let mut args = vec!["gen", generator, "--out", name];
    for p in params {
        args.extend(["-p", p]);
    }
    let o = run(&args, dir);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
}

#[test]
fn pristine_instance_checks_clean() {
    let t = tempfile::tempdir().unwrap();
    gen(t.path(), "ts", "two_scale_bubble", &["ratio=4", "p=2"]);
    let o = run(&["check", "ts"], t.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let o = run(&["check", "ts", "--format", "json"], t.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["items"].as_array().unwrap().iter().all(|i| i["pass"] == true));
}

#[test]
fn negated_volume_is_named() {
    let t = tempfile::tempdir().unwrap();
    gen(t.path(), "tb", "tetra_boundary", &["scale=1"]);
    let p = t.path().join("tb/complex.json");
    let mut c: ComplexJson = read_json(&p).unwrap();
    let v = c.volumes.get_mut("0-1-2").unwrap();
    *v = -*v;
    write_json(&p, &c).unwrap();
    let o = run(&["check", "tb"], t.path());
    assert_eq!(o.status.code(), Some(1));
    let out = text(&o);
    assert!(out.lines().any(|l| l.starts_with("FAIL  complex") && l.contains("[0,1,2]")), "{out}");
}

#[test]
fn loose_chart_is_rejected() {
    let t = tempfile::tempdir().unwrap();
    gen(t.path(), "ts", "two_scale_bubble", &["ratio=4", "p=2"]);
    let p = t.path().join("ts/charts/B-2-1.json");
    let mut ch: ChartJson = read_json(&p).unwrap();
    let loose = ChartJson::from(&gen_perturbed_chart(2e-3, ch.radius, 32, 9));
    ch.metric_samples = loose.metric_samples;
    write_json(&p, &ch).unwrap();
    let o = run(&["check", "ts"], t.path());
    assert_eq!(o.status.code(), Some(1));
    let out = text(&o);
    assert!(out.lines().any(|l| l.starts_with("FAIL  chart B-2-1") && l.contains("bound 1e-3")), "{out}");
}

#[test]
fn fill_writes_report() {
    let t = tempfile::tempdir().unwrap();
    gen(t.path(), "tb", "tetra_boundary", &["scale=2"]);
    std::fs::write(
        t.path().join("c.json"),
        r#"{"degree":1,"terms":[{"simplex":[0,1],"coeff":1},{"simplex":[1,2],"coeff":1},{"simplex":[2,0],"coeff":1}]}"#,
    )
    .unwrap();
    let o = run(&["fill", "tb", "c.json", "--out", "r.json", "--seed", "11"], t.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let v: serde_json::Value = read_json(&t.path().join("r.json")).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["bound_holds"], true);
    assert!(v["mass"].as_f64().unwrap() <= 4.0 + 1e-9);
    assert!(v["branch_trace"].as_array().is_some());
}

#[test]
fn infeasible_inputs_exit_2() {
    let t = tempfile::tempdir().unwrap();
    gen(t.path(), "tb", "tetra_boundary", &["scale=1"]);
    std::fs::write(t.path().join("open.json"), r#"{"degree":1,"terms":[{"simplex":[0,1],"coeff":1}]}"#).unwrap();
    assert_eq!(run(&["fill", "tb", "open.json"], t.path()).status.code(), Some(2));
    std::fs::write(t.path().join("bad.json"), "{\n \"degree\": 1,\n \"terms\": [x]\n}").unwrap();
    let o = run(&["fill", "tb", "bad.json"], t.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("line 3"), "{}", text(&o));
    gen(t.path(), "ln", "lens_neck", &["p=2", "q=1", "layers=1"]);
    std::fs::write(t.path().join("g.json"), r#"{"degree":1,"terms":[]}"#).unwrap();
    let o = run(&["fill", "ln", "g.json"], t.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("H1"), "{}", text(&o));
    assert_eq!(run(&["gen", "nope", "--out", "x"], t.path()).status.code(), Some(2));
}

#[test]
fn hf1_csv_and_svg() {
    let t = tempfile::tempdir().unwrap();
    gen(t.path(), "tb", "tetra_boundary", &["scale=1"]);
    let o = run(&["hf1", "tb", "--l-max", "4", "--steps", "1", "--samples", "10", "--out", "."], t.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let csv = std::fs::read_to_string(t.path().join("hf1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let o = run(&["hf1", "tb", "--l-max", "4", "--steps", "8", "--samples", "30", "--out", "."], t.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(t.path().join("hf1.csv")).unwrap();
    let est: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(est.windows(2).all(|w| w[0] <= w[1]));
    let svg = std::fs::read_to_string(t.path().join("hf1.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn bounds_exact_column_only_when_small() {
    let t = tempfile::tempdir().unwrap();
    let p = |n: u64| format!(r#"{{"n_tilde":{n},"d":1.0,"b":0.0,"k_depth":1,"n_width":1,"h1":1,"epsilon":0.001}}"#);
    std::fs::write(t.path().join("small.json"), p(1)).unwrap();
    std::fs::write(t.path().join("big.json"), p(5)).unwrap();
    let o = run(&["bounds", "small.json", "--format", "csv"], t.path());
    assert_eq!(o.status.code(), Some(0));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("g1,") && out.contains("340/1"), "{out}");
    let o = run(&["bounds", "big.json", "--format", "json"], t.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["exact"].is_null());
    let a = run(&["bounds", "big.json"], t.path());
    let b = run(&["bounds", "big.json"], t.path());
    assert_eq!(a.stdout, b.stdout);
}
