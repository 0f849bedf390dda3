use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nalgebra::DMatrix;
use serde_json::Value;

use ising_ebic::diag::{sparse_eig_bounds, EigMethod};
use ising_ebic::ising::io::{read_samples_csv, write_model, write_samples_csv};
use ising_ebic::ising::{exact_sample, generate_lattice, Coupling, IsingParams, LatticeNeighbors};
use ising_ebic::RngSeed;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ising-ebic"))
        .args(args)
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_lattice_samples(dir: &Path, n: usize) -> (String, String) {
    let params = generate_lattice(2, LatticeNeighbors::Four, Coupling::Attractive, 0.5, RngSeed::new(0, 0)).unwrap();
    let samples = exact_sample(&params, n, RngSeed::new(1, 0)).unwrap();
    let model = dir.join("model.txt");
    let data = dir.join("samples.csv");
    write_model(&params, fs::File::create(&model).unwrap()).unwrap();
    write_samples_csv(&samples, fs::File::create(&data).unwrap()).unwrap();
    (model.to_str().unwrap().into(), data.to_str().unwrap().into())
}

#[test]
fn sample_then_select() {
    let dir = tempfile::tempdir().unwrap();
    let (model, _) = write_lattice_samples(dir.path(), 10);
    let out = dir.path().join("drawn.csv");
    let o = run(&[
        "sample",
        "--model",
        &model,
        "--n",
        "3000",
        "--seed",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let drawn = read_samples_csv(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!((drawn.n(), drawn.p()), (3000, 4));

    let report = dir.path().join("report.json");
    let o = run(&[
        "select",
        "--samples",
        out.to_str().unwrap(),
        "--method",
        "bic",
        "--gamma",
        "0.5",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v = json(&report);
    let edges: Vec<Vec<u64>> = serde_json::from_value(v["graph_and"]["edges"].clone()).unwrap();
    assert_eq!(edges, vec![vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3]]);
    assert_eq!(v["config"]["method"], "bic");
}

#[test]
fn diagnose_assumptions_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let params = IsingParams::from_edges(8, (0..7).map(|i| (i, i + 1, 0.4))).unwrap();
    let samples = exact_sample(&params, 500, RngSeed::new(2, 0)).unwrap();
    let path = dir.path().join("s.csv");
    write_samples_csv(&samples, fs::File::create(&path).unwrap()).unwrap();
    let out = dir.path().join("a.json");
    let o = run(&[
        "diagnose",
        "assumptions",
        "--samples",
        path.to_str().unwrap(),
        "--q",
        "3",
        "--method",
        "exhaustive",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    let oracle = sparse_eig_bounds(
        &DMatrix::from_row_slice(8, 8, &samples.second_moment()),
        3,
        EigMethod::Exhaustive,
    )
    .unwrap();
    assert_eq!(v["eig_exact"], true);
    assert!((v["min_sparse_eig"].as_f64().unwrap() - oracle.min).abs() < 1e-12);
    assert!((v["max_sparse_eig"].as_f64().unwrap() - oracle.max).abs() < 1e-12);

    let o = run(&[
        "diagnose",
        "assumptions",
        "--samples",
        path.to_str().unwrap(),
        "--q",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("q") && msg.contains("p"), "{msg}");
}

#[test]
fn diagnose_counterexample_reports_fractions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = run(&[
        "diagnose",
        "counterexample",
        "--q",
        "16",
        "--n",
        "1600",
        "--trials",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v = json(&out);
    assert!(v["heavy_fraction"].as_f64().unwrap() >= 0.40);
    assert!(v["exceed_fraction"].as_f64().unwrap() >= v["heavy_fraction"].as_f64().unwrap());
    assert_eq!(v["per_trial"].as_array().unwrap().len(), 200);
}

#[test]
fn diagnose_lemma4_and_monitor() {
    let dir = tempfile::tempdir().unwrap();
    let (model, samples) = write_lattice_samples(dir.path(), 800);
    let o = run(&["diagnose", "lemma4", "--model", &model, "--q", "2"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    // degree 2 exceeds q = 1
    assert_eq!(
        run(&["diagnose", "lemma4", "--model", &model, "--q", "1"])
            .status
            .code(),
        Some(2)
    );
    let o = run(&[
        "diagnose",
        "lr-monitor",
        "--samples",
        &samples,
        "--model",
        &model,
        "--node",
        "0",
        "--q",
        "3",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["true_support"], serde_json::json!([1, 2]));
}

#[test]
fn simulate_is_reproducible_and_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let common = [
        "simulate",
        "--scenario",
        "lattice4",
        "--p",
        "9",
        "--replicates",
        "3",
        "--seed",
        "5",
        "--gamma",
        "0,1",
        "--method",
        "bic,cv",
        "--rule",
        "or",
        "--n",
        "200",
    ];
    let mut args_a = common.to_vec();
    args_a.extend(["--out", a.to_str().unwrap()]);
    let mut args_b = common.to_vec();
    args_b.extend(["--out", b.to_str().unwrap(), "--serial"]);
    assert!(run(&args_a).status.success());
    assert!(run(&args_b).status.success());
    let ra = fs::read(a.join("report.json")).unwrap();
    assert_eq!(ra, fs::read(b.join("report.json")).unwrap());
    let summary = fs::read_to_string(a.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert!(lines[0].starts_with("method,gamma,rule,mean_psr,mean_fdr"));
    // bic at two gammas plus cv, OR rule only
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("bic,0,or,"));
    assert!(lines[3].starts_with("cv,,or,"));
    let v: Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["n"], 200);
    assert_eq!(v["sampler"], "exact");
}

#[test]
fn weather_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let p = 4;
    let params = IsingParams::from_edges(p, (0..p - 1).map(|i| (i, i + 1, 0.8))).unwrap();
    let mut layout = String::from("station,lat,lon\n");
    for i in 0..p {
        layout += &format!("S{i},{},-100\n", 40.0 + 0.4 * i as f64);
    }
    let dates: Vec<String> = (1980..2010)
        .flat_map(|y| (1..=12).flat_map(move |m| [1, 16].map(move |d| format!("{y}-{m:02}-{d:02}"))))
        .collect();
    let z = exact_sample(&params, dates.len(), RngSeed::new(3, 0)).unwrap();
    let mut data = String::from("station,lat,lon,date,prcp\n");
    for (k, d) in dates.iter().enumerate() {
        for s in 0..p {
            let value = if z.get(k, s) == 1 { "0.25" } else { "0" };
            data += &format!("S{s},{},-100,{d},{value}\n", 40.0 + 0.4 * s as f64);
        }
    }
    let files = [
        ("layout.csv", layout),
        ("data.csv", data),
        ("truth.txt", "0 1\n1 2\n2 3\n".to_string()),
    ];
    for (name, text) in &files {
        fs::write(dir.path().join(name), text).unwrap();
    }
    let path = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let out = dir.path().join("out");
    let o = run(&[
        "weather",
        "--data",
        &path("data.csv"),
        "--layout",
        &path("layout.csv"),
        "--truth",
        &path("truth.txt"),
        "--method",
        "bic,cv",
        "--gamma",
        "0,0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("table.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "method,rule,PSR%,FDR%,edges");
    assert_eq!(lines.len(), 1 + 3 * 2);
    assert!(lines.iter().any(|l| l.starts_with("BIC_0.5,AND,100.0,0.0")));
    let curves = fs::read_to_string(out.join("curves.csv")).unwrap();
    let header = curves.lines().next().unwrap();
    assert_eq!(header, "d,BIC_0_AND,BIC_0_OR,BIC_0.5_AND,BIC_0.5_OR,CV_AND,CV_OR,truth");
    assert_eq!(curves.lines().count(), 1 + 251);

    // corrupt one row: error names the line, usage-class exit
    let bad = files[1]
        .1
        .replacen("S0,40,-100,1980-01-16,0", "S0,40,-100,1980-01-16,abc", 1);
    fs::write(dir.path().join("bad.csv"), bad).unwrap();
    let o = run(&[
        "weather",
        "--data",
        &path("bad.csv"),
        "--layout",
        &path("layout.csv"),
        "--truth",
        &path("truth.txt"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn exit_codes() {
    // missing required flag
    assert_eq!(run(&["simulate"]).status.code(), Some(2));
    // non-square lattice
    assert_eq!(
        run(&["simulate", "--p", "10", "--replicates", "1"]).status.code(),
        Some(2)
    );
    // unreadable input is a runtime failure
    assert_eq!(
        run(&["select", "--samples", "/nonexistent/file.csv"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
