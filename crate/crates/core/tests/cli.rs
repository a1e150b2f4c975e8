use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

fn mincf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mincf"))
        .args(args)
        .env_remove("MINCF_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_data(dir: &Path, name: &str, values: &[f64]) -> PathBuf {
    let p = dir.join(name);
    let text: String = values.iter().map(|v| format!("{v}\n")).collect();
    fs::write(&p, text).unwrap();
    p
}

fn exp_data(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Exp1.sample(&mut rng)).collect()
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

#[test]
fn test_command_reports_and_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_data(dir.path(), "x.txt", &exp_data(30, 1));
    let out1 = dir.path().join("r1.json");
    let out2 = dir.path().join("r2.json");
    let common = ["test", "--family", "weibull", "--data", data.to_str().unwrap(), "--replicates", "500", "--seed", "5"];

    let a = mincf(&[&common[..], &["--workers", "1", "--out", out1.to_str().unwrap()]].concat());
    assert!(a.status.success(), "{}", stderr(&a));
    let b = mincf(&[&common[..], &["--workers", "3", "--out", out2.to_str().unwrap()]].concat());
    assert!(b.status.success(), "{}", stderr(&b));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());

    let report: serde_json::Value = serde_json::from_slice(&fs::read(&out1).unwrap()).unwrap();
    assert_eq!(report["family"], "weibull");
    assert_eq!(report["n"], 30);
    assert_eq!(report["seed"], 5);
    assert_eq!(report["replicates"], 500);
    assert_eq!(report["gammas"].as_array().unwrap().len(), 3);
    let rows = report["results"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        let p = r["p_value"].as_f64().unwrap();
        assert!(p > 0.0 && p <= 1.0);
        assert!(r["statistic"].as_f64().unwrap() >= 0.0);
    }
    assert!(report["estimate"]["params"]["phi"].as_f64().unwrap() > 0.0);
}

#[test]
fn csv_with_header_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.csv");
    let body: String = exp_data(12, 3).iter().map(|v| format!("{v}\n")).collect();
    fs::write(&p, format!("strength\n{body}\n\n")).unwrap();
    let o = mincf(&["test", "--family", "frechet", "--data", p.to_str().unwrap(), "--replicates", "200", "--gamma", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("n = 12"));
}

#[test]
fn nonpositive_value_is_an_input_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    fs::write(&p, "1.2\n0.7\n\n-1.0\n2.0\n").unwrap();
    let o = mincf(&["test", "--family", "weibull", "--data", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn missing_file_and_bad_flags_are_input_errors() {
    let o = mincf(&["test", "--family", "weibull", "--data", "/nonexistent/data.txt"]);
    assert_eq!(o.status.code(), Some(2));
    let o = mincf(&["test", "--family", "lognormal", "--data", "x"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let p = write_data(dir.path(), "two.txt", &[1.0, 2.0]);
    let o = mincf(&["test", "--family", "weibull", "--data", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn degenerate_sample_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_data(dir.path(), "flat.txt", &[2.5; 10]);
    let o = mincf(&["test", "--family", "weibull", "--data", p.to_str().unwrap(), "--replicates", "200"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn critvals_are_reproducible_and_ordered_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "critvals", "--family", "pareto", "--n", "10,15", "--gamma", "0.5,5", "--replicates", "400", "--seed", "8",
    ];
    let a = mincf(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    let b = mincf(&[&args[..], &["--workers", "2", "--cache-dir", cache.to_str().unwrap()]].concat());
    assert!(b.status.success(), "{}", stderr(&b));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 4);
    // Served from the cache the second time.
    let out = dir.path().join("cv.json");
    let c = mincf(&[&args[..], &["--cache-dir", cache.to_str().unwrap(), "--out", out.to_str().unwrap()]].concat());
    assert_eq!(stdout(&a), stdout(&c));

    let report: serde_json::Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    let mut by_cell: HashMap<(u64, String), Vec<(f64, f64)>> = HashMap::new();
    for r in report["table"].as_array().unwrap() {
        let key = (r["n"].as_u64().unwrap(), r["gamma"].to_string());
        by_cell
            .entry(key)
            .or_default()
            .push((r["alpha"].as_f64().unwrap(), r["critical_value"].as_f64().unwrap()));
    }
    assert_eq!(by_cell.len(), 4);
    for rows in by_cell.values() {
        assert_eq!(rows.iter().map(|r| r.0).collect::<Vec<_>>(), vec![0.01, 0.05, 0.10]);
        assert!(rows[0].1 >= rows[1].1 && rows[1].1 >= rows[2].1, "{rows:?}");
    }
}

#[test]
fn test_and_critvals_share_nulls() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let data = write_data(dir.path(), "x.txt", &exp_data(9, 4));
    let cache_s = cache.to_str().unwrap();
    let o = mincf(&[
        "critvals", "--family", "weibull", "--n", "9", "--gamma", "1", "--replicates", "300", "--seed", "1", "--cache-dir", cache_s,
    ]);
    assert!(o.status.success());
    let o = mincf(&[
        "test", "--family", "weibull", "--data", data.to_str().unwrap(), "--gamma", "1", "--replicates", "300", "--seed", "1",
        "--cache-dir", cache_s,
    ]);
    assert!(o.status.success());
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 1);
}

fn read_csv(path: &Path) -> Vec<HashMap<String, String>> {
    csv::Reader::from_path(path).unwrap().deserialize().map(|r| r.unwrap()).collect()
}

#[test]
fn power_study_desk_config_matches_reference_columns() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("table3_desk.json");
    fs::copy(config_path("table3_desk.json"), &config).unwrap();
    let o = mincf(&["power-study", "--config", config.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));

    let rows = read_csv(&dir.path().join("table3_desk.csv"));
    assert_eq!(rows.len(), 18);
    // Pareto test, n = 20, (T_0.5, T_1, T_5) in percent.
    let reference: HashMap<&str, [f64; 3]> = [
        ("P(1,1)", [5.0, 5.0, 5.0]),
        ("W(1.2,1)+1", [38.0, 36.0, 38.0]),
        ("W(1.5,1)+1", [62.0, 61.0, 63.0]),
        ("G(1,1)+1", [18.0, 18.0, 19.0]),
        ("HN(1)+1", [47.0, 51.0, 55.0]),
        ("CH(1.5)+1", [73.0, 74.0, 76.0]),
    ]
    .into_iter()
    .collect();
    for r in &rows {
        assert_eq!(r["family"], "pareto");
        assert_eq!(r["n"], "20");
        let g = ["0.5", "1", "5"].iter().position(|g| *g == r["gamma"]).unwrap();
        let want = reference[r["alternative"].as_str()][g];
        let got: f64 = r["rate_percent"].parse().unwrap();
        assert!((got - want).abs() <= 4.0, "{} γ={}: {got} vs {want}", r["alternative"], r["gamma"]);
    }

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("table3_desk.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["crit_replicates"], 4000);
    assert_eq!(manifest["config"]["seed"], 3);
    assert_eq!(manifest["failures"].as_array().unwrap().len(), 0);
    assert_eq!(manifest["results"].as_array().unwrap().len(), 18);
}

#[test]
fn power_study_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("s.json");
    fs::write(
        &config,
        r#"{"families":["frechet"],"gammas":[1],"sample_sizes":[10],"alternatives":["F(2,1)","HN(1)"],"replicates":150,"crit_replicates":300,"seed":21}"#,
    )
    .unwrap();
    let csv1 = dir.path().join("a.csv");
    let csv2 = dir.path().join("b.csv");
    let a = mincf(&["power-study", "--config", config.to_str().unwrap(), "--csv", csv1.to_str().unwrap(), "--workers", "1"]);
    let b = mincf(&["power-study", "--config", config.to_str().unwrap(), "--csv", csv2.to_str().unwrap(), "--workers", "4"]);
    assert!(a.status.success() && b.status.success(), "{}", stderr(&a));
    assert_eq!(fs::read(&csv1).unwrap(), fs::read(&csv2).unwrap());
    let c = mincf(&["power-study", "--config", config.to_str().unwrap(), "--csv", csv2.to_str().unwrap(), "--seed", "22"]);
    assert!(c.status.success());
    assert_ne!(fs::read(&csv1).unwrap(), fs::read(&csv2).unwrap());
}

#[test]
fn power_study_rejects_bad_alternative_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{"families":["weibull"],"alternatives":["W(1,1)","XYZ(2)"],"seed":1}"#).unwrap();
    let o = mincf(&["power-study", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("XYZ(2)"), "{}", stderr(&o));

    fs::write(&config, r#"{"families":["weibull"],"alternatives":["W(1,1)"],"alpha":2,"seed":1}"#).unwrap();
    let o = mincf(&["power-study", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn null_only_config_gives_nominal_rates() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("null_only.json");
    fs::copy(config_path("null_only.json"), &config).unwrap();
    let o = mincf(&["power-study", "--config", config.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("null_only.csv"));
    assert_eq!(rows.len(), 12);
    for r in rows {
        let rate: f64 = r["rate_percent"].parse().unwrap();
        // Binomial sd at N = 2000 is 0.5pp; the critical value adds a little.
        assert!((rate - 5.0).abs() <= 2.0, "{r:?}");
    }
}
