use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn gaussq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gaussq-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// Data rows of a CSV table, skipping comment and header lines.
fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn g(n: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else {
        (n + 1.0) * (n + 1.0).ln() - n * n.ln()
    }
}

#[test]
fn capacity_memory_single_row_with_header() {
    let o = gaussq(&["capacity", "memory", "--mu", "0.8", "--kappa", "0.9", "--nbar", "1", "--energy", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# gaussq capacity memory "), "{first}");
    assert!(first.contains("seed=0") && first.contains("version="));
    let r = rows(&text);
    assert_eq!(r.len(), 1);
    assert!(r[0][4] > r[0][5], "water-filling beats the flat allocation");
}

#[test]
fn capacity_memory_without_memory_matches_closed_form() {
    let o = gaussq(&["capacity", "memory", "--mu", "0", "--kappa", "0.9", "--nbar", "1", "--energy", "8"]);
    let c = rows(&stdout(&o))[0][4];
    let exact = g(0.9 * 8.0 + 0.1) - g(0.1);
    assert!((c - exact).abs() < 1e-9, "{c} vs {exact}");
}

#[test]
fn threshold_and_bad_parameters_exit_2() {
    let o = gaussq(&["capacity", "memory", "--mu", "0.5", "--kappa", "2", "--nbar", "0", "--energy", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mu*kappa = 1"));
    let o = gaussq(&["capacity", "memory", "--mu", "1.5", "--kappa", "0.5", "--nbar", "0", "--energy", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mu"));
    assert_eq!(gaussq(&["capacity", "memory", "--mu", "0.5"]).status.code(), Some(2));
    assert_eq!(gaussq(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn waterfill_profiles() {
    let low = gaussq(&["waterfill", "--kappa", "0.9", "--mu", "0.8", "--nbar", "0.5", "--energy", "8", "--samples", "65"]);
    let text = stdout(&low);
    let r = rows(&text);
    assert_eq!(r.len(), 65);
    let meta = text.lines().last().unwrap();
    assert!(meta.starts_with("# lambda_mult=") && meta.contains(" z0=0 ") && meta.contains("capacity="), "{meta}");
    assert!(r.iter().all(|row| row[1] > 0.0));

    let high = stdout(&gaussq(&["waterfill", "--kappa", "0.9", "--mu", "0.8", "--nbar", "1.2", "--energy", "8", "--samples", "65"]));
    assert!(!high.lines().last().unwrap().contains(" z0=0 "));
    assert_eq!(rows(&high)[0][1], 0.0);

    let zero = stdout(&gaussq(&["waterfill", "--kappa", "0.6", "--mu", "0.8", "--nbar", "0", "--energy", "2", "--samples", "33"]));
    assert!(rows(&zero).iter().all(|row| row[1] > 0.0));
}

#[test]
fn region_endpoints() {
    let text = stdout(&gaussq(&["region", "--eta", "0.8", "--energy", "3", "--points", "11"]));
    let r = rows(&text);
    assert_eq!(r.len(), 11);
    assert_eq!(r[0][0], 0.0);
    assert!((r[0][1] - g(0.2 * 3.0)).abs() < 1e-10);
    assert!(r.iter().all(|row| row[2] >= row[1] - 1e-12));
    let deg = rows(&stdout(&gaussq(&["region", "--eta", "1", "--energy", "3", "--points", "5"])));
    assert!(deg.iter().all(|row| row[1] == 0.0));
}

#[test]
fn curve_and_ecrit_tables() {
    let r = rows(&stdout(&gaussq(&[
        "capacity", "curve", "--kappa", "0.7", "--mu", "0.5", "--nbar", "1", "--to", "4", "--points", "5",
    ])));
    assert_eq!(r.len(), 5);
    assert_eq!(r[0][2], 0.0);
    assert!(r.windows(2).all(|w| w[1][2] > w[0][2]));
    let e = rows(&stdout(&gaussq(&["capacity", "ecrit", "--kappa", "0.5", "--mu", "0.8", "--nbar-to", "1", "--points", "3"])));
    assert_eq!(e[0][1], 0.0);
    assert!(e[2][1] > e[1][1]);
    let a = rows(&stdout(&gaussq(&["capacity", "additive", "--mu", "0", "--nc", "0.8", "--energy", "3"])));
    assert!((a[0][3] - (g(3.8) - g(0.8))).abs() < 1e-10);
}

#[test]
fn verify_examples() {
    let o = gaussq(&["verify", "--suite", "majorization", "--dim", "8", "--trials", "200", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["trials"], 200);
    assert_eq!(v["seed"], 42);

    let o = gaussq(&["verify", "--suite", "epni-gaussian", "--trials", "1000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["max_violation"].as_f64().unwrap() <= 1e-9);
    assert!(v["scope"].as_str().unwrap().contains("Gaussian"));

    let o = gaussq(&["verify", "--suite", "counterexamples"]);
    assert_eq!(o.status.code(), Some(0));

    assert_eq!(gaussq(&["verify", "--suite", "bogus"]).status.code(), Some(2));
}

#[test]
fn verify_all_suites_pass_small() {
    let o = gaussq(&["verify", "--suite", "all", "--trials", "10", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 10);
}

#[test]
fn normalform_examples() {
    let case = |k: &str| -> Value {
        let o = gaussq(&["normalform", "--k", k]);
        assert_eq!(o.status.code(), Some(0));
        serde_json::from_str(&stdout(&o)).unwrap()
    };
    assert_eq!(case("1,0,0,1")["case"], "CP");
    let v = case("2,0,0,2");
    assert_eq!(v["case"], "DilatationThenCP");
    assert_eq!(v["normal_form"]["dilation"], 2.0);
    assert_eq!(case("1,0,0,-1")["case"], "TransposeThenCP");
    let v = case("0.5,0,0,0.5");
    assert_eq!(v["valid"], false);
    assert_eq!(v["case"], "NotGaussianToGaussian");
    // Multimode without noise: partial transposition.
    assert_eq!(case("1,0,0,0,0,1,0,0,0,0,1,0,0,0,0,-1")["case"], "NotGaussianToGaussian");
}

#[test]
fn normalform_from_spec_file_and_falsifier() {
    let dir = scratch("nf");
    let path = dir.join("q.json");
    fs::write(
        &path,
        r#"{"n":2,"k":[0,0,1,0, 0,-1,0,0, 1,0,0,0, 0,0,0,1],"alpha":[1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]}"#,
    )
    .unwrap();
    let o = gaussq(&["normalform", "--spec", path.to_str().unwrap(), "--trials", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], "undetermined");
    assert!(v["falsifier"]["witness"].is_null());

    fs::write(&path, r#"{"n":1,"k":[1,0,0,1],"alpha":[0,0,0,0],"extra":1}"#).unwrap();
    assert_eq!(gaussq(&["normalform", "--spec", path.to_str().unwrap()]).status.code(), Some(2));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn outputs_are_byte_identical_and_seeded() {
    let dir = scratch("det");
    let run = |name: &str, seed: &str| {
        let p = dir.join(name);
        let o = gaussq(&[
            "verify", "--suite", "normalform", "--trials", "50", "--seed", seed, "--output", p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        fs::read(p).unwrap()
    };
    let a = run("a.json", "9");
    let b = run("b.json", "9");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("seed=9 version="));
    assert!(!text.contains("wall"));

    let c1 = dir.join("c1.csv");
    let c2 = dir.join("c2.csv");
    for p in [&c1, &c2] {
        gaussq(&["region", "--eta", "0.7", "--energy", "2", "--points", "7", "-o", p.to_str().unwrap()]);
    }
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn twelve_significant_digits() {
    let text = stdout(&gaussq(&["region", "--eta", "0.8", "--energy", "3", "--points", "4"]));
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        for cell in line.split(',') {
            let digits = cell.trim_start_matches('-').split('e').next().unwrap().replace('.', "");
            assert!(digits.trim_start_matches('0').len() <= 12, "{cell}");
        }
    }
}

#[test]
fn config_file_overrides_flags_and_rejects_unknown_keys() {
    let dir = scratch("cfg");
    let path = dir.join("c.json");
    fs::write(&path, r#"{"energy": 4}"#).unwrap();
    let base = ["capacity", "memory", "--mu", "0.8", "--kappa", "0.9", "--nbar", "1", "--energy", "8"];
    let mut args: Vec<&str> = base.to_vec();
    args.extend(["--config", path.to_str().unwrap()]);
    let o = gaussq(&args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(rows(&stdout(&o))[0][3], 4.0);

    fs::write(&path, r#"{"energy": 4, "colour": "blue"}"#).unwrap();
    assert_eq!(gaussq(&args).status.code(), Some(2));
    fs::write(&path, "not json").unwrap();
    assert_eq!(gaussq(&args).status.code(), Some(2));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn json_table_format() {
    let o = gaussq(&["region", "--eta", "0.8", "--energy", "3", "--points", "3", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["metadata"].as_str().unwrap().starts_with("gaussq region"));
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["rows"][0]["r_b"], 0.0);
}
