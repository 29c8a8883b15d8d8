use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lyapbound"));
    cmd.env_remove("LYAPBOUND_WORKERS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", stderr(o));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lyapbound-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn strip_timing(mut v: Value) -> Value {
    v["manifest"].as_object_mut().unwrap().remove("timing");
    v
}

const DOUBLING: &[&str] = &[
    "bound",
    "--map",
    "doubling",
    "--epsilon",
    "1e-5",
    "--nodes",
    "16",
];

#[test]
fn bound_record_has_the_documented_keys() {
    let v = json(&run(DOUBLING));
    for key in [
        "manifest",
        "map",
        "epsilon",
        "m",
        "digits",
        "alpha",
        "beta",
        "lower",
        "upper",
        "width",
        "certificates",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["certificates"].as_array().unwrap().len(), 2);
    assert_eq!(v["m"], 16);
    assert_eq!(v["digits"], 43);
    assert_eq!(v["manifest"]["map_source"]["kind"], "builtin");
    assert!(v["manifest"]["timing"]["wall_seconds"].is_string());
    let lower: f64 = v["lower"].as_str().unwrap().parse().unwrap();
    let upper: f64 = v["upper"].as_str().unwrap().parse().unwrap();
    assert!(lower <= 2f64.ln() + 1e-15 && 2f64.ln() - 1e-15 <= upper);
    assert!(v["lower"]
        .as_str()
        .unwrap()
        .starts_with("0.693147180559945309417232121"));
}

#[test]
fn csv_and_json_carry_identical_digits() {
    let v = json(&run(DOUBLING));
    let mut args = DOUBLING.to_vec();
    args.extend(["--format", "csv"]);
    let o = run(&args);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "map,epsilon,m,digits,alpha,beta,lower,upper,width"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "doubling");
    for (i, key) in [
        "epsilon", "m", "digits", "alpha", "beta", "lower", "upper", "width",
    ]
    .iter()
    .enumerate()
    {
        let expected = match &v[*key] {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        assert_eq!(row[i + 1], expected, "{key}");
    }
    assert!(text.lines().all(|l| !l.is_empty()));
    assert!(text.contains("# manifest.tool=lyapbound"));
    assert_eq!(text.matches("# certificate side=").count(), 2);
}

#[test]
fn output_file_replaces_stdout() {
    let path = scratch("bound.json");
    let mut args = DOUBLING.to_vec();
    let p = path.to_str().unwrap();
    args.extend(["--out", p]);
    let o = run(&args);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["map"]["name"], "doubling");
}

#[test]
fn repeated_runs_are_identical_apart_from_timing() {
    let args = [
        "bound",
        "--map",
        "lanford",
        "--epsilon",
        "1e-8",
        "--nodes",
        "30",
        "--check-monte-carlo",
        "200,2,5",
    ];
    let a = strip_timing(json(&run(&args)));
    let b = strip_timing(json(&run(&args)));
    assert_eq!(a, b);
    let mc = a["monte_carlo"].as_array().unwrap();
    assert_eq!(mc.len(), 2);
    assert_eq!(a["manifest"]["seed"], 5);
    assert!(a["manifest"]["generator"]
        .as_str()
        .unwrap()
        .contains("ChaCha8"));
}

#[test]
fn precision_refusal_is_exit_3() {
    let o = run(&[
        "bound",
        "--map",
        "lanford",
        "--epsilon",
        "1e-20",
        "--digits",
        "40",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(
        err.starts_with("error kind=precision code=3 message=\""),
        "{err}"
    );
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_inputs_are_exit_2() {
    for args in [
        vec!["bound", "--map", "no_such_map"],
        vec!["bound", "--map", "bent_tent", "--param", "c=0.9"],
        vec!["bound", "--map", "lanford", "--epsilon", "2"],
        vec!["bound", "--map", "lanford", "--config", "x.map"],
        vec!["bound"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn missing_config_file_is_an_io_error() {
    let o = run(&["bound", "--config", "/nonexistent/map.cfg"]);
    assert_eq!(o.status.code(), Some(11));
    assert!(stderr(&o).starts_with("error kind=io code=11"));
}

#[test]
fn config_syntax_errors_point_at_the_line() {
    let path = scratch("broken.map");
    std::fs::write(
        &path,
        "interval = [0, 1]\nbranch { inverse = \"x/2\" }\nbranch { inverse = \"(x + 1)/2 +\" }\n",
    )
    .unwrap();
    let o = run(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn validate_flags_a_map_with_unit_slope() {
    let path = scratch("slow.map");
    std::fs::write(
        &path,
        "name = \"slow\"\ninterval = [0, 1]\nbranch { inverse = \"x - x^2/4\" }\nbranch { inverse = \"(x + 3)/4\" }\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let o = run(&["validate", "--config", p]);
    assert_eq!(o.status.code(), Some(10), "{}", stderr(&o));
    assert!(stdout(&o).contains("result fail"), "{}", stdout(&o));

    let o = run(&["bound", "--config", p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind=input"));

    let o = run(&["validate", "--map", "lanford"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result pass"));
}

#[test]
fn config_runs_record_the_content_hash() {
    let path = scratch("lanford.map");
    std::fs::write(
        &path,
        "name = \"lanford\"\ninterval = [0, 1]\nbranch { inverse = \"(5 - sqrt(25 - 8*x))/2\" }\nbranch { inverse = \"(5 - sqrt(17 - 8*x))/2\" }\n",
    )
    .unwrap();
    let v = json(&run(&[
        "bound",
        "--config",
        path.to_str().unwrap(),
        "--epsilon",
        "1e-6",
        "--nodes",
        "30",
    ]));
    let src = &v["manifest"]["map_source"];
    assert_eq!(src["kind"], "config");
    assert_eq!(src["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["map"]["branches"][0]["deriv_source"], "symbolic");

    let b = json(&run(&[
        "bound",
        "--map",
        "lanford",
        "--epsilon",
        "1e-6",
        "--nodes",
        "30",
    ]));
    assert_eq!(v["lower"], b["lower"]);
    assert_eq!(v["upper"], b["upper"]);
}

#[test]
fn single_point_sweep_matches_bound() {
    let common = ["--epsilon", "1e-5", "--nodes", "30"];
    let mut sweep = vec![
        "sweep",
        "--family",
        "lanford_family",
        "--from",
        "1/4",
        "--to",
        "1/4",
        "--count",
        "1",
        "--format",
        "json",
        "--workers",
        "1",
    ];
    sweep.extend(common);
    let s = json(&run(&sweep));
    let mut bound = vec!["bound", "--map", "lanford_family", "--param", "c=1/4"];
    bound.extend(common);
    let b = json(&run(&bound));
    let row = &s["rows"][0];
    assert_eq!(row["status"], "ok");
    assert_eq!(row["lower"], b["lower"]);
    assert_eq!(row["upper"], b["upper"]);
    assert_eq!(s["manifest"]["workers"], 1);
}

#[test]
fn sweep_csv_rows_and_worker_env() {
    let o = bin()
        .env("LYAPBOUND_WORKERS", "3")
        .args([
            "sweep",
            "--family",
            "bent_tent",
            "--from",
            "-0.2",
            "--to",
            "0.4",
            "--count",
            "4",
            "--epsilon",
            "1e-4",
            "--nodes",
            "24",
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "c,lower,upper,width,status");
    let rows: Vec<&str> = lines.by_ref().take(4).collect();
    assert!(rows.iter().all(|r| r.ends_with(",ok")), "{rows:?}");
    assert!(rows[0].starts_with("-0.2000"));
    assert!(text.contains("# manifest.workers=3"));
}

#[test]
fn density_of_constant_slope_map_is_flat() {
    let v = json(&run(&[
        "density",
        "--map",
        "bent_tent",
        "--param",
        "c=0",
        "--nodes",
        "16",
        "--samples",
        "5",
        "--format",
        "json",
    ]));
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 5);
    for s in samples {
        let rho: f64 = s["rho"].as_str().unwrap().parse().unwrap();
        assert!((rho - 0.5).abs() < 1e-30);
    }
    let lambda: f64 = v["lyapunov_quadrature"].as_str().unwrap().parse().unwrap();
    assert!((lambda - 2f64.ln()).abs() < 1e-14);
}
