use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_alphagan"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stderr_json(o: &Output) -> Value {
    let s = String::from_utf8_lossy(&o.stderr);
    let line = s.lines().last().expect("stderr has a line");
    serde_json::from_str(line).expect("stderr is JSON")
}

fn read_json(p: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn help_on_every_subcommand() {
    for sub in ["loss-curves", "divergence", "region", "gradient", "bounds", "equivalence-check", "train", "sweep"] {
        let o = bin().args([sub, "--help"]).output().unwrap();
        assert!(o.status.success(), "{sub}");
        assert!(String::from_utf8_lossy(&o.stdout).contains("Usage"));
    }
}

#[test]
fn unknown_subcommand_is_a_json_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "usage");
}

#[test]
fn loss_curves_orders_d_star_by_alpha() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["loss-curves", "--alpha-list", "0.2,0.5,1,3", "--grid-points", "101", "--out", "lc"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(d.path().join("lc/loss_curves.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x,alpha_d,alpha_g,d_star,sat_loss,ns_loss,grad");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 404);
    // At x = −0.2, p_r > p_g, so D* > 1/2 and grows with α_D.
    let at: Vec<f64> = rows.iter().filter(|r| (r[0] + 0.2).abs() < 1e-9).map(|r| r[3]).collect();
    assert_eq!(at.len(), 4);
    assert!(at[0] > 0.5 && at.windows(2).all(|w| w[1] > w[0]), "{at:?}");
    assert!(d.path().join("lc/config.resolved").exists());
}

#[test]
fn loss_curves_rejects_empty_alpha_list_and_bad_out() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["loss-curves", "--alpha-list", "", "--out", "x"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "usage");
    fs::write(d.path().join("file"), "").unwrap();
    let o = run(d.path(), &["loss-curves", "--out", "file/sub"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "io");
}

#[test]
fn divergence_matches_hellinger_and_zero_on_equal() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["divergence", "--f", "f_alpha", "--alpha", "0.5", "--p", "gaussian:0,1", "--q", "gaussian:1,1", "--out", "a"]);
    assert!(o.status.success());
    let j = read_json(d.path().join("a/divergence.json"));
    let oracle = 2.0 * (1.0 - (-1.0f64 / 8.0).exp());
    assert!((j["divergence"].as_f64().unwrap() - oracle).abs() < 1e-9);
    // D_{f_1/2} = 2H² with H² = ½∫(√p − √q)².
    assert!((j["references"]["hellinger2"].as_f64().unwrap() - oracle / 2.0).abs() < 1e-9);
    let r = &j["references"];
    assert_eq!(r["two_js"].as_f64().unwrap(), 2.0 * r["js"].as_f64().unwrap());
    let o = run(d.path(), &["divergence", "--f", "f_sat", "--alpha-d", "0.5", "--alpha-g", "1", "--p", "gaussian:0,1", "--q", "gaussian:0,1", "--out", "b"]);
    assert!(o.status.success());
    let j = read_json(d.path().join("b/divergence.json"));
    assert!(j["divergence"].as_f64().unwrap().abs() < 1e-12);
    let o = run(d.path(), &["divergence", "--f", "f_bogus", "--alpha", "1", "--scenario", "fig1", "--out", "c"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn region_marks_known_points() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["region", "--mode", "sat", "--alpha-d", "0.5", "--alpha-g", "1", "--out", "r"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(d.path().join("r/region.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains(",true,R1,"));
    let o = run(d.path(), &["region", "--mode", "ns", "--alpha-d", "3", "--alpha-g", "3", "--out", "n"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(d.path().join("n/region.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[2], row[3]), ("false", "outside"));
    assert!(row[8].parse::<f64>().unwrap() < 0.0);
}

#[test]
fn equivalence_check_passes() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["equivalence-check", "--alpha-list", "2", "--grid", "99", "--out", "e"]);
    assert!(o.status.success());
    let j = read_json(d.path().join("e/equivalence.json"));
    assert_eq!(j["passed"], true);
    assert!(j["max_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn bounds_from_config_and_validation() {
    let d = tempfile::tempdir().unwrap();
    fs::write(
        d.path().join("b.toml"),
        r#"
[bounds]
n = 100
m = 100
delta = 0.1
d_activations = ["relu"]
loss = { explicit = { l_phi = 1.0, l_psi = 1.0 } }
threshold = { p = 10, lipschitz = 2.0, eps = 0.1 }
[bounds.d]
layer_norms = [1.0, 1.0]
activation_lipschitz = [1.0]
input_bound = 1.0
"#,
    )
    .unwrap();
    let o = run(d.path(), &["bounds", "--config", "b.toml", "--out", "o"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    let expect = 6f64.sqrt() / 10.0 + 9f64.sqrt() / 10.0 + 10f64.ln().sqrt() * (2.0 / 200f64.sqrt());
    assert!((j["estimation"]["bound"].as_f64().unwrap() - expect).abs() < 1e-12);
    assert!(j["generalization_threshold"].as_u64().unwrap() > 0);
    assert!(j["lower_bound_constant"].as_f64().unwrap() > 0.0);
    let o = run(d.path(), &["bounds", "--config", "b.toml", "--delta", "1.5", "--out", "o"]);
    assert_ne!(o.status.code(), Some(0));
    assert_eq!(stderr_json(&o)["error"], "domain");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("c.toml"), "[region]\nmode = \"sat\"\ncolour = 3\n").unwrap();
    let o = run(d.path(), &["region", "--config", "c.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "config");
    fs::write(d.path().join("s.toml"), "[regoin]\nmode = \"sat\"\n").unwrap();
    let o = run(d.path(), &["region", "--config", "s.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_config_values() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("c.toml"), "[gradient]\nalpha_d = [0.5]\npoints = 4\nout = \"from_file\"\n").unwrap();
    let o = run(d.path(), &["gradient", "--config", "c.toml", "--points", "3"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(d.path().join("from_file/gradient.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let resolved = fs::read_to_string(d.path().join("from_file/config.resolved")).unwrap();
    assert!(resolved.contains("points = 3"));
}

#[test]
fn train_zero_epochs_and_rerun_from_resolved_config() {
    let d = tempfile::tempdir().unwrap();
    fs::write(
        d.path().join("t.toml"),
        "[train]\nvariant = \"sat:0.5,inf\"\nd_hidden = [8]\ng_hidden = [8]\nn_train = 64\neval_samples = 50\n",
    )
    .unwrap();
    let o = run(d.path(), &["train", "--config", "t.toml", "--epochs", "0", "--out", "a"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_json(d.path().join("a/report.json"));
    assert_eq!(rep["trace"].as_array().unwrap().len(), 1);
    // The resolved config reproduces the run byte for byte (wall time aside).
    let o = run(d.path(), &["train", "--config", "a/config.resolved", "--out", "b"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read_to_string(d.path().join("a/trace.csv")).unwrap(),
        fs::read_to_string(d.path().join("b/trace.csv")).unwrap()
    );
    let o = run(d.path(), &["train", "--variant", "gan:1,1", "--out", "c"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_is_idempotent() {
    let d = tempfile::tempdir().unwrap();
    fs::write(
        d.path().join("s.toml"),
        "[train]\nepochs = 1\nbatch_size = 32\nd_hidden = [8]\ng_hidden = [8]\nn_train = 64\neval_samples = 50\n\
         [sweep]\nvariants = [\"sat:1,1\", \"ns:0.5,1\"]\nseeds = \"0..2\"\n",
    )
    .unwrap();
    for out in ["x", "y"] {
        let o = run(d.path(), &["sweep", "--config", "s.toml", "--workers", "2", "--out", out]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = fs::read_to_string(d.path().join("x/sweep.csv")).unwrap();
    assert_eq!(a, fs::read_to_string(d.path().join("y/sweep.csv")).unwrap());
    assert_eq!(a.lines().count(), 3);
    assert!(a.starts_with("variant,seeds,success_pct,failure_pct"));
    let runs = read_json(d.path().join("x/runs.json"));
    assert_eq!(runs.as_array().unwrap().len(), 2);
}
