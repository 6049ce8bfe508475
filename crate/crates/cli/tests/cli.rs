use std::fs;
use std::process::{Command, Output};

fn grenander(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grenander")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn key(text: &str, k: &str) -> Option<String> {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{k}=")))
        .map(str::to_string)
}

#[test]
fn sample_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    let o = grenander(&["sample", "--family", "exponential", "--n", "200", "--seed", "7", "--rep", "0"]);
    assert!(o.status.success());
    fs::write(&path, &o.stdout).unwrap();
    assert_eq!(stdout(&o).lines().count(), 200);

    let again = grenander(&["sample", "--family", "exponential", "--n", "200", "--seed", "7", "--rep", "0"]);
    assert_eq!(o.stdout, again.stdout);

    let p = path.to_str().unwrap();
    let o = grenander(&["estimate-zero", "--method", "adaptive", "--input", p]);
    assert!(o.status.success());
    let out = stdout(&o);
    for k in ["value", "c_star", "b_hat", "deriv_hat", "bandwidth"] {
        assert!(key(&out, k).is_some(), "{k} missing in {out}");
    }
    let v: f64 = key(&out, "value").unwrap().parse().unwrap();
    assert!(v > 0.3 && v < 2.0);

    let o = grenander(&["estimate-zero", "--method", "penalized", "--input", p, "--alpha0", "0.02"]);
    let out = stdout(&o);
    assert_eq!(key(&out, "alpha0").unwrap(), "0.02");
    for k in ["value", "alpha_hat", "beta_hat", "x_m"] {
        assert!(key(&out, k).is_some(), "{k} missing in {out}");
    }

    let o = grenander(&["estimate-zero", "--method", "simple", "--input", p]);
    assert!(key(&stdout(&o), "c_star").is_none());

    let o = grenander(&["fit", "--input", p]);
    assert!(stdout(&o).starts_with("breakpoint,height\n"));
}

#[test]
fn bad_sample_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "# comment\n0.5\n-1\n").unwrap();
    let o = grenander(&["estimate-zero", "--method", "simple", "--input", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("negative"));
}

#[test]
fn simulate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ok.cfg");
    let out = dir.path().join("table.csv");
    fs::write(&cfg, "distribution = half_normal\nsample_sizes = 50\nreps = 50\nestimators = simple\n").unwrap();
    let o = grenander(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("estimator,n,mean,var,mse,se_mean,se_var,flags\nsimple_k1,50,"));

    fs::write(&cfg, "estimators = simple2\nscaling = n_one_third\n").unwrap();
    let o = grenander(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = grenander(&["simulate", "--config", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    // pilot fits with a single block fall back to the floor on every rep
    fs::write(&cfg, "sample_sizes = 2\nreps = 50\nestimators = penalized\nalpha0 = 100\n").unwrap();
    let o = grenander(&["simulate", "--config", cfg.to_str().unwrap(), "--format", "markdown"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("| n^(1/3)(penalized - f(0)) | Mean |"));
}

#[test]
fn limits_subcommands() {
    let o = grenander(&["limits", "table4", "--reps", "200", "--h", "0.01", "--seed", "3", "--sequential"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("estimator,exp_mean,exp_var,exp_mse,hn_mean,hn_var,hn_mse\n"));
    assert_eq!(out.lines().count(), 6);
    assert!(out.contains("simple2,-inf,inf,inf,"));
    let par = grenander(&["limits", "table4", "--reps", "200", "--h", "0.01", "--seed", "3"]);
    assert_eq!(par.stdout, o.stdout);

    let o = grenander(&["limits", "cstar", "--k", "2", "--reps", "300", "--h", "0.01"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("# k=2 c_star="));
    assert!(out.contains("c,objective,se\n"));

    let o = grenander(&["limits", "cstar", "--k", "3"]);
    assert_eq!(o.status.code(), Some(2));
}
