use std::fs;
use std::process::{Command, Output};

fn latdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latdisc"))
        .args(args)
        .env_remove("LATDISC_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn count_at_one_includes_the_six_neighbours() {
    let out = latdisc(&["count", "--t", "1"]);
    assert!(out.status.success());
    assert_eq!(data_lines(&stdout(&out)), ["t,count", "1,7"]);
}

#[test]
fn count_agrees_with_brute_force_flag() {
    let out = latdisc(&["count", "--t", "37.5", "--brute"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = data_lines(&text)[1].split(',').collect();
    assert_eq!(row[1], row[2]);
}

#[test]
fn body_check_reports_sphere_curvature() {
    let out = latdisc(&["body", "check"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "min_abs_curvature_expr=1"));
    assert!(text.lines().any(|l| l == "accepted=true"));
}

#[test]
fn nonconvex_profile_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[body]\nkind = \"fourier\"\ncoeffs = [1.0, 0.9]\n").unwrap();
    let out = latdisc(&["--config", path.to_str().unwrap(), "body", "check"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn zero_scan_step_fails() {
    let out = latdisc(&["scan", "--step", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("step"));
}

#[test]
fn unknown_config_key_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    fs::write(&path, "[count]\nt = 4.0\nradius = 1\n").unwrap();
    let out = latdisc(&["--config", path.to_str().unwrap(), "count"]);
    assert!(!out.status.success());
}

#[test]
fn config_is_taken_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    fs::write(&path, "[count]\nt = 2.0\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_latdisc"))
        .arg("count")
        .env("LATDISC_CONFIG", &path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(data_lines(&stdout(&out))[1], "2,19");
}

#[test]
fn header_echoes_config_hash_and_overrides() {
    let out = latdisc(&["count", "--t", "3"]);
    let text = stdout(&out);
    let hash = text.lines().find_map(|l| l.strip_prefix("# config_hash: ")).unwrap();
    assert_eq!(hash.len(), 64);
    assert!(text.lines().any(|l| l == "#   t = 3.0"));
    let other = stdout(&latdisc(&["count", "--t", "4"]));
    assert!(!other.contains(hash));
}

#[test]
fn output_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["scan", "--t-max", "60"][..],
        &["link", "--n", "6"][..],
        &["arith", "s-lambda"][..],
        &["lemma", "search"][..],
    ] {
        let mut docs = Vec::new();
        for workers in ["1", "4"] {
            let path = dir.path().join(format!("{}-{workers}.csv", args[0]));
            let mut full = vec!["--workers", workers, "--out", path.to_str().unwrap()];
            full.extend_from_slice(args);
            let out = latdisc(&full);
            assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
            docs.push(fs::read(&path).unwrap());
        }
        assert_eq!(docs[0], docs[1], "{args:?}");
    }
}

#[test]
fn lemma_search_suite_meets_every_bound() {
    let text = stdout(&latdisc(&["lemma", "search"]));
    assert!(text.lines().any(|l| l == "# met: 50/50"));
}

#[test]
fn explicit_instance_and_samples_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("inst.toml");
    let samples = dir.path().join("samples.csv");
    fs::write(
        &cfg,
        "[lemma]\nT = 16.0\nL = 12\n[lemma.instance]\nf = [1.0, 0.5, 0.1]\nlambda = [1.0, 1.2, 5.0]\nLambda = 1.0\nM = [0, 1]\n",
    )
    .unwrap();
    let out = latdisc(&["--config", cfg.to_str().unwrap(), "lemma", "search", "--samples", samples.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "met=true"));
    let written = fs::read_to_string(&samples).unwrap();
    assert!(data_lines(&written).len() > 1);
}

#[test]
fn output_directory_receives_named_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, format!("[output]\ndir = {:?}\n", dir.path().to_str().unwrap())).unwrap();
    let out = latdisc(&["--config", cfg.to_str().unwrap(), "borel", "--t", "5"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc = fs::read_to_string(dir.path().join("borel.csv")).unwrap();
    assert_eq!(data_lines(&doc)[0], "t,k,X,borel,mass,nodes,jumps");
}
