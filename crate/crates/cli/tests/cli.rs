use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nfs-eraser"));
    c.env_remove("NFS_ERASER_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

fn manifest(dir: &Path, cmd: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{cmd}.json"))).unwrap()).unwrap()
}

#[test]
fn single_writes_header_and_every_sample() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--out", &out_arg(dir.path()), "single", "--xi", "2", "--grid-end", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("single.csv")).unwrap();
    assert!(csv.starts_with("t_ns,tau,I_total,I_sigma,I_pi,I_det1,I_det2,Re_Esigma,Im_Esigma,Re_Epi,Im_Epi\n"));
    assert_eq!(csv.lines().count(), 1001 + 1);
    let m = manifest(dir.path(), "single");
    assert_eq!(m["params"]["target.xi"], "2");
    assert_eq!(m["outputs"][0], "single.csv");
}

#[test]
fn rerun_reproduces_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run(&["--out", &out_arg(a.path()), "scheme1", "--grid-end", "2"]).status.success());
    let m = a.path().join("scheme1.json");
    let o = run(&["--out", &out_arg(b.path()), "rerun", m.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 2);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn flags_beat_config_file_beats_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[target]\nxi = 4\nomega2 = 20\n").unwrap();
    let out = dir.path().join("o");
    let o = run(&["--out", &out_arg(&out), "single", "--config", cfg.to_str().unwrap(), "--xi", "3", "--grid-end", "0.2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let p = &manifest(&out, "single")["params"];
    assert_eq!(p["target.xi"], "3");
    assert_eq!(p["target.omega2"], "20");
    assert_eq!(p["target.p_max"], "19");
}

#[test]
fn sweep_writes_one_directory_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "--out", &out_arg(dir.path()), "single", "--grid-end", "0.2",
        "--sweep", "xi=1,2", "--sweep", "target.omega2=10,20,30",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut seen = Vec::new();
    for i in 0..6 {
        let p = manifest(&dir.path().join(format!("run_{i:03}")), "single")["params"].clone();
        seen.push((p["target.xi"].as_str().unwrap().to_string(), p["target.omega2"].as_str().unwrap().to_string()));
    }
    assert_eq!(seen[0], ("1".into(), "10".into()));
    assert_eq!(seen[2], ("1".into(), "30".into()));
    assert_eq!(seen[3], ("2".into(), "10".into()));
    assert!(!dir.path().join("run_006").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = run(&["--out", &out, "single", "--set", "target.nonsense=1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--out", &out, "single", "--xi", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--out", &out, "scheme1", "--b2", "10", "--grid-end", "0.5"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["--out", &out, "scheme1", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["--out", &out, "single", "--xi", "7", "--pmax", "3", "--grid-end", "1"]);
    assert_eq!(o.status.code(), Some(3));
    // outputs are still written
    assert!(dir.path().join("single.csv").exists());
}

#[test]
fn transparent_target_gives_zero_intensity() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["--out", &out_arg(dir.path()), "single", "--xi", "0", "--grid-end", "1"]).status.success());
    let csv = fs::read_to_string(dir.path().join("single.csv")).unwrap();
    assert!(column(&csv, "I_total").iter().all(|x| *x == 0.0));
}

#[test]
fn zero_field_shows_a_dynamical_beat_null() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--out", &out_arg(dir.path()), "single", "--b", "0", "--xi", "7", "--pmax", "40", "--grid-end", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("single.csv")).unwrap();
    let tau = column(&csv, "tau");
    let i = column(&csv, "I_total");
    let n = (100..i.len() - 1).find(|&n| i[n] < i[n - 1] && i[n] <= i[n + 1]).unwrap();
    let want = 3.8317f64.powi(2) / (4.0 * 7.0 * 0.8);
    assert!((tau[n] - want).abs() < 2e-3, "{}", tau[n]);
    assert!(i[n] < 1e-6 * i[1]);
}

#[test]
fn peak_normalization() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["--out", &out_arg(dir.path()), "single", "--normalize", "peak", "--grid-end", "1"]).status.success());
    let csv = fs::read_to_string(dir.path().join("single.csv")).unwrap();
    let max = column(&csv, "I_total").into_iter().fold(0.0, f64::max);
    assert!((max - 1.0).abs() < 1e-12);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("NFS_ERASER_OUT", dir.path())
        .args(["scheme2", "--mode", "storage", "--xi", "0.5"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("scheme2.json").exists());
    assert!(dir.path().join("scheme2.csv").exists());
}

#[test]
fn match_and_constants() {
    let o = run(&["match", "--b1", "39", "--case", "2"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("B2 = 22.58"), "{text}");

    let o = run(&["constants", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["isotope"]["mean_lifetime_ns"], 141.0);
}
