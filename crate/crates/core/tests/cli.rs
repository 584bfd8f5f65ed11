use std::fs;
use std::process::Command;

use twobath::checkpoint;
use twobath::observables::RunResult;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twobath"))
}

const FREE_SPIN: &str = "epsilon = 0.3\ndelta = 0.4\nchain_length = 2\nd_p = 3\nd_opt = 3\nd_c = 8\nstrict = true\n";

#[test]
fn chain_csv() {
    let out = bin()
        .args(["chain", "--s", "0.25", "--alpha", "0.02", "--lambda", "2", "--length", "6"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,omega_n,t_n"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let w0: f64 = first[1].parse().unwrap();
    assert!((w0 - 1.25 / 2.25).abs() < 1e-15);
    assert_eq!(text.lines().count(), 7);

    let oracle = bin()
        .args(["chain", "--s", "0.25", "--alpha", "0.02", "--length", "6", "--oracle"])
        .output()
        .unwrap();
    assert!(oracle.status.success());
    let bad = bin().args(["chain", "--s", "0.25", "--alpha", "0.02", "--lambda", "1", "--length", "6"]).status().unwrap();
    assert_eq!(bad.code(), Some(3));
}

#[test]
fn ground_record_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("point.toml");
    fs::write(&cfg, FREE_SPIN).unwrap();
    let out_path = dir.path().join("result.toml");
    let ckpt = dir.path().join("state");
    let status = bin()
        .arg("ground")
        .arg(&cfg)
        .arg("--checkpoint")
        .arg(&ckpt)
        .arg("-o")
        .arg(&out_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let r: RunResult = toml::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!((r.energy + 0.25).abs() < 1e-10);
    assert_eq!(r.params.delta, 0.4);
    assert_eq!(r.solver.d_c, 8);
    let (psi, manifest) = checkpoint::load(&ckpt).unwrap();
    assert_eq!(manifest.spin_site, 2);
    assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "d_p = 24\nd_opt = 40\n").unwrap();
    assert_eq!(bin().arg("ground").arg(&bad).status().unwrap().code(), Some(3));
    let unknown = dir.path().join("unknown.toml");
    fs::write(&unknown, "alpah = 0.1\n").unwrap();
    assert_eq!(bin().arg("ground").arg(&unknown).status().unwrap().code(), Some(3));
    // One sweep can never be declared converged.
    let short = dir.path().join("short.toml");
    fs::write(&short, format!("{FREE_SPIN}max_sweeps = 1\n")).unwrap();
    let out = bin().arg("ground").arg(&short).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("not_converged"));
}

#[test]
fn sweep_and_critical() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.toml");
    fs::write(
        &plan,
        r#"
parameter = "beta"
workers = 1
[grid]
start = 0.0
stop = 0.4
points = 5
[point]
alpha = 0.2
chain_length = 2
pilot_z = -1e-5
pilot_x = -1e-5
[solver]
d_c = 16
d_p = 3
d_opt = 3
strict = true
"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let status = bin().arg("sweep").arg(&plan).arg("-o").arg(&csv).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("beta,energy,sx,sy,sz,svn,fidelity_prev,flags\n"));
    assert_eq!(text.lines().count(), 6);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 8);
    assert_eq!(row[6], "");

    let summary = dir.path().join("crit.toml");
    let status = bin().arg("critical").arg(&plan).arg("-o").arg(&summary).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let rep: twobath::sweep::CriticalReport = toml::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(rep.parameter, twobath::sweep::SweptParam::Beta);
    assert!((rep.grid_spacing - 0.1).abs() < 1e-12);
}

#[test]
fn phase_diagram_csv() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("pd.toml");
    fs::write(
        &plan,
        r#"
workers = 1
[alpha]
start = 0.0
stop = 0.1
points = 3
[beta]
start = 0.0
stop = 0.1
points = 3
[point]
delta = 0.1
s = 0.3
s_bar = 0.2
chain_length = 1
[solver]
d_c = 8
d_p = 3
d_opt = 3
strict = true
"#,
    )
    .unwrap();
    let out = bin().arg("phase-diagram").arg(&plan).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("alpha,beta,energy,sx,sy,sz,svn,flags\n"));
    assert_eq!(text.lines().count(), 10);
}
