use std::path::Path;
use std::process::{Command, Output};

use chevron_core::snapshot;

fn chevron(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chevron")).args(args).output().unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "exit {:?}\nstdout:\n{}\nstderr:\n{}", out.status.code(), String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
}

fn simulate(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["--quiet", "--out", dir.to_str().unwrap(), "simulate", "--set", "nx=12", "--set", "ny=10", "--set", "t_end=0.6"];
    for e in extra {
        args.extend(["--set", e]);
    }
    chevron(&args)
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn same_seed_same_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        ok(&chevron(&["--quiet", "--seed", "42", "--out", d.to_str().unwrap(), "simulate", "--set", "nx=12", "--set", "t_end=0.5"]));
    }
    assert_eq!(read(&a.join("energy.csv")), read(&b.join("energy.csv")));
    assert_eq!(std::fs::read(a.join("checkpoint.chev")).unwrap(), std::fs::read(b.join("checkpoint.chev")).unwrap());
    assert!(read(&a.join("run_meta.txt")).contains("seed = 42"));

    let c = tmp.path().join("c");
    ok(&chevron(&["--quiet", "--seed", "43", "--out", c.to_str().unwrap(), "simulate", "--set", "nx=12", "--set", "t_end=0.5"]));
    assert_ne!(read(&a.join("energy.csv")), read(&c.join("energy.csv")));
}

#[test]
fn restart_from_checkpoint_matches_straight_run() {
    let tmp = tempfile::tempdir().unwrap();
    let (full, half, rest) = (tmp.path().join("full"), tmp.path().join("half"), tmp.path().join("rest"));
    let fixed = ["dt=0.01", "amplitude=0.8", "seed=5"];
    ok(&simulate(&full, &[&fixed[..], &["t_end=1.0"]].concat()));
    ok(&simulate(&half, &[&fixed[..], &["t_end=0.5"]].concat()));
    let ck = format!("ic_file={}", half.join("checkpoint.chev").display());
    ok(&simulate(&rest, &[&fixed[..], &["t_end=1.0", "ic=file", &ck]].concat()));

    let a = snapshot::read_file(&full.join("checkpoint.chev")).unwrap();
    let b = snapshot::read_file(&rest.join("checkpoint.chev")).unwrap();
    assert_eq!(a.t, 1.0);
    assert_eq!(b.t, 1.0);
    let da = a.a.sub(&b.a).unwrap().max_abs();
    let dp = a.phi.sub(&b.phi).unwrap().max_abs();
    assert!(da <= 1e-12 && dp <= 1e-12, "{da:e} {dp:e}");
    assert!(read(&rest.join("energy.csv")).lines().nth(1).unwrap().starts_with("5.0000000000000000e-1"));
}

#[test]
fn periodic_snapshots_are_written() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&simulate(tmp.path(), &["snapshot_every=0.2"]));
    for t in [0.0, 0.2, 0.4, 0.6] {
        let p = tmp.path().join(format!("snapshot_{t:.6}.chev"));
        let s = snapshot::read_file(&p).unwrap();
        assert!((s.t - t).abs() < 1e-12, "{}", p.display());
    }
}

#[test]
fn zero_initial_condition_stays_zero() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&simulate(tmp.path(), &["ic=zero"]));
    let csv = read(&tmp.path().join("energy.csv"));
    let rows: Vec<_> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 7);
    for row in rows {
        let lyapunov: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
        assert_eq!(lyapunov, 0.0);
    }
}

#[test]
fn energy_check_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    ok(&simulate(&run, &["amplitude=1.0"]));
    let meta = run.join("run_meta.txt");
    let csv = run.join("energy.csv");
    ok(&chevron(&["--config", meta.to_str().unwrap(), "energy-check", csv.to_str().unwrap()]));

    // Inflate one lyapunov value well above its bound.
    let text = read(&csv);
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut fields: Vec<String> = lines[3].split(',').map(String::from).collect();
    fields[6] = "1.0e3".into();
    lines[3] = fields.join(",");
    let forged = tmp.path().join("forged.csv");
    std::fs::write(&forged, lines.join("\n") + "\n").unwrap();
    let out = chevron(&["--config", meta.to_str().unwrap(), "energy-check", forged.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).to_lowercase().contains("violation"));

    let empty = tmp.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let out = chevron(&["--config", meta.to_str().unwrap(), "energy-check", empty.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty.csv"));
}

#[test]
fn run_meta_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let (first, second) = (tmp.path().join("first"), tmp.path().join("second"));
    ok(&simulate(&first, &["seed=9", "scheme=rk4"]));
    let meta = first.join("run_meta.txt");
    ok(&chevron(&["--quiet", "--config", meta.to_str().unwrap(), "--out", second.to_str().unwrap(), "simulate"]));
    assert_eq!(read(&first.join("energy.csv")), read(&second.join("energy.csv")));
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(chevron(&["bifurcation", "--c1", "0.6"]).status.code(), Some(2));
    let out = simulate(tmp.path(), &["bogus=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    assert_eq!(simulate(tmp.path(), &["tau=-1"]).status.code(), Some(2));
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "tau = 1\nnx = many\n").unwrap();
    let out = chevron(&["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg:2"));
}

#[test]
fn reduced_subcommands_write_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    ok(&chevron(&["--quiet", "--out", out, "fixed-points", "--system", "uniform", "--h", "0.25"]));
    let fp = read(&tmp.path().join("fixed_points.csv"));
    assert_eq!(fp.lines().count(), 5);
    assert_eq!(fp.matches("SPIRAL_SINK").count(), 2);
    assert_eq!(fp.matches("SADDLE").count(), 2);

    ok(&chevron(&["--quiet", "--out", out, "portrait", "--system", "uniform", "--h", "0.25", "--rho", "0.5", "--phi", "-0.5,0.5", "--t-end", "50"]));
    assert!(read(&tmp.path().join("portrait.csv")).lines().count() > 3);

    ok(&chevron(&["--quiet", "--out", out, "bifurcation", "--c1", "0.6,1.5", "--chi", "0:0.5:2"]));
    assert_eq!(read(&tmp.path().join("bifurcation.csv")).lines().count(), 1 + 2 * 5);
}

#[test]
fn convergence_subcommand_reports_rk4_order() {
    let out = chevron(&[
        "convergence", "--set", "scheme=rk4", "--set", "nx=32", "--set", "ny=32", "--set", "Lx=40", "--set", "Ly=40",
        "--set", "ic=single_mode", "--set", "kx=1", "--set", "ky=1", "--set", "amplitude=0.5", "--set", "t_end=1",
    ]);
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("observed order"));
}
