use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn miscible(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_miscible")).args(args).output().expect("binary runs")
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

#[test]
fn equilibrium_run_succeeds_with_constant_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = miscible(&["--jobs", "2", "run", "--preset", "equilibrium", "--out", out]);
    assert!(o.status.success(), "{}", text(&o));
    let last = fs::read_to_string(dir.path().join("fields_000100.csv")).unwrap();
    for line in last.lines().skip(1) {
        assert_eq!(line.split(',').nth(5), Some("0.5"));
    }
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(report.starts_with("step,time,dt,min_c,max_c,mass_residual"));
    assert_eq!(report.lines().count(), 102);
}

#[test]
fn five_spot_run_passes_all_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let o = miscible(&["run", "--preset", "quarter-five-spot-16", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", text(&o));
    let checks = fs::read_to_string(dir.path().join("invariants.csv")).unwrap();
    assert!(checks.starts_with("invariant,passed,worst,tolerance,step\n"));
    assert!(checks.lines().skip(1).all(|l| l.split(',').nth(1) == Some("true")), "{checks}");
    // cadence 5 over 20 steps
    for step in [0, 5, 10, 15, 20] {
        assert!(dir.path().join(format!("fields_{step:06}.vtk")).exists());
    }
    assert!(!dir.path().join("fields_000001.vtk").exists());
}

#[test]
fn runs_are_byte_stable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (d, jobs) in [(&a, "1"), (&b, "3")] {
        let o = miscible(&["--jobs", jobs, "run", "--preset", "gravity", "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", text(&o));
    }
    for name in ["fields_000020.vtk", "fields_000020.csv", "report.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("case.toml");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn picard_divergence_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let base = String::from_utf8(miscible(&["presets", "quarter-five-spot-16"]).stdout).unwrap();
    let body = base
        .replace("mobility_ratio = 4.0", "mobility_ratio = 50.0")
        .replace("dt = 0.005", "dt = 0.1")
        .replace("[output]", "[solver]\npicard = true\npicard_tol = 1e-10\npicard_max_iter = 5\n\n[output]");
    let cfg = write_config(dir.path(), &body);
    let o = miscible(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(text(&o).contains("Picard iteration did not converge at step 1"), "{}", text(&o));
}

#[test]
fn invalid_config_names_the_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\nnx = 4\nny = 4\n[time]\nfinal_time = 1.0\ndt = 0.1\n[dispersion]\ndt = 0.0\n");
    let o = miscible(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("(2.5) ellipticity"), "{}", text(&o));
}

#[test]
fn verify_writes_order_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = miscible(&["verify", "--case", "pressure", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", text(&o));
    let csv = fs::read_to_string(dir.path().join("mms_pressure.csv")).unwrap();
    assert!(csv.starts_with("level,parameter,value,c_l2,p_l2,grad_p_l2,max_speed,order\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn sweeps_run_from_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = miscible(&["--jobs", "4", "sweep-k", "--preset", "quarter-five-spot-16", "--out", out]);
    assert!(o.status.success(), "{}", text(&o));
    assert!(dir.path().join("sweep_k.csv").exists());
    let o = miscible(&["sweep-eps", "--preset", "quarter-five-spot-16", "--eps", "0.5,0.25,0", "--out", out]);
    assert!(o.status.success(), "{}", text(&o));
    assert_eq!(fs::read_to_string(dir.path().join("sweep_eps.csv")).unwrap().lines().count(), 4);
}

#[test]
fn unknown_preset_and_missing_source_fail() {
    assert!(!miscible(&["run", "--preset", "nope"]).status.success());
    assert!(!miscible(&["run"]).status.success());
    let o = miscible(&["presets"]);
    assert!(text(&o).contains("quarter-five-spot-32"));
}
