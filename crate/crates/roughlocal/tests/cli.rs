//! End-to-end checks of the binary: determinism, admissibility report
//! content, and the constant-integrand identity.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_roughlocal")
}

fn write_config(dir: &std::path::Path, body: &str) -> PathBuf {
    let p = dir.join("cfg.ini");
    fs::write(&p, body).unwrap();
    p
}

fn base_config(out: &std::path::Path, model: &str) -> String {
    format!(
        "[model]\n{model}\n\n[simulation]\nt = 1.0\ndt = 1e-3\neps = 0.01\nn_paths = 2\nseed = 7\n\n\
         [analysis]\np = 2.05\nq = 2.0\ntheta = 2.2\nm_max = 5\nn_bins = 128\n\n\
         [integrand]\ng = one\n\n[output]\ndir = {}\n",
        out.display()
    )
}

fn run(cmd: &str, cfg: &std::path::Path, extra: &[&str]) {
    let st = Command::new(bin())
        .arg(cmd)
        .arg("--config")
        .arg(cfg)
        .args(extra)
        .status()
        .unwrap();
    assert!(st.success(), "{cmd} exited with {st}");
}

#[test]
fn simulate_is_deterministic() {
    let tmp = tempdir();
    let out1 = tmp.join("a");
    let out2 = tmp.join("b");
    let cfg = write_config(
        &tmp,
        &base_config(&out1, "sigma = 1.0\nb = 0.2\njumps = compound\nrate = 2.0\nlaw = pm:0.5"),
    );
    run("simulate", &cfg, &[]);
    run("simulate", &cfg, &["--out", out2.to_str().unwrap()]);
    for name in ["path_0000.csv", "path_0001.csv"] {
        let a = fs::read(out1.join(name)).unwrap();
        let b = fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    // a different seed must change the paths
    let out3 = tmp.join("c");
    run("simulate", &cfg, &["--seed", "8", "--out", out3.to_str().unwrap()]);
    assert_ne!(
        fs::read(out1.join("path_0000.csv")).unwrap(),
        fs::read(out3.join("path_0000.csv")).unwrap()
    );
}

#[test]
fn admissibility_reports_power_small_alpha_one() {
    let tmp = tempdir();
    let out = tmp.join("out");
    let cfg = write_config(
        &tmp,
        &base_config(
            &out,
            "sigma = 1.0\nb = 0.0\njumps = power\nalpha = 1.0\nc_plus = 1.0\nc_minus = 1.0",
        ),
    );
    run("admissibility", &cfg, &[]);
    let report = fs::read_to_string(out.join("admissibility.csv")).unwrap();
    assert!(report.contains("holds_3_2,Holds"), "report: {report}");
}

#[test]
fn integrate_constant_integrand_telescopes() {
    let tmp = tempdir();
    let out = tmp.join("out");
    let cfg = write_config(
        &tmp,
        &base_config(&out, "sigma = 1.0\nb = 0.0\njumps = none"),
    );
    run("integrate", &cfg, &[]);
    run("localtime", &cfg, &[]);
    let head = fs::read_to_string(out.join("integrate.csv")).unwrap();
    let value: f64 = head
        .lines()
        .next()
        .unwrap()
        .split("value=")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    // the local-time curve vanishes at both grid ends, so int 1 dL = 0
    let curve = fs::read_to_string(out.join("localtime_binning.csv")).unwrap();
    let rows: Vec<&str> = curve.lines().skip(2).collect();
    let l_at = |row: &str| row.split(',').nth(1).unwrap().parse::<f64>().unwrap();
    let want = l_at(rows.last().unwrap()) - l_at(rows.first().unwrap());
    assert!(
        (value - want).abs() < 1e-9,
        "integral {value} vs boundary difference {want}"
    );
}

fn tempdir() -> PathBuf {
    let d = std::env::temp_dir().join(format!(
        "roughlocal-cli-{}-{:x}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap()
            .as_nanos()
    ));
    fs::create_dir_all(&d).unwrap();
    d
}
