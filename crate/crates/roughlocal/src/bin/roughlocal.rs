//! Experiment driver: every subcommand reads one config file, runs a
//! deterministic experiment, and drops CSVs plus a manifest in the output
//! directory.

use clap::{Parser, Subcommand};
use roughlocal::checks;
use roughlocal::config::ExperimentConfig;
use roughlocal::integrate::integral_cadlag_gdl;
use roughlocal::ito::{ito_residual, PiecewiseC1Function};
use roughlocal::levy::check_admissibility;
use roughlocal::lift::{converge_lift, GeometricRoughPath, V2};
use roughlocal::local_time::{local_time_binning, span_grid, tanaka_local_time, LocalTimeCurve};
use roughlocal::numerics::lerp_clamped;
use roughlocal::path::{simulate_batch, SamplePath};
use roughlocal::qvar::control_from_points;
use roughlocal::variation::{pvar_exact, DiscreteCurve};
use std::fs::{self, File};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "roughlocal", version, about = "Local times of Levy processes: estimators, p-variation, rough-path lifts and integrals")]
struct Cli {
    /// Config file (ini-style sections, key=value)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides [simulation] seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides [output] dir
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run the built-in acceptance checks and exit nonzero on failure
    #[arg(long)]
    check: bool,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate paths and write one CSV per path
    Simulate,
    /// Local-time curves from the first path, both estimators
    Localtime,
    /// p-variation of the local-time curve across p and grid levels
    Pvar,
    /// Rough-path lift of (L, g) with convergence diagnostics
    Lift,
    /// Integral of g against the local-time curve
    Integrate,
    /// Change-of-variable residual statistics on the configured model
    VerifyIto,
    /// Jump-measure admissibility exponents
    Admissibility,
}

fn main() {
    if let Ok(s) = std::env::var("ROUGHLOCAL_THREADS") {
        if let Ok(n) = s.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    if cli.check {
        let mut failed = 0;
        for r in checks::run_all() {
            println!(
                "criterion {:2} ({}): {} -- {}",
                r.id,
                r.name,
                if r.pass { "PASS" } else { "FAIL" },
                r.detail
            );
            if !r.pass {
                failed += 1;
            }
        }
        if failed > 0 {
            eprintln!("{failed} criteria failed");
            std::process::exit(1);
        }
        return;
    }
    let Some(cmd) = cli.cmd else {
        eprintln!("no subcommand given (and --check not set); try --help");
        std::process::exit(2);
    };
    let Some(cfg_path) = cli.config else {
        eprintln!("--config is required for subcommands");
        std::process::exit(2);
    };
    let mut cfg = match ExperimentConfig::from_file(&cfg_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", cfg_path.display());
            std::process::exit(2);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    if let Err(e) = run(&cmd, &cfg) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cmd: &Cmd, cfg: &ExperimentConfig) -> Result<(), Box<dyn std::error::Error>> {
    fs::create_dir_all(&cfg.out_dir)?;
    let started = Instant::now();
    let name = match cmd {
        Cmd::Simulate => {
            simulate(cfg)?;
            "simulate"
        }
        Cmd::Localtime => {
            localtime(cfg)?;
            "localtime"
        }
        Cmd::Pvar => {
            pvar(cfg)?;
            "pvar"
        }
        Cmd::Lift => {
            lift(cfg)?;
            "lift"
        }
        Cmd::Integrate => {
            integrate(cfg)?;
            "integrate"
        }
        Cmd::VerifyIto => {
            verify_ito(cfg)?;
            "verify-ito"
        }
        Cmd::Admissibility => {
            admissibility(cfg)?;
            "admissibility"
        }
    };
    let mut m = File::create(cfg.out_dir.join("manifest.txt"))?;
    writeln!(m, "subcommand={name}")?;
    writeln!(m, "config_hash={:016x}", cfg.hash)?;
    writeln!(m, "seed={}", cfg.seed)?;
    writeln!(m, "version={}", env!("CARGO_PKG_VERSION"))?;
    writeln!(m, "wall_time_s={:.3}", started.elapsed().as_secs_f64())?;
    Ok(())
}

fn paths_of(cfg: &ExperimentConfig) -> Result<Vec<SamplePath>, roughlocal::Error> {
    simulate_batch(
        &cfg.model, 0.0, cfg.t, cfg.dt, cfg.eps, cfg.seed, cfg.n_paths,
    )
}

fn simulate(cfg: &ExperimentConfig) -> Result<(), Box<dyn std::error::Error>> {
    for (id, p) in paths_of(cfg)?.iter().enumerate() {
        let mut f = File::create(cfg.out_dir.join(format!("path_{id:04}.csv")))?;
        writeln!(f, "# model_hash={:016x} seed={} path={id}", cfg.hash, cfg.seed)?;
        writeln!(f, "time,value,jump_size")?;
        for i in 0..p.times.len() {
            writeln!(f, "{},{},{}", p.times[i], p.values[i], p.jump_at(i))?;
        }
    }
    Ok(())
}

fn curve_pair(cfg: &ExperimentConfig) -> Result<(SamplePath, LocalTimeCurve), Box<dyn std::error::Error>> {
    let path = paths_of(cfg)?.swap_remove(0);
    let curve = local_time_binning(&path, &span_grid(&path, cfg.n_bins))?;
    Ok((path, curve))
}

fn localtime(cfg: &ExperimentConfig) -> Result<(), Box<dyn std::error::Error>> {
    let (path, curve) = curve_pair(cfg)?;
    let mut f = File::create(cfg.out_dir.join("localtime_binning.csv"))?;
    curve.write_csv("binning", &mut f)?;
    let tanaka = LocalTimeCurve {
        values: curve
            .xgrid
            .iter()
            .map(|&a| tanaka_local_time(&path, a))
            .collect(),
        xgrid: curve.xgrid.clone(),
        t: curve.t,
        normalization: curve.normalization,
    };
    let mut f = File::create(cfg.out_dir.join("localtime_tanaka.csv"))?;
    tanaka.write_csv("tanaka", &mut f)?;
    Ok(())
}

fn pvar(cfg: &ExperimentConfig) -> Result<(), Box<dyn std::error::Error>> {
    let (_, curve) = curve_pair(cfg)?;
    let l = DiscreteCurve::from_local_time(&curve)?;
    let mut f = File::create(cfg.out_dir.join("pvar.csv"))?;
    writeln!(f, "p,level,value")?;
    for &p in &[1.0, 1.5, 2.0, 2.5, 3.0] {
        for level in 6..=10u32 {
            let v = pvar_exact(&l.resample(1 << level), p)?;
            writeln!(f, "{p},{level},{v}")?;
        }
    }
    Ok(())
}

/// Lift of `(L, g)` over the support of the binned local time.
fn build_lift(cfg: &ExperimentConfig) -> Result<GeometricRoughPath, Box<dyn std::error::Error>> {
    let (_, curve) = curve_pair(cfg)?;
    let l = DiscreteCurve::from_local_time(&curve)?;
    let (a, b) = (l.xs[0], *l.xs.last().unwrap());
    let g = cfg.integrand.sample(a, b, cfg.n_bins, cfg.q)?;
    let gv: Vec<f64> = l.xs.iter().map(|&x| g.eval(x)).collect();
    let w1 = control_from_points(&l.xs, &l.ys, cfg.p)?
        .combine(&control_from_points(&l.xs, &gv, cfg.q)?);
    let zfun = move |x: f64| -> V2 { [lerp_clamped(&l.xs, &l.ys, x), g.eval(x)] };
    let knots: Vec<f64> = curve.xgrid.clone();
    Ok(converge_lift(
        &zfun,
        &knots,
        &w1,
        cfg.q.max(cfg.p),
        cfg.theta,
        cfg.m_max,
        1e-9,
    )?)
}

fn lift(cfg: &ExperimentConfig) -> Result<(), Box<dyn std::error::Error>> {
    let rp = build_lift(cfg)?;
    let mut f = File::create(cfg.out_dir.join("lift_diag.csv"))?;
    writeln!(f, "m,d")?;
    for (m, d) in &rp.distances {
        writeln!(f, "{m},{d}")?;
    }
    let mut f = File::create(cfg.out_dir.join("lift_dump.csv"))?;
    writeln!(f, "a,b,Z1_1,Z1_2,Z2_11,Z2_12,Z2_21,Z2_22")?;
    let p = &rp.path;
    for i in 0..p.n_segments() {
        let s = p.node_sig(i, i + 1);
        writeln!(
            f,
            "{},{},{},{},{},{},{},{}",
            p.xs[i], p.xs[i + 1], s.z1[0], s.z1[1], s.z2[0][0], s.z2[0][1], s.z2[1][0], s.z2[1][1]
        )?;
    }
    Ok(())
}

fn integrate(cfg: &ExperimentConfig) -> Result<(), Box<dyn std::error::Error>> {
    let (_, curve) = curve_pair(cfg)?;
    let l = DiscreteCurve::from_local_time(&curve)?;
    let (a, b) = (l.xs[0], *l.xs.last().unwrap());
    let g = cfg.integrand.sample(a, b, cfg.n_bins, cfg.q)?;
    let r = integral_cadlag_gdl(&g, &l, cfg.p, 0.5, cfg.theta)?;
    let mut f = File::create(cfg.out_dir.join("integrate.csv"))?;
    writeln!(f, "# method={} value={}", r.method, r.value)?;
    writeln!(f, "level,value")?;
    for (level, v) in &r.trace {
        writeln!(f, "{level},{v}")?;
    }
    Ok(())
}

fn verify_ito(cfg: &ExperimentConfig) -> Result<(), Box<dyn std::error::Error>> {
    let f2 = PiecewiseC1Function::with_derivative(|x| x * x, |x| 2.0 * x, 1.0);
    let paths = paths_of(cfg)?;
    let stats = |coeff: f64| -> Result<(f64, f64), roughlocal::Error> {
        let mut vals = Vec::with_capacity(paths.len());
        for p in &paths {
            vals.push(ito_residual(&f2, p, coeff, cfg.n_bins)?);
        }
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
        Ok((mean, (var / n).sqrt()))
    };
    let (m1, s1) = stats(1.0)?;
    let (mh, sh) = stats(0.5)?;
    let mut f = File::create(cfg.out_dir.join("verify_ito.csv"))?;
    writeln!(f, "test,statistic,band,pass")?;
    writeln!(f, "residual_coeff_1,{m1},{},{}", 2.0 * s1, m1.abs() < 2.0 * s1)?;
    writeln!(f, "residual_coeff_half,{mh},{},{}", 4.0 * sh, mh.abs() > 4.0 * sh)?;
    Ok(())
}

fn admissibility(cfg: &ExperimentConfig) -> Result<(), Box<dyn std::error::Error>> {
    let rep = check_admissibility(&cfg.model);
    let mut f = File::create(cfg.out_dir.join("admissibility.csv"))?;
    writeln!(f, "key,value")?;
    writeln!(f, "holds_3_2,{:?}", rep.holds_3_2)?;
    writeln!(f, "holds_4_3,{:?}", rep.holds_4_3)?;
    writeln!(f, "xi_max,{}", rep.xi_max)?;
    for (q, eps, adm) in &rep.q_eps_table {
        writeln!(f, "q={q} eps={eps},{adm:?}")?;
    }
    Ok(())
}
