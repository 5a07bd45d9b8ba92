//! End-to-end acceptance checks over the whole pipeline: each criterion is a
//! self-contained, seeded experiment returning a pass/fail verdict with the
//! measured statistic. Shared by the acceptance test target and `--check`.

use crate::integrate::{
    convergence_under_mollification, integral_cadlag_gdl, rough_integral_gdl, rough_integral_ldl,
    young_integral,
};
use crate::ito::{holder_moment_check, ito_residual, PiecewiseC1Function};
use crate::levy::{CompoundPoisson, JumpSpec, LevyModel, SizeLaw};
use crate::lift::{chen_combine, converge_lift, GeometricRoughPath, Level2Path, V2};
use crate::local_time::{
    local_time_binning, span_grid, tanaka_local_time, LocalTimeCurve, NORMALIZATION_TAG,
};
use crate::numerics::lerp_clamped;
use crate::path::{simulate_batch, SamplePath};
use crate::qvar::{control_from_points, ControlFn, QVarFunction};
use crate::variation::{pvar_points, quadratic_variation_sum, DiscreteCurve};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn result(id: u32, name: &'static str, pass: bool, detail: String) -> CriterionResult {
    CriterionResult {
        id,
        name,
        pass,
        detail,
    }
}

fn brownian() -> LevyModel {
    LevyModel::brownian(1.0, 0.0)
}

fn tanaka_curve(path: &SamplePath, grid: &[f64]) -> LocalTimeCurve {
    LocalTimeCurve {
        xgrid: grid.to_vec(),
        values: grid.iter().map(|&a| tanaka_local_time(path, a)).collect(),
        t: path.horizon(),
        normalization: NORMALIZATION_TAG,
    }
}

fn mean_curves(paths: &[SamplePath], grid: &[f64], nbins: usize) -> (Vec<f64>, Vec<f64>) {
    let acc: Vec<(Vec<f64>, Vec<f64>)> = paths
        .par_iter()
        .map(|p| {
            let tan: Vec<f64> = grid.iter().map(|&a| tanaka_local_time(p, a)).collect();
            let c = local_time_binning(p, &span_grid(p, nbins)).unwrap();
            let bin: Vec<f64> = grid
                .iter()
                .map(|&x| lerp_clamped(&c.xgrid, &c.values, x))
                .collect();
            (tan, bin)
        })
        .collect();
    let n = paths.len() as f64;
    let mut tan = vec![0.0; grid.len()];
    let mut bin = vec![0.0; grid.len()];
    for (t, b) in &acc {
        for k in 0..grid.len() {
            tan[k] += t[k] / n;
            bin[k] += b[k] / n;
        }
    }
    (tan, bin)
}

/// Occupation identity for the binning estimator on Brownian paths.
pub fn c1_occupation_identity() -> CriterionResult {
    let paths = simulate_batch(&brownian(), 0.0, 1.0, 1e-4, 0.1, 101, 100).unwrap();
    let mean: f64 = paths
        .par_iter()
        .map(|p| local_time_binning(p, &span_grid(p, 256)).unwrap().integral())
        .sum::<f64>()
        / paths.len() as f64;
    let rel = (mean - 0.5).abs() / 0.5;
    result(
        1,
        "occupation identity",
        rel < 0.02,
        format!("mean integral {mean:.5} vs 0.5, rel err {:.3}%", 100.0 * rel),
    )
}

/// Tanaka and binning estimators agree on the averaged curve.
pub fn c2_estimator_cross_validation() -> CriterionResult {
    let grid: Vec<f64> = (0..=80).map(|k| -2.0 + 4.0 * k as f64 / 80.0).collect();
    let sup_rel = |model: &LevyModel, eps: f64, seed: u64| -> f64 {
        let paths = simulate_batch(model, 0.0, 1.0, 1e-4, eps, seed, 100).unwrap();
        let (tan, bin) = mean_curves(&paths, &grid, 400);
        let peak = bin.iter().cloned().fold(0.0f64, f64::max);
        let mut sup = 0.0f64;
        for k in 0..grid.len() {
            if bin[k] > 0.05 * peak {
                sup = sup.max((tan[k] - bin[k]).abs() / peak);
            }
        }
        sup
    };
    let bm = sup_rel(&brownian(), 0.1, 102);
    let jump_model = LevyModel::new(
        1.0,
        0.0,
        JumpSpec::PowerSmall {
            alpha: 0.8,
            c_plus: 0.5,
            c_minus: 0.5,
            big_jump: None,
        },
    )
    .unwrap();
    let jm = sup_rel(&jump_model, 0.05, 103);
    result(
        2,
        "Tanaka vs binning cross-validation",
        bm < 0.05 && jm < 0.08,
        format!("sup-norm rel err: Brownian {bm:.4} (< 0.05), jump model {jm:.4} (< 0.08)"),
    )
}

/// MC mean of the Brownian local time at 0 against the closed form.
pub fn c3_mean_local_time() -> CriterionResult {
    let n = 10_000usize;
    let paths = simulate_batch(&brownian(), 0.0, 1.0, 1e-3, 0.1, 104, n).unwrap();
    let vals: Vec<f64> = paths
        .par_iter()
        .map(|p| tanaka_local_time(p, 0.0))
        .collect();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    let se = (var / n as f64).sqrt();
    let target = 0.5 * (2.0 / std::f64::consts::PI).sqrt();
    let z = (mean - target).abs() / se;
    result(
        3,
        "mean local time at zero",
        z < 3.0,
        format!("mean {mean:.5} vs {target:.5}, z = {z:.2} (< 3)"),
    )
}

/// Hölder scaling exponent of local-time increments in the level.
pub fn c4_holder_slope() -> CriterionResult {
    let spacings = [0.0625, 0.04419, 0.03125, 0.02210, 0.015625];
    let (slope, se) =
        holder_moment_check(&brownian(), 4.0, 1.0, 1e-4, 0.1, &spacings, 10_000, 105).unwrap();
    result(
        4,
        "Hoelder moment slope",
        slope >= 1.7,
        format!("p=4 log-log slope {slope:.3} +- {se:.3} (>= 1.7)"),
    )
}

/// Quadratic-variation statistic of the local-time curve vs twice its
/// occupation integral.
pub fn c5_quadratic_variation_statistic() -> CriterionResult {
    let np = 1usize << 10;
    let paths = simulate_batch(&brownian(), 0.0, 1.0, 1e-4, 0.1, 106, 100).unwrap();
    let ratios: Vec<f64> = paths
        .par_iter()
        .map(|p| {
            let grid: Vec<f64> = (0..=np).map(|k| -2.5 + 5.0 * k as f64 / np as f64).collect();
            let c = tanaka_curve(p, &grid);
            quadratic_variation_sum(&c, np) / (2.0 * c.integral())
        })
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    result(
        5,
        "quadratic-variation statistic",
        (mean - 1.0).abs() < 0.10,
        format!("mean ratio {mean:.4} vs 1 at 2^10 partition points (10%)"),
    )
}

/// Exact p-variation against exhaustive enumeration.
pub fn c6_pvar_brute_force() -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=12usize);
        let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = rng.gen_range(1.0..3.5);
        let dp = pvar_points(&ys, p).unwrap();
        // enumerate every subset of interior points
        let interior = n - 2;
        let mut best = 0.0f64;
        for mask in 0..(1u32 << interior) {
            let mut prev = ys[0];
            let mut s = 0.0;
            for k in 0..interior {
                if mask >> k & 1 == 1 {
                    s += (ys[k + 1] - prev).abs().powf(p);
                    prev = ys[k + 1];
                }
            }
            s += (ys[n - 1] - prev).abs().powf(p);
            best = best.max(s);
        }
        worst = worst.max((dp - best).abs() / best.max(1e-12));
    }
    result(
        6,
        "p-variation brute-force oracle",
        worst < 1e-9,
        format!("max rel deviation {worst:.2e} over 1000 curves (< 1e-9)"),
    )
}

/// p-variation of local-time curves is stable under x-grid refinement.
pub fn c7_pvar_grid_stability() -> CriterionResult {
    let paths = simulate_batch(&brownian(), 0.0, 1.0, 1e-3, 0.1, 108, 50).unwrap();
    let mut changes: Vec<f64> = paths
        .par_iter()
        .map(|p| {
            let n = 2048usize;
            let grid: Vec<f64> = (0..=n).map(|k| -2.5 + 5.0 * k as f64 / n as f64).collect();
            let vals: Vec<f64> = grid.iter().map(|&a| tanaka_local_time(p, a)).collect();
            // nested sub-grids; compare on the p-variation norm scale
            let pv = |step: usize| {
                let sub: Vec<f64> = vals.iter().step_by(step).cloned().collect();
                pvar_points(&sub, 2.5).unwrap().powf(1.0 / 2.5)
            };
            let (a, b, c) = (pv(4), pv(2), pv(1));
            ((b - a).abs() / a).max((c - b).abs() / b)
        })
        .collect();
    changes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = changes[changes.len() / 2];
    result(
        7,
        "p-variation grid stability",
        median < 0.05,
        format!("median relative change {:.3}% under 512->1024->2048 (< 5%)", 100.0 * median),
    )
}

fn random_walk_lift(seed: u64, n: usize) -> Level2Path {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let mut l = 0.0;
    let mut g = 0.5;
    let z: Vec<V2> = (0..=n)
        .map(|_| {
            let out = [l, g];
            l += rng.gen_range(-1.0f64..1.0) / (n as f64).sqrt();
            g += rng.gen_range(-1.0f64..1.0) / n as f64;
            out
        })
        .collect();
    Level2Path::from_samples(0, xs.clone(), xs, z).unwrap()
}

/// Chen gluing and the symmetric-part identity on every lifted interval.
pub fn c8_chen_and_symmetric_part() -> CriterionResult {
    let mut worst_chen = 0.0f64;
    let mut worst_sym = 0.0f64;
    for seed in 0..6u64 {
        let p = random_walk_lift(200 + seed, 120);
        let n = p.n_segments();
        for i in 0..n {
            for j in i + 1..=n {
                let s = p.node_sig(i, j);
                let half = [
                    [0.5 * s.z1[0] * s.z1[0], 0.5 * s.z1[0] * s.z1[1]],
                    [0.5 * s.z1[1] * s.z1[0], 0.5 * s.z1[1] * s.z1[1]],
                ];
                for r in 0..2 {
                    for c in 0..2 {
                        let sym = 0.5 * (s.z2[r][c] + s.z2[c][r]);
                        worst_sym = worst_sym.max((sym - half[r][c]).abs());
                    }
                }
                if (i + j) % 7 == 0 {
                    let k = (i + j) / 2;
                    let glued = chen_combine(&p.node_sig(i, k), &p.node_sig(k, j));
                    for r in 0..2 {
                        for c in 0..2 {
                            worst_chen = worst_chen.max((glued.z2[r][c] - s.z2[r][c]).abs());
                        }
                    }
                }
            }
        }
    }
    result(
        8,
        "Chen and symmetric-part identities",
        worst_chen < 1e-10 && worst_sym < 1e-12,
        format!("max Chen defect {worst_chen:.2e} (< 1e-10), symmetric defect {worst_sym:.2e} (< 1e-12)"),
    )
}

fn local_time_pair(path: &SamplePath, nbins: usize) -> (DiscreteCurve, ControlFn) {
    let c = local_time_binning(path, &span_grid(path, nbins)).unwrap();
    let l = DiscreteCurve::from_local_time(&c).unwrap();
    let w_l = control_from_points(&l.xs, &l.ys, 2.05).unwrap();
    (l, w_l)
}

fn lift_of_l_and_linear(path: &SamplePath, theta: f64, m_max: u32) -> GeometricRoughPath {
    let (l, w_l) = local_time_pair(path, 512);
    let w_g = control_from_points(&l.xs, &l.xs, 1.0).unwrap();
    let w1 = w_l.combine(&w_g);
    let zfun = |x: f64| [lerp_clamped(&l.xs, &l.ys, x), x];
    converge_lift(&zfun, &l.xs, &w1, 2.05, theta, m_max, 1e-300).unwrap()
}

/// Successive lift distances decrease on Brownian local-time lifts.
pub fn c9_lift_convergence() -> CriterionResult {
    let paths = simulate_batch(&brownian(), 0.0, 1.0, 1e-3, 0.1, 109, 100).unwrap();
    let ok: usize = paths
        .par_iter()
        .map(|p| {
            let rp = lift_of_l_and_linear(p, 2.15, 9);
            let d: Vec<f64> = rp
                .distances
                .iter()
                .filter(|(m, _)| (2..=8).contains(m))
                .map(|&(_, d)| d)
                .collect();
            usize::from(d.windows(2).all(|w| w[1] < w[0]))
        })
        .sum();
    result(
        9,
        "lift convergence",
        ok >= 95,
        format!("strictly decreasing d_theta(Z(m), Z(final)) for m=2..8 in {ok}/100 runs (>= 95)"),
    )
}

/// The self-integral identity holds on every constructed lift.
pub fn c10_ldl_identity() -> CriterionResult {
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let path = random_walk_lift(300 + seed, 200);
        let (la, lb) = (path.z[0][0], path.z[200][0]);
        let rp = GeometricRoughPath {
            path,
            theta: 2.2,
            distances: vec![],
            converged: true,
            non_cauchy: false,
        };
        let v = rough_integral_ldl(&rp, 0.0, 1.0).value;
        let want = 0.5 * (lb * lb - la * la);
        worst = worst.max((v - want).abs() / want.abs().max(1.0));
    }
    let paths = simulate_batch(&brownian(), 0.0, 1.0, 1e-3, 0.1, 110, 3).unwrap();
    for p in &paths {
        let rp = lift_of_l_and_linear(p, 2.2, 6);
        let (a, b) = (rp.path.xs[0], *rp.path.xs.last().unwrap());
        for (lo, hi) in [(a, b), (a + 0.25 * (b - a), a + 0.8 * (b - a))] {
            let v = rough_integral_ldl(&rp, lo, hi).value;
            let (za, zb) = (rp.sig_between(a, lo).z1[0], rp.sig_between(a, hi).z1[0]);
            let (la, lb) = (rp.path.z[0][0] + za, rp.path.z[0][0] + zb);
            let want = 0.5 * (lb * lb - la * la);
            worst = worst.max((v - want).abs() / want.abs().max(1.0));
        }
    }
    result(
        10,
        "L dL identity",
        worst < 1e-6,
        format!("max normalized defect {worst:.2e} (< 1e-6)"),
    )
}

/// Young and rough integration agree for a q = 1.5 integrand.
pub fn c11_young_rough_agreement() -> CriterionResult {
    let paths = simulate_batch(&brownian(), 0.0, 1.0, 1e-3, 0.1, 111, 50).unwrap();
    let worst = paths
        .par_iter()
        .map(|p| {
            let (l, _) = local_time_pair(p, 512);
            let (a, b) = (l.xs[0], *l.xs.last().unwrap());
            let g = QVarFunction::sample(|x| x.abs().powf(0.7), a, b, 256, 1.5).unwrap();
            let young = young_integral(&g, &l, 1.5, 2.05).unwrap().value;
            let rough = integral_cadlag_gdl(&g, &l, 2.05, 0.5, 2.2).unwrap().value;
            (young - rough).abs() / young.abs().max(1.0)
        })
        .reduce(|| 0.0, f64::max);
    result(
        11,
        "Young/rough agreement",
        worst < 1e-3,
        format!("max relative difference {worst:.2e} over 50 paths (< 1e-3)"),
    )
}

/// The smooth (sin, cos) pair reproduces its analytic level-2 integrals.
pub fn c12_smooth_pair_oracle() -> CriterionResult {
    let n = 4096usize;
    let s = QVarFunction::sample(|x| x.sin(), 0.0, 1.0, n, 1.0).unwrap();
    let c = QVarFunction::sample(|x| x.cos(), 0.0, 1.0, n, 1.0).unwrap();
    let w1 = crate::qvar::build_control(&s)
        .unwrap()
        .combine(&crate::qvar::build_control(&c).unwrap());
    let zfun = |x: f64| [x.sin(), x.cos()];
    let rp = converge_lift(&zfun, &s.grid, &w1, 1.0, 2.1, 8, 1e-4).unwrap();
    let sig = rp.sig_between(0.0, 1.0);
    let (b, a) = (1.0f64, 0.0f64);
    let want = [
        [
            0.5 * (b.sin() - a.sin()).powi(2),
            -((b - a) / 2.0 - ((2.0 * b).sin() - (2.0 * a).sin()) / 4.0)
                - a.sin() * (b.cos() - a.cos()),
        ],
        [
            (b - a) / 2.0 + ((2.0 * b).sin() - (2.0 * a).sin()) / 4.0
                - a.cos() * (b.sin() - a.sin()),
            0.5 * (b.cos() - a.cos()).powi(2),
        ],
    ];
    let mut worst = 0.0f64;
    for r in 0..2 {
        for cc in 0..2 {
            worst = worst.max((sig.z2[r][cc] - want[r][cc]).abs());
        }
    }
    // int cos d(sin) over [0, 1]
    let integral = rough_integral_gdl(&rp, 0.0, 1.0).value;
    let want_int = (b - a) / 2.0 + ((2.0 * b).sin() - (2.0 * a).sin()) / 4.0;
    let int_err = (integral - want_int).abs();
    result(
        12,
        "smooth-pair analytic oracle",
        worst < 1e-6 && int_err < 1e-6,
        format!("max Z2 error {worst:.2e}, integral error {int_err:.2e} (both < 1e-6)"),
    )
}

fn residual_stats(model: &LevyModel, coeff: f64, eps: f64, seed: u64, n: usize) -> (f64, f64, f64) {
    let f = PiecewiseC1Function::with_derivative(|x| x * x, |x| 2.0 * x, 1.0);
    let paths = simulate_batch(model, 0.0, 1.0, 1e-4, eps, seed, n).unwrap();
    let pairs: Vec<(f64, f64)> = paths
        .par_iter()
        .map(|p| {
            let r = ito_residual(&f, p, coeff, 400).unwrap();
            let xt = *p.values.last().unwrap();
            (r, (xt * xt - p.x0() * p.x0()).abs())
        })
        .collect();
    let nn = n as f64;
    let mean = pairs.iter().map(|p| p.0).sum::<f64>() / nn;
    let var = pairs.iter().map(|p| (p.0 - mean) * (p.0 - mean)).sum::<f64>() / (nn - 1.0);
    let mean_abs_df = pairs.iter().map(|p| p.1).sum::<f64>() / nn;
    (mean, (var / nn).sqrt(), mean_abs_df)
}

/// The local-time correction enters the change-of-variable formula with
/// coefficient 1 under this normalization.
pub fn c13_ito_discrimination() -> CriterionResult {
    let (m1, s1, _) = residual_stats(&brownian(), 1.0, 0.1, 113, 100);
    let (mh, sh, _) = residual_stats(&brownian(), 0.5, 0.1, 113, 100);
    let pass = m1.abs() < 2.0 * s1 && mh.abs() > 4.0 * sh;
    result(
        13,
        "Ito coefficient discrimination",
        pass,
        format!(
            "coeff 1: mean {m1:.4} (|.| < 2se = {:.4}); coeff 1/2: mean {mh:.4} (|.| > 4se = {:.4})",
            2.0 * s1,
            4.0 * sh
        ),
    )
}

/// The formula still balances in the presence of jumps.
pub fn c14_ito_with_jumps() -> CriterionResult {
    let model = LevyModel::new(
        1.0,
        0.0,
        JumpSpec::CompoundPoisson(CompoundPoisson {
            rate: 1.0,
            law: SizeLaw::PlusMinus(0.5),
        }),
    )
    .unwrap();
    let f = PiecewiseC1Function::with_derivative(|x| x * x, |x| 2.0 * x, 1.0);
    let paths = simulate_batch(&model, 0.0, 1.0, 1e-4, 0.01, 114, 100).unwrap();
    let pairs: Vec<(f64, f64)> = paths
        .par_iter()
        .map(|p| {
            let r = ito_residual(&f, p, 1.0, 400).unwrap().abs();
            let xt = *p.values.last().unwrap();
            (r, (xt * xt).abs())
        })
        .collect();
    let mean_res = pairs.iter().map(|p| p.0).sum::<f64>() / pairs.len() as f64;
    let mean_df = pairs.iter().map(|p| p.1).sum::<f64>() / pairs.len() as f64;
    let rel = mean_res / mean_df;
    result(
        14,
        "Ito formula with jumps",
        rel < 0.05,
        format!("mean |residual| / mean |df| = {rel:.4} (< 0.05)"),
    )
}

/// The jump-stretching route: delta-invariance and the pure-step value.
pub fn c15_cadlag_route() -> CriterionResult {
    let path = simulate_batch(&brownian(), 0.0, 1.0, 1e-3, 0.1, 115, 1)
        .unwrap()
        .remove(0);
    let (l, _) = local_time_pair(&path, 512);
    let (a, b) = (l.xs[0], *l.xs.last().unwrap());
    // three-step g anchored on interior grid points of l
    let picks = [l.xs[100], l.xs[250], l.xs[400]];
    let sizes = [1.0, -0.6, 0.4];
    let n = 128usize;
    let grid: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
    let mut grid = grid;
    grid.extend(picks);
    grid.sort_by(|u, v| u.partial_cmp(v).unwrap());
    grid.dedup();
    let values: Vec<f64> = grid
        .iter()
        .map(|&x| {
            picks
                .iter()
                .zip(&sizes)
                .filter(|(&xr, _)| x >= xr)
                .map(|(_, &s)| s)
                .sum()
        })
        .collect();
    let jumps: Vec<(f64, f64)> = picks.iter().cloned().zip(sizes.iter().cloned()).collect();
    let g = QVarFunction::new(grid, values, jumps, 2.0).unwrap();
    let vals: Vec<f64> = [0.1, 0.5, 1.0]
        .iter()
        .map(|&d| integral_cadlag_gdl(&g, &l, 2.05, d, 2.2).unwrap().value)
        .collect();
    let spread = (vals[0] - vals[1]).abs().max((vals[1] - vals[2]).abs());
    // by parts: int L dg should equal the pure-step sum
    let boundary = g.eval(b) * l.ys.last().unwrap() - g.eval(a) * l.ys[0];
    let ldg = boundary - vals[1];
    let want: f64 = picks
        .iter()
        .zip(&sizes)
        .map(|(&xr, &s)| lerp_clamped(&l.xs, &l.ys, xr) * s)
        .sum();
    let step_err = (ldg - want).abs();
    result(
        15,
        "cadlag jump-stretching route",
        spread < 1e-8 && step_err < 1e-6,
        format!("delta spread {spread:.2e} (< 1e-8); step-sum defect {step_err:.2e} (< 1e-6)"),
    )
}

/// Mollified integrands converge to the direct value.
pub fn c16_mollification_convergence() -> CriterionResult {
    let paths = simulate_batch(&brownian(), 0.0, 1.0, 1e-3, 0.1, 116, 20).unwrap();
    let errs: Vec<[f64; 3]> = paths
        .par_iter()
        .map(|p| {
            let (l, _) = local_time_pair(p, 400);
            let (a, b) = (l.xs[0], *l.xs.last().unwrap());
            let g = QVarFunction::sample(|x| x.abs().powf(0.6), a, b, 256, 1.8).unwrap();
            let target = integral_cadlag_gdl(&g, &l, 2.05, 0.5, 2.2).unwrap().value;
            let seq =
                convergence_under_mollification(&g, &l, 2.05, 2.2, &[10.0, 100.0, 1000.0])
                    .unwrap();
            [
                (seq[0].1 - target).abs(),
                (seq[1].1 - target).abs(),
                (seq[2].1 - target).abs(),
            ]
        })
        .collect();
    let n = errs.len() as f64;
    let mean = |k: usize| errs.iter().map(|e| e[k]).sum::<f64>() / n;
    let (e10, e100, e1000) = (mean(0), mean(1), mean(2));
    result(
        16,
        "mollification convergence",
        e10 > e100 && e100 > e1000,
        format!("mean |error| over 20 paths: j=10: {e10:.2e} > j=100: {e100:.2e} > j=1000: {e1000:.2e}"),
    )
}

pub fn run_one(id: u32) -> Option<CriterionResult> {
    Some(match id {
        1 => c1_occupation_identity(),
        2 => c2_estimator_cross_validation(),
        3 => c3_mean_local_time(),
        4 => c4_holder_slope(),
        5 => c5_quadratic_variation_statistic(),
        6 => c6_pvar_brute_force(),
        7 => c7_pvar_grid_stability(),
        8 => c8_chen_and_symmetric_part(),
        9 => c9_lift_convergence(),
        10 => c10_ldl_identity(),
        11 => c11_young_rough_agreement(),
        12 => c12_smooth_pair_oracle(),
        13 => c13_ito_discrimination(),
        14 => c14_ito_with_jumps(),
        15 => c15_cadlag_route(),
        16 => c16_mollification_convergence(),
        _ => return None,
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=16).map(|id| run_one(id).unwrap()).collect()
}
