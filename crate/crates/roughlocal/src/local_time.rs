//! Local time along a discrete path, two ways: occupation-density binning and
//! the Tanaka sum, the latter also exposed term by term for identity checks.
//!
//! Normalization is fixed throughout: `L_t^a` is the positive-part Tanaka
//! local time with coefficient 1, so the occupation identity carries a half:
//! `int L_t^x dx = sigma^2 t / 2`.

use crate::levy::{measure_integral, JumpSpec};
use crate::numerics::KahanSum;
use crate::path::{left_limit, SamplePath};
use crate::{Error, Result};
use std::io::Write;

pub const NORMALIZATION_TAG: &str = "tanaka-positive-part";

/// Local time at terminal time as a curve over a uniform spatial grid.
#[derive(Debug, Clone)]
pub struct LocalTimeCurve {
    pub xgrid: Vec<f64>,
    pub values: Vec<f64>,
    pub t: f64,
    pub normalization: &'static str,
}

impl LocalTimeCurve {
    /// `int L dx` by the rectangle rule (uniform grid).
    pub fn integral(&self) -> f64 {
        let dx = self.xgrid[1] - self.xgrid[0];
        self.values.iter().sum::<f64>() * dx
    }

    pub fn write_csv<W: Write>(&self, estimator: &str, w: &mut W) -> Result<()> {
        writeln!(w, "# normalization={} estimator={estimator}", self.normalization)?;
        writeln!(w, "x,L")?;
        for (x, l) in self.xgrid.iter().zip(&self.values) {
            writeln!(w, "{x},{l}")?;
        }
        Ok(())
    }
}

/// Occupation-density estimator: `L(x) = (sigma^2 / 2) * (time in bin) / dx`,
/// with the time a linear segment spends in each bin computed from exact
/// crossing times. Bins are centered on the grid points.
pub fn local_time_binning(path: &SamplePath, xgrid: &[f64]) -> Result<LocalTimeCurve> {
    if xgrid.len() < 2 {
        return Err(Error::TooFewPoints(xgrid.len()));
    }
    let dx = xgrid[1] - xgrid[0];
    if dx <= 0.0 {
        return Err(Error::InvalidParameter("xgrid must increase".into()));
    }
    let lo_edge = xgrid[0] - 0.5 * dx;
    let nbins = xgrid.len();
    let mut occ = vec![0.0f64; nbins];
    let mut spill = 0.0; // time spent outside the grid, diagnosed below

    for i in 1..path.times.len() {
        let dt = path.times[i] - path.times[i - 1];
        if dt == 0.0 {
            continue;
        }
        // continuous motion on this step ends at the left limit; the jump
        // itself takes no time
        let x0 = path.values[i - 1];
        let x1 = left_limit(path, i);
        let (lo, hi) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
        if hi == lo {
            let k = ((lo - lo_edge) / dx).floor() as isize;
            if k >= 0 && (k as usize) < nbins {
                occ[k as usize] += dt;
            } else {
                spill += dt;
            }
            continue;
        }
        let rate = dt / (hi - lo); // time per unit of space, linear motion
        let k_lo = ((lo - lo_edge) / dx).floor() as isize;
        let k_hi = ((hi - lo_edge) / dx).floor() as isize;
        for k in k_lo..=k_hi {
            let bin_lo = lo_edge + k as f64 * dx;
            let overlap = (hi.min(bin_lo + dx) - lo.max(bin_lo)).max(0.0);
            if k >= 0 && (k as usize) < nbins {
                occ[k as usize] += rate * overlap;
            } else {
                spill += rate * overlap;
            }
        }
    }
    if spill > 1e-9 * path.horizon() {
        return Err(Error::InvalidParameter(format!(
            "xgrid does not span the path range (missed {spill:.3e} of occupation time)"
        )));
    }

    let pref = 0.5 * path.sigma * path.sigma / dx;
    Ok(LocalTimeCurve {
        xgrid: xgrid.to_vec(),
        values: occ.iter().map(|t| pref * t).collect(),
        t: path.horizon(),
        normalization: NORMALIZATION_TAG,
    })
}

/// Uniform grid of `n` bins covering the path range with an empty margin bin
/// at each end, so the estimated curve vanishes at the grid boundary.
pub fn span_grid(path: &SamplePath, n: usize) -> Vec<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..path.values.len() {
        lo = lo.min(path.values[i]);
        hi = hi.max(path.values[i]);
        if i > 0 {
            // continuous motion on a step ends at the left limit, which a
            // jump may carry outside the range of the stored values
            let ll = left_limit(path, i);
            lo = lo.min(ll);
            hi = hi.max(ll);
        }
    }
    let n = n.max(4);
    let dx = (hi - lo).max(1e-12) / (n as f64 - 3.0);
    (0..n).map(|k| lo - dx + k as f64 * dx).collect()
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Discrete Tanaka sum for `L_t^a`: positive-part increment minus the
/// left-point stochastic-integral sum, plus the jump corrections.
pub fn tanaka_local_time(path: &SamplePath, a: f64) -> f64 {
    let n = path.times.len();
    let mut acc = KahanSum::new();
    acc.add(pos(path.values[n - 1] - a) - pos(path.values[0] - a));
    for i in 1..n {
        let jump = path.jump_at(i);
        let cont = path.values[i] - path.values[i - 1] - jump; // sigma dB + b_eff ds
        if path.values[i - 1] > a {
            acc.add(-cont);
        }
        if jump != 0.0 {
            let ll = left_limit(path, i);
            if ll > a {
                acc.add(-jump);
            }
            // jump correction: (X_{s-}-a)^+ - (X_s-a)^+ + 1_{X_{s-}>a} dX
            acc.add(pos(ll - a) - pos(path.values[i] - a));
            if ll > a {
                acc.add(jump);
            }
        }
    }
    acc.value()
}

/// The six pieces of the split Tanaka representation.
#[derive(Debug, Clone, Copy)]
pub struct TanakaTerms {
    /// `(X_t-a)^+ - (X_0-a)^+`
    pub phi: f64,
    /// `int 1_{X_{s-}>a} ds`
    pub i: f64,
    /// `int 1_{X_{s-}>a} dB_s`
    pub bhat: f64,
    /// Big-jump corrections.
    pub k1: f64,
    /// Compensated small-jump corrections.
    pub k2: f64,
    /// Small-jump compensator drift term.
    pub k3: f64,
}

impl TanakaTerms {
    /// `phi - b*I - sigma*Bhat + K1 + K2 + K3`.
    pub fn recombine(&self, sigma: f64, b: f64) -> f64 {
        self.phi - b * self.i - sigma * self.bhat + self.k1 + self.k2 + self.k3
    }
}

/// Closed-form / quadrature evaluation of
/// `int_{eps<=|y|<1} [ (x-a)^+ - (x+y-a)^+ ] n(dy)`.
///
/// The integrand anchors at the pre-jump value `x` (predictable convention),
/// which is what makes the split below recombine to the Tanaka sum exactly.
fn j1_compensator(spec: &JumpSpec, eps: f64, x: f64, a: f64) -> Result<f64> {
    measure_integral(spec, eps, &|y| pos(x - a) - pos(x + y - a))
}

/// Tanaka representation split into drift, Brownian, big-jump and
/// small-jump/compensator pieces. `spec` and `eps` must match the simulation
/// (they identify which jumps were treated as compensated small jumps).
///
/// `b` is recovered from `b_eff` by adding back the small-jump compensator, so
/// the recombination identity holds against `recombine(sigma, b)`.
pub fn tanaka_terms(
    path: &SamplePath,
    spec: &JumpSpec,
    eps: f64,
    a: f64,
) -> Result<TanakaTerms> {
    let n = path.times.len();
    let phi = pos(path.values[n - 1] - a) - pos(path.values[0] - a);
    let mut i_acc = KahanSum::new();
    let mut bhat = KahanSum::new();
    let mut k1 = KahanSum::new();
    let mut small_j1 = KahanSum::new();
    let mut c2 = KahanSum::new(); // shared compensator double integral
    let mut comp_i = KahanSum::new(); // int 1_{X_{s-}>a} ds * int y n(dy)
    // same closed form that produced b_eff, so drift pieces recombine exactly
    let comp = crate::levy::compensator_drift(
        &crate::levy::LevyModel {
            sigma: 0.0,
            drift_b: 0.0,
            jumps: spec.clone(),
        },
        eps,
    )?;

    for i in 1..n {
        let dt = path.times[i] - path.times[i - 1];
        let x = path.values[i - 1];
        let jump = path.jump_at(i);
        if x > a {
            i_acc.add(dt);
            if path.sigma != 0.0 {
                let cont = path.values[i] - x - jump;
                bhat.add((cont - path.b_eff * dt) / path.sigma);
            }
            comp_i.add(comp * dt);
        }
        if jump != 0.0 {
            let ll = left_limit(path, i);
            let j1 = pos(ll - a) - pos(path.values[i] - a);
            if jump.abs() >= 1.0 {
                k1.add(j1);
            } else {
                small_j1.add(j1);
            }
        }
        c2.add(j1_compensator(spec, eps, x, a)? * dt);
    }

    Ok(TanakaTerms {
        phi,
        i: i_acc.value(),
        bhat: bhat.value(),
        k1: k1.value(),
        k2: small_j1.value() - c2.value(),
        k3: c2.value() + comp_i.value(),
    })
}

/// `J1(a_hi) - J1(a_lo)` for a jump from `x_sm` to `x_s`, written out as the
/// seven-case sum over the positions of `x_s` and `x_sm` relative to the band.
pub fn j_star(x_s: f64, x_sm: f64, a_lo: f64, a_hi: f64) -> f64 {
    let in_band = |x: f64| a_lo < x && x <= a_hi;
    let mut v = 0.0;
    if x_s <= a_lo && in_band(x_sm) {
        v -= x_sm - a_lo;
    }
    if x_s <= a_lo && x_sm > a_hi {
        v -= a_hi - a_lo;
    }
    if in_band(x_s) && x_sm <= a_lo {
        v += x_s - a_lo;
    }
    if in_band(x_s) && x_sm > a_hi {
        v -= a_hi - x_s;
    }
    if x_s > a_hi && x_sm <= a_lo {
        v += a_hi - a_lo;
    }
    if x_s > a_hi && in_band(x_sm) {
        v += a_hi - x_sm;
    }
    if in_band(x_s) && in_band(x_sm) {
        v += x_s - x_sm;
    }
    v
}

/// `[J1 + J2](a_hi) - [J1 + J2](a_lo)` for the same jump, six-case form.
pub fn j_star2(x_s: f64, x_sm: f64, a_lo: f64, a_hi: f64) -> f64 {
    let in_band = |x: f64| a_lo < x && x <= a_hi;
    let mut v = 0.0;
    if x_s <= a_lo && in_band(x_sm) {
        v -= x_s - a_lo;
    }
    if x_s <= a_lo && x_sm > a_hi {
        v -= a_hi - a_lo;
    }
    if in_band(x_s) && x_sm <= a_lo {
        v += x_s - a_lo;
    }
    if in_band(x_s) && x_sm > a_hi {
        v -= a_hi - x_s;
    }
    if x_s > a_hi && x_sm <= a_lo {
        v += a_hi - a_lo;
    }
    if x_s > a_hi && in_band(x_sm) {
        v += a_hi - x_s;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{CompoundPoisson, LevyModel, SizeLaw};
    use crate::path::{simulate_batch, simulate_stream, simulate_with_jumps};
    use proptest::prelude::*;

    fn j1(x_s: f64, x_sm: f64, a: f64) -> f64 {
        pos(x_sm - a) - pos(x_s - a)
    }

    fn j2(x_s: f64, x_sm: f64, a: f64) -> f64 {
        if x_sm > a {
            x_s - x_sm
        } else {
            0.0
        }
    }

    #[test]
    fn j_star_examples() {
        assert_eq!(j_star(2.0, 2.0, 0.0, 1.0), 0.0);
        assert_eq!(j_star2(0.3, 0.3, 0.0, 1.0), 0.0);
        assert_eq!(j_star(2.0, 0.5, 0.0, 1.0), 0.5);
        assert_eq!(j_star(-1.0, 2.0, 0.0, 1.0), -1.0);
        assert_eq!(j_star2(2.0, 0.5, 0.0, 1.0), -1.0);
    }

    proptest! {
        #[test]
        fn j_star_matches_direct_difference(
            x_s in -3.0f64..3.0,
            x_sm in -3.0f64..3.0,
            a in -2.0f64..2.0,
            w in 1e-6f64..2.0,
        ) {
            let (a_lo, a_hi) = (a, a + w);
            let d1 = j1(x_s, x_sm, a_hi) - j1(x_s, x_sm, a_lo);
            prop_assert!((j_star(x_s, x_sm, a_lo, a_hi) - d1).abs() < 1e-12);
            let d2 = d1 + j2(x_s, x_sm, a_hi) - j2(x_s, x_sm, a_lo);
            prop_assert!((j_star2(x_s, x_sm, a_lo, a_hi) - d2).abs() < 1e-12);
        }
    }

    #[test]
    fn binning_zero_for_zero_sigma() {
        let p = simulate_with_jumps(0.0, 1.0, 0.0, 1.0, 0.01, &[], 1).unwrap();
        let curve = local_time_binning(&p, &span_grid(&p, 50)).unwrap();
        assert!(curve.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn binning_occupation_identity() {
        let m = LevyModel::brownian(1.0, 0.0);
        let p = simulate_stream(&m, 0.0, 1.0, 1e-4, 0.1, 4, 0).unwrap();
        let curve = local_time_binning(&p, &span_grid(&p, 200)).unwrap();
        let integral = curve.integral();
        assert!(
            (integral - 0.5).abs() / 0.5 < 0.02,
            "int L dx = {integral}, want 0.5"
        );
        assert!(curve.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn tanaka_zero_when_level_above_path() {
        let p = simulate_stream(&LevyModel::brownian(1.0, 0.2), 0.0, 1.0, 0.01, 0.1, 5, 0).unwrap();
        let top = p.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(tanaka_local_time(&p, top + 1.0).abs() < 1e-14);
        let bot = p.values.iter().cloned().fold(f64::INFINITY, f64::min);
        // below the path everything telescopes as well
        assert!(tanaka_local_time(&p, bot - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tanaka_on_monotone_drift() {
        // exact telescoping off the range; inside, the left-point indicator
        // overshoots the crossing by at most one grid step of drift
        let p = simulate_with_jumps(0.0, 1.0, 0.0, 2.0, 0.01, &[], 1).unwrap();
        assert!(tanaka_local_time(&p, -0.5).abs() < 1e-12);
        assert!(tanaka_local_time(&p, 2.5).abs() < 1e-12);
        let v = tanaka_local_time(&p, 0.7);
        assert!(v.abs() <= 0.01 + 1e-12, "{v}");
    }

    #[test]
    fn tanaka_mean_at_zero_matches_brownian_formula() {
        // E L_1^0 = E|B_1| / 2 = sqrt(2/pi)/2 ~ 0.39894/2
        let m = LevyModel::brownian(1.0, 0.0);
        let n = 10_000;
        let paths = simulate_batch(&m, 0.0, 1.0, 1e-3, 0.1, 21, n).unwrap();
        let mean: f64 = paths.iter().map(|p| tanaka_local_time(p, 0.0)).sum::<f64>() / n as f64;
        let target = (2.0 / std::f64::consts::PI).sqrt() / 2.0;
        assert!((mean - target).abs() < 0.02, "mean={mean} target={target}");
    }

    #[test]
    fn tanaka_agrees_with_binning() {
        // the two estimators see the same occupation but with independent
        // discretization noise, so compare their path-averaged curves
        let m = LevyModel::brownian(1.0, 0.0);
        let n_paths = 100;
        let xgrid: Vec<f64> = (0..81).map(|k| -2.0 + 0.05 * k as f64).collect();
        let mut bin_mean = vec![0.0f64; xgrid.len()];
        let mut tan_mean = vec![0.0f64; xgrid.len()];
        for id in 0..n_paths {
            let p = simulate_stream(&m, 0.0, 1.0, 1e-4, 0.1, 33, id).unwrap();
            let grid = span_grid(&p, 400);
            let curve = local_time_binning(&p, &grid).unwrap();
            for (k, x) in xgrid.iter().enumerate() {
                tan_mean[k] += tanaka_local_time(&p, *x) / n_paths as f64;
                bin_mean[k] += crate::numerics::lerp_clamped(&grid, &curve.values, *x)
                    / n_paths as f64;
            }
        }
        let at_zero = (tan_mean[40] - bin_mean[40]).abs() / bin_mean[40];
        assert!(at_zero < 0.05, "gap at 0: {at_zero}");
        let l1_gap: f64 = (0..xgrid.len())
            .map(|k| (tan_mean[k] - bin_mean[k]).abs())
            .sum();
        let l1_mass: f64 = bin_mean.iter().sum();
        assert!(l1_gap / l1_mass < 0.05, "relative L1 gap {}", l1_gap / l1_mass);
    }

    fn jumpy_model() -> LevyModel {
        LevyModel::new(
            1.0,
            0.2,
            JumpSpec::PowerSmall {
                alpha: 0.8,
                c_plus: 0.7,
                c_minus: 0.5,
                big_jump: Some(CompoundPoisson {
                    rate: 0.5,
                    law: SizeLaw::Uniform { lo: 1.0, hi: 2.0 },
                }),
            },
        )
        .unwrap()
    }

    #[test]
    fn terms_vanish_without_jumps() {
        let m = LevyModel::brownian(1.0, 0.3);
        let p = simulate_stream(&m, 0.0, 1.0, 0.01, 0.1, 6, 0).unwrap();
        let t = tanaka_terms(&p, &JumpSpec::None, 0.1, 0.1).unwrap();
        assert_eq!(t.k1, 0.0);
        assert_eq!(t.k2, 0.0);
        assert_eq!(t.k3, 0.0);
        let l = tanaka_local_time(&p, 0.1);
        assert!((t.recombine(p.sigma, 0.3) - l).abs() < 1e-12);
    }

    #[test]
    fn terms_with_level_below_path() {
        let m = jumpy_model();
        let eps = 0.1;
        let p = simulate_stream(&m, 0.0, 1.0, 0.01, eps, 7, 0).unwrap();
        let bot = p.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let t = tanaka_terms(&p, &m.jumps, eps, bot - 1.0).unwrap();
        assert!((t.i - 1.0).abs() < 1e-12); // indicator identically 1
        assert!(t.recombine(p.sigma, m.drift_b).abs() < 1e-10);
    }

    #[test]
    fn recombination_identity_random_paths() {
        let m = jumpy_model();
        let eps = 0.1;
        let b = m.drift_b;
        for id in 0..20 {
            let p = simulate_stream(&m, 0.0, 1.0, 0.01, eps, 100 + id, 0).unwrap();
            for a in [-0.5, 0.0, 0.4] {
                let l = tanaka_local_time(&p, a);
                let t = tanaka_terms(&p, &m.jumps, eps, a).unwrap();
                assert!(
                    (t.recombine(p.sigma, b) - l).abs() < 1e-10,
                    "id={id} a={a}: {} vs {l}",
                    t.recombine(p.sigma, b)
                );
            }
        }
    }
}
