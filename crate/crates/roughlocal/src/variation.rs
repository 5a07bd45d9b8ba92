//! p-variation functionals on discrete curves: the exact partition supremum,
//! a dyadic upper-bound sum, and the quadratic-variation statistic for
//! local-time curves.

use crate::local_time::LocalTimeCurve;
use crate::numerics::lerp_clamped;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl DiscreteCurve {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidParameter(
                "xs and ys must have equal length".into(),
            ));
        }
        if xs.len() < 2 {
            return Err(Error::TooFewPoints(xs.len()));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("xs must strictly increase".into()));
        }
        Ok(Self { xs, ys })
    }

    pub fn from_local_time(curve: &LocalTimeCurve) -> Result<Self> {
        Self::new(curve.xgrid.clone(), curve.values.clone())
    }

    /// Linear resample onto `n + 1` uniform abscissae.
    pub fn resample(&self, n: usize) -> Self {
        let (a, b) = (self.xs[0], *self.xs.last().unwrap());
        let xs: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
        let ys = xs.iter().map(|&x| lerp_clamped(&self.xs, &self.ys, x)).collect();
        Self { xs, ys }
    }
}

/// Exact p-variation of the values: `sup` over all index subsets containing
/// both endpoints of `sum |y_j - y_i|^p`, by O(n^2) dynamic programming.
pub fn pvar_exact(curve: &DiscreteCurve, p: f64) -> Result<f64> {
    pvar_points(&curve.ys, p)
}

/// Same supremum taken directly on a value sequence.
pub fn pvar_points(ys: &[f64], p: f64) -> Result<f64> {
    if ys.len() < 2 {
        return Err(Error::TooFewPoints(ys.len()));
    }
    if p < 1.0 {
        return Err(Error::InvalidParameter(format!("p={p} must be >= 1")));
    }
    let n = ys.len();
    let mut best = vec![0.0f64; n];
    for j in 1..n {
        let mut m = f64::NEG_INFINITY;
        for i in 0..j {
            let cand = best[i] + (ys[j] - ys[i]).abs().powf(p);
            if cand > m {
                m = cand;
            }
        }
        best[j] = m;
    }
    Ok(best[n - 1])
}

/// Prefix p-variations: entry `j` is the supremum restricted to `ys[0..=j]`.
pub fn pvar_prefix(ys: &[f64], p: f64) -> Result<Vec<f64>> {
    if ys.len() < 2 {
        return Err(Error::TooFewPoints(ys.len()));
    }
    // best[i][j] over all anchors is needed; running the O(n^2) DP once per
    // prefix would be cubic, but the DP row for prefix j is exactly best[j]
    let n = ys.len();
    let mut best = vec![0.0f64; n];
    for j in 1..n {
        let mut m = f64::NEG_INFINITY;
        for i in 0..j {
            let cand = best[i] + (ys[j] - ys[i]).abs().powf(p);
            if cand > m {
                m = cand;
            }
        }
        best[j] = m;
    }
    // prefix sup must be monotone: the sup over [0..=j] dominates dropping j,
    // so take a running max of DP values
    let mut out = best;
    for j in 1..n {
        if out[j] < out[j - 1] {
            out[j] = out[j - 1];
        }
    }
    Ok(out)
}

/// Dyadic variation bound `sum_{n=1}^{log2} n^gamma sum_k |Dy over scale-n
/// dyadics|^p`, evaluated on a curve resampled to `2^levels + 1` points.
pub fn pvar_dyadic_bound(curve: &DiscreteCurve, p: f64, gamma: f64) -> Result<f64> {
    if gamma <= p - 1.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma={gamma} must exceed p-1={}",
            p - 1.0
        )));
    }
    let n = curve.xs.len() - 1;
    let levels = (n as f64).log2().ceil() as u32;
    let resampled;
    let ys: &[f64] = if n.is_power_of_two() {
        &curve.ys
    } else {
        resampled = curve.resample(1 << levels);
        &resampled.ys
    };
    let mut total = 0.0;
    for lvl in 1..=levels {
        let stride = 1usize << (levels - lvl);
        let mut s = 0.0;
        let mut k = stride;
        while k < ys.len() {
            s += (ys[k] - ys[k - stride]).abs().powf(p);
            k += stride;
        }
        total += (lvl as f64).powf(gamma) * s;
    }
    Ok(total)
}

/// Sum of squared increments of the local-time curve over an `n_points`
/// uniform partition of its support.
pub fn quadratic_variation_sum(curve: &LocalTimeCurve, n_points: usize) -> f64 {
    let (a, b) = (curve.xgrid[0], *curve.xgrid.last().unwrap());
    let mut prev = lerp_clamped(&curve.xgrid, &curve.values, a);
    let mut s = 0.0;
    for k in 1..=n_points {
        let x = a + (b - a) * k as f64 / n_points as f64;
        let v = lerp_clamped(&curve.xgrid, &curve.values, x);
        s += (v - prev) * (v - prev);
        prev = v;
    }
    s
}
