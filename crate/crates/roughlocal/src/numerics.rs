//! Small numeric utilities shared across the crate: compensated summation,
//! adaptive quadrature with divergence detection, interpolation and a
//! least-squares slope helper.

use crate::{Error, Result};

/// Kahan–Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    s: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn value(&self) -> f64 {
        self.s + self.c
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) < 1e-14 {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "max refinement depth reached on [{a}, {b}]"
        )));
    }
    Ok(adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_quad(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidParameter(format!("bad interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Integrates `f` on `(0, b]` where `f` may be singular at 0.
///
/// Splits into dyadic slices `[b/2^{k+1}, b/2^k]` and sums until the slice
/// contributions are negligible. Returns `None` (undecidable / divergent) when
/// the slice sums fail to decay.
pub fn singular_quad_at_zero(f: impl Fn(f64) -> f64, b: f64, tol: f64) -> Option<f64> {
    let mut total = KahanSum::new();
    let mut hi = b;
    let mut slices: Vec<f64> = Vec::new();
    for k in 0..200 {
        let lo = hi * 0.5;
        let slice = adaptive_quad(&f, lo, hi, tol * 0.01).ok()?;
        total.add(slice);
        slices.push(slice);
        if slice.abs() < tol && k > 4 {
            return Some(total.value());
        }
        // once slice magnitudes settle into a geometric pattern, either sum
        // the tail in closed form or declare divergence
        if k >= 12 && slices[k - 1] != 0.0 && slices[k - 2] != 0.0 {
            let r1 = slices[k] / slices[k - 1];
            let r2 = slices[k - 1] / slices[k - 2];
            if r1 > 0.0 && (r1 - r2).abs() < 1e-6 * (1.0 + r1.abs()) {
                if r1 < 1.0 - 1e-9 {
                    return Some(total.value() + slice * r1 / (1.0 - r1));
                }
                return None;
            }
        }
        hi = lo;
    }
    None
}

/// Piecewise-linear interpolation of `(xs, ys)` at `x`, clamped at the ends.
pub fn lerp_clamped(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let j = match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(j) => return ys[j],
        Err(j) => j,
    };
    let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    ys[j - 1] + t * (ys[j] - ys[j - 1])
}

/// Ordinary least squares slope of `y` on `x`, with the standard error of the
/// slope estimate. Returns `None` for degenerate inputs.
pub fn ols_slope(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(&u, &v)| (u - mx) * (v - my)).sum();
    let slope = sxy / sxx;
    let mut sse = 0.0;
    for (&u, &v) in x.iter().zip(y) {
        let r = v - my - slope * (u - mx);
        sse += r * r;
    }
    let se = if n > 2 {
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some((slope, se))
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        let fa = i as f64 / n as f64;
        let fb = j as f64 / m as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

/// KS critical value at significance `alpha` (two-sample, asymptotic).
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Deterministic 64-bit FNV-1a hash of a byte string, used for manifest and
/// cache headers.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut s = KahanSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn quad_polynomial_exact() {
        let v = adaptive_quad(|x| x * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 4.0).abs() < 1e-10);
    }

    #[test]
    fn singular_quad_converges_and_diverges() {
        // integrable singularity x^{-1/2}
        let v = singular_quad_at_zero(|x| x.powf(-0.5), 1.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-6);
        // non-integrable x^{-3/2}
        assert!(singular_quad_at_zero(|x| x.powf(-1.5), 1.0, 1e-10).is_none());
    }

    #[test]
    fn slope_of_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 6.0, 8.0];
        let (s, se) = ols_slope(&x, &y).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
        assert!(se < 1e-12);
    }

    #[test]
    fn ks_same_sample_zero() {
        let a = [0.1, 0.4, 0.9, 1.2];
        assert_eq!(ks_statistic(&a, &a), 0.0);
    }
}
