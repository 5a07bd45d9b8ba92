//! q-variation machinery for the deterministic integrand g: the control
//! function built from grid q-variation, equal-mass dyadic partitions, the
//! compactly supported mollifier, and the jump-stretching continuous extension
//! of a càdlàg g.

use crate::numerics::adaptive_quad;
use crate::variation::{pvar_points, pvar_prefix};
use crate::{Error, Result};
use std::sync::OnceLock;

/// A function of bounded q-variation on a grid, càdlàg with explicit jumps.
///
/// `values[i]` is the right-continuous value at `grid[i]`; between grid points
/// the function is linear up to the left limit of the next node, then jumps by
/// the listed size (zero at unlisted nodes).
#[derive(Debug, Clone)]
pub struct QVarFunction {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// `(location, right minus left limit)`, locations must be grid points.
    pub jumps: Vec<(f64, f64)>,
    pub q: f64,
}

impl QVarFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, jumps: Vec<(f64, f64)>, q: f64) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidParameter("grid/values length mismatch".into()));
        }
        if grid.len() < 2 {
            return Err(Error::TooFewPoints(grid.len()));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("grid must strictly increase".into()));
        }
        if q < 1.0 {
            return Err(Error::InvalidParameter(format!("q={q} must be >= 1")));
        }
        let mut jumps = jumps;
        jumps.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for &(x, _) in &jumps {
            if !grid.iter().any(|&g| g == x) {
                return Err(Error::InvalidParameter(format!(
                    "jump location {x} is not a grid point"
                )));
            }
        }
        Ok(Self { grid, values, jumps, q })
    }

    /// Samples a continuous function on a uniform grid.
    pub fn sample(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize, q: f64) -> Result<Self> {
        let grid: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values, Vec::new(), q)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.grid[0], *self.grid.last().unwrap())
    }

    fn jump_size_at(&self, x: f64) -> f64 {
        self.jumps
            .iter()
            .find(|&&(loc, _)| loc == x)
            .map_or(0.0, |&(_, s)| s)
    }

    /// Right-continuous evaluation, constant extension outside the domain.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.grid[0] {
            return if x == self.grid[0] { self.values[0] } else { self.values[0] };
        }
        let n = self.grid.len();
        if x >= self.grid[n - 1] {
            return self.values[n - 1];
        }
        let i = self.grid.partition_point(|&g| g <= x); // x in [grid[i-1], grid[i])
        let left_val = self.values[i - 1];
        let next_left_limit = self.values[i] - self.jump_size_at(self.grid[i]);
        let t = (x - self.grid[i - 1]) / (self.grid[i] - self.grid[i - 1]);
        left_val + t * (next_left_limit - left_val)
    }

    /// Value sequence with left limits inserted before each jump node, so its
    /// p-variation is that of the càdlàg function on the grid.
    pub fn augmented_values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grid.len() + self.jumps.len());
        for (i, &x) in self.grid.iter().enumerate() {
            let j = self.jump_size_at(x);
            if j != 0.0 && i > 0 {
                out.push(self.values[i] - j);
            }
            out.push(self.values[i]);
        }
        out
    }

    /// Grid q-variation, jumps included.
    pub fn qvariation(&self) -> Result<f64> {
        pvar_points(&self.augmented_values(), self.q)
    }
}

/// Cumulative control `W[i] = w(x', grid[i]) + (grid[i] - x')` with `w` the
/// grid q-variation; strictly increasing thanks to the length term.
#[derive(Debug, Clone)]
pub struct ControlFn {
    pub grid: Vec<f64>,
    pub cumulative: Vec<f64>,
}

impl ControlFn {
    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// W at arbitrary x by linear interpolation.
    pub fn eval(&self, x: f64) -> f64 {
        crate::numerics::lerp_clamped(&self.grid, &self.cumulative, x)
    }

    /// x with `W(x) = mass`, by binary search plus linear interpolation.
    pub fn inverse(&self, mass: f64) -> f64 {
        let n = self.cumulative.len();
        if mass <= self.cumulative[0] {
            return self.grid[0];
        }
        if mass >= self.cumulative[n - 1] {
            return self.grid[n - 1];
        }
        let i = self.cumulative.partition_point(|&w| w < mass);
        let (w0, w1) = (self.cumulative[i - 1], self.cumulative[i]);
        let t = (mass - w0) / (w1 - w0);
        self.grid[i - 1] + t * (self.grid[i] - self.grid[i - 1])
    }

    /// Sum of two controls, itself a control, on the union grid.
    pub fn combine(&self, other: &ControlFn) -> ControlFn {
        let mut grid: Vec<f64> = self.grid.iter().chain(&other.grid).cloned().collect();
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup();
        let cumulative = grid.iter().map(|&x| self.eval(x) + other.eval(x)).collect();
        ControlFn { grid, cumulative }
    }
}

/// Control from an arbitrary sampled curve (no jump bookkeeping).
pub fn control_from_points(xs: &[f64], ys: &[f64], q: f64) -> Result<ControlFn> {
    let prefix = pvar_prefix(ys, q)?;
    let cumulative = prefix
        .iter()
        .zip(xs)
        .map(|(w, &x)| w + (x - xs[0]))
        .collect();
    Ok(ControlFn {
        grid: xs.to_vec(),
        cumulative,
    })
}

/// Control of g: prefix q-variation of the jump-augmented value sequence plus
/// the length term.
pub fn build_control(g: &QVarFunction) -> Result<ControlFn> {
    let aug = g.augmented_values();
    let prefix = pvar_prefix(&aug, g.q)?;
    // map each grid node to its (right-continuous) entry in the augmented list
    let mut cumulative = Vec::with_capacity(g.grid.len());
    let mut ai = 0usize;
    for (i, &x) in g.grid.iter().enumerate() {
        if g.jump_size_at(x) != 0.0 && i > 0 {
            ai += 1; // skip the inserted left limit
        }
        cumulative.push(prefix[ai] + (x - g.grid[0]));
        ai += 1;
    }
    Ok(ControlFn {
        grid: g.grid.clone(),
        cumulative,
    })
}

/// `2^m + 1` points splitting the control mass into equal parts;
/// first and last are the domain endpoints.
pub fn build_partition(w1: &ControlFn, m: u32) -> Vec<f64> {
    let total = w1.total() - w1.cumulative[0];
    let base = w1.cumulative[0];
    let n = 1usize << m;
    let mut pts = Vec::with_capacity(n + 1);
    pts.push(w1.grid[0]);
    for l in 1..n {
        pts.push(w1.inverse(base + total * l as f64 / n as f64));
    }
    pts.push(*w1.grid.last().unwrap());
    pts
}

/// Bump-kernel normalizer: `1 / int_0^2 exp(1/((v-1)^2 - 1)) dv`.
fn kernel_norm() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    *NORM.get_or_init(|| {
        let f = |v: f64| {
            let d = (v - 1.0) * (v - 1.0) - 1.0;
            if d >= 0.0 {
                0.0
            } else {
                (1.0 / d).exp()
            }
        };
        1.0 / adaptive_quad(f, 0.0, 2.0, 1e-12).expect("kernel quadrature")
    })
}

/// Mollifier `k^j(u) = c j exp(1/((ju-1)^2-1))` on `(0, 2/j)`, zero elsewhere.
pub fn kernel(j: f64, u: f64) -> f64 {
    let v = j * u;
    let d = (v - 1.0) * (v - 1.0) - 1.0;
    if d >= 0.0 {
        0.0
    } else {
        kernel_norm() * j * (1.0 / d).exp()
    }
}

/// Smoothed copy `g_j(x) = int k^j(u) g(x - u) du`, sampled on g's grid by a
/// 256-interval composite Simpson rule over the kernel support.
pub fn mollify(g: &QVarFunction, j: f64) -> Result<QVarFunction> {
    if j < 1.0 {
        return Err(Error::InvalidParameter(format!("j={j} must be >= 1")));
    }
    let support = 2.0 / j;
    let n_sub = 256usize;
    let h = support / n_sub as f64;
    let values: Vec<f64> = g
        .grid
        .iter()
        .map(|&x| {
            let mut s = 0.0;
            for k in 0..n_sub {
                let u0 = k as f64 * h;
                let um = u0 + 0.5 * h;
                let u1 = u0 + h;
                s += h / 6.0
                    * (kernel(j, u0) * g.eval(x - u0)
                        + 4.0 * kernel(j, um) * g.eval(x - um)
                        + kernel(j, u1) * g.eval(x - u1));
            }
            s
        })
        .collect();
    QVarFunction::new(g.grid.clone(), values, Vec::new(), g.q)
}

/// The monotone jump-stretching map `tau(x) = x + delta * sum_{x_n <= x}
/// |j(x_n)|^q`, stored at the original grid nodes.
#[derive(Debug, Clone)]
pub struct TauMap {
    pub xs: Vec<f64>,
    pub taus: Vec<f64>,
    pub delta: f64,
}

impl TauMap {
    /// Right-continuous evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return self.taus[0] - (self.xs[0] - x);
        }
        let n = self.xs.len();
        if x >= self.xs[n - 1] {
            return self.taus[n - 1] + (x - self.xs[n - 1]);
        }
        let i = self.xs.partition_point(|&g| g <= x);
        // between nodes tau advances at unit speed from the right value at i-1
        self.taus[i - 1] + (x - self.xs[i - 1])
    }

    /// Inverse map: points inside an inserted gap collapse onto the jump
    /// location.
    pub fn inverse(&self, y: f64) -> f64 {
        let n = self.xs.len();
        if y <= self.taus[0] {
            return self.xs[0] - (self.taus[0] - y);
        }
        if y >= self.taus[n - 1] {
            return self.xs[n - 1] + (y - self.taus[n - 1]);
        }
        let i = self.taus.partition_point(|&v| v <= y) - 1;
        (self.xs[i] + (y - self.taus[i])).min(self.xs[i + 1])
    }
}

/// Continuous extension of a càdlàg g: each jump of size `s` is replaced by a
/// linear ramp over an inserted interval of length `delta |s|^q`.
///
/// Returns the time change `tau` and the continuous extended function, with
/// `g_ext(tau(x)) = g(x)` at all grid points.
pub fn extend_cadlag(g: &QVarFunction, delta: f64) -> Result<(TauMap, QVarFunction)> {
    if delta <= 0.0 {
        return Err(Error::InvalidParameter(format!("delta={delta} must be > 0")));
    }
    let mut taus = Vec::with_capacity(g.grid.len());
    let mut ext_xs: Vec<f64> = Vec::new();
    let mut ext_ys: Vec<f64> = Vec::new();
    let mut shift = 0.0;
    for (i, &x) in g.grid.iter().enumerate() {
        let s = g.jump_size_at(x);
        if s != 0.0 && i > 0 {
            let gap = delta * s.abs().powf(g.q);
            // ramp start: pre-jump point carrying the left limit
            ext_xs.push(x + shift);
            ext_ys.push(g.values[i] - s);
            shift += gap;
        }
        ext_xs.push(x + shift);
        ext_ys.push(g.values[i]);
        taus.push(x + shift);
    }
    let g_ext = QVarFunction::new(ext_xs, ext_ys, Vec::new(), g.q)?;
    Ok((
        TauMap {
            xs: g.grid.clone(),
            taus,
            delta,
        },
        g_ext,
    ))
}
