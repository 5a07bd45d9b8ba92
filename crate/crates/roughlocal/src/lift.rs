//! Level-2 rough-path lifts of the planar curve `Z_x = (L_t^x, g(x))`:
//! piecewise-linear lifts over equal-control-mass partitions, Chen
//! combination, the theta-variation metric on a dyadic lattice, and the
//! convergence driver producing the limiting geometric rough path.

use crate::numerics::KahanSum;
use crate::qvar::{build_partition, ControlFn};
use crate::{Error, Result};

pub type V2 = [f64; 2];
pub type M2 = [[f64; 2]; 2];

pub fn outer(a: V2, b: V2) -> M2 {
    [[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]]
}

fn v_sub(a: V2, b: V2) -> V2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn m_add(a: M2, b: M2) -> M2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

fn m_sub(a: M2, b: M2) -> M2 {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

fn m_scale(a: M2, s: f64) -> M2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn frobenius(a: M2) -> f64 {
    (a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1]).sqrt()
}

fn norm2(a: V2) -> f64 {
    (a[0] * a[0] + a[1] * a[1]).sqrt()
}

/// Level-1/level-2 signature of a path over one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig {
    pub z1: V2,
    pub z2: M2,
}

impl Sig {
    pub fn zero() -> Self {
        Sig {
            z1: [0.0; 2],
            z2: [[0.0; 2]; 2],
        }
    }

    /// Signature of one linear segment with increment `d`.
    pub fn linear(d: V2) -> Self {
        Sig {
            z1: d,
            z2: m_scale(outer(d, d), 0.5),
        }
    }
}

/// Chen's identity: concatenation over a shared endpoint.
pub fn chen_combine(a: &Sig, b: &Sig) -> Sig {
    Sig {
        z1: [a.z1[0] + b.z1[0], a.z1[1] + b.z1[1]],
        z2: m_add(m_add(a.z2, b.z2), outer(a.z1, b.z1)),
    }
}

/// A piecewise-linear planar path with its running level-1/level-2 iterated
/// integrals, parameterized by a normalized mass coordinate `u` in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Level2Path {
    /// Dyadic level when built over an equal-mass partition; 0 for ad hoc grids.
    pub level: u32,
    pub xs: Vec<f64>,
    /// Normalized control mass at each node, strictly increasing, 0 to 1.
    pub us: Vec<f64>,
    pub z: Vec<V2>,
    p1: Vec<V2>,
    p2: Vec<M2>,
}

impl Level2Path {
    /// Builds prefix signatures in one left-to-right pass with compensated
    /// accumulation of the level-2 sums.
    pub fn from_samples(level: u32, xs: Vec<f64>, us: Vec<f64>, z: Vec<V2>) -> Result<Self> {
        let n = xs.len();
        if n != us.len() || n != z.len() {
            return Err(Error::MisalignedSamples);
        }
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        if us.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "mass coordinates must strictly increase".into(),
            ));
        }
        let mut p1 = Vec::with_capacity(n);
        let mut p2 = Vec::with_capacity(n);
        let mut s1 = [KahanSum::new(), KahanSum::new()];
        let mut s2 = [
            [KahanSum::new(), KahanSum::new()],
            [KahanSum::new(), KahanSum::new()],
        ];
        p1.push([0.0; 2]);
        p2.push([[0.0; 2]; 2]);
        for i in 1..n {
            let d = v_sub(z[i], z[i - 1]);
            let prev = [s1[0].value(), s1[1].value()];
            // Z2 contribution of segment i: S_{i-1} (x) d + 1/2 d (x) d
            for r in 0..2 {
                for c in 0..2 {
                    s2[r][c].add(prev[r] * d[c] + 0.5 * d[r] * d[c]);
                }
            }
            s1[0].add(d[0]);
            s1[1].add(d[1]);
            p1.push([s1[0].value(), s1[1].value()]);
            p2.push([
                [s2[0][0].value(), s2[0][1].value()],
                [s2[1][0].value(), s2[1][1].value()],
            ]);
        }
        Ok(Self {
            level,
            xs,
            us,
            z,
            p1,
            p2,
        })
    }

    pub fn n_segments(&self) -> usize {
        self.xs.len() - 1
    }

    /// Signature over the interval between nodes `i <= j`, by Chen inversion
    /// of the prefix arrays.
    pub fn node_sig(&self, i: usize, j: usize) -> Sig {
        sig_from_prefix(self.p1[i], self.p2[i], self.p1[j], self.p2[j])
    }

    /// Prefix signature at an arbitrary mass coordinate (linear inside a
    /// segment).
    fn prefix_at_u(&self, u: f64) -> (V2, M2) {
        let n = self.us.len();
        if u <= self.us[0] {
            return (self.p1[0], self.p2[0]);
        }
        if u >= self.us[n - 1] {
            return (self.p1[n - 1], self.p2[n - 1]);
        }
        let i = self.us.partition_point(|&v| v <= u); // u in [us[i-1], us[i])
        let t = (u - self.us[i - 1]) / (self.us[i] - self.us[i - 1]);
        if t == 0.0 {
            return (self.p1[i - 1], self.p2[i - 1]);
        }
        let d = v_sub(self.z[i], self.z[i - 1]);
        let part = Sig::linear([t * d[0], t * d[1]]);
        let head = Sig {
            z1: self.p1[i - 1],
            z2: self.p2[i - 1],
        };
        let c = chen_combine(&head, &part);
        (c.z1, c.z2)
    }

    /// Signature over `[u0, u1]` in mass coordinates.
    pub fn sig_between_u(&self, u0: f64, u1: f64) -> Sig {
        let (a1, a2) = self.prefix_at_u(u0);
        let (b1, b2) = self.prefix_at_u(u1);
        sig_from_prefix(a1, a2, b1, b2)
    }

    /// Signature over `[a, b]` in the spatial coordinate (nodes located by
    /// binary search, linear interpolation of mass inside segments).
    pub fn sig_between_x(&self, a: f64, b: f64) -> Sig {
        self.sig_between_u(self.u_of_x(a), self.u_of_x(b))
    }

    pub fn u_of_x(&self, x: f64) -> f64 {
        crate::numerics::lerp_clamped(&self.xs, &self.us, x)
    }

    /// Z value at mass coordinate u.
    pub fn z_at_u(&self, u: f64) -> V2 {
        let (p1, _) = self.prefix_at_u(u);
        [self.z[0][0] + p1[0], self.z[0][1] + p1[1]]
    }

    /// Prefix arrays sampled on the `2^depth + 1` dyadic mass lattice.
    fn lattice(&self, depth: u32) -> (Vec<V2>, Vec<M2>) {
        let n = 1usize << depth;
        let mut p1 = Vec::with_capacity(n + 1);
        let mut p2 = Vec::with_capacity(n + 1);
        for l in 0..=n {
            let (a, b) = self.prefix_at_u(l as f64 / n as f64);
            p1.push(a);
            p2.push(b);
        }
        (p1, p2)
    }
}

fn sig_from_prefix(a1: V2, a2: M2, b1: V2, b2: M2) -> Sig {
    let z1 = v_sub(b1, a1);
    Sig {
        z1,
        z2: m_sub(m_sub(b2, a2), outer(a1, z1)),
    }
}

/// Lift of the sampled curve over the level-`m` equal-mass partition of the
/// control. `zvals` must hold exactly `2^m + 1` samples taken at
/// `build_partition(w1, m)`.
pub fn lift_smooth(zvals: &[V2], w1: &ControlFn, m: u32) -> Result<Level2Path> {
    let n = 1usize << m;
    if zvals.len() != n + 1 {
        return Err(Error::MisalignedSamples);
    }
    let xs = build_partition(w1, m);
    let us = (0..=n).map(|l| l as f64 / n as f64).collect();
    Level2Path::from_samples(m, xs, us, zvals.to_vec())
}

fn pvar_dp(weights: impl Fn(usize, usize) -> f64, n: usize) -> f64 {
    // best[j] = max_{i<j} best[i] + weight(i, j), over 0..=n lattice nodes
    let mut best = vec![0.0f64; n + 1];
    for j in 1..=n {
        let mut m = f64::NEG_INFINITY;
        for i in 0..j {
            let cand = best[i] + weights(i, j);
            if cand > m {
                m = cand;
            }
        }
        best[j] = m;
    }
    best[n]
}

fn d_theta_on_lattice(
    xp1: &[V2],
    xp2: &[M2],
    yp1: &[V2],
    yp2: &[M2],
    theta: f64,
) -> (f64, f64) {
    let n = xp1.len() - 1;
    let lvl1 = pvar_dp(
        |i, j| {
            let dx = v_sub(xp1[j], xp1[i]);
            let dy = v_sub(yp1[j], yp1[i]);
            norm2(v_sub(dx, dy)).powf(theta)
        },
        n,
    )
    .powf(1.0 / theta);
    let lvl2 = pvar_dp(
        |i, j| {
            let sx = sig_from_prefix(xp1[i], xp2[i], xp1[j], xp2[j]);
            let sy = sig_from_prefix(yp1[i], yp2[i], yp1[j], yp2[j]);
            frobenius(m_sub(sx.z2, sy.z2)).powf(theta / 2.0)
        },
        n,
    )
    .powf(2.0 / theta);
    (lvl1, lvl2)
}

/// theta-variation distance between two lifts, with the partition supremum
/// restricted to the `2^depth` dyadic mass lattice. Returns the max of the
/// level-1 and level-2 components.
pub fn d_theta(x: &Level2Path, y: &Level2Path, theta: f64, depth: u32) -> f64 {
    let (xp1, xp2) = x.lattice(depth);
    let (yp1, yp2) = y.lattice(depth);
    let (a, b) = d_theta_on_lattice(&xp1, &xp2, &yp1, &yp2, theta);
    a.max(b)
}

/// The limiting lift together with its convergence diagnostics.
#[derive(Debug, Clone)]
pub struct GeometricRoughPath {
    /// Exact signature carrier of the fully refined piecewise-linear curve.
    pub path: Level2Path,
    pub theta: f64,
    /// `(m, d_theta(Z(m), Z(m_final)))` for each level visited; the last
    /// entry is the consecutive distance `d_theta(Z(m_final-1), Z(m_final))`.
    pub distances: Vec<(u32, f64)>,
    /// Diagnostic sequence dropped below `tol` before `m_max`.
    pub converged: bool,
    /// Distance ratio was >= 1 on three consecutive levels.
    pub non_cauchy: bool,
}

impl GeometricRoughPath {
    pub fn sig_between(&self, a: f64, b: f64) -> Sig {
        self.path.sig_between_x(a, b)
    }
}

/// Iterates the equal-mass lifts `Z(1), Z(2), ...`, recording successive
/// theta-variation distances, until they drop below `tol` or `m_max` is hit.
///
/// `zfun` samples the underlying curve; `knots` are the abscissae where that
/// curve kinks. The returned path is the lift over the union of the finest
/// partition and all knots: signatures are reparameterization-invariant, so
/// this is the exact limit object of the refinement scheme.
pub fn converge_lift(
    zfun: &dyn Fn(f64) -> V2,
    knots: &[f64],
    w1: &ControlFn,
    q: f64,
    theta: f64,
    m_max: u32,
    tol: f64,
) -> Result<GeometricRoughPath> {
    if !(theta > q && theta < 3.0) {
        return Err(Error::ThetaRange {
            theta,
            lo: q,
            hi: 3.0,
        });
    }
    if tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tol={tol} must be > 0")));
    }
    let sample = |m: u32| -> Result<Level2Path> {
        let pts = build_partition(w1, m);
        let z: Vec<V2> = pts.iter().map(|&x| zfun(x)).collect();
        lift_smooth(&z, w1, m)
    };

    let mut lifts = vec![sample(1)?];
    let mut converged = false;
    for m in 1..m_max.max(2) {
        let next = sample(m + 1)?;
        let d = d_theta(lifts.last().unwrap(), &next, theta, 10);
        lifts.push(next);
        if d < tol {
            converged = true;
            break;
        }
    }
    // Cauchy diagnostic: distance from each level to the finest lift. The
    // consecutive distances above only gate early stopping; they carry the
    // full fine-scale noise of both levels, while distances to a common
    // reference share it and expose the convergence trend.
    let prev = lifts.pop().unwrap();
    let distances: Vec<(u32, f64)> = lifts
        .iter()
        .enumerate()
        .map(|(i, lm)| (i as u32 + 1, d_theta(lm, &prev, theta, 10)))
        .collect();
    let non_cauchy = distances
        .windows(3)
        .any(|w| w[0].1 > 0.0 && w[1].1 >= w[0].1 && w[2].1 >= w[1].1);

    // exact limit: union of the finest partition with the curve's kinks
    let (a, b) = (w1.grid[0], *w1.grid.last().unwrap());
    let mut xs: Vec<f64> = prev.xs.clone();
    xs.extend(knots.iter().cloned().filter(|&x| x > a && x < b));
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    xs.dedup();
    let (w_lo, w_hi) = (w1.eval(a), w1.eval(b));
    let us: Vec<f64> = xs
        .iter()
        .map(|&x| (w1.eval(x) - w_lo) / (w_hi - w_lo))
        .collect();
    let z: Vec<V2> = xs.iter().map(|&x| zfun(x)).collect();
    let path = Level2Path::from_samples(0, xs, us, z)?;

    Ok(GeometricRoughPath {
        path,
        theta,
        distances,
        converged,
        non_cauchy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qvar::{build_control, QVarFunction};
    use proptest::prelude::*;

    fn path_from(z: Vec<V2>) -> Level2Path {
        let n = z.len() - 1;
        let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        Level2Path::from_samples(0, xs.clone(), xs, z).unwrap()
    }

    #[test]
    fn single_segment_half_outer() {
        let p = path_from(vec![[0.0, 0.0], [2.0, -1.0]]);
        let s = p.node_sig(0, 1);
        let d = [2.0, -1.0];
        let want = m_scale(outer(d, d), 0.5);
        assert_eq!(s.z2, want);
    }

    #[test]
    fn two_segments_closed_form() {
        let p = path_from(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
        let s = p.node_sig(0, 2);
        // 1/2(e11 + e22) + e12
        assert_eq!(s.z2, [[0.5, 1.0], [0.0, 0.5]]);
        assert_eq!(s.z1, [1.0, 1.0]);
    }

    #[test]
    fn nesting_identity_inside_one_segment() {
        // one coarse segment, measured over a finer dyadic sub-interval
        let d: V2 = [1.5, -0.7];
        let p = path_from(vec![[0.0, 0.0], [d[0], d[1]]]);
        for gap in 1u32..5 {
            // sub-interval of mass 2^{-gap} inside the unit segment
            let s = p.sig_between_u(0.0, (0.5f64).powi(gap as i32));
            let scale = (2.0f64).powi(-2 * gap as i32 - 1);
            let want = m_scale(outer(d, d), scale);
            for r in 0..2 {
                for c in 0..2 {
                    assert!((s.z2[r][c] - want[r][c]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn chen_trivial_and_tensor() {
        let a = Sig {
            z1: [1.0, 0.0],
            z2: [[0.0; 2]; 2],
        };
        let b = Sig::zero();
        assert_eq!(chen_combine(&a, &b), a);
        let c = Sig {
            z1: [0.0, 1.0],
            z2: [[0.0; 2]; 2],
        };
        let ac = chen_combine(&a, &c);
        assert_eq!(ac.z2, [[0.0, 1.0], [0.0, 0.0]]);
    }

    proptest! {
        #[test]
        fn chen_associative(vals in proptest::collection::vec(-1.0f64..1.0, 12)) {
            let sig = |k: usize| Sig {
                z1: [vals[k], vals[k + 1]],
                z2: [[vals[k + 2], vals[k + 3]], [0.5 * vals[k], -vals[k + 1]]],
            };
            let (a, b, c) = (sig(0), sig(4), sig(8));
            let left = chen_combine(&chen_combine(&a, &b), &c);
            let right = chen_combine(&a, &chen_combine(&b, &c));
            for r in 0..2 {
                for s in 0..2 {
                    prop_assert!((left.z2[r][s] - right.z2[r][s]).abs() < 1e-12);
                }
            }
            prop_assert!((left.z1[0] - right.z1[0]).abs() < 1e-12);
            prop_assert!((left.z1[1] - right.z1[1]).abs() < 1e-12);
        }

        #[test]
        fn symmetric_part_identity(zraw in proptest::collection::vec(-1.0f64..1.0, 10..24)) {
            let z: Vec<V2> = zraw.chunks(2).filter(|c| c.len() == 2).map(|c| [c[0], c[1]]).collect();
            prop_assume!(z.len() >= 3);
            let p = path_from(z);
            let n = p.n_segments();
            for i in 0..n {
                for j in i + 1..=n {
                    let s = p.node_sig(i, j);
                    let half = m_scale(outer(s.z1, s.z1), 0.5);
                    let sym = [
                        [s.z2[0][0], 0.5 * (s.z2[0][1] + s.z2[1][0])],
                        [0.5 * (s.z2[0][1] + s.z2[1][0]), s.z2[1][1]],
                    ];
                    for r in 0..2 {
                        for c in 0..2 {
                            prop_assert!((sym[r][c] - half[r][c]).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn chen_identity_across_every_node() {
        let z: Vec<V2> = (0..=16)
            .map(|i| {
                let x = i as f64 / 16.0;
                [(3.1 * x).sin(), (2.0 * x).cos()]
            })
            .collect();
        let p = path_from(z);
        for k in 1..16 {
            let whole = p.node_sig(0, 16);
            let glued = chen_combine(&p.node_sig(0, k), &p.node_sig(k, 16));
            for r in 0..2 {
                for c in 0..2 {
                    assert!((whole.z2[r][c] - glued.z2[r][c]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn refinement_recursion_identity() {
        // halving each segment changes Z2 by the antisymmetric cross terms
        let zc: Vec<V2> = (0..=8)
            .map(|i| {
                let x = i as f64 / 8.0;
                [x * x, (5.0 * x).sin()]
            })
            .collect();
        let zf: Vec<V2> = (0..=16)
            .map(|i| {
                let x = i as f64 / 16.0;
                [x * x, (5.0 * x).sin()]
            })
            .collect();
        let coarse = path_from(zc);
        let fine = path_from(zf.clone());
        for l in 0..8 {
            let c = coarse.node_sig(l, l + 1).z2;
            let f = fine.node_sig(2 * l, 2 * l + 2).z2;
            let d1 = v_sub(zf[2 * l + 1], zf[2 * l]);
            let d2 = v_sub(zf[2 * l + 2], zf[2 * l + 1]);
            let want = m_scale(m_sub(outer(d1, d2), outer(d2, d1)), 0.5);
            let got = m_sub(f, c);
            for r in 0..2 {
                for s in 0..2 {
                    assert!((got[r][s] - want[r][s]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn d_theta_zero_on_equal_paths() {
        let z: Vec<V2> = (0..=8).map(|i| [i as f64, (i * i) as f64 / 8.0]).collect();
        let p = path_from(z.clone());
        let q2 = path_from(z);
        assert_eq!(d_theta(&p, &q2, 2.5, 6), 0.0);
    }

    #[test]
    fn d_theta_against_zero_path_is_theta_norm() {
        let z: Vec<V2> = (0..=8)
            .map(|i| [(i as f64 * 0.9).sin(), (i as f64 * 0.4).cos()])
            .collect();
        let p = path_from(z.clone());
        let zero = path_from(vec![[0.0, 0.0]; 9]);
        // hand DP on level 1 only (zero path has no level-2 content)
        let theta = 2.5;
        let depth = 3u32; // lattice = the nodes themselves
        let d = d_theta(&p, &zero, theta, depth);
        let n = 8;
        let lvl1 = pvar_dp(
            |i, j| norm2(v_sub(p.p1[j], p.p1[i])).powf(theta),
            n,
        )
        .powf(1.0 / theta);
        let lvl2 = pvar_dp(
            |i, j| frobenius(p.node_sig(i, j).z2).powf(theta / 2.0),
            n,
        )
        .powf(2.0 / theta);
        assert!((d - lvl1.max(lvl2)).abs() < 1e-12);
    }

    #[test]
    fn d_theta_homogeneity() {
        let z: Vec<V2> = (0..=4).map(|i| [(i as f64).sin(), i as f64 * 0.3]).collect();
        let p = path_from(z);
        let (p1, p2) = p.lattice(2);
        let zero1 = vec![[0.0; 2]; p1.len()];
        let zero2 = vec![[[0.0; 2]; 2]; p2.len()];
        let theta = 2.4;
        let (d1, d2) = d_theta_on_lattice(&p1, &p2, &zero1, &zero2, theta);
        // dilating the path doubles level 1 and quadruples level 2
        let z2: Vec<V2> = (0..=4)
            .map(|i| [2.0 * (i as f64).sin(), 2.0 * i as f64 * 0.3])
            .collect();
        let px = path_from(z2);
        let (q1, q2) = px.lattice(2);
        let (e1, e2) = d_theta_on_lattice(&q1, &q2, &zero1, &zero2, theta);
        assert!((e1 - 2.0 * d1).abs() < 1e-10, "{e1} vs {}", 2.0 * d1);
        assert!((e2 - 4.0 * d2).abs() < 1e-10, "{e2} vs {}", 4.0 * d2);
    }

    fn analytic_sin_cos_z2(a: f64, b: f64) -> M2 {
        // Z = (sin x, cos x): closed forms for the iterated integrals
        let s = |x: f64| x.sin();
        let c = |x: f64| x.cos();
        let z11 = 0.5 * (s(b) - s(a)) * (s(b) - s(a));
        let z22 = 0.5 * (c(b) - c(a)) * (c(b) - c(a));
        // int (sin y - sin a) d(cos y) over [a,b]
        let z12 = -((b - a) / 2.0 - ((2.0 * b).sin() - (2.0 * a).sin()) / 4.0)
            - s(a) * (c(b) - c(a));
        let z21 = (b - a) / 2.0 + ((2.0 * b).sin() - (2.0 * a).sin()) / 4.0
            - c(a) * (s(b) - s(a));
        [[z11, z12], [z21, z22]]
    }

    #[test]
    fn converge_lift_smooth_pair_matches_analytic() {
        let n = 4096usize;
        let g = QVarFunction::sample(|x| x.cos(), 0.0, 1.0, n, 1.0).unwrap();
        let w_g = build_control(&g).unwrap();
        let l = QVarFunction::sample(|x| x.sin(), 0.0, 1.0, n, 1.0).unwrap();
        let w_l = build_control(&l).unwrap();
        let w1 = w_g.combine(&w_l);
        let zfun = |x: f64| [x.sin(), x.cos()];
        let rp = converge_lift(&zfun, &g.grid, &w1, 1.0, 2.1, 8, 1e-4).unwrap();
        // distances decay geometrically
        assert!(!rp.non_cauchy);
        assert!(rp.distances.windows(2).all(|w| w[1].1 < w[0].1));
        let s = rp.sig_between(0.0, 1.0);
        let want = analytic_sin_cos_z2(0.0, 1.0);
        for r in 0..2 {
            for c in 0..2 {
                assert!(
                    (s.z2[r][c] - want[r][c]).abs() < 1e-6,
                    "Z2[{r}][{c}] = {} vs {}",
                    s.z2[r][c],
                    want[r][c]
                );
            }
        }
        // interior interval as well
        let s = rp.sig_between(0.2, 0.7);
        let want = analytic_sin_cos_z2(0.2, 0.7);
        for r in 0..2 {
            for c in 0..2 {
                assert!((s.z2[r][c] - want[r][c]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn converge_lift_constant_returns_immediately() {
        let c = QVarFunction::sample(|_| 1.0, 0.0, 1.0, 16, 2.0).unwrap();
        let w1 = build_control(&c).unwrap();
        let zfun = |_: f64| [3.0, 1.0];
        let rp = converge_lift(&zfun, &c.grid, &w1, 2.0, 2.5, 8, 1e-10).unwrap();
        assert!(rp.converged);
        assert_eq!(rp.distances.len(), 1);
        assert_eq!(rp.distances[0].1, 0.0);
    }

    #[test]
    fn converge_lift_rejects_bad_theta() {
        let c = QVarFunction::sample(|x| x, 0.0, 1.0, 8, 2.0).unwrap();
        let w1 = build_control(&c).unwrap();
        let zfun = |x: f64| [x, x];
        assert!(matches!(
            converge_lift(&zfun, &c.grid, &w1, 2.0, 1.9, 4, 1e-6),
            Err(Error::ThetaRange { .. })
        ));
        assert!(matches!(
            converge_lift(&zfun, &c.grid, &w1, 2.0, 3.0, 4, 1e-6),
            Err(Error::ThetaRange { .. })
        ));
    }

    #[test]
    fn lift_smooth_rejects_misaligned() {
        let c = QVarFunction::sample(|x| x, 0.0, 1.0, 8, 2.0).unwrap();
        let w1 = build_control(&c).unwrap();
        assert!(matches!(
            lift_smooth(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], &w1, 2),
            Err(Error::MisalignedSamples)
        ));
    }
}
