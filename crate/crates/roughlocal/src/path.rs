//! Discrete sample paths on a jump-adapted grid with explicit left limits.

use crate::levy::{compensator_drift, sample_jumps_with, LevyModel};
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::io::{BufRead, Write};

/// A simulated càdlàg path sampled on the union of a uniform mesh and its own
/// jump times, so that every jump sits exactly on a grid point and the left
/// limit there is recoverable.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    /// Strictly increasing, includes 0, T and all jump times.
    pub times: Vec<f64>,
    /// Value at each time; post-jump value at jump indices.
    pub values: Vec<f64>,
    /// `(index into times, jump size)`, by increasing index.
    pub jumps: Vec<(usize, f64)>,
    pub sigma: f64,
    /// Drift after folding in the small-jump compensator.
    pub b_eff: f64,
    pub seed: u64,
}

impl SamplePath {
    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn x0(&self) -> f64 {
        self.values[0]
    }

    /// Jump size at index `i`, 0 if the path does not jump there.
    pub fn jump_at(&self, i: usize) -> f64 {
        self.jumps
            .iter()
            .find(|(j, _)| *j == i)
            .map_or(0.0, |&(_, s)| s)
    }
}

/// X_{s−} at grid index `i`: the value just before the jump, or the value
/// itself where the path is continuous.
pub fn left_limit(path: &SamplePath, index: usize) -> f64 {
    path.values[index] - path.jump_at(index)
}

/// Continuous part of the quadratic variation at time `t`, i.e. `sigma^2 t`.
pub fn continuous_qv(path: &SamplePath, t: f64) -> f64 {
    path.sigma * path.sigma * t
}

/// Builds the grid and fills Gaussian increments around prescribed jumps.
fn assemble(
    sigma: f64,
    b_eff: f64,
    x0: f64,
    horizon: f64,
    dt: f64,
    jumps: &[(f64, f64)],
    seed: u64,
    rng: &mut impl Rng,
) -> SamplePath {
    let n_mesh = (horizon / dt).round().max(1.0) as usize;
    let mut times: Vec<f64> = (0..=n_mesh)
        .map(|k| k as f64 * horizon / n_mesh as f64)
        .collect();
    times.extend(jumps.iter().map(|&(t, _)| t));
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();

    let mut jump_idx: Vec<(usize, f64)> = Vec::with_capacity(jumps.len());
    for &(t, size) in jumps {
        let i = times.partition_point(|&u| u < t);
        debug_assert_eq!(times[i], t);
        match jump_idx.last_mut() {
            // simultaneous jumps collapse onto one grid point
            Some(last) if last.0 == i => last.1 += size,
            _ => jump_idx.push((i, size)),
        }
    }

    let mut values = Vec::with_capacity(times.len());
    values.push(x0);
    let mut k = 0; // cursor into jump_idx
    for i in 1..times.len() {
        let delta = times[i] - times[i - 1];
        let z: f64 = StandardNormal.sample(rng);
        let mut x = values[i - 1] + sigma * delta.sqrt() * z + b_eff * delta;
        if k < jump_idx.len() && jump_idx[k].0 == i {
            x += jump_idx[k].1;
            k += 1;
        }
        values.push(x);
    }

    SamplePath {
        times,
        values,
        jumps: jump_idx,
        sigma,
        b_eff,
        seed,
    }
}

/// Simulates one path of `X` on `[0, horizon]` with small jumps below `eps`
/// dropped and their compensator folded into the drift.
pub fn simulate(
    model: &LevyModel,
    x0: f64,
    horizon: f64,
    dt: f64,
    eps: f64,
    seed: u64,
) -> Result<SamplePath> {
    simulate_stream(model, x0, horizon, dt, eps, seed, 0)
}

/// Like [`simulate`] but keyed by `(seed, path_id)`: each id gets an
/// independent RNG stream, so batches are reproducible and order-free.
pub fn simulate_stream(
    model: &LevyModel,
    x0: f64,
    horizon: f64,
    dt: f64,
    eps: f64,
    seed: u64,
    path_id: u64,
) -> Result<SamplePath> {
    if dt <= 0.0 || horizon <= 0.0 {
        return Err(Error::InvalidParameter(
            "dt and horizon must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_id);
    let jumps = sample_jumps_with(model, horizon, eps, &mut rng)?;
    let b_eff = model.drift_b - compensator_drift(model, eps)?;
    Ok(assemble(
        model.sigma,
        b_eff,
        x0,
        horizon,
        dt,
        &jumps,
        seed,
        &mut rng,
    ))
}

/// Simulates a batch of `n` independent paths in parallel.
pub fn simulate_batch(
    model: &LevyModel,
    x0: f64,
    horizon: f64,
    dt: f64,
    eps: f64,
    seed: u64,
    n: usize,
) -> Result<Vec<SamplePath>> {
    (0..n as u64)
        .into_par_iter()
        .map(|id| simulate_stream(model, x0, horizon, dt, eps, seed, id))
        .collect()
}

/// Path with prescribed jumps (for tests and conditioned scenarios); Gaussian
/// filler increments still come from the seeded stream.
pub fn simulate_with_jumps(
    sigma: f64,
    b_eff: f64,
    x0: f64,
    horizon: f64,
    dt: f64,
    jumps: &[(f64, f64)],
    seed: u64,
) -> Result<SamplePath> {
    if dt <= 0.0 || horizon <= 0.0 {
        return Err(Error::InvalidParameter(
            "dt and horizon must be positive".into(),
        ));
    }
    let mut sorted = jumps.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if sorted.iter().any(|&(t, _)| t <= 0.0 || t > horizon) {
        return Err(Error::InvalidParameter(
            "jump times must lie in (0, horizon]".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(assemble(sigma, b_eff, x0, horizon, dt, &sorted, seed, &mut rng))
}

/// Writes the path as CSV: `time,value,jump_size`, with the model hash and
/// seed recorded in a comment header.
pub fn write_csv<W: Write>(path: &SamplePath, model_hash: u64, w: &mut W) -> Result<()> {
    writeln!(
        w,
        "# model_hash={model_hash:016x} seed={} sigma={} b_eff={}",
        path.seed, path.sigma, path.b_eff
    )?;
    writeln!(w, "time,value,jump_size")?;
    for i in 0..path.times.len() {
        writeln!(w, "{},{},{}", path.times[i], path.values[i], path.jump_at(i))?;
    }
    Ok(())
}

/// Parses a path written by [`write_csv`].
pub fn read_csv<R: BufRead>(r: R) -> Result<SamplePath> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut jumps = Vec::new();
    let (mut sigma, mut b_eff, mut seed) = (0.0, 0.0, 0u64);
    let bad = |line: &str| Error::Config(format!("bad path csv line: {line}"));
    for line in r.lines() {
        let line = line?;
        if let Some(hdr) = line.strip_prefix('#') {
            for field in hdr.split_whitespace() {
                if let Some((k, v)) = field.split_once('=') {
                    match k {
                        "seed" => seed = v.parse().map_err(|_| bad(&line))?,
                        "sigma" => sigma = v.parse().map_err(|_| bad(&line))?,
                        "b_eff" => b_eff = v.parse().map_err(|_| bad(&line))?,
                        _ => {}
                    }
                }
            }
            continue;
        }
        if line.starts_with("time") || line.is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let t: f64 = it.next().ok_or_else(|| bad(&line))?.parse().map_err(|_| bad(&line))?;
        let v: f64 = it.next().ok_or_else(|| bad(&line))?.parse().map_err(|_| bad(&line))?;
        let j: f64 = it.next().ok_or_else(|| bad(&line))?.parse().map_err(|_| bad(&line))?;
        if j != 0.0 {
            jumps.push((times.len(), j));
        }
        times.push(t);
        values.push(v);
    }
    if times.len() < 2 {
        return Err(Error::TooFewPoints(times.len()));
    }
    Ok(SamplePath {
        times,
        values,
        jumps,
        sigma,
        b_eff,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{CompoundPoisson, JumpSpec, SizeLaw};
    use crate::numerics::{ks_critical, ks_statistic};

    #[test]
    fn deterministic_drift() {
        let m = LevyModel::new(0.0, 1.0, JumpSpec::None).unwrap();
        let p = simulate(&m, 0.0, 2.0, 0.01, 0.1, 1).unwrap();
        assert!((p.values.last().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn brownian_terminal_variance() {
        let m = LevyModel::brownian(1.0, 0.0);
        let horizon = 1.0;
        let n = 10_000;
        let paths = simulate_batch(&m, 0.0, horizon, 0.01, 0.1, 42, n).unwrap();
        let xs: Vec<f64> = paths.iter().map(|p| *p.values.last().unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        assert!((var - horizon).abs() / horizon < 0.05, "var={var}");
    }

    #[test]
    fn forced_jump_bookkeeping() {
        let p = simulate_with_jumps(1.0, 0.0, 0.0, 1.0, 0.1, &[(0.5, 1.0)], 3).unwrap();
        let (i, s) = p.jumps[0];
        assert_eq!(s, 1.0);
        assert_eq!(p.times[i], 0.5);
        assert!((p.values[i] - left_limit(&p, i) - 1.0).abs() < 1e-15);
        // non-jump index: left limit is the value itself
        assert_eq!(left_limit(&p, 1), p.values[1]);
        assert_eq!(left_limit(&p, 0), 0.0);
    }

    #[test]
    fn qv_is_sigma_squared_t() {
        let p = simulate(&LevyModel::brownian(2.0, 0.0), 0.0, 1.0, 0.1, 0.1, 1).unwrap();
        assert_eq!(continuous_qv(&p, 3.0), 12.0);
        assert_eq!(continuous_qv(&p, 0.0), 0.0);
    }

    #[test]
    fn reconstruction_identity() {
        let m = LevyModel::new(
            0.7,
            0.3,
            JumpSpec::PowerSmall {
                alpha: 0.8,
                c_plus: 1.0,
                c_minus: 0.5,
                big_jump: Some(CompoundPoisson {
                    rate: 1.0,
                    law: SizeLaw::Normal { mean: 1.5, sd: 0.2 },
                }),
            },
        )
        .unwrap();
        let p = simulate(&m, 0.2, 1.0, 1e-3, 0.05, 9).unwrap();
        // re-derive each value from increments minus drift and jumps
        let mut gauss = 0.0;
        let mut jump_sum = 0.0;
        for i in 1..p.times.len() {
            let j = p.jump_at(i);
            jump_sum += j;
            gauss += p.values[i] - p.values[i - 1] - j - p.b_eff * (p.times[i] - p.times[i - 1]);
            let recon = p.x0() + gauss + jump_sum + p.b_eff * p.times[i];
            assert!((recon - p.values[i]).abs() < 1e-10);
        }
        assert!(p.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn mesh_refinement_keeps_terminal_law() {
        let m = LevyModel::brownian(1.0, 0.0);
        let grab = |dt: f64, seed: u64| -> Vec<f64> {
            simulate_batch(&m, 0.0, 1.0, dt, 0.1, seed, 10_000)
                .unwrap()
                .iter()
                .map(|p| *p.values.last().unwrap())
                .collect()
        };
        let coarse = grab(0.02, 11);
        let fine = grab(0.01, 12);
        let d = ks_statistic(&coarse, &fine);
        assert!(d < ks_critical(coarse.len(), fine.len(), 0.01), "ks={d}");
    }

    #[test]
    fn csv_roundtrip() {
        let p = simulate_with_jumps(1.0, -0.2, 0.1, 1.0, 0.25, &[(0.4, 0.7)], 5).unwrap();
        let mut buf = Vec::new();
        write_csv(&p, 0xdead_beef, &mut buf).unwrap();
        let q = read_csv(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(p.jumps, q.jumps);
        assert_eq!(p.seed, q.seed);
        assert_eq!(p.sigma, q.sigma);
        for i in 0..p.times.len() {
            assert!((p.times[i] - q.times[i]).abs() < 1e-15);
            assert!((p.values[i] - q.values[i]).abs() < 1e-15);
        }
    }
}
