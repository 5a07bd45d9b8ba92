//! Experiment configuration: a flat INI-style format with `[section]`
//! headers and `key=value` pairs, parsed into a validated experiment plan.

use crate::levy::{CompoundPoisson, JumpSpec, LevyModel, SizeLaw};
use crate::numerics::fnv1a;
use crate::qvar::QVarFunction;
use crate::{Error, Result};
use std::collections::HashMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    /// section -> key -> (line number, value)
    sections: HashMap<String, HashMap<String, (usize, String)>>,
}

impl RawConfig {
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|m| m.get(key))
            .map(|(_, v)| v.as_str())
    }

    fn parse<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.sections.get(section).and_then(|m| m.get(key)) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|_| {
                Error::Config(format!(
                    "line {line}: [{section}] {key}: cannot parse {v:?}"
                ))
            }),
        }
    }

    fn need<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<T> {
        self.parse(section, key)?.ok_or_else(|| {
            Error::Config(format!("missing required key [{section}] {key}"))
        })
    }
}

/// Parses the flat INI text; duplicate keys within a section are rejected.
pub fn parse_ini(text: &str) -> Result<RawConfig> {
    let mut cfg = RawConfig::default();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| {
                Error::Config(format!("line {lineno}: unterminated section header"))
            })?;
            section = name.trim().to_string();
            cfg.sections.entry(section.clone()).or_default();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {lineno}: expected key=value, got {line:?}"))
        })?;
        if section.is_empty() {
            return Err(Error::Config(format!(
                "line {lineno}: key before any [section]"
            )));
        }
        let entry = cfg.sections.get_mut(&section).unwrap();
        let key = key.trim().to_string();
        if entry.contains_key(&key) {
            return Err(Error::Config(format!(
                "line {lineno}: duplicate key {key:?} in [{section}]"
            )));
        }
        entry.insert(key, (lineno, value.trim().to_string()));
    }
    Ok(cfg)
}

/// Integrand presets for the `integrate` subcommand.
#[derive(Debug, Clone, PartialEq)]
pub enum GPreset {
    One,
    Linear,
    /// Coefficients low to high.
    Poly(Vec<f64>),
    /// `|x|^beta`.
    AbsPow(f64),
    /// Steps `(location, size)` added to a zero base.
    Steps(Vec<(f64, f64)>),
    Csv(PathBuf),
}

impl GPreset {
    fn parse(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Config(format!("integrand preset {s:?}: {m}"));
        if s == "one" {
            return Ok(GPreset::One);
        }
        if s == "linear" {
            return Ok(GPreset::Linear);
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            let coeffs: Vec<f64> = rest
                .split(',')
                .map(|c| c.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("bad coefficient"))?;
            return Ok(GPreset::Poly(coeffs));
        }
        if let Some(rest) = s.strip_prefix("abs_pow:") {
            return Ok(GPreset::AbsPow(
                rest.trim().parse().map_err(|_| bad("bad exponent"))?,
            ));
        }
        if let Some(rest) = s.strip_prefix("steps:") {
            let mut steps = Vec::new();
            for part in rest.split(',') {
                let (x, v) = part.split_once(':').ok_or_else(|| bad("want x:size"))?;
                steps.push((
                    x.trim().parse().map_err(|_| bad("bad location"))?,
                    v.trim().parse().map_err(|_| bad("bad size"))?,
                ));
            }
            return Ok(GPreset::Steps(steps));
        }
        if let Some(rest) = s.strip_prefix("csv:") {
            return Ok(GPreset::Csv(PathBuf::from(rest.trim())));
        }
        Err(bad("unknown preset"))
    }

    /// Materializes the integrand on `[a, b]` with `n + 1` grid points.
    pub fn sample(&self, a: f64, b: f64, n: usize, q: f64) -> Result<QVarFunction> {
        match self {
            GPreset::One => QVarFunction::sample(|_| 1.0, a, b, n, q),
            GPreset::Linear => QVarFunction::sample(|x| x, a, b, n, q),
            GPreset::Poly(c) => QVarFunction::sample(
                |x| c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
                a,
                b,
                n,
                q,
            ),
            GPreset::AbsPow(beta) => {
                let beta = *beta;
                QVarFunction::sample(|x| x.abs().powf(beta), a, b, n, q)
            }
            GPreset::Steps(steps) => {
                let grid: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
                // snap step locations onto grid points so jumps stay explicit
                let mut jumps = Vec::new();
                let mut values = vec![0.0f64; grid.len()];
                for &(x, s) in steps {
                    let k = grid
                        .iter()
                        .enumerate()
                        .min_by(|(_, u), (_, v)| {
                            (*u - x).abs().partial_cmp(&(*v - x).abs()).unwrap()
                        })
                        .map(|(k, _)| k)
                        .unwrap();
                    jumps.push((grid[k], s));
                    for v in values[k..].iter_mut() {
                        *v += s;
                    }
                }
                jumps.sort_by(|u, v| u.0.partial_cmp(&v.0).unwrap());
                QVarFunction::new(grid, values, jumps, q)
            }
            GPreset::Csv(path) => {
                let text = std::fs::read_to_string(path)?;
                let mut grid = Vec::new();
                let mut values = Vec::new();
                let mut jumps = Vec::new();
                for line in text.lines().filter(|l| !l.starts_with('#') && !l.is_empty()) {
                    let cols: Vec<&str> = line.split(',').collect();
                    if cols.len() < 2 {
                        return Err(Error::Config(format!("integrand csv: bad row {line:?}")));
                    }
                    let x: f64 = cols[0]
                        .trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("integrand csv: bad x in {line:?}")))?;
                    let v: f64 = cols[1].trim().parse().map_err(|_| {
                        Error::Config(format!("integrand csv: bad value in {line:?}"))
                    })?;
                    grid.push(x);
                    values.push(v);
                    if cols.len() > 2 {
                        let j: f64 = cols[2].trim().parse().map_err(|_| {
                            Error::Config(format!("integrand csv: bad jump in {line:?}"))
                        })?;
                        if j != 0.0 {
                            jumps.push((x, j));
                        }
                    }
                }
                QVarFunction::new(grid, values, jumps, q)
            }
        }
    }
}

/// Fully validated experiment plan.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: LevyModel,
    pub t: f64,
    pub dt: f64,
    pub eps: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub p: f64,
    pub q: f64,
    pub theta: f64,
    pub m_max: u32,
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_bins: usize,
    pub integrand: GPreset,
    pub out_dir: PathBuf,
    /// FNV-1a hash of the raw config text, recorded in manifests.
    pub hash: u64,
}

fn parse_law(raw: &RawConfig, section: &str, key: &str) -> Result<SizeLaw> {
    let s: String = raw.need(section, key)?;
    let bad = |m: &str| Error::Config(format!("[{section}] {key}={s:?}: {m}"));
    let (kind, rest) = s.split_once(':').ok_or_else(|| bad("want kind:params"))?;
    let nums: Vec<f64> = rest
        .split(',')
        .map(|c| c.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad("bad number"))?;
    match (kind.trim(), nums.as_slice()) {
        ("fixed", [v]) => Ok(SizeLaw::Fixed(*v)),
        ("pm", [v]) => Ok(SizeLaw::PlusMinus(*v)),
        ("uniform", [lo, hi]) => Ok(SizeLaw::Uniform { lo: *lo, hi: *hi }),
        ("normal", [mean, sd]) => Ok(SizeLaw::Normal {
            mean: *mean,
            sd: *sd,
        }),
        _ => Err(bad("unknown law or wrong arity")),
    }
}

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let raw = parse_ini(text)?;

        let sigma: f64 = raw.parse("model", "sigma")?.unwrap_or(1.0);
        let b: f64 = raw.parse("model", "b")?.unwrap_or(0.0);
        let jumps = match raw.get("model", "jumps").unwrap_or("none") {
            "none" => JumpSpec::None,
            "compound" => JumpSpec::CompoundPoisson(CompoundPoisson {
                rate: raw.need("model", "rate")?,
                law: parse_law(&raw, "model", "law")?,
            }),
            "power" => {
                let big_jump = match raw.parse::<f64>("model", "big_rate")? {
                    Some(rate) => Some(CompoundPoisson {
                        rate,
                        law: parse_law(&raw, "model", "big_law")?,
                    }),
                    None => None,
                };
                JumpSpec::PowerSmall {
                    alpha: raw.need("model", "alpha")?,
                    c_plus: raw.need("model", "c_plus")?,
                    c_minus: raw.need("model", "c_minus")?,
                    big_jump,
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "[model] jumps={other:?}: expected none|compound|power"
                )))
            }
        };
        let model = LevyModel::new(sigma, b, jumps)?;

        let seed: u64 = raw.need("simulation", "seed")?;
        let t: f64 = raw.parse("simulation", "t")?.unwrap_or(1.0);
        let dt: f64 = raw.parse("simulation", "dt")?.unwrap_or(1e-3);
        let eps: f64 = raw.parse("simulation", "eps")?.unwrap_or(0.01);
        let n_paths: usize = raw.parse("simulation", "n_paths")?.unwrap_or(1);

        let p: f64 = raw.parse("analysis", "p")?.unwrap_or(2.05);
        let q: f64 = raw.parse("analysis", "q")?.unwrap_or(2.0);
        let theta: f64 = raw
            .parse("analysis", "theta")?
            .unwrap_or((q.max(p) + 0.1).min(2.95));
        if !(theta > q && theta < 3.0) {
            return Err(Error::Config(format!(
                "[analysis] theta={theta} must lie in ({q}, 3)"
            )));
        }
        let m_max: u32 = raw.parse("analysis", "m_max")?.unwrap_or(8);
        let x_lo: f64 = raw.parse("analysis", "x_lo")?.unwrap_or(-2.0);
        let x_hi: f64 = raw.parse("analysis", "x_hi")?.unwrap_or(2.0);
        let n_bins: usize = raw.parse("analysis", "n_bins")?.unwrap_or(256);
        if x_hi <= x_lo {
            return Err(Error::Config(format!(
                "[analysis] x range [{x_lo}, {x_hi}] is empty"
            )));
        }

        let integrand = GPreset::parse(raw.get("integrand", "g").unwrap_or("one"))?;
        if let GPreset::Csv(path) = &integrand {
            if !path.exists() {
                return Err(Error::Config(format!(
                    "integrand csv {} does not exist",
                    path.display()
                )));
            }
        }
        let out_dir = PathBuf::from(raw.get("output", "dir").unwrap_or("out"));

        Ok(Self {
            model,
            t,
            dt,
            eps,
            n_paths,
            seed,
            p,
            q,
            theta,
            m_max,
            x_lo,
            x_hi,
            n_bins,
            integrand,
            out_dir,
            hash: fnv1a(text.as_bytes()),
        })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# demo experiment
[model]
sigma = 1.0
b = 0.2
jumps = power
alpha = 0.8
c_plus = 0.7
c_minus = 0.5
big_rate = 0.5
big_law = uniform:1,2

[simulation]
seed = 42
t = 1.0
dt = 0.001
eps = 0.05
n_paths = 10

[analysis]
q = 2.0
theta = 2.2

[integrand]
g = poly:0,1

[output]
dir = /tmp/rl-out
";

    #[test]
    fn parses_full_config() {
        let cfg = ExperimentConfig::from_text(SAMPLE).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.n_paths, 10);
        assert!(matches!(cfg.model.jumps, JumpSpec::PowerSmall { .. }));
        assert_eq!(cfg.integrand, GPreset::Poly(vec![0.0, 1.0]));
        assert_eq!(cfg.theta, 2.2);
        assert_ne!(cfg.hash, 0);
    }

    #[test]
    fn missing_seed_is_an_error() {
        let err = ExperimentConfig::from_text("[simulation]\nt = 1\n").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("seed"), "{msg}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = ExperimentConfig::from_text("[simulation]\nseed = 1\ndt = abc\n").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn bad_theta_rejected() {
        let err =
            ExperimentConfig::from_text("[simulation]\nseed = 1\n[analysis]\nq = 2\ntheta = 3.5\n")
                .unwrap_err();
        assert!(format!("{err}").contains("theta"));
    }

    #[test]
    fn duplicate_key_rejected() {
        let err = parse_ini("[a]\nx = 1\nx = 2\n").unwrap_err();
        assert!(format!("{err}").contains("duplicate"));
    }

    #[test]
    fn presets_materialize() {
        let g = GPreset::parse("steps:0.25:1,0.75:-0.5")
            .unwrap()
            .sample(0.0, 1.0, 4, 2.0)
            .unwrap();
        assert_eq!(g.jumps.len(), 2);
        assert_eq!(g.eval(0.5), 1.0);
        assert_eq!(g.eval(0.8), 0.5);
        let p = GPreset::parse("poly:1,0,2").unwrap().sample(0.0, 1.0, 8, 1.0).unwrap();
        assert!((p.eval(0.5) - 1.5).abs() < 1e-12);
        assert!(GPreset::parse("bogus:1").is_err());
    }
}
