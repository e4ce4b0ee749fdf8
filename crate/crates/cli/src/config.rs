//! Run settings merged from a `key=value` file and command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

/// Largest register dimension `d^n` the CLI will build.
pub const MAX_DIM: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    Direct,
    Multistep,
    Optimal,
}

impl FromStr for ProtocolKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "direct" => Ok(Self::Direct),
            "multistep" => Ok(Self::Multistep),
            "optimal" => Ok(Self::Optimal),
            other => Err(CliError::Config(format!(
                "unknown protocol '{other}' (expected direct, multistep or optimal)"
            ))),
        }
    }
}

/// Settings that may be left unset; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub probs: Option<Vec<f64>>,
    pub energies: Option<Vec<f64>>,
    pub protocol: Option<ProtocolKind>,
    pub points: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value '{value}' for {key}")))
}

pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value.split(',').map(|v| parse(key, v)).collect()
}

impl Settings {
    /// Parses a line-oriented `key=value` file. Blank lines and lines starting
    /// with `#` are skipped.
    pub fn from_file_contents(text: &str) -> Result<Self, CliError> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" => s.n = Some(parse(key, value)?),
                "d" => s.d = Some(parse(key, value)?),
                "probs" => s.probs = Some(parse_list(key, value)?),
                "energies" => s.energies = Some(parse_list(key, value)?),
                "protocol" => s.protocol = Some(value.parse()?),
                "points" => s.points = Some(parse(key, value)?),
                "samples" => s.samples = Some(parse(key, value)?),
                "seed" => s.seed = Some(parse(key, value)?),
                "out" => s.out = Some(PathBuf::from(value)),
                other => {
                    return Err(CliError::Config(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_file_contents(&text)
    }

    /// `self` with every field set in `top` replaced.
    pub fn overridden_by(self, top: Settings) -> Settings {
        Settings {
            n: top.n.or(self.n),
            d: top.d.or(self.d),
            probs: top.probs.or(self.probs),
            energies: top.energies.or(self.energies),
            protocol: top.protocol.or(self.protocol),
            points: top.points.or(self.points),
            samples: top.samples.or(self.samples),
            seed: top.seed.or(self.seed),
            out: top.out.or(self.out),
        }
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub d: usize,
    pub probs: Option<Vec<f64>>,
    pub energies: Vec<f64>,
    pub protocol: ProtocolKind,
    pub points: usize,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_POINTS: usize = 99;
pub const DEFAULT_SAMPLES: usize = 50;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Level energies used when none are given.
pub fn default_energies(d: usize) -> Vec<f64> {
    match d {
        2 => vec![0.0, 1.0],
        3 => vec![0.0, 0.579, 1.0],
        _ => (0..d).map(|k| k as f64 / (d - 1) as f64).collect(),
    }
}

impl RunConfig {
    pub fn resolve(s: Settings) -> Result<Self, CliError> {
        let d = match (s.d, &s.probs, &s.energies) {
            (Some(d), _, _) => d,
            (None, Some(p), _) => p.len(),
            (None, None, Some(e)) => e.len(),
            _ => 2,
        };
        if d < 2 {
            return Err(CliError::Config(format!("d must be at least 2, got {d}")));
        }
        let energies = s.energies.unwrap_or_else(|| default_energies(d));
        if energies.len() != d {
            return Err(CliError::Config(format!("{} energies for d = {d}", energies.len())));
        }
        if let Some(p) = &s.probs {
            if p.len() != d {
                return Err(CliError::Config(format!("{} probabilities for d = {d}", p.len())));
            }
        }
        if let Some(n) = s.n {
            if n < 1 {
                return Err(CliError::Config("n must be at least 1".into()));
            }
            let dim = (d as f64).powi(n as i32);
            if dim > MAX_DIM as f64 {
                return Err(CliError::Config(format!(
                    "register dimension {d}^{n} exceeds the cap of {MAX_DIM}"
                )));
            }
        }
        let points = s.points.unwrap_or(DEFAULT_POINTS);
        if points < 2 {
            return Err(CliError::Config(format!("points must be at least 2, got {points}")));
        }
        let samples = s.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples < 2 {
            return Err(CliError::Config(format!("samples must be at least 2, got {samples}")));
        }
        Ok(RunConfig {
            n: s.n,
            d,
            probs: s.probs,
            energies,
            protocol: s.protocol.unwrap_or(ProtocolKind::Direct),
            points,
            samples,
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            out: s.out,
        })
    }
}
