//! Experiment configuration: command-line flags layered over an optional
//! JSON file, then validated into an [`ExperimentConfig`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use onebit_precoding::eval::{ErfcConvention, SUM_RATE_MAX_RX};
use onebit_precoding::precoders::{DEFAULT_MAX_TX, DEFAULT_N_GON, EXHAUSTIVE_MAX_TX, TABLE_MAX_RX};
use onebit_precoding::PrecoderKind;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MAX_N_GON: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Ber,
    Sumrate,
    Complexity,
    Table,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Ber => "ber",
            Experiment::Sumrate => "sumrate",
            Experiment::Complexity => "complexity",
            Experiment::Table => "table",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    #[default]
    Complex,
    PerDimension,
}

impl From<Convention> for ErfcConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Complex => ErfcConvention::Complex,
            Convention::PerDimension => ErfcConvention::PerDimension,
        }
    }
}

/// `start:step:stop` in dB, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGrid {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl SnrGrid {
    /// Grid points; `stop` is included when it lies within half a step of
    /// the last point.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 0.5).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }

    fn check(&self) -> Result<(), String> {
        if !(self.start.is_finite() && self.step.is_finite() && self.stop.is_finite()) {
            return Err("values must be finite".into());
        }
        if self.step <= 0.0 {
            return Err(format!("step must be positive, got {}", self.step));
        }
        if self.stop < self.start {
            return Err(format!("stop {} is below start {}", self.stop, self.start));
        }
        if (self.stop - self.start) / self.step > 10_000.0 {
            return Err("more than 10000 grid points".into());
        }
        Ok(())
    }
}

impl FromStr for SnrGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}"));
        let grid = match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                SnrGrid { start: v, step: 1.0, stop: v }
            }
            [a, b, c] => SnrGrid {
                start: num(a)?,
                step: num(b)?,
                stop: num(c)?,
            },
            _ => return Err(format!("expected start:step:stop, got '{s}'")),
        };
        grid.check()?;
        Ok(grid)
    }
}

impl fmt::Display for SnrGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.step, self.stop)
    }
}

impl Serialize for SnrGrid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SnrGrid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Command-line flags. Every flag is optional here so that a config file
/// can supply it; required values are checked after merging.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "onebit", version, about = "1-bit MIMO precoding experiments")]
pub struct Args {
    /// JSON config file (plain config or a metadata sidecar); flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub experiment: Option<Experiment>,
    /// Transmit antennas.
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Users.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Receive antennas per user.
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// SNR grid in dB, `start:step:stop`.
    #[arg(long)]
    pub snr: Option<SnrGrid>,
    /// Monte Carlo trials (ber) or instances per M (complexity).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Comma-separated subset of bnb, approx, pop, zf, exhaustive.
    #[arg(long, value_delimiter = ',')]
    pub precoders: Option<Vec<String>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_gon: Option<usize>,
    /// CSV path; the metadata sidecar goes next to it with a `.json`
    /// extension. CSV goes to stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Comma-separated M values for the complexity profile.
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    /// Channel draws averaged per SNR point (sumrate).
    #[arg(long)]
    pub channels: Option<usize>,
    /// Symbol vectors per channel draw (ber); above 1 a lookup table is reused.
    #[arg(long)]
    pub symbols_per_channel: Option<usize>,
    #[arg(long, value_enum)]
    pub erfc: Option<Convention>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Config file contents. Keys match the long flag names.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<Experiment>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    pub snr: Option<SnrGrid>,
    pub trials: Option<usize>,
    pub precoders: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub n_gon: Option<usize>,
    pub output: Option<PathBuf>,
    pub m_list: Option<Vec<usize>>,
    pub channels: Option<usize>,
    pub symbols_per_channel: Option<usize>,
    pub erfc: Option<Convention>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub snr: SnrGrid,
    pub trials: usize,
    pub precoders: Vec<String>,
    pub seed: u64,
    pub n_gon: usize,
    pub output: Option<PathBuf>,
    pub m_list: Vec<usize>,
    pub channels: usize,
    pub symbols_per_channel: usize,
    pub erfc: Convention,
}

impl ExperimentConfig {
    pub fn rx_len(&self) -> usize {
        self.k * self.l
    }

    /// Parsed precoders with the configured polygon size applied.
    pub fn precoder_kinds(&self) -> Result<Vec<PrecoderKind>, CliError> {
        self.precoders
            .iter()
            .map(|p| match p.parse::<PrecoderKind>() {
                Ok(PrecoderKind::Pop { .. }) if !p.contains(':') => Ok(PrecoderKind::Pop { n_gon: self.n_gon }),
                Ok(kind) => Ok(kind),
                Err(_) => Err(CliError::usage(format!(
                    "precoders: unknown precoder '{p}' (expected bnb, approx, pop, zf, exhaustive)"
                ))),
            })
            .collect()
    }

    /// Field-level validation, including the size caps.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, msg: String| Err(CliError::usage(format!("{field}: {msg}")));
        for (field, v) in [("M", self.m), ("K", self.k), ("L", self.l)] {
            if v == 0 {
                return bad(field, "must be at least 1".into());
            }
        }
        if self.trials == 0 {
            return bad("trials", "must be at least 1".into());
        }
        if self.precoders.is_empty() {
            return bad("precoders", "at least one precoder is required".into());
        }
        if let Err(e) = self.snr.check() {
            return bad("snr", e);
        }
        if !(8..=MAX_N_GON).contains(&self.n_gon) {
            return bad("n_gon", format!("must lie in 8..={MAX_N_GON}, got {}", self.n_gon));
        }
        if self.symbols_per_channel == 0 {
            return bad("symbols_per_channel", "must be at least 1".into());
        }
        if self.channels == 0 {
            return bad("channels", "must be at least 1".into());
        }
        let kinds = self.precoder_kinds()?;
        let tx_values: Vec<usize> = match self.experiment {
            Experiment::Complexity => self.m_list.clone(),
            _ => vec![self.m],
        };
        if tx_values.contains(&0) {
            return bad("m_list", "entries must be at least 1".into());
        }
        let max_tx = tx_values.iter().copied().max().unwrap_or(0);
        for kind in &kinds {
            if let PrecoderKind::Pop { n_gon } = kind {
                if !(8..=MAX_N_GON).contains(n_gon) {
                    return bad("precoders", format!("pop polygon must have 8..={MAX_N_GON} sides"));
                }
            }
            if *kind == PrecoderKind::Exhaustive && max_tx > EXHAUSTIVE_MAX_TX {
                return Err(CliError::cap("M (exhaustive)", max_tx, EXHAUSTIVE_MAX_TX));
            }
            if *kind == PrecoderKind::Bnb && max_tx > DEFAULT_MAX_TX {
                return Err(CliError::cap("M (bnb)", max_tx, DEFAULT_MAX_TX));
            }
            if *kind == PrecoderKind::Zf && self.m < self.rx_len() {
                return bad("precoders", format!("zf needs M >= K L, got M = {} and K L = {}", self.m, self.rx_len()));
            }
        }
        match self.experiment {
            Experiment::Table if self.rx_len() > TABLE_MAX_RX => {
                Err(CliError::cap("K L (table)", self.rx_len(), TABLE_MAX_RX))
            }
            Experiment::Sumrate if self.rx_len() > SUM_RATE_MAX_RX => {
                Err(CliError::cap("K L (sumrate)", self.rx_len(), SUM_RATE_MAX_RX))
            }
            Experiment::Complexity if kinds.iter().any(|k| *k != PrecoderKind::Bnb) => {
                bad("precoders", "the complexity profile runs bnb only".into())
            }
            Experiment::Complexity if self.m_list.is_empty() => bad("m_list", "at least one M is required".into()),
            Experiment::Complexity if self.trials < 10 => {
                bad("trials", format!("the complexity profile needs at least 10 instances, got {}", self.trials))
            }
            _ => Ok(()),
        }
    }
}

/// Reads a config file. A metadata sidecar is accepted too: its `config`
/// object is used.
pub fn read_config_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let parsed = match value.get("config") {
        Some(inner) if value.get("version").is_some() => serde_json::from_value(inner.clone()),
        _ => serde_json::from_str(&text),
    };
    parsed.map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Layers defaults, then the config file, then flags.
pub fn resolve(args: &Args) -> Result<ExperimentConfig, CliError> {
    let file = match &args.config {
        Some(path) => read_config_file(path)?,
        None => FileConfig::default(),
    };
    let experiment = args
        .experiment
        .or(file.experiment)
        .ok_or_else(|| CliError::usage("experiment: required (ber, sumrate, complexity or table)"))?;
    let m = args.m.or(file.m).ok_or_else(|| CliError::usage("M: required"))?;
    let cfg = ExperimentConfig {
        experiment,
        m,
        k: args.k.or(file.k).unwrap_or(1),
        l: args.l.or(file.l).unwrap_or(1),
        snr: args.snr.or(file.snr).unwrap_or(SnrGrid {
            start: 0.0,
            step: 2.0,
            stop: 14.0,
        }),
        trials: args.trials.or(file.trials).unwrap_or(1000),
        precoders: args
            .precoders
            .clone()
            .or(file.precoders)
            .unwrap_or_else(|| vec!["bnb".into()]),
        seed: args.seed.or(file.seed).unwrap_or(0),
        n_gon: args.n_gon.or(file.n_gon).unwrap_or(DEFAULT_N_GON),
        output: args.output.clone().or(file.output),
        m_list: args.m_list.clone().or(file.m_list).unwrap_or_else(|| vec![m]),
        channels: args.channels.or(file.channels).unwrap_or(50),
        symbols_per_channel: args.symbols_per_channel.or(file.symbols_per_channel).unwrap_or(1),
        erfc: args.erfc.or(file.erfc).unwrap_or_default(),
    };
    cfg.validate()?;
    Ok(cfg)
}
