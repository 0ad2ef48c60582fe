use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use onebit_precoding::eval::{
    complexity_profile, simulate_ber, snr_to_sigma, sum_rate_sweep, trial_rng, BerConfig, ComplexityConfig,
    SumRateConfig,
};
use onebit_precoding::model::{draw_channel, ChannelMatrix};
use onebit_precoding::precoders::build_lookup_table;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{Experiment, ExperimentConfig};
use crate::CliError;

const COMMON: [&str; 5] = ["experiment", "precoder", "M", "K", "L"];
pub const BER_COLUMNS: [&str; 5] = ["snr_db", "sigma_n_sq", "trials", "bit_errors", "ber"];
pub const SUMRATE_COLUMNS: [&str; 4] = ["snr_db", "channels", "rate_bpcu", "normalization_error"];
pub const COMPLEXITY_COLUMNS: [&str; 6] = [
    "instances",
    "mean_visited_branches",
    "max_visited_branches",
    "mean_lp_solves",
    "mean_lp_iterations",
    "exhaustive_candidates",
];
pub const TABLE_COLUMNS: [&str; 4] = ["class", "symbols", "epsilon", "x_real"];

/// Full CSV header of an experiment.
pub fn header(experiment: Experiment) -> Vec<&'static str> {
    let tail: &[&str] = match experiment {
        Experiment::Ber => &BER_COLUMNS,
        Experiment::Sumrate => &SUMRATE_COLUMNS,
        Experiment::Complexity => &COMPLEXITY_COLUMNS,
        Experiment::Table => &TABLE_COLUMNS,
    };
    COMMON.iter().chain(tail).copied().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Experiment-level results that do not fit a row, e.g. the fitted slope.
    pub summary: serde_json::Value,
}

impl RunOutput {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| CliError::Runtime(format!("writing CSV: {e}"));
        out.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            out.write_record(row).map_err(io)?;
        }
        out.flush().map_err(|e| CliError::Runtime(format!("writing CSV: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub version: String,
    pub library_version: String,
    pub wall_time_s: f64,
    pub rows: usize,
    pub summary: serde_json::Value,
}

/// Sidecar path for a CSV output: same stem, `.json` extension.
pub fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("json")
}

/// Computes the rows of an experiment without touching the filesystem.
pub fn execute(cfg: &ExperimentConfig, workers: usize) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    let kinds = cfg.precoder_kinds()?;
    let common = |precoder: &str, m: usize| {
        vec![
            cfg.experiment.to_string(),
            precoder.to_string(),
            m.to_string(),
            cfg.k.to_string(),
            cfg.l.to_string(),
        ]
    };
    let mut rows = Vec::new();
    let mut summary = json!({});
    match cfg.experiment {
        Experiment::Ber => {
            let snr = cfg.snr.points();
            for kind in &kinds {
                let mut bc = BerConfig::new(cfg.k, cfg.l, cfg.m, snr.clone(), cfg.trials, cfg.seed);
                bc.symbols_per_channel = cfg.symbols_per_channel;
                bc.workers = workers;
                for r in simulate_ber(*kind, &bc)? {
                    let mut row = common(&r.precoder, cfg.m);
                    row.extend([
                        r.snr_db.to_string(),
                        snr_to_sigma(r.snr_db, 1.0).to_string(),
                        r.trials.to_string(),
                        r.bit_errors.to_string(),
                        r.ber.to_string(),
                    ]);
                    rows.push(row);
                }
            }
        }
        Experiment::Sumrate => {
            for kind in &kinds {
                let mut sc = SumRateConfig::new(cfg.k, cfg.l, cfg.m, cfg.snr.points(), cfg.seed);
                sc.channels = cfg.channels;
                sc.convention = cfg.erfc.into();
                sc.workers = workers;
                for r in sum_rate_sweep(*kind, &sc)? {
                    let mut row = common(&r.precoder, cfg.m);
                    row.extend([
                        r.snr_db.to_string(),
                        r.channels_averaged.to_string(),
                        r.rate_bpcu.to_string(),
                        r.normalization_error.to_string(),
                    ]);
                    rows.push(row);
                }
            }
        }
        Experiment::Complexity => {
            let mut cc = ComplexityConfig::new(cfg.k, cfg.l, cfg.m_list.clone(), cfg.trials, cfg.seed);
            cc.workers = workers;
            let profile = complexity_profile(&cc)?;
            for r in &profile.records {
                let mut row = common("bnb", r.tx);
                row.extend([
                    r.instances.to_string(),
                    r.mean_visited_branches.to_string(),
                    r.max_visited_branches.to_string(),
                    r.mean_lp_solves.to_string(),
                    r.mean_lp_iterations.to_string(),
                    r.exhaustive_candidates.to_string(),
                ]);
                rows.push(row);
            }
            let slope = if profile.slope.is_finite() { json!(profile.slope) } else { json!(null) };
            summary = json!({ "loglog_slope": slope });
        }
        Experiment::Table => {
            let mut rng = trial_rng(cfg.seed, 0);
            let h: ChannelMatrix<f64> = draw_channel(&mut rng, cfg.k, cfg.l, cfg.m)?;
            for kind in &kinds {
                let table = build_lookup_table(&h, |h, s| kind.precode(h, s))?;
                for class in 0..table.len() {
                    let (x, eps) = table.entry(class);
                    let symbols = table.representative(class);
                    let mut row = common(kind.id(), cfg.m);
                    row.extend([
                        class.to_string(),
                        join(symbols.indices()),
                        eps.value().to_string(),
                        join(&x.to_real()),
                    ]);
                    rows.push(row);
                }
            }
            let entries: Vec<[f64; 2]> = h.entries().iter().map(|c| [c.re, c.im]).collect();
            summary = json!({ "channel_row_major": entries });
        }
    }
    Ok(RunOutput {
        header: header(cfg.experiment),
        rows,
        summary,
    })
}

fn join<V: ToString>(values: &[V]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

/// Runs an experiment and writes the CSV (stdout when no output path is
/// configured) plus the metadata sidecar next to a file output.
pub fn run(cfg: &ExperimentConfig, workers: usize) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let out = execute(cfg, workers)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    match &cfg.output {
        None => out.write_csv(std::io::stdout().lock())?,
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
            out.write_csv(file)?;
            let meta = Metadata {
                config: cfg.clone(),
                seed: cfg.seed,
                version: env!("CARGO_PKG_VERSION").into(),
                library_version: onebit_precoding::VERSION.into(),
                wall_time_s,
                rows: out.rows.len(),
                summary: out.summary.clone(),
            };
            let side = sidecar_path(path);
            let text = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Runtime(e.to_string()))?;
            std::fs::write(&side, text + "\n")
                .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", side.display())))?;
        }
    }
    Ok(out)
}
