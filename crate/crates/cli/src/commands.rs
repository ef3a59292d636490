use std::path::{Path, PathBuf};

use serde::Serialize;

use qgame_core::analysis::{
    devils_staircase, fit_power_law, large_deviation_spectrum, log_histogram, summary_stats,
    Normalization, SignalTransform, Spectrum, SpectrumSettings,
};
use qgame_core::dynamics::simulate;
use qgame_core::ingest::{self, DateFormat, IngestOptions, IngestReport, SeriesTransform};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};
use crate::io::{extension, json_bytes, write_atomic, InputTable, Table};

pub struct Output {
    pub dir: PathBuf,
    pub format: Format,
}

impl Output {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        Ok(Self {
            dir: cfg.out_dir()?,
            format: cfg.format()?,
        })
    }

    fn table(&self, stem: &str, table: &Table) -> Result<PathBuf> {
        let name = format!("{stem}.{}", extension(self.format));
        write_atomic(&self.dir, &name, &table.encode(self.format)?)
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        write_atomic(&self.dir, name, &json_bytes(value)?)
    }
}

pub fn simulate_cmd(cfg: &RunConfig) -> Result<()> {
    let out = Output::from_config(cfg)?;
    let params = cfg.game_params()?;
    let traj = simulate(&params)?;
    let data = match out.format {
        Format::Csv => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf)?;
            buf
        }
        Format::Json => Table {
            columns: vec!["round", "t", "I", "K", "tau_B", "omega", "mass", "x", "r", "S"],
            rows: traj
                .states
                .iter()
                .map(|s| {
                    vec![
                        s.round as f64, s.t, s.i, s.k, s.tau_b, s.omega, s.mass, s.x, s.r, s.s,
                    ]
                })
                .collect(),
        }
        .encode(Format::Json)?,
    };
    let name = format!("trajectory.{}", extension(out.format));
    let path = write_atomic(&out.dir, &name, &data)?;
    let mut meta = Vec::new();
    traj.write_metadata(&mut meta)?;
    write_atomic(&out.dir, "metadata.json", &meta)?;
    println!(
        "kept {} of {} rounds (transient {}), seed {}, written to {}",
        traj.len(),
        params.rounds,
        params.transient,
        params.seed,
        path.display()
    );
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct PeakSummary {
    pub peak_alpha: f64,
    pub peak_f: f64,
    pub resolution: usize,
    pub dropped_boxes: usize,
    pub resolutions: Vec<usize>,
    pub alpha_above_one: bool,
    pub settings: SettingsRecord,
}

/// Estimator settings as requested; `null` means chosen from the data.
#[derive(Debug, Serialize)]
pub struct SettingsRecord {
    pub resolutions: Option<Vec<usize>>,
    pub bandwidth: Option<f64>,
    pub grid_step: f64,
    pub min_boxes: usize,
    pub normalization: Normalization,
}

impl From<&SpectrumSettings> for SettingsRecord {
    fn from(s: &SpectrumSettings) -> Self {
        Self {
            resolutions: s.resolutions.clone(),
            bandwidth: s.bandwidth,
            grid_step: s.grid_step,
            min_boxes: s.min_boxes,
            normalization: s.normalization,
        }
    }
}

impl PeakSummary {
    fn of(s: &Spectrum<f64>, settings: &SpectrumSettings) -> Self {
        Self {
            peak_alpha: s.peak_alpha,
            peak_f: s.peak_f,
            resolution: s.peak_box_size,
            dropped_boxes: s.dropped_boxes().iter().map(|(_, d)| d).sum(),
            resolutions: s.curves.iter().map(|c| c.box_size).collect(),
            alpha_above_one: s.supports_alpha_above(1.0),
            settings: settings.into(),
        }
    }
}

fn spectrum_table(s: &Spectrum<f64>) -> Table {
    Table {
        columns: vec!["resolution", "alpha", "f"],
        rows: s
            .points()
            .map(|(alpha, f, n)| vec![n as f64, alpha, f])
            .collect(),
    }
}

pub fn default_transform(column: &str) -> SignalTransform {
    if column == "r" {
        SignalTransform::Integrate
    } else {
        SignalTransform::Levels
    }
}

pub fn spectrum_cmd(
    cfg: &RunConfig,
    input: &Path,
    column: &str,
    transform: Option<SignalTransform>,
) -> Result<()> {
    let out = Output::from_config(cfg)?;
    let transform = transform.unwrap_or_else(|| default_transform(column));
    let settings = cfg.spectrum_settings(transform.default_normalization())?;
    let data = InputTable::read(input)?.column(column)?;
    let signal = transform.apply(&data)?;
    let s = large_deviation_spectrum(&signal, &settings)?;
    out.table("spectrum", &spectrum_table(&s))?;
    let summary = PeakSummary::of(&s, &settings);
    out.json("spectrum_peak.json", &summary)?;
    println!(
        "peak alpha {} (f = {}) at box size {}",
        summary.peak_alpha, summary.peak_f, summary.resolution
    );
    Ok(())
}

pub fn density_cmd(cfg: &RunConfig, input: &Path, column: &str) -> Result<()> {
    let out = Output::from_config(cfg)?;
    let bins = cfg.bins()?;
    let data = InputTable::read(input)?.column(column)?;
    let hist = log_histogram(&data, bins)?;
    let fit = fit_power_law(&hist)?;
    out.table(
        "histogram",
        &Table {
            columns: vec!["bin_center", "density"],
            rows: hist
                .centers
                .iter()
                .zip(&hist.densities)
                .map(|(c, d)| vec![*c, *d])
                .collect(),
        },
    )?;
    out.json("fit.json", &fit)?;
    println!("slope {} (r^2 = {})", fit.slope, fit.r_squared);
    Ok(())
}

pub fn staircase_cmd(cfg: &RunConfig, input: &Path, column: &str) -> Result<()> {
    let out = Output::from_config(cfg)?;
    let table = InputTable::read(input)?;
    let tau = table.column(column)?;
    let rounds = if table.has_column("round") {
        table.column("round")?
    } else {
        (1..=tau.len()).map(|k| k as f64).collect()
    };
    let theta = devils_staircase(&tau)?;
    let path = out.table(
        "staircase",
        &Table {
            columns: vec!["round", "theta_cumulative"],
            rows: rounds.iter().zip(&theta).map(|(r, t)| vec![*r, *t]).collect(),
        },
    )?;
    println!("{} rounds written to {}", theta.len(), path.display());
    Ok(())
}

pub fn stats_cmd(cfg: &RunConfig, input: &Path, column: &str) -> Result<()> {
    let out = Output::from_config(cfg)?;
    let max_lag = cfg.max_lag()?;
    let data = InputTable::read(input)?.column(column)?;
    let stats = summary_stats(&data, max_lag)?;
    out.json("stats.json", &stats)?;
    match stats.excess_kurtosis {
        Some(k) => println!("n {}, excess kurtosis {k}", stats.n),
        None => println!("n {}, excess kurtosis undefined", stats.n),
    }
    Ok(())
}

pub struct MarketInput {
    pub path: PathBuf,
    pub date_column: String,
    pub value_column: String,
    pub date_format: Option<DateFormat>,
    pub transform: SeriesTransform,
}

#[derive(Debug, Serialize)]
struct SimSide {
    source: String,
    column: String,
    transform: SignalTransform,
    samples: usize,
    #[serde(flatten)]
    peak: PeakSummary,
}

#[derive(Debug, Serialize)]
struct MarketSide {
    source: String,
    column: String,
    transform: SeriesTransform,
    samples: usize,
    ingest: IngestReport,
    #[serde(flatten)]
    peak: PeakSummary,
}

#[derive(Debug, Serialize)]
struct Comparison {
    sim: SimSide,
    market: MarketSide,
    /// Market peak minus simulated peak.
    peak_delta: f64,
    market_alpha_above_one: bool,
}

pub fn compare_cmd(
    cfg: &RunConfig,
    sim: &Path,
    sim_column: &str,
    sim_transform: SignalTransform,
    market: &MarketInput,
) -> Result<()> {
    let out = Output::from_config(cfg)?;
    let settings = cfg.spectrum_settings(Normalization::UnitRange)?;

    let sim_data = InputTable::read(sim)?.column(sim_column)?;
    let sim_signal = sim_transform.apply(&sim_data)?;
    let sim_spec = large_deviation_spectrum(&sim_signal, &settings)?;

    let opts = IngestOptions {
        date_column: market.date_column.clone(),
        value_column: market.value_column.clone(),
        date_format: market.date_format,
        source_label: market.path.display().to_string(),
    };
    let file = std::fs::File::open(&market.path).map_err(|e| {
        CliError::Input(format!("cannot read {}: {e}", market.path.display()))
    })?;
    let (series, report) = ingest::parse_csv::<f64, _>(file, &opts)?;
    let market_signal = ingest::to_signal(&series, market.transform)?;
    let market_spec = large_deviation_spectrum(&market_signal, &settings)?;

    let result = Comparison {
        peak_delta: market_spec.peak_alpha - sim_spec.peak_alpha,
        market_alpha_above_one: market_spec.supports_alpha_above(1.0),
        sim: SimSide {
            source: sim.display().to_string(),
            column: sim_column.to_string(),
            transform: sim_transform,
            samples: sim_signal.len(),
            peak: PeakSummary::of(&sim_spec, &settings),
        },
        market: MarketSide {
            source: market.path.display().to_string(),
            column: market.value_column.clone(),
            transform: market.transform,
            samples: market_signal.len(),
            ingest: report,
            peak: PeakSummary::of(&market_spec, &settings),
        },
    };
    out.json("compare.json", &result)?;
    println!(
        "sim peak {}, market peak {}, delta {}, market alpha > 1: {}",
        result.sim.peak.peak_alpha,
        result.market.peak.peak_alpha,
        result.peak_delta,
        result.market_alpha_above_one
    );
    Ok(())
}
