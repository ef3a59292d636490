//! Run configuration: a flat `key = value` file overlaid by command-line
//! flags. Each key resolves as flag, then file, then the default below.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qgame_core::analysis::{Normalization, SpectrumSettings};
use qgame_core::dynamics::{GameParams, InitialDriver};

use crate::error::{CliError, Result};

/// Every recognized key with its default; `None` marks a required key.
pub const KEYS: &[(&str, Option<&str>)] = &[
    ("epsilon", None),
    ("u", None),
    ("D", None),
    ("mu", None),
    ("dt", None),
    ("sigma", None),
    ("b", Some("1")),
    ("hbar_s", Some("1")),
    ("s0", Some("1")),
    ("seed", Some("42")),
    ("rounds", Some("30000")),
    ("transient", Some("10000")),
    ("i0", Some("random")),
    ("r_init", Some("0")),
    ("resolutions", Some("auto")),
    ("bandwidth", Some("auto")),
    ("grid_step", Some("0.005")),
    ("min_boxes", Some("50")),
    ("normalization", Some("auto")),
    ("bins", Some("20")),
    ("max_lag", Some("20")),
    ("out", Some(".")),
    ("format", Some("csv")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err("expected `csv` or `json`".into()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    values: BTreeMap<&'static str, String>,
}

fn known(key: &str) -> Option<&'static str> {
    KEYS.iter().map(|(k, _)| *k).find(|k| *k == key)
}

/// Parses the flat file format. Blank lines and `#` comments are skipped.
pub fn parse_file(text: &str, origin: &str) -> Result<BTreeMap<&'static str, String>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = format!("{origin}:{}", idx + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected `key = value` at {at}")))?;
        let key = key.trim();
        let name = known(key)
            .ok_or_else(|| CliError::Config(format!("unknown key `{key}` at {at}")))?;
        if out.insert(name, value.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("duplicate key `{key}` at {at}")));
        }
    }
    Ok(out)
}

impl RunConfig {
    pub fn load(path: Option<&Path>, flags: Vec<(&'static str, Option<String>)>) -> Result<Self> {
        let mut values: BTreeMap<&'static str, String> = KEYS
            .iter()
            .filter_map(|(k, d)| d.map(|d| (*k, d.to_string())))
            .collect();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            values.extend(parse_file(&text, &path.display().to_string())?);
        }
        for (key, value) in flags {
            if let Some(v) = value {
                values.insert(key, v);
            }
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse<T>(&self, key: &'static str) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        let raw = self.raw(key).ok_or_else(|| {
            CliError::Config(format!(
                "missing required key `{key}` (set it in the config file or pass --{key})"
            ))
        })?;
        raw.parse()
            .map_err(|e| CliError::Config(format!("invalid value `{raw}` for `{key}`: {e}")))
    }

    /// `auto` yields `None`.
    fn parse_auto<T>(&self, key: &'static str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if self.raw(key) == Some("auto") {
            Ok(None)
        } else {
            self.parse(key).map(Some)
        }
    }

    pub fn game_params(&self) -> Result<GameParams<f64>> {
        let i0 = match self.raw("i0") {
            Some("random") => InitialDriver::Random,
            _ => InitialDriver::Fixed(self.parse("i0")?),
        };
        let p = GameParams {
            epsilon: self.parse("epsilon")?,
            u: self.parse("u")?,
            d: self.parse("D")?,
            mu: self.parse("mu")?,
            dt: self.parse("dt")?,
            sigma: self.parse("sigma")?,
            b: self.parse("b")?,
            hbar_s: self.parse("hbar_s")?,
            s0: self.parse("s0")?,
            seed: self.parse("seed")?,
            rounds: self.parse("rounds")?,
            transient: self.parse("transient")?,
            i0,
            r_init: self.parse("r_init")?,
        };
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }

    /// Estimator settings; `fallback` applies when `normalization = auto`.
    pub fn spectrum_settings(&self, fallback: Normalization) -> Result<SpectrumSettings> {
        let resolutions = match self.raw("resolutions") {
            Some("auto") | None => None,
            Some(list) => Some(
                list.split(',')
                    .map(|s| {
                        s.trim().parse::<usize>().map_err(|e| {
                            CliError::Config(format!("invalid value `{list}` for `resolutions`: {e}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let normalization = match self.raw("normalization") {
            Some("auto") | None => fallback,
            Some("unit_range") | Some("unit-range") => Normalization::UnitRange,
            Some("none") => Normalization::None,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "invalid value `{other}` for `normalization`: expected auto, unit_range or none"
                )))
            }
        };
        let grid_step: f64 = self.parse("grid_step")?;
        if !(grid_step.is_finite() && grid_step > 0.0) {
            return Err(CliError::Config(format!(
                "invalid value `{grid_step}` for `grid_step`: must be positive"
            )));
        }
        let bandwidth: Option<f64> = self.parse_auto("bandwidth")?;
        if let Some(h) = bandwidth {
            if !(h.is_finite() && h > 0.0) {
                return Err(CliError::Config(format!(
                    "invalid value `{h}` for `bandwidth`: must be positive"
                )));
            }
        }
        Ok(SpectrumSettings {
            resolutions,
            bandwidth,
            grid_step,
            alpha_grid: None,
            normalization,
            min_boxes: self.parse("min_boxes")?,
        })
    }

    pub fn bins(&self) -> Result<usize> {
        self.parse("bins")
    }

    pub fn max_lag(&self) -> Result<usize> {
        self.parse("max_lag")
    }

    pub fn out_dir(&self) -> Result<PathBuf> {
        self.parse("out")
    }

    pub fn format(&self) -> Result<Format> {
        self.parse("format")
    }
}
