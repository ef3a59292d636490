//! Loading dated market series (for example daily index closes) from CSV.
//!
//! Expected schema: a header row, comma-delimited, optionally quoted
//! fields, with a date column (default `Date`) and a value column (default
//! `Close`). Dates may be ISO `YYYY-MM-DD`, day-first `DD-MM-YYYY` or
//! month-first `MM-DD-YYYY`; `/` and `.` are accepted as separators. Rows
//! are treated as evenly spaced in trading time regardless of calendar gaps.

use std::collections::HashMap;
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DateFormat {
    /// `YYYY-MM-DD`
    Iso,
    /// `DD-MM-YYYY`
    DayFirst,
    /// `MM-DD-YYYY`
    MonthFirst,
}

impl DateFormat {
    fn pattern(self) -> &'static str {
        match self {
            DateFormat::Iso => "%Y-%m-%d",
            DateFormat::DayFirst => "%d-%m-%Y",
            DateFormat::MonthFirst => "%m-%d-%Y",
        }
    }

    pub fn parse(self, raw: &str) -> Option<NaiveDate> {
        NaiveDate::parse_from_str(&canonical_separators(raw), self.pattern()).ok()
    }
}

impl std::fmt::Display for DateFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DateFormat::Iso => "YYYY-MM-DD",
            DateFormat::DayFirst => "DD-MM-YYYY",
            DateFormat::MonthFirst => "MM-DD-YYYY",
        })
    }
}

impl std::str::FromStr for DateFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iso" | "ymd" | "yyyy-mm-dd" => Ok(DateFormat::Iso),
            "day-first" | "day_first" | "dmy" | "dd-mm-yyyy" => Ok(DateFormat::DayFirst),
            "month-first" | "month_first" | "mdy" | "mm-dd-yyyy" => Ok(DateFormat::MonthFirst),
            _ => Err(Error::Input(format!(
                "unknown date format `{s}` (expected iso, day-first or month-first)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestOptions {
    pub date_column: String,
    pub value_column: String,
    /// Forces a date format instead of detecting it.
    pub date_format: Option<DateFormat>,
    pub source_label: String,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            date_column: "Date".into(),
            value_column: "Close".into(),
            date_format: None,
            source_label: String::new(),
        }
    }
}

/// Date-ordered series with strictly increasing dates and finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct DatedSeries<T> {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<T>,
    pub source_label: String,
}

impl<T> DatedSeries<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub rows_dropped_malformed: usize,
    pub rows_dropped_nonpositive: usize,
    pub duplicate_dates_resolved: usize,
    pub date_format: Option<DateFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesTransform {
    Levels,
    LogReturns,
}

fn canonical_separators(raw: &str) -> String {
    raw.trim().replace(['/', '.'], "-")
}

enum Shape {
    Iso,
    Numeric(u32, u32),
    Other,
}

fn shape(raw: &str) -> Shape {
    let s = canonical_separators(raw);
    let parts: Vec<&str> = s.split('-').collect();
    let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    if parts.len() != 3 || !parts.iter().all(|p| digits(p)) {
        return Shape::Other;
    }
    match (parts[0].len(), parts[2].len()) {
        (4, 1..=2) if parts[1].len() <= 2 => Shape::Iso,
        (1..=2, 4) if parts[1].len() <= 2 => {
            Shape::Numeric(parts[0].parse().unwrap_or(0), parts[1].parse().unwrap_or(0))
        }
        _ => Shape::Other,
    }
}

/// Picks the date format of a file from its raw date strings.
///
/// ISO-shaped dates win when they are at least as common as `NN-NN-YYYY`
/// ones. For the latter, a first field above 12 means day-first and a
/// second field above 12 means month-first; if neither occurs the file is
/// ambiguous and a format must be given explicitly.
pub fn detect_date_format<'a>(raw: impl IntoIterator<Item = &'a str>) -> Result<DateFormat> {
    let (mut iso, mut numeric) = (0usize, 0usize);
    let (mut first_big, mut second_big) = (false, false);
    for r in raw {
        match shape(r) {
            Shape::Iso => iso += 1,
            Shape::Numeric(a, b) => {
                numeric += 1;
                first_big |= a > 12;
                second_big |= b > 12;
            }
            Shape::Other => {}
        }
    }
    if iso == 0 && numeric == 0 {
        return Err(Error::Input("no recognizable dates in the date column".into()));
    }
    if iso >= numeric {
        return Ok(DateFormat::Iso);
    }
    match (first_big, second_big) {
        (true, false) => Ok(DateFormat::DayFirst),
        (false, true) => Ok(DateFormat::MonthFirst),
        (true, true) => Err(Error::Input(
            "dates mix day-first and month-first order; pass an explicit date format".into(),
        )),
        (false, false) => Err(Error::Input(format!(
            "ambiguous date format: could be {} or {}; pass an explicit date format",
            DateFormat::DayFirst,
            DateFormat::MonthFirst
        ))),
    }
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::Input(format!("missing column `{name}`")))
}

/// Parses a dated series, dropping and counting unusable rows.
///
/// Rows whose date or value does not parse, or whose value is not finite,
/// are malformed; rows with a value `<= 0` are dropped as non-positive.
/// Survivors are stably sorted by date and, among rows sharing a date, the
/// last one in file order is kept.
pub fn parse_csv<T: Real, R: Read>(
    input: R,
    opts: &IngestOptions,
) -> Result<(DatedSeries<T>, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| Error::Input(format!("cannot read header row: {e}")))?
        .clone();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(Error::Input("input is empty or has no header row".into()));
    }
    let date_idx = column_index(&headers, &opts.date_column)?;
    let value_idx = column_index(&headers, &opts.value_column)?;

    let mut report = IngestReport::default();
    let mut rows: Vec<Option<(String, String)>> = Vec::new();
    for rec in reader.records() {
        report.rows_read += 1;
        rows.push(rec.ok().and_then(|r| {
            Some((r.get(date_idx)?.to_string(), r.get(value_idx)?.to_string()))
        }));
    }
    if report.rows_read == 0 {
        return Err(Error::Input("input has no data rows".into()));
    }
    let format = match opts.date_format {
        Some(f) => f,
        None => detect_date_format(rows.iter().flatten().map(|(d, _)| d.as_str()))?,
    };
    report.date_format = Some(format);

    let mut parsed: Vec<(NaiveDate, T)> = Vec::with_capacity(rows.len());
    for row in rows {
        let Some((d, v)) = row else {
            report.rows_dropped_malformed += 1;
            continue;
        };
        let date = format.parse(&d);
        let value = v.parse::<f64>().ok().filter(|x| x.is_finite());
        match (date, value) {
            (Some(date), Some(x)) if x > 0.0 => parsed.push((date, T::lit(x))),
            (Some(_), Some(_)) => report.rows_dropped_nonpositive += 1,
            _ => report.rows_dropped_malformed += 1,
        }
    }
    parsed.sort_by_key(|&(d, _)| d);
    let mut last: HashMap<NaiveDate, usize> = HashMap::new();
    for (idx, (d, _)) in parsed.iter().enumerate() {
        last.insert(*d, idx);
    }
    let before = parsed.len();
    let kept: Vec<(NaiveDate, T)> = parsed
        .iter()
        .enumerate()
        .filter(|(idx, (d, _))| last[d] == *idx)
        .map(|(_, &p)| p)
        .collect();
    report.duplicate_dates_resolved = before - kept.len();
    report.rows_kept = kept.len();
    if kept.is_empty() {
        return Err(Error::Input(format!(
            "no valid rows in column `{}`",
            opts.value_column
        )));
    }
    let (dates, values) = kept.into_iter().unzip();
    Ok((
        DatedSeries {
            dates,
            values,
            source_label: opts.source_label.clone(),
        },
        report,
    ))
}

/// Writes the series back out with ISO dates and shortest round-trip values.
pub fn write_csv<T: Real, W: Write>(
    ds: &DatedSeries<T>,
    out: W,
    date_column: &str,
    value_column: &str,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Input(format!("write failed: {e}"));
    w.write_record([date_column, value_column]).map_err(err)?;
    for (d, v) in ds.dates.iter().zip(&ds.values) {
        w.write_record([d.format("%Y-%m-%d").to_string(), v.to_string()])
            .map_err(err)?;
    }
    w.flush()
        .map_err(|e| Error::Input(format!("write failed: {e}")))
}

/// Levels verbatim, or log returns `ln(v[k+1] / v[k])`.
pub fn to_signal<T: Real>(ds: &DatedSeries<T>, transform: SeriesTransform) -> Result<Vec<T>> {
    match transform {
        SeriesTransform::Levels => Ok(ds.values.clone()),
        SeriesTransform::LogReturns => {
            if ds.len() < 2 {
                return Err(Error::Input("log returns need at least two values".into()));
            }
            if let Some(k) = ds.values.iter().position(|&v| !(v > T::zero())) {
                return Err(Error::Input(format!(
                    "non-positive value {} on {} cannot be log-transformed",
                    ds.values[k], ds.dates[k]
                )));
            }
            Ok(ds.values.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
        }
    }
}
