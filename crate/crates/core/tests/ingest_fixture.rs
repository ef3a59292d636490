use std::path::PathBuf;

use chrono::NaiveDate;
use proptest::prelude::*;
use qgame_core::analysis::{
    integrate_returns, large_deviation_spectrum, Normalization, SpectrumSettings,
};
use qgame_core::ingest::{
    parse_csv, to_signal, write_csv, DateFormat, IngestOptions, SeriesTransform,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

#[test]
fn vix_fixture_counts() {
    let (ds, rep) = parse_csv::<f64, _>(load("vix_sample.csv").as_bytes(), &IngestOptions::default())
        .unwrap();
    assert_eq!(rep.rows_read, 200);
    assert_eq!(rep.rows_kept, 195);
    assert_eq!(rep.rows_dropped_malformed, 2);
    assert_eq!(rep.rows_dropped_nonpositive, 1);
    assert_eq!(rep.duplicate_dates_resolved, 2);
    assert_eq!(
        rep.rows_read,
        rep.rows_kept
            + rep.rows_dropped_malformed
            + rep.rows_dropped_nonpositive
            + rep.duplicate_dates_resolved
    );
    assert_eq!(rep.date_format, Some(DateFormat::DayFirst));
    assert_eq!(ds.dates[0], NaiveDate::from_ymd_opt(1990, 1, 2).unwrap());
    assert!(ds.dates.windows(2).all(|w| w[0] < w[1]));
    let jan16 = ds
        .dates
        .iter()
        .position(|d| *d == NaiveDate::from_ymd_opt(1990, 1, 16).unwrap())
        .unwrap();
    assert_eq!(ds.values[jan16], 19.11);
    assert_eq!(ds.values[jan16 + 1], 19.33);
}

#[test]
fn reserialization_is_a_fixed_point() {
    for name in ["vix_sample.csv", "market_heavy_tailed.csv"] {
        let (a, _) = parse_csv::<f64, _>(load(name).as_bytes(), &IngestOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_csv(&a, &mut buf, "Date", "Close").unwrap();
        let (b, rep) = parse_csv::<f64, _>(buf.as_slice(), &IngestOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(rep.rows_read, rep.rows_kept);
        let mut again = Vec::new();
        write_csv(&b, &mut again, "Date", "Close").unwrap();
        assert_eq!(buf, again);
    }
}

#[test]
fn log_returns_invert_through_integration() {
    let (ds, _) = parse_csv::<f64, _>(load("vix_sample.csv").as_bytes(), &IngestOptions::default())
        .unwrap();
    let lr = to_signal(&ds, SeriesTransform::LogReturns).unwrap();
    assert_eq!(lr.len(), ds.len() - 1);
    let path = integrate_returns(&lr, ds.values[0]).unwrap();
    for (p, v) in path.iter().zip(&ds.values) {
        assert!((p - v.ln()).abs() < 1e-12);
    }
}

#[test]
fn heavy_tailed_fixture_matches_oracle() {
    let (ds, rep) = parse_csv::<f64, _>(
        load("market_heavy_tailed.csv").as_bytes(),
        &IngestOptions::default(),
    )
    .unwrap();
    assert_eq!(rep.rows_kept, 4000);
    assert_eq!(rep.date_format, Some(DateFormat::Iso));
    let levels = to_signal(&ds, SeriesTransform::Levels).unwrap();
    let settings = SpectrumSettings::default().with_normalization(Normalization::UnitRange);
    let s = large_deviation_spectrum(&levels, &settings).unwrap();
    // NumPy oracle of the same estimator: peak 0.980 at box size 8.
    assert_eq!(s.peak_box_size, 8);
    assert!((s.peak_alpha - 0.98).abs() < 1e-9, "{}", s.peak_alpha);
    assert!(s.supports_alpha_above(1.0));
}

const SAMPLE: &str = "2020-01-01,1\n2020-01-02,2\n2020-01-02,3\n2020-01-03,4\n2020-01-01,5\n2020-01-04,-1\n2020-01-05,x\n";

proptest! {
    #[test]
    fn dedup_is_order_stable(perm in Just((0..7).collect::<Vec<usize>>()).prop_shuffle()) {
        // Keep-last means the result depends on the relative order of rows
        // sharing a date; other rows may move freely.
        let lines: Vec<&str> = SAMPLE.lines().collect();
        let shuffled: Vec<&str> = perm.iter().map(|&k| lines[k]).collect();
        let text = format!("Date,Close\n{}\n", shuffled.join("\n"));
        let (ds, rep) = parse_csv::<f64, _>(text.as_bytes(), &IngestOptions::default()).unwrap();
        prop_assert_eq!(rep.rows_read, 7);
        prop_assert_eq!(rep.rows_kept, 3);
        prop_assert_eq!(rep.duplicate_dates_resolved, 2);
        prop_assert_eq!(rep.rows_dropped_malformed, 1);
        prop_assert_eq!(rep.rows_dropped_nonpositive, 1);
        let pos = |k: usize| perm.iter().position(|&p| p == k).unwrap();
        let jan1 = if pos(0) > pos(4) { 1.0 } else { 5.0 };
        let jan2 = if pos(1) > pos(2) { 2.0 } else { 3.0 };
        prop_assert_eq!(ds.values, vec![jan1, jan2, 4.0]);
    }
}
