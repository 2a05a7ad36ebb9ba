//! Measurement series and threshold-exceedance extraction.
//!
//! A raw series of measurements `y_1..y_T` is reduced to the event times at
//! which a threshold is exceeded; the counting process built from those times
//! is what the NHPP machinery models.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Ordered real measurements indexed `t = 1..=T`, with optional opaque
/// calendar labels. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSeries {
    values: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl MeasurementSeries {
    /// Builds a series from raw values. Requires at least two finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid_input(format!(
                "series needs at least 2 observations, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid_input(format!(
                "non-finite value at row {} (t={})",
                i,
                i + 1
            )));
        }
        Ok(Self {
            values,
            labels: None,
        })
    }

    /// Attaches one label per observation. Labels are opaque; they never
    /// affect computation.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.values.len() {
            return Err(Error::invalid_input(format!(
                "{} labels for {} values",
                labels.len(),
                self.values.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Number of observations `T`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at time `t` (1-based).
    pub fn value_at(&self, t: usize) -> f64 {
        self.values[t - 1]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Arithmetic mean of the series, the default exceedance threshold.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Extracts the times `t` with `y_t > threshold` (strict; ties at the
    /// threshold are non-events).
    pub fn extract_exceedances(&self, threshold: f64) -> Result<ExceedanceData> {
        if !threshold.is_finite() {
            return Err(Error::invalid_input("threshold must be finite"));
        }
        let events: Vec<usize> = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > threshold)
            .map(|(i, _)| i + 1)
            .collect();
        ExceedanceData::new(threshold, self.len(), events)
    }
}

/// Event times of threshold exceedances over a horizon `T`.
///
/// `events` holds the strictly increasing times `d_1 < d_2 < ... < d_n`
/// in `[1, T]`; `count_at(t)` is the counting process `N_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceData {
    threshold: f64,
    horizon: usize,
    events: Vec<usize>,
}

impl ExceedanceData {
    pub fn new(threshold: f64, horizon: usize, events: Vec<usize>) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::invalid_input("horizon must be positive"));
        }
        for w in events.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::invalid_input("event times must be strictly increasing"));
            }
        }
        if let (Some(&first), Some(&last)) = (events.first(), events.last()) {
            if first < 1 || last > horizon {
                return Err(Error::invalid_input(format!(
                    "event times must lie in [1, {horizon}]"
                )));
            }
        }
        Ok(Self {
            threshold,
            horizon,
            events,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Event times `d_1..d_n`.
    pub fn events(&self) -> &[usize] {
        &self.events
    }

    /// Number of events `n`.
    pub fn n(&self) -> usize {
        self.events.len()
    }

    /// `N_t`: number of events at or before `t`.
    pub fn count_at(&self, t: usize) -> usize {
        self.events.partition_point(|&d| d <= t)
    }
}

/// Reads a two-column `date,value` CSV (header required, rows already in
/// chronological order). Missing or non-numeric values are rejected.
pub fn read_series_csv<R: Read>(reader: R) -> Result<MeasurementSeries> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    {
        let headers = rdr.headers()?;
        if headers.len() < 2 {
            return Err(Error::invalid_input(format!(
                "expected header `date,value`, got {} column(s)",
                headers.len()
            )));
        }
    }
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() < 2 {
            return Err(Error::invalid_input(format!("row {}: missing value column", i + 2)));
        }
        let raw = record[1].trim();
        if raw.is_empty() {
            return Err(Error::invalid_input(format!("row {}: empty value", i + 2)));
        }
        let value: f64 = raw
            .parse()
            .map_err(|_| Error::invalid_input(format!("row {}: unparseable value `{raw}`", i + 2)))?;
        labels.push(record[0].to_string());
        values.push(value);
    }
    MeasurementSeries::new(values)?.with_labels(labels)
}

/// Reads a series from a CSV file on disk.
pub fn read_series_csv_path(path: impl AsRef<Path>) -> Result<MeasurementSeries> {
    let file = std::fs::File::open(path)?;
    read_series_csv(file)
}

/// Writes a series in the standard `date,value` format. Unlabeled series get
/// the time index as the label.
pub fn write_series_csv<W: Write>(series: &MeasurementSeries, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["date", "value"])?;
    for (i, v) in series.values().iter().enumerate() {
        let label = match series.labels() {
            Some(labels) => labels[i].clone(),
            None => (i + 1).to_string(),
        };
        wtr.write_record([label, format!("{v}")])?;
    }
    wtr.flush()?;
    Ok(())
}
