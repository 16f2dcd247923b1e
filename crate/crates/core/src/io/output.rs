//! CSV time series with JSON sidecars.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::IntegratorSettings;
use crate::observables::{Channel, Estimator, TimeSeries};
use crate::params::{Backend, ReferenceRate, Scenario};

use super::scenario_file::ScenarioFile;

pub const CSV_COLUMNS: [&str; 10] = [
    "t", "re_a", "im_a", "re_b", "im_b", "q", "p", "A", "B", "residual",
];

pub const SIDECAR_VERSION: u32 = 1;

/// What a CSV file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    Deterministic,
    EnsembleMean,
    EnsembleStderr,
}

/// Metadata written next to every CSV file. `run` accepts a sidecar in
/// place of a scenario file and reproduces the CSV byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub version: u32,
    pub name: String,
    pub kind: SeriesKind,
    pub backend: Backend,
    pub estimator: String,
    pub time_axis: String,
    pub integrator: IntegratorSettings,
    pub seed: u64,
    pub n_traj: Option<usize>,
    pub steps: usize,
    pub rejected_steps: usize,
    pub scenario: ScenarioFile,
}

impl Sidecar {
    pub fn new(name: &str, kind: SeriesKind, series: &TimeSeries, scenario: &Scenario) -> Self {
        Sidecar {
            version: SIDECAR_VERSION,
            name: name.to_string(),
            kind,
            backend: series.backend,
            estimator: series.estimator.label().to_string(),
            time_axis: scenario.params.reference_rate.time_label().to_string(),
            integrator: scenario.integrator,
            seed: scenario.seed,
            n_traj: (series.backend == Backend::Ensemble).then_some(scenario.n_traj),
            steps: series.steps,
            rejected_steps: series.rejected,
            scenario: ScenarioFile::from_scenario(scenario),
        }
    }

    pub fn reference_rate(&self) -> ReferenceRate {
        self.scenario.reference_rate_label.unwrap_or_default()
    }
}

/// Path of the sidecar belonging to a CSV file.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.11e}")
    }
}

/// CSV text: header plus one row per sample, 12 significant digits, LF endings.
pub fn csv_bytes(series: &TimeSeries) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let wrap = |e: csv::Error| Error::Parse {
        context: "csv".into(),
        message: e.to_string(),
    };
    w.write_record(CSV_COLUMNS).map_err(wrap)?;
    let channels: Vec<&[f64]> = Channel::ALL.iter().map(|&c| series.channel(c)).collect();
    for k in 0..series.len() {
        let mut row = Vec::with_capacity(CSV_COLUMNS.len());
        row.push(format_value(series.t[k]));
        row.extend(channels.iter().map(|c| format_value(c[k])));
        w.write_record(&row).map_err(wrap)?;
    }
    w.into_inner().map_err(|e| Error::Parse {
        context: "csv".into(),
        message: e.to_string(),
    })
}

/// Writes `path` (CSV) and its sidecar atomically.
pub fn write_csv(series: &TimeSeries, sidecar: &Sidecar, path: &Path) -> Result<()> {
    write_atomic(path, &csv_bytes(series)?)?;
    let json = serde_json::to_string_pretty(sidecar).map_err(|e| Error::Parse {
        context: "sidecar".into(),
        message: e.to_string(),
    })? + "\n";
    write_atomic(&sidecar_path(path), json.as_bytes())
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        context: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Reads a CSV written by [`write_csv`]. Backend and estimator come from the
/// sidecar when it exists.
pub fn read_csv(path: &Path) -> Result<TimeSeries> {
    let parse_err = |message: String| Error::Parse {
        context: path.display().to_string(),
        message,
    };
    let mut r = csv::Reader::from_path(path).map_err(|e| parse_err(e.to_string()))?;
    let header = r.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(parse_err(format!("unexpected header {:?}", header)));
    }
    let (backend, estimator) = match read_sidecar(&sidecar_path(path)) {
        Ok(sc) => (
            sc.backend,
            match sc.backend {
                Backend::MeanField => Estimator::MeanFieldIntensity,
                Backend::Moments => Estimator::SecondMoment,
                Backend::Ensemble => Estimator::EnsembleIntensity,
            },
        ),
        Err(_) => (Backend::MeanField, Estimator::MeanFieldIntensity),
    };
    let mut s = TimeSeries::with_capacity(0, backend, estimator);
    for rec in r.records() {
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|e| parse_err(format!("{f:?}: {e}"))))
            .collect::<Result<_>>()?;
        s.t.push(vals[0]);
        for (c, v) in Channel::ALL.iter().zip(&vals[1..]) {
            s.channel_mut(*c).push(*v);
        }
        s.pair_re.push(f64::NAN);
    }
    Ok(s)
}
