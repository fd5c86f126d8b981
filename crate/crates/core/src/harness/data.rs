//! CSV ingestion with per-column transforms, and a synthetic housing-like panel.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tsdgp::Dataset;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("column `{0}` not found in the header")]
    MissingColumn(String),
    #[error("non-numeric cell at row {row}, column `{column}`: {value:?}")]
    NonNumericCell { row: usize, column: String, value: String },
    #[error("log of nonpositive cell at row {row}, column `{column}`: {value}")]
    NonPositiveLog { row: usize, column: String, value: f64 },
    #[error("column `{column}` has {valid} usable values after its transform, expected {expected}")]
    LengthMismatchAfterTransform { column: String, valid: usize, expected: usize },
    #[error("unknown transform `{0}` (expected none, diff, log, logdiff, seasonal_diff(s) or log_seasonal_diff(s))")]
    UnknownTransform(String),
    #[error("no observations left after transforms")]
    Empty,
}

/// Per-column transform. `SeasonalDiff` is `(1−B^s)(1−B)`, optionally applied to logs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Transform {
    #[default]
    None,
    Diff,
    Log,
    LogDiff,
    SeasonalDiff {
        period: usize,
        log: bool,
    },
}

impl Transform {
    /// Leading observations consumed.
    pub fn loss(&self) -> usize {
        match self {
            Transform::None | Transform::Log => 0,
            Transform::Diff | Transform::LogDiff => 1,
            Transform::SeasonalDiff { period, .. } => period + 1,
        }
    }

    fn takes_log(&self) -> bool {
        matches!(self, Transform::Log | Transform::LogDiff | Transform::SeasonalDiff { log: true, .. })
    }

    /// Applies the transform; the first `loss()` entries of the result are NaN.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let v: Vec<f64> = if self.takes_log() { values.iter().map(|x| x.ln()).collect() } else { values.to_vec() };
        let diff = |v: &[f64], lag: usize| -> Vec<f64> {
            (0..v.len()).map(|t| if t >= lag { v[t] - v[t - lag] } else { f64::NAN }).collect()
        };
        match self {
            Transform::None | Transform::Log => v,
            Transform::Diff | Transform::LogDiff => diff(&v, 1),
            Transform::SeasonalDiff { period, .. } => diff(&diff(&v, *period), 1),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::None => f.write_str("none"),
            Transform::Diff => f.write_str("diff"),
            Transform::Log => f.write_str("log"),
            Transform::LogDiff => f.write_str("logdiff"),
            Transform::SeasonalDiff { period, log: false } => write!(f, "seasonal_diff({period})"),
            Transform::SeasonalDiff { period, log: true } => {
                write!(f, "log_seasonal_diff({period})")
            }
        }
    }
}

impl FromStr for Transform {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        let seasonal = |rest: &str, log: bool| -> Result<Transform, DataError> {
            rest.strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|r| r.trim().parse::<usize>().ok())
                .filter(|&p| p >= 1)
                .map(|period| Transform::SeasonalDiff { period, log })
                .ok_or_else(|| DataError::UnknownTransform(s.to_string()))
        };
        match t.as_str() {
            "none" => Ok(Transform::None),
            "diff" => Ok(Transform::Diff),
            "log" => Ok(Transform::Log),
            "logdiff" => Ok(Transform::LogDiff),
            _ => {
                if let Some(rest) = t.strip_prefix("log_seasonal_diff") {
                    seasonal(rest, true)
                } else if let Some(rest) = t.strip_prefix("seasonal_diff") {
                    seasonal(rest, false)
                } else {
                    Err(DataError::UnknownTransform(s.to_string()))
                }
            }
        }
    }
}

impl TryFrom<String> for Transform {
    type Error = DataError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Transform> for String {
    fn from(t: Transform) -> Self {
        t.to_string()
    }
}

/// Which columns of a CSV file form the regression, and how each is transformed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvDataset {
    pub path: PathBuf,
    #[serde(default)]
    pub date: Option<String>,
    pub y: String,
    #[serde(default)]
    pub y_transform: Transform,
    /// Exogenous columns; every column other than `date` and `y` when empty.
    #[serde(default)]
    pub exogenous: Vec<String>,
    /// Transform for exogenous columns without an entry in `transforms`.
    #[serde(default)]
    pub default_transform: Transform,
    #[serde(default)]
    pub transforms: std::collections::BTreeMap<String, Transform>,
    /// Candidate lag depth `r` of every exogenous series.
    pub max_lag: usize,
}

impl CsvDataset {
    pub fn with_base_dir(mut self, dir: &Path) -> Self {
        if self.path.is_relative() {
            self.path = dir.join(&self.path);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedData {
    pub dataset: Dataset<f64>,
    pub exogenous: Vec<String>,
    /// Date labels of the retained rows (empty without a date column).
    pub dates: Vec<String>,
    /// Leading rows removed by the transforms.
    pub trimmed: usize,
}

fn is_missing(cell: &str) -> bool {
    matches!(cell.trim(), "" | "NA" | "NaN" | "nan" | ".")
}

/// Reads `spec.path` and returns the transformed, aligned series.
pub fn load_csv(spec: &CsvDataset) -> Result<LoadedData, DataError> {
    let text =
        std::fs::read_to_string(&spec.path).map_err(|source| DataError::Io { path: spec.path.clone(), source })?;
    parse_csv(&text, spec)
}

/// [`load_csv`] on in-memory CSV text (the `path` field is ignored).
pub fn parse_csv(text: &str, spec: &CsvDataset) -> Result<LoadedData, DataError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let index = |name: &str| header.iter().position(|h| h == name).ok_or_else(|| DataError::MissingColumn(name.into()));

    let date_col = spec.date.as_deref().map(index).transpose()?;
    let y_col = index(&spec.y)?;
    let exo_names: Vec<String> = if spec.exogenous.is_empty() {
        header.iter().enumerate().filter(|&(i, _)| i != y_col && Some(i) != date_col).map(|(_, h)| h.clone()).collect()
    } else {
        spec.exogenous.clone()
    };
    let exo_cols = exo_names.iter().map(|n| index(n)).collect::<Result<Vec<_>, _>>()?;

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); 1 + exo_cols.len()];
    let mut dates = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if let Some(d) = date_col {
            dates.push(record.get(d).unwrap_or("").to_string());
        }
        for (slot, &col) in std::iter::once(&y_col).chain(&exo_cols).enumerate() {
            let cell = record.get(col).unwrap_or("");
            let value = if is_missing(cell) {
                f64::NAN
            } else {
                cell.trim().parse::<f64>().map_err(|_| DataError::NonNumericCell {
                    row: row + 1,
                    column: header[col].clone(),
                    value: cell.to_string(),
                })?
            };
            columns[slot].push(value);
        }
    }

    let transforms: Vec<Transform> = std::iter::once(spec.y_transform)
        .chain(exo_names.iter().map(|n| spec.transforms.get(n).copied().unwrap_or(spec.default_transform)))
        .collect();
    let names: Vec<&str> = std::iter::once(spec.y.as_str()).chain(exo_names.iter().map(String::as_str)).collect();

    let mut transformed = Vec::with_capacity(columns.len());
    for ((raw, tr), name) in columns.iter().zip(&transforms).zip(&names) {
        if tr.takes_log() {
            if let Some((row, &value)) = raw.iter().enumerate().find(|(_, v)| **v <= 0.0) {
                return Err(DataError::NonPositiveLog { row: row + 1, column: name.to_string(), value });
            }
        }
        transformed.push(tr.apply(raw));
    }

    // Drop the longest leading run of missing values across columns.
    let n_raw = columns[0].len();
    let lead = transformed.iter().map(|c| c.iter().take_while(|v| v.is_nan()).count()).max().unwrap_or(0);
    if lead >= n_raw {
        return Err(DataError::Empty);
    }
    let expected = n_raw - lead;
    for (col, name) in transformed.iter().zip(&names) {
        let valid = col[lead..].iter().filter(|v| v.is_finite()).count();
        if valid != expected {
            return Err(DataError::LengthMismatchAfterTransform { column: name.to_string(), valid, expected });
        }
    }
    let mut series = transformed.into_iter().map(|c| c[lead..].to_vec());
    let y = series.next().unwrap_or_default();
    let x: Vec<Vec<f64>> = series.collect();
    Ok(LoadedData {
        dataset: Dataset::observed(y, x, spec.max_lag),
        exogenous: exo_names,
        dates: if dates.is_empty() { dates } else { dates[lead..].to_vec() },
        trimmed: lead,
    })
}

/// Monthly panel shaped like the housing application: a log "starts" series
/// with a unit root and a period-12 complex unit-root pair, `p` positive
/// seasonal "permit" series whose `(1−B^{12})(1−B)` log transforms drive it,
/// and one rate series entering in first differences.
///
/// Returns CSV text with columns `date, starts, permit01.., rate` and
/// `n + 13` rows, so the paired directives leave `n` observations.
pub fn housing_like_csv(n: usize, p: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = move || -> f64 { StandardNormal.sample(&mut rng) };
    let total = n + 13;
    let seasonal = |t: usize| 0.3 * (2.0 * std::f64::consts::PI * t as f64 / 12.0).sin();

    // Log permits: seasonal level plus a random walk whose increments are AR(1)
    // with a shared factor; the regression sees their (1−B^{12})(1−B) transform.
    let mut factor = 0.0;
    let mut incr = vec![0.0; p];
    let mut log_permits = vec![vec![0.0; total]; p];
    let mut rate = vec![0.0; total];
    let mut rate_incr = 0.0;
    for t in 0..total {
        factor = 0.6 * factor + z();
        for (j, (lx, inc)) in log_permits.iter_mut().zip(incr.iter_mut()).enumerate() {
            *inc = 0.4 * *inc + 0.05 * (z() + 0.5 * factor);
            let level = if t > 0 { lx[t - 1] - seasonal(t - 1) } else { 7.0 + 0.1 * j as f64 };
            lx[t] = level + *inc + seasonal(t);
        }
        rate_incr = 0.3 * rate_incr + 0.1 * z();
        rate[t] = if t == 0 { 5.0 } else { rate[t - 1] + rate_incr };
    }
    let driver = Transform::SeasonalDiff { period: 12, log: false };
    let tilde: Vec<Vec<f64>> = log_permits.iter().map(|lx| driver.apply(lx)).collect();

    // (1−B)(1−√3B+B²) h_t = exogenous signal + ε_t.
    let s3 = 3f64.sqrt();
    let ar = [1.0 + s3, -(1.0 + s3), 1.0];
    let second = 2.min(p.saturating_sub(1));
    let mut h = vec![0.0; total];
    for t in 0..total {
        if t < 15 {
            h[t] = 7.0 + 0.2 * seasonal(t);
            continue;
        }
        let mut v: f64 = ar.iter().enumerate().map(|(i, a)| a * h[t - 1 - i]).sum();
        if p > 0 {
            v += 0.8 * tilde[0][t - 1] - 0.6 * tilde[second][t - 2];
        }
        v += -0.3 * (rate[t - 1] - rate[t - 2]) + 0.03 * z();
        h[t] = v;
    }
    let permits: Vec<Vec<f64>> = log_permits.iter().map(|lx| lx.iter().map(|v| v.exp()).collect()).collect();

    let mut out = String::from("date,starts");
    for j in 0..p {
        out.push_str(&format!(",permit{:02}", j + 1));
    }
    out.push_str(",rate\n");
    for t in 0..total {
        let (year, month) = (1990 + t / 12, t % 12 + 1);
        out.push_str(&format!("{year}-{month:02}-01,{:.6}", h[t]));
        for series in &permits {
            out.push_str(&format!(",{:.6}", series[t]));
        }
        out.push_str(&format!(",{:.6}\n", rate[t]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(y_transform: Transform) -> CsvDataset {
        CsvDataset {
            path: PathBuf::new(),
            date: None,
            y: "y".into(),
            y_transform,
            exogenous: vec![],
            default_transform: Transform::None,
            transforms: Default::default(),
            max_lag: 1,
        }
    }

    #[test]
    fn diff_drops_first_row() {
        let loaded = parse_csv("y\n1\n2\n4\n", &spec(Transform::Diff)).unwrap();
        assert_eq!(loaded.dataset.y, vec![1.0, 2.0]);
        assert_eq!(loaded.trimmed, 1);
    }

    #[test]
    fn log_of_nonpositive_names_the_cell() {
        let err = parse_csv("y,x\n1,2\n0,3\n", &spec(Transform::Log)).unwrap_err();
        match err {
            DataError::NonPositiveLog { row, column, .. } => {
                assert_eq!((row, column.as_str()), (2, "y"))
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn seasonal_then_regular_difference_length() {
        let values: String = (0..400).map(|t| format!("{}\n", 1.0 + t as f64)).collect();
        let loaded = parse_csv(&format!("y\n{values}"), &spec("seasonal_diff(12)".parse().unwrap())).unwrap();
        assert_eq!(loaded.dataset.n(), 387);
    }

    #[test]
    fn errors_name_row_and_column() {
        let err = parse_csv("y,x\n1,2\n2,abc\n", &spec(Transform::None)).unwrap_err();
        assert!(matches!(err, DataError::NonNumericCell { row: 2, ref column, .. } if column == "x"));
        let mut s = spec(Transform::None);
        s.exogenous = vec!["z".into()];
        assert!(matches!(parse_csv("y,x\n1,2\n", &s), Err(DataError::MissingColumn(c)) if c == "z"));
        let err = parse_csv("y,x\n1,2\n2,\n3,4\n", &spec(Transform::None)).unwrap_err();
        assert!(matches!(err, DataError::LengthMismatchAfterTransform { valid: 2, expected: 3, .. }));
    }

    #[test]
    fn transform_round_trip() {
        for s in ["none", "diff", "log", "logdiff", "seasonal_diff(12)", "log_seasonal_diff(4)"] {
            assert_eq!(s.parse::<Transform>().unwrap().to_string(), s);
        }
        assert!("seasonal_diff(0)".parse::<Transform>().is_err());
        assert!("cube".parse::<Transform>().is_err());
    }

    #[test]
    fn housing_like_shape() {
        let text = housing_like_csv(50, 4, 3);
        let mut s = spec(Transform::None);
        s.y = "starts".into();
        s.date = Some("date".into());
        s.default_transform = "log_seasonal_diff(12)".parse().unwrap();
        s.transforms.insert("rate".into(), Transform::Diff);
        let loaded = parse_csv(&text, &s).unwrap();
        assert_eq!(loaded.dataset.n(), 50);
        assert_eq!(loaded.dataset.p(), 5);
        assert_eq!(loaded.dates.len(), 50);
        assert_eq!(text, housing_like_csv(50, 4, 3));
    }
}
