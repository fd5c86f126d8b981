//! Index types shared by the simulator, the selectors and the evaluation code.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Exogenous candidate `x_{t-lag, series}`; both components are 1-based.
///
/// Ordering is lexicographic in `(series, lag)`, which is also the column order
/// of a [`LagDesign`](crate::projection::LagDesign).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExoIndex {
    pub series: usize,
    pub lag: usize,
}

impl ExoIndex {
    pub const fn new(series: usize, lag: usize) -> Self {
        Self { series, lag }
    }
}

impl fmt::Display for ExoIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x[{}](t-{})", self.series, self.lag)
    }
}

/// A regressor of the ARX design: an autoregressive lag or an exogenous lag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regressor {
    Ar(usize),
    Exo(ExoIndex),
}

impl fmt::Display for Regressor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regressor::Ar(i) => write!(f, "y(t-{i})"),
            Regressor::Exo(e) => e.fmt(f),
        }
    }
}
