//! Run reports: `{"residuals": {...}, "t_index": k, "timings_ms": {...}}`.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_index: Option<usize>,
    /// Only filled when timings were requested, so that reports stay
    /// byte-identical across runs by default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn residual(&mut self, name: impl Into<String>, value: f64) {
        self.residuals.insert(name.into(), value);
    }

    pub fn extend<'a>(&mut self, map: impl IntoIterator<Item = (&'a &'static str, &'a f64)>) {
        for (k, v) in map {
            self.residuals.insert((*k).to_string(), *v);
        }
    }
}

/// Named wall-clock phases.
#[derive(Debug)]
pub struct Stopwatch {
    enabled: bool,
    phases: BTreeMap<String, f64>,
}

impl Stopwatch {
    pub fn new(enabled: bool) -> Self {
        Self { enabled, phases: BTreeMap::new() }
    }

    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            *self.phases.entry(name.to_string()).or_insert(0.0) += start.elapsed().as_secs_f64() * 1e3;
        }
        out
    }

    pub fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.enabled.then_some(self.phases)
    }
}
