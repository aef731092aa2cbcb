//! Chart documents: the serialized form of a sweep.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{Failure, Scenario, SweepResult};
use crate::tradeoff::{select, TradeoffPoint, UtilityConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Seed, trial counts and generator of the run. Wall time is left out so that
/// documents are reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartMetadata {
    pub seed: u64,
    pub trials: u64,
    pub valid_trials: u64,
    pub generator: String,
    /// Calibrated noise power, W.
    pub noise_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartDocument {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub points: Vec<TradeoffPoint>,
    pub pareto_indices: Vec<usize>,
    /// Keys are alphas formatted with four decimals.
    pub utility_selections: BTreeMap<String, usize>,
    /// Constant total-power reference levels, W.
    pub power_grid: Vec<f64>,
    pub failures: Vec<Failure>,
    pub metadata: ChartMetadata,
}

pub fn alpha_key(alpha: f64) -> String {
    format!("{alpha:.4}")
}

/// 1-2-5 levels per decade covering `[min, max]` of the points' total power.
pub fn power_grid(points: &[TradeoffPoint]) -> Vec<f64> {
    let powers = points.iter().map(|p| p.p_tot).filter(|p| p.is_finite() && *p > 0.0);
    let (lo, hi) = powers.fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p), hi.max(p)));
    if !(lo.is_finite() && hi > 0.0) {
        return Vec::new();
    }
    let mut levels = Vec::new();
    let mut exp = lo.log10().floor() as i32;
    while levels.last().is_none_or(|&l| l < hi) {
        for m in [1.0, 2.0, 5.0] {
            let level: f64 = format!("{m}e{exp}").parse().expect("formatted float parses");
            levels.push(level);
        }
        exp += 1;
    }
    let first = levels.iter().rposition(|&l| l <= lo).unwrap_or(0);
    let last = levels.iter().position(|&l| l >= hi).unwrap_or(levels.len() - 1);
    levels[first..=last].to_vec()
}

impl ChartDocument {
    pub fn from_sweep(scenario: &Scenario, sweep: &SweepResult) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.clone(),
            points: sweep.points.clone(),
            pareto_indices: sweep.pareto_indices.clone(),
            utility_selections: sweep
                .utility_selections
                .iter()
                .map(|&(a, i)| (alpha_key(a), i))
                .collect(),
            power_grid: power_grid(&sweep.points),
            failures: sweep.failures.clone(),
            metadata: ChartMetadata {
                seed: sweep.metadata.seed,
                trials: sweep.metadata.trials,
                valid_trials: sweep.metadata.valid_trials,
                generator: sweep.metadata.generator.clone(),
                noise_power: sweep.metadata.noise_power,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let n = self.points.len();
        if let Some(i) = self.pareto_indices.iter().chain(self.utility_selections.values()).find(|&&i| i >= n) {
            return Err(Error::invalid("points", format!("index {i} out of range for {n} points")));
        }
        Ok(())
    }

    /// Sorted-key JSON with a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("chart serializes to JSON");
        let mut s = serde_json::to_string_pretty(&value).expect("JSON value serializes");
        s.push('\n');
        s
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }

    /// Columns: `index, scheme, n_rf, bits, se, se_std_error, ee, p_tot, pareto, selected_alphas`
    /// (SE in bits/s/Hz, EE in bits/J, power in W, alphas separated by `;`).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::numeric("csv", e.to_string());
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        for (i, p) in self.points.iter().enumerate() {
            let alphas: Vec<String> = p.selected_alphas.iter().map(|&a| alpha_key(a)).collect();
            w.write_record([
                i.to_string(),
                format!("{:?}", p.scheme),
                p.n_rf.to_string(),
                p.bits.to_string(),
                p.se.to_string(),
                p.se_std_error.to_string(),
                p.ee.to_string(),
                p.p_tot.to_string(),
                self.pareto_indices.contains(&i).to_string(),
                alphas.join(";"),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::numeric("csv", e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    /// Utility weights matching the sweep: the default grid over the scenario's bits.
    pub fn utility_config(&self) -> UtilityConfig {
        UtilityConfig {
            bit_range: self.scenario.bit_range,
            ..UtilityConfig::default()
        }
    }

    /// Index of the point maximizing the utility at `alpha`.
    pub fn select(&self, alpha: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid("alpha", format!("{alpha} is outside [0, 1]")));
        }
        select(&self.points, alpha, &self.utility_config())
            .ok_or_else(|| Error::Domain("chart has no eligible points".into()))
    }
}

pub const CSV_COLUMNS: [&str; 10] = [
    "index",
    "scheme",
    "n_rf",
    "bits",
    "se",
    "se_std_error",
    "ee",
    "p_tot",
    "pareto",
    "selected_alphas",
];
