//! Ergodic-rate estimation and SE-vs-EE sweeps.
//!
//! One channel realization per trial serves every scheme and bit width, and
//! a trial whose channel cannot be processed is dropped for all of them.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{draw_trial, ChannelParams, Pathloss};
use crate::combining::{ac_from_svd, DcDesign, HcDesign, LinkConfig};
use crate::error::{Error, Result};
use crate::linalg::ThinSvd;
use crate::power::{total_power, Architecture, ComponentPowerModel};
use crate::quantization::{QuantizerModel, MAX_BITS};
use crate::rng::GENERATOR;
use crate::tradeoff::{energy_efficiency, utility_frontier, TradeoffPoint, UtilityConfig};

pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_SEED: u64 = 20_180_601;

fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

/// A complete sweep description. `link.noise_power` is replaced by the
/// calibrated value whenever `snr_target_db` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub channel: ChannelParams,
    pub link: LinkConfig,
    #[serde(default)]
    pub snr_target_db: Option<f64>,
    pub schemes: Vec<Architecture>,
    /// Inclusive range of ADC resolutions.
    pub bit_range: (u32, u32),
    pub power_model: ComponentPowerModel,
    #[serde(default = "default_trials")]
    pub trials: u64,
}

const SCENARIO_FILE_HEADER: &str = "\
# Sweep scenario.
# Units: link.tx_power and link.noise_power in W, link.bandwidth_hz in Hz,
# snr_target_db in dB, angle_spread_deg in degrees, power_model p_* in W,
# power_model.adc.walden_c in J/step.
";

pub const PRESET_NAMES: [&str; 4] = ["downlink", "uplink", "downlink-lpadc", "downlink-low-snr"];

impl Scenario {
    fn base(name: &str, n_tx: usize, n_rx: usize) -> Self {
        let mut channel = ChannelParams::multipath(n_tx, n_rx);
        channel.seed = DEFAULT_SEED;
        Self {
            name: name.to_string(),
            channel,
            link: LinkConfig {
                tx_power: 1.0,
                noise_power: 1.0,
                bandwidth_hz: 1e9,
            },
            snr_target_db: Some(0.0),
            schemes: vec![Architecture::Analog, Architecture::Hybrid(4), Architecture::Digital],
            bit_range: (1, 8),
            power_model: ComponentPowerModel::HPADC,
            trials: DEFAULT_TRIALS,
        }
    }

    /// `N_t = 64`, `N_r = 16`, `N_RF = 4`, 1 GHz, 30 dBm, HPADC, 0 dB.
    pub fn downlink() -> Self {
        Self::base("downlink", 64, 16)
    }

    /// `N_t = 16`, `N_r = 64`, `N_RF = 4`, 1 GHz, 30 dBm, HPADC, 0 dB.
    pub fn uplink() -> Self {
        Self::base("uplink", 16, 64)
    }

    pub fn preset(name: &str) -> Option<Self> {
        let s = match name {
            "downlink" => Self::downlink(),
            "uplink" => Self::uplink(),
            "downlink-lpadc" => Self {
                name: name.to_string(),
                power_model: ComponentPowerModel::LPADC,
                ..Self::downlink()
            },
            "downlink-low-snr" => Self {
                name: name.to_string(),
                snr_target_db: Some(-20.0),
                ..Self::downlink()
            },
            _ => return None,
        };
        Some(s)
    }

    pub fn presets() -> Vec<Self> {
        PRESET_NAMES.iter().filter_map(|n| Self::preset(n)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::invalid("name", "must not be empty"));
        }
        self.channel.validate()?;
        self.power_model.validate()?;
        if let Some(db) = self.snr_target_db {
            if !db.is_finite() {
                return Err(Error::invalid("snr_target_db", "must be finite"));
            }
        }
        if !(self.link.tx_power > 0.0 && self.link.tx_power.is_finite()) {
            return Err(Error::invalid("link.tx_power", "must be finite and > 0"));
        }
        if !(self.link.bandwidth_hz > 0.0 && self.link.bandwidth_hz.is_finite()) {
            return Err(Error::invalid("link.bandwidth_hz", "must be finite and > 0"));
        }
        if self.snr_target_db.is_none() {
            self.link.validate()?;
        }
        if self.schemes.is_empty() {
            return Err(Error::invalid("schemes", "must not be empty"));
        }
        for s in &self.schemes {
            s.validate(self.channel.n_rx)
                .map_err(|_| Error::invalid("schemes", format!("{s}: N_RF must be in 1..={}", self.channel.n_rx)))?;
        }
        let (lo, hi) = self.bit_range;
        if lo == 0 || hi > MAX_BITS || lo > hi {
            return Err(Error::invalid("bit_range", format!("must satisfy 1 <= min <= max <= {MAX_BITS}")));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be >= 1"));
        }
        Ok(())
    }

    /// Channel and link actually simulated. With an SNR target the pathloss is
    /// folded into the noise power (`rho = 1`).
    pub fn resolved(&self) -> Result<(ChannelParams, LinkConfig)> {
        self.validate()?;
        let mut channel = self.channel.clone();
        let mut link = self.link;
        if let Some(db) = self.snr_target_db {
            channel.pathloss_db = Pathloss::Db(0.0);
            link.noise_power = calibrate_noise(&channel, &link, db)?;
        }
        link.validate()?;
        Ok((channel, link))
    }

    pub fn bits(&self) -> impl Iterator<Item = u32> {
        self.bit_range.0..=self.bit_range.1
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let sc: Self = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let sc: Self = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }

    pub fn to_toml_string(&self) -> String {
        let body = toml::to_string(self).expect("scenario serializes to TOML");
        format!("{SCENARIO_FILE_HEADER}\n{body}")
    }
}

/// Noise power giving a per-element SNR of `snr_target_db`:
/// `N_o = P / (rho gamma)`, using `E[||H||_F^2] = N_t N_r / rho`.
pub fn calibrate_noise(params: &ChannelParams, link: &LinkConfig, snr_target_db: f64) -> Result<f64> {
    if !snr_target_db.is_finite() {
        return Err(Error::invalid("snr_target_db", "must be finite"));
    }
    let rho = params.nominal_pathloss_linear()?;
    let gamma = 10f64.powf(snr_target_db / 10.0);
    Ok(link.tx_power / (rho * gamma))
}

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    /// bits/s/Hz.
    pub mean_se: f64,
    pub std_error: f64,
    pub valid_trials: u64,
}

fn estimate(samples: impl Iterator<Item = f64> + Clone) -> Option<(f64, f64, u64)> {
    let n = samples.clone().count() as u64;
    if n == 0 {
        return None;
    }
    let mean = samples.clone().sum::<f64>() / n as f64;
    let se = if n > 1 {
        let var = samples.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    Some((mean, se, n))
}

/// Rates in bits/s of every `(architecture, bits)` pair for one trial.
fn trial_rates(
    channel: &ChannelParams,
    link: &LinkConfig,
    archs: &[Architecture],
    bits: &[u32],
    trial: u64,
) -> Result<Vec<f64>> {
    let h = draw_trial(channel, trial)?;
    let svd = ThinSvd::new(&h.h, "channel SVD")?;
    let quantizers = bits.iter().map(|&b| QuantizerModel::new(b)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(archs.len() * bits.len());
    for &arch in archs {
        match arch {
            Architecture::Analog => {
                let d = ac_from_svd(&h.h, &svd)?;
                out.extend(quantizers.iter().map(|q| crate::combining::ac_rate(&d, link, q)));
            }
            Architecture::Digital => {
                let d = DcDesign::from_svd(svd.clone(), link)?;
                for q in &quantizers {
                    out.push(d.quantized_rate(link, q)?);
                }
            }
            Architecture::Hybrid(n_rf) => {
                let d = HcDesign::from_svd(&h.h, &svd, n_rf, link)?;
                for q in &quantizers {
                    out.push(d.quantized_rate(link, q)?);
                }
            }
        }
    }
    if let Some(bad) = out.iter().find(|r| !r.is_finite()) {
        return Err(Error::numeric("rate", format!("non-finite rate {bad}")));
    }
    Ok(out)
}

/// All trials of `scenario` for the given combinations; failed trials carry their error.
fn run_trials(
    channel: &ChannelParams,
    link: &LinkConfig,
    archs: &[Architecture],
    bits: &[u32],
    trials: u64,
) -> Vec<Result<Vec<f64>>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            trial_rates(channel, link, archs, bits, t).map_err(|e| Error::Trial {
                trial: t,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Ergodic SE of one architecture at one resolution over the scenario's trials.
pub fn ergodic_rate(scenario: &Scenario, arch: Architecture, bits: u32) -> Result<RateEstimate> {
    let (channel, link) = scenario.resolved()?;
    arch.validate(channel.n_rx)?;
    let results = run_trials(&channel, &link, &[arch], &[bits], scenario.trials);
    let mut ok = Vec::with_capacity(results.len());
    for r in results {
        ok.push(r?[0] / link.bandwidth_hz);
    }
    let (mean_se, std_error, valid_trials) = estimate(ok.iter().copied()).expect("trials >= 1");
    Ok(RateEstimate {
        mean_se,
        std_error,
        valid_trials,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    /// `"trial 17"` or a scheme/bits label.
    pub context: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub seed: u64,
    pub trials: u64,
    pub valid_trials: u64,
    pub generator: String,
    pub noise_power: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scenario: String,
    pub points: Vec<TradeoffPoint>,
    pub pareto_indices: Vec<usize>,
    /// `(alpha, point index)`.
    pub utility_selections: Vec<(f64, usize)>,
    pub failures: Vec<Failure>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn point(&self, arch: Architecture, bits: u32) -> Option<&TradeoffPoint> {
        self.points.iter().find(|p| p.architecture() == arch && p.bits == bits)
    }

    /// The point of `arch` with the highest EE.
    pub fn max_ee(&self, arch: Architecture) -> Option<&TradeoffPoint> {
        self.points
            .iter()
            .filter(|p| p.architecture() == arch)
            .max_by(|a, b| a.ee.total_cmp(&b.ee))
    }
}

/// Sweep with the default utility weights restricted to the scenario's bit range.
pub fn run_sweep(scenario: &Scenario) -> Result<SweepResult> {
    let cfg = UtilityConfig {
        bit_range: scenario.bit_range,
        ..UtilityConfig::default()
    };
    run_sweep_with(scenario, &cfg)
}

pub fn run_sweep_with(scenario: &Scenario, cfg: &UtilityConfig) -> Result<SweepResult> {
    let started = Instant::now();
    let (channel, link) = scenario.resolved()?;
    cfg.validate()?;
    let bits: Vec<u32> = scenario.bits().collect();
    let results = run_trials(&channel, &link, &scenario.schemes, &bits, scenario.trials);

    let mut failures = Vec::new();
    let mut valid = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(rates) => valid.push(rates),
            Err(Error::Trial { trial, source }) => failures.push(Failure {
                context: format!("trial {trial}"),
                message: source.to_string(),
            }),
            Err(e) => failures.push(Failure {
                context: "trial".into(),
                message: e.to_string(),
            }),
        }
    }

    let mut points = Vec::with_capacity(scenario.schemes.len() * bits.len());
    for (si, &arch) in scenario.schemes.iter().enumerate() {
        for (bi, &b) in bits.iter().enumerate() {
            let col = si * bits.len() + bi;
            let label = format!("{arch} b={b}");
            let Some((se, se_err, _)) = estimate(valid.iter().map(|r| r[col] / link.bandwidth_hz)) else {
                failures.push(Failure {
                    context: label,
                    message: "no valid trials".into(),
                });
                continue;
            };
            let point = total_power(arch, &scenario.power_model, channel.n_rx, link.bandwidth_hz, b)
                .and_then(|p| Ok((p.total, energy_efficiency(se, p.total, link.bandwidth_hz)?)));
            match point {
                Ok((p_tot, ee)) => points.push(TradeoffPoint {
                    scheme: arch.into(),
                    bits: b,
                    n_rf: arch.rf_chains(channel.n_rx),
                    se,
                    se_std_error: se_err,
                    ee,
                    p_tot,
                    selected_alphas: Vec::new(),
                }),
                Err(e) => failures.push(Failure {
                    context: label,
                    message: e.to_string(),
                }),
            }
        }
    }

    let (pareto_indices, utility_selections) = if points.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let f = utility_frontier(&mut points, cfg)?;
        (f.pareto, f.selections)
    };

    Ok(SweepResult {
        scenario: scenario.name.clone(),
        points,
        pareto_indices,
        utility_selections,
        failures,
        metadata: SweepMetadata {
            seed: channel.seed,
            trials: scenario.trials,
            valid_trials: valid.len() as u64,
            generator: GENERATOR.to_string(),
            noise_power: link.noise_power,
            wall_time_s: started.elapsed().as_secs_f64(),
        },
    })
}
