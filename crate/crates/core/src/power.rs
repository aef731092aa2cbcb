//! Receiver power consumption per combining architecture.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantization::{adc_power, AdcModel, MAX_BITS};

/// ADCs per RF chain: one each for the in-phase and quadrature branches.
pub const ADCS_PER_CHAIN: usize = 2;

/// Receiver architecture. Serialized as `"AC"`, `"DC"` or `{ "HC" = n_rf }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Architecture {
    #[serde(rename = "AC")]
    Analog,
    #[serde(rename = "DC")]
    Digital,
    #[serde(rename = "HC")]
    Hybrid(usize),
}

impl Architecture {
    /// Number of RF chains (and ADC pairs) in a receiver with `n_rx` antennas.
    pub fn rf_chains(&self, n_rx: usize) -> usize {
        match *self {
            Architecture::Analog => 1,
            Architecture::Digital => n_rx,
            Architecture::Hybrid(n_rf) => n_rf,
        }
    }

    pub fn validate(&self, n_rx: usize) -> Result<()> {
        if let Architecture::Hybrid(n_rf) = *self {
            if n_rf == 0 || n_rf > n_rx {
                return Err(Error::invalid("n_rf", format!("hybrid RF chains must be in 1..={n_rx}")));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Architecture::Analog => write!(f, "AC"),
            Architecture::Digital => write!(f, "DC"),
            Architecture::Hybrid(n) => write!(f, "HC(N_RF={n})"),
        }
    }
}

/// Power draw of every receiver device, in Watts (ADC via its figure of merit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentPowerModel {
    pub p_lna: f64,
    pub p_splitter: f64,
    pub p_combiner: f64,
    pub p_ps: f64,
    pub p_mixer: f64,
    pub p_lo: f64,
    pub p_lpf: f64,
    pub p_bb_amp: f64,
    pub adc: AdcModel,
}

impl ComponentPowerModel {
    /// Current devices: 494 fJ/step ADC, 2 mW phase shifters.
    pub const HPADC: ComponentPowerModel = ComponentPowerModel {
        p_lna: 39e-3,
        p_splitter: 19.5e-3,
        p_combiner: 19.5e-3,
        p_ps: 2e-3,
        p_mixer: 16.8e-3,
        p_lo: 5e-3,
        p_lpf: 14e-3,
        p_bb_amp: 5e-3,
        adc: AdcModel::HPADC,
    };

    /// Projected devices: 5 fJ/step ADC, lossless phase shifters.
    pub const LPADC: ComponentPowerModel = ComponentPowerModel {
        p_ps: 0.0,
        adc: AdcModel::LPADC,
        ..Self::HPADC
    };

    /// HPADC analog front end with the intermediate 65 fJ/step ADC.
    pub const IPADC: ComponentPowerModel = ComponentPowerModel {
        adc: AdcModel::IPADC,
        ..Self::HPADC
    };

    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "hpadc" => Some(Self::HPADC),
            "ipadc" => Some(Self::IPADC),
            "lpadc" => Some(Self::LPADC),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.devices() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("power_model.{name}"), "must be finite and >= 0"));
            }
        }
        self.adc.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Error::invalid(format!("power_model.{name}"), reason),
            other => other,
        })
    }

    fn devices(&self) -> [(&'static str, f64); 8] {
        [
            ("p_lna", self.p_lna),
            ("p_splitter", self.p_splitter),
            ("p_combiner", self.p_combiner),
            ("p_ps", self.p_ps),
            ("p_mixer", self.p_mixer),
            ("p_lo", self.p_lo),
            ("p_lpf", self.p_lpf),
            ("p_bb_amp", self.p_bb_amp),
        ]
    }

    /// Parse the key-value file format written by [`to_config_string`](Self::to_config_string).
    pub fn from_config_str(s: &str) -> Result<Self> {
        let model: Self = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_config_string(&self) -> String {
        let body = toml::to_string(self).expect("power model serializes");
        format!("{POWER_FILE_HEADER}{body}")
    }
}

const POWER_FILE_HEADER: &str = "\
# Receiver component power model.
# Units: every p_* value in W; adc.walden_c in J/step (W per conversion step per Hz).
";

/// One RF chain: mixer, local oscillator, low-pass filter and baseband amplifier.
pub fn rf_chain_power(m: &ComponentPowerModel) -> f64 {
    m.p_mixer + m.p_lo + m.p_lpf + m.p_bb_amp
}

/// Per-device totals and the fixed / per-antenna split used by the EE(SE) analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub total: f64,
    pub per_device: BTreeMap<String, f64>,
    pub p_rf_chain: f64,
    /// Components whose count does not scale with `N_r`.
    pub p_fixed: f64,
    /// Per-antenna analog components, excluding ADCs.
    pub p_per_antenna: f64,
    /// Power of one ADC.
    pub p_adc: f64,
    /// Number of ADCs.
    pub n_adc: usize,
}

/// Total receiver power for `arch` with `n_rx` antennas.
pub fn total_power(
    arch: Architecture,
    m: &ComponentPowerModel,
    n_rx: usize,
    bandwidth_hz: f64,
    bits: u32,
) -> Result<PowerBreakdown> {
    if n_rx == 0 {
        return Err(Error::invalid("n_rx", "must be >= 1"));
    }
    if bits == 0 || bits > MAX_BITS {
        return Err(Error::invalid("bits", format!("must be in 1..={MAX_BITS}")));
    }
    if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
        return Err(Error::invalid("bandwidth_hz", "must be finite and > 0"));
    }
    arch.validate(n_rx)?;

    let nr = n_rx as f64;
    let p_rf = rf_chain_power(m);
    let p_adc = adc_power(&m.adc, bandwidth_hz, bits);
    let chains = arch.rf_chains(n_rx);
    let n_adc = ADCS_PER_CHAIN * chains;
    let nc = chains as f64;

    let mut dev = BTreeMap::new();
    let (p_fixed, p_per_antenna) = match arch {
        Architecture::Analog => {
            dev.insert("lna".to_string(), nr * m.p_lna);
            dev.insert("phase_shifter".to_string(), nr * m.p_ps);
            dev.insert("rf_chain".to_string(), p_rf);
            dev.insert("combiner".to_string(), m.p_combiner);
            (p_rf + m.p_combiner, m.p_lna + m.p_ps)
        }
        Architecture::Hybrid(_) => {
            dev.insert("lna".to_string(), nr * m.p_lna);
            dev.insert("splitter".to_string(), nr * m.p_splitter);
            dev.insert("phase_shifter".to_string(), nr * nc * m.p_ps);
            dev.insert("rf_chain".to_string(), nc * p_rf);
            dev.insert("combiner".to_string(), nc * m.p_combiner);
            (nc * (p_rf + m.p_combiner), m.p_lna + m.p_splitter + nc * m.p_ps)
        }
        Architecture::Digital => {
            dev.insert("lna".to_string(), nr * m.p_lna);
            dev.insert("rf_chain".to_string(), nr * p_rf);
            (0.0, m.p_lna + p_rf)
        }
    };
    dev.insert("adc".to_string(), n_adc as f64 * p_adc);

    Ok(PowerBreakdown {
        total: dev.values().sum(),
        per_device: dev,
        p_rf_chain: p_rf,
        p_fixed,
        p_per_antenna,
        p_adc,
        n_adc,
    })
}
