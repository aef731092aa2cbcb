//! Additive quantization noise model (AQNM) for low-resolution ADCs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest ADC resolution accepted by configuration validation.
pub const MAX_BITS: u32 = 16;

/// Measured distortion factors for Gaussian inputs, `b = 1..=5`.
pub const ETA_TABLE: [f64; 5] = [0.3634, 0.1175, 0.03454, 0.009497, 0.002499];

/// `(pi sqrt(3) / 2) 2^{-2b}`, the high-resolution approximation of the distortion factor.
pub fn eta_closed_form(bits: u32) -> f64 {
    PI * 3f64.sqrt() / 2.0 * 2f64.powi(-2 * bits as i32)
}

/// Distortion factor (inverse signal-to-quantization-noise ratio) for a `bits`-bit ADC.
///
/// The measured table is used for `b <= 5`, the closed form above that.
pub fn eta_of_bits(bits: u32) -> Result<f64> {
    match bits {
        0 => Err(Error::invalid("bits", "ADC resolution must be >= 1")),
        1..=5 => Ok(ETA_TABLE[bits as usize - 1]),
        _ => Ok(eta_closed_form(bits)),
    }
}

/// A `b`-bit ADC with its distortion factor resolved once at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerModel {
    bits: u32,
    eta: f64,
}

impl QuantizerModel {
    pub fn new(bits: u32) -> Result<Self> {
        if bits > MAX_BITS {
            return Err(Error::invalid("bits", format!("ADC resolution must be <= {MAX_BITS}")));
        }
        Ok(Self {
            bits,
            eta: eta_of_bits(bits)?,
        })
    }

    /// An ideal, infinite-resolution converter (`eta = 0`).
    pub fn unquantized() -> Self {
        Self { bits: u32::MAX, eta: 0.0 }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Scalar AQNM output SNR, `(1 - eta) gamma / (1 + eta gamma)`.
pub fn quantized_snr_scalar(gamma: f64, eta: f64) -> f64 {
    (1.0 - eta) * gamma / (1.0 + eta * gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AdcLabel {
    Lpadc,
    Ipadc,
    Hpadc,
    Custom,
}

/// ADC power model `P = c B 2^b` with Walden figure of merit `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdcModel {
    /// Energy per conversion step, J/step (= W/(step Hz)).
    pub walden_c: f64,
    pub label: AdcLabel,
}

impl AdcModel {
    /// Projected best-case device, 5 fJ/step.
    pub const LPADC: AdcModel = AdcModel {
        walden_c: 5e-15,
        label: AdcLabel::Lpadc,
    };
    /// Intermediate device, 65 fJ/step.
    pub const IPADC: AdcModel = AdcModel {
        walden_c: 65e-15,
        label: AdcLabel::Ipadc,
    };
    /// Current state of the art, 494 fJ/step.
    pub const HPADC: AdcModel = AdcModel {
        walden_c: 494e-15,
        label: AdcLabel::Hpadc,
    };

    pub fn validate(&self) -> Result<()> {
        if !(self.walden_c > 0.0 && self.walden_c.is_finite()) {
            return Err(Error::invalid("adc.walden_c", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// Power drawn by one ADC in Watts.
pub fn adc_power(adc: &AdcModel, bandwidth_hz: f64, bits: u32) -> f64 {
    adc.walden_c * bandwidth_hz * 2f64.powi(bits as i32)
}
