//! Spectral and energy efficiency of mmWave receivers with low-resolution ADCs.
//!
//! The crate models a clustered mmWave MIMO channel, the additive quantization
//! noise model of a `b`-bit ADC, three receive combining architectures (analog,
//! hybrid and digital), their component-level power consumption, and the
//! resulting SE-vs-EE trade-off estimated by Monte Carlo.

pub mod channel;
pub mod chart;
pub mod combining;
pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod power;
pub mod quantization;
pub mod rng;
pub mod tradeoff;

pub use channel::{ChannelParams, ChannelRealization, ClusterLaw, LinkCondition, Pathloss, PathlossSpec};
pub use combining::{AcDesign, DcDesign, HcDesign, LinkConfig, RfCombiner};
pub use error::{Error, Result};
pub use power::{Architecture, ComponentPowerModel, PowerBreakdown};
pub use quantization::{AdcModel, QuantizerModel};
pub use tradeoff::{SchemeKind, TradeoffPoint, UtilityConfig};
pub use chart::ChartDocument;
pub use montecarlo::{Scenario, SweepResult};
