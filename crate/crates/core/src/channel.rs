//! Clustered geometric mmWave MIMO channel with half-wavelength ULAs.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::rng::trial_stream;

/// How many clusters a realization has.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterLaw {
    Fixed(usize),
    /// `max(Poisson(mean), 1)`, drawn per realization.
    TruncatedPoisson { mean: f64 },
}

impl ClusterLaw {
    /// The 28 GHz measurement-based default, `max(Poisson(1.8), 1)`.
    pub const MEASURED_28GHZ: ClusterLaw = ClusterLaw::TruncatedPoisson { mean: 1.8 };

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        match *self {
            ClusterLaw::Fixed(k) => Ok(k),
            ClusterLaw::TruncatedPoisson { mean } => {
                let poisson = Poisson::new(mean)
                    .map_err(|e| Error::invalid("cluster_law.mean", e.to_string()))?;
                let k: f64 = poisson.sample(rng);
                Ok((k as usize).max(1))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ClusterLaw::Fixed(0) => Err(Error::invalid("cluster_law", "fixed cluster count must be >= 1")),
            ClusterLaw::TruncatedPoisson { mean } if !(mean.is_finite() && mean > 0.0) => {
                Err(Error::invalid("cluster_law.mean", "Poisson mean must be finite and > 0"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkCondition {
    #[serde(rename = "LOS")]
    Los,
    #[serde(rename = "NLOS")]
    Nlos,
}

impl LinkCondition {
    pub fn default_shadowing_sigma_db(self) -> f64 {
        match self {
            LinkCondition::Los => 5.8,
            LinkCondition::Nlos => 8.7,
        }
    }
}

/// Distance-dependent 28 GHz pathloss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathlossSpec {
    pub condition: LinkCondition,
    pub distance_m: f64,
    pub shadowing_sigma_db: f64,
    #[serde(default)]
    pub include_shadowing: bool,
}

impl PathlossSpec {
    /// Spec with the measured shadowing spread for `condition`, shadowing off.
    pub fn new(condition: LinkCondition, distance_m: f64) -> Self {
        Self {
            condition,
            distance_m,
            shadowing_sigma_db: condition.default_shadowing_sigma_db(),
            include_shadowing: false,
        }
    }
}

/// Pathloss in dB for `spec` with an optional shadowing draw `xi_db`.
pub fn pathloss_db(spec: &PathlossSpec, shadowing_draw: Option<f64>) -> Result<f64> {
    if !(spec.distance_m > 0.0 && spec.distance_m.is_finite()) {
        return Err(Error::invalid("distance_m", "distance must be positive and finite"));
    }
    let xi = shadowing_draw.unwrap_or(0.0);
    let d = spec.distance_m.log10();
    Ok(match spec.condition {
        LinkCondition::Los => 61.5 + 20.0 * d + xi,
        LinkCondition::Nlos => 72.0 + 29.2 * d + xi,
    })
}

/// Either a fixed pathloss in dB or a distance-based model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Pathloss {
    Db(f64),
    Model(PathlossSpec),
}

impl Pathloss {
    /// Pathloss in dB with shadowing disabled.
    pub fn nominal_db(&self) -> Result<f64> {
        match self {
            Pathloss::Db(db) => Ok(*db),
            Pathloss::Model(spec) => pathloss_db(spec, None),
        }
    }

    fn draw_db<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match self {
            Pathloss::Db(db) => Ok(*db),
            Pathloss::Model(spec) if spec.include_shadowing => {
                let normal = Normal::new(0.0, spec.shadowing_sigma_db)
                    .map_err(|e| Error::invalid("shadowing_sigma_db", e.to_string()))?;
                pathloss_db(spec, Some(normal.sample(rng)))
            }
            Pathloss::Model(spec) => pathloss_db(spec, None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    pub n_tx: usize,
    pub n_rx: usize,
    pub cluster_law: ClusterLaw,
    pub paths_per_cluster: usize,
    pub angle_spread_deg: f64,
    pub pathloss_db: Pathloss,
    pub seed: u64,
}

impl ChannelParams {
    /// Measurement-based multipath channel: `N_c ~ max(Poisson(1.8), 1)`,
    /// 20 paths per cluster, 10 degree angular spread, no pathloss.
    pub fn multipath(n_tx: usize, n_rx: usize) -> Self {
        Self {
            n_tx,
            n_rx,
            cluster_law: ClusterLaw::MEASURED_28GHZ,
            paths_per_cluster: 20,
            angle_spread_deg: 10.0,
            pathloss_db: Pathloss::Db(0.0),
            seed: 0,
        }
    }

    /// Single cluster, single path: a rank-1 channel.
    pub fn single_path(n_tx: usize, n_rx: usize) -> Self {
        Self {
            cluster_law: ClusterLaw::Fixed(1),
            paths_per_cluster: 1,
            ..Self::multipath(n_tx, n_rx)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tx == 0 {
            return Err(Error::invalid("n_tx", "must be >= 1"));
        }
        if self.n_rx == 0 {
            return Err(Error::invalid("n_rx", "must be >= 1"));
        }
        if self.paths_per_cluster == 0 {
            return Err(Error::invalid("paths_per_cluster", "must be >= 1"));
        }
        if !(self.angle_spread_deg >= 0.0 && self.angle_spread_deg.is_finite()) {
            return Err(Error::invalid("angle_spread_deg", "must be finite and >= 0"));
        }
        self.cluster_law.validate()?;
        let db = self.pathloss_db.nominal_db()?;
        if !db.is_finite() {
            return Err(Error::invalid("pathloss_db", "must be finite"));
        }
        if let Pathloss::Model(spec) = &self.pathloss_db {
            if !(spec.shadowing_sigma_db >= 0.0 && spec.shadowing_sigma_db.is_finite()) {
                return Err(Error::invalid("shadowing_sigma_db", "must be finite and >= 0"));
            }
        }
        Ok(())
    }

    /// Pathloss in linear scale with shadowing disabled.
    pub fn nominal_pathloss_linear(&self) -> Result<f64> {
        Ok(db_to_linear(self.pathloss_db.nominal_db()?))
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Unit-norm response of an `n`-element half-wavelength ULA.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub entries: CVector,
    pub angle_rad: f64,
}

/// `(1/sqrt(n)) [1, e^{j pi sin a}, ..., e^{j (n-1) pi sin a}]^T`.
pub fn steering_vector(n: usize, angle_rad: f64) -> Result<SteeringVector> {
    if n == 0 {
        return Err(Error::invalid("n", "antenna count must be >= 1"));
    }
    let amp = 1.0 / (n as f64).sqrt();
    let step = PI * angle_rad.sin();
    let entries = CVector::from_fn(n, |i, _| Complex64::from_polar(amp, step * i as f64));
    Ok(SteeringVector { entries, angle_rad })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGain {
    pub gain: Complex64,
    pub delta_aoa: f64,
    pub delta_aod: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub mean_aoa: f64,
    pub mean_aod: f64,
    pub paths: Vec<PathGain>,
}

/// One draw of the `N_r x N_t` channel matrix and the paths that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: CMatrix,
    pub clusters: Vec<Cluster>,
    pub pathloss_linear: f64,
}

impl ChannelRealization {
    pub fn n_rx(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.h.ncols()
    }

    /// Wrap an arbitrary matrix, e.g. for tests with hand-built channels.
    pub fn from_matrix(h: CMatrix) -> Self {
        Self {
            h,
            clusters: Vec::new(),
            pathloss_linear: 1.0,
        }
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Draw one realization from `rng`.
///
/// Mean cluster angles are uniform on `[0, 2pi)`; per-path offsets are
/// Gaussian with standard deviation equal to the angular spread.
pub fn draw_channel<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> Result<ChannelRealization> {
    params.validate()?;
    let (n_tx, n_rx) = (params.n_tx, params.n_rx);
    let n_clusters = params.cluster_law.draw(rng)?;
    let n_paths = params.paths_per_cluster;
    let spread = params.angle_spread_deg.to_radians();

    let mut clusters = Vec::with_capacity(n_clusters);
    for _ in 0..n_clusters {
        let mean_aoa = rng.random::<f64>() * TAU;
        let mean_aod = rng.random::<f64>() * TAU;
        let paths = (0..n_paths)
            .map(|_| {
                let gain = complex_gaussian(rng);
                let d_aoa: f64 = StandardNormal.sample(rng);
                let d_aod: f64 = StandardNormal.sample(rng);
                PathGain {
                    gain,
                    delta_aoa: d_aoa * spread,
                    delta_aod: d_aod * spread,
                }
            })
            .collect();
        clusters.push(Cluster {
            mean_aoa,
            mean_aod,
            paths,
        });
    }

    let pathloss_linear = db_to_linear(params.pathloss_db.draw_db(rng)?);
    let scale = ((n_tx * n_rx) as f64 / (pathloss_linear * (n_clusters * n_paths) as f64)).sqrt();

    let mut h = CMatrix::zeros(n_rx, n_tx);
    for cluster in &clusters {
        for path in &cluster.paths {
            let a_r = steering_vector(n_rx, cluster.mean_aoa + path.delta_aoa)?.entries;
            let a_t = steering_vector(n_tx, cluster.mean_aod + path.delta_aod)?.entries;
            h += (a_r * a_t.adjoint()) * (path.gain * scale);
        }
    }

    Ok(ChannelRealization {
        h,
        clusters,
        pathloss_linear,
    })
}

/// Realization number `trial` of the sequence seeded by `params.seed`.
pub fn draw_trial(params: &ChannelParams, trial: u64) -> Result<ChannelRealization> {
    let mut rng = trial_stream(params.seed, trial);
    draw_channel(params, &mut rng)
}
