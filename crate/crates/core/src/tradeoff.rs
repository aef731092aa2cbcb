//! Spectral efficiency vs energy efficiency: the EE(SE) analytics and the
//! multi-objective receiver utility `alpha EE + (1 - alpha) SE`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::power::Architecture;

/// `pi sqrt(3) / 2`, the constant of the high-resolution distortion approximation.
const ETA_CONST: f64 = 2.720_699_046_351_326;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeKind {
    AC,
    DC,
    HC,
}

impl From<Architecture> for SchemeKind {
    fn from(a: Architecture) -> Self {
        match a {
            Architecture::Analog => SchemeKind::AC,
            Architecture::Digital => SchemeKind::DC,
            Architecture::Hybrid(_) => SchemeKind::HC,
        }
    }
}

/// One design on the SE-vs-EE chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub scheme: SchemeKind,
    pub bits: u32,
    /// RF chains: 1 for AC, `N_r` for DC.
    pub n_rf: usize,
    /// bits/s/Hz.
    pub se: f64,
    /// Standard error of the Monte Carlo SE estimate.
    pub se_std_error: f64,
    /// bits/J.
    pub ee: f64,
    /// W.
    pub p_tot: f64,
    /// Utility weights for which this point is the maximizer.
    #[serde(default)]
    pub selected_alphas: Vec<f64>,
}

impl TradeoffPoint {
    pub fn architecture(&self) -> Architecture {
        match self.scheme {
            SchemeKind::AC => Architecture::Analog,
            SchemeKind::DC => Architecture::Digital,
            SchemeKind::HC => Architecture::Hybrid(self.n_rf),
        }
    }
}

/// `EE = B SE / P_tot` in bits/J.
pub fn energy_efficiency(se: f64, p_tot: f64, bandwidth_hz: f64) -> Result<f64> {
    if p_tot.is_nan() || p_tot <= 0.0 {
        return Err(Error::invalid("p_tot", "total power must be > 0"));
    }
    Ok(bandwidth_hz * se / p_tot)
}

/// Bits per second per Hz upper limit `log2(1 + gamma)` of the closed form.
fn se_ceiling(gamma: f64) -> f64 {
    (1.0 + gamma).log2()
}

/// EE as an explicit function of SE for a digital receiver with `n_rx`
/// antennas, eliminating `b` through the quantized SNR relation and
/// `eta = (pi sqrt(3)/2) 2^{-2b}`:
///
/// `SE / ((P_o + P_a N_r)/B + 2 N_r c sqrt((pi sqrt(3)/2) gamma / ((1+gamma) 2^{-SE} - 1)))`.
pub fn ee_of_se_closed_form(
    se: f64,
    gamma: f64,
    p_o: f64,
    p_a: f64,
    n_rx: usize,
    bandwidth_hz: f64,
    walden_c: f64,
) -> Result<f64> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::invalid("gamma", "SNR must be > 0"));
    }
    let ceiling = se_ceiling(gamma);
    if !(se >= 0.0 && se < ceiling) {
        return Err(Error::Domain(format!(
            "SE = {se} must lie in [0, log2(1 + gamma)) = [0, {ceiling})"
        )));
    }
    let slack = (1.0 + gamma) * (-se).exp2() - 1.0;
    if slack <= 0.0 {
        return Err(Error::Domain(format!("SE = {se} is at the pole log2(1 + gamma) = {ceiling}")));
    }
    let levels = (ETA_CONST * gamma / slack).sqrt();
    let nr = n_rx as f64;
    Ok(se / ((p_o + p_a * nr) / bandwidth_hz + 2.0 * nr * walden_c * levels))
}

/// A point in the transition regime of EE(SE).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionPoint {
    /// `log2((gamma + 1) / (gamma + (2/(pi sqrt 3)) (P_a/(2Bc))^2))`, when positive.
    pub se_tilde: Option<f64>,
    /// `log2(P_a / (2 B c))`: resolution at which one ADC pair draws `P_a`.
    pub b_star: f64,
}

pub fn transition_point(gamma: f64, p_a: f64, bandwidth_hz: f64, walden_c: f64) -> TransitionPoint {
    let ratio = p_a / (2.0 * bandwidth_hz * walden_c);
    let arg = (gamma + 1.0) / (gamma + ratio * ratio / ETA_CONST);
    TransitionPoint {
        se_tilde: (arg > 1.0).then(|| arg.log2()),
        b_star: ratio.log2(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaGamma {
    /// `gamma2 - gamma1`, linear.
    pub value: f64,
    /// The denominator is negative: `(P_a1)^2 < (pi sqrt 3 / 2)(Bc)^2`.
    pub sign_flipped: bool,
}

/// `P_a` at which the SNR-gap expression is singular: `sqrt(pi sqrt 3 / 2) B c`.
pub fn critical_p_a(bandwidth_hz: f64, walden_c: f64) -> f64 {
    ETA_CONST.sqrt() * bandwidth_hz * walden_c
}

/// Required SNR difference between two receivers with per-antenna analog power
/// `p_a1`, `p_a2`:
///
/// `(gamma1 + 1)(P_a2^2 - P_a1^2) / (P_a1^2 - (pi sqrt 3 / 2)(Bc)^2)`.
pub fn delta_gamma_star(gamma1: f64, p_a1: f64, p_a2: f64, bandwidth_hz: f64, walden_c: f64) -> Result<DeltaGamma> {
    let bc = bandwidth_hz * walden_c;
    let critical = ETA_CONST * bc * bc;
    let denom = p_a1 * p_a1 - critical;
    if denom == 0.0 {
        return Err(Error::Domain(format!(
            "singular at P_a1 = sqrt(pi sqrt(3)/2) B c = {} W",
            critical_p_a(bandwidth_hz, walden_c)
        )));
    }
    Ok(DeltaGamma {
        value: (gamma1 + 1.0) * (p_a2 * p_a2 - p_a1 * p_a1) / denom,
        sign_flipped: denom < 0.0,
    })
}

/// Weights and eligibility filters for utility maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityConfig {
    pub alpha_grid: Vec<f64>,
    pub bit_range: (u32, u32),
    /// Eligible architectures; `None` admits every point.
    pub schemes: Option<Vec<Architecture>>,
    /// EE is divided by this before mixing (1e9 expresses it in Gbits/J).
    pub ee_scale: f64,
    pub se_scale: f64,
}

impl Default for UtilityConfig {
    fn default() -> Self {
        Self {
            alpha_grid: uniform_alpha_grid(101),
            bit_range: (1, 8),
            schemes: None,
            ee_scale: 1e9,
            se_scale: 1.0,
        }
    }
}

/// `n` evenly spaced weights on `[0, 1]`, endpoints included.
pub fn uniform_alpha_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

impl UtilityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha_grid.is_empty() {
            return Err(Error::invalid("alpha_grid", "must not be empty"));
        }
        if let Some(a) = self.alpha_grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::invalid("alpha", format!("{a} is outside [0, 1]")));
        }
        if self.bit_range.0 > self.bit_range.1 {
            return Err(Error::invalid("bit_range", "empty range"));
        }
        if matches!(&self.schemes, Some(s) if s.is_empty()) {
            return Err(Error::invalid("schemes", "must not be empty"));
        }
        if !(self.ee_scale > 0.0 && self.se_scale > 0.0) {
            return Err(Error::invalid("ee_scale", "scales must be > 0"));
        }
        Ok(())
    }

    fn eligible(&self, p: &TradeoffPoint) -> bool {
        let bits_ok = (self.bit_range.0..=self.bit_range.1).contains(&p.bits);
        let scheme_ok = self
            .schemes
            .as_ref()
            .is_none_or(|s| s.contains(&p.architecture()));
        bits_ok && scheme_ok && p.se.is_finite() && p.ee.is_finite()
    }

    pub fn utility(&self, p: &TradeoffPoint, alpha: f64) -> f64 {
        alpha * p.ee / self.ee_scale + (1.0 - alpha) * p.se / self.se_scale
    }
}

/// Maximizer of the utility at `alpha`. Ties go to higher SE, then higher EE,
/// then the earlier point.
pub fn select(points: &[TradeoffPoint], alpha: f64, cfg: &UtilityConfig) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in points.iter().enumerate().filter(|(_, p)| cfg.eligible(p)) {
        let u = cfg.utility(p, alpha);
        let better = match best {
            None => true,
            Some((j, bu)) => {
                let q = &points[j];
                u > bu || (u == bu && (p.se > q.se || (p.se == q.se && p.ee > q.ee)))
            }
        };
        if better {
            best = Some((i, u));
        }
    }
    best.map(|(i, _)| i)
}

/// Indices of eligible points that no other eligible point dominates in (SE, EE).
pub fn pareto_indices(points: &[TradeoffPoint], cfg: &UtilityConfig) -> Vec<usize> {
    let eligible: Vec<usize> = (0..points.len()).filter(|&i| cfg.eligible(&points[i])).collect();
    eligible
        .iter()
        .copied()
        .filter(|&i| {
            let p = &points[i];
            !eligible.iter().any(|&j| {
                let q = &points[j];
                q.se >= p.se && q.ee >= p.ee && (q.se > p.se || q.ee > p.ee)
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    pub pareto: Vec<usize>,
    /// `(alpha, point index)` for each alpha in the grid.
    pub selections: Vec<(f64, usize)>,
}

/// Annotate `points` with the alphas they maximize and compute the Pareto set.
pub fn utility_frontier(points: &mut [TradeoffPoint], cfg: &UtilityConfig) -> Result<Frontier> {
    cfg.validate()?;
    if points.is_empty() {
        return Err(Error::invalid("points", "no trade-off points"));
    }
    for p in points.iter_mut() {
        p.selected_alphas.clear();
    }
    let mut selections = Vec::with_capacity(cfg.alpha_grid.len());
    for &alpha in &cfg.alpha_grid {
        if let Some(i) = select(points, alpha, cfg) {
            points[i].selected_alphas.push(alpha);
            selections.push((alpha, i));
        }
    }
    Ok(Frontier {
        pareto: pareto_indices(points, cfg),
        selections,
    })
}
