//! Combiner designs and per-realization quantized rates for analog (AC),
//! digital (DC) and hybrid (HC) receivers.
//!
//! All three share the same transmitter: fully digital with channel state
//! information. Rates are returned in bits/s.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::linalg::{constant_modulus, hermitian_ln_det, orthonormality_residual, polar_factor, CMatrix, CVector, ThinSvd};
use crate::quantization::QuantizerModel;

/// Maximum entrywise change between successive constant-modulus iterates
/// at which the alternating projection is considered converged.
pub const AP_TOLERANCE: f64 = 1e-8;
/// Iteration cap for the alternating projection.
pub const AP_MAX_ITERATIONS: usize = 500;

/// Transmit power, receiver noise power and bandwidth of a link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    /// Average transmit power, W.
    pub tx_power: f64,
    /// Noise power per receive dimension, W.
    pub noise_power: f64,
    pub bandwidth_hz: f64,
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("link.tx_power", self.tx_power),
            ("link.noise_power", self.noise_power),
            ("link.bandwidth_hz", self.bandwidth_hz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, "must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// Transmit SNR `P / N_o`.
    pub fn snr(&self) -> f64 {
        self.tx_power / self.noise_power
    }
}

/// Water-filling power allocation over parallel channels with singular
/// values `sing_vals`: `p_i = max(0, mu - N_o / sigma_i^2)` with `sum p_i = P`.
pub fn waterfill(sing_vals: &[f64], total_power: f64, noise: f64) -> Result<Vec<f64>> {
    if !(total_power > 0.0 && total_power.is_finite()) {
        return Err(Error::invalid("total_power", "must be finite and > 0"));
    }
    if !(noise > 0.0 && noise.is_finite()) {
        return Err(Error::invalid("noise", "must be finite and > 0"));
    }
    if sing_vals.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::invalid("sing_vals", "must be finite and >= 0"));
    }

    // Inverse gains N_o / sigma^2 of the usable dimensions, strongest first.
    let mut order: Vec<(usize, f64)> = sing_vals
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0.0)
        .map(|(i, &s)| (i, noise / (s * s)))
        .filter(|(_, inv)| inv.is_finite())
        .collect();
    if order.is_empty() {
        return Err(Error::DegenerateChannel("all singular values are zero".into()));
    }
    order.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut prefix = 0.0;
    let mut level = 0.0;
    let mut active = 0;
    for (k, &(_, inv)) in order.iter().enumerate() {
        prefix += inv;
        let candidate = (total_power + prefix) / (k + 1) as f64;
        if candidate > inv {
            level = candidate;
            active = k + 1;
        } else {
            break;
        }
    }

    let mut alloc = vec![0.0; sing_vals.len()];
    for &(i, inv) in &order[..active] {
        alloc[i] = level - inv;
    }
    // One correction pass so the budget is met to rounding.
    let spent: f64 = alloc.iter().sum();
    let fix = (total_power - spent) / active as f64;
    for &(i, _) in &order[..active] {
        alloc[i] += fix;
    }
    Ok(alloc)
}

/// Analog beamformer: one phase-shifter combiner and a matched-filter precoder.
#[derive(Debug, Clone, PartialEq)]
pub struct AcDesign {
    /// Receive combiner, every entry of modulus `1/sqrt(N_r)`.
    pub w_r: CVector,
    /// Unit-norm transmit beamformer.
    pub w_t: CVector,
    /// Beamforming gain `|w_r^H H w_t|^2`.
    pub gain: f64,
    /// `sigma_max^2`, the gain without the constant-modulus constraint.
    pub unconstrained_gain: f64,
}

/// Constant-modulus projection of the dominant left singular vector, with the
/// transmit matched filter computed for the projected combiner.
pub fn ac_beamformer(h: &ChannelRealization) -> Result<AcDesign> {
    let svd = ThinSvd::new(&h.h, "analog beamformer SVD")?;
    ac_from_svd(&h.h, &svd)
}

pub(crate) fn ac_from_svd(h: &CMatrix, svd: &ThinSvd) -> Result<AcDesign> {
    let sigma_max = svd.sigma[0];
    if sigma_max <= 0.0 {
        return Err(Error::DegenerateChannel("channel matrix is zero".into()));
    }
    let n_rx = h.nrows();
    let u_max = svd.u.columns(0, 1).into_owned();
    let w_r: CVector = constant_modulus(&u_max, 1.0 / (n_rx as f64).sqrt()).column(0).into_owned();
    let (w_t, gain) = matched_filter(h, &w_r)?;
    Ok(AcDesign {
        w_r,
        w_t,
        gain,
        unconstrained_gain: sigma_max * sigma_max,
    })
}

/// `w_t = H^H w_r / ||H^H w_r||` and the resulting gain `||H^H w_r||^2`.
pub fn matched_filter(h: &CMatrix, w_r: &CVector) -> Result<(CVector, f64)> {
    let z = h.adjoint() * w_r;
    let norm = z.norm();
    if norm <= 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateChannel("combiner is orthogonal to the channel".into()));
    }
    Ok((z / Complex64::new(norm, 0.0), norm * norm))
}

/// Single-stream quantized rate `B log2(1 + (1-eta) g P / (N_o + eta g P))`.
pub fn scalar_rate(gain: f64, link: &LinkConfig, q: &QuantizerModel) -> f64 {
    let eta = q.eta();
    let signal = gain * link.tx_power;
    link.bandwidth_hz * (1.0 + (1.0 - eta) * signal / (link.noise_power + eta * signal)).log2()
}

pub fn ac_rate(design: &AcDesign, link: &LinkConfig, q: &QuantizerModel) -> f64 {
    scalar_rate(design.gain, link, q)
}

/// SVD precoding/combining with water-filling over the singular values.
#[derive(Debug, Clone)]
pub struct DcDesign {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
    pub power_alloc: Vec<f64>,
    /// Streams that receive power.
    pub n_streams: usize,
}

impl DcDesign {
    pub fn new(h: &CMatrix, link: &LinkConfig) -> Result<Self> {
        let svd = ThinSvd::new(h, "digital combiner SVD")?;
        Self::from_svd(svd, link)
    }

    pub(crate) fn from_svd(svd: ThinSvd, link: &LinkConfig) -> Result<Self> {
        let power_alloc = waterfill(&svd.sigma, link.tx_power, link.noise_power)?;
        let n_streams = power_alloc.iter().filter(|&&p| p > 0.0).count();
        Ok(Self {
            u: svd.u,
            sigma: svd.sigma,
            v: svd.v,
            power_alloc,
            n_streams,
        })
    }

    /// AQNM rate with the quantization noise evaluated per ADC dimension:
    ///
    /// `B log2 det(I + (1-eta) S R S^H (N_o I + eta U^H diag(U S R S^H U^H) U)^{-1})`.
    ///
    /// Because `U` is unitary, the inverse restricted to the signal subspace is
    /// `U_k^H (N_o I + eta D)^{-1} U_k`, so the determinant reduces to the
    /// `k x k` Hermitian form `I + (1-eta) S^{1/2} M S^{1/2}` evaluated by Cholesky.
    pub fn quantized_rate(&self, link: &LinkConfig, q: &QuantizerModel) -> Result<f64> {
        let eta = q.eta();
        let k = self.sigma.len();
        let stream_power: Vec<f64> = self
            .sigma
            .iter()
            .zip(&self.power_alloc)
            .map(|(s, p)| s * s * p)
            .collect();

        // Signal power seen by each ADC dimension.
        let m = self.u.nrows();
        let per_dim: Vec<f64> = (0..m)
            .map(|j| (0..k).map(|i| self.u[(j, i)].norm_sqr() * stream_power[i]).sum())
            .collect();
        let inv_noise = DVector::from_iterator(
            m,
            per_dim.iter().map(|d| Complex64::new(1.0 / (link.noise_power + eta * d), 0.0)),
        );

        let mut weighted = self.u.clone();
        for (j, mut row) in weighted.row_iter_mut().enumerate() {
            row *= inv_noise[j];
        }
        let inner = self.u.adjoint() * weighted;

        let amp: Vec<f64> = stream_power.iter().map(|s| ((1.0 - eta) * s).sqrt()).collect();
        let mut g = CMatrix::from_fn(k, k, |r, c| inner[(r, c)] * amp[r] * amp[c]);
        for i in 0..k {
            g[(i, i)] += Complex64::new(1.0, 0.0);
        }
        // Hermitian by construction; remove rounding asymmetry before Cholesky.
        let g = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
        let ln_det = hermitian_ln_det(g, "quantized rate determinant")?;
        Ok(link.bandwidth_hz * ln_det / std::f64::consts::LN_2)
    }
}

pub fn dc_rate(h: &ChannelRealization, link: &LinkConfig, q: &QuantizerModel) -> Result<(DcDesign, f64)> {
    let design = DcDesign::new(&h.h, link)?;
    let rate = design.quantized_rate(link, q)?;
    Ok((design, rate))
}

/// Output of the alternating projection for the hybrid RF combiner.
#[derive(Debug, Clone)]
pub struct RfCombiner {
    /// `N_r x N_RF`, every entry of modulus `1/sqrt(N_r)`.
    pub w_rf: CMatrix,
    /// The last semi-unitary iterate (polar factor of `w_rf`).
    pub semi_unitary: CMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// `|| W_RF^H W_RF - I ||_F` of the returned constant-modulus matrix.
    pub orthogonality_residual: f64,
}

/// Extend the orthonormal columns of `u` to `cols` orthonormal columns.
fn complete_basis(u: &CMatrix, cols: usize) -> Result<CMatrix> {
    let (m, k) = u.shape();
    if cols <= k {
        return Ok(u.columns(0, cols).into_owned());
    }
    let mut stacked = CMatrix::zeros(m, k + m);
    stacked.columns_mut(0, k).copy_from(u);
    stacked.columns_mut(k, m).copy_from(&CMatrix::identity(m, m));
    let q = stacked.qr().q();
    let mut out = q.columns(0, cols).into_owned();
    out.columns_mut(0, k).copy_from(u);
    if orthonormality_residual(&out) > 1e-9 {
        return Err(Error::numeric("basis completion", "completed basis is not orthonormal"));
    }
    Ok(out)
}

/// Alternating projection between the constant-modulus set and the set of
/// semi-unitary matrices, started from the `n_rf` dominant left singular vectors.
pub fn hc_rf_combiner(h: &ChannelRealization, n_rf: usize) -> Result<RfCombiner> {
    let svd = ThinSvd::new(&h.h, "hybrid combiner SVD")?;
    rf_combiner_from_svd(&svd, n_rf)
}

pub(crate) fn rf_combiner_from_svd(svd: &ThinSvd, n_rf: usize) -> Result<RfCombiner> {
    let n_rx = svd.u.nrows();
    if n_rf == 0 || n_rf > n_rx {
        return Err(Error::invalid("n_rf", format!("must be in 1..={n_rx}")));
    }
    if svd.sigma[0] <= 0.0 {
        return Err(Error::DegenerateChannel("channel matrix is zero".into()));
    }
    let modulus = 1.0 / (n_rx as f64).sqrt();
    let mut semi_unitary = complete_basis(&svd.u, n_rf)?;
    let mut w_rf = constant_modulus(&semi_unitary, modulus);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < AP_MAX_ITERATIONS {
        iterations += 1;
        semi_unitary = polar_factor(&w_rf)?;
        let next = constant_modulus(&semi_unitary, modulus);
        let change = next.iter().zip(w_rf.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        w_rf = next;
        if change < AP_TOLERANCE {
            converged = true;
            break;
        }
    }
    let residual = orthonormality_residual(&w_rf);
    Ok(RfCombiner {
        semi_unitary: polar_factor(&w_rf)?,
        w_rf,
        iterations,
        converged,
        orthogonality_residual: residual,
    })
}

/// Hybrid design: RF combiner plus digital SVD processing of the equivalent channel.
#[derive(Debug, Clone)]
pub struct HcDesign {
    pub rf: RfCombiner,
    /// `W_RF^H H`, `N_RF x N_t`.
    pub h_eff: CMatrix,
    pub inner: DcDesign,
    pub n_rf: usize,
}

impl HcDesign {
    pub fn new(h: &ChannelRealization, n_rf: usize, link: &LinkConfig) -> Result<Self> {
        let svd = ThinSvd::new(&h.h, "hybrid combiner SVD")?;
        Self::from_svd(&h.h, &svd, n_rf, link)
    }

    pub(crate) fn from_svd(h: &CMatrix, svd: &ThinSvd, n_rf: usize, link: &LinkConfig) -> Result<Self> {
        let rf = rf_combiner_from_svd(svd, n_rf)?;
        let h_eff = rf.w_rf.adjoint() * h;
        let inner = DcDesign::new(&h_eff, link)?;
        Ok(Self { rf, h_eff, inner, n_rf })
    }

    /// Same quantized determinant as DC, over the `N_RF` RF-chain outputs.
    /// Post-combiner noise is taken as white `N_o I`.
    pub fn quantized_rate(&self, link: &LinkConfig, q: &QuantizerModel) -> Result<f64> {
        self.inner.quantized_rate(link, q)
    }
}

pub fn hc_rate(
    h: &ChannelRealization,
    n_rf: usize,
    link: &LinkConfig,
    q: &QuantizerModel,
) -> Result<(HcDesign, f64)> {
    let design = HcDesign::new(h, n_rf, link)?;
    let rate = design.quantized_rate(link, q)?;
    Ok((design, rate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_trial, ChannelParams};
    use crate::quantization::eta_of_bits;
    use approx::assert_relative_eq;

    fn link(snr: f64) -> LinkConfig {
        LinkConfig {
            tx_power: 1.0,
            noise_power: 1.0 / snr,
            bandwidth_hz: 1.0,
        }
    }

    /// Brute-force water level: bisection on `mu` for `sum max(0, mu - inv_i) = P`.
    fn waterfill_oracle(sing: &[f64], p: f64, noise: f64) -> Vec<f64> {
        let inv: Vec<f64> = sing.iter().map(|s| if *s > 0.0 { noise / (s * s) } else { f64::INFINITY }).collect();
        let spent = |mu: f64| inv.iter().map(|i| (mu - i).max(0.0)).sum::<f64>();
        let (mut lo, mut hi) = (0.0, p + inv.iter().cloned().filter(|x| x.is_finite()).fold(0.0, f64::max));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if spent(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        inv.iter().map(|i| (0.5 * (lo + hi) - i).max(0.0)).collect()
    }

    #[test]
    fn waterfill_examples() {
        let p = waterfill(&[2.0, 2.0], 3.0, 0.5).unwrap();
        assert_relative_eq!(p[0], 1.5, epsilon = 1e-14);
        assert_relative_eq!(p[1], 1.5, epsilon = 1e-14);
        assert_eq!(waterfill(&[1.0], 1.0, 1.0).unwrap(), vec![1.0]);
        let p = waterfill(&[1.0, 0.1], 0.001, 1.0).unwrap();
        assert_eq!(p[1], 0.0);
        assert_relative_eq!(p[0], 0.001, max_relative = 1e-12);
        let oracle = waterfill_oracle(&[1.0, 0.1], 0.001, 1.0);
        assert!((oracle[0] - p[0]).abs() < 1e-12 && oracle[1] == 0.0);
    }

    #[test]
    fn waterfill_handles_unsorted_and_zero_entries() {
        let p = waterfill(&[0.0, 0.5, 3.0], 10.0, 1.0).unwrap();
        assert_eq!(p[0], 0.0);
        let oracle = waterfill_oracle(&[0.0, 0.5, 3.0], 10.0, 1.0);
        for (a, b) in p.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn waterfill_rejects_degenerate_channel() {
        assert!(matches!(waterfill(&[0.0, 0.0], 1.0, 1.0), Err(Error::DegenerateChannel(_))));
        assert!(waterfill(&[1.0], 0.0, 1.0).is_err());
        assert!(waterfill(&[1.0], 1.0, 0.0).is_err());
    }

    #[test]
    fn scalar_rate_examples() {
        let l = link(1.0);
        assert_relative_eq!(scalar_rate(1.0, &l, &QuantizerModel::unquantized()), 1.0, epsilon = 1e-15);
        let q1 = QuantizerModel::new(1).unwrap();
        assert_relative_eq!(scalar_rate(1.0, &l, &q1), 1.466_94f64.log2(), max_relative = 1e-4);
        assert_relative_eq!(scalar_rate(1.0, &l, &q1), 0.5528, max_relative = 1e-3);
        assert_eq!(scalar_rate(0.0, &l, &q1), 0.0);
    }

    #[test]
    fn ac_projection_is_identity_on_constant_modulus_vectors() {
        // Rank-1 ULA channel: the dominant left singular vector is a steering vector.
        let params = ChannelParams::single_path(8, 4);
        for trial in 0..10 {
            let ch = draw_trial(&params, trial).unwrap();
            let svd = ThinSvd::new(&ch.h, "t").unwrap();
            let ac = ac_from_svd(&ch.h, &svd).unwrap();
            let u = svd.u.column(0);
            let overlap = (ac.w_r.adjoint() * u)[(0, 0)].norm();
            assert_relative_eq!(overlap, 1.0, epsilon = 1e-12);
            assert_relative_eq!(ac.gain, ac.unconstrained_gain, max_relative = 1e-10);
        }
    }

    #[test]
    fn ac_design_constraints() {
        let params = ChannelParams::multipath(16, 8);
        for trial in 0..20 {
            let ch = draw_trial(&params, trial).unwrap();
            let ac = ac_beamformer(&ch).unwrap();
            for z in ac.w_r.iter() {
                assert_relative_eq!(z.norm(), 1.0 / 8f64.sqrt(), epsilon = 1e-15);
            }
            assert_relative_eq!(ac.w_t.norm(), 1.0, epsilon = 1e-12);
            let direct = (ac.w_r.adjoint() * &ch.h * &ac.w_t)[(0, 0)].norm_sqr();
            assert_relative_eq!(direct, ac.gain, max_relative = 1e-10);
            assert!(ac.gain <= ac.unconstrained_gain * (1.0 + 1e-12));
        }
    }

    #[test]
    fn ac_two_antenna_projection_near_grid_optimum() {
        // Brute force over the relative phase of a 2-antenna constant-modulus combiner.
        let params = ChannelParams::multipath(4, 2);
        for trial in 0..20 {
            let ch = draw_trial(&params, trial).unwrap();
            let ac = ac_beamformer(&ch).unwrap();
            let best = (0..3600)
                .map(|i| {
                    let phi = i as f64 * std::f64::consts::TAU / 3600.0;
                    let w = CVector::from_vec(vec![
                        Complex64::new(1.0, 0.0) / 2f64.sqrt(),
                        Complex64::from_polar(1.0 / 2f64.sqrt(), phi),
                    ]);
                    (ch.h.adjoint() * w).norm_squared()
                })
                .fold(0.0, f64::max);
            assert!(ac.gain <= best * (1.0 + 1e-5));
            let max_row = ch.h.row_iter().map(|r| r.norm_squared()).fold(0.0, f64::max);
            assert!(ac.gain >= max_row / 2.0 - 1e-12);
        }
    }

    #[test]
    fn ac_rate_invariant_to_global_phase() {
        let ch = draw_trial(&ChannelParams::multipath(16, 8), 3).unwrap();
        let ac = ac_beamformer(&ch).unwrap();
        let rotated = &ac.w_r * Complex64::from_polar(1.0, 1.234);
        let (_, gain) = matched_filter(&ch.h, &rotated).unwrap();
        let q = QuantizerModel::new(3).unwrap();
        let l = link(0.1);
        assert_relative_eq!(scalar_rate(gain, &l, &q), ac_rate(&ac, &l, &q), max_relative = 1e-12);
    }

    #[test]
    fn zero_channel_is_degenerate() {
        let ch = ChannelRealization::from_matrix(CMatrix::zeros(4, 4));
        assert!(ac_beamformer(&ch).is_err());
        assert!(dc_rate(&ch, &link(1.0), &QuantizerModel::new(4).unwrap()).is_err());
        assert!(hc_rf_combiner(&ch, 2).is_err());
    }

    #[test]
    fn dc_unquantized_is_waterfilling_capacity() {
        let ch = draw_trial(&ChannelParams::multipath(16, 8), 1).unwrap();
        let l = link(0.5);
        let (d, rate) = dc_rate(&ch, &l, &QuantizerModel::unquantized()).unwrap();
        let cap: f64 = d
            .sigma
            .iter()
            .zip(&d.power_alloc)
            .map(|(s, p)| (1.0 + s * s * p / l.noise_power).log2())
            .sum();
        assert_relative_eq!(rate, cap, max_relative = 1e-12);
        let used: f64 = d.power_alloc.iter().sum();
        assert_relative_eq!(used, l.tx_power, max_relative = 1e-12);
    }

    /// The determinant written out literally with a full unitary `U`.
    fn literal_dc_rate(d: &DcDesign, l: &LinkConfig, eta: f64) -> f64 {
        let m = d.u.nrows();
        let k = d.sigma.len();
        let u = complete_basis(&d.u, m).unwrap();
        let s = CMatrix::from_fn(m, m, |r, c| {
            if r == c && r < k {
                Complex64::new(d.sigma[r] * d.sigma[r] * d.power_alloc[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let rx = &u * &s * u.adjoint();
        let diag = CMatrix::from_fn(m, m, |r, c| if r == c { rx[(r, c)] } else { Complex64::new(0.0, 0.0) });
        let noise = CMatrix::identity(m, m) * Complex64::new(l.noise_power, 0.0)
            + u.adjoint() * diag * &u * Complex64::new(eta, 0.0);
        let inv = noise.try_inverse().unwrap();
        let full = CMatrix::identity(m, m) + s * Complex64::new(1.0 - eta, 0.0) * inv;
        l.bandwidth_hz * full.determinant().norm().log2()
    }

    #[test]
    fn dc_rate_matches_literal_expression() {
        for (nt, nr) in [(16, 8), (4, 12), (8, 8)] {
            let params = ChannelParams::multipath(nt, nr);
            for trial in 0..5 {
                let ch = draw_trial(&params, trial).unwrap();
                let l = link(2.0);
                let d = DcDesign::new(&ch.h, &l).unwrap();
                for b in [1, 3, 6] {
                    let q = QuantizerModel::new(b).unwrap();
                    let fast = d.quantized_rate(&l, &q).unwrap();
                    let slow = literal_dc_rate(&d, &l, eta_of_bits(b).unwrap());
                    assert_relative_eq!(fast, slow, max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn rank_one_unquantized_dc_equals_ac() {
        let params = ChannelParams::single_path(16, 8);
        let q = QuantizerModel::unquantized();
        for trial in 0..10 {
            let ch = draw_trial(&params, trial).unwrap();
            let l = link(0.3);
            let ac = ac_beamformer(&ch).unwrap();
            let (_, dc) = dc_rate(&ch, &l, &q).unwrap();
            assert_relative_eq!(ac_rate(&ac, &l, &q), dc, max_relative = 1e-9);
        }
    }

    #[test]
    fn rank_one_quantized_dc_spreads_adc_noise() {
        // With per-ADC quantization noise the DC rate on a rank-1 ULA channel is the
        // scalar rate with the distortion term divided across the N_r dimensions.
        let params = ChannelParams::single_path(16, 8);
        for trial in 0..5 {
            let ch = draw_trial(&params, trial).unwrap();
            let l = link(1.0);
            let q = QuantizerModel::new(2).unwrap();
            let (d, dc) = dc_rate(&ch, &l, &q).unwrap();
            let g = d.sigma[0] * d.sigma[0] * d.power_alloc[0];
            let eta = q.eta();
            let expected = (1.0 + (1.0 - eta) * g / (l.noise_power + eta * g / 8.0)).log2();
            assert_relative_eq!(dc, expected, max_relative = 1e-9);
            let ac = ac_beamformer(&ch).unwrap();
            assert!(dc >= ac_rate(&ac, &l, &q));
        }
    }

    #[test]
    fn rf_combiner_single_chain_is_ac_projection() {
        let params = ChannelParams::multipath(16, 8);
        for trial in 0..10 {
            let ch = draw_trial(&params, trial).unwrap();
            let rf = hc_rf_combiner(&ch, 1).unwrap();
            let ac = ac_beamformer(&ch).unwrap();
            assert!(rf.converged);
            assert!((rf.w_rf.column(0) - &ac.w_r).norm() < 1e-12);
        }
    }

    #[test]
    fn rf_combiner_rank_one_captures_full_gain() {
        let params = ChannelParams::single_path(16, 8);
        let ch = draw_trial(&params, 2).unwrap();
        let svd = ThinSvd::new(&ch.h, "t").unwrap();
        let rf = hc_rf_combiner(&ch, 1).unwrap();
        let h_eff = rf.w_rf.adjoint() * &ch.h;
        let sv = ThinSvd::new(&h_eff, "t").unwrap();
        assert_relative_eq!(sv.sigma[0], svd.sigma[0], max_relative = 1e-10);
    }

    #[test]
    fn rf_combiner_constraints() {
        let params = ChannelParams::multipath(64, 16);
        for trial in 0..10 {
            let ch = draw_trial(&params, trial).unwrap();
            let rf = hc_rf_combiner(&ch, 4).unwrap();
            assert_eq!(rf.w_rf.shape(), (16, 4));
            for z in rf.w_rf.iter() {
                assert_relative_eq!(z.norm(), 0.25, epsilon = 1e-15);
            }
            assert!(orthonormality_residual(&rf.semi_unitary) <= 1e-6);
        }
    }

    #[test]
    fn rf_combiner_rejects_bad_chain_count() {
        let ch = draw_trial(&ChannelParams::multipath(8, 4), 0).unwrap();
        assert!(hc_rf_combiner(&ch, 0).is_err());
        assert_eq!(hc_rf_combiner(&ch, 5).unwrap_err().field(), Some("n_rf"));
        // More chains than transmit antennas still works through basis completion.
        let ch = draw_trial(&ChannelParams::multipath(2, 6), 0).unwrap();
        let rf = hc_rf_combiner(&ch, 4).unwrap();
        assert_eq!(rf.w_rf.shape(), (6, 4));
    }

    #[test]
    fn hc_bounded_by_dc() {
        let params = ChannelParams::multipath(32, 16);
        for trial in 0..10 {
            let ch = draw_trial(&params, trial).unwrap();
            let l = link(1.0);
            for b in [1, 4, 8] {
                let q = QuantizerModel::new(b).unwrap();
                let (_, dc) = dc_rate(&ch, &l, &q).unwrap();
                let (hd, hc) = hc_rate(&ch, 4, &l, &q).unwrap();
                assert_eq!(hd.h_eff.shape(), (4, 32));
                assert!(hd.inner.n_streams <= 4);
                assert!(hc <= dc + 1e-9);
            }
        }
    }

    #[test]
    fn rates_nondecreasing_in_bits() {
        let params = ChannelParams::multipath(16, 8);
        let l = link(1.0);
        for trial in 0..5 {
            let ch = draw_trial(&params, trial).unwrap();
            let ac = ac_beamformer(&ch).unwrap();
            let dc = DcDesign::new(&ch.h, &l).unwrap();
            let hc = HcDesign::new(&ch, 3, &l).unwrap();
            let mut prev = [0.0f64; 3];
            for b in 1..=16 {
                let q = QuantizerModel::new(b).unwrap();
                let now = [
                    ac_rate(&ac, &l, &q),
                    dc.quantized_rate(&l, &q).unwrap(),
                    hc.quantized_rate(&l, &q).unwrap(),
                ];
                for i in 0..3 {
                    assert!(now[i] >= prev[i] - 1e-12, "scheme {i} decreased at b={b}");
                }
                prev = now;
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn waterfill_kkt(sing in proptest::collection::vec(0.0f64..10.0, 1..12), p in 1e-3f64..1e3, noise in 1e-3f64..10.0) {
                prop_assume!(sing.iter().any(|s| *s > 1e-6));
                let alloc = waterfill(&sing, p, noise).unwrap();
                let total: f64 = alloc.iter().sum();
                prop_assert!((total - p).abs() <= 1e-12 * p);
                prop_assert!(alloc.iter().all(|x| *x >= 0.0));
                let levels: Vec<f64> = alloc.iter().zip(&sing)
                    .filter(|(a, _)| **a > 0.0)
                    .map(|(a, s)| a + noise / (s * s))
                    .collect();
                let mu = levels[0];
                for l in &levels {
                    prop_assert!((l - mu).abs() <= 1e-10 * mu.max(1.0));
                }
                // Inactive dimensions sit above the water line.
                for (a, s) in alloc.iter().zip(&sing) {
                    if *a == 0.0 && *s > 0.0 {
                        prop_assert!(noise / (s * s) >= mu - 1e-10 * mu.max(1.0));
                    }
                }
            }
        }
    }
}
