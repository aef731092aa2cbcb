use mmrx_core::channel::{draw_trial, ChannelParams};
use mmrx_core::combining::{ac_beamformer, ac_rate, dc_rate, hc_rate, hc_rf_combiner, waterfill, LinkConfig};
use mmrx_core::power::{total_power, Architecture, ComponentPowerModel};
use mmrx_core::quantization::QuantizerModel;
use proptest::prelude::*;

fn link(noise_db: f64) -> LinkConfig {
    LinkConfig {
        tx_power: 1.0,
        noise_power: 10f64.powf(noise_db / 10.0),
        bandwidth_hz: 1e9,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn digital_dominates_per_realization(seed in 0u64..10_000, b in 1u32..=10, noise_db in -10.0f64..25.0) {
        let mut p = ChannelParams::multipath(16, 8);
        p.seed = seed;
        let h = draw_trial(&p, 0).unwrap();
        let l = link(noise_db);
        let q = QuantizerModel::new(b).unwrap();
        let dc = dc_rate(&h, &l, &q).unwrap().1;
        let hc = hc_rate(&h, 3, &l, &q).unwrap().1;
        let ac = ac_rate(&ac_beamformer(&h).unwrap(), &l, &q);
        prop_assert!(dc >= hc - 1e-9 * dc);
        prop_assert!(dc >= ac - 1e-9 * dc);
    }

    #[test]
    fn rf_combiner_is_constant_modulus(seed in 0u64..10_000, n_rf in 1usize..=8) {
        let mut p = ChannelParams::multipath(16, 8);
        p.seed = seed;
        let h = draw_trial(&p, 1).unwrap();
        let rf = hc_rf_combiner(&h, n_rf).unwrap();
        let m = 1.0 / 8f64.sqrt();
        prop_assert!(rf.w_rf.iter().all(|z| (z.norm() - m).abs() < 1e-15));
        prop_assert_eq!(rf.w_rf.shape(), (8, n_rf));
    }

    #[test]
    fn waterfilling_is_feasible(sigma in proptest::collection::vec(0.0f64..10.0, 1..12), p in 0.01f64..100.0, n0 in 0.01f64..10.0) {
        prop_assume!(sigma.iter().any(|s| *s > 1e-6));
        let alloc = waterfill(&sigma, p, n0).unwrap();
        prop_assert!(alloc.iter().all(|a| *a >= 0.0));
        prop_assert!((alloc.iter().sum::<f64>() - p).abs() <= 1e-12 * p);
    }

    #[test]
    fn power_grows_with_bits(n_rx in 1usize..64, b in 1u32..16) {
        for arch in [Architecture::Analog, Architecture::Digital, Architecture::Hybrid(1)] {
            let m = ComponentPowerModel::HPADC;
            let lo = total_power(arch, &m, n_rx, 1e9, b).unwrap().total;
            let hi = total_power(arch, &m, n_rx, 1e9, b + 1).unwrap().total;
            prop_assert!(hi > lo);
        }
    }
}
