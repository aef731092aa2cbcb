use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mmrx_core::channel::{draw_trial, ChannelParams};
use mmrx_core::combining::{dc_rate, hc_rf_combiner, waterfill};
use mmrx_core::{LinkConfig, QuantizerModel};

fn link() -> LinkConfig {
    LinkConfig {
        tx_power: 1.0,
        noise_power: 1.0,
        bandwidth_hz: 1e9,
    }
}

fn kernels(c: &mut Criterion) {
    let params = ChannelParams::multipath(64, 16);
    let h = draw_trial(&params, 0).unwrap();
    let q = QuantizerModel::new(4).unwrap();
    let sigma: Vec<f64> = (1..=16).map(|i| 10.0 / i as f64).collect();

    c.bench_function("draw_channel_64x16", |b| {
        let mut t = 0;
        b.iter(|| {
            t += 1;
            draw_trial(black_box(&params), t).unwrap()
        })
    });
    c.bench_function("waterfill_16", |b| b.iter(|| waterfill(black_box(&sigma), 1.0, 0.1).unwrap()));
    c.bench_function("alternating_projection_16x4", |b| b.iter(|| hc_rf_combiner(black_box(&h), 4).unwrap()));
    c.bench_function("dc_rate_64x16", |b| b.iter(|| dc_rate(black_box(&h), &link(), &q).unwrap()));
}

criterion_group!(benches, kernels);
criterion_main!(benches);
