//! Benchmark groups for the `sts-core` hot paths.

use criterion::{black_box, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sts_core::codec::{rs_encode, Codebook, InfoSymbols};
use sts_core::detector::{combine_energy, detect};
use sts_core::{Channel, ChannelConfig, ChannelModel, CodeParams, DetectedToneSets, Field};

pub fn field(c: &mut Criterion) {
    let f = Field::new(9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pairs: Vec<(u16, u16)> = (0..1024)
        .map(|_| (rng.gen_range(0..512), rng.gen_range(0..512)))
        .collect();
    c.bench_function("gf512_mul_1024", |b| {
        b.iter(|| {
            pairs
                .iter()
                .fold(0u16, |acc, &(x, y)| acc ^ f.mul(black_box(x), black_box(y)))
        })
    });
}

pub fn codec(c: &mut Criterion) {
    let params = CodeParams::with_exponent(9, 14, 1).unwrap();
    c.bench_function("rs_encode_14_1", |b| {
        b.iter(|| rs_encode(&params, black_box(&InfoSymbols(vec![300]))).unwrap())
    });
    c.bench_function("codebook_build_gf512", |b| {
        b.iter(|| Codebook::new(black_box(&params)).unwrap())
    });

    let book = Codebook::new(&params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let schedules: Vec<_> = (0..30)
        .map(|_| book.schedule(rng.gen_range(0..512)))
        .collect();
    let mut detected = DetectedToneSets::from_schedules(14, &schedules)
        .sets()
        .to_vec();
    for set in &mut detected {
        set.extend((0..5).map(|_| rng.gen_range(0..512)));
    }
    let detected = DetectedToneSets::new(detected);
    c.bench_function("list_decode_30_users", |b| {
        b.iter(|| book.list_decode(black_box(&detected), 6).unwrap())
    });
}

pub fn trial(c: &mut Criterion) {
    let params = CodeParams::with_exponent(9, 14, 1).unwrap();
    let book = Codebook::new(&params).unwrap();
    for model in [ChannelModel::FlatRayleigh, ChannelModel::PedB] {
        let channel = Channel::new(ChannelConfig {
            model,
            n_rx: 2,
            ..ChannelConfig::default()
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let schedules: Vec<_> = (0..30)
            .map(|_| book.schedule(rng.gen_range(0..512)))
            .collect();
        c.bench_function(&format!("multiuser_trial_{}", model.name()), |b| {
            b.iter(|| {
                let gains = channel.gen_gains(schedules.len(), &mut rng);
                let grid = channel.transmit(&schedules, &gains, &mut rng).unwrap();
                let detected = detect(&combine_energy(&grid), 9.21);
                book.list_decode(&detected, 6).unwrap()
            })
        });
    }
}
