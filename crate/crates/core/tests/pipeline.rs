use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sts_core::detector::{combine_energy, detect, p_miss, threshold_for_pfa};
use sts_core::harness::{
    run_experiment, run_miss_detection, write_csv, DecodeThreshold, ExperimentKind, MissPoint,
    DECODE_COLUMNS, MISS_COLUMNS,
};
use sts_core::stats::wilson_interval;
use sts_core::{
    Channel, ChannelConfig, ChannelModel, DetectorConfig, ExperimentConfig, InterferenceMode,
    OutcomeCounts, Sigma2Mode, ToneSchedule,
};

fn miss_cfg(model: ChannelModel, sir: Vec<f64>, n_rx: Vec<usize>, trials: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::preset(ExperimentKind::MissDetection);
    cfg.seed = 7;
    cfg.sir_points_db = sir;
    cfg.n_rx = n_rx;
    cfg.trials_per_point = trials;
    cfg.channel.model = model;
    cfg
}

fn miss_points(cfg: &ExperimentConfig) -> Vec<MissPoint> {
    match run_miss_detection(cfg).unwrap() {
        OutcomeCounts::MissDetection(p) => p,
        OutcomeCounts::MultiuserDecode(_) => unreachable!(),
    }
}

fn csv_bytes(cfg: &ExperimentConfig) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(&run_experiment(cfg).unwrap().counts, &mut out).unwrap();
    out
}

#[test]
fn common_interference_is_shared_across_antennas() {
    for (mode, shared) in [
        (InterferenceMode::Common, true),
        (InterferenceMode::Independent, false),
    ] {
        let channel = Channel::new(ChannelConfig {
            n_rx: 4,
            interference: mode,
            ..ChannelConfig::default()
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gains = channel.gen_gains(0, &mut rng);
        let grid = channel.transmit(&[], &gains, &mut rng).unwrap();
        for i in 1..4 {
            assert_eq!(
                grid.antenna(i) == grid.antenna(0),
                shared,
                "{mode:?} antenna {i}"
            );
        }
    }
}

#[test]
fn received_tone_energy_matches_sir() {
    for model in [
        ChannelModel::Awgn,
        ChannelModel::FlatRayleigh,
        ChannelModel::PedB,
    ] {
        let cfg = ChannelConfig {
            model,
            sir_db: -15.0,
            n_sym: 1,
            ..ChannelConfig::default()
        };
        let er = cfg.tone_energy();
        let channel = Channel::new(cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 20_000;
        let mut total = 0.0;
        for _ in 0..trials {
            let tone = rng.gen_range(0..512);
            let sched = ToneSchedule::new(vec![tone]);
            let gains = channel.gen_gains(1, &mut rng);
            let grid = channel
                .transmit(std::slice::from_ref(&sched), &gains, &mut rng)
                .unwrap();
            total += grid.get(0, 0, tone).norm_sqr();
        }
        let mean = total / trials as f64;
        assert!(
            (mean / (er + 1.0) - 1.0).abs() < 0.02,
            "{model:?}: mean {mean} vs {}",
            er + 1.0
        );
    }
}

#[test]
fn single_antenna_detector_matches_closed_form() {
    let er = ChannelConfig {
        sir_db: -14.0,
        ..ChannelConfig::default()
    }
    .tone_energy();
    let det = DetectorConfig::default();
    let x = threshold_for_pfa(&det, 1.0).unwrap();
    let expected = p_miss(x, 1, 1.0, er).unwrap();

    let channel = Channel::new(ChannelConfig {
        sir_db: -14.0,
        n_sym: 14,
        ..ChannelConfig::default()
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut misses, mut total) = (0u64, 0u64);
    for _ in 0..4000 {
        let sched = ToneSchedule::new((0..14).map(|_| rng.gen_range(0..512)).collect());
        let gains = channel.gen_gains(1, &mut rng);
        let grid = channel
            .transmit(std::slice::from_ref(&sched), &gains, &mut rng)
            .unwrap();
        let sets = detect(&combine_energy(&grid), x);
        // Block fading: the 14 symbols of one trial share a gain, so count
        // only the first symbol to keep decisions independent.
        misses += u64::from(!sets.sets()[0].contains(&sched.tone(0)));
        total += 1;
    }
    let (_, lo, hi) = wilson_interval(misses, total, 0.99);
    assert!(
        lo <= expected && expected <= hi,
        "{lo} <= {expected} <= {hi}"
    );
}

#[test]
fn pedb_marginal_follows_the_flat_rayleigh_curve() {
    let points = miss_points(&miss_cfg(
        ChannelModel::PedB,
        vec![-16.0, -10.0],
        vec![1],
        20_000,
    ));
    for p in points {
        let (_, lo, hi) = wilson_interval(p.n_miss, p.n_trials, 0.99);
        assert!(lo <= p.p_miss_analytic && p.p_miss_analytic <= hi, "{p:?}");
    }
}

#[test]
fn estimated_interference_power_keeps_false_alarm_near_target() {
    for mode in [InterferenceMode::Common, InterferenceMode::Independent] {
        let mut cfg = miss_cfg(ChannelModel::FlatRayleigh, vec![-12.0], vec![1, 2], 2000);
        cfg.channel.interference = mode;
        cfg.detector.sigma2_mode = Sigma2Mode::Estimated;
        let known = {
            let mut k = cfg.clone();
            k.detector.sigma2_mode = Sigma2Mode::Known;
            miss_points(&k)
        };
        for (est, known) in miss_points(&cfg).iter().zip(&known) {
            let ratio = est.p_fa() / known.p_fa().max(1e-12);
            assert!(
                (0.8..1.25).contains(&ratio),
                "{mode:?} N_r={}: {ratio}",
                est.n_rx
            );
            assert!((est.p_miss() - known.p_miss()).abs() < 0.02);
        }
    }
}

#[test]
fn wilson_interval_covers_at_nominal_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (p, n, runs) = (0.03, 400u64, 1000);
    let covered = (0..runs)
        .filter(|_| {
            let k = (0..n).filter(|_| rng.gen_bool(p)).count() as u64;
            let (_, lo, hi) = wilson_interval(k, n, 0.95);
            lo <= p && p <= hi
        })
        .count();
    assert!(covered >= 930, "coverage {covered}/{runs}");
}

#[test]
fn false_alarm_interval_covers_target() {
    let mut cfg = miss_cfg(ChannelModel::FlatRayleigh, vec![-10.0], vec![1], 20);
    let covered = (0..100)
        .filter(|&seed| {
            cfg.seed = seed;
            let p = &miss_points(&cfg)[0];
            let (_, lo, hi) = wilson_interval(p.n_false_alarm, p.n_fa_opportunities, 0.95);
            lo <= 0.01 && 0.01 <= hi
        })
        .count();
    assert!(covered >= 93, "coverage {covered}/100");
}

#[test]
fn csv_is_deterministic_and_seed_sensitive() {
    let cfg = miss_cfg(
        ChannelModel::FlatRayleigh,
        vec![-12.0, -6.0],
        vec![1, 4],
        500,
    );
    let a = csv_bytes(&cfg);
    assert_eq!(a, csv_bytes(&cfg));
    let mut other = cfg.clone();
    other.seed += 1;
    assert_ne!(a, csv_bytes(&other));
}

#[test]
fn miss_csv_parses_back() {
    let cfg = miss_cfg(ChannelModel::Awgn, vec![-6.0, -18.0], vec![2, 1], 300);
    let bytes = csv_bytes(&cfg);
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    assert_eq!(reader.headers().unwrap(), MISS_COLUMNS.as_slice());
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
    assert_eq!(keys, [(-18.0, 1.0), (-18.0, 2.0), (-6.0, 1.0), (-6.0, 2.0)]);
    for r in &rows {
        assert_eq!(r[2], 300.0);
        assert!(r[4] <= r[3] && r[3] <= r[5]);
        assert!((r[7] - (r[3] - r[6])).abs() < 1e-5);
        assert!(r[9] <= r[8] && r[8] <= r[10]);
    }
}

#[test]
fn decode_accounting_partitions_users() {
    let mut cfg = ExperimentConfig::preset(ExperimentKind::MultiuserDecode);
    cfg.sir_points_db = vec![-27.0, -20.0];
    cfg.n_rx = vec![1, 2];
    cfg.trials_per_point = 300;
    cfg.decode_threshold = DecodeThreshold::Fixed(2);
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.decode_threshold, Some(2));
    let OutcomeCounts::MultiuserDecode(points) = &report.counts else {
        panic!("wrong experiment")
    };
    for p in points {
        assert_eq!(
            p.n_decoded_correct + p.n_erasure + p.n_error,
            p.n_user_trials
        );
        assert_eq!(
            p.n_user_trials + p.n_collision,
            p.n_trials * p.n_users as u64
        );
        assert!(p.n_error <= p.n_error_events);
    }

    let mut out = Vec::new();
    write_csv(&report.counts, &mut out).unwrap();
    let mut reader = csv::Reader::from_reader(out.as_slice());
    assert_eq!(reader.headers().unwrap(), DECODE_COLUMNS.as_slice());
    assert_eq!(reader.records().count(), 4);
}

#[test]
fn perfect_detection_calibrates_to_one_and_never_fails() {
    let mut cfg = ExperimentConfig::preset(ExperimentKind::MultiuserDecode);
    cfg.perfect_detection = true;
    cfg.sir_points_db = vec![-30.0];
    cfg.n_rx = vec![1];
    cfg.trials_per_point = 300;
    cfg.calibration.trials_per_point = 100;
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.decode_threshold, Some(1));
    let OutcomeCounts::MultiuserDecode(points) = &report.counts else {
        panic!("wrong experiment")
    };
    assert_eq!(points[0].n_erasure, 0);
    assert_eq!(points[0].n_error_events, 0);
}

#[test]
fn config_file_round_trip_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    let cfg = miss_cfg(ChannelModel::PedB, vec![-9.0], vec![2], 10);
    std::fs::write(&path, cfg.to_toml()).unwrap();
    let back = ExperimentConfig::from_toml(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, cfg);

    let err =
        ExperimentConfig::from_toml("experiment = \"miss_detection\"\nbogus = 1\n").unwrap_err();
    assert_eq!(err.kind(), "config");
    let partial = ExperimentConfig::from_toml("[channel]\nmodel = \"awgn\"\n").unwrap();
    assert_eq!(partial.channel.model, ChannelModel::Awgn);
    assert_eq!(
        partial.trials_per_point,
        ExperimentConfig::default().trials_per_point
    );
}
