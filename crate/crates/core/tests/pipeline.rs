// End-to-end chains across waveform, channel, front end and processors.

use num_complex::Complex64;
use rand::Rng;

use rydar::atomic::AtomicParams;
use rydar::channel::{apply_selectivity, propagate, Awgn, PathSet, SelectivityProfile};
use rydar::comms::{demod_fsk, measure_ber, measure_ber_with_erasures, ErasurePolicy};
use rydar::frontend::{measure_waveform, NoiseParams, ReceiverConfig};
use rydar::par::ExecMode;
use rydar::radar::{range_resolution, stepped_synthesis_range, DetectionConfig};
use rydar::seed;
use rydar::waveform::{gen_freq_hop, gen_fsk, FskParams, HopPlan, Retune, Waveform};

fn bits(n: usize, s: u64) -> Vec<u8> {
    let mut rng = seed::rng(&[s, 1]);
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

fn atomic() -> AtomicParams {
    AtomicParams::normalized(1.0, 1.0)
}

#[test]
fn fsk_loopback_through_receiver_is_exact() {
    let p = FskParams::new(4, 80e3, 1.28e6);
    let receiver = ReceiverConfig::default();
    for msg in 0..100 {
        let tx_bits = bits(2 * 64, msg);
        let tx = gen_fsk(&tx_bits, &p).unwrap();
        let rx = propagate(&tx, &PathSet::single(0.0, 1.0), Awgn::off()).unwrap();
        let trace = measure_waveform(
            &rx,
            &receiver,
            &atomic(),
            &NoiseParams::silent(),
            ExecMode::Sequential,
        )
        .unwrap();
        let d = demod_fsk(&trace, &p).unwrap();
        assert_eq!(d.bits, tx_bits, "message {msg}");
    }
}

/// Four-hop FSK burst: `per_hop` symbols on each of four tuning centres.
fn hopped_fsk(p: &FskParams, tx_bits: &[u8], per_hop: usize) -> Waveform {
    let mut w = gen_fsk(tx_bits, p).unwrap();
    let sym_time = 1.0 / p.symbol_rate;
    w.retune_schedule = (1..4)
        .map(|h| Retune {
            time_s: (h * per_hop) as f64 * sym_time,
            centre_hz: h as f64 * 2e6,
        })
        .collect();
    w
}

#[test]
fn deep_fade_step_dominates_errors() {
    let p = FskParams::new(4, 80e3, 1.28e6);
    let per_hop = 2000;
    let tx_bits = bits(2 * 4 * per_hop, 77);
    let w = hopped_fsk(&p, &tx_bits, per_hop);
    // sensitivity 1 everywhere except a 0.1 notch at the third hop (4 MHz)
    let profile = SelectivityProfile::new(vec![(3e6, 1.0), (4e6, 0.1), (5e6, 1.0)]).unwrap();
    let faded = apply_selectivity(&w, &profile, 0.0);
    let sigma = 0.5;
    let rx = propagate(&faded, &PathSet::single(0.0, 1.0), Awgn::new(sigma, 5)).unwrap();
    let receiver = ReceiverConfig {
        retune_latency: 0.0,
        ..ReceiverConfig::default()
    };
    let trace = measure_waveform(
        &rx,
        &receiver,
        &atomic(),
        &NoiseParams::silent(),
        ExecMode::Parallel,
    )
    .unwrap();
    let d = demod_fsk(&trace, &p).unwrap();
    let hop_bits = 2 * per_hop;
    let errors: Vec<usize> = (0..4)
        .map(|h| {
            let span = h * hop_bits..(h + 1) * hop_bits;
            measure_ber(&tx_bits[span.clone()], &d.bits[span])
                .unwrap()
                .n_errors
        })
        .collect();
    let total: usize = errors.iter().sum();
    assert!(errors[2] as f64 > 0.9 * total as f64, "{errors:?}");
}

#[test]
fn retune_dead_time_erases_symbols() {
    let p = FskParams::new(4, 80e3, 1.28e6);
    let per_hop = 200;
    let tx_bits = bits(2 * 4 * per_hop, 78);
    let w = hopped_fsk(&p, &tx_bits, per_hop);
    // 100 µs dead time = 8 symbols after each of the three retunes
    let receiver = ReceiverConfig {
        retune_latency: 100e-6,
        ..ReceiverConfig::default()
    };
    let trace = measure_waveform(
        &w,
        &receiver,
        &atomic(),
        &NoiseParams::silent(),
        ExecMode::Sequential,
    )
    .unwrap();
    assert_eq!(trace.invalid_count(), 3 * 128);
    let d = demod_fsk(&trace, &p).unwrap();
    assert_eq!(d.erased.iter().filter(|e| **e).count(), 24);
    let dropped = measure_ber_with_erasures(&tx_bits, &d, ErasurePolicy::Drop).unwrap();
    assert_eq!((dropped.n_bits, dropped.n_errors), (tx_bits.len() - 48, 0));
    let counted = measure_ber_with_erasures(&tx_bits, &d, ErasurePolicy::CountAsError).unwrap();
    assert_eq!((counted.n_bits, counted.n_errors), (tx_bits.len(), 48));
}

#[test]
fn noise_free_stepped_ranging_through_receiver() {
    let plan = HopPlan {
        steps: 100,
        step_spacing: 10e6,
        dwell: 1.1e-3,
        step_bandwidth: 100e3,
        receiver_limit: 10e6,
    };
    let fs = 250e3;
    let tx = gen_freq_hop(&plan, fs).unwrap().with_carrier(10e9);
    let per = tx.len() / plan.steps;
    let receiver = ReceiverConfig {
        lo_amplitude: 1000.0,
        ..ReceiverConfig::default()
    };
    for truth in [1.6, 1.6731, 1.75, 1.8888, 1.9] {
        let echo = propagate(&tx, &PathSet::monostatic(truth, 1.0), Awgn::off()).unwrap();
        let trace = measure_waveform(
            &echo,
            &receiver,
            &atomic(),
            &NoiseParams::silent(),
            ExecMode::Sequential,
        )
        .unwrap();
        let steps: Vec<Complex64> = (0..plan.steps)
            .map(|i| {
                let span = i * per..(i + 1) * per;
                let (sum, n) = trace.samples[span.clone()]
                    .iter()
                    .zip(&trace.valid[span])
                    .filter(|(_, ok)| **ok)
                    .fold((Complex64::new(0.0, 0.0), 0usize), |(s, n), (z, _)| {
                        (s + z, n + 1)
                    });
                sum / n as f64
            })
            .collect();
        let r = stepped_synthesis_range(&steps, &plan, 5.0, &DetectionConfig::default())
            .unwrap()
            .range()
            .unwrap();
        assert!((r - truth).abs() <= 1.5e-3, "{truth}: {r}");
    }
    assert!((range_resolution(plan.synthesized_bandwidth()).unwrap() - 0.1499).abs() < 1e-3);
}
