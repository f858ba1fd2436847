// Runner, persistence and sweep behaviour of the scenario harness.

use std::fs;

use rydar::harness::config::ScenarioKind;
use rydar::harness::output::write_run;
use rydar::harness::runner::{emit_spectrum_demo, run_scenario, run_trials, sweep, Records};
use rydar::harness::ScenarioConfig;
use rydar::par::ExecMode;
use rydar::Error;

const RADAR: &str = r#"
kind = "radar_ranging"
trials = 12
seed = 99

[receiver]
lo_amplitude_v_per_m = 1000.0

[noise]
sigma_bgn_v_per_m = 0.5

[radar]
steps = 40
target_bound_m = 0.02
detection_threshold = 4.0
"#;

const COMMS: &str = r#"
kind = "comms_ber"
trials = 6
seed = 5

[comms]
symbols_per_trial = 2000
ebn0_db = 7.0
isr_db = -20.0
"#;

fn cfg(text: &str) -> ScenarioConfig {
    ScenarioConfig::from_toml_str(text).unwrap()
}

fn csv_bytes(cfg: &ScenarioConfig, mode: ExecMode) -> Vec<u8> {
    let dir = tempfile::tempdir().unwrap();
    let report = run_scenario(cfg, mode).unwrap();
    let run = write_run(dir.path(), cfg, &report).unwrap();
    let name = match cfg.kind {
        ScenarioKind::RadarRanging => "radar.csv",
        ScenarioKind::CommsBer => "ber.csv",
        ScenarioKind::SpectrumDemo => "spectrum.csv",
        ScenarioKind::BandwidthGate => "gate.csv",
    };
    assert!(run.join("summary.txt").exists() && run.join("config.toml").exists());
    fs::read(run.join(name)).unwrap()
}

#[test]
fn identical_config_gives_identical_csv() {
    for text in [RADAR, COMMS] {
        let c = cfg(text);
        let a = csv_bytes(&c, ExecMode::Parallel);
        let b = csv_bytes(&c, ExecMode::Sequential);
        assert_eq!(a, b);
        assert!(!a.is_empty());
    }
}

#[test]
fn trial_order_does_not_matter() {
    let c = cfg(COMMS);
    let forward = run_trials(&c, &[0, 1, 2, 3, 4, 5], ExecMode::Sequential).unwrap();
    let shuffled = run_trials(&c, &[4, 1, 5, 0, 3, 2], ExecMode::Parallel).unwrap();
    assert_eq!(forward.records, shuffled.records);

    let c = cfg(RADAR);
    let full = run_scenario(&c, ExecMode::Sequential).unwrap();
    let odd: Vec<usize> = (0..12).filter(|t| t % 2 == 1).collect();
    let even: Vec<usize> = (0..12).filter(|t| t % 2 == 0).rev().collect();
    let merged = run_trials(&c, &odd, ExecMode::Sequential)
        .unwrap()
        .merge(&run_trials(&c, &even, ExecMode::Sequential).unwrap())
        .unwrap();
    assert_eq!(merged.records, full.records);
}

#[test]
fn reports_refuse_to_mix_configs() {
    let a = run_scenario(&cfg(COMMS), ExecMode::Sequential).unwrap();
    let mut other = cfg(COMMS);
    other.seed = 6;
    let b = run_scenario(&other, ExecMode::Sequential).unwrap();
    assert!(matches!(a.merge(&b), Err(Error::HashMismatch(_, _))));
    assert!(a.merge(&a).is_err());
}

#[test]
fn radar_csv_has_summary_row() {
    let text = String::from_utf8(csv_bytes(&cfg(RADAR), ExecMode::Parallel)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "trial,seed,truth_m,est_m,err_m,method");
    assert_eq!(lines.len(), 1 + 12 + 1);
    assert!(lines[1].ends_with(",STEPPED_SYNTH"));
    let last = lines.last().unwrap();
    assert!(
        last.starts_with("summary,,,,") && last.ends_with(",RMSE"),
        "{last}"
    );
}

#[test]
fn sweep_points_are_independent_and_resolvable() {
    let c = cfg(COMMS);
    assert!(sweep(&c, "comms.isr_db", &[], ExecMode::Parallel)
        .unwrap()
        .is_empty());
    assert!(matches!(
        sweep(&c, "comms.no_such_field", &[1.0], ExecMode::Parallel),
        Err(Error::Schema { .. })
    ));
    assert!(matches!(
        sweep(&c, "kind", &[1.0], ExecMode::Parallel),
        Err(Error::Schema { .. })
    ));

    let values = [-28.0, -26.0, -24.0, -22.0, -20.0];
    let points = sweep(&c, "comms.isr_db", &values, ExecMode::Parallel).unwrap();
    assert_eq!(points.len(), 5);
    for (p, v) in points.iter().zip(values) {
        assert_eq!(p.config.comms.as_ref().unwrap().isr_db, v);
    }
    let mut seeds: Vec<u64> = points.iter().map(|p| p.config.seed).collect();
    seeds.dedup();
    assert_eq!(seeds.len(), 5);
    // optional fields absent from the file still sweep
    let ebn0 = sweep(&c, "comms.ebn0_db", &[4.0, 10.0], ExecMode::Parallel).unwrap();
    assert!(ebn0[0].report.metric() > ebn0[1].report.metric());
}

#[test]
fn trial_count_is_validated() {
    let text = COMMS.replace("trials = 6", "trials = 0");
    assert!(matches!(
        ScenarioConfig::from_toml_str(&text),
        Err(Error::Schema { .. })
    ));
}

const SPECTRUM: &str = r#"
kind = "spectrum_demo"
trials = 1
seed = 0

[atomic]
omega_p_rad_s = 1.0
omega_c_rad_s = 2.0

[spectrum]
peak_separation_hz = 5.0e6
points = 801
"#;

#[test]
fn spectrum_without_rf_is_one_series() {
    let s = emit_spectrum_demo(&cfg(SPECTRUM)).unwrap();
    assert!(s.p_out_rf.is_none() && s.gradient_rf.is_none());
    assert_eq!(s.tracked_peak_lo_hz, 0.0);
    assert_eq!(s.peak_shift_hz, 0.0);
    // tracked peak at f0: the gradient changes sign there
    let mid = s.detuning_hz.iter().position(|f| *f == 0.0).unwrap();
    assert!(s.gradient_lo[mid - 1] > 0.0 && s.gradient_lo[mid + 1] < 0.0);
}

#[test]
fn spectrum_shift_and_gradient_linearity() {
    let with = |a: f64| {
        let mut c = cfg(SPECTRUM);
        c.spectrum.as_mut().unwrap().rf_amplitude_v_per_m = a;
        emit_spectrum_demo(&c).unwrap()
    };
    let one = with(300.0);
    let two = with(600.0);
    assert!((one.peak_shift_hz - 300.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-9);
    let d1 = one.gradient_at_f0_rf - one.gradient_at_f0_lo;
    let d2 = two.gradient_at_f0_rf - two.gradient_at_f0_lo;
    assert!((d2 / d1 - 2.0).abs() < 0.02, "{d1} {d2}");
    let text = {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(SPECTRUM);
        c.spectrum.as_mut().unwrap().rf_amplitude_v_per_m = 300.0;
        let r = run_scenario(&c, ExecMode::Parallel).unwrap();
        assert!(matches!(r.records, Records::Spectrum(_)));
        let run = write_run(dir.path(), &c, &r).unwrap();
        fs::read_to_string(run.join("spectrum.csv")).unwrap()
    };
    assert!(text.starts_with("detuning_hz,p_out_lo,gradient_lo,p_out_rf,gradient_rf\n"));
    assert_eq!(text.lines().count(), 802);
}

#[test]
fn trial_errors_carry_context() {
    // LO too weak for the signal: every trial fails the dominance check
    let text = COMMS.replace(
        "[comms]",
        "[receiver]\nlo_amplitude_v_per_m = 5.0\n\n[comms]",
    );
    match run_scenario(&cfg(&text), ExecMode::Sequential) {
        Err(e @ Error::Trial { .. }) => assert!(matches!(e.root(), Error::LoRatio { .. })),
        other => panic!("{other:?}"),
    }
}
