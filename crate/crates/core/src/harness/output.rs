//! Run directories: `config.toml` snapshot, CSV records and `summary.txt`.
//! Numeric columns use `report::fmt_f64`; wall-clock time appears only in
//! the summary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::config::ScenarioConfig;
use super::runner::{GateCase, Records, ScenarioReport, SweepPoint};
use crate::comms::append_ber_csv;
use crate::error::Result;
use crate::report::fmt_f64;

pub const RADAR_CSV_HEADER: [&str; 6] = ["trial", "seed", "truth_m", "est_m", "err_m", "method"];

/// `<root>/<kind>-<first 12 hex digits of the config hash>`.
pub fn run_dir(root: &Path, cfg: &ScenarioConfig) -> PathBuf {
    root.join(format!("{}-{}", cfg.kind.as_str(), &cfg.hash()[..12]))
}

pub fn records_file(report: &ScenarioReport) -> &'static str {
    match report.records {
        Records::Radar(_) => "radar.csv",
        Records::Comms(_) => "ber.csv",
        Records::Spectrum(_) => "spectrum.csv",
        Records::Gate(_) => "gate.csv",
    }
}

pub fn write_records(report: &ScenarioReport, path: &Path) -> Result<()> {
    if path.exists() {
        fs::remove_file(path)?;
    }
    match &report.records {
        Records::Radar(run) => {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(RADAR_CSV_HEADER)?;
            for t in &run.report.trials {
                w.write_record([
                    t.trial.to_string(),
                    t.seed.to_string(),
                    fmt_f64(t.truth_m),
                    fmt_f64(t.estimate_m),
                    fmt_f64(t.error_m()),
                    t.method.as_str().to_string(),
                ])?;
            }
            w.write_record(["summary", "", "", "", &fmt_f64(run.report.rmse_m), "RMSE"])?;
            w.flush()?;
        }
        Records::Comms(run) => {
            let rows: Vec<_> = run.trials.iter().map(|t| (t.trial, t.report)).collect();
            append_ber_csv(path, &rows)?;
        }
        Records::Spectrum(s) => {
            let mut w = csv::Writer::from_path(path)?;
            let mut header = vec!["detuning_hz", "p_out_lo", "gradient_lo"];
            if s.p_out_rf.is_some() {
                header.extend(["p_out_rf", "gradient_rf"]);
            }
            w.write_record(&header)?;
            for i in 0..s.detuning_hz.len() {
                let mut row = vec![
                    fmt_f64(s.detuning_hz[i]),
                    fmt_f64(s.p_out_lo[i]),
                    fmt_f64(s.gradient_lo[i]),
                ];
                if let (Some(p), Some(g)) = (&s.p_out_rf, &s.gradient_rf) {
                    row.push(fmt_f64(p[i]));
                    row.push(fmt_f64(g[i]));
                }
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        Records::Gate(g) => {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record([
                "case",
                "declared_bandwidth_hz",
                "max_occupancy_hz",
                "limit_hz",
                "accepted",
                "reason",
            ])?;
            let row = |c: &GateCase| {
                vec![
                    c.name.clone(),
                    fmt_f64(c.declared_bandwidth_hz),
                    fmt_f64(c.max_occupancy_hz),
                    fmt_f64(c.limit_hz),
                    c.accepted.to_string(),
                    c.reason.clone().unwrap_or_default(),
                ]
            };
            w.write_record(row(&g.lfm))?;
            w.write_record(row(&g.hop))?;
            w.flush()?;
        }
    }
    Ok(())
}

pub fn summary_text(report: &ScenarioReport, cfg: &ScenarioConfig) -> String {
    let mut lines = vec![
        format!("rydar {}", report.version),
        format!("kind: {}", report.kind.as_str()),
        format!("config_hash: {}", report.config_hash),
        format!("seed: {}", report.seed),
        format!("trials: {}", cfg.trials),
    ];
    match &report.records {
        Records::Radar(r) => {
            lines.push(format!("awgn_sigma_v_per_m: {}", fmt_f64(r.awgn_sigma)));
            if let Some(b) = r.bound_m {
                lines.push(format!("delay_bound_m: {}", fmt_f64(b)));
            }
            lines.push(format!("resolution_m: {}", fmt_f64(r.report.resolution_m)));
            lines.push(format!("rmse_m: {}", fmt_f64(r.report.rmse_m)));
            lines.push(format!("missed_detections: {}", r.report.missed));
            lines.push(format!(
                "acceptance_rmse_m: {}",
                fmt_f64(r.acceptance_rmse_m)
            ));
        }
        Records::Comms(c) => {
            lines.push(format!("awgn_sigma_v_per_m: {}", fmt_f64(c.awgn_sigma)));
            lines.push(format!("ebn0_db: {}", fmt_f64(c.ebn0_db)));
            lines.push(format!("ber: {}", fmt_f64(c.ber())));
            lines.push(format!("acceptance_ber: {}", fmt_f64(c.acceptance_ber)));
        }
        Records::Spectrum(s) => {
            lines.push(format!("k0: {}", fmt_f64(s.k0)));
            lines.push(format!(
                "peak_separation_hz: {}",
                fmt_f64(s.peak_separation_hz)
            ));
            lines.push(format!("peak_shift_hz: {}", fmt_f64(s.peak_shift_hz)));
            lines.push(format!("dither_hz: {}", fmt_f64(s.dither_hz)));
            lines.push(format!(
                "gradient_at_f0_lo: {}",
                fmt_f64(s.gradient_at_f0_lo)
            ));
            lines.push(format!(
                "gradient_at_f0_rf: {}",
                fmt_f64(s.gradient_at_f0_rf)
            ));
        }
        Records::Gate(g) => {
            lines.push(format!(
                "synthesized_bandwidth_hz: {}",
                fmt_f64(g.synthesized_bandwidth_hz)
            ));
            for c in [&g.lfm, &g.hop] {
                lines.push(format!(
                    "{}: {} (occupancy {} Hz){}",
                    c.name,
                    if c.accepted { "accepted" } else { "rejected" },
                    fmt_f64(c.max_occupancy_hz),
                    c.reason
                        .as_ref()
                        .map(|r| format!(": {r}"))
                        .unwrap_or_default()
                ));
            }
        }
    }
    match report.acceptance() {
        Some(true) => lines.push("acceptance: PASS".into()),
        Some(false) => lines.push("acceptance: FAIL".into()),
        None => {}
    }
    lines.push(format!("wall_clock_s: {:.3}", report.wall_clock_s));
    lines.join("\n") + "\n"
}

/// Writes a full run directory under `root` and returns its path.
pub fn write_run(root: &Path, cfg: &ScenarioConfig, report: &ScenarioReport) -> Result<PathBuf> {
    let dir = run_dir(root, cfg);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("config.toml"), cfg.canonical())?;
    write_records(report, &dir.join(records_file(report)))?;
    fs::write(dir.join("summary.txt"), summary_text(report, cfg))?;
    Ok(dir)
}

/// Per-point run directories plus `sweep.csv` (axis value, hash, metric).
pub fn write_sweep(
    root: &Path,
    base: &ScenarioConfig,
    axis: &str,
    points: &[SweepPoint],
) -> Result<PathBuf> {
    let dir = root.join(format!(
        "sweep-{}-{}",
        axis.replace('.', "_"),
        &base.hash()[..12]
    ));
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("base_config.toml"), base.canonical())?;
    let mut w = csv::Writer::from_path(dir.join("sweep.csv"))?;
    w.write_record(["point", "value", "config_hash", "seed", "metric"])?;
    for (i, p) in points.iter().enumerate() {
        write_run(&dir, &p.config, &p.report)?;
        w.write_record([
            i.to_string(),
            fmt_f64(p.value),
            p.report.config_hash.clone(),
            p.config.seed.to_string(),
            fmt_f64(p.report.metric()),
        ])?;
    }
    w.flush()?;
    let mut summary = fs::File::create(dir.join("summary.txt"))?;
    writeln!(summary, "axis: {axis}")?;
    writeln!(summary, "points: {}", points.len())?;
    Ok(dir)
}
