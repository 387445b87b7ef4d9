//! Report files: per-hour trace CSV, convergence CSV and run summaries.
//!
//! Numbers are printed with Rust's shortest round-trip formatting, so equal
//! runs produce byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::costing::CostBreakdown;
use crate::engine::DispatchTrace;
use crate::error::{Error, Result};
use crate::renewable::RenewableModel;

pub const TRACE_COLUMNS: [&str; 14] = [
    "hour",
    "load_kw",
    "renewable_available_kw",
    "renewable_used_kw",
    "p_ch_kw",
    "p_dis_kw",
    "backup_kw",
    "curtailed_kw",
    "soc_start_kwh",
    "soc_kwh",
    "cost_battery",
    "cost_backup",
    "cost_penalty",
    "cost_total",
];

pub fn write_trace_csv<W: Write>(trace: &DispatchTrace, mut out: W) -> Result<()> {
    writeln!(out, "{}", TRACE_COLUMNS.join(","))?;
    for r in &trace.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.hour,
            r.load,
            r.renewable_available,
            r.renewable_used,
            r.p_ch,
            r.p_dis,
            r.backup,
            r.curtailed,
            r.soc_start,
            r.soc,
            r.cost.battery,
            r.cost.backup,
            r.cost.penalty,
            r.cost.total
        )?;
    }
    Ok(())
}

/// `hour,generation,best_cost`; one row per optimizer iteration per hour.
pub fn write_convergence_csv<W: Write>(trace: &DispatchTrace, mut out: W) -> Result<()> {
    writeln!(out, "hour,generation,best_cost")?;
    for (r, tr) in trace.records.iter().zip(&trace.convergence) {
        for (g, c) in tr.iter().enumerate() {
            writeln!(out, "{},{},{}", r.hour, g, c)?;
        }
    }
    Ok(())
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(hi > lo) {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least 2 points and hi > lo, got n={n}, [{lo}, {hi}]"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

/// Long-format surrogate grid: `irradiance_kwh_m2,wind_ms,power_kw`.
pub fn write_surface_csv<W: Write>(
    model: &RenewableModel,
    irr_grid: &[f64],
    wind_grid: &[f64],
    mut out: W,
) -> Result<()> {
    writeln!(out, "irradiance_kwh_m2,wind_ms,power_kw")?;
    let grid = model.surface(irr_grid, wind_grid);
    for (row, &g) in grid.iter().zip(irr_grid) {
        for (p, &v) in row.iter().zip(wind_grid) {
            writeln!(out, "{g},{v},{p}")?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategySummary {
    pub strategy: String,
    pub seed: u64,
    pub hours: usize,
    pub total_cost: f64,
    pub cost_battery: f64,
    pub cost_backup: f64,
    pub cost_penalty: f64,
    pub total_backup_kwh: f64,
    pub total_curtailed_kwh: f64,
    pub final_soc_kwh: f64,
}

impl StrategySummary {
    pub fn of(trace: &DispatchTrace) -> Self {
        let CostBreakdown {
            battery,
            backup,
            penalty,
            ..
        } = trace.total_breakdown();
        Self {
            strategy: trace.strategy.name().to_string(),
            seed: trace.seed,
            hours: trace.records.len(),
            total_cost: trace.total_cost,
            cost_battery: battery,
            cost_backup: backup,
            cost_penalty: penalty,
            total_backup_kwh: trace.total_backup_kwh,
            total_curtailed_kwh: trace.total_curtailed_kwh,
            final_soc_kwh: trace.records.last().map_or(trace.soc0, |r| r.soc),
        }
    }
}

pub fn summary_json(traces: &[DispatchTrace]) -> Result<String> {
    let rows: Vec<_> = traces.iter().map(StrategySummary::of).collect();
    let mut s = serde_json::to_string_pretty(&rows).map_err(std::io::Error::other)?;
    s.push('\n');
    Ok(s)
}

pub fn summary_text(traces: &[DispatchTrace]) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{:<16} {:>12} {:>10} {:>10} {:>10} {:>12} {:>14}\n",
        "strategy", "total_cost", "battery", "backup", "penalty", "backup_kwh", "curtailed_kwh"
    ));
    for t in traces {
        let r = StrategySummary::of(t);
        s.push_str(&format!(
            "{:<16} {:>12.4} {:>10.4} {:>10.4} {:>10.4} {:>12.3} {:>14.3}\n",
            r.strategy,
            r.total_cost,
            r.cost_battery,
            r.cost_backup,
            r.cost_penalty,
            r.total_backup_kwh,
            r.total_curtailed_kwh
        ));
    }
    s
}

fn write_file(path: PathBuf, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::write(&path, bytes)?;
    Ok(path)
}

/// Writes the full report set into `dir` and returns the created paths.
///
/// A single trace produces `trace.csv` and `convergence.csv`; several traces
/// produce `trace_<strategy>.csv` and `convergence_<strategy>.csv`. Convergence
/// files are only written for strategies that record one.
pub fn write_report(dir: &Path, traces: &[DispatchTrace]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let single = traces.len() == 1;
    for t in traces {
        let suffix = if single {
            String::new()
        } else {
            format!("_{}", t.strategy.name())
        };
        let mut buf = Vec::new();
        write_trace_csv(t, &mut buf)?;
        written.push(write_file(dir.join(format!("trace{suffix}.csv")), &buf)?);
        if !t.convergence.is_empty() {
            let mut buf = Vec::new();
            write_convergence_csv(t, &mut buf)?;
            written.push(write_file(
                dir.join(format!("convergence{suffix}.csv")),
                &buf,
            )?);
        }
    }
    written.push(write_file(
        dir.join("summary.txt"),
        summary_text(traces).as_bytes(),
    )?);
    written.push(write_file(
        dir.join("summary.json"),
        summary_json(traces)?.as_bytes(),
    )?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::StrategyKind;
    use crate::engine::run_closed_loop;
    use crate::io::{generate_synthetic, Config, SyntheticProfile};

    fn trace(kind: StrategyKind) -> DispatchTrace {
        let s = generate_synthetic(1, &SyntheticProfile::default(), 0).unwrap();
        let mut cfg = Config::default();
        cfg.horizon = 2;
        cfg.delta_p = 100.0;
        cfg.evo.population = 10;
        cfg.evo.generations = 3;
        run_closed_loop(&s, kind, &cfg, 1).unwrap()
    }

    #[test]
    fn surface_grid() {
        let irr = linspace(0.0, 1.0, 3).unwrap();
        assert_eq!(irr, [0.0, 0.5, 1.0]);
        let mut buf = Vec::new();
        write_surface_csv(&RenewableModel::default(), &irr, &[8.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let last = text.lines().last().unwrap();
        let p: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
        assert!((p - 238.992).abs() < 1e-6);
        assert!(linspace(1.0, 1.0, 3).is_err());
    }

    #[test]
    fn trace_csv_shape() {
        let mut buf = Vec::new();
        write_trace_csv(&trace(StrategyKind::RenewableFirst), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 25);
        assert_eq!(lines[0], TRACE_COLUMNS.join(","));
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 14));
    }

    #[test]
    fn convergence_rows() {
        let t = trace(StrategyKind::EgMpc);
        let mut buf = Vec::new();
        write_convergence_csv(&t, &mut buf).unwrap();
        let n = String::from_utf8(buf).unwrap().lines().count();
        assert_eq!(n, 1 + 24 * 4);
    }

    #[test]
    fn summary_json_parses() {
        let t = trace(StrategyKind::BatteryFirst);
        let v: serde_json::Value =
            serde_json::from_str(&summary_json(std::slice::from_ref(&t)).unwrap()).unwrap();
        assert_eq!(v[0]["strategy"], "battery_first");
        assert_eq!(v[0]["total_cost"].as_f64().unwrap(), t.total_cost);
    }

    #[test]
    fn report_file_names() {
        let dir = tempfile::tempdir().unwrap();
        let ts = vec![
            trace(StrategyKind::RenewableFirst),
            trace(StrategyKind::EgMpc),
        ];
        let files = write_report(dir.path(), &ts).unwrap();
        let names: Vec<_> = files
            .iter()
            .map(|p| p.file_name().unwrap().to_str().unwrap().to_string())
            .collect();
        assert_eq!(
            names,
            [
                "trace_renewable_first.csv",
                "trace_eg_mpc.csv",
                "convergence_eg_mpc.csv",
                "summary.txt",
                "summary.json"
            ]
        );
    }
}
