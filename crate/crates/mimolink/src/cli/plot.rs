//! Gnuplot script emission: turns a sweep CSV back into the preset's natural
//! axes, one inline data block per series.

use crate::error::{Error, Result};
use crate::sweep::{SweepRow, CSV_HEADER};
use std::fmt::Write as _;
use std::path::Path;

pub fn parse_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        Some(h) => {
            return Err(Error::Config(format!(
                "CSV header mismatch: expected '{CSV_HEADER}', found '{h}'"
            )))
        }
        None => return Err(Error::Config("empty CSV".into())),
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 15 {
            return Err(Error::Config(format!(
                "line {}: expected 15 fields, found {}",
                lineno + 2,
                f.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            f[i].parse::<f64>()
                .map_err(|e| Error::Config(format!("line {}: field {}: {e}", lineno + 2, i + 1)))
        };
        rows.push(SweepRow {
            preset: f[0].to_string(),
            mode: f[1].parse()?,
            detector: f[2].parse()?,
            scenario: f[3].parse()?,
            snr_db: num(4)?,
            k_factor: num(5)?,
            los_mode: f[6].to_string(),
            speed_kmh: num(7)?,
            csi: f[8].to_string(),
            trials: num(9)? as usize,
            subframes: num(10)? as usize,
            seed: f[11]
                .parse::<u64>()
                .map_err(|e| Error::Config(format!("line {}: seed: {e}", lineno + 2)))?,
            throughput_fraction: num(12)?,
            capacity_mean: num(13)?,
            capacity_stderr: num(14)?,
        });
    }
    if rows.is_empty() {
        return Err(Error::Config("CSV holds no data rows".into()));
    }
    Ok(rows)
}

struct PlotLayout {
    x: fn(&SweepRow) -> f64,
    y: fn(&SweepRow) -> f64,
    series: fn(&SweepRow) -> String,
    xlabel: &'static str,
    ylabel: &'static str,
}

fn layout(preset: &str) -> Result<PlotLayout> {
    let fraction_vs_snr = PlotLayout {
        x: |r| r.snr_db,
        y: |r| r.throughput_fraction,
        series: |r| r.scenario.label().to_string(),
        xlabel: "SNR (dB)",
        ylabel: "throughput fraction",
    };
    Ok(match preset {
        "fig2_1" | "fig2_2" | "fig2_4" | "fig2_5" => fraction_vs_snr,
        "fig2_3" | "fig2_6" => PlotLayout {
            x: |r| r.k_factor,
            y: |r| r.throughput_fraction,
            series: |r| r.scenario.label().to_string(),
            xlabel: "Rician K factor",
            ylabel: "throughput fraction",
        },
        "fig3_1" | "fig3_2" => PlotLayout {
            x: |r| r.snr_db,
            y: |r| r.throughput_fraction,
            series: |r| format!("{} km/h", r.speed_kmh),
            xlabel: "SNR (dB)",
            ylabel: "throughput fraction",
        },
        "fig4_1" | "fig4_2" => PlotLayout {
            x: |r| r.snr_db,
            y: |r| r.capacity_mean,
            series: |r| format!("{} K={}", r.scenario.label(), r.k_factor),
            xlabel: "SNR (dB)",
            ylabel: "capacity (bits/s/Hz)",
        },
        other => {
            return Err(Error::UnknownPreset(
                other.to_string(),
                crate::sweep::PRESET_NAMES.join(", "),
            ))
        }
    })
}

/// Builds the gnuplot script text for a preset's CSV rows.
pub fn gnuplot_script(preset: &str, rows: &[SweepRow]) -> Result<String> {
    let lay = layout(preset)?;
    // Series keyed in first-appearance order.
    let mut order: Vec<String> = Vec::new();
    for r in rows {
        let key = (lay.series)(r);
        if !order.contains(&key) {
            order.push(key);
        }
    }
    let mut out = String::new();
    writeln!(out, "set title '{preset}'").unwrap();
    writeln!(out, "set xlabel '{}'", lay.xlabel).unwrap();
    writeln!(out, "set ylabel '{}'", lay.ylabel).unwrap();
    writeln!(out, "set grid").unwrap();
    writeln!(out, "set key bottom right").unwrap();
    for (i, key) in order.iter().enumerate() {
        writeln!(out, "$series{i} << EOD").unwrap();
        for r in rows.iter().filter(|r| &(lay.series)(r) == key) {
            writeln!(out, "{} {}", (lay.x)(r), (lay.y)(r)).unwrap();
        }
        writeln!(out, "EOD").unwrap();
    }
    let plots: Vec<String> = order
        .iter()
        .enumerate()
        .map(|(i, key)| format!("$series{i} using 1:2 with linespoints title '{key}'"))
        .collect();
    writeln!(out, "plot {}", plots.join(", \\\n     ")).unwrap();
    Ok(out)
}
