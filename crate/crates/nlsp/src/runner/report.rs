//! Report emission: the trajectory CSV contract, flat JSON summaries and a
//! minimal built-in SVG writer for log-linear decay plots.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::diagnostics::TrajectoryRecord;
use crate::error::Result;

/// Fixed column set of `trajectory.csv`.
pub const CSV_HEADER: &str =
    "t,l2_norm,h1_seminorm,l2_mean_x1,l2_perp,blowup_energy,energy_residual";

fn fmt(v: f64) -> String {
    // 17 significant digits round-trips f64 exactly
    format!("{v:.16e}")
}

pub fn write_trajectory_csv(record: &TrajectoryRecord, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(64 * (record.samples.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &record.samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(s.t),
            fmt(s.l2_norm),
            fmt(s.h1_seminorm),
            fmt(s.l2_mean_x1),
            fmt(s.l2_perp),
            fmt(s.blowup_energy),
            fmt(s.energy_residual),
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Flat key-value summary; `BTreeMap` keeps key order deterministic so
/// reruns are byte-identical.
pub type Summary = BTreeMap<String, serde_json::Value>;

pub fn write_summary(summary: &Summary, path: &Path) -> Result<()> {
    let mut file = fs::File::create(path)?;
    let text = serde_json::to_string_pretty(summary).expect("summary serializes");
    file.write_all(text.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

pub fn num(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String(format!("{v}")))
}

/// Log-linear decay plot of positive samples; nonpositive values are
/// skipped. Returns whether anything was drawn.
pub fn write_decay_svg(series: &[(f64, f64)], title: &str, path: &Path) -> Result<bool> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|(t, v)| (*t, v.log10()))
        .collect();
    if pts.len() < 2 {
        return Ok(false);
    }
    let (w, h, ml, mb) = (640.0, 400.0, 60.0, 40.0);
    let (x0, x1) = pts
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), (t, _)| (a.min(*t), b.max(*t)));
    let (y0, y1) = pts
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), (_, v)| (a.min(*v), b.max(*v)));
    let xs = |t: f64| ml + (t - x0) / (x1 - x0).max(1e-300) * (w - ml - 20.0);
    let ys = |v: f64| h - mb - (v - y0) / (y1 - y0).max(1e-300) * (h - mb - 30.0);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"monospace\" font-size=\"14\">{title}</text>\n",
        ml
    ));
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb,
        w - 20.0,
        h - mb
    ));
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"30\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\">t = {x0:.3e} .. {x1:.3e}</text>\n",
        ml,
        h - 8.0
    ));
    svg.push_str(&format!(
        "<text x=\"4\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" transform=\"rotate(-90 12 {})\">log10 = {y0:.2} .. {y1:.2}</text>\n",
        h / 2.0,
        h / 2.0
    ));
    let path_data: Vec<String> = pts
        .iter()
        .enumerate()
        .map(|(i, (t, v))| {
            format!(
                "{}{:.2},{:.2}",
                if i == 0 { "M" } else { "L" },
                xs(*t),
                ys(*v)
            )
        })
        .collect();
    svg.push_str(&format!(
        "<path d=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n",
        path_data.join(" ")
    ));
    svg.push_str("</svg>\n");
    fs::write(path, svg)?;
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::TrajectorySample;

    #[test]
    fn csv_has_exact_header_and_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trajectory.csv");
        let mut rec = TrajectoryRecord::default();
        rec.push(
            TrajectorySample {
                t: 0.1,
                l2_norm: 1.0 / 3.0,
                h1_seminorm: 2.0,
                l2_mean_x1: 0.0,
                l2_perp: 1.0 / 3.0,
                blowup_energy: -0.5,
                energy_residual: 1e-12,
            },
            0.0,
        )
        .unwrap();
        write_trajectory_csv(&rec, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(row[1], 1.0 / 3.0); // bit-faithful round trip
    }

    #[test]
    fn svg_writes_for_positive_series() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("decay.svg");
        let series: Vec<(f64, f64)> =
            (0..20).map(|i| (i as f64, (-0.3 * i as f64).exp())).collect();
        assert!(write_decay_svg(&series, "decay", &path).unwrap());
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.contains("path"));
    }

    #[test]
    fn svg_skips_degenerate_series() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("decay.svg");
        assert!(!write_decay_svg(&[(0.0, 0.0)], "x", &path).unwrap());
    }
}
