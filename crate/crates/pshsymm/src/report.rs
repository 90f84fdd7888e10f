//! Deterministic report emission: JSON documents, CSV series, SVG plots and
//! markdown summaries.
//!
//! Outputs contain no timestamps and no map types with unstable iteration
//! order, so identical inputs and configuration produce byte-identical
//! files. CSV numbers carry 17 significant digits with LF line endings.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::config::ConfigEcho;
use crate::invariants::{CheckStatus, InvariantReport, TheoremReport};
use crate::rearrange::SymmetrizationResult;
use crate::volume::VolumeEstimate;

/// Top-level JSON document for `analyze`.
#[derive(Debug, Serialize)]
pub struct AnalysisDocument<'a> {
    pub name: &'a str,
    pub config: &'a ConfigEcho,
    pub invariants: &'a InvariantReport,
    pub symmetrization_checks: &'a crate::rearrange::SymmChecks,
}

/// Top-level JSON document for `verify`.
#[derive(Debug, Serialize)]
pub struct TheoremDocument<'a> {
    pub name: &'a str,
    pub config: &'a ConfigEcho,
    pub theorems: &'a TheoremReport,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut body = serde_json::to_string_pretty(value)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    body.push('\n');
    fs::write(path, body)
}

fn fmt_sig17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

/// `volumes.csv`: one row per grid level.
pub fn write_volumes_csv(
    path: &Path,
    series: &[(f64, Option<VolumeEstimate>)],
) -> io::Result<()> {
    let mut out = String::from("t,volume,abs_error,method,nodes\n");
    for (t, est) in series {
        match est {
            Some(e) => {
                let method = match e.method {
                    crate::volume::VolumeMethod::RadialExact => "RADIAL_EXACT",
                    crate::volume::VolumeMethod::ToricQuadrature => "TORIC_QUADRATURE",
                    crate::volume::VolumeMethod::MonteCarlo => "MONTE_CARLO",
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{method},{}",
                    fmt_sig17(*t),
                    fmt_sig17(e.value),
                    fmt_sig17(e.abs_error),
                    e.samples_or_nodes
                );
            }
            None => {
                let _ = writeln!(out, "{},nan,nan,FAILED,0", fmt_sig17(*t));
            }
        }
    }
    fs::write(path, out)
}

/// `profiles.csv`: the source profile along its Lelong direction and the
/// symmetrized profile, on a uniform grid for plotting.
pub fn write_profiles_csv(
    path: &Path,
    source_profile: &dyn Fn(f64) -> f64,
    symm: &SymmetrizationResult,
    t_floor: f64,
) -> io::Result<()> {
    let mut out = String::from("t,source_profile,symmetrized\n");
    let m = 400;
    let t_hi = -1e-3;
    for i in 0..=m {
        let t = t_floor + (t_hi - t_floor) * i as f64 / m as f64;
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_sig17(t),
            fmt_sig17(source_profile(t)),
            fmt_sig17(symm.u_hat.eval(t))
        );
    }
    fs::write(path, out)
}

/// Minimal SVG polyline plot; emission is best-effort and never fails a run.
pub fn svg_plot(title: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const MARGIN: f64 = 52.0;
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let finite: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        W / 2.0,
        title
    );
    if !finite.is_empty() {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (x, y) in &finite {
            x0 = x0.min(*x);
            x1 = x1.max(*x);
            y0 = y0.min(*y);
            y1 = y1.max(*y);
        }
        if x1 - x0 < 1e-12 {
            x1 = x0 + 1.0;
        }
        if y1 - y0 < 1e-12 {
            y1 = y0 + 1.0;
        }
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
        let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
        // axes
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>",
            MARGIN,
            H - MARGIN,
            W - MARGIN,
            H - MARGIN
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>",
            MARGIN,
            MARGIN,
            MARGIN,
            H - MARGIN
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\">{:.3}..{:.3}</text>",
            MARGIN,
            H - MARGIN + 16.0,
            x0,
            x1
        );
        let _ = writeln!(
            svg,
            "<text x=\"4\" y=\"{}\" font-family=\"monospace\" font-size=\"11\">{:.3}..{:.3}</text>",
            MARGIN - 8.0,
            y0,
            y1
        );
        for (i, (label, pts)) in series.iter().enumerate() {
            let color = palette[i % palette.len()];
            let path: Vec<String> = pts
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
                .collect();
            if path.len() >= 2 {
                let _ = writeln!(
                    svg,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                    path.join(" ")
                );
            }
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"{color}\">{label}</text>",
                W - MARGIN - 170.0,
                MARGIN + 16.0 * (i as f64 + 1.0)
            );
        }
    }
    let _ = writeln!(svg, "</svg>");
    svg
}

fn status_str(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "PASS",
        CheckStatus::Fail => "FAIL",
        CheckStatus::Inapplicable => "INAPPLICABLE",
    }
}

/// Markdown summary of one analysis.
pub fn analysis_markdown(report: &InvariantReport) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# {}\n", report.name);
    let _ = writeln!(md, "| quantity | value | stderr | method |");
    let _ = writeln!(md, "|---|---|---|---|");
    let mut row = |label: &str, e: &crate::slope::SlopeEstimate| {
        let _ = writeln!(
            md,
            "| {label} | {:.6} | {:.2e} | {:?} |",
            e.slope, e.stderr, e.method
        );
    };
    row("nu (Lelong number)", &report.nu);
    row("nu_hat (symmetrized)", &report.nu_hat);
    row("iota (volume route)", &report.iota_volume);
    if let Some(k) = &report.iota_kiselman {
        row("iota (Kiselman route)", k);
    }
    let _ = writeln!(md, "\n- tau_hat = nu_hat^n = {:.6}", report.tau_hat);
    let _ = writeln!(md, "- tau (source) = {:?}", report.tau);
    if let Some(lb) = report.rashkovskii_lb {
        let _ = writeln!(md, "- Rashkovskii lower bound = {lb:.6}");
    }
    let _ = writeln!(md, "\n| bound | status |");
    let _ = writeln!(md, "|---|---|");
    let _ = writeln!(md, "| Skoda sandwich | {} |", status_str(report.bounds_ok.skoda));
    let _ = writeln!(
        md,
        "| nu <= nu_hat <= n nu | {} |",
        status_str(report.bounds_ok.nu_sandwich)
    );
    let _ = writeln!(
        md,
        "| estimator identity | {} |",
        status_str(report.bounds_ok.estimator_identity)
    );
    let _ = writeln!(
        md,
        "| mass domination | {} |",
        status_str(report.bounds_ok.mass_domination)
    );
    md
}

/// Markdown table of one theorem report.
pub fn theorem_markdown(report: &TheoremReport) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "## {}\n", report.name);
    let _ = writeln!(md, "| check | status | margin | tolerance | detail |");
    let _ = writeln!(md, "|---|---|---|---|---|");
    for c in &report.checks {
        let _ = writeln!(
            md,
            "| {} | {} | {:.4} | {:.4} | {} |",
            c.id,
            status_str(c.status),
            c.margin,
            c.tolerance,
            c.detail.replace('|', "/")
        );
    }
    md
}

/// Plain-text table for terminal rendering of a theorem report.
pub fn theorem_table(report: &TheoremReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", report.name);
    for c in &report.checks {
        let _ = writeln!(
            out,
            "  [{:>12}] {:<34} margin {:+.4} (tol {:.4})",
            status_str(c.status),
            c.id,
            c.margin,
            c.tolerance
        );
    }
    out
}
