//! Batch orchestration behind the command-line front end and the runnable
//! examples: analyze one function, verify the theorem suite across the
//! catalog, reproduce the reference table of invariants.
//!
//! Output layout per analyzed function:
//! `<out>/<name>/{report.json, theorems.json, volumes.csv, profiles.csv,
//! plots/*.svg, summary.md}`. Runs write into a temporary sibling directory
//! and rename on completion, so interrupted runs leave no partial output.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::catalog::{builtin_catalog, CatalogEntry, TauValue};
use crate::config::{OutputFormat, RunConfig};
use crate::function::{load_spec, Body, FunctionSpec, SpecError};
use crate::invariants::{invariant_report, verify_theorems, InvariantError, InvariantReport, TheoremReport};
use crate::rearrange::{default_t_grid, schwarz_symmetrize, RearrangeError, SymmetrizationResult};
use crate::report;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Rearrange(#[from] RearrangeError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("catalog entry not found: {0}")]
    UnknownEntry(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Everything computed for one function.
pub struct Analysis {
    pub entry: CatalogEntry,
    pub symmetrization: SymmetrizationResult,
    pub invariants: InvariantReport,
    pub theorems: TheoremReport,
}

/// Full pipeline on one catalog entry or loaded spec.
pub fn analyze_entry(entry: &CatalogEntry, config: &RunConfig) -> Result<Analysis, Error> {
    let grid = default_t_grid(config.t_floor.max(entry.spec.t_min()));
    let symmetrization = schwarz_symmetrize(&entry.spec, &grid, &config.volume())?;
    let invariants = invariant_report(
        &entry.spec,
        entry.expected.as_ref(),
        &symmetrization,
        config,
    )?;
    let theorems = verify_theorems(entry, &symmetrization, &invariants, config);
    Ok(Analysis {
        entry: entry.clone(),
        symmetrization,
        invariants,
        theorems,
    })
}

/// Resolves an `analyze`/`verify` target: a JSON spec path or a catalog
/// name (with optional family parameters).
pub fn resolve_target(
    target: &str,
    n: Option<usize>,
    eps: Option<f64>,
) -> Result<CatalogEntry, Error> {
    if target.ends_with(".json") || Path::new(target).is_file() {
        let doc = fs::read_to_string(target)?;
        let spec = load_spec(&doc)?;
        let name = spec.name.clone();
        return Ok(CatalogEntry {
            name,
            spec,
            expected: None,
        });
    }
    crate::catalog::resolve(target, n, eps).ok_or_else(|| Error::UnknownEntry(target.to_string()))
}

/// The profile curve plotted and exported beside the symmetrized one: the
/// restriction of the function along its Lelong direction.
fn source_profile_fn(spec: &FunctionSpec) -> Box<dyn Fn(f64) -> f64 + '_> {
    match &spec.body {
        Body::Radial(p) => {
            let p = p.clone();
            Box::new(move |t| p.eval(t))
        }
        Body::Toric(p) => {
            let p = p.clone();
            let ones = vec![1.0; p.arity];
            Box::new(move |t| p.eval_ray(&ones, t))
        }
        Body::Point(_) => {
            let spec = spec.clone();
            Box::new(move |t| {
                // radial section along the first coordinate axis
                let mut z = vec![0.0; 2 * spec.dimension];
                z[0] = t.exp();
                spec.evaluate_unchecked(&z)
            })
        }
    }
}

/// Writes all artifacts of one analysis under `<out>/<name>/`, atomically by
/// rename. Returns the process exit code (0, or 2 when any estimate carries
/// an UNSTABLE flag).
pub fn write_analysis(analysis: &Analysis, config: &RunConfig) -> Result<i32, Error> {
    let name = &analysis.entry.name;
    let final_dir = config.out_dir.join(name);
    let tmp_dir = config.out_dir.join(format!(".tmp-{name}"));
    if tmp_dir.exists() {
        fs::remove_dir_all(&tmp_dir)?;
    }
    fs::create_dir_all(&tmp_dir)?;

    let echo = config.echo();
    if config.formats.contains(&OutputFormat::Json) {
        report::write_json(
            &tmp_dir.join("report.json"),
            &report::AnalysisDocument {
                name,
                config: &echo,
                invariants: &analysis.invariants,
                symmetrization_checks: &analysis.symmetrization.checks,
            },
        )?;
        report::write_json(
            &tmp_dir.join("theorems.json"),
            &report::TheoremDocument {
                name,
                config: &echo,
                theorems: &analysis.theorems,
            },
        )?;
    }
    if config.formats.contains(&OutputFormat::Csv) {
        report::write_volumes_csv(
            &tmp_dir.join("volumes.csv"),
            &analysis.symmetrization.volume_series,
        )?;
        let profile = source_profile_fn(&analysis.entry.spec);
        report::write_profiles_csv(
            &tmp_dir.join("profiles.csv"),
            &*profile,
            &analysis.symmetrization,
            config.t_floor.max(-40.0),
        )?;
    }
    if config.formats.contains(&OutputFormat::Svg) {
        if let Err(e) = write_plots(analysis, config, &tmp_dir) {
            log::warn!("plot emission failed for {name}: {e}");
        }
    }
    fs::write(
        tmp_dir.join("summary.md"),
        report::analysis_markdown(&analysis.invariants) + "\n" + &report::theorem_markdown(&analysis.theorems),
    )?;

    if final_dir.exists() {
        fs::remove_dir_all(&final_dir)?;
    }
    fs::rename(&tmp_dir, &final_dir)?;
    Ok(if analysis.invariants.unstable { 2 } else { 0 })
}

fn write_plots(analysis: &Analysis, config: &RunConfig, dir: &Path) -> io::Result<()> {
    let plots = dir.join("plots");
    fs::create_dir_all(&plots)?;
    let t_floor = config.t_floor.max(-40.0);
    let m = 240;
    let grid: Vec<f64> = (0..=m)
        .map(|i| t_floor + (-1e-3 - t_floor) * i as f64 / m as f64)
        .collect();
    let profile = source_profile_fn(&analysis.entry.spec);
    let f_curve: Vec<(f64, f64)> = grid.iter().map(|&t| (t, profile(t))).collect();
    let fhat_curve: Vec<(f64, f64)> = grid
        .iter()
        .map(|&t| (t, analysis.symmetrization.u_hat.eval(t)))
        .collect();
    fs::write(
        plots.join("profiles.svg"),
        report::svg_plot(
            &format!("{}: profile and symmetrization", analysis.entry.name),
            &[("f(t)", f_curve), ("f_hat(t)", fhat_curve)],
        ),
    )?;

    // log-volume series with the fitted slope line
    let pts: Vec<(f64, f64)> = analysis
        .symmetrization
        .volume_series
        .iter()
        .filter_map(|(t, est)| est.and_then(|e| e.ln_value.is_finite().then(|| (*t, e.ln_value))))
        .collect();
    if pts.len() >= 2 {
        let iota = analysis.invariants.iota_volume.slope;
        let fit: Vec<(f64, f64)> = if iota > 1e-9 {
            let beta = 2.0 / iota;
            let anchor = pts[pts.len() - 1];
            pts.iter()
                .map(|(t, _)| (*t, anchor.1 + beta * (t - anchor.0)))
                .collect()
        } else {
            Vec::new()
        };
        let mut series: Vec<(&str, Vec<(f64, f64)>)> = vec![("log volume", pts)];
        if !fit.is_empty() {
            series.push(("fitted slope 2/iota", fit));
        }
        fs::write(
            plots.join("volumes.svg"),
            report::svg_plot(
                &format!("{}: log |{{u < t}}|", analysis.entry.name),
                &series,
            ),
        )?;
    }
    Ok(())
}

/// `analyze` command: one target, full artifact set.
pub fn run_analyze(
    target: &str,
    n: Option<usize>,
    eps: Option<f64>,
    config: &RunConfig,
) -> Result<i32, Error> {
    let entry = resolve_target(target, n, eps)?;
    let analysis = analyze_entry(&entry, config)?;
    fs::create_dir_all(&config.out_dir)?;
    let code = write_analysis(&analysis, config)?;
    println!("{}", report::analysis_markdown(&analysis.invariants));
    Ok(code)
}

/// `verify` command: theorem suite over the given names (or the whole
/// catalog), plus a global summary. Exit code 0 iff every applicable check
/// passes.
pub fn run_verify(names: &[String], config: &RunConfig) -> Result<i32, Error> {
    let entries: Vec<CatalogEntry> = if names.is_empty() {
        builtin_catalog()
    } else {
        let mut out = Vec::new();
        for name in names {
            out.push(resolve_target(name, None, None)?);
        }
        out
    };
    fs::create_dir_all(&config.out_dir)?;
    let mut all_pass = true;
    let mut summary = String::from("# Theorem verification summary\n\n");
    let mut table = String::new();
    for entry in &entries {
        let analysis = analyze_entry(entry, config)?;
        write_analysis(&analysis, config)?;
        all_pass &= analysis.theorems.all_applicable_pass;
        let _ = writeln!(summary, "{}", report::theorem_markdown(&analysis.theorems));
        let _ = write!(table, "{}", report::theorem_table(&analysis.theorems));
    }
    fs::write(config.out_dir.join("summary.md"), &summary)?;
    print!("{table}");
    println!(
        "verify: {}",
        if all_pass { "all applicable checks PASS" } else { "FAILURES present" }
    );
    Ok(if all_pass { 0 } else { 1 })
}

/// One row of the reproduction table.
#[derive(Debug, serde::Serialize)]
pub struct ReproduceRow {
    pub name: String,
    pub nu_expected: f64,
    pub nu: f64,
    pub nu_hat_expected: f64,
    pub nu_hat: f64,
    pub iota_expected: f64,
    pub iota: f64,
    pub tau_hat_expected: f64,
    pub tau_hat: f64,
    pub max_slope_dev: f64,
    pub tau_note: String,
}

/// `reproduce` command: side-by-side table of reference invariants vs
/// computed values for the worked examples.
pub fn run_reproduce(config: &RunConfig) -> Result<i32, Error> {
    let names = [
        "ex-4.1",
        "ex-4.2",
        "ex-4.3",
        "ex-4.4",
        "demailly-0.25",
        "demailly-0.5",
        "demailly-0.75",
    ];
    let catalog = builtin_catalog();
    let mut rows = Vec::new();
    for name in names {
        let entry = catalog.iter().find(|e| e.name == name).unwrap();
        let analysis = analyze_entry(entry, config)?;
        let exp = entry.expected.as_ref().unwrap();
        let inv = &analysis.invariants;
        let max_slope_dev = (inv.nu.slope - exp.nu)
            .abs()
            .max((inv.nu_hat.slope - exp.nu_hat).abs())
            .max((inv.iota_volume.slope - exp.iota).abs());
        rows.push(ReproduceRow {
            name: name.to_string(),
            nu_expected: exp.nu,
            nu: inv.nu.slope,
            nu_hat_expected: exp.nu_hat,
            nu_hat: inv.nu_hat.slope,
            iota_expected: exp.iota,
            iota: inv.iota_volume.slope,
            tau_hat_expected: exp.tau_hat,
            tau_hat: inv.tau_hat,
            max_slope_dev,
            tau_note: match exp.tau {
                TauValue::Known(v) => format!("tau = {v}"),
                TauValue::Unbounded => "tau unbounded".to_string(),
                TauValue::Undefined => "tau not well defined".to_string(),
                TauValue::Unknown => String::new(),
            },
        });
    }

    let mut md = String::from("# Reproduction of the worked examples\n\n");
    let _ = writeln!(
        md,
        "| entry | nu (ref) | nu | nu_hat (ref) | nu_hat | iota (ref) | iota | tau_hat (ref) | tau_hat | max slope dev | note |"
    );
    let _ = writeln!(md, "|---|---|---|---|---|---|---|---|---|---|---|");
    let mut ok = true;
    for r in &rows {
        ok &= r.max_slope_dev <= 0.05 && (r.tau_hat - r.tau_hat_expected).abs() <= 0.5;
        let _ = writeln!(
            md,
            "| {} | {} | {:.4} | {} | {:.4} | {} | {:.4} | {} | {:.4} | {:.4} | {} |",
            r.name,
            r.nu_expected,
            r.nu,
            r.nu_hat_expected,
            r.nu_hat,
            r.iota_expected,
            r.iota,
            r.tau_hat_expected,
            r.tau_hat,
            r.max_slope_dev,
            r.tau_note
        );
    }
    let dir = config.out_dir.join("reproduce");
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("summary.md"), &md)?;
    report::write_json(&dir.join("rows.json"), &rows)?;
    println!("{md}");
    Ok(if ok { 0 } else { 1 })
}

/// Convenience for examples: analysis of a named catalog entry.
pub fn quick_analysis(name: &str, config: &RunConfig) -> Result<Analysis, Error> {
    let entry = resolve_target(name, None, None)?;
    analyze_entry(&entry, config)
}
