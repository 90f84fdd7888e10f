//! Singularity invariants: Lelong numbers, refined Lelong numbers,
//! integrability indices, residue Monge-Ampere masses, and the theorem
//! harness that checks the relations between them.
//!
//! Estimator map:
//! - `nu`: profile slope (radial), diagonal-ray slope (toric), or the slope
//!   of sphere maxima (S1-invariant);
//! - `nu(0, a)`: slope of `t -> g(a_1 t, ..., a_n t)` (for a nondecreasing
//!   toric profile the polydisc supremum and the torus mean both equal the
//!   corner value);
//! - `iota` (volume route): `2/beta` from the regression
//!   `log mu(t) = beta t + gamma log(-t) + c`;
//! - `iota` (Kiselman route): supremum of `nu(0, a)` over the open unit
//!   simplex;
//! - `tau_hat = nu_hat^n`; Rashkovskii's bound `sup_a nu(0,a)^n / prod a_k`
//!   lower-bounds `tau` for single poles at the origin.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{CatalogEntry, Expected, TauValue};
use crate::config::RunConfig;
use crate::function::{sphere_direction, Body, FunctionSpec, PoleStructure, SymmetryClass};
use crate::numeric::subseed;
use crate::profile::RadialProfile;
use crate::rearrange::{RearrangeError, SymmetrizationResult};
use crate::slope::{estimate_from_samples, slope_of, SlopeEstimate, SlopeMethod};
use crate::volume::{volume_profile, VolumeError};

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error("operation requires {required} symmetry, spec has {actual}")]
    SymmetryRequired {
        required: &'static str,
        actual: &'static str,
    },
    #[error("operation requires a single pole at the origin")]
    SinglePoleRequired,
    #[error("degenerate volume data: {0}")]
    DegenerateVolume(String),
    #[error("finite differences disagree by {0:.3} between step sizes")]
    GradientUnstable(f64),
    #[error(transparent)]
    Rearrange(#[from] RearrangeError),
    #[error(transparent)]
    Volume(#[from] VolumeError),
}

/// A direction `a` in the positive orthant for refined Lelong numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Direction(pub Vec<f64>);

impl Direction {
    pub fn new(a: Vec<f64>) -> Result<Self, String> {
        if a.is_empty() || a.iter().any(|v| !(*v > 0.0)) {
            return Err("direction components must all be positive".to_string());
        }
        Ok(Direction(a))
    }
}

/// Directions on the sphere maxima are probed with this many points.
const SPHERE_SAMPLES: usize = 4096;
const POINT_SPHERE_SAMPLES: usize = 1024;

fn slope_window(spec: &FunctionSpec) -> (f64, f64) {
    let t_min = spec.t_min();
    (t_min, t_min / 3.0)
}

/// Lelong number at the origin.
pub fn lelong_origin(spec: &FunctionSpec, config: &RunConfig) -> SlopeEstimate {
    let (lo, hi) = slope_window(spec);
    match &spec.body {
        Body::Radial(p) => {
            let p = p.clone();
            slope_of(
                move |t| p.eval(t),
                lo,
                hi,
                config.slope_points,
                SlopeMethod::ProfileDerivative,
            )
        }
        Body::Toric(p) => {
            let ones = vec![1.0; p.arity];
            let p = p.clone();
            slope_of(
                move |t| p.eval_ray(&ones, t),
                lo,
                hi,
                config.slope_points,
                SlopeMethod::MeanOnTori,
            )
        }
        Body::Point(_) => {
            let dirs = fixed_directions(spec, SPHERE_SAMPLES, config.seed);
            slope_of(
                |t| sphere_max(spec, &dirs, t.exp()),
                lo,
                hi,
                config.slope_points,
                SlopeMethod::MaxOnSpheres,
            )
        }
    }
}

fn fixed_directions(spec: &FunctionSpec, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(seed, "sphere-dirs", 0));
    (0..count)
        .map(|_| sphere_direction(&mut rng, 2 * spec.dimension))
        .collect()
}

fn sphere_max(spec: &FunctionSpec, dirs: &[Vec<f64>], radius: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut z = vec![0.0; 2 * spec.dimension];
    for d in dirs {
        for (zk, dk) in z.iter_mut().zip(d) {
            *zk = dk * radius;
        }
        best = best.max(spec.evaluate_unchecked(&z));
    }
    best
}

/// Lelong number at an interior point `x`, from maxima on sampled spheres
/// around `x` at geometrically shrinking radii (a fixed direction set keeps
/// the sampling bias constant across radii, so the slope is unbiased).
pub fn lelong_at_point(spec: &FunctionSpec, x: &[f64], config: &RunConfig) -> SlopeEstimate {
    assert_eq!(x.len(), 2 * spec.dimension);
    let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let slack = spec.domain_radius * (1.0 + spec.extension_margin) - norm;
    assert!(slack > 0.0, "point must lie inside the extended domain");
    let r_hi = (0.01 * spec.domain_radius).min(0.25 * slack);
    let r_lo = 1e-6 * spec.domain_radius;
    let dirs = fixed_directions(spec, POINT_SPHERE_SAMPLES, config.seed ^ 0x17);
    let m = 14usize;
    let samples: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let r = r_hi * (r_lo / r_hi).powf(i as f64 / (m - 1) as f64);
            let mut best = f64::NEG_INFINITY;
            let mut z = vec![0.0; x.len()];
            for d in &dirs {
                for ((zk, xk), dk) in z.iter_mut().zip(x).zip(d) {
                    *zk = xk + dk * r;
                }
                best = best.max(spec.evaluate_unchecked(&z));
            }
            (r.ln(), best)
        })
        .collect();
    estimate_from_samples(
        &samples,
        (r_lo.ln(), r_hi.ln()),
        SlopeMethod::MaxOnSpheres,
    )
}

/// Refined Lelong number `nu(0, a)`.
pub fn refined_lelong(
    spec: &FunctionSpec,
    a: &Direction,
    config: &RunConfig,
) -> Result<SlopeEstimate, InvariantError> {
    let (lo, hi) = slope_window(spec);
    match &spec.body {
        Body::Toric(p) => {
            let p = p.clone();
            let a = a.0.clone();
            Ok(slope_of(
                move |t| p.eval_ray(&a, t),
                lo,
                hi,
                config.slope_points,
                SlopeMethod::MeanOnTori,
            ))
        }
        Body::Radial(p) => {
            // sup over the polydisc |z_k| <= e^{a_k t} of f(log|z|) is
            // attained at the corner with the largest norm, log|z| ~ min_k a_k t
            let a_min = a.0.iter().cloned().fold(f64::INFINITY, f64::min);
            let p = p.clone();
            Ok(slope_of(
                move |t| p.eval(a_min * t),
                lo,
                hi,
                config.slope_points,
                SlopeMethod::MeanOnTori,
            ))
        }
        Body::Point(_) => Err(InvariantError::SymmetryRequired {
            required: "toric",
            actual: "s1-invariant",
        }),
    }
}

/// Volume route to the integrability index: fit `log mu(t)` on the deep
/// window and report `iota = 2 / beta`.
pub fn integrability_index_volume(
    spec: &FunctionSpec,
    config: &RunConfig,
) -> Result<SlopeEstimate, InvariantError> {
    let is_mc = matches!(spec.body, Body::Point(_));
    let (t_lo, t_hi) = if is_mc {
        (-5.0, -5.0 / 3.0)
    } else {
        let lo = spec.t_min().max(config.vol_fit_depth);
        (lo, lo / 3.0)
    };
    let m = 32usize;
    let grid: Vec<f64> = (0..m)
        .map(|i| t_hi + (t_lo - t_hi) * i as f64 / (m - 1) as f64)
        .collect();
    let profile = volume_profile(spec, &grid, &config.volume());
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut degenerate = 0usize;
    for p in &profile.points {
        match &p.estimate {
            Ok(est) if est.ln_value.is_finite() && est.rel_error < 0.5 => {
                samples.push((p.t, est.ln_value))
            }
            _ => degenerate += 1,
        }
    }
    if samples.len() < 3 {
        return Err(InvariantError::DegenerateVolume(format!(
            "only {} of {} window points have positive volume",
            samples.len(),
            m
        )));
    }
    let window = (
        samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min),
        samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max),
    );
    let mut est = estimate_from_samples(&samples, window, SlopeMethod::VolumeLogRatio);
    // est.slope is beta = d log mu / dt; iota = 2 / beta
    let beta = est.slope;
    let (iota, stderr) = if beta < 1e-6 {
        (0.0, est.stderr)
    } else {
        (2.0 / beta, 2.0 * est.stderr / (beta * beta))
    };
    est.slope = iota;
    est.stderr = stderr;
    if degenerate > 0 {
        est.notes.push(format!(
            "window shrunk: {degenerate} empty-volume points dropped"
        ));
    }
    Ok(est)
}

/// Result of the simplex maximization behind Kiselman's identity.
#[derive(Debug, Clone, Serialize)]
pub struct SimplexMaxResult {
    pub estimate: SlopeEstimate,
    pub argmax: Vec<f64>,
    /// Maximizer within one grid step of the simplex boundary, reported as a
    /// grid limit (directions with zero components are outside the domain of
    /// refined Lelong numbers).
    pub boundary: bool,
}

/// Kiselman route: `iota = sup { nu(0, a) : a in the open unit simplex }`.
pub fn integrability_index_kiselman(
    spec: &FunctionSpec,
    config: &RunConfig,
) -> Result<SimplexMaxResult, InvariantError> {
    maximize_over_simplex(spec, config, |est, _a| est.slope)
}

/// Rashkovskii's lower bound `sup_a nu(0,a)^n / (a_1 ... a_n)` for toric
/// functions with a single pole at the origin (degree-0 homogeneity makes
/// the simplex restriction lossless).
pub fn rashkovskii_lower_bound(
    spec: &FunctionSpec,
    config: &RunConfig,
) -> Result<SimplexMaxResult, InvariantError> {
    if spec.pole_structure != PoleStructure::SinglePoleAtOrigin {
        return Err(InvariantError::SinglePoleRequired);
    }
    let n = spec.dimension as i32;
    maximize_over_simplex(spec, config, move |est, a| {
        let prod: f64 = a.iter().product();
        est.slope.powi(n) / prod
    })
}

/// Two-stage maximization of `objective(refined_lelong(a), a)` over the open
/// simplex: a coarse 1/32 grid guarantees global coverage, then
/// coordinate-pair refinement exploits concavity down to 1e-4 resolution.
fn maximize_over_simplex(
    spec: &FunctionSpec,
    config: &RunConfig,
    objective: impl Fn(&SlopeEstimate, &[f64]) -> f64,
) -> Result<SimplexMaxResult, InvariantError> {
    if !spec.capability().satisfies(SymmetryClass::Toric) {
        return Err(InvariantError::SymmetryRequired {
            required: "toric",
            actual: "s1-invariant",
        });
    }
    let n = spec.dimension;
    let eval = |a: &[f64]| -> Result<(f64, SlopeEstimate), InvariantError> {
        let dir = Direction(a.to_vec());
        let est = refined_lelong(spec, &dir, config)?;
        let val = objective(&est, a);
        Ok((val, est))
    };

    // stage 1: compositions k/32 with k_j >= 1
    const GRID: usize = 32;
    let mut best: Option<(f64, Vec<f64>, SlopeEstimate)> = None;
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), GRID)];
    while let Some((prefix, remaining)) = stack.pop() {
        if prefix.len() == n - 1 {
            if remaining < 1 {
                continue;
            }
            let mut ks = prefix.clone();
            ks.push(remaining);
            let a: Vec<f64> = ks.iter().map(|k| *k as f64 / GRID as f64).collect();
            let (val, est) = eval(&a)?;
            if best.as_ref().map_or(true, |b| val > b.0) {
                best = Some((val, a, est));
            }
        } else {
            let slots_left = n - 1 - prefix.len();
            for k in 1..=(remaining.saturating_sub(slots_left)) {
                let mut p = prefix.clone();
                p.push(k);
                stack.push((p, remaining - k));
            }
        }
    }
    let (mut best_val, mut best_a, mut best_est) =
        best.ok_or_else(|| InvariantError::DegenerateVolume("empty simplex grid".to_string()))?;

    // stage 2: shrinking-step ascent. Pair transfers alone stall on tie
    // ridges of min-type objectives (raising the minimum needs several
    // coordinates moved at once), so the candidate set also includes a pull
    // toward the simplex center and seeded random zero-sum perturbations.
    let min_component = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(config.seed, "simplex-ascent", n as u64));
    let mut step = 1.0 / 64.0;
    while step >= 1e-4 {
        let mut candidates: Vec<Vec<f64>> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mut a = best_a.clone();
                a[i] += step;
                a[j] -= step;
                candidates.push(a);
            }
        }
        let center = 1.0 / n as f64;
        candidates.push(
            best_a
                .iter()
                .map(|&v| v + step * (center - v) / (1.0 - center).max(center))
                .collect(),
        );
        for _ in 0..(2 * n) {
            let noise: Vec<f64> = (0..n).map(|_| rand::Rng::gen::<f64>(&mut rng) - 0.5).collect();
            let mean = noise.iter().sum::<f64>() / n as f64;
            candidates.push(
                best_a
                    .iter()
                    .zip(&noise)
                    .map(|(&v, &x)| v + 2.0 * step * (x - mean))
                    .collect(),
            );
        }
        let mut improved = false;
        for a in candidates {
            if a.iter().any(|&v| v < min_component) {
                continue;
            }
            // renormalize to the simplex (the random moves are zero-sum up to
            // rounding)
            let sum: f64 = a.iter().sum();
            let a: Vec<f64> = a.iter().map(|v| v / sum).collect();
            let (val, est) = eval(&a)?;
            if val > best_val + 1e-12 {
                best_val = val;
                best_a = a;
                best_est = est;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    let boundary = best_a.iter().any(|&v| v <= 1.0 / GRID as f64 + 1e-9);
    let mut estimate = best_est;
    estimate.slope = best_val;
    if boundary {
        estimate
            .notes
            .push("maximizer at the simplex boundary, reported as a grid limit".to_string());
    }
    Ok(SimplexMaxResult {
        estimate,
        argmax: best_a,
        boundary,
    })
}

/// Residue mass of a radial profile: the deep slope raised to the n-th
/// power.
pub fn residue_mass_radial(
    profile: &RadialProfile,
    n: usize,
    config: &RunConfig,
) -> (f64, SlopeEstimate) {
    let (lo, hi) = (profile.t_min, profile.t_min / 3.0);
    let p = profile.clone();
    let est = slope_of(
        move |t| p.eval(t),
        lo,
        hi,
        config.slope_points,
        SlopeMethod::ProfileDerivative,
    );
    (est.slope.powi(n as i32), est)
}

#[derive(Debug, Clone, Serialize)]
pub struct MaConsistencyReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_gap: f64,
    pub grid_points: usize,
}

/// Consistency of the radial Monge-Ampere mass: the integral of
/// `det(u_{j k-bar})` against the sphere measure over `B_R`, evaluated with
/// finite differences on the profile, must match `[R y'(R)]^n`.
///
/// In `t = log r` the density reduces to
/// `2^{n+1} n det r^{2n} = n f''(t) f'(t)^{n-1}`; the flux through the inner
/// cutoff sphere, `f'(t_lo)^n`, accounts for the mass below the cutoff (for
/// a pole it carries the whole residue, for a smooth center it vanishes).
pub fn radial_ma_consistency(
    profile: &RadialProfile,
    n: usize,
    radius: f64,
    grid_points: usize,
) -> Result<MaConsistencyReport, InvariantError> {
    let t_hi = radius.ln();
    let t_lo = profile.t_min.max(t_hi - 40.0);
    assert!(t_lo < t_hi);
    let m = grid_points.max(64);
    let h = (t_hi - t_lo) / m as f64;
    let fd = |t: f64, h: f64| (profile.eval(t + h) - profile.eval(t - h)) / (2.0 * h);
    let fdd = |t: f64| {
        (profile.eval(t + h) - 2.0 * profile.eval(t) + profile.eval(t - h)) / (h * h)
    };
    // Richardson sanity on the boundary derivative
    let d1 = fd(t_hi - 2.0 * h, h);
    let d2 = fd(t_hi - 2.0 * h, h / 2.0);
    let disagreement = (d1 - d2).abs() / d1.abs().max(1e-9);
    if disagreement > 0.05 {
        return Err(InvariantError::GradientUnstable(disagreement));
    }

    // trapezoid over the density n f'' (f')^{n-1}
    let density = |t: f64| {
        let det_r2n = fdd(t) * fd(t, h).powi(n as i32 - 1) / 2f64.powi(n as i32 + 1);
        2f64.powi(n as i32 + 1) * n as f64 * det_r2n
    };
    let mut acc = 0.5 * (density(t_lo) + density(t_hi));
    for i in 1..m {
        acc += density(t_lo + h * i as f64);
    }
    let integral = acc * h;
    let boundary_flux = fd(t_lo, h).max(0.0).powi(n as i32);
    let lhs = integral + boundary_flux;
    let rhs = fd(t_hi, h).max(0.0).powi(n as i32);
    let rel_gap = (lhs - rhs).abs() / rhs.abs().max(1e-12);
    Ok(MaConsistencyReport {
        lhs,
        rhs,
        rel_gap,
        grid_points: m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    Inapplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsFlags {
    pub skoda: CheckStatus,
    pub nu_sandwich: CheckStatus,
    pub estimator_identity: CheckStatus,
    pub mass_domination: CheckStatus,
}

/// Assembled invariants of one function.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub name: String,
    pub nu: SlopeEstimate,
    pub nu_hat: SlopeEstimate,
    pub iota_volume: SlopeEstimate,
    pub iota_kiselman: Option<SlopeEstimate>,
    pub kiselman_argmax: Option<Vec<f64>>,
    /// `nu_hat^n`, exact by construction.
    pub tau_hat: f64,
    pub tau: TauValue,
    pub rashkovskii_lb: Option<f64>,
    pub rashkovskii_argmax: Option<Vec<f64>>,
    pub bounds_ok: BoundsFlags,
    /// `|nu_hat - n iota_volume|`, the regression cross-check of the
    /// identity between the two.
    pub nu_hat_vs_n_iota: f64,
    pub unstable: bool,
}

/// Computes the full invariant set for a spec whose symmetrization is
/// already available.
pub fn invariant_report(
    spec: &FunctionSpec,
    expected: Option<&Expected>,
    symm: &SymmetrizationResult,
    config: &RunConfig,
) -> Result<InvariantReport, InvariantError> {
    let n = spec.dimension;
    let nu = lelong_origin(spec, config);
    let (_, nu_hat) = residue_mass_radial(&symm.u_hat, n, config);
    let tau_hat = nu_hat.slope.powi(n as i32);
    let iota_volume = integrability_index_volume(spec, config)?;

    let toric = spec.capability().satisfies(SymmetryClass::Toric);
    let (iota_kiselman, kiselman_argmax) = if toric {
        let r = integrability_index_kiselman(spec, config)?;
        (Some(r.estimate), Some(r.argmax))
    } else {
        (None, None)
    };
    let (rashkovskii_lb, rashkovskii_argmax) = if toric
        && spec.pole_structure == PoleStructure::SinglePoleAtOrigin
    {
        let r = rashkovskii_lower_bound(spec, config)?;
        (Some(r.estimate.slope), Some(r.argmax))
    } else {
        (None, None)
    };

    let tau = expected.map(|e| e.tau).unwrap_or(TauValue::Unknown);
    let tol = |a: &SlopeEstimate, b: &SlopeEstimate| {
        config.pass_tol_abs.max(3.0 * (a.stderr + b.stderr))
    };

    let skoda = {
        let t = tol(&nu, &iota_volume);
        pass_if(
            nu.slope / n as f64 - t <= iota_volume.slope && iota_volume.slope <= nu.slope + t,
        )
    };
    let nu_sandwich = {
        let t = tol(&nu, &nu_hat);
        pass_if(
            nu.slope <= nu_hat.slope + t && nu_hat.slope <= n as f64 * nu.slope + n as f64 * t,
        )
    };
    let estimator_identity = match &iota_kiselman {
        Some(k) => {
            let t = tol(k, &iota_volume).max(0.02);
            pass_if((k.slope - iota_volume.slope).abs() <= t)
        }
        None => CheckStatus::Inapplicable,
    };
    let mass_domination = domination_status(tau_hat, tau, rashkovskii_lb, config.pass_tol_abs);
    let nu_hat_vs_n_iota = (nu_hat.slope - n as f64 * iota_volume.slope).abs();
    let unstable = nu.unstable
        || nu_hat.unstable
        || iota_volume.unstable
        || iota_kiselman.as_ref().map(|e| e.unstable).unwrap_or(false);

    Ok(InvariantReport {
        name: spec.name.clone(),
        nu,
        nu_hat,
        iota_volume,
        iota_kiselman,
        kiselman_argmax,
        tau_hat,
        tau,
        rashkovskii_lb,
        rashkovskii_argmax,
        bounds_ok: BoundsFlags {
            skoda,
            nu_sandwich,
            estimator_identity,
            mass_domination,
        },
        nu_hat_vs_n_iota,
        unstable,
    })
}

fn pass_if(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

/// Mass domination `tau_hat <= tau`: ground truth when known, vacuous for an
/// unbounded mass, inapplicable when the mass is undefined or unknown —
/// unless the Rashkovskii bound supplies a certified lower bound for `tau`.
fn domination_status(
    tau_hat: f64,
    tau: TauValue,
    rashkovskii_lb: Option<f64>,
    tol: f64,
) -> CheckStatus {
    match tau {
        TauValue::Known(v) => pass_if(tau_hat <= v + tol),
        TauValue::Unbounded => CheckStatus::Pass,
        TauValue::Undefined => CheckStatus::Inapplicable,
        TauValue::Unknown => match rashkovskii_lb {
            Some(lb) => pass_if(tau_hat <= lb + tol),
            None => CheckStatus::Inapplicable,
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremCheck {
    pub id: &'static str,
    pub statement: String,
    pub status: CheckStatus,
    /// Positive margins are slack; negative margins are violations.
    pub margin: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub name: String,
    pub checks: Vec<TheoremCheck>,
    pub all_applicable_pass: bool,
}

/// Runs the fixed registry of theorem checks for one analyzed function.
pub fn verify_theorems(
    entry: &CatalogEntry,
    symm: &SymmetrizationResult,
    report: &InvariantReport,
    config: &RunConfig,
) -> TheoremReport {
    let spec = &entry.spec;
    let n = spec.dimension as f64;
    let mut checks: Vec<TheoremCheck> = Vec::new();
    let tol_pair = |a: &SlopeEstimate, b: &SlopeEstimate| {
        config.pass_tol_abs.max(3.0 * (a.stderr + b.stderr))
    };

    // 1. Skoda sandwich nu/n <= iota <= nu
    {
        let t = tol_pair(&report.nu, &report.iota_volume);
        let lower = report.iota_volume.slope - report.nu.slope / n;
        let upper = report.nu.slope - report.iota_volume.slope;
        let margin = lower.min(upper);
        checks.push(TheoremCheck {
            id: "skoda-sandwich",
            statement: "nu/n <= iota <= nu".to_string(),
            status: pass_if(margin >= -t),
            margin,
            tolerance: t,
            detail: format!(
                "nu = {:.4}, iota = {:.4}, n = {}",
                report.nu.slope, report.iota_volume.slope, spec.dimension
            ),
        });
    }
    // 2. symmetrization sandwich nu <= nu_hat <= n nu
    {
        let t = tol_pair(&report.nu, &report.nu_hat);
        let lower = report.nu_hat.slope - report.nu.slope;
        let upper = n * report.nu.slope - report.nu_hat.slope;
        let margin = lower.min(upper);
        checks.push(TheoremCheck {
            id: "symmetrization-sandwich",
            statement: "nu <= nu_hat <= n nu".to_string(),
            status: pass_if(margin >= -(t * n)),
            margin,
            tolerance: t * n,
            detail: format!(
                "nu = {:.4}, nu_hat = {:.4}",
                report.nu.slope, report.nu_hat.slope
            ),
        });
    }
    // 3. estimator identity iota_kiselman = iota_volume
    {
        let (status, margin, t, detail) = match &report.iota_kiselman {
            Some(k) => {
                let t = tol_pair(k, &report.iota_volume).max(0.02);
                let gap = (k.slope - report.iota_volume.slope).abs();
                (
                    pass_if(gap <= t),
                    t - gap,
                    t,
                    format!(
                        "kiselman = {:.4}, volume = {:.4}",
                        k.slope, report.iota_volume.slope
                    ),
                )
            }
            None => (
                CheckStatus::Inapplicable,
                0.0,
                0.0,
                "not a toric body".to_string(),
            ),
        };
        checks.push(TheoremCheck {
            id: "integrability-estimator-identity",
            statement: "sup_a nu(0,a) over the simplex = volume-slope iota".to_string(),
            status,
            margin,
            tolerance: t,
            detail,
        });
    }
    // 4. nu_hat = n iota
    {
        let t = tol_pair(&report.nu_hat, &report.iota_volume).max(0.02);
        let gap = report.nu_hat_vs_n_iota;
        checks.push(TheoremCheck {
            id: "nu-hat-equals-n-iota",
            statement: "nu_hat = n iota".to_string(),
            status: pass_if(gap <= t),
            margin: t - gap,
            tolerance: t,
            detail: format!(
                "nu_hat = {:.4}, n iota = {:.4}",
                report.nu_hat.slope,
                n * report.iota_volume.slope
            ),
        });
    }
    // 5. Lelong number maximal at the origin (16 sampled interior points)
    {
        let mut rng = ChaCha8Rng::seed_from_u64(subseed(config.seed, "lelong-max", 0));
        let mut worst = f64::NEG_INFINITY;
        let mut worst_point = Vec::new();
        for _ in 0..16 {
            let d = sphere_direction(&mut rng, 2 * spec.dimension);
            let r = spec.domain_radius * (0.15 + 0.45 * rand::Rng::gen::<f64>(&mut rng));
            let x: Vec<f64> = d.iter().map(|v| v * r).collect();
            let est = lelong_at_point(spec, &x, config);
            if est.slope > worst {
                worst = est.slope;
                worst_point = x;
            }
        }
        let t = config.pass_tol_abs;
        let margin = report.nu.slope + t - worst;
        checks.push(TheoremCheck {
            id: "lelong-max-at-origin",
            statement: "nu(x) <= nu(0) on sampled interior points".to_string(),
            status: pass_if(worst <= report.nu.slope + t),
            margin,
            tolerance: t,
            detail: format!(
                "max sampled nu(x) = {:.4} at {:?}, nu(0) = {:.4}",
                worst,
                worst_point.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>(),
                report.nu.slope
            ),
        });
    }
    // 6. tau_hat identity (exact by construction)
    {
        let gap = (report.tau_hat - report.nu_hat.slope.powi(spec.dimension as i32)).abs();
        checks.push(TheoremCheck {
            id: "radial-residue-mass-formula",
            statement: "tau_hat = nu_hat^n".to_string(),
            status: pass_if(gap <= 1e-12),
            margin: 1e-12 - gap,
            tolerance: 1e-12,
            detail: format!("tau_hat = {:.6}", report.tau_hat),
        });
    }
    // 7. mass domination tau_hat <= tau
    {
        let (status, margin, detail) = match report.tau {
            TauValue::Known(v) => (
                pass_if(report.tau_hat <= v + config.pass_tol_abs),
                v - report.tau_hat,
                format!("tau_hat = {:.4} vs tau = {:.4}", report.tau_hat, v),
            ),
            TauValue::Unbounded => (
                CheckStatus::Pass,
                f64::INFINITY,
                "tau unbounded: domination vacuous".to_string(),
            ),
            TauValue::Undefined => (
                CheckStatus::Inapplicable,
                0.0,
                "tau not well defined for this function".to_string(),
            ),
            TauValue::Unknown => match report.rashkovskii_lb {
                Some(lb) => (
                    pass_if(report.tau_hat <= lb + config.pass_tol_abs),
                    lb - report.tau_hat,
                    format!(
                        "tau_hat = {:.4} vs certified lower bound {:.4}",
                        report.tau_hat, lb
                    ),
                ),
                None => (
                    CheckStatus::Inapplicable,
                    0.0,
                    "no mass ground truth and no single pole for the lower bound".to_string(),
                ),
            },
        };
        checks.push(TheoremCheck {
            id: "mass-domination",
            statement: "tau_hat <= tau".to_string(),
            status,
            margin,
            tolerance: config.pass_tol_abs,
            detail,
        });
    }
    // 8. AM-GM step at the Kiselman maximizer
    {
        let (status, margin, detail) = match (&report.kiselman_argmax, &report.iota_kiselman) {
            (Some(a), Some(k)) => {
                let prod: f64 = a.iter().product();
                let geo = n * prod.powf(1.0 / n);
                let margin = 1.0 - geo;
                let nu_a = k.slope;
                (
                    pass_if(margin >= -1e-9),
                    margin,
                    format!(
                        "n (prod a)^(1/n) = {:.6} <= 1 at a = {:?} (nu(0,a) = {:.4})",
                        geo,
                        a.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>(),
                        nu_a
                    ),
                )
            }
            _ => (CheckStatus::Inapplicable, 0.0, "no maximizer".to_string()),
        };
        checks.push(TheoremCheck {
            id: "am-gm-at-maximizer",
            statement: "n (a_1...a_n)^(1/n) <= sum a = 1".to_string(),
            status,
            margin,
            tolerance: 1e-9,
            detail,
        });
    }
    // 9. Monge-Ampere consistency of the mollified symmetrized profile
    {
        let smooth = symm.u_hat.mollified(0.5);
        let r = 0.5 * spec.domain_radius;
        let fine = radial_ma_consistency(&smooth, spec.dimension, r, 2048);
        let coarse = radial_ma_consistency(&smooth, spec.dimension, r, 1024);
        let (status, margin, t, detail) = match (fine, coarse) {
            (Ok(f), Ok(c)) => {
                // near-zero masses compare absolutely, not relatively
                let scale_ok = f.rhs.abs() > 1e-3;
                let worst = if scale_ok {
                    f.rel_gap.max(c.rel_gap)
                } else {
                    (f.lhs - f.rhs).abs().max((c.lhs - c.rhs).abs())
                };
                (
                    pass_if(worst <= 0.02),
                    0.02 - worst,
                    0.02,
                    format!(
                        "integral = {:.5} vs flux = {:.5} (gap {:.4} fine, {:.4} coarse)",
                        f.lhs, f.rhs, f.rel_gap, c.rel_gap
                    ),
                )
            }
            (e1, e2) => (
                CheckStatus::Fail,
                -1.0,
                0.02,
                format!("consistency evaluation failed: {e1:?} / {e2:?}"),
            ),
        };
        checks.push(TheoremCheck {
            id: "radial-ma-consistency",
            statement: "integral of det(u_jk) over B_R = [R y'(R)]^n for the smoothed profile"
                .to_string(),
            status,
            margin,
            tolerance: t,
            detail,
        });
    }
    // 10. Berman-Berndtsson: the symmetrized profile is convex
    {
        let excess = symm.checks.worst_excess_over_tol;
        checks.push(TheoremCheck {
            id: "symmetrization-convexity",
            statement: "u_hat is plurisubharmonic: its log-radius profile is convex".to_string(),
            status: pass_if(excess <= 0.0 && symm.checks.monotone),
            margin: -excess,
            tolerance: 0.0,
            detail: format!(
                "max raw violation {:.3e}, worst noise-adjusted excess {excess:.3e}",
                symm.checks.max_convexity_violation
            ),
        });
    }

    let all_applicable_pass = checks
        .iter()
        .all(|c| c.status != CheckStatus::Fail);
    TheoremReport {
        name: entry.name.clone(),
        checks,
        all_applicable_pass,
    }
}
