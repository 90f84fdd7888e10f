//! Increasing rearrangement, Schwarz symmetrization, and the
//! equimeasurability / inequality suite.
//!
//! The rearrangement `u_*` is the generalized inverse of the distribution
//! function `mu(t) = |{u < t}|`; the symmetrization is the radial function
//! `u_hat(x) = u_*(a_2n |x|^(2n))`. Working in `t_hat = log|x|` coordinates,
//! the knots of the symmetrized profile are exactly
//! `(log(mu(t)/a_2n)/(2n), t)`, and convexity of that profile is the
//! Berman-Berndtsson plurisubharmonicity criterion made checkable.

use thiserror::Error;

use crate::function::{Body, FunctionSpec, PoleStructure, SymmetryClass};
use crate::numeric::{ball_volume, subseed};
use crate::profile::{LogTail, MonotoneTable, RadialProfile, TableMode};
use crate::volume::monte_carlo::mc_ball_integral;
use crate::volume::{sublevel_volume, volume_profile, VolumeConfig, VolumeError};

#[derive(Debug, Error)]
pub enum RearrangeError {
    #[error("grid too coarse between t = {hi} and t = {lo}: inversion jump {jump:.3} with strictly increasing volume in between")]
    GridTooCoarse { lo: f64, hi: f64, jump: f64 },
    #[error("symmetrized profile violates convexity by {magnitude:.3e} at t = {witness:?} (non-psh input or insufficient grid)")]
    ConvexityViolation {
        witness: (f64, f64, f64),
        magnitude: f64,
    },
    #[error("finite-difference gradients disagree by {rel_disagreement:.3} between step sizes")]
    NumericalGradientUnstable { rel_disagreement: f64 },
    #[error("degenerate rearrangement: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Volume(#[from] VolumeError),
}

/// Post-t_hat-jump threshold that triggers the coarseness probe.
const JUMP_THRESHOLD: f64 = 8.0;

#[derive(Debug, Clone, serde::Serialize)]
pub struct SymmChecks {
    pub max_convexity_violation: f64,
    /// Worst convexity excess measured against the per-triple noise
    /// tolerance (positive means a genuine violation: a non-psh input or an
    /// insufficient grid).
    pub worst_excess_over_tol: f64,
    /// Witness triple of the worst noise-adjusted excess.
    pub worst_triple: (f64, f64, f64),
    pub monotone: bool,
    /// Value pinned at the boundary; `sup u_hat = u_hat(R0) = 0`.
    pub boundary_value: f64,
    pub dropped_empty_points: usize,
    pub cummin_adjustments: (usize, f64),
    /// Worst relative volume error among the knots (Monte Carlo knots are
    /// noisy, quadrature knots are not).
    pub worst_volume_rel_error: f64,
}

/// The symmetrization of a function spec: rearrangement table, radial
/// profile of `u_hat`, and the grid it was built from.
#[derive(Debug, Clone)]
pub struct SymmetrizationResult {
    pub source_name: String,
    pub u_star: MonotoneTable,
    pub u_hat: RadialProfile,
    pub t_grid: Vec<f64>,
    pub checks: SymmChecks,
    /// Per-grid-point volume estimates (`None` where evaluation failed),
    /// kept for CSV export and diagnostics.
    pub volume_series: Vec<(f64, Option<crate::volume::VolumeEstimate>)>,
}

impl SymmetrizationResult {
    /// Wraps `u_hat` as a radial function spec on the same ball, usable by
    /// every downstream operation (idempotence tests, radial mass formulas).
    pub fn as_radial_spec(&self, source: &FunctionSpec) -> FunctionSpec {
        let has_pole = self
            .u_star
            .tail
            .map(|t| t.slope > 1e-9)
            .unwrap_or(false);
        FunctionSpec {
            name: format!("{}-hat", self.source_name),
            dimension: source.dimension,
            symmetry: SymmetryClass::Radial,
            domain_radius: source.domain_radius,
            extension_margin: source.extension_margin,
            body: Body::Radial(self.u_hat.clone()),
            pole_structure: if has_pole {
                PoleStructure::SinglePoleAtOrigin
            } else {
                PoleStructure::NoPole
            },
            normalization_shift: 0.0,
        }
    }
}

/// Default symmetrization grid: geometric refinement near 0 for
/// rearrangement fidelity, ~0.02 spacing down to -4 (piecewise-linear
/// interpolation error of the table goes like the square of the spacing),
/// coarser to -8, then a uniform deep part for asymptotics. Strictly
/// decreasing.
pub fn default_t_grid(t_floor: f64) -> Vec<f64> {
    let t_floor = t_floor.min(-20.0);
    let mut grid = Vec::new();
    // geometric from -1e-3 to -0.05
    let (la, lb) = ((1e-3f64).ln(), (0.05f64).ln());
    for i in 0..24 {
        grid.push(-((la + (lb - la) * i as f64 / 23.0).exp()));
    }
    // uniform -0.05 .. -4
    for i in 1..=200 {
        grid.push(-0.05 + (-4.0 + 0.05) * i as f64 / 200.0);
    }
    // uniform -4 .. -8
    for i in 1..=100 {
        grid.push(-4.0 - 4.0 * i as f64 / 100.0);
    }
    // uniform -8 .. t_floor
    let deep_steps = 180;
    for i in 1..=deep_steps {
        grid.push(-8.0 + (t_floor + 8.0) * i as f64 / deep_steps as f64);
    }
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    grid
}

/// Computes the increasing rearrangement table of `u` from volumes on the
/// grid.
pub fn increasing_rearrangement(
    spec: &FunctionSpec,
    t_grid: &[f64],
    config: &VolumeConfig,
) -> Result<MonotoneTable, RearrangeError> {
    Ok(symmetrize_impl(spec, t_grid, config)?.u_star)
}

/// Builds the Schwarz symmetrization and verifies the convexity and
/// monotonicity invariants of the resulting radial profile.
pub fn schwarz_symmetrize(
    spec: &FunctionSpec,
    t_grid: &[f64],
    config: &VolumeConfig,
) -> Result<SymmetrizationResult, RearrangeError> {
    let result = symmetrize_impl(spec, t_grid, config)?;
    if result.checks.worst_excess_over_tol > 0.0 {
        return Err(RearrangeError::ConvexityViolation {
            witness: result.checks.worst_triple,
            magnitude: result.checks.max_convexity_violation,
        });
    }
    Ok(result)
}

fn symmetrize_impl(
    spec: &FunctionSpec,
    t_grid: &[f64],
    config: &VolumeConfig,
) -> Result<SymmetrizationResult, RearrangeError> {
    if t_grid.is_empty() {
        return Err(RearrangeError::Degenerate("empty t grid".to_string()));
    }
    let n2 = 2 * spec.dimension;
    let measure = spec.domain_measure();
    let ln_a = ball_volume(n2).ln();
    let profile = volume_profile(spec, t_grid, config);
    let volume_series: Vec<(f64, Option<crate::volume::VolumeEstimate>)> = profile
        .points
        .iter()
        .map(|p| (p.t, p.estimate.as_ref().ok().copied()))
        .collect();

    // (t, ln mu, rel error) triples with positive volume, shallow to deep
    let mut usable: Vec<(f64, f64, f64)> = Vec::new();
    let mut dropped = 0usize;
    let mut worst_rel = 0.0f64;
    for p in &profile.points {
        match &p.estimate {
            // enclosures without a certified interior (rel_error ~ 1) carry
            // no usable value and would corrupt the profile knots
            Ok(est) if est.ln_value > f64::NEG_INFINITY && est.rel_error < 0.5 => {
                worst_rel = worst_rel.max(est.rel_error);
                usable.push((p.t, est.ln_value, est.rel_error));
            }
            Ok(_) => dropped += 1,
            Err(_) => dropped += 1,
        }
    }

    if usable.is_empty() {
        // u == 0 a.e. (normalized, no sub-level mass anywhere on the grid)
        let table = MonotoneTable::new(
            vec![(0.0, 0.0), (measure, 0.0)],
            TableMode::Linear,
            measure,
            None,
        )
        .map_err(RearrangeError::Degenerate)?;
        let u_hat = RadialProfile::table(vec![
            (spec.domain_radius.ln() - 1.0, 0.0),
            (spec.domain_radius.ln(), 0.0),
        ])
        .map_err(RearrangeError::Degenerate)?;
        return Ok(SymmetrizationResult {
            source_name: spec.name.clone(),
            u_star: table,
            u_hat,
            t_grid: t_grid.to_vec(),
            checks: SymmChecks {
                max_convexity_violation: 0.0,
                worst_excess_over_tol: f64::NEG_INFINITY,
                worst_triple: (0.0, 0.0, 0.0),
                monotone: true,
                boundary_value: 0.0,
                dropped_empty_points: dropped,
                cummin_adjustments: profile.adjustments,
                worst_volume_rel_error: 0.0,
            },
            volume_series,
        });
    }

    // knots of the symmetrized profile: t_hat = (ln mu - ln a_2n) / 2n,
    // value = t; ascending in t_hat means ascending in t. Each knot carries
    // the abscissa noise rel_error / 2n of its volume estimate.
    usable.reverse(); // deep to shallow => t_hat increasing
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(usable.len() + 1);
    let mut sigmas: Vec<f64> = Vec::with_capacity(usable.len() + 1);
    for &(t, ln_mu, rel) in &usable {
        let t_hat = (ln_mu - ln_a) / n2 as f64;
        match knots.last() {
            // flat volume stretches collapse to the smallest t (the inf in
            // the rearrangement definition)
            Some(&(prev_hat, _)) if t_hat <= prev_hat + 1e-12 => continue,
            _ => {
                knots.push((t_hat, t));
                sigmas.push(rel / n2 as f64);
            }
        }
    }
    // boundary pin: mu(0^-) = |Omega|, u_hat(R0) = 0
    let ln_r0 = spec.domain_radius.ln();
    if knots.last().map(|k| k.0 < ln_r0 - 1e-12).unwrap_or(true) {
        knots.push((ln_r0, 0.0));
        sigmas.push(0.0);
    }
    if knots.len() < 2 {
        return Err(RearrangeError::Degenerate(
            "fewer than two usable volume levels".to_string(),
        ));
    }

    // coarseness probe: across large inversion jumps, compare the
    // interpolated profile against a midpoint volume probe. A large jump by
    // itself is legitimate (the Kiselman example collapses
    // super-exponentially); skipped curvature is not.
    for w in knots.windows(2) {
        let (h0, t0) = w[0];
        let (h1, t1) = w[1];
        if h1 - h0 > JUMP_THRESHOLD && t1 - t0 > 1e-9 {
            let t_mid = 0.5 * (t0 + t1);
            if let Ok(mid) = sublevel_volume(spec, t_mid, config) {
                if !mid.ln_value.is_finite() {
                    continue;
                }
                let mid_hat = (mid.ln_value - ln_a) / n2 as f64;
                if mid_hat > h0 + 1e-9 && mid_hat < h1 - 1e-9 {
                    let predicted = t0 + (t1 - t0) * (mid_hat - h0) / (h1 - h0);
                    if (predicted - t_mid).abs() > 0.1 {
                        return Err(RearrangeError::GridTooCoarse {
                            lo: t0,
                            hi: t1,
                            jump: h1 - h0,
                        });
                    }
                }
            }
        }
    }

    // rearrangement table: s = mu(t), tail below the deepest knot follows
    // the deep slope of u_hat. Knots whose measure underflows f64 live only
    // in the profile; the logarithmic tail covers their range of s.
    let kept: Vec<(f64, f64)> = knots
        .iter()
        .copied()
        .filter(|&(t_hat, _)| ln_a + n2 as f64 * t_hat > -640.0)
        .collect();
    if kept.len() < 2 {
        return Err(RearrangeError::Degenerate(
            "all measures underflow the table scale".to_string(),
        ));
    }
    let mut breaks: Vec<(f64, f64)> = kept
        .iter()
        .map(|&(t_hat, t)| ((ln_a + n2 as f64 * t_hat).exp(), t))
        .collect();
    // exact span to the domain measure
    if let Some(last) = breaks.last_mut() {
        last.0 = measure;
    }
    let deep_slope = {
        let (h0, v0) = kept[0];
        let (h1, v1) = kept[1];
        ((v1 - v0) / (h1 - h0)).max(0.0)
    };
    let tail = if spec.pole_structure == PoleStructure::NoPole {
        // bounded below: the essential infimum extends flatly
        None
    } else {
        Some(LogTail {
            s_knee: breaks[0].0,
            v_knee: breaks[0].1,
            slope: deep_slope / n2 as f64,
        })
    };
    if spec.pole_structure == PoleStructure::NoPole {
        knots.insert(0, (knots[0].0 - 30.0, knots[0].1));
        sigmas.insert(0, sigmas[0]);
    }

    let u_hat = RadialProfile::table(knots.clone()).map_err(RearrangeError::Degenerate)?;
    // convexity scan of the knot triples against a noise-aware per-triple
    // tolerance: abscissa noise sigma translates into chord-excess noise via
    // the local slope
    let mut max_violation = 0.0f64;
    let mut worst_excess_over_tol = f64::NEG_INFINITY;
    let mut worst_triple = (0.0, 0.0, 0.0);
    let monotone = knots.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12);
    for (w, sw) in knots.windows(3).zip(sigmas.windows(3)) {
        let (t1, v1) = w[0];
        let (t2, v2) = w[1];
        let (t3, v3) = w[2];
        let chord = v1 + (v3 - v1) * (t2 - t1) / (t3 - t1);
        let excess = v2 - chord;
        max_violation = max_violation.max(excess);
        let slope_scale = ((v3 - v1) / (t3 - t1)).abs().max(1.0);
        let noise = (sw[0] * sw[0] + sw[1] * sw[1] + sw[2] * sw[2]).sqrt();
        let tol = 1e-5 * (1.0 + v1.abs().max(v3.abs())) + 3.0 * noise * slope_scale;
        if excess - tol > worst_excess_over_tol {
            worst_excess_over_tol = excess - tol;
            worst_triple = (t1, t2, t3);
        }
    }
    let u_star = if tail.is_none() && breaks[0].0 > 1e-9 * measure {
        // bounded functions: constant down to s = 0
        let mut b = breaks.clone();
        b.insert(0, (0.0, b[0].1));
        MonotoneTable::new(b, TableMode::Linear, measure, None)
    } else {
        MonotoneTable::new(breaks, TableMode::Linear, measure, tail)
    }
    .map_err(RearrangeError::Degenerate)?;

    let boundary_value = u_hat.eval(ln_r0);
    Ok(SymmetrizationResult {
        source_name: spec.name.clone(),
        u_star,
        u_hat,
        t_grid: t_grid.to_vec(),
        checks: SymmChecks {
            max_convexity_violation: max_violation,
            worst_excess_over_tol,
            worst_triple,
            monotone,
            boundary_value,
            dropped_empty_points: dropped,
            cummin_adjustments: profile.adjustments,
            worst_volume_rel_error: worst_rel,
        },
        volume_series,
    })
}

/// One probe level of the equimeasurability check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EquimeasurabilityRow {
    pub t: f64,
    pub vol_u: f64,
    pub vol_u_star: f64,
    pub vol_u_hat: f64,
    pub rel_discrepancy: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EquimeasurabilityReport {
    pub rows: Vec<EquimeasurabilityRow>,
    pub max_rel_discrepancy: f64,
}

/// Compares `|{u < t}|`, `|{u_* < t}|` and `|{u_hat < t}|` at probe levels.
pub fn equimeasurability_check(
    spec: &FunctionSpec,
    result: &SymmetrizationResult,
    t_probes: &[f64],
    config: &VolumeConfig,
) -> EquimeasurabilityReport {
    let hat_spec = result.as_radial_spec(spec);
    let mut rows = Vec::with_capacity(t_probes.len());
    let mut worst = 0.0f64;
    for &t in t_probes {
        let vol_u = sublevel_volume(spec, t, config)
            .map(|e| e.value)
            .unwrap_or(f64::NAN);
        let vol_star = result.u_star.sublevel_measure(t);
        let vol_hat = sublevel_volume(&hat_spec, t, config)
            .map(|e| e.value)
            .unwrap_or(f64::NAN);
        let hi = vol_u.max(vol_star).max(vol_hat);
        let lo = vol_u.min(vol_star).min(vol_hat);
        let rel = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
        worst = worst.max(rel);
        rows.push(EquimeasurabilityRow {
            t,
            vol_u,
            vol_u_star: vol_star,
            vol_u_hat: vol_hat,
            rel_discrepancy: rel,
        });
    }
    EquimeasurabilityReport {
        rows,
        max_rel_discrepancy: worst,
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct LayerCakeReport {
    pub c: f64,
    /// Both sides at the full truncation depth.
    pub lhs: f64,
    pub rhs: f64,
    pub rel_gap: f64,
    pub lhs_divergent: bool,
    pub rhs_divergent: bool,
    pub both_divergent: bool,
}

/// Layer-cake check with the kernel `F(u) = exp(-2 c u)`: compares
/// `integral_B F(u) dlambda` (volume engine) against
/// `integral_0^[Omega] F(u_*(s)) ds` (table closed forms).
///
/// Integrands are truncated at the table floor and at half that depth; both
/// sides growing under deepening is the divergence signal. For `c` above the
/// integrability threshold the two sides must jointly diverge.
pub fn layer_cake_exp(
    spec: &FunctionSpec,
    result: &SymmetrizationResult,
    c: f64,
    config: &VolumeConfig,
) -> LayerCakeReport {
    assert!(c >= 0.0);
    let t_deep = result
        .u_star
        .breaks
        .first()
        .map(|b| b.1)
        .unwrap_or(-1.0)
        .min(-1.0);
    let t_half = t_deep / 2.0;

    let rhs_full = rhs_truncated(&result.u_star, c, t_deep);
    let rhs_half = rhs_truncated(&result.u_star, c, t_half);
    let lhs_full = lhs_truncated(spec, c, t_deep, config);
    let lhs_half = lhs_truncated(spec, c, t_half, config);

    let tail_exponent_diverges = result
        .u_star
        .tail
        .map(|tail| 2.0 * c * tail.slope >= 1.0)
        .unwrap_or(false);
    let rhs_divergent = tail_exponent_diverges || rhs_full > 1.5 * rhs_half;
    let lhs_divergent = lhs_full > 1.5 * lhs_half;
    let rel_gap = if rhs_full > 0.0 {
        (lhs_full - rhs_full).abs() / rhs_full
    } else {
        0.0
    };
    LayerCakeReport {
        c,
        lhs: lhs_full,
        rhs: rhs_full,
        rel_gap,
        lhs_divergent,
        rhs_divergent,
        both_divergent: lhs_divergent && rhs_divergent,
    }
}

/// `integral_0^measure exp(-2 c max(u_*(s), t_floor)) ds`, closed form per
/// table segment plus the logarithmic tail (a power law in `s`).
fn rhs_truncated(table: &MonotoneTable, c: f64, t_floor: f64) -> f64 {
    let s_floor = table.sublevel_measure(t_floor);
    let mut total = (-2.0 * c * t_floor).exp() * s_floor;
    if let Some(tail) = table.tail {
        if s_floor < tail.s_knee && tail.slope >= 0.0 {
            let p = 2.0 * c * tail.slope;
            let a = (-2.0 * c * tail.v_knee).exp();
            let ratio = (s_floor / tail.s_knee).max(0.0);
            let term = if (1.0 - p).abs() < 1e-12 {
                a * tail.s_knee * (-(ratio.max(1e-300)).ln())
            } else {
                a * tail.s_knee * (1.0 - ratio.powf(1.0 - p)) / (1.0 - p)
            };
            total += term.max(0.0);
        }
    }
    for w in table.breaks.windows(2) {
        let (sa, va) = w[0];
        let (sb, vb) = w[1];
        let lo = sa.max(s_floor);
        if lo >= sb {
            continue;
        }
        let v_lo = if sb > sa {
            va + (vb - va) * (lo - sa) / (sb - sa)
        } else {
            va
        };
        let v_lo = v_lo.max(t_floor);
        let ds = sb - lo;
        let dv = vb - v_lo;
        total += if dv.abs() < 1e-14 || c == 0.0 {
            ds * (-2.0 * c * v_lo).exp()
        } else {
            let ea = (-2.0 * c * v_lo).exp();
            let eb = (-2.0 * c * vb).exp();
            ds * (ea - eb) / (2.0 * c * dv)
        };
    }
    total
}

/// `integral_B exp(-2 c max(u, t_floor)) dlambda`.
///
/// For radial and toric bodies this goes through the exact level transform
/// `|Omega| + 2c integral_T^0 e^{-2ct} mu(t) dt` with fresh volume-engine
/// evaluations at the quadrature nodes (pointwise exponential weights reach
/// arbitrarily deep truncations, which Monte Carlo cannot). General
/// S1-invariant bodies fall back to Monte Carlo; there the divergence signal
/// only reaches as deep as the sampling resolves.
fn lhs_truncated(spec: &FunctionSpec, c: f64, t_floor: f64, config: &VolumeConfig) -> f64 {
    if matches!(spec.body, Body::Point(_)) {
        let f = move |_: &[f64], u: f64| (-2.0 * c * u.max(t_floor)).exp();
        let samples = config.mc_samples.max(200_000);
        let (value, _err) = mc_ball_integral(
            spec,
            &f,
            samples,
            subseed(config.seed, "layer-cake", (c * 1e6) as u64),
        );
        return value;
    }
    let omega = spec.domain_measure();
    if c == 0.0 {
        return omega;
    }
    // Gauss-Legendre 6 on geometric subdivisions of [t_floor, -delta]
    const GL_X: [f64; 6] = [
        -0.932469514203152,
        -0.661209386466265,
        -0.238619186083197,
        0.238619186083197,
        0.661209386466265,
        0.932469514203152,
    ];
    const GL_W: [f64; 6] = [
        0.171324492379170,
        0.360761573048139,
        0.467913934572691,
        0.467913934572691,
        0.360761573048139,
        0.171324492379170,
    ];
    let delta = 1e-6f64;
    let segments = 20usize;
    let ratio = (t_floor / -delta).powf(1.0 / segments as f64);
    let mut total = 0.0f64;
    let mut hi = -delta;
    for _ in 0..segments {
        let lo = hi * ratio;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, w) in GL_X.iter().zip(GL_W.iter()) {
            let t = mid + half * x;
            let mu = sublevel_volume(spec, t, config)
                .map(|e| e.value)
                .unwrap_or(0.0);
            total += w * half * (-2.0 * c * t).exp() * mu;
        }
        hi = lo;
    }
    // remainder (-delta, 0) with mu ~ |Omega|
    let shallow = omega * (1.0 - (-2.0 * c * delta).exp()) / (2.0 * c);
    omega + 2.0 * c * (total + shallow)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SublevelIntegralReport {
    /// `integral_E u`.
    pub lhs: f64,
    /// `integral_0^|E| u_*(s) ds`.
    pub rhs: f64,
    pub gap: f64,
    pub three_sigma: f64,
    pub holds: bool,
    /// For centered balls: `integral_{B_r} u_hat`, which must equal `rhs`.
    pub centered_u_hat_integral: Option<f64>,
}

/// Verifies `integral_E u >= integral_0^{|E|} u_*` for a ball probe
/// `E = B_r(x0)`; for centered balls additionally computes
/// `integral_{B_r} u_hat` (the ingredient of the average-comparison route to
/// `nu <= nu_hat`).
pub fn sublevel_integral_check(
    spec: &FunctionSpec,
    result: &SymmetrizationResult,
    center: &[f64],
    radius: f64,
    config: &VolumeConfig,
) -> SublevelIntegralReport {
    let n2 = 2 * spec.dimension;
    assert_eq!(center.len(), n2);
    let dist: f64 = center.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(
        dist + radius <= spec.domain_radius * (1.0 + 1e-9),
        "probe ball must sit inside the domain"
    );
    let e_measure = ball_volume(n2) * radius.powi(n2 as i32);

    // LHS by Monte Carlo over the probe ball; exact-polar hits are clamped
    let clamp_floor = 8.0 * spec.t_min().min(-40.0);
    let samples = (config.mc_samples / 2).max(100_000);
    let seed = subseed(config.seed, "sublevel-integral", radius.to_bits());
    let probe_spec = shifted_probe(spec, center, radius);
    let (lhs, err) = mc_ball_integral(&probe_spec, &|_, u| u.max(clamp_floor), samples, seed);
    let rhs = result.u_star.integrate_value(e_measure);

    let centered = if dist < 1e-12 {
        Some(integral_u_hat_ball(
            &result.u_hat,
            spec.dimension,
            radius.ln(),
        ))
    } else {
        None
    };
    let gap = lhs - rhs;
    SublevelIntegralReport {
        lhs,
        rhs,
        gap,
        three_sigma: err,
        holds: gap >= -(err + 1e-6 * rhs.abs().max(1.0)),
        centered_u_hat_integral: centered,
    }
}

/// A spec restricted to the probe ball `B_r(x0)`: same body, evaluated at
/// `x0 + z`. Only used for Monte Carlo averaging over probe balls.
fn shifted_probe(spec: &FunctionSpec, center: &[f64], radius: f64) -> FunctionSpec {
    let base = spec.clone();
    let c = center.to_vec();
    FunctionSpec {
        name: format!("{}-probe", spec.name),
        dimension: spec.dimension,
        symmetry: SymmetryClass::S1Invariant,
        domain_radius: radius,
        extension_margin: spec.extension_margin,
        body: Body::Point(std::sync::Arc::new(move |z: &[f64]| {
            let shifted: Vec<f64> = z.iter().zip(&c).map(|(a, b)| a + b).collect();
            base.evaluate_unchecked(&shifted)
        })),
        pole_structure: spec.pole_structure,
        normalization_shift: 0.0,
    }
}

/// `2n a_2n integral_(-inf)^(ln r) f(t) e^(2n t) dt` for a tabulated radial
/// profile: the integral of `u_hat` over the centered ball of radius `r`.
fn integral_u_hat_ball(profile: &RadialProfile, n: usize, ln_r: f64) -> f64 {
    let knots = profile
        .knots()
        .expect("symmetrization profiles are tabulated");
    let lam = (2 * n) as f64;
    let prefactor = lam * ball_volume(2 * n);
    // antiderivative of (v0 + m (t - t0)) e^(lam t):
    // e^(lam t) ((v0 + m (t - t0)) / lam - m / lam^2)
    let piece = |v0: f64, m: f64, t0: f64, a: f64, b: f64| -> f64 {
        let f = |t: f64| (lam * t).exp() * ((v0 + m * (t - t0)) / lam - m / (lam * lam));
        let fa = if a == f64::NEG_INFINITY { 0.0 } else { f(a) };
        f(b) - fa
    };
    let mut total = 0.0f64;
    // deep tail with the left slope
    let (t0, v0) = knots[0];
    let m_left = {
        let (t1, v1) = knots[1];
        (v1 - v0) / (t1 - t0)
    };
    let cap = ln_r.min(t0);
    total += piece(v0, m_left, t0, f64::NEG_INFINITY, cap);
    for w in knots.windows(2) {
        let (ta, va) = w[0];
        let (tb, vb) = w[1];
        if ta >= ln_r {
            break;
        }
        let hi = tb.min(ln_r);
        if hi <= ta {
            continue;
        }
        let m = (vb - va) / (tb - ta);
        total += piece(va, m, ta, ta, hi);
    }
    prefactor * total
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PolyaSzegoReport {
    pub p: f64,
    pub rho: f64,
    /// Truncation level `u_hat(log rho)`.
    pub level: f64,
    pub energy_u: f64,
    pub energy_u_hat: f64,
    pub margin: f64,
    pub three_sigma: f64,
    pub holds: bool,
}

/// Polya-Szego check at exponent `p`: gradients of the pair truncated at
/// `u_hat(log rho)` (truncation commutes with symmetrization, keeping both
/// sides comparable while excluding the singularity).
///
/// The symmetrized side integrates the profile derivative in closed form per
/// segment; the source side uses Monte Carlo with central finite differences
/// in log coordinates, Richardson-checked between two step sizes.
pub fn polya_szego_check(
    spec: &FunctionSpec,
    result: &SymmetrizationResult,
    p: f64,
    rho: f64,
    config: &VolumeConfig,
) -> Result<PolyaSzegoReport, RearrangeError> {
    assert!(p >= 1.0 && rho > 0.0 && rho < spec.domain_radius);
    let level = result.u_hat.eval(rho.ln());
    let n2 = 2 * spec.dimension;

    // u_hat side: 2n a_2n integral (f')^p e^{(2n - p) t} dt over [ln rho, ln R0]
    let energy_u_hat = {
        let knots = result.u_hat.knots().expect("tabulated");
        let lam = n2 as f64 - p;
        let mut total = 0.0f64;
        for w in knots.windows(2) {
            let (ta, va) = w[0];
            let (tb, vb) = w[1];
            let lo = ta.max(rho.ln());
            let hi = tb.min(spec.domain_radius.ln());
            if hi <= lo {
                continue;
            }
            let m = ((vb - va) / (tb - ta)).max(0.0);
            let weight = if lam.abs() < 1e-12 {
                hi - lo
            } else {
                ((lam * hi).exp() - (lam * lo).exp()) / lam
            };
            total += m.powf(p) * weight;
        }
        n2 as f64 * ball_volume(n2) * total
    };

    // u side: MC over the ball, gradients by central differences at two steps
    let samples = (config.mc_samples / 4).max(100_000);
    let seed = subseed(config.seed, "polya-szego", p.to_bits());
    let h1 = 1e-3;
    let (e1, err1) = gradient_energy_mc(spec, level, p, h1, samples, seed);
    let (e2, _err2) = gradient_energy_mc(spec, level, p, h1 / 2.0, samples, seed);
    let rel_disagreement = (e1 - e2).abs() / e1.abs().max(1e-12);
    if rel_disagreement > 0.05 {
        return Err(RearrangeError::NumericalGradientUnstable { rel_disagreement });
    }
    let energy_u = e2;
    let margin = energy_u - energy_u_hat;
    Ok(PolyaSzegoReport {
        p,
        rho,
        level,
        energy_u,
        energy_u_hat,
        margin,
        three_sigma: err1,
        holds: margin >= -(err1 + 0.02 * energy_u.abs().max(1e-9)),
    })
}

/// `integral_{u > level} |grad u|^p` by Monte Carlo; the gradient is computed
/// per symmetry class (profile derivative in log coordinates where
/// available).
fn gradient_energy_mc(
    spec: &FunctionSpec,
    level: f64,
    p: f64,
    h: f64,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let f = move |z: &[f64], u: f64| -> f64 {
        if !(u > level) {
            return 0.0;
        }
        let grad_sq = gradient_squared(spec, z, h);
        grad_sq.powf(p / 2.0)
    };
    mc_ball_integral(spec, &f, samples, seed)
}

fn gradient_squared(spec: &FunctionSpec, z: &[f64], h: f64) -> f64 {
    match &spec.body {
        Body::Radial(profile) => {
            let r: f64 = z.iter().map(|v| v * v).sum::<f64>().sqrt();
            let t = r.ln();
            let d = (profile.eval(t + h) - profile.eval(t - h)) / (2.0 * h);
            let g = d / r;
            g * g
        }
        Body::Toric(profile) => {
            let n = spec.dimension;
            let x: Vec<f64> = (0..n)
                .map(|k| z[2 * k].hypot(z[2 * k + 1]).max(1e-300).ln())
                .collect();
            let mut acc = 0.0f64;
            for k in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += h;
                xm[k] -= h;
                let gk = (profile.eval(&xp) - profile.eval(&xm)) / (2.0 * h);
                let rk = x[k].exp();
                if rk > 0.0 {
                    acc += (gk / rk) * (gk / rk);
                }
            }
            acc
        }
        Body::Point(f) => {
            let step = h * spec.domain_radius;
            let mut acc = 0.0f64;
            let mut zp = z.to_vec();
            for j in 0..z.len() {
                let orig = zp[j];
                zp[j] = orig + step;
                let up = f(&zp);
                zp[j] = orig - step;
                let um = f(&zp);
                zp[j] = orig;
                let d = (up - um) / (2.0 * step);
                acc += d * d;
            }
            acc
        }
    }
}
