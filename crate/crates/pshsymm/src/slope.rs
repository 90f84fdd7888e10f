//! Asymptotic slope extraction by weighted least squares on deep windows.
//!
//! Lelong numbers, integrability indices and refined Lelong numbers are all
//! limits of difference quotients as `t -> -inf`. On a finite trusted window
//! the honest surrogate is a regression over its deepest part with weights
//! `|t|`, a window-halving stability diagnostic, and a `log(-t)` correction
//! regressor: profiles of the catalog obey `y(t) = beta t + gamma log(-t) +
//! c + o(1)` (the logarithmic term carries the polar-set geometry, e.g.
//! `log mu(t) = t + log|t| + c` for `2 log|z1 z2|`), and the plain linear
//! model leaves a `1/|t|` bias in the slope that the tolerances here cannot
//! absorb.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlopeMethod {
    ProfileDerivative,
    MaxOnSpheres,
    MeanOnTori,
    VolumeLogRatio,
}

/// An asymptotic slope with its regression window and uncertainty.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub points_used: usize,
    pub method: SlopeMethod,
    /// Set when halving the window moves the slope by more than
    /// `max(3 stderr, 0.005)`.
    pub unstable: bool,
    pub notes: Vec<String>,
}

/// Absolute floor of the stability comparison; exact fits have zero stderr.
const STABILITY_FLOOR: f64 = 5e-3;

pub(crate) struct Fit {
    pub beta: f64,
    pub stderr_beta: f64,
}

/// WLS fit of `y = beta t + gamma log(-t) + c` with weights `|t|`.
/// Falls back to the affine model when the design is ill-conditioned
/// (narrow windows make `log(-t)` collinear with `t`).
pub(crate) fn fit_slope(points: &[(f64, f64)]) -> Option<Fit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(t, y)| t.is_finite() && y.is_finite() && *t < 0.0)
        .collect();
    let m = usable.len();
    if m < 2 {
        return None;
    }
    if m >= 6 {
        if let Some(fit) = solve_wls(&usable, true) {
            return Some(fit);
        }
    }
    solve_wls(&usable, false)
}

fn solve_wls(pts: &[(f64, f64)], with_log: bool) -> Option<Fit> {
    let k = if with_log { 3 } else { 2 };
    let m = pts.len();
    // normal equations A theta = b over columns [t, log(-t), 1]
    let mut a = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    let row = |t: f64| -> [f64; 3] { [t, (-t).ln(), 1.0] };
    for &(t, y) in pts {
        let w = t.abs();
        let x = row(t);
        for i in 0..k {
            for j in 0..k {
                a[i][j] += w * x[i] * x[j];
            }
            b[i] += w * x[i] * y;
        }
    }
    let theta = solve_sym(&mut a, &mut b, k)?;
    // residual scale and covariance of beta
    let mut wrss = 0.0f64;
    let mut wsum = 0.0f64;
    for &(t, y) in pts {
        let w = t.abs();
        let x = row(t);
        let pred: f64 = (0..k).map(|i| theta[i] * x[i]).sum();
        wrss += w * (y - pred) * (y - pred);
        wsum += w;
    }
    let dof = (m as f64 - k as f64).max(1.0);
    let sigma2 = wrss / dof;
    // (X^T W X)^{-1}_{00} via solving with the unit vector
    let mut a2 = [[0.0f64; 3]; 3];
    for &(t, _) in pts {
        let w = t.abs();
        let x = row(t);
        for i in 0..k {
            for j in 0..k {
                a2[i][j] += w * x[i] * x[j];
            }
        }
    }
    let mut e0 = [1.0, 0.0, 0.0];
    let inv_col = solve_sym(&mut a2, &mut e0, k)?;
    let var_beta = (sigma2 * inv_col[0]).max(0.0);
    let _ = wsum;
    Some(Fit {
        beta: theta[0],
        stderr_beta: var_beta.sqrt(),
    })
}

/// Gaussian elimination with partial pivoting on a k x k system.
fn solve_sym(a: &mut [[f64; 3]; 3], b: &mut [f64; 3], k: usize) -> Option<[f64; 3]> {
    let mut idx = [0usize, 1, 2];
    for col in 0..k {
        let (pivot_row, pivot) = (col..k)
            .map(|r| (r, a[idx[r]][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if pivot < 1e-12 {
            return None;
        }
        idx.swap(col, pivot_row);
        for r in (col + 1)..k {
            let f = a[idx[r]][col] / a[idx[col]][col];
            for c in col..k {
                a[idx[r]][c] -= f * a[idx[col]][c];
            }
            b[idx[r]] -= f * b[idx[col]];
        }
    }
    let mut x = [0.0f64; 3];
    for col in (0..k).rev() {
        let mut s = b[idx[col]];
        for c in (col + 1)..k {
            s -= a[idx[col]][c] * x[c];
        }
        x[col] = s / a[idx[col]][col];
    }
    Some(x)
}

/// Slope of a sampled map `t -> y(t)` over `[t_lo, t_hi]`, with the
/// window-halving stability diagnostic. Non-finite samples are skipped.
pub(crate) fn slope_of(
    eval: impl Fn(f64) -> f64,
    t_lo: f64,
    t_hi: f64,
    points: usize,
    method: SlopeMethod,
) -> SlopeEstimate {
    debug_assert!(t_lo < t_hi && t_hi < 0.0);
    let n = points.max(8);
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = t_lo + (t_hi - t_lo) * i as f64 / (n - 1) as f64;
            (t, eval(t))
        })
        .collect();
    estimate_from_samples(&samples, (t_lo, t_hi), method)
}

/// Builds a [`SlopeEstimate`] from precomputed samples (used by the volume
/// route, where each sample is an expensive quadrature).
pub(crate) fn estimate_from_samples(
    samples: &[(f64, f64)],
    window: (f64, f64),
    method: SlopeMethod,
) -> SlopeEstimate {
    let mut notes = Vec::new();
    let fit = fit_slope(samples);
    let (mut slope, stderr) = match &fit {
        Some(f) => (f.beta, f.stderr_beta),
        None => {
            notes.push("fit degenerate: too few usable points".to_string());
            (0.0, f64::INFINITY)
        }
    };
    // deeper-half refit
    let mid = 0.5 * (window.0 + window.1);
    let deep: Vec<(f64, f64)> = samples.iter().copied().filter(|(t, _)| *t <= mid).collect();
    let mut unstable = false;
    if let (Some(f), Some(h)) = (&fit, fit_slope(&deep)) {
        let tol = (3.0 * f.stderr_beta).max(STABILITY_FLOOR);
        if (h.beta - f.beta).abs() > tol {
            unstable = true;
            notes.push(format!(
                "window halving moved slope from {:.6} to {:.6}",
                f.beta, h.beta
            ));
        }
    } else {
        unstable = true;
    }
    if slope < 0.0 {
        if slope < -0.01 {
            unstable = true;
            notes.push(format!("negative slope {slope:.4e} clamped to 0"));
        }
        slope = 0.0;
    }
    let points_used = samples
        .iter()
        .filter(|(t, y)| t.is_finite() && y.is_finite())
        .count();
    SlopeEstimate {
        slope,
        stderr,
        window,
        points_used,
        method,
        unstable,
        notes,
    }
}
