//! Symmetry-tagged plurisubharmonic test functions on balls in C^n = R^(2n).
//!
//! A [`FunctionSpec`] couples an evaluable body with its symmetry class,
//! domain radius, extension margin and trusted evaluation window. Loading
//! normalizes the function so its supremum over the domain is 0 (the
//! invariants computed downstream are shift-invariant) and spot-checks the
//! declared symmetry and the plurisubharmonicity of the profile.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use thiserror::Error;

use crate::expr::Expr;
use crate::numeric::{subseed, ExtendedValue};
use crate::profile::{RadialProfile, ToricProfile};

/// Default trusted window floor for bodies whose depth is not otherwise known.
pub const DEFAULT_T_MIN: f64 = -40.0;
pub const DEFAULT_EXTENSION_MARGIN: f64 = 0.1;
/// Symmetry spot-check budget and tolerance.
const SPOT_CHECK_PAIRS: usize = 64;
const SPOT_CHECK_TOL: f64 = 1e-9;
/// Samples used to locate the boundary supremum during normalization.
const BOUNDARY_SUP_SAMPLES: usize = 4096;
/// Internal seed for load-time sampling; independent of any run configuration
/// so that a spec loads identically everywhere.
const LOAD_SEED: u64 = 0x5c4a_11ce;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SymmetryClass {
    Radial,
    Toric,
    S1Invariant,
}

impl SymmetryClass {
    /// Capability ordering: every radial function is usable wherever a toric
    /// one is required, and every toric one wherever S1-invariance suffices.
    pub fn satisfies(self, required: SymmetryClass) -> bool {
        use SymmetryClass::*;
        match required {
            Radial => self == Radial,
            Toric => matches!(self, Radial | Toric),
            S1Invariant => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PoleStructure {
    SinglePoleAtOrigin,
    NontrivialPolarSet,
    NoPole,
}

pub type PointEvaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Evaluable body, dispatched by representation.
#[derive(Clone)]
pub enum Body {
    Radial(RadialProfile),
    Toric(ToricProfile),
    /// Pure map R^(2n) -> extended reals; coordinates are interleaved
    /// `[Re z_1, Im z_1, ..., Re z_n, Im z_n]`.
    Point(PointEvaluator),
}

impl std::fmt::Debug for Body {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Body::Radial(p) => write!(f, "Body::Radial({p:?})"),
            Body::Toric(p) => write!(f, "Body::Toric({p:?})"),
            Body::Point(_) => write!(f, "Body::Point(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FunctionSpec {
    pub name: String,
    /// Complex dimension n.
    pub dimension: usize,
    pub symmetry: SymmetryClass,
    pub domain_radius: f64,
    pub extension_margin: f64,
    pub body: Body,
    pub pole_structure: PoleStructure,
    /// Shift applied at load time so that `sup u = 0` on the domain.
    pub normalization_shift: f64,
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("symmetry violation at z = {witness:?}: |u(rot z) - u(z)| = {delta:.3e}")]
    SymmetryViolation { witness: Vec<f64>, delta: f64 },
    #[error("not a psh profile: {detail}; witness {witness:?}")]
    NotPshProfile { detail: String, witness: Vec<f64> },
    #[error("point outside the extended domain: |z| = {norm:.6}, allowed {allowed:.6}")]
    OutOfDomain { norm: f64, allowed: f64 },
}

impl FunctionSpec {
    /// Capability class implied by the body representation. A radial body
    /// qualifies for every toric operation, whatever the declared tag says.
    pub fn capability(&self) -> SymmetryClass {
        match self.body {
            Body::Radial(_) => SymmetryClass::Radial,
            Body::Toric(_) => SymmetryClass::Toric,
            Body::Point(_) => SymmetryClass::S1Invariant,
        }
    }

    /// Trusted evaluation floor of the body.
    pub fn t_min(&self) -> f64 {
        match &self.body {
            Body::Radial(p) => p.t_min,
            Body::Toric(p) => p.t_min,
            Body::Point(_) => DEFAULT_T_MIN,
        }
    }

    /// `u(z)` for `z` in the extended ball `B_{R(1+delta)}`, interleaved real
    /// coordinates. Returns exactly `-inf` on the polar set.
    pub fn evaluate(&self, z: &[f64]) -> Result<ExtendedValue, SpecError> {
        if z.len() != 2 * self.dimension {
            return Err(SpecError::Schema(format!(
                "point has {} real coordinates, expected {}",
                z.len(),
                2 * self.dimension
            )));
        }
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        let allowed = self.domain_radius * (1.0 + self.extension_margin) * (1.0 + 1e-12);
        if norm > allowed {
            return Err(SpecError::OutOfDomain { norm, allowed });
        }
        Ok(self.evaluate_unchecked(z))
    }

    pub(crate) fn evaluate_unchecked(&self, z: &[f64]) -> ExtendedValue {
        match &self.body {
            Body::Radial(p) => {
                let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                p.eval(norm.ln())
            }
            Body::Toric(p) => {
                let x: Vec<f64> = (0..self.dimension)
                    .map(|k| {
                        let r = z[2 * k].hypot(z[2 * k + 1]);
                        r.ln()
                    })
                    .collect();
                p.eval(&x)
            }
            Body::Point(f) => f(z),
        }
    }

    /// Evaluation from coordinate moduli `(|z_1|, ..., |z_n|)`.
    pub fn evaluate_moduli(&self, r: &[f64]) -> ExtendedValue {
        debug_assert_eq!(r.len(), self.dimension);
        match &self.body {
            Body::Radial(p) => {
                let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
                p.eval(norm.ln())
            }
            Body::Toric(p) => {
                let x: Vec<f64> = r.iter().map(|rk| rk.ln()).collect();
                p.eval(&x)
            }
            Body::Point(f) => {
                let z: Vec<f64> = r.iter().flat_map(|&rk| [rk, 0.0]).collect();
                f(&z)
            }
        }
    }

    /// The measure of the domain ball in `R^(2n)`.
    pub fn domain_measure(&self) -> f64 {
        crate::numeric::ball_volume(2 * self.dimension) * self.domain_radius.powi(2 * self.dimension as i32)
    }

    /// `gamma * u`; invariants scale accordingly (`nu`, `iota` by `gamma`,
    /// residue masses by `gamma^n`).
    pub fn scaled(&self, gamma: f64, name: impl Into<String>) -> FunctionSpec {
        assert!(gamma > 0.0);
        let mut out = self.clone();
        out.name = name.into();
        out.body = scale_body(&self.body, gamma);
        out.normalization_shift = 0.0;
        out
    }

    /// `G(u)` for a nondecreasing `G`; the caller states the resulting pole
    /// structure (e.g. truncation `max(u, m)` removes the pole).
    pub fn post_composed(
        &self,
        g: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static,
        pole: PoleStructure,
        name: impl Into<String>,
    ) -> FunctionSpec {
        let mut out = self.clone();
        out.name = name.into();
        out.pole_structure = pole;
        out.body = match &self.body {
            Body::Radial(p) => {
                let base = p.clone();
                let gf = g.clone();
                Body::Radial(RadialProfile::closed_form(
                    move |t| gf(base.eval(t)),
                    p.t_min,
                    p.t_max,
                ))
            }
            Body::Toric(p) => {
                let base = p.clone();
                let gf = g.clone();
                Body::Toric(ToricProfile::new(p.arity, p.t_min, move |x| {
                    gf(base.eval(x))
                }))
            }
            Body::Point(f) => {
                let base = f.clone();
                let gf = g;
                Body::Point(Arc::new(move |z: &[f64]| gf(base(z))))
            }
        };
        out.normalization_shift = 0.0;
        out
    }
}

fn scale_body(body: &Body, gamma: f64) -> Body {
    match body {
        Body::Radial(p) => {
            if let Some(knots) = p.knots() {
                let scaled: Vec<(f64, f64)> = knots.iter().map(|&(t, v)| (t, gamma * v)).collect();
                Body::Radial(RadialProfile::table(scaled).expect("scaled table stays valid"))
            } else {
                let base = p.clone();
                Body::Radial(RadialProfile::closed_form(
                    move |t| gamma * base.eval(t),
                    p.t_min,
                    p.t_max,
                ))
            }
        }
        Body::Toric(p) => {
            let base = p.clone();
            Body::Toric(ToricProfile::new(p.arity, p.t_min, move |x| {
                gamma * base.eval(x)
            }))
        }
        Body::Point(f) => {
            let base = f.clone();
            Body::Point(Arc::new(move |z: &[f64]| gamma * base(z)))
        }
    }
}

fn shifted_body(body: &Body, shift: f64) -> Body {
    if shift == 0.0 {
        return body.clone();
    }
    match body {
        Body::Radial(p) => {
            if let Some(knots) = p.knots() {
                let moved: Vec<(f64, f64)> = knots.iter().map(|&(t, v)| (t, v + shift)).collect();
                Body::Radial(RadialProfile::table(moved).expect("shifted table stays valid"))
            } else {
                let base = p.clone();
                Body::Radial(RadialProfile::closed_form(
                    move |t| base.eval(t) + shift,
                    p.t_min,
                    p.t_max,
                ))
            }
        }
        Body::Toric(p) => {
            let base = p.clone();
            Body::Toric(ToricProfile::new(p.arity, p.t_min, move |x| {
                base.eval(x) + shift
            }))
        }
        Body::Point(f) => {
            let base = f.clone();
            Body::Point(Arc::new(move |z: &[f64]| base(z) + shift))
        }
    }
}

/// Uniform direction on the unit sphere of `R^dim`.
pub(crate) fn sphere_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| {
                // Box-Muller from two uniforms
                let u1: f64 = rng.gen::<f64>().max(1e-300);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Supremum of the function over the boundary sphere: sampled candidates
/// (axes, diagonal, random directions) followed by a coordinate polish, so
/// that the normalization shift is accurate to ~1e-9 rather than to the
/// sampling resolution.
fn boundary_sup(spec: &FunctionSpec) -> f64 {
    let r0 = spec.domain_radius;
    let at_direction = |d: &[f64]| -> f64 {
        match &spec.body {
            Body::Radial(p) => p.eval(r0.ln()),
            Body::Toric(p) => {
                let x: Vec<f64> = d.iter().map(|dk| (r0 * dk.abs()).max(1e-300).ln()).collect();
                p.eval(&x)
            }
            Body::Point(f) => {
                let z: Vec<f64> = d.iter().map(|x| x * r0).collect();
                f(&z)
            }
        }
    };
    let dim = match &spec.body {
        Body::Radial(p) => return p.eval(r0.ln()),
        Body::Toric(_) => spec.dimension,
        Body::Point(_) => 2 * spec.dimension,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(LOAD_SEED, "boundary-sup", dim as u64));
    let mut best_dir: Vec<f64> = vec![0.0; dim];
    best_dir[0] = 1.0;
    let mut best = at_direction(&best_dir);
    // axis and diagonal candidates (suprema of monotone profiles often sit
    // exactly on the axes)
    for k in 0..dim {
        let mut d = vec![0.0; dim];
        d[k] = 1.0;
        let v = at_direction(&d);
        if v > best {
            best = v;
            best_dir = d;
        }
    }
    let diag = vec![(dim as f64).sqrt().recip(); dim];
    let v = at_direction(&diag);
    if v > best {
        best = v;
        best_dir = diag;
    }
    for _ in 0..BOUNDARY_SUP_SAMPLES {
        let d = sphere_direction(&mut rng, dim);
        let v = at_direction(&d);
        if v > best {
            best = v;
            best_dir = d;
        }
    }
    // coordinate polish on the sphere
    let mut step = 0.05f64;
    while step > 1e-10 {
        let mut improved = false;
        for k in 0..dim {
            for sign in [-1.0, 1.0] {
                let mut d = best_dir.clone();
                d[k] += sign * step;
                let norm: f64 = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < 1e-9 {
                    continue;
                }
                for x in d.iter_mut() {
                    *x /= norm;
                }
                let v = at_direction(&d);
                if v > best {
                    best = v;
                    best_dir = d;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Shifts the spec so that its sampled supremum over the domain is 0.
pub fn normalize(mut spec: FunctionSpec) -> FunctionSpec {
    let sup = boundary_sup(&spec);
    if !sup.is_finite() {
        return spec; // degenerate; validation will reject separately
    }
    let shift = -sup;
    if shift.abs() > 1e-13 {
        spec.body = shifted_body(&spec.body, shift);
        spec.normalization_shift += shift;
    }
    spec
}

/// Randomized symmetry spot-check; witnesses the first violating point.
///
/// Sampling cannot prove symmetry, it only catches gross declaration errors.
pub fn spot_check_symmetry(spec: &FunctionSpec) -> Result<(), SpecError> {
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(LOAD_SEED, "symmetry-spot", 0));
    let n = spec.dimension;
    let r_hi = spec.domain_radius * (1.0 + 0.5 * spec.extension_margin);
    for _ in 0..SPOT_CHECK_PAIRS {
        let dir = sphere_direction(&mut rng, 2 * n);
        let radius = r_hi * rng.gen::<f64>().powf(1.0 / (2.0 * n as f64)).max(0.05);
        let z: Vec<f64> = dir.iter().map(|d| d * radius).collect();
        let base = spec.evaluate_unchecked(&z);
        if base == f64::NEG_INFINITY {
            continue;
        }
        let rotated: Vec<f64> = match spec.symmetry {
            SymmetryClass::S1Invariant => {
                let theta: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                rotate_diagonal(&z, theta)
            }
            SymmetryClass::Toric => {
                let thetas: Vec<f64> = (0..n)
                    .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
                    .collect();
                rotate_per_coordinate(&z, &thetas)
            }
            SymmetryClass::Radial => {
                // an arbitrary equal-norm point
                let d2 = sphere_direction(&mut rng, 2 * n);
                d2.iter().map(|d| d * radius).collect()
            }
        };
        let other = spec.evaluate_unchecked(&rotated);
        let scale = 1.0 + base.abs();
        let delta = (other - base).abs();
        if !(delta <= SPOT_CHECK_TOL * scale) {
            return Err(SpecError::SymmetryViolation { witness: z, delta });
        }
    }
    Ok(())
}

pub(crate) fn rotate_diagonal(z: &[f64], theta: f64) -> Vec<f64> {
    let (c, s) = (theta.cos(), theta.sin());
    let mut out = Vec::with_capacity(z.len());
    for pair in z.chunks_exact(2) {
        out.push(c * pair[0] - s * pair[1]);
        out.push(s * pair[0] + c * pair[1]);
    }
    out
}

pub(crate) fn rotate_per_coordinate(z: &[f64], thetas: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(z.len());
    for (pair, th) in z.chunks_exact(2).zip(thetas) {
        let (c, s) = (th.cos(), th.sin());
        out.push(c * pair[0] - s * pair[1]);
        out.push(s * pair[0] + c * pair[1]);
    }
    out
}

/// Sampled plurisubharmonicity check of the body: monotone and convex (radial
/// profile), or coordinatewise monotone and midpoint convex (toric profile).
pub fn spot_check_psh(spec: &FunctionSpec) -> Result<(), SpecError> {
    match &spec.body {
        Body::Radial(p) => p
            .check_convex_nondecreasing(256, 1e-9)
            .map_err(|(t1, t2, t3, excess)| SpecError::NotPshProfile {
                detail: format!("radial profile fails convexity/monotonicity by {excess:.3e}"),
                witness: vec![t1, t2, t3],
            }),
        Body::Toric(p) => {
            let mut rng = ChaCha8Rng::seed_from_u64(subseed(LOAD_SEED, "psh-spot", 0));
            let lo = p.t_min.max(-30.0);
            let n = p.arity;
            // Sample log-moduli of points inside the extended ball: convexity
            // of the profile is only promised there (Kiselman's example fails
            // it outside the half-radius ball it lives on).
            let r_hi = spec.domain_radius * (1.0 + 0.9 * spec.extension_margin);
            let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                let omega = sphere_direction(rng, n);
                let rho = r_hi * (0.02 + 0.98 * rng.gen::<f64>());
                (0..n)
                    .map(|k| (rho * omega[k].abs()).max(1e-300).ln().max(lo))
                    .collect()
            };
            for _ in 0..128 {
                let x = sample(&mut rng);
                let gx = p.eval(&x);
                if !gx.is_finite() {
                    if gx.is_nan() {
                        return Err(SpecError::NotPshProfile {
                            detail: "profile evaluated to NaN".to_string(),
                            witness: x,
                        });
                    }
                    continue;
                }
                let scale = 1.0 + gx.abs();
                // coordinatewise monotone
                for k in 0..n {
                    let mut y = x.clone();
                    y[k] += 0.25 * (r_hi.ln() - x[k]).max(1e-3);
                    let gy = p.eval(&y);
                    if gy < gx - 1e-9 * scale {
                        return Err(SpecError::NotPshProfile {
                            detail: format!("profile decreases along coordinate {k}"),
                            witness: x,
                        });
                    }
                }
                // midpoint convexity along a random segment
                let y = sample(&mut rng);
                let gy = p.eval(&y);
                if !gy.is_finite() {
                    continue;
                }
                let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
                let gm = p.eval(&mid);
                if gm > 0.5 * (gx + gy) + 1e-9 * (scale + gy.abs()) {
                    return Err(SpecError::NotPshProfile {
                        detail: format!(
                            "midpoint convexity fails: g(mid) = {gm:.6}, chord = {:.6}",
                            0.5 * (gx + gy)
                        ),
                        witness: mid,
                    });
                }
            }
            Ok(())
        }
        // Point evaluators carry no checkable profile; plurisubharmonicity is
        // the constructor's responsibility.
        Body::Point(_) => Ok(()),
    }
}

/// Infers the pole structure of a body by deep probes.
fn infer_pole(spec: &FunctionSpec) -> PoleStructure {
    const DEEP: f64 = -1e8;
    const POLAR_CUT: f64 = -1e5;
    match &spec.body {
        Body::Radial(p) => {
            if p.eval(DEEP) < POLAR_CUT {
                PoleStructure::SinglePoleAtOrigin
            } else {
                PoleStructure::NoPole
            }
        }
        Body::Toric(p) => {
            let n = p.arity;
            let moderate = (spec.domain_radius * 0.5).ln();
            for k in 0..n {
                let x: Vec<f64> = (0..n).map(|j| if j == k { DEEP } else { moderate }).collect();
                if p.eval(&x) < POLAR_CUT {
                    return PoleStructure::NontrivialPolarSet;
                }
            }
            let diag = vec![DEEP; n];
            if p.eval(&diag) < POLAR_CUT {
                PoleStructure::SinglePoleAtOrigin
            } else {
                PoleStructure::NoPole
            }
        }
        Body::Point(f) => {
            let mut rng = ChaCha8Rng::seed_from_u64(subseed(LOAD_SEED, "pole-probe", 0));
            let r = (DEFAULT_T_MIN * 0.5).exp() * spec.domain_radius;
            let mut deep_hits = 0usize;
            const PROBES: usize = 128;
            for _ in 0..PROBES {
                let d = sphere_direction(&mut rng, 2 * spec.dimension);
                let z: Vec<f64> = d.iter().map(|x| x * r).collect();
                if f(&z) < 0.5 * DEFAULT_T_MIN {
                    deep_hits += 1;
                }
            }
            if deep_hits == PROBES {
                PoleStructure::SinglePoleAtOrigin
            } else if deep_hits > 0 {
                PoleStructure::NontrivialPolarSet
            } else {
                PoleStructure::NoPole
            }
        }
    }
}

/// Loads a function spec from its JSON document.
///
/// Schema:
/// ```json
/// { "dimension": 2, "symmetry": "radial" | "toric" | "s1",
///   "body": { "kind": "closed_form", "expr": [...] }
///         | { "kind": "table", "knots": [[t, f], ...] },
///   "domain_radius": 1.0, "extension_margin": 0.1 }
/// ```
/// Optional keys: `"name"`, `"t_min"`, `"pole_structure"`
/// (`"single" | "nontrivial" | "none"`; inferred when absent).
pub fn load_spec(document: &str) -> Result<FunctionSpec, SpecError> {
    let value: Value = serde_json::from_str(document)
        .map_err(|e| SpecError::Schema(format!("invalid JSON: {e}")))?;
    load_spec_value(&value)
}

pub fn load_spec_value(value: &Value) -> Result<FunctionSpec, SpecError> {
    let obj = value
        .as_object()
        .ok_or_else(|| SpecError::Schema("document must be a JSON object".to_string()))?;
    let dimension = obj
        .get("dimension")
        .and_then(Value::as_u64)
        .ok_or_else(|| SpecError::Schema("missing integer field \"dimension\"".to_string()))?
        as usize;
    if dimension == 0 {
        return Err(SpecError::Schema("dimension must be >= 1".to_string()));
    }
    let symmetry = match obj.get("symmetry").and_then(Value::as_str) {
        Some("radial") => SymmetryClass::Radial,
        Some("toric") => SymmetryClass::Toric,
        Some("s1") => SymmetryClass::S1Invariant,
        other => {
            return Err(SpecError::Schema(format!(
                "field \"symmetry\" must be \"radial\", \"toric\" or \"s1\", got {other:?}"
            )))
        }
    };
    let domain_radius = obj
        .get("domain_radius")
        .map(|v| v.as_f64().ok_or("domain_radius must be a number"))
        .transpose()
        .map_err(|e| SpecError::Schema(e.to_string()))?
        .unwrap_or(1.0);
    if !(domain_radius > 0.0) {
        return Err(SpecError::Schema("domain_radius must be positive".to_string()));
    }
    let extension_margin = obj
        .get("extension_margin")
        .map(|v| v.as_f64().ok_or("extension_margin must be a number"))
        .transpose()
        .map_err(|e| SpecError::Schema(e.to_string()))?
        .unwrap_or(DEFAULT_EXTENSION_MARGIN);
    if !(extension_margin > 0.0) {
        return Err(SpecError::Schema("extension_margin must be positive".to_string()));
    }
    let t_min = obj
        .get("t_min")
        .map(|v| v.as_f64().ok_or("t_min must be a number"))
        .transpose()
        .map_err(|e| SpecError::Schema(e.to_string()))?
        .unwrap_or(DEFAULT_T_MIN);
    if !(t_min < -1.0) {
        return Err(SpecError::Schema("t_min must be < -1".to_string()));
    }
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .unwrap_or("spec")
        .to_string();

    let body_obj = obj
        .get("body")
        .and_then(Value::as_object)
        .ok_or_else(|| SpecError::Schema("missing object field \"body\"".to_string()))?;
    let kind = body_obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| SpecError::Schema("body needs a \"kind\" string".to_string()))?;

    let t_max = domain_radius.ln() + (1.0 + extension_margin).ln();
    let mut radial_check_expr: Option<Expr> = None;
    let body = match kind {
        "closed_form" => {
            let expr_v = body_obj
                .get("expr")
                .ok_or_else(|| SpecError::Schema("closed_form body needs \"expr\"".to_string()))?;
            let expr = Expr::from_json(expr_v).map_err(SpecError::Schema)?;
            if expr.max_coord() > dimension {
                return Err(SpecError::Schema(format!(
                    "expression references coordinate {} but dimension is {dimension}",
                    expr.max_coord()
                )));
            }
            if symmetry == SymmetryClass::Radial {
                radial_check_expr = Some(expr.clone());
            }
            build_expr_body(expr, symmetry, dimension, t_min, t_max)?
        }
        "table" => {
            let knots_v = body_obj
                .get("knots")
                .and_then(Value::as_array)
                .ok_or_else(|| SpecError::Schema("table body needs array \"knots\"".to_string()))?;
            let mut knots = Vec::with_capacity(knots_v.len());
            for kv in knots_v {
                let pair = kv.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
                    SpecError::Schema("each knot must be a [t, f] pair".to_string())
                })?;
                let t = pair[0]
                    .as_f64()
                    .ok_or_else(|| SpecError::Schema("knot t must be a number".to_string()))?;
                let f = pair[1]
                    .as_f64()
                    .ok_or_else(|| SpecError::Schema("knot f must be a number".to_string()))?;
                knots.push((t, f));
            }
            // a tabulated profile is radial by construction; it serves any
            // declared class at or above Radial in capability
            Body::Radial(RadialProfile::table(knots).map_err(SpecError::Schema)?)
        }
        other => {
            return Err(SpecError::Schema(format!(
                "body kind must be \"closed_form\" or \"table\", got {other:?}"
            )))
        }
    };

    let mut spec = FunctionSpec {
        name,
        dimension,
        symmetry,
        domain_radius,
        extension_margin,
        body,
        pole_structure: PoleStructure::NoPole,
        normalization_shift: 0.0,
    };
    spec.pole_structure = match obj.get("pole_structure").and_then(Value::as_str) {
        Some("single") => PoleStructure::SinglePoleAtOrigin,
        Some("nontrivial") => PoleStructure::NontrivialPolarSet,
        Some("none") => PoleStructure::NoPole,
        Some(other) => {
            return Err(SpecError::Schema(format!(
                "pole_structure must be \"single\", \"nontrivial\" or \"none\", got {other:?}"
            )))
        }
        None => infer_pole(&spec),
    };
    if let Some(expr) = radial_check_expr {
        spot_check_radial_expr(&spec, &expr)?;
    }
    spot_check_psh(&spec)?;
    spot_check_symmetry(&spec)?;
    Ok(normalize(spec))
}

/// For a declared-radial closed form, the stored body evaluates the radial
/// profile through the representative point; this check compares it against
/// the raw expression at random points, which is where a false radial
/// declaration of a merely toric function shows up.
fn spot_check_radial_expr(spec: &FunctionSpec, expr: &Expr) -> Result<(), SpecError> {
    let mut rng = ChaCha8Rng::seed_from_u64(subseed(LOAD_SEED, "radial-expr-spot", 0));
    let n = spec.dimension;
    let r_hi = spec.domain_radius * (1.0 + 0.5 * spec.extension_margin);
    for _ in 0..SPOT_CHECK_PAIRS {
        let dir = sphere_direction(&mut rng, 2 * n);
        let radius = r_hi * rng.gen::<f64>().powf(1.0 / (2.0 * n as f64)).max(0.05);
        let z: Vec<f64> = dir.iter().map(|d| d * radius).collect();
        let moduli: Vec<f64> = z.chunks_exact(2).map(|p| p[0].hypot(p[1])).collect();
        let raw = expr.eval_moduli(&moduli);
        let via_profile = spec.evaluate_unchecked(&z);
        if raw == f64::NEG_INFINITY || via_profile == f64::NEG_INFINITY {
            continue;
        }
        let delta = (raw - via_profile).abs();
        if !(delta <= SPOT_CHECK_TOL * (1.0 + raw.abs())) {
            return Err(SpecError::SymmetryViolation { witness: z, delta });
        }
    }
    Ok(())
}

/// Builds the runtime body for a closed-form expression under the declared
/// symmetry. Expressions are functions of the moduli, so the toric body is
/// exact; the radial body evaluates at the representative point
/// `(e^t, 0, ..., 0)` and the symmetry spot-check compares the two routes.
fn build_expr_body(
    expr: Expr,
    symmetry: SymmetryClass,
    dimension: usize,
    t_min: f64,
    t_max: f64,
) -> Result<Body, SpecError> {
    match symmetry {
        SymmetryClass::Radial => {
            let e = expr.clone();
            let profile = RadialProfile::closed_form(
                move |t| {
                    let mut r = vec![0.0; dimension];
                    r[0] = t.exp();
                    e.eval_moduli(&r)
                },
                t_min,
                t_max,
            );
            Ok(Body::Radial(profile))
        }
        SymmetryClass::Toric => {
            let e = expr;
            Ok(Body::Toric(ToricProfile::new(dimension, t_min, move |x| {
                let r: Vec<f64> = x.iter().map(|xk| xk.exp()).collect();
                e.eval_moduli(&r)
            })))
        }
        SymmetryClass::S1Invariant => {
            let e = expr;
            Ok(Body::Point(Arc::new(move |z: &[f64]| {
                let r: Vec<f64> = z.chunks_exact(2).map(|p| p[0].hypot(p[1])).collect();
                e.eval_moduli(&r)
            })))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use serde_json::json;

    fn ex41_doc() -> String {
        json!({
            "name": "ex-4.1",
            "dimension": 2,
            "symmetry": "toric",
            "body": {"kind": "closed_form", "expr": ["log", ["abs_coord", 1]]},
            "domain_radius": 1.0,
            "extension_margin": 0.1
        })
        .to_string()
    }

    #[test]
    fn loads_and_evaluates_complex_cylinder_pole() {
        let spec = load_spec(&ex41_doc()).unwrap();
        assert_eq!(spec.dimension, 2);
        assert_eq!(spec.pole_structure, PoleStructure::NontrivialPolarSet);
        // u(0.5, 0.3) = log 0.5; interleaved coordinates (Re, Im, Re, Im)
        let v = spec.evaluate(&[0.5, 0.0, 0.3, 0.0]).unwrap();
        assert_relative_eq!(v, 0.5f64.ln(), epsilon = 1e-12);
        // point on the polar hyperplane
        let v = spec.evaluate(&[0.0, 0.0, 0.3, 0.0]).unwrap();
        assert_eq!(v, f64::NEG_INFINITY);
    }

    #[test]
    fn log_norm_loads_as_radial() {
        let doc = json!({
            "dimension": 2,
            "symmetry": "radial",
            "body": {"kind": "closed_form", "expr":
                ["*", 0.5, ["log", ["+",
                    ["pow", ["abs_coord", 1], 2],
                    ["pow", ["abs_coord", 2], 2]]]]},
        })
        .to_string();
        let spec = load_spec(&doc).unwrap();
        assert_eq!(spec.pole_structure, PoleStructure::SinglePoleAtOrigin);
        let v = spec.evaluate(&[0.3, 0.0, 0.0, 0.4]).unwrap();
        assert_relative_eq!(v, 0.5f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn decreasing_profile_is_rejected() {
        let doc = json!({
            "dimension": 2,
            "symmetry": "toric",
            "body": {"kind": "closed_form", "expr": ["*", -1.0, ["log", ["abs_coord", 1]]]},
        })
        .to_string();
        match load_spec(&doc) {
            Err(SpecError::NotPshProfile { .. }) => {}
            other => panic!("expected NotPshProfile, got {other:?}"),
        }
    }

    #[test]
    fn radial_declaration_of_toric_function_is_caught() {
        let doc = json!({
            "dimension": 2,
            "symmetry": "radial",
            "body": {"kind": "closed_form", "expr": ["log", ["abs_coord", 1]]},
        })
        .to_string();
        match load_spec(&doc) {
            Err(SpecError::SymmetryViolation { .. }) => {}
            other => panic!("expected SymmetryViolation, got {other:?}"),
        }
    }

    #[test]
    fn malformed_body_is_a_schema_error() {
        let doc = json!({
            "dimension": 2,
            "symmetry": "toric",
            "body": {"kind": "closed_form"}
        })
        .to_string();
        assert!(matches!(load_spec(&doc), Err(SpecError::Schema(_))));
        assert!(matches!(load_spec("not json"), Err(SpecError::Schema(_))));
    }

    #[test]
    fn out_of_domain_is_reported() {
        let spec = load_spec(&ex41_doc()).unwrap();
        match spec.evaluate(&[2.0, 0.0, 0.0, 0.0]) {
            Err(SpecError::OutOfDomain { .. }) => {}
            other => panic!("expected OutOfDomain, got {other:?}"),
        }
    }

    #[test]
    fn normalization_shifts_to_zero_sup() {
        // 2 log|z1 z2| has boundary sup 2 log(1/2) < 0 and must be lifted
        let doc = json!({
            "dimension": 2,
            "symmetry": "toric",
            "body": {"kind": "closed_form", "expr":
                ["*", 2.0, ["log", ["*", ["abs_coord", 1], ["abs_coord", 2]]]]},
        })
        .to_string();
        let spec = load_spec(&doc).unwrap();
        assert_relative_eq!(
            spec.normalization_shift,
            2.0 * std::f64::consts::LN_2,
            epsilon = 1e-2
        );
        // the shifted function attains ~0 at the boundary diagonal
        let d = (0.5f64).sqrt();
        let v = spec.evaluate(&[d, 0.0, d, 0.0]).unwrap();
        assert_relative_eq!(v, 0.0, epsilon = 1e-2);
    }

    #[test]
    fn table_body_loads_and_extrapolates() {
        let doc = json!({
            "dimension": 1,
            "symmetry": "radial",
            "body": {"kind": "table", "knots": [[-40.0, -40.0], [0.0, 0.0]]},
        })
        .to_string();
        let spec = load_spec(&doc).unwrap();
        let v = spec.evaluate(&[0.1, 0.0]).unwrap();
        assert_relative_eq!(v, 0.1f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn scaling_scales_values() {
        let spec = load_spec(&ex41_doc()).unwrap();
        let twice = spec.scaled(2.0, "twice");
        let z = [0.5, 0.0, 0.3, 0.0];
        assert_relative_eq!(
            twice.evaluate(&z).unwrap(),
            2.0 * spec.evaluate(&z).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn capability_ordering() {
        use SymmetryClass::*;
        assert!(Radial.satisfies(Toric));
        assert!(Radial.satisfies(S1Invariant));
        assert!(Toric.satisfies(S1Invariant));
        assert!(!Toric.satisfies(Radial));
        assert!(!S1Invariant.satisfies(Toric));
    }
}
