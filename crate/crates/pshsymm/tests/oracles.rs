//! Independent oracles for every derived reference value used elsewhere:
//! closed forms are re-derived by quadrature or Monte Carlo routes that do
//! not share code with the implementation paths they check.

use approx::assert_relative_eq;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pshsymm::catalog::builtin_catalog;
use pshsymm::config::RunConfig;
use pshsymm::invariants::{radial_ma_consistency, refined_lelong, Direction};
use pshsymm::profile::RadialProfile;
use pshsymm::volume::{sublevel_volume, VolumeConfig, VolumeMethod};
use pshsymm::CatalogEntry;

const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

fn entry(name: &str) -> CatalogEntry {
    builtin_catalog()
        .into_iter()
        .find(|e| e.name == name)
        .unwrap()
}

/// Composite Simpson on a 1-D integrand.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels * 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// The anisotropic sub-level volume: the antiderivative behind
/// `|{u < 2 log R}| = pi^2 R^10 / 5` is re-derived by Simpson quadrature of
/// `2 pi^2 integral_0^R (R^2 - r^2)^4 r dr` before the closed form is
/// trusted anywhere.
#[test]
fn ex42_volume_antiderivative() {
    let r_level = 0.3f64;
    let s = r_level * r_level;
    let integral = simpson(|r| (s - r * r).powi(4) * r, 0.0, r_level, 2000);
    let closed = PI2 * r_level.powi(10) / 5.0;
    assert_relative_eq!(2.0 * PI2 * integral, closed, max_relative = 1e-10);

    // and the engine agrees at the (normalization-shifted) level
    let e = entry("ex-4.2");
    let t = 2.0 * r_level.ln() + e.spec.normalization_shift;
    let v = sublevel_volume(&e.spec, t, &VolumeConfig::default()).unwrap();
    assert_relative_eq!(v.value, closed, max_relative = 1e-5);
    assert_relative_eq!(closed, 1.16558054056e-5, max_relative = 1e-9);
}

/// Cegrell-example volumes: toric quadrature cross-checked by Monte Carlo
/// with overlapping 3-sigma intervals at three levels.
#[test]
fn ex44_quadrature_vs_monte_carlo() {
    let e = entry("ex-4.4");
    let shift = e.spec.normalization_shift;
    let quad_cfg = VolumeConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(421);
    for &t in &[-4.0f64, -6.0, -8.0] {
        let quad = sublevel_volume(&e.spec, t, &quad_cfg).unwrap();
        assert_eq!(quad.method, VolumeMethod::ToricQuadrature);
        // independent plain-MC estimate of |{2 log|z1 z2| + shift < t}|
        let n = 10_000_000usize;
        let mut hits = 0u64;
        for _ in 0..n {
            // uniform point in the unit ball of R^4 via normals
            let g: [f64; 4] = [
                gauss(&mut rng),
                gauss(&mut rng),
                gauss(&mut rng),
                gauss(&mut rng),
            ];
            let norm = (g.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let radius: f64 = rng.gen::<f64>().powf(0.25);
            let r1 = (g[0] / norm * radius).hypot(g[1] / norm * radius);
            let r2 = (g[2] / norm * radius).hypot(g[3] / norm * radius);
            let u = 2.0 * (r1 * r2).max(1e-300).ln() + shift;
            if u < t {
                hits += 1;
            }
        }
        let ball = PI2 / 2.0;
        let p = hits as f64 / n as f64;
        let mc = ball * p;
        let three_sigma = 3.0 * ball * (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (quad.value - mc).abs() <= three_sigma + quad.abs_error,
            "t = {t}: quadrature {} vs MC {mc} +- {three_sigma}",
            quad.value
        );
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// The layer-cake reference `integral_B |z1|^{-0.8} = 2 pi^2 (1/1.2 - 1/3.2)`
/// re-derived by Simpson on the radial reduction
/// `4 pi^2 integral r^{0.2} (1 - r^2)/2 dr`; the substitution `r = s^5`
/// removes the corner singularity of the integrand.
#[test]
fn layer_cake_reference_integral() {
    let integral = simpson(
        |s: f64| 2.5 * s.powi(5) * (1.0 - s.powi(10)),
        0.0,
        1.0,
        4000,
    );
    let closed = 2.0 * PI2 * (1.0 / 1.2 - 1.0 / 3.2);
    assert_relative_eq!(4.0 * PI2 * integral, closed, max_relative = 1e-8);
}

/// Truncated Dirichlet-energy reference for the cylinder:
/// `int_{u>L} |grad u|^2 = 2 pi^2 (-L - (1 - e^{2L})/2)` re-derived by 2-D
/// Simpson over the moduli plane.
#[test]
fn polya_szego_reference_energy() {
    let l = -3.0f64;
    let r_cut = l.exp();
    // integrand (1/r1^2) * 4 pi^2 r1 r2 over {r1 > e^L} in the quarter disk
    let inner = |r1: f64| {
        let r2_max = (1.0 - r1 * r1).max(0.0).sqrt();
        4.0 * PI2 / r1 * r2_max * r2_max / 2.0
    };
    let num = simpson(inner, r_cut, 1.0, 4000);
    let closed = 2.0 * PI2 * (-l - (1.0 - (2.0 * l).exp()) / 2.0);
    assert_relative_eq!(num, closed, max_relative = 1e-8);
}

/// Refined Lelong numbers against their analytic corner formulas.
#[test]
fn refined_lelong_analytic_oracles() {
    let config = RunConfig::fast();
    // ex-4.1: sup over the polydisc of log|z1| is a1 t
    let e = entry("ex-4.1");
    for a in [[0.3, 0.7], [0.5, 0.5], [0.9, 0.1]] {
        let est = refined_lelong(&e.spec, &Direction(a.to_vec()), &config).unwrap();
        assert_relative_eq!(est.slope, a[0], epsilon = 1e-9);
    }
    // ex-4.4: 2(a1 + a2)
    let e = entry("ex-4.4");
    let est = refined_lelong(&e.spec, &Direction(vec![0.25, 0.5]), &config).unwrap();
    assert_relative_eq!(est.slope, 1.5, epsilon = 1e-9);
    // demailly eps: min(a1/eps, eps a2)
    for eps in [0.25f64, 0.5, 0.75] {
        let e = entry(&format!("demailly-{eps}"));
        for a in [[0.3, 0.7], [0.5, 0.5]] {
            let est = refined_lelong(&e.spec, &Direction(a.to_vec()), &config).unwrap();
            assert_relative_eq!(est.slope, (a[0] / eps).min(eps * a[1]), epsilon = 1e-9);
        }
    }
}

/// Rashkovskii optima against analytic equalizers.
#[test]
fn rashkovskii_analytic_oracles() {
    let config = RunConfig::fast();
    // demailly: min(a1/eps, eps a2)^2/(a1 a2) maximized where a1/eps = eps a2,
    // value 1 at a ~ (eps^2, 1)
    for eps in [0.25f64, 0.5, 0.75] {
        let e = entry(&format!("demailly-{eps}"));
        let r = pshsymm::rashkovskii_lower_bound(&e.spec, &config).unwrap();
        assert_relative_eq!(r.estimate.slope, 1.0, epsilon = 2e-3);
        let expected_dir = eps * eps / (1.0 + eps * eps);
        assert_relative_eq!(r.argmax[0], expected_dir, epsilon = 0.02);
    }
    // ex-4.2: min(2 a1, a2/2)^2/(a1 a2) equalized at a ~ (1, 4)/5, value 1
    let e = entry("ex-4.2");
    let r = pshsymm::rashkovskii_lower_bound(&e.spec, &config).unwrap();
    assert_relative_eq!(r.estimate.slope, 1.0, epsilon = 2e-3);
    assert_relative_eq!(r.argmax[0], 0.2, epsilon = 0.02);
}

/// The smoothed-profile mass consistency against symbolic differentiation of
/// `y(r) = (1/2) log(r^2 + a)`: `R y'(R) = R^2/(R^2 + a)`.
#[test]
fn ma_consistency_smoothed_log_norm() {
    let a = 1e-6f64;
    let p = RadialProfile::closed_form(move |t| 0.5 * ((2.0 * t).exp() + a).ln(), -60.0, 0.0);
    for (r, grid) in [(0.5f64, 2048usize), (0.5, 1024), (0.25, 2048)] {
        let rep = radial_ma_consistency(&p, 2, r, grid).unwrap();
        let exact_rhs = (r * r / (r * r + a)).powi(2);
        assert_relative_eq!(rep.rhs, exact_rhs, max_relative = 1e-3);
        assert!(rep.rel_gap < 0.01, "gap {} at R = {r}", rep.rel_gap);
    }
}

/// Off-center Lelong numbers of the cylinder: exact `max_{B_r(x)} log|z1|`
/// is `log r` on the polar hyperplane and `log(|x_1| + r)` off it.
#[test]
fn off_center_lelong_oracles() {
    let config = RunConfig::fast();
    let e = entry("ex-4.1");
    let on_sheet = pshsymm::lelong_at_point(&e.spec, &[0.0, 0.0, 0.5, 0.0], &config);
    assert_relative_eq!(on_sheet.slope, 1.0, epsilon = 0.05);
    let off_sheet = pshsymm::lelong_at_point(&e.spec, &[0.3, 0.0, 0.0, 0.0], &config);
    assert!(off_sheet.slope.abs() <= 0.01);
}

/// Cross-method consistency: toric quadrature vs stratified Monte Carlo on
/// 20 random (entry, t) pairs, within 3 sigma plus the quadrature error.
#[test]
fn toric_quadrature_vs_monte_carlo_pairs() {
    use pshsymm::function::{Body, FunctionSpec, SymmetryClass};
    let toric_names = ["ex-4.1", "ex-4.2", "ex-4.3", "ex-4.4", "demailly-0.5"];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let quad_cfg = VolumeConfig::default();
    let mc_cfg = VolumeConfig {
        mc_samples: 400_000,
        ..VolumeConfig::default()
    };
    for k in 0..20 {
        let name = toric_names[k % toric_names.len()];
        let entry = entry(name);
        let t = -0.3 - 2.7 * rng.gen::<f64>();
        let quad = sublevel_volume(&entry.spec, t, &quad_cfg).unwrap();
        // the same function viewed as a plain point evaluator takes the
        // stratified Monte Carlo path
        let base = entry.spec.clone();
        let s1_view = FunctionSpec {
            name: format!("{name}-s1-view"),
            symmetry: SymmetryClass::S1Invariant,
            body: Body::Point(std::sync::Arc::new(move |z: &[f64]| {
                base.evaluate(z).unwrap_or(f64::NEG_INFINITY)
            })),
            ..entry.spec.clone()
        };
        let mc = sublevel_volume(&s1_view, t, &mc_cfg).unwrap();
        assert_eq!(mc.method, VolumeMethod::MonteCarlo);
        assert!(
            (quad.value - mc.value).abs() <= mc.abs_error + quad.abs_error + 1e-12,
            "{name} at t = {t:.3}: quadrature {} vs MC {} +- {}",
            quad.value,
            mc.value,
            mc.abs_error
        );
    }
}

/// The closed-form distribution function of the cylinder against the
/// quadrature engine on a grid of levels.
#[test]
fn ex41_distribution_function() {
    let e = entry("ex-4.1");
    let cfg = VolumeConfig::default();
    for i in 1..=12 {
        let t = -0.5 * i as f64;
        let r2 = (2.0 * t).exp();
        let exact = PI2 * (r2 - r2 * r2 / 2.0);
        let v = sublevel_volume(&e.spec, t, &cfg).unwrap();
        assert_relative_eq!(v.value, exact, max_relative = 1e-5);
    }
}
