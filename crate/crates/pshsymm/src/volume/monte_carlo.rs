//! Stratified Monte Carlo over the ball for S1-invariant bodies.
//!
//! The ball is cut into radial shells of equal volume, each sampled with its
//! own counter-seeded ChaCha stream. Per-shell hit counts are integers and
//! the final reduction runs in fixed stratum order, so estimates are
//! bit-for-bit reproducible for a given `(seed, samples, shells)` regardless
//! of scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::function::FunctionSpec;
use crate::numeric::pairwise_sum;

pub(crate) struct McVolume {
    pub value: f64,
    pub three_sigma: f64,
    pub samples: usize,
}

/// `|{u < t}|` by stratified counting.
pub(crate) fn sublevel_volume_mc(
    spec: &FunctionSpec,
    t: f64,
    samples: usize,
    shells: usize,
    seed: u64,
) -> McVolume {
    let n2 = 2 * spec.dimension;
    let r0 = spec.domain_radius;
    let total_volume = spec.domain_measure();
    let shells = shells.max(1);
    let per_shell = (samples / shells).max(1);
    let shell_volume = total_volume / shells as f64;

    let mut contributions = Vec::with_capacity(shells);
    let mut variances = Vec::with_capacity(shells);
    for shell in 0..shells {
        // shell radii: equal ball-volume slices r = R (k/shells)^(1/2n)
        let f_lo = shell as f64 / shells as f64;
        let f_hi = (shell + 1) as f64 / shells as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shell as u64 + 1);
        let mut hits: u64 = 0;
        let mut z = vec![0.0f64; n2];
        for _ in 0..per_shell {
            // radius via inverse CDF within the shell, direction via normals
            let u: f64 = rng.gen();
            let r = r0 * (f_lo + u * (f_hi - f_lo)).powf(1.0 / n2 as f64);
            let mut norm2 = 0.0f64;
            for zk in z.iter_mut() {
                let u1: f64 = rng.gen::<f64>().max(1e-300);
                let u2: f64 = rng.gen();
                let gauss =
                    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                *zk = gauss;
                norm2 += gauss * gauss;
            }
            let scale = r / norm2.sqrt().max(1e-300);
            for zk in z.iter_mut() {
                *zk *= scale;
            }
            if spec.evaluate_unchecked(&z) < t {
                hits += 1;
            }
        }
        let p = hits as f64 / per_shell as f64;
        contributions.push(shell_volume * p);
        // smoothed binomial variance so that zero-hit shells keep an honest
        // error bar
        let p_err = (hits as f64 + 0.5) / (per_shell as f64 + 1.0);
        variances.push(shell_volume * shell_volume * p_err * (1.0 - p_err) / per_shell as f64);
    }
    let value = pairwise_sum(&contributions);
    let sigma = pairwise_sum(&variances).sqrt();
    McVolume {
        value,
        three_sigma: 3.0 * sigma,
        samples: per_shell * shells,
    }
}

/// Mean of `f(z, u(z))` over the ball times the ball volume, with a 3-sigma
/// error bar. Plain uniform sampling; used by the report-only integral
/// checks.
pub(crate) fn mc_ball_integral(
    spec: &FunctionSpec,
    f: &dyn Fn(&[f64], f64) -> f64,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let n2 = 2 * spec.dimension;
    let r0 = spec.domain_radius;
    let total_volume = spec.domain_measure();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x1117);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut z = vec![0.0f64; n2];
    for _ in 0..samples {
        let u: f64 = rng.gen();
        let r = r0 * u.powf(1.0 / n2 as f64);
        let mut norm2 = 0.0f64;
        for zk in z.iter_mut() {
            let u1: f64 = rng.gen::<f64>().max(1e-300);
            let u2: f64 = rng.gen();
            let gauss = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            *zk = gauss;
            norm2 += gauss * gauss;
        }
        let scale = r / norm2.sqrt().max(1e-300);
        for zk in z.iter_mut() {
            *zk *= scale;
        }
        let val = f(&z, spec.evaluate_unchecked(&z));
        sum += val;
        sum_sq += val * val;
    }
    let mean = sum / samples as f64;
    let var = (sum_sq / samples as f64 - mean * mean).max(0.0) / samples as f64;
    (total_volume * mean, 3.0 * total_volume * var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_catalog;

    #[test]
    fn mc_volume_matches_exact_ball() {
        // log-norm n=2: |{u < t}| = a_4 e^{4t}
        let cat = builtin_catalog();
        let spec = &cat.iter().find(|e| e.name == "log-norm-n2").unwrap().spec;
        let t = -0.5f64;
        let est = sublevel_volume_mc(spec, t, 200_000, 32, 7);
        let exact = crate::numeric::ball_volume(4) * (4.0 * t).exp();
        assert!(
            (est.value - exact).abs() <= est.three_sigma.max(1e-3),
            "mc {} vs exact {} (3sigma {})",
            est.value,
            exact,
            est.three_sigma
        );
    }

    #[test]
    fn mc_is_reproducible_for_fixed_seed() {
        let cat = builtin_catalog();
        let spec = &cat.iter().find(|e| e.name == "ex-4.1").unwrap().spec;
        let a = sublevel_volume_mc(spec, -1.0, 50_000, 32, 99);
        let b = sublevel_volume_mc(spec, -1.0, 50_000, 32, 99);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.three_sigma.to_bits(), b.three_sigma.to_bits());
    }

    #[test]
    fn mc_integral_of_one_is_ball_volume() {
        let cat = builtin_catalog();
        let spec = &cat.iter().find(|e| e.name == "log-norm-n2").unwrap().spec;
        let (v, err) = mc_ball_integral(spec, &|_, _| 1.0, 10_000, 3);
        assert!((v - crate::numeric::ball_volume(4)).abs() <= err.max(1e-9));
    }
}
