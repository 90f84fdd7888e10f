//! Shared numeric primitives: extended reals, unit-ball volumes, and
//! log-space accumulation.
//!
//! Sub-level set volumes in this crate routinely fall below `f64::MIN_POSITIVE`
//! (a toric profile probed at depth `t = -60` can have `log |{u < t}| < -7000`),
//! so every mass in the volume engine is carried as a natural logarithm and
//! only exponentiated at the reporting boundary.

/// Codomain of all plurisubharmonic evaluations: a finite real or `NEG_INFINITY`.
///
/// `-inf` marks the polar set and is kept as an explicit IEEE value, never as a
/// large negative sentinel. `+inf` and NaN are rejected at validation time.
pub type ExtendedValue = f64;

/// True when the value marks a point of the polar set.
#[inline]
pub fn is_polar(v: ExtendedValue) -> bool {
    v == f64::NEG_INFINITY
}

/// Rejects values outside the extended-real convention (`NaN`, `+inf`).
pub fn check_extended(v: f64) -> Result<ExtendedValue, String> {
    if v.is_nan() {
        Err("evaluation produced NaN".to_string())
    } else if v == f64::INFINITY {
        Err("evaluation produced +inf; only -inf is admissible".to_string())
    } else {
        Ok(v)
    }
}

/// Volumes `a_N` of unit balls in `R^N`, precomputed for `N = 1..=2*n_max`.
#[derive(Debug, Clone)]
pub struct BallVolumeTable {
    volumes: Vec<f64>,
}

impl BallVolumeTable {
    pub fn new(n_max_complex: usize) -> Self {
        let n = (2 * n_max_complex).max(2);
        let volumes = (1..=n).map(ball_volume).collect();
        BallVolumeTable { volumes }
    }

    /// `a_N`, the volume of the unit ball in `R^N`.
    pub fn unit(&self, real_dim: usize) -> f64 {
        assert!(real_dim >= 1 && real_dim <= self.volumes.len());
        self.volumes[real_dim - 1]
    }
}

/// `a_N = pi^(N/2) / Gamma(N/2 + 1)` via the half-integer Gamma recursion.
pub fn ball_volume(real_dim: usize) -> f64 {
    assert!(real_dim >= 1);
    // Gamma(N/2 + 1): integer case (N even) is a factorial, half-integer case
    // builds on Gamma(1/2) = sqrt(pi).
    let n = real_dim;
    let gamma = if n % 2 == 0 {
        let mut g = 1.0f64;
        for k in 1..=(n / 2) {
            g *= k as f64;
        }
        g
    } else {
        // Gamma(n/2 + 1) = (n/2)(n/2 - 1)...(1/2) * sqrt(pi)
        let mut g = std::f64::consts::PI.sqrt();
        let mut x = n as f64 / 2.0;
        while x > 0.0 {
            g *= x;
            x -= 1.0;
        }
        g
    };
    std::f64::consts::PI.powf(n as f64 / 2.0) / gamma
}

/// `log(1 - e^x)` for `x <= 0`, stable near both ends.
#[inline]
pub fn ln_1m_exp(x: f64) -> f64 {
    debug_assert!(x <= 1e-12, "ln_1m_exp needs x <= 0, got {x}");
    if x == f64::NEG_INFINITY {
        0.0
    } else if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `log(e^a + e^b)` without overflow; `-inf` acts as the additive identity.
#[inline]
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log(e^a - e^b)` for `a >= b`; tiny negative differences from rounding clamp
/// to `-inf`.
#[inline]
pub fn ln_sub_exp(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    if b >= a {
        return f64::NEG_INFINITY;
    }
    a + ln_1m_exp(b - a)
}

/// Streaming log-sum-exp accumulator with a running maximum.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub fn add(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if ln_term <= self.max {
            self.sum += (ln_term - self.max).exp();
        } else {
            // rescale existing sum to the new maximum
            self.sum = self.sum * (self.max - ln_term).exp() + 1.0;
            self.max = ln_term;
        }
    }

    pub fn ln_value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

/// `log integral_{c1}^{c2} e^(lambda x) dx` for `c1 < c2` (`c1` may be `-inf`).
///
/// Used for exact cell masses of the exponential weight in log coordinates.
pub fn ln_exp_integral(lambda: f64, c1: f64, c2: f64) -> f64 {
    debug_assert!(c1 < c2);
    if lambda.abs() < 1e-14 {
        if c1 == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        return (c2 - c1).ln();
    }
    if lambda > 0.0 {
        // (e^(l c2) - e^(l c1)) / l
        lambda * c2 + ln_1m_exp(if c1 == f64::NEG_INFINITY { f64::NEG_INFINITY } else { lambda * (c1 - c2) })
            - lambda.ln()
    } else {
        // (e^(l c1) - e^(l c2)) / (-l); diverges when c1 = -inf
        if c1 == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        lambda * c1 + ln_1m_exp(lambda * (c2 - c1)) - (-lambda).ln()
    }
}

/// Deterministic pairwise (tree) summation; the reduction order depends only
/// on the slice order, never on scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// SplitMix64 step, used to derive independent sub-seeds from the run seed.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Sub-seed for a named purpose; stable across runs and platforms.
pub fn subseed(seed: u64, purpose: &str, index: u64) -> u64 {
    let mut h = seed ^ 0xcbf29ce484222325;
    for b in purpose.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x100000001b3);
    }
    splitmix64(h.wrapping_add(index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ball_volumes_match_closed_forms() {
        assert_relative_eq!(ball_volume(1), 2.0, epsilon = 1e-12);
        assert_relative_eq!(ball_volume(2), std::f64::consts::PI, epsilon = 1e-12);
        assert_relative_eq!(
            ball_volume(3),
            4.0 * std::f64::consts::PI / 3.0,
            epsilon = 1e-12
        );
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert_relative_eq!(ball_volume(4), pi2 / 2.0, epsilon = 1e-12);
        assert_relative_eq!(ball_volume(6), pi2 * std::f64::consts::PI / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn table_exposes_same_values() {
        let t = BallVolumeTable::new(3);
        for n in 1..=6 {
            assert_eq!(t.unit(n), ball_volume(n));
        }
    }

    #[test]
    fn log_sum_matches_direct_sum() {
        let terms = [-3.0, -1.0, -2.5, 0.25];
        let mut acc = LogSum::new();
        for &t in &terms {
            acc.add(t);
        }
        let direct: f64 = terms.iter().map(|t| t.exp()).sum();
        assert_relative_eq!(acc.ln_value(), direct.ln(), epsilon = 1e-13);
    }

    #[test]
    fn log_sum_survives_extreme_scale() {
        let mut acc = LogSum::new();
        acc.add(-5000.0);
        acc.add(-5001.0);
        let expected = -5000.0 + (1.0f64 + (-1.0f64).exp()).ln();
        assert_relative_eq!(acc.ln_value(), expected, epsilon = 1e-12);
    }

    #[test]
    fn exp_integral_positive_lambda() {
        // integral_{-1}^{0.5} e^{2x} dx
        let exact = ((2.0f64 * 0.5).exp() - (-2.0f64).exp()) / 2.0;
        assert_relative_eq!(ln_exp_integral(2.0, -1.0, 0.5), exact.ln(), epsilon = 1e-12);
        // infinite lower end: integral e^{2x} = e^{2 c2}/2
        assert_relative_eq!(
            ln_exp_integral(2.0, f64::NEG_INFINITY, -3.0),
            (-6.0f64 - 2.0f64.ln()),
            epsilon = 1e-12
        );
    }

    #[test]
    fn exp_integral_negative_lambda() {
        let exact = ((-1.5f64 * -2.0).exp() - (-1.5f64 * 1.0).exp()) / 1.5;
        assert_relative_eq!(
            ln_exp_integral(-1.5, -2.0, 1.0),
            exact.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn ln_sub_exp_clamps_rounding() {
        assert_eq!(ln_sub_exp(-1.0, -1.0), f64::NEG_INFINITY);
        assert!(ln_sub_exp(-1.0, -1.0 + 1e-18) == f64::NEG_INFINITY);
        assert_relative_eq!(
            ln_sub_exp(0.0, -1.0),
            (1.0f64 - (-1.0f64).exp()).ln(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn subseed_is_stable() {
        assert_eq!(subseed(42, "mc", 3), subseed(42, "mc", 3));
        assert_ne!(subseed(42, "mc", 3), subseed(42, "mc", 4));
        assert_ne!(subseed(42, "mc", 3), subseed(43, "mc", 3));
    }
}
