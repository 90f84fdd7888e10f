//! Radial and toric profiles, and the piecewise-linear monotone tables that
//! carry rearrangements.
//!
//! A radial profile is the convex nondecreasing function `f(t) = u(z)` at
//! `t = log|z|`; a toric profile is `g(x_1, ..., x_n) = u(z)` at
//! `x_k = log|z_k|`. Both accept `-inf` arguments and must return the correct
//! limit there (monotone functions always have one).

use std::fmt;
use std::sync::Arc;

pub type Profile1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ProfileN = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Closed-form or tabulated radial profile with a trusted window
/// `[t_min, t_max]`; evaluation outside extrapolates linearly.
#[derive(Clone)]
pub struct RadialProfile {
    kind: RadialKind,
    pub t_min: f64,
    pub t_max: f64,
    left_slope: f64,
    right_slope: f64,
}

#[derive(Clone)]
enum RadialKind {
    ClosedForm(Profile1),
    Table(Vec<(f64, f64)>),
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RadialKind::ClosedForm(_) => write!(
                f,
                "RadialProfile::ClosedForm(t in [{}, {}])",
                self.t_min, self.t_max
            ),
            RadialKind::Table(k) => write!(
                f,
                "RadialProfile::Table({} knots, t in [{}, {}])",
                k.len(),
                self.t_min,
                self.t_max
            ),
        }
    }
}

impl RadialProfile {
    pub fn closed_form(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        t_min: f64,
        t_max: f64,
    ) -> Self {
        assert!(t_min < t_max);
        let f: Profile1 = Arc::new(f);
        // one-sided slopes at the window ends, used for extrapolation
        let h = (1e-6 * (1.0 + t_min.abs())).min(0.5 * (t_max - t_min));
        let left_slope = (f(t_min + h) - f(t_min)) / h;
        let right_slope = (f(t_max) - f(t_max - h)) / h;
        RadialProfile {
            kind: RadialKind::ClosedForm(f),
            t_min,
            t_max,
            left_slope,
            right_slope,
        }
    }

    /// Builds a table profile; knots must have strictly increasing `t`.
    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self, String> {
        if knots.len() < 2 {
            return Err("table profile needs at least two knots".to_string());
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(format!(
                    "table knots must have strictly increasing t: {} then {}",
                    w[0].0, w[1].0
                ));
            }
            if !w[0].1.is_finite() || !w[1].1.is_finite() {
                return Err("table values must be finite".to_string());
            }
        }
        let t_min = knots[0].0;
        let t_max = knots[knots.len() - 1].0;
        let left_slope = (knots[1].1 - knots[0].1) / (knots[1].0 - knots[0].0);
        let k = knots.len();
        let right_slope = (knots[k - 1].1 - knots[k - 2].1) / (knots[k - 1].0 - knots[k - 2].0);
        Ok(RadialProfile {
            kind: RadialKind::Table(knots),
            t_min,
            t_max,
            left_slope,
            right_slope,
        })
    }

    pub fn knots(&self) -> Option<&[(f64, f64)]> {
        match &self.kind {
            RadialKind::Table(k) => Some(k),
            RadialKind::ClosedForm(_) => None,
        }
    }

    /// `f(t)`; outside the trusted window the last trusted slope extends the
    /// profile linearly, which keeps it convex and nondecreasing.
    pub fn eval(&self, t: f64) -> f64 {
        if t == f64::NEG_INFINITY {
            return if self.left_slope.abs() < 1e-300 {
                self.eval(self.t_min)
            } else {
                f64::NEG_INFINITY
            };
        }
        if t < self.t_min {
            return self.eval_inner(self.t_min) + self.left_slope * (t - self.t_min);
        }
        if t > self.t_max {
            return self.eval_inner(self.t_max) + self.right_slope * (t - self.t_max);
        }
        self.eval_inner(t)
    }

    fn eval_inner(&self, t: f64) -> f64 {
        match &self.kind {
            RadialKind::ClosedForm(f) => f(t),
            RadialKind::Table(knots) => {
                let i = match knots.binary_search_by(|k| k.0.partial_cmp(&t).unwrap()) {
                    Ok(i) => return knots[i].1,
                    Err(i) => i,
                };
                // i is the insertion point; clamp handled by eval()
                let (t0, v0) = knots[i - 1];
                let (t1, v1) = knots[i];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Sampled check that the profile is nondecreasing and convex on its
    /// window; returns the worst violating triple `(t1, t2, t3, excess)`.
    pub fn check_convex_nondecreasing(
        &self,
        samples: usize,
        tol: f64,
    ) -> Result<(), (f64, f64, f64, f64)> {
        let ts = self.sample_grid(samples);
        let vals: Vec<f64> = ts.iter().map(|&t| self.eval(t)).collect();
        for i in 1..ts.len() {
            if vals[i] < vals[i - 1] - tol {
                return Err((ts[i - 1], ts[i], ts[i], vals[i - 1] - vals[i]));
            }
        }
        let mut worst: Option<(f64, f64, f64, f64)> = None;
        for i in 1..ts.len() - 1 {
            let (t1, t2, t3) = (ts[i - 1], ts[i], ts[i + 1]);
            let (v1, v2, v3) = (vals[i - 1], vals[i], vals[i + 1]);
            let chord = v1 + (v3 - v1) * (t2 - t1) / (t3 - t1);
            let excess = v2 - chord;
            let scale = 1.0 + v1.abs().max(v3.abs());
            if excess > tol * scale && worst.map_or(true, |w| excess > w.3) {
                worst = Some((t1, t2, t3, excess));
            }
        }
        match worst {
            Some(w) => Err(w),
            None => Ok(()),
        }
    }

    fn sample_grid(&self, samples: usize) -> Vec<f64> {
        match &self.kind {
            RadialKind::Table(knots) => knots.iter().map(|k| k.0).collect(),
            RadialKind::ClosedForm(_) => {
                let n = samples.max(3);
                // geometric in |t| so deep windows are not oversampled shallowly
                let lo = self.t_min.min(-1e-6);
                let hi = self.t_max.min(-1e-9).max(lo * 0.5e-3);
                let (la, lb) = ((-lo).ln(), (-hi.min(-1e-9)).ln());
                (0..n)
                    .map(|i| {
                        let s = i as f64 / (n - 1) as f64;
                        -(la + (lb - la) * s).exp()
                    })
                    .filter(|t| *t >= self.t_min && *t <= self.t_max)
                    .collect()
            }
        }
    }

    /// Gauss–Hermite mollification: a positive combination of shifted copies,
    /// so convexity and monotonicity survive while kinks are smoothed enough
    /// for finite differences.
    pub fn mollified(&self, sigma: f64) -> RadialProfile {
        // 7-point Gauss-Hermite rule for integral e^{-x^2} h(x) dx / sqrt(pi)
        const X: [f64; 7] = [
            -2.651961356835233,
            -1.673551628767471,
            -0.816287882858965,
            0.0,
            0.816287882858965,
            1.673551628767471,
            2.651961356835233,
        ];
        const W: [f64; 7] = [
            9.71781245099519e-4,
            5.451558281912703e-2,
            4.256072526101278e-1,
            8.102646175568073e-1,
            4.256072526101278e-1,
            5.451558281912703e-2,
            9.71781245099519e-4,
        ];
        let wsum: f64 = W.iter().sum();
        let base = self.clone();
        let s = sigma * std::f64::consts::SQRT_2;
        RadialProfile::closed_form(
            move |t| {
                let mut acc = 0.0;
                for (x, w) in X.iter().zip(W.iter()) {
                    acc += w * base.eval(t + s * x);
                }
                acc / wsum
            },
            self.t_min,
            self.t_max,
        )
    }
}

/// Toric profile `g` on `(-inf, 0]^n`, nondecreasing and convex in each
/// argument for plurisubharmonic sources.
#[derive(Clone)]
pub struct ToricProfile {
    pub arity: usize,
    g: ProfileN,
    pub t_min: f64,
}

impl fmt::Debug for ToricProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ToricProfile(arity {}, t_min {})", self.arity, self.t_min)
    }
}

impl ToricProfile {
    pub fn new(
        arity: usize,
        t_min: f64,
        g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        assert!(arity >= 1);
        ToricProfile {
            arity,
            g: Arc::new(g),
            t_min,
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.arity);
        (self.g)(x)
    }

    /// Value along the direction `a` at parameter `t`: `g(a_1 t, ..., a_n t)`.
    pub fn eval_ray(&self, a: &[f64], t: f64) -> f64 {
        let x: Vec<f64> = a.iter().map(|ak| ak * t).collect();
        self.eval(&x)
    }
}

/// Interpolation mode of a [`MonotoneTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum TableMode {
    /// Right-continuous step function.
    Step,
    /// Piecewise-linear and continuous.
    Linear,
}

/// Logarithmic left tail of a rearrangement table: below the first breakpoint
/// the value continues as `v_knee + slope * ln(s / s_knee)`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LogTail {
    pub s_knee: f64,
    pub v_knee: f64,
    /// `dv / d(ln s)`; equals `nu_hat / 2n` for a symmetrization table.
    pub slope: f64,
}

/// Nondecreasing right-continuous table on `[0, measure]`, the carrier of the
/// increasing rearrangement `u_*`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MonotoneTable {
    /// `(s_i, v_i)` with `s` strictly increasing and `v` nondecreasing; spans
    /// up to `measure`. For sources with a pole the left end of the domain is
    /// covered by `tail` instead of a breakpoint at `s = 0`.
    pub breaks: Vec<(f64, f64)>,
    pub mode: TableMode,
    pub measure: f64,
    pub tail: Option<LogTail>,
}

impl MonotoneTable {
    pub fn new(
        breaks: Vec<(f64, f64)>,
        mode: TableMode,
        measure: f64,
        tail: Option<LogTail>,
    ) -> Result<Self, String> {
        if breaks.is_empty() {
            return Err("monotone table needs at least one breakpoint".to_string());
        }
        for w in breaks.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(format!(
                    "table abscissae must be strictly increasing: {} then {}",
                    w[0].0, w[1].0
                ));
            }
            if w[1].1 < w[0].1 - 1e-12 {
                return Err(format!(
                    "table values must be nondecreasing: {} then {}",
                    w[0].1, w[1].1
                ));
            }
        }
        let first_s = breaks[0].0;
        if tail.is_none() && first_s > 1e-9 * measure.max(1.0) {
            return Err(format!(
                "table must span down to s = 0 (first breakpoint at {first_s}) or carry a tail"
            ));
        }
        let last_s = breaks[breaks.len() - 1].0;
        if (last_s - measure).abs() > 1e-6 * measure.max(1.0) {
            return Err(format!(
                "table must span up to the domain measure {measure}, ends at {last_s}"
            ));
        }
        Ok(MonotoneTable {
            breaks,
            mode,
            measure,
            tail,
        })
    }

    /// `u_*(s)`. Below the first breakpoint the logarithmic tail applies;
    /// `s = 0` on a table with a tail is the pole, `-inf`.
    pub fn value_at(&self, s: f64) -> f64 {
        let (s0, v0) = self.breaks[0];
        if s < s0 {
            return match self.tail {
                Some(tail) => {
                    if s <= 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        tail.v_knee + tail.slope * (s / tail.s_knee).ln()
                    }
                }
                None => v0,
            };
        }
        let last = self.breaks.len() - 1;
        if s >= self.breaks[last].0 {
            return self.breaks[last].1;
        }
        let i = self
            .breaks
            .partition_point(|&(si, _)| si <= s);
        let (sa, va) = self.breaks[i - 1];
        let (sb, vb) = self.breaks[i];
        match self.mode {
            TableMode::Step => va,
            TableMode::Linear => va + (vb - va) * (s - sa) / (sb - sa),
        }
    }

    /// Measure of the sub-level set `{u_* < t}` inside `[0, measure]`, i.e.
    /// the generalized inverse of the table.
    pub fn sublevel_measure(&self, t: f64) -> f64 {
        let (s0, v0) = self.breaks[0];
        if t <= v0 {
            return match self.tail {
                Some(tail) if tail.slope > 0.0 => {
                    // invert v = v_knee + slope ln(s/s_knee)
                    (tail.s_knee * ((t - tail.v_knee) / tail.slope).exp()).min(s0)
                }
                _ => 0.0,
            };
        }
        let last = self.breaks.len() - 1;
        if t > self.breaks[last].1 {
            return self.measure;
        }
        // first index with v_i >= t
        let i = self.breaks.partition_point(|&(_, vi)| vi < t);
        debug_assert!(i >= 1 && i <= last);
        let (sa, va) = self.breaks[i - 1];
        let (sb, vb) = self.breaks[i];
        match self.mode {
            TableMode::Step => sb.min(self.measure),
            TableMode::Linear => {
                if vb - va < 1e-300 {
                    sa
                } else {
                    sa + (sb - sa) * (t - va) / (vb - va)
                }
            }
        }
    }

    /// `integral_0^measure F(u_*(s)) ds` for a continuous `F`, by closed form
    /// on the logarithmic tail (power law) and composite Simpson per segment.
    ///
    /// Returns `+inf` when the tail integral diverges.
    pub fn integrate_exp_neg2c(&self, c: f64) -> f64 {
        assert!(c >= 0.0);
        let mut total = 0.0f64;
        if let Some(tail) = self.tail {
            // integrand on (0, s_knee): e^{-2 c v(s)} = e^{-2c v_knee} (s/s_knee)^{-2 c slope}
            let p = 2.0 * c * tail.slope;
            if p >= 1.0 {
                return f64::INFINITY;
            }
            total += tail.s_knee * (-2.0 * c * tail.v_knee).exp() / (1.0 - p);
        } else {
            // constant below the first breakpoint contributes nothing extra:
            // first breakpoint sits at s = 0
        }
        for w in self.breaks.windows(2) {
            let (sa, va) = w[0];
            let (sb, vb) = w[1];
            let ds = sb - sa;
            let dv = vb - va;
            let term = if dv.abs() < 1e-14 {
                ds * (-2.0 * c * va).exp()
            } else if c == 0.0 {
                ds
            } else {
                // integral of exp(-2c (va + dv s/ds)) ds, closed form
                let ea = (-2.0 * c * va).exp();
                let eb = (-2.0 * c * vb).exp();
                ds * (ea - eb) / (2.0 * c * dv)
            };
            total += term;
        }
        total
    }

    /// `integral_0^{s_hi} u_*(s) ds` with the tail handled in closed form
    /// (`integral ln s ds` converges at 0).
    pub fn integrate_value(&self, s_hi: f64) -> f64 {
        let s_hi = s_hi.min(self.measure);
        let mut total = 0.0f64;
        let (s0, _) = self.breaks[0];
        let cap = s_hi.min(s0);
        if cap > 0.0 {
            match self.tail {
                Some(tail) => {
                    // integral_0^cap [v_knee + slope ln(s/s_knee)] ds
                    total += cap * (tail.v_knee + tail.slope * ((cap / tail.s_knee).ln() - 1.0));
                }
                None => total += cap * self.breaks[0].1,
            }
        }
        if s_hi <= s0 {
            return total;
        }
        for w in self.breaks.windows(2) {
            let (sa, va) = w[0];
            let (sb, vb) = w[1];
            if sa >= s_hi {
                break;
            }
            let hi = sb.min(s_hi);
            let frac_hi = (hi - sa) / (sb - sa);
            let v_hi = va + (vb - va) * frac_hi;
            match self.mode {
                TableMode::Step => total += (hi - sa) * va,
                TableMode::Linear => total += (hi - sa) * 0.5 * (va + v_hi),
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn radial_eval_and_extrapolation() {
        let p = RadialProfile::closed_form(|t| t, -40.0, 0.0);
        assert_relative_eq!(p.eval(-3.0), -3.0);
        // extrapolation slopes come from finite differences; allow fp noise
        assert_relative_eq!(p.eval(-80.0), -80.0, epsilon = 1e-6);
        assert_relative_eq!(p.eval(0.05), 0.05, epsilon = 1e-6);
        assert_eq!(p.eval(f64::NEG_INFINITY), f64::NEG_INFINITY);
    }

    #[test]
    fn flat_profile_has_finite_deep_limit() {
        let p = RadialProfile::closed_form(|_| -3.0, -40.0, 0.0);
        assert_relative_eq!(p.eval(f64::NEG_INFINITY), -3.0);
    }

    #[test]
    fn table_interpolates_linearly() {
        let p = RadialProfile::table(vec![(-10.0, -20.0), (-5.0, -10.0), (0.0, 0.0)]).unwrap();
        assert_relative_eq!(p.eval(-7.5), -15.0);
        assert_relative_eq!(p.eval(-20.0), -40.0, epsilon = 1e-12);
        assert!(p.check_convex_nondecreasing(64, 1e-9).is_ok());
    }

    #[test]
    fn convexity_check_flags_concave_profile() {
        let p = RadialProfile::closed_form(|t| -(t * t) / 10.0 - t, -10.0, -0.1);
        assert!(p.check_convex_nondecreasing(64, 1e-9).is_err());
    }

    #[test]
    fn decreasing_table_rejected() {
        assert!(RadialProfile::table(vec![(-1.0, 0.0), (-2.0, 1.0)]).is_err());
    }

    #[test]
    fn mollified_profile_stays_convex_and_close() {
        let p = RadialProfile::closed_form(|t| t.max(-3.0), -40.0, 0.0);
        let m = p.mollified(0.25);
        assert!(m.check_convex_nondecreasing(200, 1e-9).is_ok());
        // far from the kink the mollification is exact for a linear profile
        assert_relative_eq!(m.eval(-1.0), -1.0, epsilon = 1e-6);
        assert_relative_eq!(m.eval(-10.0), -3.0, epsilon = 1e-6);
    }

    #[test]
    fn monotone_table_inverse_roundtrip() {
        let table = MonotoneTable::new(
            vec![(0.0, -5.0), (1.0, -3.0), (2.0, -1.0), (4.0, 0.0)],
            TableMode::Linear,
            4.0,
            None,
        )
        .unwrap();
        assert_relative_eq!(table.value_at(1.5), -2.0);
        assert_relative_eq!(table.sublevel_measure(-2.0), 1.5);
        assert_relative_eq!(table.sublevel_measure(-10.0), 0.0);
        assert_relative_eq!(table.sublevel_measure(0.5), 4.0);
    }

    #[test]
    fn step_mode_is_right_continuous() {
        let table = MonotoneTable::new(
            vec![(0.0, -5.0), (1.0, -3.0), (2.0, 0.0)],
            TableMode::Step,
            2.0,
            None,
        )
        .unwrap();
        // at a breakpoint the value from the right applies
        assert_eq!(table.value_at(1.0), -3.0);
        assert_eq!(table.value_at(1.0 - 1e-12), -5.0);
        assert_eq!(table.value_at(0.5), -5.0);
        // inverse jumps to the right endpoint of the step
        assert_eq!(table.sublevel_measure(-4.0), 1.0);
    }

    #[test]
    fn log_tail_evaluation_and_inverse() {
        let tail = LogTail {
            s_knee: 0.1,
            v_knee: -10.0,
            slope: 0.5,
        };
        let table = MonotoneTable::new(
            vec![(0.1, -10.0), (4.0, 0.0)],
            TableMode::Linear,
            4.0,
            Some(tail),
        )
        .unwrap();
        let v = table.value_at(0.01);
        assert_relative_eq!(v, -10.0 + 0.5 * (0.1f64).ln(), epsilon = 1e-12);
        assert_relative_eq!(table.sublevel_measure(v), 0.01, epsilon = 1e-12);
        assert_eq!(table.value_at(0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn exp_integral_diverges_past_threshold() {
        let tail = LogTail {
            s_knee: 0.1,
            v_knee: -10.0,
            slope: 0.5,
        };
        let table = MonotoneTable::new(
            vec![(0.1, -10.0), (4.0, 0.0)],
            TableMode::Linear,
            4.0,
            Some(tail),
        )
        .unwrap();
        // threshold: 2 c slope = 1  <=>  c = 1
        assert!(table.integrate_exp_neg2c(0.9).is_finite());
        assert_eq!(table.integrate_exp_neg2c(1.1), f64::INFINITY);
    }

    #[test]
    fn integrate_value_handles_tail() {
        let tail = LogTail {
            s_knee: 1.0,
            v_knee: 0.0,
            slope: 1.0,
        };
        let table = MonotoneTable::new(
            vec![(1.0, 0.0), (2.0, 0.0)],
            TableMode::Linear,
            2.0,
            Some(tail),
        )
        .unwrap();
        // integral_0^1 ln s ds = -1
        assert_relative_eq!(table.integrate_value(1.0), -1.0, epsilon = 1e-12);
    }
}
