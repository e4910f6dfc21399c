//! Running filter model.
//!
//! The model after frame `k` is
//!
//! ```text
//! w^k = (rho - alpha) w^{k-1} + alpha w*_k,    w^1 = w*_1
//! ```
//!
//! which unrolls to `(rho-alpha)^{k-1} w*_1 + sum_{j>=2} alpha (rho-alpha)^{k-j} w*_j`.
//! With `rho = 1` this is ordinary exponential forgetting. With `rho > 1` the
//! first filter keeps a larger share for longer, and the coefficients sum to
//! more than one, so the model norm can grow. Detection only uses the argmax
//! of the response, so no renormalization is applied.

use crate::error::{Error, Result};
use crate::solver::FilterBank;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpdateSchedule {
    pub alpha: f64,
    pub rho: f64,
}

impl Default for UpdateSchedule {
    fn default() -> Self {
        Self { alpha: 0.02, rho: 1.01 }
    }
}

impl UpdateSchedule {
    pub fn new(alpha: f64, rho: f64) -> Result<Self> {
        let s = Self { alpha, rho };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { alpha, rho } = *self;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::config(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(alpha < rho) || !rho.is_finite() {
            return Err(Error::config(format!("rho ({rho}) must exceed alpha ({alpha})")));
        }
        if !(rho - alpha < 1.0) {
            return Err(Error::config(format!("rho - alpha must stay below 1, got {}", rho - alpha)));
        }
        Ok(())
    }

    /// Decay applied to the previous model, `rho - alpha`.
    pub fn decay(&self) -> f64 {
        self.rho - self.alpha
    }

    /// Weight of `w*_j` in the model after frame `k` (both 1-based).
    pub fn coefficient(&self, j: u64, k: u64) -> f64 {
        if j == 0 || j > k {
            return 0.0;
        }
        if j == 1 {
            self.decay().powi((k - 1) as i32)
        } else {
            self.alpha * self.decay().powi((k - j) as i32)
        }
    }

    /// All weights `[c_1, .., c_k]` of the model after frame `k`.
    pub fn coefficients(&self, k: u64) -> Vec<f64> {
        (1..=k).map(|j| self.coefficient(j, k)).collect()
    }
}

/// Folds the filter trained on frame `k` into the model.
pub fn merge(model: &FilterBank, new_filter: &FilterBank, schedule: &UpdateSchedule, k: u64) -> Result<FilterBank> {
    if k == 0 {
        return Err(Error::invalid("frame index is 1-based"));
    }
    if model.d() != new_filter.d() || model.dims() != new_filter.dims() {
        return Err(Error::invalid(format!(
            "model is {}x{:?}, new filter is {}x{:?}",
            model.d(),
            model.dims(),
            new_filter.d(),
            new_filter.dims()
        )));
    }
    if k == 1 {
        return Ok(new_filter.clone());
    }
    model.lincomb(schedule.decay(), new_filter, schedule.alpha)
}

/// First frame `k` at which the newest filter outweighs the first one, i.e.
/// the smallest `k` with `alpha > (rho - alpha)^(k-1)`. Returns `u64::MAX`
/// when that frame is effectively unreachable.
pub fn crossover_frame(schedule: &UpdateSchedule) -> u64 {
    let r = schedule.decay();
    let a = schedule.alpha;
    if r <= 0.0 {
        return 2;
    }
    let bound = a.ln() / r.ln();
    if !bound.is_finite() || bound > 1e15 {
        return u64::MAX;
    }
    // n = k-1 sits next to bound; settle rounding by direct evaluation.
    let mut n = bound.floor().max(0.0) as u64;
    while !(a > r.powf(n as f64)) {
        n += 1;
    }
    while n > 0 && a > r.powf((n - 1) as f64) {
        n -= 1;
    }
    n + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial_map::SpatialMap;
    use crate::spectral::RealPlane;

    fn unit(i: usize, n: usize) -> FilterBank {
        let mut w = RealPlane::zeros(1, n);
        w.set(0, i, 1.0);
        FilterBank::new(vec![w], &SpatialMap::custom(RealPlane::filled(1, n, 1.0)).unwrap()).unwrap()
    }

    #[test]
    fn first_frame_returns_new_filter() {
        let s = UpdateSchedule::default();
        let out = merge(&unit(0, 3), &unit(1, 3), &s, 1).unwrap();
        assert_eq!(out, unit(1, 3));
    }

    #[test]
    fn second_frame_blend() {
        let s = UpdateSchedule::default();
        let out = merge(&unit(0, 2), &unit(1, 2), &s, 2).unwrap();
        assert!((out.w()[0].get(0, 0) - 0.99).abs() < 1e-15);
        assert!((out.w()[0].get(0, 1) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn unrolled_coefficients() {
        let s = UpdateSchedule::new(0.07, 1.03).unwrap();
        let k = 12;
        let mut model = unit(0, k);
        for j in 2..=k {
            model = merge(&model, &unit(j - 1, k), &s, j as u64).unwrap();
        }
        for (j, want) in s.coefficients(k as u64).iter().enumerate() {
            assert!((model.w()[0].get(0, j) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn classic_interpolation_sums_to_one() {
        let s = UpdateSchedule::new(0.1, 1.0).unwrap();
        for k in 1..30 {
            let total: f64 = s.coefficients(k).iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn crossover_values() {
        assert_eq!(crossover_frame(&UpdateSchedule::default()), 391);
        assert_eq!(crossover_frame(&UpdateSchedule::new(0.5, 1.0).unwrap()), 3);
        assert_eq!(crossover_frame(&UpdateSchedule::new(0.5, 1.4999999999999998).unwrap()), u64::MAX);
    }

    #[test]
    fn crossover_matches_scan() {
        for &(a, r) in &[(0.02, 1.01), (0.3, 1.2), (0.05, 1.0), (0.1, 0.5)] {
            let s = UpdateSchedule::new(a, r).unwrap();
            let scan = (1u64..).find(|&k| a > (r - a).powf((k - 1) as f64)).unwrap();
            assert_eq!(crossover_frame(&s), scan);
        }
    }

    #[test]
    fn first_frame_weight_grows_with_rho() {
        let lo = UpdateSchedule::new(0.02, 1.0).unwrap();
        let hi = UpdateSchedule::new(0.02, 1.01).unwrap();
        for k in 2..60 {
            assert!(hi.coefficient(1, k) > lo.coefficient(1, k));
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(UpdateSchedule::new(0.0, 1.0).is_err());
        assert!(UpdateSchedule::new(0.5, 0.4).is_err());
        assert!(UpdateSchedule::new(0.02, 1.03).is_err());
    }

    #[test]
    fn merge_rejects_mismatch() {
        let s = UpdateSchedule::default();
        assert!(matches!(merge(&unit(0, 2), &unit(0, 3), &s, 2), Err(Error::InvalidInput(_))));
    }
}
