//! Boundary asymptotics of half-plane harmonic measure.
//!
//! Every `ω` in this module is the raw subtended angle in radians, not the
//! normalized measure (which is the angle divided by π).
//!
//! Setting: `x0 < x1 < x2` on the real line, `A = x1 - x0`, `B = x2 - x1`,
//! and `z` in the upper half-plane tending to `x0` along a straight segment.
//! Then `ω(z) / Im z`, with `ω` the angle subtended by `[x1, x2]`, tends to
//! `B / (A² + AB)` whatever the direction of approach.

use num_complex::Complex64;

use crate::poisson::half_plane_angle;
use crate::{Error, Result};

/// `B / (A² + AB)`.
pub fn los_limit(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::NonpositiveLength);
    }
    Ok(b / (a * a + a * b))
}

/// `ω(z) / y` at `z = x + iy` on the ray from `x0 = 0` leaving at
/// `approach_angle` (measured from the positive real axis), with the interval
/// `[A, A + B]`.
pub fn los_empirical(a: f64, b: f64, approach_angle: f64, y: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && y > 0.0) {
        return Err(Error::NonpositiveLength);
    }
    let x = y / approach_angle.tan();
    let omega = half_plane_angle(Complex64::new(x, y), a, a + b)?;
    Ok(omega / y)
}

/// Interval endpoints `ζ_1 < ... < ζ_n` on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalLayout {
    abscissas: Vec<f64>,
}

impl IntervalLayout {
    pub fn new(abscissas: Vec<f64>) -> Result<IntervalLayout> {
        if abscissas.len() < 2 || abscissas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::NonpositiveLength);
        }
        Ok(IntervalLayout { abscissas })
    }

    /// Layout starting at `origin` with consecutive lengths `ℓ_1..ℓ_{n-1}`.
    pub fn from_lengths(origin: f64, lengths: &[f64]) -> Result<IntervalLayout> {
        let mut x = vec![origin];
        for &l in lengths {
            if !(l > 0.0) {
                return Err(Error::NonpositiveLength);
            }
            x.push(x.last().unwrap() + l);
        }
        IntervalLayout::new(x)
    }

    pub fn abscissas(&self) -> &[f64] {
        &self.abscissas
    }

    pub fn len(&self) -> usize {
        self.abscissas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissas.is_empty()
    }

    /// `ℓ_j = ζ_{j+1} - ζ_j`, one-based `j`.
    pub fn length(&self, j: usize) -> f64 {
        self.abscissas[j] - self.abscissas[j - 1]
    }

    /// `ℓ_from + ... + ℓ_to` (one-based, inclusive), zero when empty.
    fn span(&self, from: usize, to: usize) -> f64 {
        (from..=to).map(|j| self.length(j)).sum()
    }

    /// The part of the unbounded interval's ratio coming from `[ζ_n, ∞)`:
    /// `1 / (ℓ_m + ... + ℓ_{n-1})`.
    pub fn right_ray_ratio(&self, m: usize) -> Result<f64> {
        let n = self.len();
        if m == 0 || m >= n {
            return Err(Error::IndexRange(m));
        }
        Ok(1.0 / self.span(m, n - 1))
    }

    /// Small-`y` approximation of `ω_k(z) / y` for `z → ζ_m` (one-based
    /// indices). Interval `k < n` is `[ζ_k, ζ_{k+1}]`; interval `n` is the
    /// unbounded complement of `[ζ_1, ζ_n]`. Intervals with an endpoint at
    /// `ζ_m` (that is `k = m` and `k = m - 1`, cyclically) are rejected.
    pub fn omega_ratio_approx(&self, m: usize, k: usize) -> Result<f64> {
        let n = self.len();
        if m == 0 || m > n {
            return Err(Error::IndexRange(m));
        }
        if k == 0 || k > n {
            return Err(Error::IndexRange(k));
        }
        let left_neighbor = if m == 1 { n } else { m - 1 };
        if k == m || k == left_neighbor {
            return Err(Error::IndexAdjacent { m, k });
        }
        if k == n {
            // Two rays: [ζ_n, ∞) to the right and (-∞, ζ_1] to the left, each
            // the unbounded-B form 1/A of the lemma.
            return Ok(self.right_ray_ratio(m)? + 1.0 / self.span(1, m - 1));
        }
        let (s, l) = if k > m { (self.span(m, k - 1), self.length(k)) } else { (self.span(k + 1, m - 1), self.length(k)) };
        Ok(l / (s * s + s * l))
    }

    /// `ω_k(z) / y` evaluated directly at `z = ζ_m + iy`.
    pub fn omega_ratio_exact(&self, m: usize, k: usize, y: f64) -> Result<f64> {
        let n = self.len();
        if m == 0 || m > n || k == 0 || k > n {
            return Err(Error::IndexRange(m.max(k)));
        }
        let z = Complex64::new(self.abscissas[m - 1], y);
        let omega = if k < n {
            half_plane_angle(z, self.abscissas[k - 1], self.abscissas[k])?
        } else {
            let right = std::f64::consts::PI - (z - self.abscissas[n - 1]).arg();
            let left = (z - self.abscissas[0]).arg();
            right + left
        };
        Ok(omega / y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn limit_values() {
        assert_eq!(los_limit(1.0, 1.0).unwrap(), 0.5);
        assert!((los_limit(1.0, 2.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((los_limit(2.0, 1e12).unwrap() - 0.5).abs() < 1e-10);
        assert!(los_limit(0.0, 1.0).is_err());
        assert!(los_limit(1.0, -1.0).is_err());
    }

    #[test]
    fn empirical_examples() {
        let v = los_empirical(1.0, 1.0, PI / 2.0, 1e-6).unwrap();
        assert!((v - 0.5).abs() < 1e-5);
        let a = los_empirical(1.0, 1.0, PI / 4.0, 1e-6).unwrap();
        let b = los_empirical(1.0, 1.0, 3.0 * PI / 4.0, 1e-6).unwrap();
        assert!((a - b).abs() < 1e-5);
        assert!(los_empirical(1.0, 1.0, PI / 2.0, 0.0).is_err());
    }

    #[test]
    fn empirical_converges_first_order() {
        let lim = los_limit(1.3, 0.7).unwrap();
        let ratio = |phi: f64| {
            let e1 = (los_empirical(1.3, 0.7, phi, 0.1).unwrap() - lim).abs();
            let e2 = (los_empirical(1.3, 0.7, phi, 0.01).unwrap() - lim).abs();
            e1 / e2
        };
        for &phi in &[PI / 6.0, PI / 3.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0] {
            let r = ratio(phi);
            assert!((5.0..20.0).contains(&r), "phi={phi} ratio={r}");
        }
        // Straight down the error is even in y, so it falls by about 100.
        assert!(ratio(PI / 2.0) > 50.0);
    }

    #[test]
    fn richardson_extrapolation_recovers_limit() {
        let (a, b) = (0.8, 2.5);
        let lim = los_limit(a, b).unwrap();
        for &phi in &[PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
            let f = |y: f64| los_empirical(a, b, phi, y).unwrap();
            // Error is a series in y; eliminate the y and y² terms.
            let (f1, f2, f3) = (f(1e-3), f(1e-4), f(1e-5));
            let r12 = (10.0 * f2 - f1) / 9.0;
            let r23 = (10.0 * f3 - f2) / 9.0;
            let r = (100.0 * r23 - r12) / 99.0;
            assert!((r - lim).abs() < 1e-8, "phi={phi}: {r} vs {lim}");
        }
    }

    #[test]
    fn layout_examples() {
        let l = IntervalLayout::from_lengths(0.0, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(l.omega_ratio_approx(1, 2).unwrap(), 0.5);
        let l4 = IntervalLayout::from_lengths(0.0, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((l4.omega_ratio_approx(1, 3).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(l.omega_ratio_approx(2, 2), Err(Error::IndexAdjacent { m: 2, k: 2 }));
        assert_eq!(l.omega_ratio_approx(2, 1), Err(Error::IndexAdjacent { m: 2, k: 1 }));
        assert_eq!(l.omega_ratio_approx(1, 4), Err(Error::IndexAdjacent { m: 1, k: 4 }));
        assert_eq!(l.omega_ratio_approx(4, 4), Err(Error::IndexAdjacent { m: 4, k: 4 }));
        assert!(matches!(l.omega_ratio_approx(5, 1), Err(Error::IndexRange(5))));
        assert!(IntervalLayout::from_lengths(0.0, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn right_ray_is_unbounded_limit() {
        let l = IntervalLayout::from_lengths(-1.0, &[0.5, 2.0, 1.5, 0.25]).unwrap();
        for m in 1..l.len() {
            let a = l.abscissas()[l.len() - 1] - l.abscissas()[m - 1];
            let r = l.right_ray_ratio(m).unwrap();
            let lim = los_limit(a, 1e15).unwrap();
            assert!((r - lim).abs() < 1e-12 * r);
        }
    }

    #[test]
    fn approximations_match_direct_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let n = rng.random_range(3..9);
            let lengths: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.1..3.0)).collect();
            let l = IntervalLayout::from_lengths(rng.random_range(-2.0..2.0), &lengths).unwrap();
            for m in 1..=n {
                for k in 1..=n {
                    let Ok(approx) = l.omega_ratio_approx(m, k) else { continue };
                    let exact = l.omega_ratio_exact(m, k, 1e-6).unwrap();
                    assert!((approx - exact).abs() <= 1e-4 * exact, "m={m} k={k}: {approx} vs {exact}");
                }
            }
        }
    }
}
