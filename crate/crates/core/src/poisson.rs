//! Harmonic measure in the disk and the upper half-plane, and the Poisson
//! extension of step-function boundary data.
//!
//! Two angle conventions are in play. Mapping evaluation uses normalized
//! harmonic measure (total mass one). [`half_plane_angle`] returns the raw
//! angle subtended by an interval; dividing by [`ANGLE_TO_MEASURE`]'s
//! reciprocal (that is, by π) turns it into normalized measure.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::pole_sum::PoleSum;
use crate::{Error, Polygon, Result};

/// Multiply a raw subtended angle by this to get normalized harmonic measure.
pub const ANGLE_TO_MEASURE: f64 = 1.0 / PI;

/// Closest approach to the unit circle at which the closed forms are used.
pub const BOUNDARY_CUTOFF: f64 = 1e-14;

/// Circle partition `0 = t_0 < t_1 < ... < t_n = 2π`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    angles: Vec<f64>,
}

impl Partition {
    pub fn new(angles: Vec<f64>) -> Result<Partition> {
        if angles.len() < 2 {
            return Err(Error::InvalidPartition(format!("{} angles", angles.len())));
        }
        if angles[0] != 0.0 || *angles.last().unwrap() != TAU {
            return Err(Error::InvalidPartition("must run from 0 to 2π".into()));
        }
        if let Some(k) = angles.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidPartition(format!("not increasing at {}", k + 1)));
        }
        Ok(Partition { angles })
    }

    /// `n` arcs of equal length.
    pub fn equal(n: usize) -> Partition {
        let mut angles: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
        angles.push(TAU);
        Partition { angles }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Number of arcs.
    pub fn arcs(&self) -> usize {
        self.angles.len() - 1
    }

    /// Arc `k` (zero-based) as `(start, end)`.
    pub fn arc(&self, k: usize) -> (f64, f64) {
        (self.angles[k], self.angles[k + 1])
    }

    /// Rotates the circle so that arc `k` starts at angle zero. Arc `k` of
    /// `self` becomes arc 0 of the result.
    pub fn rotated(&self, k: usize) -> Partition {
        let n = self.arcs();
        let shift = self.angles[k];
        let mut angles = Vec::with_capacity(n + 1);
        for j in 0..n {
            let t = self.angles[(k + j) % n];
            angles.push(if t >= shift { t - shift } else { t + TAU - shift });
        }
        angles[0] = 0.0;
        angles.push(TAU);
        Partition { angles }
    }
}

/// A polygon together with a circle partition: vertex `k` is the boundary
/// value on arc `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMap {
    polygon: Polygon,
    partition: Partition,
}

impl StepMap {
    pub fn new(polygon: Polygon, partition: Partition) -> Result<StepMap> {
        if polygon.len() != partition.arcs() {
            return Err(Error::InvalidPartition(format!(
                "{} arcs for {} vertices",
                partition.arcs(),
                polygon.len()
            )));
        }
        Ok(StepMap { polygon, partition })
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Residue form of `h'`.
    pub fn h_prime(&self) -> Result<PoleSum> {
        PoleSum::from_step_map(self.polygon.vertices(), &self.partition)
    }

    /// Value of the Poisson extension at `z`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        check_disk(z)?;
        Ok(self
            .polygon
            .vertices()
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let (a, b) = self.partition.arc(k);
                c * arc_measure(z, a, b)
            })
            .sum())
    }

    /// Jacobian determinant `|h'|² - |g'|²` at `z`.
    pub fn jacobian(&self, z: Complex64) -> Result<f64> {
        check_disk(z)?;
        jacobian_of(&self.h_prime()?, z)
    }
}

fn check_disk(z: Complex64) -> Result<()> {
    if !(z.norm() < 1.0 - BOUNDARY_CUTOFF) {
        return Err(Error::OutOfDisk(z));
    }
    Ok(())
}

fn arc_measure(z: Complex64, ta: f64, tb: f64) -> f64 {
    let delta = tb - ta;
    let ratio = (Complex64::from_polar(1.0, tb) - z) / (Complex64::from_polar(1.0, ta) - z);
    let mut angle = ratio.arg();
    // Wrapped values lie below -π + Δ/2; values just under Δ/2 are rounding
    // (z near the circle, off the arc) and must not be lifted.
    if angle < 0.5 * delta - FRAC_PI_2 {
        angle += TAU;
    }
    angle * ANGLE_TO_MEASURE - delta / TAU
}

/// Harmonic measure at `z` of the arc from `ta` to `tb` (counter-clockwise).
///
/// The chord angle `arg((e^{i tb} - z) / (e^{i ta} - z))` lies in
/// `(Δ/2, π + Δ/2)`; the principal value is lifted into that window.
pub fn disk_harmonic_measure(z: Complex64, ta: f64, tb: f64) -> Result<f64> {
    check_disk(z)?;
    let delta = tb - ta;
    if !(delta > 0.0 && delta < TAU) {
        return Err(Error::InvalidPartition(format!("arc length {delta}")));
    }
    Ok(arc_measure(z, ta, tb))
}

/// Jacobian from residues, written without the diagonal terms of
/// `|h'|² - |g'|²`, which cancel identically:
/// `J = -4 Σ_{j<k} Im(α_j conj α_k) Im(u_j conj u_k)` with `u_j = 1/(z - ζ_j)`.
pub(crate) fn jacobian_of(h: &PoleSum, z: Complex64) -> Result<f64> {
    let alpha = h.residues();
    let u: Vec<Complex64> = h
        .poles()
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let d = z - p;
            if d.norm() <= 1e-15 {
                Err(Error::AtPole(j))
            } else {
                Ok(d.inv())
            }
        })
        .collect::<Result<_>>()?;
    let mut acc = 0.0;
    for j in 0..u.len() {
        for k in j + 1..u.len() {
            acc += (alpha[j] * alpha[k].conj()).im * (u[j] * u[k].conj()).im;
        }
    }
    Ok(-4.0 * acc)
}

/// Step data on the real line: value `c_k` on `(ζ_k, ζ_{k+1})` for `k < n`
/// and `c_n` on the unbounded complement of `[ζ_1, ζ_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlaneStepMap {
    abscissas: Vec<f64>,
    vertices: Vec<Complex64>,
}

impl HalfPlaneStepMap {
    pub fn new(abscissas: Vec<f64>, vertices: Vec<Complex64>) -> Result<HalfPlaneStepMap> {
        if abscissas.len() != vertices.len() || abscissas.len() < 2 {
            return Err(Error::InvalidPartition("need matching abscissas and values, n >= 2".into()));
        }
        if abscissas.iter().any(|x| !x.is_finite()) || abscissas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidPartition("abscissas must increase".into()));
        }
        Ok(HalfPlaneStepMap { abscissas, vertices })
    }

    pub fn abscissas(&self) -> &[f64] {
        &self.abscissas
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    /// Normalized harmonic measures `ω_1..ω_n` at `z`; the last one is the
    /// complement of the others.
    pub fn measures(&self, z: Complex64) -> Result<Vec<f64>> {
        let n = self.abscissas.len();
        let mut w = Vec::with_capacity(n);
        for k in 0..n - 1 {
            w.push(half_plane_angle(z, self.abscissas[k], self.abscissas[k + 1])? * ANGLE_TO_MEASURE);
        }
        let bounded: f64 = w.iter().sum();
        w.push(1.0 - bounded);
        Ok(w)
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.measures(z)?.iter().zip(&self.vertices).map(|(&w, &c)| c * w).sum())
    }
}

/// Raw angle (radians, in `(0, π)`) subtended at `z` by `[a, b]`.
pub fn half_plane_angle(z: Complex64, a: f64, b: f64) -> Result<f64> {
    if !(z.im > 0.0) {
        return Err(Error::NotUpperHalfPlane(z));
    }
    if !(a < b) {
        return Err(Error::NonpositiveLength);
    }
    Ok(((z - b) / (z - a)).arg())
}
