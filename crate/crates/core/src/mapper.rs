//! Construction of a certified partition for an arbitrary simple polygon.
//!
//! Ears are clipped down to a triangle, which takes equal arcs. Each ear is
//! then put back by carving an arc of width `ε` off the end of its
//! neighbour's arc, halving `ε` until every finite zero of `h'` is certified
//! outside the closed unit disk.
//!
//! When the ear `c_{n+1}` sits between `c_n` and `c_1` and occupies the arc
//! `(2π - ε, 2π)`, the new zero of `h'` is close to `1 + ε w0` with
//! `w0 = -i (c_{n+1} - c_1) / (c_n - c_1)`. Convexity of the ear puts `w0` in
//! the right half-plane, hence the zero outside the disk for small `ε`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::certify::VerificationReport;
use crate::pole_sum::{PoleSum, RootOptions};
use crate::polygon::orient;
use crate::{CertifiedRoots, Error, Partition, Polygon, Result, StepMap};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Largest ε tried for an ear (also capped at half the neighbouring arc).
    pub eps0: f64,
    /// Required `|root| - error_radius - 1` for every finite zero.
    pub min_margin: f64,
    pub max_halvings: u32,
    /// Tracked zeros may move at most this much (relative to `max(1, |z|)`)
    /// when an ear is inserted.
    pub continuation_radius: f64,
    pub roots: RootOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            eps0: 1.0,
            min_margin: 1e-9,
            max_halvings: 60,
            continuation_radius: 1.0,
            roots: RootOptions::default(),
        }
    }
}

/// One ear insertion, in the order the ears were clipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EarStep {
    /// Index of the ear in the polygon it was clipped from.
    pub ear_index: usize,
    /// Left rotation that made the ear the last vertex.
    pub relabel_offset: usize,
    pub w0: Complex64,
    pub epsilon: f64,
    pub halvings: u32,
    pub margin: f64,
    /// Largest move of a previously certified zero, relative to `max(1, |z|)`.
    pub root_shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub step_map: StepMap,
    pub roots: CertifiedRoots,
    pub exterior_margin: f64,
    pub ear_trace: Vec<EarStep>,
    pub checks: Option<VerificationReport>,
}

/// `w0 = -i (ear - first) / (last - first)` for the corner `last, ear, first`.
pub fn claim_limit(last: Complex64, ear: Complex64, first: Complex64) -> Complex64 {
    -Complex64::i() * (ear - first) / (last - first)
}

struct Level {
    framed: Polygon,
    ear_index: usize,
    shift: usize,
}

/// Certified partition for `polygon`, expressed in its own vertex order.
pub fn solve(polygon: &Polygon, opts: &SolveOptions) -> Result<Certificate> {
    let mut levels = Vec::with_capacity(polygon.len().saturating_sub(3));
    let mut current = polygon.clone();
    while current.len() > 3 {
        let m = current.len();
        let ears = current.find_ears().map_err(|e| Error::InvalidPolygon(Box::new(e)))?;
        let mut chosen = None;
        for e in ears.ranked() {
            match current.clip_ear(e) {
                Ok(_) => {
                    chosen = Some(e);
                    break;
                }
                Err(Error::CollinearTriple(_)) => continue,
                Err(err) => return Err(err),
            }
        }
        let ear_index = chosen.ok_or(Error::NoClippableEar)?;
        let shift = (ear_index + 1) % m;
        let framed = current.rotated(shift);
        let next = framed.clip_ear(m - 1)?;
        levels.push(Level { framed, ear_index, shift });
        current = next;
    }

    let mut partition = Partition::equal(3);
    let mut roots = PoleSum::from_step_map(current.vertices(), &partition)?.find_roots_with(None, &opts.roots)?;
    if !(roots.exterior_margin > opts.min_margin) {
        return Err(Error::EpsilonExhausted { epsilon: 0.0, best_margin: roots.exterior_margin });
    }

    let mut trace = Vec::with_capacity(levels.len());
    for level in levels.iter().rev() {
        let (tau, new_roots, mut step) = insert_ear(&partition, level.framed.vertices(), &roots.roots, opts)?;
        step.ear_index = level.ear_index;
        step.relabel_offset = level.shift;
        trace.push(step);
        // Back to the unrotated vertex order of this level: rotate the circle
        // so the arc of the level's first vertex starts at zero.
        let m = level.framed.len();
        let k = (m - level.shift) % m;
        let phi = tau.angles()[k];
        partition = tau.rotated(k);
        let turn = Complex64::from_polar(1.0, -phi);
        roots = CertifiedRoots { roots: new_roots.roots.iter().map(|r| r * turn).collect(), ..new_roots };
    }
    trace.reverse();

    let step_map = StepMap::new(polygon.clone(), partition)?;
    let roots = step_map.h_prime()?.find_roots_with(Some(&roots.roots), &opts.roots)?;
    if !(roots.exterior_margin > opts.min_margin) {
        return Err(Error::EpsilonExhausted { epsilon: 0.0, best_margin: roots.exterior_margin });
    }
    Ok(Certificate { exterior_margin: roots.exterior_margin, step_map, roots, ear_trace: trace, checks: None })
}

/// Adds the ear `vertices[n]` (between `vertices[n-1]` and `vertices[0]`) to
/// a certified partition of the first `n` vertices.
///
/// `previous` are the certified zeros for the `n`-gon; they seed the root
/// search together with `1 + ε w0`.
pub fn insert_ear(
    partition: &Partition,
    vertices: &[Complex64],
    previous: &[Complex64],
    opts: &SolveOptions,
) -> Result<(Partition, CertifiedRoots, EarStep)> {
    let n = partition.arcs();
    if vertices.len() != n + 1 {
        return Err(Error::InvalidPartition(format!("{} arcs for {} + 1 vertices", n, vertices.len() - 1)));
    }
    let (first, last, ear) = (vertices[0], vertices[n - 1], vertices[n]);
    // arg((ear - first) / (last - first)) ∈ (0, π)
    if orient(first, last, ear) <= 0.0 {
        return Err(Error::NotOutsideCorner);
    }
    let w0 = claim_limit(last, ear, first);
    let t = partition.angles();
    let mut eps = opts.eps0.min(0.5 * (t[n] - t[n - 1]));
    let mut best_margin = f64::NEG_INFINITY;
    for halvings in 0..=opts.max_halvings {
        let tau = ear_partition(partition, eps)?;
        let h = match PoleSum::from_step_map(vertices, &tau) {
            Ok(h) => h,
            Err(Error::CoincidentPoles(..)) => break,
            Err(e) => return Err(e),
        };
        let mut seeds = previous.to_vec();
        seeds.push(Complex64::new(1.0, 0.0) + w0 * eps);
        let roots = h.find_roots_with(Some(&seeds), &opts.roots)?;
        best_margin = best_margin.max(roots.exterior_margin);
        if roots.exterior_margin > opts.min_margin {
            if let Some(root_shift) = tracks(previous, &roots.roots, opts.continuation_radius) {
                let step =
                    EarStep { ear_index: n, relabel_offset: 0, w0, epsilon: eps, halvings, margin: roots.exterior_margin, root_shift };
                return Ok((tau, roots, step));
            }
        }
        eps *= 0.5;
    }
    Err(Error::EpsilonExhausted { epsilon: eps, best_margin })
}

/// `τ_k = t_k` for `k < n`, `τ_n = 2π - ε`, `τ_{n+1} = 2π`.
pub fn ear_partition(partition: &Partition, eps: f64) -> Result<Partition> {
    let n = partition.arcs();
    let mut tau = partition.angles()[..n].to_vec();
    tau.push(TAU - eps);
    tau.push(TAU);
    Partition::new(tau)
}

/// Matches every previous zero to its own nearest new zero and returns the
/// largest relative move, or `None` if some zero moved farther than `radius`.
fn tracks(previous: &[Complex64], current: &[Complex64], radius: f64) -> Option<f64> {
    let mut used = vec![false; current.len()];
    let mut worst: f64 = 0.0;
    for &p in previous {
        let best = current
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &c)| (j, (c - p).norm() / p.norm().max(1.0)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((j, d)) if d <= radius => {
                used[j] = true;
                worst = worst.max(d);
            }
            // Degenerate numerators may lose zeros to infinity.
            None => break,
            _ => return None,
        }
    }
    Some(worst)
}

/// `ε h'_ε(1 + ε w)` summed directly in the `w` variable:
/// `Σ_k β_k / (w + (1 - ξ_k) / ε)` with `ξ_k = e^{i τ_k}`.
///
/// `vertices` has the ear last and `tau` is the ear-augmented partition.
pub fn renormalized_residual(vertices: &[Complex64], tau: &Partition, eps: f64, w: Complex64) -> Result<Complex64> {
    let m = vertices.len();
    if tau.arcs() != m || !(eps > 0.0) {
        return Err(Error::InvalidPartition("partition does not match vertices".into()));
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let angles = tau.angles();
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..m {
        let beta = (vertices[k] - vertices[(k + 1) % m]) / two_pi_i;
        // 1 - e^{iτ} = 1 - e^{-iδ} with δ = 2π - τ.
        let delta = TAU - angles[k + 1];
        let shift = Complex64::new(2.0 * (0.5 * delta).sin().powi(2), delta.sin()) / eps;
        let denom = w + shift;
        if denom.norm() <= 1e-15 {
            return Err(Error::AtPole(k));
        }
        total += beta / denom;
    }
    Ok(total)
}

/// The `ε → 0` limit `β_n / (w + i) + β_{n+1} / w` of [`renormalized_residual`].
pub fn renormalized_limit(vertices: &[Complex64], w: Complex64) -> Complex64 {
    let m = vertices.len();
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let beta_n = (vertices[m - 2] - vertices[m - 1]) / two_pi_i;
    let beta_ear = (vertices[m - 1] - vertices[0]) / two_pi_i;
    beta_n / (w + Complex64::i()) + beta_ear / w
}
