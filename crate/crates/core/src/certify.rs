//! Independent univalence checks for a step map.
//!
//! The decisive test is the location of the zeros of `h'`: all outside the
//! closed disk means the map is univalent. The other checks (boundary
//! winding, Jacobian sign, collision sampling) use only point evaluations and
//! exist to catch bugs in the root path.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::pole_sum::RootOptions;
use crate::poisson::jacobian_of;
use crate::{Polygon, Result, StepMap};

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub boundary_samples: usize,
    /// Radius of the circle whose image is wound around the probes; moved
    /// closer to 1 for partitions with very narrow arcs.
    pub winding_radius: f64,
    pub probes: usize,
    pub jacobian_radii: usize,
    pub jacobian_angles: usize,
    pub jacobian_max_radius: f64,
    pub collision_radii: usize,
    pub collision_angles: usize,
    pub collision_max_radius: f64,
    /// Image distance, relative to the polygon diameter, counted as a collision.
    pub collision_tol: f64,
    /// Preimages closer than this are the same point for collision purposes.
    pub separation_tol: f64,
    pub roots: RootOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            boundary_samples: 8192,
            winding_radius: 1.0 - 1e-4,
            probes: 16,
            jacobian_radii: 64,
            jacobian_angles: 256,
            jacobian_max_radius: 1.0 - 1e-4,
            collision_radii: 16,
            collision_angles: 64,
            collision_max_radius: 0.9,
            collision_tol: 1e-9,
            separation_tol: 1e-3,
            roots: RootOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `min(|z| - error_radius - 1)` over finite zeros of `h'`; `None` (null
    /// in JSON) when there are none.
    pub zero_margin: Option<f64>,
    pub root_count: usize,
    pub winding_ok: bool,
    pub winding_radius: f64,
    /// Unrounded winding number about each probe.
    pub winding_numbers: Vec<f64>,
    pub jacobian_min: f64,
    pub jacobian_grid: [usize; 2],
    pub collision_free: bool,
    pub collision_samples: usize,
    /// Largest distance from the sampled boundary image to the polygon.
    pub boundary_trace_deviation: f64,
    pub pass: bool,
}

impl VerificationReport {
    /// Margin with "no finite zeros" read as `+∞`.
    pub fn margin(&self) -> f64 {
        self.zero_margin.unwrap_or(f64::INFINITY)
    }
}

pub fn verify(map: &StepMap, opts: &VerifyOptions) -> Result<VerificationReport> {
    let h = map.h_prime()?;
    let roots = h.find_roots_with(None, &opts.roots)?;
    let margin = roots.exterior_margin;

    let polygon = map.polygon();
    let probes = probe_points(polygon, opts.probes);
    // An arc much narrower than the distance to the circle barely shows in
    // the image; move the circle out until every vertex is traced.
    let narrowest = (0..map.partition().arcs()).map(|k| map.partition().arc(k)).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
    let winding_radius = 1.0 - (1.0 - opts.winding_radius).min(1e-2 * narrowest).max(1e-12);
    let windings = winding_numbers(map, &probes, winding_radius, opts.boundary_samples)?;
    let winding_ok = !windings.is_empty()
        && windings.iter().all(|&w| (w - w.round()).abs() <= 1e-3 && w.round() == 1.0);

    let mut jacobian_min = f64::INFINITY;
    for i in 0..opts.jacobian_radii {
        let r = opts.jacobian_max_radius * (i + 1) as f64 / opts.jacobian_radii as f64;
        for j in 0..opts.jacobian_angles {
            let z = Complex64::from_polar(r, TAU * j as f64 / opts.jacobian_angles as f64);
            jacobian_min = jacobian_min.min(jacobian_of(&h, z)?);
        }
    }

    let (collision_free, collision_samples) = collision_scan(map, opts)?;

    let mut deviation: f64 = 0.0;
    for j in 0..opts.boundary_samples {
        let z = Complex64::from_polar(winding_radius, TAU * j as f64 / opts.boundary_samples as f64);
        deviation = deviation.max(polygon.boundary_distance(map.evaluate(z)?));
    }

    let pass = margin > 0.0 && winding_ok && jacobian_min > 0.0 && collision_free;
    Ok(VerificationReport {
        zero_margin: margin.is_finite().then_some(margin),
        root_count: roots.roots.len(),
        winding_ok,
        winding_radius,
        winding_numbers: windings,
        jacobian_min,
        jacobian_grid: [opts.jacobian_radii, opts.jacobian_angles],
        collision_free,
        collision_samples,
        boundary_trace_deviation: deviation,
        pass,
    })
}

/// Well-separated interior points: lattice points of each triangle of a
/// triangulation, chosen greedily to maximize the smaller of boundary
/// distance and distance to the points already taken.
fn probe_points(polygon: &Polygon, count: usize) -> Vec<Complex64> {
    const LATTICE: usize = 6;
    let mut candidates = Vec::new();
    for [a, b, c] in polygon.triangles() {
        for i in 1..LATTICE {
            for j in 1..LATTICE - i {
                let k = LATTICE - i - j;
                let p = (a * i as f64 + b * j as f64 + c * k as f64) / LATTICE as f64;
                if polygon.contains(p) {
                    candidates.push((p, polygon.boundary_distance(p)));
                }
            }
        }
    }
    let mut chosen: Vec<Complex64> = Vec::with_capacity(count);
    while chosen.len() < count {
        let score = |&(p, d): &(Complex64, f64)| {
            chosen.iter().map(|&q| (p - q).norm()).fold(d, f64::min)
        };
        let best = candidates
            .iter()
            .filter(|c| score(c) > 0.0)
            .max_by(|x, y| score(x).total_cmp(&score(y)));
        match best {
            Some(&(p, _)) => chosen.push(p),
            None => break,
        }
    }
    chosen
}

/// Winding numbers of the image of `|z| = winding_radius` about each probe.
///
/// Uniform samples are bisected until consecutive images are closer than
/// the smallest probe-to-curve distance, so every principal-argument step is
/// the true one.
fn winding_numbers(map: &StepMap, probes: &[Complex64], r: f64, samples: usize) -> Result<Vec<f64>> {
    if probes.is_empty() {
        return Ok(Vec::new());
    }
    let image = |t: f64| map.evaluate(Complex64::from_polar(r, t));
    let n = samples.max(8);
    let mut total = vec![0.0; probes.len()];
    let mut t0 = 0.0;
    let mut w0 = image(0.0)?;
    for j in 1..=n {
        let t1 = TAU * j as f64 / n as f64;
        let w1 = image(t1)?;
        let mut stack = vec![(t0, w0, t1, w1, 0u32)];
        while let Some((ta, wa, tb, wb, depth)) = stack.pop() {
            let near = probes.iter().map(|&p| (wa - p).norm().min((wb - p).norm())).fold(f64::INFINITY, f64::min);
            let tm = 0.5 * (ta + tb);
            if (wb - wa).norm() < near || depth >= 48 || tm <= ta || tm >= tb {
                for (acc, &p) in total.iter_mut().zip(probes) {
                    *acc += ((wb - p) / (wa - p)).arg();
                }
                continue;
            }
            let wm = image(tm)?;
            // Pop order keeps the walk sequential; the sum does not care.
            stack.push((tm, wm, tb, wb, depth + 1));
            stack.push((ta, wa, tm, wm, depth + 1));
        }
        t0 = t1;
        w0 = w1;
    }
    Ok(total.into_iter().map(|a| a / TAU).collect())
}

/// Polar grid images sorted by real part; any two images closer than the
/// tolerance whose preimages are farther apart than `separation_tol` are a
/// collision.
fn collision_scan(map: &StepMap, opts: &VerifyOptions) -> Result<(bool, usize)> {
    let v = map.polygon().vertices();
    let diameter = v.iter().flat_map(|&a| v.iter().map(move |&b| (a - b).norm())).fold(0.0, f64::max);
    let tol = opts.collision_tol * diameter;
    let mut pts = vec![(Complex64::new(0.0, 0.0), map.evaluate(Complex64::new(0.0, 0.0))?)];
    for i in 0..opts.collision_radii {
        let r = opts.collision_max_radius * (i + 1) as f64 / opts.collision_radii as f64;
        for j in 0..opts.collision_angles {
            let z = Complex64::from_polar(r, TAU * j as f64 / opts.collision_angles as f64);
            pts.push((z, map.evaluate(z)?));
        }
    }
    pts.sort_by(|a, b| a.1.re.total_cmp(&b.1.re));
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[j].1.re - pts[i].1.re > tol {
                break;
            }
            if (pts[j].1 - pts[i].1).norm() < tol && (pts[j].0 - pts[i].0).norm() > opts.separation_tol {
                return Ok((false, pts.len()));
            }
        }
    }
    Ok((true, pts.len()))
}
