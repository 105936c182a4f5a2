//! `h'` as a sum of simple poles on the unit circle, its numerator
//! polynomial, and certified localization of its finite zeros.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poisson::Partition;
use crate::{Error, Result};

const POLE_TOL: f64 = 1e-14;
const UNIT_TOL: f64 = 1e-14;
/// Leading numerator coefficients below this fraction of the largest one are
/// treated as zero (subject to the Rouché guard in `find_roots`).
const TRIM_REL: f64 = 1e-12;

/// `Σ_k residue_k / (z - pole_k)` with poles on the unit circle and residues
/// summing to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSum {
    poles: Vec<Complex64>,
    residues: Vec<Complex64>,
}

/// Finite zeros of a [`PoleSum`] with inclusion radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedRoots {
    pub roots: Vec<Complex64>,
    /// Every zero lies in the union of the disks `D(roots[i], error_radii[i])`.
    pub error_radii: Vec<f64>,
    /// `min_i |roots[i]| - error_radii[i] - 1`; `+∞` when there are no roots.
    pub exterior_margin: f64,
    /// `n - 2`, the generic number of finite zeros.
    pub nominal_count: usize,
    /// When negligible leading coefficients were dropped, the remaining
    /// `nominal_count - roots.len()` zeros lie outside this radius.
    pub dropped_outside: Option<f64>,
}

impl CertifiedRoots {
    fn new(roots: Vec<Complex64>, error_radii: Vec<f64>, nominal_count: usize, dropped_outside: Option<f64>) -> Self {
        let exterior_margin = roots
            .iter()
            .zip(&error_radii)
            .map(|(r, e)| r.norm() - e - 1.0)
            .fold(f64::INFINITY, f64::min);
        CertifiedRoots { roots, error_radii, exterior_margin, nominal_count, dropped_outside }
    }

    pub fn is_degenerate(&self) -> bool {
        self.roots.len() < self.nominal_count
    }
}

/// Iteration limits for [`PoleSum::find_roots_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct RootOptions {
    pub max_sweeps: usize,
    pub polish_steps: usize,
    /// Relative Newton-correction size at which a sweep counts as converged.
    pub tolerance: f64,
    /// Rotated starting rings tried before giving up.
    pub restarts: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { max_sweeps: 200, polish_steps: 20, tolerance: 1e-13, restarts: 4 }
    }
}

impl PoleSum {
    pub fn new(poles: Vec<Complex64>, residues: Vec<Complex64>) -> Result<PoleSum> {
        if poles.len() != residues.len() || poles.len() < 2 {
            return Err(Error::InvalidPartition("pole and residue counts differ".into()));
        }
        if let Some(k) = poles.iter().position(|p| (p.norm() - 1.0).abs() > UNIT_TOL) {
            return Err(Error::InvalidPartition(format!("pole {k} is off the unit circle")));
        }
        for j in 0..poles.len() {
            for k in j + 1..poles.len() {
                if (poles[j] - poles[k]).norm() < POLE_TOL {
                    return Err(Error::CoincidentPoles(j, k));
                }
            }
        }
        let total: Complex64 = residues.iter().sum();
        let mass: f64 = residues.iter().map(|a| a.norm()).sum();
        if total.norm() > 1e-13 * mass {
            return Err(Error::InvalidPartition("residues do not sum to zero".into()));
        }
        Ok(PoleSum { poles, residues })
    }

    /// `h'` of the step map with vertex `k` on arc `k`: pole `e^{i t_{k+1}}`
    /// with residue `(c_k - c_{k+1}) / 2πi`, indices cyclic.
    pub fn from_step_map(vertices: &[Complex64], partition: &Partition) -> Result<PoleSum> {
        let n = vertices.len();
        if partition.arcs() != n {
            return Err(Error::InvalidPartition(format!("{} arcs for {n} vertices", partition.arcs())));
        }
        let t = partition.angles();
        let poles: Vec<Complex64> = (1..=n)
            .map(|k| if k == n { Complex64::new(1.0, 0.0) } else { Complex64::from_polar(1.0, t[k]) })
            .collect();
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let residues = (0..n).map(|k| (vertices[k] - vertices[(k + 1) % n]) / two_pi_i).collect();
        PoleSum::new(poles, residues)
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn residues(&self) -> &[Complex64] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// `g'` of the same harmonic map: residues `-conj(α_k)`, same poles.
    pub fn conjugate_residues(&self) -> PoleSum {
        PoleSum { poles: self.poles.clone(), residues: self.residues.iter().map(|a| -a.conj()).collect() }
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        match self.poles.iter().position(|&p| (z - p).norm() <= 1e-15) {
            Some(k) => Err(Error::AtPole(k)),
            None => Ok(()),
        }
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.sum(z))
    }

    /// Derivative `-Σ α_k / (z - ζ_k)²`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.poles.iter().zip(&self.residues).map(|(&p, &a)| -a / ((z - p) * (z - p))).sum())
    }

    fn sum(&self, z: Complex64) -> Complex64 {
        self.poles.iter().zip(&self.residues).map(|(&p, &a)| a / (z - p)).sum()
    }

    /// Coefficients (lowest degree first) of `P(z) = Σ_k α_k Π_{j≠k} (z - ζ_j)`.
    /// The `z^{n-1}` coefficient is `Σ α_k = 0` and is not stored, so the
    /// result has `n - 1` entries.
    pub fn numerator(&self) -> Vec<Complex64> {
        let n = self.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n - 1];
        for k in 0..n {
            let mut prod = vec![Complex64::new(1.0, 0.0)];
            for (j, &p) in self.poles.iter().enumerate() {
                if j == k {
                    continue;
                }
                prod.push(Complex64::new(0.0, 0.0));
                for d in (1..prod.len()).rev() {
                    prod[d] = prod[d - 1] - p * prod[d];
                }
                prod[0] = -p * prod[0];
            }
            for d in 0..n - 1 {
                out[d] += self.residues[k] * prod[d];
            }
        }
        out
    }

    /// Coefficient of `z^{n-2}`, computed directly as `Σ α_k ζ_k`.
    pub fn leading_coefficient(&self) -> Complex64 {
        self.poles.iter().zip(&self.residues).map(|(&p, &a)| a * p).sum()
    }

    pub fn find_roots(&self, seeds: Option<&[Complex64]>) -> Result<CertifiedRoots> {
        self.find_roots_with(seeds, &RootOptions::default())
    }

    /// All finite zeros with inclusion radii.
    ///
    /// Aberth-Ehrlich iteration on the numerator, then Newton polishing on
    /// the pole-sum form. Leading coefficients that are negligible relative
    /// to the largest are dropped only if Rouché's theorem on a circle
    /// outside the kept roots shows the dropped zeros stay outside it.
    pub fn find_roots_with(&self, seeds: Option<&[Complex64]>, opts: &RootOptions) -> Result<CertifiedRoots> {
        let mut coeffs = self.numerator();
        let nominal = coeffs.len() - 1;
        coeffs[nominal] = self.leading_coefficient();
        let scale = coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::RootsNotConverged { worst_residual: f64::INFINITY });
        }
        let trimmed = (0..=nominal).rev().find(|&d| coeffs[d].norm() > TRIM_REL * scale).unwrap_or(0);
        let seeds = seeds.unwrap_or(&[]);
        for degree in trimmed..=nominal {
            let poly = Numerator { sum: self, coeffs: &coeffs[..=degree], full: degree == nominal };
            let roots = poly.solve(seeds, opts)?;
            let radii = poly.radii(&roots);
            if degree == nominal {
                return Ok(CertifiedRoots::new(roots, radii, nominal, None));
            }
            if let Some(rho) = rouche_guard(&coeffs, degree, &roots, &radii) {
                return Ok(CertifiedRoots::new(roots, radii, nominal, Some(rho)));
            }
        }
        unreachable!("the untrimmed degree always returns")
    }
}

/// Circle radius `ρ > 1` on which the dropped tail `Σ_{k>degree} a_k z^k` is
/// smaller than the kept polynomial, so both have the same number of zeros
/// inside it. `None` when no such circle can be shown.
fn rouche_guard(coeffs: &[Complex64], degree: usize, roots: &[Complex64], radii: &[f64]) -> Option<f64> {
    let gap = roots.iter().zip(radii).map(|(r, e)| r.norm() - e - 1.0).fold(1.0_f64, f64::min);
    if !(gap > 0.0) {
        return None;
    }
    let rho = 1.0 + 0.5 * gap;
    let tail: f64 = (degree + 1..coeffs.len()).map(|k| coeffs[k].norm() * rho.powi(k as i32)).sum();
    let kept_min = coeffs[degree].norm() * roots.iter().zip(radii).map(|(r, e)| r.norm() - e - rho).product::<f64>();
    (tail < kept_min).then_some(rho)
}

/// The polynomial being solved: either the full numerator, evaluated through
/// the pole sum where that is accurate, or a truncation of it.
struct Numerator<'a> {
    sum: &'a PoleSum,
    coeffs: &'a [Complex64],
    full: bool,
}

/// `(value, derivative, rounding bound on value)` scaled by a common factor.
type Eval = (Complex64, Complex64, f64);

impl Numerator<'_> {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn use_pole_form(&self, z: Complex64) -> bool {
        self.full && z.norm() < 4.0 && self.sum.poles.iter().all(|&p| (z - p).norm() > 1e-300)
    }

    /// `P(z) / P'(z)`.
    fn newton_ratio(&self, z: Complex64) -> Complex64 {
        if self.use_pole_form(z) {
            let (s, ds, l) = self.pole_terms(z);
            return s / (s * l + ds);
        }
        let d = self.degree() as f64;
        if z.norm() <= 1.0 {
            let (p, dp, _) = horner(self.coeffs, z);
            p / dp
        } else {
            let w = z.inv();
            let (r, dr, _) = horner_rev(self.coeffs, w);
            // P(z) = z^d R(1/z)  ⇒  P'/P = d/z - R'(w) w² / R(w)
            (d * w - dr * w * w / r).inv()
        }
    }

    /// `S = Σ α/(z-ζ)`, `S'`, and `L = Σ 1/(z-ζ)`, so that `P = Q S` and
    /// `P'/P = L + S'/S` with `Q = Π (z - ζ)`.
    fn pole_terms(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let mut s = Complex64::new(0.0, 0.0);
        let mut ds = s;
        let mut l = s;
        for (&p, &a) in self.sum.poles.iter().zip(&self.sum.residues) {
            let u = (z - p).inv();
            s += a * u;
            ds -= a * u * u;
            l += u;
        }
        (s, ds, l)
    }

    /// Relative backward residual at `z`: `|P(z)|` over the sum of the
    /// magnitudes of its terms. In pole form each term also carries the
    /// amplification `|z| / |z - ζ|` of the rounding in `z` itself, which
    /// dominates next to clustered poles.
    fn relative_residual(&self, z: Complex64) -> f64 {
        if self.use_pole_form(z) {
            let mut s = Complex64::new(0.0, 0.0);
            let mut m = 0.0;
            for (&p, &a) in self.sum.poles.iter().zip(&self.sum.residues) {
                let d = z - p;
                let t = a / d;
                s += t;
                m += t.norm() * (1.0 + z.norm() / d.norm());
            }
            return if m == 0.0 { 0.0 } else { s.norm() / m };
        }
        let (p, _, bound) = self.scaled_eval(z);
        let m = bound / (2.0 * self.degree().max(1) as f64 * f64::EPSILON);
        if m == 0.0 {
            0.0
        } else {
            p.norm() / m
        }
    }

    /// Coefficient-form evaluation, divided by `z^d` when `|z| > 1`.
    fn scaled_eval(&self, z: Complex64) -> Eval {
        if z.norm() <= 1.0 {
            horner(self.coeffs, z)
        } else {
            horner_rev(self.coeffs, z.inv())
        }
    }

    fn solve(&self, seeds: &[Complex64], opts: &RootOptions) -> Result<Vec<Complex64>> {
        let d = self.degree();
        if d == 0 {
            return Ok(Vec::new());
        }
        let mut worst = f64::INFINITY;
        for attempt in 0..opts.restarts.max(1) {
            let mut z = self.initial_guesses(seeds, attempt);
            for _ in 0..opts.max_sweeps {
                let mut max_step: f64 = 0.0;
                for i in 0..d {
                    let ratio = self.newton_ratio(z[i]);
                    if !ratio.is_finite() {
                        continue;
                    }
                    let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
                    let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                    if step.is_finite() {
                        z[i] -= step;
                        max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
                    }
                }
                if max_step <= opts.tolerance {
                    break;
                }
            }
            self.polish(&mut z, opts.polish_steps);
            worst = z.iter().map(|&r| self.relative_residual(r)).fold(0.0, f64::max);
            if z.iter().all(|r| r.is_finite()) && worst <= 1e-11 {
                return Ok(z);
            }
        }
        Err(Error::RootsNotConverged { worst_residual: worst })
    }

    fn initial_guesses(&self, seeds: &[Complex64], attempt: usize) -> Vec<Complex64> {
        let d = self.degree();
        let mut z: Vec<Complex64> = seeds.iter().copied().filter(|s| s.is_finite()).take(d).collect();
        let a0 = self.coeffs[0].norm();
        let ad = self.coeffs[d].norm();
        let radius = if a0 > 0.0 { (a0 / ad).powf(1.0 / d as f64) } else { 1.0 };
        let radius = if radius.is_finite() && radius > 0.0 { radius } else { 1.0 };
        let offset = 0.4 + 0.9 * attempt as f64;
        let k0 = z.len();
        for k in k0..d {
            z.push(Complex64::from_polar(radius, 2.0 * PI * k as f64 / d as f64 + offset));
        }
        // Aberth needs pairwise distinct starting points.
        for i in 0..d {
            for j in 0..i {
                if (z[i] - z[j]).norm() <= 1e-10 * z[i].norm().max(1.0) {
                    z[i] *= Complex64::from_polar(1.0 + 1e-7 * (i + 1) as f64, 1e-6 * (i + 1) as f64);
                }
            }
        }
        z
    }

    fn polish(&self, z: &mut [Complex64], steps: usize) {
        for r in z.iter_mut() {
            let mut res = self.relative_residual(*r);
            for _ in 0..steps {
                if res == 0.0 {
                    break;
                }
                let cand = *r - self.newton_ratio(*r);
                if !cand.is_finite() {
                    break;
                }
                let cres = self.relative_residual(cand);
                if cres < res {
                    *r = cand;
                    res = cres;
                } else {
                    break;
                }
            }
        }
    }

    /// Upper bounds on `|W_i|` (the Weierstrass correction
    /// `P(z_i) / (a_d Π_{j≠i} (z_i - z_j))`) and on `|P(z_i) / P'(z_i)|`,
    /// each including the rounding error of the evaluation.
    fn inclusion_terms(&self, roots: &[Complex64], i: usize) -> (f64, f64) {
        let z = roots[i];
        let d = self.degree();
        let lead = self.coeffs[d].norm();
        if self.use_pole_form(z) {
            let (s, ds, l) = self.pole_terms(z);
            let mut mass = 0.0;
            let mut q = 1.0;
            for &p in &self.sum.poles {
                mass += (z - p).norm().recip();
                q *= (z - p).norm();
            }
            mass *= self.sum.residues.iter().map(|a| a.norm()).fold(0.0, f64::max);
            let s_abs = s.norm() + 4.0 * self.sum.len() as f64 * f64::EPSILON * mass;
            let gaps: f64 = roots.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &zj)| (z - zj).norm()).product();
            return (q * s_abs / (lead * gaps), s_abs / (s * l + ds).norm());
        }
        let (p, dp, bound) = self.scaled_eval(z);
        let value = p.norm() + bound;
        if z.norm() <= 1.0 {
            let gaps: f64 = roots.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &zj)| (z - zj).norm()).product();
            (value / (lead * gaps), value / dp.norm())
        } else {
            // P(z) = z^d R(w) and Π_{j≠i} (z - z_j) = z^{d-1} Π (1 - z_j/z), w = 1/z.
            let w = z.inv();
            let gaps: f64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| (1.0 - zj * w).norm())
                .product();
            let dpp = (d as f64 * w * p - dp * w * w).norm();
            (value * z.norm() / (lead * gaps), value / dpp)
        }
    }

    /// Inclusion radii: `d · max(|P/P'|, |W_i|)` where `W_i` is the
    /// Weierstrass correction; the union of the `d|W_i|` disks holds every
    /// zero. Overlapping disks are merged into one covering radius.
    fn radii(&self, roots: &[Complex64]) -> Vec<f64> {
        let d = roots.len();
        let mut rad: Vec<f64> = (0..d)
            .map(|i| {
                let (w, ratio) = self.inclusion_terms(roots, i);
                let r = d as f64 * w.max(ratio);
                if r.is_finite() {
                    r
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        // Connected components of overlapping disks.
        let mut comp: Vec<usize> = (0..d).collect();
        fn find(c: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while c[r] != r {
                r = c[r];
            }
            c[i] = r;
            r
        }
        for i in 0..d {
            for j in 0..i {
                if (roots[i] - roots[j]).norm() <= rad[i] + rad[j] {
                    let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                    comp[a] = b;
                }
            }
        }
        let roots_of: Vec<usize> = (0..d).map(|i| find(&mut comp, i)).collect();
        let base = rad.clone();
        for i in 0..d {
            for j in 0..d {
                if i != j && roots_of[i] == roots_of[j] {
                    rad[i] = rad[i].max((roots[i] - roots[j]).norm() + base[j]);
                }
            }
        }
        rad
    }
}

/// Horner evaluation with derivative and a running rounding-error bound.
fn horner(c: &[Complex64], z: Complex64) -> Eval {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = p;
    let mut mag = 0.0;
    let zn = z.norm();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
        mag = mag * zn + a.norm();
    }
    (p, dp, 2.0 * c.len() as f64 * f64::EPSILON * mag)
}

/// Horner on the reversed coefficients at `w = 1/z`: returns `R(w)` and
/// `R'(w)` where `P(z) = z^d R(w)`.
fn horner_rev(c: &[Complex64], w: Complex64) -> Eval {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = p;
    let mut mag = 0.0;
    let wn = w.norm();
    for &a in c.iter() {
        dp = dp * w + p;
        p = p * w + a;
        mag = mag * wn + a.norm();
    }
    (p, dp, 2.0 * c.len() as f64 * f64::EPSILON * mag)
}
