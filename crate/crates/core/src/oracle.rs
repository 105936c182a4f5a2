//! Independent reference computations for tests.
//!
//! Nothing here shares code with the production paths it is used to check:
//! predicates use plain floating-point cross products, integrals use adaptive
//! Gauss-Kronrod quadrature, and polynomial roots come from dense eigenvalue
//! solves.

// Kronrod nodes and weights are kept at their published precision.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn seg_touch(p1: Complex64, p2: Complex64, p3: Complex64, p4: Complex64) -> bool {
    let d1 = cross(p4 - p3, p1 - p3);
    let d2 = cross(p4 - p3, p2 - p3);
    let d3 = cross(p2 - p1, p3 - p1);
    let d4 = cross(p2 - p1, p4 - p1);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return true;
    }
    let within = |p: Complex64, a: Complex64, b: Complex64| {
        p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
    };
    (d1 == 0.0 && within(p1, p3, p4))
        || (d2 == 0.0 && within(p2, p3, p4))
        || (d3 == 0.0 && within(p3, p1, p2))
        || (d4 == 0.0 && within(p4, p1, p2))
}

/// All-pairs test: does the closed vertex cycle fail to be a simple curve?
/// Straight angles are allowed; fold-backs and touching count as failures.
pub fn brute_force_self_intersects(v: &[Complex64]) -> bool {
    let n = v.len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (a, b) = (v[i], v[(i + 1) % n]);
            let (c, d) = (v[j], v[(j + 1) % n]);
            if (i + 1) % n == j {
                // b == c; overlap only if d doubles back along a-b.
                if cross(b - a, d - c) == 0.0 && ((b - a) * (d - c).conj()).re < 0.0 {
                    return true;
                }
                continue;
            }
            if (j + 1) % n == i {
                continue;
            }
            if seg_touch(a, b, c, d) {
                return true;
            }
        }
    }
    false
}

/// Clip-and-revalidate ear test: vertex `i` is strictly convex, the polygon
/// without it is still simple, and it keeps positive orientation.
pub fn brute_force_is_ear(v: &[Complex64], i: usize) -> bool {
    let n = v.len();
    let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
    if cross(b - a, c - b) <= 0.0 {
        return false;
    }
    if n == 3 {
        return true;
    }
    let mut rest = v.to_vec();
    rest.remove(i);
    let area: f64 = (0..rest.len()).map(|k| cross(rest[k], rest[(k + 1) % rest.len()])).sum();
    !brute_force_self_intersects(&rest) && area > 0.0
}

/// Random simple polygon with `n` vertices from a turning random walk,
/// rejected and regenerated until it is simple with no collinear triple.
pub fn random_walk_polygon(seed: u64, n: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut heading: f64 = rng.random_range(0.0..2.0 * PI);
        let mut p = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let mut v = Vec::with_capacity(n);
        let noise = rng.random_range(0.2..1.2);
        for _ in 0..n {
            v.push(p);
            let len = rng.random_range(0.3..1.5);
            p += Complex64::from_polar(len, heading);
            heading += 2.0 * PI / n as f64 + noise * rng.random_range(-1.0..1.0);
        }
        let distinct = (0..n).all(|i| (0..i).all(|j| v[i] != v[j]));
        let no_straight = (0..n).all(|i| cross(v[i] - v[(i + n - 1) % n], v[(i + 1) % n] - v[i]) != 0.0);
        if distinct && no_straight && !brute_force_self_intersects(&v) {
            return v;
        }
    }
}

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const XGK: [f64; 8] = [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ];
    const WGK: [f64; 8] = [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ];
    const WG: [f64; 4] = [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) integral of `f` over `[a, b]`.
///
/// The per-piece tolerance is halved on each split but never below a few
/// ulps of the whole integral, which rounding cannot beat anyway.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, floor: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol.max(floor) || depth > 40 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, floor, depth + 1) + rec(f, m, b, 0.5 * tol, floor, depth + 1)
    }
    let (whole, _) = gk15(&|x: f64| f(x).abs(), a, b);
    rec(f, a, b, tol, 4.0 * f64::EPSILON * whole, 0)
}

/// Harmonic measure of the arc `(ta, tb)` at `z` by integrating the Poisson kernel.
pub fn poisson_arc_measure(z: Complex64, ta: f64, tb: f64) -> f64 {
    let r2 = z.norm_sqr();
    let kernel = |t: f64| (1.0 - r2) / (Complex64::from_polar(1.0, t) - z).norm_sqr() / (2.0 * PI);
    integrate(&kernel, ta, tb, 1e-14)
}

/// Eigenvalues of the companion matrix of `coeffs` (lowest degree first,
/// leading coefficient nonzero).
pub fn companion_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = coeffs[d];
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -coeffs[i] / lead;
    }
    m.schur().eigenvalues().expect("complex Schur form is triangular").iter().copied().collect()
}

/// Central-difference Jacobian determinant of a planar map.
pub fn fd_jacobian(f: &dyn Fn(Complex64) -> Complex64, z: Complex64, h: f64) -> f64 {
    let fx = (f(z + h) - f(z - h)) / (2.0 * h);
    let fy = (f(z + Complex64::new(0.0, h)) - f(z - Complex64::new(0.0, h))) / (2.0 * h);
    fx.re * fy.im - fx.im * fy.re
}

/// Law-of-cosines angle at `z` in the triangle `(a, z, b)`.
pub fn angle_by_cosines(z: Complex64, a: f64, b: f64) -> f64 {
    let da = (z - a).norm();
    let db = (z - b).norm();
    let ab = b - a;
    ((da * da + db * db - ab * ab) / (2.0 * da * db)).clamp(-1.0, 1.0).acos()
}
