//! Simple polygons, their validation, and ears.
//!
//! Orientation and incidence decisions use the adaptive-precision `orient2d`
//! predicate on the input coordinates, so they are exact for every `f64` input.

use num_complex::Complex64;
use robust::{orient2d, Coord};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A positively oriented simple polygon with distinct vertices and no three
/// consecutive vertices on a line.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Complex64>,
}

/// Ears of a polygon together with their clearance from the other vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EarReport {
    /// Zero-based vertex indices, increasing.
    pub ear_indices: Vec<usize>,
    /// Distance from the closed ear triangle to the nearest vertex that is not
    /// one of its corners, parallel to `ear_indices`. Infinite for triangles.
    pub robustness: Vec<f64>,
}

impl EarReport {
    /// The ear with the largest robustness; ties go to the smallest index.
    pub fn best(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (&i, &r) in self.ear_indices.iter().zip(&self.robustness) {
            match best {
                Some((_, br)) if r <= br => {}
                _ => best = Some((i, r)),
            }
        }
        best.map(|(i, _)| i)
    }

    /// Ears ordered by decreasing robustness, ties by index.
    pub fn ranked(&self) -> Vec<usize> {
        let mut order: Vec<(usize, f64)> = self
            .ear_indices
            .iter()
            .copied()
            .zip(self.robustness.iter().copied())
            .collect();
        order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        order.into_iter().map(|(i, _)| i).collect()
    }
}

#[inline]
fn coord(z: Complex64) -> Coord<f64> {
    Coord { x: z.re, y: z.im }
}

/// Sign of the orientation of the triangle `a, b, c`: positive when
/// counter-clockwise.
#[inline]
pub(crate) fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    orient2d(coord(a), coord(b), coord(c))
}

fn on_segment_collinear(p: Complex64, a: Complex64, b: Complex64) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Closed segment intersection test (touching counts).
pub(crate) fn segments_intersect(p1: Complex64, p2: Complex64, p3: Complex64, p4: Complex64) -> bool {
    let d1 = orient(p3, p4, p1);
    let d2 = orient(p3, p4, p2);
    let d3 = orient(p1, p2, p3);
    let d4 = orient(p1, p2, p4);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment_collinear(p1, p3, p4))
        || (d2 == 0.0 && on_segment_collinear(p2, p3, p4))
        || (d3 == 0.0 && on_segment_collinear(p3, p1, p2))
        || (d4 == 0.0 && on_segment_collinear(p4, p1, p2))
}

/// Point in the closed triangle `a, b, c` (any orientation).
pub(crate) fn in_closed_triangle(p: Complex64, a: Complex64, b: Complex64, c: Complex64) -> bool {
    let d1 = orient(a, b, p);
    let d2 = orient(b, c, p);
    let d3 = orient(c, a, p);
    let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(has_neg && has_pos)
}

pub(crate) fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn point_triangle_distance(p: Complex64, a: Complex64, b: Complex64, c: Complex64) -> f64 {
    if in_closed_triangle(p, a, b, c) {
        return 0.0;
    }
    point_segment_distance(p, a, b)
        .min(point_segment_distance(p, b, c))
        .min(point_segment_distance(p, c, a))
}

pub(crate) fn shoelace(v: &[Complex64]) -> f64 {
    let n = v.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        twice += a.re * b.im - a.im * b.re;
    }
    0.5 * twice
}

/// First pair of edges `(i, j)` (edge `i` joins vertex `i` to `i + 1`) that
/// violate simplicity, if any.
fn find_crossing(v: &[Complex64]) -> Option<(usize, usize)> {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (v[j], v[(j + 1) % n]);
            let adjacent_after = j == i + 1;
            let adjacent_before = i == 0 && j == n - 1;
            if adjacent_after || adjacent_before {
                // Adjacent edges share one vertex; they may only overlap there.
                let (shared, p, q) = if adjacent_after { (b, a, d) } else { (a, b, c) };
                if orient(p, shared, q) == 0.0 {
                    // Folding back onto itself.
                    let back = ((p - shared) * (q - shared).conj()).re > 0.0;
                    if back {
                        return Some((i, j));
                    }
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Checks every polygon invariant except orientation.
fn validate(v: &[Complex64]) -> Result<()> {
    let n = v.len();
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    if let Some(i) = v.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFiniteVertex(i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if v[i] == v[j] {
                return Err(Error::DuplicateVertex(i, j));
            }
        }
    }
    for i in 0..n {
        if orient(v[(i + n - 1) % n], v[i], v[(i + 1) % n]) == 0.0 {
            return Err(Error::CollinearTriple(i));
        }
    }
    if let Some((i, j)) = find_crossing(v) {
        return Err(Error::SelfIntersecting(i, j));
    }
    Ok(())
}

/// True when vertex `i` of the counter-clockwise vertex cycle `v` is an ear:
/// strictly convex, no other vertex in the closed ear triangle, and the
/// diagonal avoids every edge not incident to its endpoints.
pub(crate) fn is_ear_in(v: &[Complex64], i: usize) -> bool {
    let n = v.len();
    if n < 3 || i >= n {
        return false;
    }
    let ip = (i + n - 1) % n;
    let inx = (i + 1) % n;
    let (a, b, c) = (v[ip], v[i], v[inx]);
    if orient(a, b, c) <= 0.0 {
        return false;
    }
    if n == 3 {
        return true;
    }
    for (j, &p) in v.iter().enumerate() {
        if j != ip && j != i && j != inx && in_closed_triangle(p, a, b, c) {
            return false;
        }
    }
    for j in 0..n {
        let k = (j + 1) % n;
        if j == ip || k == ip || j == inx || k == inx {
            continue;
        }
        if segments_intersect(a, c, v[j], v[k]) {
            return false;
        }
    }
    true
}

fn ear_clearance(v: &[Complex64], i: usize) -> f64 {
    let n = v.len();
    let ip = (i + n - 1) % n;
    let inx = (i + 1) % n;
    v.iter()
        .enumerate()
        .filter(|&(j, _)| j != ip && j != i && j != inx)
        .map(|(_, &p)| point_triangle_distance(p, v[ip], v[i], v[inx]))
        .fold(f64::INFINITY, f64::min)
}

/// Triangulates a counter-clockwise simple vertex cycle by ear clipping.
/// Straight-angle vertices are allowed here; they are dropped when no strict
/// ear remains.
pub(crate) fn triangulate(v: &[Complex64]) -> Vec<[Complex64; 3]> {
    let mut rest: Vec<Complex64> = v.to_vec();
    let mut tris = Vec::with_capacity(v.len().saturating_sub(2));
    while rest.len() > 3 {
        let n = rest.len();
        if let Some(i) = (0..n).find(|&i| is_ear_in(&rest, i)) {
            tris.push([rest[(i + n - 1) % n], rest[i], rest[(i + 1) % n]]);
            rest.remove(i);
        } else if let Some(i) = (0..n).find(|&i| orient(rest[(i + n - 1) % n], rest[i], rest[(i + 1) % n]) == 0.0) {
            rest.remove(i);
        } else {
            break;
        }
    }
    if rest.len() == 3 && orient(rest[0], rest[1], rest[2]) > 0.0 {
        tris.push([rest[0], rest[1], rest[2]]);
    }
    tris
}

impl Polygon {
    /// Validates raw vertices and orients them counter-clockwise. A clockwise
    /// input is reversed while keeping its first vertex first.
    pub fn normalize(raw: &[Complex64]) -> Result<Polygon> {
        validate(raw)?;
        let mut vertices = raw.to_vec();
        if shoelace(&vertices) < 0.0 {
            vertices[1..].reverse();
        }
        Ok(Polygon { vertices })
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area; positive because the polygon is counter-clockwise.
    pub fn signed_area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn is_ear(&self, i: usize) -> bool {
        is_ear_in(&self.vertices, i)
    }

    pub fn find_ears(&self) -> Result<EarReport> {
        let n = self.len();
        let ear_indices: Vec<usize> = (0..n).filter(|&i| self.is_ear(i)).collect();
        if ear_indices.len() < 2 {
            return Err(Error::NoTwoEars(ear_indices.len()));
        }
        let robustness = ear_indices.iter().map(|&i| ear_clearance(&self.vertices, i)).collect();
        Ok(EarReport { ear_indices, robustness })
    }

    /// Removes ear `i`. Fails if the result would have three collinear
    /// consecutive vertices.
    pub fn clip_ear(&self, i: usize) -> Result<Polygon> {
        if self.len() < 4 || !self.is_ear(i) {
            return Err(Error::NotAnEar(i));
        }
        let mut vertices = self.vertices.clone();
        vertices.remove(i);
        validate(&vertices)?;
        debug_assert!(shoelace(&vertices) > 0.0);
        Ok(Polygon { vertices })
    }

    /// The same polygon with its vertex list rotated left by `shift`.
    pub fn rotated(&self, shift: usize) -> Polygon {
        let mut vertices = self.vertices.clone();
        let n = vertices.len();
        vertices.rotate_left(shift % n);
        Polygon { vertices }
    }

    /// Euclidean distance from `p` to the boundary.
    pub fn boundary_distance(&self, p: Complex64) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| point_segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Even-odd point-in-polygon test; boundary points count as outside.
    pub fn contains(&self, p: Complex64) -> bool {
        let v = &self.vertices;
        let n = v.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            if orient(a, b, p) == 0.0 && on_segment_collinear(p, a, b) {
                return false;
            }
            if (a.im > p.im) != (b.im > p.im) {
                let x = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
                if p.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub(crate) fn triangles(&self) -> Vec<[Complex64; 3]> {
        triangulate(&self.vertices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn l_shape() -> Polygon {
        Polygon::normalize(&[c(0., 0.), c(2., 0.), c(2., 1.), c(1., 1.), c(1., 2.), c(0., 2.)]).unwrap()
    }

    #[test]
    fn keeps_ccw_and_reverses_cw() {
        let p = Polygon::normalize(&[c(0., 0.), c(1., 0.), c(0., 1.)]).unwrap();
        assert_eq!(p.vertices(), &[c(0., 0.), c(1., 0.), c(0., 1.)]);
        assert_eq!(p.signed_area(), 0.5);

        let q = Polygon::normalize(&[c(0., 0.), c(0., 1.), c(1., 0.)]).unwrap();
        assert_eq!(q.vertices(), &[c(0., 0.), c(1., 0.), c(0., 1.)]);
        assert_eq!(q.signed_area(), 0.5);
    }

    #[test]
    fn rejects_bad_input() {
        let bow = [c(0., 0.), c(2., 0.), c(1., 1.), c(1., -1.)];
        assert!(oracle::brute_force_self_intersects(&bow));
        assert!(matches!(Polygon::normalize(&bow), Err(Error::SelfIntersecting(..))));
        assert_eq!(Polygon::normalize(&[c(0., 0.), c(1., 0.)]), Err(Error::TooFewVertices(2)));
        assert_eq!(
            Polygon::normalize(&[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 1.)]),
            Err(Error::DuplicateVertex(0, 2))
        );
        assert!(matches!(
            Polygon::normalize(&[c(0., 0.), c(1., 0.), c(2., 0.), c(0., 1.)]),
            Err(Error::CollinearTriple(1))
        ));
        assert_eq!(
            Polygon::normalize(&[c(0., 0.), c(f64::NAN, 0.), c(0., 1.)]),
            Err(Error::NonFiniteVertex(1))
        );
        // A spike that doubles back along itself.
        assert!(Polygon::normalize(&[c(0., 0.), c(2., 0.), c(1., 0.), c(0., 1.)]).is_err());
    }

    #[test]
    fn area_examples() {
        let sq = Polygon::normalize(&[c(0., 0.), c(1., 0.), c(1., 1.), c(0., 1.)]).unwrap();
        assert_eq!(sq.signed_area(), 1.0);
        let rev: Vec<_> = sq.vertices().iter().rev().copied().collect();
        assert_eq!(shoelace(&rev), -1.0);
    }

    #[test]
    fn ears_of_convex_and_l_shape() {
        let sq = Polygon::normalize(&[c(0., 0.), c(1., 0.), c(1., 1.), c(0., 1.)]).unwrap();
        assert_eq!(sq.find_ears().unwrap().ear_indices, vec![0, 1, 2, 3]);
        let tri = Polygon::normalize(&[c(0., 0.), c(3., 0.), c(1., 2.)]).unwrap();
        assert_eq!(tri.find_ears().unwrap().ear_indices.len(), 3);

        let l = l_shape();
        assert!(!l.is_ear(3), "reflex corner");
        assert!(!l.is_ear(0), "ear triangle boundary passes through (1,1)");
        let ears = l.find_ears().unwrap();
        for i in 0..l.len() {
            assert_eq!(l.is_ear(i), oracle::brute_force_is_ear(l.vertices(), i), "vertex {i}");
        }
        assert_eq!(ears.ear_indices, vec![1, 2, 4, 5]);
    }

    #[test]
    fn clipping() {
        let sq = Polygon::normalize(&[c(0., 0.), c(1., 0.), c(1., 1.), c(0., 1.)]).unwrap();
        let t = sq.clip_ear(2).unwrap();
        assert_eq!(t.vertices(), &[c(0., 0.), c(1., 0.), c(0., 1.)]);

        let pent: Vec<_> = (0..5)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 5.0))
            .collect();
        let pent = Polygon::normalize(&pent).unwrap();
        for i in 0..5 {
            let q = pent.clip_ear(i).unwrap();
            assert_eq!(q.len(), 4);
            assert_eq!(q.find_ears().unwrap().ear_indices.len(), 4);
        }

        let l = l_shape();
        for &i in &l.find_ears().unwrap().ear_indices {
            let q = l.clip_ear(i).unwrap();
            assert_eq!(Polygon::normalize(q.vertices()).unwrap(), q);
        }
        assert_eq!(l.clip_ear(3), Err(Error::NotAnEar(3)));
        let tri = Polygon::normalize(&[c(0., 0.), c(1., 0.), c(0., 1.)]).unwrap();
        assert_eq!(tri.clip_ear(0), Err(Error::NotAnEar(0)));
    }

    #[test]
    fn clipping_can_create_collinear_triple() {
        // Removing (3, 2.5) leaves (2,0), (2,2), (2,4) on one line.
        let p = Polygon::normalize(&[c(0., 0.), c(2., 0.), c(2., 2.), c(3., 2.5), c(2., 4.), c(0., 4.)]).unwrap();
        assert!(p.is_ear(3));
        assert!(matches!(p.clip_ear(3), Err(Error::CollinearTriple(_))));
    }

    #[test]
    fn triangulation_covers_area() {
        let l = l_shape();
        let tris = l.triangles();
        assert_eq!(tris.len(), 4);
        let area: f64 = tris.iter().map(|t| shoelace(t)).sum();
        assert!((area - l.signed_area()).abs() < 1e-12);
    }

    #[test]
    fn containment() {
        let l = l_shape();
        assert!(l.contains(c(0.5, 1.5)));
        assert!(!l.contains(c(1.5, 1.5)));
        assert!(!l.contains(c(1.0, 0.0)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn two_ears_and_oracle_agreement(seed in any::<u64>(), n in 3usize..=12) {
            let raw = oracle::random_walk_polygon(seed, n);
            let p = Polygon::normalize(&raw).unwrap();
            let ears = p.find_ears().unwrap();
            prop_assert!(ears.ear_indices.len() >= 2);
            for i in 0..n {
                prop_assert_eq!(p.is_ear(i), oracle::brute_force_is_ear(p.vertices(), i));
            }
            for &i in &ears.ear_indices {
                if n > 3 {
                    if let Ok(q) = p.clip_ear(i) {
                        prop_assert_eq!(q.len(), n - 1);
                        let m = n;
                        let tri = [p.vertices()[(i + m - 1) % m], p.vertices()[i], p.vertices()[(i + 1) % m]];
                        let ear_area = shoelace(&tri);
                        prop_assert!(ear_area > 0.0);
                        prop_assert!((p.signed_area() - q.signed_area() - ear_area).abs() <= 1e-12 * p.signed_area().abs().max(1.0));
                    }
                }
            }
        }

        #[test]
        fn reversal_negates_area(seed in any::<u64>(), n in 3usize..=10) {
            let raw = oracle::random_walk_polygon(seed, n);
            let rev: Vec<_> = raw.iter().rev().copied().collect();
            prop_assert!((shoelace(&raw) + shoelace(&rev)).abs() < 1e-12);
            let p = Polygon::normalize(&raw).unwrap();
            let q = Polygon::normalize(&rev).unwrap();
            prop_assert!((p.signed_area() - q.signed_area()).abs() < 1e-12);
        }
    }
}
