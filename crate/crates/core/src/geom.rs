//! Small planar geometry helpers: 2D vectors, periodic lattices, polygon
//! areas, circumcenters, and convex polygon clipping.
//!
//! Everything here works on plain `[f64; 2]` points. Periodic geometry uses a
//! lattice of two independent translation vectors; the minimum-image search
//! scans the 3×3 neighbourhood around the rounded fractional displacement,
//! which is exact for any lattice as long as displacements are shorter than
//! the domain half-diameter.

use alloc::vec::Vec;

pub type Point = [f64; 2];

/// A periodic lattice spanned by two translation vectors `a1`, `a2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub a1: Point,
    pub a2: Point,
}

impl Lattice {
    pub fn new(a1: Point, a2: Point) -> Self {
        Self { a1, a2 }
    }

    /// Area of the fundamental domain, |a1 × a2|.
    pub fn domain_area(&self) -> f64 {
        cross(self.a1, self.a2).abs()
    }

    /// Fractional (lattice) coordinates of a Cartesian point.
    pub fn to_fractional(&self, p: Point) -> Point {
        let det = cross(self.a1, self.a2);
        [
            (p[0] * self.a2[1] - p[1] * self.a2[0]) / det,
            (p[1] * self.a1[0] - p[0] * self.a1[1]) / det,
        ]
    }

    /// Cartesian point from fractional coordinates.
    pub fn from_fractional(&self, f: Point) -> Point {
        [
            f[0] * self.a1[0] + f[1] * self.a2[0],
            f[0] * self.a1[1] + f[1] * self.a2[1],
        ]
    }

    /// Wrap a point into the fundamental domain (fractional coords in [0,1)).
    pub fn wrap(&self, p: Point) -> Point {
        let f = self.to_fractional(p);
        self.from_fractional([f[0] - libm::floor(f[0]), f[1] - libm::floor(f[1])])
    }

    /// Shortest displacement `to − from` under periodicity (minimum image).
    pub fn min_image(&self, from: Point, to: Point) -> Point {
        let d = sub(to, from);
        let f = self.to_fractional(d);
        let base = [round(f[0]), round(f[1])];
        let mut best = d;
        let mut best_n2 = f64::INFINITY;
        for di in -1..=1 {
            for dj in -1..=1 {
                let cand = self.from_fractional([
                    f[0] - (base[0] + di as f64),
                    f[1] - (base[1] + dj as f64),
                ]);
                let n2 = dot(cand, cand);
                if n2 < best_n2 {
                    best_n2 = n2;
                    best = cand;
                }
            }
        }
        best
    }
}

fn round(x: f64) -> f64 {
    // f64::round is not available in core; libm provides it.
    libm::round(x)
}

pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}

pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// z-component of the 3D cross product of in-plane vectors.
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn norm(a: Point) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Rotate a vector by +90° (counterclockwise).
pub fn rot_ccw(a: Point) -> Point {
    [-a[1], a[0]]
}

/// Rotate a vector by −90° (clockwise).
pub fn rot_cw(a: Point) -> Point {
    [a[1], -a[0]]
}

/// Signed area of a polygon (positive for counterclockwise orientation).
pub fn polygon_signed_area(poly: &[Point]) -> f64 {
    let mut s = 0.0;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        s += cross(p, q);
    }
    0.5 * s
}

/// Centroid of a (non-self-intersecting) polygon.
pub fn polygon_centroid(poly: &[Point]) -> Point {
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut a = 0.0;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let w = cross(p, q);
        a += w;
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    [cx / (3.0 * a), cy / (3.0 * a)]
}

/// Circumcenter of the triangle `(a, b, c)`.
///
/// Solves the two perpendicular-bisector equations; the caller is responsible
/// for non-degeneracy (our generators only produce well-shaped cells).
pub fn circumcenter(a: Point, b: Point, c: Point) -> Point {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let det = 2.0 * cross(ab, ac);
    let ab2 = dot(ab, ab);
    let ac2 = dot(ac, ac);
    let ux = (ac[1] * ab2 - ab[1] * ac2) / det;
    let uy = (ab[0] * ac2 - ac[0] * ab2) / det;
    add(a, [ux, uy])
}

/// Intersection of the convex polygons `subject` and `clip` (both CCW),
/// computed with the Sutherland–Hodgman algorithm. Returns the clipped
/// polygon, possibly empty.
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = subject.to_vec();
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let edge = sub(b, a);
        let input = out;
        out = Vec::with_capacity(input.len() + 2);
        for j in 0..input.len() {
            let p = input[j];
            let q = input[(j + 1) % input.len()];
            // Signed distances from the clip edge (positive = inside for CCW).
            let dp = cross(edge, sub(p, a));
            let dq = cross(edge, sub(q, a));
            if dp >= 0.0 {
                out.push(p);
            }
            if (dp > 0.0 && dq < 0.0) || (dp < 0.0 && dq > 0.0) {
                let t = dp / (dp - dq);
                out.push(add(p, scale(sub(q, p), t)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_image_square_lattice() {
        let lat = Lattice::new([4.0, 0.0], [0.0, 4.0]);
        let d = lat.min_image([3.5, 0.5], [0.5, 3.5]);
        assert_eq!(d, [1.0, -1.0]);
    }

    #[test]
    fn min_image_rhombic_lattice() {
        let h = 3.0_f64.sqrt() / 2.0;
        let lat = Lattice::new([3.0, 0.0], [1.5, 3.0 * h]);
        // Displacement of one lattice step must be its own minimum image.
        let d = lat.min_image([0.0, 0.0], [1.0, 0.0]);
        assert!((d[0] - 1.0).abs() < 1e-15 && d[1].abs() < 1e-15);
    }

    #[test]
    fn circumcenter_of_right_triangle() {
        let cc = circumcenter([0.0, 0.0], [2.0, 0.0], [0.0, 2.0]);
        assert_eq!(cc, [1.0, 1.0]);
    }

    #[test]
    fn clip_unit_squares_overlap() {
        let a = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let b = [[0.5, 0.5], [1.5, 0.5], [1.5, 1.5], [0.5, 1.5]];
        let c = clip_convex(&a, &b);
        assert!((polygon_signed_area(&c) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn clip_disjoint_is_empty() {
        let a = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let b = [[2.0, 2.0], [3.0, 2.0], [3.0, 3.0], [2.0, 3.0]];
        let c = clip_convex(&a, &b);
        assert!(polygon_signed_area(&c).abs() < 1e-15);
    }
}
