//! Lattice-periodic trigonometric test fields with analytic derivatives.
//!
//! Every field is a sum of plane waves `amp · sin(2π(kx ξ1 + ky ξ2) + phase)`
//! in the fractional coordinates `ξ` of the mesh lattice, so it is exactly
//! periodic on any doubly periodic domain (square or rhombic). Gradients and
//! Laplacians follow from the reciprocal lattice vectors.

use swede_core::geom::{self, Lattice, Point};

const TAU: f64 = core::f64::consts::TAU;

#[derive(Clone, Copy, Debug)]
pub struct Wave {
    pub kx: i32,
    pub ky: i32,
    pub amp: f64,
    pub phase: f64,
}

/// A periodic scalar field Σ waves.
#[derive(Clone, Debug)]
pub struct TrigScalar {
    lattice: Lattice,
    /// Reciprocal lattice vectors b1, b2 (bi · aj = δij).
    recip: [Point; 2],
    pub waves: Vec<Wave>,
}

impl TrigScalar {
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn new(lattice: Lattice, waves: Vec<Wave>) -> Self {
        let det = geom::cross(lattice.a1, lattice.a2);
        let b1 = [lattice.a2[1] / det, -lattice.a2[0] / det];
        let b2 = [-lattice.a1[1] / det, lattice.a1[0] / det];
        Self { lattice, recip: [b1, b2], waves }
    }

    /// The wave vector 2π(kx b1 + ky b2) of one term.
    fn kvec(&self, w: &Wave) -> Point {
        geom::scale(
            geom::add(
                geom::scale(self.recip[0], w.kx as f64),
                geom::scale(self.recip[1], w.ky as f64),
            ),
            TAU,
        )
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        let xi = self.lattice.to_fractional([x, y]);
        self.waves
            .iter()
            .map(|w| w.amp * (TAU * (w.kx as f64 * xi[0] + w.ky as f64 * xi[1]) + w.phase).sin())
            .sum()
    }

    pub fn grad(&self, x: f64, y: f64) -> Point {
        let xi = self.lattice.to_fractional([x, y]);
        let mut g = [0.0, 0.0];
        for w in &self.waves {
            let theta = TAU * (w.kx as f64 * xi[0] + w.ky as f64 * xi[1]) + w.phase;
            let k = self.kvec(w);
            g = geom::add(g, geom::scale(k, w.amp * theta.cos()));
        }
        g
    }

    pub fn laplacian(&self, x: f64, y: f64) -> f64 {
        let xi = self.lattice.to_fractional([x, y]);
        self.waves
            .iter()
            .map(|w| {
                let theta = TAU * (w.kx as f64 * xi[0] + w.ky as f64 * xi[1]) + w.phase;
                let k = self.kvec(w);
                -geom::dot(k, k) * w.amp * theta.sin()
            })
            .sum()
    }
}

/// A periodic vector field X = ∇⊥ψ + ∇φ (Helmholtz form), so that
/// ∇·X = Δφ and ∇⊥·X (the scalar curl) = Δψ analytically.
#[derive(Clone, Debug)]
pub struct TrigVector {
    pub psi: TrigScalar,
    pub phi: TrigScalar,
}

impl TrigVector {
    pub fn value(&self, x: f64, y: f64) -> Point {
        geom::add(geom::rot_ccw(self.psi.grad(x, y)), self.phi.grad(x, y))
    }

    pub fn div(&self, x: f64, y: f64) -> f64 {
        self.phi.laplacian(x, y)
    }

    pub fn curl(&self, x: f64, y: f64) -> f64 {
        self.psi.laplacian(x, y)
    }
}

/// Default smooth scalar used by the convergence study.
pub fn default_scalar(lattice: Lattice) -> TrigScalar {
    TrigScalar::new(
        lattice,
        vec![
            Wave { kx: 1, ky: 0, amp: 1.0, phase: 0.3 },
            Wave { kx: 0, ky: 1, amp: 0.7, phase: 1.1 },
            Wave { kx: 1, ky: 1, amp: 0.4, phase: -0.5 },
        ],
    )
}

/// Default smooth vector field (both solenoidal and divergent parts).
pub fn default_vector(lattice: Lattice) -> TrigVector {
    TrigVector {
        psi: TrigScalar::new(
            lattice,
            vec![
                Wave { kx: 1, ky: 0, amp: 0.9, phase: 0.2 },
                Wave { kx: 1, ky: 1, amp: 0.5, phase: 0.9 },
            ],
        ),
        phi: TrigScalar::new(
            lattice,
            vec![
                Wave { kx: 0, ky: 1, amp: 0.8, phase: -0.4 },
                Wave { kx: 1, ky: -1, amp: 0.3, phase: 0.6 },
            ],
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_on_skew_lattice() {
        let lat = Lattice::new([4.0, 0.0], [2.0, 3.4641016151377544]);
        let f = default_scalar(lat);
        let v = default_vector(lat);
        let p = [0.37, 1.21];
        for shift in [lat.a1, lat.a2, geom::add(lat.a1, lat.a2)] {
            let q = geom::add(p, shift);
            assert!((f.value(p[0], p[1]) - f.value(q[0], q[1])).abs() < 1e-12);
            let a = v.value(p[0], p[1]);
            let b = v.value(q[0], q[1]);
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let lat = Lattice::new([3.0, 0.0], [0.0, 3.0]);
        let f = default_scalar(lat);
        let v = default_vector(lat);
        let (x, y) = (0.71, 2.13);
        let eps = 1e-6;
        let gx = (f.value(x + eps, y) - f.value(x - eps, y)) / (2.0 * eps);
        let gy = (f.value(x, y + eps) - f.value(x, y - eps)) / (2.0 * eps);
        let g = f.grad(x, y);
        assert!((g[0] - gx).abs() < 1e-8 && (g[1] - gy).abs() < 1e-8);

        let div_fd = (v.value(x + eps, y)[0] - v.value(x - eps, y)[0]) / (2.0 * eps)
            + (v.value(x, y + eps)[1] - v.value(x, y - eps)[1]) / (2.0 * eps);
        assert!((v.div(x, y) - div_fd).abs() < 1e-7);

        let curl_fd = (v.value(x + eps, y)[1] - v.value(x - eps, y)[1]) / (2.0 * eps)
            - (v.value(x, y + eps)[0] - v.value(x, y - eps)[0]) / (2.0 * eps);
        assert!((v.curl(x, y) - curl_fd).abs() < 1e-7);
    }
}
