//! Cochains: discrete k-forms on the straight or twisted grid.
//!
//! A cochain assigns one real number to every oriented k-cell. Edge
//! cochains additionally carry a *flavor*: a `Circulation` value is the
//! tangential line integral of a vector field (a 1-form), a `Flux` value is
//! the normal line integral (an (n−1)-form). The two flavors transform
//! differently and are never mixed implicitly; the single sanctioned
//! conversion point is [`reinterpret_flavor`].
//!
//! Analytic fields are *reduced* to cochains by point evaluation (k = 0),
//! 4-point Gauss–Legendre line quadrature (k = 1), or a degree-4 triangle
//! rule on a centroid fan (k = 2). The quadrature orders are chosen so that
//! reduction error (≥ 4th order) never limits the 2nd-order operator
//! convergence measured by the harness.

use alloc::string::String;
use alloc::vec::Vec;

use crate::geom::{self, Point};
use crate::mesh::MeshPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grid {
    Straight,
    Twisted,
}

impl Grid {
    pub fn opposite(self) -> Grid {
        match self {
            Grid::Straight => Grid::Twisted,
            Grid::Twisted => Grid::Straight,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// 1-form: tangential integral along the edge.
    Circulation,
    /// (n−1)-form: normal integral across the edge.
    Flux,
}

impl Flavor {
    pub fn opposite(self) -> Flavor {
        match self {
            Flavor::Circulation => Flavor::Flux,
            Flavor::Flux => Flavor::Circulation,
        }
    }
}

/// Full type tag of a cochain: degree, grid, and (for k = 1) flavor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CochainType {
    pub degree: u8,
    pub grid: Grid,
    /// Present iff degree == 1.
    pub flavor: Option<Flavor>,
}

impl CochainType {
    pub const fn scalar(degree: u8, grid: Grid) -> Self {
        Self { degree, grid, flavor: None }
    }

    pub const fn edge(grid: Grid, flavor: Flavor) -> Self {
        Self { degree: 1, grid, flavor: Some(flavor) }
    }

    /// Number of k-cells of this type on `mesh` (twisted counts follow from
    /// duality: |ṽ| = |c|, |ẽ| = |e|, |c̃| = |v|).
    pub fn len_on(&self, mesh: &MeshPair) -> usize {
        let t = &mesh.topology;
        match (self.degree, self.grid) {
            (0, Grid::Straight) => t.n_vertices,
            (1, _) => t.n_edges,
            (2, Grid::Straight) => t.n_cells,
            (0, Grid::Twisted) => t.n_cells,
            (2, Grid::Twisted) => t.n_vertices,
            _ => panic!("degree out of range"),
        }
    }

    fn well_formed(&self) -> bool {
        self.degree <= 2 && (self.flavor.is_some() == (self.degree == 1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub ctype: CochainType,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CochainError {
    WrongDegree(String),
    LengthMismatch { expected: usize, got: usize },
    /// Degree/grid/flavor combination rejected by an operation.
    PairingTypeError(String),
    UnsupportedScaling(CochainType),
    MalformedType(CochainType),
}

impl core::fmt::Display for CochainError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CochainError::WrongDegree(m) => write!(f, "wrong degree: {m}"),
            CochainError::LengthMismatch { expected, got } => {
                write!(f, "value vector has length {got}, mesh expects {expected}")
            }
            CochainError::PairingTypeError(m) => write!(f, "pairing type error: {m}"),
            CochainError::UnsupportedScaling(t) => write!(f, "no DOF scaling defined for {t:?}"),
            CochainError::MalformedType(t) => write!(f, "malformed cochain type {t:?}"),
        }
    }
}

impl core::error::Error for CochainError {}

impl Cochain {
    pub fn new(mesh: &MeshPair, ctype: CochainType, values: Vec<f64>) -> Result<Self, CochainError> {
        if !ctype.well_formed() {
            return Err(CochainError::MalformedType(ctype));
        }
        let expected = ctype.len_on(mesh);
        if values.len() != expected {
            return Err(CochainError::LengthMismatch { expected, got: values.len() });
        }
        Ok(Self { ctype, values })
    }

    pub fn zeros(mesh: &MeshPair, ctype: CochainType) -> Self {
        Self { ctype, values: alloc::vec![0.0; ctype.len_on(mesh)] }
    }

    pub fn constant(mesh: &MeshPair, ctype: CochainType, value: f64) -> Self {
        Self { ctype, values: alloc::vec![value; ctype.len_on(mesh)] }
    }

    /// Elementwise a + s·b (types must match).
    pub fn axpy(&self, s: f64, b: &Cochain) -> Cochain {
        assert_eq!(self.ctype, b.ctype, "cochain type mismatch");
        assert_eq!(self.values.len(), b.values.len());
        Cochain {
            ctype: self.ctype,
            values: self
                .values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| x + s * y)
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Cochain {
        Cochain { ctype: self.ctype, values: self.values.iter().map(|x| x * s).collect() }
    }

    /// Max-norm of the values.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| if v.abs() > m { v.abs() } else { m })
    }
}

/// Toggle the flavor of an edge cochain; values are unchanged bit-for-bit.
///
/// This is the single documented coercion point between 1-forms and
/// (n−1)-forms, used where a circulation (e.g. `D̄1 q̃⁰`) feeds an operator
/// expecting a flux.
pub fn reinterpret_flavor(c: &Cochain) -> Result<Cochain, CochainError> {
    let flavor = c
        .ctype
        .flavor
        .ok_or_else(|| CochainError::WrongDegree(String::from("reinterpret_flavor needs k = 1")))?;
    Ok(Cochain {
        ctype: CochainType::edge(c.ctype.grid, flavor.opposite()),
        values: c.values.clone(),
    })
}

// --- Quadrature rules -----------------------------------------------------

/// 4-point Gauss–Legendre nodes/weights on [0, 1] (degree 7).
const GAUSS4: [(f64, f64); 4] = [
    (0.5 - 0.5 * 0.339_981_043_584_856_3, 0.326_072_577_431_273_1),
    (0.5 + 0.5 * 0.339_981_043_584_856_3, 0.326_072_577_431_273_1),
    (0.5 - 0.5 * 0.861_136_311_594_052_6, 0.173_927_422_568_726_9),
    (0.5 + 0.5 * 0.861_136_311_594_052_6, 0.173_927_422_568_726_9),
];

/// 6-point Dunavant rule on the reference triangle (degree 4). Barycentric
/// coordinates and weights (weights sum to 1).
const TRI6: [([f64; 3], f64); 6] = [
    ([0.108_103_018_168_070_2, 0.445_948_490_915_964_9, 0.445_948_490_915_964_9], 0.223_381_589_678_011_3),
    ([0.445_948_490_915_964_9, 0.108_103_018_168_070_2, 0.445_948_490_915_964_9], 0.223_381_589_678_011_3),
    ([0.445_948_490_915_964_9, 0.445_948_490_915_964_9, 0.108_103_018_168_070_2], 0.223_381_589_678_011_3),
    ([0.816_847_572_980_458_7, 0.091_576_213_509_770_7, 0.091_576_213_509_770_7], 0.109_951_743_655_321_9),
    ([0.091_576_213_509_770_7, 0.816_847_572_980_458_7, 0.091_576_213_509_770_7], 0.109_951_743_655_321_9),
    ([0.091_576_213_509_770_7, 0.091_576_213_509_770_7, 0.816_847_572_980_458_7], 0.109_951_743_655_321_9),
];

/// ∫∫ f over a polygon given by absolute points (centroid fan + TRI6).
fn integrate_polygon(poly_abs: &[Point], f: &mut impl FnMut(f64, f64) -> f64) -> f64 {
    let centroid = geom::polygon_centroid(poly_abs);
    let mut total = 0.0;
    for i in 0..poly_abs.len() {
        let a = poly_abs[i];
        let b = poly_abs[(i + 1) % poly_abs.len()];
        let area = 0.5 * geom::cross(geom::sub(a, centroid), geom::sub(b, centroid));
        for (bary, w) in TRI6 {
            let p = [
                bary[0] * centroid[0] + bary[1] * a[0] + bary[2] * b[0],
                bary[0] * centroid[1] + bary[1] * a[1] + bary[2] * b[1],
            ];
            total += w * area * f(p[0], p[1]);
        }
    }
    total
}

/// ∫ X(p)·dir along the segment start + t·dir, t ∈ [0,1].
fn integrate_segment(start: Point, dir: Point, x: &mut impl FnMut(f64, f64) -> Point) -> f64 {
    let mut total = 0.0;
    for (t, w) in GAUSS4 {
        let p = geom::add(start, geom::scale(dir, t));
        total += w * geom::dot(x(p[0], p[1]), dir);
    }
    total
}

// --- Reduction ------------------------------------------------------------

/// Reduce a scalar analytic field to a k-cochain (k ∈ {0, 2}).
///
/// k = 0: point evaluation at (twisted) vertices; k = 2: area integral over
/// (twisted) cells.
pub fn reduce_scalar(
    mesh: &MeshPair,
    mut f: impl FnMut(f64, f64) -> f64,
    degree: u8,
    grid: Grid,
) -> Result<Cochain, CochainError> {
    let ctype = CochainType::scalar(degree, grid);
    let values = match (degree, grid) {
        (0, Grid::Straight) => mesh.geometry.vertex_pos.iter().map(|p| f(p[0], p[1])).collect(),
        (0, Grid::Twisted) => mesh.geometry.tvert_pos.iter().map(|p| f(p[0], p[1])).collect(),
        (2, Grid::Straight) => (0..mesh.topology.n_cells)
            .map(|c| {
                let anchor = mesh.geometry.vertex_pos[mesh.topology.cell_vertices[c][0]];
                let poly: Vec<Point> =
                    mesh.geometry.cell_poly[c].iter().map(|&p| geom::add(anchor, p)).collect();
                integrate_polygon(&poly, &mut f)
            })
            .collect(),
        (2, Grid::Twisted) => (0..mesh.topology.n_vertices)
            .map(|v| {
                let anchor = mesh.geometry.vertex_pos[v];
                let poly: Vec<Point> =
                    mesh.geometry.tcell_poly[v].iter().map(|&p| geom::add(anchor, p)).collect();
                integrate_polygon(&poly, &mut f)
            })
            .collect(),
        (1, _) => {
            return Err(CochainError::WrongDegree(String::from(
                "reduce_scalar handles k in {0,2}; use reduce_vector for k = 1",
            )))
        }
        _ => return Err(CochainError::MalformedType(ctype)),
    };
    Ok(Cochain { ctype, values })
}

/// Reduce a vector analytic field to an edge cochain of the given flavor.
///
/// Straight circulation integrates X·t̂ along e; straight flux X·n̂ with
/// n̂ = t̂ rotated −90°. Twisted circulation integrates X·ŝ along ẽ;
/// twisted flux X·m̂ with m̂ = ŝ rotated −90° (= t̂ on orthogonal meshes).
pub fn reduce_vector(
    mesh: &MeshPair,
    mut x: impl FnMut(f64, f64) -> Point,
    flavor: Flavor,
    grid: Grid,
) -> Cochain {
    let topo = &mesh.topology;
    let geo = &mesh.geometry;
    let values = (0..topo.n_edges)
        .map(|e| {
            let (start, along) = match grid {
                Grid::Straight => (geo.vertex_pos[topo.edge_vertices[e][0]], geo.edge_vec[e]),
                Grid::Twisted => (geo.tvert_pos[topo.edge_cells[e][0]], geo.tedge_vec[e]),
            };
            match flavor {
                Flavor::Circulation => integrate_segment(start, along, &mut x),
                Flavor::Flux => {
                    // ∫ X·n̂ ds with n̂ ⊥ direction of travel: rotate the
                    // integrand direction instead of the path.
                    let mut rotated = |px: f64, py: f64| geom::rot_ccw(x(px, py));
                    integrate_segment(start, along, &mut rotated)
                }
            }
        })
        .collect();
    Cochain { ctype: CochainType::edge(grid, flavor), values }
}

// --- Degree-of-freedom scaling -------------------------------------------

/// Size of the k-cell carrying index `i` for a scalable cochain type.
fn dof_scale(mesh: &MeshPair, ctype: CochainType, i: usize) -> Option<f64> {
    match (ctype.degree, ctype.grid, ctype.flavor) {
        (0, _, None) => Some(1.0),
        (1, Grid::Straight, Some(Flavor::Circulation)) => Some(mesh.geometry.edge_len[i]),
        (1, Grid::Twisted, Some(Flavor::Flux)) => Some(mesh.geometry.tedge_len[i]),
        (2, Grid::Straight, None) => Some(mesh.geometry.cell_area[i]),
        (2, Grid::Twisted, None) => Some(mesh.geometry.tcell_area[i]),
        _ => None,
    }
}

/// Turn pointwise values into integrated cochain DOFs (multiply by cell
/// size): height points × A_c̃ → h̃², velocity points × A_e → u¹.
pub fn scale_dofs(
    mesh: &MeshPair,
    point_values: &[f64],
    ctype: CochainType,
) -> Result<Cochain, CochainError> {
    let expected = ctype.len_on(mesh);
    if point_values.len() != expected {
        return Err(CochainError::LengthMismatch { expected, got: point_values.len() });
    }
    let values = point_values
        .iter()
        .enumerate()
        .map(|(i, &v)| dof_scale(mesh, ctype, i).map(|s| v * s))
        .collect::<Option<Vec<f64>>>()
        .ok_or(CochainError::UnsupportedScaling(ctype))?;
    Ok(Cochain { ctype, values })
}

/// Inverse of [`scale_dofs`]: integrated DOFs back to pointwise values.
pub fn unscale_dofs(mesh: &MeshPair, c: &Cochain) -> Result<Vec<f64>, CochainError> {
    c.values
        .iter()
        .enumerate()
        .map(|(i, &v)| dof_scale(mesh, c.ctype, i).map(|s| v / s))
        .collect::<Option<Vec<f64>>>()
        .ok_or(CochainError::UnsupportedScaling(c.ctype))
}

// --- Topological pairing --------------------------------------------------

/// The metric-free duality pairing ⟨⟨a, b⟩⟩.
///
/// Defined for complementary degrees (k and n−k) on opposite grids, with
/// complementary flavors for edge cochains:
/// ⟨⟨x^k, ỹ^{n−k}⟩⟩ = xᵀỹ and ⟨⟨x̃^k, y^{n−k}⟩⟩ = (−1)^{k(n−k)} x̃ᵀy,
/// where the sign is −1 only for k = 1 in 2D.
pub fn topological_pairing(a: &Cochain, b: &Cochain) -> Result<f64, CochainError> {
    let ta = a.ctype;
    let tb = b.ctype;
    if ta.degree + tb.degree != 2 || ta.grid == tb.grid {
        return Err(CochainError::PairingTypeError(alloc::format!(
            "need complementary degrees on opposite grids, got {ta:?} vs {tb:?}"
        )));
    }
    if let (Some(fa), Some(fb)) = (ta.flavor, tb.flavor) {
        if fa == fb {
            return Err(CochainError::PairingTypeError(String::from(
                "edge pairing needs complementary flavors (circulation with flux)",
            )));
        }
    }
    if a.values.len() != b.values.len() {
        return Err(CochainError::LengthMismatch { expected: a.values.len(), got: b.values.len() });
    }
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    // Sign (−1)^{k(n−k)} applies when the *first* argument is twisted.
    let sign = if ta.grid == Grid::Twisted && ta.degree == 1 { -1.0 } else { 1.0 };
    Ok(sign * dot)
}
