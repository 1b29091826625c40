//! A 2D discrete exterior calculus (DEC) engine and structure-preserving
//! rotating-shallow-water solver on doubly periodic straight/twisted dual
//! meshes.
//!
//! The crate is organised around a small set of concepts:
//!
//! * [`mesh`] — dual cell complexes: a *straight* (inner-oriented) grid and a
//!   *twisted* (outer-oriented) Voronoi dual, with orientation coefficients,
//!   sizes, and overlap areas. Generators for doubly periodic quadrilateral
//!   and triangular/hexagonal meshes are provided.
//! * [`cochain`] — discrete k-forms: one real value per oriented k-cell,
//!   tagged with degree, grid, and (for edge cochains) a *flavor*
//!   distinguishing 1-forms (circulation) from (n−1)-forms (flux).
//! * [`dec_ops`] — exterior derivatives as coboundary matrices, diagonal
//!   (Voronoi) Hodge stars with their signed inverses, inner products, and
//!   the metric-free topological pairing.
//! * [`wedge`] — discrete wedge products: the PV averaging operator `R`, the
//!   antisymmetric tangential reconstruction `W`, the four potential
//!   vorticity flux variants (TE/PE/DBL/ACCUR), and the kinetic energy wedge
//!   `T` with its mass-flux adjoints.
//! * [`swe_core`] — the discrete Hamiltonian, functional derivatives,
//!   Poisson-bracket tendencies, PV diagnosis, linearized model, and
//!   conservation-rate diagnostics.
//! * [`timestep`] — classical RK4 and fixed-point implicit midpoint
//!   integrators.
//!
//! The core is `no_std` (with `alloc`); all file formats, CLI plumbing, and
//! verification drivers live in the companion `swede-cli` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cochain;
pub mod dec_ops;
pub mod geom;
pub mod mesh;
pub mod sparse;
pub mod swe_core;
pub mod timestep;
pub mod wedge;
