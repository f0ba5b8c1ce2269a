//! Eigenvalue counting on staircase horn domains.
//!
//! A *simple* horn is the interior of `⋃ₖ [aₖ, aₖ₊₁] × [0, bₖ]` with
//! non-increasing heights `bₖ → 0` and widths `f(k) = aₖ₊₁ − aₖ` bounded
//! below. Its Dirichlet Laplacian has discrete spectrum even when the area is
//! infinite. This crate computes:
//!
//! * exact lattice counts on single rectangles and cuboids ([`rect`]),
//! * Dirichlet / mixed Dirichlet–Neumann brackets of the global counting
//!   function ([`bracket`]),
//! * the spectral core `Q(E)`, its geometry and the volume / perimeter /
//!   lattice-remainder split of the counting function ([`core_geometry`]),
//! * a finite-difference cross-check on truncated staircases ([`fd`]).
//!
//! Everything numeric is generic over [`Real`] (`f32`, `f64`); the aliases
//! below fix the double-precision instantiation used by the command-line tool.

pub mod bracket;
pub mod core_geometry;
pub mod domain;
pub mod error;
pub mod fd;
pub mod rect;
mod scalar;
mod zeta;

pub use bracket::{bracket, lower_count, upper_count, BracketResult};
pub use core_geometry::{
    core_stats, donnelly_core_stats, fit_growth, n_of_e, weyl_decomposition, ErosionEstimate,
    GrowthFit, PerimeterConvention, SpectralCore, WeylDecomposition,
};
pub use domain::{
    eval_sequence, validate_domain, Check, DomainSpec, SequenceSpec, SimpleDomain, Summability,
    ValidationReport,
};
pub use error::{Error, Result};
pub use rect::{
    count_dirichlet_box, count_dirichlet_cuboid, count_mixed_box, eigens_below, gauss_error,
    rect_gap, BoundaryKind, BoxSpec, CuboidSpec, GaussError,
};
pub use scalar::Real;

pub type SimpleDomainF64 = SimpleDomain<f64>;
pub type SimpleDomainF32 = SimpleDomain<f32>;
pub type SequenceSpecF64 = SequenceSpec<f64>;
pub type BoxSpecF64 = BoxSpec<f64>;
pub type BoxSpecF32 = BoxSpec<f32>;
pub type CuboidSpecF64 = CuboidSpec<f64>;
pub type BracketResultF64 = BracketResult<f64>;
pub type SpectralCoreF64 = SpectralCore<f64>;
pub type WeylDecompositionF64 = WeylDecomposition<f64>;
pub type GrowthFitF64 = GrowthFit<f64>;
