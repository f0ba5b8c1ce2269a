//! Closed-form spectra of single rectangles and cuboids.
//!
//! Every count here is the number of lattice points satisfying one fixed
//! floating-point predicate,
//!
//! ```text
//! (l/w)² + (m/h)² ≤ E/π²
//! ```
//!
//! with the squares added in a canonical order. Floors are only used as
//! starting guesses and are then corrected against the predicate, so ties
//! `λ = E` are counted and the identities between counts (gap, symmetry,
//! d = 2 cuboid vs. box) hold exactly, not just up to rounding.

use crate::error::{check_energy, Error, Result};
use crate::scalar::Real;

/// Largest supported cuboid dimension.
pub const MAX_CUBOID_DIM: usize = 4;

/// Default cap on the length of [`eigens_below`] results.
pub const DEFAULT_EIGEN_CAP: usize = 1 << 22;

/// Axis-aligned rectangle `[0, width] × [0, height]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxSpec<T> {
    pub width: T,
    pub height: T,
}

impl<T: Real> BoxSpec<T> {
    pub fn new(width: T, height: T) -> Result<Self> {
        if !(width > T::zero() && width.is_finite() && height > T::zero() && height.is_finite()) {
            return Err(Error::Geometry(format!(
                "box sides must be positive, got {width} x {height}"
            )));
        }
        Ok(Self { width, height })
    }

    pub fn area(&self) -> T {
        self.width * self.height
    }

    pub fn perimeter(&self) -> T {
        (self.width + self.height) * T::lit(2.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CuboidSpec<T> {
    sides: Vec<T>,
}

impl<T: Real> CuboidSpec<T> {
    pub fn new(sides: Vec<T>) -> Result<Self> {
        if sides.is_empty() || sides.len() > MAX_CUBOID_DIM {
            return Err(Error::Dimension {
                dim: sides.len(),
                max: MAX_CUBOID_DIM,
            });
        }
        if let Some(s) = sides.iter().find(|s| !(**s > T::zero() && s.is_finite())) {
            return Err(Error::Geometry(format!(
                "cuboid sides must be positive, got {s}"
            )));
        }
        Ok(Self { sides })
    }

    pub fn sides(&self) -> &[T] {
        &self.sides
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Dirichlet on all four sides.
    Dirichlet,
    /// Dirichlet on the horizontal sides, Neumann on the vertical ones.
    Mixed,
}

/// Per-box lattice remainder.
///
/// `remainder` is the exact
/// `ρ(E) = N(E) − vol₂·E/(4π) + vol₁(∂)·√E/(4π)`, and `normalized` is
/// `ρ/vol₂`, the per-area error whose area-weighted sum over a core gives the
/// oscillating term of the counting function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussError<T> {
    pub count: u64,
    /// `¼ · π · (√E/π)²`
    pub disc_quarter_area: T,
    /// Area of the dual lattice cell, `1/(width · height)`.
    pub cell_area: T,
    pub remainder: T,
    pub normalized: T,
}

fn sq<T: Real>(x: T) -> T {
    x * x
}

fn threshold<T: Real>(e: T) -> T {
    e / T::pi_squared()
}

/// Largest `j ≥ 0` with `base + (j/side)² ≤ thr`, starting from the analytic guess.
fn last_index<T: Real>(base: T, side: T, thr: T) -> u64 {
    let holds = |j: u64| base + sq(T::from_u64_lossy(j) / side) <= thr;
    let room = thr - base;
    let mut j = if room > T::zero() {
        (side * room.sqrt()).floor().to_u64().unwrap_or(0)
    } else {
        0
    };
    while holds(j + 1) {
        j += 1;
    }
    while j > 0 && !holds(j) {
        j -= 1;
    }
    j
}

/// Counts `(i, j)` with `(i/outer)² + (j/inner)² ≤ thr`, iterating rows over `i`.
fn count_lattice<T: Real>(
    outer: T,
    inner: T,
    thr: T,
    outer_from_zero: bool,
    inner_from_zero: bool,
) -> u64 {
    let mut total = 0u64;
    let mut i = u64::from(!outer_from_zero);
    loop {
        let base = sq(T::from_u64_lossy(i) / outer);
        if base > thr {
            break;
        }
        let row = last_index(base, inner, thr) + u64::from(inner_from_zero);
        if row == 0 {
            break;
        }
        total += row;
        i += 1;
    }
    total
}

/// `#{(l, m) ∈ ℕ², l, m ≥ 1 : π²l²/w² + π²m²/h² ≤ E}`.
///
/// Rows run over the index of the shorter side, so the cost is
/// `O(1 + √E · min(w, h))`.
pub fn count_dirichlet_box<T: Real>(b: &BoxSpec<T>, e: T) -> Result<u64> {
    check_energy(e)?;
    let thr = threshold(e);
    Ok(if b.width <= b.height {
        count_lattice(b.width, b.height, thr, false, false)
    } else {
        count_lattice(b.height, b.width, thr, false, false)
    })
}

/// Same as [`count_dirichlet_box`] with `l ≥ 0` (Neumann on the vertical sides).
pub fn count_mixed_box<T: Real>(b: &BoxSpec<T>, e: T) -> Result<u64> {
    check_energy(e)?;
    let thr = threshold(e);
    Ok(if b.width <= b.height {
        count_lattice(b.width, b.height, thr, true, false)
    } else {
        count_lattice(b.height, b.width, thr, false, true)
    })
}

/// `⌊√E · height / π⌋`, the number of `m ≥ 1` with `π²m²/height² ≤ E`.
///
/// Equals `count_mixed_box − count_dirichlet_box` for every box of this height.
pub fn rect_gap<T: Real>(height: T, e: T) -> Result<u64> {
    check_energy(e)?;
    Ok(last_index(T::zero(), height, threshold(e)))
}

/// All eigenvalues `≤ E` with multiplicity, ascending.
///
/// Fails with [`Error::Capacity`] instead of allocating more than `cap` values.
pub fn eigens_below<T: Real>(
    b: &BoxSpec<T>,
    e: T,
    kind: BoundaryKind,
    cap: usize,
) -> Result<Vec<T>> {
    let count = match kind {
        BoundaryKind::Dirichlet => count_dirichlet_box(b, e)?,
        BoundaryKind::Mixed => count_mixed_box(b, e)?,
    };
    if count > cap as u64 {
        return Err(Error::Capacity(format!(
            "{count} eigenvalues below {e} exceed the cap of {cap}"
        )));
    }
    let thr = threshold(e);
    let pi2 = T::pi_squared();
    let l_start = u64::from(kind == BoundaryKind::Dirichlet);
    let mut out = Vec::with_capacity(count as usize);
    let mut l = l_start;
    loop {
        let sl = sq(T::from_u64_lossy(l) / b.width);
        let m_max = last_index(sl, b.height, thr);
        if m_max == 0 {
            break;
        }
        out.extend((1..=m_max).map(|m| pi2 * (sl + sq(T::from_u64_lossy(m) / b.height))));
        l += 1;
    }
    out.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    debug_assert_eq!(out.len() as u64, count);
    Ok(out)
}

/// Exact lattice remainder of the Dirichlet count on one box.
pub fn gauss_error<T: Real>(b: &BoxSpec<T>, e: T) -> Result<GaussError<T>> {
    let count = count_dirichlet_box(b, e)?;
    let four_pi = T::lit(4.0) * T::PI();
    let area = b.area();
    let volume_term = area * e / four_pi;
    let perimeter_term = b.perimeter() * e.sqrt() / four_pi;
    let remainder = T::from_u64_lossy(count) - volume_term + perimeter_term;
    Ok(GaussError {
        count,
        disc_quarter_area: e / four_pi,
        cell_area: area.recip(),
        remainder,
        normalized: remainder / area,
    })
}

/// `#{m ∈ ℕ^d, mᵢ ≥ 1 : π² Σ mᵢ²/sideᵢ² ≤ E}`.
///
/// Sides are visited shortest first; the innermost (longest) side is counted
/// in closed form. Sums that overflow `u64` are a [`Error::Capacity`] error.
pub fn count_dirichlet_cuboid<T: Real>(c: &CuboidSpec<T>, e: T) -> Result<u64> {
    check_energy(e)?;
    let mut sides = c.sides().to_vec();
    sides.sort_by(|x, y| x.partial_cmp(y).expect("sides are finite"));
    // The count is bounded by the volume of the positive orthant of the
    // ellipsoid; refuse anything that could not be enumerated in u64.
    let radius = e.sqrt() / T::PI();
    let unit_ball = [
        2.0,
        std::f64::consts::PI,
        4.0 * std::f64::consts::PI / 3.0,
        std::f64::consts::PI.powi(2) / 2.0,
    ];
    let orthant = sides
        .iter()
        .fold(T::lit(unit_ball[sides.len() - 1]), |v, &s| {
            v * s * radius / T::lit(2.0)
        });
    if orthant.to_f64().is_none_or(|v| v >= u64::MAX as f64) {
        return Err(Error::Capacity(format!(
            "cuboid count near {orthant:e} overflows u64"
        )));
    }
    cuboid_rec(&sides, T::zero(), threshold(e))
}

fn cuboid_rec<T: Real>(sides: &[T], acc: T, thr: T) -> Result<u64> {
    let (&first, rest) = sides.split_first().expect("non-empty side list");
    if rest.is_empty() {
        return Ok(last_index(acc, first, thr));
    }
    let mut total = 0u64;
    for m in 1u64.. {
        let next = acc + sq(T::from_u64_lossy(m) / first);
        if next > thr {
            break;
        }
        let sub = cuboid_rec(rest, next, thr)?;
        if sub == 0 {
            break;
        }
        total = total
            .checked_add(sub)
            .ok_or_else(|| Error::Capacity("cuboid count overflows u64".into()))?;
    }
    Ok(total)
}
