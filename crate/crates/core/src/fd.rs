//! Finite-difference cross-check on truncated staircases.
//!
//! The 5-point Dirichlet Laplacian on a grid of spacing `h` over
//! `⋃_{k≤K} Qₖ`, with box sides snapped to multiples of `h`. Eigenvalue
//! counts below an energy come from Sylvester's law of inertia: the number of
//! negative pivots in an `LDLᵀ` factorization of `A − E·I`. Nodes are numbered
//! column by column, so the factorization stays inside a band whose width is
//! the tallest column. A dense route (Householder tridiagonalization followed
//! by a Sturm count) is kept for small grids and for checking the banded one.
//!
//! This module works in `f64` throughout.

use nalgebra::{DMatrix, SymmetricTridiagonal};
use serde::Serialize;

use crate::bracket::sum_counts;
use crate::core_geometry::n_of_e;
use crate::domain::SimpleDomain;
use crate::error::{check_energy, Error, Result};
use crate::rect::{count_dirichlet_box, count_mixed_box, BoxSpec};
use crate::scalar::Real;

/// Largest grid the dense route accepts.
pub const DENSE_CAP: usize = 4000;
/// Largest grid the banded route accepts.
pub const BANDED_CAP: usize = 1 << 16;
/// Largest band storage (unknowns × (bandwidth + 1)) the banded route accepts.
pub const BAND_STORAGE_CAP: usize = 1 << 23;

/// One box after snapping its sides to the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SnappedBox {
    pub width: f64,
    pub height: f64,
    pub width_cells: u64,
    pub height_cells: u64,
}

/// 5-point Dirichlet Laplacian on the interior nodes of a truncated staircase.
#[derive(Clone, Debug)]
pub struct GridOperator {
    pub h: f64,
    /// Integer grid coordinates of the interior nodes, column-major.
    pub points: Vec<(u64, u64)>,
    /// `[left, right, down, up]` neighbour indices; `None` where the neighbour is on the boundary.
    neighbors: Vec<[Option<usize>; 4]>,
    /// Snapped boxes; trailing boxes thinner than half a cell are dropped.
    pub boxes: Vec<SnappedBox>,
    /// Whether snapping moved any side by more than rounding.
    pub snapped: bool,
    bandwidth: usize,
}

impl GridOperator {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest index distance between coupled nodes.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn diagonal(&self) -> f64 {
        4.0 / (self.h * self.h)
    }

    /// Smallest Gershgorin lower bound over all rows.
    pub fn gershgorin_lower(&self) -> f64 {
        let inv_h2 = 1.0 / (self.h * self.h);
        self.neighbors
            .iter()
            .map(|nb| (4.0 - nb.iter().flatten().count() as f64) * inv_h2)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn gershgorin_upper(&self) -> f64 {
        8.0 / (self.h * self.h)
    }

    /// Dense copy of the operator.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let inv_h2 = 1.0 / (self.h * self.h);
        let mut m = DMatrix::zeros(n, n);
        for (i, nb) in self.neighbors.iter().enumerate() {
            m[(i, i)] = 4.0 * inv_h2;
            for &j in nb.iter().flatten() {
                m[(i, j)] = -inv_h2;
            }
        }
        m
    }

    /// Applies the operator to `v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let inv_h2 = 1.0 / (self.h * self.h);
        self.neighbors
            .iter()
            .enumerate()
            .map(|(i, nb)| (4.0 * v[i] - nb.iter().flatten().map(|&j| v[j]).sum::<f64>()) * inv_h2)
            .collect()
    }
}

/// Builds the operator for rectangles `1..=k` at spacing `h`.
pub fn assemble_grid<T: Real>(domain: &SimpleDomain<T>, k: usize, h: f64) -> Result<GridOperator> {
    if k < 1 {
        return Err(Error::Geometry(
            "truncation must keep at least one rectangle".into(),
        ));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!(
            "grid spacing must be positive, got {h}"
        )));
    }
    let mut boxes = Vec::with_capacity(k);
    let mut snapped = false;
    for (f, b) in domain.boxes(k)? {
        let (f, b) = (to_f64(f), to_f64(b));
        let (wc, hc) = ((f / h).round(), (b / h).round());
        if hc < 1.0 && !boxes.is_empty() {
            // heights only decrease: the grid cannot resolve this box or any later one
            break;
        }
        if wc < 1.0 || hc < 1.0 {
            return Err(Error::Geometry(format!(
                "box {f} x {b} is thinner than the grid spacing {h}"
            )));
        }
        snapped |= ((wc * h - f).abs() > 1e-9 * f) || ((hc * h - b).abs() > 1e-9 * b);
        boxes.push(SnappedBox {
            width: wc * h,
            height: hc * h,
            width_cells: wc as u64,
            height_cells: hc as u64,
        });
    }

    // Interior height (exclusive) of each grid column x = i·h.
    let total: u64 = boxes.iter().map(|b| b.width_cells).sum();
    let mut column_top = vec![0u64; total as usize + 1];
    let mut left = 0u64;
    for (idx, b) in boxes.iter().enumerate() {
        for i in left + 1..left + b.width_cells {
            column_top[i as usize] = b.height_cells;
        }
        let right = left + b.width_cells;
        if let Some(next) = boxes.get(idx + 1) {
            column_top[right as usize] = b.height_cells.min(next.height_cells);
        }
        left = right;
    }

    let unknowns: u64 = column_top.iter().map(|&t| t.saturating_sub(1)).sum();
    if unknowns as usize > BANDED_CAP {
        return Err(Error::Capacity(format!(
            "{unknowns} grid unknowns exceed the cap of {BANDED_CAP}"
        )));
    }

    let mut points = Vec::with_capacity(unknowns as usize);
    let mut column_start = vec![0usize; column_top.len() + 1];
    for (i, &top) in column_top.iter().enumerate() {
        column_start[i] = points.len();
        for j in 1..top {
            points.push((i as u64, j));
        }
    }
    column_start[column_top.len()] = points.len();

    let index = |i: i64, j: u64| -> Option<usize> {
        if i < 0 || i as usize >= column_top.len() || j == 0 || j >= column_top[i as usize] {
            None
        } else {
            Some(column_start[i as usize] + (j - 1) as usize)
        }
    };
    let mut bandwidth = 0;
    let neighbors: Vec<[Option<usize>; 4]> = points
        .iter()
        .enumerate()
        .map(|(me, &(i, j))| {
            let i = i as i64;
            let nb = [
                index(i - 1, j),
                index(i + 1, j),
                index(i, j - 1),
                index(i, j + 1),
            ];
            for &n in nb.iter().flatten() {
                bandwidth = bandwidth.max(n.abs_diff(me));
            }
            nb
        })
        .collect();
    if points.len() * (bandwidth + 1) > BAND_STORAGE_CAP {
        return Err(Error::Capacity(format!(
            "band storage {} x {} exceeds the cap of {BAND_STORAGE_CAP}",
            points.len(),
            bandwidth + 1
        )));
    }
    Ok(GridOperator {
        h,
        points,
        neighbors,
        boxes,
        snapped,
        bandwidth,
    })
}

fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar converts to f64")
}

/// Number of eigenvalues `≤ e` (banded inertia count).
pub fn fd_count_below(op: &GridOperator, e: f64) -> Result<u64> {
    check_energy(e)?;
    if op.is_empty() || e < op.gershgorin_lower() {
        return Ok(0);
    }
    if e >= op.gershgorin_upper() {
        return Ok(op.len() as u64);
    }
    banded_inertia(op, e)
}

/// Number of eigenvalues `≤ e` through dense tridiagonalization and a Sturm count.
pub fn fd_count_below_dense(op: &GridOperator, e: f64) -> Result<u64> {
    check_energy(e)?;
    if op.len() > DENSE_CAP {
        return Err(Error::Capacity(format!(
            "{} unknowns exceed the dense cap of {DENSE_CAP}",
            op.len()
        )));
    }
    if op.is_empty() {
        return Ok(0);
    }
    let (diag, off) = SymmetricTridiagonal::new(op.matrix()).unpack_tridiagonal();
    Ok(sturm_count(diag.as_slice(), off.as_slice(), e))
}

/// Eigenvalues `≤ sigma` of a symmetric tridiagonal matrix, by counting
/// negative pivots of `T − σI`. Tiny pivots are replaced by `−pivmin`.
pub fn sturm_count(diag: &[f64], off: &[f64], sigma: f64) -> u64 {
    let scale = diag
        .iter()
        .map(|d| d.abs())
        .chain(off.iter().map(|e| e.abs()))
        .fold(f64::MIN_POSITIVE, f64::max);
    let pivmin = f64::EPSILON * scale * f64::EPSILON;
    let mut count = 0;
    let mut d = 1.0;
    for (i, &a) in diag.iter().enumerate() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = a - sigma - if i == 0 { 0.0 } else { e2 / d };
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Negative pivot count of `LDLᵀ = A − σI`, factored inside the band.
///
/// Row `i` of `L` is stored at `l[i*p .. (i+1)*p]`, position `q` holding
/// column `i − p + q`, so the inner products run over contiguous slices.
fn banded_inertia(op: &GridOperator, sigma: f64) -> Result<u64> {
    let n = op.len();
    let p = op.bandwidth;
    let inv_h2 = 1.0 / (op.h * op.h);
    let diag = 4.0 * inv_h2 - sigma;
    let tiny = f64::EPSILON * (8.0 * inv_h2 + sigma.abs());
    let mut pivots = vec![0.0; n];
    let mut l = vec![0.0; n * p];
    let mut wrow = vec![0.0; p];
    let mut count = 0;
    for i in 0..n {
        let lo = i.saturating_sub(p);
        let q0 = lo + p - i;
        wrow[q0..].fill(0.0);
        for &j in op.neighbors[i].iter().flatten() {
            if j < i {
                wrow[j + p - i] = -inv_h2;
            }
        }
        // W(i, j) = A(i, j) − Σ_{k<j} W(i, k)·L(j, k)
        for j in lo..i {
            let qj = j + p - i;
            let lj = &l[j * p + (lo + p - j)..(j + 1) * p];
            let dot: f64 = wrow[q0..qj].iter().zip(lj).map(|(a, b)| a * b).sum();
            wrow[qj] -= dot;
        }
        let mut d = diag;
        let li = &mut l[i * p..(i + 1) * p];
        for q in q0..p {
            let k = i + q - p;
            let lik = wrow[q] / pivots[k];
            li[q] = lik;
            d -= lik * wrow[q];
        }
        if !d.is_finite() || d.abs() <= tiny {
            return Err(Error::Breakdown(format!(
                "pivot {i} of A - {sigma}·I is {d:e}; the shift is numerically an eigenvalue"
            )));
        }
        pivots[i] = d;
        if d < 0.0 {
            count += 1;
        }
    }
    Ok(count)
}

/// `k`-th smallest eigenvalue (1-based) by bisection on the inertia count.
pub fn fd_eigenvalue(op: &GridOperator, k: usize, rel_tol: f64) -> Result<f64> {
    if k == 0 || k > op.len() {
        return Err(Error::domain(format!(
            "eigenvalue index {k} outside 1..={}",
            op.len()
        )));
    }
    let mut lo = op.gershgorin_lower().max(0.0);
    let mut hi = op.gershgorin_upper();
    'bisect: while hi - lo > rel_tol * hi {
        // A zero pivot only says the shift is an eigenvalue of some leading
        // block; move the shift a little within the bracket and try again.
        for nudge in [0.5, 0.5 + 1e-3, 0.5 - 1e-3, 0.5 + 1e-2] {
            let mid = lo + nudge * (hi - lo);
            match fd_count_below(op, mid) {
                Ok(c) if c >= k as u64 => hi = mid,
                Ok(_) => lo = mid,
                Err(Error::Breakdown(_)) => continue,
                Err(e) => return Err(e),
            }
            continue 'bisect;
        }
        break;
    }
    Ok(0.5 * (lo + hi))
}

/// All eigenvalues `≤ bound`, ascending.
pub fn fd_eigenvalues_below(op: &GridOperator, bound: f64, rel_tol: f64) -> Result<Vec<f64>> {
    let count = fd_count_below(op, bound)?;
    (1..=count as usize)
        .map(|k| fd_eigenvalue(op, k, rel_tol))
        .collect()
}

/// Observed convergence order from three grids refined by a constant `ratio`.
pub fn richardson_order(coarse: f64, mid: f64, fine: f64, ratio: f64) -> f64 {
    ((coarse - mid) / (mid - fine)).ln() / ratio.ln()
}

/// Extrapolates `fine` assuming an `h²` error law.
pub fn richardson_extrapolate(coarse: f64, fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    let r2 = (h_coarse / h_fine).powi(2);
    fine + (fine - coarse) / (r2 - 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdRow {
    pub h: f64,
    pub unknowns: usize,
    pub count: u64,
    pub snapped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrosscheckReport {
    pub energy: f64,
    pub truncation: usize,
    /// Brackets of the full domain.
    pub lower: u64,
    pub upper: u64,
    /// Brackets of the snapped, truncated staircase the grid actually resolves.
    pub snapped_lower: u64,
    pub snapped_upper: u64,
    /// Rows ordered from coarsest to finest grid.
    pub rows: Vec<FdRow>,
    /// Eigenvalues of the two finest grids, paired by index and extrapolated in `h²`.
    pub extrapolated_eigenvalues: Vec<f64>,
    pub extrapolated_count: Option<u64>,
    /// Whether the extrapolated count lies in `[snapped_lower, snapped_upper]`.
    pub contained: Option<bool>,
}

/// Extra rectangles kept beyond `n(E)`.
pub const TRUNCATION_MARGIN: usize = 1;

const EIGEN_REL_TOL: f64 = 1e-11;

/// Runs the finite-difference count on each grid and compares it with the brackets.
pub fn crosscheck<T: Real>(
    domain: &SimpleDomain<T>,
    e: f64,
    h_list: &[f64],
) -> Result<CrosscheckReport> {
    check_energy(e)?;
    if h_list.is_empty() {
        return Err(Error::domain("crosscheck needs at least one grid spacing"));
    }
    let e_t =
        T::from_f64(e).ok_or_else(|| Error::domain(format!("energy {e} not representable")))?;
    let truncation = n_of_e(domain, e_t)? + TRUNCATION_MARGIN;
    let full = sum_counts(domain, e_t, n_of_e(domain, e_t)?)?;

    let mut hs = h_list.to_vec();
    hs.sort_by(|a, b| b.partial_cmp(a).expect("finite spacing"));
    let ops = hs
        .iter()
        .map(|&h| assemble_grid(domain, truncation, h))
        .collect::<Result<Vec<_>>>()?;
    let rows = ops
        .iter()
        .map(|op| {
            Ok(FdRow {
                h: op.h,
                unknowns: op.len(),
                count: fd_count_below(op, e)?,
                snapped: op.snapped,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let finest = ops.last().expect("non-empty grid list");
    let (mut snapped_lower, mut snapped_upper) = (0, 0);
    for b in &finest.boxes {
        let bx = BoxSpec::new(b.width, b.height)?;
        snapped_lower += count_dirichlet_box(&bx, e)?;
        snapped_upper += count_mixed_box(&bx, e)?;
    }

    let (extrapolated_eigenvalues, extrapolated_count) = if ops.len() >= 2 {
        let coarse = &ops[ops.len() - 2];
        let fine_vals = fd_eigenvalues_below(finest, e, EIGEN_REL_TOL)?;
        let mut ext = Vec::with_capacity(fine_vals.len());
        for (i, &lf) in fine_vals.iter().enumerate() {
            let lc = fd_eigenvalue(coarse, i + 1, EIGEN_REL_TOL)?;
            ext.push(richardson_extrapolate(lc, lf, coarse.h, finest.h));
        }
        let count = ext.iter().filter(|&&l| l <= e).count() as u64;
        (ext, Some(count))
    } else {
        (Vec::new(), None)
    };
    let contained = extrapolated_count.map(|c| snapped_lower <= c && c <= snapped_upper);
    Ok(CrosscheckReport {
        energy: e,
        truncation,
        lower: full.dirichlet,
        upper: full.mixed,
        snapped_lower,
        snapped_upper,
        rows,
        extrapolated_eigenvalues,
        extrapolated_count,
        contained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SequenceSpec;
    use std::f64::consts::PI;

    fn unit_prefix() -> SimpleDomain<f64> {
        SimpleDomain::new(
            SequenceSpec::explicit(vec![1.0], Some(SequenceSpec::power(1e-3, -2.0))),
            SequenceSpec::explicit(vec![1.0], Some(SequenceSpec::power(1.0, 0.0))),
        )
        .unwrap()
    }

    fn two_step() -> SimpleDomain<f64> {
        SimpleDomain::new(
            SequenceSpec::explicit(vec![1.0, 0.5], Some(SequenceSpec::power(1e-3, -2.0))),
            SequenceSpec::explicit(vec![1.0, 1.0], Some(SequenceSpec::power(1.0, 0.0))),
        )
        .unwrap()
    }

    /// Closed-form 5-point spectrum of the unit square with `n` cells per side.
    fn square_spectrum(n: usize) -> Vec<f64> {
        let h = 1.0 / n as f64;
        let mut v = Vec::new();
        for l in 1..n {
            for m in 1..n {
                let s = |q: usize| (PI * h * q as f64 / 2.0).sin().powi(2);
                v.push(4.0 / (h * h) * (s(l) + s(m)));
            }
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn unit_square_node_counts() {
        let d = unit_prefix();
        assert_eq!(assemble_grid(&d, 1, 0.25).unwrap().len(), 9);
        assert_eq!(assemble_grid(&d, 1, 0.5).unwrap().len(), 1);
        assert!(assemble_grid(&d, 0, 0.5).is_err());
    }

    #[test]
    fn two_step_node_count() {
        // union of [0,1]×[0,1] and [1,2]×[0,0.5] at h = 1/4: interior lattice
        // points (i/4, j/4) with 0 < x < 2 and y below the local height;
        // on x = 1 only y < 0.5 is interior.
        let mut expected = 0;
        for i in 1..8 {
            for j in 1..4 {
                let (x, y) = (i as f64 / 4.0, j as f64 / 4.0);
                let inside = if x < 1.0 { y < 1.0 } else { y < 0.5 };
                if inside {
                    expected += 1;
                }
            }
        }
        let op = assemble_grid(&two_step(), 2, 0.25).unwrap();
        assert_eq!(op.len(), expected);
        assert!(!op.snapped);
    }

    #[test]
    fn operator_is_symmetric_with_stencil_pattern() {
        let op = assemble_grid(&two_step(), 2, 0.125).unwrap();
        let m = op.matrix();
        assert_eq!(m, m.transpose());
        let h2 = op.h * op.h;
        for i in 0..op.len() {
            assert_eq!(m[(i, i)], 4.0 / h2);
            for j in 0..op.len() {
                if i != j && m[(i, j)] != 0.0 {
                    assert_eq!(m[(i, j)], -1.0 / h2);
                    let (a, b) = (op.points[i], op.points[j]);
                    assert_eq!(a.0.abs_diff(b.0) + a.1.abs_diff(b.1), 1);
                }
            }
        }
        assert!(m.clone().cholesky().is_some());
        let v: Vec<f64> = (0..op.len()).map(|i| (i as f64).sin()).collect();
        let mv = &m * nalgebra::DVector::from_vec(v.clone());
        for (a, b) in op.apply(&v).iter().zip(mv.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn single_node_count() {
        let op = assemble_grid(&unit_prefix(), 1, 0.5).unwrap();
        assert_eq!(fd_count_below(&op, 20.0).unwrap(), 1);
        assert_eq!(fd_count_below(&op, 15.0).unwrap(), 0);
    }

    #[test]
    fn counts_match_closed_form_square() {
        for n in [4usize, 8, 16] {
            let op = assemble_grid(&unit_prefix(), 1, 1.0 / n as f64).unwrap();
            let spec = square_spectrum(n);
            for &e in &[10.0, 30.0, 60.0, 123.4, 500.0] {
                let exact = spec.iter().filter(|&&l| l <= e).count() as u64;
                assert_eq!(fd_count_below(&op, e).unwrap(), exact, "n={n} E={e}");
                assert_eq!(
                    fd_count_below_dense(&op, e).unwrap(),
                    exact,
                    "dense n={n} E={e}"
                );
            }
        }
    }

    #[test]
    fn banded_and_dense_routes_agree_on_staircase() {
        let op = assemble_grid(&SimpleDomain::<f64>::example(), 2, 1.0 / 8.0).unwrap();
        for e in [20.0, 40.0, 75.0, 150.0, 400.0] {
            assert_eq!(
                fd_count_below(&op, e).unwrap(),
                fd_count_below_dense(&op, e).unwrap(),
                "E={e}"
            );
        }
    }

    #[test]
    fn gershgorin_shortcuts() {
        let single = assemble_grid(&unit_prefix(), 1, 0.5).unwrap();
        assert_eq!(single.gershgorin_lower(), 16.0);
        assert_eq!(fd_count_below(&single, 15.9).unwrap(), 0);
        let op = assemble_grid(&two_step(), 2, 0.125).unwrap();
        assert_eq!(op.gershgorin_lower(), 0.0);
        assert_eq!(fd_count_below(&op, 1.0).unwrap(), 0);
        assert_eq!(
            fd_count_below(&op, op.gershgorin_upper()).unwrap(),
            op.len() as u64
        );
    }

    #[test]
    fn unit_square_fine_grid_at_thirty() {
        let op = assemble_grid(&unit_prefix(), 1, 1.0 / 128.0).unwrap();
        let exact = square_spectrum(128).iter().filter(|&&l| l <= 30.0).count() as u64;
        assert_eq!(exact, 1);
        assert_eq!(fd_count_below(&op, 30.0).unwrap(), exact);
    }

    #[test]
    fn smallest_eigenvalue_matches_closed_form() {
        let op = assemble_grid(&unit_prefix(), 1, 1.0 / 16.0).unwrap();
        let l = fd_eigenvalue(&op, 1, 1e-12).unwrap();
        assert!((l - square_spectrum(16)[0]).abs() < 1e-8 * l);
        let l3 = fd_eigenvalue(&op, 3, 1e-12).unwrap();
        assert!((l3 - square_spectrum(16)[2]).abs() < 1e-8 * l3);
    }

    #[test]
    fn monotone_in_energy() {
        let op = assemble_grid(&two_step(), 2, 1.0 / 16.0).unwrap();
        let mut prev = 0;
        for i in 1..60 {
            let c = fd_count_below(&op, 10.0 * i as f64).unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn snapping_is_reported() {
        let d = SimpleDomain::new(
            SequenceSpec::explicit(vec![0.9], Some(SequenceSpec::power(1e-3, -2.0))),
            SequenceSpec::explicit(vec![1.1], Some(SequenceSpec::power(1.0, 0.0))),
        )
        .unwrap();
        let op = assemble_grid(&d, 1, 0.25).unwrap();
        assert!(op.snapped);
        assert_eq!(op.boxes[0].width, 1.0);
        assert_eq!(op.boxes[0].height, 1.0);
    }

    #[test]
    fn caps_are_enforced() {
        let op = assemble_grid(&unit_prefix(), 1, 1.0 / 128.0).unwrap();
        assert!(matches!(
            fd_count_below_dense(&op, 30.0),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(
            assemble_grid(&unit_prefix(), 1, 1.0 / 512.0),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn sturm_count_on_known_tridiagonal() {
        // tridiag(-1, 2, -1) of size 5 has eigenvalues 2 - 2cos(kπ/6)
        let diag = [2.0; 5];
        let off = [-1.0; 4];
        for k in 1..=5 {
            let lam = 2.0 - 2.0 * (k as f64 * PI / 6.0).cos();
            assert_eq!(sturm_count(&diag, &off, lam + 1e-9), k as u64);
            assert_eq!(sturm_count(&diag, &off, lam - 1e-9), k as u64 - 1);
        }
    }

    #[test]
    fn crosscheck_unit_square() {
        let r = crosscheck(&unit_prefix(), 20.0, &[1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0]).unwrap();
        assert_eq!((r.lower, r.upper), (1, 2));
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows.windows(2).all(|w| w[0].h > w[1].h));
        assert!(r.rows.iter().all(|row| row.count == 1));
        assert_eq!(r.extrapolated_count, Some(1));
        assert_eq!(r.contained, Some(true));
        assert!((r.extrapolated_eigenvalues[0] - 2.0 * PI * PI).abs() < 1e-3);
    }

    #[test]
    fn crosscheck_below_ground_state() {
        let r = crosscheck(&unit_prefix(), 5.0, &[0.25, 0.125]).unwrap();
        assert_eq!((r.lower, r.upper), (0, 0));
        assert!(r.rows.iter().all(|row| row.count == 0));
        assert_eq!(r.extrapolated_count, Some(0));
        assert_eq!(r.contained, Some(true));
    }

    #[test]
    fn crosscheck_example_two_boxes() {
        let d = SimpleDomain::<f64>::example();
        let r = crosscheck(&d, 50.0, &[1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0]).unwrap();
        assert_eq!(r.truncation, 2);
        assert_eq!(r.snapped_lower, r.lower);
        assert_eq!(r.contained, Some(true), "{r:?}");
    }
}
