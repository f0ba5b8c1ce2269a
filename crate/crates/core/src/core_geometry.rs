//! Spectral cores and the geometric split of the counting function.
//!
//! The core `Q(E)` is the interior of the first `n(E)` rectangles, where
//! `n(E) = max{k : bₖ ≥ π/√E}` is the last rectangle thick enough to carry a
//! transverse mode. Writing each box count as
//! `N_k = vol₂(Qₖ)E/(4π) − vol₁(∂Qₖ)√E/(4π) + ρₖ` and summing over the core
//! gives the volume, perimeter and lattice-remainder terms reported by
//! [`weyl_decomposition`].

use rayon::prelude::*;
use serde::Serialize;

use crate::bracket::lower_count;
use crate::domain::{SimpleDomain, Summability};
use crate::error::{check_energy, Error, Result};
use crate::rect::{gauss_error, BoxSpec};
use crate::scalar::{CompensatedSum, Real};

/// Largest `k` with `bₖ ≥ π/√E`, or 0 when even `b₁` is too thin.
///
/// The comparison is made as `(1/bₖ)² ≤ E/π²`, the same predicate that decides
/// whether a box has a mode in [`crate::rect`], so the core and the counting
/// kernels never disagree about which rectangles are active. Found by
/// exponential search then bisection on the monotone heights.
pub fn n_of_e<T: Real>(domain: &SimpleDomain<T>, e: T) -> Result<usize> {
    check_energy(e)?;
    let thr = e / T::pi_squared();
    let active = |k: usize| -> Result<bool> {
        match domain.b(k) {
            Ok(b) => {
                let inv = T::one() / b;
                Ok(inv * inv <= thr)
            }
            // A closed form that underflowed is thinner than any threshold.
            Err(Error::NonPositiveTerm { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if !active(1)? {
        return Ok(0);
    }
    let mut lo = 1usize;
    let mut hi = 2usize;
    while active(hi)? {
        lo = hi;
        hi = hi
            .checked_mul(2)
            .ok_or_else(|| Error::Capacity("spectral core index overflows usize".into()))?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if active(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Geometry of the spectral core at one energy. All measures are zero when the core is empty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralCore<T> {
    pub energy: T,
    pub n: usize,
    /// `Σ_{k≤n} f(k)·bₖ`
    pub volume: T,
    /// Boundary length of the staircase union, `2·a_{n+1} + 2·b₁`.
    pub perimeter_union: T,
    /// `Σ_{k≤n} 2(f(k) + bₖ)`
    pub perimeter_sum: T,
}

pub fn core_stats<T: Real>(domain: &SimpleDomain<T>, e: T) -> Result<SpectralCore<T>> {
    let n = n_of_e(domain, e)?;
    let two = T::lit(2.0);
    if n == 0 {
        return Ok(SpectralCore {
            energy: e,
            n,
            volume: T::zero(),
            perimeter_union: T::zero(),
            perimeter_sum: T::zero(),
        });
    }
    let boxes = domain.boxes(n)?;
    let volume: CompensatedSum<T> = boxes.iter().map(|&(f, b)| f * b).collect();
    let perimeter_sum: CompensatedSum<T> = boxes.iter().map(|&(f, b)| two * (f + b)).collect();
    // bottom a_{n+1}, tops Σf = a_{n+1}, left wall b₁, drops b₁ − bₙ, right wall bₙ
    let perimeter_union = two * domain.a(n + 1)? + two * domain.b(1)?;
    Ok(SpectralCore {
        energy: e,
        n,
        volume: volume.value(),
        perimeter_union,
        perimeter_sum: perimeter_sum.value(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerimeterConvention {
    /// Boundary length of the union `Q(E)`.
    Union,
    /// Sum of the perimeters of the individual rectangles.
    SumOfRectangles,
}

/// Volume / perimeter / lattice-remainder split of the lower bracket at one energy.
///
/// With the sum-of-rectangles perimeter the split is an identity and
/// `residual` is zero up to floating-point assembly; with the union
/// perimeter the residual is `(perimeter_union − perimeter_sum)·√E/(4π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeylDecomposition<T> {
    pub energy: T,
    pub lower: u64,
    /// `vol₂(Q(E))·E/(4π)`
    pub volume_term: T,
    /// `vol₁(∂Q(E))·√E/(4π)` under `perimeter_convention`
    pub perimeter_term: T,
    /// `Σ_{k≤n(E)} ρₖ(E)`: the normalized box errors weighted by box area
    pub g_term: T,
    /// `volume_term − perimeter_term + g_term`, rounded
    pub reconstruction: u64,
    /// `lower − volume_term + perimeter_term − g_term`
    pub residual: T,
    pub perimeter_convention: PerimeterConvention,
    /// Set when the heights are not certified summable; the remainder bound then no longer applies.
    pub advisory: bool,
}

pub fn weyl_decomposition<T: Real>(
    domain: &SimpleDomain<T>,
    e: T,
    convention: PerimeterConvention,
) -> Result<WeylDecomposition<T>> {
    let core = core_stats(domain, e)?;
    let four_pi = T::lit(4.0) * T::PI();
    let mut g = CompensatedSum::new();
    for (f, b) in domain.boxes(core.n)? {
        g.add(gauss_error(&BoxSpec::new(f, b)?, e)?.remainder);
    }
    let g_term = g.value();
    let perimeter = match convention {
        PerimeterConvention::Union => core.perimeter_union,
        PerimeterConvention::SumOfRectangles => core.perimeter_sum,
    };
    let volume_term = core.volume * e / four_pi;
    let perimeter_term = perimeter * e.sqrt() / four_pi;
    let lower = lower_count(domain, e)?;
    let mut residual = CompensatedSum::new();
    residual.add(T::from_u64_lossy(lower));
    residual.add(-volume_term);
    residual.add(perimeter_term);
    residual.add(-g_term);
    let recon = (volume_term - perimeter_term + g_term).round();
    Ok(WeylDecomposition {
        energy: e,
        lower,
        volume_term,
        perimeter_term,
        g_term,
        reconstruction: recon.max(T::zero()).to_u64().unwrap_or(u64::MAX),
        residual: residual.value(),
        perimeter_convention: convention,
        advisory: domain.b_summability() != Summability::Yes,
    })
}

/// Least-squares power law `value ≈ coefficient · E^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthFit<T> {
    pub exponent: T,
    pub coefficient: T,
    pub r_squared: T,
    pub energy_range: (T, T),
    pub samples: usize,
}

pub const MIN_FIT_SAMPLES: usize = 10;

/// Fits a line to `(ln E, ln value)`.
pub fn fit_growth<T: Real>(samples: &[(T, T)]) -> Result<GrowthFit<T>> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::domain(format!(
            "growth fit needs at least {MIN_FIT_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if let Some(&(e, v)) = samples
        .iter()
        .find(|&&(e, v)| !(e > T::zero() && v > T::zero()))
    {
        return Err(Error::domain(format!(
            "growth fit needs positive samples, got ({e}, {v})"
        )));
    }
    let n = T::from_usize_lossy(samples.len());
    let xs: Vec<T> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<T> = samples.iter().map(|s| s.1.ln()).collect();
    let mean_x = xs.iter().copied().sum::<T>() / n;
    let mean_y = ys.iter().copied().sum::<T>() / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if sxx <= T::zero() {
        return Err(Error::domain(
            "growth fit needs at least two distinct energies",
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy > T::zero() {
        sxy * sxy / (sxx * syy)
    } else {
        T::one()
    };
    let (lo, hi) = samples
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), s| {
            (lo.min(s.0), hi.max(s.0))
        });
    Ok(GrowthFit {
        exponent: slope,
        coefficient: intercept.exp(),
        r_squared: r_squared.min(T::one()),
        energy_range: (lo, hi),
        samples: samples.len(),
    })
}

/// `n` energies from `lo` to `hi` inclusive, evenly spaced in `ln E`.
pub fn log_spaced<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (l0, l1) = (lo.ln(), hi.ln());
            let step = (l1 - l0) / T::from_usize_lossy(n - 1);
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    _ if i + 1 == n => hi,
                    _ => (l0 + step * T::from_usize_lossy(i)).exp(),
                })
                .collect()
        }
    }
}

/// Estimated geometry of the inner parallel set `Ω_ε = {p : d(p, ∂Ω) ≥ ε}` at `ε = π/√E`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErosionEstimate<T> {
    pub epsilon: T,
    pub volume_estimate: T,
    pub volume_error: T,
    /// `−dV/dε` by central difference with step `ε/16`.
    pub perimeter_estimate: T,
    pub perimeter_error: T,
    /// Rectangles thick enough (`bₖ > 2ε`) to meet `Ω_ε`.
    pub rectangles: usize,
}

pub const MIN_EROSION_RESOLUTION: usize = 64;

/// Area and boundary length of `Ω_{π/√E}`.
///
/// Each vertical line `x = const` meets `Ω_ε` in a set whose length is
/// computed exactly from the boundary segments within `ε` of the line (the
/// rest are pruned by their x-extent). Away from the walls that length is
/// constant, `bₖ − 2ε`; within `ε` of a wall it is sampled at `resolution`
/// midpoint columns, and the reported error is the column spacing times the
/// observed variation.
pub fn donnelly_core_stats<T: Real>(
    domain: &SimpleDomain<T>,
    e: T,
    resolution: usize,
) -> Result<ErosionEstimate<T>> {
    check_energy(e)?;
    if resolution < MIN_EROSION_RESOLUTION {
        return Err(Error::CoarseResolution(format!(
            "{resolution} columns per wall zone, at least {MIN_EROSION_RESOLUTION} required"
        )));
    }
    let eps = T::PI() / e.sqrt();
    let delta = eps / T::lit(16.0);
    let staircase = Staircase::load(domain, eps + delta)?;
    let mid = staircase.volume(eps, resolution);
    let inner = staircase.volume(eps + delta, resolution);
    let outer = staircase.volume(eps - delta, resolution);
    let two_delta = T::lit(2.0) * delta;
    Ok(ErosionEstimate {
        epsilon: eps,
        volume_estimate: mid.0,
        volume_error: mid.1,
        perimeter_estimate: (outer.0 - inner.0) / two_delta,
        perimeter_error: (outer.1 + inner.1) / two_delta,
        rectangles: staircase.thick_rectangles(eps),
    })
}

/// Cached staircase geometry: `a[i] = a_{i+1}`, `b[i] = b_{i+1}`.
struct Staircase<T> {
    a: Vec<T>,
    b: Vec<T>,
    /// Rectangles that can meet `Ω_r` for the largest radius queried.
    thick: usize,
}

impl<T: Real> Staircase<T> {
    /// Loads every rectangle that can meet `Ω_r` for `r ≥ min_radius`, plus
    /// every rectangle whose boundary lies within `r_max` of those.
    fn load(domain: &SimpleDomain<T>, r_max: T) -> Result<Self> {
        let min_radius = r_max * T::lit(15.0 / 17.0);
        let mut thick = 0;
        loop {
            match domain.b(thick + 1) {
                Ok(b) if b > T::lit(2.0) * min_radius => thick += 1,
                Ok(_) | Err(Error::NonPositiveTerm { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        let reach = if thick == 0 {
            T::zero()
        } else {
            domain.a(thick + 1)? + r_max
        };
        let mut k = 1;
        loop {
            let ak = domain.a(k)?;
            if k > thick + 1 && ak > reach {
                break;
            }
            match domain.b(k) {
                Ok(bk) => {
                    a.push(ak);
                    b.push(bk);
                }
                Err(Error::NonPositiveTerm { .. }) | Err(Error::OutOfRange { .. }) => break,
                Err(e) => return Err(e),
            }
            k += 1;
        }
        let last = domain
            .a(k)
            .or_else(|_| Ok::<T, Error>(a.last().copied().unwrap_or_else(T::zero)))?;
        a.push(last);
        Ok(Self { a, b, thick })
    }

    fn thick_rectangles(&self, r: T) -> usize {
        self.b
            .iter()
            .take(self.thick)
            .filter(|&&b| b > T::lit(2.0) * r)
            .count()
    }

    /// `(area of Ω_r, error estimate)`.
    fn volume(&self, r: T, resolution: usize) -> (T, T) {
        let parts: Vec<(T, T)> = (0..self.thick)
            .into_par_iter()
            .map(|k| self.rect_volume(k, r, resolution))
            .collect();
        let vol: CompensatedSum<T> = parts.iter().map(|p| p.0).collect();
        let err: CompensatedSum<T> = parts.iter().map(|p| p.1).collect();
        (vol.value(), err.value())
    }

    fn rect_volume(&self, k: usize, r: T, resolution: usize) -> (T, T) {
        let two = T::lit(2.0);
        if self.b[k] <= two * r {
            return (T::zero(), T::zero());
        }
        let (x0, x1) = (self.a[k], self.a[k + 1]);
        let mut vol = CompensatedSum::new();
        let mut err = CompensatedSum::new();
        let mut zone = |lo: T, hi: T| {
            let (v, e) = self.integrate_zone(k, r, lo, hi, resolution);
            vol.add(v);
            err.add(e);
        };
        if x1 - x0 > two * r {
            zone(x0, x0 + r);
            zone(x1 - r, x1);
            // no wall or neighbouring top within r: only the floor and the own top
            vol.add((x1 - x0 - two * r) * (self.b[k] - two * r));
        } else {
            zone(x0, x1);
        }
        (vol.value(), err.value())
    }

    fn integrate_zone(&self, k: usize, r: T, lo: T, hi: T, resolution: usize) -> (T, T) {
        let n = T::from_usize_lossy(resolution);
        let dx = (hi - lo) / n;
        let half = T::lit(0.5);
        let mut sum = CompensatedSum::new();
        let mut variation = T::zero();
        let mut prev = self.column(k, r, lo);
        for i in 0..resolution {
            let x = lo + (T::from_usize_lossy(i) + half) * dx;
            let len = self.column(k, r, x);
            sum.add(len);
            variation = variation + (len - prev).abs();
            prev = len;
        }
        variation = variation + (self.column(k, r, hi) - prev).abs();
        (sum.value() * dx, variation * dx)
    }

    /// Length of `{y : (x, y) ∈ Ω_r}` for `x` in rectangle `k`.
    fn column(&self, k: usize, r: T, x: T) -> T {
        let lo = r;
        let hi = self.b[k] - r;
        if hi <= lo {
            return T::zero();
        }
        let r2 = r * r;
        let mut cuts: Vec<(T, T)> = Vec::new();
        let reach = |dx: T| -> Option<T> {
            if dx < r {
                Some((r2 - dx * dx).max(T::zero()).sqrt())
            } else {
                None
            }
        };
        // outer wall x = 0, 0 ≤ y ≤ b₁
        if let Some(s) = reach(x.abs()) {
            cuts.push((-s, self.b[0] + s));
        }
        let rects = self.b.len();
        let first = self.a[..=rects]
            .partition_point(|&a| a <= x - r)
            .saturating_sub(1);
        for j in first..rects {
            if self.a[j] >= x + r {
                break;
            }
            // top of rectangle j
            let dx = (self.a[j] - x).max(x - self.a[j + 1]).max(T::zero());
            if let Some(s) = reach(dx) {
                cuts.push((self.b[j] - s, self.b[j] + s));
            }
            // step at x = a_{j+1}, between heights b_{j+1} and b_j
            if j + 1 < rects {
                if let Some(s) = reach((x - self.a[j + 1]).abs()) {
                    cuts.push((self.b[j + 1] - s, self.b[j] + s));
                }
            }
        }
        cuts.retain(|c| c.1 > lo && c.0 < hi);
        cuts.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite cut"));
        let mut covered = T::zero();
        let mut cursor = lo;
        for (c0, c1) in cuts {
            let start = c0.max(cursor);
            let end = c1.min(hi);
            if end > start {
                covered = covered + (end - start);
                cursor = end;
            }
        }
        (hi - lo - covered).max(T::zero())
    }
}
