//! Truncated Gaussian filter masks and separable 2D convolution.
//!
//! All convolutions use zero padding: the field is treated as zero outside
//! the grid. Every output cell is accumulated in a fixed order, so results do
//! not depend on the number of worker threads.

use rayon::prelude::*;

use crate::error::{ItcError, Result};
use crate::grid::{GridField, Position};
use crate::scalar::Scalar;

/// Radius factor used when none is given: three standard deviations.
pub const DEFAULT_RADIUS_FACTOR: f64 = 3.0;

/// Symmetric, normalized 1D Gaussian taps of length `2 * radius + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterMask<T> {
    sigma: T,
    radius: usize,
    taps: Vec<T>,
    // taps[j] * (j - radius), for first moments without per-cell coordinates
    offset_taps: Vec<T>,
}

impl<T: Scalar> FilterMask<T> {
    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn taps(&self) -> &[T] {
        &self.taps
    }

    /// Tap at signed offset `d`, zero outside the support.
    #[inline]
    pub fn tap(&self, d: isize) -> T {
        let r = self.radius as isize;
        if d < -r || d > r {
            T::zero()
        } else {
            self.taps[(d + r) as usize]
        }
    }

    /// 2D mask value `F(du, dv)` of the separable outer product.
    #[inline]
    pub fn weight_2d(&self, du: isize, dv: isize) -> T {
        self.tap(du) * self.tap(dv)
    }
}

/// Builds a Gaussian mask with `radius = max(1, ceil(radius_factor * sigma))`,
/// renormalized after truncation so the taps sum to one.
pub fn gaussian_mask<T: Scalar>(sigma: T, radius_factor: T) -> Result<FilterMask<T>> {
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(ItcError::InvalidSigma(sigma.to_f64().unwrap_or(f64::NAN)));
    }
    if !(radius_factor > T::zero()) || !radius_factor.is_finite() {
        return Err(ItcError::InvalidParams(format!(
            "radius factor must be positive, got {radius_factor}"
        )));
    }
    let radius = (radius_factor * sigma)
        .ceil()
        .to_usize()
        .ok_or_else(|| ItcError::InvalidParams("filter radius overflows".into()))?
        .max(1);
    let two_s2 = T::lit(2.0) * sigma * sigma;
    let mut taps: Vec<T> = (0..=2 * radius)
        .map(|i| {
            let d = T::from_index(i) - T::from_index(radius);
            (-(d * d) / two_s2).exp()
        })
        .collect();
    let total: T = taps.iter().copied().sum();
    for t in &mut taps {
        *t /= total;
    }
    let offset_taps = taps
        .iter()
        .enumerate()
        .map(|(i, &t)| t * (T::from_index(i) - T::from_index(radius)))
        .collect();
    Ok(FilterMask {
        sigma,
        radius,
        offset_taps,
        taps,
    })
}

/// Convolves `field` with `mask` along rows, then along columns.
pub fn convolve_separable<T: Scalar>(field: &GridField<T>, mask: &FilterMask<T>) -> GridField<T> {
    let (w, h) = field.dims();
    let r = mask.radius as isize;
    let taps = &mask.taps;

    let live: Vec<bool> = (0..h).map(|v| field.row(v).iter().any(|x| !x.is_zero())).collect();
    let mut rows = vec![T::zero(); w * h];
    rows.par_chunks_mut(w).enumerate().for_each(|(v, out)| {
        if !live[v] {
            return;
        }
        let src = field.row(v);
        for (u, o) in out.iter_mut().enumerate() {
            let lo = (-r).max(-(u as isize));
            let hi = r.min((w - 1 - u) as isize);
            let mut acc = T::zero();
            for d in lo..=hi {
                acc += taps[(d + r) as usize] * src[(u as isize + d) as usize];
            }
            *o = acc;
        }
    });

    let mut out = vec![T::zero(); w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(v, dst)| {
        let lo = (-r).max(-(v as isize));
        let hi = r.min((h - 1 - v) as isize);
        for d in lo..=hi {
            let src = (v as isize + d) as usize;
            // an all-zero source row would only add +0.0
            if !live[src] {
                continue;
            }
            let t = taps[(d + r) as usize];
            let start = src * w;
            for (o, &x) in dst.iter_mut().zip(&rows[start..start + w]) {
                *o += t * x;
            }
        }
    });

    GridField::from_raw(w, h, out)
}

/// Same convolution as [`convolve_separable`], computed by scattering the
/// outer-product mask around every nonzero cell. Costs `nnz * (2r+1)^2`
/// instead of a pass over the whole grid, so it wins for impulse images.
pub fn convolve_sparse<T: Scalar>(field: &GridField<T>, mask: &FilterMask<T>) -> GridField<T> {
    let (w, h) = field.dims();
    let r = mask.radius;
    let taps = &mask.taps;
    // row-major, so each output row sees impulses in a fixed order
    let impulses: Vec<(usize, usize, T)> = (0..h)
        .flat_map(|v| {
            field
                .row(v)
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(move |(u, &x)| (u, v, x))
        })
        .collect();

    let mut out = vec![T::zero(); w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(v, dst)| {
        let first = impulses.partition_point(|&(_, iv, _)| iv + r < v);
        for &(iu, iv, x) in impulses[first..].iter().take_while(|&&(_, iv, _)| iv <= v + r) {
            let scale = x * taps[v + r - iv];
            let u0 = iu.saturating_sub(r);
            let u1 = (iu + r).min(w - 1);
            for (o, &t) in dst[u0..=u1].iter_mut().zip(&taps[u0 + r - iu..]) {
                *o += scale * t;
            }
        }
    });
    GridField::from_raw(w, h, out)
}

/// Mask-weighted zeroth and first moments of `field` in the window around
/// the nearest cell to `center`.
///
/// Returns `(s0, su, sv)` with `s0 = sum f(x) F(x - c)` and `su`, `sv` the same
/// sum weighted by the column and row coordinate of `x`.
pub fn local_weighted_sums<T: Scalar>(
    field: &GridField<T>,
    mask: &FilterMask<T>,
    center: Position<T>,
) -> (T, T, T) {
    window_moments([field], mask, center)[0]
}

/// [`local_weighted_sums`] of two same-sized fields in one pass.
pub(crate) fn local_weighted_sums_pair<T: Scalar>(
    a: &GridField<T>,
    b: &GridField<T>,
    mask: &FilterMask<T>,
    center: Position<T>,
) -> [(T, T, T); 2] {
    window_moments([a, b], mask, center)
}

fn window_moments<T: Scalar, const K: usize>(
    fields: [&GridField<T>; K],
    mask: &FilterMask<T>,
    center: Position<T>,
) -> [(T, T, T); K] {
    let (w, h) = fields[0].dims();
    let (cu, cv) = center.nearest_cell(w, h);
    let r = mask.radius;
    let u0 = cu.saturating_sub(r);
    let u1 = (cu + r).min(w - 1);
    let v0 = cv.saturating_sub(r);
    let v1 = (cv + r).min(h - 1);
    // taps indexed by position relative to the window origin
    let lo = u0 + r - cu;
    let hi = u1 + r - cu;
    let row_taps = &mask.taps[lo..=hi];
    let row_offsets = &mask.offset_taps[lo..=hi];

    // zeroth moment and offsets from the center cell, per field
    let mut acc = [(T::zero(), T::zero(), T::zero()); K];
    for v in v0..=v1 {
        let tv = mask.taps[v + r - cv];
        let dv = mask.offset_taps[v + r - cv];
        for (f, s) in fields.iter().zip(acc.iter_mut()) {
            let row = &f.row(v)[u0..=u1];
            let mut a0 = T::zero();
            let mut au = T::zero();
            for ((&x, &t), &d) in row.iter().zip(row_taps).zip(row_offsets) {
                a0 += x * t;
                au += x * d;
            }
            s.0 += tv * a0;
            s.1 += tv * au;
            s.2 += dv * a0;
        }
    }
    let (fu, fv) = (T::from_index(cu), T::from_index(cv));
    acc.map(|(s0, du, dv)| (s0, fu * s0 + du, fv * s0 + dv))
}
