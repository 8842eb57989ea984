//! Per-pixel weights for the data density, most usefully a chamfer distance
//! transform that emphasizes shape interiors.

use crate::conv::{gaussian_mask, FilterMask};
use crate::error::{ItcError, Result};
use crate::grid::GridField;
use crate::lattice::density_with_mask;
use crate::scalar::Scalar;

/// Step cost between 4-neighbors in the 3-4 chamfer metric.
pub const AXIAL_COST: u32 = 3;
/// Step cost between diagonal neighbors in the 3-4 chamfer metric.
pub const DIAGONAL_COST: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Uniform,
    Chamfer,
    External,
}

/// Non-negative weights, zero on background cells, with positive total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap<T> {
    field: GridField<T>,
    provenance: Provenance,
}

impl<T: Scalar> WeightMap<T> {
    /// Unit weight on every foreground cell of a 0/1 mask.
    pub fn uniform(mask: &GridField<T>) -> Result<Self> {
        mask.check_binary()?;
        Self::checked(mask.clone(), Provenance::Uniform)
    }

    /// Arbitrary weights restricted to the foreground of `mask`.
    pub fn external(weights: &GridField<T>, mask: &GridField<T>) -> Result<Self> {
        mask.check_same_dims(weights)?;
        mask.check_binary()?;
        if let Some(index) = weights.values().iter().position(|&x| x < T::zero()) {
            return Err(ItcError::NegativeWeight {
                index,
                value: weights.values()[index].to_f64().unwrap_or(f64::NAN),
            });
        }
        let values = weights
            .values()
            .iter()
            .zip(mask.values())
            .map(|(&w, &m)| w * m)
            .collect();
        Self::checked(
            GridField::from_raw(mask.width(), mask.height(), values),
            Provenance::External,
        )
    }

    fn checked(field: GridField<T>, provenance: Provenance) -> Result<Self> {
        if !(field.sum() > T::zero()) {
            return Err(ItcError::EmptyImage);
        }
        Ok(Self { field, provenance })
    }

    pub fn field(&self) -> &GridField<T> {
        &self.field
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn into_field(self) -> GridField<T> {
        self.field
    }
}

/// Two-pass 3-4 chamfer distance from each foreground cell to the nearest
/// background cell, in units of one axial step.
///
/// Cells outside the image count as background, so an all-foreground image is
/// valid input and its border cells get weight 1.
pub fn chamfer_transform<T: Scalar>(mask: &GridField<T>) -> Result<WeightMap<T>> {
    mask.check_binary()?;
    let (w, h) = mask.dims();
    let dist = chamfer_steps(mask.values(), w, h);
    let three = T::lit(AXIAL_COST as f64);
    let values = dist.iter().map(|&d| T::from_u32(d).unwrap() / three).collect();
    WeightMap::checked(GridField::from_raw(w, h, values), Provenance::Chamfer)
}

fn chamfer_steps<T: Scalar>(mask: &[T], w: usize, h: usize) -> Vec<u32> {
    const FAR: u32 = u32::MAX / 2;
    let mut d: Vec<u32> = mask
        .iter()
        .map(|&x| if x == T::one() { FAR } else { 0 })
        .collect();
    // out-of-image neighbors read as distance 0
    let at = |d: &[u32], u: isize, v: isize| -> u32 {
        if u < 0 || v < 0 || u >= w as isize || v >= h as isize {
            0
        } else {
            d[v as usize * w + u as usize]
        }
    };
    let forward = [(-1, 0, AXIAL_COST), (-1, -1, DIAGONAL_COST), (0, -1, AXIAL_COST), (1, -1, DIAGONAL_COST)];
    let backward = [(1, 0, AXIAL_COST), (1, 1, DIAGONAL_COST), (0, 1, AXIAL_COST), (-1, 1, DIAGONAL_COST)];

    for v in 0..h as isize {
        for u in 0..w as isize {
            relax(&mut d, w, u, v, &forward, at);
        }
    }
    for v in (0..h as isize).rev() {
        for u in (0..w as isize).rev() {
            relax(&mut d, w, u, v, &backward, at);
        }
    }
    d
}

fn relax(
    d: &mut [u32],
    w: usize,
    u: isize,
    v: isize,
    neighbors: &[(isize, isize, u32)],
    at: impl Fn(&[u32], isize, isize) -> u32,
) {
    let i = v as usize * w + u as usize;
    if d[i] == 0 {
        return;
    }
    let best = neighbors
        .iter()
        .map(|&(du, dv, cost)| at(d, u + du, v + dv) + cost)
        .min()
        .unwrap();
    d[i] = d[i].min(best);
}

/// Data density `P = h * G_xi` for normalized weights `h`.
pub fn weighted_density<T: Scalar>(
    weights: &WeightMap<T>,
    xi: T,
    radius_factor: T,
) -> Result<GridField<T>> {
    weighted_density_with_mask(weights, &gaussian_mask(xi, radius_factor)?)
}

pub(crate) fn weighted_density_with_mask<T: Scalar>(
    weights: &WeightMap<T>,
    mask: &FilterMask<T>,
) -> Result<GridField<T>> {
    density_with_mask(&weights.field, mask)
}
