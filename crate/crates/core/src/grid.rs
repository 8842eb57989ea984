//! Lattice data types and the binary-image / point-set isomorphism.
//!
//! Positions are `(u, v)` with `u` the column index and `v` the row index,
//! origin at the top-left cell. Fields are stored row-major.

use crate::error::{ItcError, Result};
use crate::scalar::Scalar;

/// A continuous position in lattice units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position<T> {
    pub u: T,
    pub v: T,
}

impl<T: Scalar> Position<T> {
    pub fn new(u: T, v: T) -> Self {
        Self { u, v }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn dist2(&self, other: &Self) -> T {
        let du = self.u - other.u;
        let dv = self.v - other.v;
        du * du + dv * dv
    }

    /// Nearest lattice cell, rounding half away from zero and clamping into a
    /// `width` x `height` grid.
    pub fn nearest_cell(&self, width: usize, height: usize) -> (usize, usize) {
        (clamp_round(self.u, width), clamp_round(self.v, height))
    }
}

fn clamp_round<T: Scalar>(x: T, extent: usize) -> usize {
    let r = x.round();
    if r <= T::zero() {
        0
    } else {
        let max = extent - 1;
        r.to_usize().map_or(max, |i| i.min(max))
    }
}

/// Dense row-major 2D lattice of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T> {
    width: usize,
    height: usize,
    values: Vec<T>,
}

impl<T: Scalar> GridField<T> {
    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            values: vec![T::zero(); width * height],
        })
    }

    pub fn from_vec(width: usize, height: usize, values: Vec<T>) -> Result<Self> {
        check_dims(width, height)?;
        if values.len() != width * height {
            return Err(ItcError::LengthMismatch {
                len: values.len(),
                expected: width * height,
            });
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(ItcError::NonFinite(i));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        check_dims(width, height)?;
        let mut values = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                values.push(f(u, v));
            }
        }
        Self::from_vec(width, height, values)
    }

    /// Internal constructor for buffers produced by trusted arithmetic.
    pub(crate) fn from_raw(width: usize, height: usize, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), width * height);
        Self {
            width,
            height,
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> T {
        self.values[v * self.width + u]
    }

    /// Sets a cell; non-finite values are rejected to keep the field invariant.
    pub fn set(&mut self, u: usize, v: usize, value: T) -> Result<()> {
        if !value.is_finite() {
            return Err(ItcError::NonFinite(v * self.width + u));
        }
        self.values[v * self.width + u] = value;
        Ok(())
    }

    pub fn row(&self, v: usize) -> &[T] {
        &self.values[v * self.width..(v + 1) * self.width]
    }

    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }

    pub fn min_max(&self) -> (T, T) {
        self.values
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    }

    /// Number of cells whose value is nonzero.
    pub fn count_nonzero(&self) -> usize {
        self.values.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&x| x == T::zero() || x == T::one())
    }

    pub(crate) fn check_binary(&self) -> Result<()> {
        match self
            .values
            .iter()
            .position(|&x| x != T::zero() && x != T::one())
        {
            None => Ok(()),
            Some(i) => Err(ItcError::NotBinary {
                u: i % self.width,
                v: i / self.width,
                value: self.values[i].to_f64().unwrap_or(f64::NAN),
            }),
        }
    }

    pub(crate) fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() == other.dims() {
            Ok(())
        } else {
            Err(ItcError::DimensionMismatch(self.dims(), other.dims()))
        }
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self::from_raw(
            self.width,
            self.height,
            self.values.iter().map(|&x| x * factor).collect(),
        )
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        Err(ItcError::EmptyGrid { width, height })
    } else {
        Ok(())
    }
}

/// Ordered set of data positions, e.g. the foreground pixels of a mask.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet<T> {
    pub points: Vec<Position<T>>,
}

impl<T: Scalar> PointSet<T> {
    pub fn new(points: Vec<Position<T>>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn as_slice(&self) -> &[Position<T>] {
        &self.points
    }

    pub fn translated(&self, du: T, dv: T) -> Self {
        Self::new(
            self.points
                .iter()
                .map(|p| Position::new(p.u + du, p.v + dv))
                .collect(),
        )
    }
}

/// The `M >= 1` cluster centers being optimized.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook<T> {
    vectors: Vec<Position<T>>,
}

impl<T: Scalar> Codebook<T> {
    pub fn new(vectors: Vec<Position<T>>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(ItcError::EmptyCodebook);
        }
        if let Some(i) = vectors.iter().position(|p| !p.is_finite()) {
            return Err(ItcError::NonFinite(i));
        }
        Ok(Self { vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn as_slice(&self) -> &[Position<T>] {
        &self.vectors
    }

    pub fn get(&self, k: usize) -> Position<T> {
        self.vectors[k]
    }

    pub fn translated(&self, du: T, dv: T) -> Self {
        Self {
            vectors: self
                .vectors
                .iter()
                .map(|p| Position::new(p.u + du, p.v + dv))
                .collect(),
        }
    }

    /// Largest per-coordinate displacement between two codebooks of equal size.
    pub fn max_movement(&self, other: &Self) -> T {
        self.vectors
            .iter()
            .zip(&other.vectors)
            .fold(T::zero(), |acc, (a, b)| {
                acc.max((a.u - b.u).abs()).max((a.v - b.v).abs())
            })
    }
}

/// Foreground cells of a 0/1 mask in row-major scan order.
pub fn extract_points<T: Scalar>(mask: &GridField<T>) -> Result<PointSet<T>> {
    mask.check_binary()?;
    let mut points = Vec::new();
    for v in 0..mask.height() {
        for (u, &x) in mask.row(v).iter().enumerate() {
            if x == T::one() {
                points.push(Position::new(T::from_index(u), T::from_index(v)));
            }
        }
    }
    if points.is_empty() {
        return Err(ItcError::EmptyImage);
    }
    Ok(PointSet::new(points))
}

/// Deposits `weight_per_point` at the nearest cell of every position. Points
/// outside the grid are clamped to the border, so total mass is preserved.
pub fn rasterize<T: Scalar>(
    points: &[Position<T>],
    width: usize,
    height: usize,
    weight_per_point: T,
) -> Result<GridField<T>> {
    let mut field = GridField::zeros(width, height)?;
    for p in points {
        let (u, v) = p.nearest_cell(width, height);
        field.values[v * width + u] += weight_per_point;
    }
    Ok(field)
}
