//! Convolution-based ITC for data living on a 2D lattice.
//!
//! Both densities are grid fields obtained by convolving impulse images with
//! precomputed Gaussian masks: `P = X * G_xi` once per run and
//! `Q = W * G_omega` once per iteration. The codebook update only needs
//! mask-weighted moments of `P` and `Q` in a window around each vector, so no
//! distances or exponentials are evaluated inside the loop.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::conv::{
    convolve_separable, convolve_sparse, gaussian_mask, local_weighted_sums, local_weighted_sums_pair, FilterMask,
};
use crate::error::{ItcError, Result};
use crate::grid::{extract_points, rasterize, Codebook, GridField, Position};
use crate::iterate::{drive, sample_codebook};
use crate::params::{DivergenceReport, ItcParams};
use crate::scalar::Scalar;
use crate::trace::{Method, RunTrace};
use crate::weighting::{weighted_density_with_mask, WeightMap};

/// Upper bound on stranded-vector re-samplings per codebook vector and run.
pub const RESAMPLES_PER_VECTOR: usize = 10;

/// Normalizes `mask_image` to unit mass and smooths it with a `sigma` mask.
pub fn density_from_mask<T: Scalar>(
    mask_image: &GridField<T>,
    sigma: T,
    radius_factor: T,
) -> Result<GridField<T>> {
    let mask = gaussian_mask(sigma, radius_factor)?;
    density_with_mask(mask_image, &mask)
}

pub(crate) fn density_with_mask<T: Scalar>(
    field: &GridField<T>,
    mask: &FilterMask<T>,
) -> Result<GridField<T>> {
    let total = field.sum();
    if !(total > T::zero()) {
        return Err(ItcError::EmptyImage);
    }
    Ok(convolve_separable(&field.scaled(T::one() / total), mask))
}

/// `Q`: the codebook rasterized with weight `1/M` per vector, then smoothed.
pub fn codebook_density<T: Scalar>(
    code: &Codebook<T>,
    width: usize,
    height: usize,
    omega_mask: &FilterMask<T>,
) -> Result<GridField<T>> {
    let impulses = rasterize(
        code.as_slice(),
        width,
        height,
        T::one() / T::from_index(code.len()),
    )?;
    Ok(convolve_sparse(&impulses, omega_mask))
}

fn dot<T: Scalar>(a: &GridField<T>, b: &GridField<T>) -> T {
    a.values().iter().zip(b.values()).map(|(&x, &y)| x * y).sum()
}

/// Discrete information potentials `sum P Q`, `sum Q^2` and `sum P^2`.
pub fn lattice_potentials<T: Scalar>(
    p_field: &GridField<T>,
    q_field: &GridField<T>,
) -> Result<DivergenceReport<T>> {
    p_field.check_same_dims(q_field)?;
    potentials_with_data(p_field, q_field, dot(p_field, p_field))
}

fn potentials_with_data<T: Scalar>(
    p_field: &GridField<T>,
    q_field: &GridField<T>,
    v_data: T,
) -> Result<DivergenceReport<T>> {
    DivergenceReport::new(dot(p_field, q_field), dot(q_field, q_field), v_data)
}

/// Everything one lattice update reads.
#[derive(Debug, Clone)]
pub struct LatticeItcState<T> {
    pub p_field: GridField<T>,
    pub q_field: GridField<T>,
    pub code: Codebook<T>,
    pub xi_mask: FilterMask<T>,
    pub omega_mask: FilterMask<T>,
    pub report: DivergenceReport<T>,
}

impl<T: Scalar> LatticeItcState<T> {
    /// Builds `Q` and the potentials for `code` on top of a precomputed `P`.
    pub fn new(
        p_field: GridField<T>,
        code: Codebook<T>,
        xi_mask: FilterMask<T>,
        omega_mask: FilterMask<T>,
    ) -> Result<Self> {
        let (w, h) = p_field.dims();
        let q_field = codebook_density(&code, w, h, &omega_mask)?;
        let report = lattice_potentials(&p_field, &q_field)?;
        Ok(Self {
            p_field,
            q_field,
            code,
            xi_mask,
            omega_mask,
            report,
        })
    }

    /// Replaces the codebook and rebuilds `Q` and the potentials.
    pub fn set_codebook(&mut self, code: Codebook<T>) -> Result<()> {
        let (w, h) = self.p_field.dims();
        self.q_field = codebook_density(&code, w, h, &self.omega_mask)?;
        self.report = potentials_with_data(&self.p_field, &self.q_field, self.report.v_data)?;
        self.code = code;
        Ok(())
    }
}

/// Window moments of `P` around every cell, precomputed once per run.
///
/// With symmetric taps, the `omega`-window sums of `P` centered at a cell are
/// the convolutions of `P`, `u P` and `v P` with the same mask evaluated at
/// that cell, and `P` never changes during a run.
struct DataMoments<T> {
    s0: GridField<T>,
    su: GridField<T>,
    sv: GridField<T>,
}

impl<T: Scalar> DataMoments<T> {
    fn new(p_field: &GridField<T>, mask: &FilterMask<T>) -> Result<Self> {
        let (w, h) = p_field.dims();
        let su = GridField::from_fn(w, h, |u, v| p_field.get(u, v) * T::from_index(u))?;
        let sv = GridField::from_fn(w, h, |u, v| p_field.get(u, v) * T::from_index(v))?;
        Ok(Self {
            s0: convolve_separable(p_field, mask),
            su: convolve_separable(&su, mask),
            sv: convolve_separable(&sv, mask),
        })
    }

    fn at(&self, center: Position<T>) -> (T, T, T) {
        let (u, v) = center.nearest_cell(self.s0.width(), self.s0.height());
        (self.s0.get(u, v), self.su.get(u, v), self.sv.get(u, v))
    }
}

/// New position of one vector from the window sums of `P` and `Q` around it,
/// or `None` when the data mass there is numerically zero.
fn step_vector<T: Scalar>(
    (p0, pu, pv): (T, T, T),
    (q0, qu, qv): (T, T, T),
    w: Position<T>,
    c: T,
) -> Option<Position<T>> {
    if !(p0 > T::denom_guard()) {
        return None;
    }
    Some(Position::new(
        (pu - c * qu + c * q0 * w.u) / p0,
        (pv - c * qv + c * q0 * w.v) / p0,
    ))
}

fn step_all<T: Scalar>(
    p_field: &GridField<T>,
    data_moments: Option<&DataMoments<T>>,
    q_field: &GridField<T>,
    mask: &FilterMask<T>,
    code: &Codebook<T>,
    report: &DivergenceReport<T>,
) -> Vec<Option<Position<T>>> {
    let c = report.v_cross / report.v_code;
    code.as_slice()
        .par_iter()
        .map(|&w| {
            let (p, q) = match data_moments {
                Some(dm) => (dm.at(w), local_weighted_sums(q_field, mask, w)),
                None => {
                    let [p, q] = local_weighted_sums_pair(p_field, q_field, mask, w);
                    (p, q)
                }
            };
            step_vector(p, q, w, c)
        })
        .collect()
}

/// One synchronous update of every codebook vector from the window moments
/// of `P` and `Q` around it, with `c = V(X;W) / V(W)`.
pub fn update_codebook_lattice<T: Scalar>(state: &LatticeItcState<T>) -> Result<Codebook<T>> {
    let steps = step_all(
        &state.p_field,
        None,
        &state.q_field,
        &state.omega_mask,
        &state.code,
        &state.report,
    );
    let next = steps
        .into_iter()
        .enumerate()
        .map(|(k, s)| s.ok_or(ItcError::StrandedVector(k)))
        .collect::<Result<Vec<_>>>()?;
    Codebook::new(next)
}

/// Accelerated ITC on a binary image.
///
/// Initializes the codebook by sampling foreground pixels, computes `P` once
/// (from `weights` when given), then alternates rebuilding `Q`, evaluating the
/// potentials and updating all vectors. A stranded vector is re-sampled from
/// the foreground, which counts as infinite movement for the stopping test.
pub fn run_lattice<T: Scalar>(
    mask_image: &GridField<T>,
    m: usize,
    params: &ItcParams<T>,
    weights: Option<&GridField<T>>,
) -> Result<(Codebook<T>, RunTrace<T>)> {
    params.validate()?;
    let points = extract_points(mask_image)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let init = sample_codebook(points.as_slice(), m, &mut rng)?;
    let weight_map = weights
        .map(|w| WeightMap::external(w, mask_image))
        .transpose()?;

    let start = Instant::now();
    let xi_mask = gaussian_mask(params.xi(), params.radius_factor)?;
    let omega_mask = gaussian_mask(params.omega(), params.radius_factor)?;
    let p_field = match &weight_map {
        None => density_with_mask(mask_image, &xi_mask)?,
        Some(wm) => weighted_density_with_mask(wm, &xi_mask)?,
    };
    let v_data = dot(&p_field, &p_field);
    let data_moments = DataMoments::new(&p_field, &omega_mask)?;
    let setup = start.elapsed().as_secs_f64();

    let (w, h) = mask_image.dims();
    let budget = RESAMPLES_PER_VECTOR * m;
    let mut resampled = 0usize;
    let (code, mut trace) = drive(
        params,
        Method::ItcLattice,
        init,
        setup,
        |code| {
            let q_field = codebook_density(code, w, h, &omega_mask)?;
            let report = potentials_with_data(&p_field, &q_field, v_data)?;
            Ok((report.d_cs, (q_field, report)))
        },
        |code, (q_field, report)| {
            let steps = step_all(&p_field, Some(&data_moments), q_field, &omega_mask, code, report);
            let mut moved = T::zero();
            let mut next = Vec::with_capacity(code.len());
            for (old, step) in code.as_slice().iter().zip(steps) {
                match step {
                    Some(p) => {
                        moved = moved.max((p.u - old.u).abs()).max((p.v - old.v).abs());
                        next.push(p);
                    }
                    None => {
                        resampled += 1;
                        if resampled > budget {
                            return Err(ItcError::StrandedRetriesExhausted(budget));
                        }
                        next.push(points.points[rng.gen_range(0..points.len())]);
                        moved = T::infinity();
                    }
                }
            }
            Ok((Codebook::new(next)?, moved))
        },
    )?;
    trace.echo("weighted", weight_map.is_some());
    trace.echo("resampled", resampled);
    Ok((code, trace))
}
