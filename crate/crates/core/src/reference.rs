//! The original continuous-domain ITC: every iteration evaluates `O(MN)`
//! Gaussian kernels between data points and codebook vectors.
//!
//! This is the accuracy oracle for the lattice solver and the runtime
//! baseline it is measured against.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{ItcError, Result};
use crate::grid::{Codebook, PointSet, Position};
use crate::iterate::{drive, sample_codebook};
use crate::params::{DivergenceReport, ItcParams};
use crate::scalar::Scalar;
use crate::trace::{Method, RunTrace};

/// Isotropic, normalized 2D Gaussian evaluated at displacement `delta`.
pub fn gaussian_2d<T: Scalar>(delta: Position<T>, sigma: T) -> T {
    Kernel::new(sigma).eval(delta.u * delta.u + delta.v * delta.v)
}

#[derive(Clone, Copy)]
struct Kernel<T> {
    norm: T,
    inv_two_s2: T,
}

impl<T: Scalar> Kernel<T> {
    fn new(sigma: T) -> Self {
        let s2 = sigma * sigma;
        Self {
            norm: T::one() / (T::lit(2.0) * T::PI() * s2),
            inv_two_s2: T::one() / (T::lit(2.0) * s2),
        }
    }

    #[inline]
    fn eval(&self, d2: T) -> T {
        self.norm * (-d2 * self.inv_two_s2).exp()
    }
}

/// Kernel sums around one codebook vector.
#[derive(Debug, Clone, Copy)]
struct VectorSums<T> {
    /// `sum_j G_tau(x_j - w_k)` and its first moments.
    data: (T, T, T),
    /// `sum_j G_rho(w_j - w_k)` and its first moments.
    code: (T, T, T),
}

fn moment_sums<T: Scalar>(points: &[Position<T>], center: Position<T>, kernel: Kernel<T>) -> (T, T, T) {
    let (mut s0, mut su, mut sv) = (T::zero(), T::zero(), T::zero());
    for p in points {
        let g = kernel.eval(p.dist2(&center));
        s0 += g;
        su += g * p.u;
        sv += g * p.v;
    }
    (s0, su, sv)
}

fn vector_sums<T: Scalar>(data: &PointSet<T>, code: &Codebook<T>, params: &ItcParams<T>) -> Vec<VectorSums<T>> {
    let tau = Kernel::new(params.tau());
    let rho = Kernel::new(params.rho());
    code.as_slice()
        .par_iter()
        .map(|&w| VectorSums {
            data: moment_sums(data.as_slice(), w, tau),
            code: moment_sums(code.as_slice(), w, rho),
        })
        .collect()
}

/// `V(X) = (1/N^2) sum_i sum_j G_{sqrt(2) xi}(x_i - x_j)`; constant per dataset.
pub fn data_potential<T: Scalar>(data: &PointSet<T>, xi: T) -> T {
    let kernel = Kernel::new(T::SQRT_2() * xi);
    let pts = data.as_slice();
    // each pair once; per-row partials are reduced in index order
    let rows: Vec<T> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let off: T = pts[i + 1..].iter().map(|q| kernel.eval(pts[i].dist2(q))).sum();
            kernel.norm + T::lit(2.0) * off
        })
        .collect();
    let n = T::from_index(pts.len());
    rows.into_iter().sum::<T>() / (n * n)
}

fn cross_and_code<T: Scalar>(sums: &[VectorSums<T>], n: usize) -> (T, T) {
    let m = T::from_index(sums.len());
    let n = T::from_index(n);
    let cross: T = sums.iter().map(|s| s.data.0).sum();
    let code: T = sums.iter().map(|s| s.code.0).sum();
    (cross / (m * n), code / (m * m))
}

fn check_sizes<T: Scalar>(data: &PointSet<T>, code: &Codebook<T>) -> Result<()> {
    if data.is_empty() {
        return Err(ItcError::EmptyImage);
    }
    if code.is_empty() {
        return Err(ItcError::EmptyCodebook);
    }
    Ok(())
}

/// Information potentials of the Parzen densities of `data` and `code`.
pub fn potentials<T: Scalar>(
    data: &PointSet<T>,
    code: &Codebook<T>,
    params: &ItcParams<T>,
) -> Result<DivergenceReport<T>> {
    check_sizes(data, code)?;
    let (v_cross, v_code) = cross_and_code(&vector_sums(data, code, params), data.len());
    DivergenceReport::new(v_cross, v_code, data_potential(data, params.xi()))
}

fn apply_update<T: Scalar>(
    code: &Codebook<T>,
    sums: &[VectorSums<T>],
    n: usize,
    repulsion_scale: T,
) -> Result<Codebook<T>> {
    let (v_cross, v_code) = cross_and_code(sums, n);
    if !(v_code > T::zero()) {
        return Err(ItcError::DegenerateCodebook);
    }
    let c = repulsion_scale * T::from_index(n) / T::from_index(code.len()) * v_cross / v_code;
    let guard = T::denom_guard();
    let mut next = Vec::with_capacity(code.len());
    for (k, (w, s)) in code.as_slice().iter().zip(sums).enumerate() {
        let (d0, du, dv) = s.data;
        let (q0, qu, qv) = s.code;
        if !(d0 > guard) {
            return Err(ItcError::StrandedVector(k));
        }
        next.push(Position::new(
            (du - c * qu + c * q0 * w.u) / d0,
            (dv - c * qv + c * q0 * w.v) / d0,
        ));
    }
    Codebook::new(next)
}

/// One synchronous fix-point step of the continuous update rule: data
/// attraction, minus scaled codebook repulsion, plus scaled self-anchoring,
/// all divided by the data kernel mass around `w_k`.
pub fn update_codebook_reference<T: Scalar>(
    data: &PointSet<T>,
    code: &Codebook<T>,
    params: &ItcParams<T>,
) -> Result<Codebook<T>> {
    check_sizes(data, code)?;
    apply_update(code, &vector_sums(data, code, params), data.len(), params.repulsion_scale)
}

/// Iterates [`update_codebook_reference`] from a codebook sampled out of `data`.
pub fn run_reference<T: Scalar>(
    data: &PointSet<T>,
    m: usize,
    params: &ItcParams<T>,
) -> Result<(Codebook<T>, RunTrace<T>)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let init = sample_codebook(data.as_slice(), m, &mut rng)?;
    run_reference_from(data, init, params)
}

/// Like [`run_reference`] but starting from a caller-supplied codebook.
pub fn run_reference_from<T: Scalar>(
    data: &PointSet<T>,
    init: Codebook<T>,
    params: &ItcParams<T>,
) -> Result<(Codebook<T>, RunTrace<T>)> {
    params.validate()?;
    check_sizes(data, &init)?;
    let start = Instant::now();
    let v_data = data_potential(data, params.xi());
    let setup = start.elapsed().as_secs_f64();
    let n = data.len();
    drive(
        params,
        Method::ItcReference,
        init,
        setup,
        |code| {
            let sums = vector_sums(data, code, params);
            let (v_cross, v_code) = cross_and_code(&sums, n);
            let report = DivergenceReport::new(v_cross, v_code, v_data)?;
            Ok((report.d_cs, sums))
        },
        |code, sums| {
            let next = apply_update(code, sums, n, params.repulsion_scale)?;
            let moved = next.max_movement(code);
            Ok((next, moved))
        },
    )
}
