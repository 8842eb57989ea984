//! Fix-point driver shared by the reference and lattice solvers.

use std::time::Instant;

use rand::seq::index;
use rand_chacha::ChaCha8Rng;

use crate::error::{ItcError, Result};
use crate::grid::{Codebook, Position};
use crate::params::ItcParams;
use crate::scalar::Scalar;
use crate::trace::{Method, RunTrace};

/// Picks `m` distinct data positions as the initial codebook.
pub(crate) fn sample_codebook<T: Scalar>(
    data: &[Position<T>],
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Codebook<T>> {
    if m == 0 || m > data.len() {
        return Err(ItcError::InvalidM { m, n: data.len() });
    }
    let picks = index::sample(rng, data.len(), m);
    Codebook::new(picks.iter().map(|i| data[i]).collect())
}

pub(crate) fn relative_change<T: Scalar>(prev: T, cur: T) -> T {
    let scale = prev.abs().max(T::min_positive_value());
    (cur - prev).abs() / scale
}

/// Runs `evaluate` / `update` until the divergence settles, the codebook stops
/// moving, or `max_iter` updates have been made.
///
/// `evaluate` returns the divergence of the given codebook plus whatever state
/// the update needs; `update` returns the next codebook and the largest
/// coordinate movement.
pub(crate) fn drive<T, S>(
    params: &ItcParams<T>,
    method: Method,
    init: Codebook<T>,
    setup_seconds: f64,
    mut evaluate: impl FnMut(&Codebook<T>) -> Result<(T, S)>,
    mut update: impl FnMut(&Codebook<T>, &S) -> Result<(Codebook<T>, T)>,
) -> Result<(Codebook<T>, RunTrace<T>)>
where
    T: Scalar,
{
    let mut trace = RunTrace::new(method);
    params.echo_into(&mut trace);
    trace.echo("m", init.len());
    trace.setup_seconds = setup_seconds;

    let mut code = init;
    let mut prev_dcs: Option<T> = None;
    let mut last_move: Option<T> = None;
    loop {
        let start = Instant::now();
        let (dcs, state) = evaluate(&code)?;
        let settled = prev_dcs.is_some_and(|p| relative_change(p, dcs) <= params.eps_dcs)
            || last_move.is_some_and(|mv| mv <= params.theta);
        if settled || trace.iterations >= params.max_iter {
            trace.push(start.elapsed().as_secs_f64(), dcs, Some(code.clone()));
            trace.converged = settled;
            return Ok((code, trace));
        }
        let (next, moved) = update(&code, &state)?;
        trace.push(start.elapsed().as_secs_f64(), dcs, Some(code));
        trace.iterations += 1;
        code = next;
        prev_dcs = Some(dcs);
        last_move = Some(moved);
    }
}
