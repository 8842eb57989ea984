//! Lloyd's k-means on foreground pixel coordinates, used as the baseline.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{ItcError, Result};
use crate::grid::{Codebook, PointSet, Position};
use crate::iterate::sample_codebook;
use crate::scalar::Scalar;
use crate::trace::{Method, RunTrace};

#[derive(Debug, Clone)]
pub struct KmeansResult<T> {
    pub centers: Codebook<T>,
    /// Cluster index per data point.
    pub labels: Vec<usize>,
    /// Sum of squared distances to the assigned centers.
    pub inertia: T,
    /// Number of mean updates performed.
    pub iterations: usize,
    /// Inertia after the initial assignment and after every update.
    pub inertia_history: Vec<T>,
    pub trace: RunTrace<T>,
}

/// Index of the nearest center; ties go to the lowest index.
pub(crate) fn nearest<T: Scalar>(p: &Position<T>, centers: &[Position<T>]) -> (usize, T) {
    let mut best = (0, p.dist2(&centers[0]));
    for (k, c) in centers.iter().enumerate().skip(1) {
        let d = p.dist2(c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

fn assign<T: Scalar>(data: &[Position<T>], centers: &[Position<T>]) -> (Vec<usize>, Vec<T>) {
    data.par_iter().map(|p| nearest(p, centers)).unzip()
}

/// Cluster means; empty clusters are moved onto the point farthest from its
/// current center.
fn update_centers<T: Scalar>(
    data: &[Position<T>],
    labels: &[usize],
    dists: &[T],
    m: usize,
) -> Vec<Position<T>> {
    let mut sums = vec![(T::zero(), T::zero(), 0usize); m];
    for (p, &k) in data.iter().zip(labels) {
        sums[k].0 += p.u;
        sums[k].1 += p.v;
        sums[k].2 += 1;
    }
    let mut slack: Vec<T> = dists.to_vec();
    sums.iter()
        .map(|&(su, sv, n)| {
            if n > 0 {
                let n = T::from_index(n);
                Position::new(su / n, sv / n)
            } else {
                let far = slack
                    .iter()
                    .enumerate()
                    .fold(0, |best, (i, &d)| if d > slack[best] { i } else { best });
                slack[far] = T::zero();
                data[far]
            }
        })
        .collect()
}

/// Runs Lloyd iterations from `m` distinct seeded samples until the
/// assignment no longer changes or `max_iter` updates have been made.
pub fn run_kmeans<T: Scalar>(
    data: &PointSet<T>,
    m: usize,
    seed: u64,
    max_iter: usize,
) -> Result<KmeansResult<T>> {
    if data.is_empty() {
        return Err(ItcError::EmptyImage);
    }
    let pts = data.as_slice();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = sample_codebook(pts, m, &mut rng)?.as_slice().to_vec();

    let mut trace = RunTrace::new(Method::Kmeans);
    trace.echo("m", m);
    trace.echo("seed", seed);
    trace.echo("max_iter", max_iter);

    let start = Instant::now();
    let (mut labels, mut dists) = assign(pts, &centers);
    let mut inertia: T = dists.iter().copied().sum();
    let mut history = vec![inertia];
    trace.push(start.elapsed().as_secs_f64(), inertia, None);

    let mut iterations = 0;
    while iterations < max_iter {
        let start = Instant::now();
        centers = update_centers(pts, &labels, &dists, m);
        let (next_labels, next_dists) = assign(pts, &centers);
        iterations += 1;
        inertia = next_dists.iter().copied().sum();
        history.push(inertia);
        trace.push(start.elapsed().as_secs_f64(), inertia, None);
        let stable = next_labels == labels;
        labels = next_labels;
        dists = next_dists;
        if stable {
            trace.converged = true;
            break;
        }
    }
    trace.iterations = iterations;

    Ok(KmeansResult {
        centers: Codebook::new(centers)?,
        labels,
        inertia,
        iterations,
        inertia_history: history,
        trace,
    })
}
