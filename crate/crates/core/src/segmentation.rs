//! Hard assignment of foreground pixels to their nearest codebook vector.

use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{Codebook, GridField, Position};
use crate::kmeans::nearest;
use crate::scalar::Scalar;

pub const BACKGROUND: i32 = -1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub width: usize,
    pub height: usize,
    /// Row-major; [`BACKGROUND`] or an index into the codebook.
    pub labels: Vec<i32>,
}

impl LabelMap {
    pub fn get(&self, u: usize, v: usize) -> i32 {
        self.labels[v * self.width + u]
    }

    /// Number of cells carrying each label `0..m`.
    pub fn counts(&self, m: usize) -> Vec<usize> {
        let mut c = vec![0; m];
        for &l in &self.labels {
            if l >= 0 {
                c[l as usize] += 1;
            }
        }
        c
    }
}

/// Labels each foreground cell with its nearest codebook vector (squared
/// Euclidean distance, ties to the lowest index).
pub fn segment<T: Scalar>(mask: &GridField<T>, code: &Codebook<T>) -> Result<LabelMap> {
    mask.check_binary()?;
    let (w, h) = mask.dims();
    let centers = code.as_slice();
    let labels = mask
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            if x == T::one() {
                let p = Position::new(T::from_index(i % w), T::from_index(i / w));
                nearest(&p, centers).0 as i32
            } else {
                BACKGROUND
            }
        })
        .collect();
    Ok(LabelMap {
        width: w,
        height: h,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn book(v: &[(f64, f64)]) -> Codebook<f64> {
        Codebook::new(v.iter().map(|&(u, v)| Position::new(u, v)).collect()).unwrap()
    }

    #[test]
    fn single_vector_labels_everything_zero() {
        let mask = GridField::from_fn(6, 4, |u, v| ((u + v) % 2) as f64).unwrap();
        let lm = segment(&mask, &book(&[(100.0, -3.0)])).unwrap();
        for (l, &x) in lm.labels.iter().zip(mask.values()) {
            assert_eq!(*l, if x == 1.0 { 0 } else { BACKGROUND });
        }
    }

    #[test]
    fn bisector_with_tie_to_lowest() {
        let mask = GridField::from_fn(5, 3, |_, v| if v == 1 { 1.0 } else { 0.0 }).unwrap();
        let lm = segment(&mask, &book(&[(0.0, 1.0), (4.0, 1.0)])).unwrap();
        let row: Vec<_> = (0..5).map(|u| lm.get(u, 1)).collect();
        assert_eq!(row, vec![0, 0, 0, 1, 1]);
        assert!((0..5).all(|u| lm.get(u, 0) == BACKGROUND));
    }

    #[test]
    fn matches_brute_force_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mask = GridField::from_fn(20, 15, |_, _| if rng.gen_bool(0.4) { 1.0 } else { 0.0 }).unwrap();
        let code: Vec<_> = (0..4).map(|_| (rng.gen_range(0.0..20.0), rng.gen_range(0.0..15.0))).collect();
        let lm = segment(&mask, &book(&code)).unwrap();
        for v in 0..15 {
            for u in 0..20 {
                if mask.get(u, v) == 0.0 {
                    assert_eq!(lm.get(u, v), BACKGROUND);
                    continue;
                }
                let d: Vec<f64> = code
                    .iter()
                    .map(|c| (u as f64 - c.0).powi(2) + (v as f64 - c.1).powi(2))
                    .collect();
                let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
                let want = d.iter().position(|&x| x == min).unwrap() as i32;
                assert_eq!(lm.get(u, v), want);
            }
        }
        assert_eq!(lm.counts(4).iter().sum::<usize>(), mask.count_nonzero());
    }

    #[test]
    fn permuting_codebook_permutes_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mask = GridField::from_fn(16, 16, |_, _| if rng.gen_bool(0.5) { 1.0 } else { 0.0 }).unwrap();
        let code = [(2.3, 4.1), (12.7, 3.3), (8.1, 13.9)];
        let perm = [2usize, 0, 1];
        let permuted: Vec<_> = perm.iter().map(|&i| code[i]).collect();
        let a = segment(&mask, &book(&code)).unwrap();
        let b = segment(&mask, &book(&permuted)).unwrap();
        for (la, lb) in a.labels.iter().zip(&b.labels) {
            if *la == BACKGROUND {
                assert_eq!(*lb, BACKGROUND);
            } else {
                assert_eq!(perm[*lb as usize] as i32, *la);
            }
        }
    }
}
