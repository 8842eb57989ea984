use lattice_itc::{
    convolve_separable, convolve_sparse, extract_points, gaussian_mask, lattice_potentials, rasterize,
    update_codebook_reference, Codebook64, GridField64, ItcParams64, PointSet64, Position64,
};
use proptest::prelude::*;

fn mask_strategy() -> impl Strategy<Value = GridField64> {
    (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<bool>(), w * h).prop_filter_map("empty mask", move |cells| {
            cells.iter().any(|&c| c).then(|| {
                GridField64::from_vec(w, h, cells.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect()).unwrap()
            })
        })
    })
}

fn points_strategy(max: usize) -> impl Strategy<Value = Vec<Position64>> {
    proptest::collection::vec((-5.0..25.0, -5.0..25.0), 1..max)
        .prop_map(|v| v.into_iter().map(|(u, v)| Position64::new(u, v)).collect())
}

proptest! {
    #[test]
    fn rasterize_keeps_total_mass(points in points_strategy(40), w in 1usize..16, h in 1usize..16) {
        let f = rasterize(&points, w, h, 0.25).unwrap();
        prop_assert!((f.sum() - 0.25 * points.len() as f64).abs() < 1e-12);
    }

    #[test]
    fn extracted_points_rasterize_back_to_the_mask(mask in mask_strategy()) {
        let (w, h) = mask.dims();
        let pts = extract_points(&mask).unwrap();
        prop_assert_eq!(pts.len(), mask.count_nonzero());
        prop_assert_eq!(rasterize(pts.as_slice(), w, h, 1.0).unwrap(), mask);
    }

    #[test]
    fn sparse_and_separable_convolutions_agree(
        cells in proptest::collection::vec((0usize..24, 0usize..18, 0.0..1.0), 0..12),
        sigma in 0.3..4.0,
    ) {
        let mut f = GridField64::zeros(24, 18).unwrap();
        for (u, v, x) in cells {
            f.set(u, v, f.get(u, v) + x).unwrap();
        }
        let mask = gaussian_mask(sigma, 3.0).unwrap();
        let (a, b) = (convolve_separable(&f, &mask), convolve_sparse(&f, &mask));
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn reference_update_commutes_with_translation(
        data in points_strategy(30),
        code in points_strategy(6),
        (du, dv) in (-50.0..50.0, -50.0..50.0),
    ) {
        let params = ItcParams64::new(1.5, 3.0).unwrap();
        // far from every data point the data mass underflows toward zero and
        // the update amplifies rounding by its inverse
        let reach = (3.0 * params.tau()).powi(2);
        prop_assume!(code.iter().all(|w| data.iter().any(|x| x.dist2(w) <= reach)));
        let data = PointSet64::new(data);
        let code = Codebook64::new(code).unwrap();
        let moved = update_codebook_reference(&data.translated(du, dv), &code.translated(du, dv), &params);
        let plain = update_codebook_reference(&data, &code, &params);
        if let (Ok(a), Ok(b)) = (moved, plain) {
            prop_assert!(a.max_movement(&b.translated(du, dv)) < 1e-6);
        }
    }

    #[test]
    fn lattice_divergence_is_nonnegative(
        a in proptest::collection::vec(0.0..1.0, 64),
        b in proptest::collection::vec(0.0..1.0, 64),
    ) {
        let p = GridField64::from_vec(8, 8, a).unwrap();
        let q = GridField64::from_vec(8, 8, b).unwrap();
        if let Ok(r) = lattice_potentials(&p, &q) {
            prop_assert!(r.d_cs >= -1e-9);
        }
    }
}
