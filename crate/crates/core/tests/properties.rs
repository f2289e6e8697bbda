use convex_lines::count::{brute_force_enum, count_lines_k, max_vertices};
use convex_lines::gibbs::{log_partition, moments, GibbsParams};
use convex_lines::lattice::{
    omega_to_polyline, polyline_to_omega, primitive_vectors_in_box, ConvexPolyline,
    MultiplicityDistribution, PrimitiveVector,
};
use convex_lines::shapes::{hausdorff_distance, normalize, polyline_hausdorff, ShapeCurve};
use convex_lines::special::{c_of_ell, e_of_ell, residue_log_z};
use num_bigint::BigUint;
use proptest::prelude::*;

fn primitive() -> impl Strategy<Value = PrimitiveVector> {
    (0u32..40, 0u32..40)
        .prop_filter("primitive", |&(a, b)| num_integer::gcd(a, b) == 1)
        .prop_map(|(a, b)| PrimitiveVector::new(a, b).unwrap())
}

fn omega() -> impl Strategy<Value = MultiplicityDistribution> {
    prop::collection::vec((primitive(), 0u64..5), 0..12)
        .prop_map(MultiplicityDistribution::from_pairs)
}

proptest! {
    #[test]
    fn bijection_round_trips(w in omega()) {
        let line = omega_to_polyline(&w);
        prop_assert_eq!(polyline_to_omega(&line).unwrap(), w.clone());
        let again = ConvexPolyline::new(line.vertices().to_vec()).unwrap();
        prop_assert_eq!(omega_to_polyline(&polyline_to_omega(&again).unwrap()), line);
    }

    #[test]
    fn endpoint_is_last_vertex(w in omega()) {
        let line = omega_to_polyline(&w);
        prop_assert_eq!(*line.vertices().last().unwrap(), w.endpoint());
        prop_assert_eq!(line.edge_count(), w.vertex_count());
    }

    #[test]
    fn zero_multiplicities_vanish(pairs in prop::collection::vec((primitive(), 0u64..3), 0..10)) {
        let w = MultiplicityDistribution::from_pairs(pairs.clone());
        prop_assert!(w.iter().all(|(_, m)| m > 0));
        let support: std::collections::BTreeSet<_> =
            w.iter().map(|(v, _)| v).collect();
        prop_assert_eq!(support.len(), w.vertex_count());
    }

    #[test]
    fn box_in_strict_slope_order(n1 in 1u32..60, n2 in 1u32..60) {
        let order = primitive_vectors_in_box(n1, n2).unwrap();
        for w in order.as_slice().windows(2) {
            let cross = w[0].x1() as i64 * w[1].x2() as i64 - w[0].x2() as i64 * w[1].x1() as i64;
            prop_assert!(cross > 0);
        }
        prop_assert!(order.iter().all(|v| v.x1() <= n1 && v.x2() <= n2));
    }

    #[test]
    fn counts_are_symmetric(n1 in 1u32..14, n2 in 1u32..14) {
        let a = count_lines_k(n1, n2, 8).unwrap();
        let b = count_lines_k(n2, n1, 8).unwrap();
        prop_assert_eq!(a.at_endpoint(), b.at_endpoint());
    }

    #[test]
    fn residue_scales_inverse_quadratically(b1 in 0.01f64..2.0, b2 in 0.01f64..2.0, lam in 0.01f64..50.0, t in 0.1f64..10.0) {
        let r = residue_log_z(b1, b2, lam).unwrap();
        let s = residue_log_z(t * b1, t * b2, lam).unwrap();
        prop_assert!((s * t * t - r).abs() <= 1e-12 * r.abs());
    }

    #[test]
    fn covariance_is_positive_definite(b1 in 0.2f64..1.5, b2 in 0.2f64..1.5, lam in 0.05f64..20.0) {
        let m = moments(&GibbsParams::linear(b1, b2, lam)).unwrap();
        prop_assert!(m.is_psd());
        prop_assert!(m.smallest_eigenvalue > 0.0);
        prop_assert!(log_partition(&GibbsParams::linear(b1, b2, lam)).unwrap() > 0.0);
    }

    #[test]
    fn hausdorff_is_symmetric_and_bounded(w in omega()) {
        prop_assume!(!w.is_empty());
        let line = omega_to_polyline(&w);
        let end = line.endpoint();
        prop_assume!(end[0] > 0 && end[1] > 0);
        let pts: Vec<[f64; 2]> = line
            .vertices()
            .iter()
            .map(|v| [v[0] as f64 / end[0] as f64, v[1] as f64 / end[1] as f64])
            .collect();
        let curve = ShapeCurve::parabola();
        let norm = normalize(&line, [end[0] as f64, end[1] as f64]).unwrap();
        prop_assert!(norm.vertices.iter().zip(&pts).all(|(a, b)| a == b));
        let d = hausdorff_distance(&norm, &curve, 400).unwrap();
        prop_assert!((0.0..=2f64.sqrt()).contains(&d));
        let diag = vec![[0.0, 0.0], [1.0, 1.0]];
        let ab = polyline_hausdorff(&pts, &diag, 400).unwrap();
        let ba = polyline_hausdorff(&diag, &pts, 400).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
    }

    #[test]
    fn vertex_constants_below_peak(ell in 0.001f64..1000.0) {
        prop_assume!((ell - 1.0).abs() > 1e-3);
        prop_assert!(e_of_ell(ell).unwrap() < e_of_ell(1.0).unwrap());
        let c = c_of_ell(ell).unwrap();
        prop_assert!(c > 0.0 && c < 3.0 * std::f64::consts::PI.powf(-2.0 / 3.0));
    }
}

#[test]
fn dp_matches_brute_force_up_to_eight() {
    for n1 in 1..=8 {
        for n2 in 1..=8 {
            let lines = brute_force_enum(n1, n2).unwrap();
            let kmax = lines.iter().map(|w| w.vertex_count()).max().unwrap();
            let table = count_lines_k(n1, n2, kmax + 1).unwrap();
            let got = table.at_endpoint();
            for (k, c) in got.iter().enumerate() {
                let direct = lines.iter().filter(|w| w.vertex_count() == k).count();
                assert_eq!(*c, BigUint::from(direct), "({n1},{n2}) k={k}");
            }
        }
    }
}

#[test]
fn support_is_exactly_one_to_max() {
    for n in 1..=24u32 {
        let m = max_vertices(n, n).unwrap();
        let row = count_lines_k(n, n, m + 2).unwrap().at_endpoint();
        for (k, c) in row.iter().enumerate() {
            let positive = *c > BigUint::from(0u32);
            assert_eq!(positive, (1..=m).contains(&k), "n={n} k={k}");
        }
    }
}

#[test]
fn primitive_density_at_two_thousand() {
    let n = 2000u32;
    let order = primitive_vectors_in_box(n, n).unwrap();
    // Points with both coordinates >= 1, matching the counting measure on the open quadrant.
    let interior = order.iter().filter(|v| !v.is_axis()).count() as f64;
    let ratio = interior / (n as f64 * n as f64);
    let target = 6.0 / std::f64::consts::PI.powi(2);
    assert!((ratio / target - 1.0).abs() < 0.01, "{ratio}");
}
