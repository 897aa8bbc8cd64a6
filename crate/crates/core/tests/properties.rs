use lo_einstein::curvature::{gradient_ratio, s_tilde_ratio, scalar_curvature_general, scalar_curvature_triangular};
use lo_einstein::metric::{cholesky_canonical, RatioCoordinates, TriangularMetric};
use lo_einstein::{Frame, Metric};
use proptest::prelude::*;

fn metric_strategy(max_n: usize) -> impl Strategy<Value = Metric> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0.3f64..3.0, n),
            prop::collection::vec(-2.0f64..2.0, n * (n - 1) / 2),
        )
            .prop_map(|(x, u)| TriangularMetric::from_ratio_coords(&RatioCoordinates { x, u }).unwrap())
    })
}

fn orthogonal_strategy(n: usize) -> impl Strategy<Value = Frame> {
    prop::collection::vec(-1.0f64..1.0, n * n)
        .prop_filter_map("rank deficient", move |v| Frame::new(n, n, v).unwrap().orthonormalize().ok())
}

fn metric_with_orthogonal(max_n: usize) -> impl Strategy<Value = (Metric, Frame)> {
    metric_strategy(max_n).prop_flat_map(|a| {
        let n = a.n();
        (Just(a), orthogonal_strategy(n))
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn general_and_triangular_formulas_agree(a in metric_strategy(6)) {
        let g = scalar_curvature_general(a.as_frame()).unwrap();
        let t = scalar_curvature_triangular(&a);
        prop_assert!(rel(g, t) <= 1e-10, "{g} vs {t}");
    }

    #[test]
    fn orthogonal_invariance((a, q) in metric_with_orthogonal(5)) {
        let qa = q.matmul(a.as_frame()).unwrap();
        let s = scalar_curvature_general(&qa).unwrap();
        prop_assert!(rel(s, scalar_curvature_triangular(&a)) <= 1e-9);
    }

    #[test]
    fn cholesky_recovers_from_left_orthogonal((a, q) in metric_with_orthogonal(5)) {
        let qa = q.matmul(a.as_frame()).unwrap();
        let l = cholesky_canonical(&qa).unwrap();
        let scale = a.as_frame().as_slice().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(l.as_frame().max_abs_diff(a.as_frame()).unwrap() <= 1e-10 * scale);
    }

    #[test]
    fn cholesky_is_idempotent(a in metric_strategy(6)) {
        let l = cholesky_canonical(a.as_frame()).unwrap();
        prop_assert!(l.as_frame().max_abs_diff(a.as_frame()).unwrap() <= 1e-13);
    }

    #[test]
    fn homogeneity(a in metric_strategy(5), c in prop::sample::select(vec![0.5, 2.0, 3.0])) {
        let s = scalar_curvature_triangular(&a);
        let sc = scalar_curvature_triangular(&a.scale(c).unwrap());
        prop_assert!(rel(sc, c * c * s) <= 1e-12);
    }

    #[test]
    fn block_additivity(a in metric_strategy(3), b in metric_strategy(3)) {
        let d = a.block_diag(&b);
        let want = scalar_curvature_triangular(&a) + scalar_curvature_triangular(&b);
        prop_assert!(rel(scalar_curvature_triangular(&d), want) <= 1e-10);
        prop_assert!(rel(d.volume(), a.volume() * b.volume()) <= 1e-12);
    }

    #[test]
    fn inverse_is_inverse(a in metric_strategy(6)) {
        let prod = a.inverse().matmul(a.as_frame()).unwrap();
        prop_assume!(a.as_frame().inverse().is_ok());
        prop_assert!(prod.max_abs_diff(&Frame::identity(a.n())).unwrap() <= 1e-12);
    }

    #[test]
    fn ratio_round_trip(a in metric_strategy(6)) {
        let c = a.to_ratio_coords();
        let back = TriangularMetric::from_ratio_coords(&c).unwrap();
        prop_assert!(back.as_frame().max_abs_diff(a.as_frame()).unwrap() <= 1e-15 * 8.0);
        prop_assert_eq!(back.to_ratio_coords().x, c.x);
    }

    #[test]
    fn euler_identity(a in metric_strategy(6)) {
        let c = a.to_ratio_coords();
        let (gx, _) = gradient_ratio(&c);
        let lhs: f64 = gx.iter().zip(&c.x).map(|(g, x)| g * x).sum();
        let s = s_tilde_ratio(&c);
        prop_assert!((lhs - 2.0 * s).abs() <= 1e-10 * s.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gradient_matches_central_differences(a in metric_strategy(5)) {
        let c = a.to_ratio_coords();
        let n = c.n();
        let (gx, gu) = gradient_ratio(&c);
        let analytic: Vec<f64> = gx.into_iter().chain(gu).collect();
        let z = c.to_vec();
        let h = 1e-6;
        for (k, g) in analytic.iter().enumerate() {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[k] += h;
            zm[k] -= h;
            let fp = s_tilde_ratio(&RatioCoordinates::from_slice(n, &zp).unwrap());
            let fm = s_tilde_ratio(&RatioCoordinates::from_slice(n, &zm).unwrap());
            let fd = (fp - fm) / (2.0 * h);
            if g.abs() > 1e-8 {
                prop_assert!((fd - g).abs() <= 1e-6 * g.abs().max(1.0), "component {k}: {g} vs {fd}");
            }
        }
    }
}

#[test]
fn generic_scalars_agree() {
    use num_rational::BigRational;
    use num_traits::FromPrimitive;
    let rows = vec![vec![1.25, 0.0, 0.0], vec![0.5, 0.75, 0.0], vec![-0.25, 1.5, 2.0]];
    let a64: Metric = TriangularMetric::from_rows(rows.clone()).unwrap();
    let a32: lo_einstein::Metric32 = a64.cast();
    let exact: lo_einstein::RationalMetric = TriangularMetric::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|v| BigRational::from_f64(*v).unwrap()).collect())
            .collect(),
    )
    .unwrap();
    let s64 = scalar_curvature_triangular(&a64);
    let s32 = scalar_curvature_triangular(&a32);
    let sq = scalar_curvature_triangular(&exact);
    let sq64 = num_traits::ToPrimitive::to_f64(&sq).unwrap();
    assert!((s64 - sq64).abs() < 1e-13 * sq64.abs().max(1.0));
    assert!((f64::from(s32) - sq64).abs() < 1e-4 * sq64.abs().max(1.0));
}
