use lo_einstein::catalog::{
    bounds, catalog, emhs_lower_constant, enumerate_compositions, partition_count, partitions,
    routine_critical_points, routine_critical_points_with_budget, routine_from_partition, standard_einstein_matrix,
    standard_matrix,
};
use lo_einstein::curvature::{einstein_constant, scalar_curvature_triangular};
use lo_einstein::isometry::canonical_form;
use lo_einstein::reference::{match_coordinates, reference_set};
use lo_einstein::solver::residual;
use lo_einstein::{Coords, Error};
use num_bigint::BigUint;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn standard_matrices() {
    for n in 1..=10 {
        let nf = n as f64;
        let a = standard_matrix::<f64>(n).unwrap();
        assert!((a.volume() - (nf + 1.0).sqrt()).abs() <= 1e-12 * a.volume());
        let s = scalar_curvature_triangular(&a);
        assert!((s - nf * (nf + 3.0) / (nf + 1.0)).abs() <= 1e-10 * s);

        let e = standard_einstein_matrix::<f64>(n).unwrap();
        let se = scalar_curvature_triangular(&e);
        assert!((se - 4.0 * nf).abs() <= 1e-9);
        assert!((einstein_constant(se, n) - 1.0).abs() <= 1e-10);
        let r = residual(&e.scale(0.5).unwrap().to_ratio_coords());
        assert!(max_abs(&r) <= 1e-10, "n={n}");
    }
}

#[test]
fn standard_matrix_entries() {
    assert_eq!(standard_matrix::<f64>(1).unwrap().to_rows(), vec![vec![2.0f64.sqrt()]]);
    let a2 = standard_matrix::<f64>(2).unwrap();
    assert!((a2.get(0, 0) - 1.5f64.sqrt()).abs() < 1e-15);
    assert!((a2.get(1, 0) - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((a2.get(1, 1) - 2.0f64.sqrt()).abs() < 1e-15);

    assert_eq!(standard_einstein_matrix::<f64>(1).unwrap().to_rows(), vec![vec![2.0]]);
    let e2 = standard_einstein_matrix::<f64>(2).unwrap();
    let k = 1.2f64.sqrt();
    let want2 = [[k * 3.0f64.sqrt(), 0.0], [k, 2.0 * k]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((e2.get(i, j) - want2[i][j]).abs() < 1e-15);
        }
    }
    let e3 = standard_einstein_matrix::<f64>(3).unwrap();
    let (r2, r3) = (2.0f64.sqrt(), 3.0f64.sqrt());
    let want3 = [[4.0 * r2, 0.0, 0.0], [2.0, 6.0, 0.0], [2.0 * r3, 2.0 * r3, 4.0 * r3]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((e3.get(i, j) - want3[i][j] / 3.0).abs() < 1e-14);
        }
    }
    let scaled = standard_matrix::<f64>(3).unwrap().scale((16.0f64 / 6.0).sqrt()).unwrap();
    assert!(scaled.as_frame().max_abs_diff(e3.as_frame()).unwrap() < 1e-14);
}

#[test]
fn partition_metrics() {
    let ones = routine_from_partition(&[1, 1, 1, 1]).unwrap();
    assert_eq!(ones.diagonal(), vec![2.0; 4]);
    let a12 = routine_from_partition(&[1, 2]).unwrap();
    let a21 = routine_from_partition(&[2, 1]).unwrap();
    assert_ne!(a12, a21);
    assert!((a12.volume() - a21.volume()).abs() < 1e-14);
    let c12 = canonical_form(&a12).unwrap();
    let c21 = canonical_form(&a21).unwrap();
    assert!(c12.as_frame().max_abs_diff(c21.as_frame()).unwrap() < 1e-8);
    for n in 1..=8 {
        let metrics: Vec<_> = partitions(n)
            .unwrap()
            .iter()
            .map(|p| routine_from_partition(p.parts()).unwrap())
            .collect();
        for (i, a) in metrics.iter().enumerate() {
            let s = scalar_curvature_triangular(a);
            assert!((einstein_constant(s, n) - 1.0).abs() <= 1e-9);
            assert!(metrics[..i].iter().all(|b| b.as_frame().max_abs_diff(a.as_frame()).unwrap() > 1e-6));
        }
        assert_eq!(metrics.len() as u128, partition_count(n).unwrap());
    }
}

#[test]
fn compositions() {
    assert_eq!(enumerate_compositions(1).unwrap(), vec![vec![1]]);
    assert_eq!(
        enumerate_compositions(3).unwrap(),
        vec![vec![1, 1, 1], vec![1, 2], vec![2, 1], vec![3]]
    );
    for n in 1..=12 {
        let c = enumerate_compositions(n).unwrap();
        assert_eq!(c.len(), 1 << (n - 1));
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        assert!(c.iter().all(|p| p.iter().sum::<usize>() == n));
    }
}

#[test]
fn routine_points() {
    assert_eq!(routine_critical_points(1).unwrap()[0].to_rows(), vec![vec![2.0]]);
    for n in 1..=6 {
        let pts = routine_critical_points(n).unwrap();
        let floor = (1.0 + 2.0f64.sqrt()).powi(n as i32 - 1);
        assert!(pts.len() as f64 >= floor.ceil(), "n={n}: {}", pts.len());
        for m in &pts {
            let r = residual(&m.scale(0.5).unwrap().to_ratio_coords());
            assert!(max_abs(&r) <= 1e-9);
        }
    }
    assert!(matches!(routine_critical_points_with_budget(9, 8), Err(Error::Capacity(_))));
}

#[test]
fn three_dimensional_routine_points_are_table_rows() {
    let found: Vec<Coords> = routine_critical_points(3)
        .unwrap()
        .iter()
        .map(|m| m.scale(0.5).unwrap().to_ratio_coords())
        .collect();
    assert!(found.len() >= 6);
    let refs: Vec<Coords> = reference_set(3).unwrap().points.iter().map(|r| r.coords()).collect();
    let report = match_coordinates(&found, &refs, 1e-9);
    assert!(report.extra.is_empty(), "{report:?}");
}

fn brute_force_partitions(n: usize, max_part: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    (1..=max_part.min(n)).map(|k| brute_force_partitions(n - k, k)).sum()
}

#[test]
fn partition_counts() {
    let small: Vec<u128> = (1..=6).map(|n| partition_count(n).unwrap()).collect();
    assert_eq!(small, vec![1, 2, 3, 5, 7, 11]);
    assert_eq!(partition_count(50).unwrap(), 204226);
    assert_eq!(partition_count(100).unwrap(), 190569292);
    assert_eq!(partition_count(200).unwrap(), 3972999029388);
    for n in 1..=40 {
        assert_eq!(partition_count(n).unwrap(), brute_force_partitions(n, n), "n={n}");
    }
    for n in 1..=12 {
        assert_eq!(partitions(n).unwrap().len() as u128, partition_count(n).unwrap());
    }
    assert!(partition_count(1000).is_ok());
    assert!(partition_count(1001).is_err());
    assert!(partition_count(0).is_err());
}

#[test]
fn bound_rows() {
    let one = bounds(1).unwrap();
    assert!((one.maroti_bound - 2.5f64.exp() / 13.0).abs() < 1e-15);
    assert!(one.maroti_bound < 1.0 && one.maroti_holds);
    let four = bounds(4).unwrap();
    assert_eq!(four.rem_sum_bound, BigUint::from(17u32));
    assert!((four.rem_sqrt2_bound - (1.0 + 2.0f64.sqrt()).powi(3)).abs() < 1e-12);
    for n in 1..=200 {
        let b = bounds(n).unwrap();
        assert!(b.maroti_holds, "n={n}");
        let rem: f64 = b.rem_sum_bound.to_string().parse().unwrap();
        assert!(rem >= b.rem_sqrt2_bound * (1.0 - 1e-12));
    }
    assert!((emhs_lower_constant() - 1.480960979).abs() < 1e-9);
}

#[test]
fn catalog_document() {
    let c = catalog(3).unwrap();
    assert_eq!(c.partitions.len(), 3);
    assert!(c.routine_points.len() >= 6);
    assert_eq!(c.counts.p_n, 3);
}
