use lo_einstein::catalog::{routine_critical_points, standard_einstein_matrix};
use lo_einstein::reference::{match_coordinates, reference_set, verify_against_reference};
use lo_einstein::solver::{
    multistart, multistart_census, newton_run, newton_solve, normalize, solve_from_starts, CriticalPoint,
    CriticalPointSet, Normalization, SolverOptions,
};
use lo_einstein::{einstein_constant, Coords, Metric};

fn assert_invariants(p: &CriticalPoint) {
    let n = p.n() as f64;
    assert!(p.residual_norm <= 1e-11, "residual {}", p.residual_norm);
    assert!((p.s_tilde - n).abs() <= 1e-9, "s_tilde {}", p.s_tilde);
    assert!(p.coords.x.iter().all(|x| *x > 0.0));
    let rebuilt = Metric::from_ratio_coords(&p.coords).unwrap();
    assert!(rebuilt.as_frame().max_abs_diff(p.matrix.as_frame()).unwrap() <= 1e-15);
}

fn coords_of(points: &[CriticalPoint]) -> Vec<Coords> {
    points.iter().map(|p| p.coords.clone()).collect()
}

#[test]
fn newton_at_a_root_stays_put() {
    let start = reference_set(3).unwrap().points[0].coords();
    let opts = SolverOptions::for_dimension(3);
    let out = newton_run(&start, &opts);
    assert!(out.iterations <= 1);
    let p = out.point.unwrap();
    assert!(p.coords.x.iter().zip(&start.x).all(|(a, b)| (a - b).abs() <= 1e-12));
}

#[test]
fn newton_from_generic_start_lands_on_table() {
    let start = Coords::new(vec![1.1, 0.9, 1.05], vec![0.1, 0.05, 0.95]).unwrap();
    let p = newton_solve(&start, &SolverOptions::for_dimension(3)).unwrap();
    assert_invariants(&p);
    let refs: Vec<Coords> = reference_set(3).unwrap().points.iter().map(|r| r.coords()).collect();
    let report = match_coordinates(&[p.coords.clone()], &refs, 1e-7);
    assert_eq!(report.matched.len(), 1);
}

#[test]
fn newton_rejects_start_below_floor() {
    let start = Coords::new(vec![1e-9, 1.0, 1.0], vec![0.0; 3]).unwrap();
    assert!(newton_solve(&start, &SolverOptions::for_dimension(3)).is_none());
}

#[test]
fn one_dimensional_census() {
    let pts = multistart(1, &SolverOptions::for_dimension(1)).unwrap();
    assert_eq!(pts.len(), 1);
    assert!((pts[0].coords.x[0] - 1.0).abs() < 1e-14);
}

#[test]
fn two_dimensional_census_matches_reference() {
    let pts = multistart(2, &SolverOptions::for_dimension(2)).unwrap();
    assert_eq!(pts.len(), 4);
    pts.iter().for_each(assert_invariants);
    let report = verify_against_reference(&pts, reference_set(2).unwrap(), 1e-8);
    assert!(report.is_exact(), "{report:?}");
}

#[test]
fn multistart_is_deterministic() {
    let opts = SolverOptions {
        starts: 800,
        ..SolverOptions::for_dimension(3)
    };
    let a = multistart(3, &opts).unwrap();
    let b = multistart(3, &SolverOptions { parallel: false, ..opts }).unwrap();
    assert_eq!(a, b);
}

#[test]
fn more_starts_never_lose_points() {
    let small = SolverOptions {
        starts: 1000,
        ..SolverOptions::for_dimension(3)
    };
    let large = SolverOptions { starts: 2000, ..small.clone() };
    let a = multistart(3, &small).unwrap();
    let b = multistart(3, &large).unwrap();
    let report = match_coordinates(&coords_of(&a), &coords_of(&b), 1e-7);
    assert!(report.missing.len() == b.len() - a.len() && report.extra.is_empty());
}

#[test]
fn census_reports_saturation() {
    let c = multistart_census(2, &SolverOptions::for_dimension(2)).unwrap();
    assert!(c.is_saturated());
    assert!(c.converged >= c.points.len());
    assert!(multistart_census(0, &SolverOptions::for_dimension(1)).is_err());
}

#[test]
fn normalization_examples() {
    let refs = reference_set(2).unwrap();
    let p = refs.points[3].critical_point();
    let e = normalize(&p, Normalization::EinsteinConstantOne);
    let st = standard_einstein_matrix::<f64>(2).unwrap();
    assert!(e.matrix.as_frame().max_abs_diff(st.as_frame()).unwrap() <= 1e-12);
    assert!((einstein_constant(e.s_tilde, 2) - 1.0).abs() <= 1e-10);

    let p17 = reference_set(3).unwrap().points[16].critical_point();
    let e17 = normalize(&p17, Normalization::EinsteinConstantOne);
    let st3 = standard_einstein_matrix::<f64>(3).unwrap();
    assert!(e17.matrix.as_frame().max_abs_diff(st3.as_frame()).unwrap() <= 1e-12);
    assert!(e17.residual_norm <= 1e-10);

    for r in &reference_set(3).unwrap().points {
        let v = normalize(&r.critical_point(), Normalization::UnitVolume);
        assert!((v.volume - 1.0).abs() <= 1e-12);
        assert_eq!(v.coords.u, r.u);
        let back = normalize(&v, Normalization::STildeEqualsN);
        assert!((back.s_tilde - 3.0).abs() <= 1e-9);
    }
}

#[test]
fn empty_input_misses_everything() {
    let report = verify_against_reference(&[], reference_set(3).unwrap(), 1e-7);
    assert!(report.matched.is_empty());
    assert_eq!(report.missing.len(), 29);
}

#[test]
fn point_set_rejects_mixed_dimensions() {
    let a = reference_set(2).unwrap().points[0].critical_point();
    let b = reference_set(3).unwrap().points[0].critical_point();
    assert!(CriticalPointSet::new(2, Normalization::STildeEqualsN, vec![a, b]).is_err());
}

fn halved_routine_coords(n: usize) -> Vec<Coords> {
    routine_critical_points(n)
        .unwrap()
        .iter()
        .map(|m| m.scale(0.5).unwrap().to_ratio_coords())
        .collect()
}

#[test]
fn routine_points_are_fixed_by_newton() {
    for n in 1..=5 {
        let opts = SolverOptions::for_dimension(n);
        for c in halved_routine_coords(n) {
            let out = newton_run(&c, &opts);
            let p = out.point.unwrap_or_else(|| panic!("n={n}: {:?}", out.failure));
            assert_invariants(&p);
            assert!(p.coords.to_vec().iter().zip(c.to_vec()).all(|(a, b)| (a - b).abs() <= 1e-9));
        }
    }
}

#[test]
fn seeded_multistart_rediscovers_routine_points() {
    for n in 4..=5 {
        let routine = halved_routine_coords(n);
        let opts = SolverOptions {
            starts: 500,
            ..SolverOptions::for_dimension(n)
        };
        let mut starts = routine.clone();
        starts.extend(lo_einstein::solver::sample_starts(n, &opts));
        let census = solve_from_starts(&starts, &opts);
        census.points.iter().for_each(assert_invariants);
        let report = match_coordinates(&coords_of(&census.points), &routine, 1e-8);
        assert!(report.missing.is_empty(), "n={n}: missing {:?}", report.missing);
    }
}
