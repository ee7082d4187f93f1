mod common;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stickcert::diagram::Sign;
use stickcert::geom::*;
use stickcert_oracles as oracle;

fn tol(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn as_i64(p: &Polygon3) -> Vec<[i64; 3]> {
    p.vertices().iter().map(|v| [0, 1, 2].map(|k| v[k].to_i64().unwrap())).collect()
}

fn dir_i64(d: &Direction) -> [i64; 3] {
    [0, 1, 2].map(|k| d.d()[k].to_i64().unwrap())
}

/// Random small polygons with 4..=8 vertices that satisfy the invariants.
fn battery(seed: u64, cases: usize) -> Vec<Polygon3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < cases {
        let n = rng.gen_range(4..=8);
        let pts: Vec<[i64; 3]> =
            (0..n).map(|_| [rng.gen_range(-6..=6), rng.gen_range(-6..=6), rng.gen_range(-6..=6)]).collect();
        if let Ok(p) = Polygon3::from_i64(&pts) {
            out.push(p);
        }
    }
    out
}

#[test]
fn first_edge_is_exactly_unit() {
    let p = polygon("13n592");
    assert_eq!(p.vertices()[0], vec3(0, 0, 0));
    assert_eq!(p.vertices()[1], vec3(10_000_000, 0, 0));
    assert_eq!(edge_lengths_squared(&p)[0], BigRational::one());
}

#[test]
fn edges_near_unit() {
    let p = polygon("13n592");
    let sq = edge_lengths_squared(&p);
    assert_eq!(sq.len(), 10);
    let eps = tol(2, 1_000_000);
    for s in sq {
        assert!((s - BigRational::one()).abs() <= eps);
    }
}

#[test]
fn equilateral_triangle_at_unit_scale() {
    // (1,0,0), (0,1,0), (0,0,1): all squared lengths 2
    let p = Polygon3::from_i64(&[[1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap();
    let sq = edge_lengths_squared(&p);
    assert!(sq.iter().all(|s| *s == BigRational::from_integer(2.into())));
}

#[test]
fn all_published_polygons_equilateral_and_moved_mirror_not() {
    for name in TEN_STICK.iter().chain(ELEVEN_STICK.iter()) {
        let c = check_equilateral(&polygon(name), &tol(1, 100_000));
        assert!(c.equilateral, "{name}: {}", c.max_rel_deviation);
    }
    assert!(!check_equilateral(&moved_mirror(), &tol(1, 100_000)).equilateral);
}

#[test]
fn square_with_doubled_edge_not_equilateral() {
    let p = Polygon3::from_i64(&[[0, 0, 0], [2, 0, 0], [2, 1, 0], [0, 1, 0]]).unwrap();
    assert!(!check_equilateral(&p, &tol(1, 1000)).equilateral);
}

#[test]
fn moved_mirror_is_one_vertex_move() {
    let base = polygon("15n41127");
    let moved = move_vertex(&base, 8, vec3(3_708_061, -732_600, 1_785_942)).unwrap();
    assert_eq!(moved.vertices(), moved_mirror().vertices());
    assert_eq!(move_vertex(&base, 3, base.vertices()[3].clone()).unwrap(), base);
    let next = base.vertices()[4].clone();
    assert!(matches!(move_vertex(&base, 3, next), Err(GeomError::ZeroEdge(..))));
    assert!(matches!(move_vertex(&base, 10, vec3(0, 0, 0)), Err(GeomError::IndexOutOfRange { .. })));
}

#[test]
fn planar_square_rejects_in_plane_direction() {
    let sq = Polygon3::from_i64(&[[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]).unwrap();
    let r = check_regularity(&sq, &Direction::from_i64(1, 0, 0).unwrap());
    assert!(!r.is_regular());
    assert!(matches!(r.failure_kind, Some(FailureKind::EdgeParallelToDirection | FailureKind::VertexCoincidence)));
}

#[test]
fn regular_direction_for_published_polygon() {
    let p = polygon("13n592");
    let (d, r) = find_regular_direction(&p, 0, DEFAULT_MAX_REJECTIONS).unwrap();
    assert!(r.is_regular());
    assert!(check_regularity(&p, &d).is_regular());
    // same seed, same direction
    assert_eq!(find_regular_direction(&p, 0, DEFAULT_MAX_REJECTIONS).unwrap().0, d);
}

#[test]
fn convex_planar_polygons() {
    let quad = Polygon3::from_i64(&[[0, 0, 0], [4, 0, 0], [5, 3, 0], [0, 2, 0]]).unwrap();
    let (d, _) = find_regular_direction(&quad, 3, DEFAULT_MAX_REJECTIONS).unwrap();
    assert_eq!(project_to_diagram(&quad, &d).unwrap().crossing_count(), 0);

    // convex 10-gon in the xy-plane; in-plane directions see one maximum
    let pts: Vec<[i64; 3]> = (0..10)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 10.0;
            [(1000.0 * a.cos()).round() as i64, (1000.0 * a.sin()).round() as i64, 0]
        })
        .collect();
    let ten = Polygon3::from_i64(&pts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = 0;
    while seen < 50 {
        let d = Direction::from_i64(rng.gen_range(-99..=99), rng.gen_range(-99..=99), 0);
        let Ok(d) = d else { continue };
        if let Ok(m) = local_maxima_count(&ten, &d) {
            assert_eq!(m, 1);
            seen += 1;
        }
    }
    let flat = Direction::from_i64(0, 0, 1).unwrap();
    assert!(matches!(local_maxima_count(&ten, &flat), Err(GeomError::NonMorse(..))));
}

#[test]
fn six_stick_trefoil_projects_to_three_equal_signs() {
    let t = read_small("trefoil6");
    let (d, _) = find_regular_direction(&t, 0, DEFAULT_MAX_REJECTIONS).unwrap();
    let diagram = project_to_diagram(&t, &d).unwrap();
    assert_eq!(diagram.crossing_count(), 3);
    let s = diagram.crossings()[0].sign;
    assert!(diagram.crossings().iter().all(|x| x.sign == s));
    let brute = oracle::segment_crossings(&as_i64(&t), dir_i64(&d));
    assert_eq!(brute.len(), 3);
}

#[test]
fn projection_matches_brute_force_on_battery() {
    let mut embedded = 0;
    for (k, p) in battery(2024, 400).into_iter().enumerate() {
        let pts = as_i64(&p);
        let attempt = find_regular_direction(&p, k as u64, 10_000)
            .ok()
            .and_then(|(d, _)| projected_crossings(&p, &d).ok().map(|c| (d, c)));
        if oracle::is_singular(&pts) {
            assert!(attempt.is_none(), "singular case {k} was projected");
            continue;
        }
        let (d, ours) = attempt.unwrap_or_else(|| panic!("embedded case {k} refused"));
        embedded += 1;
        let ours: Vec<(usize, usize, i8)> =
            ours.iter().map(|c| (c.over_edge, c.under_edge, c.sign.value() as i8)).collect();
        let mut ours_sorted = ours.clone();
        ours_sorted.sort();
        assert_eq!(ours_sorted, oracle::segment_crossings(&pts, dir_i64(&d)), "case {k}");
        let diagram = project_to_diagram(&p, &d).unwrap();
        assert_eq!(diagram.crossing_count(), ours.len());
        let writhe: i32 = ours.iter().map(|c| c.2 as i32).sum();
        assert_eq!(diagram.writhe(), writhe);
    }
    assert!(embedded >= 200, "{embedded}");
}

#[test]
fn sweep_is_deterministic_and_bounded() {
    let p = polygon("15n41127");
    let a = direction_sweep(&p, 2000, 11).unwrap();
    let b = direction_sweep(&p, 2000, 11).unwrap();
    assert_eq!(a, b);
    assert!(a.max_count <= 5);
    assert!(a.min_count >= 1 && a.min_count <= a.max_count);
    assert_eq!(local_maxima_count(&p, &a.min_witness).unwrap(), a.min_count);
    assert_eq!(local_maxima_count(&p, &a.max_witness).unwrap(), a.max_count);
}

#[test]
fn sweep_of_published_ten_stick_knots_is_four_to_five() {
    for name in TEN_STICK {
        let s = direction_sweep(&polygon(name), 100_000, 0).unwrap();
        assert_eq!((s.min_count, s.max_count), (4, 5), "{name}");
    }
}

#[test]
fn vertex_on_far_edge_is_refused_immediately() {
    let p = Polygon3::from_i64(&[[0, 0, 0], [4, 0, 0], [4, 4, 0], [2, 0, 0], [0, 4, 1]]).unwrap();
    assert!(matches!(find_regular_direction(&p, 0, DEFAULT_MAX_REJECTIONS), Err(GeomError::SelfIntersection(0, 2))));
    let bow = Polygon3::from_i64(&[[0, 0, 0], [2, 2, 0], [2, 0, 0], [0, 2, 0]]).unwrap();
    assert!(check_embedded(&bow).is_err());
    for name in TEN_STICK.iter().chain(ELEVEN_STICK.iter()) {
        assert!(check_embedded(&polygon(name)).is_ok());
    }
}

#[test]
fn nonregular_direction_is_rejected_by_projection() {
    let sq = Polygon3::from_i64(&[[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]).unwrap();
    let d = Direction::from_i64(0, 1, 0).unwrap();
    assert!(matches!(project_to_diagram(&sq, &d), Err(GeomError::NotRegular(_))));
}

#[test]
fn direction_basis_is_exact() {
    for (x, y, z) in [(1, 2, 3), (0, 0, 5), (-7, 7, 1), (3, -3, 3)] {
        let d = Direction::from_i64(x, y, z).unwrap();
        let dot = |a: &[BigInt; 3], b: &[BigInt; 3]| (0..3).map(|k| &a[k] * &b[k]).sum::<BigInt>();
        assert_eq!(dot(d.d(), d.u()), BigInt::from(0));
        assert_eq!(dot(d.d(), d.v()), BigInt::from(0));
        assert_eq!(dot(d.u(), d.v()), BigInt::from(0));
    }
}

fn small_polygon() -> impl Strategy<Value = Polygon3> {
    prop::collection::vec(prop::array::uniform3(-20i64..=20), 4..=9)
        .prop_filter_map("degenerate polygon", |pts| Polygon3::from_i64(&pts).ok())
}

proptest! {
    #[test]
    fn maxima_bounded_and_antipodal(p in small_polygon(), d in prop::array::uniform3(-50i64..=50)) {
        let Ok(dir) = Direction::from_i64(d[0], d[1], d[2]) else { return Ok(()) };
        let Ok(m) = local_maxima_count(&p, &dir) else { return Ok(()) };
        prop_assert!(m >= 1 && m <= p.len() / 2);
        prop_assert_eq!(m, local_minima_count(&p, &dir.negated()).unwrap());
        prop_assert_eq!(m, oracle::maxima(&as_i64(&p), d));
    }

    #[test]
    fn alexander_independent_of_direction(seed_a in 0u64..1000, seed_b in 0u64..1000) {
        let t = read_small("trefoil6");
        let (da, _) = find_regular_direction(&t, seed_a, DEFAULT_MAX_REJECTIONS).unwrap();
        let (db, _) = find_regular_direction(&t, seed_b, DEFAULT_MAX_REJECTIONS).unwrap();
        let a = stickcert::invariants::alexander(&project_to_diagram(&t, &da).unwrap());
        let b = stickcert::invariants::alexander(&project_to_diagram(&t, &db).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn embedding_check_matches_oracle(pts in prop::collection::vec(prop::array::uniform3(-3i64..=3), 3..=7)) {
        if let Ok(p) = Polygon3::from_i64(&pts) {
            prop_assert_eq!(check_embedded(&p).is_err(), oracle::is_singular(&pts));
        }
    }

    #[test]
    fn sweep_max_at_most_half(p in small_polygon(), seed in 0u64..100) {
        let s = direction_sweep(&p, 50, seed).unwrap();
        prop_assert!(s.max_count <= p.len() / 2);
    }
}

#[test]
fn published_alexander_independent_of_direction() {
    let p = polygon("13n611");
    let mut polys = Vec::new();
    for seed in [0, 1, 2] {
        let (d, _) = find_regular_direction(&p, seed, DEFAULT_MAX_REJECTIONS).unwrap();
        polys.push(stickcert::invariants::alexander(&project_to_diagram(&p, &d).unwrap()));
    }
    assert!(polys.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn sign_matches_mirror_image_polygon() {
    // reflecting the polygon through a plane mirrors the diagram
    let t = read_small("trefoil6");
    let reflected =
        Polygon3::new(t.vertices().iter().map(|v| [-v[0].clone(), v[1].clone(), v[2].clone()]).collect(), t.scale().clone(), None)
            .unwrap();
    let (d, _) = find_regular_direction(&t, 0, DEFAULT_MAX_REJECTIONS).unwrap();
    let (e, _) = find_regular_direction(&reflected, 0, DEFAULT_MAX_REJECTIONS).unwrap();
    let w1 = project_to_diagram(&t, &d).unwrap().simplify();
    let w2 = project_to_diagram(&reflected, &e).unwrap().simplify();
    let b1 = stickcert::invariants::kauffman_bracket(&w1, 24).unwrap();
    let b2 = stickcert::invariants::kauffman_bracket(&w2, 24).unwrap();
    assert_eq!(b1.invert_variable(), b2);
    assert!(w1.crossings().iter().all(|x| x.sign == Sign::Negative) || w1.crossings().iter().all(|x| x.sign == Sign::Positive));
}
