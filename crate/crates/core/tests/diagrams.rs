mod common;

use common::*;
use proptest::prelude::*;
use stickcert::diagram::*;
use stickcert::geom::{find_regular_direction, project_to_diagram, DEFAULT_MAX_REJECTIONS};
use stickcert::invariants::{alexander, determinant};

fn stick_diagram(name: &str) -> Diagram {
    let p = polygon(name);
    let (d, _) = find_regular_direction(&p, 0, DEFAULT_MAX_REJECTIONS).unwrap();
    project_to_diagram(&p, &d).unwrap()
}

#[test]
fn fixtures_are_valid() {
    for (name, d) in corpus() {
        assert!(d.validate().is_ok(), "{name}");
    }
    assert_eq!(labeled().crossing_count(), 15);
    assert_eq!(pd("diagrams/15n41127_finger.pd").crossing_count(), 17);
}

#[test]
fn labeled_wirtinger_has_fifteen_arcs_and_named_strands() {
    let p = labeled().wirtinger();
    assert_eq!(p.arc_count(), 15);
    assert_eq!(p.relations().len(), 15);
    // the four seed strands of the stored labeling
    for name in [&[-10, 4, -11][..], &[-7, 11, 5, -14], &[-15, 14, 10, 1, -2], &[-2, 3, -1]] {
        assert!(p.arc_by_strand(name).is_some(), "{name:?}");
    }
}

#[test]
fn crossing_4_gives_13n835() {
    let changed = labeled().change_crossings(&CrossingChangeSet::new([4])).unwrap();
    assert_eq!(alexander(&changed), alexander(&stick_diagram("13n835")));
}

#[test]
fn finger_simplifies_to_fifteen_crossings() {
    let rii = pd("diagrams/15n41127_finger.pd");
    let s = rii.simplify();
    assert_eq!(s.crossing_count(), 15);
    assert_eq!(alexander(&s), alexander(&labeled()));
}

#[test]
fn clasp_change_is_13n592_mirror() {
    // one crossing of the RII pair switched; no longer reducible
    let m = pd("diagrams/13n592_mirror_clasp.pd");
    let rii = pd("diagrams/15n41127_finger.pd");
    let diff: Vec<usize> =
        (0..17).filter(|&i| m.crossings()[i] != rii.crossings()[i]).collect();
    assert_eq!(diff.len(), 1);
    assert_eq!(m.crossings()[diff[0]], rii.crossings()[diff[0]].switched());
    assert_eq!(alexander(&m), alexander(&stick_diagram("13n592")));
}

#[test]
fn trefoil_with_kink_simplifies() {
    // trefoil with a positive kink spliced into edge 6
    let d = parse_pd("X 1,7,2,6\nX 3,1,4,8\nX 7,3,8,2\nX 4,5,5,6\n").unwrap();
    assert_eq!(d.simplify().crossing_count(), 3);
    assert_eq!(alexander(&d), alexander(&corpus()[0].1));
    // unknot with two opposite kinks
    let u = parse_pd("X 1,1,2,4\nX 3,2,4,3\n").unwrap();
    assert_eq!(u.simplify(), Diagram::unknot());
}

#[test]
fn simplify_preserves_invariants_on_stick_diagrams() {
    for name in ["13n592", "13n285", "15n41126"] {
        let d = stick_diagram(name);
        let s = d.simplify();
        assert!(s.crossing_count() <= d.crossing_count());
        assert!(s.validate().is_ok());
        assert_eq!(alexander(&s), alexander(&d), "{name}");
        assert_eq!(determinant(&s), determinant(&d));
    }
}

#[test]
fn gauss_code_round_trips() {
    for d in corpus().into_iter().map(|x| x.1).chain([labeled()]) {
        let g = d.gauss_code();
        assert_eq!(g.0.len(), 2 * d.crossing_count());
        assert_eq!(Diagram::from_gauss(&g).unwrap(), d);
    }
}

#[test]
fn pd_text_round_trips() {
    for d in corpus().into_iter().map(|x| x.1).chain([labeled()]) {
        assert_eq!(parse_pd(&d.to_pd_text()).unwrap(), d);
    }
}

#[test]
fn wirtinger_counts() {
    for (name, d) in corpus() {
        let p = d.wirtinger();
        assert_eq!(p.arc_count(), d.crossing_count(), "{name}");
        let mut used = vec![false; p.arc_count()];
        for r in p.relations() {
            used[r.over] = true;
            used[r.incoming] = true;
            used[r.outgoing] = true;
        }
        assert!(used.into_iter().all(|u| u));
    }
}

fn change_set() -> impl Strategy<Value = CrossingChangeSet> {
    prop::collection::btree_set(1usize..=15, 0..=15).prop_map(CrossingChangeSet)
}

proptest! {
    #[test]
    fn changes_are_valid_involutions(set in change_set()) {
        let d = labeled();
        let once = d.change_crossings(&set).unwrap();
        prop_assert!(once.validate().is_ok());
        prop_assert_eq!(once.change_crossings(&set).unwrap(), d.clone());
        for i in 0..15 {
            let changed = set.0.contains(&(i + 1));
            prop_assert_eq!(once.crossings()[i].sign != d.crossings()[i].sign, changed);
        }
    }

    #[test]
    fn mirror_is_valid_involution(set in change_set()) {
        let d = labeled().change_crossings(&set).unwrap();
        let m = d.mirror();
        prop_assert!(m.validate().is_ok());
        prop_assert_eq!(m.mirror(), d.clone());
        prop_assert_eq!(m.writhe(), -d.writhe());
        let (g, h) = (d.gauss_code(), m.gauss_code());
        for (a, b) in g.0.iter().zip(&h.0) {
            prop_assert_eq!(a.crossing, b.crossing);
            prop_assert_eq!(a.over, b.over);
            prop_assert_eq!(a.sign, b.sign.flip());
        }
    }

    #[test]
    fn simplify_never_adds_crossings(set in change_set()) {
        let d = pd("diagrams/15n41127_finger.pd")
            .change_crossings(&CrossingChangeSet(set.0.iter().copied().collect()))
            .unwrap();
        let s = d.simplify();
        prop_assert!(s.crossing_count() <= d.crossing_count());
        prop_assert!(s.validate().is_ok());
        prop_assert_eq!(alexander(&s), alexander(&d));
    }
}

#[test]
fn unknot_and_mirror_of_unknot() {
    let u = Diagram::unknot();
    assert_eq!(u.mirror(), u);
    assert!(u.gauss_code().0.is_empty());
    assert_eq!(u.wirtinger().arc_count(), 1);
}

#[test]
fn mirror_preserves_alexander() {
    for (_, d) in corpus() {
        assert_eq!(alexander(&d.mirror()), alexander(&d));
    }
}
