mod common;

use std::collections::BTreeSet;

use hypercox::andreev::{AndreevChecker, ConditionStatus, Regime};
use hypercox::census::{canonical_labels, enumerate_labelings};
use hypercox::circuits::{enumerate_circuits, Circuit};
use hypercox::corpus;
use hypercox::haken::{classify, Size};
use hypercox::poly_model::{automorphisms, parse_polyhedron, serialize, AbstractPolyhedron};
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = AbstractPolyhedron> {
    (0usize..3, prop::collection::vec(0usize..20, 0..4)).prop_map(|(s, picks)| common::truncated(s, &picks))
}

fn labeled() -> impl Strategy<Value = (AbstractPolyhedron, Vec<u32>)> {
    poly().prop_flat_map(|p| {
        let n = p.edge_count();
        (Just(p), prop::collection::vec(2u32..7, n))
    })
}

fn renumbering() -> impl Strategy<Value = (AbstractPolyhedron, Vec<usize>)> {
    poly().prop_flat_map(|p| {
        let n = p.vertex_count();
        (Just(p), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn not_failing(status: ConditionStatus) -> bool {
    status != ConditionStatus::Fail
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_and_degree_sum(p in poly()) {
        prop_assert_eq!(p.euler_characteristic(), 2);
        let degrees: usize = p.faces().iter().map(|f| f.cycle.len()).sum();
        prop_assert_eq!(degrees, 2 * p.edge_count());
    }

    #[test]
    fn serialize_then_parse_is_identity((p, labels) in labeled()) {
        let lp = common::with_labels(&p, labels);
        let text = serialize(&lp);
        let back = parse_polyhedron(&text).unwrap().polyhedron;
        prop_assert_eq!(serialize(&back), text);
        prop_assert_eq!(back.labels(), lp.labels());
    }

    #[test]
    fn automorphisms_form_a_group(p in poly()) {
        let group = automorphisms(&p);
        let maps: BTreeSet<Vec<usize>> = group.iter().map(|g| g.vertices.clone()).collect();
        let id: Vec<usize> = (0..p.vertex_count()).collect();
        prop_assert_eq!(&group[0].vertices, &id);
        for g in &maps {
            let mut inverse = vec![0; g.len()];
            for (v, &w) in g.iter().enumerate() {
                inverse[w] = v;
            }
            prop_assert!(maps.contains(&inverse));
            for h in &maps {
                let gh: Vec<usize> = (0..g.len()).map(|v| g[h[v]]).collect();
                prop_assert!(maps.contains(&gh));
            }
        }
    }

    #[test]
    fn andreev_check_is_symmetric((p, labels) in labeled(), pick in 0usize..1000) {
        prop_assume!(p.face_count() > 4);
        let checker = AndreevChecker::new(&p).unwrap();
        let group = automorphisms(&p);
        let g = &group[pick % group.len()];
        let mut moved = vec![0; labels.len()];
        for (e, &l) in labels.iter().enumerate() {
            moved[g.edges[e]] = l;
        }
        for regime in [Regime::StrictCompact, Regime::AllowIdeal] {
            let a = checker.check(&labels, regime);
            let b = checker.check(&moved, regime);
            prop_assert_eq!(a.outcome, b.outcome);
            prop_assert_eq!(a.condition_summary(), b.condition_summary());
            for (ca, cb) in a.conditions.iter().zip(&b.conditions) {
                prop_assert_eq!(ca.failures().count(), cb.failures().count());
            }
        }
    }

    #[test]
    fn raising_a_label_keeps_circuit_conditions((p, labels) in labeled(), pick in 0usize..1000) {
        prop_assume!(p.face_count() > 4);
        let checker = AndreevChecker::new(&p).unwrap();
        let before = checker.check(&labels, Regime::StrictCompact);
        let mut raised = labels.clone();
        raised[pick % labels.len()] += 1;
        let after = checker.check(&raised, Regime::StrictCompact);
        for id in 3..=5 {
            if not_failing(before.condition(id).status) {
                prop_assert!(not_failing(after.condition(id).status), "condition {}", id);
            }
        }
    }

    #[test]
    fn classification_ignores_numbering((p, perm) in renumbering()) {
        let q = common::renumbered(&p, &perm);
        let (a, b) = (classify(&p), classify(&q));
        prop_assert_eq!(a.size, b.size);
        for k in 3..=5 {
            prop_assert_eq!(enumerate_circuits(&p, k).len(), enumerate_circuits(&q, k).len());
        }
    }

    #[test]
    fn circuits_are_permuted_by_symmetries(p in poly(), pick in 0usize..1000) {
        let group = automorphisms(&p);
        let g = &group[pick % group.len()];
        for k in 3..=5 {
            let list = enumerate_circuits(&p, k);
            let set: BTreeSet<Circuit> = list.iter().cloned().collect();
            let image: BTreeSet<Circuit> = list
                .iter()
                .map(|c| {
                    let faces: Vec<usize> = c.faces.iter().map(|&f| g.faces[f]).collect();
                    Circuit::from_faces(&p, &faces).unwrap()
                })
                .collect();
            prop_assert_eq!(set, image);
        }
    }

    #[test]
    fn prismatic_triangle_is_never_large(p in poly()) {
        if enumerate_circuits(&p, 3).iter().any(|c| c.prismatic) {
            prop_assert_ne!(classify(&p).size, Size::Large);
        }
    }
}

#[test]
fn census_ignores_vertex_numbering() {
    let cube = corpus::cube_all2().base().clone();
    let perm = [5, 2, 7, 0, 3, 6, 1, 4];
    let other = common::renumbered(&cube, &perm);
    let a = enumerate_labelings(&cube, 3, Regime::StrictCompact).unwrap();
    let b = enumerate_labelings(&other, 3, Regime::StrictCompact).unwrap();
    assert_eq!(a.len(), b.len());

    // carry each row of the renumbered census back to the original edges
    let original = |id: u64| {
        let k = ((id - 100) / 7) as usize;
        perm.iter().position(|&x| x == k).unwrap()
    };
    let group = automorphisms(&cube);
    let back: BTreeSet<(Vec<u32>, usize)> = b
        .iter()
        .map(|r| {
            let mut labels = vec![0; cube.edge_count()];
            for (e, edge) in other.edges().iter().enumerate() {
                let (u, v) = (original(other.vertex_label(edge.a)), original(other.vertex_label(edge.b)));
                labels[cube.edge_between(u, v).unwrap()] = r.labels[e];
            }
            (canonical_labels(&labels, &group), r.orbit_size)
        })
        .collect();
    let here: BTreeSet<(Vec<u32>, usize)> = a.iter().map(|r| (r.labels.clone(), r.orbit_size)).collect();
    assert_eq!(here, back);
}

#[test]
fn census_rows_pass_again_individually() {
    for (p, max) in [
        (corpus::cube_all2().base().clone(), 3),
        (corpus::triangular_prism().base().clone(), 4),
        (corpus::pyramid().base().clone(), 5),
    ] {
        for regime in [Regime::StrictCompact, Regime::AllowIdeal] {
            let rows = enumerate_labelings(&p, max, regime).unwrap();
            for r in &rows {
                let lp = common::with_labels(&p, r.labels.clone());
                let report = hypercox::andreev::check(&lp, regime).unwrap();
                assert!(report.outcome.is_realizable(), "{:?}", r.labels);
            }
        }
    }
}
