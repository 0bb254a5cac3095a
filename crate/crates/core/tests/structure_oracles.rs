mod common;

use std::collections::BTreeSet;

use hypercox::circuits::{cut_sides, enumerate_circuits, prismatic_circuits};
use hypercox::corpus;
use hypercox::haken::{base_form, classify, find_compressions, HakenWitness, Size, TwoOrbifold};
use hypercox::poly_model::{automorphisms, validate, AbstractPolyhedron};

/// Vertex permutations that map edges to edges and faces to faces, found by
/// backtracking over all assignments.
fn brute_force_symmetries(p: &AbstractPolyhedron) -> BTreeSet<Vec<usize>> {
    let n = p.vertex_count();
    let faces: BTreeSet<BTreeSet<usize>> = p.faces().iter().map(|f| f.cycle.iter().copied().collect()).collect();
    let mut out = BTreeSet::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        p: &AbstractPolyhedron,
        faces: &BTreeSet<BTreeSet<usize>>,
        v: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        let n = p.vertex_count();
        if v == n {
            let image: BTreeSet<BTreeSet<usize>> = faces
                .iter()
                .map(|f| f.iter().map(|&x| map[x]).collect())
                .collect();
            if &image == faces {
                out.insert(map.clone());
            }
            return;
        }
        for t in 0..n {
            if used[t] || p.valence(t) != p.valence(v) {
                continue;
            }
            // adjacency to already placed vertices must be preserved
            let ok = (0..v).all(|u| p.edge_between(u, v).is_some() == p.edge_between(map[u], t).is_some());
            if !ok {
                continue;
            }
            map[v] = t;
            used[t] = true;
            go(p, faces, v + 1, map, used, out);
            used[t] = false;
        }
        map[v] = usize::MAX;
    }
    go(p, &faces, 0, &mut map, &mut used, &mut out);
    out
}

#[test]
fn automorphisms_match_brute_force() {
    let mut polys: Vec<AbstractPolyhedron> = corpus::ALL
        .iter()
        .map(|(_, text)| hypercox::poly_model::parse_polyhedron(text).unwrap().polyhedron.base().clone())
        .collect();
    polys.push(common::truncated(1, &[0]));
    polys.push(common::truncated(0, &[0, 1]));
    polys.push(common::truncated(2, &[3]));
    let expected = [24, 48, 48, 12, 8];
    for (i, p) in polys.iter().enumerate() {
        let fast: BTreeSet<Vec<usize>> = automorphisms(p).into_iter().map(|g| g.vertices).collect();
        let slow = brute_force_symmetries(p);
        assert_eq!(fast, slow, "{}", p.name());
        if let Some(&n) = expected.get(i) {
            assert_eq!(fast.len(), n, "{}", p.name());
        }
    }
}

#[test]
fn truncations_are_valid_polyhedra() {
    for start in 0..3 {
        for picks in [vec![], vec![0], vec![1, 4], vec![2, 0, 5]] {
            let p = common::truncated(start, &picks);
            let report = validate(&p);
            assert!(report.passed(), "{report:?}");
        }
    }
}

/// Vertex sets reachable from `start` without using `cut` edges.
fn component(p: &AbstractPolyhedron, start: usize, cut: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &e in p.vertex_edges(v) {
            if cut.contains(&e) {
                continue;
            }
            let edge = p.edge(e);
            let w = if edge.a == v { edge.b } else { edge.a };
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

#[test]
fn circuits_are_edge_cuts() {
    for p in [
        corpus::cube_all2().base().clone(),
        corpus::triangular_prism().base().clone(),
        common::truncated(1, &[0, 3]),
    ] {
        for k in 3..=6 {
            for c in enumerate_circuits(&p, k) {
                let cut: BTreeSet<usize> = c.crossed_edges.iter().copied().collect();
                let [a, b] = cut_sides(&p, &c).expect("every circuit separates");
                let start = *a.iter().next().unwrap();
                assert_eq!(component(&p, start, &cut), a);
                let start = *b.iter().next().unwrap();
                assert_eq!(component(&p, start, &cut), b);
                assert_eq!(a.len() + b.len(), p.vertex_count());
                // every crossed edge joins the two sides
                for &e in &c.crossed_edges {
                    let edge = p.edge(e);
                    assert!(a.contains(&edge.a) != a.contains(&edge.b));
                }
                if k == 3 && !c.prismatic {
                    assert_eq!(c.common_vertices(&p).len(), 1);
                }
            }
        }
    }
}

#[test]
fn circuit_counts() {
    let cube = corpus::cube_all2();
    assert_eq!(prismatic_circuits(cube.base(), 4).len(), 3);
    assert_eq!(prismatic_circuits(cube.base(), 3).len(), 0);
    let prism = corpus::triangular_prism();
    assert_eq!(prismatic_circuits(prism.base(), 3).len(), 1);
}

#[test]
fn haken_witnesses_are_consistent() {
    let cube = corpus::cube_all2();
    let v = classify(cube.base());
    assert_eq!(v.size, Size::Large);
    let HakenWitness::Incompressible(orb) = &v.witness else {
        panic!("{v:?}");
    };
    assert!(orb.curve.prismatic && orb.curve.len() == 4);
    for side in TwoOrbifold::both_sides(cube.base(), &orb.curve).unwrap() {
        assert!(find_compressions(cube.base(), &side).is_empty());
        assert!(base_form(cube.base(), &side).is_none());
    }
    assert_eq!(classify(corpus::tetrahedron().base()).size, Size::Small);
    let prism = classify(corpus::triangular_prism().base());
    assert!(matches!(prism.witness, HakenWitness::SeparatingTriangle(_)));
}
