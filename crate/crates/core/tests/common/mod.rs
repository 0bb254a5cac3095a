#![allow(dead_code)]

use hypercox::corpus;
use hypercox::poly_model::{AbstractPolyhedron, LabeledPolyhedron};

/// Replaces the trivalent vertex `v` (dense index) by a triangle.
pub fn truncate(p: &AbstractPolyhedron, v: usize) -> AbstractPolyhedron {
    assert_eq!(p.valence(v), 3);
    let ids: Vec<u64> = (0..p.vertex_count()).map(|x| p.vertex_label(x)).collect();
    let first = ids.iter().max().unwrap() + 1;
    // new vertex on each edge at v, keyed by the far endpoint
    let mut cut = std::collections::BTreeMap::new();
    for (&e, id) in p.vertex_edges(v).iter().zip(first..) {
        let edge = p.edge(e);
        let far = if edge.a == v { edge.b } else { edge.a };
        cut.insert(far, id);
    }
    let mut faces = Vec::new();
    let mut triangle_edges = Vec::new();
    for f in p.faces() {
        let k = f.cycle.len();
        let mut cycle = Vec::new();
        for i in 0..k {
            let x = f.cycle[i];
            if x == v {
                let (u, w) = (f.cycle[(i + k - 1) % k], f.cycle[(i + 1) % k]);
                cycle.push(cut[&u]);
                cycle.push(cut[&w]);
                // the triangle runs along this new edge the other way
                triangle_edges.push((cut[&w], cut[&u]));
            } else {
                cycle.push(ids[x]);
            }
        }
        faces.push((f.name.clone(), cycle));
    }
    let mut tri = vec![triangle_edges[0].0, triangle_edges[0].1];
    while tri.len() < 3 {
        let last = *tri.last().unwrap();
        let (_, b) = triangle_edges.iter().find(|(a, _)| *a == last).unwrap();
        tri.push(*b);
    }
    faces.push((format!("cut{}", ids[v]), tri));
    let mut all: Vec<u64> = ids.iter().copied().filter(|&x| x != ids[v]).collect();
    all.extend(cut.values());
    let ideal: Vec<u64> = p.ideal_candidates().map(|x| ids[x]).collect();
    let outer = p.outer_face();
    AbstractPolyhedron::from_faces(p.name(), &all, &ideal, &faces, outer).unwrap()
}

/// A polyhedron from the corpus with `cuts` successive truncations, choices
/// driven by `picks`.
pub fn truncated(start: usize, picks: &[usize]) -> AbstractPolyhedron {
    let bases = [corpus::tetrahedron(), corpus::cube_all2(), corpus::triangular_prism()];
    let mut p = bases[start % bases.len()].base().clone();
    for &k in picks {
        let trivalent: Vec<usize> = (0..p.vertex_count()).filter(|&v| p.valence(v) == 3).collect();
        p = truncate(&p, trivalent[k % trivalent.len()]);
    }
    p
}

pub fn with_labels(p: &AbstractPolyhedron, labels: Vec<u32>) -> LabeledPolyhedron {
    LabeledPolyhedron::new(p.clone(), labels).unwrap()
}

/// `p` with external ids permuted by `perm` (a permutation of `0..V`),
/// offset so the result never coincides with the original numbering.
pub fn renumbered(p: &AbstractPolyhedron, perm: &[usize]) -> AbstractPolyhedron {
    let ids: Vec<u64> = perm.iter().map(|&i| 100 + i as u64 * 7).collect();
    p.relabeled(&ids).unwrap()
}
