//! k-circuits: simple closed curves crossing k edges, enumerated as simple
//! cycles of the face-adjacency (dual) graph.

use std::collections::BTreeSet;
use std::fmt;

use crate::poly_model::{AbstractPolyhedron, EdgeId, FaceId, VertexId};

/// Default cap on circuit length for orbifold searches.
pub const DEFAULT_MAX_CIRCUIT_LENGTH: usize = 12;

/// A closed curve visiting `faces` in order; `crossed_edges[i]` is the edge
/// between `faces[i]` and `faces[(i + 1) % k]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Circuit {
    pub faces: Vec<FaceId>,
    pub crossed_edges: Vec<EdgeId>,
    /// All `2k` endpoints of the crossed edges are distinct.
    pub prismatic: bool,
}

impl Circuit {
    /// Builds a circuit from a face cycle, canonicalizing it. Returns `None`
    /// if consecutive faces are not adjacent or a face repeats.
    pub fn from_faces(p: &AbstractPolyhedron, faces: &[FaceId]) -> Option<Self> {
        let k = faces.len();
        if k < 2 || faces.iter().collect::<BTreeSet<_>>().len() != k {
            return None;
        }
        let canon = canonical_rotation(faces);
        let mut edges = Vec::with_capacity(k);
        for i in 0..k {
            edges.push(p.shared_edge(canon[i], canon[(i + 1) % k])?);
        }
        if edges.iter().collect::<BTreeSet<_>>().len() != k {
            return None;
        }
        let prismatic = is_prismatic(p, &edges);
        Some(Self {
            faces: canon,
            crossed_edges: edges,
            prismatic,
        })
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Vertices shared by every crossed edge (non-empty only for curves that
    /// circle a single vertex).
    pub fn common_vertices(&self, p: &AbstractPolyhedron) -> Vec<VertexId> {
        let mut common: Option<BTreeSet<VertexId>> = None;
        for &e in &self.crossed_edges {
            let ends: BTreeSet<VertexId> = [p.edge(e).a, p.edge(e).b].into_iter().collect();
            common = Some(match common {
                None => ends,
                Some(c) => c.intersection(&ends).copied().collect(),
            });
        }
        common.unwrap_or_default().into_iter().collect()
    }

    /// Renders the circuit in the line format used by the CLI.
    pub fn display<'a>(&'a self, p: &'a AbstractPolyhedron) -> CircuitDisplay<'a> {
        CircuitDisplay { circuit: self, poly: p }
    }
}

pub struct CircuitDisplay<'a> {
    circuit: &'a Circuit,
    poly: &'a AbstractPolyhedron,
}

impl fmt::Display for CircuitDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.poly;
        let faces: Vec<&str> = self.circuit.faces.iter().map(|&x| p.face(x).name.as_str()).collect();
        let edges: Vec<String> = self
            .circuit
            .crossed_edges
            .iter()
            .map(|&e| {
                let (a, b) = (p.vertex_label(p.edge(e).a), p.vertex_label(p.edge(e).b));
                format!("({},{})", a.min(b), a.max(b))
            })
            .collect();
        write!(
            f,
            "circuit k={} prismatic={} faces={} edges={}",
            self.circuit.len(),
            self.circuit.prismatic,
            faces.join(","),
            edges.join(",")
        )
    }
}

fn is_prismatic(p: &AbstractPolyhedron, edges: &[EdgeId]) -> bool {
    let mut ends = BTreeSet::new();
    edges
        .iter()
        .all(|&e| ends.insert(p.edge(e).a) && ends.insert(p.edge(e).b))
}

/// Lexicographically smallest sequence among all rotations and reversals.
fn canonical_rotation(faces: &[FaceId]) -> Vec<FaceId> {
    let k = faces.len();
    let mut best: Option<Vec<FaceId>> = None;
    let reversed: Vec<FaceId> = faces.iter().rev().copied().collect();
    for seq in [faces, &reversed[..]] {
        for r in 0..k {
            let cand: Vec<FaceId> = (0..k).map(|i| seq[(r + i) % k]).collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

/// Every k-circuit of `p`, each once up to rotation and reversal, sorted.
pub fn enumerate_circuits(p: &AbstractPolyhedron, k: usize) -> Vec<Circuit> {
    if k < 3 {
        return Vec::new();
    }
    let adj = p.dual_adjacency();
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(k);
    let mut on_path = vec![false; p.face_count()];
    for start in 0..p.face_count() {
        path.clear();
        path.push(start);
        on_path[start] = true;
        extend(&adj, k, start, &mut path, &mut on_path, &mut |cycle| {
            // each cycle is met in both directions; keep one
            if cycle[1] < cycle[k - 1] {
                if let Some(c) = Circuit::from_faces(p, cycle) {
                    out.push(c);
                }
            }
        });
        on_path[start] = false;
    }
    out.sort();
    out.dedup();
    out
}

fn extend(
    adj: &[Vec<(FaceId, EdgeId)>],
    k: usize,
    start: FaceId,
    path: &mut Vec<FaceId>,
    on_path: &mut [bool],
    emit: &mut dyn FnMut(&[FaceId]),
) {
    let last = *path.last().unwrap();
    if path.len() == k {
        if adj[last].iter().any(|&(g, _)| g == start) {
            emit(path);
        }
        return;
    }
    for &(g, _) in &adj[last] {
        // start is the smallest face on the cycle
        if g <= start || on_path[g] {
            continue;
        }
        on_path[g] = true;
        path.push(g);
        extend(adj, k, start, path, on_path, emit);
        path.pop();
        on_path[g] = false;
    }
}

/// Prismatic 3-circuits.
pub fn separating_triangles(p: &AbstractPolyhedron) -> Vec<Circuit> {
    enumerate_circuits(p, 3)
        .into_iter()
        .filter(|c| c.prismatic)
        .collect()
}

/// Prismatic k-circuits.
pub fn prismatic_circuits(p: &AbstractPolyhedron, k: usize) -> Vec<Circuit> {
    enumerate_circuits(p, k)
        .into_iter()
        .filter(|c| c.prismatic)
        .collect()
}

/// The two vertex sets obtained by deleting the crossed edges. A simple
/// dual cycle is a minimal edge cut, so there are exactly two; `None` means
/// the input was not a valid circuit of `p`.
pub fn cut_sides(p: &AbstractPolyhedron, c: &Circuit) -> Option<[BTreeSet<VertexId>; 2]> {
    let cut: BTreeSet<EdgeId> = c.crossed_edges.iter().copied().collect();
    let mut comp = vec![usize::MAX; p.vertex_count()];
    let mut n = 0;
    for s in 0..p.vertex_count() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = n;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &e in p.vertex_edges(v) {
                if cut.contains(&e) {
                    continue;
                }
                let edge = p.edge(e);
                let w = if edge.a == v { edge.b } else { edge.a };
                if comp[w] == usize::MAX {
                    comp[w] = n;
                    stack.push(w);
                }
            }
        }
        n += 1;
    }
    if n != 2 {
        return None;
    }
    let mut sides = [BTreeSet::new(), BTreeSet::new()];
    for (v, &c) in comp.iter().enumerate() {
        sides[c].insert(v);
    }
    // every crossed edge must join the two sides
    let straddles = c
        .crossed_edges
        .iter()
        .all(|&e| comp[p.edge(e).a] != comp[p.edge(e).b]);
    straddles.then_some(sides)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn cube_three_circuits_are_vertex_links() {
        let p = corpus::cube_all2().base().clone();
        let c3 = enumerate_circuits(&p, 3);
        assert_eq!(c3.len(), 8);
        assert!(c3.iter().all(|c| !c.prismatic));
        for c in &c3 {
            assert_eq!(c.common_vertices(&p).len(), 1);
        }
        assert!(separating_triangles(&p).is_empty());
    }

    #[test]
    fn cube_has_three_prismatic_four_circuits() {
        let p = corpus::cube_all2().base().clone();
        let prismatic = prismatic_circuits(&p, 4);
        assert_eq!(prismatic.len(), 3);
        // each band crosses four parallel edges, which are pairwise disjoint
        for c in &prismatic {
            let sides = cut_sides(&p, c).unwrap();
            assert_eq!(sides[0].len(), 4);
            assert_eq!(sides[1].len(), 4);
        }
    }

    #[test]
    fn prism_has_one_separating_triangle() {
        let p = corpus::triangular_prism().base().clone();
        let st = separating_triangles(&p);
        assert_eq!(st.len(), 1);
        let names: Vec<&str> = st[0].faces.iter().map(|&f| p.face(f).name.as_str()).collect();
        assert_eq!(names, ["l01", "l12", "l20"]);
    }

    #[test]
    fn tetrahedron_has_no_separating_triangle() {
        let p = corpus::tetrahedron().base().clone();
        assert_eq!(enumerate_circuits(&p, 3).len(), 4);
        assert!(separating_triangles(&p).is_empty());
    }

    #[test]
    fn display_format() {
        let p = corpus::cube_all2().base().clone();
        let c = &prismatic_circuits(&p, 4)[0];
        let line = c.display(&p).to_string();
        assert!(line.starts_with("circuit k=4 prismatic=true faces="), "{line}");
    }

    #[test]
    fn canonical_rotation_picks_smallest() {
        assert_eq!(canonical_rotation(&[3, 1, 4, 2]), vec![1, 3, 2, 4]);
        assert_eq!(canonical_rotation(&[2, 4, 1]), vec![1, 2, 4]);
    }
}
