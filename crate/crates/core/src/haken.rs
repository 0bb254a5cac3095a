//! Large (Haken) versus small polyhedra.
//!
//! A closed curve on the boundary of the polyhedron, together with one of the
//! two disks it bounds, is a 2-orbifold. Curves are taken to be dual cycles
//! (see [`crate::circuits`]); the disk side is one of the two vertex sets left
//! after cutting the crossed edges.

use std::collections::BTreeSet;
use std::fmt;

use crate::circuits::{cut_sides, enumerate_circuits, separating_triangles, Circuit, DEFAULT_MAX_CIRCUIT_LENGTH};
use crate::poly_model::{AbstractPolyhedron, EdgeId, FaceId, VertexId};

/// A curve plus the disk it bounds, recorded by the polyhedron vertices and
/// faces lying strictly inside the disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoOrbifold {
    pub curve: Circuit,
    pub disk_vertices: BTreeSet<VertexId>,
    /// Faces entirely inside the disk (never faces the curve passes through).
    pub disk_faces: BTreeSet<FaceId>,
}

impl TwoOrbifold {
    /// Both orbifolds bounded by `curve`, or `None` if the curve does not
    /// split the polyhedron in two.
    pub fn both_sides(p: &AbstractPolyhedron, curve: &Circuit) -> Option<[TwoOrbifold; 2]> {
        let [a, b] = cut_sides(p, curve)?;
        Some([Self::with_side(p, curve, a), Self::with_side(p, curve, b)])
    }

    fn with_side(p: &AbstractPolyhedron, curve: &Circuit, side: BTreeSet<VertexId>) -> Self {
        let on_curve: BTreeSet<FaceId> = curve.faces.iter().copied().collect();
        let disk_faces = (0..p.face_count())
            .filter(|f| !on_curve.contains(f))
            .filter(|&f| p.face(f).cycle.iter().all(|v| side.contains(v)))
            .collect();
        Self {
            curve: curve.clone(),
            disk_vertices: side,
            disk_faces,
        }
    }
}

/// An arc across the disk with both ends on the curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressionArc {
    /// Curve faces holding the two ends of the arc (equal when the arc stays
    /// in one face).
    pub host_faces: (FaceId, FaceId),
    /// The polyhedron edge the arc crosses, if any.
    pub crossed_edge: Option<EdgeId>,
    /// Number of curve crossings on each of the two arcs the ends cut the
    /// curve into.
    pub split_counts: (usize, usize),
}

/// Trivial forms that bound an evident disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseForm {
    /// The curve crosses fewer than three edges.
    FewCrossings,
    /// Every crossed edge ends at one vertex: the curve circles it.
    VertexLink(VertexId),
    /// The disk holds exactly one triangular face and nothing else.
    TriangleBoundary(FaceId),
}

/// Arcs across the disk of `orb` that cross at most one edge and split the
/// curve into two arcs of at least two crossings each.
///
/// Curve faces are distinct, so an arc within a single face cuts off a piece
/// of the curve with no crossings; only arcs that pass from one curve face to
/// a non-consecutive one through a shared edge inside the disk can qualify.
pub fn find_compressions(p: &AbstractPolyhedron, orb: &TwoOrbifold) -> Vec<CompressionArc> {
    let k = orb.curve.len();
    if k < 4 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let d = j - i;
            if d < 2 || k - d < 2 {
                continue;
            }
            let (fi, fj) = (orb.curve.faces[i], orb.curve.faces[j]);
            let Some(e) = p.shared_edge(fi, fj) else {
                continue;
            };
            let edge = p.edge(e);
            if orb.disk_vertices.contains(&edge.a) && orb.disk_vertices.contains(&edge.b) {
                out.push(CompressionArc {
                    host_faces: (fi, fj),
                    crossed_edge: Some(e),
                    split_counts: (d, k - d),
                });
            }
        }
    }
    out
}

/// The trivial form `orb` takes, if any.
pub fn base_form(p: &AbstractPolyhedron, orb: &TwoOrbifold) -> Option<BaseForm> {
    if orb.curve.len() < 3 {
        return Some(BaseForm::FewCrossings);
    }
    if orb.disk_vertices.len() == 1 {
        let v = *orb.disk_vertices.iter().next().unwrap();
        if orb.curve.crossed_edges.iter().all(|&e| p.edge(e).has_vertex(v)) {
            return Some(BaseForm::VertexLink(v));
        }
    }
    if orb.disk_faces.len() == 1 {
        let f = *orb.disk_faces.iter().next().unwrap();
        let verts: BTreeSet<VertexId> = p.face(f).cycle.iter().copied().collect();
        if p.face(f).cycle.len() == 3 && verts == orb.disk_vertices {
            return Some(BaseForm::TriangleBoundary(f));
        }
    }
    None
}

pub fn is_compressible(p: &AbstractPolyhedron, orb: &TwoOrbifold) -> bool {
    base_form(p, orb).is_some() || !find_compressions(p, orb).is_empty()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Size {
    Large,
    Small,
}

impl Size {
    pub fn name(self) -> &'static str {
        match self {
            Size::Large => "Large",
            Size::Small => "Small",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HakenWitness {
    Incompressible(TwoOrbifold),
    SeparatingTriangle(Circuit),
    /// No incompressible orbifold among curves crossing at most `cap` edges.
    NoneFoundUpTo { cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HakenVerdict {
    pub size: Size,
    pub witness: HakenWitness,
}

impl HakenVerdict {
    pub fn is_large(&self) -> bool {
        self.size == Size::Large
    }

    pub fn render(&self, p: &AbstractPolyhedron) -> String {
        let mut s = format!("verdict {}\n", self.size.name());
        match &self.witness {
            HakenWitness::Incompressible(o) => {
                s += &format!("witness incompressible {}\n", o.curve.display(p));
            }
            HakenWitness::SeparatingTriangle(c) => {
                s += &format!("witness separating-triangle {}\n", c.display(p));
            }
            HakenWitness::NoneFoundUpTo { cap } => {
                s += &format!("witness none found up to cap={cap}\n");
            }
        }
        if self.size == Size::Small {
            s += "note: trivial forms tested are curves crossing < 3 edges, vertex links, \
                  and curves bounding a single triangular face\n";
        }
        s
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Large iff there is no separating triangle and some curve crossing at most
/// `cap` edges is incompressible from both sides.
pub fn classify_with_cap(p: &AbstractPolyhedron, cap: usize) -> HakenVerdict {
    if let Some(t) = separating_triangles(p).into_iter().next() {
        return HakenVerdict {
            size: Size::Small,
            witness: HakenWitness::SeparatingTriangle(t),
        };
    }
    for k in 3..=cap.min(p.face_count()) {
        for c in enumerate_circuits(p, k) {
            let Some(sides) = TwoOrbifold::both_sides(p, &c) else {
                continue;
            };
            // a compressing disk or an evident disk on either side kills the curve
            if sides.iter().all(|orb| !is_compressible(p, orb)) {
                let [orb, _] = sides;
                return HakenVerdict {
                    size: Size::Large,
                    witness: HakenWitness::Incompressible(orb),
                };
            }
        }
    }
    HakenVerdict {
        size: Size::Small,
        witness: HakenWitness::NoneFoundUpTo { cap },
    }
}

pub fn classify(p: &AbstractPolyhedron) -> HakenVerdict {
    classify_with_cap(p, DEFAULT_MAX_CIRCUIT_LENGTH)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::prismatic_circuits;
    use crate::corpus;

    fn cube() -> AbstractPolyhedron {
        corpus::cube_all2().base().clone()
    }

    #[test]
    fn equatorial_band_is_incompressible() {
        let p = cube();
        for c in prismatic_circuits(&p, 4) {
            for orb in TwoOrbifold::both_sides(&p, &c).unwrap() {
                assert!(find_compressions(&p, &orb).is_empty());
                assert_eq!(base_form(&p, &orb), None);
                assert!(!is_compressible(&p, &orb));
            }
        }
    }

    #[test]
    fn vertex_link_is_compressible() {
        let p = cube();
        let c = &enumerate_circuits(&p, 3)[0];
        let sides = TwoOrbifold::both_sides(&p, c).unwrap();
        let small = sides.iter().find(|o| o.disk_vertices.len() == 1).unwrap();
        assert!(matches!(base_form(&p, small), Some(BaseForm::VertexLink(_))));
        assert!(is_compressible(&p, small));
    }

    #[test]
    fn curve_around_an_edge_compresses() {
        // around edge (0,1): faces front and bottom hold the edge; left and
        // right are the third faces at 0 and 1.
        let p = cube();
        let id = |n: &str| p.faces().iter().position(|f| f.name == n).unwrap();
        let c = Circuit::from_faces(&p, &[id("front"), id("left"), id("bottom"), id("right")]).unwrap();
        assert!(!c.prismatic);
        let sides = TwoOrbifold::both_sides(&p, &c).unwrap();
        let near = sides.iter().find(|o| o.disk_vertices.len() == 2).unwrap();
        let arcs = find_compressions(&p, near);
        assert_eq!(arcs.len(), 1);
        assert_eq!(arcs[0].split_counts, (2, 2));
        let e = arcs[0].crossed_edge.unwrap();
        assert_eq!(
            (p.vertex_label(p.edge(e).a), p.vertex_label(p.edge(e).b)),
            (0, 1)
        );
    }

    #[test]
    fn two_crossing_curve_is_trivial() {
        let p = cube();
        let orb = TwoOrbifold {
            curve: Circuit {
                faces: vec![0, 2],
                crossed_edges: vec![p.shared_edge(0, 2).unwrap(); 2],
                prismatic: false,
            },
            disk_vertices: BTreeSet::new(),
            disk_faces: BTreeSet::new(),
        };
        assert!(find_compressions(&p, &orb).is_empty());
        assert_eq!(base_form(&p, &orb), Some(BaseForm::FewCrossings));
        assert!(is_compressible(&p, &orb));
    }

    #[test]
    fn corpus_verdicts() {
        let v = classify(&cube());
        assert_eq!(v.size, Size::Large);
        match &v.witness {
            HakenWitness::Incompressible(o) => assert!(o.curve.prismatic && o.curve.len() == 4),
            w => panic!("unexpected witness {w:?}"),
        }
        assert_eq!(classify(corpus::tetrahedron().base()).size, Size::Small);
        let prism = classify(corpus::triangular_prism().base());
        assert_eq!(prism.size, Size::Small);
        assert!(matches!(prism.witness, HakenWitness::SeparatingTriangle(_)));
    }
}
