//! A convex Euclidean polytope with the right combinatorics, placed in the
//! Klein model as a starting point for continuation.
//!
//! The dual graph is drawn by a Tutte embedding with one vertex's three faces
//! as the outer triangle. The same spring weights are an equilibrium stress,
//! so the Maxwell–Cremona lift of the drawing is a convex polytope whose
//! vertices are the faces of the input; its polar is the seed.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector2, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::lorentz::LorentzVector;
use crate::poly_model::{AbstractPolyhedron, VertexId};

#[derive(Clone, Debug)]
pub(crate) struct Seed {
    pub normals: Vec<LorentzVector>,
    /// Klein coordinates of every vertex.
    pub klein: Vec<Vector3<f64>>,
}

pub(crate) struct SeedParams {
    pub outer_vertex: VertexId,
    /// Klein radius of the farthest vertex.
    pub radius: f64,
    /// Random spring weights in `[0.5, 2]` when set.
    pub jitter: Option<u64>,
}

pub(crate) fn build(p: &AbstractPolyhedron, params: &SeedParams) -> Result<Seed, String> {
    let v0 = params.outer_vertex;
    let outer = p.vertex_faces(v0).to_vec();
    if outer.len() != 3 {
        return Err(format!("outer vertex {} is not trivalent", p.vertex_label(v0)));
    }
    let mut rng = params.jitter.map(StdRng::seed_from_u64);
    let weights: Vec<f64> = (0..p.edge_count())
        .map(|_| rng.as_mut().map_or(1.0, |r| r.random_range(0.5..2.0)))
        .collect();

    let pos = tutte(p, &outer, &weights)?;
    let heights = lift(p, v0, &pos, &weights)?;

    // whiten the lifted points so the polar is well proportioned
    let q: Vec<Vector3<f64>> = (0..p.face_count())
        .map(|f| Vector3::new(pos[f].x, pos[f].y, heights[f]))
        .collect();
    let n = q.len() as f64;
    let mean = q.iter().sum::<Vector3<f64>>() / n;
    let cov = q.iter().map(|x| (x - mean) * (x - mean).transpose()).sum::<Matrix3<f64>>() / n;
    let eig = SymmetricEigen::new(cov);
    if eig.eigenvalues.min() <= 1e-14 * eig.eigenvalues.max() {
        return Err("lifted dual is flat".into());
    }
    let inv_sqrt = eig.eigenvectors
        * Matrix3::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
        * eig.eigenvectors.transpose();
    let planes: Vec<Vector3<f64>> = q.iter().map(|x| inv_sqrt * (x - mean)).collect();

    // polar: face f is the plane ⟨planes[f], y⟩ = 1
    let mut verts = Vec::with_capacity(p.vertex_count());
    for v in 0..p.vertex_count() {
        let fs = p.vertex_faces(v);
        let m = Matrix3::from_rows(&[planes[fs[0]].transpose(), planes[fs[1]].transpose(), planes[fs[2]].transpose()]);
        let y = m
            .lu()
            .solve(&Vector3::repeat(1.0))
            .ok_or_else(|| format!("seed vertex {} is degenerate", p.vertex_label(v)))?;
        verts.push(y);
    }
    for (v, y) in verts.iter().enumerate() {
        for f in 0..p.face_count() {
            let s = planes[f].dot(y) - 1.0;
            let incident = p.vertex_faces(v).contains(&f);
            if (incident && s.abs() > 1e-8) || (!incident && s > -1e-10) {
                return Err(format!("seed is not convex at vertex {}", p.vertex_label(v)));
            }
        }
    }

    let r_max = verts.iter().map(|y| y.norm()).fold(0.0, f64::max);
    let lambda = params.radius / r_max;
    let klein: Vec<Vector3<f64>> = verts.iter().map(|y| lambda * y).collect();
    let normals = planes
        .iter()
        .map(|w| {
            let d = 1.0 / w.norm();
            let nrm = w / w.norm();
            let s = (1.0 - lambda * lambda * d * d).sqrt();
            LorentzVector::new(lambda * d / s, nrm.x / s, nrm.y / s, nrm.z / s)
        })
        .collect();
    Ok(Seed { normals, klein })
}

/// Positions of the dual vertices (faces of `p`) with `outer` pinned to a
/// triangle and every other face at the weighted average of its neighbors.
fn tutte(p: &AbstractPolyhedron, outer: &[usize], w: &[f64]) -> Result<Vec<Vector2<f64>>, String> {
    let nf = p.face_count();
    let mut pos = vec![Vector2::zeros(); nf];
    let mut index = vec![usize::MAX; nf];
    for (k, &f) in outer.iter().enumerate() {
        let a = std::f64::consts::TAU * k as f64 / 3.0;
        pos[f] = Vector2::new(a.cos(), a.sin());
    }
    let inner: Vec<usize> = (0..nf).filter(|f| !outer.contains(f)).collect();
    for (i, &f) in inner.iter().enumerate() {
        index[f] = i;
    }
    let m = inner.len();
    if m == 0 {
        return Ok(pos);
    }
    let mut a = DMatrix::zeros(m, m);
    let mut b = DMatrix::zeros(m, 2);
    for (e, edge) in p.edges().iter().enumerate() {
        let (f, g) = (edge.faces[0], edge.faces[1]);
        for (x, y) in [(f, g), (g, f)] {
            if index[x] == usize::MAX {
                continue;
            }
            let i = index[x];
            a[(i, i)] += w[e];
            if index[y] == usize::MAX {
                b[(i, 0)] += w[e] * pos[y].x;
                b[(i, 1)] += w[e] * pos[y].y;
            } else {
                a[(i, index[y])] -= w[e];
            }
        }
    }
    let sol = a.lu().solve(&b).ok_or("Tutte system is singular")?;
    for (i, &f) in inner.iter().enumerate() {
        pos[f] = Vector2::new(sol[(i, 0)], sol[(i, 1)]);
    }
    Ok(pos)
}

/// Heights of the Maxwell–Cremona lift: one affine function per vertex of
/// `p` other than `v0` (a bounded face of the drawing), glued across edges
/// with gradient jumps `w · J(p_g − p_f)` pointing into the next face.
fn lift(p: &AbstractPolyhedron, v0: VertexId, pos: &[Vector2<f64>], w: &[f64]) -> Result<Vec<f64>, String> {
    let nv = p.vertex_count();
    let centroid = |v: VertexId| {
        let fs = p.vertex_faces(v);
        fs.iter().map(|&f| pos[f]).sum::<Vector2<f64>>() / fs.len() as f64
    };
    let mut affine: Vec<Option<(Vector2<f64>, f64)>> = vec![None; nv];
    let start = (0..nv).find(|&v| v != v0).ok_or("polyhedron has one vertex")?;
    affine[start] = Some((Vector2::zeros(), 0.0));
    let mut stack = vec![start];
    while let Some(a) = stack.pop() {
        let (grad, off) = affine[a].unwrap();
        for &e in p.vertex_edges(a) {
            let edge = p.edge(e);
            let b = if edge.a == a { edge.b } else { edge.a };
            if b == v0 || affine[b].is_some() {
                continue;
            }
            let (f, g) = (edge.faces[0], edge.faces[1]);
            let d = pos[g] - pos[f];
            let mut m = Vector2::new(-d.y, d.x);
            if m.dot(&(centroid(b) - centroid(a))) < 0.0 {
                m = -m;
            }
            let grad_b = grad + w[e] * m;
            let off_b = off + (grad - grad_b).dot(&pos[f]);
            affine[b] = Some((grad_b, off_b));
            stack.push(b);
        }
    }
    let mut heights = vec![0.0; p.face_count()];
    for (f, h) in heights.iter_mut().enumerate() {
        let v = p.face(f).cycle.iter().copied().find(|&v| v != v0).unwrap();
        let (grad, off) = affine[v].ok_or("lift did not reach every vertex")?;
        *h = grad.dot(&pos[f]) + off;
    }
    Ok(heights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn check(p: &AbstractPolyhedron, jitter: Option<u64>) {
        for v0 in (0..p.vertex_count()).filter(|&v| p.valence(v) == 3) {
            let seed = build(
                p,
                &SeedParams {
                    outer_vertex: v0,
                    radius: 0.5,
                    jitter,
                },
            )
            .unwrap();
            for (v, y) in seed.klein.iter().enumerate() {
                assert!(y.norm() <= 0.5 + 1e-12);
                let x = LorentzVector::from_klein([y.x, y.y, y.z]);
                for (f, e) in seed.normals.iter().enumerate() {
                    assert!((e.norm_sq() - 1.0).abs() < 1e-12);
                    let s = x.dot(e);
                    if p.vertex_faces(v).contains(&f) {
                        assert!(s.abs() < 1e-9);
                    } else {
                        assert!(s < 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn corpus_seeds_are_convex() {
        for lp in [corpus::cube_all2(), corpus::triangular_prism(), corpus::pyramid(), corpus::tetrahedron()] {
            check(lp.base(), None);
            check(lp.base(), Some(7));
        }
    }
}
