//! Realization in the hyperboloid model.
//!
//! Each face `f` gets an outward unit spacelike normal `e_f`, the polyhedron
//! being `{x : ⟨x, e_f⟩ ≤ 0 for all f}`. An edge with interior dihedral angle
//! `θ` between faces `f` and `g` asks for `⟨e_f, e_g⟩ = −cos θ`.
//!
//! Gauge: a compact trivalent vertex `v*` sits at `(1, 0, 0, 0)` and its three
//! faces `a < b < c` have normals
//!
//! ```text
//! e_a = (0, 0, 0, 1)
//! e_b = (0, sin θab, 0, −cos θab)
//! e_c = (0, p, q, −cos θac),  q ≥ 0
//! ```
//!
//! which uses up the six dimensions of the isometry group. The remaining
//! normals, plus Klein coordinates for every 4-valent (ideal) vertex, are
//! found by damped Gauss–Newton and continuation in angle space from a
//! Euclidean seed (see [`seed`]).

mod lorentz;
mod seed;

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

pub use lorentz::LorentzVector;

use crate::andreev::{self, Regime};
use crate::poly_model::{AbstractPolyhedron, EdgeId, FaceId, LabeledPolyhedron, VertexId};

/// Newton target inside the solver; the accepted residual is looser.
const INNER_TOL: f64 = 1e-13;
/// Angle sums within this of the boundary count as ideal.
const IDEAL_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealizeError {
    #[error("labeling is not realizable: {reason}")]
    NotRealizable { reason: String },
    #[error("no compact trivalent vertex to fix the gauge")]
    NoGaugeVertex,
    #[error("Newton iteration did not converge (best residual {best_residual:.3e})")]
    NonConvergence { best_residual: f64 },
    #[error("vertex {vertex} is not timelike (⟨x,x⟩/|x|² = {ratio:.3e})")]
    DegenerateVertex { vertex: u64, ratio: f64 },
    #[error("vertex {vertex} lies outside face {face}")]
    NotConvex { vertex: u64, face: String },
    #[error("edge ({a},{b}) has an ideal endpoint and infinite length")]
    IdealEndpoint { a: u64, b: u64 },
    #[error("no usable seed: {0}")]
    Seed(String),
}

#[derive(Clone, Copy, Debug)]
pub struct RealizeOptions {
    pub regime: Regime,
    /// Largest accepted constraint violation.
    pub residual_tol: f64,
    /// Newton iterations per solve.
    pub max_iterations: usize,
    /// Continuation steps per solve.
    pub max_steps: usize,
    /// Randomizes the seed (spring weights, placement and outer face).
    pub perturbation: Option<u64>,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        Self {
            regime: Regime::StrictCompact,
            residual_tol: 1e-10,
            max_iterations: 200,
            max_steps: 2000,
            perturbation: None,
        }
    }
}

/// Unknowns versus constraints: `4F − (E + F + extra) − 6`, where `extra`
/// counts the surplus incidence equation of each 4-valent vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DofAudit {
    pub faces: usize,
    pub edges: usize,
    pub extra: usize,
}

impl DofAudit {
    pub fn unknowns(&self) -> usize {
        4 * self.faces
    }

    pub fn constraints(&self) -> usize {
        self.edges + self.faces + self.extra
    }

    pub fn defect(&self) -> i64 {
        self.unknowns() as i64 - self.constraints() as i64 - 6
    }
}

impl fmt::Display for DofAudit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknowns={} constraints={} gauge=6 defect={}",
            self.unknowns(),
            self.constraints(),
            self.defect()
        )
    }
}

#[derive(Clone, Debug)]
pub struct Realization {
    /// Outward unit normals, indexed by face.
    pub normals: Vec<LorentzVector>,
    /// Indexed by vertex: `⟨v,v⟩ = −1` for finite vertices, `x0 = 1` for
    /// ideal ones.
    pub vertices: Vec<LorentzVector>,
    pub ideal: Vec<bool>,
    /// Dihedral angles realized, indexed by edge.
    pub angles: Vec<f64>,
    /// Largest violation of the Gram and incidence equations.
    pub residual: f64,
    pub dof: DofAudit,
    pub gauge_vertex: VertexId,
    pub gauge_faces: [FaceId; 3],
    /// Continuation steps taken to reach this solution.
    pub steps: usize,
    edge_ends: Vec<(VertexId, VertexId)>,
}

impl Realization {
    /// Hyperbolic length, or `None` for an edge with an ideal endpoint.
    pub fn edge_length(&self, e: EdgeId) -> Option<f64> {
        let (a, b) = self.edge_ends[e];
        if self.ideal[a] || self.ideal[b] {
            return None;
        }
        Some(self.vertices[a].distance(&self.vertices[b]))
    }

    /// Gram entry `⟨e_f, e_g⟩`.
    pub fn gram(&self, f: FaceId, g: FaceId) -> f64 {
        self.normals[f].dot(&self.normals[g])
    }
}

/// All edge lengths; fails on the first edge with an ideal endpoint.
pub fn edge_lengths(r: &Realization, p: &AbstractPolyhedron) -> Result<Vec<f64>, RealizeError> {
    (0..p.edge_count())
        .map(|e| {
            r.edge_length(e).ok_or_else(|| {
                let edge = p.edge(e);
                RealizeError::IdealEndpoint {
                    a: p.vertex_label(edge.a),
                    b: p.vertex_label(edge.b),
                }
            })
        })
        .collect()
}

/// Realizes `lp`, which must pass the Andreev check under `opts.regime`.
pub fn realize(lp: &LabeledPolyhedron, opts: &RealizeOptions) -> Result<Realization, RealizeError> {
    Ok(Tracker::new(lp, opts)?.target().clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Finite,
    Ideal,
}

/// The nonlinear system for one polyhedron in the fixed gauge.
#[derive(Clone, Debug)]
struct System {
    p: AbstractPolyhedron,
    edge_faces: Vec<(FaceId, FaceId)>,
    gauge_vertex: VertexId,
    gauge: [FaceId; 3],
    /// Edges ab, ac, bc among the gauge faces.
    gauge_edges: [EdgeId; 3],
    slot: Vec<Option<usize>>,
    free: Vec<FaceId>,
    /// 4-valent vertices, whose Klein coordinates are unknowns.
    quads: Vec<VertexId>,
    solved_edges: Vec<EdgeId>,
}

struct NewtonOutcome {
    residual: f64,
}

impl System {
    fn new(p: &AbstractPolyhedron, gauge_vertex: VertexId) -> Self {
        let mut g: Vec<FaceId> = p.vertex_faces(gauge_vertex).to_vec();
        g.sort_unstable();
        let gauge = [g[0], g[1], g[2]];
        let se = |x, y| p.shared_edge(x, y).expect("faces at a vertex share edges");
        let gauge_edges = [se(g[0], g[1]), se(g[0], g[2]), se(g[1], g[2])];
        let mut slot = vec![None; p.face_count()];
        let free: Vec<FaceId> = (0..p.face_count()).filter(|f| !gauge.contains(f)).collect();
        for (i, &f) in free.iter().enumerate() {
            slot[f] = Some(i);
        }
        let quads = (0..p.vertex_count()).filter(|&v| p.valence(v) == 4).collect();
        let solved_edges = (0..p.edge_count()).filter(|e| !gauge_edges.contains(e)).collect();
        Self {
            edge_faces: p.edges().iter().map(|e| (e.faces[0], e.faces[1])).collect(),
            p: p.clone(),
            gauge_vertex,
            gauge,
            gauge_edges,
            slot,
            free,
            quads,
            solved_edges,
        }
    }

    fn unknowns(&self) -> usize {
        4 * self.free.len() + 3 * self.quads.len()
    }

    fn quad_offset(&self, k: usize) -> usize {
        4 * self.free.len() + 3 * k
    }

    fn dof(&self) -> DofAudit {
        DofAudit {
            faces: self.p.face_count(),
            edges: self.p.edge_count(),
            extra: self.quads.len(),
        }
    }

    fn gauge_normals(&self, angles: &[f64]) -> Option<[LorentzVector; 3]> {
        let [ab, ac, bc] = self.gauge_edges.map(|e| angles[e]);
        let r = -ac.cos();
        let p = (-bc.cos() - ab.cos() * ac.cos()) / ab.sin();
        let q2 = 1.0 - p * p - r * r;
        if q2 < -1e-12 {
            return None;
        }
        Some([
            LorentzVector::new(0.0, 0.0, 0.0, 1.0),
            LorentzVector::new(0.0, ab.sin(), 0.0, -ab.cos()),
            LorentzVector::new(0.0, p, q2.max(0.0).sqrt(), r),
        ])
    }

    fn normals(&self, u: &DVector<f64>, angles: &[f64]) -> Option<Vec<LorentzVector>> {
        let gauge = self.gauge_normals(angles)?;
        let mut out = vec![LorentzVector::default(); self.p.face_count()];
        for (i, &f) in self.gauge.iter().enumerate() {
            out[f] = gauge[i];
        }
        for (i, &f) in self.free.iter().enumerate() {
            out[f] = LorentzVector::new(u[4 * i], u[4 * i + 1], u[4 * i + 2], u[4 * i + 3]);
        }
        Some(out)
    }

    fn quad_point(&self, u: &DVector<f64>, k: usize) -> LorentzVector {
        let o = self.quad_offset(k);
        LorentzVector::from_klein([u[o], u[o + 1], u[o + 2]])
    }

    fn residual(&self, u: &DVector<f64>, angles: &[f64]) -> Option<DVector<f64>> {
        let n = self.normals(u, angles)?;
        let mut r = Vec::with_capacity(self.unknowns() + 4);
        for &f in &self.free {
            r.push(n[f].norm_sq() - 1.0);
        }
        for &e in &self.solved_edges {
            let (f, g) = self.edge_faces[e];
            r.push(n[f].dot(&n[g]) + angles[e].cos());
        }
        for (k, &v) in self.quads.iter().enumerate() {
            let x = self.quad_point(u, k);
            for &f in self.p.vertex_faces(v) {
                r.push(x.dot(&n[f]));
            }
        }
        Some(DVector::from_vec(r))
    }

    fn jacobian(&self, u: &DVector<f64>, angles: &[f64]) -> Option<DMatrix<f64>> {
        let n = self.normals(u, angles)?;
        let rows = self.free.len() + self.solved_edges.len() + 4 * self.quads.len();
        let mut j = DMatrix::zeros(rows, self.unknowns());
        let mut row = 0;
        let put = |j: &mut DMatrix<f64>, row: usize, col: usize, v: LorentzVector| {
            for c in 0..4 {
                j[(row, col + c)] += v[c];
            }
        };
        for (i, &f) in self.free.iter().enumerate() {
            put(&mut j, row, 4 * i, 2.0 * n[f].flip_time());
            row += 1;
        }
        for &e in &self.solved_edges {
            let (f, g) = self.edge_faces[e];
            if let Some(i) = self.slot[f] {
                put(&mut j, row, 4 * i, n[g].flip_time());
            }
            if let Some(i) = self.slot[g] {
                put(&mut j, row, 4 * i, n[f].flip_time());
            }
            row += 1;
        }
        for (k, &v) in self.quads.iter().enumerate() {
            let x = self.quad_point(u, k);
            let o = self.quad_offset(k);
            for &f in self.p.vertex_faces(v) {
                if let Some(i) = self.slot[f] {
                    put(&mut j, row, 4 * i, x.flip_time());
                }
                for c in 0..3 {
                    j[(row, o + c)] = n[f][c + 1];
                }
                row += 1;
            }
        }
        Some(j)
    }

    /// Damped Gauss–Newton: steps are halved until the residual drops; stops
    /// on convergence, stagnation, or `max_iter`.
    fn newton(&self, u: &mut DVector<f64>, angles: &[f64], tol: f64, max_iter: usize) -> NewtonOutcome {
        let Some(mut r) = self.residual(u, angles) else {
            return NewtonOutcome {
                residual: f64::INFINITY,
            };
        };
        for _ in 0..max_iter {
            if r.amax() <= tol {
                break;
            }
            let Some(j) = self.jacobian(u, angles) else { break };
            let svd = j.svd(true, true);
            let cutoff = 1e-13 * svd.singular_values.max();
            let Ok(delta) = svd.solve(&(-&r), cutoff) else { break };
            let norm0 = r.norm();
            let mut alpha = 1.0;
            let mut accepted = false;
            while alpha >= 1.0 / 1024.0 {
                let cand = &*u + alpha * &delta;
                if let Some(rc) = self.residual(&cand, angles) {
                    if rc.norm() < norm0 {
                        *u = cand;
                        r = rc;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted || alpha * delta.amax() < 1e-14 {
                break;
            }
        }
        NewtonOutcome { residual: r.amax() }
    }

    fn kinds(&self, angles: &[f64]) -> Result<Vec<Kind>, RealizeError> {
        let p = &self.p;
        (0..p.vertex_count())
            .map(|v| {
                let d = p.valence(v) as f64;
                let sum: f64 = p.vertex_edges(v).iter().map(|&e| angles[e]).sum();
                let excess = sum - (d - 2.0) * PI;
                if excess > IDEAL_SLACK {
                    Ok(Kind::Finite)
                } else if excess >= -IDEAL_SLACK {
                    Ok(Kind::Ideal)
                } else {
                    Err(RealizeError::NotRealizable {
                        reason: format!("vertex {} has angle sum below {}π", p.vertex_label(v), d - 2.0),
                    })
                }
            })
            .collect()
    }

    /// Vertices from the normals, normalized; checks that finite vertices
    /// are timelike and that every vertex lies inside all other faces.
    fn vertices(
        &self,
        u: &DVector<f64>,
        angles: &[f64],
        normals: &[LorentzVector],
    ) -> Result<(Vec<LorentzVector>, Vec<bool>), RealizeError> {
        let p = &self.p;
        let kinds = self.kinds(angles)?;
        let mut verts = Vec::with_capacity(p.vertex_count());
        for v in 0..p.vertex_count() {
            let fs = p.vertex_faces(v);
            let x = if let Some(k) = self.quads.iter().position(|&q| q == v) {
                let x = self.quad_point(u, k);
                let nsq = x.norm_sq();
                if kinds[v] == Kind::Finite {
                    if nsq >= 0.0 {
                        return Err(RealizeError::DegenerateVertex {
                            vertex: p.vertex_label(v),
                            ratio: nsq,
                        });
                    }
                    (1.0 / (-nsq).sqrt()) * x
                } else {
                    x
                }
            } else {
                let x = LorentzVector::orthogonal_to(&normals[fs[0]], &normals[fs[1]], &normals[fs[2]]);
                let scale = x.euclidean_norm();
                let ratio = x.norm_sq() / (scale * scale);
                match kinds[v] {
                    Kind::Finite => {
                        if !(ratio < 0.0) {
                            return Err(RealizeError::DegenerateVertex {
                                vertex: p.vertex_label(v),
                                ratio,
                            });
                        }
                        let x = (1.0 / (-x.norm_sq()).sqrt()) * x;
                        if x[0] < 0.0 {
                            -x
                        } else {
                            x
                        }
                    }
                    Kind::Ideal => {
                        if x[0].abs() < 1e-300 {
                            return Err(RealizeError::DegenerateVertex {
                                vertex: p.vertex_label(v),
                                ratio,
                            });
                        }
                        (1.0 / x[0]) * x
                    }
                }
            };
            for (f, e) in normals.iter().enumerate() {
                if fs.contains(&f) {
                    continue;
                }
                let s = x.dot(e);
                let bad = match kinds[v] {
                    Kind::Finite => !(s < 0.0),
                    Kind::Ideal => !(s < 1e-9),
                };
                if bad {
                    return Err(RealizeError::NotConvex {
                        vertex: p.vertex_label(v),
                        face: p.face(f).name.clone(),
                    });
                }
            }
            verts.push(x);
        }
        Ok((verts, kinds.iter().map(|&k| k == Kind::Ideal).collect()))
    }

    /// Follows the solution from `theta0` (where `u0` solves the system) to
    /// `theta1` along the straight segment, with adaptive step length.
    fn track(
        &self,
        u0: &DVector<f64>,
        theta0: &[f64],
        theta1: &[f64],
        opts: &RealizeOptions,
    ) -> Result<(DVector<f64>, usize), RealizeError> {
        let lerp = |s: f64| -> Vec<f64> { theta0.iter().zip(theta1).map(|(a, b)| a + s * (b - a)).collect() };
        let mut u = u0.clone();
        let mut prev: Option<(DVector<f64>, f64)> = None;
        let (mut s, mut h, mut steps) = (0.0_f64, 1.0_f64, 0);
        let mut best = f64::INFINITY;
        while s < 1.0 {
            if steps >= opts.max_steps || h < 1e-9 {
                return Err(RealizeError::NonConvergence { best_residual: best });
            }
            steps += 1;
            let s1 = (s + h).min(1.0);
            let theta = lerp(s1);
            let mut cand = u.clone();
            if let Some((up, hp)) = &prev {
                cand += (&u - up) * ((s1 - s) / hp);
            }
            let out = self.newton(&mut cand, &theta, INNER_TOL, 30);
            let ok = out.residual <= opts.residual_tol
                && self
                    .normals(&cand, &theta)
                    .is_some_and(|n| self.vertices(&cand, &theta, &n).is_ok());
            if ok {
                prev = Some((std::mem::replace(&mut u, cand), s1 - s));
                s = s1;
                h = (2.0 * h).min(1.0);
            } else {
                best = best.min(out.residual);
                h *= 0.5;
            }
        }
        let out = self.newton(&mut u, theta1, INNER_TOL, opts.max_iterations);
        if out.residual > opts.residual_tol {
            return Err(RealizeError::NonConvergence {
                best_residual: out.residual,
            });
        }
        Ok((u, steps))
    }

    fn assemble(&self, u: &DVector<f64>, angles: &[f64], steps: usize) -> Result<Realization, RealizeError> {
        let normals = self.normals(u, angles).ok_or(RealizeError::DegenerateVertex {
            vertex: self.p.vertex_label(self.gauge_vertex),
            ratio: 0.0,
        })?;
        let (vertices, ideal) = self.vertices(u, angles, &normals)?;
        let p = &self.p;
        let mut residual: f64 = normals.iter().map(|e| (e.norm_sq() - 1.0).abs()).fold(0.0, f64::max);
        for (e, &(f, g)) in self.edge_faces.iter().enumerate() {
            residual = residual.max((normals[f].dot(&normals[g]) + angles[e].cos()).abs());
        }
        for (v, x) in vertices.iter().enumerate() {
            for &f in p.vertex_faces(v) {
                residual = residual.max(x.dot(&normals[f]).abs());
            }
            if ideal[v] {
                residual = residual.max(x.norm_sq().abs());
            }
        }
        Ok(Realization {
            normals,
            vertices,
            ideal,
            angles: angles.to_vec(),
            residual,
            dof: self.dof(),
            gauge_vertex: self.gauge_vertex,
            gauge_faces: self.gauge,
            steps,
            edge_ends: p.edges().iter().map(|e| (e.a, e.b)).collect(),
        })
    }

    /// A seed in gauge coordinates together with its own dihedral angles.
    fn seed(&self, params: &seed::SeedParams) -> Result<(DVector<f64>, Vec<f64>), String> {
        let s = seed::build(&self.p, params)?;
        let y = s.klein[self.gauge_vertex];
        let boost = boost_to_origin(y);
        let normals: Vec<LorentzVector> = s.normals.iter().map(&boost).collect();
        let points: Vec<LorentzVector> = s
            .klein
            .iter()
            .map(|y| {
                let x = boost(&LorentzVector::from_klein([y.x, y.y, y.z]));
                (1.0 / x[0]) * x
            })
            .collect();
        let angles: Vec<f64> = self
            .edge_faces
            .iter()
            .map(|&(f, g)| (-normals[f].dot(&normals[g])).clamp(-1.0, 1.0).acos())
            .collect();
        let target = self.gauge_normals(&angles).ok_or("seed gauge vertex is not compact")?;
        let col = |e: &LorentzVector| Vector3::new(e[1], e[2], e[3]);
        let src = Matrix3::from_columns(&self.gauge.map(|f| col(&normals[f])));
        let dst = Matrix3::from_columns(&target.map(|e| col(&e)));
        let m = dst * src.try_inverse().ok_or("seed gauge faces are dependent")?;
        let mut u = DVector::zeros(self.unknowns());
        for (i, &f) in self.free.iter().enumerate() {
            let e = normals[f];
            let sp = m * col(&e);
            u.rows_mut(4 * i, 4).copy_from_slice(&[e[0], sp.x, sp.y, sp.z]);
        }
        for (k, &v) in self.quads.iter().enumerate() {
            let sp = m * col(&points[v]);
            let o = self.quad_offset(k);
            u.rows_mut(o, 3).copy_from_slice(&[sp.x, sp.y, sp.z]);
        }
        Ok((u, angles))
    }
}

/// The Lorentz boost taking the point with Klein coordinates `y` to the
/// origin.
fn boost_to_origin(y: Vector3<f64>) -> impl Fn(&LorentzVector) -> LorentzVector {
    let b2 = y.norm_squared();
    let gamma = 1.0 / (1.0 - b2).sqrt();
    move |x: &LorentzVector| {
        let xs = Vector3::new(x[1], x[2], x[3]);
        let bx = y.dot(&xs);
        let x0 = gamma * (x[0] - bx);
        let k = if b2 > 0.0 { (gamma - 1.0) * bx / b2 } else { 0.0 };
        let s = xs + (k - gamma * x[0]) * y;
        LorentzVector::new(x0, s.x, s.y, s.z)
    }
}

/// Continuation in angle space for one labeled polyhedron: realizes the
/// target labeling once, then reaches other angle assignments from the
/// nearest solution found so far.
#[derive(Clone, Debug)]
pub struct Tracker {
    sys: System,
    opts: RealizeOptions,
    cache: Vec<(Vec<f64>, DVector<f64>)>,
    target: Realization,
}

impl Tracker {
    pub fn new(lp: &LabeledPolyhedron, opts: &RealizeOptions) -> Result<Self, RealizeError> {
        let report = andreev::check(lp, opts.regime).map_err(|e| RealizeError::NotRealizable {
            reason: e.reason().to_string(),
        })?;
        if !report.outcome.is_realizable() {
            return Err(RealizeError::NotRealizable {
                reason: format!("Andreev conditions fail ({})", report.condition_summary()),
            });
        }
        let p = lp.base();
        let angles = lp.angles();
        let gauge_vertex = (0..p.vertex_count())
            .find(|&v| p.valence(v) == 3 && report.vertex_types[v] == andreev::VertexType::Compact)
            .ok_or(RealizeError::NoGaugeVertex)?;
        let sys = System::new(p, gauge_vertex);

        let mut candidates: Vec<VertexId> = (0..p.vertex_count()).filter(|&v| p.valence(v) == 3).collect();
        let mut rng = opts.perturbation.map(StdRng::seed_from_u64);
        if let Some(r) = rng.as_mut() {
            let k = r.random_range(0..candidates.len());
            candidates.rotate_left(k);
        }
        let mut last = RealizeError::Seed("no trivalent vertex".into());
        for (attempt, &outer_vertex) in candidates.iter().enumerate() {
            let params = seed::SeedParams {
                outer_vertex,
                radius: rng.as_mut().map_or(0.5, |r| r.random_range(0.35..0.65)),
                jitter: rng.as_mut().map(|r| r.random()).or((attempt > 0).then_some(attempt as u64)),
            };
            let (u0, seed_angles) = match sys.seed(&params) {
                Ok(s) => s,
                Err(msg) => {
                    last = RealizeError::Seed(msg);
                    continue;
                }
            };
            let attempt = sys
                .track(&u0, &seed_angles, &angles, opts)
                .and_then(|(u, steps)| Ok((sys.assemble(&u, &angles, steps)?, u)));
            match attempt {
                Ok((target, u)) => {
                    return Ok(Self {
                        sys,
                        opts: *opts,
                        cache: vec![(angles, u)],
                        target,
                    });
                }
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    pub fn target(&self) -> &Realization {
        &self.target
    }

    pub fn polyhedron(&self) -> &AbstractPolyhedron {
        &self.sys.p
    }

    /// Realizes the polyhedron with dihedral angles `angles` (indexed by
    /// edge), continuing from the closest solution already known.
    pub fn realize_angles(&mut self, angles: &[f64]) -> Result<Realization, RealizeError> {
        let dist = |a: &[f64]| a.iter().zip(angles).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let (theta0, u0) = self
            .cache
            .iter()
            .min_by(|a, b| dist(&a.0).total_cmp(&dist(&b.0)))
            .expect("cache holds the target");
        let (u, steps) = self.sys.track(u0, theta0, angles, &self.opts)?;
        let r = self.sys.assemble(&u, angles, steps)?;
        self.cache.push((angles.to_vec(), u));
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn check_gram(lp: &LabeledPolyhedron, r: &Realization) {
        let p = lp.base();
        for (e, edge) in p.edges().iter().enumerate() {
            let want = -(PI / f64::from(lp.label(e))).cos();
            assert!((r.gram(edge.faces[0], edge.faces[1]) - want).abs() <= 1e-10);
        }
        assert!(r.residual <= 1e-10, "residual {}", r.residual);
    }

    #[test]
    fn lambert_cube_realizes() {
        let lp = corpus::lambert_cube();
        let r = realize(&lp, &RealizeOptions::default()).unwrap();
        check_gram(&lp, &r);
        assert!(r.ideal.iter().all(|&i| !i));
        for v in &r.vertices {
            assert!((v.norm_sq() + 1.0).abs() < 1e-10 && v[0] > 0.0);
        }
        assert_eq!(r.dof.defect(), 0);
        assert_eq!(r.vertices[r.gauge_vertex], LorentzVector::ORIGIN);
        for e in 0..lp.base().edge_count() {
            assert!(r.edge_length(e).unwrap() > 0.0);
        }
    }

    #[test]
    fn prism_and_pyramid_realize() {
        let prism = corpus::triangular_prism();
        check_gram(&prism, &realize(&prism, &RealizeOptions::default()).unwrap());

        let pyr = corpus::pyramid();
        let r = realize(&pyr, &RealizeOptions::default()).unwrap();
        check_gram(&pyr, &r);
        assert_eq!(r.ideal.iter().filter(|&&i| i).count(), 1);
        assert_eq!(r.dof.defect(), 0);
        let apex = pyr.base().vertex_by_label(4).unwrap();
        assert!(r.ideal[apex] && r.vertices[apex].norm_sq().abs() < 1e-10);
        assert!(edge_lengths(&r, pyr.base()).is_err());
    }

    #[test]
    fn rejected_labelings_are_refused() {
        let err = realize(&corpus::cube_all2(), &RealizeOptions::default()).unwrap_err();
        assert!(matches!(err, RealizeError::NotRealizable { .. }));
    }

    #[test]
    fn perturbed_seed_gives_same_solution() {
        let lp = corpus::lambert_cube();
        let a = realize(&lp, &RealizeOptions::default()).unwrap();
        for s in [1, 2, 3] {
            let opts = RealizeOptions {
                perturbation: Some(s),
                ..Default::default()
            };
            let b = realize(&lp, &opts).unwrap();
            for (x, y) in a.normals.iter().zip(&b.normals) {
                assert!((*x - *y).euclidean_norm() < 1e-8);
            }
        }
    }

    #[test]
    fn boost_moves_point_to_origin() {
        let y = Vector3::new(0.2, -0.3, 0.1);
        let b = boost_to_origin(y);
        let x = b(&LorentzVector::from_klein([y.x, y.y, y.z]));
        assert!(x[1].abs() < 1e-15 && x[2].abs() < 1e-15 && x[3].abs() < 1e-15);
        let z = LorentzVector::new(0.3, 1.0, 0.5, -0.2);
        assert!((b(&z).norm_sq() - z.norm_sq()).abs() < 1e-14);
    }
}
