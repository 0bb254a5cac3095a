//! Abstract polyhedra: planar graphs given by their oriented face cycles,
//! optionally carrying Coxeter edge labels.
//!
//! Vertices, faces and edges are addressed by dense indices. The identifiers
//! used in `.apoly` files are kept alongside so reports can quote them back.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub type VertexId = usize;
pub type FaceId = usize;
pub type EdgeId = usize;

/// Default label for edges the input does not mention (dihedral angle π/2).
pub const DEFAULT_LABEL: u32 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub name: String,
    /// Counterclockwise cycle of vertex indices, seen from outside.
    pub cycle: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Endpoints with `a < b`.
    pub a: VertexId,
    pub b: VertexId,
    /// Faces whose cycle contains this edge. Exactly two on a valid polyhedron.
    pub faces: Vec<FaceId>,
}

impl Edge {
    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.a, self.b)
    }

    pub fn other_face(&self, f: FaceId) -> FaceId {
        if self.faces[0] == f {
            self.faces[1]
        } else {
            self.faces[0]
        }
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.a == v || self.b == v
    }
}

/// A planar graph together with its face cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractPolyhedron {
    name: String,
    vertex_labels: Vec<u64>,
    ideal_candidates: BTreeSet<VertexId>,
    faces: Vec<Face>,
    outer: Option<FaceId>,
    edges: Vec<Edge>,
    edge_lookup: HashMap<(VertexId, VertexId), EdgeId>,
    vertex_edges: Vec<Vec<EdgeId>>,
    vertex_faces: Vec<Vec<FaceId>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("face {face} has fewer than three vertices")]
    ShortFace { face: String },
    #[error("face {face} references unknown vertex {vertex}")]
    UnknownVertex { face: String, vertex: u64 },
    #[error("duplicate face id {0}")]
    DuplicateFace(String),
}

impl AbstractPolyhedron {
    /// Builds the incidence structure from face cycles given in terms of
    /// external vertex ids. No Definition-1 checks happen here; see
    /// [`validate`].
    pub fn from_faces(
        name: &str,
        vertex_labels: &[u64],
        ideal_candidates: &[u64],
        faces: &[(String, Vec<u64>)],
        outer: Option<usize>,
    ) -> Result<Self, BuildError> {
        let mut labels = vertex_labels.to_vec();
        labels.sort_unstable();
        labels.dedup();
        let dense: HashMap<u64, VertexId> =
            labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();

        let mut seen_names = BTreeSet::new();
        let mut out_faces = Vec::with_capacity(faces.len());
        for (fname, cyc) in faces {
            if !seen_names.insert(fname.clone()) {
                return Err(BuildError::DuplicateFace(fname.clone()));
            }
            if cyc.len() < 3 {
                return Err(BuildError::ShortFace { face: fname.clone() });
            }
            let mut dense_cycle = Vec::with_capacity(cyc.len());
            for v in cyc {
                let d = *dense.get(v).ok_or(BuildError::UnknownVertex {
                    face: fname.clone(),
                    vertex: *v,
                })?;
                dense_cycle.push(d);
            }
            out_faces.push(Face {
                name: fname.clone(),
                cycle: dense_cycle,
            });
        }

        let n = labels.len();
        let mut edges: Vec<Edge> = Vec::new();
        let mut edge_lookup = HashMap::new();
        let mut vertex_edges = vec![Vec::new(); n];
        let mut vertex_faces = vec![Vec::new(); n];
        for (fi, face) in out_faces.iter().enumerate() {
            let k = face.cycle.len();
            for i in 0..k {
                let (u, w) = (face.cycle[i], face.cycle[(i + 1) % k]);
                let key = (u.min(w), u.max(w));
                let e = *edge_lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        a: key.0,
                        b: key.1,
                        faces: Vec::new(),
                    });
                    vertex_edges[key.0].push(edges.len() - 1);
                    vertex_edges[key.1].push(edges.len() - 1);
                    edges.len() - 1
                });
                edges[e].faces.push(fi);
                if !vertex_faces[u].contains(&fi) {
                    vertex_faces[u].push(fi);
                }
            }
        }

        let ideal: BTreeSet<VertexId> = ideal_candidates
            .iter()
            .filter_map(|l| dense.get(l).copied())
            .collect();

        Ok(Self {
            name: name.to_string(),
            vertex_labels: labels,
            ideal_candidates: ideal,
            faces: out_faces,
            outer,
            edges,
            edge_lookup,
            vertex_edges,
            vertex_faces,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn outer_face(&self) -> Option<FaceId> {
        self.outer
    }

    /// External id of a vertex as written in the input.
    pub fn vertex_label(&self, v: VertexId) -> u64 {
        self.vertex_labels[v]
    }

    pub fn vertex_by_label(&self, label: u64) -> Option<VertexId> {
        self.vertex_labels.binary_search(&label).ok()
    }

    pub fn is_ideal_candidate(&self, v: VertexId) -> bool {
        self.ideal_candidates.contains(&v)
    }

    pub fn ideal_candidates(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.ideal_candidates.iter().copied()
    }

    pub fn edge_between(&self, u: VertexId, w: VertexId) -> Option<EdgeId> {
        self.edge_lookup.get(&(u.min(w), u.max(w))).copied()
    }

    pub fn vertex_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.vertex_edges[v]
    }

    pub fn vertex_faces(&self, v: VertexId) -> &[FaceId] {
        &self.vertex_faces[v]
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.vertex_edges[v].len()
    }

    /// Edges on the boundary of face `f`, in cycle order: the i-th entry joins
    /// `cycle[i]` and `cycle[i + 1]`.
    pub fn face_edges(&self, f: FaceId) -> Vec<EdgeId> {
        let c = &self.faces[f].cycle;
        (0..c.len())
            .map(|i| {
                self.edge_between(c[i], c[(i + 1) % c.len()])
                    .expect("face cycle edges are registered")
            })
            .collect()
    }

    /// The edge shared by two faces, if any.
    pub fn shared_edge(&self, f: FaceId, g: FaceId) -> Option<EdgeId> {
        self.face_edges(f)
            .into_iter()
            .find(|&e| self.edges[e].faces.contains(&g) && f != g)
    }

    /// Face-adjacency lists (the dual graph), each sorted by face index.
    pub fn dual_adjacency(&self) -> Vec<Vec<(FaceId, EdgeId)>> {
        let mut adj = vec![Vec::new(); self.faces.len()];
        for (ei, e) in self.edges.iter().enumerate() {
            if let [f, g] = e.faces[..] {
                adj[f].push((g, ei));
                adj[g].push((f, ei));
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// Same polyhedron seen in a mirror: every face cycle reversed.
    pub fn mirrored(&self) -> Self {
        let mut m = self.clone();
        for f in &mut m.faces {
            f.cycle.reverse();
        }
        m
    }

    /// Same polyhedron with external vertex ids replaced: vertex `v` gets id
    /// `new_ids[v]`. Dense indices follow the new id order.
    pub fn relabeled(&self, new_ids: &[u64]) -> Result<Self, BuildError> {
        let faces: Vec<(String, Vec<u64>)> = self
            .faces
            .iter()
            .map(|f| (f.name.clone(), f.cycle.iter().map(|&v| new_ids[v]).collect()))
            .collect();
        let ideal: Vec<u64> = self.ideal_candidates.iter().map(|&v| new_ids[v]).collect();
        Self::from_faces(&self.name, new_ids, &ideal, &faces, self.outer)
    }
}

/// An abstract polyhedron with an integer label `n ≥ 2` on every edge; the
/// dihedral angle along the edge is `π/n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledPolyhedron {
    base: AbstractPolyhedron,
    labels: Vec<u32>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("label {label} on edge {edge} is below 2")]
    TooSmall { edge: EdgeId, label: u32 },
    #[error("expected {expected} labels, got {got}")]
    WrongCount { expected: usize, got: usize },
}

impl LabeledPolyhedron {
    pub fn new(base: AbstractPolyhedron, labels: Vec<u32>) -> Result<Self, LabelError> {
        if labels.len() != base.edge_count() {
            return Err(LabelError::WrongCount {
                expected: base.edge_count(),
                got: labels.len(),
            });
        }
        if let Some((edge, &label)) = labels.iter().enumerate().find(|(_, &l)| l < 2) {
            return Err(LabelError::TooSmall { edge, label });
        }
        Ok(Self { base, labels })
    }

    pub fn all_right(base: AbstractPolyhedron) -> Self {
        let labels = vec![DEFAULT_LABEL; base.edge_count()];
        Self { base, labels }
    }

    pub fn base(&self) -> &AbstractPolyhedron {
        &self.base
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, e: EdgeId) -> u32 {
        self.labels[e]
    }

    pub fn with_labels(&self, labels: Vec<u32>) -> Result<Self, LabelError> {
        Self::new(self.base.clone(), labels)
    }

    /// Dihedral angles in radians, indexed by edge.
    pub fn angles(&self) -> Vec<f64> {
        self.labels
            .iter()
            .map(|&n| std::f64::consts::PI / f64::from(n))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("inconsistent faces: edge ({a},{b}) lies in {count} face(s), expected 2")]
    InconsistentFaces { a: u64, b: u64, count: usize },
    #[error("line {line}: label {label} on edge ({a},{b}) is below 2")]
    LabelTooSmall { line: usize, a: u64, b: u64, label: i64 },
    #[error("line {line}: unknown vertex {vertex}")]
    UnknownVertex { line: usize, vertex: u64 },
    #[error("line {line}: ({a},{b}) is not an edge of the polyhedron")]
    UnknownEdge { line: usize, a: u64, b: u64 },
    #[error("{0}")]
    Build(#[from] BuildError),
}

#[derive(Clone, Debug)]
pub struct Parsed {
    pub polyhedron: LabeledPolyhedron,
    /// Human-readable notes, e.g. edges that fell back to the default label.
    pub warnings: Vec<String>,
}

struct LabelLine {
    line: usize,
    a: u64,
    b: u64,
    n: i64,
}

/// Parses `.apoly` text.
pub fn parse_polyhedron(text: &str) -> Result<Parsed, ParseError> {
    let mut name = String::from("unnamed");
    let mut declared: Vec<(usize, u64)> = Vec::new();
    let mut ideal: Vec<u64> = Vec::new();
    let mut faces: Vec<(String, Vec<u64>)> = Vec::new();
    let mut face_lines: Vec<usize> = Vec::new();
    let mut outer = None;
    let mut label_lines: Vec<LabelLine> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        let Some(&(col0, head)) = tokens.first() else {
            continue;
        };
        let syntax = |column: usize, message: &str| ParseError::Syntax {
            line,
            column,
            message: message.to_string(),
        };
        match head {
            "polyhedron" => {
                let rest: Vec<&str> = tokens[1..].iter().map(|t| t.1).collect();
                if rest.is_empty() {
                    return Err(syntax(col0 + head.len() + 1, "missing polyhedron name"));
                }
                name = rest.join(" ");
            }
            "vertex" => {
                let (c, tok) = *tokens
                    .get(1)
                    .ok_or_else(|| syntax(col0 + head.len() + 1, "missing vertex id"))?;
                let id = parse_uint(tok).ok_or_else(|| syntax(c, "vertex id must be an unsigned integer"))?;
                declared.push((line, id));
                match tokens.get(2) {
                    None => {}
                    Some(&(_, "ideal-candidate")) if tokens.len() == 3 => ideal.push(id),
                    Some(&(c, _)) => return Err(syntax(c, "expected `ideal-candidate` or end of line")),
                }
            }
            "face" => {
                // `face <id>: v0 v1 ...` with the colon attached or detached.
                let after = content[col0 - 1 + head.len()..].trim_start();
                let colon = after
                    .find(':')
                    .ok_or_else(|| syntax(col0 + head.len() + 1, "expected `:` after face id"))?;
                let fname = after[..colon].trim();
                if fname.is_empty() || fname.contains(char::is_whitespace) {
                    return Err(syntax(col0 + head.len() + 1, "face id must be a single token"));
                }
                let offset = content.len() - after.len() + colon + 1;
                let mut verts = Vec::new();
                let mut is_outer = false;
                let body = tokenize(&content[offset..]);
                for (i, &(c, tok)) in body.iter().enumerate() {
                    let column = c + offset;
                    if tok == "outer" {
                        if i + 1 != body.len() {
                            return Err(syntax(column, "`outer` must end the face line"));
                        }
                        is_outer = true;
                    } else {
                        let v = parse_uint(tok)
                            .ok_or_else(|| syntax(column, "vertex index must be an unsigned integer"))?;
                        verts.push(v);
                    }
                }
                if verts.len() < 3 {
                    return Err(syntax(offset + 1, "a face needs at least three vertices"));
                }
                if is_outer {
                    if outer.is_some() {
                        return Err(syntax(col0, "more than one face marked `outer`"));
                    }
                    outer = Some(faces.len());
                }
                faces.push((fname.to_string(), verts));
                face_lines.push(line);
            }
            "label" => {
                if tokens.len() != 4 {
                    let c = tokens.get(4).map_or(content.len() + 1, |t| t.0);
                    return Err(syntax(c, "expected `label <va> <vb> <n>`"));
                }
                let a = parse_uint(tokens[1].1).ok_or_else(|| syntax(tokens[1].0, "bad vertex index"))?;
                let b = parse_uint(tokens[2].1).ok_or_else(|| syntax(tokens[2].0, "bad vertex index"))?;
                let n: i64 = tokens[3]
                    .1
                    .parse()
                    .map_err(|_| syntax(tokens[3].0, "label must be an integer"))?;
                label_lines.push(LabelLine { line, a, b, n });
            }
            other => {
                return Err(syntax(col0, &format!("unknown directive `{other}`")));
            }
        }
    }

    let mut vertex_ids: Vec<u64> = declared.iter().map(|d| d.1).collect();
    if declared.is_empty() {
        vertex_ids = faces.iter().flat_map(|f| f.1.iter().copied()).collect();
    } else {
        let known: BTreeSet<u64> = vertex_ids.iter().copied().collect();
        for ((_, verts), &line) in faces.iter().zip(&face_lines) {
            if let Some(&v) = verts.iter().find(|v| !known.contains(v)) {
                return Err(ParseError::UnknownVertex { line, vertex: v });
            }
        }
    }

    let base = AbstractPolyhedron::from_faces(&name, &vertex_ids, &ideal, &faces, outer)?;
    if let Some(e) = base.edges().iter().find(|e| e.faces.len() != 2) {
        return Err(ParseError::InconsistentFaces {
            a: base.vertex_label(e.a),
            b: base.vertex_label(e.b),
            count: e.faces.len(),
        });
    }

    let mut labels: Vec<Option<u32>> = vec![None; base.edge_count()];
    for ll in &label_lines {
        let va = base
            .vertex_by_label(ll.a)
            .ok_or(ParseError::UnknownVertex { line: ll.line, vertex: ll.a })?;
        let vb = base
            .vertex_by_label(ll.b)
            .ok_or(ParseError::UnknownVertex { line: ll.line, vertex: ll.b })?;
        let e = base.edge_between(va, vb).ok_or(ParseError::UnknownEdge {
            line: ll.line,
            a: ll.a,
            b: ll.b,
        })?;
        if ll.n < 2 {
            return Err(ParseError::LabelTooSmall {
                line: ll.line,
                a: ll.a,
                b: ll.b,
                label: ll.n,
            });
        }
        let n = u32::try_from(ll.n).map_err(|_| ParseError::Syntax {
            line: ll.line,
            column: 1,
            message: "label out of range".into(),
        })?;
        if labels[e].replace(n).is_some() {
            return Err(ParseError::Syntax {
                line: ll.line,
                column: 1,
                message: format!("edge ({},{}) labeled twice", ll.a, ll.b),
            });
        }
    }

    let mut warnings = Vec::new();
    let labels: Vec<u32> = labels
        .into_iter()
        .enumerate()
        .map(|(e, l)| {
            l.unwrap_or_else(|| {
                let edge = base.edge(e);
                warnings.push(format!(
                    "edge ({},{}) unlabeled; using default label {DEFAULT_LABEL}",
                    base.vertex_label(edge.a),
                    base.vertex_label(edge.b)
                ));
                DEFAULT_LABEL
            })
        })
        .collect();

    let polyhedron = LabeledPolyhedron::new(base, labels).expect("labels checked above");
    Ok(Parsed { polyhedron, warnings })
}

/// Splits on whitespace, returning 1-based columns.
fn tokenize(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        if ch.is_whitespace() {
            if let Some(st) = start.take() {
                out.push((st + 1, &s[st..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push((st + 1, &s[st..]));
    }
    out
}

fn parse_uint(tok: &str) -> Option<u64> {
    if tok.starts_with('+') {
        return None;
    }
    tok.parse().ok()
}

/// Canonical `.apoly` text: every vertex declared, faces in stored order,
/// every edge labeled, edges sorted by external endpoint ids.
pub fn serialize(lp: &LabeledPolyhedron) -> String {
    let p = lp.base();
    let mut out = format!("polyhedron {}\n", p.name());
    for v in 0..p.vertex_count() {
        if p.is_ideal_candidate(v) {
            out += &format!("vertex {} ideal-candidate\n", p.vertex_label(v));
        } else {
            out += &format!("vertex {}\n", p.vertex_label(v));
        }
    }
    for (fi, f) in p.faces().iter().enumerate() {
        let verts: Vec<String> = f.cycle.iter().map(|&v| p.vertex_label(v).to_string()).collect();
        let tail = if p.outer_face() == Some(fi) { " outer" } else { "" };
        out += &format!("face {}: {}{}\n", f.name, verts.join(" "), tail);
    }
    let mut rows: Vec<(u64, u64, u32)> = p
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let (x, y) = (p.vertex_label(edge.a), p.vertex_label(edge.b));
            (x.min(y), x.max(y), lp.label(e))
        })
        .collect();
    rows.sort_unstable();
    for (a, b, n) in rows {
        out += &format!("label {a} {b} {n}\n");
    }
    out
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// Two faces meet in more than one edge or vertex.
    FaceIntersection,
    /// The surface is not closed (an edge outside exactly two faces, or the
    /// graph is disconnected).
    Closed,
    /// Three or fewer faces.
    FaceCount,
    /// An edge does not lie in exactly two faces.
    EdgeTwoFaces,
    /// A vertex repeats inside one face cycle.
    SimpleFace,
    /// Valence other than 3 (or 4 for flagged ideal candidates).
    Trivalence,
    /// V − E + F ≠ 2.
    Euler,
    /// Adjacent faces traverse their shared edge in the same direction.
    Orientation,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::FaceIntersection => "face-intersection",
            Rule::Closed => "closed",
            Rule::FaceCount => "face-count",
            Rule::EdgeTwoFaces => "edge-two-faces",
            Rule::SimpleFace => "simple-face",
            Rule::Trivalence => "trivalence",
            Rule::Euler => "euler",
            Rule::Orientation => "orientation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Vertex(VertexId),
    Edge(EdgeId),
    Face(FaceId),
    Faces(FaceId, FaceId),
    Count(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub witness: Witness,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "violation {} {}", v.rule.id(), v.detail)?;
        }
        Ok(())
    }
}

/// Checks every clause of the abstract-polyhedron definition plus trivalence,
/// orientation and Euler's relation. All failures are reported, none abort.
pub fn validate(p: &AbstractPolyhedron) -> ValidationReport {
    let mut violations = Vec::new();
    let vl = |v: VertexId| p.vertex_label(v);

    if p.face_count() <= 3 {
        violations.push(Violation {
            rule: Rule::FaceCount,
            witness: Witness::Count(p.face_count() as i64),
            detail: format!("F={} (need F>3)", p.face_count()),
        });
    }

    for (fi, f) in p.faces().iter().enumerate() {
        let distinct: BTreeSet<_> = f.cycle.iter().collect();
        if distinct.len() != f.cycle.len() {
            violations.push(Violation {
                rule: Rule::SimpleFace,
                witness: Witness::Face(fi),
                detail: format!("face {} repeats a vertex", f.name),
            });
        }
    }

    for (ei, e) in p.edges().iter().enumerate() {
        if e.faces.len() != 2 {
            violations.push(Violation {
                rule: Rule::EdgeTwoFaces,
                witness: Witness::Edge(ei),
                detail: format!("edge ({},{}) lies in {} face(s)", vl(e.a), vl(e.b), e.faces.len()),
            });
        }
    }

    // Each directed edge must be used once: the two faces on an edge traverse
    // it in opposite directions.
    let mut directed: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    for f in p.faces() {
        let k = f.cycle.len();
        for i in 0..k {
            *directed.entry((f.cycle[i], f.cycle[(i + 1) % k])).or_default() += 1;
        }
    }
    for (ei, e) in p.edges().iter().enumerate() {
        if e.faces.len() != 2 {
            continue;
        }
        let fwd = directed.get(&(e.a, e.b)).copied().unwrap_or(0);
        let bwd = directed.get(&(e.b, e.a)).copied().unwrap_or(0);
        if fwd != 1 || bwd != 1 {
            violations.push(Violation {
                rule: Rule::Orientation,
                witness: Witness::Edge(ei),
                detail: format!(
                    "edge ({},{}) is traversed in the same direction by both faces",
                    vl(e.a),
                    vl(e.b)
                ),
            });
        }
    }

    for v in 0..p.vertex_count() {
        let d = p.valence(v);
        let ok = d == 3 || (d == 4 && p.is_ideal_candidate(v));
        if !ok {
            let why = if d == 4 {
                "valence 4 without ideal-candidate flag".to_string()
            } else {
                format!("valence {d}")
            };
            violations.push(Violation {
                rule: Rule::Trivalence,
                witness: Witness::Vertex(v),
                detail: format!("vertex {}: {why}", vl(v)),
            });
        }
    }

    // Faces may share nothing, one vertex, or exactly one edge.
    let vsets: Vec<BTreeSet<VertexId>> = p
        .faces()
        .iter()
        .map(|f| f.cycle.iter().copied().collect())
        .collect();
    for f in 0..p.face_count() {
        let fe: BTreeSet<EdgeId> = p.face_edges(f).into_iter().collect();
        for g in f + 1..p.face_count() {
            let common: Vec<VertexId> = vsets[f].intersection(&vsets[g]).copied().collect();
            if common.len() <= 1 {
                continue;
            }
            let shared_edges: Vec<EdgeId> = p
                .face_edges(g)
                .into_iter()
                .filter(|e| fe.contains(e))
                .collect();
            let ok = common.len() == 2 && shared_edges.len() == 1;
            if !ok {
                violations.push(Violation {
                    rule: Rule::FaceIntersection,
                    witness: Witness::Faces(f, g),
                    detail: format!(
                        "faces {} and {} share {} vertices and {} edges",
                        p.face(f).name,
                        p.face(g).name,
                        common.len(),
                        shared_edges.len()
                    ),
                });
            }
        }
    }

    if p.vertex_count() > 0 {
        let mut seen = vec![false; p.vertex_count()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &e in p.vertex_edges(v) {
                let edge = p.edge(e);
                let w = if edge.a == v { edge.b } else { edge.a };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            violations.push(Violation {
                rule: Rule::Closed,
                witness: Witness::Vertex(v),
                detail: format!("vertex {} is not connected to vertex {}", vl(v), vl(0)),
            });
        }
    }

    let chi = p.euler_characteristic();
    if chi != 2 {
        violations.push(Violation {
            rule: Rule::Euler,
            witness: Witness::Count(chi),
            detail: format!(
                "V-E+F = {}-{}+{} = {chi}",
                p.vertex_count(),
                p.edge_count(),
                p.face_count()
            ),
        });
    }

    ValidationReport { violations }
}

// ---------------------------------------------------------------------------
// Automorphisms
// ---------------------------------------------------------------------------

/// A combinatorial symmetry, acting on vertices, edges and faces at once.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Automorphism {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub faces: Vec<FaceId>,
    /// True when the symmetry reverses the orientation of the embedding.
    pub reflection: bool,
}

/// Darts of a polyhedron: directed edges with the face on their left.
struct DartMap {
    /// dart index → (tail, head)
    darts: Vec<(VertexId, VertexId)>,
    /// (tail, head) → dart index
    index: HashMap<(VertexId, VertexId), usize>,
    /// next dart along the face on the left
    next: Vec<usize>,
    /// face on the left
    face: Vec<FaceId>,
}

impl DartMap {
    fn new(p: &AbstractPolyhedron) -> Self {
        let mut darts = Vec::new();
        let mut index = HashMap::new();
        let mut face = Vec::new();
        for (fi, f) in p.faces().iter().enumerate() {
            let k = f.cycle.len();
            for i in 0..k {
                let d = (f.cycle[i], f.cycle[(i + 1) % k]);
                index.insert(d, darts.len());
                darts.push(d);
                face.push(fi);
            }
        }
        let next = darts
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let f = &p.faces()[face[i]].cycle;
                let (_, h) = darts[i];
                let pos = f.iter().position(|&v| v == h).unwrap();
                index[&(h, f[(pos + 1) % f.len()])]
            })
            .collect();
        Self { darts, index, next, face }
    }

    fn twin(&self, d: usize) -> Option<usize> {
        let (t, h) = self.darts[d];
        self.index.get(&(h, t)).copied()
    }
}

/// Orientation-preserving isomorphism from the dart structure of `a` to `b`
/// sending dart `from` to dart `to`, if one exists.
fn extend_dart_map(a: &DartMap, b: &DartMap, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut image = vec![usize::MAX; a.darts.len()];
    image[from] = to;
    let mut stack = vec![from];
    while let Some(d) = stack.pop() {
        let img = image[d];
        let pairs = [
            (Some(a.next[d]), Some(b.next[img])),
            (a.twin(d), b.twin(img)),
        ];
        for (src, dst) in pairs {
            match (src, dst) {
                (Some(s), Some(t)) => {
                    if image[s] == usize::MAX {
                        image[s] = t;
                        stack.push(s);
                    } else if image[s] != t {
                        return None;
                    }
                }
                (None, None) => {}
                _ => return None,
            }
        }
    }
    if image.contains(&usize::MAX) {
        return None;
    }
    let mut used = vec![false; b.darts.len()];
    for &t in &image {
        if std::mem::replace(&mut used[t], true) {
            return None;
        }
    }
    Some(image)
}

/// The full combinatorial automorphism group, reflections included, sorted
/// with the identity first.
///
/// Every symmetry of a connected map is fixed by the image of one dart, so
/// it suffices to try each target dart in both orientations.
pub fn automorphisms(p: &AbstractPolyhedron) -> Vec<Automorphism> {
    let here = DartMap::new(p);
    let mirror_poly = p.mirrored();
    let mirror = DartMap::new(&mirror_poly);
    if here.darts.is_empty() {
        return Vec::new();
    }
    let mut found = BTreeMap::new();
    for (target, reflection) in [(&here, false), (&mirror, true)] {
        for to in 0..target.darts.len() {
            let Some(image) = extend_dart_map(&here, target, 0, to) else {
                continue;
            };
            let mut vmap = vec![usize::MAX; p.vertex_count()];
            let mut fmap = vec![usize::MAX; p.face_count()];
            let mut consistent = true;
            for (d, &img) in image.iter().enumerate() {
                let (t, _) = here.darts[d];
                let (tt, _) = target.darts[img];
                for (slot, val) in [(&mut vmap[t], tt), (&mut fmap[here.face[d]], target.face[img])] {
                    if *slot == usize::MAX {
                        *slot = val;
                    } else if *slot != val {
                        consistent = false;
                    }
                }
            }
            if !consistent || vmap.contains(&usize::MAX) {
                continue;
            }
            let emap: Vec<EdgeId> = p
                .edges()
                .iter()
                .map(|e| p.edge_between(vmap[e.a], vmap[e.b]).expect("edges map to edges"))
                .collect();
            found.entry(vmap.clone()).or_insert(Automorphism {
                vertices: vmap,
                edges: emap,
                faces: fmap,
                reflection,
            });
        }
    }
    let id: Vec<usize> = (0..p.vertex_count()).collect();
    let mut out: Vec<Automorphism> = found.into_values().collect();
    out.sort_by(|x, y| (x.vertices != id).cmp(&(y.vertices != id)).then(x.cmp(y)));
    out
}

/// Orbit of edges under a group, as a partition of edge indices.
pub fn edge_orbits(p: &AbstractPolyhedron, group: &[Automorphism]) -> Vec<Vec<EdgeId>> {
    let mut seen = vec![false; p.edge_count()];
    let mut orbits = Vec::new();
    for e in 0..p.edge_count() {
        if seen[e] {
            continue;
        }
        let orbit: BTreeSet<EdgeId> = group.iter().map(|g| g.edges[e]).collect();
        for &o in &orbit {
            seen[o] = true;
        }
        orbits.push(orbit.into_iter().collect());
    }
    orbits
}

/// Group of symmetries fixing a labeling pointwise.
pub fn label_stabilizer(lp: &LabeledPolyhedron, group: &[Automorphism]) -> Vec<Automorphism> {
    group
        .iter()
        .filter(|g| (0..lp.labels().len()).all(|e| lp.label(g.edges[e]) == lp.label(e)))
        .cloned()
        .collect()
}

/// Convenience for tests and the CLI: map external edge ids to labels.
pub fn labels_by_endpoints(lp: &LabeledPolyhedron) -> BTreeMap<(u64, u64), u32> {
    let p = lp.base();
    p.edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let (x, y) = (p.vertex_label(edge.a), p.vertex_label(edge.b));
            ((x.min(y), x.max(y)), lp.label(e))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn cube_counts() {
        let lp = corpus::cube_all2();
        let p = lp.base();
        assert_eq!((p.vertex_count(), p.edge_count(), p.face_count()), (8, 12, 6));
        assert_eq!(p.euler_characteristic(), 2);
        let degree_sum: usize = p.faces().iter().map(|f| f.cycle.len()).sum();
        assert_eq!(degree_sum, 2 * p.edge_count());
    }

    #[test]
    fn tetrahedron_parses_with_four_faces() {
        let lp = corpus::tetrahedron();
        assert_eq!(lp.base().face_count(), 4);
        assert!(validate(lp.base()).passed());
    }

    #[test]
    fn edge_in_three_faces_is_rejected() {
        let text = "polyhedron bad\nface a: 0 1 2\nface b: 1 0 3\nface c: 0 1 4\nface d: 2 1 3\n";
        match parse_polyhedron(text) {
            Err(ParseError::InconsistentFaces { a: 0, b: 1, count: 3 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_polyhedron("polyhedron x\nface 0: 1 2 q\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                line: 2,
                column: 13,
                message: "vertex index must be an unsigned integer".into()
            }
        );
        let err = parse_polyhedron("polyhedron x\n  bogus 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, column: 3, .. }));
    }

    #[test]
    fn label_errors() {
        let cube = corpus::CUBE_ALL2;
        let low = format!("{cube}label 0 1 1\n");
        assert!(matches!(
            parse_polyhedron(&low),
            Err(ParseError::LabelTooSmall { label: 1, .. })
        ));
        let unknown = format!("{cube}label 0 99 3\n");
        assert!(matches!(
            parse_polyhedron(&unknown),
            Err(ParseError::UnknownVertex { vertex: 99, .. })
        ));
        let not_edge = format!("{cube}label 0 6 3\n");
        assert!(matches!(parse_polyhedron(&not_edge), Err(ParseError::UnknownEdge { .. })));
    }

    #[test]
    fn undeclared_vertex_in_face() {
        let text = "vertex 0\nvertex 1\nvertex 2\nface a: 0 1 2\nface b: 2 1 7\n";
        assert_eq!(
            parse_polyhedron(text).unwrap_err(),
            ParseError::UnknownVertex { line: 5, vertex: 7 }
        );
    }

    #[test]
    fn missing_labels_default_to_two_with_warning() {
        let parsed = parse_polyhedron(corpus::CUBE_ALL2).unwrap();
        assert!(parsed.polyhedron.labels().iter().all(|&l| l == 2));
        let lambert = parse_polyhedron(corpus::LAMBERT_CUBE).unwrap();
        assert_eq!(lambert.warnings.len(), 9);
        assert_eq!(lambert.polyhedron.labels().iter().filter(|&&l| l == 3).count(), 3);
    }

    #[test]
    fn faces_sharing_two_edges() {
        let faces = vec![
            ("A".to_string(), vec![0, 1, 2, 3]),
            ("B".to_string(), vec![1, 0, 3, 4]),
        ];
        let p = AbstractPolyhedron::from_faces("glued", &[0, 1, 2, 3, 4], &[], &faces, None).unwrap();
        let report = validate(&p);
        assert!(report.has(Rule::FaceIntersection));
        assert!(!report.passed());
    }

    #[test]
    fn merged_cube_vertex_is_not_trivalent() {
        // Collapse cube edge (4,5) by identifying 5 with 4.
        let text = "face bottom: 0 3 2 1\nface top: 4 6 7\nface front: 0 1 4\n\
                    face right: 1 2 6 4\nface back: 2 3 7 6\nface left: 3 0 4 7\n";
        let p = parse_polyhedron(text).unwrap().polyhedron;
        let report = validate(p.base());
        assert!(report
            .violations
            .iter()
            .any(|v| v.rule == Rule::Trivalence && v.witness == Witness::Vertex(4)));
        let flagged = format!("vertex 0\nvertex 1\nvertex 2\nvertex 3\nvertex 4 ideal-candidate\nvertex 6\nvertex 7\n{text}");
        let p = parse_polyhedron(&flagged).unwrap().polyhedron;
        assert!(!validate(p.base()).has(Rule::Trivalence));
    }

    #[test]
    fn group_orders() {
        assert_eq!(automorphisms(corpus::cube_all2().base()).len(), 48);
        assert_eq!(automorphisms(corpus::tetrahedron().base()).len(), 24);
        assert_eq!(automorphisms(corpus::pyramid().base()).len(), 8);
        assert_eq!(automorphisms(corpus::triangular_prism().base()).len(), 12);
    }

    #[test]
    fn identity_comes_first() {
        let g = automorphisms(corpus::cube_all2().base());
        assert_eq!(g[0].vertices, (0..8).collect::<Vec<_>>());
        assert!(!g[0].reflection);
        assert_eq!(g.iter().filter(|a| a.reflection).count(), 24);
    }

    #[test]
    fn serialize_is_canonical() {
        let lp = corpus::lambert_cube();
        let text = serialize(&lp);
        let back = parse_polyhedron(&text).unwrap();
        assert!(back.warnings.is_empty());
        assert_eq!(back.polyhedron, lp);
        assert_eq!(serialize(&back.polyhedron), text);
    }
}
