//! Andreev's realizability conditions for labeled polyhedra.
//!
//! Every angle is `π/n` for an integer label `n`, so every angle sum is a
//! rational multiple of π. All comparisons here are exact.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::circuits::{prismatic_circuits, Circuit};
use crate::poly_model::{AbstractPolyhedron, EdgeId, FaceId, LabeledPolyhedron, VertexId};

/// A rational multiple of π.
pub type PiMultiple = Ratio<i128>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// Every vertex finite, except vertices flagged `ideal-candidate`.
    StrictCompact,
    /// Trivalent vertices with angle sum exactly π are accepted as ideal.
    AllowIdeal,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::StrictCompact => "strict",
            Regime::AllowIdeal => "ideal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexType {
    Compact,
    Ideal,
    Inadmissible,
}

impl VertexType {
    pub fn name(self) -> &'static str {
        match self {
            VertexType::Compact => "compact",
            VertexType::Ideal => "ideal",
            VertexType::Inadmissible => "inadmissible",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    RealizableCompact,
    RealizableWithIdealVertices,
    Rejected,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::RealizableCompact => "realizable-compact",
            Outcome::RealizableWithIdealVertices => "realizable-with-ideal-vertices",
            Outcome::Rejected => "rejected",
        }
    }

    pub fn is_realizable(self) -> bool {
        self != Outcome::Rejected
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AndreevError {
    #[error("FaceCountTooSmall: {faces} faces (need more than four)")]
    FaceCountTooSmall { faces: usize },
    #[error("label {0} is below 2")]
    LabelTooSmall(u32),
    #[error("vertex {vertex} has valence {valence}")]
    BadValence { vertex: u64, valence: usize },
    #[error("vertex {vertex} has valence 4 but is not flagged ideal-candidate")]
    UnflaggedFourValent { vertex: u64 },
}

impl AndreevError {
    /// Short machine-readable tag.
    pub fn reason(&self) -> &'static str {
        match self {
            AndreevError::FaceCountTooSmall { .. } => "FaceCountTooSmall",
            AndreevError::LabelTooSmall(_) => "LabelTooSmall",
            AndreevError::BadValence { .. } => "BadValence",
            AndreevError::UnflaggedFourValent { .. } => "UnflaggedFourValent",
        }
    }
}

/// Dihedral angle `π/label` in radians.
pub fn angle_of(label: u32) -> Result<f64, AndreevError> {
    if label < 2 {
        return Err(AndreevError::LabelTooSmall(label));
    }
    Ok(std::f64::consts::PI / f64::from(label))
}

fn pi_over(label: u32) -> PiMultiple {
    Ratio::new(1, i128::from(label))
}

/// Classifies a vertex by its incident angle sum `S` against `(d − 2)π`.
pub fn vertex_type(lp: &LabeledPolyhedron, v: VertexId) -> Result<VertexType, AndreevError> {
    let p = lp.base();
    let d = p.valence(v);
    match d {
        3 => {}
        4 if p.is_ideal_candidate(v) => {}
        4 => {
            return Err(AndreevError::UnflaggedFourValent {
                vertex: p.vertex_label(v),
            })
        }
        _ => {
            return Err(AndreevError::BadValence {
                vertex: p.vertex_label(v),
                valence: d,
            })
        }
    }
    let labels: Vec<u32> = p.vertex_edges(v).iter().map(|&e| lp.label(e)).collect();
    Ok(classify_vertex(&labels))
}

/// Type of a vertex whose incident labels are `labels` (3 or 4 of them).
pub fn classify_vertex(labels: &[u32]) -> VertexType {
    let d = labels.len() as i128;
    let sum: PiMultiple = labels.iter().map(|&n| pi_over(n)).sum();
    let threshold = PiMultiple::from_integer(d - 2);
    if d == 4 && labels.iter().any(|&n| n != 2) {
        return VertexType::Inadmissible;
    }
    match sum.cmp(&threshold) {
        std::cmp::Ordering::Greater => VertexType::Compact,
        std::cmp::Ordering::Equal => VertexType::Ideal,
        std::cmp::Ordering::Less => VertexType::Inadmissible,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionStatus {
    Pass,
    Fail,
    /// No instance of the condition exists.
    Vacuous,
    /// Evaluated but not binding (quadrilateral condition with F > 5).
    Informational,
}

impl ConditionStatus {
    pub fn name(self) -> &'static str {
        match self {
            ConditionStatus::Pass => "pass",
            ConditionStatus::Fail => "fail",
            ConditionStatus::Vacuous => "vacuous",
            ConditionStatus::Informational => "informational",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConditionWitness {
    Edge(EdgeId),
    Vertex(VertexId),
    Circuit(Circuit),
    /// Quadrilateral face and which of its two inequalities (1 or 2).
    QuadFace { face: FaceId, inequality: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Greater,
    Less,
    /// `> bound`, or `= bound` where an ideal vertex is acceptable.
    GreaterOrIdeal,
}

/// One evaluated inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionCheck {
    pub witness: ConditionWitness,
    pub edges: Vec<EdgeId>,
    pub sum: PiMultiple,
    pub bound: PiMultiple,
    pub relation: Relation,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionResult {
    pub id: u8,
    pub status: ConditionStatus,
    pub checks: Vec<ConditionCheck>,
}

impl ConditionResult {
    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AndreevReport {
    pub outcome: Outcome,
    pub regime: Regime,
    /// Conditions 1 through 5, in order.
    pub conditions: Vec<ConditionResult>,
    pub vertex_types: Vec<VertexType>,
    pub notes: Vec<String>,
}

impl AndreevReport {
    pub fn condition(&self, id: u8) -> &ConditionResult {
        &self.conditions[usize::from(id - 1)]
    }

    /// `1:pass,2:pass,...` as printed in CLI summaries.
    pub fn condition_summary(&self) -> String {
        self.conditions
            .iter()
            .map(|c| format!("{}:{}", c.id, c.status.name()))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn ideal_vertices(&self) -> Vec<VertexId> {
        self.vertex_types
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == VertexType::Ideal)
            .map(|(v, _)| v)
            .collect()
    }

    /// Fixed-order text: one line per condition (with failing witnesses
    /// indented beneath), the vertex table, then the verdict.
    pub fn render(&self, p: &AbstractPolyhedron) -> String {
        let mut s = String::new();
        for c in &self.conditions {
            let _ = writeln!(s, "condition {} {}: {}", c.id, c.status.name(), describe(c));
            for f in c.failures() {
                let _ = writeln!(s, "  {}", render_check(f, p));
            }
        }
        for (v, t) in self.vertex_types.iter().enumerate() {
            let _ = writeln!(s, "vertex {} {}", p.vertex_label(v), t.name());
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "verdict {}", self.outcome.name());
        s
    }
}

fn describe(c: &ConditionResult) -> String {
    let n = c.checks.len();
    let holding = c.checks.iter().filter(|x| x.holds).count();
    match c.id {
        1 => format!("{n} angles, all positive"),
        2 => format!("{holding}/{n} vertices admissible"),
        3 if n == 0 => "no prismatic 3-circuits".into(),
        3 => format!("{holding}/{n} prismatic 3-circuits with sum < π"),
        4 if n == 0 => "no prismatic 4-circuits".into(),
        4 => format!("{holding}/{n} prismatic 4-circuits with sum < 2π"),
        _ if n == 0 => "no quadrilateral faces".into(),
        _ => format!("{holding}/{n} quadrilateral inequalities with sum < 3π"),
    }
}

/// Formats `r·π` as e.g. `11/6π`.
pub fn format_pi(r: &PiMultiple) -> String {
    if r.is_zero() {
        "0".into()
    } else if *r.denom() == 1 {
        if *r.numer() == 1 {
            "π".into()
        } else {
            format!("{}π", r.numer())
        }
    } else {
        format!("{}/{}π", r.numer(), r.denom())
    }
}

fn render_check(c: &ConditionCheck, p: &AbstractPolyhedron) -> String {
    let rel = match c.relation {
        Relation::Greater | Relation::GreaterOrIdeal => ">",
        Relation::Less => "<",
    };
    let what = match &c.witness {
        ConditionWitness::Edge(e) => format!("edge ({},{})", p.vertex_label(p.edge(*e).a), p.vertex_label(p.edge(*e).b)),
        ConditionWitness::Vertex(v) => format!("vertex {}", p.vertex_label(*v)),
        ConditionWitness::Circuit(circ) => circ.display(p).to_string(),
        ConditionWitness::QuadFace { face, inequality } => {
            format!("face {} inequality {inequality}", p.face(*face).name)
        }
    };
    format!(
        "fail {what} sum={} (need {rel} {})",
        format_pi(&c.sum),
        format_pi(&c.bound)
    )
}

/// A quadrilateral face, its cycle edges `e1..e4` and the four edges
/// entering its vertices (`e12, e23, e34, e41`).
#[derive(Clone, Debug)]
struct QuadData {
    face: FaceId,
    sides: [EdgeId; 4],
    entering: [EdgeId; 4],
}

/// The combinatorial data Andreev's conditions quantify over, computed once
/// per polyhedron and reusable across labelings.
#[derive(Clone, Debug)]
pub struct AndreevChecker {
    poly: AbstractPolyhedron,
    vertex_edges: Vec<Vec<EdgeId>>,
    triangles: Vec<Circuit>,
    squares: Vec<Circuit>,
    quads: Vec<QuadData>,
    quad_binding: bool,
    skipped_quads: Vec<FaceId>,
}

impl AndreevChecker {
    pub fn new(p: &AbstractPolyhedron) -> Result<Self, AndreevError> {
        if p.face_count() <= 4 {
            return Err(AndreevError::FaceCountTooSmall {
                faces: p.face_count(),
            });
        }
        for v in 0..p.vertex_count() {
            let d = p.valence(v);
            if d == 4 && !p.is_ideal_candidate(v) {
                return Err(AndreevError::UnflaggedFourValent {
                    vertex: p.vertex_label(v),
                });
            }
            if d != 3 && d != 4 {
                return Err(AndreevError::BadValence {
                    vertex: p.vertex_label(v),
                    valence: d,
                });
            }
        }
        let mut quads = Vec::new();
        let mut skipped_quads = Vec::new();
        for f in 0..p.face_count() {
            let cyc = &p.face(f).cycle;
            if cyc.len() != 4 {
                continue;
            }
            let sides = p.face_edges(f);
            // sides[i] joins cyc[i] and cyc[i+1]; the edge entering cyc[i+1]
            // sits between sides[i] and sides[i+1].
            let mut entering = [0; 4];
            let mut ok = true;
            for i in 0..4 {
                let v = cyc[(i + 1) % 4];
                let others: Vec<EdgeId> = p
                    .vertex_edges(v)
                    .iter()
                    .copied()
                    .filter(|e| !sides.contains(e))
                    .collect();
                if others.len() == 1 {
                    entering[i] = others[0];
                } else {
                    ok = false;
                }
            }
            if ok {
                quads.push(QuadData {
                    face: f,
                    sides: [sides[0], sides[1], sides[2], sides[3]],
                    entering,
                });
            } else {
                skipped_quads.push(f);
            }
        }
        Ok(Self {
            poly: p.clone(),
            vertex_edges: (0..p.vertex_count()).map(|v| p.vertex_edges(v).to_vec()).collect(),
            triangles: prismatic_circuits(p, 3),
            squares: prismatic_circuits(p, 4),
            quads,
            quad_binding: p.face_count() == 5,
            skipped_quads,
        })
    }

    pub fn polyhedron(&self) -> &AbstractPolyhedron {
        &self.poly
    }

    pub fn prismatic_three_circuits(&self) -> &[Circuit] {
        &self.triangles
    }

    pub fn prismatic_four_circuits(&self) -> &[Circuit] {
        &self.squares
    }

    /// Full report for one labeling (indexed by edge).
    pub fn check(&self, labels: &[u32], regime: Regime) -> AndreevReport {
        let p = &self.poly;
        let sum = |edges: &[EdgeId]| -> PiMultiple { edges.iter().map(|&e| pi_over(labels[e])).sum() };
        let mut notes = Vec::new();

        let c1 = ConditionResult {
            id: 1,
            status: ConditionStatus::Pass,
            checks: (0..labels.len())
                .map(|e| ConditionCheck {
                    witness: ConditionWitness::Edge(e),
                    edges: vec![e],
                    sum: pi_over(labels[e]),
                    bound: PiMultiple::zero(),
                    relation: Relation::Greater,
                    holds: true,
                })
                .collect(),
        };

        let mut vertex_types = Vec::with_capacity(p.vertex_count());
        let mut c2_checks = Vec::new();
        for (v, edges) in self.vertex_edges.iter().enumerate() {
            let ls: Vec<u32> = edges.iter().map(|&e| labels[e]).collect();
            let t = classify_vertex(&ls);
            vertex_types.push(t);
            let ideal_ok = regime == Regime::AllowIdeal || p.is_ideal_candidate(v);
            let holds = match t {
                VertexType::Compact => true,
                VertexType::Ideal => ideal_ok,
                VertexType::Inadmissible => false,
            };
            c2_checks.push(ConditionCheck {
                witness: ConditionWitness::Vertex(v),
                edges: edges.clone(),
                sum: sum(edges),
                bound: PiMultiple::from_integer(edges.len() as i128 - 2),
                relation: if ideal_ok { Relation::GreaterOrIdeal } else { Relation::Greater },
                holds,
            });
        }
        let c2 = finish(2, c2_checks, true);

        let circuit_checks = |circuits: &[Circuit], bound: i128| -> Vec<ConditionCheck> {
            circuits
                .iter()
                .map(|c| {
                    let s = sum(&c.crossed_edges);
                    let b = PiMultiple::from_integer(bound);
                    ConditionCheck {
                        witness: ConditionWitness::Circuit(c.clone()),
                        edges: c.crossed_edges.clone(),
                        holds: s < b,
                        sum: s,
                        bound: b,
                        relation: Relation::Less,
                    }
                })
                .collect()
        };
        let c3 = finish(3, circuit_checks(&self.triangles, 1), true);
        let c4 = finish(4, circuit_checks(&self.squares, 2), true);

        let mut c5_checks = Vec::new();
        for q in &self.quads {
            for (inequality, (a, b)) in [(1u8, (0, 2)), (2u8, (1, 3))] {
                let mut edges = vec![q.sides[a], q.sides[b]];
                edges.extend_from_slice(&q.entering);
                let s = sum(&edges);
                let bound = PiMultiple::from_integer(3);
                c5_checks.push(ConditionCheck {
                    witness: ConditionWitness::QuadFace {
                        face: q.face,
                        inequality,
                    },
                    edges,
                    holds: s < bound,
                    sum: s,
                    bound,
                    relation: Relation::Less,
                });
            }
        }
        for &f in &self.skipped_quads {
            notes.push(format!(
                "quadrilateral face {} touches a 4-valent vertex; condition 5 not evaluated there",
                p.face(f).name
            ));
        }
        let c5 = finish(5, c5_checks, self.quad_binding);
        if !self.quad_binding && !c5.checks.is_empty() {
            notes.push(format!(
                "condition 5 is informational: F={} > 5",
                p.face_count()
            ));
        }

        let conditions = vec![c1, c2, c3, c4, c5];
        let rejected = conditions.iter().any(|c| c.status == ConditionStatus::Fail);
        let any_ideal = vertex_types.contains(&VertexType::Ideal);
        let outcome = if rejected {
            Outcome::Rejected
        } else if any_ideal {
            Outcome::RealizableWithIdealVertices
        } else {
            Outcome::RealizableCompact
        };
        if regime == Regime::AllowIdeal && any_ideal {
            notes.push("ideal vertices admitted: only the compact conditions were checked, with equality allowed at vertices".into());
        }
        AndreevReport {
            outcome,
            regime,
            conditions,
            vertex_types,
            notes,
        }
    }

    /// Same verdict as [`AndreevChecker::check`] without building a report.
    pub fn passes(&self, labels: &[u32], regime: Regime) -> bool {
        let p = &self.poly;
        let sum = |edges: &[EdgeId]| -> PiMultiple { edges.iter().map(|&e| pi_over(labels[e])).sum() };
        for (v, edges) in self.vertex_edges.iter().enumerate() {
            let ls: Vec<u32> = edges.iter().map(|&e| labels[e]).collect();
            match classify_vertex(&ls) {
                VertexType::Compact => {}
                VertexType::Ideal if regime == Regime::AllowIdeal || p.is_ideal_candidate(v) => {}
                _ => return false,
            }
        }
        let one = PiMultiple::from_integer(1);
        let two = PiMultiple::from_integer(2);
        let three = PiMultiple::from_integer(3);
        if self.triangles.iter().any(|c| sum(&c.crossed_edges) >= one) {
            return false;
        }
        if self.squares.iter().any(|c| sum(&c.crossed_edges) >= two) {
            return false;
        }
        if self.quad_binding {
            for q in &self.quads {
                let ent = sum(&q.entering);
                for (a, b) in [(0, 2), (1, 3)] {
                    if ent + pi_over(labels[q.sides[a]]) + pi_over(labels[q.sides[b]]) >= three {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn finish(id: u8, checks: Vec<ConditionCheck>, binding: bool) -> ConditionResult {
    let status = if checks.is_empty() {
        ConditionStatus::Vacuous
    } else if !binding {
        ConditionStatus::Informational
    } else if checks.iter().all(|c| c.holds) {
        ConditionStatus::Pass
    } else {
        ConditionStatus::Fail
    };
    ConditionResult { id, status, checks }
}

/// Checks all of Andreev's conditions for `lp`.
pub fn check(lp: &LabeledPolyhedron, regime: Regime) -> Result<AndreevReport, AndreevError> {
    Ok(AndreevChecker::new(lp.base())?.check(lp.labels(), regime))
}

/// Histogram of vertex types, e.g. `compact=8`.
pub fn vertex_summary(types: &[VertexType]) -> String {
    let mut counts: BTreeMap<VertexType, usize> = BTreeMap::new();
    for &t in types {
        *counts.entry(t).or_default() += 1;
    }
    counts
        .iter()
        .map(|(t, n)| format!("{}={n}", t.name()))
        .collect::<Vec<_>>()
        .join(";")
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Real-valued variant of the linear conditions, for continuous angle
/// assignments along deformation paths. `slack` is the margin (radians)
/// each strict inequality must clear. Returns the first violated
/// condition's description.
pub fn check_angles(checker: &AndreevChecker, angles: &[f64], slack: f64) -> Result<(), String> {
    use std::f64::consts::PI;
    let p = checker.polyhedron();
    let s = |edges: &[EdgeId]| -> f64 { edges.iter().map(|&e| angles[e]).sum() };
    for (e, &a) in angles.iter().enumerate() {
        if !(a > slack && a <= PI / 2.0 + 1e-12) {
            return Err(format!("edge {e}: angle {a} outside (0, π/2]"));
        }
    }
    for (v, edges) in checker.vertex_edges.iter().enumerate() {
        let total = s(edges);
        let need = (edges.len() as f64 - 2.0) * PI;
        if edges.len() == 4 {
            if edges.iter().any(|&e| (angles[e] - PI / 2.0).abs() > 1e-12) {
                return Err(format!("4-valent vertex {} needs right angles", p.vertex_label(v)));
            }
        } else if total < need + slack && !(p.is_ideal_candidate(v) && (total - need).abs() < 1e-12) {
            return Err(format!("vertex {}: angle sum {total} not > {need}", p.vertex_label(v)));
        }
    }
    for (circuits, bound) in [(&checker.triangles, PI), (&checker.squares, 2.0 * PI)] {
        for c in circuits.iter() {
            let total = s(&c.crossed_edges);
            if total > bound - slack {
                return Err(format!("{}: sum {total} not < {bound}", c.display(p)));
            }
        }
    }
    if checker.quad_binding {
        for q in &checker.quads {
            let ent = s(&q.entering);
            for (a, b) in [(0, 2), (1, 3)] {
                let total = ent + angles[q.sides[a]] + angles[q.sides[b]];
                if total > 3.0 * PI - slack {
                    return Err(format!("face {}: sum {total} not < 3π", p.face(q.face).name));
                }
            }
        }
    }
    Ok(())
}

/// Angle sum as a float, for display.
pub fn pi_multiple_to_f64(r: &PiMultiple) -> f64 {
    r.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI
}
