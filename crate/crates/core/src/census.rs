//! Exhaustive labelings of a fixed polyhedron, up to symmetry.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::andreev::{vertex_summary, AndreevChecker, AndreevError, Outcome, Regime};
use crate::circuits::prismatic_circuits;
use crate::corpus;
use crate::haken::{classify, Size};
use crate::poly_model::{automorphisms, AbstractPolyhedron, Automorphism, EdgeId, LabeledPolyhedron};
use crate::volume::{schlafli_volume, DeformationPath};

/// Default cap on the number of candidate labelings.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CensusError {
    #[error("max label must be at least 2, got {0}")]
    MaxLabel(u32),
    #[error("{candidates} candidate labelings exceed the budget of {budget}")]
    Budget { candidates: u128, budget: u128 },
    #[error(transparent)]
    Andreev(#[from] AndreevError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusRow {
    /// Lexicographically least labeling in its orbit, indexed by edge.
    pub labels: Vec<u32>,
    pub outcome: Outcome,
    pub vertex_types: String,
    pub haken: Size,
    pub orbit_size: usize,
    pub volume: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct CensusOptions {
    pub max_label: u32,
    pub regime: Regime,
    pub budget: u128,
    /// Integrate the volume of every row (slow).
    pub volumes: bool,
    pub volume_tol: f64,
}

impl CensusOptions {
    pub fn new(max_label: u32, regime: Regime) -> Self {
        Self {
            max_label,
            regime,
            budget: DEFAULT_BUDGET,
            volumes: false,
            volume_tol: 1e-6,
        }
    }
}

/// Image of a labeling under a symmetry.
fn image(labels: &[u32], g: &Automorphism) -> Vec<u32> {
    let mut out = vec![0; labels.len()];
    for (e, &l) in labels.iter().enumerate() {
        out[g.edges[e]] = l;
    }
    out
}

/// The least image of `labels` under `group`.
pub fn canonical_labels(labels: &[u32], group: &[Automorphism]) -> Vec<u32> {
    group
        .iter()
        .map(|g| image(labels, g))
        .min()
        .unwrap_or_else(|| labels.to_vec())
}

fn is_canonical(labels: &[u32], group: &[Automorphism]) -> bool {
    group.iter().all(|g| image(labels, g).as_slice() >= labels)
}

fn orbit_size(labels: &[u32], group: &[Automorphism]) -> usize {
    group.iter().map(|g| image(labels, g)).collect::<BTreeSet<_>>().len()
}

pub fn enumerate_labelings(p: &AbstractPolyhedron, max_label: u32, regime: Regime) -> Result<Vec<CensusRow>, CensusError> {
    enumerate_labelings_with(p, &CensusOptions::new(max_label, regime))
}

/// One row per symmetry orbit of labelings in `{2..max_label}^E` that pass
/// the Andreev check, sorted by canonical labeling. A polyhedron with four
/// or fewer faces yields no rows.
pub fn enumerate_labelings_with(p: &AbstractPolyhedron, opts: &CensusOptions) -> Result<Vec<CensusRow>, CensusError> {
    if opts.max_label < 2 {
        return Err(CensusError::MaxLabel(opts.max_label));
    }
    let checker = match AndreevChecker::new(p) {
        Ok(c) => c,
        Err(AndreevError::FaceCountTooSmall { .. }) => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let base = u128::from(opts.max_label - 1);
    let ne = p.edge_count();
    let candidates = base.checked_pow(ne as u32).unwrap_or(u128::MAX);
    if candidates > opts.budget {
        return Err(CensusError::Budget {
            candidates,
            budget: opts.budget,
        });
    }
    let group = automorphisms(p);
    let decode = |mut i: u128| -> Vec<u32> {
        // edge 0 is the most significant digit, so index order is lexicographic
        let mut labels = vec![2; ne];
        for slot in labels.iter_mut().rev() {
            *slot = 2 + (i % base) as u32;
            i /= base;
        }
        labels
    };
    let total = candidates as u64;
    let mut found: Vec<Vec<u32>> = (0..total)
        .into_par_iter()
        .filter_map(|i| {
            let labels = decode(u128::from(i));
            (checker.passes(&labels, opts.regime) && is_canonical(&labels, &group)).then_some(labels)
        })
        .collect();
    found.sort();
    let haken = classify(p).size;
    let rows = found
        .into_iter()
        .map(|labels| {
            let report = checker.check(&labels, opts.regime);
            let volume = if opts.volumes {
                LabeledPolyhedron::new(p.clone(), labels.clone())
                    .ok()
                    .and_then(|lp| schlafli_volume(&lp, &DeformationPath::linear(&lp), opts.volume_tol).ok())
                    .map(|v| v.volume)
            } else {
                None
            };
            CensusRow {
                orbit_size: orbit_size(&labels, &group),
                outcome: report.outcome,
                vertex_types: vertex_summary(&report.vertex_types),
                haken,
                volume,
                labels,
            }
        })
        .collect();
    Ok(rows)
}

/// Rows as TSV: one column per edge (headed by its endpoints), then the
/// row data.
pub fn census_tsv(p: &AbstractPolyhedron, rows: &[CensusRow]) -> String {
    let mut s = String::new();
    for e in p.edges() {
        let (a, b) = (p.vertex_label(e.a), p.vertex_label(e.b));
        let _ = write!(s, "e{}_{}\t", a.min(b), a.max(b));
    }
    s += "outcome\tvertices\thaken\torbit\tvolume\n";
    for r in rows {
        for l in &r.labels {
            let _ = write!(s, "{l}\t");
        }
        let vol = r.volume.map_or("-".to_string(), |v| format!("{v:.10}"));
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}",
            r.outcome.name(),
            r.vertex_types,
            r.haken.name(),
            r.orbit_size,
            vol
        );
    }
    s
}

/// The placements of three 3-labels on the cube (all other edges 2).
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeThrees {
    pub candidates: usize,
    /// Passing placements, as sorted edge triples, in lexicographic order.
    pub passing: Vec<[EdgeId; 3]>,
    /// Orbits of the passing placements, as indices into `passing`.
    pub orbits: Vec<ThreeThreesOrbit>,
    /// Indices of passing placements whose 3-edges are pairwise non-adjacent.
    pub non_adjacent: Vec<usize>,
    /// Placements meeting every prismatic 4-circuit exactly once.
    pub band_transversals: Vec<[EdgeId; 3]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeThreesOrbit {
    pub members: Vec<usize>,
    pub stabilizer_order: usize,
    pub non_adjacent: bool,
}

impl ThreeThrees {
    /// The passing set equals the set of prismatic 4-circuit transversals.
    pub fn characterizations_agree(&self) -> bool {
        self.passing == self.band_transversals
    }

    pub fn all_non_adjacent(&self) -> bool {
        self.non_adjacent.len() == self.passing.len()
    }
}

pub fn cube_three_threes(regime: Regime) -> ThreeThrees {
    let cube = corpus::cube_all2();
    let p = cube.base();
    let checker = AndreevChecker::new(p).expect("cube has six faces");
    let group = automorphisms(p);
    let bands = prismatic_circuits(p, 4);
    let ne = p.edge_count();
    let mut triples = Vec::new();
    for a in 0..ne {
        for b in a + 1..ne {
            for c in b + 1..ne {
                triples.push([a, b, c]);
            }
        }
    }
    let labels_of = |t: &[EdgeId; 3]| {
        let mut l = vec![2; ne];
        for &e in t {
            l[e] = 3;
        }
        l
    };
    let passing: Vec<[EdgeId; 3]> = triples
        .iter()
        .copied()
        .filter(|t| checker.passes(&labels_of(t), regime))
        .collect();
    let band_transversals = triples
        .iter()
        .copied()
        .filter(|t| {
            bands
                .iter()
                .all(|b| t.iter().filter(|e| b.crossed_edges.contains(e)).count() == 1)
        })
        .collect();
    let adjacent = |x: EdgeId, y: EdgeId| {
        let (ex, ey) = (p.edge(x), p.edge(y));
        ex.has_vertex(ey.a) || ex.has_vertex(ey.b)
    };
    let spread = |t: &[EdgeId; 3]| !adjacent(t[0], t[1]) && !adjacent(t[0], t[2]) && !adjacent(t[1], t[2]);
    let non_adjacent = (0..passing.len()).filter(|&i| spread(&passing[i])).collect();

    let mut seen = vec![false; passing.len()];
    let mut orbits = Vec::new();
    for i in 0..passing.len() {
        if seen[i] {
            continue;
        }
        let mut members = BTreeSet::new();
        for g in &group {
            let mut img = passing[i].map(|e| g.edges[e]);
            img.sort_unstable();
            if let Some(j) = passing.iter().position(|t| *t == img) {
                members.insert(j);
            }
        }
        for &j in &members {
            seen[j] = true;
        }
        let l = labels_of(&passing[i]);
        orbits.push(ThreeThreesOrbit {
            members: members.into_iter().collect(),
            stabilizer_order: group.iter().filter(|g| image(&l, g) == l).count(),
            non_adjacent: spread(&passing[i]),
        });
    }
    ThreeThrees {
        candidates: triples.len(),
        passing,
        orbits,
        non_adjacent,
        band_transversals,
    }
}

/// How rows of the pyramid table are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Convention {
    /// `e1..e4` label the base edges in cyclic order.
    ListedCyclic,
    /// A row is a multiset, admissible if some cyclic arrangement is.
    AnyArrangement,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::ListedCyclic => "listed",
            Convention::AnyArrangement => "any",
        }
    }
}

/// A published table of square pyramids with ideal apex, wildcards
/// expanded, as cyclic base sequences.
pub fn published_pyramid_rows() -> Vec<[u32; 4]> {
    let mut rows = Vec::new();
    for e4 in 3..=6 {
        rows.push([2, 2, 3, e4]);
    }
    rows.push([2, 2, 4, 4]);
    for e3 in 3..=5 {
        rows.push([2, 3, e3, 3]);
    }
    for e2 in 3..=5 {
        rows.push([3, e2, 3, 3]);
    }
    for e2 in 3..=5 {
        for e4 in 3..=5 {
            rows.push([3, e2, 3, e4]);
        }
    }
    rows
}

fn dihedral_images(s: [u32; 4]) -> Vec<[u32; 4]> {
    let mut out = Vec::with_capacity(8);
    for r in 0..4 {
        let rot: [u32; 4] = std::array::from_fn(|i| s[(i + r) % 4]);
        out.push(rot);
        out.push([rot[0], rot[3], rot[2], rot[1]]);
    }
    out
}

fn canonical_cyclic(s: [u32; 4]) -> [u32; 4] {
    dihedral_images(s).into_iter().min().unwrap()
}

fn sorted(mut s: [u32; 4]) -> [u32; 4] {
    s.sort_unstable();
    s
}

fn fmt_seq(s: &[u32; 4]) -> String {
    format!("{},{},{},{}", s[0], s[1], s[2], s[3])
}

fn fmt_ratio(r: Ratio<i64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact reasons a cyclic base sequence (apex edges 2, apex ideal) is not
/// compact-admissible: ideal or inadmissible base vertices, and failures of
/// the quadrilateral condition on the base.
pub fn pyramid_reasons(s: [u32; 4]) -> Vec<String> {
    let inv = |n: u32| Ratio::new(1, i64::from(n));
    let half = Ratio::new(1, 2);
    let one = Ratio::from_integer(1);
    let mut out = Vec::new();
    for i in 0..4 {
        let (x, y) = (s[i], s[(i + 1) % 4]);
        let sum = inv(x) + inv(y) + half;
        if sum == one {
            out.push(format!("base vertex between {x} and {y}: 1/{x} + 1/{y} + 1/2 = 1 (ideal)"));
        } else if sum < one {
            out.push(format!(
                "base vertex between {x} and {y}: 1/{x} + 1/{y} + 1/2 = {} < 1 (inadmissible)",
                fmt_ratio(sum)
            ));
        }
    }
    for (i, j) in [(0, 2), (1, 3)] {
        let (x, y) = (s[i], s[j]);
        // the four apex edges enter the base at right angles
        let sum = inv(x) + inv(y) + Ratio::from_integer(2);
        if sum >= Ratio::from_integer(3) {
            out.push(format!(
                "opposite base edges {x} and {y}: 1/{x} + 1/{y} + 4·1/2 = {} not < 3 (quadrilateral condition)",
                fmt_ratio(sum)
            ));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct PyramidRow {
    /// Canonical form under the convention.
    pub labels: [u32; 4],
    /// Ideal base vertices of the admitted arrangement.
    pub ideal_base_vertices: usize,
    pub in_table: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PyramidReport {
    pub convention: Convention,
    pub regime: Regime,
    pub max_label: u32,
    pub rows: Vec<PyramidRow>,
    pub matched: Vec<[u32; 4]>,
    /// Published rows not admitted, with exact reasons.
    pub missing: Vec<([u32; 4], Vec<String>)>,
    /// Admitted rows absent from the published table.
    pub extra: Vec<[u32; 4]>,
    /// Published rows admitted only thanks to an ideal base vertex.
    pub admitted_with_ideal: Vec<([u32; 4], Vec<String>)>,
}

impl PyramidReport {
    pub fn render(&self) -> String {
        let mut s = format!(
            "# pyramid-table convention={} regime={} max_label={}\nlabels\tideal_base_vertices\tin_table\n",
            self.convention.name(),
            self.regime.name(),
            self.max_label
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}\t{}\t{}",
                fmt_seq(&r.labels),
                r.ideal_base_vertices,
                if r.in_table { "yes" } else { "no" }
            );
        }
        let _ = writeln!(
            s,
            "diff matched={} missing={} extra={}",
            self.matched.len(),
            self.missing.len(),
            self.extra.len()
        );
        for m in &self.matched {
            let _ = writeln!(s, "matched {}", fmt_seq(m));
        }
        for (m, reasons) in &self.missing {
            let _ = writeln!(s, "missing {}: {}", fmt_seq(m), reasons.join("; "));
        }
        for (m, reasons) in &self.admitted_with_ideal {
            let _ = writeln!(s, "ideal {}: {}", fmt_seq(m), reasons.join("; "));
        }
        for m in &self.extra {
            let _ = writeln!(s, "extra {}", fmt_seq(m));
        }
        s
    }
}

/// Compares admissible base labelings of the square pyramid against the
/// published table.
pub fn pyramid_census(max_label: u32, convention: Convention, regime: Regime) -> PyramidReport {
    let lp = corpus::pyramid();
    let p = lp.base();
    let checker = AndreevChecker::new(p).expect("pyramid has five faces");
    let base = (0..p.face_count())
        .find(|&f| p.face(f).cycle.len() == 4)
        .expect("pyramid has a square face");
    let sides = p.face_edges(base);
    let labels_for = |s: [u32; 4]| {
        let mut l = vec![2; p.edge_count()];
        for i in 0..4 {
            l[sides[i]] = s[i];
        }
        l
    };
    let ideal_count = |s: [u32; 4]| pyramid_reasons(s).iter().filter(|r| r.ends_with("(ideal)")).count();
    let passes = |s: [u32; 4]| checker.passes(&labels_for(s), regime);

    // admissible cyclic sequences up to symmetry of the square
    let mut cyclic: BTreeSet<[u32; 4]> = BTreeSet::new();
    let range = 2..=max_label.max(2);
    for a in range.clone() {
        for b in range.clone() {
            for c in range.clone() {
                for d in range.clone() {
                    let s = [a, b, c, d];
                    if passes(s) {
                        cyclic.insert(canonical_cyclic(s));
                    }
                }
            }
        }
    }
    let canon = |s: [u32; 4]| match convention {
        Convention::ListedCyclic => canonical_cyclic(s),
        Convention::AnyArrangement => sorted(s),
    };
    // admitted rows under the convention, with the arrangement that admits
    // each (fewest ideal vertices first)
    let mut admitted: BTreeMap<[u32; 4], [u32; 4]> = BTreeMap::new();
    for &s in &cyclic {
        let key = canon(s);
        let better = admitted.get(&key).is_none_or(|&old| ideal_count(s) < ideal_count(old));
        if better {
            admitted.insert(key, s);
        }
    }
    let table: BTreeSet<[u32; 4]> = published_pyramid_rows().into_iter().map(canon).collect();

    let rows = admitted
        .iter()
        .map(|(&k, &arr)| PyramidRow {
            labels: k,
            ideal_base_vertices: ideal_count(arr),
            in_table: table.contains(&k),
        })
        .collect();
    let mut matched = Vec::new();
    let mut missing = Vec::new();
    let mut admitted_with_ideal = Vec::new();
    // iterate the published rows as printed so reasons refer to the listed order
    let mut seen = BTreeSet::new();
    for row in published_pyramid_rows() {
        let key = canon(row);
        if !seen.insert(key) {
            continue;
        }
        match admitted.get(&key) {
            Some(&arr) => {
                matched.push(row);
                if ideal_count(arr) > 0 {
                    admitted_with_ideal.push((row, pyramid_reasons(arr)));
                }
            }
            None => {
                let reasons = match convention {
                    Convention::ListedCyclic => pyramid_reasons(row),
                    Convention::AnyArrangement => arrangements(row)
                        .into_iter()
                        .map(|a| format!("[{}] {}", fmt_seq(&a), reason_or_regime(a, regime)))
                        .collect(),
                };
                missing.push((row, reasons));
            }
        }
    }
    let extra = admitted.keys().filter(|k| !table.contains(*k)).copied().collect();
    PyramidReport {
        convention,
        regime,
        max_label,
        rows,
        matched,
        missing,
        extra,
        admitted_with_ideal,
    }
}

fn reason_or_regime(s: [u32; 4], regime: Regime) -> String {
    let r = pyramid_reasons(s);
    if r.is_empty() {
        "admissible".to_string()
    } else if regime == Regime::AllowIdeal && r.iter().all(|x| x.ends_with("(ideal)")) {
        format!("admissible with ideal vertices: {}", r.join(", "))
    } else {
        r.join(", ")
    }
}

/// Cyclic arrangements of a multiset, up to symmetry of the square.
fn arrangements(s: [u32; 4]) -> Vec<[u32; 4]> {
    let mut out = BTreeSet::new();
    let idx = [0, 1, 2, 3];
    for a in idx {
        for b in idx {
            for c in idx {
                for d in idx {
                    let perm = [a, b, c, d];
                    if perm.iter().collect::<BTreeSet<_>>().len() == 4 {
                        out.insert(canonical_cyclic(perm.map(|i| s[i])));
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// All four (convention, regime) reports, in a fixed order.
pub fn pyramid_table(max_label: u32) -> Vec<PyramidReport> {
    let mut out = Vec::new();
    for convention in [Convention::ListedCyclic, Convention::AnyArrangement] {
        for regime in [Regime::StrictCompact, Regime::AllowIdeal] {
            out.push(pyramid_census(max_label, convention, regime));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_threes() {
        let r = cube_three_threes(Regime::StrictCompact);
        assert_eq!(r.candidates, 220);
        // one 3 in each parallel class, less the 8 that meet at a vertex
        assert_eq!(r.band_transversals.len(), 64);
        assert_eq!(r.passing.len(), 56);
        assert!(r.passing.iter().all(|t| r.band_transversals.contains(t)));
        assert_eq!(r.non_adjacent.len(), 8);
        let sizes: Vec<_> = r.orbits.iter().map(|o| (o.members.len(), o.stabilizer_order, o.non_adjacent)).collect();
        assert_eq!(sizes, [(24, 2, false), (24, 2, false), (8, 6, true)]);
        assert!(!r.characterizations_agree());
        // the 8 missing placements have a (3,3,3) vertex, which is ideal
        let r = cube_three_threes(Regime::AllowIdeal);
        assert_eq!(r.passing.len(), 64);
        assert!(r.characterizations_agree());
    }

    #[test]
    fn tetrahedron_census_is_empty() {
        let rows = enumerate_labelings(corpus::tetrahedron().base(), 4, Regime::AllowIdeal).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let p = corpus::cube_all2().base().clone();
        let opts = CensusOptions {
            budget: 1000,
            ..CensusOptions::new(3, Regime::StrictCompact)
        };
        assert!(matches!(enumerate_labelings_with(&p, &opts), Err(CensusError::Budget { .. })));
        assert_eq!(enumerate_labelings(&p, 1, Regime::StrictCompact), Err(CensusError::MaxLabel(1)));
    }

    #[test]
    fn pyramid_reason_arithmetic() {
        assert!(pyramid_reasons([2, 2, 3, 5]).is_empty());
        let r = pyramid_reasons([2, 2, 3, 6]);
        assert_eq!(r, ["base vertex between 3 and 6: 1/3 + 1/6 + 1/2 = 1 (ideal)"]);
        let r = pyramid_reasons([2, 3, 2, 4]);
        assert_eq!(r.len(), 1);
        assert!(r[0].starts_with("opposite base edges 2 and 2: 1/2 + 1/2 + 4·1/2 = 3"));
        assert!(pyramid_reasons([2, 2, 3, 7])[0].contains("41/42 < 1"));
    }

    #[test]
    fn reasons_agree_with_checker() {
        let lp = corpus::pyramid();
        let p = lp.base();
        let checker = AndreevChecker::new(p).unwrap();
        let sides = p.face_edges((0..p.face_count()).find(|&f| p.face(f).cycle.len() == 4).unwrap());
        for a in 2..=6 {
            for b in 2..=6 {
                for c in 2..=6 {
                    for d in 2..=6 {
                        let s = [a, b, c, d];
                        let mut l = vec![2; p.edge_count()];
                        for i in 0..4 {
                            l[sides[i]] = s[i];
                        }
                        assert_eq!(checker.passes(&l, Regime::StrictCompact), pyramid_reasons(s).is_empty(), "{s:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn dihedral_canonical_form() {
        assert_eq!(canonical_cyclic([3, 2, 2, 5]), [2, 2, 3, 5]);
        assert_eq!(canonical_cyclic([5, 3, 2, 2]), [2, 2, 3, 5]);
        assert_eq!(arrangements([2, 2, 4, 4]), vec![[2, 2, 4, 4], [2, 4, 2, 4]]);
    }
}
