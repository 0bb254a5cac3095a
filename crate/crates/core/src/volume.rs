//! Volume by integrating Schläfli's differential `dV = −½ Σ ℓ_e dθ_e` along
//! a path of dihedral angles that starts where the polyhedron collapses to
//! a point.

use std::f64::consts::PI;

use thiserror::Error;

use crate::andreev::{self, AndreevChecker, Regime};
use crate::poly_model::{EdgeId, LabeledPolyhedron};
use crate::quadrature::{adaptive, Rule};
use crate::realization::{LorentzVector, Realization, RealizeError, RealizeOptions, Tracker};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VolumeError {
    #[error("target cannot be realized: {0}")]
    Target(RealizeError),
    #[error("realization failed at t = {t}: {source}")]
    PathRealizationFailure { t: f64, source: RealizeError },
    #[error("start of path does not collapse: max edge length {max_length:.3e} at t = ε exceeds {threshold:.3e}")]
    NonCollapsingStart { max_length: f64, threshold: f64 },
    #[error("path varies the angle of edge ({a},{b}), which has an ideal endpoint")]
    IdealEdge { a: u64, b: u64 },
    #[error("path leaves the admissible region at t = {t}: {reason}")]
    InadmissiblePath { t: f64, reason: String },
    #[error("invalid path: {0}")]
    Path(String),
}

/// Piecewise-linear path of angle vectors (indexed by edge), parametrized
/// by `t ∈ [0, 1]` with equal time per segment. `t = 0` is the degenerate
/// end.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationPath {
    points: Vec<Vec<f64>>,
}

impl DeformationPath {
    /// Angles of the collapse configuration: every dihedral angle `π/2`.
    pub fn collapse_angles(lp: &LabeledPolyhedron) -> Vec<f64> {
        vec![PI / 2.0; lp.base().edge_count()]
    }

    /// Straight line from the collapse configuration to the target angles.
    pub fn linear(lp: &LabeledPolyhedron) -> Self {
        Self {
            points: vec![Self::collapse_angles(lp), lp.angles()],
        }
    }

    /// Collapse configuration, then each waypoint in turn, then the target.
    pub fn through(lp: &LabeledPolyhedron, waypoints: Vec<Vec<f64>>) -> Result<Self, VolumeError> {
        let mut points = vec![Self::collapse_angles(lp)];
        points.extend(waypoints);
        points.push(lp.angles());
        Self::from_points(points)
    }

    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self, VolumeError> {
        if points.len() < 2 {
            return Err(VolumeError::Path("a path needs at least two points".into()));
        }
        let n = points[0].len();
        if points.iter().any(|p| p.len() != n) {
            return Err(VolumeError::Path("points have different lengths".into()));
        }
        Ok(Self { points })
    }

    /// Reads waypoints. Each `waypoint` line opens a block; `edge a b x`
    /// lines inside it set the angle of edge `(a, b)` to `π/x` for a real
    /// label `x ≥ 2`. Edges a block does not mention take their target angle.
    /// `#` starts a comment.
    pub fn parse(text: &str, lp: &LabeledPolyhedron) -> Result<Self, VolumeError> {
        let p = lp.base();
        let target = lp.angles();
        let mut waypoints: Vec<Vec<f64>> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| VolumeError::Path(format!("line {}: {m}", ln + 1));
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok[0] {
                "waypoint" if tok.len() == 1 => waypoints.push(target.clone()),
                "edge" if tok.len() == 4 => {
                    let wp = waypoints.last_mut().ok_or_else(|| err("edge before any waypoint"))?;
                    let a: u64 = tok[1].parse().map_err(|_| err("bad vertex"))?;
                    let b: u64 = tok[2].parse().map_err(|_| err("bad vertex"))?;
                    let x: f64 = tok[3].parse().map_err(|_| err("bad label"))?;
                    if !(x >= 2.0) || !x.is_finite() {
                        return Err(err("real label must be at least 2"));
                    }
                    let e = p
                        .vertex_by_label(a)
                        .zip(p.vertex_by_label(b))
                        .and_then(|(a, b)| p.edge_between(a, b))
                        .ok_or_else(|| err(&format!("no edge ({a},{b})")))?;
                    wp[e] = PI / x;
                }
                _ => return Err(err(&format!("cannot parse '{line}'"))),
            }
        }
        Self::through(lp, waypoints)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn segments(&self) -> usize {
        self.points.len() - 1
    }

    /// `[t0, t1]` of segment `k`.
    pub fn segment_bounds(&self, k: usize) -> (f64, f64) {
        let m = self.segments() as f64;
        (k as f64 / m, (k + 1) as f64 / m)
    }

    fn segment_of(&self, t: f64) -> usize {
        ((t * self.segments() as f64).floor() as usize).min(self.segments() - 1)
    }

    /// Angles at `t` on segment `k` (which must contain `t`).
    pub fn angles_on(&self, k: usize, t: f64) -> Vec<f64> {
        let (t0, t1) = self.segment_bounds(k);
        let s = (t - t0) / (t1 - t0);
        let (a, b) = (&self.points[k], &self.points[k + 1]);
        a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
    }

    pub fn angles(&self, t: f64) -> Vec<f64> {
        self.angles_on(self.segment_of(t), t)
    }

    /// `dθ/dt` on segment `k`.
    pub fn derivative_on(&self, k: usize) -> Vec<f64> {
        let m = self.segments() as f64;
        let (a, b) = (&self.points[k], &self.points[k + 1]);
        a.iter().zip(b).map(|(x, y)| m * (y - x)).collect()
    }

    /// Edges whose angle changes somewhere along the path.
    pub fn varying_edges(&self) -> Vec<EdgeId> {
        (0..self.points[0].len())
            .filter(|&e| self.points.windows(2).any(|w| w[0][e] != w[1][e]))
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VolumeOptions {
    /// Target for the quadrature error estimate.
    pub tol: f64,
    /// Integration starts at `t = epsilon`.
    pub epsilon: f64,
    /// Largest edge length tolerated at `t = epsilon`.
    pub collapse_threshold: f64,
    /// Gauss–Legendre points per panel.
    pub order: usize,
    pub realize: RealizeOptions,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            epsilon: 1e-4,
            collapse_threshold: 0.05,
            order: 10,
            realize: RealizeOptions {
                regime: Regime::AllowIdeal,
                ..RealizeOptions::default()
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeResult {
    pub volume: f64,
    pub error_estimate: f64,
    /// Realizations performed.
    pub nodes: usize,
    pub doubled: bool,
}

/// The doubled value some software reports. Idempotent.
pub fn orb_convention(v: VolumeResult) -> VolumeResult {
    if v.doubled {
        return v;
    }
    VolumeResult {
        volume: 2.0 * v.volume,
        error_estimate: 2.0 * v.error_estimate,
        doubled: true,
        ..v
    }
}

/// Realizations along a fixed path, with the Schläfli integrand.
#[derive(Clone, Debug)]
pub struct PathSolver {
    tracker: Tracker,
    path: DeformationPath,
    varying: Vec<EdgeId>,
    evaluations: usize,
}

impl PathSolver {
    pub fn new(lp: &LabeledPolyhedron, path: DeformationPath, opts: &RealizeOptions) -> Result<Self, VolumeError> {
        let p = lp.base();
        if path.points[0].len() != p.edge_count() {
            return Err(VolumeError::Path("path length does not match edge count".into()));
        }
        let end = path.points.last().unwrap();
        if end.iter().zip(lp.angles()).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(VolumeError::Path("path does not end at the target angles".into()));
        }
        let tracker = Tracker::new(lp, opts).map_err(VolumeError::Target)?;
        let varying = path.varying_edges();
        let target = tracker.target();
        for &e in &varying {
            if target.edge_length(e).is_none() {
                let edge = p.edge(e);
                return Err(VolumeError::IdealEdge {
                    a: p.vertex_label(edge.a),
                    b: p.vertex_label(edge.b),
                });
            }
        }
        Ok(Self {
            tracker,
            path,
            varying,
            evaluations: 0,
        })
    }

    pub fn path(&self) -> &DeformationPath {
        &self.path
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Realization at `t` on segment `k`.
    pub fn realization_on(&mut self, k: usize, t: f64) -> Result<Realization, VolumeError> {
        self.evaluations += 1;
        let angles = self.path.angles_on(k, t);
        self.tracker
            .realize_angles(&angles)
            .map_err(|source| VolumeError::PathRealizationFailure { t, source })
    }

    /// Largest length among the varying edges at `t`.
    pub fn max_varying_length(&mut self, t: f64) -> Result<f64, VolumeError> {
        let k = self.path.segment_of(t);
        let r = self.realization_on(k, t)?;
        Ok(self
            .varying
            .iter()
            .filter_map(|&e| r.edge_length(e))
            .fold(0.0, f64::max))
    }

    /// `dV/dt = −½ Σ ℓ_e θ_e′` on segment `k`. Edges with constant angle
    /// are left out, which keeps edges to ideal vertices out of the sum.
    pub fn integrand_on(&mut self, k: usize, t: f64) -> Result<f64, VolumeError> {
        let r = self.realization_on(k, t)?;
        let d = self.path.derivative_on(k);
        let mut s = 0.0;
        for &e in &self.varying {
            if d[e] == 0.0 {
                continue;
            }
            let l = r.edge_length(e).ok_or(VolumeError::PathRealizationFailure {
                t,
                source: RealizeError::IdealEndpoint { a: 0, b: 0 },
            })?;
            s += l * d[e];
        }
        Ok(-0.5 * s)
    }

    pub fn integrand(&mut self, t: f64) -> Result<f64, VolumeError> {
        let k = self.path.segment_of(t);
        self.integrand_on(k, t)
    }

    /// `∫_a^b dV/dt` with `a < b` inside one segment.
    pub fn integrate_on(&mut self, k: usize, a: f64, b: f64, tol: f64, order: usize) -> Result<(f64, f64), VolumeError> {
        let rule = Rule::new(order);
        let r = adaptive(&rule, a, b, tol, 40, &mut |t| self.integrand_on(k, t))?;
        Ok((r.value, r.error))
    }

    /// `∫_a^b dV/dt` across segments.
    pub fn integrate(&mut self, a: f64, b: f64, tol: f64, order: usize) -> Result<(f64, f64), VolumeError> {
        let (mut value, mut error) = (0.0, 0.0);
        for k in 0..self.path.segments() {
            let (t0, t1) = self.path.segment_bounds(k);
            let (lo, hi) = (a.max(t0), b.min(t1));
            if lo < hi {
                let (v, e) = self.integrate_on(k, lo, hi, tol * (hi - lo) / (b - a), order)?;
                value += v;
                error += e;
            }
        }
        Ok((value, error))
    }
}

/// Checks the path against the linear admissibility conditions at its
/// waypoints and just after its start; linearity carries them along each
/// segment.
pub fn check_path(lp: &LabeledPolyhedron, path: &DeformationPath, epsilon: f64) -> Result<(), VolumeError> {
    let checker = AndreevChecker::new(lp.base()).map_err(|e| VolumeError::InadmissiblePath {
        t: 0.0,
        reason: e.to_string(),
    })?;
    let mut probes = vec![epsilon];
    probes.extend((1..=path.segments()).map(|k| path.segment_bounds(k - 1).1));
    for t in probes {
        let k = path.segment_of(t.clamp(0.0, 1.0 - 1e-15));
        let angles = if t >= 1.0 {
            path.points.last().unwrap().clone()
        } else {
            path.angles_on(k, t)
        };
        andreev::check_angles(&checker, &angles, 0.0).map_err(|reason| VolumeError::InadmissiblePath { t, reason })?;
    }
    Ok(())
}

/// Volume of `lp` by Schläfli integration along `path` with default options
/// and quadrature tolerance `tol`.
pub fn schlafli_volume(lp: &LabeledPolyhedron, path: &DeformationPath, tol: f64) -> Result<VolumeResult, VolumeError> {
    schlafli_volume_with(
        lp,
        path,
        &VolumeOptions {
            tol,
            ..VolumeOptions::default()
        },
    )
}

pub fn schlafli_volume_with(
    lp: &LabeledPolyhedron,
    path: &DeformationPath,
    opts: &VolumeOptions,
) -> Result<VolumeResult, VolumeError> {
    if path.varying_edges().is_empty() {
        return Ok(VolumeResult {
            volume: 0.0,
            error_estimate: 0.0,
            nodes: 0,
            doubled: false,
        });
    }
    check_path(lp, path, opts.epsilon)?;
    let mut solver = PathSolver::new(lp, path.clone(), &opts.realize)?;
    let eps = opts.epsilon;
    let max_length = solver.max_varying_length(eps)?;
    if max_length > opts.collapse_threshold {
        return Err(VolumeError::NonCollapsingStart {
            max_length,
            threshold: opts.collapse_threshold,
        });
    }
    // the omitted [0, ε] piece is bounded by ε times the integrand there,
    // which grows with t
    let g0 = solver.integrand(eps)?.abs().max(solver.integrand(2.0 * eps)?.abs());
    let (value, error) = solver.integrate(eps, 1.0, opts.tol, opts.order)?;
    Ok(VolumeResult {
        volume: value,
        error_estimate: error + eps * g0,
        nodes: solver.evaluations(),
        doubled: false,
    })
}

/// Volume change under perturbing the angles of `edges` by `delta`: a
/// central difference of [`direct_volume`] and the Schläfli prediction
/// `−½ Σ ℓ_e δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub numeric: f64,
    pub schlafli: f64,
}

pub fn monotonicity_probe(
    lp: &LabeledPolyhedron,
    edges: &[EdgeId],
    delta: f64,
    opts: &RealizeOptions,
) -> Result<Probe, VolumeError> {
    let mut tracker = Tracker::new(lp, opts).map_err(VolumeError::Target)?;
    let base = tracker.target().clone();
    let mut schlafli = 0.0;
    for &e in edges {
        let l = base.edge_length(e).ok_or(VolumeError::Target(RealizeError::IdealEndpoint { a: 0, b: 0 }))?;
        schlafli -= 0.5 * l * delta;
    }
    let mut shifted = |sign: f64| -> Result<f64, VolumeError> {
        let mut angles = lp.angles();
        for &e in edges {
            angles[e] += sign * delta / 2.0;
        }
        let r = tracker
            .realize_angles(&angles)
            .map_err(|source| VolumeError::PathRealizationFailure { t: sign, source })?;
        direct_volume(&r, lp).ok_or(VolumeError::Target(RealizeError::IdealEndpoint { a: 0, b: 0 }))
    };
    let plus = shifted(1.0)?;
    let minus = shifted(-1.0)?;
    Ok(Probe {
        numeric: plus - minus,
        schlafli,
    })
}

/// Volume of a compact realization by cubature in the Klein model, where
/// the volume element is `(1 − |y|²)^{−2} dy`: a cone from the vertex
/// centroid over fan-triangulated faces. `None` if a vertex is ideal.
pub fn direct_volume(r: &Realization, lp: &LabeledPolyhedron) -> Option<f64> {
    if r.ideal.iter().any(|&i| i) {
        return None;
    }
    let p = lp.base();
    let klein: Vec<[f64; 3]> = r.vertices.iter().map(LorentzVector::klein).collect();
    let n = klein.len() as f64;
    let c: [f64; 3] = std::array::from_fn(|i| klein.iter().map(|y| y[i]).sum::<f64>() / n);
    let rule = Rule::new(16);
    let pts: Vec<(f64, f64)> = rule.points(0.0, 1.0).collect();
    let mut total = 0.0;
    for face in p.faces() {
        let cyc = &face.cycle;
        for i in 1..cyc.len() - 1 {
            total += tetra(&pts, c, klein[cyc[0]], klein[cyc[i]], klein[cyc[i + 1]]);
        }
    }
    Some(total)
}

fn tetra(pts: &[(f64, f64)], a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3]) -> f64 {
    let sub = |x: [f64; 3], y: [f64; 3]| -> [f64; 3] { std::array::from_fn(|i| x[i] - y[i]) };
    let (ba, cb, dc) = (sub(b, a), sub(c, b), sub(d, c));
    let (u1, u2, u3) = (ba, sub(c, a), sub(d, a));
    let det = u1[0] * (u2[1] * u3[2] - u2[2] * u3[1]) - u1[1] * (u2[0] * u3[2] - u2[2] * u3[0])
        + u1[2] * (u2[0] * u3[1] - u2[1] * u3[0]);
    let mut s = 0.0;
    for &(u, wu) in pts {
        for &(v, wv) in pts {
            for &(w, ww) in pts {
                let y: [f64; 3] = std::array::from_fn(|i| a[i] + u * (ba[i] + v * (cb[i] + w * dc[i])));
                let r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
                s += wu * wv * ww * u * u * v / ((1.0 - r2) * (1.0 - r2));
            }
        }
    }
    s * det.abs()
}

/// Area of the hyperbolic triangle with angles `angles`, integrated with
/// the two-dimensional Schläfli rule `dA = −Σ dθ` from the degenerate
/// triangle with the same angle ratios and angle sum π.
pub fn triangle_area_schlafli(angles: [f64; 3], tol: f64) -> f64 {
    let sum: f64 = angles.iter().sum();
    let start = angles.map(|a| a * PI / sum);
    let rate: f64 = angles.iter().zip(&start).map(|(a, s)| a - s).sum();
    let rule = Rule::new(8);
    adaptive(&rule, 0.0, 1.0, tol, 20, &mut |_t| Ok::<_, std::convert::Infallible>(-rate))
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::poly_model::labels_by_endpoints;

    fn three_edges(lp: &LabeledPolyhedron) -> Vec<EdgeId> {
        (0..lp.base().edge_count()).filter(|&e| lp.label(e) == 3).collect()
    }

    #[test]
    fn lambert_volume() {
        let lp = corpus::lambert_cube();
        let v = schlafli_volume(&lp, &DeformationPath::linear(&lp), 1e-8).unwrap();
        assert!((v.volume - 0.3244).abs() < 1e-3, "{v:?}");
        let d = orb_convention(v);
        assert!((d.volume - 0.648847).abs() < 2e-3, "{d:?}");
        assert_eq!(d.volume, 2.0 * v.volume);
        // independent cubature of the realized target
        let r = crate::realize(&lp, &RealizeOptions::default()).unwrap();
        let direct = direct_volume(&r, &lp).unwrap();
        assert!((direct - v.volume).abs() < 1e-6, "{direct} vs {}", v.volume);
    }

    #[test]
    fn zero_length_path_has_zero_volume() {
        let lp = corpus::lambert_cube();
        let start = DeformationPath::collapse_angles(&lp);
        let path = DeformationPath::from_points(vec![start.clone(), start]).unwrap();
        assert_eq!(schlafli_volume(&lp, &path, 1e-8).unwrap().volume, 0.0);
    }

    #[test]
    fn probe_signs() {
        let lp = corpus::lambert_cube();
        let threes = three_edges(&lp);
        let opts = RealizeOptions::default();
        let one = monotonicity_probe(&lp, &threes[..1], 1e-4, &opts).unwrap();
        assert!(one.numeric < 0.0 && one.schlafli < 0.0, "{one:?}");
        let all = monotonicity_probe(&lp, &threes, 1e-4, &opts).unwrap();
        assert!(((all.numeric - all.schlafli) / all.schlafli).abs() < 1e-4, "{all:?}");
        let zero = monotonicity_probe(&lp, &threes, 0.0, &opts).unwrap();
        assert_eq!((zero.numeric, zero.schlafli), (0.0, 0.0));
    }

    #[test]
    fn path_file_round_trip() {
        let lp = corpus::lambert_cube();
        let text = "# two stages\nwaypoint\nedge 0 1 2.5\nedge 5 6 2.4\nedge 3 7 2.3333333333333335\n";
        let path = DeformationPath::parse(text, &lp).unwrap();
        assert_eq!(path.segments(), 2);
        let by = labels_by_endpoints(&lp);
        assert_eq!(by.len(), 12);
        let e = lp.base().edge_between(0, 1).unwrap();
        assert!((path.points()[1][e] - PI / 2.5).abs() < 1e-15);
        assert!(DeformationPath::parse("edge 0 1 3\n", &lp).is_err());
        assert!(DeformationPath::parse("waypoint\nedge 0 2 3\n", &lp).is_err());
        assert!(DeformationPath::parse("waypoint\nedge 0 1 1.5\n", &lp).is_err());
    }

    #[test]
    fn prism_collapse_path_is_inadmissible() {
        let lp = corpus::triangular_prism();
        let err = schlafli_volume(&lp, &DeformationPath::linear(&lp), 1e-6).unwrap_err();
        assert!(matches!(err, VolumeError::InadmissiblePath { .. }), "{err}");
    }

    #[test]
    fn triangle_area() {
        for a in [[0.3, 0.5, 0.7], [PI / 3.0, PI / 5.0, PI / 7.0], [0.01, 0.02, 0.03]] {
            let want = PI - a.iter().sum::<f64>();
            assert!((triangle_area_schlafli(a, 1e-14) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn orb_doubling() {
        let v = VolumeResult {
            volume: 1.0149416,
            error_estimate: 1e-9,
            nodes: 3,
            doubled: false,
        };
        let d = orb_convention(v);
        assert_eq!(d.volume, 2.0298832);
        assert_eq!(orb_convention(d), d);
    }
}
