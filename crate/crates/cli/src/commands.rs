use std::fmt::Write;
use std::path::Path;

use hypercox::andreev::{self, AndreevError, Outcome as Verdict, Regime};
use hypercox::census::{self, CensusError, CensusOptions, Convention};
use hypercox::circuits::enumerate_circuits;
use hypercox::corpus;
use hypercox::haken::{self, HakenWitness, Size, TwoOrbifold};
use hypercox::lobachevsky::{ideal_tetrahedron_volume, lob, Angle};
use hypercox::poly_model::{parse_polyhedron, validate, LabeledPolyhedron};
use hypercox::realization::{realize, RealizeError, RealizeOptions};
use hypercox::volume::{orb_convention, schlafli_volume_with, DeformationPath, VolumeError, VolumeOptions};

use crate::{Command, ConventionArg, Format, RegimeChoice};

pub const OK: u8 = 0;
pub const REJECTED: u8 = 1;
pub const INPUT: u8 = 2;
pub const SMALL: u8 = 3;
pub const NUMERICAL: u8 = 4;

pub struct Outcome {
    pub output: String,
    pub code: u8,
    pub error: Option<String>,
    /// Parser notes, printed to stderr.
    pub warnings: Vec<String>,
}

struct Run {
    name: &'static str,
    out: String,
    warnings: Vec<String>,
}

impl Run {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            out: String::new(),
            warnings: Vec::new(),
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.out += s.as_ref();
        self.out.push('\n');
    }

    fn finish(mut self, code: u8, verdict: &str, fields: &[(&str, String)]) -> Outcome {
        let mut summary = format!("RESULT {} {verdict}", self.name);
        for (k, v) in fields {
            let _ = write!(summary, " {k}={v}");
        }
        self.line(summary);
        Outcome {
            output: self.out,
            code,
            error: None,
            warnings: self.warnings,
        }
    }

    fn fail(self, code: u8, reason: &str, message: String) -> Outcome {
        let mut o = self.finish(code, "error", &[("reason", reason.to_string())]);
        o.error = Some(message);
        o
    }
}

/// `x` with `digits` significant digits.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Angles written as `pi/6`, `2pi/5`, `2*pi/5`, `π/3` or plain radians.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_lowercase().replace('π', "pi");
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| format!("cannot read angle {s:?}"));
    };
    let coef = t[..at].trim_end_matches('*').trim();
    let coef = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>().map_err(|_| format!("cannot read angle {s:?}"))?
    };
    let rest = t[at + 2..].trim();
    let div = match rest.strip_prefix('/') {
        Some(d) => d.trim().parse::<f64>().map_err(|_| format!("cannot read angle {s:?}"))?,
        None if rest.is_empty() => 1.0,
        None => return Err(format!("cannot read angle {s:?}")),
    };
    Ok(coef * std::f64::consts::PI / div)
}

/// Reads a polyhedron file; a missing path that names a bundled example
/// loads the bundled copy.
fn read_source(path: &Path) -> Result<String, String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) => {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            corpus::ALL
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, text)| text.to_string())
                .ok_or_else(|| format!("{}: {e}", path.display()))
        }
    }
}

fn load(run: &mut Run, path: &Path) -> Result<LabeledPolyhedron, (String, String)> {
    let text = read_source(path).map_err(|e| ("unreadable".to_string(), e))?;
    let parsed = parse_polyhedron(&text).map_err(|e| ("parse".to_string(), e.to_string()))?;
    run.warnings.extend(parsed.warnings.iter().cloned());
    let report = validate(parsed.polyhedron.base());
    if !report.passed() {
        run.out += &report.to_string();
        return Err(("invalid".to_string(), format!("{} violation(s)", report.violations.len())));
    }
    Ok(parsed.polyhedron)
}

macro_rules! load_or_fail {
    ($run:ident, $path:expr) => {
        match load(&mut $run, $path) {
            Ok(lp) => lp,
            Err((reason, message)) => return $run.fail(INPUT, &reason, message),
        }
    };
}

pub fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Validate { file } => cmd_validate(file),
        Command::Check { file, regime } => cmd_check(file, (*regime).into()),
        Command::Circuits {
            file,
            k,
            cap,
            prismatic_only,
        } => cmd_circuits(file, *k, *cap as usize, *prismatic_only),
        Command::Classify { file, cap } => cmd_classify(file, *cap as usize),
        Command::Realize {
            file,
            regime,
            residual,
            perturb,
        } => cmd_realize(
            file,
            &RealizeOptions {
                regime: (*regime).into(),
                residual_tol: *residual,
                perturbation: *perturb,
                ..RealizeOptions::default()
            },
        ),
        Command::Volume {
            file,
            doubled,
            tol,
            residual,
            path,
            epsilon,
        } => {
            let mut opts = VolumeOptions {
                tol: *tol,
                epsilon: *epsilon,
                ..VolumeOptions::default()
            };
            opts.realize.residual_tol = *residual;
            cmd_volume(file, *doubled, path, &opts)
        }
        Command::Census {
            file,
            max_label,
            regime,
            volumes,
            format,
            budget,
        } => {
            let opts = CensusOptions {
                budget: *budget,
                volumes: *volumes,
                ..CensusOptions::new(*max_label, (*regime).into())
            };
            cmd_census(file, &opts, *format)
        }
        Command::ThreeThrees { regime, volumes } => cmd_three_threes((*regime).into(), *volumes),
        Command::Lob { theta } => cmd_lob(theta),
        Command::Idealtet { a, b, c } => cmd_idealtet([a, b, c]),
        Command::PyramidTable {
            convention,
            regime,
            max_label,
        } => cmd_pyramid_table(*convention, *regime, *max_label),
    }
}

fn cmd_validate(file: &Path) -> Outcome {
    let mut run = Run::new("validate");
    let text = match read_source(file) {
        Ok(t) => t,
        Err(e) => return run.fail(INPUT, "unreadable", e),
    };
    let parsed = match parse_polyhedron(&text) {
        Ok(p) => p,
        Err(e) => return run.fail(INPUT, "parse", e.to_string()),
    };
    run.warnings.extend(parsed.warnings);
    let p = parsed.polyhedron.base();
    let report = validate(p);
    run.out += &report.to_string();
    let fields = [
        ("V", p.vertex_count().to_string()),
        ("E", p.edge_count().to_string()),
        ("F", p.face_count().to_string()),
        ("violations", report.violations.len().to_string()),
    ];
    if report.passed() {
        run.finish(OK, "valid", &fields)
    } else {
        run.finish(INPUT, "invalid", &fields)
    }
}

fn cmd_check(file: &Path, regime: Regime) -> Outcome {
    let mut run = Run::new("check");
    let lp = load_or_fail!(run, file);
    let p = lp.base();
    match andreev::check(&lp, regime) {
        Ok(report) => {
            run.out += &report.render(p);
            let mut fields = vec![
                ("regime", regime.name().to_string()),
                ("conditions", report.condition_summary()),
                ("vertices", andreev::vertex_summary(&report.vertex_types)),
            ];
            let failed: Vec<String> = report
                .conditions
                .iter()
                .filter(|c| c.failures().next().is_some() && c.status == andreev::ConditionStatus::Fail)
                .map(|c| c.id.to_string())
                .collect();
            if !failed.is_empty() {
                fields.push(("failed", failed.join(",")));
            }
            let code = if report.outcome.is_realizable() { OK } else { REJECTED };
            run.finish(code, report.outcome.name(), &fields)
        }
        Err(e @ AndreevError::FaceCountTooSmall { .. }) => {
            run.line(format!("verdict {}", Verdict::Rejected.name()));
            run.line(format!("reason {e}"));
            run.finish(REJECTED, Verdict::Rejected.name(), &[("reason", e.reason().to_string())])
        }
        Err(e) => run.fail(INPUT, e.reason(), e.to_string()),
    }
}

fn cmd_circuits(file: &Path, k: Option<usize>, cap: usize, prismatic_only: bool) -> Outcome {
    let mut run = Run::new("circuits");
    let lp = load_or_fail!(run, file);
    let p = lp.base();
    let lengths: Vec<usize> = match k {
        Some(k) => vec![k],
        None => (3..=cap.min(p.face_count())).collect(),
    };
    let mut fields = Vec::new();
    let (mut total, mut prismatic) = (0, 0);
    for k in lengths {
        let all = enumerate_circuits(p, k);
        let pk = all.iter().filter(|c| c.prismatic).count();
        for c in all.iter().filter(|c| c.prismatic || !prismatic_only) {
            run.line(c.display(p).to_string());
        }
        run.line(format!("count k={k} total={} prismatic={pk}", all.len()));
        total += all.len();
        prismatic += pk;
        if k <= 5 {
            fields.push((["", "", "", "prismatic3", "prismatic4", "prismatic5"][k], pk.to_string()));
        }
    }
    fields.insert(0, ("total", total.to_string()));
    fields.insert(1, ("prismatic", prismatic.to_string()));
    run.finish(OK, "ok", &fields)
}

fn cmd_classify(file: &Path, cap: usize) -> Outcome {
    let mut run = Run::new("classify");
    let lp = load_or_fail!(run, file);
    let p = lp.base();
    let verdict = haken::classify_with_cap(p, cap);
    run.out += &verdict.render(p);
    let mut fields = vec![("cap", cap.to_string())];
    match &verdict.witness {
        HakenWitness::Incompressible(orb) => {
            // recheck both sides independently of the search
            let sides = TwoOrbifold::both_sides(p, &orb.curve).expect("witness separates");
            for (i, side) in sides.iter().enumerate() {
                let compressions = haken::find_compressions(p, side).len();
                let form = haken::base_form(p, side).map_or("none".to_string(), |f| format!("{f:?}"));
                run.line(format!(
                    "side {} vertices={} compressions={compressions} trivial-form={form}",
                    i + 1,
                    side.disk_vertices.len()
                ));
            }
            fields.push(("witness", "incompressible".into()));
            fields.push(("k", orb.curve.len().to_string()));
            fields.push(("prismatic", orb.curve.prismatic.to_string()));
        }
        HakenWitness::SeparatingTriangle(c) => {
            fields.push(("witness", "separating-triangle".into()));
            fields.push(("k", c.len().to_string()));
        }
        HakenWitness::NoneFoundUpTo { .. } => fields.push(("witness", "none".into())),
    }
    let code = if verdict.size == Size::Large { OK } else { SMALL };
    run.finish(code, verdict.size.name(), &fields)
}

fn realize_error_code(e: &RealizeError) -> (u8, &'static str) {
    match e {
        RealizeError::NotRealizable { .. } => (REJECTED, "NotRealizable"),
        RealizeError::NoGaugeVertex => (NUMERICAL, "NoGaugeVertex"),
        RealizeError::NonConvergence { .. } => (NUMERICAL, "NonConvergence"),
        RealizeError::DegenerateVertex { .. } => (NUMERICAL, "DegenerateVertex"),
        RealizeError::NotConvex { .. } => (NUMERICAL, "NotConvex"),
        RealizeError::IdealEndpoint { .. } => (NUMERICAL, "IdealEndpoint"),
        RealizeError::Seed(_) => (NUMERICAL, "Seed"),
    }
}

fn cmd_realize(file: &Path, opts: &RealizeOptions) -> Outcome {
    let mut run = Run::new("realize");
    let lp = load_or_fail!(run, file);
    let p = lp.base();
    let r = match realize(&lp, opts) {
        Ok(r) => r,
        Err(e) => {
            let (code, reason) = realize_error_code(&e);
            return run.fail(code, reason, e.to_string());
        }
    };
    let names: Vec<&str> = r.gauge_faces.iter().map(|&f| p.face(f).name.as_str()).collect();
    run.line(format!("gauge vertex={} faces={}", p.vertex_label(r.gauge_vertex), names.join(",")));
    for (f, n) in r.normals.iter().enumerate() {
        run.line(format!("normal {} {n}", p.face(f).name));
    }
    for (v, x) in r.vertices.iter().enumerate() {
        let tag = if r.ideal[v] { " ideal" } else { "" };
        run.line(format!("vertex {} {x}{tag}", p.vertex_label(v)));
    }
    for (e, edge) in p.edges().iter().enumerate() {
        let (a, b) = (p.vertex_label(edge.a), p.vertex_label(edge.b));
        let len = r.edge_length(e).map_or("inf".to_string(), |l| format!("{l:.17e}"));
        run.line(format!("edge ({},{}) label={} length={len}", a.min(b), a.max(b), lp.label(e)));
    }
    run.line(format!("residual {:.3e}", r.residual));
    run.line(format!("dof {}", r.dof));
    run.line(format!("steps {}", r.steps));
    let ideal = r.ideal.iter().filter(|&&x| x).count();
    run.finish(
        OK,
        "ok",
        &[
            ("residual", format!("{:.3e}", r.residual)),
            ("defect", r.dof.defect().to_string()),
            ("ideal", ideal.to_string()),
        ],
    )
}

fn cmd_volume(file: &Path, doubled: bool, path_arg: &str, opts: &VolumeOptions) -> Outcome {
    let mut run = Run::new("volume");
    let lp = load_or_fail!(run, file);
    let path = if path_arg == "linear" {
        DeformationPath::linear(&lp)
    } else {
        let text = match std::fs::read_to_string(path_arg) {
            Ok(t) => t,
            Err(e) => return run.fail(INPUT, "unreadable", format!("{path_arg}: {e}")),
        };
        match DeformationPath::parse(&text, &lp) {
            Ok(p) => p,
            Err(e) => return run.fail(INPUT, "path", e.to_string()),
        }
    };
    let result = match schlafli_volume_with(&lp, &path, opts) {
        Ok(v) => v,
        Err(e) => {
            let (code, reason) = match &e {
                VolumeError::Target(t) => realize_error_code(t),
                VolumeError::PathRealizationFailure { .. } => (NUMERICAL, "PathRealizationFailure"),
                VolumeError::NonCollapsingStart { .. } => (NUMERICAL, "NonCollapsingStart"),
                VolumeError::IdealEdge { .. } => (INPUT, "IdealEdge"),
                VolumeError::InadmissiblePath { .. } => (INPUT, "InadmissiblePath"),
                VolumeError::Path(_) => (INPUT, "path"),
            };
            return run.fail(code, reason, e.to_string());
        }
    };
    let v = if doubled { orb_convention(result) } else { result };
    run.line(format!("volume {}", sig(v.volume, 15)));
    run.line(format!("error_estimate {:.3e}", v.error_estimate));
    run.line(format!("nodes {}", v.nodes));
    run.line(format!("convention {}", if v.doubled { "doubled" } else { "plain" }));
    run.finish(
        OK,
        "ok",
        &[
            ("volume", sig(v.volume, 15)),
            ("error", format!("{:.3e}", v.error_estimate)),
            ("nodes", v.nodes.to_string()),
            ("doubled", v.doubled.to_string()),
        ],
    )
}

fn cmd_census(file: &Path, opts: &CensusOptions, format: Format) -> Outcome {
    let mut run = Run::new("census");
    let lp = load_or_fail!(run, file);
    let p = lp.base();
    let rows = match census::enumerate_labelings_with(p, opts) {
        Ok(r) => r,
        Err(e) => {
            let reason = match e {
                CensusError::Budget { .. } => "budget",
                CensusError::MaxLabel(_) => "max-label",
                CensusError::Andreev(ref a) => a.reason(),
            };
            return run.fail(INPUT, reason, e.to_string());
        }
    };
    match format {
        Format::Tsv => run.out += &census::census_tsv(p, &rows),
        Format::Text => {
            for r in &rows {
                let labels: Vec<String> = p
                    .edges()
                    .iter()
                    .zip(&r.labels)
                    .map(|(e, l)| format!("({},{})={l}", p.vertex_label(e.a), p.vertex_label(e.b)))
                    .collect();
                let vol = r.volume.map_or(String::new(), |v| format!(" volume={}", sig(v, 10)));
                run.line(format!(
                    "row {} outcome={} vertices={} orbit={}{vol}",
                    labels.join(" "),
                    r.outcome.name(),
                    r.vertex_types,
                    r.orbit_size
                ));
            }
        }
    }
    let labelings: usize = rows.iter().map(|r| r.orbit_size).sum();
    run.finish(
        OK,
        "ok",
        &[
            ("max_label", opts.max_label.to_string()),
            ("regime", opts.regime.name().to_string()),
            ("orbits", rows.len().to_string()),
            ("labelings", labelings.to_string()),
        ],
    )
}

fn cmd_three_threes(regime: Regime, volumes: bool) -> Outcome {
    let mut run = Run::new("three-threes");
    let r = census::cube_three_threes(regime);
    let cube = corpus::cube_all2();
    let p = cube.base();
    let fmt_triple = |t: &[usize; 3]| {
        t.iter()
            .map(|&e| format!("({},{})", p.vertex_label(p.edge(e).a), p.vertex_label(p.edge(e).b)))
            .collect::<Vec<_>>()
            .join(",")
    };
    run.line(format!("candidates {}", r.candidates));
    run.line(format!("passing {}", r.passing.len()));
    run.line(format!("band-transversals {}", r.band_transversals.len()));
    run.line(format!("non-adjacent {}", r.non_adjacent.len()));
    let mut volumes_seen = Vec::new();
    for (i, o) in r.orbits.iter().enumerate() {
        let rep = &r.passing[o.members[0]];
        let mut line = format!(
            "orbit {} size={} stabilizer={} non-adjacent={} representative={}",
            i + 1,
            o.members.len(),
            o.stabilizer_order,
            o.non_adjacent,
            fmt_triple(rep)
        );
        if volumes {
            let mut labels = vec![2; p.edge_count()];
            for &e in rep {
                labels[e] = 3;
            }
            let lp = cube.with_labels(labels).expect("labels are valid");
            match schlafli_volume_with(&lp, &DeformationPath::linear(&lp), &VolumeOptions::default()) {
                Ok(v) => {
                    let _ = write!(line, " volume={}", sig(v.volume, 10));
                    volumes_seen.push(v.volume);
                }
                Err(e) => {
                    let _ = write!(line, " volume=error({e})");
                }
            }
        }
        run.line(line);
    }
    let agree = r.characterizations_agree();
    run.line(format!("passing-equals-transversals {agree}"));
    run.finish(
        OK,
        "ok",
        &[
            ("regime", regime.name().to_string()),
            ("candidates", r.candidates.to_string()),
            ("passing", r.passing.len().to_string()),
            ("orbits", r.orbits.len().to_string()),
            ("non_adjacent", r.non_adjacent.len().to_string()),
            ("agree", agree.to_string()),
        ],
    )
}

fn cmd_lob(theta: &str) -> Outcome {
    let mut run = Run::new("lob");
    let t = match parse_angle(theta) {
        Ok(t) => t,
        Err(e) => return run.fail(INPUT, "angle", e),
    };
    let v = lob(Angle(t));
    run.line(sig(v, 15));
    run.finish(OK, "ok", &[("theta", sig(t, 15)), ("value", sig(v, 15))])
}

fn cmd_idealtet(args: [&String; 3]) -> Outcome {
    let mut run = Run::new("idealtet");
    let mut angles = [0.0; 3];
    for (slot, a) in angles.iter_mut().zip(args) {
        match parse_angle(a) {
            Ok(t) => *slot = t,
            Err(e) => return run.fail(INPUT, "angle", e),
        }
    }
    match ideal_tetrahedron_volume(Angle(angles[0]), Angle(angles[1]), Angle(angles[2])) {
        Ok(v) => {
            run.line(sig(v, 15));
            run.finish(OK, "ok", &[("value", sig(v, 15))])
        }
        Err(e) => run.fail(INPUT, "angles", e.to_string()),
    }
}

fn cmd_pyramid_table(convention: ConventionArg, regime: RegimeChoice, max_label: u32) -> Outcome {
    let mut run = Run::new("pyramid-table");
    let conventions: &[Convention] = match convention {
        ConventionArg::Listed => &[Convention::ListedCyclic],
        ConventionArg::Any => &[Convention::AnyArrangement],
        ConventionArg::All => &[Convention::ListedCyclic, Convention::AnyArrangement],
    };
    let regimes: &[Regime] = match regime {
        RegimeChoice::Strict => &[Regime::StrictCompact],
        RegimeChoice::Ideal => &[Regime::AllowIdeal],
        RegimeChoice::All => &[Regime::StrictCompact, Regime::AllowIdeal],
    };
    let mut complete = Vec::new();
    let mut reports = 0;
    for &c in conventions {
        for &r in regimes {
            let report = census::pyramid_census(max_label, c, r);
            run.out += &report.render();
            if report.missing.is_empty() {
                complete.push(format!("{}/{}", c.name(), r.name()));
            }
            reports += 1;
        }
    }
    let complete = if complete.is_empty() {
        "none".to_string()
    } else {
        complete.join(",")
    };
    run.finish(
        OK,
        "ok",
        &[("reports", reports.to_string()), ("all_rows_admitted_under", complete)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        let pi = std::f64::consts::PI;
        assert_eq!(parse_angle("pi/6").unwrap(), pi / 6.0);
        assert_eq!(parse_angle("2pi/5").unwrap(), 2.0 * pi / 5.0);
        assert_eq!(parse_angle("2*pi/5").unwrap(), 2.0 * pi / 5.0);
        assert_eq!(parse_angle("π").unwrap(), pi);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("x").is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig(0.50747080320, 5), "0.50747");
        assert_eq!(sig(1.0149416, 3), "1.01");
        assert_eq!(sig(123.456, 4), "123.5");
        assert_eq!(sig(0.0, 15), "0");
    }
}
