//! Browser bindings: Andreev checks, Schläfli volumes and the Lobachevsky
//! function. Each export wraps a plain function so the logic also runs
//! (and is tested) natively.

use std::f64::consts::PI;

use hypercox::andreev::{self, Regime};
use hypercox::corpus;
use hypercox::lobachevsky::{lob, Angle};
use hypercox::poly_model::{parse_polyhedron, validate, LabeledPolyhedron};
use hypercox::volume::{schlafli_volume, DeformationPath};
use wasm_bindgen::prelude::*;

const VOLUME_TOL: f64 = 1e-8;

fn load(text: &str) -> Result<LabeledPolyhedron, String> {
    let lp = parse_polyhedron(text).map_err(|e| e.to_string())?.polyhedron;
    let report = validate(lp.base());
    if !report.passed() {
        return Err(format!("not a valid polyhedron: {report:?}"));
    }
    Ok(lp)
}

pub fn check_text(text: &str, allow_ideal: bool) -> Result<String, String> {
    let lp = load(text)?;
    let regime = if allow_ideal { Regime::AllowIdeal } else { Regime::StrictCompact };
    let report = andreev::check(&lp, regime).map_err(|e| e.to_string())?;
    Ok(format!("{}verdict {}\n", report.render(lp.base()), report.outcome.name()))
}

pub fn volume_of(lp: &LabeledPolyhedron) -> Result<f64, String> {
    let v = schlafli_volume(lp, &DeformationPath::linear(lp), VOLUME_TOL).map_err(|e| e.to_string())?;
    Ok(v.volume)
}

/// The cube with labels `a`, `b`, `c` on three pairwise non-adjacent edges.
pub fn lambert_family(a: u32, b: u32, c: u32) -> Result<LabeledPolyhedron, String> {
    let cube = corpus::lambert_cube();
    let p = cube.base();
    let mut labels = cube.labels().to_vec();
    for ((u, v), n) in [((0, 1), a), ((5, 6), b), ((3, 7), c)] {
        let e = p
            .edge_between(p.vertex_by_label(u).unwrap(), p.vertex_by_label(v).unwrap())
            .unwrap();
        labels[e] = n;
    }
    cube.with_labels(labels).map_err(|e| e.to_string())
}

/// `[θ₀, Л(θ₀), θ₁, Л(θ₁), …]` over `[0, π]`.
#[wasm_bindgen]
pub fn lobachevsky_curve(samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    (0..n)
        .flat_map(|i| {
            let t = PI * i as f64 / (n - 1) as f64;
            [t, lob(Angle(t))]
        })
        .collect()
}

#[wasm_bindgen]
pub fn lobachevsky(theta: f64) -> f64 {
    lob(Angle(theta))
}

#[wasm_bindgen]
pub fn check(text: &str, allow_ideal: bool) -> Result<String, JsError> {
    check_text(text, allow_ideal).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn volume(text: &str) -> Result<f64, JsError> {
    load(text).and_then(|lp| volume_of(&lp)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn lambert_volume(a: u32, b: u32, c: u32) -> Result<f64, JsError> {
    lambert_family(a, b, c).and_then(|lp| volume_of(&lp)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn corpus_names() -> Vec<String> {
    corpus::ALL.iter().map(|(name, _)| name.to_string()).collect()
}

#[wasm_bindgen]
pub fn corpus_text(name: &str) -> String {
    corpus::ALL
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambert_family_matches_corpus() {
        let v = volume_of(&lambert_family(3, 3, 3).unwrap()).unwrap();
        assert!((2.0 * v - 0.648847).abs() < 2e-3);
        // larger labels mean smaller angles, so more volume
        let w = volume_of(&lambert_family(3, 4, 5).unwrap()).unwrap();
        assert!(w > v);
    }

    #[test]
    fn check_renders_verdict() {
        let out = check_text(&corpus_text("cube_all2.apoly"), false).unwrap();
        assert!(out.ends_with("verdict rejected\n"), "{out}");
        assert!(check_text("garbage", false).is_err());
    }

    #[test]
    fn curve_has_pairs() {
        let c = lobachevsky_curve(7);
        assert_eq!(c.len(), 14);
        assert_eq!(c[0], 0.0);
        assert!((c[13]).abs() < 1e-12);
        assert!((c[3] - lobachevsky(PI / 6.0)).abs() < 1e-15);
    }
}
