use std::f64::consts::PI;

use hypercox::corpus;
use hypercox::quadrature::Rule;
use hypercox::realization::RealizeOptions;
use hypercox::volume::{
    direct_volume, schlafli_volume, schlafli_volume_with, DeformationPath, PathSolver, VolumeOptions,
};

/// Composite Simpson on `[a, b]` with `n` (even) panels.
fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Upper half-space volume of the region over `[x0,x1]×[y0,y1]` above the
/// unit hemisphere, `∬ dx dy / (2(1 − x² − y²))`, inner integral closed form.
fn half_space_volume(x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    simpson(x0, x1, 4000, |x| {
        let a = (1.0 - x * x).sqrt();
        let prim = |y: f64| ((a + y) / (a - y)).ln() / (4.0 * a);
        prim(y1) - prim(y0)
    })
}

#[test]
fn pyramid_matches_half_space_integral() {
    let lp = corpus::pyramid();
    let p = lp.base();
    let base = (0..p.face_count()).find(|&f| p.face(f).cycle.len() == 4).unwrap();
    // sides in cyclic order; opposite sides bound the rectangle in x and y
    let s: Vec<f64> = p.face_edges(base).iter().map(|&e| PI / f64::from(lp.label(e))).collect();
    let oracle = half_space_volume(-s[2].cos(), s[0].cos(), -s[3].cos(), s[1].cos());
    assert!((oracle - 0.33233).abs() < 1e-4, "{oracle}");

    let v = schlafli_volume(&lp, &DeformationPath::linear(&lp), 1e-8).unwrap();
    assert!((v.volume - oracle).abs() < 1e-6, "{} vs {oracle}", v.volume);
    assert!((v.volume - oracle).abs() <= v.error_estimate.max(1e-7));
}

fn lambert_two_stage(lp: &hypercox::poly_model::LabeledPolyhedron) -> DeformationPath {
    let p = lp.base();
    let mut mid = DeformationPath::collapse_angles(lp);
    for ((a, b), angle) in [((0, 1), 2.0 * PI / 5.0), ((5, 6), 5.0 * PI / 12.0), ((3, 7), 3.0 * PI / 7.0)] {
        let e = p
            .edge_between(p.vertex_by_label(a).unwrap(), p.vertex_by_label(b).unwrap())
            .unwrap();
        mid[e] = angle;
    }
    DeformationPath::through(lp, vec![mid]).unwrap()
}

#[test]
fn lambert_volume_is_path_independent() {
    let lp = corpus::lambert_cube();
    let tol = 1e-8;
    // a smaller start keeps the omitted [0, ε] sliver below 10·tol
    let opts = VolumeOptions {
        tol,
        epsilon: 1e-6,
        ..VolumeOptions::default()
    };
    let linear = schlafli_volume_with(&lp, &DeformationPath::linear(&lp), &opts).unwrap();
    let staged = schlafli_volume_with(&lp, &lambert_two_stage(&lp), &opts).unwrap();
    let diff = (linear.volume - staged.volume).abs();
    assert!(diff < 10.0 * tol, "{} vs {}: {diff:e}", linear.volume, staged.volume);
}

#[test]
fn schlafli_rate_matches_direct_volume_difference() {
    let lp = corpus::lambert_cube();
    let opts = RealizeOptions {
        regime: hypercox::andreev::Regime::AllowIdeal,
        ..RealizeOptions::default()
    };
    let mut solver = PathSolver::new(&lp, DeformationPath::linear(&lp), &opts).unwrap();
    let h = 0.002;
    for t in [0.2, 0.35, 0.5, 0.65, 0.8] {
        let rate = solver.integrand(t).unwrap();
        let mut v = |dt: f64| direct_volume(&solver.realization_on(0, t + dt).unwrap(), &lp).unwrap();
        // five-point stencil
        let numeric = (v(-2.0 * h) - 8.0 * v(-h) + 8.0 * v(h) - v(2.0 * h)) / (12.0 * h);
        let rel = (numeric - rate).abs() / rate.abs();
        assert!(rel < 1e-6, "t={t}: {numeric} vs {rate} ({rel:e})");
        // and against the accumulated integral
        let (acc, _) = solver.integrate(t - 2e-4, t + 2e-4, 1e-14, 10).unwrap();
        let rel = (acc / 4e-4 - rate).abs() / rate.abs();
        assert!(rel < 1e-6, "t={t}: accumulated {rel:e}");
    }
}

#[test]
fn halving_panels_stays_within_error_estimate() {
    let lp = corpus::lambert_cube();
    let opts = VolumeOptions::default();
    let v = schlafli_volume_with(&lp, &DeformationPath::linear(&lp), &opts).unwrap();
    let mut solver = PathSolver::new(&lp, DeformationPath::linear(&lp), &opts.realize).unwrap();
    let rule = Rule::new(opts.order);
    // panels graded quadratically toward the collapsed end
    let composite = |solver: &mut PathSolver, panels: usize| {
        let (a, b) = (opts.epsilon, 1.0);
        let at = |i: usize| a + (b - a) * (i as f64 / panels as f64).powi(2);
        (0..panels)
            .map(|i| rule.integrate(at(i), at(i + 1), &mut |t| solver.integrand_on(0, t)).unwrap())
            .sum::<f64>()
    };
    let coarse = composite(&mut solver, 8);
    let fine = composite(&mut solver, 16);
    assert!((coarse - fine).abs() < v.error_estimate, "{:e} vs {:e}", (coarse - fine).abs(), v.error_estimate);
    assert!((fine - v.volume).abs() < v.error_estimate);
}

