//! Gauss–Legendre rules and an adaptive composite integrator.

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A fixed rule mapped onto arbitrary intervals.
#[derive(Clone, Debug)]
pub struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Absolute abscissae on `[a, b]`.
    pub fn points(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<E>(&self, a: f64, b: f64, f: &mut impl FnMut(f64) -> Result<f64, E>) -> Result<f64, E> {
        let mut s = 0.0;
        for (x, w) in self.points(a, b) {
            s += w * f(x)?;
        }
        Ok(s)
    }
}

/// Result of [`adaptive`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub panels: usize,
}

/// Adaptive composite Gauss–Legendre: a panel is accepted when its value
/// agrees with the sum over its two halves to within its share of `tol`;
/// otherwise it is split. The reported error sums the accepted differences.
///
/// Panels are processed left to right, so `f` sees abscissae in roughly
/// increasing order.
pub fn adaptive<E>(
    rule: &Rule,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
    f: &mut impl FnMut(f64) -> Result<f64, E>,
) -> Result<Integral, E> {
    let mut evaluations = 0;
    let mut counted = |x: f64, f: &mut dyn FnMut(f64) -> Result<f64, E>| {
        evaluations += 1;
        f(x)
    };
    let mut ff = |x: f64| counted(x, f);
    let whole = rule.integrate(a, b, &mut ff)?;
    let mut stack = vec![(a, b, whole, 0usize)];
    let (mut value, mut error, mut panels) = (0.0, 0.0, 0);
    let span = b - a;
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &mut ff)?;
        let right = rule.integrate(mid, hi, &mut ff)?;
        let fine = left + right;
        let diff = (fine - coarse).abs();
        let share = tol * (hi - lo) / span;
        if diff <= share || depth >= max_depth {
            value += fine;
            error += diff;
            panels += 2;
        } else {
            // right first so the left half is processed next
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(Integral {
        value,
        error,
        evaluations,
        panels,
    })
}
