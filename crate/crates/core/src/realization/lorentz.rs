//! Vectors in R^{3,1} with the form `⟨x,y⟩ = −x0·y0 + x1·y1 + x2·y2 + x3·y3`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LorentzVector(pub [f64; 4]);

impl LorentzVector {
    pub const ORIGIN: LorentzVector = LorentzVector([1.0, 0.0, 0.0, 0.0]);

    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self([x0, x1, x2, x3])
    }

    /// The point of H³ (or its boundary, when `|y| = 1`) with Klein
    /// coordinates `y`, scaled to `x0 = 1`.
    pub fn from_klein(y: [f64; 3]) -> Self {
        Self([1.0, y[0], y[1], y[2]])
    }

    pub fn dot(&self, o: &Self) -> f64 {
        let (a, b) = (self.0, o.0);
        -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `J·x` with `J = diag(−1, 1, 1, 1)`, the gradient of `⟨x, ·⟩`.
    pub fn flip_time(&self) -> Self {
        let a = self.0;
        Self([-a[0], a[1], a[2], a[3]])
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// Klein coordinates `x⃗ / x0`.
    pub fn klein(&self) -> [f64; 3] {
        let a = self.0;
        [a[1] / a[0], a[2] / a[0], a[3] / a[0]]
    }

    /// A vector Lorentz-orthogonal to `a`, `b` and `c`: `J` applied to the
    /// Euclidean generalized cross product.
    pub fn orthogonal_to(a: &Self, b: &Self, c: &Self) -> Self {
        let m = [a.0, b.0, c.0];
        let minor = |skip: usize| {
            let cols: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
            let g = |r: usize, k: usize| m[r][cols[k]];
            g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
        };
        let w = [-minor(0), minor(1), -minor(2), minor(3)];
        Self(w).flip_time()
    }

    /// Hyperbolic distance between two points on the unit hyperboloid,
    /// accurate for nearby points.
    pub fn distance(&self, o: &Self) -> f64 {
        let d = *self - *o;
        2.0 * (d.norm_sq().max(0.0).sqrt() / 2.0).asinh()
    }
}

impl Add for LorentzVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for LorentzVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for LorentzVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|x| -x))
    }
}

impl Mul<LorentzVector> for f64 {
    type Output = LorentzVector;
    fn mul(self, v: LorentzVector) -> LorentzVector {
        LorentzVector(v.0.map(|x| self * x))
    }
}

impl Index<usize> for LorentzVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for LorentzVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.0;
        write!(f, "{:.17e} {:.17e} {:.17e} {:.17e}", a[0], a[1], a[2], a[3])
    }
}
