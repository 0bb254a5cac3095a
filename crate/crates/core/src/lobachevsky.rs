//! The Lobachevsky function `Л(θ) = −∫₀^θ log|2 sin u| du` and the volume of
//! ideal tetrahedra.
//!
//! Evaluated through the Clausen function, `Л(θ) = Cl₂(2θ)/2`, with the
//! expansion
//!
//! ```text
//! Cl₂(x) = x − x·ln x + Σ_{k≥1} ζ(2k) / (k(2k+1)) · x · (x/2π)^{2k},   0 < x ≤ π
//! ```
//!
//! whose terms shrink at least fourfold per step on that range.

use std::f64::consts::PI;
use std::sync::OnceLock;

use thiserror::Error;

/// An angle in radians.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Angle(pub f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }
}

impl From<f64> for Angle {
    fn from(x: f64) -> Self {
        Angle(x)
    }
}

const TERMS: usize = 40;

/// ζ(2k) for k = 1..=TERMS.
fn zeta_even() -> &'static [f64; TERMS] {
    static TABLE: OnceLock<[f64; TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TERMS];
        t[0] = PI * PI / 6.0;
        for (k, slot) in t.iter_mut().enumerate().skip(1) {
            let s = 2 * (k as i32 + 1);
            // direct sum with an Euler–Maclaurin tail; s ≥ 4 so N = 64 is ample
            let n_max = 64.0_f64;
            let mut acc = 0.0;
            for n in (1..64).rev() {
                acc += f64::from(n).powi(-s);
            }
            let sf = f64::from(s);
            acc += n_max.powf(1.0 - sf) / (sf - 1.0) + 0.5 * n_max.powi(-s) + sf / 12.0 * n_max.powf(-sf - 1.0)
                - sf * (sf + 1.0) * (sf + 2.0) / 720.0 * n_max.powf(-sf - 3.0);
            *slot = acc;
        }
        t
    })
}

/// Clausen function Cl₂ on `[0, π]`.
fn clausen_0_pi(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let zeta = zeta_even();
    let r2 = (x / (2.0 * PI)).powi(2);
    let mut pow = r2;
    let mut series = 0.0;
    for (k, z) in zeta.iter().enumerate() {
        let k = (k + 1) as f64;
        let term = z / (k * (2.0 * k + 1.0)) * pow;
        series += term;
        if term < 1e-18 * series {
            break;
        }
        pow *= r2;
    }
    x - x * x.ln() + x * series
}

/// Lobachevsky function. Odd and π-periodic.
pub fn lob(theta: Angle) -> f64 {
    let t = theta.0;
    if !t.is_finite() {
        return f64::NAN;
    }
    // reduce to (−π/2, π/2]
    let mut r = t - PI * (t / PI).round();
    if r <= -PI / 2.0 {
        r += PI;
    }
    let half = 0.5 * clausen_0_pi(2.0 * r.abs());
    if r < 0.0 {
        -half
    } else {
        half
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum IdealTetError {
    #[error("angles must be non-negative, got {0}")]
    Negative(f64),
    #[error("angles must sum to π, got {sum}")]
    AngleSum { sum: f64 },
}

/// Volume of the ideal tetrahedron with dihedral angles `α, β, γ`
/// (`α + β + γ = π`): `Л(α) + Л(β) + Л(γ)`.
pub fn ideal_tetrahedron_volume(alpha: Angle, beta: Angle, gamma: Angle) -> Result<f64, IdealTetError> {
    for a in [alpha, beta, gamma] {
        if a.0 < 0.0 {
            return Err(IdealTetError::Negative(a.0));
        }
    }
    let sum = alpha.0 + beta.0 + gamma.0;
    if (sum - PI).abs() > 1e-12 {
        return Err(IdealTetError::AngleSum { sum });
    }
    let v = lob(alpha) + lob(beta) + lob(gamma);
    Ok(v.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_values() {
        assert_eq!(lob(Angle(0.0)), 0.0);
        assert!(lob(Angle(PI / 2.0)).abs() < 1e-15);
        // Л(π/4) = G/2 with Catalan's constant G
        assert!((lob(Angle(PI / 4.0)) - 0.915_965_594_177_219 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zeta_table() {
        let z = zeta_even();
        assert!((z[1] - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((z[2] - PI.powi(6) / 945.0).abs() < 1e-15);
        assert!((z[TERMS - 1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_tetrahedra_have_no_volume() {
        for x in [0.1, 0.7, 1.3, 2.9] {
            let v = ideal_tetrahedron_volume(Angle(0.0), Angle(x), Angle(PI - x)).unwrap();
            assert!(v.abs() < 1e-14, "{x}: {v}");
        }
    }

    #[test]
    fn rejects_bad_angles() {
        assert!(matches!(
            ideal_tetrahedron_volume(Angle(1.0), Angle(1.0), Angle(1.0)),
            Err(IdealTetError::AngleSum { .. })
        ));
        assert!(matches!(
            ideal_tetrahedron_volume(Angle(-0.1), Angle(1.0), Angle(PI - 0.9)),
            Err(IdealTetError::Negative(_))
        ));
    }
}
