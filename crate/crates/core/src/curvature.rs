//! Curvature `F_ij = ∂_i A_j − ∂_j A_i + [A_i, A_j]`, evaluated numerically
//! for any field and in closed form for the hedgehog, plus log–log fits of
//! asymptotic decay rates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{
    central_jacobian, connection_norm, fd_step, jacobian_norm, norm3, Connection,
    ConnectionField, ConnectionJacobian, RadialProfile,
};
use crate::error::{Error, Result};
use crate::fit::{fit_power_law, log_spaced, PowerLawFit};
use crate::su2::{commutator, eps, Su2, Vec3, CONTRACTION_SIGN_CORRECT, CONTRACTION_SIGN_FLIPPED};

/// Index pairs `(i, j)` with `i < j`, in storage order.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Antisymmetric curvature at a point, stored as `F_12, F_13, F_23`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureTensor {
    pub x: Vec3,
    pub upper: [Su2; 3],
}

impl CurvatureTensor {
    pub fn zero(x: Vec3) -> Self {
        CurvatureTensor {
            x,
            upper: [Su2::ZERO; 3],
        }
    }

    /// `F_ij` for any `i, j`.
    pub fn get(&self, i: usize, j: usize) -> Su2 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => Su2::ZERO,
            std::cmp::Ordering::Less => self.upper[pair_index(i, j)],
            std::cmp::Ordering::Greater => -self.upper[pair_index(j, i)],
        }
    }

    /// `sqrt(Σ_{i<j} Σ_b (F_ij^b)²)`.
    pub fn norm(&self) -> f64 {
        self.upper.iter().map(Su2::norm_sq).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &CurvatureTensor) -> f64 {
        (0..3)
            .map(|k| (self.upper[k] - other.upper[k]).norm_sq())
            .sum::<f64>()
            .sqrt()
    }

    pub fn from_jacobian(x: Vec3, a: &Connection, jac: &ConnectionJacobian) -> Self {
        let upper = PAIRS.map(|(i, j)| jac[i][j] - jac[j][i] + commutator(a[i], a[j]));
        CurvatureTensor { x, upper }
    }

    fn from_fn(x: Vec3, mut f: impl FnMut(usize, usize) -> Su2) -> Self {
        CurvatureTensor {
            x,
            upper: PAIRS.map(|(i, j)| f(i, j)),
        }
    }
}

fn pair_index(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 1) => 0,
        (0, 2) => 1,
        (1, 2) => 2,
        _ => unreachable!("not an upper pair: ({i}, {j})"),
    }
}

/// Curvature with central-difference derivatives of step `h`.
pub fn curvature_numeric<F: ConnectionField + ?Sized>(
    field: &F,
    x: Vec3,
    h: f64,
) -> Result<CurvatureTensor> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
    }
    let jac = central_jacobian(field, x, h);
    Ok(CurvatureTensor::from_jacobian(x, &field.eval(x), &jac))
}

/// The `[A_i, A_j]` part of the curvature alone.
pub fn commutator_part(x: Vec3, a: &Connection) -> CurvatureTensor {
    CurvatureTensor::from_fn(x, |i, j| commutator(a[i], a[j]))
}

/// The three closed-form pieces of the hedgehog curvature at `x`:
///
/// * `gradient`: `f′(r)(x̂_i ε_bjk x^k − x̂_j ε_bik x^k)`
/// * `linear`: `−2 f(r) ε_bij`
/// * `quadratic`: `f(r)² x^b ε_ijn x^n`, which is exactly `[A_i, A_j]`
#[derive(Debug, Clone, Copy)]
pub struct HedgehogCurvatureTerms {
    pub gradient: CurvatureTensor,
    pub linear: CurvatureTensor,
    pub quadratic: CurvatureTensor,
}

impl HedgehogCurvatureTerms {
    /// `gradient + linear + sign · quadratic`.
    pub fn combine(&self, quadratic_sign: f64) -> CurvatureTensor {
        CurvatureTensor::from_fn(self.gradient.x, |i, j| {
            let k = pair_index(i, j);
            self.gradient.upper[k] + self.linear.upper[k] + self.quadratic.upper[k] * quadratic_sign
        })
    }
}

pub fn hedgehog_curvature_terms(profile: &RadialProfile, x: Vec3) -> HedgehogCurvatureTerms {
    let r = norm3(&x);
    let f = profile.f(r);
    let radial = if r > 0.0 { profile.df(r) / r } else { 0.0 };
    // ε_bjk x^k as a vector in b.
    let cross = |j: usize| Su2([0, 1, 2].map(|b| (0..3).map(|k| eps(b, j, k) * x[k]).sum()));
    let gradient = CurvatureTensor::from_fn(x, |i, j| {
        (cross(j) * x[i] - cross(i) * x[j]) * radial
    });
    let linear = CurvatureTensor::from_fn(x, |i, j| Su2([0, 1, 2].map(|b| -2.0 * f * eps(b, i, j))));
    let quadratic = CurvatureTensor::from_fn(x, |i, j| {
        let s: f64 = (0..3).map(|n| eps(i, j, n) * x[n]).sum();
        Su2(x) * (f * f * s)
    });
    HedgehogCurvatureTerms {
        gradient,
        linear,
        quadratic,
    }
}

/// Closed-form hedgehog curvature.
///
/// The quadratic term enters with a plus sign: `ε_bcd A_i^c A_j^d =
/// +f² x^b ε_ijn x^n`. [`curvature_analytic_hedgehog_flipped`] keeps the
/// opposite sign for comparison.
pub fn curvature_analytic_hedgehog(profile: &RadialProfile, x: Vec3) -> CurvatureTensor {
    hedgehog_curvature_terms(profile, x).combine(CONTRACTION_SIGN_CORRECT)
}

/// The hedgehog curvature with the quadratic term subtracted, i.e. the
/// expression obtained from the contraction identity with a minus sign.
/// It disagrees with the definition at order `κ² r⁻⁴`.
pub fn curvature_analytic_hedgehog_flipped(
    profile: &RadialProfile,
    x: Vec3,
) -> CurvatureTensor {
    hedgehog_curvature_terms(profile, x).combine(CONTRACTION_SIGN_FLIPPED)
}

/// Which pointwise quantity a decay fit tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecayQuantity {
    /// `|A|`
    A,
    /// `|F_A|`, central differences
    F,
    /// `|∇A|`, central differences
    GradA,
    /// `|[A_i, A_j]|`, the commutator part of `F_A`
    AwedgeA,
}

impl DecayQuantity {
    pub const ALL: [DecayQuantity; 4] = [
        DecayQuantity::A,
        DecayQuantity::F,
        DecayQuantity::GradA,
        DecayQuantity::AwedgeA,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            DecayQuantity::A => "A",
            DecayQuantity::F => "F",
            DecayQuantity::GradA => "gradA",
            DecayQuantity::AwedgeA => "AwedgeA",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.label().eq_ignore_ascii_case(s))
    }

    pub fn evaluate<F: ConnectionField + ?Sized>(&self, field: &F, x: Vec3) -> f64 {
        let h = fd_step(norm3(&x));
        match self {
            DecayQuantity::A => connection_norm(&field.eval(x)),
            DecayQuantity::F => {
                let jac = central_jacobian(field, x, h);
                CurvatureTensor::from_jacobian(x, &field.eval(x), &jac).norm()
            }
            DecayQuantity::GradA => jacobian_norm(&central_jacobian(field, x, h)),
            DecayQuantity::AwedgeA => commutator_part(x, &field.eval(x)).norm(),
        }
    }
}

/// Fixed direction set for sphere maxima: the 26 neighbours of a cube
/// centre plus 50 seeded pseudorandom unit vectors.
pub fn sphere_directions() -> Vec<Vec3> {
    let mut dirs = Vec::with_capacity(76);
    for a in -1i32..=1 {
        for b in -1i32..=1 {
            for c in -1i32..=1 {
                if (a, b, c) == (0, 0, 0) {
                    continue;
                }
                let v = [a as f64, b as f64, c as f64];
                let n = norm3(&v);
                dirs.push(v.map(|t| t / n));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1e5);
    while dirs.len() < 76 {
        let v = [0, 1, 2].map(|_| rng.gen_range(-1.0..1.0));
        let n = norm3(&v);
        if n > 1e-3 && n <= 1.0 {
            dirs.push(v.map(|t| t / n));
        }
    }
    dirs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub quantity: DecayQuantity,
    pub fit: PowerLawFit,
    pub radii: Vec<f64>,
    pub maxima: Vec<f64>,
}

/// Fit `log max_{|x|=r} q(x)` against `log r` on `samples` log-spaced radii.
pub fn decay_exponent_fit<F: ConnectionField + ?Sized>(
    field: &F,
    quantity: DecayQuantity,
    r_min: f64,
    r_max: f64,
    samples: usize,
) -> Result<DecayFit> {
    if !(r_min >= 1.0) {
        return Err(Error::InvalidInput(format!("r_min must be >= 1, got {r_min}")));
    }
    if !(r_max > 2.0 * r_min) {
        return Err(Error::InvalidInput(format!(
            "r_max must exceed 2 r_min, got [{r_min}, {r_max}]"
        )));
    }
    if samples < 8 {
        return Err(Error::InvalidInput(format!("need at least 8 radii, got {samples}")));
    }
    let dirs = sphere_directions();
    let radii = log_spaced(r_min, r_max, samples);
    let maxima: Vec<f64> = radii
        .par_iter()
        .map(|&r| {
            dirs.iter()
                .map(|d| quantity.evaluate(field, d.map(|t| t * r)))
                .fold(0.0f64, f64::max)
        })
        .collect();
    let fit = fit_power_law(&radii, &maxima).map_err(|e| match e {
        Error::DegenerateFit(msg) => {
            Error::DegenerateFit(format!("{} of {}: {msg}", quantity.label(), field.name()))
        }
        other => other,
    })?;
    Ok(DecayFit {
        quantity,
        fit,
        radii,
        maxima,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{hedgehog, Flat};
    use approx::assert_abs_diff_eq;

    #[test]
    fn antisymmetric_reconstruction() {
        let t = CurvatureTensor {
            x: [0.0; 3],
            upper: [Su2::new(1.0, 2.0, 3.0), Su2::new(4.0, 5.0, 6.0), Su2::new(7.0, 8.0, 9.0)],
        };
        for i in 0..3 {
            assert_eq!(t.get(i, i), Su2::ZERO);
            for j in 0..3 {
                assert_eq!(t.get(i, j), -t.get(j, i));
            }
        }
        assert_abs_diff_eq!(t.norm(), (1..=9).map(|k| (k * k) as f64).sum::<f64>().sqrt());
    }

    #[test]
    fn flat_field_has_zero_curvature() {
        let c = curvature_numeric(&Flat, [1.0, 2.0, 3.0], 1e-3).unwrap();
        assert_eq!(c.norm(), 0.0);
        assert!(curvature_numeric(&Flat, [0.0; 3], 0.0).is_err());
        assert!(curvature_numeric(&Flat, [0.0; 3], -1.0).is_err());
    }

    #[test]
    fn trivial_profile_has_zero_closed_form() {
        assert_eq!(curvature_analytic_hedgehog(&RadialProfile::Trivial, [1.0, 1.0, 1.0]).norm(), 0.0);
    }

    #[test]
    fn closed_form_matches_exact_jacobian() {
        let p = RadialProfile::critical(1.7);
        let h = hedgehog(p).unwrap();
        for x in [[0.3, 0.1, -0.4], [2.0, -3.0, 1.0], [40.0, 7.0, 13.0], [0.0; 3]] {
            let via_jac = h.curvature(x);
            let closed = curvature_analytic_hedgehog(&p, x);
            assert!(via_jac.distance(&closed) <= 1e-14 * (1.0 + via_jac.norm()), "{x:?}");
            // The quadratic term really is the commutator.
            let q = hedgehog_curvature_terms(&p, x).quadratic;
            assert!(q.distance(&commutator_part(x, &h.eval(x))) < 1e-15);
        }
    }

    #[test]
    fn flipped_sign_differs_by_twice_the_commutator() {
        let p = RadialProfile::critical(1.0);
        let x = [3.0, -1.0, 2.0];
        let d = curvature_analytic_hedgehog(&p, x).distance(&curvature_analytic_hedgehog_flipped(&p, x));
        let h = hedgehog(p).unwrap();
        assert_abs_diff_eq!(d, 2.0 * commutator_part(x, &h.eval(x)).norm(), epsilon = 1e-15);
        assert!(d > 0.0);
    }

    /// Term-by-term evaluation at `x = (R, 0, 0)` for the pure tail
    /// `f = κ r⁻³`, `f′ = −3κ r⁻⁴`:
    /// gradient term `F_12^3 = −f′R = 3κR⁻³`, `F_13^2 = f′R = −3κR⁻³`;
    /// linear term `F_23^1 = −2κR⁻³` (and `F_12^3 = −2κR⁻³`, `F_13^2 = 2κR⁻³`);
    /// quadratic term `F_23^1 = f²R² = κ²R⁻⁴`.
    #[test]
    fn term_magnitudes_on_the_x_axis() {
        let p = RadialProfile::pure_tail(1.0);
        for r in [10.0, 100.0] {
            let t = hedgehog_curvature_terms(&p, [r, 0.0, 0.0]);
            let r3 = r.powi(-3);
            assert_abs_diff_eq!(t.gradient.get(0, 1).0[2], 3.0 * r3, epsilon = 1e-15 * r3);
            assert_abs_diff_eq!(t.gradient.get(0, 2).0[1], -3.0 * r3, epsilon = 1e-15 * r3);
            assert_abs_diff_eq!(t.gradient.norm(), 3.0 * 2f64.sqrt() * r3, epsilon = 1e-14 * r3);
            assert_abs_diff_eq!(t.linear.norm(), 2.0 * 3f64.sqrt() * r3, epsilon = 1e-14 * r3);
            assert_abs_diff_eq!(t.linear.get(1, 2).0[0], -2.0 * r3, epsilon = 1e-15 * r3);
            assert_abs_diff_eq!(t.quadratic.norm(), r.powi(-4), epsilon = 1e-15 * r.powi(-4));
            assert_abs_diff_eq!(t.quadratic.get(1, 2).0[0], r.powi(-4), epsilon = 1e-15 * r.powi(-4));
        }
    }

    #[test]
    fn sphere_directions_are_unit_and_deterministic() {
        let a = sphere_directions();
        assert_eq!(a.len(), 76);
        for d in &a {
            assert_abs_diff_eq!(norm3(d), 1.0, epsilon = 1e-15);
        }
        assert_eq!(a, sphere_directions());
    }

    #[test]
    fn fit_preconditions() {
        let h = hedgehog(RadialProfile::critical(1.0)).unwrap();
        assert!(decay_exponent_fit(&h, DecayQuantity::A, 0.5, 10.0, 8).is_err());
        assert!(decay_exponent_fit(&h, DecayQuantity::A, 10.0, 15.0, 8).is_err());
        assert!(decay_exponent_fit(&h, DecayQuantity::A, 10.0, 100.0, 4).is_err());
        assert!(matches!(
            decay_exponent_fit(&Flat, DecayQuantity::F, 10.0, 100.0, 8),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn quantity_labels_round_trip() {
        for q in DecayQuantity::ALL {
            assert_eq!(DecayQuantity::parse(q.label()), Some(q));
        }
        assert_eq!(DecayQuantity::parse("nope"), None);
    }
}
