//! Exact linear algebra for su(2) and SU(2).
//!
//! Algebra elements are stored as real coefficients in the basis
//! `τ_a = -(i/2) σ_a`, which satisfies `[τ_a, τ_b] = ε_abc τ_c`. With this
//! basis the commutator is the cross product of coefficient vectors.
//!
//! Group elements (and their derivatives) live in the real span of SU(2),
//! i.e. 2×2 complex matrices of the form `[[a, b], [-b̄, ā]]`. That set is
//! closed under products, sums and adjoints, so one compact type covers
//! group elements, algebra elements in matrix form and tangent vectors.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];
/// A ℂ² value.
pub type Spinor = [Complex64; 2];

/// Below this coefficient norm `exponential` switches to its Taylor series.
pub const SMALL_ANGLE: f64 = 1e-6;

/// Sign of the right-hand side for which the Levi–Civita contraction
/// `ε_bcd ε_cim ε_djn x^m x^n = s · x^b ε_ijn x^n` actually holds.
pub const CONTRACTION_SIGN_CORRECT: f64 = 1.0;
/// The opposite sign, kept to measure what using it would change.
pub const CONTRACTION_SIGN_FLIPPED: f64 = -1.0;

/// An su(2) element `Σ_a c^a τ_a`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Su2(pub [f64; 3]);

impl Su2 {
    pub const ZERO: Su2 = Su2([0.0; 3]);

    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Su2([c1, c2, c3])
    }

    pub fn basis(a: usize) -> Self {
        let mut c = [0.0; 3];
        c[a] = 1.0;
        Su2(c)
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    /// Euclidean norm of the coefficients.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dot(&self, other: &Su2) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn commutator(&self, other: &Su2) -> Su2 {
        commutator(*self, *other)
    }

    pub fn to_matrix(&self) -> Su2Matrix {
        let [c1, c2, c3] = self.0;
        Su2Matrix {
            a: Complex64::new(0.0, -0.5 * c3),
            b: Complex64::new(-0.5 * c2, -0.5 * c1),
        }
    }

    pub fn exp(&self) -> Su2Matrix {
        exponential(*self)
    }

    /// Apply the matrix `Σ c^a τ_a` to a spinor.
    pub fn apply(&self, v: &Spinor) -> Spinor {
        self.to_matrix().apply(v)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Add for Su2 {
    type Output = Su2;
    fn add(self, o: Su2) -> Su2 {
        Su2([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Su2 {
    type Output = Su2;
    fn sub(self, o: Su2) -> Su2 {
        Su2([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Su2 {
    type Output = Su2;
    fn neg(self) -> Su2 {
        Su2([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for Su2 {
    type Output = Su2;
    fn mul(self, s: f64) -> Su2 {
        Su2([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl AddAssign for Su2 {
    fn add_assign(&mut self, o: Su2) {
        *self = *self + o;
    }
}

impl SubAssign for Su2 {
    fn sub_assign(&mut self, o: Su2) {
        *self = *self - o;
    }
}

/// `[x, y]` in coefficients: `z^c = Σ ε_abc x^a y^b`.
pub fn commutator(x: Su2, y: Su2) -> Su2 {
    let [a1, a2, a3] = x.0;
    let [b1, b2, b3] = y.0;
    Su2([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
}

/// Levi–Civita symbol on 1-based indices.
pub fn levi_civita(a: usize, b: usize, c: usize) -> Result<i32> {
    for idx in [a, b, c] {
        if !(1..=3).contains(&idx) {
            return Err(Error::InvalidInput(format!(
                "Levi-Civita index {idx} outside 1..=3"
            )));
        }
    }
    Ok(eps(a - 1, b - 1, c - 1) as i32)
}

/// Levi–Civita symbol on 0-based indices, as a float for contractions.
#[inline]
pub(crate) fn eps(a: usize, b: usize, c: usize) -> f64 {
    if a == b || b == c || a == c {
        return 0.0;
    }
    // (0,1,2) and its cyclic shifts are even.
    if (b + 3 - a) % 3 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Max over `b, i, j` of `|Σ_{c,d,m,n} ε_bcd ε_cim ε_djn x^m x^n − s·x^b Σ_n ε_ijn x^n|`
/// by exhaustive index summation.
pub fn contraction_identity_residual(x: Vec3, rhs_sign: f64) -> f64 {
    let mut worst = 0.0f64;
    for b in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let mut lhs = 0.0;
                for c in 0..3 {
                    for d in 0..3 {
                        let e_bcd = eps(b, c, d);
                        if e_bcd == 0.0 {
                            continue;
                        }
                        for m in 0..3 {
                            for n in 0..3 {
                                lhs += e_bcd * eps(c, i, m) * eps(d, j, n) * x[m] * x[n];
                            }
                        }
                    }
                }
                let rhs: f64 = (0..3).map(|n| eps(i, j, n) * x[n]).sum::<f64>() * x[b];
                worst = worst.max((lhs - rhs_sign * rhs).abs());
            }
        }
    }
    worst
}

/// Residual of the contraction identity written with a minus sign,
/// `... = −x^b ε_ijn x^n`.
///
/// This is not zero: the identity holds with a plus sign. See
/// [`contraction_identity_residual`] with [`CONTRACTION_SIGN_CORRECT`].
pub fn contraction_identity_check(x: Vec3) -> f64 {
    contraction_identity_residual(x, CONTRACTION_SIGN_FLIPPED)
}

/// `exp(Σ c^a τ_a) = cos(|c|/2) Id + sin(|c|/2)/(|c|/2) Σ c^a τ_a`.
pub fn exponential(x: Su2) -> Su2Matrix {
    let theta = x.norm();
    let half = 0.5 * theta;
    let sinc = if theta < SMALL_ANGLE {
        let h2 = half * half;
        1.0 - h2 / 6.0 + h2 * h2 / 120.0
    } else {
        half.sin() / half
    };
    let m = x.to_matrix();
    Su2Matrix {
        a: Complex64::new(half.cos(), 0.0) + m.a * sinc,
        b: m.b * sinc,
    }
}

/// A 2×2 complex matrix `[[a, b], [-b̄, ā]]`: a real multiple of an SU(2)
/// element, or more generally any element of the real span of SU(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Matrix {
    pub a: Complex64,
    pub b: Complex64,
}

/// SU(2) group elements use the same representation.
pub type GroupElement = Su2Matrix;

impl Default for Su2Matrix {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Su2Matrix {
    pub const IDENTITY: Su2Matrix = Su2Matrix {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
    };
    pub const ZERO: Su2Matrix = Su2Matrix {
        a: Complex64::new(0.0, 0.0),
        b: Complex64::new(0.0, 0.0),
    };

    /// Entries in row-major order.
    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        [[self.a, self.b], [-self.b.conj(), self.a.conj()]]
    }

    pub fn adjoint(&self) -> Su2Matrix {
        Su2Matrix {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// `|a|² + |b|²`; equals 1 on SU(2).
    pub fn det(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn re_trace(&self) -> f64 {
        2.0 * self.a.re
    }

    /// Frobenius distance of `U*U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        // U*U = det · Id for this representation.
        std::f64::consts::SQRT_2 * (self.det() - 1.0).abs()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn scale(&self, s: f64) -> Su2Matrix {
        Su2Matrix {
            a: self.a * s,
            b: self.b * s,
        }
    }

    /// Rescale to unit determinant.
    pub fn normalized(&self) -> Su2Matrix {
        self.scale(1.0 / self.det().sqrt())
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        [
            self.a * v[0] + self.b * v[1],
            -self.b.conj() * v[0] + self.a.conj() * v[1],
        ]
    }

    /// Traceless skew-Hermitian part, as su(2) coefficients.
    pub fn algebra_part(&self) -> Su2 {
        Su2([-2.0 * self.b.im, -2.0 * self.b.re, -2.0 * self.a.im])
    }

    /// Principal logarithm of a unitary element.
    pub fn log(&self) -> Su2 {
        let alg = self.algebra_part();
        let s = alg.norm();
        if s == 0.0 {
            return Su2::ZERO;
        }
        // alg = 2 sin(θ/2) n̂ and Re a = cos(θ/2).
        let theta = 2.0 * (0.5 * s).atan2(self.a.re);
        alg * (theta / s)
    }

    /// `U^ω = exp(ω log U)`.
    pub fn powf(&self, omega: f64) -> Su2Matrix {
        exponential(self.log() * omega)
    }

    pub fn frobenius_distance(&self, other: &Su2Matrix) -> f64 {
        // Both rows carry the same moduli.
        (2.0 * ((self.a - other.a).norm_sqr() + (self.b - other.b).norm_sqr())).sqrt()
    }
}

impl Mul for Su2Matrix {
    type Output = Su2Matrix;
    fn mul(self, o: Su2Matrix) -> Su2Matrix {
        Su2Matrix {
            a: self.a * o.a - self.b * o.b.conj(),
            b: self.a * o.b + self.b * o.a.conj(),
        }
    }
}

impl Add for Su2Matrix {
    type Output = Su2Matrix;
    fn add(self, o: Su2Matrix) -> Su2Matrix {
        Su2Matrix {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
}

impl Sub for Su2Matrix {
    type Output = Su2Matrix;
    fn sub(self, o: Su2Matrix) -> Su2Matrix {
        Su2Matrix {
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }
}

impl AddAssign for Su2Matrix {
    fn add_assign(&mut self, o: Su2Matrix) {
        self.a += o.a;
        self.b += o.b;
    }
}

/// `g X g⁻¹` for unitary `g`, in coefficients.
pub fn conjugate(g: &Su2Matrix, x: Su2) -> Su2 {
    (*g * x.to_matrix() * g.adjoint()).algebra_part()
}

pub fn spinor_norm_sq(v: &Spinor) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}

pub fn spinor_add(u: &Spinor, v: &Spinor) -> Spinor {
    [u[0] + v[0], u[1] + v[1]]
}

pub fn spinor_sub(u: &Spinor, v: &Spinor) -> Spinor {
    [u[0] - v[0], u[1] - v[1]]
}

pub fn spinor_scale(v: &Spinor, s: f64) -> Spinor {
    [v[0] * s, v[1] * s]
}

/// `⟨u, v⟩ = u† v`.
pub fn spinor_inner(u: &Spinor, v: &Spinor) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn commutator_of_basis_elements() {
        let z = commutator(Su2::new(1.0, 0.0, 0.0), Su2::new(0.0, 1.0, 0.0));
        assert_eq!(z, Su2::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn levi_civita_values_and_errors() {
        assert_eq!(levi_civita(1, 2, 3).unwrap(), 1);
        assert_eq!(levi_civita(3, 2, 1).unwrap(), -1);
        assert_eq!(levi_civita(1, 1, 3).unwrap(), 0);
        assert_eq!(levi_civita(2, 3, 1).unwrap(), 1);
        assert!(levi_civita(0, 1, 2).is_err());
        assert!(levi_civita(1, 2, 4).is_err());
    }

    #[test]
    fn contraction_at_origin_vanishes() {
        assert_eq!(contraction_identity_check([0.0; 3]), 0.0);
    }

    #[test]
    fn exponential_of_zero_is_identity() {
        assert_eq!(exponential(Su2::ZERO), Su2Matrix::IDENTITY);
    }

    #[test]
    fn small_angle_branch_is_continuous() {
        for t in [0.5e-6, 0.999e-6, 1.001e-6, 2e-6] {
            let x = Su2::new(t, -0.3 * t, 0.2 * t);
            let half = 0.5 * x.norm();
            let m = x.to_matrix();
            let direct = Su2Matrix {
                a: Complex64::new(half.cos(), 0.0) + m.a * (half.sin() / half),
                b: m.b * (half.sin() / half),
            };
            assert!(x.exp().frobenius_distance(&direct) < 1e-15);
            assert!(x.exp().is_unitary(1e-14));
        }
    }

    #[test]
    fn log_inverts_exp() {
        let x = Su2::new(0.4, -1.3, 2.2);
        let back = x.exp().log();
        assert_abs_diff_eq!((back - x).norm(), 0.0, epsilon = 1e-13);
        let half = x.exp().powf(0.5);
        assert!((half * half).frobenius_distance(&x.exp()) < 1e-13);
    }

    #[test]
    fn conjugation_preserves_norm() {
        let g = Su2::new(0.3, 1.0, -0.7).exp();
        let x = Su2::new(1.5, -0.2, 0.9);
        assert_abs_diff_eq!(conjugate(&g, x).norm(), x.norm(), epsilon = 1e-14);
    }

    fn su2_strategy() -> impl Strategy<Value = Su2> {
        prop::array::uniform3(-5.0f64..5.0).prop_map(Su2)
    }

    proptest! {
        #[test]
        fn commutator_is_antisymmetric(x in su2_strategy(), y in su2_strategy()) {
            let s = commutator(x, y) + commutator(y, x);
            prop_assert!(s.norm() == 0.0);
        }

        #[test]
        fn commutator_obeys_cross_product_bound(x in su2_strategy(), y in su2_strategy()) {
            prop_assert!(commutator(x, y).norm() <= x.norm() * y.norm() * (1.0 + 1e-14) + 1e-300);
        }

        #[test]
        fn matrix_form_round_trips(x in su2_strategy()) {
            prop_assert!((x.to_matrix().algebra_part() - x).norm() < 1e-15);
        }

        #[test]
        fn matrix_product_is_associative(x in su2_strategy(), y in su2_strategy(), z in su2_strategy()) {
            let (a, b, c) = (x.exp(), y.exp(), z.exp());
            prop_assert!(((a * b) * c).frobenius_distance(&(a * (b * c))) < 1e-13);
        }
    }
}
