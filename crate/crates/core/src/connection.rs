//! Connections `A = Σ A_j dx^j` on ℝ³ with values in su(2).
//!
//! Besides the trivial connection this module provides the hedgehog family
//! `A_i^a = f(r) ε_aij x^j` with `f = (1 − K(r))/r²`, its fast-decay
//! variants, and gauge transforms `Ã_i = g A_i g⁻¹ − (∂_i g) g⁻¹`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::CurvatureTensor;
use crate::error::{Error, Result};
use crate::su2::{conjugate, eps, GroupElement, Su2, Su2Matrix, Vec3};

/// `(A_1, A_2, A_3)` at a point.
pub type Connection = [Su2; 3];
/// `jac[j][i] = ∂_j A_i`.
pub type ConnectionJacobian = [[Su2; 3]; 3];

/// Core radius of the origin smoothing `1 − K = κ r²/(r³ + |κ| r₀³)`.
pub const CORE_RADIUS: f64 = 1.0;

pub trait ConnectionField: Send + Sync {
    fn name(&self) -> String;

    fn eval(&self, x: Vec3) -> Connection;

    /// Spatial derivatives; central differences unless overridden.
    fn jacobian(&self, x: Vec3) -> ConnectionJacobian {
        central_jacobian(self, x, fd_step(norm3(&x)))
    }

    fn divergence(&self, x: Vec3) -> Su2 {
        let jac = self.jacobian(x);
        jac[0][0] + jac[1][1] + jac[2][2]
    }

    fn curvature(&self, x: Vec3) -> CurvatureTensor {
        CurvatureTensor::from_jacobian(x, &self.eval(x), &self.jacobian(x))
    }
}

impl<T: ConnectionField + ?Sized> ConnectionField for &T {
    fn name(&self) -> String {
        (**self).name()
    }
    fn eval(&self, x: Vec3) -> Connection {
        (**self).eval(x)
    }
    fn jacobian(&self, x: Vec3) -> ConnectionJacobian {
        (**self).jacobian(x)
    }
    fn divergence(&self, x: Vec3) -> Su2 {
        (**self).divergence(x)
    }
    fn curvature(&self, x: Vec3) -> CurvatureTensor {
        (**self).curvature(x)
    }
}

impl<T: ConnectionField + ?Sized> ConnectionField for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn eval(&self, x: Vec3) -> Connection {
        (**self).eval(x)
    }
    fn jacobian(&self, x: Vec3) -> ConnectionJacobian {
        (**self).jacobian(x)
    }
    fn divergence(&self, x: Vec3) -> Su2 {
        (**self).divergence(x)
    }
    fn curvature(&self, x: Vec3) -> CurvatureTensor {
        (**self).curvature(x)
    }
}

/// Finite-difference step used for gradients of arbitrary fields.
pub fn fd_step(r: f64) -> f64 {
    (r / 100.0).clamp(1e-5, 1e-3)
}

pub fn norm3(x: &Vec3) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

pub(crate) fn shifted(x: Vec3, axis: usize, by: f64) -> Vec3 {
    let mut y = x;
    y[axis] += by;
    y
}

/// `∂_j A_i` by central differences with step `h`.
pub fn central_jacobian<F: ConnectionField + ?Sized>(
    field: &F,
    x: Vec3,
    h: f64,
) -> ConnectionJacobian {
    let mut jac = [[Su2::ZERO; 3]; 3];
    for (j, row) in jac.iter_mut().enumerate() {
        let plus = field.eval(shifted(x, j, h));
        let minus = field.eval(shifted(x, j, -h));
        for i in 0..3 {
            row[i] = (plus[i] - minus[i]) * (0.5 / h);
        }
    }
    jac
}

/// `|A| = sqrt(Σ_i |A_i|²)`.
pub fn connection_norm(a: &Connection) -> f64 {
    a.iter().map(Su2::norm_sq).sum::<f64>().sqrt()
}

/// `|∇A| = sqrt(Σ_{i,j} |∂_j A_i|²)`.
pub fn jacobian_norm(jac: &ConnectionJacobian) -> f64 {
    jac.iter()
        .flat_map(|row| row.iter())
        .map(Su2::norm_sq)
        .sum::<f64>()
        .sqrt()
}

/// The trivial connection.
#[derive(Debug, Clone, Copy, Default)]
pub struct Flat;

impl ConnectionField for Flat {
    fn name(&self) -> String {
        "flat".into()
    }
    fn eval(&self, _x: Vec3) -> Connection {
        [Su2::ZERO; 3]
    }
    fn jacobian(&self, _x: Vec3) -> ConnectionJacobian {
        [[Su2::ZERO; 3]; 3]
    }
}

/// A connection given by a closure.
pub struct FnField<F> {
    name: String,
    eval: F,
}

impl<F> FnField<F>
where
    F: Fn(Vec3) -> Connection + Send + Sync,
{
    pub fn new(name: impl Into<String>, eval: F) -> Self {
        FnField {
            name: name.into(),
            eval,
        }
    }
}

impl<F> ConnectionField for FnField<F>
where
    F: Fn(Vec3) -> Connection + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }
    fn eval(&self, x: Vec3) -> Connection {
        (self.eval)(x)
    }
}

/// Radial profile `K(r)` of the hedgehog, stored through `f = (1 − K)/r²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    /// `K ≡ 1`.
    Trivial,
    /// `1 − K = κ r²/(r³ + core) · (1 + r)^(−extra_decay)`.
    Smoothed {
        kappa: f64,
        core: f64,
        extra_decay: f64,
    },
    /// `K = 1 − κ/r`, singular at the origin.
    PureTail { kappa: f64 },
}

impl RadialProfile {
    /// Critical decay `K = 1 − κ/r + O(r⁻⁴)`, smooth at the origin.
    pub fn critical(kappa: f64) -> Self {
        Self::smoothed(kappa, 0.0)
    }

    fn smoothed(kappa: f64, extra_decay: f64) -> Self {
        if kappa == 0.0 {
            return RadialProfile::Trivial;
        }
        RadialProfile::Smoothed {
            kappa,
            core: kappa.abs() * CORE_RADIUS.powi(3),
            extra_decay,
        }
    }

    pub fn pure_tail(kappa: f64) -> Self {
        RadialProfile::PureTail { kappa }
    }

    pub fn kappa(&self) -> f64 {
        match *self {
            RadialProfile::Trivial => 0.0,
            RadialProfile::Smoothed { kappa, .. } | RadialProfile::PureTail { kappa } => kappa,
        }
    }

    pub fn extra_decay(&self) -> f64 {
        match *self {
            RadialProfile::Smoothed { extra_decay, .. } => extra_decay,
            _ => 0.0,
        }
    }

    /// `f(r) = (1 − K(r))/r²`.
    pub fn f(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Trivial => 0.0,
            RadialProfile::Smoothed {
                kappa,
                core,
                extra_decay,
            } => kappa / (r * r * r + core) * (1.0 + r).powf(-extra_decay),
            RadialProfile::PureTail { kappa } => kappa / (r * r * r),
        }
    }

    /// `f′(r)`.
    pub fn df(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Trivial => 0.0,
            RadialProfile::Smoothed {
                kappa,
                core,
                extra_decay,
            } => {
                let d = r * r * r + core;
                let decay = (1.0 + r).powf(-extra_decay);
                kappa * decay / d * (-3.0 * r * r / d - extra_decay / (1.0 + r))
            }
            RadialProfile::PureTail { kappa } => -3.0 * kappa / (r * r * r * r),
        }
    }

    /// `1 − K(r) = r² f(r)`.
    pub fn one_minus_k(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::PureTail { kappa } => kappa / r,
            _ => r * r * self.f(r),
        }
    }

    pub fn k(&self, r: f64) -> f64 {
        1.0 - self.one_minus_k(r)
    }

    /// `K′(r) = −2 r f − r² f′`.
    pub fn dk(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::PureTail { kappa } => kappa / (r * r),
            _ => -2.0 * r * self.f(r) - r * r * self.df(r),
        }
    }

    fn check_regular(&self) -> Result<()> {
        let k0 = self.k(0.0);
        let dk0 = self.dk(0.0);
        if !(k0.is_finite() && (k0 - 1.0).abs() < 1e-14 && dk0.is_finite() && dk0.abs() < 1e-14) {
            return Err(Error::Construction(format!(
                "profile has K(0) = {k0}, K'(0) = {dk0}; need K(0) = 1, K'(0) = 0"
            )));
        }
        Ok(())
    }
}

/// Hedgehog connection `A_i^a = f(r) ε_aij x^j`, i.e. `A_i = f · (e_i × x)`.
#[derive(Debug, Clone)]
pub struct Hedgehog {
    profile: RadialProfile,
    name: String,
}

/// Build the hedgehog for a profile that is regular at the origin.
pub fn hedgehog(profile: RadialProfile) -> Result<Hedgehog> {
    profile.check_regular()?;
    Ok(Hedgehog {
        name: hedgehog_name(&profile),
        profile,
    })
}

/// The fast-decay member `1 − K = κ r²/(r³ + c) · (1 + r)^(−extra_decay)`.
pub fn fast_decay_family(kappa: f64, extra_decay: f64) -> Result<Hedgehog> {
    if !(extra_decay > 0.0) || !extra_decay.is_finite() {
        return Err(Error::InvalidInput(format!(
            "extra_decay must be positive, got {extra_decay}"
        )));
    }
    if !kappa.is_finite() {
        return Err(Error::InvalidInput(format!("kappa must be finite, got {kappa}")));
    }
    hedgehog(RadialProfile::smoothed(kappa, extra_decay))
}

fn hedgehog_name(profile: &RadialProfile) -> String {
    match *profile {
        RadialProfile::Trivial => "hedgehog(trivial)".into(),
        RadialProfile::Smoothed {
            kappa, extra_decay, ..
        } if extra_decay == 0.0 => format!("hedgehog(kappa={kappa})"),
        RadialProfile::Smoothed {
            kappa, extra_decay, ..
        } => format!("fast-decay(kappa={kappa},extra={extra_decay})"),
        RadialProfile::PureTail { kappa } => format!("hedgehog-tail(kappa={kappa})"),
    }
}

impl Hedgehog {
    /// Hedgehog without the regularity check; only meaningful away from
    /// the origin (used with [`RadialProfile::PureTail`]).
    pub fn exterior(profile: RadialProfile) -> Self {
        Hedgehog {
            name: hedgehog_name(&profile),
            profile,
        }
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }
}

#[inline]
fn e_cross(i: usize, x: &Vec3) -> Su2 {
    match i {
        0 => Su2([0.0, -x[2], x[1]]),
        1 => Su2([x[2], 0.0, -x[0]]),
        _ => Su2([-x[1], x[0], 0.0]),
    }
}

impl ConnectionField for Hedgehog {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, x: Vec3) -> Connection {
        let f = self.profile.f(norm3(&x));
        [e_cross(0, &x) * f, e_cross(1, &x) * f, e_cross(2, &x) * f]
    }

    fn jacobian(&self, x: Vec3) -> ConnectionJacobian {
        let r = norm3(&x);
        let f = self.profile.f(r);
        // f'(r) x̂_j; the r → 0 limit is zero for bounded f'.
        let radial = if r > 0.0 { self.profile.df(r) / r } else { 0.0 };
        let mut jac = [[Su2::ZERO; 3]; 3];
        for (j, row) in jac.iter_mut().enumerate() {
            for (i, entry) in row.iter_mut().enumerate() {
                let lin = Su2([eps(0, i, j), eps(1, i, j), eps(2, i, j)]);
                *entry = e_cross(i, &x) * (radial * x[j]) + lin * f;
            }
        }
        jac
    }
}

/// A gauge transformation `g: ℝ³ → SU(2)` with its first derivatives.
pub trait GaugeFunction: Send + Sync {
    fn value(&self, x: Vec3) -> GroupElement;
    /// `[∂_1 g, ∂_2 g, ∂_3 g]`.
    fn derivative(&self, x: Vec3) -> [Su2Matrix; 3];
}

/// Identity gauge.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityGauge;

impl GaugeFunction for IdentityGauge {
    fn value(&self, _x: Vec3) -> GroupElement {
        Su2Matrix::IDENTITY
    }
    fn derivative(&self, _x: Vec3) -> [Su2Matrix; 3] {
        [Su2Matrix::ZERO; 3]
    }
}

/// Smooth scalar `s(x) = c + Σ_m amp_m sin(k_m·x + φ_m)`.
#[derive(Debug, Clone, Default)]
pub struct SmoothScalar {
    pub constant: f64,
    pub modes: Vec<(f64, Vec3, f64)>,
}

impl SmoothScalar {
    pub fn constant(c: f64) -> Self {
        SmoothScalar {
            constant: c,
            modes: Vec::new(),
        }
    }

    /// Random Fourier modes with wavenumbers up to `max_wavenumber`.
    pub fn random<R: Rng>(rng: &mut R, modes: usize, amplitude: f64, max_wavenumber: f64) -> Self {
        let modes = (0..modes)
            .map(|_| {
                let k = [
                    rng.gen_range(-max_wavenumber..max_wavenumber),
                    rng.gen_range(-max_wavenumber..max_wavenumber),
                    rng.gen_range(-max_wavenumber..max_wavenumber),
                ];
                let amp = amplitude * rng.gen_range(0.5..1.0);
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                (amp, k, phase)
            })
            .collect();
        SmoothScalar {
            constant: 0.0,
            modes,
        }
    }

    pub fn value(&self, x: Vec3) -> f64 {
        self.constant
            + self
                .modes
                .iter()
                .map(|(amp, k, ph)| amp * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + ph).sin())
                .sum::<f64>()
    }

    pub fn gradient(&self, x: Vec3) -> Vec3 {
        let mut g = [0.0; 3];
        for (amp, k, ph) in &self.modes {
            let c = amp * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + ph).cos();
            for a in 0..3 {
                g[a] += c * k[a];
            }
        }
        g
    }
}

/// `g(x) = exp(α(x) τ_1) exp(β(x) τ_2) exp(γ(x) τ_3)`.
#[derive(Debug, Clone)]
pub struct EulerGauge {
    pub angles: [SmoothScalar; 3],
}

impl EulerGauge {
    /// Rotation about a single algebra axis, `g = exp(θ(x) τ_axis)`.
    pub fn about_axis(axis: usize, theta: SmoothScalar) -> Self {
        let mut angles = [
            SmoothScalar::constant(0.0),
            SmoothScalar::constant(0.0),
            SmoothScalar::constant(0.0),
        ];
        angles[axis] = theta;
        EulerGauge { angles }
    }

    /// Deterministic random smooth gauge.
    pub fn random(seed: u64, amplitude: f64, max_wavenumber: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        EulerGauge {
            angles: [
                SmoothScalar::random(&mut rng, 3, amplitude, max_wavenumber),
                SmoothScalar::random(&mut rng, 3, amplitude, max_wavenumber),
                SmoothScalar::random(&mut rng, 3, amplitude, max_wavenumber),
            ],
        }
    }

    fn factors(&self, x: Vec3) -> [Su2Matrix; 3] {
        [0, 1, 2].map(|a| (Su2::basis(a) * self.angles[a].value(x)).exp())
    }
}

impl GaugeFunction for EulerGauge {
    fn value(&self, x: Vec3) -> GroupElement {
        let [g1, g2, g3] = self.factors(x);
        g1 * g2 * g3
    }

    fn derivative(&self, x: Vec3) -> [Su2Matrix; 3] {
        let [g1, g2, g3] = self.factors(x);
        let t = [0, 1, 2].map(|a| Su2::basis(a).to_matrix());
        let grads = [0, 1, 2].map(|a| self.angles[a].gradient(x));
        // d exp(s τ) = ds · τ exp(s τ)
        [0, 1, 2].map(|j| {
            (t[0] * g1 * g2 * g3).scale(grads[0][j])
                + (g1 * t[1] * g2 * g3).scale(grads[1][j])
                + (g1 * g2 * t[2] * g3).scale(grads[2][j])
        })
    }
}

/// `Ã_i = g A_i g⁻¹ − (∂_i g) g⁻¹`.
pub struct GaugeTransformed<F, G> {
    field: F,
    gauge: G,
}

/// Points at which gauge functions are probed for unitarity.
fn probe_points() -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a0e);
    let mut pts = vec![[0.0; 3]];
    for _ in 0..63 {
        pts.push([
            rng.gen_range(-50.0..50.0),
            rng.gen_range(-50.0..50.0),
            rng.gen_range(-50.0..50.0),
        ]);
    }
    pts
}

pub fn gauge_transform<F: ConnectionField, G: GaugeFunction>(
    field: F,
    gauge: G,
) -> Result<GaugeTransformed<F, G>> {
    for x in probe_points() {
        let g = gauge.value(x);
        if !g.is_unitary(1e-10) {
            return Err(Error::InvalidInput(format!(
                "gauge function is not unitary at {x:?} (defect {})",
                g.unitarity_defect()
            )));
        }
    }
    Ok(GaugeTransformed { field, gauge })
}

impl<F: ConnectionField, G: GaugeFunction> GaugeTransformed<F, G> {
    pub fn inner(&self) -> &F {
        &self.field
    }

    pub fn gauge(&self) -> &G {
        &self.gauge
    }
}

impl<F: ConnectionField, G: GaugeFunction> ConnectionField for GaugeTransformed<F, G> {
    fn name(&self) -> String {
        format!("gauge({})", self.field.name())
    }

    fn eval(&self, x: Vec3) -> Connection {
        let g = self.gauge.value(x);
        let dg = self.gauge.derivative(x);
        let gi = g.adjoint();
        let a = self.field.eval(x);
        [0, 1, 2].map(|i| conjugate(&g, a[i]) - (dg[i] * gi).algebra_part())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trivial_profile_gives_zero_connection() {
        let h = hedgehog(RadialProfile::Trivial).unwrap();
        for x in [[0.0; 3], [1.0, 2.0, 3.0], [-40.0, 0.5, 7.0]] {
            assert_eq!(connection_norm(&h.eval(x)), 0.0);
        }
    }

    #[test]
    fn pure_tail_components_at_x_axis() {
        let h = Hedgehog::exterior(RadialProfile::pure_tail(1.0));
        let a = h.eval([10.0, 0.0, 0.0]);
        assert_relative_eq!(h.profile().f(10.0), 1e-3, max_relative = 1e-15);
        // A_3^2 = +10^-2 and A_2^3 = -10^-2, everything else zero.
        assert_relative_eq!(a[2].0[1], 1e-2, max_relative = 1e-15);
        assert_relative_eq!(a[1].0[2], -1e-2, max_relative = 1e-15);
        let others = a[0].norm_sq() + a[1].0[0].powi(2) + a[1].0[1].powi(2) + a[2].0[0].powi(2) + a[2].0[2].powi(2);
        assert_eq!(others, 0.0);
    }

    #[test]
    fn pure_tail_is_rejected_as_singular() {
        assert!(matches!(
            hedgehog(RadialProfile::pure_tail(1.0)),
            Err(Error::Construction(_))
        ));
    }

    #[test]
    fn critical_profile_is_regular_with_correct_tail() {
        let p = RadialProfile::critical(1.0);
        assert_eq!(p.k(0.0), 1.0);
        assert_eq!(p.dk(0.0), 0.0);
        // |K − (1 − κ/r)| r² stays bounded (here it even decays like 1/r²).
        for r in [10.0, 30.0, 100.0, 1000.0] {
            let dev = (p.k(r) - (1.0 - 1.0 / r)).abs() * r * r;
            assert!(dev < 0.01, "r={r} dev={dev}");
        }
    }

    #[test]
    fn hedgehog_magnitude_at_radius_100() {
        let h = hedgehog(RadialProfile::critical(1.0)).unwrap();
        let n = connection_norm(&h.eval([0.0, 60.0, 80.0]));
        assert_relative_eq!(n, 1e-4 * 2f64.sqrt(), max_relative = 0.01);
    }

    #[test]
    fn fast_decay_rejects_nonpositive_extra() {
        assert!(fast_decay_family(1.0, 0.0).is_err());
        assert!(fast_decay_family(1.0, -1.0).is_err());
        assert!(fast_decay_family(1.0, f64::NAN).is_err());
    }

    #[test]
    fn fast_decay_recovers_critical_in_the_limit() {
        let crit = hedgehog(RadialProfile::critical(1.0)).unwrap();
        let fast = fast_decay_family(1.0, 1e-10).unwrap();
        for x in [[0.3, -0.2, 0.1], [5.0, 1.0, -2.0], [100.0, 20.0, 3.0]] {
            let (a, b) = (crit.eval(x), fast.eval(x));
            let diff: f64 = (0..3).map(|i| (a[i] - b[i]).norm()).sum();
            assert!(diff <= 1e-8 * connection_norm(&a), "x={x:?}");
        }
    }

    #[test]
    fn hedgehog_is_tangential() {
        let h = hedgehog(RadialProfile::critical(1.3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x = [0, 1, 2].map(|_| rng.gen_range(-30.0..30.0));
            let a = h.eval(x);
            let radial = a[0] * x[0] + a[1] * x[1] + a[2] * x[2];
            assert!(radial.norm() <= 1e-15 * connection_norm(&a) * norm3(&x) + 1e-300);
        }
    }

    #[test]
    fn hedgehog_is_divergence_free() {
        let h = hedgehog(RadialProfile::critical(1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let x = [0, 1, 2].map(|_| rng.gen_range(-20.0..20.0));
            assert!(h.divergence(x).norm() < 1e-16);
            // Central differences see O(h²).
            let coarse = central_jacobian(&h, x, 1e-2);
            let fine = central_jacobian(&h, x, 5e-3);
            let div = |j: &ConnectionJacobian| (j[0][0] + j[1][1] + j[2][2]).norm();
            assert!(div(&fine) <= div(&coarse) / 3.0 + 1e-14);
        }
    }

    #[test]
    fn analytic_jacobian_matches_differences_at_second_order() {
        let h = fast_decay_family(1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let x = [0, 1, 2].map(|_| rng.gen_range(-8.0..8.0));
            if norm3(&x) < 0.5 {
                continue;
            }
            let exact = h.jacobian(x);
            let err = |step: f64| {
                let fd = central_jacobian(&h, x, step);
                let mut e = 0.0f64;
                for j in 0..3 {
                    for i in 0..3 {
                        e = e.max((fd[j][i] - exact[j][i]).norm());
                    }
                }
                e
            };
            let ratio = err(2e-2) / err(1e-2);
            assert!((3.6..4.4).contains(&ratio), "ratio {ratio} at {x:?}");
        }
    }

    #[test]
    fn identity_gauge_leaves_field_unchanged() {
        let h = hedgehog(RadialProfile::critical(1.0)).unwrap();
        let t = gauge_transform(h.clone(), IdentityGauge).unwrap();
        let x = [1.0, -2.0, 0.5];
        let (a, b) = (h.eval(x), t.eval(x));
        for i in 0..3 {
            assert!((a[i] - b[i]).norm() < 1e-16);
        }
    }

    struct Stretch;
    impl GaugeFunction for Stretch {
        fn value(&self, _x: Vec3) -> GroupElement {
            Su2Matrix::IDENTITY.scale(1.1)
        }
        fn derivative(&self, _x: Vec3) -> [Su2Matrix; 3] {
            [Su2Matrix::ZERO; 3]
        }
    }

    #[test]
    fn non_unitary_gauge_is_rejected() {
        assert!(matches!(gauge_transform(Flat, Stretch), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn euler_gauge_derivative_matches_differences() {
        let g = EulerGauge::random(3, 1.0, 0.7);
        let x = [0.4, -1.1, 2.0];
        let d = g.derivative(x);
        for j in 0..3 {
            let step = 1e-5;
            let fd = (g.value(shifted(x, j, step)) - g.value(shifted(x, j, -step))).scale(0.5 / step);
            assert!(fd.frobenius_distance(&d[j]) < 1e-9);
        }
        assert!(g.value(x).is_unitary(1e-14));
    }
}
