//! Smooth sections `ψ: ℝ³ → ℂ²` with analytic gradients.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connection::{norm3, ConnectionField};
use crate::su2::{spinor_add, spinor_inner, spinor_norm_sq, Spinor, Vec3};

pub trait Section: Send + Sync {
    fn value(&self, x: Vec3) -> Spinor;
    /// `[∂_1 ψ, ∂_2 ψ, ∂_3 ψ]`.
    fn gradient(&self, x: Vec3) -> [Spinor; 3];
}

impl<T: Section + ?Sized> Section for &T {
    fn value(&self, x: Vec3) -> Spinor {
        (**self).value(x)
    }
    fn gradient(&self, x: Vec3) -> [Spinor; 3] {
        (**self).gradient(x)
    }
}

/// `d_A ψ = [∂_j ψ + A_j ψ]_j` at `x`.
pub fn covariant_derivative<S, F>(psi: &S, field: &F, x: Vec3) -> [Spinor; 3]
where
    S: Section + ?Sized,
    F: ConnectionField + ?Sized,
{
    let v = psi.value(x);
    let g = psi.gradient(x);
    let a = field.eval(x);
    [0, 1, 2].map(|j| spinor_add(&g[j], &a[j].apply(&v)))
}

/// `|d_A ψ|²`.
pub fn covariant_energy_density<S, F>(psi: &S, field: &F, x: Vec3) -> f64
where
    S: Section + ?Sized,
    F: ConnectionField + ?Sized,
{
    covariant_derivative(psi, field, x)
        .iter()
        .map(spinor_norm_sq)
        .sum()
}

/// `∇|ψ|` where `ψ ≠ 0`: `∂_j|ψ| = Re⟨ψ, ∂_j ψ⟩ / |ψ|`.
pub fn modulus_gradient<S: Section + ?Sized>(psi: &S, x: Vec3) -> Option<Vec3> {
    let v = psi.value(x);
    let m = spinor_norm_sq(&v).sqrt();
    if m == 0.0 {
        return None;
    }
    let g = psi.gradient(x);
    Some([0, 1, 2].map(|j| spinor_inner(&v, &g[j]).re / m))
}

/// `exp(−|x − c|²/(2σ²)) v`, normalized to unit L² mass for unit `v`.
#[derive(Debug, Clone)]
pub struct GaussianSection {
    pub center: Vec3,
    pub width: f64,
    pub v: Spinor,
}

impl GaussianSection {
    pub fn new(center: Vec3, width: f64, v: Spinor) -> Self {
        GaussianSection { center, width, v }
    }

    fn amplitude(&self, x: Vec3) -> (f64, Vec3) {
        let d = [0, 1, 2].map(|k| x[k] - self.center[k]);
        let s2 = self.width * self.width;
        let norm = (std::f64::consts::PI * s2).powf(-0.75);
        let a = norm * (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (2.0 * s2)).exp();
        (a, d.map(|t| -a * t / s2))
    }
}

impl Section for GaussianSection {
    fn value(&self, x: Vec3) -> Spinor {
        let (a, _) = self.amplitude(x);
        [self.v[0] * a, self.v[1] * a]
    }

    fn gradient(&self, x: Vec3) -> [Spinor; 3] {
        let (_, g) = self.amplitude(x);
        g.map(|gj| [self.v[0] * gj, self.v[1] * gj])
    }
}

/// A non-radial smooth section: a Gaussian envelope times a few plane waves
/// with random ℂ² amplitudes.
#[derive(Debug, Clone)]
pub struct PlaneWaveSection {
    pub width: f64,
    pub modes: Vec<(Vec3, Spinor)>,
}

impl PlaneWaveSection {
    pub fn random(seed: u64, width: f64, modes: usize, max_wavenumber: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes = (0..modes)
            .map(|_| {
                let k = [0, 1, 2].map(|_| rng.gen_range(-max_wavenumber..max_wavenumber));
                let c = [0, 1].map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                (k, c)
            })
            .collect();
        PlaneWaveSection { width, modes }
    }
}

impl Section for PlaneWaveSection {
    fn value(&self, x: Vec3) -> Spinor {
        let env = (-norm3(&x).powi(2) / (2.0 * self.width * self.width)).exp();
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for (k, c) in &self.modes {
            let ph = Complex64::from_polar(env, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            out[0] += c[0] * ph;
            out[1] += c[1] * ph;
        }
        out
    }

    fn gradient(&self, x: Vec3) -> [Spinor; 3] {
        let s2 = self.width * self.width;
        let env = (-norm3(&x).powi(2) / (2.0 * s2)).exp();
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 3];
        for (k, c) in &self.modes {
            let ph = Complex64::from_polar(env, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            for j in 0..3 {
                // ∂_j (env e^{ik·x}) = (−x_j/σ² + i k_j) env e^{ik·x}
                let factor = Complex64::new(-x[j] / s2, k[j]) * ph;
                out[j][0] += c[0] * factor;
                out[j][1] += c[1] * factor;
            }
        }
        out
    }
}
