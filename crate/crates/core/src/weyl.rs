//! Radial shell packets `ψ_R = Φ_R(r) v` with `Φ_R(r) = c_R φ((r − R)/w)`,
//! the four terms of `(∂ + A)²ψ_R`, the `R`-scaling scan, and the pointwise
//! Kato-inequality checker.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{connection_norm, norm3, ConnectionField};
use crate::error::{Error, Result};
use crate::fit::{fit_power_law, PowerLawFit};
use crate::quadrature::{integrate_1d, integrate_volume, Domain, QuadratureOptions};
use crate::section::{covariant_derivative, covariant_energy_density, modulus_gradient, Section};
use crate::su2::{spinor_add, spinor_inner, spinor_norm_sq, spinor_scale, Spinor, Vec3};

/// `φ(s) = exp(1 − 1/(1 − s²))` on `|s| < 1`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    /// `∫ φ²`.
    pub i0: f64,
    /// `∫ s² φ²`.
    pub i2: f64,
}

impl BumpProfile {
    pub fn new() -> Self {
        let opts = QuadratureOptions {
            rel_tol: 1e-13,
            ..QuadratureOptions::default()
        };
        let raw = BumpProfile { i0: 0.0, i2: 0.0 };
        let i0 = integrate_1d(|s| raw.phi(s).powi(2), &[-1.0, 0.0, 1.0], &opts)
            .expect("bump integral converges")
            .value;
        let i2 = integrate_1d(|s| (s * raw.phi(s)).powi(2), &[-1.0, 0.0, 1.0], &opts)
            .expect("bump integral converges")
            .value;
        BumpProfile { i0, i2 }
    }

    pub fn phi(&self, s: f64) -> f64 {
        if s.abs() >= 1.0 {
            return 0.0;
        }
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }

    pub fn dphi(&self, s: f64) -> f64 {
        let p = self.phi(s);
        if p == 0.0 {
            return 0.0;
        }
        let u = 1.0 - s * s;
        p * (-2.0 * s / (u * u))
    }

    pub fn d2phi(&self, s: f64) -> f64 {
        let p = self.phi(s);
        if p == 0.0 {
            return 0.0;
        }
        let u = 1.0 - s * s;
        let s2 = s * s;
        p * (4.0 * s2 / u.powi(4) - 2.0 / (u * u) - 8.0 * s2 / u.powi(3))
    }
}

impl Default for BumpProfile {
    fn default() -> Self {
        Self::new()
    }
}

/// A normalized radial shell packet.
#[derive(Debug, Clone)]
pub struct WeylPacket {
    pub bump: BumpProfile,
    pub radius: f64,
    pub width: f64,
    pub c_r: f64,
    pub v: Spinor,
}

fn packet_opts() -> QuadratureOptions {
    QuadratureOptions {
        rel_tol: 1e-13,
        ..QuadratureOptions::default()
    }
}

pub fn build_packet(bump: BumpProfile, radius: f64, width: f64, v: Spinor) -> Result<WeylPacket> {
    if !(width > 0.0 && radius.is_finite() && width < 0.5 * radius) {
        return Err(Error::InvalidInput(format!(
            "packet needs 0 < w < R/2, got R={radius} w={width}"
        )));
    }
    if (spinor_norm_sq(&v) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput("packet direction must be a unit vector".into()));
    }
    // ∫ φ((r−R)/w)² 4π r² dr with r = R + w s.
    let mass = integrate_1d(
        |s| {
            let r = radius + width * s;
            bump.phi(s).powi(2) * 4.0 * std::f64::consts::PI * r * r * width
        },
        &[-1.0, 0.0, 1.0],
        &packet_opts(),
    )?;
    Ok(WeylPacket {
        bump,
        radius,
        width,
        c_r: mass.value.sqrt().recip(),
        v,
    })
}

impl WeylPacket {
    fn s(&self, r: f64) -> f64 {
        (r - self.radius) / self.width
    }

    pub fn phi_r(&self, r: f64) -> f64 {
        self.c_r * self.bump.phi(self.s(r))
    }

    pub fn dphi_r(&self, r: f64) -> f64 {
        self.c_r / self.width * self.bump.dphi(self.s(r))
    }

    pub fn d2phi_r(&self, r: f64) -> f64 {
        self.c_r / (self.width * self.width) * self.bump.d2phi(self.s(r))
    }

    pub fn shell(&self) -> Domain {
        Domain::Shell {
            inner: self.radius - self.width,
            outer: self.radius + self.width,
        }
    }

    /// `c_R (4πR²wI₀)^{1/2}`.
    pub fn normalization_ratio(&self) -> f64 {
        self.c_r * (4.0 * std::f64::consts::PI * self.radius.powi(2) * self.width * self.bump.i0).sqrt()
    }

    /// Leading-order value of the ratio, `(1 + (w/R)² I₂/I₀)^{-1/2}`.
    pub fn normalization_ratio_expansion(&self) -> f64 {
        let q = self.width / self.radius;
        (1.0 + q * q * self.bump.i2 / self.bump.i0).powf(-0.5)
    }

    /// `‖ψ_R‖_{L²}` by full volume quadrature.
    pub fn l2_norm(&self, opts: &QuadratureOptions) -> Result<f64> {
        let v = integrate_volume(
            |x| self.phi_r(norm3(&x)).powi(2),
            self.shell(),
            &[self.radius],
            opts,
        )?;
        Ok(v.value.sqrt())
    }

    /// `‖∇Φ_R‖_{L²}`.
    pub fn gradient_norm(&self) -> Result<f64> {
        let v = integrate_1d(
            |s| {
                let r = self.radius + self.width * s;
                self.dphi_r(r).powi(2) * 4.0 * std::f64::consts::PI * r * r * self.width
            },
            &[-1.0, 0.0, 1.0],
            &packet_opts(),
        )?;
        Ok(v.value.sqrt())
    }

    /// The four pieces of `(∂ + A)²ψ_R` at `x`, in the order
    /// `ΔΦ v`, `2Φ′ x̂·A v`, `Φ (∂_jA_j) v`, `Φ A_jA_j v`.
    pub fn laplacian_terms<F: ConnectionField + ?Sized>(&self, field: &F, x: Vec3) -> [Spinor; 4] {
        let r = norm3(&x);
        let zero = [Complex64::new(0.0, 0.0); 2];
        if r == 0.0 {
            return [zero; 4];
        }
        let (p, dp, d2p) = (self.phi_r(r), self.dphi_r(r), self.d2phi_r(r));
        if p == 0.0 && dp == 0.0 && d2p == 0.0 {
            return [zero; 4];
        }
        let a = field.eval(x);
        let lap = spinor_scale(&self.v, d2p + 2.0 * dp / r);
        let radial_a = (a[0] * x[0] + a[1] * x[1] + a[2] * x[2]) * (1.0 / r);
        let cross = spinor_scale(&radial_a.apply(&self.v), 2.0 * dp);
        let div = spinor_scale(&field.divergence(x).apply(&self.v), p);
        let mut asq = zero;
        for aj in &a {
            asq = spinor_add(&asq, &aj.apply(&aj.apply(&self.v)));
        }
        [lap, cross, div, spinor_scale(&asq, p)]
    }

    /// `Δ_Aψ_R(x) = −(∂ + A)²ψ_R(x)`.
    pub fn covariant_laplacian<F: ConnectionField + ?Sized>(&self, field: &F, x: Vec3) -> Spinor {
        let t = self.laplacian_terms(field, x);
        let sum = spinor_add(&spinor_add(&t[0], &t[1]), &spinor_add(&t[2], &t[3]));
        spinor_scale(&sum, -1.0)
    }
}

impl Section for WeylPacket {
    fn value(&self, x: Vec3) -> Spinor {
        spinor_scale(&self.v, self.phi_r(norm3(&x)))
    }

    fn gradient(&self, x: Vec3) -> [Spinor; 3] {
        let r = norm3(&x);
        if r == 0.0 {
            return [[Complex64::new(0.0, 0.0); 2]; 3];
        }
        let dp = self.dphi_r(r) / r;
        x.map(|xj| spinor_scale(&self.v, dp * xj))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermNorms {
    pub lap: f64,
    pub cross: f64,
    pub div: f64,
    pub asq: f64,
    pub total: f64,
    /// Accumulated quadrature error estimate of the squared norms.
    pub abs_err: f64,
}

pub fn laplacian_term_norms<F: ConnectionField + ?Sized>(
    packet: &WeylPacket,
    field: &F,
    opts: &QuadratureOptions,
) -> Result<TermNorms> {
    let mut out = [0.0; 5];
    let mut err = 0.0;
    let mut floor = *opts;
    for k in [0, 1, 2, 3, 4] {
        let sq = integrate_volume(
            |x| {
                let t = packet.laplacian_terms(field, x);
                let v = if k < 4 {
                    t[k]
                } else {
                    spinor_add(&spinor_add(&t[0], &t[1]), &spinor_add(&t[2], &t[3]))
                };
                spinor_norm_sq(&v)
            },
            packet.shell(),
            &[packet.radius],
            &floor,
        )?;
        out[k] = sq.value.max(0.0).sqrt();
        err += sq.abs_err;
        if k == 0 {
            // Terms that vanish up to rounding are only resolved down to
            // the rounding level of the scalar term.
            floor.abs_tol = floor.abs_tol.max(f64::EPSILON * f64::EPSILON * sq.value);
        }
    }
    Ok(TermNorms {
        lap: out[0],
        cross: out[1],
        div: out[2],
        asq: out[3],
        total: out[4],
        abs_err: err,
    })
}

/// `(⟨Δ_Aψ_R, ψ_R⟩, ‖d_Aψ_R‖²)` by shell quadrature.
pub fn rayleigh_identity<F: ConnectionField + ?Sized>(
    packet: &WeylPacket,
    field: &F,
    opts: &QuadratureOptions,
) -> Result<(f64, f64)> {
    let lhs = integrate_volume(
        |x| spinor_inner(&packet.value(x), &packet.covariant_laplacian(field, x)).re,
        packet.shell(),
        &[packet.radius],
        opts,
    )?;
    let rhs = integrate_volume(
        |x| covariant_energy_density(packet, field, x),
        packet.shell(),
        &[packet.radius],
        opts,
    )?;
    Ok((lhs.value, rhs.value))
}

/// `|⟨g, ψ_R⟩|` over the packet's shell.
pub fn packet_overlap<S: Section + ?Sized>(packet: &WeylPacket, g: &S, opts: &QuadratureOptions) -> Result<f64> {
    let re = integrate_volume(
        |x| spinor_inner(&g.value(x), &packet.value(x)).re,
        packet.shell(),
        &[packet.radius],
        opts,
    )?;
    let im = integrate_volume(
        |x| spinor_inner(&g.value(x), &packet.value(x)).im,
        packet.shell(),
        &[packet.radius],
        opts,
    )?;
    Ok(re.value.hypot(im.value))
}

/// Shell width as a function of the shell radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WidthRule {
    /// `w = scale · R^exponent`
    Power { scale: f64, exponent: f64 },
    Constant { width: f64 },
}

impl WidthRule {
    pub fn sqrt() -> Self {
        WidthRule::Power {
            scale: 1.0,
            exponent: 0.5,
        }
    }

    pub fn width(&self, radius: f64) -> f64 {
        match *self {
            WidthRule::Power { scale, exponent } => scale * radius.powf(exponent),
            WidthRule::Constant { width } => width,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylRow {
    pub radius: f64,
    pub width: f64,
    pub c_r: f64,
    pub normalization_ratio: f64,
    pub l2_norm: f64,
    pub terms: TermNorms,
}

impl WeylRow {
    /// Whether the total is resolved above the quadrature error.
    pub fn resolved(&self) -> bool {
        self.terms.total * self.terms.total > self.terms.abs_err
    }
}

/// One packet of a scan: normalization data and term norms.
pub fn weyl_row<F: ConnectionField + ?Sized>(
    bump: BumpProfile,
    field: &F,
    radius: f64,
    width: f64,
    v: Spinor,
    opts: &QuadratureOptions,
) -> Result<WeylRow> {
    let packet = build_packet(bump, radius, width, v)?;
    let terms = laplacian_term_norms(&packet, field, opts)?;
    Ok(WeylRow {
        radius,
        width,
        c_r: packet.c_r,
        normalization_ratio: packet.normalization_ratio(),
        l2_norm: packet.l2_norm(opts)?,
        terms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylScan {
    pub rows: Vec<WeylRow>,
    /// Fit of `total` against `R`.
    pub fit: PowerLawFit,
    /// Fit of the `lap` term alone.
    pub lap_fit: PowerLawFit,
}

pub fn weyl_scaling_scan<F: ConnectionField + ?Sized>(
    bump: BumpProfile,
    field: &F,
    radii: &[f64],
    width_rule: WidthRule,
    v: Spinor,
    opts: &QuadratureOptions,
) -> Result<WeylScan> {
    if radii.len() < 2 || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "scan radii must be increasing with at least two entries".into(),
        ));
    }
    for &r in radii {
        let w = width_rule.width(r);
        if !(w > 0.0 && w < 0.5 * r) {
            return Err(Error::InvalidInput(format!(
                "width rule gives w={w} at R={r}; need 0 < w < R/2"
            )));
        }
    }
    let rows: Vec<WeylRow> = radii
        .par_iter()
        .map(|&radius| {
            let row = weyl_row(bump, field, radius, width_rule.width(radius), v, opts)?;
            if !row.resolved() {
                return Err(Error::Accuracy {
                    value: row.terms.total,
                    abs_err: row.terms.abs_err.sqrt(),
                });
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let fit = fit_power_law(radii, &rows.iter().map(|r| r.terms.total).collect::<Vec<_>>())?;
    let lap_fit = fit_power_law(radii, &rows.iter().map(|r| r.terms.lap).collect::<Vec<_>>())?;
    Ok(WeylScan { rows, fit, lap_fit })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KatoResult {
    /// Smallest `C` making the inequality hold at every sample.
    pub min_c: f64,
    pub worst_point: Vec3,
    /// Samples where `ψ ≠ 0` (the others are skipped).
    pub used: usize,
}

/// Relative size below which a pointwise deficit counts as rounding.
pub const KATO_SLACK: f64 = 1e-10;

/// Smallest `C` with `|d_Aψ|² ≥ |∇|ψ||² − C(|F_A| + |A|²)|ψ|²` on the
/// sample set, clamped below at 0.
pub fn kato_deficit<F, S>(field: &F, psi: &S, points: &[Vec3]) -> Result<KatoResult>
where
    F: ConnectionField + ?Sized,
    S: Section + ?Sized,
{
    let mut best = KatoResult {
        min_c: 0.0,
        worst_point: [0.0; 3],
        used: 0,
    };
    for &x in points {
        let Some(grad_mod) = modulus_gradient(psi, x) else {
            continue;
        };
        if best.used == 0 {
            best.worst_point = x;
        }
        best.used += 1;
        let lhs: f64 = grad_mod.iter().map(|g| g * g).sum();
        let cov: f64 = covariant_derivative(psi, field, x)
            .iter()
            .map(spinor_norm_sq)
            .sum();
        let deficit = lhs - cov;
        if deficit <= KATO_SLACK * lhs.max(cov) {
            continue;
        }
        let weight = (field.curvature(x).norm() + connection_norm(&field.eval(x)).powi(2))
            * spinor_norm_sq(&psi.value(x));
        let c = if weight > 0.0 { deficit / weight } else { f64::INFINITY };
        if c > best.min_c {
            best.min_c = c;
            best.worst_point = x;
        }
    }
    if best.used == 0 {
        return Err(Error::InvalidInput("section vanishes on every sample point".into()));
    }
    Ok(best)
}

/// `count` seeded points uniform in the ball of the given radius.
pub fn ball_samples(seed: u64, count: usize, radius: f64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = [0, 1, 2].map(|_| rng.gen_range(-radius..radius));
        if norm3(&x) <= radius {
            out.push(x);
        }
    }
    out
}

/// `count` seeded points in the shell `R − w < |x| < R + w`.
pub fn shell_samples(seed: u64, count: usize, radius: f64, width: f64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = radius + width * rng.gen_range(-0.99..0.99);
            let s = (1.0 - z * z).sqrt();
            [r * s * phi.cos(), r * s * phi.sin(), r * z]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{hedgehog, Flat, RadialProfile};
    use crate::section::GaussianSection;

    fn up() -> Spinor {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    }

    #[test]
    fn bump_shape_and_derivatives() {
        let b = BumpProfile::new();
        assert_eq!(b.phi(0.0), 1.0);
        assert_eq!(b.phi(1.0), 0.0);
        assert_eq!(b.phi(-1.3), 0.0);
        assert!(b.i0 > 0.0 && b.i2 > 0.0 && b.i2 < b.i0);
        let h = 1e-5;
        for s in [-0.9, -0.5, 0.1, 0.6, 0.95] {
            let d = (b.phi(s + h) - b.phi(s - h)) / (2.0 * h);
            let d2 = (b.dphi(s + h) - b.dphi(s - h)) / (2.0 * h);
            assert!((d - b.dphi(s)).abs() < 1e-7 * (1.0 + d.abs()));
            assert!((d2 - b.d2phi(s)).abs() < 1e-6 * (1.0 + d2.abs()));
        }
    }

    #[test]
    fn packet_preconditions() {
        let b = BumpProfile::new();
        assert!(build_packet(b, 10.0, 5.0, up()).is_err());
        assert!(build_packet(b, 10.0, 0.0, up()).is_err());
        let not_unit = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(build_packet(b, 10.0, 2.0, not_unit).is_err());
    }

    #[test]
    fn packet_is_normalized() {
        let p = build_packet(BumpProfile::new(), 100.0, 10.0, up()).unwrap();
        let n = p.l2_norm(&QuadratureOptions::default()).unwrap();
        assert!((n - 1.0).abs() < 1e-10);
        let ratio = p.normalization_ratio();
        assert!((ratio - 1.0).abs() <= 0.01);
        assert!((ratio - p.normalization_ratio_expansion()).abs() < 1e-3);
    }

    #[test]
    fn packet_gradient_matches_differences() {
        let p = build_packet(BumpProfile::new(), 20.0, 4.0, up()).unwrap();
        let x = [12.0, 9.0, 5.0];
        let g = p.gradient(x);
        let h = 1e-5;
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let fd = (p.value(xp)[0] - p.value(xm)[0]) / (2.0 * h);
            assert!((fd - g[j][0]).norm() < 1e-9);
        }
    }

    #[test]
    fn flat_field_has_only_the_scalar_term() {
        let p = build_packet(BumpProfile::new(), 16.0, 4.0, up()).unwrap();
        let t = laplacian_term_norms(&p, &Flat, &QuadratureOptions::default()).unwrap();
        assert_eq!((t.cross, t.div, t.asq), (0.0, 0.0, 0.0));
        assert!((t.total - t.lap).abs() <= 1e-12 * t.lap);
    }

    #[test]
    fn doubling_width_quarters_the_scalar_term() {
        let b = BumpProfile::new();
        let opts = QuadratureOptions::default();
        let narrow = laplacian_term_norms(&build_packet(b, 400.0, 5.0, up()).unwrap(), &Flat, &opts).unwrap();
        let wide = laplacian_term_norms(&build_packet(b, 400.0, 10.0, up()).unwrap(), &Flat, &opts).unwrap();
        let ratio = narrow.lap / wide.lap;
        assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn hedgehog_kato_radial_is_zero() {
        let h = hedgehog(RadialProfile::critical(1.0)).unwrap();
        let p = build_packet(BumpProfile::new(), 20.0, 4.0, up()).unwrap();
        let k = kato_deficit(&h, &p, &shell_samples(3, 200, 20.0, 4.0)).unwrap();
        assert_eq!(k.min_c, 0.0);
        assert_eq!(k.used, 200);
    }

    #[test]
    fn kato_needs_a_nonzero_section() {
        let zero = GaussianSection::new([0.0; 3], 1.0, [Complex64::new(0.0, 0.0); 2]);
        assert!(kato_deficit(&Flat, &zero, &ball_samples(1, 10, 2.0)).is_err());
    }

    #[test]
    fn scan_rejects_bad_width_rule() {
        let r = weyl_scaling_scan(
            BumpProfile::new(),
            &Flat,
            &[4.0, 8.0, 16.0],
            WidthRule::Constant { width: 3.0 },
            up(),
            &QuadratureOptions::default(),
        );
        assert!(r.is_err());
    }
}
