//! Adaptive quadrature on balls, shells and exteriors in ℝ³, and the
//! norms built on it: `L^p` norms, cutoff tail norms of `|A|`, `|∇A|`,
//! `|A|²`, and the covariant energy `(‖ψ‖², ‖d_Aψ‖²)`.
//!
//! Volume integrals are nested: adaptive Gauss–Kronrod (7/15) in `r`
//! times a product rule on the sphere, Gauss–Legendre in `cos θ` and
//! uniform in `φ`. The angular orders start at (16, 32) and are doubled
//! until two consecutive levels agree.

use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{central_jacobian, connection_norm, fd_step, jacobian_norm, norm3, ConnectionField};
use crate::error::{Error, Result};
use crate::fit::{fit_power_law, PowerLawFit};
use crate::section::{covariant_energy_density, Section};
use crate::su2::{spinor_norm_sq, Vec3};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Truncation radius of exterior integrals, in units of the inner radius.
pub const EXTERIOR_TRUNCATION: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
    /// Estimate of `∫|f|`, the scale the relative tolerance refers to.
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Budget of radial subintervals.
    pub max_intervals: usize,
    /// Starting angular orders (Gauss–Legendre in cos θ, uniform in φ).
    pub angular_orders: (usize, usize),
    pub max_angular_doublings: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: 1e-300,
            rel_tol: 1e-11,
            max_intervals: 4000,
            angular_orders: (16, 32),
            max_angular_doublings: 3,
        }
    }
}

impl QuadratureOptions {
    fn tolerance(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude.abs())
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        scaled = res_asc * (200.0 * scaled / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 15-point Kronrod rule on `[a, b]`. The integrand returns its value
/// together with a non-negative magnitude whose integral sets the scale.
fn gk15<F: Fn(f64) -> (f64, f64)>(f: &F, a: f64, b: f64) -> Integral {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (fc, mc) = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut res_mag = mc * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let ((f1, m1), (f2, m2)) = (f(center - x), f(center + x));
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        res_mag += WGK[j] * (m1 + m2);
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    Integral {
        value: res_k * half,
        abs_err: rescale_error((res_k - res_g) * half, res_abs * scale, res_asc * scale),
        magnitude: res_mag.max(res_abs) * scale,
    }
}

struct Piece {
    a: f64,
    b: f64,
    est: Integral,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.est.abs_err == o.est.abs_err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.est.abs_err.total_cmp(&o.est.abs_err)
    }
}

/// Globally adaptive Gauss–Kronrod on `[breaks[0], breaks[last]]`, starting
/// from the given partition and always bisecting the worst piece.
pub fn integrate_1d<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    opts: &QuadratureOptions,
) -> Result<Integral> {
    integrate_1d_scaled(|x| {
        let v = f(x);
        (v, v.abs())
    }, breaks, opts)
}

fn integrate_1d_scaled<F: Fn(f64) -> (f64, f64)>(
    f: F,
    breaks: &[f64],
    opts: &QuadratureOptions,
) -> Result<Integral> {
    if breaks.len() < 2 {
        return Err(Error::InvalidInput("need at least one interval".into()));
    }
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(Piece {
                a: w[0],
                b: w[1],
                est: gk15(&f, w[0], w[1]),
            });
        }
    }
    let total = |h: &BinaryHeap<Piece>| {
        // Sum in interval order so the result does not depend on heap layout.
        let mut pieces: Vec<&Piece> = h.iter().collect();
        pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
        pieces.iter().fold((0.0, 0.0, 0.0), |(v, e, m), p| {
            (v + p.est.value, e + p.est.abs_err, m + p.est.magnitude)
        })
    };
    loop {
        let (value, err, magnitude) = total(&heap);
        if !value.is_finite() {
            return Err(Error::Accuracy { value, abs_err: err });
        }
        if err <= opts.tolerance(magnitude) {
            return Ok(Integral { value, abs_err: err, magnitude });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Accuracy { value, abs_err: err });
        }
        let worst = heap.pop().expect("non-empty partition");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            heap.push(worst);
            let (value, err, _) = total(&heap);
            return Err(Error::Accuracy { value, abs_err: err });
        }
        heap.push(Piece {
            a: worst.a,
            b: mid,
            est: gk15(&f, worst.a, mid),
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            est: gk15(&f, mid, worst.b),
        });
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Product rule on the unit sphere; weights sum to `4π`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub directions: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn product(n_theta: usize, n_phi: usize) -> Self {
        let (ct, wt) = gauss_legendre(n_theta);
        let dphi = std::f64::consts::TAU / n_phi as f64;
        let mut directions = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (c, w) in ct.iter().zip(&wt) {
            let s = (1.0 - c * c).sqrt();
            for k in 0..n_phi {
                let phi = (k as f64 + 0.5) * dphi;
                directions.push([s * phi.cos(), s * phi.sin(), *c]);
                weights.push(w * dphi);
            }
        }
        SphereRule { directions, weights }
    }

    /// `∫_{S²} g(ω) dω`.
    pub fn integrate<G: Fn(Vec3) -> f64>(&self, g: G) -> f64 {
        self.directions
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| w * g(*d))
            .sum()
    }

    /// `(∫ g, ∫ |g|)`.
    pub fn integrate_with_magnitude<G: Fn(Vec3) -> f64>(&self, g: G) -> (f64, f64) {
        self.directions
            .iter()
            .zip(&self.weights)
            .fold((0.0, 0.0), |(v, m), (d, w)| {
                let y = g(*d);
                (v + w * y, m + w * y.abs())
            })
    }
}

/// Radial integration region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Ball { radius: f64 },
    Shell { inner: f64, outer: f64 },
    /// `|x| ≥ inner`, integrated up to `cutoff` with a power-law tail
    /// correction beyond.
    Exterior { inner: f64, cutoff: f64 },
}

impl Domain {
    /// Exterior of `inner` with the default truncation radius.
    pub fn exterior(inner: f64) -> Self {
        Domain::Exterior {
            inner,
            cutoff: EXTERIOR_TRUNCATION * inner,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Domain::Ball { radius } => radius > 0.0 && radius.is_finite(),
            Domain::Shell { inner, outer } => inner >= 0.0 && outer > inner && outer.is_finite(),
            Domain::Exterior { inner, cutoff } => inner > 0.0 && cutoff > inner && cutoff.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("bad domain {self:?}")))
        }
    }

    fn radial_range(&self) -> (f64, f64) {
        match *self {
            Domain::Ball { radius } => (0.0, radius),
            Domain::Shell { inner, outer } => (inner, outer),
            Domain::Exterior { inner, cutoff } => (inner, cutoff),
        }
    }

    fn breakpoints(&self, extra: &[f64]) -> Vec<f64> {
        let (lo, hi) = self.radial_range();
        let mut pts = vec![lo, hi];
        if let Domain::Exterior { inner, cutoff } = *self {
            let mut r = 2.0 * inner;
            while r < cutoff {
                pts.push(r);
                r *= 2.0;
            }
        }
        pts.extend(extra.iter().copied().filter(|r| *r > lo && *r < hi));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// A volume integral, split into the quadrature part and (for exterior
/// domains) the analytic tail beyond the truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeIntegral {
    pub value: f64,
    pub abs_err: f64,
    pub truncated: f64,
    pub tail: f64,
}

fn radial_integral<G>(g: &G, domain: &Domain, breaks: &[f64], rule: &SphereRule, opts: &QuadratureOptions) -> Result<Integral>
where
    G: Fn(Vec3) -> f64 + Sync,
{
    integrate_1d_scaled(
        |r| {
            if r == 0.0 {
                return (0.0, 0.0);
            }
            let (v, m) = rule.integrate_with_magnitude(|d| g(d.map(|t| t * r)));
            (r * r * v, r * r * m)
        },
        &domain.breakpoints(breaks),
        opts,
    )
}

/// `∫_domain g(x) dx` with extra radial breakpoints where `g` has kinks.
pub fn integrate_volume<G>(g: G, domain: Domain, breaks: &[f64], opts: &QuadratureOptions) -> Result<VolumeIntegral>
where
    G: Fn(Vec3) -> f64 + Sync,
{
    domain.validate()?;
    let (n_theta, n_phi) = opts.angular_orders;
    let mut coarse = radial_integral(&g, &domain, breaks, &SphereRule::product(n_theta, n_phi), opts)?;
    let mut accepted = None;
    for level in 1..=opts.max_angular_doublings {
        let fine_rule = SphereRule::product(n_theta << level, n_phi << level);
        let fine = radial_integral(&g, &domain, breaks, &fine_rule, opts)?;
        let angular_err = (fine.value - coarse.value).abs();
        if angular_err <= opts.tolerance(fine.magnitude) {
            accepted = Some((fine.value, fine.abs_err + angular_err, fine_rule));
            break;
        }
        coarse = fine;
    }
    let (truncated, abs_err, rule) = match accepted {
        Some(v) => v,
        None => {
            return Err(Error::Accuracy {
                value: coarse.value,
                abs_err: coarse.abs_err,
            })
        }
    };
    let tail = match domain {
        Domain::Exterior { cutoff, .. } => power_law_tail(&g, cutoff, &rule)?,
        _ => 0.0,
    };
    Ok(VolumeIntegral {
        value: truncated + tail,
        abs_err: abs_err + 0.1 * tail.abs(),
        truncated,
        tail,
    })
}

/// `∫_{r_c}^∞ ρ(r) dr` for the shell density `ρ(r) = r² ∫ g(rω) dω`, with
/// `ρ` extrapolated as the power law through `r_c/2` and `r_c`.
fn power_law_tail<G: Fn(Vec3) -> f64>(g: &G, cutoff: f64, rule: &SphereRule) -> Result<f64> {
    let rho = |r: f64| r * r * rule.integrate(|d| g(d.map(|t| t * r)));
    let (near, far) = (rho(0.5 * cutoff), rho(cutoff));
    if far == 0.0 {
        return Ok(0.0);
    }
    if !(near > 0.0 && far > 0.0) {
        return Err(Error::InvalidInput(
            "tail correction needs a positive integrand near the cutoff".into(),
        ));
    }
    let slope = (far / near).ln() / std::f64::consts::LN_2;
    if slope >= -1.0 {
        return Err(Error::InvalidInput(format!(
            "integrand decays like r^{slope:.3} at the cutoff; exterior integral diverges"
        )));
    }
    Ok(far * cutoff / (-slope - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpNorm {
    pub value: f64,
    pub abs_err: f64,
    /// Tail contribution to `∫ f^p` beyond the truncation radius.
    pub tail: f64,
}

/// `(∫_domain f^p)^{1/p}` for non-negative `f`.
pub fn lp_norm<G>(f: G, p: f64, domain: Domain, opts: &QuadratureOptions) -> Result<LpNorm>
where
    G: Fn(Vec3) -> f64 + Sync,
{
    lp_norm_with_breaks(f, p, domain, &[], opts)
}

pub fn lp_norm_with_breaks<G>(f: G, p: f64, domain: Domain, breaks: &[f64], opts: &QuadratureOptions) -> Result<LpNorm>
where
    G: Fn(Vec3) -> f64 + Sync,
{
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("p must be >= 1, got {p}")));
    }
    let int = integrate_volume(|x| f(x).abs().powf(p), domain, breaks, opts)?;
    let value = int.value.max(0.0).powf(1.0 / p);
    let abs_err = if int.value > 0.0 {
        value / (p * int.value) * int.abs_err
    } else {
        int.abs_err.powf(1.0 / p)
    };
    Ok(LpNorm {
        value,
        abs_err,
        tail: int.tail,
    })
}

/// Smooth cutoff: 1 on `|x| ≤ R`, 0 on `|x| ≥ 2R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffFunction {
    pub radius: f64,
}

impl CutoffFunction {
    pub fn new(radius: f64) -> Self {
        CutoffFunction { radius }
    }

    /// `χ_R(x) = s((2R − |x|)/R)` with the C² smoothstep `s(t) = 6t⁵ − 15t⁴ + 10t³`.
    pub fn value(&self, x: Vec3) -> f64 {
        self.radial(norm3(&x))
    }

    pub fn radial(&self, r: f64) -> f64 {
        let t = ((2.0 * self.radius - r) / self.radius).clamp(0.0, 1.0);
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }
}

/// The three exterior terms of `V_A = 2A^j∂_j + (∂_jA^j) + A^jA_j`,
/// each measured in `L³`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TailTerm {
    /// `|A|`
    I,
    /// `|∇A|`
    II,
    /// `|A|²`
    III,
}

impl TailTerm {
    pub const ALL: [TailTerm; 3] = [TailTerm::I, TailTerm::II, TailTerm::III];

    pub fn label(&self) -> &'static str {
        match self {
            TailTerm::I => "I",
            TailTerm::II => "II",
            TailTerm::III => "III",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.label().eq_ignore_ascii_case(s))
    }

    pub fn pointwise<F: ConnectionField + ?Sized>(&self, field: &F, x: Vec3) -> f64 {
        match self {
            TailTerm::I => connection_norm(&field.eval(x)),
            TailTerm::II => jacobian_norm(&central_jacobian(field, x, fd_step(norm3(&x)))),
            TailTerm::III => connection_norm(&field.eval(x)).powi(2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSample {
    pub radius: f64,
    pub value: f64,
    pub abs_err: f64,
    pub tail: f64,
}

/// `‖(1 − χ_R) q‖_{L³}` for each `R`.
pub fn tail_norm_scan<F: ConnectionField + ?Sized>(
    field: &F,
    term: TailTerm,
    radii: &[f64],
    opts: &QuadratureOptions,
) -> Result<Vec<TailSample>> {
    if radii.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "tail scan needs at least 4 radii, got {}",
            radii.len()
        )));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::InvalidInput("tail radii must be positive and increasing".into()));
    }
    radii
        .par_iter()
        .map(|&radius| {
            let chi = CutoffFunction::new(radius);
            let norm = lp_norm_with_breaks(
                |x| (1.0 - chi.value(x)) * term.pointwise(field, x),
                3.0,
                Domain::exterior(radius),
                &[2.0 * radius],
                opts,
            )?;
            Ok(TailSample {
                radius,
                value: norm.value,
                abs_err: norm.abs_err,
                tail: norm.tail,
            })
        })
        .collect()
}

/// Log–log slope of a tail scan.
pub fn tail_slope(samples: &[TailSample]) -> Result<PowerLawFit> {
    let r: Vec<f64> = samples.iter().map(|s| s.radius).collect();
    let v: Vec<f64> = samples.iter().map(|s| s.value).collect();
    fit_power_law(&r, &v)
}

/// `(‖ψ‖²_{L²}, ‖d_Aψ‖²_{L²})`; their sum is the squared `H¹_A` norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyNorm {
    pub l2: f64,
    pub covariant: f64,
    pub abs_err: f64,
}

impl EnergyNorm {
    pub fn h1_squared(&self) -> f64 {
        self.l2 + self.covariant
    }
}

pub fn energy_norm<S, F>(psi: &S, field: &F, domain: Domain, opts: &QuadratureOptions) -> Result<EnergyNorm>
where
    S: Section + ?Sized,
    F: ConnectionField + ?Sized,
{
    energy_norm_with_breaks(psi, field, domain, &[], opts)
}

pub fn energy_norm_with_breaks<S, F>(
    psi: &S,
    field: &F,
    domain: Domain,
    breaks: &[f64],
    opts: &QuadratureOptions,
) -> Result<EnergyNorm>
where
    S: Section + ?Sized,
    F: ConnectionField + ?Sized,
{
    if let Domain::Exterior { .. } = domain {
        return Err(Error::InvalidInput(
            "energy norm needs a bounded domain containing the support".into(),
        ));
    }
    let l2 = integrate_volume(|x| spinor_norm_sq(&psi.value(x)), domain, breaks, opts)?;
    let cov = integrate_volume(|x| covariant_energy_density(psi, field, x), domain, breaks, opts)?;
    Ok(EnergyNorm {
        l2: l2.value,
        covariant: cov.value,
        abs_err: l2.abs_err + cov.abs_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{hedgehog, Flat, RadialProfile};
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
        // ∫ x^30 = 2/31 is within degree 2n − 1.
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert_relative_eq!(v, 2.0 / 31.0, max_relative = 1e-13);
    }

    #[test]
    fn one_dimensional_adaptivity() {
        let opts = QuadratureOptions::default();
        let v = integrate_1d(|x: f64| x.sqrt(), &[0.0, 1.0], &opts).unwrap();
        assert_relative_eq!(v.value, 2.0 / 3.0, max_relative = 1e-10);
        let tight = QuadratureOptions {
            max_intervals: 2,
            rel_tol: 1e-15,
            ..opts
        };
        assert!(matches!(
            integrate_1d(|x: f64| x.sqrt(), &[0.0, 1.0], &tight),
            Err(Error::Accuracy { .. })
        ));
    }

    #[test]
    fn sphere_rule_area() {
        let rule = SphereRule::product(16, 32);
        assert_relative_eq!(rule.integrate(|_| 1.0), 4.0 * std::f64::consts::PI, max_relative = 1e-14);
    }

    #[test]
    fn low_degree_polynomials_on_balls_are_exact() {
        let opts = QuadratureOptions::default();
        let pi = std::f64::consts::PI;
        let r: f64 = 1.7;
        // ∫_B 1 = 4πR³/3, ∫_B x² = 4πR⁵/15, ∫_B x²y² = 4πR⁷/105, ∫_B z⁴ = 4πR⁷/35.
        let cases: Vec<(Box<dyn Fn(Vec3) -> f64 + Sync>, f64)> = vec![
            (Box::new(|_| 1.0), 4.0 * pi * r.powi(3) / 3.0),
            (Box::new(|x: Vec3| x[0] * x[0]), 4.0 * pi * r.powi(5) / 15.0),
            (Box::new(|x: Vec3| x[0] * x[0] * x[1] * x[1] + 2.0 * x[2].powi(4)), 4.0 * pi * r.powi(7) * (1.0 / 105.0 + 2.0 / 35.0)),
            (Box::new(|x: Vec3| x[0].powi(5) + x[1] * x[2].powi(3)), 0.0),
        ];
        for (g, exact) in cases {
            let v = integrate_volume(g, Domain::Ball { radius: r }, &[], &opts).unwrap();
            assert!((v.value - exact).abs() <= 1e-12 * (1.0 + exact.abs()), "{} vs {exact}", v.value);
        }
    }

    #[test]
    fn domain_additivity() {
        let opts = QuadratureOptions::default();
        let g = |x: Vec3| (-norm3(&x)).exp() * (1.0 + 0.3 * x[0] * x[1]);
        let whole = integrate_volume(g, Domain::Ball { radius: 5.0 }, &[], &opts).unwrap();
        let inner = integrate_volume(g, Domain::Ball { radius: 2.0 }, &[], &opts).unwrap();
        let shell = integrate_volume(g, Domain::Shell { inner: 2.0, outer: 5.0 }, &[], &opts).unwrap();
        let err = whole.abs_err + inner.abs_err + shell.abs_err;
        assert!((whole.value - inner.value - shell.value).abs() <= err.max(1e-13));
    }

    /// `(1 − r²)⁴` on the unit ball has `∫ b² = 4π · 10321920/654729075`
    /// (a Beta integral), so dividing by its square root gives unit mass.
    #[test]
    fn unit_mass_bump() {
        let mass = 4.0 * std::f64::consts::PI * 10321920.0 / 654729075.0;
        let c = mass.sqrt().recip();
        let bump = |x: Vec3| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            if r2 < 1.0 { c * (1.0 - r2).powi(4) } else { 0.0 }
        };
        let n = lp_norm(bump, 2.0, Domain::Ball { radius: 1.0 }, &QuadratureOptions::default()).unwrap();
        assert!((n.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn cutoff_shape() {
        let chi = CutoffFunction::new(3.0);
        assert_eq!(chi.radial(0.0), 1.0);
        assert_eq!(chi.radial(3.0), 1.0);
        assert_eq!(chi.radial(6.0), 0.0);
        assert_eq!(chi.radial(60.0), 0.0);
        let mut prev = 1.0;
        for k in 0..=300 {
            let v = chi.radial(3.0 + 3.0 * k as f64 / 300.0);
            assert!((0.0..=1.0).contains(&v) && v <= prev);
            prev = v;
        }
        // Derivative bounded by the smoothstep's maximum slope 15/8 per R.
        let h = 1e-6;
        for k in 1..300 {
            let r = 3.0 + 3.0 * k as f64 / 300.0;
            let d = (chi.radial(r + h) - chi.radial(r - h)) / (2.0 * h);
            assert!(d.abs() <= 15.0 / 8.0 / 3.0 + 1e-6);
        }
    }

    #[test]
    fn exterior_tail_of_known_power() {
        // ∫_{|x|>R} |x|^{-5} dx = 4π/(2R²).
        let opts = QuadratureOptions::default();
        let v = integrate_volume(|x| norm3(&x).powi(-5), Domain::exterior(2.0), &[], &opts).unwrap();
        let exact = 4.0 * std::f64::consts::PI / (2.0 * 4.0);
        assert_relative_eq!(v.value, exact, max_relative = 1e-9);
        assert!(v.tail > 0.0 && v.tail < 1e-3 * exact);
    }

    #[test]
    fn non_integrable_tail_is_an_error() {
        let opts = QuadratureOptions::default();
        assert!(integrate_volume(|x| norm3(&x).powi(-3), Domain::exterior(1.0), &[], &opts).is_err());
    }

    #[test]
    fn lp_norm_rejects_small_p() {
        assert!(lp_norm(|_| 1.0, 0.5, Domain::Ball { radius: 1.0 }, &QuadratureOptions::default()).is_err());
    }

    #[test]
    fn tail_scan_preconditions_and_flat_field() {
        let opts = QuadratureOptions::default();
        assert!(tail_norm_scan(&Flat, TailTerm::I, &[4.0, 8.0, 16.0], &opts).is_err());
        assert!(tail_norm_scan(&Flat, TailTerm::I, &[4.0, 8.0, 8.0, 16.0], &opts).is_err());
        for term in TailTerm::ALL {
            let s = tail_norm_scan(&Flat, term, &[4.0, 8.0, 16.0, 32.0], &opts).unwrap();
            assert!(s.iter().all(|t| t.value == 0.0));
        }
    }

    #[test]
    fn tail_norms_are_monotone() {
        let h = hedgehog(RadialProfile::critical(1.0)).unwrap();
        let opts = QuadratureOptions::default();
        let s = tail_norm_scan(&h, TailTerm::I, &[2.0, 3.0, 5.0, 8.0, 13.0], &opts).unwrap();
        assert!(s.windows(2).all(|w| w[1].value < w[0].value));
    }

    #[test]
    fn energy_norm_rejects_exterior() {
        let psi = crate::section::GaussianSection::new([0.0; 3], 1.0, [num_complex::Complex64::new(1.0, 0.0), num_complex::Complex64::new(0.0, 0.0)]);
        assert!(energy_norm(&psi, &Flat, Domain::exterior(1.0), &QuadratureOptions::default()).is_err());
    }
}
