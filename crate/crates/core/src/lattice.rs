//! Box lattice with Dirichlet boundary and SU(2) link variables; the
//! covariant Laplacian is applied matrix-free.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{shifted, ConnectionField};
use crate::error::{Error, Result};
use crate::gauge_fixing::GaugeTransformField;
use crate::lanczos::{self, pairwise_sum_real, Eigenpair, HermitianOperator, LanczosOptions};
use crate::section::Section;
use crate::su2::{spinor_norm_sq, spinor_sub, GroupElement, Spinor, Su2, Su2Matrix, Vec3};

/// `[−L, L]³` sampled with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub half_width: f64,
    pub n: usize,
}

impl LatticeSpec {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidInput(format!("need at least 8 points per axis, got {n}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidInput(format!("box half-width must be positive, got {half_width}")));
        }
        Ok(LatticeSpec { half_width, n })
    }

    /// The box of half-width `L` whose spacing is `h` (`2L/h` must be an integer).
    pub fn with_spacing(half_width: f64, h: f64) -> Result<Self> {
        let cells = 2.0 * half_width / h;
        if (cells - cells.round()).abs() > 1e-9 * cells {
            return Err(Error::InvalidInput(format!("2L/h = {cells} is not an integer")));
        }
        Self::new(half_width, cells.round() as usize + 1)
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn sites(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn dof(&self) -> usize {
        2 * self.sites()
    }

    pub fn index(&self, c: [usize; 3]) -> usize {
        c[0] + self.n * (c[1] + self.n * c[2])
    }

    pub fn coords(&self, s: usize) -> [usize; 3] {
        [s % self.n, (s / self.n) % self.n, s / (self.n * self.n)]
    }

    pub fn position(&self, c: [usize; 3]) -> Vec3 {
        let h = self.h();
        c.map(|i| -self.half_width + i as f64 * h)
    }

    /// Neighbour of `s` one step along `+e_d` (`up`) or `−e_d`; `None` outside the box.
    pub fn neighbor(&self, s: usize, d: usize, up: bool) -> Option<usize> {
        let c = self.coords(s);
        let stride = [1, self.n, self.n * self.n][d];
        if up {
            (c[d] + 1 < self.n).then(|| s + stride)
        } else {
            (c[d] > 0).then(|| s - stride)
        }
    }
}

/// A `ℂ²`-valued function on the lattice sites.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub spec: LatticeSpec,
    /// Interleaved components, site `s` at `[2s, 2s + 1]`.
    pub data: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(spec: LatticeSpec) -> Self {
        GridField {
            spec,
            data: vec![Complex64::new(0.0, 0.0); spec.dof()],
        }
    }

    pub fn from_fn<F: Fn(Vec3) -> Spinor + Sync>(spec: LatticeSpec, f: F) -> Self {
        let mut out = Self::zeros(spec);
        out.data.par_chunks_mut(2).enumerate().for_each(|(s, v)| {
            let p = f(spec.position(spec.coords(s)));
            v[0] = p[0];
            v[1] = p[1];
        });
        out
    }

    pub fn from_section<S: Section + ?Sized>(spec: LatticeSpec, psi: &S) -> Self {
        Self::from_fn(spec, |x| psi.value(x))
    }

    pub fn random(spec: LatticeSpec, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridField {
            spec,
            data: (0..spec.dof())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        }
    }

    /// `sin(πk₁(i+1)/(n+1)) sin(…) sin(…) v`, an eigenvector of the free operator.
    pub fn sine_mode(spec: LatticeSpec, k: [usize; 3], v: Spinor) -> Self {
        let n1 = (spec.n + 1) as f64;
        let mut out = Self::zeros(spec);
        out.data.par_chunks_mut(2).enumerate().for_each(|(s, w)| {
            let c = spec.coords(s);
            let a: f64 = (0..3)
                .map(|d| (std::f64::consts::PI * (k[d] * (c[d] + 1)) as f64 / n1).sin())
                .product();
            w[0] = v[0] * a;
            w[1] = v[1] * a;
        });
        out
    }

    pub fn site(&self, s: usize) -> Spinor {
        [self.data[2 * s], self.data[2 * s + 1]]
    }

    /// `h³ Σ ⟨a, b⟩`.
    pub fn inner_h(&self, other: &GridField) -> Complex64 {
        lanczos::dot(&self.data, &other.data) * self.spec.h().powi(3)
    }

    pub fn norm_h(&self) -> f64 {
        lanczos::norm(&self.data) * self.spec.h().powf(1.5)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    fn check_spec(&self, spec: &LatticeSpec) -> Result<()> {
        if self.spec != *spec || self.data.len() != spec.dof() {
            return Err(Error::InvalidInput("grid field does not match the lattice".into()));
        }
        Ok(())
    }

    /// Writes `<stem>.bin` (little-endian `f64`, site-major, components
    /// `re0, im0, re1, im1`) and `<stem>.json` describing the layout.
    pub fn dump(&self, stem: &Path, name: &str) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidInput(format!("writing {}: {e}", stem.display()));
        let mut bytes = Vec::with_capacity(self.data.len() * 16);
        for v in &self.data {
            bytes.extend_from_slice(&v.re.to_le_bytes());
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
        std::fs::File::create(stem.with_extension("bin"))
            .and_then(|mut f| f.write_all(&bytes))
            .map_err(io)?;
        let meta = serde_json::json!({
            "name": name,
            "dims": [self.spec.n, self.spec.n, self.spec.n],
            "components": 2,
            "dtype": "complex128-le",
            "order": "x fastest, then y, then z; per site re0 im0 re1 im1",
            "spacing": self.spec.h(),
            "origin": vec![-self.spec.half_width; 3],
        });
        std::fs::write(stem.with_extension("json"), serde_json::to_vec_pretty(&meta).expect("json"))
            .map_err(io)?;
        Ok(())
    }
}

/// `U_d(x)` on the edge from `x` to `x + h e_d`, stored as `links[3 s + d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkField {
    pub spec: LatticeSpec,
    pub links: Vec<GroupElement>,
}

impl LinkField {
    pub fn flat(spec: LatticeSpec) -> Self {
        LinkField {
            spec,
            links: vec![Su2Matrix::IDENTITY; 3 * spec.sites()],
        }
    }

    /// `U_d(x) = exp(h A_d(x + h e_d / 2))`.
    pub fn from_field<F: ConnectionField + ?Sized>(spec: LatticeSpec, field: &F) -> Self {
        let h = spec.h();
        let mut links = vec![Su2Matrix::IDENTITY; 3 * spec.sites()];
        links.par_chunks_mut(3).enumerate().for_each(|(s, u)| {
            let x = spec.position(spec.coords(s));
            for (d, ud) in u.iter_mut().enumerate() {
                *ud = (field.eval(shifted(x, d, 0.5 * h))[d] * h).exp();
            }
        });
        LinkField { spec, links }
    }

    /// Independent random links `exp(X)` with `X` uniform in the ball of
    /// radius `amplitude`.
    pub fn random(spec: LatticeSpec, seed: u64, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let links = (0..3 * spec.sites())
            .map(|_| random_algebra(&mut rng, amplitude).exp())
            .collect();
        LinkField { spec, links }
    }

    pub fn link(&self, s: usize, d: usize) -> GroupElement {
        self.links[3 * s + d]
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.links
            .par_iter()
            .map(|u| u.unitarity_defect())
            .reduce(|| 0.0, f64::max)
    }

    /// `U_d(x) ↦ g(x) U_d(x) g(x + e_d)†`; outside the box `g = Id`.
    pub fn gauge_transform(&self, g: &GaugeTransformField) -> Result<LinkField> {
        if g.spec != self.spec {
            return Err(Error::InvalidInput("gauge field does not match the lattice".into()));
        }
        let spec = self.spec;
        let mut links = self.links.clone();
        links.par_chunks_mut(3).enumerate().for_each(|(s, u)| {
            for (d, ud) in u.iter_mut().enumerate() {
                let right = spec
                    .neighbor(s, d, true)
                    .map_or(Su2Matrix::IDENTITY, |t| g.g[t].adjoint());
                *ud = g.g[s] * *ud * right;
            }
        });
        Ok(LinkField { spec, links })
    }
}

pub(crate) fn random_algebra<R: Rng>(rng: &mut R, amplitude: f64) -> Su2 {
    loop {
        let c = [0, 1, 2].map(|_| rng.gen_range(-1.0..1.0));
        if c[0] * c[0] + c[1] * c[1] + c[2] * c[2] <= 1.0 {
            return Su2(c) * amplitude;
        }
    }
}

/// `(Δ_Aψ)(x) = −Σ_d [U_d(x)ψ(x+e_d) − 2ψ(x) + U_d(x−e_d)†ψ(x−e_d)]/h²`
/// with `ψ = 0` outside the box.
pub fn apply_operator(links: &LinkField, psi: &GridField) -> Result<GridField> {
    psi.check_spec(&links.spec)?;
    let mut out = GridField::zeros(links.spec);
    apply_raw(links, &psi.data, &mut out.data);
    Ok(out)
}

fn apply_raw(links: &LinkField, x: &[Complex64], y: &mut [Complex64]) {
    let spec = links.spec;
    let inv_h2 = 1.0 / (spec.h() * spec.h());
    y.par_chunks_mut(2).enumerate().for_each(|(s, out)| {
        let mut acc = [x[2 * s] * 6.0, x[2 * s + 1] * 6.0];
        for d in 0..3 {
            if let Some(t) = spec.neighbor(s, d, true) {
                let v = links.link(s, d).apply(&[x[2 * t], x[2 * t + 1]]);
                acc = spinor_sub(&acc, &v);
            }
            if let Some(t) = spec.neighbor(s, d, false) {
                let v = links.link(t, d).adjoint().apply(&[x[2 * t], x[2 * t + 1]]);
                acc = spinor_sub(&acc, &v);
            }
        }
        out[0] = acc[0] * inv_h2;
        out[1] = acc[1] * inv_h2;
    });
}

impl HermitianOperator for LinkField {
    fn dim(&self) -> usize {
        self.spec.dof()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        apply_raw(self, x, y);
    }

    /// Each of the seven stencil terms has norm at most its coefficient.
    fn norm_bound(&self) -> f64 {
        12.0 / (self.spec.h() * self.spec.h())
    }
}

/// Largest `|⟨Δφ, ψ⟩ − ⟨φ, Δψ⟩| / (‖φ‖‖ψ‖)` over seeded random pairs.
pub fn hermiticity_residual(links: &LinkField, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let phi = GridField::random(links.spec, seed.wrapping_add(2 * t as u64));
        let psi = GridField::random(links.spec, seed.wrapping_add(2 * t as u64 + 1));
        let a = apply_operator(links, &phi)?.inner_h(&psi);
        let b = phi.inner_h(&apply_operator(links, &psi)?);
        worst = worst.max((a - b).norm() / (phi.norm_h() * psi.norm_h()));
    }
    Ok(worst)
}

/// `⟨Δψ, ψ⟩_h / ‖ψ‖²_h`.
pub fn rayleigh_quotient(links: &LinkField, psi: &GridField) -> Result<f64> {
    psi.check_spec(&links.spec)?;
    let n2 = psi.norm_h().powi(2);
    if n2 == 0.0 {
        return Err(Error::InvalidInput("Rayleigh quotient of the zero field".into()));
    }
    Ok(apply_operator(links, psi)?.inner_h(psi).re / n2)
}

/// `h³ Σ_edges |U_d(x)ψ(x+e_d) − ψ(x)|²/h²` over every edge touching the box.
pub fn covariant_gradient_energy(links: &LinkField, psi: &GridField) -> Result<f64> {
    psi.check_spec(&links.spec)?;
    let spec = links.spec;
    let parts: Vec<f64> = (0..spec.sites())
        .into_par_iter()
        .with_min_len(4096)
        .map(|s| {
            let here = psi.site(s);
            let c = spec.coords(s);
            let mut e = 0.0;
            for d in 0..3 {
                let fwd = spec
                    .neighbor(s, d, true)
                    .map_or([Complex64::new(0.0, 0.0); 2], |t| links.link(s, d).apply(&psi.site(t)));
                e += spinor_norm_sq(&spinor_sub(&fwd, &here));
                if c[d] == 0 {
                    // Edge from the ghost site below.
                    e += spinor_norm_sq(&here);
                }
            }
            e
        })
        .collect();
    let h = spec.h();
    Ok(pairwise_sum_real(&parts) * h)
}

/// Eigenvalue of the free operator for the sine mode `k` (entries ≥ 1).
pub fn flat_eigenvalue(spec: &LatticeSpec, k: [usize; 3]) -> f64 {
    let h = spec.h();
    let n1 = (spec.n + 1) as f64;
    k.iter()
        .map(|&kj| 2.0 - 2.0 * (std::f64::consts::PI * kj as f64 / n1).cos())
        .sum::<f64>()
        / (h * h)
}

/// The `count` smallest distinct free eigenvalues.
pub fn flat_spectrum(spec: &LatticeSpec, count: usize) -> Vec<f64> {
    let kmax = (count + 2).min(spec.n);
    let mut all = Vec::new();
    for a in 1..=kmax {
        for b in 1..=kmax {
            for c in 1..=kmax {
                all.push(flat_eigenvalue(spec, [a, b, c]));
            }
        }
    }
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for v in all {
        if out.last().map_or(true, |l| v - l > 1e-9 * v) {
            out.push(v);
        }
        if out.len() == count {
            break;
        }
    }
    out
}

/// The `k` lowest eigenvalues of the lattice operator (degenerate values once).
pub fn lowest_eigenvalues(links: &LinkField, k: usize, tol: f64, max_iter: usize) -> Result<Vec<Eigenpair>> {
    let opts = LanczosOptions {
        tol,
        max_iter,
        ..LanczosOptions::default()
    };
    lowest_eigenvalues_with(links, k, &opts)
}

pub fn lowest_eigenvalues_with(links: &LinkField, k: usize, opts: &LanczosOptions) -> Result<Vec<Eigenpair>> {
    if k > links.spec.sites() {
        return Err(Error::InvalidInput(format!(
            "requested {k} eigenvalues on {} sites",
            links.spec.sites()
        )));
    }
    Ok(lanczos::lowest(links, k, opts)?.pairs)
}
