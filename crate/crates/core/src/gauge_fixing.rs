//! Lattice Coulomb gauge: site-local relaxation of the functional
//! `Σ_links Re tr U` over internal links, plaquette curvature, and the
//! lattice divergence of `A_d(x) = algebra_part(U_d(x))/h`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::GaugeFunction;
use crate::error::{Error, Result};
use crate::lanczos::pairwise_sum_real;
use crate::lattice::{random_algebra, GridField, LatticeSpec, LinkField};
use crate::su2::{GroupElement, Su2, Su2Matrix};

/// `g(x) ∈ SU(2)` per lattice site.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransformField {
    pub spec: LatticeSpec,
    pub g: Vec<GroupElement>,
}

impl GaugeTransformField {
    pub fn identity(spec: LatticeSpec) -> Self {
        GaugeTransformField {
            spec,
            g: vec![Su2Matrix::IDENTITY; spec.sites()],
        }
    }

    /// Independent `exp(X)` per site, `|X| ≤ amplitude`.
    pub fn random(spec: LatticeSpec, seed: u64, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GaugeTransformField {
            spec,
            g: (0..spec.sites()).map(|_| random_algebra(&mut rng, amplitude).exp()).collect(),
        }
    }

    /// Samples a continuum gauge function at the sites.
    pub fn sample<G: GaugeFunction + ?Sized>(spec: LatticeSpec, gauge: &G) -> Self {
        GaugeTransformField {
            spec,
            g: (0..spec.sites())
                .into_par_iter()
                .map(|s| gauge.value(spec.position(spec.coords(s))))
                .collect(),
        }
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.g.iter().map(|u| u.unitarity_defect()).fold(0.0, f64::max)
    }

    /// `ψ ↦ gψ` sitewise.
    pub fn act(&self, psi: &GridField) -> Result<GridField> {
        if psi.spec != self.spec {
            return Err(Error::InvalidInput("gauge field does not match the grid".into()));
        }
        let mut out = psi.clone();
        out.data.par_chunks_mut(2).enumerate().for_each(|(s, v)| {
            let w = self.g[s].apply(&[v[0], v[1]]);
            v[0] = w[0];
            v[1] = w[1];
        });
        Ok(out)
    }

    /// `(g ∘ h)(x) = g(x) h(x)`.
    pub fn compose(&self, other: &GaugeTransformField) -> GaugeTransformField {
        GaugeTransformField {
            spec: self.spec,
            g: self.g.iter().zip(&other.g).map(|(a, b)| *a * *b).collect(),
        }
    }
}

/// Pure-gauge links `U_d(x) = g(x) g(x + e_d)†`.
pub fn pure_gauge_links(g: &GaugeTransformField) -> LinkField {
    LinkField::flat(g.spec)
        .gauge_transform(g)
        .expect("matching lattice")
}

fn is_internal(spec: &LatticeSpec, s: usize, d: usize) -> bool {
    spec.neighbor(s, d, true).is_some()
}

/// Lattice connection `A_d(x)` on internal links, zero elsewhere.
pub fn lattice_connection(links: &LinkField, s: usize, d: usize) -> Su2 {
    if is_internal(&links.spec, s, d) {
        links.link(s, d).algebra_part() * (1.0 / links.spec.h())
    } else {
        Su2::ZERO
    }
}

/// `Σ_d [A_d(x) − A_d(x − e_d)]/h`.
pub fn lattice_divergence(links: &LinkField, s: usize) -> Su2 {
    let spec = links.spec;
    let mut div = Su2::ZERO;
    for d in 0..3 {
        div += lattice_connection(links, s, d);
        if let Some(t) = spec.neighbor(s, d, false) {
            div -= lattice_connection(links, t, d);
        }
    }
    div * (1.0 / spec.h())
}

fn is_interior(spec: &LatticeSpec, s: usize) -> bool {
    spec.coords(s).iter().all(|&c| c >= 1 && c + 2 <= spec.n)
}

/// `(h³ Σ_interior |div A|²)^{1/2}`.
pub fn coulomb_residual(links: &LinkField) -> f64 {
    let spec = links.spec;
    let parts: Vec<f64> = (0..spec.sites())
        .into_par_iter()
        .with_min_len(4096)
        .map(|s| if is_interior(&spec, s) { lattice_divergence(links, s).norm_sq() } else { 0.0 })
        .collect();
    (spec.h().powi(3) * pairwise_sum_real(&parts)).sqrt()
}

/// Largest `|div A|` over interior sites.
pub fn max_divergence(links: &LinkField) -> f64 {
    let spec = links.spec;
    (0..spec.sites())
        .into_par_iter()
        .filter(|&s| is_interior(&spec, s))
        .map(|s| lattice_divergence(links, s).norm())
        .reduce(|| 0.0, f64::max)
}

/// `Σ_internal links Re tr U`, the quantity the relaxation increases.
pub fn gauge_functional(links: &LinkField) -> f64 {
    let spec = links.spec;
    let parts: Vec<f64> = (0..spec.sites())
        .into_par_iter()
        .with_min_len(4096)
        .map(|s| {
            (0..3)
                .filter(|&d| is_internal(&spec, s, d))
                .map(|d| links.link(s, d).re_trace())
                .sum()
        })
        .collect();
    pairwise_sum_real(&parts)
}

/// Lattice `‖A‖²` with `|A_d(x)|² ≈ (8/h²)(1 − ½ Re tr U_d(x))`, weighted by `h³`.
pub fn lattice_norm_sq(links: &LinkField) -> f64 {
    let spec = links.spec;
    let h = spec.h();
    let count: usize = (0..spec.sites())
        .map(|s| (0..3).filter(|&d| is_internal(&spec, s, d)).count())
        .sum();
    h.powi(3) * (8.0 / (h * h)) * (count as f64 - 0.5 * gauge_functional(links))
}

/// Plaquette curvature `F_de(x) = algebra_part(U_d(x) U_e(x+d) U_d(x+e)† U_e(x)†)/h²`
/// at sites where the plaquette lies inside the box; `None` elsewhere.
pub fn plaquette_curvature(links: &LinkField, s: usize) -> Option<[Su2; 3]> {
    let spec = links.spec;
    let mut out = [Su2::ZERO; 3];
    for (slot, (d, e)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        let sd = spec.neighbor(s, d, true)?;
        let se = spec.neighbor(s, e, true)?;
        let p = links.link(s, d) * links.link(sd, e) * links.link(se, d).adjoint() * links.link(s, e).adjoint();
        out[slot] = p.algebra_part() * (1.0 / (spec.h() * spec.h()));
    }
    Some(out)
}

/// `|F(x)|` at every site with a full set of plaquettes (others `0`).
pub fn curvature_norms(links: &LinkField) -> Vec<f64> {
    (0..links.spec.sites())
        .into_par_iter()
        .map(|s| {
            plaquette_curvature(links, s).map_or(0.0, |f| f.iter().map(|c| c.norm_sq()).sum::<f64>().sqrt())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeFixOptions {
    pub tol: f64,
    pub max_sweeps: usize,
    /// Overrelaxation exponent, `0 < ω < 2`.
    pub omega: f64,
}

impl Default for GaugeFixOptions {
    fn default() -> Self {
        GaugeFixOptions {
            tol: 1e-6,
            max_sweeps: 5000,
            omega: 1.7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GaugeFixResult {
    pub g: GaugeTransformField,
    pub links: LinkField,
    /// Coulomb residual before the first sweep and after each sweep.
    pub residual_history: Vec<f64>,
    pub functional_history: Vec<f64>,
}

/// Local maximizer `g = (K†/|K|)^ω` of `Re tr(g K)`,
/// `K = Σ_d [U_d(x) + U_d(x − e_d)†]` over internal links.
fn local_update(links: &LinkField, s: usize, omega: f64) -> GroupElement {
    let spec = links.spec;
    let mut k = Su2Matrix::ZERO;
    for d in 0..3 {
        if is_internal(&spec, s, d) {
            k += links.link(s, d);
        }
        if let Some(t) = spec.neighbor(s, d, false) {
            k += links.link(t, d).adjoint();
        }
    }
    let det = k.det();
    if !(det > 0.0) {
        return Su2Matrix::IDENTITY;
    }
    let best = k.adjoint().scale(1.0 / det.sqrt());
    if omega == 1.0 {
        best
    } else {
        best.powf(omega)
    }
}

fn sweep(links: &mut LinkField, total: &mut GaugeTransformField, omega: f64) {
    let spec = links.spec;
    for parity in 0..2 {
        let color = |s: usize| spec.coords(s).iter().sum::<usize>() % 2 == parity;
        let snapshot = &*links;
        let update: Vec<GroupElement> = (0..spec.sites())
            .into_par_iter()
            .map(|s| if color(s) { local_update(snapshot, s, omega) } else { Su2Matrix::IDENTITY })
            .collect();
        let g = GaugeTransformField { spec, g: update };
        *links = links.gauge_transform(&g).expect("matching lattice");
        *total = g.compose(total);
    }
}

/// Relaxes to the lattice Coulomb gauge. Returns the accumulated transform
/// (`Ã = g·A`), the transformed links and the per-sweep histories.
pub fn fix_coulomb(links: &LinkField, opts: &GaugeFixOptions) -> Result<GaugeFixResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if !(opts.omega > 0.0 && opts.omega < 2.0) {
        return Err(Error::InvalidInput(format!("overrelaxation must lie in (0, 2), got {}", opts.omega)));
    }
    let mut current = links.clone();
    let mut g = GaugeTransformField::identity(links.spec);
    let mut residual_history = vec![coulomb_residual(&current)];
    let mut functional_history = vec![gauge_functional(&current)];
    for _ in 0..opts.max_sweeps {
        if *residual_history.last().expect("non-empty") <= opts.tol {
            break;
        }
        sweep(&mut current, &mut g, opts.omega);
        residual_history.push(coulomb_residual(&current));
        functional_history.push(gauge_functional(&current));
    }
    if *residual_history.last().expect("non-empty") > opts.tol {
        return Err(Error::GaugeFixing {
            history: residual_history,
        });
    }
    Ok(GaugeFixResult {
        g,
        links: current,
        residual_history,
        functional_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> LatticeSpec {
        LatticeSpec::new(2.0, 10).unwrap()
    }

    #[test]
    fn flat_links_are_accepted_immediately() {
        let r = fix_coulomb(&LinkField::flat(spec()), &GaugeFixOptions::default()).unwrap();
        assert_eq!(r.residual_history, vec![0.0]);
        assert!(r.g.g.iter().all(|g| *g == Su2Matrix::IDENTITY));
    }

    #[test]
    fn pure_gauge_is_removed() {
        let g = GaugeTransformField::random(spec(), 1, 0.8);
        let links = pure_gauge_links(&g);
        assert!(coulomb_residual(&links) > 0.1);
        let r = fix_coulomb(&links, &GaugeFixOptions::default()).unwrap();
        assert!(r.residual_history.last().unwrap() <= &1e-6);
        assert!(r.functional_history.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs()));
        assert!(lattice_norm_sq(&r.links) < lattice_norm_sq(&links));
        assert!(curvature_norms(&r.links).iter().all(|f| *f < 1e-10));
    }

    #[test]
    fn curvature_norm_is_gauge_invariant() {
        let links = LinkField::random(spec(), 2, 0.5);
        let g = GaugeTransformField::random(spec(), 3, 2.0);
        let moved = links.gauge_transform(&g).unwrap();
        let (a, b) = (curvature_norms(&links), curvature_norms(&moved));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-10 * (1.0 + x)));
    }

    #[test]
    fn rejects_bad_options() {
        let links = LinkField::flat(spec());
        let bad_tol = GaugeFixOptions { tol: 0.0, ..GaugeFixOptions::default() };
        let bad_omega = GaugeFixOptions { omega: 2.0, ..GaugeFixOptions::default() };
        assert!(fix_coulomb(&links, &bad_tol).is_err());
        assert!(fix_coulomb(&links, &bad_omega).is_err());
    }

    #[test]
    fn sweep_budget_exhaustion_returns_history() {
        let g = GaugeTransformField::random(spec(), 4, 2.0);
        let opts = GaugeFixOptions { max_sweeps: 2, tol: 1e-12, ..GaugeFixOptions::default() };
        match fix_coulomb(&pure_gauge_links(&g), &opts) {
            Err(Error::GaugeFixing { history }) => assert_eq!(history.len(), 3),
            other => panic!("expected a gauge-fixing error, got {other:?}"),
        }
    }
}
