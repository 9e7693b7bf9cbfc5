//! One runner per subcommand. Each validates its section, runs the
//! library operation and turns the result into report rows and assertions.
//!
//! Bad parameters come back as [`ConfigError`]. Failures of the numerics
//! themselves (quadrature floor, solver budget, degenerate fits) are kept
//! in the report as flagged rows or as `Report::error`.

use std::path::Path;

use gaugelab::connection::{ConnectionField, Hedgehog, RadialProfile};
use gaugelab::curvature::{
    curvature_analytic_hedgehog, curvature_analytic_hedgehog_flipped, curvature_numeric, decay_exponent_fit,
    DecayQuantity,
};
use gaugelab::fit::{fit_power_law, PowerLawFit};
use gaugelab::gauge_fixing::{
    coulomb_residual, curvature_norms, fix_coulomb, lattice_norm_sq, GaugeFixOptions, GaugeTransformField,
};
use gaugelab::lanczos::{self, LanczosOptions};
use gaugelab::lattice::{flat_spectrum, GridField, LatticeSpec, LinkField};
use gaugelab::quadrature::{tail_norm_scan, tail_slope, QuadratureOptions, TailTerm};
use gaugelab::section::PlaneWaveSection;
use gaugelab::su2::{contraction_identity_residual, Spinor, CONTRACTION_SIGN_CORRECT, CONTRACTION_SIGN_FLIPPED};
use gaugelab::weyl::{ball_samples, build_packet, kato_deficit, shell_samples, weyl_row, BumpProfile, KatoResult};
use gaugelab::Error;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::Config;
use crate::report::{Report, Row};
use crate::ConfigError;

type Outcome = Result<Report, ConfigError>;

/// Library input errors are configuration errors; anything else is kept.
fn split(e: Error) -> Result<Error, ConfigError> {
    match e {
        Error::InvalidInput(msg) => Err(ConfigError(msg)),
        other => Ok(other),
    }
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn start(experiment: &'static str, columns: &[&'static str], cfg: &Config, field: &dyn ConnectionField) -> Report {
    let mut r = Report::new(experiment, columns);
    r.field = field.name();
    r.kappa = cfg.field.kappa();
    r.extra_decay = cfg.field.extra_decay();
    r
}

fn increasing_positive(xs: &[f64]) -> bool {
    xs.first().is_some_and(|x| *x > 0.0 && x.is_finite())
        && xs.windows(2).all(|w| w[1] > w[0] && w[1].is_finite())
}

fn fit_cells(row: Row, fit: &PowerLawFit) -> Row {
    row.set("slope", fit.slope)
        .set("intercept", fit.intercept)
        .set("fit_residual", fit.residual)
}

/// Checks a fitted slope against an expectation, when there is one.
fn check_slope(report: &mut Report, name: &str, slope: Option<f64>, expected: Option<f64>, tol: f64) {
    let Some(want) = expected else { return };
    match slope {
        Some(s) => report.assert(
            format!("{name} slope"),
            (s - want).abs() <= tol,
            format!("{s} vs {want} ± {tol}"),
        ),
        None => report.assert(format!("{name} slope"), false, format!("no fit; expected {want}")),
    }
}

pub fn curvature_scan(cfg: &Config) -> Outcome {
    const COLUMNS: [&str; 12] = [
        "kind", "quantity", "r_min", "r_max", "samples", "radius", "value", "slope", "intercept",
        "fit_residual", "prefactor", "expected_slope",
    ];
    let c = &cfg.curvature_scan;
    let quantities = c
        .quantities
        .iter()
        .map(|q| DecayQuantity::parse(q).ok_or_else(|| bad(format!("unknown quantity {q:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if quantities.is_empty() {
        return Err(bad("curvature-scan.quantities is empty"));
    }
    let expected = c.expected(&cfg.field);
    if let Some(k) = expected.keys().find(|k| DecayQuantity::parse(k).is_none()) {
        return Err(bad(format!("expected_slopes names unknown quantity {k:?}")));
    }
    let field = cfg.field.build()?;
    let mut report = start("curvature-scan", &COLUMNS, cfg, field.as_ref());
    if let Some(p) = cfg.field.profile() {
        let r: f64 = 1e4;
        report.notes.push(format!(
            "r^4 f'(r) at r = 1e4 is {:e}; the leading coefficient -3 kappa is {:e}",
            p.df(r) * r.powi(4),
            -3.0 * p.kappa()
        ));
        report.notes.push(contraction_note());
        report.notes.push(sign_comparison(&p));
    }
    let params = |row: Row, q: DecayQuantity| {
        row.set("quantity", q.label())
            .set("r_min", c.r_min)
            .set("r_max", c.r_max)
            .set("samples", c.samples)
    };
    for q in quantities {
        let want = expected.iter().find(|(k, _)| DecayQuantity::parse(k) == Some(q)).map(|(_, v)| *v);
        match decay_exponent_fit(field.as_ref(), q, c.r_min, c.r_max, c.samples) {
            Ok(fit) => {
                for (r, m) in fit.radii.iter().zip(&fit.maxima) {
                    report.rows.push(params(Row::new().set("kind", "sample"), q).set("radius", *r).set("value", *m));
                }
                let mut row = fit_cells(params(Row::new().set("kind", "fit"), q), &fit.fit)
                    .set("prefactor", fit.fit.prefactor())
                    .maybe("expected_slope", want);
                if !fit.fit.is_power_law() {
                    row.add_flag("not-power-law");
                }
                report.rows.push(row);
                check_slope(&mut report, q.label(), Some(fit.fit.slope), want, c.slope_tolerance);
            }
            Err(e) => {
                let e = split(e)?;
                let degenerate = matches!(e, Error::DegenerateFit(_));
                report.rows.push(
                    params(Row::new().set("kind", "fit"), q)
                        .maybe("expected_slope", want)
                        .flagged(if degenerate { "degenerate-fit" } else { "failed" }),
                );
                report.notes.push(e.to_string());
                check_slope(&mut report, q.label(), None, want, c.slope_tolerance);
                if !degenerate {
                    report.error = Some(e.to_string());
                    break;
                }
            }
        }
    }
    Ok(report)
}

fn contraction_note() -> String {
    let x = [0.3, -1.1, 0.7];
    format!(
        "contraction identity eps_bcd eps_cim eps_djn x^m x^n = s x^b eps_ijn x^n at x = {x:?}: \
         residual {:e} for s = +1, {:e} for s = -1",
        contraction_identity_residual(x, CONTRACTION_SIGN_CORRECT),
        contraction_identity_residual(x, CONTRACTION_SIGN_FLIPPED),
    )
}

/// Closed-form curvature with either sign of the quadratic term against
/// central differences of the connection.
fn sign_comparison(p: &RadialProfile) -> String {
    let h = Hedgehog::exterior(*p);
    let (mut plus, mut minus) = (0.0f64, 0.0f64);
    for r in [2.0, 5.0, 10.0, 20.0] {
        let x = [r / 14f64.sqrt(), 2.0 * r / 14f64.sqrt(), 3.0 * r / 14f64.sqrt()];
        let Ok(num) = curvature_numeric(&h, x, 1e-3) else { continue };
        let scale = num.norm().max(f64::MIN_POSITIVE);
        plus = plus.max(curvature_analytic_hedgehog(p, x).distance(&num) / scale);
        minus = minus.max(curvature_analytic_hedgehog_flipped(p, x).distance(&num) / scale);
    }
    format!(
        "closed-form hedgehog curvature vs central differences, max relative distance at r = 2..20: \
         {plus:e} with +f^2 x^b eps_ijn x^n, {minus:e} with the sign flipped"
    )
}

fn fibre(v: [f64; 4]) -> Result<Spinor, ConfigError> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err(bad("weyl-scan.v must be a nonzero finite vector"));
    }
    Ok([Complex64::new(v[0] / n, v[1] / n), Complex64::new(v[2] / n, v[3] / n)])
}

pub fn weyl_scan(cfg: &Config) -> Outcome {
    const COLUMNS: [&str; 16] = [
        "radius", "width", "c_r", "normalization_ratio", "l2_norm", "lap", "cross", "div", "asq",
        "total", "total_sq_abs_err", "slope", "intercept", "fit_residual", "lap_slope", "slope_max",
    ];
    let c = &cfg.weyl_scan;
    if c.radii.len() < 4 {
        return Err(bad(format!("weyl-scan needs at least 4 radii, got {}", c.radii.len())));
    }
    if !increasing_positive(&c.radii) {
        return Err(bad("weyl-scan radii must be positive and increasing"));
    }
    for &r in &c.radii {
        let w = c.width_rule.width(r);
        if !(w > 0.0 && w < 0.5 * r) {
            return Err(bad(format!("width rule gives w = {w} at R = {r}; need 0 < w < R/2")));
        }
    }
    let v = fibre(c.v)?;
    let field = cfg.field.build()?;
    let mut report = start("weyl-scan", &COLUMNS, cfg, field.as_ref());
    let opts = QuadratureOptions::default();
    let results: Vec<_> = c
        .radii
        .par_iter()
        .map(|&r| weyl_row(BumpProfile::new(), field.as_ref(), r, c.width_rule.width(r), v, &opts))
        .collect();

    let mut rows = Vec::new();
    let mut good: Vec<(f64, f64, f64)> = Vec::new();
    for (&r, res) in c.radii.iter().zip(results) {
        let base = Row::new().set("radius", r).set("width", c.width_rule.width(r)).set("slope_max", c.slope_max);
        match res {
            Ok(w) => {
                let t = w.terms;
                let mut row = base
                    .set("c_r", w.c_r)
                    .set("normalization_ratio", w.normalization_ratio)
                    .set("l2_norm", w.l2_norm)
                    .set("lap", t.lap)
                    .set("cross", t.cross)
                    .set("div", t.div)
                    .set("asq", t.asq)
                    .set("total", t.total)
                    .set("total_sq_abs_err", t.abs_err);
                if w.resolved() {
                    good.push((r, t.total, t.lap));
                } else {
                    row.add_flag("unresolved");
                }
                rows.push(row);
            }
            Err(e) => match split(e)? {
                Error::Accuracy { value, abs_err } => {
                    rows.push(base.set("total", value).set("total_sq_abs_err", abs_err).flagged("quadrature-floor"))
                }
                other => {
                    rows.push(base.flagged("failed"));
                    report.error = Some(other.to_string());
                }
            },
        }
    }

    let radii: Vec<f64> = good.iter().map(|g| g.0).collect();
    let fits = if good.len() >= 2 {
        let total = fit_power_law(&radii, &good.iter().map(|g| g.1).collect::<Vec<_>>());
        let lap = fit_power_law(&radii, &good.iter().map(|g| g.2).collect::<Vec<_>>());
        match (total, lap) {
            (Ok(a), Ok(b)) => Some((a, b)),
            (Err(e), _) | (_, Err(e)) => {
                report.notes.push(e.to_string());
                rows.iter_mut().for_each(|r| r.add_flag("degenerate-fit"));
                None
            }
        }
    } else {
        report.notes.push(format!("only {} resolved radii; no fit", good.len()));
        None
    };
    if let Some((total, lap)) = fits {
        rows = rows.into_iter().map(|r| fit_cells(r, &total).set("lap_slope", lap.slope)).collect();
        report.assert(
            "total slope",
            total.slope <= c.slope_max,
            format!("{} <= {}", total.slope, c.slope_max),
        );
        check_slope(&mut report, "lap", Some(lap.slope), c.expected_lap_slope, c.lap_slope_tolerance);
    } else {
        report.assert("total slope", false, "no fit");
        check_slope(&mut report, "lap", None, c.expected_lap_slope, c.lap_slope_tolerance);
    }
    report.rows = rows;
    Ok(report)
}

pub fn spectrum(cfg: &Config) -> Outcome {
    const COLUMNS: [&str; 9] = [
        "half_width", "n", "h", "index", "eigenvalue", "residual", "flat_eigenvalue", "iterations", "tol",
    ];
    let c = &cfg.spectrum;
    if c.k == 0 {
        return Err(bad("spectrum.k must be at least 1"));
    }
    if c.spacing.is_some() && c.points.is_some() {
        return Err(bad("spectrum takes either spacing or points, not both"));
    }
    if !increasing_positive(&c.half_widths) {
        return Err(bad("spectrum.half_widths must be positive and increasing"));
    }
    if !(c.tol > 0.0) || c.max_iter == 0 {
        return Err(bad("spectrum needs tol > 0 and max_iter > 0"));
    }
    let specs = c
        .half_widths
        .iter()
        .map(|&l| match c.points {
            Some(n) => LatticeSpec::new(l, n),
            None => LatticeSpec::with_spacing(l, c.spacing.unwrap_or(1.0)),
        })
        .collect::<gaugelab::Result<Vec<_>>>()
        .map_err(|e| bad(e.to_string()))?;
    if let Some(s) = specs.iter().find(|s| c.k > s.sites()) {
        return Err(bad(format!("k = {} exceeds the {} sites of the L = {} box", c.k, s.sites(), s.half_width)));
    }
    let field = cfg.field.build()?;
    let mut report = start("spectrum", &COLUMNS, cfg, field.as_ref());
    let opts = LanczosOptions {
        tol: c.tol,
        max_iter: c.max_iter,
        seed: cfg.seed,
        ..LanczosOptions::default()
    };
    let flat_field = cfg.field.is_flat();
    let mut lowest: Vec<Option<f64>> = Vec::new();
    for spec in &specs {
        let links = LinkField::from_field(*spec, field.as_ref());
        let flat = flat_spectrum(spec, c.k);
        let base = |j: usize| {
            Row::new()
                .set("half_width", spec.half_width)
                .set("n", spec.n)
                .set("h", spec.h())
                .set("index", j + 1)
                .set("tol", c.tol)
                .maybe("flat_eigenvalue", (c.flat_control || flat_field).then(|| flat[j]))
        };
        match lanczos::lowest(&links, c.k, &opts) {
            Ok(res) => {
                for (j, p) in res.pairs.iter().enumerate() {
                    report.rows.push(
                        base(j)
                            .set("eigenvalue", p.value)
                            .set("residual", p.residual)
                            .set("iterations", res.iterations),
                    );
                    if flat_field {
                        let ok = (p.value - flat[j]).abs() <= 10.0 * c.tol * flat[j];
                        report.assert(
                            format!("flat closed form L={} k={}", spec.half_width, j + 1),
                            ok,
                            format!("{} vs {}", p.value, flat[j]),
                        );
                    }
                }
                lowest.push(res.pairs.first().map(|p| p.value));
                if let Some(dir) = &c.dump_dir {
                    dump_vectors(Path::new(dir), spec, &res.vectors, field.name())?;
                }
            }
            Err(e) => match split(e)? {
                Error::Convergence { iterations, best } => {
                    for (j, (value, residual)) in best.iter().enumerate().take(c.k) {
                        report.rows.push(
                            base(j)
                                .set("eigenvalue", *value)
                                .set("residual", *residual)
                                .set("iterations", iterations)
                                .flagged("not-converged"),
                        );
                    }
                    report.error = Some(format!(
                        "eigensolver did not converge after {iterations} iterations at L = {}",
                        spec.half_width
                    ));
                    lowest.push(None);
                }
                other => {
                    report.error = Some(other.to_string());
                    lowest.push(None);
                }
            },
        }
    }
    if c.expect_decreasing && lowest.len() > 1 {
        let vals: Option<Vec<f64>> = lowest.iter().copied().collect();
        let ok = vals.as_ref().is_some_and(|v| v.windows(2).all(|w| w[1] < w[0]));
        report.assert("lambda1 decreasing", ok, format!("{lowest:?}"));
    }
    Ok(report)
}

fn dump_vectors(dir: &Path, spec: &LatticeSpec, vectors: &[Vec<Complex64>], name: String) -> Result<(), ConfigError> {
    std::fs::create_dir_all(dir).map_err(|e| bad(format!("creating {}: {e}", dir.display())))?;
    for (j, v) in vectors.iter().enumerate() {
        let stem = dir.join(format!("spectrum_L{}_k{}", spec.half_width, j + 1));
        let g = GridField {
            spec: *spec,
            data: v.clone(),
        };
        g.dump(&stem, &format!("{name} eigenvector {}", j + 1)).map_err(|e| bad(e.to_string()))?;
    }
    Ok(())
}

pub fn tail_scan(cfg: &Config) -> Outcome {
    const COLUMNS: [&str; 10] = [
        "kind", "term", "radius", "value", "abs_err", "tail", "slope", "intercept", "fit_residual",
        "expected_slope",
    ];
    let c = &cfg.tail_scan;
    let terms = c
        .terms
        .iter()
        .map(|t| TailTerm::parse(t).ok_or_else(|| bad(format!("unknown tail term {t:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if terms.is_empty() {
        return Err(bad("tail-scan.terms is empty"));
    }
    if c.radii.len() < 4 || !increasing_positive(&c.radii) {
        return Err(bad("tail-scan needs at least 4 positive increasing radii"));
    }
    let expected = c.expected(&cfg.field);
    if let Some(k) = expected.keys().find(|k| TailTerm::parse(k).is_none()) {
        return Err(bad(format!("expected_slopes names unknown term {k:?}")));
    }
    let field = cfg.field.build()?;
    let mut report = start("tail-scan", &COLUMNS, cfg, field.as_ref());
    let opts = QuadratureOptions::default();
    for term in terms {
        let want = expected.iter().find(|(k, _)| TailTerm::parse(k) == Some(term)).map(|(_, v)| *v);
        let samples = match tail_norm_scan(field.as_ref(), term, &c.radii, &opts) {
            Ok(s) => s,
            Err(e) => {
                let e = split(e)?;
                report.rows.push(Row::new().set("kind", "fit").set("term", term.label()).flagged("failed"));
                report.error = Some(e.to_string());
                check_slope(&mut report, term.label(), None, want, c.slope_tolerance);
                continue;
            }
        };
        for (i, s) in samples.iter().enumerate() {
            let mut row = Row::new()
                .set("kind", "sample")
                .set("term", term.label())
                .set("radius", s.radius)
                .set("value", s.value)
                .set("abs_err", s.abs_err)
                .set("tail", s.tail);
            if i > 0 && s.value > samples[i - 1].value {
                row.add_flag("non-monotone");
            }
            report.rows.push(row);
        }
        let fit_row = Row::new().set("kind", "fit").set("term", term.label()).maybe("expected_slope", want);
        match tail_slope(&samples) {
            Ok(fit) => {
                let mut row = fit_cells(fit_row, &fit);
                if !fit.is_power_law() {
                    row.add_flag("not-power-law");
                }
                report.rows.push(row);
                check_slope(&mut report, term.label(), Some(fit.slope), want, c.slope_tolerance);
            }
            Err(e) => {
                report.notes.push(e.to_string());
                report.rows.push(fit_row.flagged("degenerate-fit"));
                check_slope(&mut report, term.label(), None, want, c.slope_tolerance);
            }
        }
    }
    Ok(report)
}

/// Non-decreasing up to the rounding of a sum over every link.
fn ascending(history: &[f64]) -> bool {
    history.windows(2).all(|w| w[1] >= w[0] - 1e-14 * w[0].abs())
}

pub fn gauge_fix(cfg: &Config) -> Outcome {
    const COLUMNS: [&str; 16] = [
        "kind", "half_width", "n", "h", "omega", "tol", "gauge_amplitude", "sweep", "residual",
        "functional", "curvature_drift", "norm_sq_before", "norm_sq_after", "unitarity_defect",
        "initial_residual", "max_curvature_drift",
    ];
    let c = &cfg.gauge_fix;
    let spec = LatticeSpec::new(c.half_width, c.points).map_err(|e| bad(e.to_string()))?;
    if !(c.gauge_amplitude >= 0.0 && c.gauge_amplitude.is_finite()) {
        return Err(bad("gauge-fix.gauge_amplitude must be a finite nonnegative number"));
    }
    let opts = GaugeFixOptions {
        tol: c.tol,
        max_sweeps: c.max_sweeps,
        omega: c.omega,
    };
    let field = cfg.field.build()?;
    let mut report = start("gauge-fix", &COLUMNS, cfg, field.as_ref());
    let base = LinkField::from_field(spec, field.as_ref());
    let moved = if c.randomize {
        base.gauge_transform(&GaugeTransformField::random(spec, cfg.seed, c.gauge_amplitude))
            .expect("same lattice")
    } else {
        base.clone()
    };
    let params = |kind: &str| {
        Row::new()
            .set("kind", kind)
            .set("half_width", spec.half_width)
            .set("n", spec.n)
            .set("h", spec.h())
            .set("omega", c.omega)
            .set("tol", c.tol)
            .set("gauge_amplitude", if c.randomize { c.gauge_amplitude } else { 0.0 })
    };
    let history_rows = |residuals: &[f64], functional: &[f64]| -> Vec<Row> {
        residuals
            .iter()
            .enumerate()
            .map(|(i, r)| params("sweep").set("sweep", i).set("residual", *r).maybe("functional", functional.get(i).copied()))
            .collect()
    };
    match fix_coulomb(&moved, &opts) {
        Ok(fixed) => {
            report.rows = history_rows(&fixed.residual_history, &fixed.functional_history);
            let before = curvature_norms(&base);
            let after = curvature_norms(&fixed.links);
            let drift = before.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let last = *fixed.residual_history.last().expect("history starts with the initial residual");
            report.rows.push(
                params("summary")
                    .set("sweep", fixed.residual_history.len() - 1)
                    .set("residual", last)
                    .set("initial_residual", coulomb_residual(&moved))
                    .set("curvature_drift", drift)
                    .set("max_curvature_drift", c.max_curvature_drift)
                    .set("norm_sq_before", lattice_norm_sq(&moved))
                    .set("norm_sq_after", lattice_norm_sq(&fixed.links))
                    .set("unitarity_defect", fixed.links.max_unitarity_defect()),
            );
            report.assert("converged", last <= c.tol, format!("{last} <= {}", c.tol));
            report.assert(
                "residual decreasing",
                fixed.residual_history.windows(2).all(|w| w[1] < w[0]),
                format!("{} sweeps", fixed.residual_history.len() - 1),
            );
            report.assert("functional non-decreasing", ascending(&fixed.functional_history), "relative slack 1e-14");
            report.assert(
                "curvature drift",
                drift <= c.max_curvature_drift,
                format!("{drift} <= {}", c.max_curvature_drift),
            );
        }
        Err(e) => match split(e)? {
            Error::GaugeFixing { history } => {
                report.rows = history_rows(&history, &[]);
                report.rows.iter_mut().for_each(|r| r.add_flag("not-converged"));
                report.error = Some(format!("gauge fixing stalled after {} sweeps", history.len().saturating_sub(1)));
                report.assert("converged", false, "sweep budget exhausted");
            }
            other => report.error = Some(other.to_string()),
        },
    }
    Ok(report)
}

pub fn kato_check(cfg: &Config) -> Outcome {
    const COLUMNS: [&str; 13] = [
        "kind", "index", "seed", "points", "radius", "width", "modes", "max_wavenumber", "min_c", "used",
        "worst_x", "worst_y", "worst_z",
    ];
    let c = &cfg.kato_check;
    if c.sections == 0 || c.points == 0 {
        return Err(bad("kato-check needs at least one section and one point"));
    }
    if !(c.radius > 0.0 && c.envelope > 0.0 && c.max_wavenumber >= 0.0) {
        return Err(bad("kato-check radius and envelope must be positive"));
    }
    let up = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let packet = build_packet(BumpProfile::new(), c.packet_radius, c.packet_width, up).map_err(|e| bad(e.to_string()))?;
    let field = cfg.field.build()?;
    let mut report = start("kato-check", &COLUMNS, cfg, field.as_ref());

    let row = |r: &gaugelab::Result<KatoResult>, base: Row| match r {
        Ok(k) => {
            let row = base
                .set("min_c", k.min_c)
                .set("used", k.used)
                .set("worst_x", k.worst_point[0])
                .set("worst_y", k.worst_point[1])
                .set("worst_z", k.worst_point[2]);
            if k.min_c.is_finite() {
                row
            } else {
                row.flagged("unbounded")
            }
        }
        Err(e) => base.flagged(format!("failed: {e}")),
    };
    let sections: Vec<(u64, gaugelab::Result<KatoResult>)> = (0..c.sections as u64)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            let psi = PlaneWaveSection::random(seed, c.envelope, c.modes, c.max_wavenumber);
            let pts = ball_samples(seed.wrapping_add(1 << 32), c.points, c.radius);
            (seed, kato_deficit(field.as_ref(), &psi, &pts))
        })
        .collect();
    for (i, (seed, res)) in sections.iter().enumerate() {
        let base = Row::new()
            .set("kind", "plane-wave")
            .set("index", i)
            .set("seed", *seed)
            .set("points", c.points)
            .set("radius", c.radius)
            .set("width", c.envelope)
            .set("modes", c.modes)
            .set("max_wavenumber", c.max_wavenumber);
        report.rows.push(row(res, base));
    }
    let pts = shell_samples(cfg.seed, c.points, c.packet_radius, c.packet_width);
    let radial = kato_deficit(field.as_ref(), &packet, &pts);
    let base = Row::new()
        .set("kind", "radial-packet")
        .set("index", c.sections)
        .set("seed", cfg.seed)
        .set("points", c.points)
        .set("radius", c.packet_radius)
        .set("width", c.packet_width);
    report.rows.push(row(&radial, base));

    let min_c = |r: &gaugelab::Result<KatoResult>| r.as_ref().map(|k| k.min_c).unwrap_or(f64::NAN);
    let radial_c = min_c(&radial);
    report.assert("radial packet", radial_c == 0.0, format!("min_c = {radial_c}"));
    let all: Vec<f64> = sections.iter().map(|(_, r)| min_c(r)).chain([radial_c]).collect();
    if cfg.field.is_flat() {
        report.assert("flat field", all.iter().all(|v| *v == 0.0), "min_c = 0 on every row");
    }
    if let Some(max) = c.max_c {
        let worst = all.iter().copied().fold(0.0, f64::max);
        report.assert(
            "max_c",
            all.iter().all(|v| *v <= max),
            format!("largest min_c {worst} <= {max}"),
        );
    }
    Ok(report)
}
