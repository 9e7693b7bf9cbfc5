//! Run configuration.
//!
//! A TOML file with a top-level `seed`, a `[field]` table and one table per
//! experiment. Every key has a default, so an empty file (or no file) is a
//! valid configuration. Unknown keys anywhere are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use gaugelab::connection::{fast_decay_family, hedgehog, ConnectionField, Flat, RadialProfile};
use gaugelab::weyl::WidthRule;
use serde::{Deserialize, Serialize};

use crate::ConfigError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    /// Seed for every random choice of a run; `--seed` overrides it.
    pub seed: u64,
    pub field: FieldSpec,
    pub curvature_scan: CurvatureScan,
    pub weyl_scan: WeylScan,
    pub spectrum: Spectrum,
    pub tail_scan: TailScan,
    pub gauge_fix: GaugeFix,
    pub kato_check: KatoCheck,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            field: FieldSpec::default(),
            curvature_scan: CurvatureScan::default(),
            weyl_scan: WeylScan::default(),
            spectrum: Spectrum::default(),
            tail_scan: TailScan::default(),
            gauge_fix: GaugeFix::default(),
            kato_check: KatoCheck::default(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    /// Reads `path`, or returns the defaults when there is none.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        match path {
            None => Ok(Config::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ConfigError(format!("reading {}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }
}

/// Connection family, selected by `family` in the `[field]` table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    Flat {},
    /// Critical decay, `1 − K ~ κ/r`.
    Hedgehog {
        #[serde(default = "one")]
        kappa: f64,
    },
    /// Critical profile damped by `(1 + r)^(−extra_decay)`.
    FastDecay { kappa: f64, extra_decay: f64 },
}

fn one() -> f64 {
    1.0
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Hedgehog { kappa: 1.0 }
    }
}

impl FieldSpec {
    pub fn build(&self) -> Result<Box<dyn ConnectionField>, ConfigError> {
        let built: gaugelab::Result<Box<dyn ConnectionField>> = match *self {
            FieldSpec::Flat {} => Ok(Box::new(Flat)),
            FieldSpec::Hedgehog { kappa } => {
                if !kappa.is_finite() {
                    return Err(ConfigError(format!("field.kappa must be finite, got {kappa}")));
                }
                hedgehog(RadialProfile::critical(kappa)).map(|h| Box::new(h) as _)
            }
            FieldSpec::FastDecay { kappa, extra_decay } => {
                fast_decay_family(kappa, extra_decay).map(|h| Box::new(h) as _)
            }
        };
        built.map_err(|e| ConfigError(format!("field: {e}")))
    }

    pub fn kappa(&self) -> Option<f64> {
        match *self {
            FieldSpec::Flat {} => None,
            FieldSpec::Hedgehog { kappa } | FieldSpec::FastDecay { kappa, .. } => Some(kappa),
        }
    }

    pub fn extra_decay(&self) -> Option<f64> {
        match *self {
            FieldSpec::FastDecay { extra_decay, .. } => Some(extra_decay),
            _ => None,
        }
    }

    /// The radial profile, for the hedgehog families.
    pub fn profile(&self) -> Option<RadialProfile> {
        match *self {
            FieldSpec::Flat {} => None,
            FieldSpec::Hedgehog { kappa } => Some(RadialProfile::critical(kappa)),
            FieldSpec::FastDecay { kappa, extra_decay } => {
                fast_decay_family(kappa, extra_decay).ok().map(|h| *h.profile())
            }
        }
    }

    /// Whether the connection vanishes identically.
    pub fn is_flat(&self) -> bool {
        self.kappa().map_or(true, |k| k == 0.0)
    }

    /// Extra decay beyond the critical rate, or `None` for a flat field.
    fn decay_excess(&self) -> Option<f64> {
        if self.is_flat() {
            None
        } else {
            Some(self.extra_decay().unwrap_or(0.0))
        }
    }
}

/// `[curvature-scan]`: log–log fits of the sphere maxima of `|A|`, `|F|`,
/// `|∇A|` and `|[A, A]|` on log-spaced radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvatureScan {
    /// Any of `A`, `F`, `gradA`, `AwedgeA` (default: all four).
    pub quantities: Vec<String>,
    /// Default 10.
    pub r_min: f64,
    /// Default 1000.
    pub r_max: f64,
    /// Number of log-spaced radii, default 24.
    pub samples: usize,
    /// Asserted slopes by quantity. When absent the hedgehog families get
    /// `A: −2−e`, `F: −3−e`, `gradA: −3−e`, `AwedgeA: −4−2e`, with `e` the
    /// extra decay.
    pub expected_slopes: Option<BTreeMap<String, f64>>,
    /// Default 0.1.
    pub slope_tolerance: f64,
}

impl Default for CurvatureScan {
    fn default() -> Self {
        CurvatureScan {
            quantities: vec!["A".into(), "F".into(), "gradA".into(), "AwedgeA".into()],
            r_min: 10.0,
            r_max: 1000.0,
            samples: 24,
            expected_slopes: None,
            slope_tolerance: 0.1,
        }
    }
}

impl CurvatureScan {
    pub fn expected(&self, field: &FieldSpec) -> BTreeMap<String, f64> {
        if let Some(map) = &self.expected_slopes {
            return map.clone();
        }
        let Some(e) = field.decay_excess() else {
            return BTreeMap::new();
        };
        [("A", -2.0 - e), ("F", -3.0 - e), ("gradA", -3.0 - e), ("AwedgeA", -4.0 - 2.0 * e)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }
}

/// `[weyl-scan]`: term norms of `Δ_A ψ_R` for shell packets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeylScan {
    /// Shell radii, increasing, at least four. Default 16, 32, …, 1024.
    pub radii: Vec<f64>,
    /// `{ kind = "power", scale, exponent }` or `{ kind = "constant", width }`.
    /// Default `w = R^{1/2}`.
    pub width_rule: WidthRule,
    /// Fibre direction as `[re0, im0, re1, im1]`, normalized on use.
    pub v: [f64; 4],
    /// The scan passes when the fitted slope of the total is at most this.
    pub slope_max: f64,
    /// Optional check on the slope of the Laplacian term alone.
    pub expected_lap_slope: Option<f64>,
    /// Default 0.05.
    pub lap_slope_tolerance: f64,
}

impl Default for WeylScan {
    fn default() -> Self {
        WeylScan {
            radii: vec![16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0],
            width_rule: WidthRule::sqrt(),
            v: [1.0, 0.0, 0.0, 0.0],
            slope_max: -0.9,
            expected_lap_slope: None,
            lap_slope_tolerance: 0.05,
        }
    }
}

/// `[spectrum]`: lowest eigenvalues of the lattice operator per box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Spectrum {
    /// Box half-widths `L`, default 4, 8, 16.
    pub half_widths: Vec<f64>,
    /// Lattice spacing (default 1 when `points` is not given).
    pub spacing: Option<f64>,
    /// Points per axis, the same for every box. Excludes `spacing`.
    pub points: Option<usize>,
    /// Number of distinct eigenvalues, default 3.
    pub k: usize,
    /// Default 1e-8.
    pub tol: f64,
    /// Operator applications per box, default 20000.
    pub max_iter: usize,
    /// Add the closed-form flat spectrum of each box as a column.
    pub flat_control: bool,
    /// Assert that `λ₁` strictly decreases as the box grows.
    pub expect_decreasing: bool,
    /// Directory for raw eigenvector dumps; none by default.
    pub dump_dir: Option<String>,
}

impl Default for Spectrum {
    fn default() -> Self {
        Spectrum {
            half_widths: vec![4.0, 8.0, 16.0],
            spacing: None,
            points: None,
            k: 3,
            tol: 1e-8,
            max_iter: 20_000,
            flat_control: true,
            expect_decreasing: true,
            dump_dir: None,
        }
    }
}

/// `[tail-scan]`: `L³` norms of the exterior terms outside radius `R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailScan {
    /// Any of `I` (`|A|`), `II` (`|∇A|`), `III` (`|A|²`); default all.
    pub terms: Vec<String>,
    /// At least four, increasing. Default 8, 16, 32, 64, 128.
    pub radii: Vec<f64>,
    /// Asserted slopes by term. When absent the critical hedgehog gets
    /// `I: −1`, `II: −2`, `III: −3`.
    pub expected_slopes: Option<BTreeMap<String, f64>>,
    /// Default 0.15.
    pub slope_tolerance: f64,
}

impl Default for TailScan {
    fn default() -> Self {
        TailScan {
            terms: vec!["I".into(), "II".into(), "III".into()],
            radii: vec![8.0, 16.0, 32.0, 64.0, 128.0],
            expected_slopes: None,
            slope_tolerance: 0.15,
        }
    }
}

impl TailScan {
    pub fn expected(&self, field: &FieldSpec) -> BTreeMap<String, f64> {
        if let Some(map) = &self.expected_slopes {
            return map.clone();
        }
        match field {
            FieldSpec::Hedgehog { kappa } if *kappa != 0.0 => {
                [("I", -1.0), ("II", -2.0), ("III", -3.0)]
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v))
                    .collect()
            }
            _ => BTreeMap::new(),
        }
    }
}

/// `[gauge-fix]`: Coulomb relaxation of the lattice links of the field,
/// optionally after a random gauge transformation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaugeFix {
    /// Default 3.
    pub half_width: f64,
    /// Default 12.
    pub points: usize,
    /// Apply a seeded random gauge first (default true).
    pub randomize: bool,
    /// Size of the random gauge's algebra elements, default 1.
    pub gauge_amplitude: f64,
    /// Default 1e-6.
    pub tol: f64,
    /// Default 5000.
    pub max_sweeps: usize,
    /// Overrelaxation, default 1.7.
    pub omega: f64,
    /// Largest allowed site-wise change of `|F|`, default 1e-8.
    pub max_curvature_drift: f64,
}

impl Default for GaugeFix {
    fn default() -> Self {
        GaugeFix {
            half_width: 3.0,
            points: 12,
            randomize: true,
            gauge_amplitude: 1.0,
            tol: 1e-6,
            max_sweeps: 5000,
            omega: 1.7,
            max_curvature_drift: 1e-8,
        }
    }
}

/// `[kato-check]`: smallest constant in the curvature-adjusted Kato
/// inequality over seeded sections and sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KatoCheck {
    /// Number of random plane-wave sections, default 20.
    pub sections: usize,
    /// Sample points per section, default 64.
    pub points: usize,
    /// Radius of the sampling ball, default 6.
    pub radius: f64,
    /// Gaussian envelope width of the sections, default 4.
    pub envelope: f64,
    /// Plane waves per section, default 3.
    pub modes: usize,
    /// Default 1.
    pub max_wavenumber: f64,
    /// Radial packet row: shell radius and width, default 32 and 4.
    pub packet_radius: f64,
    pub packet_width: f64,
    /// Optional bound asserted on every row.
    pub max_c: Option<f64>,
}

impl Default for KatoCheck {
    fn default() -> Self {
        KatoCheck {
            sections: 20,
            points: 64,
            radius: 6.0,
            envelope: 4.0,
            modes: 3,
            max_wavenumber: 1.0,
            packet_radius: 32.0,
            packet_width: 4.0,
            max_c: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn sections_and_families() {
        let c = Config::parse(
            r#"
            seed = 9
            [field]
            family = "fast-decay"
            kappa = 1.0
            extra_decay = 0.5
            [weyl-scan]
            radii = [64, 128, 256, 512]
            width_rule = { kind = "constant", width = 8.0 }
            "#,
        )
        .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.field, FieldSpec::FastDecay { kappa: 1.0, extra_decay: 0.5 });
        assert_eq!(c.weyl_scan.width_rule, WidthRule::Constant { width: 8.0 });
        assert_eq!(c.weyl_scan.slope_max, -0.9);
    }

    #[test]
    fn shipped_defaults_file_matches() {
        let text = include_str!("../../../configs/defaults.toml");
        assert_eq!(Config::parse(text).unwrap(), Config::default());
    }

    #[test]
    fn hedgehog_kappa_defaults_to_one() {
        let c = Config::parse("[field]\nfamily = \"hedgehog\"\n").unwrap();
        assert_eq!(c.field, FieldSpec::Hedgehog { kappa: 1.0 });
    }

    #[test]
    fn unknown_keys_and_families_are_rejected() {
        assert!(Config::parse("[spectrum]\nkk = 3\n").is_err());
        assert!(Config::parse("sed = 3\n").is_err());
        assert!(Config::parse("[field]\nfamily = \"monopole\"\n").is_err());
        assert!(Config::parse("[field]\nfamily = \"flat\"\nkappa = 1.0\n").is_err());
        assert!(Config::parse("[curvature_scan]\nr_min = 3.0\n").is_err());
    }

    #[test]
    fn default_expected_slopes_follow_the_family() {
        let s = CurvatureScan::default();
        assert_eq!(s.expected(&FieldSpec::Hedgehog { kappa: 2.0 })["F"], -3.0);
        assert_eq!(s.expected(&FieldSpec::FastDecay { kappa: 1.0, extra_decay: 0.5 })["F"], -3.5);
        assert!(s.expected(&FieldSpec::Flat {}).is_empty());
        assert!(s.expected(&FieldSpec::Hedgehog { kappa: 0.0 }).is_empty());
    }
}
