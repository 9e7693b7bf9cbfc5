use gaugelab::connection::*;
use gaugelab::quadrature::*;
use gaugelab::section::*;
use gaugelab::su2::*;
use gaugelab::weyl::*;
use num_complex::Complex64;

fn critical() -> Hedgehog {
    hedgehog(RadialProfile::critical(1.0)).unwrap()
}

fn up() -> Spinor {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
}

fn packet(radius: f64, width: f64) -> WeylPacket {
    build_packet(BumpProfile::new(), radius, width, up()).unwrap()
}

#[test]
fn overlap_with_a_fixed_bump_decays() {
    let g = GaussianSection::new([1.0, 0.5, 0.0], 3.0, up());
    let opts = QuadratureOptions::default();
    let overlaps: Vec<f64> = [8.0, 16.0, 32.0, 64.0]
        .iter()
        .map(|&r| packet_overlap(&packet(r, r.sqrt()), &g, &opts).unwrap())
        .collect();
    assert!(overlaps[0] > 1e-6, "{overlaps:?}");
    assert!(overlaps.windows(2).all(|w| w[1] < w[0] || w[1] == 0.0), "{overlaps:?}");
    assert!(overlaps[3] < 1e-6 * overlaps[0], "{overlaps:?}");
}

#[test]
fn doubling_the_width_quarters_the_laplacian_term() {
    let h = critical();
    let opts = QuadratureOptions::default();
    let narrow = laplacian_term_norms(&packet(256.0, 8.0), &h, &opts).unwrap();
    let wide = laplacian_term_norms(&packet(256.0, 16.0), &h, &opts).unwrap();
    let ratio = narrow.lap / wide.lap;
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}

#[test]
fn two_point_scaling_between_r32_and_r64() {
    let h = critical();
    let opts = QuadratureOptions::default();
    let a = laplacian_term_norms(&packet(32.0, 4.0), &h, &opts).unwrap();
    let b = laplacian_term_norms(&packet(64.0, 8.0), &h, &opts).unwrap();
    // lap ∝ 1/w² and asq ∝ |A|² ∝ R⁻⁴.
    assert!(((b.lap / (a.lap / 4.0)) - 1.0).abs() < 0.2, "{} {}", a.lap, b.lap);
    assert!(((b.asq / (a.asq / 16.0)) - 1.0).abs() < 0.2, "{} {}", a.asq, b.asq);
}

#[test]
fn flat_field_has_only_the_laplacian_term() {
    let t = laplacian_term_norms(&packet(64.0, 8.0), &Flat, &QuadratureOptions::default()).unwrap();
    assert_eq!((t.cross, t.div, t.asq), (0.0, 0.0, 0.0));
    assert!((t.total / t.lap - 1.0).abs() < 1e-12);
}

#[test]
fn radial_packets_see_no_cross_or_divergence_term() {
    let t = laplacian_term_norms(&packet(100.0, 10.0), &critical(), &QuadratureOptions::default()).unwrap();
    assert!(t.cross <= 1e-10 * t.total, "{}", t.cross);
    assert!(t.div <= 1e-10 * t.total, "{}", t.div);
    assert!(t.asq > 0.0);
}

#[test]
fn term_norms_do_not_depend_on_the_fibre_direction() {
    let h = critical();
    let opts = QuadratureOptions::default();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = [Complex64::new(0.0, s), Complex64::new(-0.5, 0.5)];
    let a = laplacian_term_norms(&packet(64.0, 8.0), &h, &opts).unwrap();
    let b = laplacian_term_norms(&build_packet(BumpProfile::new(), 64.0, 8.0, v).unwrap(), &h, &opts).unwrap();
    assert!((a.total / b.total - 1.0).abs() < 1e-8);
    assert!((a.asq / b.asq - 1.0).abs() < 1e-8);
}

#[test]
fn gradient_norm_scales_like_inverse_width() {
    let c: Vec<f64> = [(100.0, 10.0), (400.0, 10.0), (400.0, 40.0)]
        .iter()
        .map(|&(r, w)| packet(r, w).gradient_norm().unwrap() * w)
        .collect();
    for k in &c[1..] {
        assert!((k / c[0] - 1.0).abs() < 0.05, "{c:?}");
    }
}

#[test]
fn normalization_example_at_r100() {
    let p = packet(100.0, 10.0);
    let ratio = p.normalization_ratio();
    assert!((ratio - 1.0).abs() <= 0.01, "{ratio}");
    let norm = p.l2_norm(&QuadratureOptions::default()).unwrap();
    assert!((norm - 1.0).abs() < 1e-10);
}

#[test]
fn covariant_energy_of_packets_is_small_and_decreasing() {
    let h = critical();
    let opts = QuadratureOptions::default();
    let energy = |r: f64, w: f64| {
        let p = packet(r, w);
        energy_norm_with_breaks(&p, &h, p.shell(), &[r], &opts).unwrap().covariant
    };
    let (a, b) = (energy(64.0, 8.0), energy(256.0, 16.0));
    assert!(a < 0.1, "{a}");
    assert!(b < a, "{a} {b}");
}

#[test]
fn constant_width_control_has_flat_laplacian_slope() {
    let scan = weyl_scaling_scan(
        BumpProfile::new(),
        &critical(),
        &[64.0, 128.0, 256.0, 512.0],
        WidthRule::Constant { width: 8.0 },
        up(),
        &QuadratureOptions::default(),
    )
    .unwrap();
    assert!(scan.lap_fit.slope.abs() < 0.05, "{}", scan.lap_fit.slope);
}

#[test]
fn flat_control_scan_has_slope_minus_one() {
    let scan = weyl_scaling_scan(
        BumpProfile::new(),
        &Flat,
        &[16.0, 64.0, 256.0, 1024.0],
        WidthRule::sqrt(),
        up(),
        &QuadratureOptions::default(),
    )
    .unwrap();
    assert!((scan.fit.slope + 1.0).abs() < 0.05, "{}", scan.fit.slope);
}

#[test]
fn scan_input_errors() {
    let opts = QuadratureOptions::default();
    let bad = weyl_scaling_scan(BumpProfile::new(), &Flat, &[16.0], WidthRule::sqrt(), up(), &opts);
    assert!(bad.is_err());
    let wide = weyl_scaling_scan(BumpProfile::new(), &Flat, &[4.0, 8.0], WidthRule::Constant { width: 3.0 }, up(), &opts);
    assert!(wide.is_err());
    assert!(build_packet(BumpProfile::new(), 10.0, 5.0, up()).is_err());
}

#[test]
fn kato_radial_packet_on_the_hedgehog() {
    let p = packet(32.0, 4.0);
    let pts = shell_samples(8, 200, 32.0, 4.0);
    assert_eq!(kato_deficit(&critical(), &p, &pts).unwrap().min_c, 0.0);
    assert_eq!(kato_deficit(&Flat, &p, &pts).unwrap().min_c, 0.0);
}

#[test]
fn kato_non_radial_samples_are_finite_and_stable() {
    let h = critical();
    let run = || {
        (0..20u64)
            .map(|seed| {
                let psi = PlaneWaveSection::random(seed, 4.0, 3, 1.0);
                kato_deficit(&h, &psi, &ball_samples(100 + seed, 64, 6.0)).unwrap().min_c
            })
            .collect::<Vec<f64>>()
    };
    let first = run();
    assert!(first.iter().all(|c| c.is_finite() && *c >= 0.0));
    assert_eq!(first, run());
}
