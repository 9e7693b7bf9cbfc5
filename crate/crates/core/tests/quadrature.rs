use gaugelab::connection::*;
use gaugelab::quadrature::*;
use gaugelab::section::*;
use gaugelab::su2::*;
use num_complex::Complex64;
use std::f64::consts::PI;

fn critical() -> Hedgehog {
    hedgehog(RadialProfile::critical(1.0)).unwrap()
}

fn up() -> Spinor {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
}

/// Midpoint sum on a fixed (r, cosθ, φ) grid.
fn spherical_midpoint<G: Fn(Vec3) -> f64>(g: G, radius: f64, nr: usize, nt: usize, np: usize) -> f64 {
    let (dr, dt, dp) = (radius / nr as f64, 2.0 / nt as f64, 2.0 * PI / np as f64);
    let mut sum = 0.0;
    for i in 0..nr {
        let r = (i as f64 + 0.5) * dr;
        for j in 0..nt {
            let ct = -1.0 + (j as f64 + 0.5) * dt;
            let st = (1.0 - ct * ct).sqrt();
            for k in 0..np {
                let p = (k as f64 + 0.5) * dp;
                sum += g([r * st * p.cos(), r * st * p.sin(), r * ct]) * r * r;
            }
        }
    }
    sum * dr * dt * dp
}

#[test]
fn l3_of_a_squared_on_a_ball_matches_grid_oracle() {
    let h = critical();
    let f = |x: Vec3| {
        let a = connection_norm(&h.eval(x));
        a * a
    };
    let got = lp_norm(f, 1.5, Domain::Ball { radius: 10.0 }, &QuadratureOptions::default()).unwrap();
    // The integrand is radial, so a coarse angular grid is exact up to
    // rounding while the radial midpoint rule is second order.
    let oracle = spherical_midpoint(|x| f(x).powf(1.5), 10.0, 4000, 8, 8).powf(1.0 / 1.5);
    assert!((got.value / oracle - 1.0).abs() < 1e-4, "{} vs {oracle}", got.value);
}

#[test]
fn non_radial_integrand_matches_grid_oracle() {
    let g = |x: Vec3| (x[0] + 0.3 * x[1] * x[2]).powi(2) * (-norm3(&x)).exp();
    let got = integrate_volume(g, Domain::Ball { radius: 6.0 }, &[], &QuadratureOptions::default()).unwrap();
    let oracle = spherical_midpoint(g, 6.0, 600, 200, 200);
    assert!((got.value / oracle - 1.0).abs() < 1e-4, "{} vs {oracle}", got.value);
}

#[test]
fn ball_splits_into_ball_and_shell() {
    let h = critical();
    let g = |x: Vec3| h.curvature(x).norm().powi(2);
    let opts = QuadratureOptions::default();
    let whole = integrate_volume(g, Domain::Ball { radius: 20.0 }, &[], &opts).unwrap();
    let inner = integrate_volume(g, Domain::Ball { radius: 5.0 }, &[], &opts).unwrap();
    let shell = integrate_volume(g, Domain::Shell { inner: 5.0, outer: 20.0 }, &[], &opts).unwrap();
    let gap = (whole.value - inner.value - shell.value).abs();
    assert!(gap <= 10.0 * (whole.abs_err + inner.abs_err + shell.abs_err) + 1e-12 * whole.value, "{gap}");
}

#[test]
fn exterior_integral_of_the_hedgehog_energy_density() {
    // |A|² = 2 f² r², so ∫_{|x|>R} |A|⁴ has the closed form for the pure tail.
    let h = Hedgehog::exterior(RadialProfile::pure_tail(1.0));
    let r0 = 8.0;
    let got = integrate_volume(
        |x| connection_norm(&h.eval(x)).powi(4),
        Domain::exterior(r0),
        &[],
        &QuadratureOptions::default(),
    )
    .unwrap();
    // 4 f⁴ r⁴ = 4 r⁻⁸, times 4π r², integrated from R: 16π/(5 R⁵).
    let exact = 16.0 * PI / (5.0 * r0.powi(5));
    assert!((got.value / exact - 1.0).abs() < 1e-8, "{} {exact}", got.value);
    assert!(got.tail > 0.0 && got.tail < 1e-6 * got.value);
}

#[test]
fn gaussian_energy_on_the_flat_field() {
    let sigma = 1.3;
    let psi = GaussianSection::new([0.0; 3], sigma, up());
    let opts = QuadratureOptions::default();
    let e = energy_norm(&psi, &Flat, Domain::Ball { radius: 14.0 * sigma }, &opts).unwrap();
    assert!((e.l2 - 1.0).abs() < 1e-9, "{}", e.l2);
    // ‖∇ψ‖² = 3/(2σ²) for a unit-mass Gaussian.
    let exact = 1.5 / (sigma * sigma);
    assert!((e.covariant / exact - 1.0).abs() < 1e-9, "{}", e.covariant);
}

#[test]
fn radial_section_on_the_hedgehog_splits_without_cross_term() {
    let h = critical();
    let psi = GaussianSection::new([0.0; 3], 2.0, up());
    let opts = QuadratureOptions::default();
    let dom = Domain::Ball { radius: 30.0 };
    let e = energy_norm(&psi, &h, dom, &opts).unwrap();
    let grad = integrate_volume(
        |x| psi.gradient(x).iter().map(spinor_norm_sq).sum(),
        dom,
        &[],
        &opts,
    )
    .unwrap();
    let pot = integrate_volume(
        |x| {
            let v = psi.value(x);
            h.eval(x).iter().map(|a| spinor_norm_sq(&a.apply(&v))).sum()
        },
        dom,
        &[],
        &opts,
    )
    .unwrap();
    let sum = grad.value + pot.value;
    assert!(pot.value > 1e-4);
    assert!((e.covariant / sum - 1.0).abs() < 1e-8, "{} {sum}", e.covariant);
}

#[test]
fn critical_tail_slopes() {
    let h = critical();
    let radii = [8.0, 16.0, 32.0, 64.0, 128.0];
    let opts = QuadratureOptions::default();
    let one = tail_slope(&tail_norm_scan(&h, TailTerm::I, &radii, &opts).unwrap()).unwrap();
    let three = tail_slope(&tail_norm_scan(&h, TailTerm::III, &radii, &opts).unwrap()).unwrap();
    assert!((one.slope + 1.0).abs() < 0.1, "{}", one.slope);
    assert!((three.slope + 3.0).abs() < 0.15, "{}", three.slope);
}

#[test]
fn fast_decay_tail_slopes_are_negative() {
    let field = fast_decay_family(1.0, 1.0).unwrap();
    let radii = [4.0, 8.0, 16.0, 32.0];
    let opts = QuadratureOptions::default();
    for term in TailTerm::ALL {
        let samples = tail_norm_scan(&field, term, &radii, &opts).unwrap();
        assert!(samples.windows(2).all(|w| w[1].value <= w[0].value));
        let fit = tail_slope(&samples).unwrap();
        assert!(fit.slope < 0.0, "{term:?} {}", fit.slope);
    }
}
