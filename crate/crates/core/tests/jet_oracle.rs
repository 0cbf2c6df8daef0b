//! Independent check of the closed-form 2-jet of the integral construction
//! `f(z) = z (alpha z^{-alpha} int_0^z t^{alpha-1} h(t) dt)^{1/alpha}`.
//!
//! The oracle never touches series arithmetic: the integral is evaluated by
//! tanh-sinh quadrature in `u = s^alpha`, and Taylor coefficients of `f/z`
//! are read off samples on a small circle with a trapezoidal Cauchy integral.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bazlab::{bazilevic_from_h, CaratheodoryMeasure};

/// Nodes and weights of tanh-sinh quadrature on [0, 1].
fn tanh_sinh(level: u32) -> Vec<(f64, f64)> {
    let h = 1.0 / f64::from(1u32 << level);
    let mut nodes = Vec::new();
    let mut k = 0i64;
    loop {
        let t = k as f64 * h;
        let s = FRAC_PI_2 * t.sinh();
        let c = s.cosh();
        let w = 0.5 * h * FRAC_PI_2 * t.cosh() / (c * c);
        if w < 1e-300 {
            break;
        }
        // 1 - x computed as e^{-s}/(2 cosh s) to keep resolution near x = 1
        let one_minus = (-s).exp() / (2.0 * c);
        let x = 1.0 - one_minus;
        let x_neg = one_minus;
        nodes.push((x, w));
        if k > 0 {
            nodes.push((x_neg, w));
        }
        k += 1;
    }
    nodes
}

/// `g(z) = int_0^1 h(u^{1/alpha} z) du`.
fn g_quadrature(mu: &CaratheodoryMeasure, alpha: f64, z: Complex64, nodes: &[(f64, f64)]) -> Complex64 {
    nodes
        .iter()
        .map(|&(u, w)| w * mu.eval(u.powf(1.0 / alpha) * z))
        .sum()
}

/// Taylor coefficients 0..=2 of `f(z)/z = g(z)^{1/alpha}`.
fn oracle_coefficients(mu: &CaratheodoryMeasure, alpha: f64) -> [Complex64; 3] {
    const M: usize = 48;
    const RADIUS: f64 = 0.25;
    let nodes = tanh_sinh(7);
    let samples: Vec<(Complex64, Complex64)> = (0..M)
        .map(|m| {
            let e = Complex64::from_polar(1.0, TAU * m as f64 / M as f64);
            (e, g_quadrature(mu, alpha, e * RADIUS, &nodes).powf(1.0 / alpha))
        })
        .collect();
    std::array::from_fn(|k| {
        samples.iter().map(|(e, q)| q * e.powi(-(k as i32))).sum::<Complex64>()
            / (M as f64 * RADIUS.powi(k as i32))
    })
}

#[test]
fn quadrature_reproduces_closed_form_jet() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for alpha in [0.05, 0.3, 1.0, 2.7, 5.0] {
        for _ in 0..6 {
            let mu = CaratheodoryMeasure::random(&mut rng, 4);
            let (p1, p2) = (mu.coefficient(1), mu.coefficient(2));
            let a2 = p1 / (alpha + 1.0);
            let a3 = p2 / (alpha + 2.0) + (1.0 - alpha) * p1 * p1 / (2.0 * (alpha + 1.0).powi(2));

            let q = oracle_coefficients(&mu, alpha);
            assert!((q[0] - 1.0).norm() < 1e-11, "alpha {alpha}: q0 = {}", q[0]);
            assert!((q[1] - a2).norm() < 1e-10, "alpha {alpha}: {} vs {a2}", q[1]);
            assert!((q[2] - a3).norm() < 1e-10, "alpha {alpha}: {} vs {a3}", q[2]);

            let c = bazilevic_from_h(alpha, &mu.series(32)).unwrap();
            assert!((c.f.coeff(2) - q[1]).norm() < 1e-10);
            assert!((c.f.coeff(3) - q[2]).norm() < 1e-10);
        }
    }
}

#[test]
fn quadrature_matches_single_atom_example() {
    // alpha = 1, h = (1+z)/(1-z): a2 = 1, a3 = 2/3
    let mu = CaratheodoryMeasure::point_mass(0.0);
    let q = oracle_coefficients(&mu, 1.0);
    assert!((q[1] - 1.0).norm() < 1e-11);
    assert!((q[2] - 2.0 / 3.0).norm() < 1e-11);
}
