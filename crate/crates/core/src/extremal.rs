//! Closed-form bounds for `|gamma_2| - |gamma_1|` on `B_1(alpha)`, the two
//! extremal constructions, and the quadratic `psi(t)` that decides when the
//! cubic lower extremal is claimed to belong to the class.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classb1::{
    bazilevic_from_h, validate_membership, BazilevicCandidate, CaratheodoryMeasure,
    MembershipCheck,
};
use crate::error::{check_alpha, domain, Error, Result};
use crate::series::TruncatedSeries;

/// Symmetric band around 0 inside which `psi_min` counts as nonnegative.
pub const SHARP_BAND: f64 = 1e-9;

pub fn upper_bound(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(1.0 / (alpha + 2.0))
}

pub fn lower_bound(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(-1.0 / ((alpha + 1.0).powi(2) + 1.0).sqrt())
}

/// `b_2 = 2 / sqrt((alpha+1)^2 + 1)`, the modulus of `a_2` for the lower extremal.
pub fn lower_b2(alpha: f64) -> f64 {
    2.0 / ((alpha + 1.0).powi(2) + 1.0).sqrt()
}

/// Candidate generated by `h(z) = (1 + z^2)/(1 - z^2)`, validated with `check`.
pub fn extremal_upper(
    alpha: f64,
    order: usize,
    check: &MembershipCheck,
) -> Result<BazilevicCandidate> {
    check_alpha(alpha)?;
    let h = CaratheodoryMeasure::new([(0.5, 0.0), (0.5, PI)])?.series(order);
    validate_membership(&bazilevic_from_h(alpha, &h)?, check)
}

/// `f(z) = z + b_2 e^{i theta} z^2 + b_2^2 e^{2 i theta} z^3 / 2` at the given order,
/// before validation.
pub fn lower_cubic(alpha: f64, theta: f64, order: usize) -> Result<BazilevicCandidate> {
    check_alpha(alpha)?;
    if order < 3 {
        return Err(Error::Usage("the cubic extremal needs order >= 3".into()));
    }
    let a2 = Complex64::from_polar(lower_b2(alpha), theta);
    let f = TruncatedSeries::from_slice(
        &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), a2, a2 * a2 / 2.0],
        order,
    )?;
    BazilevicCandidate::from_f(alpha, f)
}

/// The cubic lower extremal, validated with `check`.
pub fn extremal_lower(
    alpha: f64,
    theta: f64,
    order: usize,
    check: &MembershipCheck,
) -> Result<BazilevicCandidate> {
    validate_membership(&lower_cubic(alpha, theta, order)?, check)
}

/// `h_2(z) = 1 + (alpha+1) b_2 e^{i theta} z + alpha(alpha+2)/2 b_2^2 e^{2 i theta} z^2`,
/// the 2-jet of `(f/z)^{alpha-1} f'` for the cubic extremal.
pub fn lower_h2(alpha: f64, theta: f64, order: usize) -> Result<TruncatedSeries> {
    check_alpha(alpha)?;
    let b2 = lower_b2(alpha);
    TruncatedSeries::from_slice(
        &[
            Complex64::new(1.0, 0.0),
            Complex64::from_polar((alpha + 1.0) * b2, theta),
            Complex64::from_polar(alpha * (alpha + 2.0) / 2.0 * b2 * b2, 2.0 * theta),
        ],
        order.max(2),
    )
}

fn check_t(t: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&t) {
        Ok(())
    } else {
        domain(format!("t = {t} is outside [-1, 1]"))
    }
}

/// `psi(t) = alpha(alpha+2) b_2^2 t^2 + (alpha+1) b_2 t + 1 - alpha(alpha+2)/2`.
///
/// This is the quadratic whose roots give the sharpness interval. Note that
/// its constant term differs from the boundary value of `Re h_2`, see
/// [`h2_boundary_real`].
pub fn psi(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_t(t)?;
    let b2 = lower_b2(alpha);
    let u = alpha * (alpha + 2.0);
    Ok(u * b2 * b2 * t * t + (alpha + 1.0) * b2 * t + 1.0 - u / 2.0)
}

/// `Re h_2(e^{i phi})` written in `t = cos(theta + phi)`:
/// `alpha(alpha+2) b_2^2 t^2 + (alpha+1) b_2 t + 1 - alpha(alpha+2) b_2^2 / 2`.
pub fn h2_boundary_real(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_t(t)?;
    let b2 = lower_b2(alpha);
    let u = alpha * (alpha + 2.0) * b2 * b2;
    Ok(u * t * t + (alpha + 1.0) * b2 * t + 1.0 - u / 2.0)
}

/// Minimum of `h2_boundary_real` over `t in [-1, 1]`.
pub fn h2_boundary_min(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let b2 = lower_b2(alpha);
    let u = alpha * (alpha + 2.0) * b2 * b2;
    let vertex = (-(alpha + 1.0) * b2 / (2.0 * u)).max(-1.0);
    h2_boundary_real(alpha, vertex)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessAnalysis {
    pub alpha: f64,
    pub b2: f64,
    /// Abscissa of the vertex of `psi`.
    pub t1: f64,
    /// `max(-1, t1)`, where `psi` attains its minimum on `[-1, 1]`.
    pub t_star: f64,
    pub psi_min: f64,
    pub lower_sharp: bool,
}

/// Closed-form minimum of `psi` on `[-1, 1]`.
pub fn psi_minimum(alpha: f64) -> Result<SharpnessAnalysis> {
    check_alpha(alpha)?;
    let s = (alpha + 1.0).powi(2) + 1.0;
    let u = alpha * (alpha + 2.0);
    let t1 = -s * (alpha + 1.0) / (4.0 * u * s.sqrt());
    let (t_star, psi_min) = if t1 >= -1.0 {
        (t1, 1.0 - u / 2.0 - (alpha + 1.0).powi(2) / (4.0 * u))
    } else {
        (
            -1.0,
            1.0 - u / 2.0 - 2.0 * (alpha + 1.0) / s.sqrt() + 4.0 * u / s,
        )
    };
    Ok(SharpnessAnalysis {
        alpha,
        b2: lower_b2(alpha),
        t1,
        t_star,
        psi_min,
        lower_sharp: psi_min >= -SHARP_BAND,
    })
}

/// `2a^4 + 8a^3 + 5a^2 - 6a + 1`; nonpositive exactly on `[alpha_1, alpha_2]`.
pub fn sharpness_quartic(a: f64) -> f64 {
    (((2.0 * a + 8.0) * a + 5.0) * a - 6.0) * a + 1.0
}

/// `15a^4 + 60a^3 + 57a^2 - 6a - 2`; nonnegative exactly when `t1 >= -1`.
pub fn vertex_quartic(a: f64) -> f64 {
    (((15.0 * a + 60.0) * a + 57.0) * a - 6.0) * a - 2.0
}

/// Bisection on a sign-changing bracket until its width drops below `tol`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return domain(format!("no sign change on [{lo}, {hi}]"));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalAlphas {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
}

pub fn alpha1_closed_form() -> f64 {
    (6f64.sqrt() - 2.0) / 2.0
}

pub fn alpha2_closed_form() -> f64 {
    2f64.sqrt() - 1.0
}

pub fn alpha3_closed_form() -> f64 {
    ((129f64.sqrt() + 33.0) / 30.0).sqrt() - 1.0
}

/// Roots located by bisection, then cross-checked against the closed forms.
pub fn critical_alphas() -> CriticalAlphas {
    const TOL: f64 = 1e-14;
    let alpha1 = bisect(sharpness_quartic, 0.2, 0.25, TOL).expect("bracket for alpha1");
    let alpha2 = bisect(sharpness_quartic, 0.4, 0.45, TOL).expect("bracket for alpha2");
    let alpha3 = bisect(vertex_quartic, 0.2, 0.22, TOL).expect("bracket for alpha3");
    debug_assert!((alpha1 - alpha1_closed_form()).abs() < 1e-12);
    debug_assert!((alpha2 - alpha2_closed_form()).abs() < 1e-12);
    debug_assert!((alpha3 - alpha3_closed_form()).abs() < 1e-12);
    CriticalAlphas { alpha1, alpha2, alpha3 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessVerdict {
    pub upper_sharp: bool,
    pub lower_sharp: bool,
    /// `psi_min`; the sign decides `lower_sharp` up to [`SHARP_BAND`].
    pub margin: f64,
}

pub fn sharpness_verdict(alpha: f64) -> Result<SharpnessVerdict> {
    let a = psi_minimum(alpha)?;
    Ok(SharpnessVerdict {
        upper_sharp: true,
        lower_sharp: a.lower_sharp,
        margin: a.psi_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classb1::Validity;
    use approx::assert_abs_diff_eq;

    // brute-force minimum of psi on a uniform t-grid
    fn grid_min(alpha: f64, points: usize) -> f64 {
        (0..points)
            .map(|i| psi(alpha, -1.0 + 2.0 * i as f64 / (points - 1) as f64).unwrap())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn bound_examples() {
        assert_abs_diff_eq!(upper_bound(1.0).unwrap(), 1.0 / 3.0);
        assert_abs_diff_eq!(upper_bound(2.0).unwrap(), 0.25);
        assert_abs_diff_eq!(upper_bound(1e-12).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(lower_bound(1.0).unwrap(), -0.4472135955, epsilon = 1e-10);
        assert_abs_diff_eq!(lower_bound(1e-12).unwrap(), -(0.5f64.sqrt()), epsilon = 1e-12);
        assert_abs_diff_eq!(
            lower_bound(alpha2_closed_form()).unwrap(),
            -1.0 / 3f64.sqrt(),
            epsilon = 1e-15
        );
        for bad in [0.0, -1.0, f64::NAN] {
            assert!(upper_bound(bad).is_err());
            assert!(lower_bound(bad).is_err());
        }
    }

    #[test]
    fn bounds_are_monotone_and_inside_global_envelope() {
        let grid: Vec<f64> = (1..=400).map(|i| i as f64 * 0.025).collect();
        for w in grid.windows(2) {
            assert!(upper_bound(w[1]).unwrap() < upper_bound(w[0]).unwrap());
            assert!(lower_bound(w[1]).unwrap() > lower_bound(w[0]).unwrap());
        }
        for &a in &grid {
            assert!(lower_bound(a).unwrap() >= -(0.5f64.sqrt()));
            assert!(upper_bound(a).unwrap() <= 0.5);
        }
    }

    #[test]
    fn upper_extremal_attains_bound() {
        let check = MembershipCheck::default();
        for alpha in [0.05, 0.3, 1.0, 2.0, 5.0] {
            let c = extremal_upper(alpha, 256, &check).unwrap();
            assert_eq!(c.validity, Validity::Valid);
            assert!(c.log_pair().gamma1.norm() < 1e-15);
            assert_abs_diff_eq!(c.gamma_diff(), upper_bound(alpha).unwrap(), epsilon = 1e-12);
        }
        let c = extremal_upper(2.0, 64, &check).unwrap();
        assert_abs_diff_eq!(c.f.coeff(3).re, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn cubic_attains_lower_bound_for_every_theta() {
        for alpha in [0.1, 0.3, 1.0, 3.0] {
            for theta in [0.0, 0.4, 1.1, PI, 5.0] {
                let c = lower_cubic(alpha, theta, 32).unwrap();
                assert_abs_diff_eq!(c.gamma_diff(), lower_bound(alpha).unwrap(), epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(
            lower_cubic(0.3, 0.0, 8).unwrap().gamma_diff(),
            -1.0 / 2.69f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn cubic_transform_has_h2_as_two_jet() {
        for alpha in [0.23, 0.3, 1.0, 2.5] {
            for theta in [0.0, 1.1, PI] {
                let c = lower_cubic(alpha, theta, 40).unwrap();
                let big_f = c.f_transform().unwrap();
                let h2 = lower_h2(alpha, theta, big_f.order()).unwrap();
                for k in 0..=2 {
                    assert!((big_f.coeff(k) - h2.coeff(k)).norm() < 1e-12);
                }
                let tail = (3..=big_f.order()).map(|k| big_f.coeff(k).norm()).fold(0.0, f64::max);
                if alpha == 1.0 {
                    assert!(tail < 1e-12);
                } else {
                    // (f/z)^{alpha-1} is not a polynomial, so neither is F
                    assert!(tail > 1e-3, "alpha {alpha}: tail {tail}");
                }
            }
        }
    }

    #[test]
    fn cubic_is_invalid_at_alpha_one() {
        let c = extremal_lower(1.0, 0.0, 64, &MembershipCheck::default()).unwrap();
        assert_eq!(c.validity, Validity::Invalid);
        assert!(!sharpness_verdict(1.0).unwrap().lower_sharp);
    }

    #[test]
    fn psi_examples() {
        for alpha in [0.2, 0.3, 1.0] {
            assert_abs_diff_eq!(
                psi(alpha, 0.0).unwrap(),
                1.0 - alpha * (alpha + 2.0) / 2.0,
                epsilon = 1e-15
            );
        }
        assert!(psi(1.0, 1.5).is_err());
        assert!(psi(-1.0, 0.0).is_err());
        let a1 = critical_alphas().alpha1;
        assert!(grid_min(a1, 1_000_001).abs() < 1e-9);
    }

    #[test]
    fn h2_boundary_quadratic_matches_sampled_real_part() {
        for alpha in [0.1, 0.3, 1.0] {
            for theta in [0.0, 1.1, PI] {
                let h2 = lower_h2(alpha, theta, 2).unwrap();
                for m in 0..64 {
                    let phi = -PI + 2.0 * PI * m as f64 / 64.0;
                    let t = (theta + phi).cos().clamp(-1.0, 1.0);
                    let direct = h2.eval(Complex64::from_polar(1.0, phi)).re;
                    assert!((direct - h2_boundary_real(alpha, t).unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn psi_and_boundary_quadratic_differ_off_alpha_where_b2_is_one() {
        // the two constant terms coincide only when b2^2 = 1, i.e. (alpha+1)^2 = 3
        let a = 3f64.sqrt() - 1.0;
        assert_abs_diff_eq!(psi(a, 0.2).unwrap(), h2_boundary_real(a, 0.2).unwrap(), epsilon = 1e-14);
        assert!((psi(0.3, 0.0).unwrap() - h2_boundary_real(0.3, 0.0).unwrap()).abs() > 0.1);
    }

    #[test]
    fn boundary_quadratic_is_negative_somewhere_for_every_alpha() {
        for i in 1..=200 {
            let alpha = i as f64 * 0.025;
            assert!(h2_boundary_min(alpha).unwrap() < 0.0, "alpha {alpha}");
        }
    }

    #[test]
    fn psi_minimum_matches_grid() {
        let crit = critical_alphas();
        for alpha in [0.05, 0.1, crit.alpha3, 0.22, 0.3, 0.41, 0.5, 1.0, 2.0] {
            let a = psi_minimum(alpha).unwrap();
            assert_abs_diff_eq!(a.psi_min, grid_min(alpha, 1_000_001), epsilon = 1e-9);
            assert_eq!(a.t_star, a.t1.max(-1.0));
            assert!(a.b2 > 0.0 && a.b2 < 2f64.sqrt());
        }
    }

    #[test]
    fn psi_minimum_examples() {
        let crit = critical_alphas();
        assert!(psi_minimum(crit.alpha1).unwrap().psi_min.abs() < 1e-9);
        assert!(psi_minimum(crit.alpha2).unwrap().psi_min.abs() < 1e-9);
        assert!(psi_minimum(0.3).unwrap().psi_min > 0.0);
        let low = psi_minimum(0.1).unwrap();
        assert_eq!(low.t_star, -1.0);
        assert!(low.psi_min < 0.0);
        assert!(psi_minimum(0.0).is_err());
    }

    #[test]
    fn vertex_inside_interval_iff_alpha_above_alpha3() {
        let a3 = critical_alphas().alpha3;
        for i in 1..=500 {
            let alpha = i as f64 * 0.002;
            let a = psi_minimum(alpha).unwrap();
            assert_eq!(a.t1 >= -1.0, alpha >= a3, "alpha {alpha}");
            assert_eq!(vertex_quartic(alpha) >= 0.0, alpha >= a3, "alpha {alpha}");
        }
    }

    #[test]
    fn quartic_sign_on_grid() {
        let c = critical_alphas();
        for i in 1..=2000 {
            let alpha = i as f64 * 0.0005;
            let inside = alpha >= c.alpha1 && alpha <= c.alpha2;
            assert_eq!(sharpness_quartic(alpha) <= 0.0, inside, "alpha {alpha}");
            assert_eq!(psi_minimum(alpha).unwrap().lower_sharp, inside, "alpha {alpha}");
        }
    }

    #[test]
    fn critical_values() {
        let c = critical_alphas();
        assert_abs_diff_eq!(c.alpha1, alpha1_closed_form(), epsilon = 1e-12);
        assert_abs_diff_eq!(c.alpha2, alpha2_closed_form(), epsilon = 1e-12);
        assert_abs_diff_eq!(c.alpha3, alpha3_closed_form(), epsilon = 1e-12);
        assert!(c.alpha3 < c.alpha1 && c.alpha1 < c.alpha2);
        assert!(sharpness_quartic(c.alpha1).abs() < 1e-10);
        assert!(sharpness_quartic(c.alpha2).abs() < 1e-10);
        assert_eq!(format!("{:.4}", c.alpha1), "0.2247");
        assert_eq!(format!("{:.4}", c.alpha2), "0.4142");
        assert_eq!(format!("{:.5}", c.alpha3), "0.21597");
        assert_abs_diff_eq!(c.alpha3, 0.215974461, epsilon = 1e-9);
    }

    #[test]
    fn verdict_examples() {
        let c = critical_alphas();
        assert!(sharpness_verdict(0.3).unwrap().lower_sharp);
        assert!(!sharpness_verdict(1.0).unwrap().lower_sharp);
        let edge = sharpness_verdict(c.alpha2).unwrap();
        assert!(edge.lower_sharp && edge.upper_sharp);
        assert!(edge.margin.abs() < 1e-9);
    }

    #[test]
    fn bisect_requires_sign_change() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
        assert_abs_diff_eq!(bisect(|x| x - 0.3, 0.0, 1.0, 1e-14).unwrap(), 0.3, epsilon = 1e-14);
    }
}
