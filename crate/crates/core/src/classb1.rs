//! Members of `B_1(alpha)`: `Re[(f/z)^{alpha-1} f'] > 0` on the unit disk.
//!
//! Candidates are built from a Carathéodory function `h` by solving
//! `(f/z)^{alpha-1} f' = h`, which in series form reads
//! `(f/z)^alpha = 1 + sum_{n>=1} alpha/(alpha+n) p_n z^n`.
//! Membership of an arbitrary candidate is then checked numerically on
//! concentric circles.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, domain, Error, Result};
use crate::series::{TruncatedSeries, UNIT_TOL};

/// Slack allowed on the Schwarz-jet inequalities.
pub const JET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub weight: f64,
    pub angle: f64,
}

/// Discrete Herglotz measure: `h(z) = sum_j w_j (1 + e^{i theta_j} z) / (1 - e^{i theta_j} z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaratheodoryMeasure {
    atoms: Vec<Atom>,
}

impl CaratheodoryMeasure {
    /// Builds a measure from `(weight, angle)` pairs. Angles are reduced into `[0, 2 pi)`.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(weight, angle)| Atom {
                weight,
                angle: angle.rem_euclid(TAU),
            })
            .collect();
        if atoms.is_empty() {
            return domain("a Carathéodory measure needs at least one atom");
        }
        if let Some(a) = atoms.iter().find(|a| a.weight.is_nan() || a.weight < 0.0 || !a.angle.is_finite()) {
            return domain(format!("invalid atom {a:?}"));
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > UNIT_TOL {
            return domain(format!("atom weights sum to {total}, expected 1"));
        }
        Ok(Self { atoms })
    }

    pub fn point_mass(angle: f64) -> Self {
        Self::new([(1.0, angle)]).expect("unit point mass")
    }

    /// Random measure with `1..=max_atoms` atoms, uniform angles and
    /// normalized exponential weights.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_atoms: usize) -> Self {
        let n = rng.gen_range(1..=max_atoms.max(1));
        let raw: Vec<(f64, f64)> = (0..n)
            .map(|_| (-(1.0 - rng.gen::<f64>()).ln(), rng.gen::<f64>() * TAU))
            .collect();
        let total: f64 = raw.iter().map(|(w, _)| w).sum();
        let mut atoms: Vec<(f64, f64)> = raw.into_iter().map(|(w, t)| (w / total, t)).collect();
        // push the rounding residue into the first weight
        let residue = 1.0 - atoms.iter().map(|(w, _)| w).sum::<f64>();
        atoms[0].0 += residue;
        Self::new(atoms).expect("normalized random measure")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `p_n = 2 sum_j w_j e^{i n theta_j}` for `n >= 1`, and `p_0 = 1`.
    pub fn coefficient(&self, n: usize) -> Complex64 {
        if n == 0 {
            return Complex64::new(1.0, 0.0);
        }
        self.atoms
            .iter()
            .map(|a| Complex64::from_polar(2.0 * a.weight, n as f64 * a.angle))
            .sum()
    }

    /// Closed-form value of `h(z)` for `|z| < 1`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| {
                let xz = Complex64::from_polar(1.0, a.angle) * z;
                a.weight * (1.0 + xz) / (1.0 - xz)
            })
            .sum()
    }

    pub fn series(&self, order: usize) -> TruncatedSeries {
        let coeffs: Vec<Complex64> = (0..=order.max(1)).map(|n| self.coefficient(n)).collect();
        TruncatedSeries::new(coeffs).expect("order >= 1")
    }
}

/// `1 + p_1 z + ... + p_N z^N` for the measure.
pub fn caratheodory_series(mu: &CaratheodoryMeasure, order: usize) -> Result<TruncatedSeries> {
    let total: f64 = mu.atoms.iter().map(|a| a.weight).sum();
    if (total - 1.0).abs() > UNIT_TOL {
        return domain(format!("atom weights sum to {total}, expected 1"));
    }
    Ok(mu.series(order))
}

/// The Cayley-type involution `w -> (1 - w)/(1 + w)`.
///
/// Sends a Schwarz function (`w(0) = 0`) to a Carathéodory function and back.
pub fn schwarz_to_caratheodory(omega: &TruncatedSeries) -> Result<TruncatedSeries> {
    if omega.coeff(0).norm() > UNIT_TOL {
        return domain(format!(
            "Schwarz series must vanish at 0, got constant term {}",
            omega.coeff(0)
        ));
    }
    cayley(omega)
}

/// `(1 - h)/(1 + h)` for a Carathéodory series (`h(0) = 1`).
pub fn caratheodory_to_schwarz(h: &TruncatedSeries) -> Result<TruncatedSeries> {
    if (h.coeff(0) - 1.0).norm() > UNIT_TOL {
        return domain(format!("Carathéodory series must have h(0) = 1, got {}", h.coeff(0)));
    }
    let mut g = cayley(h)?;
    // exact zero instead of 0/2 rounding
    let mut c = g.coeffs().to_vec();
    c[0] = Complex64::new(0.0, 0.0);
    g = TruncatedSeries::new(c)?;
    Ok(g)
}

fn cayley(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    let one = TruncatedSeries::one(s.order());
    one.sub(s)?.div(&one.add(s)?)
}

/// First two coefficients `(c1, c2)` of a Schwarz function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchwarzJet {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl SchwarzJet {
    /// Checks `|c1| <= 1` and `|c2| <= 1 - |c1|^2` up to [`JET_TOL`].
    pub fn new(c1: Complex64, c2: Complex64) -> Result<Self> {
        let jet = Self { c1, c2 };
        if jet.slack() < -JET_TOL || c1.norm() > 1.0 + JET_TOL {
            return domain(format!(
                "infeasible Schwarz jet: |c1| = {}, |c2| = {}",
                c1.norm(),
                c2.norm()
            ));
        }
        Ok(jet)
    }

    /// `1 - |c1|^2 - |c2|`; nonnegative for feasible jets.
    pub fn slack(&self) -> f64 {
        1.0 - self.c1.norm_sqr() - self.c2.norm()
    }

    /// Reads `(c1, c2)` off a Schwarz series. No feasibility check.
    pub fn of_series(omega: &TruncatedSeries) -> (Complex64, Complex64) {
        (omega.coeff(1), omega.coeff(2))
    }
}

/// `alpha` together with the second and third Taylor coefficients of `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionJet {
    pub alpha: f64,
    pub a2: Complex64,
    pub a3: Complex64,
}

impl FunctionJet {
    pub fn from_series(alpha: f64, f: &TruncatedSeries) -> Self {
        Self {
            alpha,
            a2: f.coeff(2),
            a3: f.coeff(3),
        }
    }

    /// `2/(1+alpha) - |a2|`.
    pub fn a2_slack(&self) -> f64 {
        2.0 / (1.0 + self.alpha) - self.a2.norm()
    }

    /// Right side minus left side of
    /// `|a3 - (a+3)/(2(a+2)) a2^2| <= 2/(a+2) - (a+1)^2/(2(a+2)) |a2|^2`.
    pub fn coefficient_slack(&self) -> f64 {
        let a = self.alpha;
        let lhs = (self.a3 - (a + 3.0) / (2.0 * (a + 2.0)) * self.a2 * self.a2).norm();
        let rhs = 2.0 / (a + 2.0) - (a + 1.0).powi(2) / (2.0 * (a + 2.0)) * self.a2.norm_sqr();
        rhs - lhs
    }

    /// The Schwarz jet of `(1 - F)/(1 + F)` for `F = (f/z)^{alpha-1} f'`.
    pub fn schwarz(&self) -> (Complex64, Complex64) {
        let a = self.alpha;
        let c1 = -(a + 1.0) / 2.0 * self.a2;
        let c2 = -((a + 2.0) / 2.0 * self.a3 - (a + 3.0) / 4.0 * self.a2 * self.a2);
        (c1, c2)
    }
}

pub(crate) fn jet_from_schwarz_unchecked(alpha: f64, j: &SchwarzJet) -> FunctionJet {
    let a2 = -2.0 * j.c1 / (alpha + 1.0);
    let a3 = -2.0 * j.c2 / (alpha + 2.0) + (alpha + 3.0) / (2.0 * (alpha + 2.0)) * a2 * a2;
    FunctionJet { alpha, a2, a3 }
}

/// Inverts `c1 = -(a+1) a2 / 2`, `c2 = -[(a+2)/2 a3 - (a+3)/4 a2^2]`.
pub fn jet_from_schwarz(alpha: f64, j: &SchwarzJet) -> Result<FunctionJet> {
    check_alpha(alpha)?;
    let j = SchwarzJet::new(j.c1, j.c2)?;
    Ok(jet_from_schwarz_unchecked(alpha, &j))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogCoeffPair {
    pub gamma1: Complex64,
    pub gamma2: Complex64,
}

pub fn log_coeffs(jet: &FunctionJet) -> LogCoeffPair {
    LogCoeffPair {
        gamma1: jet.a2 / 2.0,
        gamma2: (jet.a3 - jet.a2 * jet.a2 / 2.0) / 2.0,
    }
}

/// `gamma_1 ... gamma_count` from `log(f/z) = 2 sum gamma_n z^n`.
pub fn log_coeffs_series(f: &TruncatedSeries, count: usize) -> Result<Vec<Complex64>> {
    if f.coeff(0).norm() > UNIT_TOL || (f.coeff(1) - 1.0).norm() > UNIT_TOL {
        return domain("f must be normalized: f(0) = 0, f'(0) = 1");
    }
    let q = f.shift_down()?;
    if count > q.order() {
        return Err(Error::Usage(format!(
            "requested {count} logarithmic coefficients from an order {} series",
            f.order()
        )));
    }
    let l = q.log_unit()?;
    Ok((1..=count).map(|n| l.coeff(n) / 2.0).collect())
}

/// `|gamma_2| - |gamma_1|`.
pub fn gamma_diff(pair: &LogCoeffPair) -> f64 {
    pair.gamma2.norm() - pair.gamma1.norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validity {
    Valid,
    Invalid,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub radius: f64,
    pub min_re_f: f64,
    pub min_abs_g: f64,
    /// Tail estimate of the truncated `F` series on this circle.
    pub tail_f: f64,
    pub tail_g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipEvidence {
    pub radii: Vec<RadiusReport>,
    /// Winding number of `g = (f/z)^alpha` around 0 on the outermost circle;
    /// absent when `g` vanishes at a sample point.
    pub winding: Option<i64>,
    pub samples: usize,
    pub winding_samples: usize,
    pub tolerance: f64,
}

impl MembershipEvidence {
    pub fn min_re_f(&self) -> f64 {
        self.radii.iter().map(|r| r.min_re_f).fold(f64::INFINITY, f64::min)
    }

    pub fn min_abs_g(&self) -> f64 {
        self.radii.iter().map(|r| r.min_abs_g).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipCheck {
    pub radii: Vec<f64>,
    pub samples: usize,
    pub winding_samples: usize,
    pub tolerance: f64,
}

impl Default for MembershipCheck {
    fn default() -> Self {
        Self {
            radii: vec![0.5, 0.75, 0.9],
            samples: 4096,
            winding_samples: 8192,
            tolerance: 1e-9,
        }
    }
}

impl MembershipCheck {
    pub fn with_radii(radii: Vec<f64>) -> Self {
        Self {
            radii,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::Usage("at least one check radius is required".into()));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return domain(format!("check radius {r} is outside (0, 1)"));
        }
        if self.radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Usage("check radii must be strictly increasing".into()));
        }
        if self.samples < 256 || self.winding_samples < 256 {
            return Err(Error::Usage("at least 256 samples per circle are required".into()));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::Usage("tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BazilevicCandidate {
    pub alpha: f64,
    /// Coefficients of `f`, with `f(z) = z + a_2 z^2 + ...`.
    pub f: TruncatedSeries,
    /// `(f/z)^alpha`, constant term 1.
    pub g: TruncatedSeries,
    pub validity: Validity,
    pub evidence: Option<MembershipEvidence>,
}

impl BazilevicCandidate {
    /// Wraps an explicitly given `f`; `g` is computed as `(f/z)^alpha`.
    pub fn from_f(alpha: f64, f: TruncatedSeries) -> Result<Self> {
        check_alpha(alpha)?;
        if f.coeff(0).norm() > UNIT_TOL || (f.coeff(1) - 1.0).norm() > UNIT_TOL {
            return domain("f must be normalized: f(0) = 0, f'(0) = 1");
        }
        let g = f.shift_down()?.pow_unit(alpha)?;
        Ok(Self {
            alpha,
            f,
            g,
            validity: Validity::Undetermined,
            evidence: None,
        })
    }

    pub fn jet(&self) -> FunctionJet {
        FunctionJet::from_series(self.alpha, &self.f)
    }

    pub fn log_pair(&self) -> LogCoeffPair {
        log_coeffs(&self.jet())
    }

    pub fn gamma_diff(&self) -> f64 {
        gamma_diff(&self.log_pair())
    }

    /// `F = (f/z)^{alpha-1} f'`, exact through the order of `f/z`.
    pub fn f_transform(&self) -> Result<TruncatedSeries> {
        let q = self.f.shift_down()?;
        let df = self.f.derivative().truncate(q.order())?;
        q.pow_unit(self.alpha - 1.0)?.mul(&df)
    }
}

/// Solves `(f/z)^{alpha-1} f' = h` for `f`.
pub fn bazilevic_from_h(alpha: f64, h: &TruncatedSeries) -> Result<BazilevicCandidate> {
    check_alpha(alpha)?;
    if (h.coeff(0) - 1.0).norm() > UNIT_TOL {
        return domain(format!("h must satisfy h(0) = 1, got {}", h.coeff(0)));
    }
    let n = h.order();
    let mut gc = h.coeffs().to_vec();
    gc[0] = Complex64::new(1.0, 0.0);
    for (k, c) in gc.iter_mut().enumerate().skip(1) {
        *c *= alpha / (alpha + k as f64);
    }
    let g = TruncatedSeries::new(gc)?;
    let q = g.pow_unit(1.0 / alpha)?;
    let mut fc = Vec::with_capacity(n + 1);
    fc.push(Complex64::new(0.0, 0.0));
    fc.extend_from_slice(&q.coeffs()[..n]);
    Ok(BazilevicCandidate {
        alpha,
        f: TruncatedSeries::new(fc)?,
        g,
        validity: Validity::Undetermined,
        evidence: None,
    })
}

fn winding_number(values: &[Complex64]) -> Option<i64> {
    if values.iter().any(|v| v.norm() == 0.0) {
        return None;
    }
    let total: f64 = values
        .iter()
        .zip(values.iter().cycle().skip(1))
        .map(|(a, b)| (b / a).arg())
        .sum();
    Some((total / TAU).round() as i64)
}

/// Samples `Re F` and `|g|` on every check circle plus the winding of `g` on the
/// outermost one, and sets the tri-state verdict.
///
/// A circle on which the truncation tail of `F` exceeds the tolerance can
/// still prove invalidity but never validity.
pub fn validate_membership(
    c: &BazilevicCandidate,
    check: &MembershipCheck,
) -> Result<BazilevicCandidate> {
    check.check()?;
    let big_f = c.f_transform()?;
    let mut radii = Vec::with_capacity(check.radii.len());
    for &r in &check.radii {
        let min_re_f = big_f
            .eval_circle(r, check.samples)
            .iter()
            .map(|v| v.re)
            .fold(f64::INFINITY, f64::min);
        let min_abs_g = c
            .g
            .eval_circle(r, check.samples)
            .iter()
            .map(|v| v.norm())
            .fold(f64::INFINITY, f64::min);
        radii.push(RadiusReport {
            radius: r,
            min_re_f,
            min_abs_g,
            tail_f: big_f.tail_estimate(r),
            tail_g: c.g.tail_estimate(r),
        });
    }
    let outer = *check.radii.last().expect("nonempty radii");
    let winding = winding_number(&c.g.eval_circle(outer, check.winding_samples));
    let outer_report = radii.last().expect("nonempty radii");
    let winding_resolved = outer_report.tail_g < outer_report.min_abs_g;

    let tol = check.tolerance;
    let negative = radii.iter().any(|r| r.min_re_f < -(tol + r.tail_f));
    let positive = radii.iter().all(|r| r.min_re_f > tol + r.tail_f);
    let validity = match winding {
        Some(0) if positive => Validity::Valid,
        _ if negative => Validity::Invalid,
        Some(0) => Validity::Undetermined,
        _ if winding_resolved => Validity::Invalid,
        _ => Validity::Undetermined,
    };
    Ok(BazilevicCandidate {
        validity,
        evidence: Some(MembershipEvidence {
            radii,
            winding,
            samples: check.samples,
            winding_samples: check.winding_samples,
            tolerance: tol,
        }),
        ..c.clone()
    })
}
