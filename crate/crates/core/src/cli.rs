//! Report types and command implementations behind the `bazlab` binary.
//!
//! Every command is a plain function returning a serializable report, so the
//! binary only parses flags, prints, and maps errors to exit codes.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classb1::{BazilevicCandidate, MembershipCheck, MembershipEvidence, SchwarzJet, Validity};
use crate::error::{check_alpha, Error, Result};
use crate::extremal::{
    alpha1_closed_form, alpha2_closed_form, alpha3_closed_form, critical_alphas, extremal_lower,
    extremal_upper, lower_b2, lower_bound, psi_minimum, sharpness_quartic, sharpness_verdict,
    upper_bound, vertex_quartic, SharpnessAnalysis,
};
use crate::optimizer::{empirical_range, optimize, realize, Direction, EmpiricalRange, GridBudget, OptResult};
use crate::series::DEFAULT_ORDER;

/// Environment variable overriding the default truncation order.
pub const ORDER_ENV: &str = "BAZLAB_ORDER";

/// Attainment tolerance for the extremal constructions.
pub const ATTAIN_TOL: f64 = 1e-12;

pub const CSV_HEADER: &str = "alpha,upper,lower,psi_min,lower_sharp";

/// Truncation order from `BAZLAB_ORDER`, or [`DEFAULT_ORDER`].
pub fn default_order() -> Result<usize> {
    match std::env::var(ORDER_ENV) {
        Ok(v) => parse_order(&v),
        Err(_) => Ok(DEFAULT_ORDER),
    }
}

pub fn parse_order(v: &str) -> Result<usize> {
    match v.trim().parse::<usize>() {
        Ok(n) if n >= 3 => Ok(n),
        _ => Err(Error::Usage(format!("truncation order must be an integer >= 3, got {v:?}"))),
    }
}

fn ensure_finite(what: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite value in {what}")))
    }
}

/// Everything needed to recompute a report bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub order: usize,
    pub check: MembershipCheck,
    pub grid: GridBudget,
    /// The pipeline is deterministic; the seed is recorded for randomized callers.
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn new(order: usize, check: MembershipCheck, grid: GridBudget) -> Self {
        Self {
            order,
            check,
            grid,
            seed: 0,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub alpha: f64,
    pub upper: f64,
    pub lower: f64,
    pub lower_sharp: bool,
    pub psi_min: f64,
    pub analysis: SharpnessAnalysis,
    pub empirical: Option<EmpiricalRange>,
    pub provenance: Provenance,
}

impl BoundsReport {
    /// Reruns the command from the recorded provenance.
    pub fn recompute(&self) -> Result<BoundsReport> {
        cmd_bounds(self.alpha, self.empirical.is_some(), &self.provenance)
    }
}

pub fn cmd_bounds(alpha: f64, with_empirical: bool, provenance: &Provenance) -> Result<BoundsReport> {
    check_alpha(alpha)?;
    let analysis = psi_minimum(alpha)?;
    let empirical = if with_empirical {
        Some(empirical_range(alpha, &provenance.grid, provenance.order, &provenance.check)?)
    } else {
        None
    };
    let report = BoundsReport {
        alpha,
        upper: upper_bound(alpha)?,
        lower: lower_bound(alpha)?,
        lower_sharp: analysis.lower_sharp,
        psi_min: analysis.psi_min,
        analysis,
        empirical,
        provenance: provenance.clone(),
    };
    ensure_finite(
        "bounds report",
        &[report.upper, report.lower, report.psi_min, analysis.t1, analysis.t_star, analysis.b2],
    )?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub upper: f64,
    pub lower: f64,
    pub psi_min: f64,
    pub lower_sharp: bool,
}

pub fn cmd_scan(from: f64, to: f64, steps: usize) -> Result<Vec<ScanRow>> {
    check_alpha(from)?;
    if !to.is_finite() || to <= from {
        return Err(Error::Usage(format!("scan needs 0 < from < to, got {from}..{to}")));
    }
    if steps < 2 {
        return Err(Error::Usage(format!("scan needs at least 2 steps, got {steps}")));
    }
    (0..steps)
        .map(|i| {
            let alpha = if i == steps - 1 {
                to
            } else {
                from + (to - from) * i as f64 / (steps - 1) as f64
            };
            let a = psi_minimum(alpha)?;
            Ok(ScanRow {
                alpha,
                upper: upper_bound(alpha)?,
                lower: lower_bound(alpha)?,
                psi_min: a.psi_min,
                lower_sharp: a.lower_sharp,
            })
        })
        .collect()
}

/// Writes the scan as CSV: mandatory header, `\n` line endings, 17 significant digits.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], mut out: W) -> anyhow::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        ensure_finite("scan row", &[r.alpha, r.upper, r.lower, r.psi_min])?;
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.alpha, r.upper, r.lower, r.psi_min, r.lower_sharp
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub validity: Validity,
    pub gamma_diff: f64,
    pub a2: Complex64,
    pub a3: Complex64,
    pub evidence: Option<MembershipEvidence>,
}

impl From<&BazilevicCandidate> for CandidateSummary {
    fn from(c: &BazilevicCandidate) -> Self {
        let jet = c.jet();
        Self {
            validity: c.validity,
            gamma_diff: c.gamma_diff(),
            a2: jet.a2,
            a3: jet.a3,
            evidence: c.evidence.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub alpha: f64,
    pub theta: f64,
    pub upper: f64,
    pub lower: f64,
    pub lower_sharp: bool,
    pub psi_min: f64,
    pub upper_extremal: CandidateSummary,
    pub lower_cubic: CandidateSummary,
    /// Blaschke-product realization of the lower-bound jet; informational.
    pub lower_jet_realization: CandidateSummary,
    pub checks: Vec<CheckLine>,
    pub passed: bool,
    pub provenance: Provenance,
}

/// Builds both extremal candidates, validates them and compares against the bounds.
pub fn cmd_verify(alpha: f64, theta: f64, provenance: &Provenance) -> Result<VerifyReport> {
    check_alpha(alpha)?;
    let order = provenance.order;
    let check = &provenance.check;
    let upper = upper_bound(alpha)?;
    let lower = lower_bound(alpha)?;
    let verdict = sharpness_verdict(alpha)?;

    let up = extremal_upper(alpha, order, check)?;
    let cubic = extremal_lower(alpha, theta, order, check)?;
    let b2 = lower_b2(alpha);
    let lower_jet = SchwarzJet::new(
        Complex64::from_polar(-(alpha + 1.0) * b2 / 2.0, theta),
        Complex64::from_polar(b2 * b2 / 4.0, 2.0 * theta),
    )?;
    let lifted = realize(alpha, &lower_jet, order, check)?;

    let mut checks = vec![
        CheckLine {
            name: "upper extremal is a member".into(),
            passed: up.validity == Validity::Valid,
            detail: format!("validity {:?}", up.validity),
        },
        CheckLine {
            name: "upper extremal attains 1/(alpha+2)".into(),
            passed: (up.gamma_diff() - upper).abs() <= ATTAIN_TOL,
            detail: format!("gamma_diff {} vs bound {upper}", up.gamma_diff()),
        },
        CheckLine {
            name: "cubic extremal attains the lower bound".into(),
            passed: (cubic.gamma_diff() - lower).abs() <= ATTAIN_TOL,
            detail: format!("gamma_diff {} vs bound {lower}", cubic.gamma_diff()),
        },
    ];
    let (expect, passed) = if verdict.lower_sharp {
        ("Valid", cubic.validity == Validity::Valid)
    } else {
        ("not Valid", cubic.validity != Validity::Valid)
    };
    checks.push(CheckLine {
        name: "cubic membership matches the psi verdict".into(),
        passed,
        detail: format!(
            "psi_min {:.6e} -> expected {expect}, got {:?} (min Re F {:.6e})",
            verdict.margin,
            cubic.validity,
            cubic.evidence.as_ref().map_or(f64::NAN, |e| e.min_re_f())
        ),
    });
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        alpha,
        theta,
        upper,
        lower,
        lower_sharp: verdict.lower_sharp,
        psi_min: verdict.margin,
        upper_extremal: (&up).into(),
        lower_cubic: (&cubic).into(),
        lower_jet_realization: (&lifted).into(),
        checks,
        passed,
        provenance: provenance.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub result: OptResult,
    pub bound: f64,
    pub candidate: CandidateSummary,
    pub provenance: Provenance,
}

pub fn cmd_optimize(alpha: f64, direction: Direction, provenance: &Provenance) -> Result<OptimizeReport> {
    let mut result = optimize(alpha, direction, &provenance.grid)?;
    let candidate = realize(alpha, &result.arg_jet, provenance.order, &provenance.check)?;
    result.validated = candidate.validity;
    let bound = match direction {
        Direction::Max => upper_bound(alpha)?,
        Direction::Min => lower_bound(alpha)?,
    };
    ensure_finite("optimize report", &[result.value, result.relaxation_gap, bound])?;
    Ok(OptimizeReport {
        result,
        bound,
        candidate: (&candidate).into(),
        provenance: provenance.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    /// `2a^4 + 8a^3 + 5a^2 - 6a + 1` at alpha1 and alpha2.
    pub residual_alpha1: f64,
    pub residual_alpha2: f64,
    /// `15a^4 + 60a^3 + 57a^2 - 6a - 2` at alpha3.
    pub residual_alpha3: f64,
    pub closed_form_alpha1: f64,
    pub closed_form_alpha2: f64,
    pub closed_form_alpha3: f64,
}

pub fn cmd_critical() -> CriticalReport {
    let c = critical_alphas();
    CriticalReport {
        alpha1: c.alpha1,
        alpha2: c.alpha2,
        alpha3: c.alpha3,
        residual_alpha1: sharpness_quartic(c.alpha1),
        residual_alpha2: sharpness_quartic(c.alpha2),
        residual_alpha3: vertex_quartic(c.alpha3),
        closed_form_alpha1: alpha1_closed_form(),
        closed_form_alpha2: alpha2_closed_form(),
        closed_form_alpha3: alpha3_closed_form(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance::new(128, MembershipCheck::default(), GridBudget::default())
    }

    #[test]
    fn bounds_examples() {
        let r = cmd_bounds(1.0, false, &prov()).unwrap();
        assert!((r.upper - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.lower + 0.447213595499958).abs() < 1e-12);
        assert!(!r.lower_sharp);
        assert!(cmd_bounds(0.3, false, &prov()).unwrap().lower_sharp);
        assert!(matches!(cmd_bounds(-1.0, false, &prov()), Err(Error::Domain(_))));
    }

    #[test]
    fn scan_validation() {
        assert_eq!(cmd_scan(0.1, 0.5, 2).unwrap().len(), 2);
        assert!(cmd_scan(0.5, 0.1, 10).is_err());
        assert!(cmd_scan(0.0, 0.1, 10).is_err());
        assert!(cmd_scan(0.1, 0.5, 1).is_err());
    }

    #[test]
    fn csv_format() {
        let rows = cmd_scan(0.25, 0.5, 2).unwrap();
        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "");
        assert!(lines[1].starts_with("2.5000000000000000e-1,"));
        assert!(lines[1].ends_with(",true"));
        assert!(lines[2].ends_with(",false"));
    }

    #[test]
    fn csv_rejects_non_finite() {
        let mut rows = cmd_scan(0.25, 0.5, 2).unwrap();
        rows[1].psi_min = f64::NAN;
        assert!(write_scan_csv(&rows, Vec::new()).is_err());
    }

    #[test]
    fn order_parsing() {
        assert_eq!(parse_order("64").unwrap(), 64);
        assert!(parse_order("2").is_err());
        assert!(parse_order("x").is_err());
    }

    #[test]
    fn critical_report() {
        let c = cmd_critical();
        assert!(c.residual_alpha1.abs() < 1e-10 && c.residual_alpha2.abs() < 1e-10);
        assert!((c.alpha1 - 0.224744871).abs() < 1e-9);
        assert!((c.alpha2 - 0.414213562).abs() < 1e-9);
        assert!((c.alpha3 - 0.215974461).abs() < 1e-9);
    }
}
