//! Extrema of `|gamma_2| - |gamma_1|` over the 2-jets `(c1, c2)` of Schwarz
//! functions, and realization of optimal jets as concrete candidates.
//!
//! Jets are normalized by rotation so that `c1 = x >= 0` is real; the second
//! coefficient is `c2 = (1 - x^2) rho e^{i psi_arg}`.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classb1::{
    bazilevic_from_h, gamma_diff, jet_from_schwarz_unchecked, log_coeffs, schwarz_to_caratheodory,
    validate_membership, BazilevicCandidate, MembershipCheck, SchwarzJet, Validity, JET_TOL,
};
use crate::error::{check_alpha, domain, Error, Result};
use crate::extremal::{lower_bound, upper_bound};
use crate::series::TruncatedSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetSearchPoint {
    pub x: f64,
    pub rho: f64,
    pub psi_arg: f64,
}

impl JetSearchPoint {
    pub fn new(x: f64, rho: f64, psi_arg: f64) -> Self {
        Self {
            x: x.clamp(0.0, 1.0),
            rho: rho.clamp(0.0, 1.0),
            psi_arg: psi_arg.rem_euclid(TAU),
        }
    }

    pub fn decode(&self) -> SchwarzJet {
        SchwarzJet {
            c1: Complex64::new(self.x, 0.0),
            c2: Complex64::from_polar((1.0 - self.x * self.x) * self.rho, self.psi_arg),
        }
    }

    fn lex_cmp(&self, other: &Self) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then(self.rho.total_cmp(&other.rho))
            .then(self.psi_arg.total_cmp(&other.psi_arg))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Max,
    Min,
}

impl Direction {
    /// Orders `(value, point)` pairs so that the preferred one compares `Less`;
    /// ties go to the lexicographically smaller point.
    fn prefer(self, a: (f64, &JetSearchPoint), b: (f64, &JetSearchPoint)) -> Ordering {
        let by_value = match self {
            Direction::Max => b.0.total_cmp(&a.0),
            Direction::Min => a.0.total_cmp(&b.0),
        };
        by_value.then_with(|| a.1.lex_cmp(b.1))
    }

    fn improves(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Direction::Max => candidate > incumbent,
            Direction::Min => candidate < incumbent,
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Direction::Max),
            "min" => Ok(Direction::Min),
            other => Err(Error::Usage(format!("direction must be max or min, got {other}"))),
        }
    }
}

/// `|gamma_2| - |gamma_1|` of the function jet determined by the decoded Schwarz jet.
pub fn objective(alpha: f64, p: &JetSearchPoint) -> f64 {
    debug_assert!(alpha > 0.0);
    gamma_diff(&log_coeffs(&jet_from_schwarz_unchecked(alpha, &p.decode())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridBudget {
    pub nx: usize,
    pub nrho: usize,
    pub npsi: usize,
    /// Refinement stops once every step length is below this.
    pub refine_tol: f64,
    /// Number of best coarse cells used as refinement starts.
    pub starts: usize,
    /// Stencil half-width: each refinement poll visits `(2k+1)^3 - 1` neighbours.
    pub stencil: usize,
}

impl Default for GridBudget {
    fn default() -> Self {
        Self {
            nx: 101,
            nrho: 51,
            npsi: 128,
            refine_tol: 1e-9,
            starts: 4,
            stencil: 2,
        }
    }
}

impl GridBudget {
    fn check(&self) -> Result<()> {
        if self.nx < 2 || self.nrho < 2 || self.npsi < 4 {
            return Err(Error::Usage(format!(
                "degenerate grid {}x{}x{}: need at least 2x2x4",
                self.nx, self.nrho, self.npsi
            )));
        }
        if !(self.refine_tol > 0.0 && self.refine_tol < 1.0) {
            return Err(Error::Usage(format!(
                "refinement tolerance must lie in (0, 1), got {}",
                self.refine_tol
            )));
        }
        if self.starts == 0 || self.stencil == 0 {
            return Err(Error::Usage("starts and stencil must be positive".into()));
        }
        Ok(())
    }

    fn point(&self, i: usize, j: usize, k: usize) -> JetSearchPoint {
        JetSearchPoint {
            x: i as f64 / (self.nx - 1) as f64,
            rho: j as f64 / (self.nrho - 1) as f64,
            psi_arg: TAU * k as f64 / self.npsi as f64,
        }
    }

    fn spacing(&self) -> [f64; 3] {
        [
            1.0 / (self.nx - 1) as f64,
            1.0 / (self.nrho - 1) as f64,
            TAU / self.npsi as f64,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredPoint {
    pub value: f64,
    pub point: JetSearchPoint,
}

/// The `count` best coarse-grid points, best first.
pub fn top_cells(
    alpha: f64,
    direction: Direction,
    budget: &GridBudget,
    count: usize,
) -> Result<Vec<ScoredPoint>> {
    check_alpha(alpha)?;
    budget.check()?;
    let (nx, nrho, npsi) = (budget.nx, budget.nrho, budget.npsi);
    let mut cells: Vec<ScoredPoint> = (0..nx * nrho * npsi)
        .into_par_iter()
        .map(|idx| {
            let (i, rest) = (idx / (nrho * npsi), idx % (nrho * npsi));
            let point = budget.point(i, rest / npsi, rest % npsi);
            ScoredPoint {
                value: objective(alpha, &point),
                point,
            }
        })
        .collect();
    let cmp = |a: &ScoredPoint, b: &ScoredPoint| {
        direction.prefer((a.value, &a.point), (b.value, &b.point))
    };
    let count = count.min(cells.len());
    if count < cells.len() {
        cells.select_nth_unstable_by(count, cmp);
        cells.truncate(count);
    }
    cells.sort_by(cmp);
    Ok(cells)
}

/// Mesh-adaptive direct search. Each poll visits a dense `(2k+1)^3` stencil plus
/// seeded random directions, moves to the best improving point and doubles the
/// step, or halves the step when nothing improves. The random directions let
/// the search follow the `|gamma_2| = 0` valley, which is not aligned with
/// any stencil direction.
fn refine(
    alpha: f64,
    direction: Direction,
    start: JetSearchPoint,
    budget: &GridBudget,
) -> ScoredPoint {
    const MAX_POLLS: usize = 20_000;
    const RANDOM_DIRECTIONS: usize = 128;
    let k = budget.stencil as i64;
    let stencil: Vec<[f64; 3]> = (-k..=k)
        .flat_map(|a| (-k..=k).flat_map(move |b| (-k..=k).map(move |c| [a, b, c])))
        .filter(|o| *o != [0, 0, 0])
        .map(|[a, b, c]| [a as f64 / k as f64, b as f64 / k as f64, c as f64 / k as f64])
        .collect();
    let spacing = budget.spacing();
    let mut scale = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(REFINE_SEED);
    let mut best = ScoredPoint {
        value: objective(alpha, &start),
        point: start,
    };
    for _ in 0..MAX_POLLS {
        if spacing.iter().all(|h| h * scale < budget.refine_tol) {
            break;
        }
        let random = (0..RANDOM_DIRECTIONS).map(|_| {
            let d: [f64; 3] = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal));
            let n = d.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            d.map(|v| v / n)
        });
        let directions: Vec<[f64; 3]> = stencil.iter().copied().chain(random).collect();
        let poll = directions
            .iter()
            .filter_map(|o| {
                let x = best.point.x + o[0] * spacing[0] * scale;
                // x = 1 collapses rho and psi into a single jet; polls stay off it
                if x >= 1.0 {
                    return None;
                }
                let point = JetSearchPoint::new(
                    x,
                    best.point.rho + o[1] * spacing[1] * scale,
                    best.point.psi_arg + o[2] * spacing[2] * scale,
                );
                Some(ScoredPoint {
                    value: objective(alpha, &point),
                    point,
                })
            })
            .min_by(|a, b| direction.prefer((a.value, &a.point), (b.value, &b.point)));
        if let Some(poll) = poll.filter(|p| direction.improves(p.value, best.value)) {
            best = poll;
            scale = (scale * 2.0).min(1.0);
        } else {
            scale *= 0.5;
        }
    }
    best
}

/// Seed of the refinement's random poll directions; fixed so runs are reproducible.
pub const REFINE_SEED: u64 = 0x6261_7a6c_6162;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub alpha: f64,
    pub direction: Direction,
    pub value: f64,
    pub arg_point: JetSearchPoint,
    pub arg_jet: SchwarzJet,
    /// `value` minus the matching bound (upper for max, lower for min).
    pub relaxation_gap: f64,
    /// Verdict of the realized candidate; `Undetermined` until realized.
    pub validated: Validity,
}

/// Coarse grid scan followed by local compass-search refinement from the best cells.
pub fn optimize(alpha: f64, direction: Direction, budget: &GridBudget) -> Result<OptResult> {
    // at x = 1 the whole (rho, psi) layer collapses to one jet, so starts are
    // taken from distinct x values
    let pool = top_cells(alpha, direction, budget, budget.starts * budget.nrho * budget.npsi)?;
    let mut starts: Vec<ScoredPoint> = Vec::with_capacity(budget.starts);
    for cell in pool {
        if starts.len() == budget.starts {
            break;
        }
        if starts.iter().all(|s| s.point.x != cell.point.x) {
            starts.push(cell);
        }
    }
    let best = starts
        .par_iter()
        .map(|s| refine(alpha, direction, s.point, budget))
        .collect::<Vec<_>>()
        .into_iter()
        .min_by(|a, b| direction.prefer((a.value, &a.point), (b.value, &b.point)))
        .expect("at least one start");
    let mut best = best;
    if best.point.x == 0.0 {
        // c2 -> c2 e^{i tau} is exact symmetry when c1 = 0; report c2 on the negative axis
        best.point.psi_arg = PI;
        best.value = objective(alpha, &best.point);
    }
    let bound = match direction {
        Direction::Max => upper_bound(alpha)?,
        Direction::Min => lower_bound(alpha)?,
    };
    Ok(OptResult {
        alpha,
        direction,
        value: best.value,
        arg_point: best.point,
        arg_jet: best.point.decode(),
        relaxation_gap: best.value - bound,
        validated: Validity::Undetermined,
    })
}

/// Schwarz function with prescribed 2-jet:
/// `omega(z) = z (c1 + zeta z) / (1 + conj(c1) zeta z)` with `zeta = c2 / (1 - |c1|^2)`.
pub fn schwarz_from_jet(jet: &SchwarzJet, order: usize) -> Result<TruncatedSeries> {
    let jet = SchwarzJet::new(jet.c1, jet.c2)?;
    if order < 2 {
        return Err(Error::Usage("realizing a 2-jet needs order >= 2".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    let denom = 1.0 - jet.c1.norm_sqr();
    let omega = if denom <= JET_TOL {
        TruncatedSeries::from_slice(&[zero, jet.c1], order)?
    } else {
        let mut zeta = jet.c2 / denom;
        if zeta.norm() > 1.0 + JET_TOL {
            return domain(format!("|zeta| = {} exceeds 1", zeta.norm()));
        }
        if zeta.norm() > 1.0 {
            zeta /= zeta.norm();
        }
        let num = TruncatedSeries::from_slice(&[zero, jet.c1, zeta], order)?;
        let den = TruncatedSeries::from_slice(&[Complex64::new(1.0, 0.0), jet.c1.conj() * zeta], order)?;
        num.div(&den)?
    };
    let (c1, c2) = SchwarzJet::of_series(&omega);
    if (c1 - jet.c1).norm() > 1e-12 || (c2 - jet.c2).norm() > 1e-12 {
        return domain(format!(
            "realized Schwarz jet ({c1}, {c2}) differs from requested ({}, {})",
            jet.c1, jet.c2
        ));
    }
    Ok(omega)
}

/// Lifts a Schwarz 2-jet to a candidate via `F = (1 - omega)/(1 + omega)` and validates it.
pub fn realize(
    alpha: f64,
    jet: &SchwarzJet,
    order: usize,
    check: &MembershipCheck,
) -> Result<BazilevicCandidate> {
    check_alpha(alpha)?;
    let omega = schwarz_from_jet(jet, order)?;
    let h = schwarz_to_caratheodory(&omega)?;
    validate_membership(&bazilevic_from_h(alpha, &h)?, check)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRange {
    pub alpha: f64,
    pub validated_min: Option<f64>,
    pub validated_max: Option<f64>,
    pub relax_min: f64,
    pub relax_max: f64,
    pub min_jet: SchwarzJet,
    pub max_jet: SchwarzJet,
    /// Realization attempts per direction (refined optimum plus near-optimal cells).
    pub attempts: usize,
    pub valid_min_count: usize,
    pub valid_max_count: usize,
}

/// Number of near-optimal grid cells realized in each direction.
pub const PARETO_SIZE: usize = 32;

/// Optimizes both directions, realizes the optimum and the best
/// [`PARETO_SIZE`] coarse cells, and reports the best validated values.
pub fn empirical_range(
    alpha: f64,
    budget: &GridBudget,
    order: usize,
    check: &MembershipCheck,
) -> Result<EmpiricalRange> {
    let mut out = Vec::with_capacity(2);
    for direction in [Direction::Min, Direction::Max] {
        let opt = optimize(alpha, direction, budget)?;
        let mut jets = vec![opt.arg_jet];
        jets.extend(
            top_cells(alpha, direction, budget, PARETO_SIZE)?
                .iter()
                .map(|c| c.point.decode()),
        );
        let realized = jets
            .par_iter()
            .map(|j| realize(alpha, j, order, check))
            .collect::<Result<Vec<_>>>()?;
        let valid: Vec<f64> = realized
            .iter()
            .filter(|c| c.validity == Validity::Valid)
            .map(|c| c.gamma_diff())
            .collect();
        let best = match direction {
            Direction::Min => valid.iter().copied().reduce(f64::min),
            Direction::Max => valid.iter().copied().reduce(f64::max),
        };
        out.push((opt, best, valid.len(), jets.len()));
    }
    let (min_opt, validated_min, valid_min_count, attempts) = out.remove(0);
    let (max_opt, validated_max, valid_max_count, _) = out.remove(0);
    Ok(EmpiricalRange {
        alpha,
        validated_min,
        validated_max,
        relax_min: min_opt.value,
        relax_max: max_opt.value,
        min_jet: min_opt.arg_jet,
        max_jet: max_opt.arg_jet,
        attempts,
        valid_min_count,
        valid_max_count,
    })
}
