//! Elimination solve of the fan jump relations and the `(rho1, C)` scan.
//!
//! For data with zero tangential velocity the tangential relations force
//! `alpha = gamma2 = 0`. Fixing `rho1` and `C`, the two mass relations give
//! the front speeds in closed form,
//!
//! ```text
//! nu_minus = (rho_minus v_minus_2 - rho1 beta) / (rho_minus - rho1)
//! nu_plus  = (rho1 beta - rho_plus v_plus_2)   / (rho1 - rho_plus)
//! ```
//!
//! and each normal momentum relation gives `gamma1`. Equating the two values
//! of `gamma1` leaves one scalar equation in `beta`; `C` drops out of it.
//! Data with a common nonzero tangential velocity are boosted to zero first
//! and the result boosted back.

use serde::{Deserialize, Serialize};

use crate::dissipation::{self, rate_self_similar};
use crate::gas::GasLaw;
use crate::parallel::{map_ordered, Execution};
use crate::riemann::{solve_middle_state, two_shock_condition, RiemannData, SelfSimilarTwoShock};
use crate::roots::{solve_bracketed, Bracket};
use crate::subsolution::{margins, residual_jacobian, rh_residuals, FanPartition, FanSubsolution, FeasibilityMargins, SystemResiduals};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Bound on `max |residual| / (1 + scale)` accepted after a solve.
    pub residual_tol: f64,
    /// Every reported-feasible point has all four margins at or above this.
    pub margin_floor: f64,
    /// Sample count for the sign-change sweep in `beta`.
    pub beta_samples: usize,
    pub max_iter: usize,
    pub execution: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            margin_floor: 1e-6,
            beta_samples: 4096,
            max_iter: 200,
            execution: Execution::Parallel,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.margin_floor > 0.0) || !(self.residual_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "margin floor and residual tolerance must be positive, got {} and {}",
                self.margin_floor, self.residual_tol
            )));
        }
        if self.beta_samples < 2 {
            return Err(Error::InvalidArgument("need at least two beta samples".into()));
        }
        Ok(())
    }
}

/// Magnitude used to scale residual tolerances.
pub fn residual_scale(sub: &FanSubsolution, data: &RiemannData, law: &GasLaw) -> f64 {
    let rho_max = data.rho_minus.max(data.rho_plus).max(sub.rho1);
    let v = data.magnitude().max(sub.beta.abs()).max(sub.alpha.abs());
    [rho_max * v * v, law.p(rho_max), sub.rho1 * sub.c.abs(), sub.rho1 * sub.gamma1.abs(), rho_max]
        .into_iter()
        .fold(0.0, f64::max)
}

/// Normal-momentum compatibility `gamma1(eq. left) - gamma1(eq. right)`,
/// multiplied by `rho1`, and its derivative in `beta`.
fn compatibility(beta: f64, rho1: f64, data: &RiemannData, law: &GasLaw) -> (f64, f64) {
    let (rm, vm) = (data.rho_minus, data.v_minus[1]);
    let (rp, vp) = (data.rho_plus, data.v_plus[1]);
    let left_flux = rm * vm - rho1 * beta;
    let right_flux = rho1 * beta - rp * vp;
    let value = left_flux * left_flux / (rm - rho1) + right_flux * right_flux / (rho1 - rp)
        - rm * vm * vm
        - law.p(rm)
        + rp * vp * vp
        + law.p(rp);
    let slope = -2.0 * rho1 * left_flux / (rm - rho1) + 2.0 * rho1 * right_flux / (rho1 - rp);
    (value, slope)
}

/// All fan subsolutions with prescribed `(rho1, C)` that satisfy the six jump
/// relations with `nu_minus < nu_plus`, one per root of the compatibility
/// equation found in the sweep.
pub fn solve_for(rho1: f64, c: f64, data: &RiemannData, law: &GasLaw, opts: &SolveOptions) -> Result<Vec<FanSubsolution>> {
    data.validate()?;
    opts.validate()?;
    crate::gas::check_density(rho1)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    let shift = data.require_tangential()?;
    let frame = data.shifted_tangential(-shift);
    let (rm, vm) = (frame.rho_minus, frame.v_minus[1]);
    let (rp, vp) = (frame.rho_plus, frame.v_plus[1]);
    let singular = |r: f64| (rho1 - r).abs() <= 4.0 * f64::EPSILON * r;
    if singular(rm) || singular(rp) {
        return Err(Error::SingularElimination { rho1 });
    }
    let c_frame = c - shift * shift;

    let wave = [(rm, vm), (rp, vp), (rho1, 0.5 * (vm + vp))]
        .into_iter()
        .map(|(r, v)| v.abs() + law.sound_speed(r))
        .fold(0.0, f64::max);
    let lo = vm.min(vp) - 2.0 * wave;
    let hi = vm.max(vp) + 2.0 * wave;

    let g = |b: f64| compatibility(b, rho1, &frame, law);
    let n = opts.beta_samples;
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let b = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            (b, g(b).0)
        })
        .collect();

    let mut roots = Vec::new();
    for w in samples.windows(2) {
        let ((b0, g0), (b1, g1)) = (w[0], w[1]);
        if g0 == 0.0 {
            roots.push(b0);
        } else if g0.signum() != g1.signum() && g1 != 0.0 {
            roots.push(solve_bracketed(g, Bracket { lo: b0, hi: b1 }, 0.0, opts.max_iter)?);
        }
    }
    if let Some(&(b, g_last)) = samples.last() {
        if g_last == 0.0 {
            roots.push(b);
        }
    }
    if roots.is_empty() {
        return Err(Error::NoRoot { rho1 });
    }

    let mut out = Vec::with_capacity(roots.len());
    let mut partition_error = None;
    for beta in roots {
        let nu_minus = (rm * vm - rho1 * beta) / (rm - rho1);
        let nu_plus = (rho1 * beta - rp * vp) / (rho1 - rp);
        if !(nu_minus < nu_plus) {
            partition_error = Some(Error::PartitionViolation { nu_minus, nu_plus });
            continue;
        }
        let gamma1 = (nu_minus * (rm * vm - rho1 * beta) - rm * vm * vm - law.p(rm) + law.p(rho1)
            + 0.5 * rho1 * c_frame)
            / rho1;
        let sub = FanSubsolution {
            partition: FanPartition { nu_minus, nu_plus },
            rho1,
            alpha: 0.0,
            beta,
            gamma1,
            gamma2: 0.0,
            c: c_frame,
        }
        .boosted_tangential(shift);
        let res = rh_residuals(&sub, data, law).max_abs();
        let bound = opts.residual_tol * (1.0 + residual_scale(&sub, data, law));
        if res > bound {
            return Err(Error::Numerical(format!(
                "residual {res:e} exceeds {bound:e} at rho1 = {rho1}, C = {c}, beta = {beta}"
            )));
        }
        out.push(sub);
    }
    match (out.is_empty(), partition_error) {
        (true, Some(e)) => Err(e),
        (true, None) => Err(Error::NoRoot { rho1 }),
        _ => Ok(out),
    }
}

/// Largest relative deviation between the analytic Jacobian of the residuals
/// and central differences with step `h` over all eight unknowns.
pub fn jacobian_check(sub: &FanSubsolution, data: &RiemannData, law: &GasLaw, h: f64) -> f64 {
    let exact = residual_jacobian(sub, data, law);
    let x0 = sub.unknowns();
    let mut worst = 0.0f64;
    for (k, _) in x0.iter().enumerate() {
        let at = |t: f64| {
            let mut x = x0;
            x[k] += t;
            rh_residuals(&FanSubsolution::from_unknowns(x), data, law).r
        };
        let (plus, minus) = (at(h), at(-h));
        for (i, row) in exact.iter().enumerate() {
            let fd = (plus[i] - minus[i]) / (2.0 * h);
            worst = worst.max((fd - row[k]).abs() / row[k].abs().max(1.0));
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRange {
    pub start: f64,
    pub end: f64,
    pub n: usize,
}

impl GridRange {
    pub fn new(start: f64, end: f64, n: usize) -> Self {
        Self { start, end, n }
    }

    pub fn single(value: f64) -> Self {
        Self { start: value, end: value, n: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.n {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.end - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

impl std::str::FromStr for GridRange {
    type Err = Error;

    /// Parses `start:end:n`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parse(format!("expected start:end:n, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parts[0].trim().parse().map_err(|_| bad())?;
        let end = parts[1].trim().parse().map_err(|_| bad())?;
        let n = parts[2].trim().parse().map_err(|_| bad())?;
        Ok(Self { start, end, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub rho1: GridRange,
    #[serde(rename = "C")]
    pub c: GridRange,
}

impl Grid {
    /// Grid points in `rho1`-major order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let cs = self.c.values();
        self.rho1
            .values()
            .into_iter()
            .flat_map(|r| cs.iter().map(move |&c| (r, c)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Feasible,
    BelowFloor,
    NoRoot,
    PartitionViolation,
    Singular,
    Failed,
}

impl PointStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointStatus::Feasible => "feasible",
            PointStatus::BelowFloor => "below_floor",
            PointStatus::NoRoot => "no_root",
            PointStatus::PartitionViolation => "partition_violation",
            PointStatus::Singular => "singular",
            PointStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub sub: FanSubsolution,
    pub residuals: SystemResiduals,
    pub margins: FeasibilityMargins,
    pub d_sub: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub rho1: f64,
    pub c: f64,
    pub status: PointStatus,
    pub candidate: Option<Candidate>,
}

impl GridPoint {
    pub fn is_feasible(&self) -> bool {
        self.status == PointStatus::Feasible
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub shock: SelfSimilarTwoShock,
    pub half_width: f64,
    pub d_self: f64,
    pub margin_floor: f64,
    pub points: Vec<GridPoint>,
    /// Index into `points` of the feasible point with the smallest rate.
    pub best: Option<usize>,
}

impl SearchReport {
    pub fn best(&self) -> Option<&Candidate> {
        self.best.and_then(|i| self.points[i].candidate.as_ref())
    }

    pub fn feasible_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_feasible()).count()
    }
}

fn evaluate_point(
    rho1: f64,
    c: f64,
    data: &RiemannData,
    law: &GasLaw,
    half_width: f64,
    opts: &SolveOptions,
) -> GridPoint {
    let subs = match solve_for(rho1, c, data, law, opts) {
        Ok(s) => s,
        Err(e) => {
            let status = match e {
                Error::NoRoot { .. } => PointStatus::NoRoot,
                Error::PartitionViolation { .. } => PointStatus::PartitionViolation,
                Error::SingularElimination { .. } => PointStatus::Singular,
                _ => PointStatus::Failed,
            };
            return GridPoint { rho1, c, status, candidate: None };
        }
    };
    let candidates = subs.into_iter().map(|sub| Candidate {
        sub,
        residuals: rh_residuals(&sub, data, law),
        margins: margins(&sub, data, law),
        d_sub: dissipation::rate_subsolution(data, law, &sub, half_width),
    });
    let mut best_feasible: Option<Candidate> = None;
    let mut best_other: Option<Candidate> = None;
    for cand in candidates {
        if cand.margins.meets_floor(opts.margin_floor) {
            if best_feasible.is_none_or(|b| cand.d_sub < b.d_sub) {
                best_feasible = Some(cand);
            }
        } else if best_other.is_none_or(|b| cand.margins.min() > b.margins.min()) {
            best_other = Some(cand);
        }
    }
    match best_feasible {
        Some(c_) => GridPoint { rho1, c, status: PointStatus::Feasible, candidate: Some(c_) },
        None => GridPoint { rho1, c, status: PointStatus::BelowFloor, candidate: best_other },
    }
}

/// Solves every grid point and ranks the feasible ones by subsolution rate.
///
/// Points may be evaluated concurrently but are reported in grid order.
/// Ties in the rate go to the smaller `rho1`, then the smaller `C`.
pub fn scan(data: &RiemannData, law: &GasLaw, grid: &Grid, half_width: f64, opts: &SolveOptions) -> Result<SearchReport> {
    opts.validate()?;
    dissipation::check_half_width(half_width)?;
    let points = grid.points();
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty parameter grid".into()));
    }
    let check = two_shock_condition(data, law);
    if !check.holds {
        return Err(Error::NotTwoShock { margin: check.margin });
    }
    let shock = solve_middle_state(data, law)?;
    let d_self = self_similar_rate(data, law, &shock, half_width);

    let evaluated = map_ordered(&points, opts.execution, |&(rho1, c)| {
        evaluate_point(rho1, c, data, law, half_width, opts)
    });

    let mut best: Option<usize> = None;
    for (i, p) in evaluated.iter().enumerate() {
        let Some(cand) = p.candidate.filter(|_| p.is_feasible()) else { continue };
        let better = match best {
            None => true,
            Some(j) => {
                let (q, other) = (&evaluated[j], evaluated[j].candidate.unwrap());
                (cand.d_sub, p.rho1, p.c) < (other.d_sub, q.rho1, q.c)
            }
        };
        if better {
            best = Some(i);
        }
    }

    Ok(SearchReport {
        shock,
        half_width,
        d_self,
        margin_floor: opts.margin_floor,
        points: evaluated,
        best,
    })
}

pub(crate) fn self_similar_rate(data: &RiemannData, law: &GasLaw, shock: &SelfSimilarTwoShock, half_width: f64) -> f64 {
    rate_self_similar(&dissipation::energy_levels(data, law, shock), shock.nu1, shock.nu2, half_width)
}
