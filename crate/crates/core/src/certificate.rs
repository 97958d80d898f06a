//! Replayable witness that a fan subsolution out-dissipates the self-similar
//! solution for one Riemann datum.
//!
//! [`certify`] bundles everything needed to recheck the claim and
//! [`verify_certificate`] recomputes each number from the stored inputs.

use serde::{Deserialize, Serialize};

use crate::dissipation::{compare, DissipationReport};
use crate::gas::GasLaw;
use crate::parallel::Execution;
use crate::riemann::{solve_middle_state, two_shock_residuals, RiemannData, SelfSimilarTwoShock};
use crate::solver::residual_scale;
use crate::subsolution::{margins, rh_residuals, FanSubsolution, FeasibilityMargins, SystemResiduals};
use crate::weakform::{check_family, FanField, QuadratureOptions, TestFunction, WeakResidualReport};
use crate::{Error, Result, TOOL_VERSION};

/// Relative agreement required between recorded and replayed values.
pub const REPLAY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    DissipationDominant,
    FeasibleNotDominant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    #[serde(rename = "L")]
    pub box_half_width: f64,
    pub residual_tol: f64,
    pub margin_floor: f64,
    pub weak_tol: f64,
    pub seed: u64,
    pub test_functions: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            box_half_width: 1.0,
            residual_tol: 1e-10,
            margin_floor: 1e-6,
            weak_tol: 1e-8,
            seed: 0,
            test_functions: 50,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakFormSummary {
    pub quadrature: QuadratureOptions,
    pub solution: WeakResidualReport,
    pub subsolution: WeakResidualReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub tool_version: String,
    pub scenario: String,
    pub status: CertificateStatus,
    pub gamma: f64,
    pub config: CertifyConfig,
    pub data: RiemannData,
    pub self_similar: SelfSimilarTwoShock,
    pub subsolution: FanSubsolution,
    pub residuals: SystemResiduals,
    pub margins: FeasibilityMargins,
    pub dissipation: DissipationReport,
    pub weak_form: WeakFormSummary,
}

impl Certificate {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn weak_summary(
    data: &RiemannData,
    law: &GasLaw,
    shock: &SelfSimilarTwoShock,
    sub: &FanSubsolution,
    cfg: &CertifyConfig,
) -> Result<WeakFormSummary> {
    if cfg.test_functions == 0 {
        return Err(Error::InvalidArgument("need at least one test function".into()));
    }
    let family = TestFunction::family(cfg.seed, cfg.test_functions, true);
    let quadrature = QuadratureOptions::default();
    Ok(WeakFormSummary {
        quadrature,
        solution: check_family(&FanField::self_similar(data, law, shock), &family, &quadrature, cfg.execution)?,
        subsolution: check_family(&FanField::subsolution(data, law, sub), &family, &quadrature, cfg.execution)?,
    })
}

/// Builds a certificate for a strictly feasible subsolution.
///
/// Fails when the subsolution misses the residual tolerance or the margin
/// floor. A feasible subsolution that does not beat the self-similar rate is
/// certified with [`CertificateStatus::FeasibleNotDominant`].
pub fn certify(
    name: &str,
    data: &RiemannData,
    law: &GasLaw,
    sub: &FanSubsolution,
    cfg: &CertifyConfig,
) -> Result<Certificate> {
    sub.validate()?;
    let shock = solve_middle_state(data, law)?;
    let residuals = rh_residuals(sub, data, law);
    if residuals.max_abs() > cfg.residual_tol {
        return Err(Error::NotFeasible(format!(
            "max residual {:e} above {:e}",
            residuals.max_abs(),
            cfg.residual_tol
        )));
    }
    let m = margins(sub, data, law);
    if !m.meets_floor(cfg.margin_floor) {
        return Err(Error::NotFeasible(format!(
            "smallest margin {:e} below floor {:e}",
            m.min(),
            cfg.margin_floor
        )));
    }
    let dissipation = compare(data, law, &shock, sub, cfg.box_half_width)?;
    let weak_form = weak_summary(data, law, &shock, sub, cfg)?;
    Ok(Certificate {
        tool_version: TOOL_VERSION.to_string(),
        scenario: name.to_string(),
        status: if dissipation.verdict {
            CertificateStatus::DissipationDominant
        } else {
            CertificateStatus::FeasibleNotDominant
        },
        gamma: law.gamma(),
        config: *cfg,
        data: *data,
        self_similar: shock,
        subsolution: *sub,
        residuals,
        margins: m,
        dissipation,
        weak_form,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn close(recorded: f64, replayed: f64) -> bool {
    (recorded - replayed).abs() <= REPLAY_TOL * (1.0 + replayed.abs())
}

fn all_close(recorded: &[f64], replayed: &[f64]) -> bool {
    recorded.len() == replayed.len() && recorded.iter().zip(replayed).all(|(&a, &b)| close(a, b))
}

/// Replays every check of a certificate. Checks run in a fixed order and
/// stop at the first failure, which is then the last entry of the report.
pub fn verify_certificate(cert: &Certificate) -> VerifyReport {
    fn push(checks: &mut Vec<CheckOutcome>, name: &'static str, passed: bool, detail: String) -> bool {
        checks.push(CheckOutcome { name, passed, detail });
        passed
    }
    let mut checks = Vec::new();
    let cfg = &cert.config;

    let setup = GasLaw::new(cert.gamma).and_then(|law| {
        cert.data.validate()?;
        cert.subsolution.validate()?;
        Ok(law)
    });
    let law = match setup {
        Ok(law) => law,
        Err(e) => {
            push(&mut checks, "inputs", false, e.to_string());
            return VerifyReport { checks };
        }
    };
    if !push(&mut checks, "inputs", true, format!("gamma = {}", cert.gamma)) {
        return VerifyReport { checks };
    }

    let data = &cert.data;
    let sub = &cert.subsolution;
    let shock = match solve_middle_state(data, &law) {
        Ok(s) => s,
        Err(e) => {
            push(&mut checks, "self_similar", false, e.to_string());
            return VerifyReport { checks };
        }
    };
    let rec = &cert.self_similar;
    let ok = all_close(
        &[rec.rho_m, rec.v_bar, rec.nu1, rec.nu2],
        &[shock.rho_m, shock.v_bar, shock.nu1, shock.nu2],
    ) && rec.lax_ok_1 == shock.lax_ok_1
        && rec.lax_ok_3 == shock.lax_ok_3
        && shock.lax_ok_1
        && shock.lax_ok_3;
    let exact_res = two_shock_residuals(data, &law, &shock)
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let ok = ok && exact_res <= cfg.residual_tol;
    if !push(
        &mut checks,
        "self_similar",
        ok,
        format!("rho_m = {}, jump residual {exact_res:e}", shock.rho_m),
    ) {
        return VerifyReport { checks };
    }

    let res = rh_residuals(sub, data, &law);
    let ok = res.max_abs() <= cfg.residual_tol && all_close(&cert.residuals.r, &res.r);
    if !push(
        &mut checks,
        "rh_residuals",
        ok,
        format!(
            "max {:e} (tolerance {:e}, scale {:.3e})",
            res.max_abs(),
            cfg.residual_tol,
            residual_scale(sub, data, &law)
        ),
    ) {
        return VerifyReport { checks };
    }

    let m = margins(sub, data, &law);
    let ok = m.meets_floor(cfg.margin_floor) && all_close(&cert.margins.as_array(), &m.as_array());
    if !push(&mut checks, "margins", ok, format!("min {:e} (floor {:e})", m.min(), cfg.margin_floor)) {
        return VerifyReport { checks };
    }

    let diss = match compare(data, &law, &shock, sub, cfg.box_half_width) {
        Ok(d) => d,
        Err(e) => {
            push(&mut checks, "dissipation", false, e.to_string());
            return VerifyReport { checks };
        }
    };
    let rec = &cert.dissipation;
    let expected_status = if diss.verdict {
        CertificateStatus::DissipationDominant
    } else {
        CertificateStatus::FeasibleNotDominant
    };
    let ok = all_close(
        &[rec.box_half_width, rec.d_self, rec.d_sub, rec.gap],
        &[diss.box_half_width, diss.d_self, diss.d_sub, diss.gap],
    ) && rec.verdict == diss.verdict
        && cert.status == expected_status;
    if !push(
        &mut checks,
        "dissipation",
        ok,
        format!("D_self = {}, D_sub = {}, gap = {}", diss.d_self, diss.d_sub, diss.gap),
    ) {
        return VerifyReport { checks };
    }

    let weak = match weak_summary(data, &law, &shock, sub, cfg) {
        Ok(w) => w,
        Err(e) => {
            push(&mut checks, "weak_form", false, e.to_string());
            return VerifyReport { checks };
        }
    };
    let within = |r: &WeakResidualReport| {
        r.max_mass <= cfg.weak_tol && r.max_momentum <= cfg.weak_tol && r.min_admissibility >= -cfg.weak_tol
    };
    let ok = within(&weak.solution)
        && within(&weak.subsolution)
        && weak.solution.test_functions == cert.weak_form.solution.test_functions;
    push(
        &mut checks,
        "weak_form",
        ok,
        format!(
            "{} test functions, max balance {:e}, min admissibility {:e}",
            weak.subsolution.test_functions,
            weak.subsolution.max_mass.max(weak.subsolution.max_momentum),
            weak.subsolution.min_admissibility
        ),
    );
    VerifyReport { checks }
}
