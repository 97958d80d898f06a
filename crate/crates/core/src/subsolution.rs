//! Fan partitions, fan subsolutions and the algebraic system they satisfy.
//!
//! A fan subsolution is piecewise constant on the three wedges
//! `x2 < nu_minus t`, `nu_minus t < x2 < nu_plus t`, `x2 > nu_plus t`. Outside
//! the middle wedge it equals the Riemann data; inside it carries density
//! `rho1`, velocity `(alpha, beta)`, the traceless symmetric matrix
//! `[[gamma1, gamma2], [gamma2, -gamma1]]` and the energy bound `C`.
//!
//! Residuals are `LHS - RHS` of the six jump relations in the order
//! (mass, tangential momentum, normal momentum) on the left interface, then
//! the same three on the right interface.

use serde::{Deserialize, Serialize};

use crate::gas::GasLaw;
use crate::riemann::{RiemannData, SelfSimilarTwoShock};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanPartition {
    pub nu_minus: f64,
    pub nu_plus: f64,
}

impl FanPartition {
    pub fn new(nu_minus: f64, nu_plus: f64) -> Result<Self> {
        if nu_minus < nu_plus {
            Ok(Self { nu_minus, nu_plus })
        } else {
            Err(Error::PartitionViolation { nu_minus, nu_plus })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanSubsolution {
    pub partition: FanPartition,
    pub rho1: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

/// Names of the unknowns, in the column order of [`residual_jacobian`].
pub const UNKNOWNS: [&str; 8] = ["nu_minus", "nu_plus", "rho1", "alpha", "beta", "gamma1", "gamma2", "C"];

impl FanSubsolution {
    /// The classical two-shock solution written in subsolution variables:
    /// `u1 = v1 (x) v1 - |v1|^2/2 Id` and `C = |v1|^2`. It satisfies the jump
    /// relations but sits on the boundary of the subsolution set.
    pub fn embed(shock: &SelfSimilarTwoShock) -> Self {
        let alpha = shock.v_tangential;
        let beta = shock.v_bar;
        Self {
            partition: FanPartition { nu_minus: shock.nu1, nu_plus: shock.nu2 },
            rho1: shock.rho_m,
            alpha,
            beta,
            gamma1: 0.5 * (alpha * alpha - beta * beta),
            gamma2: alpha * beta,
            c: alpha * alpha + beta * beta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        FanPartition::new(self.partition.nu_minus, self.partition.nu_plus)?;
        crate::gas::check_density(self.rho1)?;
        let values = [self.alpha, self.beta, self.gamma1, self.gamma2, self.c];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite subsolution entry".into()));
        }
        if self.c <= 0.0 {
            return Err(Error::InvalidArgument(format!("C must be positive, got {}", self.c)));
        }
        Ok(())
    }

    /// Unknowns as a vector, ordered as [`UNKNOWNS`].
    pub fn unknowns(&self) -> [f64; 8] {
        [
            self.partition.nu_minus,
            self.partition.nu_plus,
            self.rho1,
            self.alpha,
            self.beta,
            self.gamma1,
            self.gamma2,
            self.c,
        ]
    }

    pub fn from_unknowns(x: [f64; 8]) -> Self {
        Self {
            partition: FanPartition { nu_minus: x[0], nu_plus: x[1] },
            rho1: x[2],
            alpha: x[3],
            beta: x[4],
            gamma1: x[5],
            gamma2: x[6],
            c: x[7],
        }
    }

    /// Galilean boost along `x1`. Keeps the jump relations and the
    /// subsolution bound invariant when applied together with the same boost
    /// of the data.
    pub fn boosted_tangential(&self, shift: f64) -> Self {
        Self {
            alpha: self.alpha + shift,
            gamma1: self.gamma1 + shift * self.alpha + 0.5 * shift * shift,
            gamma2: self.gamma2 + shift * self.beta,
            c: self.c + 2.0 * shift * self.alpha + shift * shift,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemResiduals {
    pub r: [f64; 6],
}

impl SystemResiduals {
    pub fn max_abs(&self) -> f64 {
        self.r.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityMargins {
    pub m_trace: f64,
    pub m_det: f64,
    pub m_adm_left: f64,
    pub m_adm_right: f64,
}

impl FeasibilityMargins {
    /// Strict subsolution bound and non-strict admissibility.
    pub fn is_admissible(&self) -> bool {
        self.m_trace > 0.0 && self.m_det > 0.0 && self.m_adm_left >= 0.0 && self.m_adm_right >= 0.0
    }

    pub fn meets_floor(&self, floor: f64) -> bool {
        self.min() >= floor
    }

    pub fn min(&self) -> f64 {
        self.m_trace.min(self.m_det).min(self.m_adm_left).min(self.m_adm_right)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.m_trace, self.m_det, self.m_adm_left, self.m_adm_right]
    }
}

pub fn rh_residuals(sub: &FanSubsolution, data: &RiemannData, law: &GasLaw) -> SystemResiduals {
    let FanSubsolution { partition, rho1, alpha, beta, gamma1, gamma2, c } = *sub;
    let (nm, np) = (partition.nu_minus, partition.nu_plus);
    let (rm, [vm1, vm2]) = (data.rho_minus, data.v_minus);
    let (rp, [vp1, vp2]) = (data.rho_plus, data.v_plus);
    let (pm, pp, p1) = (law.p(rm), law.p(rp), law.p(rho1));
    SystemResiduals {
        r: [
            nm * (rm - rho1) - (rm * vm2 - rho1 * beta),
            nm * (rm * vm1 - rho1 * alpha) - (rm * vm1 * vm2 - rho1 * gamma2),
            nm * (rm * vm2 - rho1 * beta) - (rm * vm2 * vm2 + rho1 * gamma1 + pm - p1 - 0.5 * rho1 * c),
            np * (rho1 - rp) - (rho1 * beta - rp * vp2),
            np * (rho1 * alpha - rp * vp1) - (rho1 * gamma2 - rp * vp1 * vp2),
            np * (rho1 * beta - rp * vp2) - (-rho1 * gamma1 - rp * vp2 * vp2 + p1 - pp + 0.5 * rho1 * c),
        ],
    }
}

/// Analytic Jacobian of [`rh_residuals`]; rows follow the residual order,
/// columns follow [`UNKNOWNS`].
pub fn residual_jacobian(sub: &FanSubsolution, data: &RiemannData, law: &GasLaw) -> [[f64; 8]; 6] {
    let FanSubsolution { partition, rho1, alpha, beta, gamma1, gamma2, c } = *sub;
    let (nm, np) = (partition.nu_minus, partition.nu_plus);
    let (rm, [vm1, vm2]) = (data.rho_minus, data.v_minus);
    let (rp, [vp1, vp2]) = (data.rho_plus, data.v_plus);
    let dp1 = law.dp(rho1);
    //  nu_minus, nu_plus, rho1, alpha, beta, gamma1, gamma2, C
    [
        [rm - rho1, 0.0, beta - nm, 0.0, rho1, 0.0, 0.0, 0.0],
        [rm * vm1 - rho1 * alpha, 0.0, gamma2 - nm * alpha, -nm * rho1, 0.0, 0.0, rho1, 0.0],
        [
            rm * vm2 - rho1 * beta,
            0.0,
            -nm * beta - gamma1 + dp1 + 0.5 * c,
            0.0,
            -nm * rho1,
            -rho1,
            0.0,
            0.5 * rho1,
        ],
        [0.0, rho1 - rp, np - beta, 0.0, -rho1, 0.0, 0.0, 0.0],
        [0.0, rho1 * alpha - rp * vp1, np * alpha - gamma2, np * rho1, 0.0, 0.0, -rho1, 0.0],
        [
            0.0,
            rho1 * beta - rp * vp2,
            np * beta + gamma1 - dp1 - 0.5 * c,
            0.0,
            np * rho1,
            rho1,
            0.0,
            -0.5 * rho1,
        ],
    ]
}

pub fn margins(sub: &FanSubsolution, data: &RiemannData, law: &GasLaw) -> FeasibilityMargins {
    margins_with_energy(sub, data, law, |rho| law.eps(rho))
}

/// [`margins`] with an arbitrary specific internal energy.
pub(crate) fn margins_with_energy<E>(sub: &FanSubsolution, data: &RiemannData, law: &GasLaw, eps: E) -> FeasibilityMargins
where
    E: Fn(f64) -> f64,
{
    let FanSubsolution { partition, rho1, alpha, beta, gamma1, gamma2, c } = *sub;
    let (nm, np) = (partition.nu_minus, partition.nu_plus);
    let (rm, vm) = (data.rho_minus, data.v_minus);
    let (rp, vp) = (data.rho_plus, data.v_plus);
    let speed_sq = |v: [f64; 2]| v[0] * v[0] + v[1] * v[1];

    let m_trace = c - alpha * alpha - beta * beta;
    let m_det = (0.5 * c - alpha * alpha + gamma1) * (0.5 * c - beta * beta - gamma1)
        - (gamma2 - alpha * beta).powi(2);

    let (em, e1, ep) = (rm * eps(rm), rho1 * eps(rho1), rp * eps(rp));
    let (pm, p1, pp) = (law.p(rm), law.p(rho1), law.p(rp));
    let (km, k1, kp) = (0.5 * rm * speed_sq(vm), 0.5 * rho1 * c, 0.5 * rp * speed_sq(vp));

    let left_lhs = nm * (em - e1) + nm * (km - k1);
    let left_rhs = ((em + pm) * vm[1] - (e1 + p1) * beta) + (km * vm[1] - k1 * beta);
    let right_lhs = np * (e1 - ep) + np * (k1 - kp);
    let right_rhs = ((e1 + p1) * beta - (ep + pp) * vp[1]) + (k1 * beta - kp * vp[1]);

    FeasibilityMargins {
        m_trace,
        m_det,
        m_adm_left: left_rhs - left_lhs,
        m_adm_right: right_rhs - right_lhs,
    }
}

/// Forces `alpha = gamma2 = 0` for data with vanishing tangential velocity.
///
/// With `v_minus_1 = v_plus_1 = 0` the tangential momentum relations read
/// `gamma2 = nu_minus alpha = nu_plus alpha`, so `nu_minus != nu_plus` leaves
/// only `alpha = gamma2 = 0`. Entries below `tol` in magnitude are zeroed.
pub fn reduce_tangential(data: &RiemannData, sub: &FanSubsolution, tol: f64) -> Result<FanSubsolution> {
    let t = data.require_tangential()?;
    if t != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tangential reduction needs zero tangential data, got {t}"
        )));
    }
    if sub.partition.nu_minus == sub.partition.nu_plus {
        return Err(Error::PartitionViolation {
            nu_minus: sub.partition.nu_minus,
            nu_plus: sub.partition.nu_plus,
        });
    }
    if sub.alpha.abs() > tol || sub.gamma2.abs() > tol {
        return Err(Error::Reduction { alpha: sub.alpha, gamma2: sub.gamma2 });
    }
    Ok(FanSubsolution { alpha: 0.0, gamma2: 0.0, ..*sub })
}
