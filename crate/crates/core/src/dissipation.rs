//! Energy in the box `(-L, L)^2` and energy dissipation rates at `t = 0+`.
//!
//! Both candidate solutions are fans: three constant energy densities
//! separated by fronts `x2 = nu t`. Rates follow the convention
//! `D = -2L (nu_minus (E_minus - E_1) + nu_plus (E_1 - E_plus))`, for the
//! self-similar solution with `(nu1, nu2, E_m)` in place of
//! `(nu_minus, nu_plus, E_1)`. A smaller rate means more dissipation, and the
//! subsolution-based solution beats the self-similar one when `D_sub < D_self`.
//!
//! Under this convention the rate equals minus the one-sided time derivative
//! of [`BoxEnergy`]. Lateral boundaries `x1 = +-L` carry no net contribution
//! since every state is independent of `x1`.

use serde::{Deserialize, Serialize};

use crate::gas::GasLaw;
use crate::riemann::{RiemannData, SelfSimilarTwoShock};
use crate::subsolution::FanSubsolution;
use crate::{Error, Result};

/// Relative tolerance below which the two rates count as equal.
pub const VERDICT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevels {
    pub e_minus: f64,
    pub e_m: f64,
    pub e_plus: f64,
}

/// Energy densities and front speeds of a three-state fan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanEnergy {
    pub e_minus: f64,
    pub e_middle: f64,
    pub e_plus: f64,
    pub nu_minus: f64,
    pub nu_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxEnergy {
    pub half_width: f64,
    pub value: f64,
}

impl BoxEnergy {
    /// `E_L(t)` for a fan, integrating each constant piece over its share of
    /// `(-L, L)` in `x2`.
    pub fn of_fan(fan: &FanEnergy, half_width: f64, t: f64) -> Result<Self> {
        check_half_width(half_width)?;
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("time must be nonnegative, got {t}")));
        }
        let l = half_width;
        let clip = |a: f64, b: f64| (b.min(l) - a.max(-l)).max(0.0);
        let (s_minus, s_plus) = (fan.nu_minus * t, fan.nu_plus * t);
        let line = fan.e_minus * clip(-l, s_minus)
            + fan.e_middle * clip(s_minus, s_plus)
            + fan.e_plus * clip(s_plus, l);
        Ok(Self { half_width, value: 2.0 * l * line })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationReport {
    #[serde(rename = "L")]
    pub box_half_width: f64,
    pub d_self: f64,
    pub d_sub: f64,
    /// `d_sub - d_self`.
    pub gap: f64,
    /// `d_sub < d_self` beyond [`VERDICT_TOL`].
    pub verdict: bool,
}

impl DissipationReport {
    pub fn relative_gap(&self) -> f64 {
        self.gap.abs() / self.d_self.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn energy_levels(data: &RiemannData, law: &GasLaw, shock: &SelfSimilarTwoShock) -> EnergyLevels {
    let speed_sq = |v: [f64; 2]| v[0] * v[0] + v[1] * v[1];
    EnergyLevels {
        e_minus: law.energy(data.rho_minus, speed_sq(data.v_minus)),
        e_m: law.energy(shock.rho_m, speed_sq([shock.v_tangential, shock.v_bar])),
        e_plus: law.energy(data.rho_plus, speed_sq(data.v_plus)),
    }
}

/// `E_1 = rho1 eps(rho1) + rho1 C / 2`.
pub fn subsolution_energy(law: &GasLaw, sub: &FanSubsolution) -> f64 {
    law.energy(sub.rho1, sub.c)
}

pub fn rate_self_similar(levels: &EnergyLevels, nu1: f64, nu2: f64, half_width: f64) -> f64 {
    -2.0 * half_width * (nu1 * (levels.e_minus - levels.e_m) + nu2 * (levels.e_m - levels.e_plus))
}

pub fn rate_subsolution(data: &RiemannData, law: &GasLaw, sub: &FanSubsolution, half_width: f64) -> f64 {
    let fan = subsolution_fan(data, law, sub);
    -2.0 * half_width
        * (fan.nu_minus * (fan.e_minus - fan.e_middle) + fan.nu_plus * (fan.e_middle - fan.e_plus))
}

pub fn self_similar_fan(data: &RiemannData, law: &GasLaw, shock: &SelfSimilarTwoShock) -> FanEnergy {
    let levels = energy_levels(data, law, shock);
    FanEnergy {
        e_minus: levels.e_minus,
        e_middle: levels.e_m,
        e_plus: levels.e_plus,
        nu_minus: shock.nu1,
        nu_plus: shock.nu2,
    }
}

pub fn subsolution_fan(data: &RiemannData, law: &GasLaw, sub: &FanSubsolution) -> FanEnergy {
    let speed_sq = |v: [f64; 2]| v[0] * v[0] + v[1] * v[1];
    FanEnergy {
        e_minus: law.energy(data.rho_minus, speed_sq(data.v_minus)),
        e_middle: subsolution_energy(law, sub),
        e_plus: law.energy(data.rho_plus, speed_sq(data.v_plus)),
        nu_minus: sub.partition.nu_minus,
        nu_plus: sub.partition.nu_plus,
    }
}

pub fn compare(
    data: &RiemannData,
    law: &GasLaw,
    shock: &SelfSimilarTwoShock,
    sub: &FanSubsolution,
    half_width: f64,
) -> Result<DissipationReport> {
    check_half_width(half_width)?;
    let d_self = rate_self_similar(&energy_levels(data, law, shock), shock.nu1, shock.nu2, half_width);
    let d_sub = rate_subsolution(data, law, sub, half_width);
    let gap = d_sub - d_self;
    Ok(DissipationReport {
        box_half_width: half_width,
        d_self,
        d_sub,
        gap,
        verdict: gap < -VERDICT_TOL * d_self.abs().max(1.0),
    })
}

pub(crate) fn check_half_width(half_width: f64) -> Result<()> {
    if half_width > 0.0 && half_width.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("box half-width must be positive, got {half_width}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::solve_middle_state;

    fn symmetric() -> (RiemannData, GasLaw, SelfSimilarTwoShock) {
        let w = 1.5f64.sqrt();
        let d = RiemannData::normal(1.0, w, 1.0, -w).unwrap();
        let g = GasLaw::new(2.0).unwrap();
        let s = solve_middle_state(&d, &g).unwrap();
        (d, g, s)
    }

    #[test]
    fn levels_of_symmetric_instance() {
        let (d, g, s) = symmetric();
        let e = energy_levels(&d, &g, &s);
        assert!((e.e_minus - 1.75).abs() < 1e-12);
        assert!((e.e_m - 4.0).abs() < 1e-11);
        assert!((e.e_plus - 1.75).abs() < 1e-12);
    }

    #[test]
    fn isothermal_levels_use_log_branch() {
        let g = GasLaw::new(1.0).unwrap();
        let d = RiemannData::normal(1.0, 1.0, 1.0, -1.0).unwrap();
        let s = solve_middle_state(&d, &g).unwrap();
        let e = energy_levels(&d, &g, &s);
        assert!((e.e_minus - 0.5).abs() < 1e-15);
        assert!((e.e_m - s.rho_m * s.rho_m.ln()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_rate() {
        let (d, g, s) = symmetric();
        let r = rate_self_similar(&energy_levels(&d, &g, &s), s.nu1, s.nu2, 1.0);
        assert!((r + 9.0 * 1.5f64.sqrt()).abs() < 1e-10);
        assert!((r + 11.022_704).abs() < 1e-6);
        let r7 = rate_self_similar(&energy_levels(&d, &g, &s), s.nu1, s.nu2, 2.0);
        assert!((r7 - 2.0 * r).abs() < 1e-12);
    }

    #[test]
    fn equal_levels_give_zero() {
        let e = EnergyLevels { e_minus: 3.0, e_m: 3.0, e_plus: 3.0 };
        assert_eq!(rate_self_similar(&e, -1.0, 2.0, 1.0), 0.0);
    }

    #[test]
    fn embedded_solution_rate_matches() {
        let (d, g, s) = symmetric();
        let sub = FanSubsolution::embed(&s);
        let rep = compare(&d, &g, &s, &sub, 1.0).unwrap();
        assert!(rep.gap.abs() < 1e-12);
        assert!(!rep.verdict);
    }

    #[test]
    fn raising_middle_energy_lowers_rate() {
        let (d, g, s) = symmetric();
        let sub = FanSubsolution::embed(&s);
        let mut last = rate_subsolution(&d, &g, &sub, 1.0);
        for k in 1..10 {
            let bigger = FanSubsolution { c: sub.c + 0.1 * k as f64, ..sub };
            let r = rate_subsolution(&d, &g, &bigger, 1.0);
            assert!(r < last);
            last = r;
            let rep = compare(&d, &g, &s, &bigger, 1.0).unwrap();
            assert!(rep.verdict);
            let rep7 = compare(&d, &g, &s, &bigger, 7.0).unwrap();
            assert!(rep7.verdict);
            assert!((rep7.gap - 7.0 * rep.gap).abs() < 1e-10 * rep7.gap.abs());
        }
    }

    #[test]
    fn rejects_bad_box() {
        let (d, g, s) = symmetric();
        let sub = FanSubsolution::embed(&s);
        assert!(compare(&d, &g, &s, &sub, 0.0).is_err());
        assert!(BoxEnergy::of_fan(&self_similar_fan(&d, &g, &s), -1.0, 0.0).is_err());
    }
}
