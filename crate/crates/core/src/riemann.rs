//! Planar Riemann data and the self-similar two-shock solution.
//!
//! Data are constant on `x2 < 0` and `x2 > 0`. Velocities are stored as
//! `[tangential, normal] = [v1, v2]`. The middle state is found by
//! intersecting the admissible 1-shock curve through the left state with the
//! admissible 3-shock curve through the right state.

use serde::{Deserialize, Serialize};

use crate::gas::{check_density, GasLaw};
use crate::roots::{solve_bracketed, Bracket};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannData {
    pub rho_minus: f64,
    pub v_minus: [f64; 2],
    pub rho_plus: f64,
    pub v_plus: [f64; 2],
}

impl RiemannData {
    pub fn new(rho_minus: f64, v_minus: [f64; 2], rho_plus: f64, v_plus: [f64; 2]) -> Result<Self> {
        let data = Self { rho_minus, v_minus, rho_plus, v_plus };
        data.validate()?;
        Ok(data)
    }

    /// Data with zero tangential velocity and normal velocities `v_minus`, `v_plus`.
    pub fn normal(rho_minus: f64, v_minus: f64, rho_plus: f64, v_plus: f64) -> Result<Self> {
        Self::new(rho_minus, [0.0, v_minus], rho_plus, [0.0, v_plus])
    }

    pub fn validate(&self) -> Result<()> {
        check_density(self.rho_minus)?;
        check_density(self.rho_plus)?;
        if self.v_minus.iter().chain(&self.v_plus).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("velocities must be finite".into()));
        }
        Ok(())
    }

    /// Common tangential velocity, if both sides agree.
    pub fn tangential(&self) -> Option<f64> {
        (self.v_minus[0] == self.v_plus[0]).then_some(self.v_minus[0])
    }

    pub(crate) fn require_tangential(&self) -> Result<f64> {
        self.tangential().ok_or(Error::TangentialMismatch {
            minus: self.v_minus[0],
            plus: self.v_plus[0],
        })
    }

    /// Image under `x2 -> -x2`: the states swap sides and normal velocities flip sign.
    pub fn mirrored(&self) -> Self {
        Self {
            rho_minus: self.rho_plus,
            v_minus: [self.v_plus[0], -self.v_plus[1]],
            rho_plus: self.rho_minus,
            v_plus: [self.v_minus[0], -self.v_minus[1]],
        }
    }

    /// Adds `shift` to both normal velocities.
    pub fn shifted_normal(&self, shift: f64) -> Self {
        let mut out = *self;
        out.v_minus[1] += shift;
        out.v_plus[1] += shift;
        out
    }

    /// Adds `shift` to both tangential velocities.
    pub fn shifted_tangential(&self, shift: f64) -> Self {
        let mut out = *self;
        out.v_minus[0] += shift;
        out.v_plus[0] += shift;
        out
    }

    pub(crate) fn magnitude(&self) -> f64 {
        [self.rho_minus, self.rho_plus]
            .into_iter()
            .chain(self.v_minus)
            .chain(self.v_plus)
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Density together with normal and tangential velocity on one side of a front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockState {
    pub rho: f64,
    pub normal: f64,
    pub tangential: f64,
}

impl ShockState {
    pub fn new(rho: f64, normal: f64, tangential: f64) -> Self {
        Self { rho, normal, tangential }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveFamily {
    One,
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoShockCheck {
    pub holds: bool,
    /// Right-hand side minus left-hand side of the strict inequality.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarTwoShock {
    pub rho_m: f64,
    pub v_bar: f64,
    /// Tangential velocity, shared by all three states.
    pub v_tangential: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub lax_ok_1: bool,
    pub lax_ok_3: bool,
}

impl SelfSimilarTwoShock {
    pub fn middle(&self) -> ShockState {
        ShockState::new(self.rho_m, self.v_bar, self.v_tangential)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiddleStateOptions {
    /// Absolute tolerance on the shock-curve gap.
    pub gap_tol: f64,
    pub max_iter: usize,
    pub max_doublings: usize,
}

impl Default for MiddleStateOptions {
    fn default() -> Self {
        Self { gap_tol: 1e-12, max_iter: 200, max_doublings: 200 }
    }
}

/// Velocity jump across a shock joining densities `a` and `b`:
/// `sqrt((a - b)(p(a) - p(b)) / (a b))`.
pub fn shock_curve(law: &GasLaw, a: f64, b: f64) -> f64 {
    ((a - b) * (law.p(a) - law.p(b)) / (a * b)).max(0.0).sqrt()
}

/// Derivative of [`shock_curve`] in its first argument. Infinite at `a == b`.
fn shock_curve_slope(law: &GasLaw, a: f64, b: f64) -> f64 {
    let s = shock_curve(law, a, b);
    let dp = law.p(a) - law.p(b);
    let dh = (dp + (a - b) * law.dp(a)) / (a * b) - (a - b) * dp / (a * a * b);
    dh / (2.0 * s)
}

pub fn two_shock_condition(data: &RiemannData, law: &GasLaw) -> TwoShockCheck {
    let lhs = data.v_plus[1] - data.v_minus[1];
    let rhs = -shock_curve(law, data.rho_minus, data.rho_plus);
    let margin = rhs - lhs;
    TwoShockCheck {
        holds: margin > 0.0 && data.tangential().is_some(),
        margin,
    }
}

pub fn solve_middle_state(data: &RiemannData, law: &GasLaw) -> Result<SelfSimilarTwoShock> {
    solve_middle_state_with(data, law, &MiddleStateOptions::default())
}

pub fn solve_middle_state_with(
    data: &RiemannData,
    law: &GasLaw,
    opts: &MiddleStateOptions,
) -> Result<SelfSimilarTwoShock> {
    data.validate()?;
    let v_t = data.require_tangential()?;
    let check = two_shock_condition(data, law);
    if !check.holds {
        return Err(Error::NotTwoShock { margin: check.margin });
    }
    let (rm, vm) = (data.rho_minus, data.v_minus[1]);
    let (rp, vp) = (data.rho_plus, data.v_plus[1]);

    // gap is strictly decreasing in rho, positive at max(rho_minus, rho_plus).
    let gap = |rho: f64| (vm - shock_curve(law, rho, rm)) - (vp + shock_curve(law, rho, rp));
    let lo = rm.max(rp);
    let mut hi = 2.0 * lo;
    let mut doublings = 0;
    while gap(hi) > 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > opts.max_doublings || !hi.is_finite() {
            return Err(Error::Bracketing(format!(
                "shock-curve gap still positive at rho = {hi:e} (margin {:e})",
                check.margin
            )));
        }
    }
    let rho_m = solve_bracketed(
        |rho| {
            let slope = -shock_curve_slope(law, rho, rm) - shock_curve_slope(law, rho, rp);
            (gap(rho), slope)
        },
        Bracket { lo, hi },
        opts.gap_tol,
        opts.max_iter,
    )
    .map_err(|e| match e {
        Error::Bracketing(msg) => Error::Bracketing(format!(
            "{msg}; data = {data:?}, gamma = {}, bracket = [{lo}, {hi}]",
            law.gamma()
        )),
        other => other,
    })?;
    if rho_m <= lo {
        return Err(Error::Bracketing(format!(
            "middle density {rho_m} does not exceed max(rho_minus, rho_plus) = {lo}"
        )));
    }

    let v_bar = vm - shock_curve(law, rho_m, rm);
    let nu1 = (rm * vm - rho_m * v_bar) / (rm - rho_m);
    let nu2 = (rho_m * v_bar - rp * vp) / (rho_m - rp);

    let left = ShockState::new(rm, vm, v_t);
    let middle = ShockState::new(rho_m, v_bar, v_t);
    let right = ShockState::new(rp, vp, v_t);
    Ok(SelfSimilarTwoShock {
        rho_m,
        v_bar,
        v_tangential: v_t,
        nu1,
        nu2,
        lax_ok_1: check_lax(&left, &middle, nu1, WaveFamily::One, law),
        lax_ok_3: check_lax(&middle, &right, nu2, WaveFamily::Three, law),
    })
}

/// Lax inequalities `lambda_k(right) < sigma < lambda_k(left)` with
/// `lambda_1 = u - c`, `lambda_3 = u + c`.
pub fn check_lax(left: &ShockState, right: &ShockState, sigma: f64, family: WaveFamily, law: &GasLaw) -> bool {
    let speed = |s: &ShockState| match family {
        WaveFamily::One => s.normal - law.sound_speed(s.rho),
        WaveFamily::Three => s.normal + law.sound_speed(s.rho),
    };
    speed(right) < sigma && sigma < speed(left)
}

/// Jump-condition residuals `sigma [q] - [f(q)]` for mass, tangential and
/// normal momentum, with `[a] = a_right - a_left`.
pub fn rh_residual(left: &ShockState, right: &ShockState, sigma: f64, law: &GasLaw) -> [f64; 3] {
    let jump = |f: &dyn Fn(&ShockState) -> f64| f(right) - f(left);
    [
        sigma * jump(&|s| s.rho) - jump(&|s| s.rho * s.normal),
        sigma * jump(&|s| s.rho * s.tangential) - jump(&|s| s.rho * s.tangential * s.normal),
        sigma * jump(&|s| s.rho * s.normal) - jump(&|s| s.rho * s.normal * s.normal + law.p(s.rho)),
    ]
}

/// Both jump-condition residual vectors of a two-shock solution.
pub fn two_shock_residuals(data: &RiemannData, law: &GasLaw, sol: &SelfSimilarTwoShock) -> [[f64; 3]; 2] {
    let left = ShockState::new(data.rho_minus, data.v_minus[1], data.v_minus[0]);
    let right = ShockState::new(data.rho_plus, data.v_plus[1], data.v_plus[0]);
    let middle = sol.middle();
    [
        rh_residual(&left, &middle, sol.nu1, law),
        rh_residual(&middle, &right, sol.nu2, law),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn law(g: f64) -> GasLaw {
        GasLaw::new(g).unwrap()
    }

    fn symmetric() -> RiemannData {
        let w = 1.5f64.sqrt();
        RiemannData::normal(1.0, w, 1.0, -w).unwrap()
    }

    fn max_abs(r: [[f64; 3]; 2]) -> f64 {
        r.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn condition_examples() {
        let g = law(2.0);
        let c = two_shock_condition(&RiemannData::normal(1.0, 1.0, 1.0, -1.0).unwrap(), &g);
        assert!(c.holds);
        assert_eq!(c.margin, 2.0);

        let c = two_shock_condition(&RiemannData::normal(1.0, 0.0, 1.0, 0.0).unwrap(), &g);
        assert!(!c.holds);
        assert_eq!(c.margin, 0.0);

        let c = two_shock_condition(&RiemannData::normal(1.0, 0.0, 4.0, 0.0).unwrap(), &g);
        assert!(!c.holds);
        assert!((c.margin + (3.0f64 * 15.0 / 4.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn condition_requires_equal_tangential() {
        let d = RiemannData::new(1.0, [0.1, 1.0], 1.0, [0.0, -1.0]).unwrap();
        assert!(!two_shock_condition(&d, &law(2.0)).holds);
        assert!(matches!(solve_middle_state(&d, &law(2.0)), Err(Error::TangentialMismatch { .. })));
    }

    #[test]
    fn symmetric_gamma_two() {
        // S(rho_m; 1) = sqrt(1.5) has the root rho_m = 2 since (2-1)(4-1)/2 = 1.5.
        let g = law(2.0);
        let s = solve_middle_state(&symmetric(), &g).unwrap();
        let w = 1.5f64.sqrt();
        assert!((s.rho_m - 2.0).abs() < 1e-12);
        assert!(s.v_bar.abs() < 1e-12);
        assert!((s.nu2 - w).abs() < 1e-12);
        assert!((s.nu1 + w).abs() < 1e-12);
        assert!(s.lax_ok_1 && s.lax_ok_3);
        assert!(max_abs(two_shock_residuals(&symmetric(), &g, &s)) < 1e-12);
    }

    #[test]
    fn symmetric_isothermal_closed_form() {
        let g = law(1.0);
        for w in [0.1, 0.7, 1.0, 3.0] {
            let d = RiemannData::normal(1.0, w, 1.0, -w).unwrap();
            let s = solve_middle_state(&d, &g).unwrap();
            // sqrt(rho) - 1/sqrt(rho) = w
            let root = 0.5 * (w + (w * w + 4.0f64).sqrt());
            assert!((s.rho_m - root * root).abs() < 1e-12 * root * root, "w={w}");
            assert!(s.v_bar.abs() < 1e-12);
        }
    }

    #[test]
    fn mirrored_output() {
        let g = law(1.4);
        let d = RiemannData::normal(2.0, 1.0, 1.0, -2.0).unwrap();
        let a = solve_middle_state(&d, &g).unwrap();
        let b = solve_middle_state(&d.mirrored(), &g).unwrap();
        assert!((a.rho_m - b.rho_m).abs() < 1e-12);
        assert!((a.v_bar + b.v_bar).abs() < 1e-12);
        assert!((a.nu1 + b.nu2).abs() < 1e-12);
        assert!((a.nu2 + b.nu1).abs() < 1e-12);
    }

    #[test]
    fn rejects_rarefaction_data() {
        let d = RiemannData::normal(1.0, -1.0, 1.0, 1.0).unwrap();
        assert!(matches!(solve_middle_state(&d, &law(2.0)), Err(Error::NotTwoShock { .. })));
    }

    #[test]
    fn lax_examples() {
        let g = law(2.0);
        let w = 1.5f64.sqrt();
        let left = ShockState::new(1.0, w, 0.0);
        let middle = ShockState::new(2.0, 0.0, 0.0);
        assert!(check_lax(&left, &middle, -w, WaveFamily::One, &g));
        // no jump: lambda(right) < sigma < lambda(left) cannot hold
        for sigma in [-1.0, -0.19, 0.0, 1.0] {
            assert!(!check_lax(&left, &left, sigma, WaveFamily::One, &g));
        }
        // expansive ordering
        assert!(!check_lax(&middle, &left, -w, WaveFamily::One, &g));
    }

    #[test]
    fn rh_residual_examples() {
        let g = law(2.0);
        let a = ShockState::new(1.3, 0.2, -0.4);
        assert_eq!(rh_residual(&a, &a, 3.7, &g), [0.0, 0.0, 0.0]);

        let w = 1.5f64.sqrt();
        let middle = ShockState::new(2.0, 0.0, 0.0);
        let right = ShockState::new(1.0, -w, 0.0);
        let r = rh_residual(&middle, &right, w, &g);
        assert!(r.iter().all(|x| x.abs() < 1e-12));
        let r = rh_residual(&middle, &right, w + 0.1, &g);
        assert!((r[0] + 0.1).abs() < 1e-12);
    }

    fn two_shock_data() -> impl Strategy<Value = RiemannData> {
        (0.1f64..5.0, 0.1f64..5.0, -3.0f64..3.0, 0.0f64..4.0, -1.0f64..1.0).prop_filter_map(
            "outside two-shock regime",
            |(rm, rp, vm, extra, vt)| {
                let g = law(2.0);
                let need = shock_curve(&g, rm, rp);
                let d = RiemannData::new(rm, [vt, vm], rp, [vt, vm - need - 0.05 - extra]).ok()?;
                Some(d)
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn solution_satisfies_jump_conditions(d in two_shock_data(), gi in 0usize..4) {
            let g = law([1.0, 1.4, 2.0, 2.5][gi]);
            prop_assume!(two_shock_condition(&d, &g).holds);
            let s = solve_middle_state(&d, &g).unwrap();
            let tol = 1e-10 * (1.0 + d.magnitude());
            prop_assert!(max_abs(two_shock_residuals(&d, &g, &s)) <= tol);
            prop_assert!(s.rho_m > d.rho_minus.max(d.rho_plus));
            prop_assert!(s.nu1 < s.nu2);
            prop_assert!(s.lax_ok_1 && s.lax_ok_3);
        }

        #[test]
        fn galilean_shift(d in two_shock_data(), c in -5.0f64..5.0) {
            let g = law(1.4);
            let a = solve_middle_state(&d, &g).unwrap();
            let b = solve_middle_state(&d.shifted_normal(c), &g).unwrap();
            let tol = 1e-10 * (1.0 + d.magnitude() + c.abs());
            prop_assert!((a.rho_m - b.rho_m).abs() <= tol);
            prop_assert!((a.v_bar + c - b.v_bar).abs() <= tol);
            prop_assert!((a.nu1 + c - b.nu1).abs() <= tol);
            prop_assert!((a.nu2 + c - b.nu2).abs() <= tol);
        }
    }
}
