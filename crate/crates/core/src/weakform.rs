//! Quadrature oracle for the distributional form of the equations.
//!
//! Fan objects are piecewise constant on three wedges in `(x2, t)` and do not
//! depend on `x1`. For a tensor-product test function
//! `psi = f1(x1) f2(x2) f3(t)` every weak functional is a linear combination
//! of a handful of sector moments, e.g. `int int_sector f2 f3'`, plus the
//! initial-data moments `int_{x2 < 0} f2 f3(0)` and `int_{x2 > 0} f2 f3(0)`.
//! For each time node the `x2` cells are split at the fronts `x2 = nu t` and
//! integrated exactly up to a tabulated antiderivative; the time integral uses
//! composite Gauss-Legendre rules whose panel count doubles per level.
//!
//! Every functional is divided by `max |D psi| * vol(supp psi)` so
//! tolerances are independent of the test function scale.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gas::GasLaw;
use crate::parallel::{map_ordered, Execution};
use crate::riemann::{RiemannData, SelfSimilarTwoShock};
use crate::subsolution::FanSubsolution;
use crate::{Error, Result};

const GAUSS_ORDER: usize = 8;

fn gauss_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_ORDER))
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Calls `f(x, w)` for every node of a composite rule on `[a, b]`.
fn composite<F: FnMut(f64, f64)>(a: f64, b: f64, panels: usize, mut f: F) {
    if !(b > a) {
        return;
    }
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(x, w) in gauss_rule() {
            f(mid + 0.5 * h * x, 0.5 * h * w);
        }
    }
}

/// `P((s - center) / radius) * exp(1 / (z^2 - 1))` on `|z| < 1`, with
/// `P(z) = poly[0] + poly[1] z + poly[2] z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub radius: f64,
    pub poly: [f64; 3],
}

impl Bump {
    pub fn new(center: f64, radius: f64) -> Self {
        Self { center, radius, poly: [1.0, 0.0, 0.0] }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }

    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        let z = (s - self.center) / self.radius;
        if z.abs() >= 1.0 {
            return 0.0;
        }
        let [a, b, c] = self.poly;
        (a + z * (b + z * c)) * (1.0 / (z * z - 1.0)).exp()
    }

    #[inline]
    pub fn derivative(&self, s: f64) -> f64 {
        let z = (s - self.center) / self.radius;
        if z.abs() >= 1.0 {
            return 0.0;
        }
        let [a, b, c] = self.poly;
        let q = z * z - 1.0;
        let bump = (1.0 / q).exp();
        let poly = a + z * (b + z * c);
        let dpoly = b + 2.0 * c * z;
        (dpoly - poly * 2.0 * z / (q * q)) * bump / self.radius
    }

    /// Minimum of the polynomial factor over the support.
    pub fn poly_min(&self) -> f64 {
        let [a, b, c] = self.poly;
        let p = |z: f64| a + z * (b + z * c);
        let mut m = p(-1.0).min(p(1.0));
        if c > 0.0 {
            let z = -b / (2.0 * c);
            if z.abs() < 1.0 {
                m = m.min(p(z));
            }
        }
        m
    }

    fn sup_norms(&self) -> (f64, f64) {
        let n = 4000;
        (0..=n).fold((0.0f64, 0.0f64), |(v, d), i| {
            let s = self.center + self.radius * (2.0 * i as f64 / n as f64 - 1.0);
            (v.max(self.value(s).abs()), d.max(self.derivative(s).abs()))
        })
    }
}

/// `psi(x1, x2, t) = x1_factor(x1) * x2_factor(x2) * t_factor(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub x1: Bump,
    pub x2: Bump,
    pub t: Bump,
}

impl TestFunction {
    pub fn new(x1: Bump, x2: Bump, t: Bump) -> Self {
        Self { x1, x2, t }
    }

    /// A random member of the family. Nonnegative members keep every
    /// polynomial factor positive on its support.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, nonnegative: bool) -> Self {
        let mut bump = |center: (f64, f64), radius: (f64, f64)| {
            let c = rng.gen_range(center.0..center.1);
            let r = rng.gen_range(radius.0..radius.1);
            let poly = if nonnegative {
                [1.0, rng.gen_range(-0.45..0.45), rng.gen_range(-0.45..0.45)]
            } else {
                [rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]
            };
            Bump { center: c, radius: r, poly }
        };
        let x1 = bump((-1.0, 1.0), (0.5, 1.5));
        let x2 = bump((-1.5, 1.5), (0.5, 2.0));
        let mut t = bump((-0.5, 1.0), (0.5, 1.5));
        // keep a piece of the support in t > 0
        if t.center + t.radius < 0.2 {
            t.center = 0.2 - 0.5 * t.radius;
        }
        Self { x1, x2, t }
    }

    /// `count` test functions from a seeded generator.
    pub fn family(seed: u64, count: usize, nonnegative: bool) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| Self::random(&mut rng, nonnegative)).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        let sign = |b: &Bump| b.poly_min() >= 0.0;
        sign(&self.x1) && sign(&self.x2) && sign(&self.t)
    }

    pub fn value(&self, x1: f64, x2: f64, t: f64) -> f64 {
        self.x1.value(x1) * self.x2.value(x2) * self.t.value(t)
    }

    /// `max(|d_t psi|, |d_x1 psi|, |d_x2 psi|) * vol(supp psi)`.
    pub fn normalization(&self) -> f64 {
        let (v1, d1) = self.x1.sup_norms();
        let (v2, d2) = self.x2.sup_norms();
        let (v3, d3) = self.t.sup_norms();
        let grad = (v1 * v2 * d3).max(d1 * v2 * v3).max(v1 * d2 * v3);
        let volume = 8.0 * self.x1.radius * self.x2.radius * self.t.radius;
        grad * volume
    }
}

/// Conserved densities and fluxes of one constant state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorState {
    pub rho: f64,
    pub momentum: [f64; 2],
    /// Momentum flux including the isotropic part.
    pub momentum_flux: [[f64; 2]; 2],
    pub energy: f64,
    pub energy_flux: [f64; 2],
}

impl SectorState {
    /// A genuine state of the Euler system.
    pub fn exact(law: &GasLaw, rho: f64, v: [f64; 2]) -> Self {
        let p = law.p(rho);
        let energy = law.energy(rho, v[0] * v[0] + v[1] * v[1]);
        Self {
            rho,
            momentum: [rho * v[0], rho * v[1]],
            momentum_flux: [
                [rho * v[0] * v[0] + p, rho * v[0] * v[1]],
                [rho * v[1] * v[0], rho * v[1] * v[1] + p],
            ],
            energy,
            energy_flux: [(energy + p) * v[0], (energy + p) * v[1]],
        }
    }

    /// The relaxed middle state of a fan subsolution: flux `rho1 u1` plus the
    /// modified pressure `p(rho1) + rho1 C / 2`, energy `rho1 eps + rho1 C / 2`.
    pub fn relaxed(law: &GasLaw, sub: &FanSubsolution) -> Self {
        let rho = sub.rho1;
        let v = [sub.alpha, sub.beta];
        let q = law.p(rho) + 0.5 * rho * sub.c;
        let energy = law.energy(rho, sub.c);
        let p = law.p(rho);
        Self {
            rho,
            momentum: [rho * v[0], rho * v[1]],
            momentum_flux: [
                [rho * sub.gamma1 + q, rho * sub.gamma2],
                [rho * sub.gamma2, -rho * sub.gamma1 + q],
            ],
            energy,
            energy_flux: [(energy + p) * v[0], (energy + p) * v[1]],
        }
    }
}

/// Three constant states separated by `x2 = nu_minus t` and `x2 = nu_plus t`,
/// with Riemann initial data given by the outer states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanField {
    pub nu_minus: f64,
    pub nu_plus: f64,
    pub sectors: [SectorState; 3],
}

impl FanField {
    pub fn constant(law: &GasLaw, rho: f64, v: [f64; 2], nu_minus: f64, nu_plus: f64) -> Self {
        let s = SectorState::exact(law, rho, v);
        Self { nu_minus, nu_plus, sectors: [s; 3] }
    }

    pub fn self_similar(data: &RiemannData, law: &GasLaw, shock: &SelfSimilarTwoShock) -> Self {
        Self {
            nu_minus: shock.nu1,
            nu_plus: shock.nu2,
            sectors: [
                SectorState::exact(law, data.rho_minus, data.v_minus),
                SectorState::exact(law, shock.rho_m, [shock.v_tangential, shock.v_bar]),
                SectorState::exact(law, data.rho_plus, data.v_plus),
            ],
        }
    }

    pub fn subsolution(data: &RiemannData, law: &GasLaw, sub: &FanSubsolution) -> Self {
        Self {
            nu_minus: sub.partition.nu_minus,
            nu_plus: sub.partition.nu_plus,
            sectors: [
                SectorState::exact(law, data.rho_minus, data.v_minus),
                SectorState::relaxed(law, sub),
                SectorState::exact(law, data.rho_plus, data.v_plus),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Finest level; level `k` uses `2^(k+3)` panels per cell.
    pub levels: usize,
    /// Largest accepted change between the two finest levels (normalized).
    pub resolve_tol: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { levels: 4, resolve_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    x1_mass: f64,
    x1_slope: f64,
    dt: [f64; 3],
    dx2: [f64; 3],
    plain: [f64; 3],
    initial: [f64; 2],
}

/// Antiderivative of a bump, tabulated on a fine panel grid and completed by
/// one Gauss rule on the partial panel.
struct Primitive<'a> {
    bump: &'a Bump,
    lo: f64,
    h: f64,
    cumulative: Vec<f64>,
}

impl<'a> Primitive<'a> {
    const PANELS: usize = 1024;

    fn new(bump: &'a Bump) -> Self {
        let (lo, hi) = bump.support();
        let h = (hi - lo) / Self::PANELS as f64;
        let mut cumulative = Vec::with_capacity(Self::PANELS + 1);
        let mut acc = 0.0;
        cumulative.push(acc);
        for k in 0..Self::PANELS {
            let a = lo + k as f64 * h;
            composite(a, a + h, 1, |x, w| acc += w * bump.value(x));
            cumulative.push(acc);
        }
        Self { bump, lo, h, cumulative }
    }

    /// `int_{lo}^{s} bump`.
    fn at(&self, s: f64) -> f64 {
        let u = ((s - self.lo) / self.h).max(0.0);
        if u >= Self::PANELS as f64 {
            return self.cumulative[Self::PANELS];
        }
        let k = u as usize;
        let a = self.lo + k as f64 * self.h;
        let mut partial = 0.0;
        composite(a, s, 1, |x, w| partial += w * self.bump.value(x));
        self.cumulative[k] + partial
    }

    fn between(&self, a: f64, b: f64) -> f64 {
        if b > a {
            self.at(b) - self.at(a)
        } else {
            0.0
        }
    }
}

fn moments(field: &FanField, tf: &TestFunction, panels: usize) -> Moments {
    let mut m = Moments::default();
    let (a1, b1) = tf.x1.support();
    m.x1_mass = Primitive::new(&tf.x1).at(b1);
    m.x1_slope = tf.x1.value(b1) - tf.x1.value(a1);

    let f2 = Primitive::new(&tf.x2);
    let (a2, b2) = tf.x2.support();
    let (ta, tb) = tf.t.support();
    let t_lo = ta.max(0.0);

    let f3_at_zero = tf.t.value(0.0);
    if f3_at_zero != 0.0 {
        m.initial = [f2.between(a2, b2.min(0.0)) * f3_at_zero, f2.between(a2.max(0.0), b2) * f3_at_zero];
    }

    let slope = |lo: f64, hi: f64| if hi > lo { tf.x2.value(hi) - tf.x2.value(lo) } else { 0.0 };
    composite(t_lo, tb, panels, |t, wt| {
        let (f3, df3) = (tf.t.value(t), tf.t.derivative(t));
        if f3 == 0.0 && df3 == 0.0 {
            return;
        }
        let (s_minus, s_plus) = (field.nu_minus * t, field.nu_plus * t);
        let cells = [(a2, b2.min(s_minus)), (a2.max(s_minus), b2.min(s_plus)), (a2.max(s_plus), b2)];
        for (k, &(lo, hi)) in cells.iter().enumerate() {
            let v = f2.between(lo, hi);
            let d = slope(lo, hi);
            m.dt[k] += wt * df3 * v;
            m.dx2[k] += wt * f3 * d;
            m.plain[k] += wt * f3 * v;
        }
    });
    m
}

/// Weak functionals `[mass, momentum_1, momentum_2, energy]`, unnormalized.
fn functionals(field: &FanField, m: &Moments) -> [f64; 4] {
    let [left, _, right] = field.sectors;
    let apply = |q: &dyn Fn(&SectorState) -> f64, f1: &dyn Fn(&SectorState) -> f64, f2: &dyn Fn(&SectorState) -> f64| {
        let interior: f64 = field
            .sectors
            .iter()
            .enumerate()
            .map(|(k, s)| m.x1_mass * (q(s) * m.dt[k] + f2(s) * m.dx2[k]) + m.x1_slope * f1(s) * m.plain[k])
            .sum();
        interior + m.x1_mass * (q(&left) * m.initial[0] + q(&right) * m.initial[1])
    };
    [
        apply(&|s| s.rho, &|s| s.momentum[0], &|s| s.momentum[1]),
        apply(&|s| s.momentum[0], &|s| s.momentum_flux[0][0], &|s| s.momentum_flux[0][1]),
        apply(&|s| s.momentum[1], &|s| s.momentum_flux[1][0], &|s| s.momentum_flux[1][1]),
        apply(&|s| s.energy, &|s| s.energy_flux[0], &|s| s.energy_flux[1]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakResiduals {
    pub mass: f64,
    pub momentum: [f64; 2],
    /// Admissibility functional; nonnegative for admissible objects when the
    /// test function is nonnegative.
    pub energy: f64,
    /// `[mass, momentum_1, momentum_2, energy]` at each refinement level.
    pub trace: Vec<[f64; 4]>,
}

impl WeakResiduals {
    pub fn max_balance(&self) -> f64 {
        self.mass.abs().max(self.momentum[0].abs()).max(self.momentum[1].abs())
    }
}

/// Normalized weak functionals of a fan object against one test function.
pub fn evaluate(field: &FanField, tf: &TestFunction, opts: &QuadratureOptions) -> Result<WeakResiduals> {
    let norm = tf.normalization();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidArgument("degenerate test function".into()));
    }
    let trace: Vec<[f64; 4]> = (0..=opts.levels)
        .map(|level| functionals(field, &moments(field, tf, 8 << level)).map(|v| v / norm))
        .collect();
    let last = *trace.last().expect("at least one level");
    if let Some(prev) = trace.len().checked_sub(2).map(|i| trace[i]) {
        let change = (0..4).fold(0.0f64, |m, i| m.max((last[i] - prev[i]).abs()));
        if change > opts.resolve_tol {
            return Err(Error::Unresolved(format!(
                "last refinement changed the functionals by {change:e} (tolerance {:e})",
                opts.resolve_tol
            )));
        }
    }
    Ok(WeakResiduals { mass: last[0], momentum: [last[1], last[2]], energy: last[3], trace })
}

/// Mass and momentum residuals of a candidate weak solution.
pub fn weak_residual_solution(
    data: &RiemannData,
    law: &GasLaw,
    shock: &SelfSimilarTwoShock,
    tf: &TestFunction,
    opts: &QuadratureOptions,
) -> Result<[f64; 3]> {
    let r = evaluate(&FanField::self_similar(data, law, shock), tf, opts)?;
    Ok([r.mass, r.momentum[0], r.momentum[1]])
}

/// Residuals of the relaxed mass and momentum equations of a fan subsolution.
pub fn weak_residual_subsolution(
    sub: &FanSubsolution,
    data: &RiemannData,
    law: &GasLaw,
    tf: &TestFunction,
    opts: &QuadratureOptions,
) -> Result<[f64; 3]> {
    let r = evaluate(&FanField::subsolution(data, law, sub), tf, opts)?;
    Ok([r.mass, r.momentum[0], r.momentum[1]])
}

/// Admissibility functional for a nonnegative test function.
pub fn weak_admissibility(field: &FanField, tf: &TestFunction, opts: &QuadratureOptions) -> Result<f64> {
    if !tf.is_nonnegative() {
        return Err(Error::InvalidArgument("admissibility needs a nonnegative test function".into()));
    }
    Ok(evaluate(field, tf, opts)?.energy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakResidualReport {
    pub test_functions: usize,
    pub max_mass: f64,
    pub max_momentum: f64,
    pub min_admissibility: f64,
}

/// Runs a family of nonnegative test functions. Evaluation may be parallel;
/// the reduction is in family order.
pub fn check_family(
    field: &FanField,
    family: &[TestFunction],
    opts: &QuadratureOptions,
    exec: Execution,
) -> Result<WeakResidualReport> {
    let results = map_ordered(family, exec, |tf| {
        if !tf.is_nonnegative() {
            return Err(Error::InvalidArgument("admissibility needs a nonnegative test function".into()));
        }
        evaluate(field, tf, opts)
    });
    let mut report = WeakResidualReport {
        test_functions: family.len(),
        max_mass: 0.0,
        max_momentum: 0.0,
        min_admissibility: f64::INFINITY,
    };
    for r in results {
        let r = r?;
        report.max_mass = report.max_mass.max(r.mass.abs());
        report.max_momentum = report.max_momentum.max(r.momentum[0].abs()).max(r.momentum[1].abs());
        report.min_admissibility = report.min_admissibility.min(r.energy);
    }
    Ok(report)
}
