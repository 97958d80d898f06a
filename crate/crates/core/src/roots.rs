//! Safeguarded Newton iteration inside a sign-change bracket.

use crate::{Error, Result};

pub(crate) struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

/// Finds a root of `f` in `[lo, hi]` where `f(lo)` and `f(hi)` differ in sign.
///
/// `f` returns the value and the derivative. A Newton step is taken whenever
/// it lands strictly inside the current bracket and otherwise the bracket is
/// bisected. Stops once `|f| <= ftol`, the Newton step drops to round-off
/// or the bracket collapses to a few ulps.
pub(crate) fn solve_bracketed<F>(mut f: F, bracket: Bracket, ftol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let Bracket { mut lo, mut hi } = bracket;
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::Bracketing(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo:e}, {fhi:e})"
        )));
    }
    let lo_negative = flo < 0.0;

    let mut x = 0.5 * (lo + hi);
    let mut best = (f64::INFINITY, x);
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if !fx.is_finite() {
            return Err(Error::Bracketing(format!("non-finite value at x = {x}")));
        }
        if fx.abs() < best.0 {
            best = (fx.abs(), x);
        }
        if fx.abs() <= ftol {
            return Ok(x);
        }
        if (fx < 0.0) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * (lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)) {
            return Ok(best.1);
        }
        let newton = x - fx / dfx;
        if dfx != 0.0 && dfx.is_finite() && newton > lo && newton < hi {
            if (newton - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(1.0) {
                return Ok(newton);
            }
            x = newton;
        } else {
            x = 0.5 * (lo + hi);
        }
    }
    if best.0 <= ftol {
        Ok(best.1)
    } else {
        Err(Error::Bracketing(format!(
            "no convergence after {max_iter} iterations, best |f| = {:e}",
            best.0
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = solve_bracketed(|x| (x * x - 2.0, 2.0 * x), Bracket { lo: 0.0, hi: 2.0 }, 1e-15, 100).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn survives_zero_derivative() {
        // Newton from the midpoint of [-1, 2] hits f'(x) = 0 territory.
        let r = solve_bracketed(|x| (x * x * x, 0.0), Bracket { lo: -1.0, hi: 2.0 }, 1e-30, 400).unwrap();
        assert!(r.abs() < 1e-10);
    }

    #[test]
    fn rejects_missing_sign_change() {
        let e = solve_bracketed(|x| (x * x + 1.0, 2.0 * x), Bracket { lo: -1.0, hi: 1.0 }, 1e-12, 50);
        assert!(matches!(e, Err(Error::Bracketing(_))));
    }
}
