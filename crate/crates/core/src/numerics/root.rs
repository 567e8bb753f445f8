//! Bracketed root finding by plain bisection.

use crate::error::{Error, Result};

/// A bracket `[lo, hi]` across which `f` changes sign (or touches zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Midpoint, or the endpoint where `f` vanishes exactly.
    pub fn root(&self) -> f64 {
        if self.f_lo == 0.0 {
            self.lo
        } else if self.f_hi == 0.0 {
            self.hi
        } else {
            0.5 * (self.lo + self.hi)
        }
    }

    pub fn has_sign_change(&self) -> bool {
        self.f_lo * self.f_hi <= 0.0
    }
}

/// Shrinks `[lo, hi]` by bisection until its width is at most `tol`.
///
/// Only the signs of `f` are used, so no smoothness is assumed.
pub fn bisect<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Bracket>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::validation(format!("bisection tolerance must be positive (got {tol})")));
    }
    if !(lo <= hi) {
        return Err(Error::validation(format!("bracket must satisfy lo <= hi (got [{lo}, {hi}])")));
    }
    let mut b = Bracket {
        lo,
        hi,
        f_lo: f(lo),
        f_hi: f(hi),
    };
    if b.f_lo.is_nan() || b.f_hi.is_nan() || !b.has_sign_change() {
        return Err(Error::NoRootInBracket {
            lo,
            hi,
            f_lo: b.f_lo,
            f_hi: b.f_hi,
        });
    }
    if b.f_lo == 0.0 {
        b.hi = b.lo;
        b.f_hi = 0.0;
        return Ok(b);
    }
    if b.f_hi == 0.0 {
        b.lo = b.hi;
        b.f_lo = 0.0;
        return Ok(b);
    }
    while b.width() > tol {
        let mid = 0.5 * (b.lo + b.hi);
        if mid <= b.lo || mid >= b.hi {
            // floating-point resolution reached
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(Bracket {
                lo: mid,
                hi: mid,
                f_lo: 0.0,
                f_hi: 0.0,
            });
        }
        if (fm < 0.0) == (b.f_lo < 0.0) {
            b.lo = mid;
            b.f_lo = fm;
        } else {
            b.hi = mid;
            b.f_hi = fm;
        }
    }
    Ok(b)
}

/// Root of `f` in `[lo, hi]` to within `tol` (bracket width).
pub fn find_root_bracketed<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    bisect(f, lo, hi, tol).map(|b| b.root())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_root() {
        let r = find_root_bracketed(|t| t - 1.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_zero_at_endpoint() {
        assert_eq!(find_root_bracketed(|t| t, 0.0, 1.0, 1e-9).unwrap(), 0.0);
        assert_eq!(find_root_bracketed(|t| t - 1.0, 0.0, 1.0, 1e-9).unwrap(), 1.0);
    }

    #[test]
    fn no_sign_change_is_reported() {
        let e = find_root_bracketed(|t| t * t + 1.0, -1.0, 1.0, 1e-9).unwrap_err();
        assert!(matches!(e, Error::NoRootInBracket { .. }));
    }

    #[test]
    fn discontinuous_sign_flip_is_located() {
        let r = find_root_bracketed(|t| if t < 0.3 { -1.0 } else { 2.0 }, 0.0, 1.0, 1e-12).unwrap();
        assert!((r - 0.3).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn bracket_keeps_sign_change_and_width(
            c in -5.0f64..5.0, a in 0.1f64..3.0, p in 1u32..4, tol_exp in 3i32..13
        ) {
            let tol = 10f64.powi(-tol_exp);
            let f = |t: f64| a * (t - c) * (1.0 + (t - c).powi(2 * p as i32));
            let b = bisect(f, -6.0, 6.0, tol).unwrap();
            prop_assert!(b.has_sign_change());
            prop_assert!(b.width() <= tol);
            prop_assert!(b.lo <= c && c <= b.hi);
        }
    }
}
