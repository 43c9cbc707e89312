//! Bracketing root search.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Result of a bracketing search: the midpoint of the final bracket and the
/// function value there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub x: T,
    pub fx: T,
    pub iterations: usize,
}

/// Bisection on `[lo, hi]` until the bracket is narrower than `xtol`.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero).
pub fn bisect<T, F>(mut f: F, mut lo: T, mut hi: T, xtol: T, max_iter: usize) -> Result<Root<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == T::zero() {
        return Ok(Root {
            x: lo,
            fx: f_lo,
            iterations: 0,
        });
    }
    if f_hi == T::zero() {
        return Ok(Root {
            x: hi,
            fx: f_hi,
            iterations: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::numerical(
            "bisection",
            format!(
                "no sign change on [{}, {}]: f = ({}, {})",
                lo.to_f64_lossy(),
                hi.to_f64_lossy(),
                f_lo.to_f64_lossy(),
                f_hi.to_f64_lossy()
            ),
        ));
    }

    let half = T::lit(0.5);
    for it in 1..=max_iter {
        let mid = lo + (hi - lo) * half;
        if mid <= lo || mid >= hi {
            // bracket is down to adjacent floats
            return Ok(Root {
                x: mid,
                fx: f(mid)?,
                iterations: it,
            });
        }
        let f_mid = f(mid)?;
        if f_mid == T::zero() {
            return Ok(Root {
                x: mid,
                fx: f_mid,
                iterations: it,
            });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= xtol {
            let x = lo + (hi - lo) * half;
            return Ok(Root {
                x,
                fx: f(x)?,
                iterations: it,
            });
        }
    }
    Err(Error::numerical(
        "bisection",
        format!(
            "bracket [{}, {}] still wider than {} after {} iterations",
            lo.to_f64_lossy(),
            hi.to_f64_lossy(),
            xtol.to_f64_lossy(),
            max_iter
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x: f64| Ok(x * x - 2.0), 0.0, 2.0, 1e-12, 200).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn swapped_bracket_is_fine() {
        let r = bisect(|x: f64| Ok(x - 0.25), 1.0, 0.0, 1e-12, 200).unwrap();
        assert!((r.x - 0.25).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change() {
        let e = bisect(|x: f64| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 200).unwrap_err();
        assert!(matches!(e, Error::NumericalFailure { .. }));
    }

    #[test]
    fn propagates_evaluation_errors() {
        let e = bisect(
            |_x: f64| Err::<f64, _>(Error::DegenerateInput("x".into())),
            0.0,
            1.0,
            1e-12,
            10,
        )
        .unwrap_err();
        assert_eq!(e, Error::DegenerateInput("x".into()));
    }
}
