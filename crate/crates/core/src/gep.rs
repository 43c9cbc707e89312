//! Smallest eigenpair of a symmetric banded pencil `A v = lambda B v` with
//! `A` positive definite and `B` positive semidefinite.
//!
//! `B` may be singular (for the flat film only the two boundary degrees of
//! freedom carry eigenvalue weight); the corresponding infinite eigenvalues
//! never show up because every shift used below is finite and every
//! factorization is of `A - sigma B`.
//!
//! Strategy:
//! 1. a few steps of power iteration on `A^{-1} B` give a Rayleigh quotient
//!    that bounds the smallest eigenvalue from above;
//! 2. inertia counts of `A - sigma B` (Sylvester) bisect a bracket
//!    `(lo, hi]` around the smallest eigenvalue, with `A - lo B` definite;
//! 3. shift-and-invert iteration at `lo` converges to the eigenpair above
//!    the shift, refined by the Rayleigh quotient.
//!
//! If step 3 stalls because the next eigenvalue is nearly degenerate, the
//! bracket is tightened and the iteration resumed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::banded::{cholesky_check, dot, norm, SymBanded};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Discretized symmetric pair `(A, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEigenSystem<T> {
    pub a: SymBanded<T>,
    pub b: SymBanded<T>,
}

impl<T: Real> GeneralizedEigenSystem<T> {
    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: T) -> usize {
        self.a.shifted(sigma, &self.b).ldl().negative_count()
    }

    /// Rayleigh quotient `v^T A v / v^T B v`, `None` when `v^T B v <= 0`.
    pub fn rayleigh(&self, v: &[T]) -> Option<T> {
        let den = self.b.quadratic_form(v);
        if den > T::zero() {
            Some(self.a.quadratic_form(v) / den)
        } else {
            None
        }
    }

    /// Backward-error style residual
    /// `|A v - lambda B v| / ((|A|_F + |lambda| |B|_F) |v|)`.
    pub fn relative_residual(&self, lambda: T, v: &[T]) -> T {
        let av = self.a.matvec(v);
        let bv = self.b.matvec(v);
        let r: Vec<T> = av.iter().zip(&bv).map(|(&x, &y)| x - lambda * y).collect();
        let scale = (self.a.frobenius_norm() + lambda.abs() * self.b.frobenius_norm()) * norm(v);
        norm(&r) / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Relative residual (see [`GeneralizedEigenSystem::relative_residual`])
    /// and relative eigenvalue change required for convergence.
    pub tol: T,
    /// Cap on shift-and-invert iterations.
    pub max_iter: usize,
    /// Seed for the random starting vector.
    pub seed: u64,
    /// Initial relative width of the inertia bracket before shift-and-invert.
    pub bracket_rel_width: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-10).max(T::tolerance_floor()),
            max_iter: 10_000,
            seed: 0x5eed,
            bracket_rel_width: T::lit(1e-4),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub lambda: T,
    /// Unit 2-norm, sign chosen so the entries sum to a nonnegative value.
    pub eigvec: Vec<T>,
    pub residual: T,
    pub iterations: usize,
}

const POWER_STEPS: usize = 8;
const INNER_STEPS: usize = 200;

pub fn smallest_eigenpair<T: Real>(
    sys: &GeneralizedEigenSystem<T>,
    cfg: &SolverConfig<T>,
) -> Result<EigenPair<T>> {
    let n = sys.dim();
    if sys.b.dim() != n {
        return Err(Error::DegenerateInput(
            "A and B have different orders".into(),
        ));
    }
    if n == 0 {
        return Err(Error::DegenerateInput("empty system".into()));
    }
    if sys.b.frobenius_norm() == T::zero() {
        return Err(Error::DegenerateInput("B is identically zero".into()));
    }
    let a_fact = cholesky_check(&sys.a)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut v: Vec<T> = (0..n).map(|_| T::lit(rng.gen_range(0.5..1.5))).collect();

    // Power iteration on A^{-1} B for an upper bound.
    for _ in 0..POWER_STEPS {
        let x = a_fact.solve(&sys.b.matvec(&v));
        let nx = norm(&x);
        if !(nx > T::zero()) {
            return Err(Error::DegenerateInput(
                "starting vector lies in the null space of B".into(),
            ));
        }
        v = x.into_iter().map(|e| e / nx).collect();
    }
    let upper = sys
        .rayleigh(&v)
        .ok_or_else(|| Error::numerical("smallest_eigenpair", "power iterate has no B-weight"))?;

    let mut lo = T::zero();
    let mut hi = upper * (T::one() + T::epsilon() * T::lit(8.0));
    let mut width = cfg.bracket_rel_width;
    let mut total_iter = 0usize;
    let mut lambda = upper;

    loop {
        narrow_bracket(sys, &mut lo, &mut hi, width)?;

        let shifted = sys.a.shifted(lo, &sys.b);
        let fact = cholesky_check(&shifted).map_err(|_| {
            Error::numerical(
                "smallest_eigenpair",
                format!("shift {} is not below the spectrum", lo.to_f64_lossy()),
            )
        })?;

        for _ in 0..INNER_STEPS {
            total_iter += 1;
            let x = fact.solve(&sys.b.matvec(&v));
            let nx = norm(&x);
            if !(nx > T::zero()) {
                return Err(Error::numerical(
                    "smallest_eigenpair",
                    "iterate collapsed to zero",
                ));
            }
            v = x.into_iter().map(|e| e / nx).collect();
            let next = sys
                .rayleigh(&v)
                .ok_or_else(|| Error::numerical("smallest_eigenpair", "iterate has no B-weight"))?;
            let change = (next - lambda).abs();
            lambda = next;
            let residual = sys.relative_residual(lambda, &v);
            if residual <= cfg.tol && change <= cfg.tol * lambda.abs() {
                return Ok(finish(lambda, v, residual, total_iter));
            }
            if total_iter >= cfg.max_iter {
                return Err(Error::numerical(
                    "smallest_eigenpair",
                    format!(
                        "no convergence after {total_iter} iterations: lambda = {}, residual = {}, bracket = [{}, {}]",
                        lambda.to_f64_lossy(),
                        residual.to_f64_lossy(),
                        lo.to_f64_lossy(),
                        hi.to_f64_lossy()
                    ),
                ));
            }
        }

        // Stalled: the next eigenvalue sits close to the smallest one.
        hi = hi.min(lambda * (T::one() + T::epsilon() * T::lit(8.0)));
        width = width * T::lit(1e-3);
        if width < T::epsilon() {
            return Err(Error::numerical(
                "smallest_eigenpair",
                format!(
                    "bracket exhausted at [{}, {}] without convergence",
                    lo.to_f64_lossy(),
                    hi.to_f64_lossy()
                ),
            ));
        }
    }
}

/// Shrinks `(lo, hi]` (invariant: nothing below `lo`, something at or below
/// `hi`) until `hi - lo <= width * hi`. Tries a shift just under `hi` first,
/// which settles the common well-separated case in one factorization.
fn narrow_bracket<T: Real>(
    sys: &GeneralizedEigenSystem<T>,
    lo: &mut T,
    hi: &mut T,
    width: T,
) -> Result<()> {
    let target = width * *hi;
    if *hi - *lo <= target {
        return Ok(());
    }
    let probe = *hi - target * T::lit(0.5);
    if sys.count_below(probe) == 0 {
        *lo = probe;
        return Ok(());
    }
    *hi = probe;
    let half = T::lit(0.5);
    for _ in 0..200 {
        if *hi - *lo <= width * *hi {
            return Ok(());
        }
        let mid = *lo + (*hi - *lo) * half;
        if sys.count_below(mid) == 0 {
            *lo = mid;
        } else {
            *hi = mid;
        }
    }
    Err(Error::numerical(
        "smallest_eigenpair",
        "inertia bisection did not terminate",
    ))
}

fn finish<T: Real>(lambda: T, mut v: Vec<T>, residual: T, iterations: usize) -> EigenPair<T> {
    let s = v.iter().fold(T::zero(), |acc, &x| acc + x);
    if s < T::zero() {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    EigenPair {
        lambda,
        eigvec: v,
        residual,
        iterations,
    }
}

/// Cosine of the angle between two vectors; `1` means equal up to scale.
pub fn alignment<T: Real>(a: &[T], b: &[T]) -> T {
    dot(a, b).abs() / (norm(a) * norm(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Diagonal pencil with known spectrum `a_i / b_i`, some `b_i` zero.
    fn diagonal(a: &[f64], b: &[f64]) -> GeneralizedEigenSystem<f64> {
        let mut am = SymBanded::zeros(a.len(), 1);
        let mut bm = SymBanded::zeros(a.len(), 1);
        for i in 0..a.len() {
            am.add(i, i, a[i]);
            bm.add(i, i, b[i]);
        }
        GeneralizedEigenSystem { a: am, b: bm }
    }

    #[test]
    fn diagonal_with_singular_b() {
        let sys = diagonal(&[4.0, 1.0, 9.0, 2.0], &[2.0, 0.0, 1.0, 0.0]);
        let e = smallest_eigenpair(&sys, &SolverConfig::default()).unwrap();
        assert!((e.lambda - 2.0).abs() < 1e-12);
        assert!((e.eigvec[0].abs() - 1.0).abs() < 1e-9);
        assert_eq!(sys.count_below(2.5), 1);
        assert_eq!(sys.count_below(100.0), 2);
    }

    #[test]
    fn near_degenerate_pair() {
        let sys = diagonal(&[1.0, 1.0 + 1e-9, 3.0], &[1.0, 1.0, 1.0]);
        let e = smallest_eigenpair(&sys, &SolverConfig::default()).unwrap();
        assert!((e.lambda - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_b_is_degenerate() {
        let sys = diagonal(&[1.0, 2.0], &[0.0, 0.0]);
        assert!(matches!(
            smallest_eigenpair(&sys, &SolverConfig::default()),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn indefinite_a_is_rejected() {
        let sys = diagonal(&[1.0, -2.0], &[1.0, 1.0]);
        assert!(smallest_eigenpair(&sys, &SolverConfig::default()).is_err());
    }

    #[test]
    fn tridiagonal_against_dense_oracle() {
        // A = second-difference + I, B = I: eigenvalues 1 + 2 - 2cos(k pi/(n+1)).
        let n = 50;
        let mut a = SymBanded::zeros(n, 1);
        let mut b = SymBanded::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 3.0);
            b.add(i, i, 1.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
        }
        let sys = GeneralizedEigenSystem { a, b };
        let e = smallest_eigenpair(&sys, &SolverConfig::default()).unwrap();
        let expected = 3.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((e.lambda - expected).abs() < 1e-11);
        assert!(e.residual < 1e-10);
        assert!(e.eigvec.iter().all(|&x| x > 0.0));
    }
}
