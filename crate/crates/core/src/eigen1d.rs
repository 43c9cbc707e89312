//! Reduced one-dimensional eigenproblem for the helicoid.
//!
//! Separating `c(y, z) = g(y) sin(k pi z / rho)` turns the second-variation
//! eigenproblem into
//!
//! ```text
//! -(P g')' + k^2 pi^2 / P g = lambda W g          on [-1, 1]
//!  g'(+-1) -+ lambda (1 + theta^2 / rho^2)^{-1} g(+-1) = 0
//! ```
//!
//! with `P = sqrt(rho^2 + theta^2 y^2)` and `W = 2 rho^2 theta^2 / P^3`. The
//! eigenvalue multiplies the boundary trace, so the weak form carries a
//! boundary mass `c_b (g(1)^2 + g(-1)^2)` with `c_b = rho^2 / sqrt(rho^2 +
//! theta^2)` on the eigenvalue side. Discretizing that weak form with
//! piecewise-linear elements yields a symmetric tridiagonal pencil `(A, B)`
//! where the boundary weight simply lands on the two endpoint diagonal
//! entries of `B`.

use serde::Serialize;

use crate::banded::SymBanded;
use crate::error::{Error, Result};
use crate::geometry::{area_element, FilmParams};
use crate::gep::{smallest_eigenpair, GeneralizedEigenSystem, SolverConfig};
use crate::scalar::Real;

/// Default number of uniform nodes on `[-1, 1]`.
pub const DEFAULT_NODES: usize = 2001;
/// Default number of axial modes checked for monotonicity.
pub const DEFAULT_K_CHECK: usize = 4;

/// Coefficients of the reduced problem for axial mode `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SturmLiouvilleSpec<T> {
    pub params: FilmParams<T>,
    pub k: usize,
}

impl<T: Real> SturmLiouvilleSpec<T> {
    pub fn new(params: FilmParams<T>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::range("k", 0.0, "mode number must be at least 1"));
        }
        Ok(Self { params, k })
    }

    /// Diffusion coefficient `sqrt(rho^2 + theta^2 y^2)`.
    #[inline]
    pub fn p(&self, y: T) -> T {
        area_element(&self.params, y)
    }

    /// Potential `k^2 pi^2 / sqrt(rho^2 + theta^2 y^2)`.
    #[inline]
    pub fn q(&self, y: T) -> T {
        let kpi = T::count(self.k) * T::PI();
        kpi * kpi / self.p(y)
    }

    /// Interior eigenvalue weight `2 rho^2 theta^2 / (rho^2 + theta^2 y^2)^{3/2}`.
    #[inline]
    pub fn w(&self, y: T) -> T {
        let (r, t) = (self.params.rho(), self.params.theta());
        let s = self.p(y);
        T::lit(2.0) * r * r * t * t / (s * s * s)
    }

    /// Boundary eigenvalue weight `rho^2 / sqrt(rho^2 + theta^2)`, equal to
    /// `p(+-1) / (1 + theta^2 / rho^2)`.
    #[inline]
    pub fn c_b(&self) -> T {
        let r = self.params.rho();
        r * r / self.p(T::one())
    }
}

/// Uniform grid on `[-1, 1]` with `n` nodes.
pub fn uniform_nodes<T: Real>(n: usize) -> Vec<T> {
    let h = T::lit(2.0) / T::count(n - 1);
    (0..n)
        .map(|i| {
            if i + 1 == n {
                T::one()
            } else {
                -T::one() + T::count(i) * h
            }
        })
        .collect()
}

/// Finite element pencil together with its grid and coefficients.
#[derive(Debug, Clone)]
pub struct Discretization<T> {
    pub spec: SturmLiouvilleSpec<T>,
    pub nodes: Vec<T>,
    pub system: GeneralizedEigenSystem<T>,
}

impl<T: Real> Discretization<T> {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }
}

/// Piecewise-linear Galerkin assembly with two-point Gauss quadrature per
/// element.
pub fn assemble<T: Real>(p: &FilmParams<T>, k: usize, n: usize) -> Result<Discretization<T>> {
    if n < 3 {
        return Err(Error::range("n", n as f64, "need at least 3 nodes"));
    }
    let spec = SturmLiouvilleSpec::new(*p, k)?;
    let nodes = uniform_nodes::<T>(n);
    let mut a = SymBanded::zeros(n, 1);
    let mut b = SymBanded::zeros(n, 1);

    let half = T::lit(0.5);
    let g = T::one() / T::lit(3.0).sqrt();
    for e in 0..n - 1 {
        let (y0, y1) = (nodes[e], nodes[e + 1]);
        let h = y1 - y0;
        let mid = (y0 + y1) * half;
        for xi in [-g, g] {
            let y = mid + xi * h * half;
            let wq = h * half;
            let phi = [(T::one() - xi) * half, (T::one() + xi) * half];
            let dphi = [-T::one() / h, T::one() / h];
            let (pc, qc, wc) = (spec.p(y), spec.q(y), spec.w(y));
            for i in 0..2 {
                for j in 0..=i {
                    a.add(
                        e + i,
                        e + j,
                        wq * (pc * dphi[i] * dphi[j] + qc * phi[i] * phi[j]),
                    );
                    if wc != T::zero() {
                        b.add(e + i, e + j, wq * wc * phi[i] * phi[j]);
                    }
                }
            }
        }
    }
    let cb = spec.c_b();
    b.add(0, 0, cb);
    b.add(n - 1, n - 1, cb);

    Ok(Discretization {
        spec,
        nodes,
        system: GeneralizedEigenSystem { a, b },
    })
}

/// Smallest eigenvalue of one axial mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSolution<T> {
    pub lambda: T,
    /// Nodal values, unit 2-norm, nonnegative sum.
    pub eigvec: Vec<T>,
    pub residual: T,
    pub k: usize,
    pub iterations: usize,
}

pub fn smallest_eigenvalue<T: Real>(
    sys: &Discretization<T>,
    cfg: &SolverConfig<T>,
) -> Result<EigenSolution<T>> {
    let pair = smallest_eigenpair(&sys.system, cfg)?;
    if !(pair.lambda > T::zero()) {
        return Err(Error::InternalConsistency(format!(
            "nonpositive eigenvalue {} from a definite pencil",
            pair.lambda.to_f64_lossy()
        )));
    }
    Ok(EigenSolution {
        lambda: pair.lambda,
        eigvec: pair.eigvec,
        residual: pair.residual,
        k: sys.spec.k,
        iterations: pair.iterations,
    })
}

/// Solves axial modes `1..=k_max`.
pub fn mode_sweep<T: Real>(
    p: &FilmParams<T>,
    n: usize,
    k_max: usize,
    cfg: &SolverConfig<T>,
) -> Result<Vec<EigenSolution<T>>> {
    if k_max == 0 {
        return Err(Error::range("k_check", 0.0, "must be at least 1"));
    }
    (1..=k_max)
        .map(|k| assemble(p, k, n).and_then(|d| smallest_eigenvalue(&d, cfg)))
        .collect()
}

/// The smallest eigenvalue over all axial modes, which is attained at
/// `k = 1`. Modes `2..=k_check` are solved as well and must not fall below
/// their predecessor.
pub fn lambda_hat<T: Real>(
    p: &FilmParams<T>,
    n: usize,
    k_check: usize,
) -> Result<EigenSolution<T>> {
    lambda_hat_with(p, n, k_check, &SolverConfig::default())
}

pub fn lambda_hat_with<T: Real>(
    p: &FilmParams<T>,
    n: usize,
    k_check: usize,
    cfg: &SolverConfig<T>,
) -> Result<EigenSolution<T>> {
    let sweep = mode_sweep(p, n, k_check, cfg)?;
    check_mode_monotone(&sweep, cfg.tol)?;
    Ok(sweep.into_iter().next().expect("k_check >= 1"))
}

fn check_mode_monotone<T: Real>(sweep: &[EigenSolution<T>], tol: T) -> Result<()> {
    for pair in sweep.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        if next.lambda < prev.lambda - tol.sqrt() * prev.lambda {
            return Err(Error::InternalConsistency(format!(
                "lambda(k={}) = {} below lambda(k={}) = {}",
                next.k,
                next.lambda.to_f64_lossy(),
                prev.k,
                prev.lambda.to_f64_lossy()
            )));
        }
    }
    Ok(())
}
