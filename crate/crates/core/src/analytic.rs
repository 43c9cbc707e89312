//! Closed-form eigenvalues, fixed-point lower bounds, the test-function
//! upper bound and the bypass-surface energy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{area_element, FilmParams};
use crate::roots::bisect;
use crate::scalar::Real;

/// Default node count when an analytic function is sampled for quadrature.
pub const DEFAULT_SAMPLES: usize = 2001;

/// Smallest eigenvalue of the flat film, `(pi / rho) tanh(pi / rho)`.
pub fn flat_eigenvalue<T: Real>(rho: T) -> Result<T> {
    if !(rho > T::zero()) {
        return Err(Error::range("rho", rho.to_f64_lossy(), "must be positive"));
    }
    let a = T::PI() / rho;
    Ok(a * a.tanh())
}

/// Aspect ratio at which the flat film loses stability: the root of
/// `(pi / rho) tanh(pi / rho) = 1` in `[1, 10]`.
pub fn critical_rho<T: Real>() -> T {
    let xtol = T::lit(1e-10).max(T::tolerance_floor());
    bisect(
        |r| flat_eigenvalue(r).map(|l| l - T::one()),
        T::one(),
        T::lit(10.0),
        xtol,
        200,
    )
    .expect("flat eigenvalue crosses 1 inside [1, 10]")
    .x
}

/// Coefficients of the constant-coefficient minimization
/// `inf (int A g'^2 + B g^2) / (C (g(1)^2 + g(-1)^2) + int D g^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstCoeffProblem<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> ConstCoeffProblem<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        for (name, v) in [("A", a), ("B", b), ("C", c)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::range(name, v.to_f64_lossy(), "must be positive"));
            }
        }
        if !(d >= T::zero()) || !d.is_finite() {
            return Err(Error::range("D", d.to_f64_lossy(), "must be nonnegative"));
        }
        Ok(Self { a, b, c, d })
    }

    /// Right-hand side `(sqrt(A)/C) sqrt(B - lambda D) tanh sqrt((B - lambda D)/A)`,
    /// defined for `B - lambda D >= 0`.
    pub fn fixed_point_rhs(&self, lambda: T) -> T {
        let m = (self.b - lambda * self.d).max(T::zero());
        let mu = (m / self.a).sqrt();
        self.a.sqrt() / self.c * m.sqrt() * mu.tanh()
    }

    pub fn residual(&self, lambda: T) -> T {
        lambda - self.fixed_point_rhs(lambda)
    }
}

/// The infimum of the constant-coefficient problem: the unique positive
/// solution of `lambda = fixed_point_rhs(lambda)` with `B - lambda D >= 0`.
///
/// The residual is increasing on `(0, B/D]`, negative near zero and equal
/// to `B/D` at the right end, so bisection always brackets the root.
pub fn const_coeff_eigenvalue<T: Real>(prob: &ConstCoeffProblem<T>) -> Result<T> {
    if prob.d == T::zero() {
        return Ok(prob.fixed_point_rhs(T::zero()));
    }
    let hi = prob.b / prob.d;
    let lo = T::lit(1e-12).min(hi * T::lit(1e-12));
    bisect(|l| Ok(prob.residual(l)), lo, hi, T::epsilon() * hi, 400).map(|r| r.x)
}

/// Lower bound from the smallest admissible weight: `A = C = rho^2`,
/// `B = pi^2`, `D = 2 theta^2`.
pub fn lambda1_problem<T: Real>(p: &FilmParams<T>) -> ConstCoeffProblem<T> {
    let r2 = p.rho() * p.rho();
    ConstCoeffProblem {
        a: r2,
        b: T::PI() * T::PI(),
        c: r2,
        d: T::lit(2.0) * p.theta() * p.theta(),
    }
}

/// Lower bound from the largest admissible weight: `B` and `D` scaled by
/// `sqrt(rho^2 + theta^2) / rho`.
pub fn lambda2_problem<T: Real>(p: &FilmParams<T>) -> ConstCoeffProblem<T> {
    let base = lambda1_problem(p);
    let s = area_element(p, T::one()) / p.rho();
    ConstCoeffProblem {
        b: base.b * s,
        d: base.d * s,
        ..base
    }
}

pub fn lambda1_bound<T: Real>(p: &FilmParams<T>) -> Result<T> {
    const_coeff_eigenvalue(&lambda1_problem(p))
}

pub fn lambda2_bound<T: Real>(p: &FilmParams<T>) -> Result<T> {
    const_coeff_eigenvalue(&lambda2_problem(p))
}

/// `sqrt((pi^2 - 2 theta^2) / rho^2) tanh sqrt((pi^2 - 2 theta^2) / rho^2)`,
/// or `None` once `theta >= pi / sqrt(2)`.
pub fn sufficient_stability_lhs<T: Real>(p: &FilmParams<T>) -> Option<T> {
    let m = T::PI() * T::PI() - T::lit(2.0) * p.theta() * p.theta();
    if m > T::zero() {
        let s = m.sqrt() / p.rho();
        Some(s * s.tanh())
    } else {
        None
    }
}

/// Closed-form sufficient condition for stability. It holds exactly when
/// the first fixed-point bound exceeds one.
pub fn sufficient_stable<T: Real>(p: &FilmParams<T>) -> bool {
    sufficient_stability_lhs(p).is_some_and(|v| v > T::one())
}

/// Which form of the instability test function to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GbarVariant {
    /// `cosh(pi / P(y)) rho / P(y)`: constant argument, does not reduce to
    /// the flat minimizer at `theta = 0`.
    AsPrinted,
    /// `cosh(pi y / P(y)) rho / P(y)`, equal to `cosh(pi y / rho)` at `theta = 0`.
    #[default]
    Corrected,
}

/// The test function, unnormalized (the Rayleigh quotient is scale invariant).
pub fn gbar<T: Real>(p: &FilmParams<T>, variant: GbarVariant) -> impl Fn(T) -> T {
    let p = *p;
    move |y| {
        let s = area_element(&p, y);
        let arg = match variant {
            GbarVariant::AsPrinted => T::PI() / s,
            GbarVariant::Corrected => T::PI() * y / s,
        };
        arg.cosh() * p.rho() / s
    }
}

pub fn gbar_sampled<T: Real>(
    p: &FilmParams<T>,
    variant: GbarVariant,
    n: usize,
) -> SampledFunction<T> {
    SampledFunction::from_fn(gbar(p, variant), n).expect("n >= 3 uniform nodes are valid")
}

/// A function on `[-1, 1]` known at a strictly increasing set of nodes and
/// interpolated linearly in between.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    nodes: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(nodes: Vec<T>, values: Vec<T>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::range(
                "nodes",
                nodes.len() as f64,
                "need at least 3 nodes",
            ));
        }
        if nodes.len() != values.len() {
            return Err(Error::range(
                "values",
                values.len() as f64,
                format!("expected {} values", nodes.len()),
            ));
        }
        if nodes[0] != -T::one() || nodes[nodes.len() - 1] != T::one() {
            return Err(Error::range(
                "nodes",
                nodes[0].to_f64_lossy(),
                "must start at -1 and end at 1",
            ));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::range(
                "nodes",
                f64::NAN,
                "must be strictly increasing",
            ));
        }
        Ok(Self { nodes, values })
    }

    /// Samples `f` on `n` uniform nodes.
    pub fn from_fn(f: impl Fn(T) -> T, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::range("n", n as f64, "need at least 3 nodes"));
        }
        let nodes = crate::eigen1d::uniform_nodes::<T>(n);
        let values = nodes.iter().map(|&y| f(y)).collect();
        Self::new(nodes, values)
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            nodes: self.nodes.clone(),
            values: self.values.iter().map(|&v| v * c).collect(),
        }
    }
}

/// Energy over weighted mass for the `k = 1` mode:
///
/// ```text
/// int (P g'^2 + pi^2 / P g^2) dy
/// -----------------------------------------------------------
/// rho^2 / sqrt(rho^2 + theta^2) (g(1)^2 + g(-1)^2) + int W g^2 dy
/// ```
///
/// `g` is taken piecewise linear between its nodes and the coefficient
/// integrals use two-point Gauss quadrature on every segment, so on the
/// finite element grid this is exactly the discrete Rayleigh quotient.
pub fn rayleigh_quotient<T: Real>(g: &SampledFunction<T>, p: &FilmParams<T>) -> Result<T> {
    let (r, t) = (p.rho(), p.theta());
    let pi2 = T::PI() * T::PI();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let gauss = T::one() / T::lit(3.0).sqrt();

    let mut num = T::zero();
    let mut den_interior = T::zero();
    for (ys, gs) in g.nodes.windows(2).zip(g.values.windows(2)) {
        let h = ys[1] - ys[0];
        let slope = (gs[1] - gs[0]) / h;
        let mid = (ys[0] + ys[1]) * half;
        for xi in [-gauss, gauss] {
            let y = mid + xi * h * half;
            let gv = gs[0] * (T::one() - xi) * half + gs[1] * (T::one() + xi) * half;
            let s = area_element(p, y);
            num = num + h * half * (s * slope * slope + pi2 / s * gv * gv);
            den_interior = den_interior + h * half * (two * r * r * t * t / (s * s * s)) * gv * gv;
        }
    }
    let last = g.values.len() - 1;
    let boundary = r * r / area_element(p, T::one())
        * (g.values[0] * g.values[0] + g.values[last] * g.values[last]);
    let den = boundary + den_interior;
    if !(den > T::zero()) {
        return Err(Error::DegenerateInput(
            "test function vanishes identically".into(),
        ));
    }
    Ok(num / den)
}

/// Rayleigh quotient of the corrected test function on the default grid.
pub fn test_function_bound<T: Real>(p: &FilmParams<T>) -> T {
    rayleigh_quotient(&gbar_sampled(p, GbarVariant::Corrected, DEFAULT_SAMPLES), p)
        .expect("test function has positive boundary trace")
}

/// Sufficient condition for instability: the test function's Rayleigh
/// quotient is below one.
pub fn sufficient_unstable<T: Real>(p: &FilmParams<T>) -> bool {
    test_function_bound(p) < T::one()
}

/// Which bypass-surface energy formula to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EnergyVariant {
    /// `rho cos(phi) + 2 phi`.
    AsPrinted,
    /// `2 rho cos(phi) + 2 phi`: a `2 cos(phi)` by `rho` rectangle plus two
    /// circular caps of area `phi` each.
    #[default]
    Corrected,
}

/// Area of the piecewise-flat competitor that detours around the wires.
pub fn bypass_energy<T: Real>(phi: T, rho: T, variant: EnergyVariant) -> Result<T> {
    if !(phi > T::zero() && phi < T::FRAC_PI_2()) {
        return Err(Error::range(
            "phi",
            phi.to_f64_lossy(),
            "must lie in (0, pi/2)",
        ));
    }
    if !(rho > T::zero()) {
        return Err(Error::range("rho", rho.to_f64_lossy(), "must be positive"));
    }
    let two = T::lit(2.0);
    Ok(match variant {
        EnergyVariant::AsPrinted => rho * phi.cos() + two * phi,
        EnergyVariant::Corrected => two * rho * phi.cos() + two * phi,
    })
}

/// Area of the flat film, `2 rho`.
pub fn flat_energy<T: Real>(rho: T) -> T {
    T::lit(2.0) * rho
}

/// Scans `samples` interior points of `(0, pi/2)` and returns the angle of
/// least bypass energy if that energy is strictly below the flat film's.
pub fn bypass_beats_flat<T: Real>(
    rho: T,
    samples: usize,
    variant: EnergyVariant,
) -> Result<Option<T>> {
    let reference = flat_energy(rho);
    let mut best: Option<(T, T)> = None;
    for i in 1..=samples {
        let phi = T::FRAC_PI_2() * T::count(i) / T::count(samples + 1);
        let e = bypass_energy(phi, rho, variant)?;
        if best.is_none_or(|(_, be)| e < be) {
            best = Some((phi, e));
        }
    }
    Ok(best.and_then(|(phi, e)| (e < reference).then_some(phi)))
}

/// Checks `(A + alpha C)/(B + beta C) >= min` of the same fraction at
/// `C_L` and `C_U`.
#[allow(clippy::too_many_arguments)]
pub fn min_fraction_bound<T: Real>(
    a: T,
    b: T,
    alpha: T,
    beta: T,
    c_l: T,
    c_u: T,
    c: T,
) -> Result<bool> {
    for (name, v) in [("A", a), ("B", b), ("alpha", alpha), ("beta", beta)] {
        if !(v > T::zero()) {
            return Err(Error::range(name, v.to_f64_lossy(), "must be positive"));
        }
    }
    if !(T::zero() <= c_l && c_l <= c && c <= c_u) {
        return Err(Error::range(
            "C",
            c.to_f64_lossy(),
            "need 0 <= C_L <= C <= C_U",
        ));
    }
    let frac = |x: T| (a + alpha * x) / (b + beta * x);
    let bound = frac(c_l).min(frac(c_u));
    // the fraction is monotone in C; allow for rounding in the comparison
    Ok(frac(c) >= bound - T::epsilon() * T::lit(4.0) * bound.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn fp(rho: f64, theta: f64) -> FilmParams<f64> {
        FilmParams::new(rho, theta).unwrap()
    }

    #[test]
    fn flat_eigenvalue_examples() {
        assert!((flat_eigenvalue(1.0).unwrap() - PI * PI.tanh()).abs() < 1e-15);
        assert!((flat_eigenvalue(1.0f64).unwrap() - 3.129_881_8).abs() < 1e-6);
        assert!((flat_eigenvalue(PI).unwrap() - 1f64.tanh()).abs() < 1e-15);
        assert!((flat_eigenvalue(4.0f64).unwrap() - 0.515_059_562_314_395).abs() < 1e-12);
        assert!(flat_eigenvalue(0.0).is_err());
        assert!(flat_eigenvalue(-2.0).is_err());
    }

    #[test]
    fn critical_rho_root() {
        let r: f64 = critical_rho();
        assert!((r - 2.6189).abs() < 1e-3);
        assert!((flat_eigenvalue(r).unwrap() - 1.0).abs() < 1e-9);
        assert!(r > FRAC_PI_2);
        assert_eq!((r * 100.0).round() / 100.0, 2.62);
    }

    #[test]
    fn const_coeff_closed_form() {
        let l = const_coeff_eigenvalue(&ConstCoeffProblem::new(1.0, PI * PI, 1.0, 0.0).unwrap())
            .unwrap();
        assert!((l - PI * PI.tanh()).abs() < 1e-14);
        let l = const_coeff_eigenvalue(&ConstCoeffProblem::new(4.0, PI * PI, 4.0, 0.0).unwrap())
            .unwrap();
        assert!((l - flat_eigenvalue(2.0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn const_coeff_against_grid_scan() {
        // Oracle: scan the residual on a fine grid, then refine the sign change.
        let prob = ConstCoeffProblem::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let f = |l: f64| l - (1.0 - l).sqrt() * (1.0 - l).sqrt().tanh();
        let mut root = f64::NAN;
        let steps = 100_000;
        for i in 0..steps {
            let (a, b) = (i as f64 / steps as f64, (i + 1) as f64 / steps as f64);
            if f(a) <= 0.0 && f(b) > 0.0 {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..100 {
                    let m = 0.5 * (lo + hi);
                    if f(m) <= 0.0 {
                        lo = m
                    } else {
                        hi = m
                    }
                }
                root = 0.5 * (lo + hi);
                break;
            }
        }
        let l = const_coeff_eigenvalue(&prob).unwrap();
        assert!((l - root).abs() < 1e-12, "{l} vs {root}");
        assert!(prob.residual(l).abs() < 1e-10);
    }

    #[test]
    fn const_coeff_validation() {
        assert!(ConstCoeffProblem::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(ConstCoeffProblem::new(1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn lambda_bounds() {
        assert!((lambda1_bound(&fp(1.0, 0.0)).unwrap() - PI * PI.tanh()).abs() < 1e-13);
        assert!((lambda1_bound(&fp(2.0, 0.0)).unwrap() - 1.440_659_519_977_514_5).abs() < 1e-12);
        assert!((lambda2_bound(&fp(1.0, 0.0)).unwrap() - PI * PI.tanh()).abs() < 1e-13);

        let p = fp(1.0, 1.0);
        let l1 = lambda1_bound(&p).unwrap();
        assert!(l1 > 0.0 && l1 < PI * PI.tanh());
        assert!(lambda1_problem(&p).residual(l1).abs() < 1e-10);
        let l2 = lambda2_bound(&p).unwrap();
        assert!(l2 >= l1);
        assert!(lambda2_problem(&p).residual(l2).abs() < 1e-10);

        let p = fp(2.0, 0.5);
        assert!(lambda2_bound(&p).unwrap() >= lambda1_bound(&p).unwrap());
    }

    #[test]
    fn sufficient_stability_examples() {
        assert!(sufficient_stable(&fp(1.0, 0.5)));
        let lhs = sufficient_stability_lhs(&fp(1.0, 0.5)).unwrap();
        assert!((lhs - 3.048).abs() < 1e-3, "{lhs}");
        for rho in [0.1, 1.0, 5.0] {
            assert!(!sufficient_stable(&fp(rho, PI / 2f64.sqrt())));
        }
        assert!(!sufficient_stable(&fp(3.0, 0.0)));
    }

    #[test]
    fn sufficient_stable_iff_lambda1_above_one() {
        for rho in [0.5, 1.0, 2.0, 2.5, 3.0] {
            for theta in [0.0, 0.5, 1.0, 1.5, 2.0] {
                let p = fp(rho, theta);
                assert_eq!(
                    sufficient_stable(&p),
                    lambda1_bound(&p).unwrap() > 1.0,
                    "{rho} {theta}"
                );
            }
        }
    }

    #[test]
    fn gbar_variants() {
        let g = gbar(&fp(2.0, 0.0), GbarVariant::Corrected);
        for y in [-1.0, -0.4, 0.0, 0.9] {
            assert!((g(y) - (PI * y / 2.0).cosh()).abs() < 1e-14);
        }
        assert!((gbar(&fp(1.0, 1.0), GbarVariant::Corrected)(0.0) - 1.0).abs() < 1e-15);
        let g = gbar(&fp(2.0, 0.0), GbarVariant::AsPrinted);
        for y in [-1.0, 0.0, 0.5] {
            assert!((g(y) - FRAC_PI_2.cosh()).abs() < 1e-14);
        }
    }

    #[test]
    fn rayleigh_of_flat_minimizer() {
        let p = fp(2.0, 0.0);
        let g = SampledFunction::from_fn(|y: f64| (PI * y / 2.0).cosh(), 2001).unwrap();
        let l = rayleigh_quotient(&g, &p).unwrap();
        assert!((l - 1.440_659_519_977_514_5).abs() < 1e-5, "{l}");
        assert!(l >= flat_eigenvalue(2.0).unwrap());
    }

    #[test]
    fn rayleigh_scale_and_degenerate() {
        let p = fp(1.3, 0.7);
        let g = gbar_sampled(&p, GbarVariant::Corrected, 101);
        let a = rayleigh_quotient(&g, &p).unwrap();
        let b = rayleigh_quotient(&g.scaled(7.0), &p).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
        let zero = SampledFunction::from_fn(|_| 0.0, 11).unwrap();
        assert!(matches!(
            rayleigh_quotient(&zero, &p),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn sampled_function_validation() {
        assert!(SampledFunction::new(vec![-1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(SampledFunction::new(vec![-1.0, 0.0, 0.9], vec![0.0; 3]).is_err());
        assert!(SampledFunction::new(vec![-1.0, 0.5, 0.2, 1.0], vec![0.0; 4]).is_err());
        assert!(SampledFunction::new(vec![-1.0, 0.0, 1.0], vec![0.0; 2]).is_err());
        assert!(SampledFunction::new(vec![-1.0, 0.0, 1.0], vec![0.0; 3]).is_ok());
    }

    #[test]
    fn sufficient_instability_examples() {
        let l = test_function_bound(&fp(4.0, 0.0));
        assert!((l - flat_eigenvalue(4.0).unwrap()).abs() < 1e-5, "{l}");
        assert!(l < 0.52);
        assert!(sufficient_unstable(&fp(4.0, 0.0)));
        assert!(!sufficient_unstable(&fp(1.0, 0.0)));
    }

    #[test]
    fn bypass_energy_examples() {
        let e: f64 = bypass_energy(1e-9, 2.0, EnergyVariant::Corrected).unwrap();
        assert!((e - 4.0).abs() < 1e-8);
        let e = bypass_energy(1.2, 2.0, EnergyVariant::Corrected).unwrap();
        assert!((e - (4.0 * 1.2f64.cos() + 2.4)).abs() < 1e-14);
        assert!((e - 3.8494).abs() < 1e-4);
        assert!(e < flat_energy(2.0));
        let e = bypass_energy(1.2, 2.0, EnergyVariant::AsPrinted).unwrap();
        assert!((e - (2.0 * 1.2f64.cos() + 2.4)).abs() < 1e-14);

        for phi in [0.0, FRAC_PI_2, -0.1] {
            assert!(bypass_energy(phi, 1.0, EnergyVariant::Corrected).is_err());
        }
        assert!(bypass_energy(0.5, 0.0, EnergyVariant::Corrected).is_err());
    }

    #[test]
    fn bypass_threshold_below_half_pi() {
        // grid-scan oracle written out independently of bypass_beats_flat
        let min_gap = (1..10_000)
            .map(|i| FRAC_PI_2 * i as f64 / 10_000.0)
            .map(|phi| bypass_energy(phi, 1.5, EnergyVariant::Corrected).unwrap() - 3.0)
            .fold(f64::INFINITY, f64::min);
        assert!(min_gap >= 0.0);
        assert!(bypass_beats_flat(1.5, 10_000, EnergyVariant::Corrected)
            .unwrap()
            .is_none());
        assert!(bypass_beats_flat(2.0, 10_000, EnergyVariant::Corrected)
            .unwrap()
            .is_some());
    }

    #[test]
    fn min_fraction_examples() {
        assert!(min_fraction_bound(1.0, 1.0, 1.0, 1.0, 0.0, 2.0, 1.0).unwrap());
        assert!(min_fraction_bound(1.0, 2.0, 3.0, 1.0, 0.0, 5.0, 2.0).unwrap());
        assert!(min_fraction_bound(1.0, 2.0, 3.0, 1.0, 3.0, 5.0, 2.0).is_err());
        assert!(min_fraction_bound(0.0, 2.0, 3.0, 1.0, 0.0, 5.0, 2.0).is_err());
    }
}
