//! Linear stability of helicoidal soap films spanning two twisted diameters
//! of a cylindrical tube.
//!
//! A film is described by the tube's aspect ratio `rho` and the total twist
//! `theta` between the end wires. Its second-variation stability reduces to
//! whether the smallest eigenvalue `lambda_hat(rho, theta)` of a
//! one-dimensional problem, whose eigenvalue also appears in Robin boundary
//! conditions, exceeds one.
//!
//! * [`geometry`]: the helicoid and its curvature.
//! * [`analytic`]: closed-form bounds and the flat-film solution.
//! * [`eigen1d`]: finite element solver for `lambda_hat`.
//! * [`oracle2d`]: independent 2D finite-difference cross-check.
//! * [`stability`]: verdicts, region maps and the marginal curve.
//!
//! Every numerical routine is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the command line
//! front end uses.

// `!(x > 0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod banded;
pub mod eigen1d;
mod error;
pub mod geometry;
pub mod gep;
pub mod oracle2d;
pub mod roots;
mod scalar;
pub mod stability;

pub use error::{Error, Result};
pub use scalar::Real;

pub use analytic::{EnergyVariant, GbarVariant};
pub use stability::{Method, MethodSelection, Status};

pub type FilmParams = geometry::FilmParams<f64>;
pub type Point3 = geometry::Point3<f64>;
pub type ConstCoeffProblem = analytic::ConstCoeffProblem<f64>;
pub type SampledFunction = analytic::SampledFunction<f64>;
pub type GeneralizedEigenSystem = gep::GeneralizedEigenSystem<f64>;
pub type SolverConfig = gep::SolverConfig<f64>;
pub type EigenSolution = eigen1d::EigenSolution<f64>;
pub type EigenSolution2d = oracle2d::EigenSolution2d<f64>;
pub type StabilityVerdict = stability::StabilityVerdict<f64>;
pub type ClassifyConfig = stability::ClassifyConfig<f64>;
pub type RegionMap = stability::RegionMap<f64>;
pub type BoundaryCurve = stability::BoundaryCurve<f64>;
pub type DataPoint = stability::DataPoint<f64>;

pub type FilmParamsF32 = geometry::FilmParams<f32>;
pub type EigenSolutionF32 = eigen1d::EigenSolution<f32>;
