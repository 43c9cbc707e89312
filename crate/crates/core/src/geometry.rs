//! Closed-form geometry of the helicoid spanning two twisted diameters of a
//! cylinder of unit radius and length `rho`.
//!
//! The surface is parameterized over the rectangle `[-1, 1] x [0, rho]` by
//! `(y, z) -> (-y sin(theta z / rho), y cos(theta z / rho), z)`. With
//! `theta = 0` it degenerates to the flat film in the plane `x = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cylinder aspect ratio and total twist of the film.
///
/// `rho` is the tube length over its inner radius and `theta` the total
/// rotation between the end wires. Only `theta >= 0` is needed since the
/// mirror image of a helicoid has the same stability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilmParams<T> {
    rho: T,
    theta: T,
}

impl<T: Real> FilmParams<T> {
    pub fn new(rho: T, theta: T) -> Result<Self> {
        if !(rho > T::zero()) || !rho.is_finite() {
            return Err(Error::range(
                "rho",
                rho.to_f64_lossy(),
                "must be positive and finite",
            ));
        }
        if !(theta >= T::zero()) || !theta.is_finite() {
            return Err(Error::range(
                "theta",
                theta.to_f64_lossy(),
                "must be nonnegative and finite",
            ));
        }
        Ok(Self { rho, theta })
    }

    /// The flat film (`theta = 0`) of aspect ratio `rho`.
    pub fn flat(rho: T) -> Result<Self> {
        Self::new(rho, T::zero())
    }

    #[inline]
    pub fn rho(&self) -> T {
        self.rho
    }

    #[inline]
    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn is_flat(&self) -> bool {
        self.theta == T::zero()
    }
}

/// A point in ambient Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    fn norm(self) -> T {
        self.dot(self).sqrt()
    }
}

fn check_y<T: Real>(y: T) -> Result<()> {
    if y >= -T::one() && y <= T::one() {
        Ok(())
    } else {
        Err(Error::range("y", y.to_f64_lossy(), "must lie in [-1, 1]"))
    }
}

fn check_z<T: Real>(p: &FilmParams<T>, z: T) -> Result<()> {
    if z >= T::zero() && z <= p.rho {
        Ok(())
    } else {
        Err(Error::range("z", z.to_f64_lossy(), "must lie in [0, rho]"))
    }
}

#[inline]
fn embed<T: Real>(p: &FilmParams<T>, y: T, z: T) -> Point3<T> {
    let (s, c) = (p.theta * z / p.rho).sin_cos();
    Point3::new(-y * s, y * c, z)
}

/// Ambient position of the surface point with parameters `(y, z)`.
pub fn helicoid_point<T: Real>(p: &FilmParams<T>, y: T, z: T) -> Result<Point3<T>> {
    check_y(y)?;
    check_z(p, z)?;
    Ok(embed(p, y, z))
}

/// `sqrt(rho^2 + theta^2 y^2)`, the area density of the parameterization
/// after rescaling `z` by `rho`. Also the diffusion coefficient of the
/// reduced eigenproblem.
#[inline]
pub fn area_element<T: Real>(p: &FilmParams<T>, y: T) -> T {
    (p.rho * p.rho + p.theta * p.theta * y * y).sqrt()
}

/// Gaussian curvature `-rho^2 theta^2 / (rho^2 + theta^2 y^2)^2`. It does not
/// depend on `z`.
#[inline]
pub fn gaussian_curvature<T: Real>(p: &FilmParams<T>, y: T) -> T {
    let s2 = p.rho * p.rho + p.theta * p.theta * y * y;
    -(p.rho * p.rho * p.theta * p.theta) / (s2 * s2)
}

/// Squared axial component of the unit tangent of the boundary curves on the
/// cylinder wall, `rho^2 / (rho^2 + theta^2)`.
#[inline]
pub fn tangent_z_sq<T: Real>(p: &FilmParams<T>) -> T {
    let r2 = p.rho * p.rho;
    r2 / (r2 + p.theta * p.theta)
}

/// Mean curvature estimated from the parameterization alone, using central
/// differences of step `h` for the first and second fundamental forms.
///
/// The stencil touches `(y +- h, z +- h)` and must stay inside the parameter
/// rectangle.
pub fn mean_curvature_numeric<T: Real>(p: &FilmParams<T>, y: T, z: T, h: T) -> Result<T> {
    if !(h > T::zero()) {
        return Err(Error::range("h", h.to_f64_lossy(), "step must be positive"));
    }
    check_y(y - h)
        .and_then(|_| check_y(y + h))
        .map_err(|_| Error::range("y", y.to_f64_lossy(), "stencil leaves [-1, 1]"))?;
    check_z(p, z - h)
        .and_then(|_| check_z(p, z + h))
        .map_err(|_| Error::range("z", z.to_f64_lossy(), "stencil leaves [0, rho]"))?;

    let x = |dy: T, dz: T| embed(p, y + dy, z + dz);
    let two = T::lit(2.0);
    let zero = T::zero();
    let center = x(zero, zero);

    let xy = x(h, zero).sub(x(-h, zero)).scale(T::one() / (two * h));
    let xz = x(zero, h).sub(x(zero, -h)).scale(T::one() / (two * h));
    let xyy = x(h, zero)
        .add(x(-h, zero))
        .sub(center.scale(two))
        .scale(T::one() / (h * h));
    let xzz = x(zero, h)
        .add(x(zero, -h))
        .sub(center.scale(two))
        .scale(T::one() / (h * h));
    let xyz = x(h, h)
        .sub(x(h, -h))
        .sub(x(-h, h))
        .add(x(-h, -h))
        .scale(T::one() / (T::lit(4.0) * h * h));

    let n = xy.cross(xz);
    let n_len = n.norm();
    if !(n_len > T::zero()) {
        return Err(Error::DegenerateInput(
            "parameterization is singular at this point".into(),
        ));
    }
    let n = n.scale(T::one() / n_len);

    let (e, f, g) = (xy.dot(xy), xy.dot(xz), xz.dot(xz));
    let (l, m, nn) = (xyy.dot(n), xyz.dot(n), xzz.dot(n));
    Ok((e * nn - two * f * m + g * l) / (two * (e * g - f * f)))
}
