//! Brute-force finite-difference discretization of the full two-dimensional
//! eigenproblem on the parameter rectangle `[-1, 1] x [0, rho]`:
//!
//! ```text
//! P c_yy + (theta^2 y / P) c_y + (rho^2 / P) c_zz + lambda W c = 0
//! c_y(+-1, z) -+ lambda (1 + theta^2/rho^2)^{-1} c(+-1, z) = 0
//! c(y, 0) = c(y, rho) = 0
//! ```
//!
//! The first two terms are `(P c_y)_y` expanded, so the y-direction is
//! differenced in flux form with `P` at cell faces, which keeps the pencil
//! symmetric after scaling every row by its control-volume area. Boundary
//! rows at `y = +-1` use half cells whose outer flux is the Robin term, so
//! the eigenvalue part of the boundary condition lands on the diagonal of
//! `B`. Dirichlet rows at `z = 0, rho` are eliminated.
//!
//! Nothing here shares code with the separated 1D solver except the banded
//! eigensolver.

use serde::Serialize;

use crate::banded::SymBanded;
use crate::error::{Error, Result};
use crate::geometry::{area_element, FilmParams};
use crate::gep::{smallest_eigenpair, GeneralizedEigenSystem, SolverConfig};
use crate::scalar::Real;

pub const DEFAULT_GRID: (usize, usize) = (81, 81);

/// Node values on the uniform `ny x nz` grid, `y` varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid2D<T> {
    pub ny: usize,
    pub nz: usize,
    pub dy: T,
    pub dz: T,
    pub values: Vec<T>,
}

impl<T: Real> Grid2D<T> {
    pub fn y(&self, i: usize) -> T {
        -T::one() + T::count(i) * self.dy
    }

    pub fn z(&self, j: usize) -> T {
        T::count(j) * self.dz
    }

    pub fn value(&self, i: usize, j: usize) -> T {
        self.values[j * self.ny + i]
    }

    /// Values along `z` at the `i`-th `y` node.
    pub fn z_profile(&self, i: usize) -> Vec<T> {
        (0..self.nz).map(|j| self.value(i, j)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Discretization2d<T> {
    pub params: FilmParams<T>,
    pub ny: usize,
    pub nz: usize,
    pub dy: T,
    pub dz: T,
    pub system: GeneralizedEigenSystem<T>,
}

impl<T: Real> Discretization2d<T> {
    /// Unknown index of node `(i, j)`; `None` on the Dirichlet rows.
    pub fn unknown(&self, i: usize, j: usize) -> Option<usize> {
        (j >= 1 && j + 1 < self.nz).then(|| (j - 1) * self.ny + i)
    }

    /// Control-volume area of node `(i, *)`.
    pub fn cell_area(&self, i: usize) -> T {
        let wy = if i == 0 || i + 1 == self.ny {
            self.dy * T::lit(0.5)
        } else {
            self.dy
        };
        wy * self.dz
    }

    pub fn y(&self, i: usize) -> T {
        -T::one() + T::count(i) * self.dy
    }

    pub fn z(&self, j: usize) -> T {
        T::count(j) * self.dz
    }
}

pub fn assemble2d<T: Real>(p: &FilmParams<T>, ny: usize, nz: usize) -> Result<Discretization2d<T>> {
    if ny < 4 {
        return Err(Error::range("ny", ny as f64, "need at least 4 nodes"));
    }
    if nz < 4 {
        return Err(Error::range("nz", nz as f64, "need at least 4 nodes"));
    }
    let (rho, theta) = (p.rho(), p.theta());
    let dy = T::lit(2.0) / T::count(ny - 1);
    let dz = rho / T::count(nz - 1);
    let n = ny * (nz - 2);
    let mut a = SymBanded::zeros(n, ny);
    let mut b = SymBanded::zeros(n, ny);

    let mut disc = Discretization2d {
        params: *p,
        ny,
        nz,
        dy,
        dz,
        system: GeneralizedEigenSystem {
            a: SymBanded::zeros(0, 0),
            b: SymBanded::zeros(0, 0),
        },
    };

    let y_at = |i: usize| -T::one() + T::count(i) * dy;
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let robin = rho * rho / area_element(p, T::one());

    for j in 1..nz - 1 {
        for i in 0..ny {
            let row = disc.unknown(i, j).expect("interior z row");
            let y = y_at(i);
            let s = area_element(p, y);
            let wy = disc.cell_area(i) / dz;

            // -(rho^2 / P) c_zz, scaled by wy * dz
            let zc = wy * rho * rho / s / dz;
            a.add(row, row, two * zc);
            if let Some(col) = disc.unknown(i, j - 1) {
                a.add(row, col, -zc);
            }

            // -(P c_y)_y in flux form; each face couples i and i + 1 once
            if i + 1 < ny {
                let face = area_element(p, y + dy * half);
                let yc = face * dz / dy;
                let col = disc.unknown(i + 1, j).expect("same z row");
                a.add(row, row, yc);
                a.add(col, col, yc);
                a.add(row, col, -yc);
            }

            let weight = two * rho * rho * theta * theta / (s * s * s);
            let mut bd = wy * dz * weight;
            if i == 0 || i + 1 == ny {
                bd = bd + robin * dz;
            }
            if bd != T::zero() {
                b.add(row, row, bd);
            }
        }
    }
    disc.system = GeneralizedEigenSystem { a, b };
    Ok(disc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSolution2d<T> {
    pub lambda: T,
    /// Eigenvector on the full grid including the zero Dirichlet rows.
    pub grid: Grid2D<T>,
    pub residual: T,
    pub iterations: usize,
}

pub fn smallest_eigenvalue_2d<T: Real>(
    sys: &Discretization2d<T>,
    cfg: &SolverConfig<T>,
) -> Result<EigenSolution2d<T>> {
    let pair = smallest_eigenpair(&sys.system, cfg)?;
    let mut values = vec![T::zero(); sys.ny * sys.nz];
    for j in 1..sys.nz - 1 {
        for i in 0..sys.ny {
            let u = sys.unknown(i, j).expect("interior");
            values[j * sys.ny + i] = pair.eigvec[u];
        }
    }
    Ok(EigenSolution2d {
        lambda: pair.lambda,
        grid: Grid2D {
            ny: sys.ny,
            nz: sys.nz,
            dy: sys.dy,
            dz: sys.dz,
            values,
        },
        residual: pair.residual,
        iterations: pair.iterations,
    })
}

/// Assemble and solve in one step.
pub fn lambda_2d<T: Real>(p: &FilmParams<T>, ny: usize, nz: usize) -> Result<EigenSolution2d<T>> {
    let sys = assemble2d(p, ny, nz)?;
    smallest_eigenvalue_2d(&sys, &SolverConfig::default())
}
