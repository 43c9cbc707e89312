//! Symmetric banded matrices and their `L D L^T` factorization.
//!
//! Only the lower band is stored. Row `i` keeps columns `i - bw ..= i` in a
//! fixed-width slot, left-padded with zeros for the first rows, so inner
//! products inside the factorization run over contiguous slices.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SymBanded<T> {
    n: usize,
    bw: usize,
    data: Vec<T>,
}

impl<T: Real> SymBanded<T> {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![T::zero(); n * (bw + 1)],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r >= self.n || r - c > self.bw {
            None
        } else {
            Some(r * (self.bw + 1) + self.bw - (r - c))
        }
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.data[s])
    }

    /// Adds `v` to entries `(i, j)` and `(j, i)` (once when `i == j`).
    ///
    /// Panics if `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside bandwidth {}", self.bw));
        self.data[s] = self.data[s] + v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside bandwidth {}", self.bw));
        self.data[s] = v;
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![T::zero(); self.n];
        let w = self.bw + 1;
        for i in 0..self.n {
            let row = &self.data[i * w..(i + 1) * w];
            let c0 = i.saturating_sub(self.bw);
            let off = self.bw - (i - c0);
            let mut acc = T::zero();
            for (k, &a) in row[off..].iter().enumerate() {
                let j = c0 + k;
                acc = acc + a * x[j];
                if j != i {
                    y[j] = y[j] + a * x[i];
                }
            }
            y[i] = y[i] + acc;
        }
        y
    }

    /// `x^T M x`.
    pub fn quadratic_form(&self, x: &[T]) -> T {
        dot(x, &self.matvec(x))
    }

    /// `self - sigma * other`, with the wider of the two bandwidths.
    pub fn shifted(&self, sigma: T, other: &SymBanded<T>) -> SymBanded<T> {
        assert_eq!(self.n, other.n);
        let bw = self.bw.max(other.bw);
        let mut out = SymBanded::zeros(self.n, bw);
        for i in 0..self.n {
            for j in i.saturating_sub(bw)..=i {
                let v = self.get(i, j) - sigma * other.get(i, j);
                if v != T::zero() {
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Number of structurally nonzero entries in the full symmetric matrix.
    pub fn nonzero_count(&self) -> usize {
        let mut count = 0;
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                if self.get(i, j) != T::zero() {
                    count += if i == j { 1 } else { 2 };
                }
            }
        }
        count
    }

    pub fn frobenius_norm(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                let v = self.get(i, j);
                s = s + if i == j { v * v } else { T::lit(2.0) * v * v };
            }
        }
        s.sqrt()
    }

    /// Unpivoted `L D L^T` factorization.
    ///
    /// Works for indefinite matrices as long as no pivot vanishes exactly;
    /// a pivot that underflows the relative threshold is replaced by a tiny
    /// value of the same sign so that inertia counts stay usable.
    pub fn ldl(&self) -> LdlFactor<T> {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        let mut l = vec![T::zero(); n * w];
        let mut d = vec![T::zero(); n];
        let tiny = T::epsilon() * T::epsilon() * self.frobenius_norm().max(T::min_positive_value());
        let mut u = vec![T::zero(); w];

        for i in 0..n {
            let c0 = i.saturating_sub(bw);
            // u[k - c0] = L[i,k] * d[k]
            for j in c0..i {
                let jc0 = j.saturating_sub(bw);
                let k0 = c0.max(jc0);
                let mut acc = self.data[i * w + bw - (i - j)];
                let lj = &l[j * w..(j + 1) * w];
                for k in k0..j {
                    acc = acc - u[k - c0] * lj[bw - (j - k)];
                }
                let lij = acc / d[j];
                l[i * w + bw - (i - j)] = lij;
                u[j - c0] = lij * d[j];
            }
            let mut di = self.data[i * w + bw];
            for j in c0..i {
                di = di - u[j - c0] * l[i * w + bw - (i - j)];
            }
            if di.abs() < tiny {
                di = if di < T::zero() { -tiny } else { tiny };
            }
            d[i] = di;
        }
        LdlFactor { n, bw, l, d }
    }
}

/// Unit lower banded factor `L` and diagonal `D` with `M = L D L^T`.
#[derive(Debug, Clone)]
pub struct LdlFactor<T> {
    n: usize,
    bw: usize,
    l: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> LdlFactor<T> {
    /// Count of negative pivots, which by Sylvester's law of inertia equals
    /// the number of negative eigenvalues of the factored matrix.
    pub fn negative_count(&self) -> usize {
        self.d.iter().filter(|&&x| x < T::zero()).count()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.d.iter().all(|&x| x > T::zero())
    }

    pub fn pivots(&self) -> &[T] {
        &self.d
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n);
        let w = self.bw + 1;
        let mut x = b.to_vec();
        for i in 0..self.n {
            let c0 = i.saturating_sub(self.bw);
            let row = &self.l[i * w..(i + 1) * w];
            let mut acc = x[i];
            for j in c0..i {
                acc = acc - row[self.bw - (i - j)] * x[j];
            }
            x[i] = acc;
        }
        for (xi, &di) in x.iter_mut().zip(&self.d) {
            *xi = *xi / di;
        }
        for i in (0..self.n).rev() {
            let c0 = i.saturating_sub(self.bw);
            let row = &self.l[i * w..(i + 1) * w];
            let xi = x[i];
            for j in c0..i {
                x[j] = x[j] - row[self.bw - (i - j)] * xi;
            }
        }
        x
    }
}

/// Factorizes and fails unless the matrix is positive definite.
pub fn cholesky_check<T: Real>(m: &SymBanded<T>) -> Result<LdlFactor<T>> {
    let f = m.ldl();
    if f.is_positive_definite() {
        Ok(f)
    } else {
        Err(Error::InternalConsistency(format!(
            "matrix of order {} is not positive definite ({} negative pivots)",
            m.dim(),
            f.negative_count()
        )))
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}
