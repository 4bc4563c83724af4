//! Angular-momentum matrices for a single spin `J`.
//!
//! States are ordered by descending magnetic quantum number, so row/column 0
//! is `m = J` and the last one is `m = -J`. `J` is carried as the integer
//! `2J` so half-integer spins are exact.

use crate::error::{Error, Result};
use crate::linalg::{eigh, matmul};
use crate::scalar::{c, cis, cr, CMatrix, Real, C};

#[derive(Debug, Clone)]
pub struct SpinSystem<T: Real> {
    two_j: u32,
    pub sx: CMatrix<T>,
    pub sy: CMatrix<T>,
    pub sz: CMatrix<T>,
    sy_eigvals: Vec<T>,
    sy_eigvecs: CMatrix<T>,
}

impl<T: Real> SpinSystem<T> {
    pub fn new(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::TrivialSpin);
        }
        let dim = two_j as usize + 1;
        let j = T::lit(two_j as f64 / 2.0);
        let m_of = |k: usize| j - T::lit(k as f64);

        let mut sz = CMatrix::<T>::zeros(dim, dim);
        let mut raise = CMatrix::<T>::zeros(dim, dim);
        for k in 0..dim {
            sz[(k, k)] = cr(m_of(k));
        }
        // <m+1| S+ |m> sits at row k-1, column k
        for k in 1..dim {
            let m = m_of(k);
            raise[(k - 1, k)] = cr((j * (j + T::one()) - m * (m + T::one())).sqrt());
        }
        let lower = raise.adjoint();
        let half = cr(T::lit(0.5));
        let sx = (&raise + &lower) * half;
        let sy = (&raise - &lower) * c(T::zero(), T::lit(-0.5));
        let (sy_eigvals, sy_eigvecs) = eigh(&sy);
        Ok(Self {
            two_j,
            sx,
            sy,
            sz,
            sy_eigvals,
            sy_eigvecs,
        })
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn j(&self) -> T {
        T::lit(self.two_j as f64 / 2.0)
    }

    pub fn is_half_integer(&self) -> bool {
        self.two_j % 2 == 1
    }

    /// `1/2` for half-integer `J`, else `0`.
    pub fn half_offset(&self) -> T {
        if self.is_half_integer() {
            T::lit(0.5)
        } else {
            T::zero()
        }
    }

    /// Magnetic quantum numbers in basis order, `J, J-1, ..., -J`.
    pub fn m_values(&self) -> Vec<T> {
        (0..self.dim())
            .map(|k| self.j() - T::lit(k as f64))
            .collect()
    }

    pub fn identity(&self) -> CMatrix<T> {
        CMatrix::identity(self.dim(), self.dim())
    }

    /// System operator `gx Sx + gy Sy + gz Sz` that couples to the bath.
    pub fn coupling_operator(&self, gamma: [T; 3]) -> Result<CMatrix<T>> {
        if gamma.iter().all(|g| *g == T::zero()) {
            return Err(Error::ZeroCoupling);
        }
        Ok(&self.sx * cr(gamma[0]) + &self.sy * cr(gamma[1]) + &self.sz * cr(gamma[2]))
    }

    /// `exp(-i theta Sy)`, a rotation by `theta` about the y axis.
    pub fn rotation_y(&self, theta: T) -> CMatrix<T> {
        let q = &self.sy_eigvecs;
        let mut scaled = q.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= cis(-theta * self.sy_eigvals[k]);
        }
        matmul(&scaled, &q.adjoint())
    }

    /// `exp(-i tau n.S)` via Euler angles: the axis `n` is obtained from
    /// `z` by a rotation `theta` about `y` followed by `phi` about `z`.
    pub fn rotation(&self, n: [T; 3], tau: T) -> CMatrix<T> {
        let [nx, ny, nz] = n;
        let r = (nx * nx + ny * ny + nz * nz).sqrt();
        if r == T::zero() {
            return self.identity();
        }
        let theta = (nx * nx + ny * ny).sqrt().atan2(nz);
        let phi = ny.atan2(nx);
        let ry = self.rotation_y(theta);
        let spin_z = self.phase_z(tau * r, T::zero());
        let mut left = ry.clone();
        for (k, mut col) in left.column_iter_mut().enumerate() {
            col *= spin_z[k];
        }
        let mut out = matmul(&left, &ry.adjoint());
        let turn = self.phase_z(phi, T::zero());
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                out[(a, b)] *= turn[a] * turn[b].conj();
            }
        }
        out
    }

    /// `exp(-i phi (Sz - shift))`, diagonal in this basis.
    pub fn phase_z(&self, phi: T, shift: T) -> Vec<C<T>> {
        self.m_values()
            .into_iter()
            .map(|m| cis(-phi * (m - shift)))
            .collect()
    }
}
