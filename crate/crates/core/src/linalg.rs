//! Small dense helpers on top of nalgebra for Hermitian and unitary matrices.

use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::ComplexField;

use crate::scalar::{cr, CMatrix, CVector, Real, C};

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in ascending
/// order and each eigenvector's phase fixed so its largest component is real
/// and positive.
pub fn eigh<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::<T>::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut v: CVector<T> = eig.eigenvectors.column(k).into_owned();
        fix_phase(&mut v);
        vectors.set_column(col, &v);
    }
    (values, vectors)
}

/// Rotate `v` so that its first largest-modulus component is real positive.
pub fn fix_phase<T: Real>(v: &mut CVector<T>) {
    let max = v
        .iter()
        .map(|z| z.modulus())
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    if max == T::zero() {
        return;
    }
    let cut = max * (T::one() - T::lit(1e-6));
    if let Some(z) = v.iter().find(|z| z.modulus() >= cut).copied() {
        let phase = z.conj() / cr(z.modulus());
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// `exp(-i * tau * h)` for Hermitian `h`: Taylor series of the argument
/// scaled to norm at most 1/2, followed by repeated squaring.
pub fn expm_hermitian<T: Real>(h: &CMatrix<T>, tau: T) -> CMatrix<T> {
    let n = h.nrows();
    let norm = h
        .column_iter()
        .map(|c| c.iter().fold(T::zero(), |a, z| a + z.modulus()))
        .fold(T::zero(), |a, b| a.max(b))
        * tau.abs();
    let mut squarings = 0;
    let mut scale = T::one();
    while norm * scale > T::lit(0.5) {
        scale /= T::lit(2.0);
        squarings += 1;
    }
    let a = h * C::new(T::zero(), -tau * scale);
    let mut term = CMatrix::<T>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=40 {
        term = (&term * &a) * cr(T::one() / T::lit(k as f64));
        sum += &term;
        let size = term.iter().fold(T::zero(), |m, z| m.max(z.modulus()));
        if size <= T::default_epsilon() * T::lit(1e-2) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `a * b` for square matrices; a plain column-major loop that beats the
/// generic product at the dimensions used here.
pub fn matmul<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let n = a.nrows();
    assert!(
        a.ncols() == n && b.nrows() == n,
        "matmul needs conforming square factors"
    );
    let m = b.ncols();
    let mut out = CMatrix::<T>::zeros(n, m);
    let (xa, xb) = (a.as_slice(), b.as_slice());
    let xo = out.as_mut_slice();
    for j in 0..m {
        let col = &mut xo[j * n..(j + 1) * n];
        for k in 0..n {
            let bkj = xb[k + j * n];
            let acol = &xa[k * n..(k + 1) * n];
            for (o, &x) in col.iter_mut().zip(acol) {
                *o += x * bkj;
            }
        }
    }
    out
}

pub fn hermitian_defect<T: Real>(m: &CMatrix<T>) -> T {
    crate::scalar::max_abs_diff(m, &m.adjoint())
}

/// Largest elementwise modulus of `U^dagger U - 1`.
pub fn unitarity_defect<T: Real>(u: &CMatrix<T>) -> T {
    let n = u.nrows();
    crate::scalar::max_abs_diff(&(u.adjoint() * u), &CMatrix::<T>::identity(n, n))
}

/// Eigenvalues and an orthonormal eigenbasis of a unitary matrix.
///
/// A unitary matrix is normal, so its complex Schur form is diagonal up to
/// round-off and the Schur vectors are eigenvectors. Degenerate eigenvalues
/// come back with an arbitrary orthonormal basis of the eigenspace.
pub fn unitary_eig<T: Real>(u: &CMatrix<T>) -> (Vec<C<T>>, CMatrix<T>) {
    let (q, t) = Schur::new(u.clone()).unpack();
    let values = (0..u.nrows()).map(|k| t[(k, k)]).collect();
    (values, q)
}

/// `<a|m|b>`.
pub fn sandwich<T: Real>(a: &CVector<T>, m: &CMatrix<T>, b: &CVector<T>) -> C<T> {
    a.dotc(&(m * b))
}

/// Principal argument in `(-pi, pi]`.
pub fn arg<T: Real>(z: C<T>) -> T {
    z.argument()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, cis};

    fn sample() -> CMatrix<f64> {
        CMatrix::from_row_slice(
            3,
            3,
            &[
                cr(1.0),
                c(0.3, -0.2),
                c(0.0, 0.5),
                c(0.3, 0.2),
                cr(-0.4),
                c(0.1, 0.0),
                c(0.0, -0.5),
                c(0.1, 0.0),
                cr(0.7),
            ],
        )
    }

    #[test]
    fn matmul_matches_generic_product() {
        let a = sample();
        let b = expm_hermitian(&sample(), 0.8);
        assert!(crate::scalar::max_abs_diff(&matmul(&a, &b), &(&a * &b)) < 1e-15);
        let v = CMatrix::<f64>::from_fn(3, 2, |i, j| c(i as f64, -(j as f64)));
        assert!(crate::scalar::max_abs_diff(&matmul(&a, &v), &(&a * &v)) < 1e-15);
    }

    #[test]
    fn eigh_reconstructs() {
        let m = sample();
        let (vals, vecs) = eigh(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = CMatrix::from_diagonal(&CVector::from_iterator(3, vals.iter().map(|&x| cr(x))));
        let back = &vecs * d * vecs.adjoint();
        assert!(crate::scalar::max_abs_diff(&back, &m) < 1e-12);
    }

    #[test]
    fn expm_matches_spectral_exponential() {
        let m = sample();
        let (vals, vecs) = eigh(&m);
        for tau in [0.37, -2.0, 55.0] {
            let u = expm_hermitian(&m, tau);
            assert!(unitarity_defect(&u) < 1e-12);
            let d = CMatrix::from_diagonal(&CVector::from_iterator(
                3,
                vals.iter().map(|&x| cis(-tau * x)),
            ));
            let oracle = &vecs * d * vecs.adjoint();
            assert!(crate::scalar::max_abs_diff(&u, &oracle) < 1e-12, "{tau}");
        }
    }

    #[test]
    fn unitary_eig_diagonalizes() {
        let u = expm_hermitian(&sample(), 2.1);
        let (vals, q) = unitary_eig(&u);
        for (k, lam) in vals.iter().enumerate() {
            assert!((lam.norm() - 1.0).abs() < 1e-12);
            let v = q.column(k).into_owned();
            let r = &u * &v - &v * *lam;
            assert!(r.norm() < 1e-12);
        }
    }
}
