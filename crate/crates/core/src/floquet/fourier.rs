use crate::error::{Error, Result};
use crate::linalg::matmul;
use crate::scalar::{cis, cr, CMatrix, Real, C};

use super::FloquetSolution;

/// Harmonics of the transition matrix elements
/// `<u_f(t)|V|u_i(t)> = sum_l V_fi^(l) exp(i l t)` for `|l| <= l_max`.
#[derive(Debug, Clone)]
pub struct FourierElements<T: Real> {
    l_max: usize,
    /// `harmonics[l + l_max][(f, i)] = V_fi^(l)`
    harmonics: Vec<CMatrix<T>>,
    /// Quasienergy representatives the harmonics are referred to.
    quasienergies: Vec<T>,
}

impl<T: Real> FourierElements<T> {
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn dim(&self) -> usize {
        self.quasienergies.len()
    }

    pub fn coefficient(&self, f: usize, i: usize, l: i64) -> C<T> {
        self.harmonics[(l + self.l_max as i64) as usize][(f, i)]
    }

    /// `w_fi^(l) = e_f - e_i + l`.
    pub fn frequency(&self, f: usize, i: usize, l: i64) -> T {
        self.quasienergies[f] - self.quasienergies[i] + T::lit(l as f64)
    }

    pub fn harmonic(&self, l: i64) -> &CMatrix<T> {
        &self.harmonics[(l + self.l_max as i64) as usize]
    }

    pub fn harmonics(&self) -> impl Iterator<Item = (i64, &CMatrix<T>)> {
        let l_max = self.l_max as i64;
        self.harmonics
            .iter()
            .enumerate()
            .map(move |(k, h)| (k as i64 - l_max, h))
    }
}

/// Discrete Fourier transform of the sampled matrix elements of `v`.
pub fn fourier_elements<T: Real>(
    sol: &FloquetSolution<T>,
    v: &CMatrix<T>,
    l_max: usize,
) -> Result<FourierElements<T>> {
    let n_t = sol.n_t();
    let needed = 2 * l_max + 2;
    if n_t < needed {
        return Err(Error::FourierCutoff { l_max, n_t, needed });
    }
    if v.nrows() != sol.dim() || v.ncols() != sol.dim() {
        return Err(Error::DimensionMismatch {
            expected: sol.dim(),
            found: v.nrows(),
        });
    }
    let elements: Vec<CMatrix<T>> = sol
        .samples
        .iter()
        .map(|u| matmul(&u.adjoint(), &matmul(v, u)))
        .collect();
    let scale = cr(T::one() / T::lit(n_t as f64));
    let harmonics = (-(l_max as i64)..=l_max as i64)
        .map(|l| {
            let mut acc = CMatrix::<T>::zeros(sol.dim(), sol.dim());
            for (k, m) in elements.iter().enumerate() {
                acc += m * cis(-T::lit(l as f64) * sol.time(k));
            }
            acc * scale
        })
        .collect();
    Ok(FourierElements {
        l_max,
        harmonics,
        quasienergies: sol.paired_quasienergies.clone(),
    })
}
