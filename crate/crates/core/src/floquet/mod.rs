//! Floquet states of the driven spin.
//!
//! Two independent routes produce a [`FloquetSolution`]: the closed-form
//! rotating-frame solution for circular drives ([`solve_circular_analytic`])
//! and diagonalization of the numerically integrated one-period propagator
//! ([`solve_numeric`]), which handles any drive.

mod analytic;
mod bessel;
mod drive;
mod fourier;
mod numeric;

pub use analytic::solve_circular_analytic;
pub use bessel::{bessel_j0, bessel_j0_collapse_points};
pub use drive::{rabi_frequency, DriveConfig, Polarization};
pub use fourier::{fourier_elements, FourierElements};
pub use numeric::{
    propagate, solve_numeric, solve_numeric_converged, solve_numeric_with_tiebreak, Propagation,
};

use crate::error::{Error, Result};
use crate::linalg::unitarity_defect;
use crate::scalar::{circular_distance, CMatrix, CVector, Real};

/// Quasienergies and sampled Floquet functions at one parameter point.
///
/// All quasienergies are in units of the photon energy; time is in units of
/// the inverse drive frequency, so the period is `2 pi` and sample `k` sits
/// at `t_k = 2 pi k / n_t`.
#[derive(Debug, Clone)]
pub struct FloquetSolution<T: Real> {
    /// Folded into `[-1/2, 1/2)`.
    pub quasienergies: Vec<T>,
    /// Representatives on the branch that connects continuously to the
    /// undriven energies `w0 m`.
    pub canonical_quasienergies: Vec<T>,
    /// Representatives the stored Floquet functions are paired with:
    /// `psi_m(t) = u_m(t) exp(-i e_m t)` holds with these values. Each is
    /// congruent to the folded value modulo 1.
    pub paired_quasienergies: Vec<T>,
    /// `samples[k]` has `u_m(t_k)` as column `m`.
    pub samples: Vec<CMatrix<T>>,
}

impl<T: Real> FloquetSolution<T> {
    pub fn dim(&self) -> usize {
        self.quasienergies.len()
    }

    pub fn n_t(&self) -> usize {
        self.samples.len()
    }

    pub fn time(&self, k: usize) -> T {
        T::two_pi() * T::lit(k as f64) / T::lit(self.n_t() as f64)
    }

    /// `u_m(t_k)`.
    pub fn function(&self, m: usize, k: usize) -> CVector<T> {
        self.samples[k].column(m).into_owned()
    }

    /// Reorder states so that new state `i` is old state `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.dim())?;
        let pick = |v: &[T]| perm.iter().map(|&p| v[p]).collect::<Vec<_>>();
        let samples = self
            .samples
            .iter()
            .map(|s| s.select_columns(perm.iter()))
            .collect();
        Ok(Self {
            quasienergies: pick(&self.quasienergies),
            canonical_quasienergies: pick(&self.canonical_quasienergies),
            paired_quasienergies: pick(&self.paired_quasienergies),
            samples,
        })
    }

    /// Worst deviation from orthonormality over all time samples.
    pub fn orthonormality_defect(&self) -> T {
        self.samples
            .iter()
            .map(unitarity_defect)
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Largest circular distance between any two folded quasienergies.
    pub fn spread(&self) -> T {
        quasienergy_spread(&self.quasienergies)
    }
}

/// Largest pairwise distance of quasienergies on the circle `R / Z`.
pub fn quasienergy_spread<T: Real>(eps: &[T]) -> T {
    let mut worst = T::zero();
    for (a, &x) in eps.iter().enumerate() {
        for &y in &eps[a + 1..] {
            let d = circular_distance(x, y);
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Group quasienergies into clusters whose members lie within `tol` of a
/// neighbour on the circle. Returns the clusters as index lists.
pub fn degenerate_clusters<T: Real>(eps: &[T], tol: T) -> Vec<Vec<usize>> {
    let n = eps.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eps[a]
            .partial_cmp(&eps[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(last) if circular_distance(eps[*last.last().unwrap()], eps[i]) < tol => {
                last.push(i)
            }
            _ => clusters.push(vec![i]),
        }
    }
    // join across the zone boundary
    if clusters.len() > 1 {
        let first = clusters[0][0];
        let last = *clusters.last().unwrap().last().unwrap();
        if circular_distance(eps[first], eps[last]) < tol {
            let head = clusters.remove(0);
            clusters.last_mut().unwrap().extend(head);
        }
    }
    clusters
}

pub(crate) fn check_permutation(perm: &[usize], dim: usize) -> Result<()> {
    if perm.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; dim];
    for &p in perm {
        if p >= dim || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParameter(format!(
                "{perm:?} is not a permutation"
            )));
        }
    }
    Ok(())
}

pub(crate) fn check_grid(n_t: usize) -> Result<()> {
    if n_t < 4 {
        return Err(Error::InvalidGrid(format!("n_t = {n_t} < 4")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spread_on_circle() {
        assert!((quasienergy_spread(&[0.49f64, -0.49, 0.495]) - 0.02).abs() < 1e-12);
        assert_eq!(quasienergy_spread(&[0.1_f64]), 0.0);
        assert!((quasienergy_spread(&[0.0f64, 0.25, -0.25, 0.5]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn clusters_join_across_boundary() {
        let c = degenerate_clusters(&[-0.5, 0.1, 0.4999999999999, 0.1 + 1e-12], 1e-10);
        assert_eq!(c.len(), 2);
        let mut sizes: Vec<usize> = c.iter().map(|v| v.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 2]);
    }

    #[test]
    fn permutation_validation() {
        assert!(check_permutation(&[1, 0, 2], 3).is_ok());
        assert!(check_permutation(&[1, 1, 2], 3).is_err());
        assert!(check_permutation(&[0, 1], 3).is_err());
    }
}
