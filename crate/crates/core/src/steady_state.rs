//! Stationary solution of the Pauli master equation
//! `sum_m (G_nm p_m - G_mn p_n) = 0`, and the Boltzmann reference.

use nalgebra::{DMatrix, DVector};

use crate::bath::RateMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spin::SpinSystem;

const CONDITION_LIMIT: f64 = 1e12;
const CLAMP: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct OccupationDistribution<T: Real> {
    pub p: Vec<T>,
    /// Max norm of the master-equation left-hand side at `p`.
    pub residual: T,
}

impl<T: Real> OccupationDistribution<T> {
    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn uniform(dim: usize) -> Self {
        Self {
            p: vec![T::one() / T::lit(dim as f64); dim],
            residual: T::zero(),
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            p: perm.iter().map(|&k| self.p[k]).collect(),
            residual: self.residual,
        }
    }
}

/// Generator `L` with `L_nm = G_nm` off the diagonal and columns summing to 0.
pub fn generator<T: Real>(rates: &RateMatrix<T>) -> DMatrix<T> {
    let n = rates.dim();
    let mut l = rates.rates.clone();
    l.fill_diagonal(T::zero());
    for m in 0..n {
        let out: T = (0..n).map(|k| l[(k, m)]).fold(T::zero(), |a, b| a + b);
        l[(m, m)] = -out;
    }
    l
}

/// Solve `L p = 0`, `sum p = 1`.
///
/// The last equation is replaced by the normalization and the resulting
/// system solved by LU. If that system is ill-conditioned the null vector is
/// taken from the singular value decomposition of `L` instead, which also
/// detects a null space of dimension above one.
pub fn solve_steady_state<T: Real>(rates: &RateMatrix<T>) -> Result<OccupationDistribution<T>> {
    let n = rates.dim();
    if n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let scale = rates.max_rate();
    if scale == T::zero() {
        return Err(Error::DisconnectedRates);
    }
    let l = generator(rates) / scale;

    let mut a = l.clone();
    a.row_mut(n - 1).fill(T::one());
    let mut rhs = DVector::<T>::zeros(n);
    rhs[n - 1] = T::one();

    let sv = a.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let well_posed = smin > T::zero() && smax / smin < T::lit(CONDITION_LIMIT);
    let raw = match (well_posed, a.lu().solve(&rhs)) {
        (true, Some(p)) => p,
        _ => null_vector(&l)?,
    };

    let p = clamp_and_normalize(raw)?;
    let residual = (generator(rates) * DVector::from_vec(p.clone()))
        .iter()
        .fold(T::zero(), |a, b| a.max(b.abs()));
    Ok(OccupationDistribution { p, residual })
}

fn null_vector<T: Real>(l: &DMatrix<T>) -> Result<DVector<T>> {
    let n = l.nrows();
    let svd = l.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[a]
            .partial_cmp(&svd.singular_values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let smax = svd.singular_values[order[n - 1]];
    if n > 1 {
        let second = svd.singular_values[order[1]];
        if second <= smax * T::lit(1.0 / CONDITION_LIMIT) {
            return Err(Error::DegenerateSteadyState(format!(
                "two smallest singular values {:e}, {:e} (largest {:e})",
                svd.singular_values[order[0]].as_f64(),
                second.as_f64(),
                smax.as_f64()
            )));
        }
    }
    let v = v_t.row(order[0]).transpose();
    let sum: T = v.iter().fold(T::zero(), |a, &b| a + b);
    if sum == T::zero() {
        return Err(Error::DegenerateSteadyState(
            "null vector sums to zero".into(),
        ));
    }
    Ok(v / sum)
}

fn clamp_and_normalize<T: Real>(raw: DVector<T>) -> Result<Vec<T>> {
    let mut p: Vec<T> = raw.iter().copied().collect();
    let worst = p.iter().fold(T::zero(), |a, &b| a.min(b));
    if worst < -T::tol(CLAMP) || p.iter().any(|x| !x.is_finite()) {
        return Err(Error::NegativeProbability(worst.as_f64()));
    }
    for x in p.iter_mut() {
        if *x < T::zero() {
            *x = T::zero();
        }
    }
    let sum: T = p.iter().fold(T::zero(), |a, &b| a + b);
    for x in p.iter_mut() {
        *x /= sum;
    }
    Ok(p)
}

/// `p_m = exp(-beta w0 m) / Z` over the undriven levels, basis order.
pub fn boltzmann_reference<T: Real>(
    spin: &SpinSystem<T>,
    omega0: T,
    beta: T,
) -> OccupationDistribution<T> {
    let exponents: Vec<T> = spin
        .m_values()
        .into_iter()
        .map(|m| -beta * omega0 * m)
        .collect();
    let top = exponents
        .iter()
        .fold(T::min_value().unwrap(), |a, &b| a.max(b));
    let weights: Vec<T> = exponents.iter().map(|&e| (e - top).exp()).collect();
    let z: T = weights.iter().fold(T::zero(), |a, &b| a + b);
    OccupationDistribution {
        p: weights.into_iter().map(|w| w / z).collect(),
        residual: T::zero(),
    }
}

/// `sum_m m p_m` for a distribution over the undriven levels.
pub fn mean_m<T: Real>(spin: &SpinSystem<T>, dist: &OccupationDistribution<T>) -> T {
    spin.m_values()
        .into_iter()
        .zip(&dist.p)
        .fold(T::zero(), |acc, (m, &p)| acc + m * p)
}
