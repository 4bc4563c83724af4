//! One-cycle averages over Floquet states and the quasithermal
//! magnetization `<<m>> = sum_m <<u_m|Sz|u_m>> p_m`.

use crate::error::{Error, Result};
use crate::floquet::FloquetSolution;
use crate::scalar::Real;
use crate::spin::SpinSystem;
use crate::steady_state::{boltzmann_reference, mean_m, OccupationDistribution};

#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationRecord<T: Real> {
    pub time_averaged_sz: Vec<T>,
    pub quasithermal_m: T,
    pub equilibrium_m: T,
}

/// `<<u_m|Sz|u_m>>` for every state: the mean over the uniform time grid,
/// exact for trigonometric polynomials resolved by the grid.
pub fn cycle_averaged_sz<T: Real>(sol: &FloquetSolution<T>, spin: &SpinSystem<T>) -> Vec<T> {
    let n = T::lit(sol.n_t() as f64);
    (0..sol.dim())
        .map(|m| {
            sol.samples.iter().fold(T::zero(), |acc, s| {
                let u = s.column(m);
                acc + u.dotc(&(&spin.sz * u)).re
            }) / n
        })
        .collect()
}

pub fn quasithermal_magnetization<T: Real>(
    sol: &FloquetSolution<T>,
    spin: &SpinSystem<T>,
    occupations: &OccupationDistribution<T>,
) -> Result<T> {
    weighted_sz(&cycle_averaged_sz(sol, spin), occupations)
}

pub fn weighted_sz<T: Real>(sz_avg: &[T], occupations: &OccupationDistribution<T>) -> Result<T> {
    if sz_avg.len() != occupations.dim() {
        return Err(Error::DimensionMismatch {
            expected: sz_avg.len(),
            found: occupations.dim(),
        });
    }
    Ok(sz_avg
        .iter()
        .zip(&occupations.p)
        .fold(T::zero(), |acc, (&s, &p)| acc + s * p))
}

/// Full record, with the undriven thermal value at the same temperature.
pub fn magnetization_record<T: Real>(
    sol: &FloquetSolution<T>,
    spin: &SpinSystem<T>,
    occupations: &OccupationDistribution<T>,
    omega0: T,
    beta: T,
) -> Result<MagnetizationRecord<T>> {
    let time_averaged_sz = cycle_averaged_sz(sol, spin);
    let quasithermal_m = weighted_sz(&time_averaged_sz, occupations)?;
    let equilibrium_m = mean_m(spin, &boltzmann_reference(spin, omega0, beta));
    Ok(MagnetizationRecord {
        time_averaged_sz,
        quasithermal_m,
        equilibrium_m,
    })
}
