//! One parameter point through the whole chain: Floquet states, rates,
//! steady state, magnetization.

use std::fmt;
use std::str::FromStr;

use crate::bath::{rate_matrix, BathSpec, RateMatrix};
use crate::error::{Error, Result};
use crate::floquet::{
    fourier_elements, solve_circular_analytic, solve_numeric_with_tiebreak, DriveConfig,
    FloquetSolution,
};
use crate::observables::{magnetization_record, MagnetizationRecord};
use crate::scalar::{circular_distance, CMatrix, Real};
use crate::spin::SpinSystem;
use crate::steady_state::{solve_steady_state, OccupationDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Analytic,
    Numeric,
    /// Analytic solution, cross-checked against the numeric one.
    AnalyticWithNumericCheck,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Analytic => "analytic",
            SolverKind::Numeric => "numeric",
            SolverKind::AnalyticWithNumericCheck => "checked",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "analytic" => Ok(SolverKind::Analytic),
            "numeric" => Ok(SolverKind::Numeric),
            "checked" | "analytic-with-numeric-check" => Ok(SolverKind::AnalyticWithNumericCheck),
            other => Err(Error::InvalidParameter(format!("unknown solver '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub kind: SolverKind,
    pub n_t: usize,
    pub n_steps: usize,
}

impl SolverSettings {
    pub const DEFAULT_N_T: usize = 128;
    pub const DEFAULT_N_STEPS: usize = 4096;
    /// Quasienergy agreement required by the cross-checking solver.
    pub const CHECK_TOLERANCE: f64 = 1e-7;

    pub fn new(kind: SolverKind) -> Self {
        Self {
            kind,
            n_t: Self::DEFAULT_N_T,
            n_steps: Self::DEFAULT_N_STEPS,
        }
    }
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self::new(SolverKind::Analytic)
    }
}

/// Floquet solution with the requested solver. `tiebreak` fixes the basis of
/// degenerate eigenspaces on the numeric route.
pub fn solve_floquet<T: Real>(
    spin: &SpinSystem<T>,
    drive: &DriveConfig<T>,
    settings: &SolverSettings,
    tiebreak: &CMatrix<T>,
) -> Result<FloquetSolution<T>> {
    match settings.kind {
        SolverKind::Analytic => solve_circular_analytic(spin, drive, settings.n_t),
        SolverKind::Numeric => {
            solve_numeric_with_tiebreak(spin, drive, settings.n_t, settings.n_steps, tiebreak)
        }
        SolverKind::AnalyticWithNumericCheck => {
            let ana = solve_circular_analytic(spin, drive, settings.n_t)?;
            let num =
                solve_numeric_with_tiebreak(spin, drive, settings.n_t, settings.n_steps, tiebreak)?;
            let gap = spectrum_distance(&ana.quasienergies, &num.quasienergies);
            if gap > T::lit(SolverSettings::CHECK_TOLERANCE) {
                return Err(Error::SolverMismatch(format!(
                    "F = {}: quasienergies differ by {:e}",
                    drive.f_over_omega,
                    gap.as_f64()
                )));
            }
            Ok(ana)
        }
    }
}

/// Largest distance between two quasienergy sets after sorting each on the
/// circle; zero iff they coincide as multisets modulo 1.
pub fn spectrum_distance<T: Real>(a: &[T], b: &[T]) -> T {
    let sort = |v: &[T]| {
        let mut v: Vec<T> = v.iter().map(|&x| crate::scalar::fold(x)).collect();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        v
    };
    let a = sort(a);
    let b = sort(b);
    if a.len() != b.len() {
        return T::max_value().unwrap();
    }
    // allow for a cyclic shift where values straddle the zone boundary
    let n = a.len();
    (0..n)
        .map(|shift| {
            (0..n)
                .map(|k| circular_distance(a[k], b[(k + shift) % n]))
                .fold(T::zero(), |p, q| p.max(q))
        })
        .fold(T::max_value().unwrap(), |p, q| p.min(q))
}

#[derive(Debug, Clone)]
pub struct PointOutcome<T: Real> {
    pub rates: RateMatrix<T>,
    pub occupations: OccupationDistribution<T>,
    pub record: MagnetizationRecord<T>,
}

/// Rates, steady state and magnetization for an already solved point.
pub fn evaluate_point<T: Real>(
    spin: &SpinSystem<T>,
    drive: &DriveConfig<T>,
    solution: &FloquetSolution<T>,
    bath: &BathSpec<T>,
) -> Result<PointOutcome<T>> {
    let v = spin.coupling_operator(bath.gamma)?;
    let fe = fourier_elements(solution, &v, bath.l_max)?;
    let rates = rate_matrix(&fe, bath)?;
    let occupations = solve_steady_state(&rates)?;
    let record = magnetization_record(
        solution,
        spin,
        &occupations,
        drive.omega0_over_omega,
        bath.beta_hbar_omega,
    )?;
    Ok(PointOutcome {
        rates,
        occupations,
        record,
    })
}

/// Solve and evaluate in one call.
pub fn quasithermal_point<T: Real>(
    spin: &SpinSystem<T>,
    drive: &DriveConfig<T>,
    settings: &SolverSettings,
    bath: &BathSpec<T>,
) -> Result<PointOutcome<T>> {
    let v = spin.coupling_operator(bath.gamma)?;
    let sol = solve_floquet(spin, drive, settings, &v)?;
    evaluate_point(spin, drive, &sol, bath)
}
