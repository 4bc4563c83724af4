//! Golden-rule transition rates between Floquet states induced by a bath of
//! thermally occupied oscillators.
//!
//! The partial rate for harmonic `l` is
//! `2 pi |V_fi^(l)|^2 N(w_fi^(l)) rho(|w_fi^(l)|)` and the total rate sums
//! the partial ones. The overall scale (`rho0`, `|gamma|`) drops out of the
//! steady state, so `rho0 = 1`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::floquet::FourierElements;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralDensity<T: Real> {
    Constant,
    /// `(w / omega)^2`
    Quadratic,
    /// `exp(-(w - w_c)^2 / 2)`
    Gaussian {
        omega_c_over_omega: T,
    },
}

impl<T: Real> SpectralDensity<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            SpectralDensity::Constant => "constant",
            SpectralDensity::Quadratic => "quadratic",
            SpectralDensity::Gaussian { .. } => "gaussian",
        }
    }

    /// Parse a density name; `omega_c` is used for the Gaussian.
    pub fn parse(name: &str, omega_c: T) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "constant" => Ok(SpectralDensity::Constant),
            "quadratic" => Ok(SpectralDensity::Quadratic),
            "gaussian" => Ok(SpectralDensity::Gaussian {
                omega_c_over_omega: omega_c,
            }),
            other => Err(Error::InvalidParameter(format!(
                "unknown density '{other}'"
            ))),
        }
    }
}

impl<T: Real> fmt::Display for SpectralDensity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralDensity::Gaussian { omega_c_over_omega } => {
                write!(f, "gaussian(omega_c={omega_c_over_omega})")
            }
            other => f.write_str(other.kind()),
        }
    }
}

impl FromStr for SpectralDensity<f64> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, 5.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec<T: Real> {
    pub density: SpectralDensity<T>,
    /// Inverse temperature in units of the photon energy.
    pub beta_hbar_omega: T,
    /// Coefficients of `Sx, Sy, Sz` in the coupling operator.
    pub gamma: [T; 3],
    pub l_max: usize,
    /// Transition frequencies below this are resonant and skipped.
    pub freq_tolerance: T,
}

impl<T: Real> BathSpec<T> {
    pub const DEFAULT_L_MAX: usize = 32;
    pub const DEFAULT_FREQ_TOLERANCE: f64 = 1e-9;

    pub fn new(density: SpectralDensity<T>, beta_hbar_omega: T, gamma: [T; 3]) -> Result<Self> {
        let spec = Self {
            density,
            beta_hbar_omega,
            gamma,
            l_max: Self::DEFAULT_L_MAX,
            freq_tolerance: T::lit(Self::DEFAULT_FREQ_TOLERANCE),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_l_max(mut self, l_max: usize) -> Self {
        self.l_max = l_max;
        self
    }

    pub fn with_freq_tolerance(mut self, tol: T) -> Result<Self> {
        self.freq_tolerance = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta_hbar_omega > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "beta hbar omega must be positive, got {}",
                self.beta_hbar_omega
            )));
        }
        if !(self.freq_tolerance > T::zero() && self.freq_tolerance <= T::lit(1e-3)) {
            return Err(Error::InvalidParameter(format!(
                "frequency tolerance must lie in (0, 1e-3], got {}",
                self.freq_tolerance
            )));
        }
        if self.gamma.iter().all(|g| *g == T::zero()) {
            return Err(Error::ZeroCoupling);
        }
        Ok(())
    }

    pub fn kbt(&self) -> T {
        T::one() / self.beta_hbar_omega
    }
}

/// Spectral density at a nonnegative frequency.
pub fn spectral_density<T: Real>(bath: &BathSpec<T>, abs_freq: T) -> Result<T> {
    if abs_freq < T::zero() {
        return Err(Error::NegativeFrequency(abs_freq.as_f64()));
    }
    Ok(match bath.density {
        SpectralDensity::Constant => T::one(),
        SpectralDensity::Quadratic => abs_freq * abs_freq,
        SpectralDensity::Gaussian { omega_c_over_omega } => {
            let d = abs_freq - omega_c_over_omega;
            (-d * d / T::lit(2.0)).exp()
        }
    })
}

/// Bose factor for absorption (`freq > 0`) or emission (`freq < 0`).
pub fn occupation<T: Real>(bath: &BathSpec<T>, freq: T) -> Result<T> {
    if freq.abs() < bath.freq_tolerance {
        return Err(Error::ResonantFrequency(freq.as_f64()));
    }
    let n = T::one() / (bath.beta_hbar_omega * freq.abs()).exp_m1();
    Ok(if freq > T::zero() { n } else { T::one() + n })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RateDiagnostics {
    /// Harmonic terms dropped because their frequency was resonant.
    pub skipped_terms: usize,
    pub max_partial_rate: f64,
    /// Smallest and largest `l` whose partial rate is non-negligible.
    pub contributing_l: Option<(i64, i64)>,
}

/// Total rates `rates[(f, i)]` for the transition `i -> f`; zero diagonal.
#[derive(Debug, Clone)]
pub struct RateMatrix<T: Real> {
    pub rates: DMatrix<T>,
    /// `partial[l + l_max]` holds the partial rates for harmonic `l`.
    pub partial: Vec<DMatrix<T>>,
    pub diagnostics: RateDiagnostics,
}

impl<T: Real> RateMatrix<T> {
    pub fn dim(&self) -> usize {
        self.rates.nrows()
    }

    /// Partial rates for harmonic `l`, if it was summed.
    pub fn partial_for(&self, l: i64) -> Option<&DMatrix<T>> {
        let l_max = (self.partial.len() / 2) as i64;
        if l.abs() > l_max {
            return None;
        }
        self.partial.get((l + l_max) as usize)
    }

    pub fn max_rate(&self) -> T {
        self.rates
            .iter()
            .fold(T::zero(), |a, &b| if b > a { b } else { a })
    }

    /// Build directly from a matrix of total rates (diagonal ignored).
    pub fn from_rates(mut rates: DMatrix<T>) -> Result<Self> {
        if rates.nrows() != rates.ncols() {
            return Err(Error::DimensionMismatch {
                expected: rates.nrows(),
                found: rates.ncols(),
            });
        }
        if rates.iter().any(|r| !(*r >= T::zero())) {
            return Err(Error::InvalidParameter("rates must be nonnegative".into()));
        }
        rates.fill_diagonal(T::zero());
        let max = rates
            .iter()
            .fold(T::zero(), |a, &b| if b > a { b } else { a });
        Ok(Self {
            rates,
            partial: Vec::new(),
            diagnostics: RateDiagnostics {
                max_partial_rate: max.as_f64(),
                ..Default::default()
            },
        })
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            rates: &self.rates * c,
            partial: self.partial.iter().map(|p| p * c).collect(),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// Sum the golden-rule partial rates over `|l| <= bath.l_max`.
pub fn rate_matrix<T: Real>(fe: &FourierElements<T>, bath: &BathSpec<T>) -> Result<RateMatrix<T>> {
    bath.validate()?;
    let dim = fe.dim();
    let l_max = bath.l_max.min(fe.l_max()) as i64;
    let mut rates = DMatrix::<T>::zeros(dim, dim);
    let mut partial = Vec::with_capacity(2 * l_max as usize + 1);
    let mut skipped = 0;
    let prefactor = T::two_pi();
    // coefficients at round-off level are treated as exact zeros
    let largest = (-l_max..=l_max)
        .flat_map(|l| fe.harmonic(l).iter())
        .fold(T::zero(), |a, z| a.max(z.norm_sqr()));
    let floor = largest * T::tol(1e-12) * T::tol(1e-12);
    for l in -l_max..=l_max {
        let mut p = DMatrix::<T>::zeros(dim, dim);
        for f in 0..dim {
            for i in 0..dim {
                if f == i {
                    continue;
                }
                let strength = fe.coefficient(f, i, l).norm_sqr();
                if strength <= floor {
                    continue;
                }
                let w = fe.frequency(f, i, l);
                let n = match occupation(bath, w) {
                    Ok(n) => n,
                    Err(Error::ResonantFrequency(_)) => {
                        skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                p[(f, i)] = prefactor * strength * n * spectral_density(bath, w.abs())?;
            }
        }
        rates += &p;
        partial.push(p);
    }

    let max_partial = partial
        .iter()
        .flat_map(|p| p.iter())
        .fold(T::zero(), |a, &b| if b > a { b } else { a });
    if rates.iter().all(|&r| r == T::zero()) {
        return Err(Error::DisconnectedRates);
    }
    let cut = max_partial * T::lit(1e-14);
    let active: Vec<i64> = partial
        .iter()
        .enumerate()
        .filter(|(_, p)| p.iter().any(|&r| r > cut))
        .map(|(k, _)| k as i64 - l_max)
        .collect();
    let diagnostics = RateDiagnostics {
        skipped_terms: skipped,
        max_partial_rate: max_partial.as_f64(),
        contributing_l: active.first().map(|&lo| (lo, *active.last().unwrap())),
    };
    Ok(RateMatrix {
        rates,
        partial,
        diagnostics,
    })
}
