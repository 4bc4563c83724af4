use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{cr, CMatrix, Real};
use crate::spin::SpinSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// `F (Sx cos t + Sy sin t)`
    RightCircular,
    /// `F (Sx cos t - Sy sin t)`
    LeftCircular,
    /// `F Sx cos t`
    Linear,
}

impl Polarization {
    pub fn is_circular(self) -> bool {
        !matches!(self, Polarization::Linear)
    }

    pub fn name(self) -> &'static str {
        match self {
            Polarization::RightCircular => "right",
            Polarization::LeftCircular => "left",
            Polarization::Linear => "linear",
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "right" | "right-circular" => Ok(Polarization::RightCircular),
            "left" | "left-circular" => Ok(Polarization::LeftCircular),
            "linear" => Ok(Polarization::Linear),
            other => Err(Error::InvalidParameter(format!(
                "unknown polarization '{other}'"
            ))),
        }
    }
}

/// Drive and static field in units of the drive frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig<T: Real> {
    pub polarization: Polarization,
    pub f_over_omega: T,
    pub omega0_over_omega: T,
}

impl<T: Real> DriveConfig<T> {
    pub fn new(polarization: Polarization, f_over_omega: T, omega0_over_omega: T) -> Result<Self> {
        if !(f_over_omega >= T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "drive amplitude must be nonnegative, got {f_over_omega}"
            )));
        }
        Ok(Self {
            polarization,
            f_over_omega,
            omega0_over_omega,
        })
    }

    pub fn with_amplitude(&self, f_over_omega: T) -> Result<Self> {
        Self::new(self.polarization, f_over_omega, self.omega0_over_omega)
    }

    /// Coefficients `(bx, by, bz)` of `H(t) = bx Sx + by Sy + bz Sz`.
    pub fn field(&self, t: T) -> [T; 3] {
        let f = self.f_over_omega;
        let (fx, fy) = match self.polarization {
            Polarization::RightCircular => (f * t.cos(), f * t.sin()),
            Polarization::LeftCircular => (f * t.cos(), -f * t.sin()),
            Polarization::Linear => (f * t.cos(), T::zero()),
        };
        [fx, fy, self.omega0_over_omega]
    }

    /// `H(t) = w0 Sz + H_osc(t)` with `hbar = omega = 1`.
    pub fn hamiltonian(&self, spin: &SpinSystem<T>, t: T) -> CMatrix<T> {
        let [bx, by, bz] = self.field(t);
        &spin.sx * cr(bx) + &spin.sy * cr(by) + &spin.sz * cr(bz)
    }

    /// Detuning of the static field in the frame co-rotating with a
    /// circular drive: `w0 - 1` (right) or `w0 + 1` (left).
    pub(crate) fn rotating_detuning(&self) -> Result<T> {
        match self.polarization {
            Polarization::RightCircular => Ok(self.omega0_over_omega - T::one()),
            Polarization::LeftCircular => Ok(self.omega0_over_omega + T::one()),
            Polarization::Linear => Err(Error::LinearNotAnalytic),
        }
    }
}

/// Rabi frequency `sqrt((w0 -+ 1)^2 + F^2)` of a circular drive.
///
/// Left-circular driving with `w0` is equivalent to right-circular driving
/// with `-w0`, hence the `+` sign.
pub fn rabi_frequency<T: Real>(drive: &DriveConfig<T>) -> Result<T> {
    let a = drive.rotating_detuning()?;
    Ok((a * a + drive.f_over_omega * drive.f_over_omega).sqrt())
}
