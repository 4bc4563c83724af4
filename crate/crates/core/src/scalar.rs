//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::{Complex, ComplexField, DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point type the solvers are generic over (`f32` or `f64`).
///
/// Tolerances are written as `f64` literals and converted with [`Real::lit`];
/// [`Real::tol`] additionally floors a tolerance at a few hundred ulps so
/// that single-precision instantiations remain meaningful.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    fn tol(x: f64) -> Self {
        let floor = Self::default_epsilon() * Self::lit(256.0);
        let t = Self::lit(x);
        if t > floor {
            t
        } else {
            floor
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;
pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// `exp(i * phase)`.
pub(crate) fn cis<T: Real>(phase: T) -> C<T> {
    Complex::new(phase.cos(), phase.sin())
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).modulus())
        .fold(T::zero(), |m, v| if v > m { v } else { m })
}

/// Fold a quasienergy (units of the photon energy) into `[-1/2, 1/2)`.
pub fn fold<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    let mut y = x - (x + half).floor();
    // rounding can land exactly on +1/2
    if y >= half {
        y -= T::one();
    }
    if y < -half {
        y += T::one();
    }
    y
}

/// Distance between two points on the unit circle `R / Z`.
pub fn circular_distance<T: Real>(a: T, b: T) -> T {
    let d = (a - b).abs();
    let d = d - d.floor();
    if d > T::lit(0.5) {
        T::one() - d
    } else {
        d
    }
}
