//! Bessel function `J0` and its zeros, where linearly driven spectra
//! collapse in the high-frequency limit.

use crate::scalar::Real;

/// Switch from the power series to the Hankel expansion.
const ASYMPTOTIC_FROM: f64 = 17.0;

/// Bessel function of the first kind of order zero.
pub fn bessel_j0<T: Real>(x: T) -> T {
    let x = x.abs();
    if x < T::lit(ASYMPTOTIC_FROM) {
        j0_series(x)
    } else {
        j0_asymptotic(x)
    }
}

fn j0_series<T: Real>(x: T) -> T {
    let q = -(x * x) / T::lit(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = 1.0;
    loop {
        term *= q / T::lit(k * k);
        sum += term;
        if term.abs() <= T::default_epsilon() * sum.abs().max(T::lit(1e-30)) * T::lit(0.01)
            && k > x.as_f64()
        {
            return sum;
        }
        k += 1.0;
    }
}

fn j0_asymptotic<T: Real>(x: T) -> T {
    // J0 = sqrt(2 / (pi x)) (P cos chi - Q sin chi),  chi = x - pi/4
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut k = 1;
    loop {
        let odd = T::lit((2 * k - 1) as f64);
        let next = term * odd * odd / (T::lit(k as f64) * T::lit(8.0) * x);
        if next >= term || next < T::default_epsilon() * T::lit(1e-3) {
            break;
        }
        term = next;
        let signed = if (k / 2 + k % 2) % 2 == 1 {
            -term
        } else {
            term
        };
        if k % 2 == 0 {
            p += signed;
        } else {
            q += signed;
        }
        k += 1;
    }
    let chi = x - T::frac_pi_4();
    (T::lit(2.0) / (T::pi() * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// First `k_max` positive zeros of `J0`, by scanning for sign changes and
/// bisecting each bracket.
pub fn bessel_j0_collapse_points<T: Real>(k_max: usize) -> Vec<T> {
    let step = T::lit(0.5);
    let mut zeros = Vec::with_capacity(k_max);
    let mut lo = T::lit(0.5);
    let mut f_lo = bessel_j0(lo);
    while zeros.len() < k_max {
        let hi = lo + step;
        let f_hi = bessel_j0(hi);
        if f_lo * f_hi <= T::zero() {
            zeros.push(bisect(lo, hi, f_lo));
        }
        lo = hi;
        f_lo = f_hi;
    }
    zeros
}

fn bisect<T: Real>(mut lo: T, mut hi: T, mut f_lo: T) -> T {
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = bessel_j0(mid);
        if f_mid == T::zero() {
            return mid;
        }
        if (f_mid > T::zero()) == (f_lo > T::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / T::lit(2.0)
}
