//! Floquet states from the one-period propagator.
//!
//! The propagator is composed from fourth-order commutator-free Magnus
//! steps: two exponentials per step of Hermitian combinations of `H` at the
//! Gauss-Legendre nodes. `H(t)` is linear in the spin operators, so every
//! factor is an exact spin rotation and the product stays unitary to
//! round-off for any step count.

use log::debug;

use crate::error::{Error, Result};
use crate::linalg::{arg, eigh, fix_phase, matmul, unitarity_defect, unitary_eig};
use crate::scalar::{cis, cr, fold, CMatrix, CVector, Real};
use crate::spin::SpinSystem;

use super::{check_grid, degenerate_clusters, DriveConfig, FloquetSolution};

/// Eigenphases closer than this are treated as degenerate.
const DEGENERACY_TOL: f64 = 1e-10;
const UNITARITY_TOL: f64 = 1e-8;
const MIN_STEPS: usize = 100;

/// Propagators `U(t_k, 0)` on the sampling grid plus the full-period one.
#[derive(Debug, Clone)]
pub struct Propagation<T: Real> {
    pub samples: Vec<CMatrix<T>>,
    pub period: CMatrix<T>,
}

fn check_steps(n_t: usize, n_steps: usize) -> Result<()> {
    check_grid(n_t)?;
    if n_steps < MIN_STEPS {
        return Err(Error::InvalidGrid(format!(
            "n_steps = {n_steps} is below the minimum of {MIN_STEPS}"
        )));
    }
    if !n_steps.is_multiple_of(n_t) {
        return Err(Error::InvalidGrid(format!(
            "n_steps = {n_steps} is not a multiple of n_t = {n_t}"
        )));
    }
    Ok(())
}

/// Integrate `i dU/dt = H(t) U` over one period with `n_steps` steps,
/// recording `U(t_k, 0)` at `n_t` equally spaced times.
pub fn propagate<T: Real>(
    spin: &SpinSystem<T>,
    drive: &DriveConfig<T>,
    n_t: usize,
    n_steps: usize,
) -> Result<Propagation<T>> {
    check_steps(n_t, n_steps)?;
    let dim = spin.dim();
    let h = T::two_pi() / T::lit(n_steps as f64);
    let r3 = T::lit(3.0).sqrt();
    let node1 = T::lit(0.5) - r3 / T::lit(6.0);
    let node2 = T::lit(0.5) + r3 / T::lit(6.0);
    let w1 = (T::lit(3.0) - T::lit(2.0) * r3) / T::lit(12.0);
    let w2 = (T::lit(3.0) + T::lit(2.0) * r3) / T::lit(12.0);
    let stride = n_steps / n_t;

    let mut u = CMatrix::<T>::identity(dim, dim);
    let mut samples = Vec::with_capacity(n_t);
    for step in 0..n_steps {
        if step % stride == 0 {
            samples.push(u.clone());
        }
        let t = h * T::lit(step as f64);
        let b1 = drive.field(t + node1 * h);
        let b2 = drive.field(t + node2 * h);
        let early: [T; 3] = std::array::from_fn(|a| w2 * b1[a] + w1 * b2[a]);
        let late: [T; 3] = std::array::from_fn(|a| w1 * b1[a] + w2 * b2[a]);
        u = matmul(
            &spin.rotation(late, h),
            &matmul(&spin.rotation(early, h), &u),
        );
    }
    let deviation = unitarity_defect(&u);
    if deviation > T::tol(UNITARITY_TOL) {
        return Err(Error::NonUnitary {
            deviation: deviation.as_f64(),
        });
    }
    Ok(Propagation { samples, period: u })
}

/// Numeric Floquet solution. Degenerate eigenspaces of the monodromy matrix
/// are resolved by diagonalizing `Sz` inside them.
pub fn solve_numeric<T: Real>(
    spin: &SpinSystem<T>,
    drive: &DriveConfig<T>,
    n_t: usize,
    n_steps: usize,
) -> Result<FloquetSolution<T>> {
    solve_numeric_with_tiebreak(spin, drive, n_t, n_steps, &spin.sz)
}

/// Like [`solve_numeric`], resolving degenerate eigenspaces with the given
/// Hermitian operator (normally the bath coupling operator).
pub fn solve_numeric_with_tiebreak<T: Real>(
    spin: &SpinSystem<T>,
    drive: &DriveConfig<T>,
    n_t: usize,
    n_steps: usize,
    tiebreak: &CMatrix<T>,
) -> Result<FloquetSolution<T>> {
    let prop = propagate(spin, drive, n_t, n_steps)?;
    let dim = spin.dim();
    let (eigvals, mut basis) = unitary_eig(&prop.period);
    // U(T) v = exp(-i eps 2 pi) v
    let eps: Vec<T> = eigvals
        .iter()
        .map(|&z| fold(-arg(z) / T::two_pi()))
        .collect();

    for cluster in degenerate_clusters(&eps, T::tol(DEGENERACY_TOL)) {
        if cluster.len() < 2 {
            continue;
        }
        let q = basis.select_columns(cluster.iter());
        let (_, w) = eigh(&(q.adjoint() * tiebreak * &q));
        let rotated = &q * w;
        for (c, &idx) in cluster.iter().enumerate() {
            basis.set_column(idx, &rotated.column(c));
        }
    }
    for mut col in basis.column_iter_mut() {
        let mut v: CVector<T> = col.clone_owned();
        fix_phase(&mut v);
        col.copy_from(&v);
    }

    let samples: Vec<CMatrix<T>> = prop
        .samples
        .iter()
        .enumerate()
        .map(|(k, uk)| {
            let t = T::two_pi() * T::lit(k as f64) / T::lit(n_t as f64);
            let mut s = matmul(uk, &basis);
            for (m, mut col) in s.column_iter_mut().enumerate() {
                col *= cis(eps[m] * t);
            }
            s
        })
        .collect();

    // deterministic order: descending cycle-averaged Sz, then quasienergy
    let sz_avg: Vec<T> = (0..dim)
        .map(|m| {
            let total = samples.iter().fold(T::zero(), |acc, s| {
                let v = s.column(m);
                acc + v.dotc(&(&spin.sz * v)).re
            });
            total / T::lit(n_t as f64)
        })
        .collect();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        sz_avg[b]
            .partial_cmp(&sz_avg[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                eps[b]
                    .partial_cmp(&eps[a])
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });

    let canonical: Vec<T> = (0..dim)
        .map(|m| eps[m] - fourier_centroid(&samples, m).round())
        .collect();
    let sol = FloquetSolution {
        quasienergies: eps.clone(),
        canonical_quasienergies: canonical,
        paired_quasienergies: eps,
        samples,
    };
    sol.permuted(&order)
}

/// Mean harmonic index `sum_l l |c_l|^2` of the Fourier series of `u_m(t)`.
///
/// Shifting a quasienergy by an integer `k` multiplies the Floquet function
/// by `exp(i k t)` and moves the centroid by `k`; the representative whose
/// function is centred on `l = 0` is the one continuous with the undriven
/// energy.
fn fourier_centroid<T: Real>(samples: &[CMatrix<T>], m: usize) -> T {
    let n = samples.len();
    let nf = T::lit(n as f64);
    let half = (n / 2) as i64;
    let twiddle: Vec<_> = (0..n)
        .map(|j| cis(-T::two_pi() * T::lit(j as f64) / nf))
        .collect();
    let mut centroid = T::zero();
    for l in -half..half {
        let mut power = T::zero();
        for r in 0..samples[0].nrows() {
            let mut acc = cr(T::zero());
            for (k, s) in samples.iter().enumerate() {
                let j = (l * k as i64).rem_euclid(n as i64) as usize;
                acc += s[(r, m)] * twiddle[j];
            }
            power += (acc / cr(nf)).norm_sqr();
        }
        centroid += T::lit(l as f64) * power;
    }
    centroid
}

/// Repeatedly double `n_steps`, starting at `start_steps`, until the folded
/// quasienergies move by less than `tol` (at most `max_doublings` times).
/// Returns the converged solution and the step count used.
pub fn solve_numeric_converged<T: Real>(
    spin: &SpinSystem<T>,
    drive: &DriveConfig<T>,
    n_t: usize,
    start_steps: usize,
    tol: T,
    max_doublings: usize,
) -> Result<(FloquetSolution<T>, usize)> {
    let mut steps = start_steps;
    let mut prev = solve_numeric(spin, drive, n_t, steps)?;
    for _ in 0..max_doublings {
        steps *= 2;
        let next = solve_numeric(spin, drive, n_t, steps)?;
        let mut a = prev.quasienergies.clone();
        let mut b = next.quasienergies.clone();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let moved = a
            .iter()
            .zip(&b)
            .map(|(&x, &y)| crate::scalar::circular_distance(x, y))
            .fold(T::zero(), |p, q| if q > p { q } else { p });
        debug!("n_steps = {steps}: quasienergies moved {moved:e}");
        prev = next;
        if moved < tol {
            return Ok((prev, steps));
        }
    }
    Ok((prev, steps))
}
