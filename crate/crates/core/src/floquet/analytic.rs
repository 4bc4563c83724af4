//! Closed-form Floquet states for circular drives.
//!
//! In the frame co-rotating with the field the Hamiltonian is static,
//! `H_rot = a Sz + F Sx` with `a = w0 - 1` (right) or `a = w0 + 1` (left).
//! It is a rotated copy of `Omega Sz`, so its eigenvectors are
//! `exp(-i theta Sy) |k>` with `tan theta = F / a`, and the Floquet functions
//! follow by undoing the frame rotation.

use crate::error::Result;
use crate::scalar::{fold, CMatrix, Real, C};
use crate::spin::SpinSystem;

use super::{check_grid, rabi_frequency, DriveConfig, FloquetSolution, Polarization};

/// State `m` (basis order, `m = J` first) continues the undriven level `m`.
pub fn solve_circular_analytic<T: Real>(
    spin: &SpinSystem<T>,
    drive: &DriveConfig<T>,
    n_t: usize,
) -> Result<FloquetSolution<T>> {
    let a = drive.rotating_detuning()?;
    check_grid(n_t)?;
    let omega = rabi_frequency(drive)?;
    let dim = spin.dim();
    let shift = spin.half_offset();

    let theta = drive.f_over_omega.atan2(a);
    let rot = spin.rotation_y(theta);
    // for a < 0 the undriven level m sits at rotated index -m
    let flipped = a < T::zero();
    let chi = CMatrix::<T>::from_fn(dim, dim, |r, m| {
        let col = if flipped { dim - 1 - m } else { m };
        rot[(r, col)]
    });

    let m_vals = spin.m_values();
    let sign = if flipped { -T::one() } else { T::one() };
    let lambdas: Vec<T> = m_vals.iter().map(|&m| sign * m * omega).collect();

    // right: u = exp(-i t (Sz - s)) chi,  eps = lambda + s
    // left:  u = exp(+i t (Sz - s)) chi,  eps = lambda - s
    let right = drive.polarization == Polarization::RightCircular;
    let direction = if right { T::one() } else { -T::one() };
    let paired: Vec<T> = lambdas.iter().map(|&l| l + direction * shift).collect();
    let canonical: Vec<T> = lambdas
        .iter()
        .zip(&m_vals)
        .map(|(&l, &m)| l + direction * m)
        .collect();
    let quasienergies = paired.iter().map(|&e| fold(e)).collect();

    let samples = (0..n_t)
        .map(|k| {
            let t = T::two_pi() * T::lit(k as f64) / T::lit(n_t as f64);
            let phases: Vec<C<T>> = spin.phase_z(direction * t, shift);
            CMatrix::from_fn(dim, dim, |r, m| phases[r] * chi[(r, m)])
        })
        .collect();

    Ok(FloquetSolution {
        quasienergies,
        canonical_quasienergies: canonical,
        paired_quasienergies: paired,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::floquet::quasienergy_spread;
    use crate::linalg::sandwich;
    use crate::scalar::{circular_distance, cr};

    fn setup(p: Polarization, f: f64) -> (SpinSystem<f64>, DriveConfig<f64>) {
        (
            SpinSystem::new(7).unwrap(),
            DriveConfig::new(p, f, 0.1).unwrap(),
        )
    }

    #[test]
    fn rotating_frame_eigenvectors() {
        for p in [Polarization::RightCircular, Polarization::LeftCircular] {
            for f in [0.0, 0.3, 1.7] {
                let (s, d) = setup(p, f);
                let sol = solve_circular_analytic(&s, &d, 8).unwrap();
                let a = d.rotating_detuning().unwrap();
                let h_rot = &s.sz * cr(a) + &s.sx * cr(f);
                // paired energy minus the frame shift is the rotating-frame eigenvalue
                let direction = if p == Polarization::RightCircular {
                    1.0
                } else {
                    -1.0
                };
                for m in 0..8 {
                    let chi = sol.function(m, 0);
                    let lam = sol.paired_quasienergies[m] - direction * 0.5;
                    let r = &h_rot * &chi - &chi * cr(lam);
                    assert!(r.norm() < 1e-12, "{p:?} F={f} m={m}");
                }
            }
        }
    }

    #[test]
    fn collapse_at_principal_resonance() {
        let (s, d) = setup(Polarization::RightCircular, 0.19f64.sqrt());
        let sol = solve_circular_analytic(&s, &d, 16).unwrap();
        assert!(quasienergy_spread(&sol.quasienergies) < 1e-10);
    }

    #[test]
    fn undriven_limit_is_zeeman_mod_one() {
        for p in [Polarization::RightCircular, Polarization::LeftCircular] {
            for two_j in [1u32, 2, 7] {
                let s = SpinSystem::<f64>::new(two_j).unwrap();
                let d = DriveConfig::new(p, 0.0, 0.1).unwrap();
                let sol = solve_circular_analytic(&s, &d, 8).unwrap();
                for (k, m) in s.m_values().into_iter().enumerate() {
                    assert!(circular_distance(sol.quasienergies[k], 0.1 * m) < 1e-12);
                    assert!((sol.canonical_quasienergies[k] - 0.1 * m).abs() < 1e-12);
                    let u = sol.function(k, 3);
                    assert!((sandwich(&u, &s.sz, &u).re - m).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn canonical_branches_attract_for_right_and_repel_for_left() {
        let (s, d) = setup(Polarization::RightCircular, 0.3);
        let r = solve_circular_analytic(&s, &d, 8).unwrap();
        let (_, d) = setup(Polarization::LeftCircular, 0.3);
        let l = solve_circular_analytic(&s, &d, 8).unwrap();
        let width = |v: &[f64]| v[0] - v[7];
        assert!(width(&r.canonical_quasienergies) < 0.7);
        assert!(width(&l.canonical_quasienergies) > 0.7);
    }

    #[test]
    fn left_omega_three_halves_and_two() {
        let s = SpinSystem::<f64>::new(7).unwrap();
        // Omega = 2: every folded quasienergy coincides
        let f2 = (4.0f64 - 1.21).sqrt();
        assert!((f2 - 1.670).abs() < 1e-3);
        let d = DriveConfig::new(Polarization::LeftCircular, f2, 0.1).unwrap();
        let sol = solve_circular_analytic(&s, &d, 8).unwrap();
        assert!(quasienergy_spread(&sol.quasienergies) < 1e-12);
        // Omega = 3/2: two degenerate groups half a zone apart
        let f32_ = (2.25f64 - 1.21).sqrt();
        let d = DriveConfig::new(Polarization::LeftCircular, f32_, 0.1).unwrap();
        let sol = solve_circular_analytic(&s, &d, 8).unwrap();
        let c = crate::floquet::degenerate_clusters(&sol.quasienergies, 1e-9);
        assert_eq!(c.len(), 2);
        let gap = circular_distance(sol.quasienergies[c[0][0]], sol.quasienergies[c[1][0]]);
        assert!((gap - 0.5).abs() < 1e-12);
    }

    #[test]
    fn half_integer_offset_for_spin_half() {
        let s = SpinSystem::<f64>::new(1).unwrap();
        let d = DriveConfig::new(Polarization::RightCircular, 1e-9, 0.1).unwrap();
        let sol = solve_circular_analytic(&s, &d, 8).unwrap();
        // 1/2 -+ Omega/2 with Omega -> 0.9
        assert!((sol.paired_quasienergies[0] - (0.5 - 0.45)).abs() < 1e-9);
        assert!((sol.paired_quasienergies[1] - (0.5 + 0.45)).abs() < 1e-9);
        assert!(circular_distance(sol.quasienergies[0], 0.05) < 1e-9);
        assert!(circular_distance(sol.quasienergies[1], -0.05) < 1e-9);
    }

    #[test]
    fn linear_rejected() {
        let (s, d) = setup(Polarization::Linear, 1.0);
        assert_eq!(
            solve_circular_analytic(&s, &d, 8).unwrap_err(),
            Error::LinearNotAnalytic
        );
    }

    #[test]
    fn orthonormal_at_every_sample() {
        let (s, d) = setup(Polarization::RightCircular, 0.9);
        let sol = solve_circular_analytic(&s, &d, 32).unwrap();
        assert!(sol.orthonormality_defect() < 1e-12);
    }
}
