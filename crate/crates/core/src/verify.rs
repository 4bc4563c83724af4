//! Cross-module self-checks with a machine-readable report.
//!
//! Every check draws its parameter points from a seeded generator, so a
//! report is reproducible from its configuration alone.

use std::fmt;

use nalgebra::ComplexField;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bath::{rate_matrix, BathSpec, SpectralDensity};
use crate::error::{Error, Result};
use crate::floquet::{
    fourier_elements, propagate, solve_circular_analytic, solve_numeric_with_tiebreak, DriveConfig,
    FloquetSolution, Polarization,
};
use crate::linalg::{hermitian_defect, unitarity_defect};
use crate::observables::cycle_averaged_sz;
use crate::pipeline::{evaluate_point, spectrum_distance};
use crate::scalar::{circular_distance, max_abs_diff, CMatrix};
use crate::spin::SpinSystem;
use crate::steady_state::{boltzmann_reference, solve_steady_state};

pub const CHECKS: [&str; 8] = [
    "spin-algebra",
    "unitarity",
    "analytic-numeric",
    "parseval",
    "detailed-balance",
    "rate-nonnegativity",
    "steady-state",
    "pt-symmetry",
];

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub two_j: u32,
    pub omega0: f64,
    pub n_t: usize,
    pub n_steps: usize,
    pub l_max: usize,
    pub seed: u64,
    /// Random parameter points per check.
    pub points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            two_j: 7,
            omega0: 0.1,
            n_t: 128,
            n_steps: 4096,
            l_max: 32,
            seed: 20_240_601,
            points: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Metric {
    fn new(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self {
            name,
            value,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: usize,
    pub metrics: Vec<Metric>,
    /// Set when the check could not be carried out.
    pub error: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.metrics.iter().all(Metric::passed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "check={} status={} cases={}",
            self.name,
            if self.passed() { "pass" } else { "fail" },
            self.cases
        )?;
        for m in &self.metrics {
            write!(f, " {}={:.3e}/{:.0e}", m.name, m.value, m.tolerance)?;
        }
        if let Some(e) = &self.error {
            write!(f, " error=\"{}\"", e.replace('"', "'"))?;
        }
        Ok(())
    }
}

/// Run the named checks, or all of them when `only` is empty.
pub fn run_checks(cfg: &VerifyConfig, only: &[String]) -> Result<Vec<CheckReport>> {
    for name in only {
        if !CHECKS.contains(&name.as_str()) {
            return Err(Error::InvalidParameter(format!(
                "unknown check '{name}' (known: {})",
                CHECKS.join(", ")
            )));
        }
    }
    Ok(CHECKS
        .iter()
        .filter(|c| only.is_empty() || only.iter().any(|o| o == *c))
        .map(|c| run_check(c, cfg))
        .collect())
}

pub fn run_check(name: &'static str, cfg: &VerifyConfig) -> CheckReport {
    let outcome = match name {
        "spin-algebra" => spin_algebra(),
        "unitarity" => unitarity(cfg),
        "analytic-numeric" => analytic_numeric(cfg),
        "parseval" => parseval(cfg),
        "detailed-balance" => detailed_balance(cfg),
        "rate-nonnegativity" => rate_nonnegativity(cfg),
        "steady-state" => steady_state(cfg),
        "pt-symmetry" => pt_symmetry(cfg),
        other => Err(Error::InvalidParameter(format!("unknown check '{other}'"))),
    };
    match outcome {
        Ok((cases, metrics)) => CheckReport {
            name,
            cases,
            metrics,
            error: None,
        },
        Err(e) => CheckReport {
            name,
            cases: 0,
            metrics: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

type Outcome = Result<(usize, Vec<Metric>)>;

#[derive(Debug, Clone, Copy)]
struct Point {
    polarization: Polarization,
    f: f64,
    omega0: f64,
    beta: f64,
    density: SpectralDensity<f64>,
    gamma: [f64; 3],
}

impl Point {
    fn drive(&self) -> Result<DriveConfig<f64>> {
        DriveConfig::new(self.polarization, self.f, self.omega0)
    }

    fn bath(&self, l_max: usize) -> Result<BathSpec<f64>> {
        Ok(BathSpec::new(self.density, self.beta, self.gamma)?.with_l_max(l_max))
    }
}

fn random_density(rng: &mut ChaCha8Rng) -> SpectralDensity<f64> {
    match rng.random_range(0..3) {
        0 => SpectralDensity::Constant,
        1 => SpectralDensity::Quadratic,
        _ => SpectralDensity::Gaussian {
            omega_c_over_omega: 5.0,
        },
    }
}

/// Points with quasienergies at least `min_gap` apart, so that individual
/// Floquet states are well defined.
fn random_points(
    cfg: &VerifyConfig,
    stream: u64,
    count: usize,
    polarizations: &[Polarization],
    min_gap: f64,
) -> Result<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let spin = SpinSystem::<f64>::new(cfg.two_j)?;
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count {
            return Err(Error::InvalidParameter(
                "could not draw well separated points".into(),
            ));
        }
        let polarization = polarizations[rng.random_range(0..polarizations.len())];
        let gamma = [
            1.0,
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let p = Point {
            polarization,
            f: rng.random_range(0.05..2.0),
            omega0: rng.random_range(-1.0..1.0),
            beta: rng.random_range(0.5..10.0),
            density: random_density(&mut rng),
            gamma,
        };
        if polarization.is_circular() {
            let sol = solve_circular_analytic(&spin, &p.drive()?, 8)?;
            if min_separation(&sol.quasienergies) < min_gap {
                continue;
            }
        }
        out.push(p);
    }
    Ok(out)
}

fn min_separation(eps: &[f64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (a, &x) in eps.iter().enumerate() {
        for &y in &eps[a + 1..] {
            gap = gap.min(circular_distance(x, y));
        }
    }
    gap
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn collect<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

fn numeric(spin: &SpinSystem<f64>, p: &Point, cfg: &VerifyConfig) -> Result<FloquetSolution<f64>> {
    let v = spin.coupling_operator(p.gamma)?;
    solve_numeric_with_tiebreak(spin, &p.drive()?, cfg.n_t, cfg.n_steps, &v)
}

fn solve_any(
    spin: &SpinSystem<f64>,
    p: &Point,
    cfg: &VerifyConfig,
) -> Result<FloquetSolution<f64>> {
    if p.polarization.is_circular() {
        solve_circular_analytic(spin, &p.drive()?, cfg.n_t)
    } else {
        numeric(spin, p, cfg)
    }
}

fn spin_algebra() -> Outcome {
    let mut comm: f64 = 0.0;
    let mut casimir: f64 = 0.0;
    let mut herm: f64 = 0.0;
    let i = crate::scalar::c(0.0, 1.0);
    for two_j in 1..=16 {
        let s = SpinSystem::<f64>::new(two_j)?;
        let j = s.j();
        let c = |a: &CMatrix<f64>, b: &CMatrix<f64>| a * b - b * a;
        comm = comm
            .max(max_abs_diff(&c(&s.sx, &s.sy), &(&s.sz * i)))
            .max(max_abs_diff(&c(&s.sy, &s.sz), &(&s.sx * i)))
            .max(max_abs_diff(&c(&s.sz, &s.sx), &(&s.sy * i)));
        let sq = &s.sx * &s.sx + &s.sy * &s.sy + &s.sz * &s.sz;
        casimir = casimir.max(
            max_abs_diff(&sq, &(s.identity() * crate::scalar::cr(j * (j + 1.0)))) / (j * (j + 1.0)),
        );
        herm = herm
            .max(hermitian_defect(&s.sx))
            .max(hermitian_defect(&s.sy))
            .max(hermitian_defect(&s.sz));
    }
    Ok((
        16,
        vec![
            Metric::new("commutator", comm, 1e-12),
            Metric::new("casimir", casimir, 1e-13),
            Metric::new("hermiticity", herm, 0.0),
        ],
    ))
}

/// Period propagators are unitary, and resolved: doubling the step count
/// leaves them unchanged.
fn unitarity(cfg: &VerifyConfig) -> Outcome {
    let spin = SpinSystem::<f64>::new(cfg.two_j)?;
    let drives = [
        DriveConfig::new(Polarization::RightCircular, 0.7, cfg.omega0)?,
        DriveConfig::new(Polarization::LeftCircular, 1.3, cfg.omega0)?,
        DriveConfig::new(Polarization::Linear, 1.9, cfg.omega0)?,
    ];
    let results = collect(
        drives
            .par_iter()
            .map(|d| {
                let coarse = propagate(&spin, d, cfg.n_t, cfg.n_steps)?;
                let fine = propagate(&spin, d, cfg.n_t, 2 * cfg.n_steps)?;
                let defect = coarse
                    .samples
                    .iter()
                    .chain([&coarse.period])
                    .map(unitarity_defect)
                    .fold(0.0, f64::max);
                Ok((defect, max_abs_diff(&coarse.period, &fine.period)))
            })
            .collect(),
    )?;
    Ok((
        drives.len(),
        vec![
            Metric::new("defect", worst(results.iter().map(|r| r.0)), 1e-10),
            Metric::new("step_doubling", worst(results.iter().map(|r| r.1)), 1e-8),
        ],
    ))
}

/// Largest difference of the state projectors over the time grid, pairing
/// states by nearest quasienergy.
fn projector_distance(a: &FloquetSolution<f64>, b: &FloquetSolution<f64>) -> f64 {
    let mut out: f64 = 0.0;
    for m in 0..a.dim() {
        let n = (0..b.dim())
            .min_by(|&x, &y| {
                circular_distance(a.quasienergies[m], b.quasienergies[x])
                    .total_cmp(&circular_distance(a.quasienergies[m], b.quasienergies[y]))
            })
            .unwrap();
        for k in 0..a.n_t() {
            let ua = a.samples[k].column(m);
            let ub = b.samples[k].column(n);
            out = out.max(max_abs_diff(&(ua * ua.adjoint()), &(ub * ub.adjoint())));
        }
    }
    out
}

fn analytic_numeric(cfg: &VerifyConfig) -> Outcome {
    let spin = SpinSystem::<f64>::new(cfg.two_j)?;
    let pols = [Polarization::RightCircular, Polarization::LeftCircular];
    let points = random_points(cfg, 1, cfg.points, &pols, 1e-3)?;
    let results = collect(
        points
            .par_iter()
            .map(|p| {
                let drive = p.drive()?;
                let ana = solve_circular_analytic(&spin, &drive, cfg.n_t)?;
                let num = numeric(&spin, p, cfg)?;
                let bath = p.bath(cfg.l_max)?;
                let ma = evaluate_point(&spin, &drive, &ana, &bath)?
                    .record
                    .quasithermal_m;
                let mn = evaluate_point(&spin, &drive, &num, &bath)?
                    .record
                    .quasithermal_m;
                Ok((
                    spectrum_distance(&ana.quasienergies, &num.quasienergies),
                    projector_distance(&ana, &num),
                    (ma - mn).abs(),
                ))
            })
            .collect(),
    )?;
    Ok((
        points.len(),
        vec![
            Metric::new("quasienergy", worst(results.iter().map(|r| r.0)), 1e-7),
            Metric::new("projector", worst(results.iter().map(|r| r.1)), 1e-6),
            Metric::new("magnetization", worst(results.iter().map(|r| r.2)), 1e-6),
        ],
    ))
}

/// Sum of `|V_fi^(l)|^2` over harmonics equals the cycle average of
/// `|<u_f|V|u_i>|^2`.
fn parseval(cfg: &VerifyConfig) -> Outcome {
    let spin = SpinSystem::<f64>::new(cfg.two_j)?;
    let pols = [
        Polarization::RightCircular,
        Polarization::LeftCircular,
        Polarization::Linear,
    ];
    let points = random_points(cfg, 2, cfg.points.min(8), &pols, 0.0)?;
    let l_max = cfg.l_max.min(cfg.n_t / 2 - 1);
    let results = collect(
        points
            .par_iter()
            .map(|p| {
                let sol = solve_any(&spin, p, cfg)?;
                let v = spin.coupling_operator(p.gamma)?;
                let fe = fourier_elements(&sol, &v, l_max)?;
                let n = sol.n_t() as f64;
                let scale = v.iter().map(|z| z.modulus_squared()).sum::<f64>();
                let mut err: f64 = 0.0;
                for f in 0..sol.dim() {
                    for i in 0..sol.dim() {
                        let spectral: f64 = fe.harmonics().map(|(_, h)| h[(f, i)].norm_sqr()).sum();
                        let temporal: f64 = sol
                            .samples
                            .iter()
                            .map(|u| (u.adjoint() * &v * u)[(f, i)].norm_sqr())
                            .sum::<f64>()
                            / n;
                        err = err.max((spectral - temporal).abs() / scale);
                    }
                }
                Ok(err)
            })
            .collect(),
    )?;
    Ok((
        points.len(),
        vec![Metric::new("relative", worst(results), 1e-10)],
    ))
}

/// Undriven spin: rates obey detailed balance with respect to the Zeeman
/// levels and the steady state is the Boltzmann distribution.
fn detailed_balance(cfg: &VerifyConfig) -> Outcome {
    let spin = SpinSystem::<f64>::new(cfg.two_j)?;
    let drive = DriveConfig::new(Polarization::RightCircular, 0.0, cfg.omega0)?;
    let sol = solve_circular_analytic(&spin, &drive, cfg.n_t)?;
    let energies: Vec<f64> = cycle_averaged_sz(&sol, &spin)
        .iter()
        .map(|m| cfg.omega0 * m)
        .collect();
    let mut ratio_err: f64 = 0.0;
    let mut boltz_err: f64 = 0.0;
    let mut cases = 0;
    let densities = [
        SpectralDensity::Constant,
        SpectralDensity::Quadratic,
        SpectralDensity::Gaussian {
            omega_c_over_omega: 5.0,
        },
    ];
    for density in densities {
        for beta in [1.0, 10.0] {
            cases += 1;
            let bath = BathSpec::new(density, beta, [1.0, 0.0, 0.0])?.with_l_max(cfg.l_max);
            let v = spin.coupling_operator(bath.gamma)?;
            let fe = fourier_elements(&sol, &v, cfg.l_max.min(cfg.n_t / 2 - 1))?;
            let r = rate_matrix(&fe, &bath)?;
            for f in 0..spin.dim() {
                for i in 0..spin.dim() {
                    let (up, down) = (r.rates[(f, i)], r.rates[(i, f)]);
                    if f == i || up == 0.0 {
                        continue;
                    }
                    let expect = (-beta * (energies[f] - energies[i])).exp();
                    ratio_err = ratio_err.max(((up / down) - expect).abs() / expect);
                }
            }
            let p = solve_steady_state(&r)?;
            let eq = boltzmann_reference(&spin, cfg.omega0, beta);
            boltz_err = boltz_err.max(worst(p.p.iter().zip(&eq.p).map(|(a, b)| (a - b).abs())));
        }
    }
    Ok((
        cases,
        vec![
            Metric::new("rate_ratio", ratio_err, 1e-10),
            Metric::new("boltzmann", boltz_err, 1e-8),
        ],
    ))
}

fn rate_points(cfg: &VerifyConfig, stream: u64) -> Result<Vec<Point>> {
    let pols = [
        Polarization::RightCircular,
        Polarization::LeftCircular,
        Polarization::Linear,
    ];
    random_points(cfg, stream, cfg.points.min(10), &pols, 0.0)
}

fn rate_nonnegativity(cfg: &VerifyConfig) -> Outcome {
    let spin = SpinSystem::<f64>::new(cfg.two_j)?;
    let points = rate_points(cfg, 3)?;
    let results = collect(
        points
            .par_iter()
            .map(|p| {
                let sol = solve_any(&spin, p, cfg)?;
                let bath = p.bath(cfg.l_max)?;
                let fe = fourier_elements(&sol, &spin.coupling_operator(p.gamma)?, bath.l_max)?;
                let r = rate_matrix(&fe, &bath)?;
                let bad = r
                    .partial
                    .iter()
                    .chain([&r.rates])
                    .flat_map(|m| m.iter())
                    .map(|&x| {
                        if x.is_finite() {
                            (-x).max(0.0)
                        } else {
                            f64::INFINITY
                        }
                    })
                    .fold(0.0, f64::max);
                Ok(bad)
            })
            .collect(),
    )?;
    Ok((
        points.len(),
        vec![Metric::new("negative_part", worst(results), 0.0)],
    ))
}

fn steady_state(cfg: &VerifyConfig) -> Outcome {
    let spin = SpinSystem::<f64>::new(cfg.two_j)?;
    let points = rate_points(cfg, 4)?;
    let results = collect(
        points
            .par_iter()
            .map(|p| {
                let sol = solve_any(&spin, p, cfg)?;
                let out = evaluate_point(&spin, &p.drive()?, &sol, &p.bath(cfg.l_max)?)?;
                let sum: f64 = out.occupations.p.iter().sum();
                let negative = out.occupations.p.iter().fold(0.0f64, |a, &x| a.max(-x));
                let residual = out.occupations.residual / out.rates.max_rate();
                Ok(((sum - 1.0).abs(), negative, residual))
            })
            .collect(),
    )?;
    Ok((
        points.len(),
        vec![
            Metric::new("normalization", worst(results.iter().map(|r| r.0)), 1e-12),
            Metric::new("negative", worst(results.iter().map(|r| r.1)), 0.0),
            Metric::new("residual", worst(results.iter().map(|r| r.2)), 1e-10),
        ],
    ))
}

/// Left-circular driving with `+w0` and right-circular driving with `-w0`
/// share their spectrum and have opposite magnetizations.
fn pt_symmetry(cfg: &VerifyConfig) -> Outcome {
    let spin = SpinSystem::<f64>::new(cfg.two_j)?;
    let mut points = random_points(cfg, 5, 10, &[Polarization::LeftCircular], 1e-3)?;
    for p in &mut points {
        p.omega0 = cfg.omega0;
        p.gamma = [1.0, 0.0, 0.0];
    }
    let results = collect(
        points
            .par_iter()
            .map(|p| {
                let mirror = Point {
                    polarization: Polarization::RightCircular,
                    omega0: -p.omega0,
                    ..*p
                };
                let bath = p.bath(cfg.l_max)?;
                let mut spectrum: f64 = 0.0;
                let mut sum: f64 = 0.0;
                for analytic in [true, false] {
                    let solve = |q: &Point| {
                        if analytic {
                            solve_circular_analytic(&spin, &q.drive()?, cfg.n_t)
                        } else {
                            numeric(&spin, q, cfg)
                        }
                    };
                    let a = solve(p)?;
                    let b = solve(&mirror)?;
                    spectrum = spectrum.max(spectrum_distance(&a.quasienergies, &b.quasienergies));
                    let ma = evaluate_point(&spin, &p.drive()?, &a, &bath)?
                        .record
                        .quasithermal_m;
                    let mb = evaluate_point(&spin, &mirror.drive()?, &b, &bath)?
                        .record
                        .quasithermal_m;
                    sum = sum.max((ma + mb).abs());
                }
                Ok((spectrum, sum))
            })
            .collect(),
    )?;
    Ok((
        points.len(),
        vec![
            Metric::new("spectrum", worst(results.iter().map(|r| r.0)), 1e-9),
            Metric::new("antisymmetry", worst(results.iter().map(|r| r.1)), 1e-8),
        ],
    ))
}
