//! Scans over the drive amplitude.
//!
//! Floquet problems for all grid points are solved concurrently; branch
//! labels are then assigned in a sequential pass over the grid, and the
//! bath-dependent part of every row is evaluated concurrently again. The
//! output does not depend on the number of threads.

mod csv;
mod tracking;

pub use self::csv::{column_names, format_value, write_csv, COLUMN_PREFIX};
pub use tracking::{
    exhaustive_assignment, greedy_assignment, overlap_matrix, track_branches, BranchMatch,
};

use log::info;
use rayon::prelude::*;

use crate::bath::{BathSpec, RateDiagnostics};
use crate::error::{Error, Result};
use crate::floquet::{bessel_j0_collapse_points, DriveConfig, FloquetSolution, Polarization};
use crate::observables::cycle_averaged_sz;
use crate::pipeline::{evaluate_point, solve_floquet, SolverSettings};
use crate::scalar::{CMatrix, Real};
use crate::spin::SpinSystem;
use crate::steady_state::{boltzmann_reference, mean_m};

/// Grid points this close to an exact collapse are moved off it.
const COLLAPSE_MATCH: f64 = 1e-9;
pub const COLLAPSE_OFFSET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outputs {
    pub spectrum: bool,
    pub occupations: bool,
    pub magnetization: bool,
}

impl Outputs {
    pub const SPECTRUM: Outputs = Outputs {
        spectrum: true,
        occupations: false,
        magnetization: false,
    };
    pub const ALL: Outputs = Outputs {
        spectrum: true,
        occupations: true,
        magnetization: true,
    };

    pub fn needs_rates(&self) -> bool {
        self.occupations || self.magnetization
    }

    fn describe(&self) -> String {
        let mut parts = Vec::new();
        if self.spectrum {
            parts.push("spectrum");
        }
        if self.occupations {
            parts.push("occupations");
        }
        if self.magnetization {
            parts.push("magnetization");
        }
        parts.join(",")
    }
}

#[derive(Debug, Clone)]
pub struct SweepPlan<T: Real> {
    /// Polarization and static field; the amplitude is taken from `f_grid`.
    pub drive: DriveConfig<T>,
    pub f_grid: Vec<T>,
    /// May be empty for spectrum-only sweeps.
    pub bath_specs: Vec<BathSpec<T>>,
    pub two_j: u32,
    pub solver: SolverSettings,
    pub outputs: Outputs,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl<T: Real> SweepPlan<T> {
    /// Uniform grid of `steps` points on `[f_min, f_max]`.
    pub fn uniform_grid(f_min: T, f_max: T, steps: usize) -> Vec<T> {
        if steps <= 1 || f_max == f_min {
            return vec![f_min];
        }
        let h = (f_max - f_min) / T::lit((steps - 1) as f64);
        (0..steps).map(|k| f_min + h * T::lit(k as f64)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.f_grid.is_empty() {
            return Err(Error::InvalidParameter("empty amplitude grid".into()));
        }
        if self.f_grid.iter().any(|f| !(*f >= T::zero())) {
            return Err(Error::InvalidParameter(
                "amplitudes must be nonnegative".into(),
            ));
        }
        if self.f_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "amplitude grid must be strictly increasing".into(),
            ));
        }
        if self.outputs.needs_rates() && self.bath_specs.is_empty() {
            return Err(Error::InvalidParameter(
                "occupations or magnetization requested without a bath".into(),
            ));
        }
        for b in &self.bath_specs {
            b.validate()?;
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter("threads must be positive".into()));
        }
        Ok(())
    }

    /// Amplitudes at which every quasienergy is degenerate: integer and
    /// half-integer Rabi frequencies for circular drives, zeros of `J0` for
    /// linear ones.
    pub fn collapse_points(&self, f_max: T) -> Vec<T> {
        match self.drive.polarization {
            Polarization::Linear => {
                let mut k = 1;
                loop {
                    let zeros: Vec<T> = bessel_j0_collapse_points(k);
                    if *zeros.last().unwrap() > f_max {
                        return zeros[..k - 1].to_vec();
                    }
                    k += 1;
                }
            }
            _ => {
                let a = match self.drive.polarization {
                    Polarization::RightCircular => self.drive.omega0_over_omega - T::one(),
                    _ => self.drive.omega0_over_omega + T::one(),
                };
                let mut points = Vec::new();
                let mut n = 1;
                loop {
                    let rabi = T::lit(n as f64 / 2.0);
                    let sq = rabi * rabi - a * a;
                    if sq >= T::zero() {
                        let f = sq.sqrt();
                        if f > f_max {
                            return points;
                        }
                        points.push(f);
                    }
                    n += 1;
                }
            }
        }
    }

    /// Grid actually evaluated. When rates are needed, points sitting on an
    /// exact collapse are shifted up by `COLLAPSE_OFFSET`.
    pub fn effective_grid(&self) -> (Vec<T>, Vec<String>) {
        let mut notices = Vec::new();
        if !self.outputs.needs_rates() {
            return (self.f_grid.clone(), notices);
        }
        let f_max = self.f_grid.iter().fold(T::zero(), |a, &b| a.max(b)) + T::one();
        let collapses = self.collapse_points(f_max);
        let grid = self
            .f_grid
            .iter()
            .map(|&f| {
                match collapses
                    .iter()
                    .find(|&&c| (f - c).abs() <= T::lit(COLLAPSE_MATCH) * T::one().max(c))
                {
                    Some(&c) => {
                        let moved = c + T::lit(COLLAPSE_OFFSET);
                        let msg = format!("grid point {f:e} sits on a quasienergy collapse; evaluated at {moved:e}");
                        info!("{msg}");
                        notices.push(msg);
                        moved
                    }
                    None => f,
                }
            })
            .collect();
        (grid, notices)
    }

    /// Every parameter of the plan, as `key = value` pairs for file headers.
    pub fn describe(&self) -> Vec<(String, String)> {
        let join = |v: &[T]| {
            v.iter()
                .map(|x| format_value(*x))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = vec![
            ("polarization".into(), self.drive.polarization.to_string()),
            ("two_j".into(), self.two_j.to_string()),
            ("omega0".into(), format_value(self.drive.omega0_over_omega)),
            ("f_grid".into(), join(&self.f_grid)),
            ("solver".into(), self.solver.kind.to_string()),
            ("n_t".into(), self.solver.n_t.to_string()),
            ("n_steps".into(), self.solver.n_steps.to_string()),
            ("outputs".into(), self.outputs.describe()),
        ];
        for (k, b) in self.bath_specs.iter().enumerate() {
            out.push((
                format!("bath.{k}"),
                format!(
                    "density={} beta_hbar_omega={} gamma={} l_max={} freq_tolerance={}",
                    b.density,
                    format_value(b.beta_hbar_omega),
                    join(&b.gamma),
                    b.l_max,
                    format_value(b.freq_tolerance)
                ),
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowData<T: Real> {
    /// Folded, in branch order.
    pub quasienergies: Vec<T>,
    pub occupations: Option<Vec<T>>,
    pub time_averaged_sz: Vec<T>,
    pub m_quasithermal: Option<T>,
    pub m_equilibrium: Option<T>,
    pub diagnostics: Option<RateDiagnostics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row<T: Real> {
    pub f_over_omega: T,
    pub bath: Option<BathSpec<T>>,
    pub outcome: std::result::Result<RowData<T>, String>,
}

impl<T: Real> Row<T> {
    pub fn data(&self) -> Option<&RowData<T>> {
        self.outcome.as_ref().ok()
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult<T: Real> {
    pub dim: usize,
    /// Amplitude-major: all bath specs for the first amplitude, then the next.
    pub rows: Vec<Row<T>>,
    pub notices: Vec<String>,
    pub header: Vec<(String, String)>,
}

impl<T: Real> SweepResult<T> {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    /// Rows belonging to bath spec `index`, in grid order.
    pub fn series(&self, index: usize, n_baths: usize) -> impl Iterator<Item = &Row<T>> {
        self.rows.iter().skip(index).step_by(n_baths.max(1))
    }
}

fn in_pool<R: Send>(threads: Option<usize>, job: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

type Solved<T> = std::result::Result<FloquetSolution<T>, String>;

pub fn run_sweep<T: Real>(plan: &SweepPlan<T>) -> Result<SweepResult<T>> {
    plan.validate()?;
    let spin = SpinSystem::<T>::new(plan.two_j)?;
    let (grid, mut notices) = plan.effective_grid();
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter(
                "perturbed grid is no longer strictly increasing; refine around the collapse"
                    .into(),
            ));
        }
    }

    // one Floquet problem per distinct coupling vector (it fixes the basis in
    // degenerate eigenspaces)
    let mut gammas: Vec<[T; 3]> = Vec::new();
    let group_of: Vec<usize> = plan
        .bath_specs
        .iter()
        .map(|b| match gammas.iter().position(|g| *g == b.gamma) {
            Some(k) => k,
            None => {
                gammas.push(b.gamma);
                gammas.len() - 1
            }
        })
        .collect();
    let tiebreaks: Vec<CMatrix<T>> = if gammas.is_empty() {
        vec![spin.sz.clone()]
    } else {
        gammas
            .iter()
            .map(|g| spin.coupling_operator(*g))
            .collect::<Result<_>>()?
    };

    let solved: Vec<Vec<Solved<T>>> = in_pool(plan.threads, || {
        grid.par_iter()
            .map(|&f| {
                tiebreaks
                    .iter()
                    .map(|tb| {
                        plan.drive
                            .with_amplitude(f)
                            .and_then(|d| solve_floquet(&spin, &d, &plan.solver, tb))
                            .map_err(|e| e.to_string())
                    })
                    .collect()
            })
            .collect()
    })?;

    let labelled = label_branches(&spin, solved, tiebreaks.len(), &mut notices);

    let n_baths = plan.bath_specs.len().max(1);
    let jobs: Vec<(usize, Option<usize>)> = (0..grid.len())
        .flat_map(|fi| {
            (0..n_baths).map(move |b| {
                (
                    fi,
                    if plan.bath_specs.is_empty() {
                        None
                    } else {
                        Some(b)
                    },
                )
            })
        })
        .collect();
    let rows: Vec<Row<T>> = in_pool(plan.threads, || {
        jobs.par_iter()
            .map(|&(fi, b)| {
                let group = b.map(|b| group_of[b]).unwrap_or(0);
                let bath = b.map(|b| plan.bath_specs[b]);
                let outcome = match &labelled[fi][group] {
                    Err(e) => Err(e.clone()),
                    Ok(sol) => evaluate_row(plan, &spin, grid[fi], sol, bath.as_ref())
                        .map_err(|e| e.to_string()),
                };
                Row {
                    f_over_omega: grid[fi],
                    bath,
                    outcome,
                }
            })
            .collect()
    })?;

    for r in &rows {
        if let Err(e) = &r.outcome {
            let msg = format!("row F = {:e} failed: {e}", r.f_over_omega);
            log::warn!("{msg}");
            notices.push(msg);
        }
    }

    Ok(SweepResult {
        dim: spin.dim(),
        rows,
        notices,
        header: plan.describe(),
    })
}

/// Sequential pass assigning continuous branch labels per coupling group.
fn label_branches<T: Real>(
    spin: &SpinSystem<T>,
    mut solved: Vec<Vec<Solved<T>>>,
    groups: usize,
    notices: &mut Vec<String>,
) -> Vec<Vec<Solved<T>>> {
    for g in 0..groups {
        let mut prev: Option<FloquetSolution<T>> = None;
        for fi in 0..solved.len() {
            let current = match &solved[fi][g] {
                Ok(s) => s,
                Err(_) => continue,
            };
            let ordered = match &prev {
                None => {
                    let sz = cycle_averaged_sz(current, spin);
                    let mut order: Vec<usize> = (0..current.dim()).collect();
                    order.sort_by(|&a, &b| {
                        sz[b]
                            .partial_cmp(&sz[a])
                            .unwrap_or(std::cmp::Ordering::Equal)
                    });
                    current.permuted(&order)
                }
                Some(p) => track_branches(p, current).and_then(|m| {
                    if m.fallback {
                        notices.push(format!(
                            "ambiguous branch labels at grid index {fi}; using quasienergy order"
                        ));
                    }
                    current.permuted(&m.permutation)
                }),
            };
            match ordered {
                Ok(s) => {
                    prev = Some(s.clone());
                    solved[fi][g] = Ok(s);
                }
                Err(e) => solved[fi][g] = Err(e.to_string()),
            }
        }
    }
    solved
}

fn evaluate_row<T: Real>(
    plan: &SweepPlan<T>,
    spin: &SpinSystem<T>,
    f: T,
    sol: &FloquetSolution<T>,
    bath: Option<&BathSpec<T>>,
) -> Result<RowData<T>> {
    let drive = plan.drive.with_amplitude(f)?;
    let time_averaged_sz = cycle_averaged_sz(sol, spin);
    let m_equilibrium = bath.map(|b| {
        mean_m(
            spin,
            &boltzmann_reference(spin, drive.omega0_over_omega, b.beta_hbar_omega),
        )
    });
    let mut row = RowData {
        quasienergies: sol.quasienergies.clone(),
        occupations: None,
        time_averaged_sz,
        m_quasithermal: None,
        m_equilibrium,
        diagnostics: None,
    };
    if let (true, Some(bath)) = (plan.outputs.needs_rates(), bath) {
        let out = evaluate_point(spin, &drive, sol, bath)?;
        row.occupations = Some(out.occupations.p);
        row.m_quasithermal = Some(out.record.quasithermal_m);
        row.diagnostics = Some(out.rates.diagnostics);
    }
    Ok(row)
}
