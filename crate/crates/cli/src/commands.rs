//! Subcommand implementations. Each returns `Ok(true)` when every row and
//! check succeeded.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{bail, Context, Result};
use clap::ArgMatches;
use quasithermal::bath::{BathSpec, SpectralDensity};
use quasithermal::floquet::{DriveConfig, Polarization};
use quasithermal::pipeline::{SolverKind, SolverSettings};
use quasithermal::sweep::{run_sweep, write_csv, Outputs, SweepPlan};
use quasithermal::verify::{run_checks, VerifyConfig};
use quasithermal::SweepPlan64;

use crate::config::{RunConfig, MAGNETIZATION_KEYS, SPECTRUM_KEYS, VERIFY_KEYS};

pub fn run(matches: &ArgMatches) -> Result<bool> {
    let (name, sub) = matches.subcommand().context("missing subcommand")?;
    let keys = match name {
        "spectrum" => SPECTRUM_KEYS,
        "magnetization" => MAGNETIZATION_KEYS,
        "verify" => VERIFY_KEYS,
        other => bail!("unknown subcommand {other}"),
    };
    let cfg = RunConfig::resolve(sub, keys)?;
    init_threads(cfg.get("threads")?)?;
    match name {
        "spectrum" => sweep(&cfg, spectrum_plan(&cfg)?),
        "magnetization" => sweep(&cfg, magnetization_plan(&cfg)?),
        _ => verify(&cfg),
    }
}

fn init_threads(threads: usize) -> Result<()> {
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring worker threads")?;
    }
    Ok(())
}

fn output(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    let path = cfg.raw("out")?;
    Ok(if path == "-" {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {path}"))?,
        ))
    })
}

fn solver(cfg: &RunConfig, polarization: Polarization) -> Result<SolverSettings> {
    let kind = match cfg.raw("solver")? {
        "auto" if polarization.is_circular() => SolverKind::Analytic,
        "auto" => SolverKind::Numeric,
        other => other.parse::<SolverKind>()?,
    };
    Ok(SolverSettings {
        kind,
        n_t: cfg.get("n-t")?,
        n_steps: cfg.get("n-steps")?,
    })
}

fn base_plan(cfg: &RunConfig, outputs: Outputs) -> Result<SweepPlan64> {
    let polarization: Polarization = cfg.get("polarization")?;
    let steps: usize = cfg.get("f-steps")?;
    if steps == 0 {
        bail!("f-steps must be positive");
    }
    let (f_min, f_max): (f64, f64) = (cfg.get("f-min")?, cfg.get("f-max")?);
    if f_max < f_min {
        bail!("f-max must not be below f-min");
    }
    let f_grid = if f_max == f_min {
        vec![f_min]
    } else {
        SweepPlan::uniform_grid(f_min, f_max, steps)
    };
    Ok(SweepPlan {
        drive: DriveConfig::new(polarization, f_min, cfg.get("omega0")?)?,
        f_grid,
        bath_specs: Vec::new(),
        two_j: cfg.get("two-j")?,
        solver: solver(cfg, polarization)?,
        outputs,
        threads: None,
    })
}

pub fn spectrum_plan(cfg: &RunConfig) -> Result<SweepPlan64> {
    base_plan(cfg, Outputs::SPECTRUM)
}

pub fn magnetization_plan(cfg: &RunConfig) -> Result<SweepPlan64> {
    let mut plan = base_plan(cfg, Outputs::ALL)?;
    let omega_c: f64 = cfg.get("omega-c")?;
    let gamma: Vec<f64> = cfg.list("gamma")?;
    let gamma: [f64; 3] = gamma
        .try_into()
        .map_err(|_| anyhow::anyhow!("gamma needs exactly three components"))?;
    let l_max: usize = cfg.get("l-max")?;
    let tol: f64 = cfg.get("freq-tol")?;
    let kbts: Vec<f64> = cfg.list("kbt")?;
    let names: Vec<String> = cfg.list("density")?;
    if kbts.is_empty() || names.is_empty() {
        bail!("at least one density and one temperature are required");
    }
    for name in &names {
        let density = SpectralDensity::parse(name, omega_c)?;
        for &kbt in &kbts {
            if !(kbt > 0.0 && kbt.is_finite()) {
                bail!("kbt must be positive, got {kbt}");
            }
            plan.bath_specs.push(
                BathSpec::new(density, 1.0 / kbt, gamma)?
                    .with_l_max(l_max)
                    .with_freq_tolerance(tol)?,
            );
        }
    }
    Ok(plan)
}

fn sweep(cfg: &RunConfig, plan: SweepPlan64) -> Result<bool> {
    let result = run_sweep(&plan)?;
    let mut out = output(cfg)?;
    write_csv(&result, &cfg.entries(), &mut out)?;
    out.flush()?;
    let failed = result.failed_rows();
    if failed > 0 {
        log::error!("{failed} of {} rows failed", result.rows.len());
    }
    Ok(failed == 0)
}

pub fn verify_config(cfg: &RunConfig) -> Result<(VerifyConfig, Vec<String>)> {
    let v = VerifyConfig {
        two_j: cfg.get("two-j")?,
        omega0: cfg.get("omega0")?,
        n_t: cfg.get("n-t")?,
        n_steps: cfg.get("n-steps")?,
        l_max: cfg.get("l-max")?,
        seed: cfg.get("seed")?,
        points: cfg.get("points")?,
    };
    let only: Vec<String> = cfg.list("check")?;
    let only = if only.iter().any(|c| c == "all") {
        Vec::new()
    } else {
        only
    };
    Ok((v, only))
}

fn verify(cfg: &RunConfig) -> Result<bool> {
    let (v, only) = verify_config(cfg)?;
    let reports = run_checks(&v, &only)?;
    let mut out = output(cfg)?;
    for (k, val) in cfg.entries() {
        writeln!(out, "# {k} = {val}")?;
    }
    for r in &reports {
        writeln!(out, "{r}")?;
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    writeln!(out, "summary checks={} failed={failed}", reports.len())?;
    out.flush()?;
    Ok(failed == 0)
}
