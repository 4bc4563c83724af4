//! Run configuration: command-line flags over `key = value` file entries
//! over built-in defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};

pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub value_name: &'static str,
    pub help: &'static str,
}

const fn key(
    name: &'static str,
    default: &'static str,
    value_name: &'static str,
    help: &'static str,
) -> Key {
    Key {
        name,
        default,
        value_name,
        help,
    }
}

pub const KEYS: &[Key] = &[
    key(
        "polarization",
        "right",
        "right|left|linear",
        "Drive polarization",
    ),
    key("two-j", "7", "INT", "Twice the spin quantum number"),
    key(
        "omega0",
        "0.1",
        "REAL",
        "Static field frequency omega0/omega",
    ),
    key("f-min", "0", "REAL", "First drive amplitude F/omega"),
    key("f-max", "2", "REAL", "Last drive amplitude F/omega"),
    key(
        "f-steps",
        "201",
        "INT",
        "Number of amplitudes (uniform grid)",
    ),
    key(
        "density",
        "constant,quadratic,gaussian",
        "LIST",
        "Bath spectral densities (comma separated)",
    ),
    key(
        "omega-c",
        "5",
        "REAL",
        "Centre omega_c/omega of the Gaussian density",
    ),
    key(
        "kbt",
        "1",
        "LIST",
        "Bath temperatures k_B T/(hbar omega) (comma separated)",
    ),
    key(
        "gamma",
        "1,0,0",
        "REAL,REAL,REAL",
        "Coupling vector (gamma_x, gamma_y, gamma_z)",
    ),
    key(
        "l-max",
        "32",
        "INT",
        "Largest Fourier harmonic in the rates",
    ),
    key(
        "freq-tol",
        "1e-9",
        "REAL",
        "Transition frequencies below this are skipped as resonant",
    ),
    key("n-t", "128", "INT", "Time samples per drive period"),
    key(
        "n-steps",
        "4096",
        "INT",
        "Integrator steps per drive period",
    ),
    key(
        "solver",
        "auto",
        "auto|analytic|numeric|checked",
        "Floquet solver; auto is analytic for circular and numeric for linear drives",
    ),
    key(
        "threads",
        "0",
        "INT",
        "Worker threads; 0 uses all available cores",
    ),
    key(
        "out",
        "-",
        "PATH",
        "Output file; - writes to standard output",
    ),
    key(
        "check",
        "all",
        "LIST",
        "Checks to run (comma separated) or all",
    ),
    key(
        "seed",
        "20240601",
        "INT",
        "Seed for the random parameter points of the checks",
    ),
    key("points", "20", "INT", "Random parameter points per check"),
];

pub const SPECTRUM_KEYS: &[&str] = &[
    "polarization",
    "two-j",
    "omega0",
    "f-min",
    "f-max",
    "f-steps",
    "n-t",
    "n-steps",
    "solver",
    "threads",
    "out",
];

pub const MAGNETIZATION_KEYS: &[&str] = &[
    "polarization",
    "two-j",
    "omega0",
    "f-min",
    "f-max",
    "f-steps",
    "density",
    "omega-c",
    "kbt",
    "gamma",
    "l-max",
    "freq-tol",
    "n-t",
    "n-steps",
    "solver",
    "threads",
    "out",
];

pub const VERIFY_KEYS: &[&str] = &[
    "two-j", "omega0", "n-t", "n-steps", "l-max", "check", "seed", "points", "threads", "out",
];

fn lookup(name: &str) -> &'static Key {
    KEYS.iter()
        .find(|k| k.name == name)
        .expect("key table entry")
}

fn with_keys(mut cmd: Command, names: &[&str]) -> Command {
    cmd = cmd.arg(
        Arg::new("config")
            .long("config")
            .value_name("PATH")
            .help("Configuration file of key = value lines; flags take precedence"),
    );
    for name in names {
        let k = lookup(name);
        cmd = cmd.arg(
            Arg::new(k.name)
                .long(k.name)
                .value_name(k.value_name)
                .help(k.help)
                .default_value(k.default),
        );
    }
    cmd
}

pub fn command() -> Command {
    Command::new("quasithermal")
        .about("Quasithermal steady states of a driven spin coupled to a heat bath")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("verbose")
                .short('v')
                .long("verbose")
                .action(ArgAction::Count)
                .global(true)
                .help("More log output on standard error (repeat for more)"),
        )
        .subcommand(with_keys(
            Command::new("spectrum").about("Folded quasienergies over an amplitude grid"),
            SPECTRUM_KEYS,
        ))
        .subcommand(with_keys(
            Command::new("magnetization").about(
                "Steady-state occupations and quasithermal magnetization over an amplitude grid",
            ),
            MAGNETIZATION_KEYS,
        ))
        .subcommand(with_keys(
            Command::new("verify").about("Run the built-in consistency checks"),
            VERIFY_KEYS,
        ))
}

/// Parse `key = value` lines; `#` starts a comment. Every key must be known.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key = value", n + 1))?;
        let k = k.trim();
        if !KEYS.iter().any(|key| key.name == k) {
            bail!("line {}: unknown key '{k}'", n + 1);
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            bail!("line {}: duplicate key '{k}'", n + 1);
        }
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config_text(&text).with_context(|| format!("in {}", path.display()))
}

/// Fully resolved values for one subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<&'static str, String>,
}

impl RunConfig {
    pub fn resolve(matches: &ArgMatches, names: &[&str]) -> Result<Self> {
        let file = match matches.get_one::<String>("config") {
            Some(p) => read_config(Path::new(p))?,
            None => BTreeMap::new(),
        };
        let mut values = BTreeMap::new();
        for name in names {
            let k = lookup(name);
            let cli = matches.get_one::<String>(k.name).cloned();
            let from_cli = matches.value_source(k.name) == Some(ValueSource::CommandLine);
            let v = match (from_cli, file.get(k.name)) {
                (true, _) | (false, None) => cli.unwrap_or_else(|| k.default.to_string()),
                (false, Some(v)) => v.clone(),
            };
            values.insert(k.name, v);
        }
        Ok(Self { values })
    }

    pub fn raw(&self, name: &str) -> Result<&str> {
        self.values
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| anyhow!("key '{name}' does not apply to this command"))
    }

    pub fn get<T: FromStr>(&self, name: &str) -> Result<T>
    where
        T::Err: Display,
    {
        let raw = self.raw(name)?;
        raw.trim()
            .parse()
            .map_err(|e| anyhow!("invalid value '{raw}' for {name}: {e}"))
    }

    pub fn list<T: FromStr>(&self, name: &str) -> Result<Vec<T>>
    where
        T::Err: Display,
    {
        let raw = self.raw(name)?;
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|e| anyhow!("invalid entry '{s}' for {name}: {e}"))
            })
            .collect()
    }

    /// `key = value` pairs for output headers.
    pub fn entries(&self) -> Vec<(String, String)> {
        self.values
            .iter()
            .map(|(k, v)| (format!("config.{k}"), v.clone()))
            .collect()
    }
}
