use std::path::PathBuf;

use aim_core::engine::ScanRange;
use aim_core::problems::{reduce, Kappa, PotentialParams, ReducedParams};
use aim_core::symbolic::{ExtReal, DEFAULT_PRECISION, MIN_PRECISION};

use crate::args::{CommandArgs, Format, Options};
use crate::error::CliError;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Solve,
    Converge,
    Exact,
    Table,
    Wavefunction,
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Converge => "converge",
            Command::Exact => "exact",
            Command::Table => "table",
            Command::Wavefunction => "wavefunction",
            Command::Oracle => "oracle",
        }
    }
}

/// Parameters in physical units, or the reduced pair directly.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Physical(PotentialParams),
    Reduced { a_tilde: ExtReal, gamma: ExtReal },
}

impl Potential {
    pub fn reduced(&self, l: u32) -> Result<ReducedParams, CliError> {
        match self {
            Potential::Physical(p) => Ok(reduce(p, l)?),
            Potential::Reduced { a_tilde, gamma } => Ok(ReducedParams::new(a_tilde.clone(), gamma.clone(), l)?),
        }
    }

    /// Physical parameters whose energies equal the reduced eigenvalues:
    /// `m = 1/2`, `hbar = 1`, `B = 1`, `A = A~`, `C = gamma^2`.
    pub fn physical_equivalent(&self, kappa: Kappa) -> Result<PotentialParams, CliError> {
        match self {
            Potential::Physical(p) => Ok(p.clone()),
            Potential::Reduced { a_tilde, gamma } => {
                let prec = a_tilde.precision().max(gamma.precision());
                Ok(PotentialParams::new(
                    a_tilde.clone(),
                    ExtReal::one(prec),
                    gamma.square(),
                    kappa,
                    ExtReal::from_ratio(1, 2, prec),
                    ExtReal::one(prec),
                )?)
            }
        }
    }

    pub fn is_physical(&self) -> bool {
        matches!(self, Potential::Physical(_))
    }

    /// `A~` and `gamma` for the record header; `gamma` is undefined when B = 0.
    pub fn header(&self) -> (Option<ExtReal>, Option<ExtReal>) {
        match self {
            Potential::Physical(p) => (Some(p.a_tilde()), reduce(p, 0).ok().map(|r| r.gamma)),
            Potential::Reduced { a_tilde, gamma } => (Some(a_tilde.clone()), Some(gamma.clone())),
        }
    }
}

/// Fully validated command line.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub kappa: Option<Kappa>,
    pub potential: Option<Potential>,
    pub n_list: Vec<u32>,
    pub l_list: Vec<u32>,
    pub betas: Vec<ExtReal>,
    pub tol: ExtReal,
    pub k_min: Option<usize>,
    pub k_max: Option<usize>,
    pub precision: u32,
    pub scan: Option<ScanRange>,
    pub r_max: Option<ExtReal>,
    pub points: usize,
    pub table: Option<u8>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_POINTS: usize = 400;

/// `2`, `0,1,3` or `0..2` (inclusive), sorted and deduplicated.
pub fn parse_list(text: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Validation(format!("cannot read quantum-number list {text:?}"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
            let hi = hi.trim().trim_start_matches('=');
            let hi: u32 = hi.parse().map_err(|_| bad())?;
            if hi < lo {
                return Err(bad());
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn number(text: &str, what: &str, prec: u32) -> Result<ExtReal, CliError> {
    ExtReal::parse(text, prec).map_err(|e| CliError::Validation(format!("--{what}: {e}")))
}

fn opt_number(text: &Option<String>, what: &str, prec: u32) -> Result<Option<ExtReal>, CliError> {
    text.as_deref().map(|t| number(t, what, prec)).transpose()
}

impl RunConfig {
    pub fn from_args(args: CommandArgs) -> Result<Self, CliError> {
        let (command, table, o) = match args {
            CommandArgs::Solve(o) => (Command::Solve, None, o),
            CommandArgs::Converge(o) => (Command::Converge, None, o),
            CommandArgs::Exact(o) => (Command::Exact, None, o),
            CommandArgs::Table { id, options } => (Command::Table, Some(id), options),
            CommandArgs::Wavefunction(o) => (Command::Wavefunction, None, o),
            CommandArgs::Oracle(o) => (Command::Oracle, None, o),
        };
        Self::build(command, table.as_deref(), &o)
    }

    fn build(command: Command, table: Option<&str>, o: &Options) -> Result<Self, CliError> {
        let precision = o.precision_bits.unwrap_or(DEFAULT_PRECISION);
        if precision < MIN_PRECISION {
            return Err(CliError::Validation(format!(
                "precision must be at least {MIN_PRECISION} bits (got {precision})"
            )));
        }
        let table = match table {
            None => None,
            Some(id) => match id.trim().parse::<u8>() {
                Ok(t @ 1..=5) => Some(t),
                _ => return Err(CliError::Validation(format!("unknown table {id:?} (choose 1-5)"))),
            },
        };

        let kappa = o.kappa.map(Kappa::try_from).transpose()?;
        if command != Command::Table && kappa.is_none() {
            return Err(CliError::Validation(format!("{} needs --kappa", command.name())));
        }
        if let Some(k) = kappa {
            match command {
                Command::Solve | Command::Converge if !k.is_iterative() => {
                    return Err(CliError::Validation(format!(
                        "kappa = {k} has closed-form levels; use `aim exact`"
                    )))
                }
                Command::Exact if k.is_iterative() => {
                    return Err(CliError::Validation(format!(
                        "kappa = {k} has no closed form; use `aim solve`"
                    )))
                }
                _ => {}
            }
        }

        let potential = if command == Command::Table {
            None
        } else if o.reduced {
            let a_tilde = opt_number(&o.a_tilde, "a-tilde", precision)?.unwrap_or_else(|| ExtReal::zero(precision));
            let gamma = opt_number(&o.gamma, "gamma", precision)?
                .ok_or_else(|| CliError::Validation("--reduced needs --gamma".into()))?;
            Some(Potential::Reduced { a_tilde, gamma })
        } else {
            let get = |v: &Option<String>, name: &str, default: i64| -> Result<ExtReal, CliError> {
                Ok(opt_number(v, name, precision)?.unwrap_or_else(|| ExtReal::from_i64(default, precision)))
            };
            let params = PotentialParams::new(
                get(&o.a, "A", 0)?,
                get(&o.b, "B", 1)?,
                get(&o.c, "C", 0)?,
                kappa.unwrap_or(Kappa::Zero),
                get(&o.mass, "mass", 1)?,
                get(&o.hbar, "hbar", 1)?,
            )?;
            Some(Potential::Physical(params))
        };

        let n_list = o.n.as_deref().map(parse_list).transpose()?.unwrap_or_else(|| vec![0]);
        let l_list = o.l.as_deref().map(parse_list).transpose()?.unwrap_or_else(|| vec![0]);

        let mut betas = o
            .beta
            .iter()
            .map(|b| number(b, "beta", precision))
            .collect::<Result<Vec<_>, _>>()?;
        if betas.iter().any(|b| !b.is_positive()) {
            return Err(CliError::Validation("beta must be > 0".into()));
        }
        if betas.is_empty() {
            let default = kappa.map_or(0.5, Kappa::default_beta);
            betas.push(ExtReal::from_f64(default, precision));
        }
        if betas.len() > 1 && command != Command::Converge {
            return Err(CliError::Validation("a list of beta values is only accepted by `converge`".into()));
        }
        if command == Command::Converge && (n_list.len() != 1 || l_list.len() != 1) {
            return Err(CliError::Validation("converge follows a single (n, l) state".into()));
        }

        let tol = opt_number(&o.tol, "tol", precision)?
            .unwrap_or_else(|| ExtReal::from_f64(aim_core::engine::DEFAULT_CONVERGENCE_TOL, precision));
        if !tol.is_positive() {
            return Err(CliError::Validation("--tol must be > 0".into()));
        }
        if let (Some(lo), Some(hi)) = (o.k_min, o.k_max) {
            if hi < lo {
                return Err(CliError::Validation(format!("--k-max {hi} is below --k-min {lo}")));
            }
        }
        if o.k_min.is_some_and(|k| k < 2) || o.k_max.is_some_and(|k| k < 2) {
            return Err(CliError::Validation("iteration numbers start at 2".into()));
        }

        let scan = match (&o.scan_min, &o.scan_max, &o.scan_step) {
            (None, None, None) => None,
            (Some(lo), Some(hi), step) => {
                let min = number(lo, "scan-min", precision)?;
                let max = number(hi, "scan-max", precision)?;
                if max <= min {
                    return Err(CliError::Validation("--scan-max must exceed --scan-min".into()));
                }
                let step = match step {
                    Some(s) => number(s, "scan-step", precision)?,
                    None => &(&max - &min) / &ExtReal::from_i64(512, precision),
                };
                if !step.is_positive() {
                    return Err(CliError::Validation("--scan-step must be > 0".into()));
                }
                Some(ScanRange { min, max, step })
            }
            _ => return Err(CliError::Validation("--scan-min and --scan-max go together".into())),
        };

        let r_max = opt_number(&o.r_max, "r-max", precision)?;
        if r_max.as_ref().is_some_and(|r| !r.is_positive()) {
            return Err(CliError::Validation("--r-max must be > 0".into()));
        }
        let points = o.points.unwrap_or(DEFAULT_POINTS);
        if points < aim_core::engine::MIN_GRID_POINTS {
            return Err(CliError::Validation(format!(
                "--points must be at least {}",
                aim_core::engine::MIN_GRID_POINTS
            )));
        }

        Ok(RunConfig {
            command,
            kappa,
            potential,
            n_list,
            l_list,
            betas,
            tol,
            k_min: o.k_min,
            k_max: o.k_max,
            precision,
            scan,
            r_max,
            points,
            table,
            format: o.format,
            out: o.out.clone(),
        })
    }

    /// Reduced-mode `solve` of one state, as a record would describe it.
    pub fn for_state(kappa: Kappa, a_tilde: ExtReal, gamma: ExtReal, beta: ExtReal, n: u32, l: u32) -> Self {
        let precision = a_tilde.precision().max(gamma.precision()).max(beta.precision());
        RunConfig {
            command: Command::Solve,
            kappa: Some(kappa),
            potential: Some(Potential::Reduced { a_tilde, gamma }),
            n_list: vec![n],
            l_list: vec![l],
            betas: vec![beta],
            tol: ExtReal::from_f64(aim_core::engine::DEFAULT_CONVERGENCE_TOL, precision),
            k_min: None,
            k_max: None,
            precision,
            scan: None,
            r_max: None,
            points: DEFAULT_POINTS,
            table: None,
            format: Format::Json,
            out: None,
        }
    }
}
