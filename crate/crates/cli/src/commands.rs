use aim_core::analytic::{closed_form, exact_energy, exact_wavefunction};
use aim_core::engine::{
    refine_root, scan_roots, solve_state, sweep, wavefunction, EigenResult, ScanRange, SolveOptions, DEFAULT_ROOT_TOL,
};
use aim_core::oracle::numerov_auto;
use aim_core::problems::{setup, to_physical, Kappa, PotentialParams, ProblemSetup};
use aim_core::symbolic::ExtReal;
use aim_core::AimError;
use rayon::prelude::*;

use crate::config::{Command, Potential, RunConfig};
use crate::error::CliError;
use crate::output::{render, Num, SampleRecord, StateRecord, TracePoint};
use crate::tables::run_table;
use crate::{EXIT_CONVERGENCE, EXIT_MISMATCH, EXIT_OK};

/// Rendered output plus the process exit code and any per-state diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
    pub messages: Vec<String>,
}

pub const CONVERGE_K_MIN: usize = 20;
pub const CONVERGE_K_MAX: usize = 90;
pub const TRACE_STEP: usize = 10;
const ORACLE_TOL: f64 = 1e-9;

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Solve => states(cfg, solve_one),
        Command::Converge => converge(cfg),
        Command::Exact => states(cfg, exact_one),
        Command::Oracle => states(cfg, oracle_one),
        Command::Wavefunction => wavefunctions(cfg),
        Command::Table => {
            let id = cfg.table.expect("validated table id");
            let cells = run_table(id, cfg.precision)?;
            let code = if cells.iter().all(|c| c.pass) { EXIT_OK } else { EXIT_MISMATCH };
            let messages = cells
                .iter()
                .filter(|c| !c.pass)
                .map(|c| format!("table {} {} {}: outside tolerance", c.table, c.row, c.column))
                .collect();
            Ok(Outcome { output: render(&cells, cfg.format)?, code, messages })
        }
    }
}

fn kappa(cfg: &RunConfig) -> Kappa {
    cfg.kappa.expect("validated kappa")
}

fn potential(cfg: &RunConfig) -> &Potential {
    cfg.potential.as_ref().expect("validated potential")
}

/// `(n, l)` pairs ordered by `n`, then `l`.
fn state_list(cfg: &RunConfig) -> Vec<(u32, u32)> {
    cfg.n_list.iter().flat_map(|&n| cfg.l_list.iter().map(move |&l| (n, l))).collect()
}

fn blank(cfg: &RunConfig, n: u32, l: u32) -> StateRecord {
    let (a_tilde, gamma) = potential(cfg).header();
    StateRecord {
        kappa: kappa(cfg).value(),
        a_tilde: a_tilde.as_ref().map(Num::from_ext),
        gamma: gamma.as_ref().map(Num::from_ext),
        beta: None,
        n,
        l,
        epsilon: None,
        e_physical: None,
        k_converged: None,
        status: "failed".into(),
        trace: None,
    }
}

fn physical_energy(cfg: &RunConfig, eps: &ExtReal) -> Result<Option<Num>, CliError> {
    match potential(cfg) {
        Potential::Physical(p) => Ok(Some(Num::from_ext(&to_physical(eps, p)?))),
        Potential::Reduced { .. } => Ok(None),
    }
}

fn state_setup(cfg: &RunConfig, beta: &ExtReal, l: u32) -> Result<ProblemSetup, CliError> {
    let reduced = potential(cfg).reduced(l)?;
    Ok(setup(&reduced, kappa(cfg), beta)?)
}

type StateFn = fn(&RunConfig, u32, u32, &mut StateRecord) -> Result<bool, CliError>;

/// Runs `one` over every requested state in parallel. Failed states keep a
/// record with status `failed`; the exit code is the worst seen.
fn states(cfg: &RunConfig, one: StateFn) -> Result<Outcome, CliError> {
    let results: Vec<(StateRecord, Result<bool, CliError>)> = state_list(cfg)
        .into_par_iter()
        .map(|(n, l)| {
            let mut rec = blank(cfg, n, l);
            let res = one(cfg, n, l, &mut rec);
            (rec, res)
        })
        .collect();
    let mut code = EXIT_OK;
    let mut messages = Vec::new();
    let mut records = Vec::with_capacity(results.len());
    for (rec, res) in results {
        match res {
            Ok(true) => {}
            Ok(false) => {
                code = code.max(EXIT_CONVERGENCE);
                messages.push(format!("n={} l={}: {}", rec.n, rec.l, rec.status));
            }
            Err(e) => {
                code = code.max(e.exit_code());
                messages.push(format!("n={} l={}: {e}", rec.n, rec.l));
            }
        }
        records.push(rec);
    }
    Ok(Outcome { output: render(&records, cfg.format)?, code, messages })
}

fn solve_options(cfg: &RunConfig) -> SolveOptions {
    let mut opts = SolveOptions::new(cfg.precision);
    if let Some(k) = cfg.k_max {
        opts.k_max = k;
    }
    if let Some(k) = cfg.k_min {
        opts.k_min = k;
        opts.k_max = opts.k_max.max(k);
    }
    opts.k_scan = opts.k_scan.min(opts.k_max);
    opts.tol = cfg.tol.clone();
    opts.scan = cfg.scan.clone();
    opts
}

fn solve_one(cfg: &RunConfig, n: u32, l: u32, rec: &mut StateRecord) -> Result<bool, CliError> {
    let beta = &cfg.betas[0];
    rec.beta = Some(Num::from_ext(beta));
    let s = state_setup(cfg, beta, l)?;
    let res = solve_state(&s, n as usize, &solve_options(cfg))?;
    fill(cfg, rec, &res)?;
    Ok(res.status == aim_core::engine::ConvergenceStatus::Converged)
}

fn fill(cfg: &RunConfig, rec: &mut StateRecord, res: &EigenResult) -> Result<(), CliError> {
    rec.epsilon = Some(Num::from_ext(&res.epsilon));
    rec.e_physical = physical_energy(cfg, &res.epsilon)?;
    rec.k_converged = Some(res.k_converged);
    rec.status = res.status.as_str().into();
    Ok(())
}

fn exact_one(cfg: &RunConfig, n: u32, l: u32, rec: &mut StateRecord) -> Result<bool, CliError> {
    let params = potential(cfg).physical_equivalent(kappa(cfg))?;
    let energy = exact_energy(&params, n, l)?;
    set_energy(cfg, rec, &params, &energy)?;
    rec.status = "exact".into();
    Ok(true)
}

fn set_energy(cfg: &RunConfig, rec: &mut StateRecord, params: &PotentialParams, energy: &ExtReal) -> Result<(), CliError> {
    if potential(cfg).is_physical() {
        rec.e_physical = Some(Num::from_ext(energy));
        rec.epsilon = params.to_reduced_energy(energy).ok().map(|e| Num::from_ext(&e));
    } else {
        rec.epsilon = Some(Num::from_ext(energy));
    }
    Ok(())
}

fn oracle_one(cfg: &RunConfig, n: u32, l: u32, rec: &mut StateRecord) -> Result<bool, CliError> {
    let params = potential(cfg).physical_equivalent(kappa(cfg))?;
    let report = numerov_auto(&params, n, l, ORACLE_TOL)?;
    set_energy(cfg, rec, &params, &report.energy)?;
    rec.status = if report.resolution_warning { "resolution-warning" } else { "converged" }.into();
    Ok(!report.resolution_warning)
}

/// Scans at `k_min`, refines the `n`-th root there and follows it over
/// every iteration up to `k_max`.
pub fn converge_state(
    s: &ProblemSetup,
    n: usize,
    k_min: usize,
    k_max: usize,
    tol: &ExtReal,
    scan: Option<&ScanRange>,
) -> Result<EigenResult, AimError> {
    let range = scan
        .cloned()
        .unwrap_or_else(|| ScanRange::default_for(&s.reduced.gamma, n, s.reduced.l));
    let brackets = scan_roots(s, k_min, &range.min, &range.max, &range.step)?;
    let bracket = brackets.get(n).ok_or_else(|| AimError::BracketLost {
        k: k_min,
        near: format!("state n = {n}: only {} roots in [{}, {}]", brackets.len(), range.min, range.max),
        trace: Vec::new(),
    })?;
    let root_tol = ExtReal::from_f64(DEFAULT_ROOT_TOL, s.precision()).min(tol.clone());
    let approx = refine_root(s, k_min, bracket, &root_tol)?;
    let mut res = sweep(s, &approx, k_min, k_max, tol)?;
    res.n_index = n;
    Ok(res)
}

fn converge(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (n, l) = (cfg.n_list[0], cfg.l_list[0]);
    let k_min = cfg.k_min.unwrap_or(CONVERGE_K_MIN);
    let k_max = cfg.k_max.unwrap_or(CONVERGE_K_MAX).max(k_min);
    let results: Vec<(StateRecord, Result<(), CliError>)> = cfg
        .betas
        .par_iter()
        .map(|beta| {
            let mut rec = blank(cfg, n, l);
            rec.beta = Some(Num::from_ext(beta));
            let res = (|| {
                let s = state_setup(cfg, beta, l)?;
                let r = converge_state(&s, n as usize, k_min, k_max, &cfg.tol, cfg.scan.as_ref())?;
                fill(cfg, &mut rec, &r)?;
                rec.trace = Some(
                    r.trace
                        .iter()
                        .filter(|(k, _)| (k - k_min).is_multiple_of(TRACE_STEP))
                        .map(|(k, e)| TracePoint { k: *k, epsilon: Num::from_ext(e) })
                        .collect(),
                );
                Ok(())
            })();
            (rec, res)
        })
        .collect();
    let mut code = EXIT_OK;
    let mut messages = Vec::new();
    let mut records = Vec::new();
    for (rec, res) in results {
        if let Err(e) = res {
            code = code.max(e.exit_code());
            messages.push(format!("beta={}: {e}", rec.beta.map_or(String::new(), |b| b.to_string())));
        }
        records.push(rec);
    }
    Ok(Outcome { output: render(&records, cfg.format)?, code, messages })
}

fn uniform(max: f64, points: usize) -> Vec<f64> {
    (1..=points).map(|i| i as f64 * max / points as f64).collect()
}

fn samples_for(cfg: &RunConfig, n: u32, l: u32) -> Result<Vec<SampleRecord>, CliError> {
    let kappa = kappa(cfg);
    let samples = if kappa.is_iterative() {
        let beta = &cfg.betas[0];
        let s = state_setup(cfg, beta, l)?;
        let res = solve_state(&s, n as usize, &solve_options(cfg))?;
        let r0 = s.reduced.r0.as_ref().map_or(1.0, ExtReal::to_f64);
        let u_max = match &cfg.r_max {
            Some(r) => (r.to_f64() / r0).sqrt(),
            None => default_u_max(kappa, s.reduced.gamma.to_f64(), n),
        };
        wavefunction(&s, &res.epsilon, res.k_converged, &uniform(u_max, cfg.points))?
    } else {
        let params = potential(cfg).physical_equivalent(kappa)?;
        let r_max = match &cfg.r_max {
            Some(r) => r.to_f64(),
            None => {
                let cf = closed_form(&params, n, l)?;
                let decay = cf.eps_cf.to_f64();
                if decay <= 0.0 {
                    return Err(AimError::InvalidParameter(format!("no bound state for n = {n}, l = {l}")).into());
                }
                (30.0 + 2.0 * (n as f64 + cf.lambda_cf.to_f64() + 1.0)) / decay
            }
        };
        exact_wavefunction(&params, n, l, &uniform(r_max, cfg.points))?
    };
    Ok(samples
        .into_iter()
        .map(|p| SampleRecord { kappa: kappa.value(), n, l, r: Num::new(p.r), value: Num::new(p.value) })
        .collect())
}

/// `u` at which the confining factor has fallen to about `e^-30`.
fn default_u_max(kappa: Kappa, gamma: f64, n: u32) -> f64 {
    let base = match kappa {
        Kappa::One => (45.0 / gamma).cbrt(),
        _ => (60.0 / gamma).powf(0.25),
    };
    base * (1.0 + 0.2 * n as f64)
}

fn wavefunctions(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let results: Vec<Result<Vec<SampleRecord>, CliError>> =
        state_list(cfg).into_par_iter().map(|(n, l)| samples_for(cfg, n, l)).collect();
    let mut records = Vec::new();
    for r in results {
        records.extend(r?);
    }
    Ok(Outcome { output: render(&records, cfg.format)?, code: EXIT_OK, messages: Vec::new() })
}
