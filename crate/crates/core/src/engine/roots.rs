//! Locating, refining and following roots of the quantization function in `eps`.

use rayon::prelude::*;

use crate::error::{AimError, Result};
use crate::problems::ProblemSetup;
use crate::symbolic::ExtReal;

use super::recurrence::{quantization_value, RecurrenceStart};
use super::AimOde;

/// Bisection stops once the bracket is narrower than this (reduced units).
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
/// Three consecutive iterations must agree to this to certify convergence.
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-9;

/// Successive differences growing over this many iterations flag oscillation.
const OSCILLATION_WINDOW: usize = 10;

/// An `eps` interval over which the quantization function changes sign.
#[derive(Clone, Debug, PartialEq)]
pub struct Bracket {
    pub lo: ExtReal,
    pub hi: ExtReal,
}

impl Bracket {
    pub fn contains(&self, eps: f64) -> bool {
        self.lo.to_f64() <= eps && eps <= self.hi.to_f64()
    }

    pub fn midpoint(&self) -> ExtReal {
        &(&self.lo + &self.hi) * 0.5
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceStatus {
    Converged,
    Oscillating,
    MaxIterations,
}

impl ConvergenceStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ConvergenceStatus::Converged => "converged",
            ConvergenceStatus::Oscillating => "oscillating",
            ConvergenceStatus::MaxIterations => "max-iterations",
        }
    }
}

/// A followed eigenvalue and how it settled.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    pub epsilon: ExtReal,
    pub e_physical: Option<ExtReal>,
    /// Position of the root in ascending order (radial quantum number).
    pub n_index: usize,
    pub l: u32,
    /// Iteration at which convergence was certified, or the last one run.
    pub k_converged: usize,
    pub trace: Vec<(usize, ExtReal)>,
    pub status: ConvergenceStatus,
}

fn sign(v: &ExtReal) -> i8 {
    v.signum()
}

fn q<O: AimOde + ?Sized>(ode: &O, k: usize, eps: &ExtReal) -> Result<ExtReal> {
    quantization_value(ode, eps, k, RecurrenceStart::FromOne)
}

/// Brackets every sign change of the quantization function on a uniform grid
/// over `[eps_min, eps_max]`, in ascending order.
pub fn scan_roots<O: AimOde + ?Sized>(
    ode: &O,
    k: usize,
    eps_min: &ExtReal,
    eps_max: &ExtReal,
    step: &ExtReal,
) -> Result<Vec<Bracket>> {
    if k < 2 {
        return Err(AimError::InvalidParameter(format!("scan needs k >= 2 (got {k})")));
    }
    if !step.is_positive() {
        return Err(AimError::InvalidParameter(format!("scan step must be > 0 (got {step})")));
    }
    if eps_max <= eps_min {
        return Ok(Vec::new());
    }
    let prec = ode.precision();
    let span = (eps_max - eps_min) / step;
    let intervals = span.to_f64().ceil().max(1.0) as usize;
    let grid: Vec<ExtReal> = (0..=intervals)
        .map(|i| {
            let x = eps_min + &(step * i as f64);
            if i == intervals || x > *eps_max {
                eps_max.with_precision(prec)
            } else {
                x.with_precision(prec)
            }
        })
        .collect();
    let values: Vec<ExtReal> = grid
        .par_iter()
        .map(|e| q(ode, k, e))
        .collect::<Result<_>>()?;

    let mut brackets = Vec::new();
    for i in 0..intervals {
        let (a, b) = (sign(&values[i]), sign(&values[i + 1]));
        if a == 0 || a * b < 0 {
            brackets.push(Bracket { lo: grid[i].clone(), hi: grid[i + 1].clone() });
        }
    }
    if sign(&values[intervals]) == 0 {
        brackets.push(Bracket { lo: grid[intervals].clone(), hi: grid[intervals].clone() });
    }
    Ok(brackets)
}

/// Bisects a sign-changing bracket down to width `tol`; returns the midpoint
/// of the final bracket (or an endpoint where the function vanishes exactly).
pub fn refine_root<O: AimOde + ?Sized>(ode: &O, k: usize, bracket: &Bracket, tol: &ExtReal) -> Result<ExtReal> {
    let prec = ode.precision();
    let mut lo = bracket.lo.with_precision(prec);
    let mut hi = bracket.hi.with_precision(prec);
    let f_lo = q(ode, k, &lo)?;
    if f_lo.is_zero() {
        return Ok(lo);
    }
    let f_hi = q(ode, k, &hi)?;
    if f_hi.is_zero() {
        return Ok(hi);
    }
    let s_lo = sign(&f_lo);
    if s_lo == sign(&f_hi) {
        return Err(AimError::SignChangeLost {
            k,
            lo: lo.to_string(),
            hi: hi.to_string(),
            reason: "no sign change over the input bracket".into(),
        });
    }
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) * 0.5;
        if mid <= lo || mid >= hi {
            // bracket is at the resolution of the working precision
            break;
        }
        let f_mid = q(ode, k, &mid).map_err(|e| AimError::SignChangeLost {
            k,
            lo: lo.to_string(),
            hi: hi.to_string(),
            reason: e.to_string(),
        })?;
        match sign(&f_mid) {
            0 => return Ok(mid),
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    Ok((&lo + &hi) * 0.5)
}

/// Root nearest to `guess`, searching outwards from `width` up to `max_width`.
fn locate_near<O: AimOde + ?Sized>(
    ode: &O,
    k: usize,
    guess: &ExtReal,
    width: ExtReal,
    max_width: &ExtReal,
    tol: &ExtReal,
) -> Result<Option<ExtReal>> {
    let f0 = q(ode, k, guess)?;
    if f0.is_zero() {
        return Ok(Some(guess.clone()));
    }
    let s0 = sign(&f0);
    let mut w = width;
    while w <= *max_width {
        let left = guess - &w;
        let right = guess + &w;
        let mut found: Vec<ExtReal> = Vec::new();
        if sign(&q(ode, k, &left)?) != s0 {
            found.push(refine_root(ode, k, &Bracket { lo: left, hi: guess.clone() }, tol)?);
        }
        if sign(&q(ode, k, &right)?) != s0 {
            found.push(refine_root(ode, k, &Bracket { lo: guess.clone(), hi: right }, tol)?);
        }
        if let Some(best) = found
            .into_iter()
            .min_by(|a, b| (a - guess).abs().partial_cmp(&(b - guess).abs()).unwrap())
        {
            return Ok(Some(best));
        }
        w = &w * 4.0;
    }
    Ok(None)
}

/// Follows the root near `approx_eps` through iterations `k_min..=k_max`,
/// warm-starting each from the previous one. With `stop` the walk ends at
/// the first certified convergence or detected oscillation.
fn follow<O: AimOde + ?Sized>(
    ode: &O,
    approx_eps: &ExtReal,
    k_min: usize,
    k_max: usize,
    tol: &ExtReal,
    stop: bool,
) -> Result<(Vec<(usize, ExtReal)>, ConvergenceStatus)> {
    if k_min < 2 || k_max < k_min {
        return Err(AimError::InvalidParameter(format!(
            "need 2 <= k_min <= k_max (got {k_min}, {k_max})"
        )));
    }
    if !tol.is_positive() {
        return Err(AimError::InvalidParameter(format!("tolerance must be > 0 (got {tol})")));
    }
    let prec = ode.precision();
    let root_tol = tol.clone().min(ExtReal::from_f64(DEFAULT_ROOT_TOL, prec));
    let scale = approx_eps.abs().max(ExtReal::one(prec));
    let max_width = &scale * 0.25;
    let floor = &root_tol * 1e3;

    let mut trace: Vec<(usize, ExtReal)> = Vec::new();
    let mut guess = approx_eps.with_precision(prec);
    let mut last_shift = &scale * 1e-3;
    let mut status = ConvergenceStatus::MaxIterations;

    for k in k_min..=k_max {
        let width = (&last_shift * 2.0).max(floor.clone());
        let Some(root) = locate_near(ode, k, &guess, width, &max_width, &root_tol)? else {
            return Err(AimError::BracketLost {
                k,
                near: guess.to_string(),
                trace: trace.iter().map(|(k, e)| (*k, e.to_string())).collect(),
            });
        };
        last_shift = (&root - &guess).abs();
        guess = root.clone();
        trace.push((k, root));

        if is_converged(&trace, tol) {
            status = ConvergenceStatus::Converged;
            if stop {
                break;
            }
        } else if is_oscillating(&trace) {
            status = ConvergenceStatus::Oscillating;
            if stop {
                break;
            }
        } else {
            status = ConvergenceStatus::MaxIterations;
        }
    }
    Ok((trace, status))
}

fn is_converged(trace: &[(usize, ExtReal)], tol: &ExtReal) -> bool {
    let n = trace.len();
    if n < 3 {
        return false;
    }
    let (a, b, c) = (&trace[n - 3].1, &trace[n - 2].1, &trace[n - 1].1);
    (b - a).abs() <= *tol && (c - b).abs() <= *tol && (c - a).abs() <= *tol
}

fn is_oscillating(trace: &[(usize, ExtReal)]) -> bool {
    let n = trace.len();
    if n < OSCILLATION_WINDOW + 2 {
        return false;
    }
    let diffs: Vec<ExtReal> = trace[n - OSCILLATION_WINDOW - 1..]
        .windows(2)
        .map(|w| (&w[1].1 - &w[0].1).abs())
        .collect();
    diffs.windows(2).all(|w| w[1] > w[0])
}

/// Warm-started trace of the root near `approx_eps` at every iteration in
/// `k_min..=k_max`, without stopping at convergence.
pub fn trace_roots<O: AimOde + ?Sized>(
    ode: &O,
    approx_eps: &ExtReal,
    k_min: usize,
    k_max: usize,
    tol: &ExtReal,
) -> Result<Vec<(usize, ExtReal)>> {
    follow(ode, approx_eps, k_min, k_max, tol, false).map(|(trace, _)| trace)
}

/// Follows the root near `approx_eps` until three consecutive iterations agree
/// within `tol`, oscillation sets in, or `k_max` is reached.
pub fn converge<O: AimOde + ?Sized>(
    ode: &O,
    approx_eps: &ExtReal,
    k_min: usize,
    k_max: usize,
    tol: &ExtReal,
) -> Result<EigenResult> {
    let (trace, status) = follow(ode, approx_eps, k_min, k_max, tol, true)?;
    let (k_last, epsilon) = trace.last().cloned().expect("k_min <= k_max gives at least one entry");
    Ok(EigenResult {
        epsilon,
        e_physical: None,
        n_index: 0,
        l: ode.angular_momentum(),
        k_converged: k_last,
        trace,
        status,
    })
}

/// Follows the root near `approx_eps` over every iteration in
/// `k_min..=k_max` and classifies the whole trace: `k_converged` is the first
/// iteration from which the three-in-a-row certificate holds to the end.
pub fn sweep<O: AimOde + ?Sized>(
    ode: &O,
    approx_eps: &ExtReal,
    k_min: usize,
    k_max: usize,
    tol: &ExtReal,
) -> Result<EigenResult> {
    let (trace, _) = follow(ode, approx_eps, k_min, k_max, tol, false)?;
    let held: Vec<bool> = (1..=trace.len()).map(|n| is_converged(&trace[..n], tol)).collect();
    let settled = held.iter().rposition(|h| !h).map_or(0, |i| i + 1);
    let (k_last, epsilon) = trace.last().cloned().expect("k_min <= k_max gives at least one entry");
    let (status, k_converged) = if settled < trace.len() {
        (ConvergenceStatus::Converged, trace[settled].0)
    } else if is_oscillating(&trace) {
        (ConvergenceStatus::Oscillating, k_last)
    } else {
        (ConvergenceStatus::MaxIterations, k_last)
    };
    Ok(EigenResult {
        epsilon,
        e_physical: None,
        n_index: 0,
        l: ode.angular_momentum(),
        k_converged,
        trace,
        status,
    })
}

/// Scan window in reduced energy.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRange {
    pub min: ExtReal,
    pub max: ExtReal,
    pub step: ExtReal,
}

impl ScanRange {
    /// `[-2, 4 gamma (n_max + l_max + 2)^2]` in 512 steps.
    pub fn default_for(gamma: &ExtReal, n_max: usize, l_max: u32) -> Self {
        let prec = gamma.precision();
        let min = ExtReal::from_f64(-2.0, prec);
        let reach = (n_max as f64 + l_max as f64 + 2.0).powi(2);
        let max = gamma * (4.0 * reach);
        let max = max.max(ExtReal::from_f64(2.0, prec));
        let step = &(&max - &min) / &ExtReal::from_f64(512.0, prec);
        ScanRange { min, max, step }
    }
}

/// Knobs for [`solve_state`].
#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Iteration used for the initial scan.
    pub k_scan: usize,
    /// First iteration of the convergence walk.
    pub k_min: usize,
    pub k_max: usize,
    pub tol: ExtReal,
    pub scan: Option<ScanRange>,
}

impl SolveOptions {
    pub fn new(prec: u32) -> Self {
        SolveOptions {
            k_scan: 30,
            k_min: 10,
            k_max: 120,
            tol: ExtReal::from_f64(DEFAULT_CONVERGENCE_TOL, prec),
            scan: None,
        }
    }
}

/// Eigenvalue with radial quantum number `n`: scan, take the `n`-th bracket,
/// refine, then follow it to convergence.
pub fn solve_state(setup: &ProblemSetup, n: usize, opts: &SolveOptions) -> Result<EigenResult> {
    let range = opts
        .scan
        .clone()
        .unwrap_or_else(|| ScanRange::default_for(&setup.reduced.gamma, n, setup.reduced.l));
    let brackets = scan_roots(setup, opts.k_scan, &range.min, &range.max, &range.step)?;
    let Some(bracket) = brackets.get(n) else {
        return Err(AimError::BracketLost {
            k: opts.k_scan,
            near: format!(
                "state n = {n}: only {} roots in [{}, {}]; widen the scan range",
                brackets.len(),
                range.min,
                range.max
            ),
            trace: Vec::new(),
        });
    };
    let prec = setup.precision();
    let root_tol = ExtReal::from_f64(DEFAULT_ROOT_TOL, prec).min(opts.tol.clone());
    let approx = refine_root(setup, opts.k_scan, bracket, &root_tol)?;
    // Walk up from k_min, but only keep the walk if it passes through the
    // scanned root; otherwise it locked onto a neighbour at low k.
    let k_min = opts.k_min.clamp(2, opts.k_scan);
    let early = converge(setup, &approx, k_min, opts.k_max, &opts.tol);
    let width = &bracket.hi - &bracket.lo;
    let on_track = |r: &EigenResult| {
        let at_scan = r.trace.iter().find(|(k, _)| *k == opts.k_scan).map_or(&r.epsilon, |(_, e)| e);
        (at_scan - &approx).abs() <= width
    };
    let mut result = match early {
        Ok(r) if on_track(&r) => r,
        _ => converge(setup, &approx, opts.k_scan, opts.k_max, &opts.tol)?,
    };
    result.n_index = n;
    Ok(result)
}
