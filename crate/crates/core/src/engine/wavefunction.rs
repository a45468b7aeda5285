//! Radial functions from the generator `f(u) = exp(-int s_k / lambda_k du)`.
//!
//! Zeros `u_j` of `lambda_k` inside the grid are simple poles of the
//! integrand with residue `c_j = s_k(u_j) / lambda_k'(u_j)`. They are split
//! off analytically, `f = prod |u - u_j|^(-c_j) exp(-int alpha_reg)`, and
//! only the smooth remainder `alpha_reg` is integrated (cumulative
//! trapezoid from the left edge of the grid). A residue near `-1` is a node
//! of the wavefunction and flips its sign.

use crate::analytic::normalize_samples;
use crate::error::{AimError, Result};
use crate::problems::ProblemSetup;
use crate::symbolic::{ExtReal, LaurentPoly};

use super::recurrence::{Recurrence, RecurrenceStart};

/// Smallest accepted grid.
pub const MIN_GRID_POINTS: usize = 64;

/// Grid points closer than this (relative) to a pole are re-evaluated.
const POLE_EXCLUSION: f64 = 1e-6;

/// Root search subdivides each grid interval this many times.
const ROOT_SCAN_REFINEMENT: usize = 8;

/// One sample of a radial function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialSample {
    pub r: f64,
    pub value: f64,
}

/// Sign changes in a sampled function, ignoring exact zeros.
pub fn count_sign_changes(values: &[f64]) -> usize {
    let mut count = 0;
    let mut last = 0.0f64;
    for &v in values {
        if v == 0.0 || !v.is_finite() {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

struct Pole {
    at: ExtReal,
    residue: ExtReal,
}

fn bisect_root(p: &LaurentPoly, mut lo: ExtReal, mut hi: ExtReal) -> Result<ExtReal> {
    let s_lo = p.evaluate(&lo)?.signum();
    for _ in 0..(lo.precision() as usize + 8) {
        let mid = (&lo + &hi) * 0.5;
        if mid <= lo || mid >= hi {
            break;
        }
        let s = p.evaluate(&mid)?.signum();
        if s == 0 {
            return Ok(mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((&lo + &hi) * 0.5)
}

fn find_poles(lambda: &LaurentPoly, s: &LaurentPoly, grid: &[ExtReal]) -> Result<Vec<Pole>> {
    let prec = lambda.precision();
    let mut fine = Vec::with_capacity(grid.len() * ROOT_SCAN_REFINEMENT);
    for w in grid.windows(2) {
        let h = &(&w[1] - &w[0]) / &ExtReal::from_f64(ROOT_SCAN_REFINEMENT as f64, prec);
        for j in 0..ROOT_SCAN_REFINEMENT {
            fine.push(&w[0] + &(&h * j as f64));
        }
    }
    fine.push(grid[grid.len() - 1].clone());

    let values = fine.iter().map(|u| lambda.evaluate(u)).collect::<Result<Vec<_>>>()?;
    let d_lambda = lambda.differentiate();
    let mut poles = Vec::new();
    for i in 0..fine.len() - 1 {
        let (a, b) = (values[i].signum(), values[i + 1].signum());
        let at = if a == 0 {
            fine[i].clone()
        } else if a * b < 0 {
            bisect_root(lambda, fine[i].clone(), fine[i + 1].clone())?
        } else {
            continue;
        };
        let slope = d_lambda.evaluate(&at)?;
        if slope.is_zero() {
            return Err(AimError::SingularIntegrand(format!(
                "lambda_k has a multiple root at u = {at}"
            )));
        }
        let residue = &s.evaluate(&at)? / &slope;
        poles.push(Pole { at, residue });
    }
    Ok(poles)
}

fn regular_part(lambda: &LaurentPoly, s: &LaurentPoly, poles: &[Pole], u: &ExtReal) -> Result<ExtReal> {
    let mut alpha = (&s.evaluate(u)? / &lambda.evaluate(u)?).finite_or("s_k / lambda_k")?;
    for p in poles {
        alpha -= &(&p.residue / &(u - &p.at));
    }
    Ok(alpha)
}

/// Regular part at `u`, replaced by the average over `u (1 -+ d)` when `u`
/// sits within the exclusion zone of a pole.
fn regular_part_guarded(lambda: &LaurentPoly, s: &LaurentPoly, poles: &[Pole], u: &ExtReal) -> Result<ExtReal> {
    let near = poles
        .iter()
        .any(|p| (u - &p.at).abs() <= &p.at.abs() * POLE_EXCLUSION);
    if !near {
        return regular_part(lambda, s, poles, u);
    }
    let d = POLE_EXCLUSION * 4.0;
    let left = regular_part(lambda, s, poles, &(u * (1.0 - d)))?;
    let right = regular_part(lambda, s, poles, &(u * (1.0 + d)))?;
    let avg = (&left + &right) * 0.5;
    if !avg.is_finite() {
        return Err(AimError::SingularIntegrand(format!("pole of s_k / lambda_k at u = {u}")));
    }
    Ok(avg)
}

/// Radial function `R(r)` for the reduced eigenvalue `epsilon`, built from
/// `lambda_k` and `s_k` on the `u` grid and mapped to `r = r0 u^2` (or
/// `rho = u^2` when no length scale is known). Normalized to unit squared
/// integral over the mapped grid.
pub fn wavefunction(setup: &ProblemSetup, epsilon: &ExtReal, k: usize, u_grid: &[f64]) -> Result<Vec<RadialSample>> {
    if u_grid.len() < MIN_GRID_POINTS {
        return Err(AimError::InvalidParameter(format!(
            "wavefunction grid needs at least {MIN_GRID_POINTS} points (got {})",
            u_grid.len()
        )));
    }
    if u_grid[0] <= 0.0 || u_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AimError::InvalidParameter("u grid must be positive and strictly ascending".into()));
    }
    let prec = setup.precision();
    let eps = epsilon.with_precision(prec);
    let pair = Recurrence::new(setup, &eps, RecurrenceStart::FromOne)
        .nth(k)
        .expect("recurrence is infinite");
    let (lambda, s) = (&pair.lambda, &pair.s);
    let grid: Vec<ExtReal> = u_grid.iter().map(|&u| ExtReal::from_f64(u, prec)).collect();
    let poles = find_poles(lambda, s, &grid)?;

    let alpha = grid
        .iter()
        .map(|u| regular_part_guarded(lambda, s, &poles, u))
        .collect::<Result<Vec<_>>>()?;
    let mut integral = ExtReal::zero(prec);
    let mut cumulative = Vec::with_capacity(grid.len());
    cumulative.push(integral.clone());
    for i in 1..grid.len() {
        let h = &grid[i] - &grid[i - 1];
        integral += &(&(&alpha[i] + &alpha[i - 1]) * &(&h * 0.5));
        cumulative.push(integral.clone());
    }

    let gamma_beta = &setup.reduced.gamma * &setup.beta;
    let power = &setup.reduced.lambda_big + 1.5;
    let r0 = setup
        .reduced
        .r0
        .as_ref()
        .map(ExtReal::to_f64)
        .unwrap_or(1.0);

    let mut logs = Vec::with_capacity(grid.len());
    for (u, int) in grid.iter().zip(&cumulative) {
        // ln R = (Lambda + 3/2) ln u - gamma beta u^4 / 2 + ln|f|
        let mut log_abs = &(&power * &u.ln()) - &(&(&gamma_beta * &u.powi(4)) * 0.5) - int;
        let mut sign = 1i8;
        for p in &poles {
            let dist = u - &p.at;
            if dist.is_zero() {
                sign = 0;
                continue;
            }
            log_abs -= &(&p.residue * &dist.abs().ln());
            let order = (-p.residue.to_f64()).round() as i64;
            if order.rem_euclid(2) == 1 && dist.is_sign_negative() {
                sign = -sign;
            }
        }
        logs.push((log_abs.to_f64(), sign));
    }
    let r: Vec<f64> = u_grid.iter().map(|u| r0 * u * u).collect();
    Ok(normalize_samples(&r, &logs))
}
