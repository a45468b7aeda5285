//! Closed-form bound states for kappa = 0, -1, -2.
//!
//! All three reduce to a Kratzer-type problem `A'/r^2 - B'/r + const`:
//!
//! | kappa | constant shift | Coulomb strength | inverse-square strength |
//! |-------|----------------|------------------|-------------------------|
//! | 0     | `C`            | `B`              | `A`                     |
//! | -1    | 0              | `B - C`          | `A`                     |
//! | -2    | 0              | `B`              | `A + C`                 |
//!
//! with `E = shift - (m B'^2 / 2 hbar^2) (n + Lambda + 1)^-2` and
//! `R(r) = N r^(Lambda+1) exp(-eps r) 1F1(-n, 2 Lambda + 2; 2 eps r)`,
//! where `eps = (2 m B' / hbar^2) / (2 (n + Lambda + 1))`.

use crate::engine::RadialSample;
use crate::error::{AimError, Result};
use crate::problems::{effective_l, Kappa, PotentialParams};
use crate::symbolic::ExtReal;

/// Closed-form data of one `(n, l)` state.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm {
    pub kappa: Kappa,
    /// Effective angular momentum of the Kratzer-type problem.
    pub lambda_cf: ExtReal,
    /// Exponential decay rate of the eigenfunction (1/length).
    pub eps_cf: ExtReal,
    pub energy: ExtReal,
}

pub fn closed_form(params: &PotentialParams, n: u32, l: u32) -> Result<ClosedForm> {
    let k2m = params.two_m_over_hbar2();
    let zero = ExtReal::zero(params.precision());
    let (shift, coulomb, inverse_square) = match params.kappa {
        Kappa::Zero => (params.c.clone(), params.b.clone(), params.a.clone()),
        Kappa::MinusOne => {
            if params.c > params.b {
                return Err(AimError::InvalidParameter(format!(
                    "kappa = -1 has bound states only for B >= C (B = {}, C = {})",
                    params.b, params.c
                )));
            }
            (zero, &params.b - &params.c, params.a.clone())
        }
        Kappa::MinusTwo => (zero, params.b.clone(), &params.a + &params.c),
        k => return Err(AimError::WrongModule { kappa: k.value(), module: "iterative" }),
    };
    let lambda_cf = effective_l(l, &(&k2m * &inverse_square));
    let denom = &lambda_cf + (n as f64 + 1.0);
    let eps_cf = &(&k2m * &coulomb) / &(&denom * 2.0);
    let energy = &shift - &(&(&params.mass * &coulomb.square()) / &(&(&params.hbar.square() * 2.0) * &denom.square()));
    Ok(ClosedForm { kappa: params.kappa, lambda_cf, eps_cf, energy })
}

/// `E_nl` for kappa in {0, -1, -2}.
pub fn exact_energy(params: &PotentialParams, n: u32, l: u32) -> Result<ExtReal> {
    closed_form(params, n, l).map(|cf| cf.energy)
}

/// Terminating confluent hypergeometric series
/// `1F1(-n; b; x) = sum_{j=0..n} (-n)_j / (b)_j x^j / j!` for `neg_n = -n <= 0`.
pub fn kummer_terminating(neg_n: i64, b: &ExtReal, x: &ExtReal) -> Result<ExtReal> {
    if neg_n > 0 {
        return Err(AimError::InvalidParameter(format!(
            "first parameter must be a non-positive integer (got {neg_n})"
        )));
    }
    let b_f = b.to_f64();
    if b_f <= 0.0 && b_f.fract() == 0.0 && *b == ExtReal::from_f64(b_f, b.precision()) {
        return Err(AimError::Pole(b.to_string()));
    }
    let prec = b.precision().max(x.precision());
    let n = -neg_n;
    let mut term = ExtReal::one(prec);
    let mut sum = term.clone();
    for j in 0..n {
        // t_{j+1} = t_j (j - n) x / ((b + j)(j + 1))
        let num = x * (j - n) as f64;
        let den = &(b + j as f64) * (j + 1) as f64;
        term = &(&term * &num) / &den;
        sum += &term;
    }
    Ok(sum)
}

/// Eigenfunction sampled on `r_grid`, normalized to unit squared integral
/// (trapezoid rule) over the grid.
pub fn exact_wavefunction(params: &PotentialParams, n: u32, l: u32, r_grid: &[f64]) -> Result<Vec<RadialSample>> {
    let cf = closed_form(params, n, l)?;
    if !cf.eps_cf.is_positive() {
        return Err(AimError::InvalidParameter(format!(
            "no bound state: decay rate {} is not positive",
            cf.eps_cf
        )));
    }
    if r_grid.len() < 2 || r_grid.windows(2).any(|w| w[1] <= w[0]) || r_grid[0] <= 0.0 {
        return Err(AimError::InvalidParameter("r grid must be ascending, positive, >= 2 points".into()));
    }
    let prec = params.precision();
    let b = &(&cf.lambda_cf * 2.0) + 2.0;
    let power = &cf.lambda_cf + 1.0;
    // log-amplitude first so large r or large Lambda cannot overflow
    let mut logs = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let r_x = ExtReal::from_f64(r, prec);
        let poly = kummer_terminating(-(n as i64), &b, &(&(&cf.eps_cf * 2.0) * &r_x))?;
        let log_abs = &(&power * &r_x.ln()) - &(&cf.eps_cf * &r_x) + poly.abs().ln();
        logs.push((log_abs.to_f64(), poly.signum()));
    }
    Ok(normalize_samples(r_grid, &logs))
}

/// Turns `(ln|R|, sign)` pairs into samples with unit squared norm.
pub(crate) fn normalize_samples(r: &[f64], logs: &[(f64, i8)]) -> Vec<RadialSample> {
    let peak = logs
        .iter()
        .map(|l| l.0)
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs
        .iter()
        .map(|&(lg, s)| if s == 0 || !lg.is_finite() { 0.0 } else { s as f64 * (lg - peak).exp() })
        .collect();
    let norm2: f64 = r
        .windows(2)
        .zip(raw.windows(2))
        .map(|(rw, vw)| 0.5 * (rw[1] - rw[0]) * (vw[0] * vw[0] + vw[1] * vw[1]))
        .sum();
    let scale = if norm2 > 0.0 { norm2.sqrt().recip() } else { 1.0 };
    r.iter()
        .zip(raw)
        .map(|(&r, v)| RadialSample { r, value: v * scale })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::count_sign_changes;

    const P: u32 = 192;

    fn params(a: f64, b: f64, c: f64, kappa: i32) -> PotentialParams {
        PotentialParams::from_f64(a, b, c, kappa, 1.0, 1.0, P).unwrap()
    }

    fn x(v: f64) -> ExtReal {
        ExtReal::from_f64(v, P)
    }

    #[test]
    fn hydrogen_ground_state() {
        let e = exact_energy(&params(0.0, 1.0, 0.0, 0), 0, 0).unwrap();
        assert_eq!(e, x(-0.5));
    }

    #[test]
    fn constant_shift() {
        let e = exact_energy(&params(0.0, 1.0, 2.0, 0), 0, 0).unwrap();
        assert_eq!(e, x(1.5));
    }

    #[test]
    fn inverse_square_case() {
        let e = exact_energy(&params(1.0, 1.0, 1.0, -2), 0, 0).unwrap();
        let oracle = -0.5 / (0.5 + (0.25f64 + 4.0).sqrt()).powi(2);
        assert!((e.to_f64() - oracle).abs() < 1e-15);
        assert!((e.to_f64() + 0.076_201_4).abs() < 1e-7);
    }

    #[test]
    fn modified_kratzer_degenerate_at_b_equals_c() {
        for n in 0..3 {
            for l in 0..3 {
                let e = exact_energy(&params(0.7, 1.3, 1.3, -1), n, l).unwrap();
                assert!(e.is_zero());
            }
        }
        assert!(exact_energy(&params(0.0, 1.0, 2.0, -1), 0, 0).is_err());
    }

    #[test]
    fn iterative_kappas_are_rejected() {
        assert!(matches!(
            exact_energy(&params(0.0, 1.0, 1.0, 1), 0, 0),
            Err(AimError::WrongModule { kappa: 1, .. })
        ));
        assert!(exact_energy(&params(0.0, 1.0, 1.0, 2), 0, 0).is_err());
    }

    #[test]
    fn kummer_examples() {
        assert_eq!(kummer_terminating(0, &x(3.3), &x(7.1)).unwrap(), x(1.0));
        let v = kummer_terminating(-1, &x(2.0), &x(0.8)).unwrap();
        assert!((v.to_f64() - (1.0 - 0.4)).abs() < 1e-15);
        let v = kummer_terminating(-2, &x(3.0), &x(1.0)).unwrap();
        // direct three-term sum: 1 - 2/3 + 1/12
        let direct = x(1.0) - x(2.0) / x(3.0) + x(1.0) / x(12.0);
        assert!((&v - &direct).abs().to_f64() < 1e-50);
        assert!(matches!(kummer_terminating(-2, &x(-1.0), &x(1.0)), Err(AimError::Pole(_))));
        assert!(matches!(kummer_terminating(-2, &x(0.0), &x(1.0)), Err(AimError::Pole(_))));
        assert!(kummer_terminating(1, &x(2.0), &x(1.0)).is_err());
    }

    #[test]
    fn hydrogen_wavefunction_matches_textbook() {
        let grid: Vec<f64> = (0..3000).map(|i| 0.01 + i as f64 * (30.0 - 0.01) / 2999.0).collect();
        let samples = exact_wavefunction(&params(0.0, 1.0, 0.0, 0), 0, 0, &grid).unwrap();
        let textbook: Vec<f64> = grid.iter().map(|r| r * (-r).exp()).collect();
        let norm2: f64 = grid
            .windows(2)
            .zip(textbook.windows(2))
            .map(|(rw, v)| 0.5 * (rw[1] - rw[0]) * (v[0] * v[0] + v[1] * v[1]))
            .sum();
        for (s, t) in samples.iter().zip(&textbook) {
            let t = t / norm2.sqrt();
            assert!((s.value - t).abs() <= 1e-8 * t.abs().max(1e-300), "{} vs {}", s.value, t);
        }
    }

    #[test]
    fn node_count_equals_n() {
        let grid: Vec<f64> = (1..4000).map(|i| i as f64 * 0.02).collect();
        for kappa in [0, -1, -2] {
            for n in 0..4 {
                let w = exact_wavefunction(&params(0.5, 1.0, 0.3, kappa), n, 1, &grid).unwrap();
                let values: Vec<f64> = w.iter().map(|s| s.value).collect();
                assert_eq!(count_sign_changes(&values), n as usize, "kappa {kappa} n {n}");
                if n == 0 {
                    assert!(values.iter().all(|v| *v >= 0.0));
                }
            }
        }
    }
}
