//! Numerov shooting solver for the same radial problem, independent of the
//! iteration machinery. Works in double precision; it targets 6-8 digits.
//!
//! The radial function obeys `y'' = g(r) y` with
//! `g = (2m/hbar^2)(A/r^2 - B/r + C r^kappa - E) + l(l+1)/r^2`.
//! The eigenvalue is bracketed by node counting of the outward solution,
//! then refined by bisection on the Wronskian mismatch between outward and
//! inward solutions at the outer classical turning point.

use crate::error::{AimError, Result};
use crate::problems::{Kappa, PotentialParams};
use crate::symbolic::ExtReal;

const RESCALE_AT: f64 = 1e150;
/// Largest accepted `h^2 |g| / 12` from the barrier at the first Numerov step.
const STIFFNESS_LIMIT: f64 = 0.01;
const NODE_PHASE_REL_WIDTH: f64 = 1e-7;
const FINAL_REL_WIDTH: f64 = 1e-13;
/// Doubling the grid may move the eigenvalue by at most this (relative).
pub const RESOLUTION_TOL: f64 = 1e-6;

/// Uniform radial grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 1000;

    pub fn new(r_min: f64, r_max: f64, points: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(AimError::InvalidParameter(format!(
                "grid needs 0 < r_min < r_max (got {r_min}, {r_max})"
            )));
        }
        if points < Self::MIN_POINTS {
            return Err(AimError::InvalidParameter(format!(
                "grid needs at least {} points (got {points})",
                Self::MIN_POINTS
            )));
        }
        Ok(GridSpec { r_min, r_max, points })
    }

    pub fn step(&self) -> f64 {
        (self.r_max - self.r_min) / (self.points - 1) as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        self.r_min + i as f64 * self.step()
    }

    /// Same interval, twice the resolution.
    pub fn refined(&self) -> Self {
        GridSpec { points: 2 * self.points - 1, ..*self }
    }
}

/// Double-precision view of the potential.
#[derive(Clone, Copy, Debug)]
struct Radial {
    two_m: f64,
    a: f64,
    b: f64,
    c: f64,
    kappa: i32,
    centrifugal: f64,
    /// Exponent `s` and first Frobenius coefficient of `y ~ r^s (1 + a1 r)`.
    s: f64,
    a1: f64,
    coulomb: f64,
}

impl Radial {
    fn new(params: &PotentialParams, l: u32) -> Self {
        let two_m = params.two_m_over_hbar2().to_f64();
        let a = params.a.to_f64();
        let b = params.b.to_f64();
        let c = params.c.to_f64();
        let kappa = params.kappa.value();
        let centrifugal = (l * (l + 1)) as f64;
        let mut inv_sq = two_m * a + centrifugal;
        let mut coulomb = two_m * b;
        match params.kappa {
            Kappa::MinusTwo => inv_sq += two_m * c,
            Kappa::MinusOne => coulomb -= two_m * c,
            _ => {}
        }
        let s = 0.5 + (0.25 + inv_sq).sqrt();
        Radial { two_m, a, b, c, kappa, centrifugal, s, a1: -coulomb / (2.0 * s), coulomb }
    }

    /// Potential plus centrifugal term, in energy units.
    fn v_eff(&self, r: f64) -> f64 {
        self.a / (r * r) - self.b / r + self.c * r.powi(self.kappa) + self.centrifugal / (self.two_m * r * r)
    }

    fn g(&self, r: f64, e: f64) -> f64 {
        self.two_m * (self.v_eff(r) - e)
    }

    /// Ground energy of the problem without the non-negative confining term.
    fn kratzer_floor(&self) -> f64 {
        let shift = if self.kappa == 0 { self.c } else { 0.0 };
        shift - (self.coulomb * self.coulomb) / (4.0 * self.two_m * self.s * self.s)
    }

    /// Frobenius series `r^s (1 + a1 r + a2 r^2)` of the regular solution.
    fn regular(&self, r: f64, e: f64) -> f64 {
        let shift = if self.kappa == 0 { self.c } else { 0.0 };
        let constant = self.two_m * (shift - e);
        let a2 = (-self.coulomb * self.a1 + constant) / (2.0 * (2.0 * self.s + 1.0));
        r.powf(self.s) * (1.0 + r * (self.a1 + a2 * r))
    }

    /// First grid index where the centrifugal part of `h^2 g / 12` is small;
    /// closer in, the series is used instead of the stiff recursion.
    fn start_index(&self, grid: &GridSpec) -> usize {
        let barrier = self.s * (self.s - 1.0);
        let r_start = grid.step() * (barrier / (12.0 * STIFFNESS_LIMIT)).sqrt();
        let i = ((r_start - grid.r_min) / grid.step()).ceil().max(0.0) as usize;
        i.min(grid.points / 4)
    }
}

/// Outward Numerov sweep over the first `upto` points; returns the last two
/// values and the node count (all up to a common positive factor).
fn outward(rad: &Radial, grid: &GridSpec, e: f64, upto: usize) -> (f64, f64, usize) {
    let h2 = grid.step().powi(2) / 12.0;
    let i0 = rad.start_index(grid);
    let mut y0 = rad.regular(grid.r(i0), e);
    let mut y1 = rad.regular(grid.r(i0 + 1), e);
    let mut w0 = 1.0 - h2 * rad.g(grid.r(i0), e);
    let mut w1 = 1.0 - h2 * rad.g(grid.r(i0 + 1), e);
    let mut nodes = 0;
    for i in i0 + 2..upto {
        let w2 = 1.0 - h2 * rad.g(grid.r(i), e);
        let y2 = ((12.0 - 10.0 * w1) * y1 - w0 * y0) / w2;
        if (y2 < 0.0) != (y1 < 0.0) && y2 != 0.0 {
            nodes += 1;
        }
        y0 = y1;
        y1 = y2;
        w0 = w1;
        w1 = w2;
        if y1.abs() > RESCALE_AT {
            y0 /= RESCALE_AT;
            y1 /= RESCALE_AT;
        }
    }
    (y0, y1, nodes)
}

/// Inward sweep from `y(r_max) = 0` down to point `down_to`; returns values
/// at `down_to` and `down_to + 1`.
fn inward(rad: &Radial, grid: &GridSpec, e: f64, down_to: usize) -> (f64, f64) {
    let h2 = grid.step().powi(2) / 12.0;
    let last = grid.points - 1;
    let mut y_hi = 0.0;
    let mut y_mid = 1e-30;
    let mut w_hi = 1.0 - h2 * rad.g(grid.r(last), e);
    let mut w_mid = 1.0 - h2 * rad.g(grid.r(last - 1), e);
    let mut i = last - 1;
    while i > down_to {
        let w_lo = 1.0 - h2 * rad.g(grid.r(i - 1), e);
        let y_lo = ((12.0 - 10.0 * w_mid) * y_mid - w_hi * y_hi) / w_lo;
        y_hi = y_mid;
        y_mid = y_lo;
        w_hi = w_mid;
        w_mid = w_lo;
        if y_mid.abs() > RESCALE_AT {
            y_mid /= RESCALE_AT;
            y_hi /= RESCALE_AT;
        }
        i -= 1;
    }
    (y_mid, y_hi)
}

fn node_count(rad: &Radial, grid: &GridSpec, e: f64) -> usize {
    outward(rad, grid, e, grid.points).2
}

fn matching_index(rad: &Radial, grid: &GridSpec, e: f64) -> usize {
    let last = grid.points - 1;
    let turning = (0..=last).rev().find(|&i| rad.v_eff(grid.r(i)) < e).unwrap_or(last / 2);
    turning.clamp(rad.start_index(grid) + 2, last - 3)
}

/// Wronskian of outward and inward solutions across `[m, m + 1]`.
fn mismatch(rad: &Radial, grid: &GridSpec, e: f64, m: usize) -> f64 {
    let (o_m, o_m1, _) = outward(rad, grid, e, m + 2);
    let (i_m, i_m1) = inward(rad, grid, e, m);
    let scale_o = o_m.abs().max(o_m1.abs());
    let scale_i = i_m.abs().max(i_m1.abs());
    (o_m / scale_o) * (i_m1 / scale_i) - (o_m1 / scale_o) * (i_m / scale_i)
}

/// Energy of the state with `n` nodes on `grid`, in physical units.
pub fn numerov_eigenvalue(params: &PotentialParams, n: u32, l: u32, grid: &GridSpec) -> Result<ExtReal> {
    let rad = Radial::new(params, l);
    let n = n as usize;

    let v_min = (0..grid.points)
        .map(|i| rad.v_eff(grid.r(i)))
        .fold(f64::INFINITY, f64::min);
    if !v_min.is_finite() {
        return Err(AimError::InvalidParameter("potential is not bounded on the grid".into()));
    }
    // Near r_min the grid minimum can sit far below any bound state, where
    // Numerov is unstable; the Kratzer ground state is a rigorous floor.
    // Discretization can pull the lowest levels slightly below the floor,
    // so back off geometrically while staying above the grid minimum.
    let floor = rad.kratzer_floor();
    let mut margin = 0.05 * floor.abs().max(1e-3);
    let mut lo = v_min.max(floor - margin);
    while node_count(&rad, grid, lo) > n && lo > v_min {
        margin *= 4.0;
        lo = v_min.max(floor - margin);
    }
    if node_count(&rad, grid, lo) > n {
        return Err(AimError::WindowTooSmall(format!(
            "{} nodes already at the potential minimum",
            node_count(&rad, grid, lo)
        )));
    }
    let mut gap = lo.abs().max(1.0);
    let mut hi = lo + gap;
    let mut tries = 0;
    while node_count(&rad, grid, hi) <= n {
        lo = hi;
        gap *= 2.0;
        hi = lo + gap;
        tries += 1;
        if tries > 200 {
            return Err(AimError::WindowTooSmall(format!("no energy with {} nodes found", n + 1)));
        }
    }

    // phase 1: node counting
    while hi - lo > NODE_PHASE_REL_WIDTH * hi.abs().max(1e-3) {
        let mid = 0.5 * (lo + hi);
        if node_count(&rad, grid, mid) <= n {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // phase 2: Wronskian mismatch at a fixed matching point
    let m = matching_index(&rad, grid, 0.5 * (lo + hi));
    let mut f_lo = mismatch(&rad, grid, lo, m);
    let f_hi = mismatch(&rad, grid, hi, m);
    if f_lo * f_hi < 0.0 {
        while hi - lo > FINAL_REL_WIDTH * hi.abs().max(1e-3) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = mismatch(&rad, grid, mid, m);
            if f_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (f_mid < 0.0) == (f_lo < 0.0) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
    } else {
        while hi - lo > FINAL_REL_WIDTH * hi.abs().max(1e-3) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if node_count(&rad, grid, mid) <= n {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    Ok(ExtReal::from_f64(0.5 * (lo + hi), params.precision()))
}

/// Eigenvalue plus the shift observed when the grid is refined.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    /// Value on the refined grid.
    pub energy: ExtReal,
    pub coarse_energy: ExtReal,
    /// `|E(2N) - E(N)| / max(|E(2N)|, 1e-12)`.
    pub relative_shift: f64,
    pub resolution_warning: bool,
    pub grid: GridSpec,
}

/// Runs on `grid` and on its refinement; warns when they differ by more
/// than [`RESOLUTION_TOL`].
pub fn numerov_checked(params: &PotentialParams, n: u32, l: u32, grid: &GridSpec) -> Result<OracleReport> {
    let coarse = numerov_eigenvalue(params, n, l, grid)?;
    let fine_grid = grid.refined();
    let fine = numerov_eigenvalue(params, n, l, &fine_grid)?;
    let shift = (fine.to_f64() - coarse.to_f64()).abs() / fine.to_f64().abs().max(1e-12);
    Ok(OracleReport {
        energy: fine,
        coarse_energy: coarse,
        relative_shift: shift,
        resolution_warning: shift > RESOLUTION_TOL,
        grid: fine_grid,
    })
}

/// Length scale of the bound state, from whichever term binds it.
fn state_length(params: &PotentialParams, n: u32, l: u32) -> f64 {
    let rad = Radial::new(params, l);
    let principal = n as f64 + rad.s;
    let coulomb = match params.kappa {
        Kappa::MinusOne => rad.two_m * (rad.b - rad.c),
        _ => rad.two_m * rad.b,
    };
    let coulomb_len = if coulomb > 0.0 { 2.0 * principal * principal / coulomb } else { f64::INFINITY };
    let confine_len = if rad.kappa > 0 && rad.c > 0.0 {
        let p = rad.kappa as f64 + 2.0;
        principal * (rad.two_m * rad.c).powf(-1.0 / p)
    } else {
        f64::INFINITY
    };
    let len = coulomb_len.min(confine_len);
    if len.is_finite() {
        len
    } else {
        1.0
    }
}

/// Grid sized from the state's length scale, refined until two successive
/// doublings agree to `rel_tol`, then widened until a 1.5x larger box (at
/// the same resolution) no longer moves the result.
pub fn numerov_auto(params: &PotentialParams, n: u32, l: u32, rel_tol: f64) -> Result<OracleReport> {
    let len = state_length(params, n, l);
    let rad = Radial::new(params, l);
    let r_min = 1e-6 * len;
    let mut r_max = if params.kappa.value() > 0 && rad.c > 0.0 {
        12.0 * len
    } else {
        // exp(-kappa r) with kappa = principal / len must reach ~1e-20
        len * (2.0 + 50.0 / (n as f64 + rad.s))
    };
    let max_points = 1 << 22;
    let shift = |a: f64, b: f64| (a - b).abs() / a.abs().max(1e-12);
    let mut points = ((400.0 * r_max / len) as usize).max(4000);
    loop {
        let mut grid = GridSpec::new(r_min, r_max, points)?;
        let mut coarse = numerov_eigenvalue(params, n, l, &grid)?.to_f64();
        let (fine_grid, fine, shift_grid) = loop {
            let refined = grid.refined();
            let fine = numerov_eigenvalue(params, n, l, &refined)?.to_f64();
            let d = shift(fine, coarse);
            if d <= rel_tol || refined.points > max_points {
                break (refined, fine, d);
            }
            grid = refined;
            coarse = fine;
        };
        let wider = GridSpec::new(r_min, r_max * 1.5, fine_grid.points + fine_grid.points / 2)?;
        let wide = numerov_eigenvalue(params, n, l, &wider)?.to_f64();
        if shift(wide, fine) <= rel_tol || wider.points > max_points {
            return Ok(OracleReport {
                energy: ExtReal::from_f64(fine, params.precision()),
                coarse_energy: ExtReal::from_f64(coarse, params.precision()),
                relative_shift: shift_grid,
                resolution_warning: shift_grid > rel_tol.max(RESOLUTION_TOL),
                grid: fine_grid,
            });
        }
        r_max *= 1.5;
        points = grid.points + grid.points / 2;
    }
}

/// Outcome of comparing a candidate against an oracle value.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub pass: bool,
    pub abs_delta: f64,
    pub rel_delta: f64,
}

/// Pass iff `|d| <= abs_tol` or `|d| / max(|oracle|, abs_tol) <= rel_tol`.
pub fn compare(candidate: &ExtReal, oracle: &ExtReal, rel_tol: f64, abs_tol: f64) -> Comparison {
    let abs_delta = (candidate - oracle).abs().to_f64();
    let rel_delta = abs_delta / oracle.abs().to_f64().max(abs_tol);
    Comparison { pass: abs_delta <= abs_tol || rel_delta <= rel_tol, abs_delta, rel_delta }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64, c: f64, kappa: i32) -> PotentialParams {
        PotentialParams::from_f64(a, b, c, kappa, 1.0, 1.0, 64).unwrap()
    }

    fn x(v: f64) -> ExtReal {
        ExtReal::from_f64(v, 64)
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0.0, 1.0, 2000).is_err());
        assert!(GridSpec::new(1.0, 0.5, 2000).is_err());
        assert!(GridSpec::new(1e-3, 1.0, 999).is_err());
        let g = GridSpec::new(1.0, 2.0, 1001).unwrap();
        assert!((g.step() - 1e-3).abs() < 1e-15);
        assert_eq!(g.refined().points, 2001);
        assert_eq!(g.refined().step(), g.step() / 2.0);
    }

    #[test]
    fn hydrogen_ground_state() {
        let grid = GridSpec::new(1e-4, 40.0, 8000).unwrap();
        let e = numerov_eigenvalue(&params(0.0, 1.0, 0.0, 0), 0, 0, &grid).unwrap();
        assert!((e.to_f64() + 0.5).abs() < 1e-6, "{e}");
    }

    #[test]
    fn hydrogen_excited_states_have_requested_nodes() {
        let grid = GridSpec::new(1e-4, 80.0, 40000).unwrap();
        for (n, l, exact) in [(1, 0, -0.125), (0, 1, -0.125), (1, 1, -1.0 / 18.0)] {
            let e = numerov_eigenvalue(&params(0.0, 1.0, 0.0, 0), n, l, &grid).unwrap();
            assert!((e.to_f64() - exact).abs() < 1e-6, "n={n} l={l}: {e}");
        }
    }

    #[test]
    fn numerov_is_fourth_order() {
        // smooth case: 3D harmonic oscillator plus Coulomb, l = 1
        let p = params(0.0, 1.0, 1.0, 2);
        let base = GridSpec::new(1e-5, 8.0, 1000).unwrap();
        let e1 = numerov_eigenvalue(&p, 0, 1, &base).unwrap().to_f64();
        let e2 = numerov_eigenvalue(&p, 0, 1, &base.refined()).unwrap().to_f64();
        let e3 = numerov_eigenvalue(&p, 0, 1, &base.refined().refined()).unwrap().to_f64();
        let ratio = ((e3 - e2) / (e2 - e1)).abs();
        assert!(ratio <= 1.0 / 8.0, "ratio {ratio}");
    }

    #[test]
    fn spiked_oscillator_matches_tabulated() {
        let r = numerov_auto(&params(0.0, 1.0, 1.0, 2), 0, 0, 1e-9).unwrap();
        assert!((r.energy.to_f64() - 0.593_771_26).abs() < 1e-5);
        let r = numerov_auto(&params(0.0, 1.0, 5000.0, 2), 0, 0, 1e-9).unwrap();
        assert!((r.energy.to_f64() - 138.557_197_64).abs() / 138.56 < 1e-3);
    }

    #[test]
    fn checked_run_reports_shift() {
        let coarse = GridSpec::new(1e-4, 40.0, 1000).unwrap();
        let r = numerov_checked(&params(0.0, 1.0, 0.0, 0), 0, 0, &coarse).unwrap();
        assert!(r.relative_shift > 0.0);
        let fine = GridSpec::new(1e-4, 40.0, 40000).unwrap();
        let r = numerov_checked(&params(0.0, 1.0, 0.0, 0), 0, 0, &fine).unwrap();
        assert!(!r.resolution_warning);
    }

    #[test]
    fn compare_examples() {
        assert!(compare(&x(0.593_771_26), &x(0.593_771_3), 1e-5, 1e-8).pass);
        assert!(!compare(&x(0.6), &x(0.593_771_26), 1e-5, 1e-8).pass);
        let c = compare(&x(1.0), &x(2.0), 1e-3, 1e-8);
        assert_eq!(c.abs_delta, 1.0);
        assert_eq!(c.rel_delta, 0.5);
    }
}
