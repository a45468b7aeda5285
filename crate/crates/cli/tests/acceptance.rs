//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::time::{Duration, Instant};

use aim_cli::output::CellRecord;
use aim_cli::tables::{
    run_table, table_one_cells, table_one_traces, table_three_cells, table_three_values, table_two_cells,
    table_two_traces,
};
use aim_core::analytic::exact_energy;
use aim_core::engine::{
    aim_step, count_sign_changes, initial_pair, solve_state, trace_roots, wavefunction, AimOde, AimPair,
    RecurrenceStart, SolveOptions,
};
use aim_core::oracle::{compare, numerov_auto};
use aim_core::problems::{reduce, setup, to_physical, Kappa, PotentialParams, ProblemSetup, ReducedParams};
use aim_core::symbolic::{ExtReal, LaurentPoly, DEFAULT_PRECISION};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

const P: u32 = DEFAULT_PRECISION;

fn x(v: f64) -> ExtReal {
    ExtReal::from_f64(v, P)
}

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

fn failed_cells(cells: &[CellRecord]) -> Vec<String> {
    cells
        .iter()
        .filter(|c| !c.pass)
        .map(|c| {
            let got = c.computed.map_or("none".to_string(), |v| v.to_string());
            format!("{} {}: {} vs expected {}", c.row, c.column, got, c.expected)
        })
        .collect()
}

fn cells_verdict(cells: &[CellRecord], extra: &str) -> (bool, String) {
    let bad = failed_cells(cells);
    let detail = if bad.is_empty() {
        format!("{} cells within tolerance{extra}", cells.len())
    } else {
        format!("{}/{} cells outside tolerance{extra}: {}", bad.len(), cells.len(), bad.join("; "))
    };
    (bad.is_empty(), detail)
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let cells = table_one_cells(&table_one_traces(P));
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(300);
    let (ok, detail) = cells_verdict(&cells, &format!(", sweep {:.0} s", elapsed.as_secs_f64()));
    Verdict::new(ok && fast, format!("table 1 sweep: {detail}"))
}

fn criterion_2() -> Verdict {
    let traces = table_two_traces(P);
    let (ok, detail) = cells_verdict(&table_two_cells(&traces), "");
    let late: Vec<String> = traces
        .iter()
        .zip(aim_cli::tables::T2_STATES)
        .filter_map(|(t, (n, l))| match t {
            Ok(r) if r.status == aim_core::engine::ConvergenceStatus::Converged && r.k_converged <= 70 => None,
            Ok(r) => Some(format!("n={n},l={l} {} at k={}", r.status.as_str(), r.k_converged)),
            Err(e) => Some(format!("n={n},l={l}: {e}")),
        })
        .collect();
    let certified = if late.is_empty() {
        "all states certified by k=70".to_string()
    } else {
        format!("not certified by k=70: {}", late.join("; "))
    };
    Verdict::new(ok && late.is_empty(), format!("table 2: {detail}; {certified}"))
}

fn criterion_3() -> Verdict {
    let values = table_three_values(P);
    let slowest = values.iter().map(|(_, d)| *d).max().unwrap_or_default();
    let fast = slowest < Duration::from_secs(10);
    let (ok, detail) = cells_verdict(
        &table_three_cells(&values),
        &format!(", slowest cell {:.1} s", slowest.as_secs_f64()),
    );
    Verdict::new(ok && fast, format!("table 3: {detail}"))
}

fn table_criterion(id: u8) -> Verdict {
    match run_table(id, P) {
        Ok(cells) => {
            let (ok, detail) = cells_verdict(&cells, "");
            Verdict::new(ok, format!("table {id}: {detail}"))
        }
        Err(e) => Verdict::new(false, format!("table {id}: {e}")),
    }
}

fn params(a: f64, b: f64, c: f64, kappa: i32) -> PotentialParams {
    PotentialParams::from_f64(a, b, c, kappa, 1.0, 1.0, P).unwrap()
}

fn exact_params(a: ExtReal, b: ExtReal, c: ExtReal, kappa: i32) -> PotentialParams {
    PotentialParams::new(a, b, c, Kappa::try_from(kappa).unwrap(), ExtReal::one(P), ExtReal::one(P)).unwrap()
}

fn criterion_6() -> Verdict {
    let e = exact_energy(&params(0.0, 1.0, 0.0, 0), 0, 0).unwrap();
    let hydrogen_err = (&e + 0.5).abs();
    let hydrogen = hydrogen_err <= ExtReal::from_f64(2f64.powi(-(P as i32) + 4), P);

    let tiny = x(1e-50);
    let mut broken = Vec::new();
    for a in [0.0, 0.3, 2.0] {
        for b in [0.7, 1.0, 3.5] {
            for c in [0.0, 0.25, 0.6] {
                for (n, l) in [(0, 0), (1, 2), (3, 1)] {
                    let base = exact_energy(&params(a, b, 0.0, 0), n, l).unwrap();
                    let shifted = exact_energy(&params(a, b, c, 0), n, l).unwrap();
                    if (&(&shifted - &base) - &x(c)).abs() > tiny {
                        broken.push(format!("C-shift A={a} B={b} C={c} n={n} l={l}"));
                    }
                    let screened = exact_energy(&params(a, b, c, -1), n, l).unwrap();
                    let reference = exact_energy(&exact_params(x(a), &x(b) - &x(c), x(0.0), 0), n, l).unwrap();
                    if (&screened - &reference).abs() > tiny {
                        broken.push(format!("B-C A={a} B={b} C={c} n={n} l={l}"));
                    }
                    let barrier = exact_energy(&params(a, b, c, -2), n, l).unwrap();
                    let joined = exact_energy(&exact_params(&x(a) + &x(c), x(b), x(0.0), 0), n, l).unwrap();
                    if (&barrier - &joined).abs() > tiny {
                        broken.push(format!("A+C A={a} B={b} C={c} n={n} l={l}"));
                    }
                }
            }
        }
    }
    Verdict::new(
        hydrogen && broken.is_empty(),
        format!(
            "hydrogen E = -0.5 (|err| {}); {} reduction identity failures{}",
            hydrogen_err.to_sig_string(3),
            broken.len(),
            if broken.is_empty() { String::new() } else { format!(": {}", broken.join("; ")) }
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut bad = Vec::new();
    let mut checked = 0;
    for kappa in [0, -1, -2] {
        for (a, c) in [(0.0, 0.0), (1.0, 0.5)] {
            let p = params(a, 1.0, c, kappa);
            for n in 0..=2 {
                for l in 0..=2 {
                    checked += 1;
                    let exact = exact_energy(&p, n, l).unwrap();
                    match numerov_auto(&p, n, l, 1e-8) {
                        Ok(o) if compare(&o.energy, &exact, 1e-6, 0.5e-6).pass => {}
                        Ok(o) => bad.push(format!("kappa={kappa} A={a} C={c} n={n} l={l}: {} vs {}", o.energy, exact)),
                        Err(e) => bad.push(format!("kappa={kappa} A={a} C={c} n={n} l={l}: {e}")),
                    }
                }
            }
        }
    }
    for c in [0.1, 1.0, 10.0] {
        checked += 1;
        let p = params(0.0, 1.0, c, 2);
        let s = setup(&reduce(&p, 0).unwrap(), Kappa::Two, &x(1.0)).unwrap();
        let aim = to_physical(&solve_state(&s, 0, &SolveOptions::new(P)).unwrap().epsilon, &p).unwrap();
        match numerov_auto(&p, 0, 0, 1e-9) {
            Ok(o) if compare(&o.energy, &aim, 1e-5, 0.0).pass => {}
            Ok(o) => bad.push(format!("C={c}: numerov {} vs aim {}", o.energy, aim)),
            Err(e) => bad.push(format!("C={c}: {e}")),
        }
    }
    Verdict::new(
        bad.is_empty(),
        format!("{checked} oracle comparisons, {} outside tolerance{}", bad.len(), if bad.is_empty() {
            String::new()
        } else {
            format!(": {}", bad.join("; "))
        }),
    )
}

fn poly_strategy() -> impl Strategy<Value = LaurentPoly> {
    (-3i32..=0, prop::collection::vec(-1.0e3f64..1.0e3, 1..=7))
        .prop_map(|(min_exp, coeffs)| LaurentPoly::from_dense(min_exp, coeffs.into_iter().map(x).collect()))
}

fn magnitude(p: &LaurentPoly, u: &ExtReal) -> ExtReal {
    p.terms().map(|(e, c)| &c.abs() * &u.powi(e)).fold(ExtReal::zero(P), |acc, t| &acc + &t)
}

fn close(got: &ExtReal, want: &ExtReal, scale: &ExtReal) -> Result<(), TestCaseError> {
    let bound = &x(10f64.powf(-(P as f64) * 0.28)) * &scale.clone().max(ExtReal::one(P));
    if (got - want).abs() <= bound {
        Ok(())
    } else {
        Err(TestCaseError::fail(format!("{got} vs {want}")))
    }
}

fn symbolic_properties() -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    runner
        .run(&(poly_strategy(), poly_strategy(), 0.2f64..3.0), |(p, q, u)| {
            let u = x(u);
            let (pu, qu) = (p.evaluate(&u).unwrap(), q.evaluate(&u).unwrap());
            let (mp, mq) = (magnitude(&p, &u), magnitude(&q, &u));
            close(&p.mul(&q).evaluate(&u).unwrap(), &(&pu * &qu), &(&mp * &mq))?;
            close(&p.add(&q).evaluate(&u).unwrap(), &(&pu + &qu), &(&mp + &mq))?;
            let lhs = p.mul(&q).differentiate().evaluate(&u).unwrap();
            let rhs = p.differentiate().mul(&q).add(&p.mul(&q.differentiate())).evaluate(&u).unwrap();
            close(&lhs, &rhs, &(&(&(&mp * &mq) * 12.0) / &u))
        })
        .map_err(|e| format!("symbolic: {e}"))
}

fn reduced_setup(kappa: Kappa, a_tilde: f64, gamma: f64, beta: f64, l: u32) -> ProblemSetup {
    setup(&ReducedParams::new(x(a_tilde), x(gamma), l).unwrap(), kappa, &x(beta)).unwrap()
}

fn degree_growth() -> Result<(), String> {
    let s = reduced_setup(Kappa::One, 1.0, 1.0, 0.5, 0);
    let (lambda0, s0) = (s.lambda0().clone(), s.s0(&x(2.36)));
    let mut pair = initial_pair(&lambda0, &s0, RecurrenceStart::FromOne);
    for k in 1..=40i32 {
        pair = aim_step(&pair, &lambda0, &s0);
        let top = pair.lambda.max_exp();
        if top != Some(3 * k + 3) || pair.lambda.min_exp() != -(k + 1) || pair.s.max_exp() != Some(3 * k + 6) {
            return Err(format!("degree growth breaks at k={k}"));
        }
    }
    Ok(())
}

fn pivot_roots() -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: 50, failure_persistence: None, ..Config::default() });
    runner
        .run(&(0.05f64..5.0, 0.05f64..20.0, 0.0f64..10.0, 0u32..6, any::<bool>()), |(beta, gamma, a, l, two)| {
            let kappa = if two { Kappa::Two } else { Kappa::One };
            let s = reduced_setup(kappa, a, gamma, beta, l);
            let at = s.lambda0().evaluate(s.u0()).unwrap();
            let scale = (&s.beta * &s.reduced.gamma) * s.u0().powi(3) + &s.reduced.lambda_big / s.u0();
            if at.abs() <= &scale * 1e-50 {
                Ok(())
            } else {
                Err(TestCaseError::fail(format!("lambda0(u0) = {at}")))
            }
        })
        .map_err(|e| format!("pivot: {e}"))
}

/// kappa, gamma, beta, u_max and the `(n, l)` states to check.
type NodeCase = (Kappa, f64, f64, f64, &'static [(u32, u32)]);

fn node_counts() -> Result<usize, String> {
    let cases: [NodeCase; 3] = [
        (Kappa::One, 1.0, 0.5, 3.0, &[(0, 0), (1, 0), (2, 0), (1, 1), (2, 2)]),
        (Kappa::Two, 1.0, 1.0, 2.5, &[(0, 0), (1, 2), (2, 1)]),
        (Kappa::Two, 10.0, 1.0, 1.4, &[(1, 0), (2, 2)]),
    ];
    let mut count = 0;
    for (kappa, gamma, beta, u_max, states) in cases {
        for &(n, l) in states {
            let s = reduced_setup(kappa, 1.0, gamma, beta, l);
            let res = solve_state(&s, n as usize, &SolveOptions::new(P)).map_err(|e| e.to_string())?;
            let grid: Vec<f64> = (1..=400).map(|i| i as f64 * u_max / 400.0).collect();
            let w = wavefunction(&s, &res.epsilon, res.k_converged, &grid).map_err(|e| e.to_string())?;
            let nodes = count_sign_changes(&w.iter().map(|p| p.value).collect::<Vec<_>>());
            if nodes != n as usize {
                return Err(format!("kappa={kappa} gamma={gamma} n={n} l={l} has {nodes} nodes"));
            }
            count += 1;
        }
    }
    Ok(count)
}

/// Same ODE, seeded one step earlier from `(1, 0)`.
struct ZeroStart<'a>(&'a ProblemSetup);

impl AimOde for ZeroStart<'_> {
    fn lambda0(&self) -> &LaurentPoly {
        self.0.lambda0()
    }

    fn s0(&self, epsilon: &ExtReal) -> LaurentPoly {
        let seed = AimPair { k: 0, lambda: LaurentPoly::constant(ExtReal::one(P)), s: LaurentPoly::zero() };
        aim_step(&seed, self.0.lambda0(), &self.0.s0(epsilon)).s
    }

    fn pivot(&self) -> &ExtReal {
        self.0.u0()
    }
}

fn zero_start() -> Result<(), String> {
    let s = reduced_setup(Kappa::One, 1.0, 1.0, 0.5, 0);
    let tol = x(1e-12);
    let one = trace_roots(&s, &x(2.3607), 20, 90, &tol).map_err(|e| e.to_string())?;
    let zero = trace_roots(&ZeroStart(&s), &x(2.3607), 20, 90, &tol).map_err(|e| e.to_string())?;
    for ((k, a), (_, b)) in one.iter().zip(&zero).filter(|((k, _), _)| k % 10 == 0) {
        if (a - b).abs() > x(1e-8) {
            return Err(format!("zero start differs at k={k}: {a} vs {b}"));
        }
    }
    Ok(())
}

fn criterion_8() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    let mut record = |name: &str, r: Result<String, String>| match r {
        Ok(s) => parts.push(format!("{name} ok{s}")),
        Err(e) => {
            pass = false;
            parts.push(format!("{name} FAILED ({e})"));
        }
    };
    record("symbolic (1000 cases)", symbolic_properties().map(|_| String::new()));
    record("degree growth to k=40", degree_growth().map(|_| String::new()));
    record("pivot (50 cases)", pivot_roots().map(|_| String::new()));
    record("node count", node_counts().map(|n| format!(" on {n} states")));
    record("zero start", zero_start().map(|_| String::new()));
    Verdict::new(pass, parts.join(", "))
}

fn main() {
    let criteria: [(u32, fn() -> Verdict); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, || table_criterion(4)),
        (5, || table_criterion(5)),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let v = run();
        if !v.pass {
            failed += 1;
        }
        println!("{} criterion {id}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
