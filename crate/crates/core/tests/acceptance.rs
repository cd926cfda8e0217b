//! Acceptance checks. Each criterion prints one `PASS`/`FAIL` line; the
//! process exits non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use ccpb::analysis::{
    classify_regime, explicit_solution_error, l_ab_numeric, predicted_error, regime_boundaries, screening_length,
    Regime,
};
use ccpb::donnan::{channel_bath_ratio, electrode_bulk_ratio, nondim_voltage};
use ccpb::fd::solve_fd_oracle;
use ccpb::kernel::{sup_approx_error, ApproxVariant, Eps};
use ccpb::output::{validate_profile, ProfileData, Record};
use ccpb::solver::{solve, solve_asymptotic, CcpbSolution, ProblemParams, SolveOptions};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (u32, fn() -> Outcome, Duration);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn approx_scaling(variant: ApproxVariant, bound: impl Fn(f64) -> f64, target: f64) -> Outcome {
    let eps = log_space(1e-4, 1e-1, 20);
    let mut ln_e = Vec::new();
    let mut ln_err = Vec::new();
    let mut worst_ratio = 0.0f64;
    for &e in &eps {
        let s = sup_approx_error(Eps::new(e).unwrap(), variant, 10.0, 2000, 1e-13).unwrap();
        ln_e.push(e.ln());
        ln_err.push(s.sup.ln());
        worst_ratio = worst_ratio.max(s.sup / bound(e));
    }
    let k = slope(&ln_e, &ln_err);
    let pass = (k - target).abs() <= 0.05 && worst_ratio <= 1.5;
    outcome(
        pass,
        format!("slope {k:.4} (target {target} +- 0.05), max error/bound {worst_ratio:.4} (<= 1.5)"),
    )
}

fn criterion_1() -> Outcome {
    approx_scaling(ApproxVariant::Crude, |e| 2.0 * e.sqrt(), 0.5)
}

fn criterion_2() -> Outcome {
    approx_scaling(ApproxVariant::Refined, |e| 2.0 * e, 1.0)
}

fn criterion_3() -> Outcome {
    let v = 5.0;
    let lengths: Vec<f64> = (0..=12).map(|k| 10.0 + 2.5 * k as f64).collect();
    let mut ln_err = Vec::new();
    let mut at_15 = f64::NAN;
    let mut outside = Vec::new();
    for &l in &lengths {
        let sol = solve(&ProblemParams::new(l, v).unwrap(), SolveOptions::default()).unwrap();
        let e = explicit_solution_error(&sol, 2000).unwrap();
        let ratio = e.sup / predicted_error(v, l);
        if !(0.5..=2.0).contains(&ratio) {
            outside.push(format!("L={l}: {ratio:.3}"));
        }
        if l == 15.0 {
            at_15 = e.sup;
        }
        ln_err.push(e.sup.ln());
    }
    let k = slope(&lengths, &ln_err);
    let value_ok = (at_15 - 0.009).abs() <= 0.005;
    let slope_ok = (k + 0.5).abs() <= 0.03;
    let pass = value_ok && outside.is_empty() && slope_ok;
    let outside = if outside.is_empty() {
        "none".to_string()
    } else {
        outside.join(", ")
    };
    outcome(
        pass,
        format!(
            "sup error at L=15 {at_15:.4} (0.009 +- 0.005), ratio to predicted outside [0.5, 2]: {outside}, slope {k:.4} (-0.5 +- 0.03)"
        ),
    )
}

/// `∫_{-L/2}^{L/2} f(φ(x)) dx` by 5-point Gauss-Legendre on panels graded
/// geometrically toward both walls.
fn domain_integral(sol: &CcpbSolution, f: impl Fn(f64) -> f64) -> f64 {
    const GL: [(f64, f64); 5] = [
        (-0.906_179_845_938_664, 0.236_926_885_056_189),
        (-0.538_469_310_105_683, 0.478_628_670_499_366),
        (0.0, 0.568_888_888_888_889),
        (0.538_469_310_105_683, 0.478_628_670_499_366),
        (0.906_179_845_938_664, 0.236_926_885_056_189),
    ];
    let half = 0.5 * sol.params.length;
    let mut dists = vec![0.0];
    dists.extend(log_space(1e-6, half, 300));
    let mut total = 0.0;
    for w in dists.windows(2) {
        let (a, b) = (half - w[1], half - w[0]);
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        for &(node, weight) in &GL {
            let x = c + r * node;
            total += weight * r * (f(sol.phi_of_x(x).unwrap()) + f(sol.phi_of_x(-x).unwrap()));
        }
    }
    total
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_odd = 0.0f64;
    let mut worst_mean = 0.0f64;
    for &v in &[-8.0, -2.0, 0.5, 3.0, 10.0] {
        for &l in &[2.0, 8.0, 20.0, 45.0, 120.0] {
            let sol = solve(&ProblemParams::new(l, v).unwrap(), SolveOptions::default()).unwrap();
            let half = 0.5 * l;
            let xs: Vec<f64> = (0..=400).map(|k| half * k as f64 / 400.0).collect();
            let phis: Vec<f64> = xs.iter().map(|&x| sol.phi_of_x(x).unwrap()).collect();
            for (&x, &p) in xs.iter().zip(&phis) {
                worst_odd = worst_odd.max((sol.phi_of_x(-x).unwrap() + p).abs());
            }
            let monotone = phis.windows(2).all(|w| (w[1] - w[0]) * v.signum() > 0.0)
                && sol.samples.windows(2).all(|w| w[1].x > w[0].x);
            let centered = sol.phi_of_x(0.0).unwrap() == 0.0;
            let mean_p = sol.alpha * domain_integral(&sol, |p| (-p).exp()) / l;
            let mean_n = sol.alpha * domain_integral(&sol, f64::exp) / l;
            let mean_err = (mean_p - 1.0).abs().max((mean_n - 1.0).abs());
            worst_mean = worst_mean.max(mean_err);
            if !monotone || !centered || mean_err > 1e-6 {
                failures.push(format!("(V={v}, L={l})"));
            }
        }
    }
    let pass = failures.is_empty() && worst_odd <= 1e-8;
    let failures = if failures.is_empty() {
        "none".to_string()
    } else {
        failures.join(" ")
    };
    outcome(
        pass,
        format!("25 pairs, oddness {worst_odd:.2e} (<= 1e-8), mean error {worst_mean:.2e} (<= 1e-6), failing pairs: {failures}"),
    )
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_case = String::new();
    for &delta in &[0.0, 0.05] {
        for &v in &[1.0, 5.0, 10.0] {
            for &l in &[15.0, 30.0, 60.0] {
                let params = ProblemParams::with_stern(l, v, delta).unwrap();
                let exact = solve(&params, SolveOptions::default()).unwrap();
                let fd = solve_fd_oracle(&params, 2001).unwrap();
                let sup =
                    fd.x.iter()
                        .zip(&fd.phi)
                        .map(|(&x, &p)| (exact.phi_of_x(x).unwrap() - p).abs())
                        .fold(0.0, f64::max);
                if sup > worst {
                    worst = sup;
                    worst_case = format!("V={v}, L={l}, delta={delta}");
                }
            }
        }
    }
    outcome(
        worst <= 1e-4,
        format!("18 cases, worst sup-norm {worst:.2e} at {worst_case} (<= 1e-4)"),
    )
}

fn criterion_6() -> Outcome {
    let v = 10.0;
    let mut ratios = Vec::new();
    let mut parts = Vec::new();
    let mut within = true;
    for &l in &[20.0, 100.0, 300.0] {
        let params = ProblemParams::new(l, v).unwrap();
        let s = screening_length(&solve(&params, SolveOptions::default()).unwrap()).unwrap();
        let asym = solve_asymptotic(&params).unwrap();
        let expected = 1.0 / asym.sqrt_alpha_tilde();
        let allowed = (3.0 * asym.eps_tilde).max(1e-3);
        let diff = (s.ratio_to_infinite - expected).abs();
        within &= diff <= allowed;
        parts.push(format!(
            "L={l}: {:.6} vs {expected:.6} (|diff| {diff:.2e} <= {allowed:.2e})",
            s.ratio_to_infinite
        ));
        ratios.push(s.ratio_to_infinite);
    }
    let ordered = ratios.iter().all(|&r| r >= 1.0) && ratios.windows(2).all(|w| w[1] < w[0]);
    outcome(
        within && ordered,
        format!("{}, >= 1 and decreasing: {ordered}", parts.join("; ")),
    )
}

fn criterion_7() -> Outcome {
    let tol = 0.05;
    let voltages: Vec<f64> = (1..=40).map(|k| 0.25 * k as f64).collect();
    let curves = regime_boundaries(&voltages, tol).unwrap();
    let mut worst = 0.0f64;
    for b in &curves {
        let s = (b.voltage / 4.0).sinh().powi(2);
        let l_ab = 4.0 * s + 2.0 * (2.0 * (b.voltage / 4.0).tanh() / tol).ln();
        let l_bc = 4.0 * s / tol;
        worst = worst
            .max((b.l_ab - l_ab).abs() / l_ab.abs().max(1.0))
            .max((b.l_bc - l_bc).abs() / l_bc.max(1.0))
            .max((l_ab_numeric(b.voltage, tol).unwrap() - l_ab).abs() / l_ab.abs().max(1.0));
    }
    let label = classify_regime(6.0, 15.0, tol).unwrap().label;
    outcome(
        worst <= 1e-10 && label == Regime::Confined,
        format!("closed-form deviation {worst:.2e} (<= 1e-10) over 40 voltages, (V=6, L=15) -> {label}"),
    )
}

fn criterion_8() -> Outcome {
    let channel = channel_bath_ratio(180.0, 0.01).unwrap();
    let v = nondim_voltage(0.25, 298.0).unwrap();
    let electrode = electrode_bulk_ratio(v, 0.01, 0.3).unwrap();
    let channel_ok = format!("{:.3e}", channel) == format!("{:.3e}", 8950.0);
    let electrode_ok = (electrode.paper_numeric_form - 59.4).abs() <= 0.5;
    outcome(
        channel_ok && electrode_ok && electrode.cosh_form.is_finite(),
        format!(
            "channel ratio {channel:.4} (8950 to 3 s.f.), electrode paper form {:.4} (59.4 +- 0.5), cosh form {:.4e} emitted",
            electrode.paper_numeric_form, electrode.cosh_form
        ),
    )
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_ccpb")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "ccpb {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn criterion_9() -> Outcome {
    let commands: [&[&str]; 4] = [
        &["solve", "--L", "15", "--V", "5"],
        &["--format", "json", "solve", "--L", "40", "--V", "-3", "--delta", "0.05"],
        &["regimes", "--start", "1", "--stop", "10", "--points", "10"],
        &["estimate", "channel", "--r", "180"],
    ];
    let mut identical = true;
    for args in commands {
        identical &= run_cli(args) == run_cli(args);
    }
    let mut failed = Vec::new();
    for (l, v) in [(15.0, 5.0), (3.0, 1.0), (80.0, -9.0)] {
        let csv = run_cli(&["solve", "--L", &l.to_string(), "--V", &v.to_string()]);
        let rec = Record::from_csv(&String::from_utf8(csv).unwrap()).unwrap();
        let check = validate_profile(&ProfileData::from_record(&rec).unwrap()).unwrap();
        if !check.passes() {
            failed.push(format!("(L={l}, V={v}): {check:?}"));
        }
    }
    let failed_text = if failed.is_empty() {
        "none".to_string()
    } else {
        failed.join(" ")
    };
    outcome(
        identical && failed.is_empty(),
        format!("repeated runs byte-identical: {identical}, profiles failing re-validation: {failed_text}"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, criterion_1, Duration::from_secs(30)),
        (2, criterion_2, Duration::from_secs(30)),
        (3, criterion_3, Duration::from_secs(120)),
        (4, criterion_4, Duration::MAX),
        (5, criterion_5, Duration::from_secs(300)),
        (6, criterion_6, Duration::MAX),
        (7, criterion_7, Duration::MAX),
        (8, criterion_8, Duration::MAX),
        (9, criterion_9, Duration::MAX),
    ];
    let mut failures = 0;
    for (id, check, budget) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= budget;
        if !pass {
            failures += 1;
        }
        let budget = if budget == Duration::MAX {
            String::new()
        } else {
            format!(", budget {}s", budget.as_secs())
        };
        println!(
            "criterion {id}: {} ({}; {:.2}s{budget})",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
