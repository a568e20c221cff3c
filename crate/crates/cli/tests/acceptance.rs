//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs through the scenario runner where a scenario exists and
//! through the core library otherwise.

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use exlab_cli::{run, ExperimentConfig, RunOutput};
use exlab_core::excitation::{volterra_solve, Forcing, RenewalProblem};
use exlab_core::operators::{eigenpairs, laplacian_dirichlet, principal_eigenpair, stable_identity_suite, Grid1D};
use statrs::function::gamma::{gamma, ln_gamma};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn scenario(json: &str) -> (RunOutput, Duration) {
    let cfg = ExperimentConfig::from_json(json).and_then(|c| c.resolve()).expect("valid acceptance config");
    let start = Instant::now();
    let out = run(&cfg).expect("scenario runs");
    (out, start.elapsed())
}

fn gbm_oracle() -> Outcome {
    let (out, took) = scenario(r#"{"scenario": "gbm", "samples": 100000, "lambda_grid": [1], "t": 1}"#);
    let pt = &out.summary.curve[0];
    let m = pt.log_moment.exp();
    let se = m * pt.rel_stderr;
    let z = (m - E).abs() / se;
    outcome(
        z < 3.0 && took.as_secs_f64() < 10.0,
        format!("E[X^2] = {m:.5} vs e = {E:.5}, {z:.2} stderr, {:.2} s", took.as_secs_f64()),
    )
}

fn linear_closed_form() -> Outcome {
    let (out, took) = scenario(
        r#"{"scenario": "linear-exact-index", "length": 1, "n": 64, "u0": "eigenfunction",
            "lambda_grid": [2], "t": 0.5, "samples": 10000, "drift_fraction": 0.5}"#,
    );
    let pt = &out.summary.curve[0];
    let m = pt.log_moment.exp();
    let exact = (2.0 * pt.reference_log_energy.unwrap()).exp();
    let z = (m - exact).abs() / (m * pt.rel_stderr);
    outcome(
        z < 3.0 && took.as_secs_f64() < 30.0,
        format!("E|u|^2 = {m:.6e} vs {exact:.6e}, {z:.2} stderr, {:.2} s", took.as_secs_f64()),
    )
}

fn scheme_consistency() -> Outcome {
    let gap = |dt: f64| {
        let (out, _) = scenario(&format!(
            r#"{{"scenario": "single-bm-sim", "n": 64, "u0": "eigenfunction", "lambda_grid": [1],
                "t": 0.25, "dt": {dt}, "samples": 2000, "drift_fraction": 0}}"#
        ));
        let pt = &out.summary.curve[0];
        let exact = (2.0 * pt.reference_log_energy.unwrap()).exp();
        ((pt.log_moment.exp() - exact).abs() / exact, pt.rel_stderr)
    };
    let (coarse, _) = gap(1e-2);
    let (fine, se) = gap(1e-3);
    outcome(
        fine < coarse && fine < 0.05 + 3.0 * se,
        format!("relative gap {coarse:.4} at dt = 1e-2, {fine:.4} at dt = 1e-3 (limit {:.4})", 0.05 + 3.0 * se),
    )
}

fn index_two() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    let start = Instant::now();
    for (name, p) in [("linear-exact-index", 2), ("lp-moments", 4)] {
        let (out, _) = scenario(&format!(r#"{{"scenario": "{name}", "t": 0.5, "lambda_grid": [4, 8, 16, 32], "p": {p}}}"#));
        let ix = out.summary.index.as_ref().expect("index fitted");
        let inside = ix.slopes.iter().all(|s| (1.8..=2.05).contains(s));
        let rising = ix.slopes.windows(2).all(|w| w[1] > w[0]);
        pass &= inside && rising;
        let s: Vec<String> = ix.slopes.iter().map(|s| format!("{s:.4}")).collect();
        detail.push(format!("p = {p}: slopes [{}]", s.join(", ")));
    }
    let took = start.elapsed().as_secs_f64();
    outcome(pass && took < 60.0, format!("{}, {took:.2} s", detail.join("; ")))
}

fn eigenpair() -> Outcome {
    let g = Grid1D::new(1.0, 511).unwrap();
    let d = eigenpairs(&laplacian_dirichlet(&g), &g).unwrap();
    let pair = principal_eigenpair(&d).unwrap();
    let mass = g.dx() * pair.phi.iter().sum::<f64>();
    let positive = pair.phi.iter().all(|v| *v > 0.0);
    outcome(
        (pair.eigenvalue - PI * PI).abs() < 1e-3 && positive && (mass - 1.0).abs() < 1e-12,
        format!(
            "lambda_1 = {:.6} (pi^2 = {:.6}), min phi > 0: {positive}, |mass - 1| = {:.1e}",
            pair.eigenvalue,
            PI * PI,
            (mass - 1.0).abs()
        ),
    )
}

fn stable_identities() -> Outcome {
    let g = stable_identity_suite(2.0, 1.0, 1.0).unwrap();
    let s = stable_identity_suite(1.5, 1.0, 1.0).unwrap();
    let pass = g.convolution_residual < 1e-6
        && s.convolution_residual < 1e-3
        && g.scaling_residual < 1e-6
        && s.scaling_residual < 1e-6
        && g.normalization_residual < 1e-4
        && s.normalization_residual < 1e-4;
    outcome(
        pass,
        format!(
            "convolution {:.1e} (alpha 2), {:.1e} (alpha 1.5); scaling {:.1e}, {:.1e}; mass {:.1e}, {:.1e}",
            g.convolution_residual,
            s.convolution_residual,
            g.scaling_residual,
            s.scaling_residual,
            g.normalization_residual,
            s.normalization_residual
        ),
    )
}

fn fractional_index() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for alpha in [2.0, 1.5, 1.25] {
        let (out, took) = scenario(&format!(
            r#"{{"scenario": "fractional-renewal", "alpha": {alpha}, "t": 1, "lambda_grid": [8, 16, 32, 64],
                "volterra_steps": 20000}}"#
        ));
        let target = 2.0 * alpha / (alpha - 1.0);
        let ix = out.summary.index.as_ref().expect("index fitted");
        let ok = (ix.lower - target).abs() <= 0.1 * target
            && (ix.upper - target).abs() <= 0.1 * target
            && took.as_secs_f64() < 60.0;
        pass &= ok;
        detail.push(format!(
            "alpha {alpha}: [{:.4}, {:.4}] vs {target} in {:.2} s",
            ix.lower,
            ix.upper,
            took.as_secs_f64()
        ));
    }
    outcome(pass, detail.join("; "))
}

fn volterra() -> Outcome {
    let p = RenewalProblem::new(Forcing::Constant(1.0), 1.0, 1.0, 1.0, 10_000).unwrap();
    let e_err = (volterra_solve(&p).unwrap()[10_000] - E).abs();

    let z = gamma(0.5);
    let term = |m: usize| m as f64 * z.ln() - ln_gamma(0.5 * m as f64 + 1.0);
    let series: f64 = (0..400).map(|m| term(m).exp()).sum();
    let p = RenewalProblem::new(Forcing::Constant(1.0), 1.0, 0.5, 1.0, 20_000).unwrap();
    let ml_err = (volterra_solve(&p).unwrap()[20_000] / series - 1.0).abs();

    let g = Forcing::function(|t| (1.0 + t).sqrt());
    let p = RenewalProblem::new(g, 0.0, 0.5, 1.0, 1000).unwrap();
    let f = volterra_solve(&p).unwrap();
    let identity = f.iter().enumerate().all(|(m, v)| *v == (1.0 + m as f64 * p.dt()).sqrt());

    outcome(
        e_err < 1e-3 && ml_err < 1e-3 && identity,
        format!(
            "|f - e| = {e_err:.1e} (n = 1e4); series relative error {ml_err:.1e} (n = 2e4); k = 0 identity exact: {identity}"
        ),
    )
}

fn bound_certificates() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (label, noise) in [
        ("single BM", r#""noise": "single_bm""#),
        ("constant-kernel Q-Wiener", r#""noise": "q_wiener", "kernel": "constant", "kernel_c": 0.5"#),
    ] {
        let (out, _) = scenario(&format!(
            r#"{{"scenario": "bounds", {noise}, "lambda_grid": [2, 4, 8], "t": 0.5, "samples": 5000}}"#
        ));
        let rows = &out.bound_rows;
        let ok = rows.len() == 6 && rows.iter().all(|r| r.pass);
        pass &= ok;
        let worst = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
        detail.push(format!("{label}: {}/{} pass, min log slack {worst:.2e}", rows.iter().filter(|r| r.pass).count(), rows.len()));
    }
    outcome(pass, detail.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("GBM oracle", gbm_oracle),
        ("linear closed form", linear_closed_form),
        ("scheme consistency", scheme_consistency),
        ("index 2", index_two),
        ("principal eigenpair", eigenpair),
        ("stable kernel identities", stable_identities),
        ("fractional index", fractional_index),
        ("Volterra solver", volterra),
        ("bound certificates", bound_certificates),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failures += 1;
        }
        println!("criterion {} [{name}]: {}  {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
