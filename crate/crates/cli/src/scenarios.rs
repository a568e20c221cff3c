//! Scenario registry and execution.

use std::collections::BTreeMap;

use exlab_core::excitation::{
    girsanov_drift, gronwall_upper_check, index_fit, linear_exact_curve, mc_energy, mc_projection_moment,
    lower_from_estimate, BoundCheckReport, EnergyCurve, EnergyPoint, FractionalRenewal, InitialDatum,
    McOptions, MomentEstimate, Sampler,
};
use exlab_core::operators::{eigenpairs, laplacian_dirichlet, principal_eigenpair, Grid1D};
use exlab_core::{CovKernelSpec, NoiseKind, SigmaSpec, SpdeProblem};

use crate::config::RunConfig;
use crate::error::{config_err, CliError};
use crate::output::{
    BoundRow, BoundSummary, BracketPoint, CurvePoint, CurveRow, IndexSummary, RunOutput, RunSummary,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Gbm,
    LinearExactIndex,
    SingleBmSim,
    QWienerSim,
    LpMoments,
    FractionalRenewal,
    Bounds,
    StwnBestEffort,
}

pub struct ScenarioInfo {
    pub name: &'static str,
    pub anchor: &'static str,
    pub description: &'static str,
    pub scenario: Scenario,
}

pub const SCENARIOS: [ScenarioInfo; 8] = [
    ScenarioInfo {
        name: "gbm",
        anchor: "scalar GBM moments",
        description: "geometric Brownian motion moments against x^p exp(lambda^2 p (p-1) t / 2)",
        scenario: Scenario::Gbm,
    },
    ScenarioInfo {
        name: "linear-exact-index",
        anchor: "index 2, linear equation",
        description: "exact-sampler energy curve of the linear equation and its double-log slopes",
        scenario: Scenario::LinearExactIndex,
    },
    ScenarioInfo {
        name: "single-bm-sim",
        anchor: "index 2, single Brownian motion",
        description: "semi-implicit Euler-Maruyama with one scalar Brownian driver, plus bound checks",
        scenario: Scenario::SingleBmSim,
    },
    ScenarioInfo {
        name: "qwiener-sim",
        anchor: "index 2, Q-Wiener noise",
        description: "semi-implicit Euler-Maruyama with a spatially correlated driver, plus bound checks",
        scenario: Scenario::QWienerSim,
    },
    ScenarioInfo {
        name: "lp-moments",
        anchor: "index 2 for p-th moments",
        description: "exact-sampler p-th moment energy curve (default p = 4)",
        scenario: Scenario::LpMoments,
    },
    ScenarioInfo {
        name: "fractional-renewal",
        anchor: "index 2 alpha / (alpha - 1)",
        description: "second moment of the fractional equation on the line via its renewal equation",
        scenario: Scenario::FractionalRenewal,
    },
    ScenarioInfo {
        name: "bounds",
        anchor: "Gronwall upper and spectral lower bounds",
        description: "moment bound certificates with a 3-stderr allowance",
        scenario: Scenario::Bounds,
    },
    ScenarioInfo {
        name: "stwn-best-effort",
        anchor: "space-time white noise",
        description: "direct simulation with space-time white noise; diagnostic only",
        scenario: Scenario::StwnBestEffort,
    },
];

pub struct Defaults {
    pub length: f64,
    pub n: usize,
    pub t: f64,
    pub dt: f64,
    pub diffusivity: f64,
    pub lambdas: &'static [f64],
    pub samples: usize,
    pub p: f64,
    pub u0: &'static str,
    pub noise: &'static str,
    pub kernel: &'static str,
    pub prefer_exact: bool,
    pub drift_fraction: f64,
}

const SIM: Defaults = Defaults {
    length: 1.0,
    n: 32,
    t: 0.5,
    dt: 1e-3,
    diffusivity: 1.0,
    lambdas: &[4.0, 8.0, 16.0],
    samples: 1000,
    p: 2.0,
    u0: "eigenfunction",
    noise: "single_bm",
    kernel: "constant",
    prefer_exact: false,
    drift_fraction: 1.0,
};

const EXACT: Defaults = Defaults {
    length: 4.0,
    n: 64,
    lambdas: &[4.0, 8.0, 16.0, 32.0],
    u0: "constant_band",
    prefer_exact: true,
    ..SIM
};

impl Scenario {
    pub fn from_name(name: &str) -> Option<Self> {
        SCENARIOS.iter().find(|s| s.name == name).map(|s| s.scenario)
    }

    pub fn info(self) -> &'static ScenarioInfo {
        SCENARIOS.iter().find(|s| s.scenario == self).expect("registered")
    }

    pub fn defaults(self) -> Defaults {
        match self {
            Scenario::Gbm => Defaults {
                length: 2.0,
                n: 1,
                t: 1.0,
                diffusivity: 0.0,
                lambdas: &[1.0],
                samples: 100_000,
                drift_fraction: 0.0,
                ..EXACT
            },
            Scenario::LinearExactIndex => EXACT,
            Scenario::LpMoments => Defaults { p: 4.0, ..EXACT },
            Scenario::SingleBmSim => SIM,
            Scenario::QWienerSim => Defaults { noise: "q_wiener", kernel: "shifted_exponential", ..SIM },
            Scenario::Bounds => Defaults {
                n: 64,
                lambdas: &[2.0, 4.0, 8.0],
                samples: 5000,
                prefer_exact: true,
                ..SIM
            },
            Scenario::StwnBestEffort => Defaults {
                noise: "space_time_white",
                lambdas: &[1.0, 2.0, 4.0],
                samples: 500,
                ..SIM
            },
            Scenario::FractionalRenewal => Defaults {
                t: 1.0,
                lambdas: &[8.0, 16.0, 32.0, 64.0],
                u0: "delta",
                ..SIM
            },
        }
    }
}

/// Executes one resolved configuration.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let scenario = cfg.scenario();
    let mut ctx = Context::new(cfg);
    match scenario {
        Scenario::FractionalRenewal => ctx.renewal()?,
        _ => ctx.grid_scenario(scenario)?,
    }
    Ok(ctx.finish(scenario))
}

struct Context<'a> {
    cfg: &'a RunConfig,
    curve: Vec<CurvePoint>,
    checks: BoundCheckReport,
    notes: Vec<String>,
    bracket: Option<Vec<BracketPoint>>,
    diagnostics: BTreeMap<String, f64>,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a RunConfig) -> Self {
        Self {
            cfg,
            curve: Vec::new(),
            checks: BoundCheckReport::default(),
            notes: Vec::new(),
            bracket: None,
            diagnostics: BTreeMap::new(),
        }
    }

    fn sigma(&self) -> Result<SigmaSpec, CliError> {
        match self.cfg.sigma.as_str() {
            "linear" => Ok(SigmaSpec::linear()),
            _ => Ok(SigmaSpec::scaled_sin_plus_linear(self.cfg.sigma_a)?),
        }
    }

    fn noise(&self) -> Result<NoiseKind, CliError> {
        let c = self.cfg;
        Ok(match c.noise.as_str() {
            "single_bm" => NoiseKind::SingleBm,
            "space_time_white" => NoiseKind::SpaceTimeWhite,
            _ => NoiseKind::QWiener(match c.kernel.as_str() {
                "constant" => {
                    if !(c.kernel_c > 0.0) {
                        return Err(config_err("kernel_c must be positive"));
                    }
                    CovKernelSpec::constant(c.kernel_c)
                }
                _ => CovKernelSpec::shifted_exponential(c.kernel_base, c.kernel_amplitude, c.kernel_corr_len)?,
            }),
        })
    }

    fn initial(&self, grid: &Grid1D, decomp: &exlab_core::EigenDecomposition) -> Vec<f64> {
        let c = self.cfg;
        let l = grid.length();
        match c.u0.as_str() {
            "eigenfunction" => decomp.vector(0).iter().map(|v| v.abs()).collect(),
            "indicator" => grid.sample(|x| if (x - 0.5 * l).abs() <= c.u0_half_width { 1.0 } else { 0.0 }),
            // c1 <= u0 <= c2
            _ => {
                let [c1, c2] = c.u0_band;
                grid.sample(|x| c1 + (c2 - c1) * (std::f64::consts::PI * x / l).sin())
            }
        }
    }

    fn grid_scenario(&mut self, scenario: Scenario) -> Result<(), CliError> {
        let c = self.cfg;
        let grid = Grid1D::new(c.length, c.n)?;
        let decomp = eigenpairs(&laplacian_dirichlet(&grid), &grid)?;
        let pair = principal_eigenpair(&decomp)?;
        let u0 = self.initial(&grid, &decomp);
        let problem = SpdeProblem::new(grid, self.noise()?, 1.0, self.sigma()?, u0)?.with_diffusivity(c.diffusivity)?;
        self.diagnostics.insert("principal_eigenvalue".into(), pair.eigenvalue);
        self.diagnostics.insert("u0_energy".into(), grid.norm(&problem.u0));

        let sampler = if c.sampler == "exact" { Sampler::Exact } else { Sampler::Scheme { dt: c.dt } };
        let base = McOptions::new(c.samples, c.seed, sampler).with_p(c.p);
        let closed_form = problem.sigma.is_linear() && problem.constant_noise_intensity().is_some();
        let references = if closed_form {
            Some(linear_exact_curve(&problem, &c.lambda_grid, c.t, c.p)?)
        } else {
            None
        };

        let mut estimates = Vec::with_capacity(c.lambda_grid.len());
        for (i, &lambda) in c.lambda_grid.iter().enumerate() {
            let drift = c.drift_fraction * girsanov_drift(&problem, lambda, c.p);
            let est = mc_energy(&problem, lambda, c.t, &base.with_drift(drift))?;
            let reference = references.as_ref().map(|r| r.points()[i].log_energy);
            self.push_estimate(&est, reference);
            estimates.push(est);
        }

        let wants_bounds = matches!(scenario, Scenario::Bounds | Scenario::SingleBmSim | Scenario::QWienerSim);
        if wants_bounds {
            self.bound_checks(&problem, &pair, &estimates, &base)?;
        }
        if scenario == Scenario::StwnBestEffort {
            self.notes.push("space-time white noise run is diagnostic; no bound checks apply".into());
        }
        Ok(())
    }

    fn push_estimate(&mut self, est: &MomentEstimate, reference: Option<f64>) {
        self.curve.push(CurvePoint {
            lambda: est.lambda,
            log_energy: est.log_energy(),
            log_stderr: est.log_energy_stderr(),
            log_moment: est.log_moment,
            rel_stderr: est.rel_stderr,
            samples: est.samples,
            reference_log_energy: reference,
        });
    }

    fn bound_checks(
        &mut self,
        problem: &SpdeProblem,
        pair: &exlab_core::PrincipalEigenpair,
        estimates: &[MomentEstimate],
        base: &McOptions,
    ) -> Result<(), CliError> {
        let c = self.cfg;
        // second moments are needed for both checks
        let second: Vec<MomentEstimate> = if c.p == 2.0 {
            estimates.to_vec()
        } else {
            c.lambda_grid
                .iter()
                .map(|&l| {
                    let drift = c.drift_fraction * girsanov_drift(problem, l, 2.0);
                    mc_energy(problem, l, c.t, &base.with_p(2.0).with_drift(drift))
                })
                .collect::<Result<_, _>>()?
        };
        let q1 = match &problem.noise {
            NoiseKind::SingleBm => Some(1.0),
            NoiseKind::QWiener(spec) => Some(spec.q1),
            NoiseKind::SpaceTimeWhite => None,
        };
        if let Some(q1) = q1 {
            let points = second.iter().map(|e| e.to_point()).collect();
            let curve = EnergyCurve::new(c.t, 2.0, points)?;
            let u0_energy = problem.grid.norm(&problem.u0);
            self.checks.extend(gronwall_upper_check(&curve, problem.sigma.big_l_sigma, q1, u0_energy)?);
        }
        if problem.sigma.l_sigma > 0.0 && q1.is_some() {
            for &lambda in &c.lambda_grid {
                let drift = c.drift_fraction * girsanov_drift(problem, lambda, 2.0);
                let est = mc_projection_moment(problem, pair, lambda, c.t, &base.with_p(2.0).with_drift(drift))?;
                self.checks.checks.push(lower_from_estimate(problem, pair, &est)?);
            }
        } else {
            self.notes.push("spectral lower check skipped: needs l_sigma > 0 and a trace-class noise".into());
        }
        Ok(())
    }

    fn renewal(&mut self) -> Result<(), CliError> {
        let c = self.cfg;
        let initial = match c.u0.as_str() {
            "delta" => InitialDatum::Delta,
            _ => InitialDatum::Indicator { half_width: c.u0_half_width },
        };
        let r = FractionalRenewal::new(c.alpha, initial, c.t, c.volterra_steps)?;
        let sigma = self.sigma()?;
        let (lo_gain, hi_gain) = (sigma.l_sigma.powi(2), sigma.big_l_sigma.powi(2));
        let mut bracket = Vec::new();
        for &lambda in &c.lambda_grid {
            let lo = r.moment(lambda, lo_gain)?;
            if !sigma.is_linear() {
                let hi = r.moment(lambda, hi_gain)?;
                bracket.push(BracketPoint {
                    lambda,
                    log_energy_lower: lo.log_energy(),
                    log_energy_upper: hi.log_energy(),
                });
            }
            self.curve.push(CurvePoint {
                lambda,
                log_energy: lo.log_energy(),
                log_stderr: 0.0,
                log_moment: lo.log_moment,
                rel_stderr: 0.0,
                samples: 0,
                reference_log_energy: None,
            });
        }
        if !sigma.is_linear() {
            self.notes.push("nonlinear sigma: curve holds the lower bracket (gain l_sigma^2)".into());
            self.bracket = Some(bracket);
        }
        self.diagnostics.insert("beta".into(), r.beta());
        self.diagnostics.insert("predicted_index".into(), 2.0 * c.alpha / (c.alpha - 1.0));
        Ok(())
    }

    fn fit_index(&mut self) -> Option<IndexSummary> {
        let c = self.cfg;
        if self.curve.len() < 2 {
            self.notes.push("index fit needs at least two lambda values".into());
            return None;
        }
        // longest tail of the grid with energy above e
        let first = self.curve.iter().rposition(|p| !(p.log_energy > 1.0)).map_or(0, |i| i + 1);
        let n_slopes = self.curve.len() - 1;
        if first >= n_slopes {
            let at = &self.curve[first - 1];
            self.notes.push(format!(
                "lambda grid too small for double-log fit: energy exp({:.4}) <= e at lambda = {}",
                at.log_energy, at.lambda
            ));
            return None;
        }
        let width = c.window.min(n_slopes - first);
        let window = n_slopes - width..n_slopes;
        let points = self
            .curve
            .iter()
            .map(|p| EnergyPoint {
                lambda: p.lambda,
                log_energy: p.log_energy,
                log_stderr: p.log_stderr,
                samples: p.samples,
            })
            .collect();
        let fit = EnergyCurve::new(c.t, c.p, points).and_then(|curve| index_fit(&curve, Some(window)));
        match fit {
            Ok(est) => Some(IndexSummary {
                increasing: est.windowed().windows(2).all(|w| w[1] > w[0]),
                slopes: est.slopes.clone(),
                window_start: est.window.start,
                window_end: est.window.end,
                lower: est.lower,
                upper: est.upper,
            }),
            Err(e) => {
                self.notes.push(e.to_string());
                None
            }
        }
    }

    fn finish(mut self, scenario: Scenario) -> RunOutput {
        let c = self.cfg;
        let index = self.fit_index();
        let p = if scenario == Scenario::FractionalRenewal { 2.0 } else { c.p };
        let curve_rows = self
            .curve
            .iter()
            .map(|pt| CurveRow {
                lambda: pt.lambda,
                t: c.t,
                p,
                log_energy: pt.log_energy,
                stderr: pt.log_stderr,
                samples: pt.samples,
            })
            .collect();
        let mut bound_rows: Vec<BoundRow> = self
            .checks
            .checks
            .iter()
            .map(|ck| BoundRow {
                lambda: ck.lambda,
                t: ck.t,
                check_name: ck.kind.label().to_string(),
                measured: ck.measured,
                bound: ck.bound,
                slack: ck.slack,
                pass: ck.pass,
            })
            .collect();
        bound_rows.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then_with(|| a.check_name.cmp(&b.check_name)));
        let passed = bound_rows.iter().filter(|r| r.pass).count();
        let info = scenario.info();
        let mut cfg = c.clone();
        if scenario == Scenario::FractionalRenewal {
            cfg.p = 2.0;
        }
        let summary = RunSummary {
            scenario: info.name.to_string(),
            anchor: info.anchor.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg,
            curve: self.curve,
            index,
            notes: self.notes,
            bounds: BoundSummary { checked: bound_rows.len(), passed, failed: bound_rows.len() - passed },
            bracket: self.bracket,
            diagnostics: self.diagnostics,
        };
        RunOutput { summary, curve_rows, bound_rows }
    }
}
