//! The `verify` suites. Each returns a report with a `checks` list; any
//! failed check makes the command exit 4.

use blc_core::gaussian::solve_euler_lagrange;
use blc_core::heatflow::{
    certify_monotone, dissipation, evolve, geometric_times, min_eigenvalue, FlowGrid, FlowProblem, Profile,
};
use blc_core::polytope::membership;
use blc_core::scalar::rational;
use blc_core::sphere::{
    cap_schedule, check_theorem1, divergence_trial, printed_normalization, resolved_normalization, sphere_area,
    SphereFunction, SphereSampler,
};
use blc_core::{Configuration, ExponentVector, Matrix, TolerancePolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::commands::{configuration_json, exponents_json, tolerances_json};
use crate::problem::Problem;
use crate::{CliError, Outcome};

/// Caps for the truncated divergence trial: three decades.
pub const DIVERGENCE_CAPS: [f64; 4] = [10.0, 100.0, 1e3, 1e4];
pub const DIVERGENCE_ALPHA: f64 = 0.51;
pub const DIVERGENCE_P: f64 = 1.9;
pub const CONTROL_ALPHA: f64 = 0.3;
pub const CONTROL_P: f64 = 2.0;

#[derive(Default)]
struct Checks(Vec<Value>);

impl Checks {
    fn add(&mut self, name: &str, passed: bool, detail: Value) {
        self.0.push(json!({ "name": name, "passed": passed, "detail": detail }));
    }

    fn finish(self, mut report: Value) -> Outcome {
        let failed: Vec<String> = self
            .0
            .iter()
            .filter(|c| c["passed"] == json!(false))
            .map(|c| c["name"].as_str().unwrap_or_default().to_string())
            .collect();
        report["checks"] = Value::Array(self.0);
        report["passed"] = json!(failed.is_empty());
        if failed.is_empty() {
            Outcome::ok(report)
        } else {
            Outcome { report, exit: 4, message: Some(format!("verification failed: {}", failed.join(", "))) }
        }
    }
}

/// `a = (1, 0), (−1, −1), (0, 1)` with `p = 3/2`; `D = √3/2`.
pub fn young_triple() -> (Configuration, ExponentVector) {
    let a = Matrix::from_columns(2, &[vec![1.0, 0.0], vec![-1.0, -1.0], vec![0.0, 1.0]]).expect("3 columns");
    let c = Configuration::new(a, TolerancePolicy::default()).expect("spanning triple");
    let z = ExponentVector::from_rationals(vec![rational(2, 3); 3]);
    (c, z)
}

pub struct HeatflowOptions {
    pub t_min: f64,
    pub t_max: f64,
    pub per_decade: usize,
    pub samples: usize,
}

pub fn heatflow(problem: Option<&Problem>, opts: &HeatflowOptions, seed: u64) -> Result<Outcome, CliError> {
    let (c, z, tol) = match problem {
        Some(p) => {
            let z = p.exponents.clone().ok_or_else(|| CliError::Parse("heatflow needs exponents".into()))?;
            (p.configuration.clone(), z, p.tolerances)
        }
        None => {
            let (c, z) = young_triple();
            (c, z, TolerancePolicy::default())
        }
    };
    if !(opts.t_min > 0.0 && opts.t_max > opts.t_min && opts.per_decade > 0) {
        return Err(CliError::Parse("time grid needs 0 < t-min < t-max and per-decade > 0".into()));
    }
    let mut report = json!({
        "suite": "heatflow",
        "configuration": configuration_json(&c),
        "exponents": exponents_json(&z),
        "tolerances": tolerances_json(&tol),
        "seed": seed,
    });
    let defects = c.defects();
    if !defects.is_empty() {
        return Err(CliError::Defective(defects));
    }
    let rep = membership(&c, &z).map_err(|e| CliError::Parse(e.to_string()))?;
    if !(rep.member && rep.interior) {
        return Err(CliError::Infeasible("heat-flow verification needs exponents interior to K_A".into()));
    }
    let sol = solve_euler_lagrange(&c, &z, &tol).map_err(|e| CliError::Numerical(e.to_string()))?;
    let initial = (0..c.len()).map(|_| Profile::indicator(-1.0, 1.0).expect("interval")).collect();
    let flow = FlowProblem::from_solution(&c, &z, &sol, initial, FlowGrid::from_policy(&tol))
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let times = geometric_times(opts.t_min, opts.t_max, opts.per_decade);
    let mut checks = Checks::default();
    let trace = match evolve(&flow, &times) {
        Ok(t) => t,
        Err(e) => {
            checks.add("norms_conserved", false, json!(e.to_string()));
            return Ok(checks.finish(report));
        }
    };
    let mono = certify_monotone(&trace);
    let ratios = trace.ratios();
    let last = *ratios.last().expect("nonempty time grid");
    let d = sol.d_value;
    let q = flow.q_matrix().map_err(|e| CliError::Numerical(e.to_string()))?;
    let q_min = min_eigenvalue(&q).map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut min_form = f64::INFINITY;
    for (k, &t) in [times[1], times[times.len() / 2]].iter().enumerate() {
        let dr = dissipation(&flow, t, opts.samples, seed.wrapping_add(k as u64))
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        min_form = min_form.min(dr.min_form);
    }
    checks.add("norms_conserved", true, json!({ "rel_tol": flow.grid.rel_tol }));
    checks.add("monotone", mono.monotone, serde_json::to_value(&mono).expect("serializes"));
    checks.add(
        "limit_ratio",
        last >= 0.99 * d && last <= d * (1.0 + 1e-6),
        json!({ "ratio": last, "d_gaussian": d, "interval": [0.99 * d, d * (1.0 + 1e-6)] }),
    );
    checks.add("q_positive_semidefinite", q_min >= -tol.psd_tol, json!({ "min_eigenvalue": q_min }));
    checks.add("dissipation_nonnegative", min_form >= -1e-9, json!({ "min_form": min_form }));
    report["trace"] = json!({
        "times": trace.times,
        "eta": trace.eta_values,
        "eta_error": trace.eta_errors,
        "ratio": ratios,
        "initial_norms": trace.initial_norms,
    });
    report["d_gaussian"] = json!(d);
    Ok(checks.finish(report))
}

pub struct Sphere1Options {
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub samples: usize,
    pub constant_functions: bool,
}

fn random_piecewise(rng: &mut ChaCha8Rng) -> SphereFunction {
    let cells = rng.gen_range(1..=6);
    let mut inner: Vec<f64> = (0..cells - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    inner.sort_by(f64::total_cmp);
    let mut edges = vec![-1.0];
    edges.extend(inner);
    edges.push(1.0);
    let values = (0..cells).map(|_| rng.gen_range(0.0..3.0)).collect();
    SphereFunction::Piecewise { edges, values }
}

pub fn sphere1(opts: &Sphere1Options, seed: u64) -> Result<Outcome, CliError> {
    if opts.n < 3 {
        return Err(CliError::Parse(format!("--n must be at least 3, got {}", opts.n)));
    }
    let mut report = json!({ "suite": "sphere1", "n": opts.n, "p": opts.p, "seed": seed });
    let mut checks = Checks::default();
    let err = |e: blc_core::sphere::SphereError| CliError::Parse(e.to_string());
    if opts.constant_functions {
        let sampler = SphereSampler::new(opts.n, seed).map_err(err)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fs: Vec<SphereFunction> =
            (0..opts.n).map(|_| SphereFunction::Constant(rng.gen_range(0.25..4.0))).collect();
        let r = check_theorem1(&fs, opts.p, &sampler, 0).map_err(err)?;
        let gap = (r.lhs - r.rhs).abs();
        checks.add("constant_equality", r.analytic && gap <= 1e-12 * r.rhs.max(1.0), json!({ "lhs": r.lhs, "rhs": r.rhs, "gap": gap }));
        return Ok(checks.finish(report));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trials = Vec::with_capacity(opts.trials);
    let mut violations = Vec::new();
    let mut min_margin = f64::INFINITY;
    for k in 0..opts.trials {
        let fs: Vec<SphereFunction> = (0..opts.n).map(|_| random_piecewise(&mut rng)).collect();
        let sampler = SphereSampler::new(opts.n, seed.wrapping_add(1 + k as u64)).map_err(err)?;
        let r = check_theorem1(&fs, opts.p, &sampler, opts.samples).map_err(err)?;
        if !r.holds {
            violations.push(k);
        }
        min_margin = min_margin.min((r.rhs - r.lhs + 3.0 * r.stderr) / r.rhs);
        trials.push(json!({ "lhs": r.lhs, "stderr": r.stderr, "rhs": r.rhs }));
    }
    checks.add("young_inequality", violations.is_empty(), json!({ "trials": opts.trials, "violations": violations, "min_relative_margin": min_margin }));
    report["trials"] = json!(trials);
    let div = divergence_trial(DIVERGENCE_ALPHA, DIVERGENCE_P, &DIVERGENCE_CAPS).map_err(err)?;
    checks.add(
        "divergence_below_two",
        div.divergent_regime && div.norm.is_finite() && div.growth >= 2.0,
        serde_json::to_value(&div).expect("serializes"),
    );
    Ok(checks.finish(report))
}

pub struct Sphere2Options {
    pub n: usize,
    pub eps_schedule: Vec<f64>,
    pub bins: usize,
    pub samples: usize,
}

pub fn sphere2(opts: &Sphere2Options, seed: u64) -> Result<Outcome, CliError> {
    if opts.n < 3 || opts.eps_schedule.is_empty() || opts.bins < 2 {
        return Err(CliError::Parse("sphere2 needs --n >= 3, a nonempty --eps-schedule and --bins >= 2".into()));
    }
    let err = |e: blc_core::sphere::SphereError| CliError::Parse(e.to_string());
    let sampler = SphereSampler::new(opts.n, seed).map_err(err)?;
    let reports = cap_schedule(opts.n, &opts.eps_schedule, &sampler, opts.bins, opts.samples)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let ratios: Vec<f64> = reports.iter().map(|r| r.ratio).collect();
    let mut checks = Checks::default();
    let held: Vec<bool> = reports.iter().map(|r| r.holds).collect();
    checks.add("entropy_inequality", held.iter().all(|h| *h), json!({ "holds": held }));
    checks.add("ratios_increase", ratios.windows(2).all(|w| w[1] > w[0]), json!({ "ratios": ratios }));
    let last = *ratios.last().expect("nonempty schedule");
    checks.add("approaches_two", last > 1.8, json!({ "final_ratio": last, "threshold": 1.8 }));
    let report = json!({
        "suite": "sphere2",
        "n": opts.n,
        "seed": seed,
        "bins": opts.bins,
        "samples": opts.samples,
        "eps_schedule": opts.eps_schedule,
        "ratios": ratios,
        "reports": serde_json::to_value(&reports).expect("serializes"),
    });
    Ok(checks.finish(report))
}

pub fn appendix() -> Result<Outcome, CliError> {
    let err = |e: blc_core::sphere::SphereError| CliError::Numerical(e.to_string());
    let mut checks = Checks::default();
    let div = divergence_trial(DIVERGENCE_ALPHA, DIVERGENCE_P, &DIVERGENCE_CAPS).map_err(err)?;
    checks.add(
        "divergence_below_two",
        div.divergent_regime && div.norm.is_finite() && div.growth >= 2.0,
        serde_json::to_value(&div).expect("serializes"),
    );
    let control = divergence_trial(CONTROL_ALPHA, CONTROL_P, &DIVERGENCE_CAPS).map_err(err)?;
    let saturates = *control.lhs.last().unwrap() <= control.rhs * (1.0 + 1e-9);
    checks.add("control_bounded", !control.divergent_regime && saturates, serde_json::to_value(&control).expect("serializes"));
    let mut rows = Vec::new();
    let mut normalized = true;
    for n in 3..=12 {
        let z = resolved_normalization(n);
        let closed = sphere_area(n - 2) / sphere_area(n - 1);
        normalized &= (z - closed).abs() <= 1e-12 * closed;
        rows.push(json!({ "n": n, "resolved": z, "closed_form": closed, "printed": printed_normalization(n) }));
    }
    checks.add("normalization_resolved", normalized, json!(rows));
    Ok(checks.finish(json!({ "suite": "appendix" })))
}
