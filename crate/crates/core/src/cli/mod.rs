//! Command implementations behind the `nmep` binary.
//!
//! Exit codes: 0 success, 1 comparison outside tolerance, 2 configuration or
//! input error, 3 solver error.

pub mod config;
mod series_file;

use std::path::Path;
use std::time::Instant;

pub use config::{ConfigError, InitialSpec, Method, ModelSpec, ObservableSpec, RunConfig};
pub use series_file::{format_float, read_series, SeriesFile};

use crate::ensemble::SignedEnsemble;
use crate::error::Error;
use crate::linalg::{min_eigenvalue, C64};
use crate::models::{
    spin_star_analytic, LindbladModel, SpinStarModel, TabulatedModel, TransmonModel,
};
use crate::reference::{compare_series, rk4_run_with};
use crate::solvers::run_with;
use crate::DensityMatrix;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Imaginary parts below this everywhere are not written.
const IMAG_THRESHOLD: f64 = 1e-10;

pub fn build_model(spec: &ModelSpec) -> crate::Result<Box<dyn LindbladModel>> {
    Ok(match spec {
        ModelSpec::SpinStar(p) => Box::new(SpinStarModel::new(*p)?),
        ModelSpec::Transmon(p) => Box::new(TransmonModel::new(*p)?),
        ModelSpec::Tabulated(path) => Box::new(TabulatedModel::from_file(path)?),
    })
}

/// Columns for the observables: the real part (or modulus for `abs_`
/// observables), followed by `<name>_im` when any imaginary part is material.
fn observable_columns(observables: &[ObservableSpec], values: &[Vec<C64>], series: &mut SeriesFile) {
    for (k, obs) in observables.iter().enumerate() {
        if obs.abs {
            series.push_column(&obs.name, values.iter().map(|v| v[k].norm()).collect());
            continue;
        }
        series.push_column(&obs.name, values.iter().map(|v| v[k].re).collect());
        if values.iter().any(|v| v[k].im.abs() > IMAG_THRESHOLD) {
            series.push_column(&format!("{}_im", obs.name), values.iter().map(|v| v[k].im).collect());
        }
    }
}

fn min_eigenvalues(states: &[DensityMatrix]) -> crate::Result<Vec<f64>> {
    states.iter().map(min_eigenvalue).collect()
}

/// Runs the configured simulation and writes the series file.
pub fn simulate(config_path: &Path, output: Option<&Path>) -> i32 {
    let cfg = match RunConfig::from_file(config_path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {}: {e}", config_path.display());
            return EXIT_INPUT;
        }
    };
    let Some(output) = output.map(Path::to_path_buf).or_else(|| cfg.output_path.clone()) else {
        eprintln!("config error: no output path (use --output or [output] path)");
        return EXIT_INPUT;
    };
    let model = match build_model(&cfg.model) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("config error: {}: [model]: {e}", config_path.display());
            return EXIT_INPUT;
        }
    };
    let started = Instant::now();
    let operators: Vec<_> = cfg.observables.iter().map(|o| o.operator.clone()).collect();
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut states = Vec::new();
    let mut extra: Vec<(&str, Vec<f64>)>;
    let outcome: crate::Result<String>;

    match (&cfg.solver.method, &cfg.initial) {
        (Method::Stochastic(kind), InitialSpec::State(psi)) => {
            let solver = cfg.solver.stochastic_config().expect("stochastic method");
            let mut members = Vec::new();
            let mut totals = Vec::new();
            let initial = match SignedEnsemble::pure(psi.clone(), solver.n_ensemble) {
                Ok(e) => e,
                Err(e) => {
                    eprintln!("config error: [initial]: {e}");
                    return EXIT_INPUT;
                }
            };
            let result = run_with(model.as_ref(), &solver, initial, &operators, |r| {
                times.push(r.t);
                values.push(r.expectations.clone());
                members.push(r.n_members as f64);
                totals.push(r.total_count as f64);
                if cfg.solver.monitor_positivity {
                    states.push(r.density.clone());
                }
            });
            outcome = result.map(|e| format!("{kind}: final distinct members {}", e.len()));
            extra = vec![("n_distinct_members", members), ("total_count", totals)];
        }
        (Method::Rk4, InitialSpec::Density(rho0)) => {
            let reference = cfg.solver.reference_config().expect("rk4 method");
            let mut traces = Vec::new();
            let mut defects = Vec::new();
            let result = rk4_run_with(model.as_ref(), &reference, rho0, &operators, |r| {
                times.push(r.t);
                values.push(r.expectations.clone());
                traces.push(r.trace);
                defects.push(r.hermiticity_defect);
                if cfg.solver.monitor_positivity {
                    states.push(r.rho.clone());
                }
            });
            outcome = result.map(|_| "rk4: done".to_string());
            extra = vec![("trace", traces), ("hermiticity_defect", defects)];
        }
        _ => unreachable!("initial state kind is validated against the solver kind"),
    }

    if cfg.solver.monitor_positivity {
        match min_eigenvalues(&states) {
            Ok(v) => {
                if let Some(k) = v.iter().position(|&l| l < -cfg.solver.positivity_tol) {
                    eprintln!("positivity: min eigenvalue {} first below -{} at t={}", v[k], cfg.solver.positivity_tol, times[k]);
                }
                extra.push(("min_eigenvalue", v));
            }
            Err(e) => {
                eprintln!("solver error: positivity monitor: {e}");
                return EXIT_SOLVER;
            }
        }
    }

    let mut series = SeriesFile::new(times);
    observable_columns(&cfg.observables, &values, &mut series);
    for (name, column) in extra {
        series.push_column(name, column);
    }
    let (code, trailer) = match &outcome {
        Ok(_) => (EXIT_OK, None),
        Err(e) => {
            let t = match e {
                Error::Step { t, .. } => *t,
                _ => cfg.solver.t0,
            };
            (EXIT_SOLVER, Some(format!("terminated: {} at t={}", e.root(), format_float(t))))
        }
    };
    if let Err(e) = series.write(&output, trailer.as_deref()) {
        eprintln!("error: cannot write {}: {e}", output.display());
        return EXIT_INPUT;
    }
    match outcome {
        Ok(summary) => {
            println!("{summary}, wall time {:.2} s", started.elapsed().as_secs_f64());
        }
        Err(e) => eprintln!("solver error: {e}"),
    }
    code
}

/// Compares the named columns of two series files.
pub fn compare(a: &Path, b: &Path, columns: &[String], tol: f64) -> i32 {
    let load = |p: &Path| read_series(p).map_err(|e| eprintln!("error: {}: {e}", p.display()));
    let (Ok(sa), Ok(sb)) = (load(a), load(b)) else {
        return EXIT_INPUT;
    };
    let names: Vec<&str> = columns.iter().map(String::as_str).collect();
    let report = match compare_series(&sa.to_series(), &sb.to_series(), &names) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let mut ok = true;
    for c in &report {
        let pass = c.max_abs <= tol;
        ok &= pass;
        println!(
            "{} max_abs={} rmse={} {}",
            c.column,
            format_float(c.max_abs),
            format_float(c.rmse),
            if pass { "ok" } else { "exceeds tolerance" }
        );
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

/// Parses `t0:t_max:n` into `n` equally spaced times.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [t0, t_max, n] = parts.as_slice() else {
        return Err(format!("grid must be t0:t_max:n, found `{text}`"));
    };
    let t0: f64 = t0.trim().parse().map_err(|_| format!("invalid grid start `{t0}`"))?;
    let t_max: f64 = t_max.trim().parse().map_err(|_| format!("invalid grid end `{t_max}`"))?;
    let n: usize = n.trim().parse().map_err(|_| format!("invalid grid size `{n}`"))?;
    if n < 2 || !(t_max > t0) {
        return Err("grid needs t_max > t0 and n >= 2".into());
    }
    let dt = (t_max - t0) / (n - 1) as f64;
    Ok((0..n).map(|k| t0 + k as f64 * dt).collect())
}

/// Writes the closed-form spin-star coherence on a grid.
pub fn export_analytic(model: &str, params: &Path, grid: &str, output: &Path) -> i32 {
    if model != "spin_star" {
        eprintln!("error: no closed-form solution for model kind `{model}` (only spin_star)");
        return EXIT_INPUT;
    }
    let text = match std::fs::read_to_string(params) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", params.display());
            return EXIT_INPUT;
        }
    };
    let base = params.parent().unwrap_or(Path::new("."));
    let (spec, state) = match config::parse_model_params(&text, base) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("config error: {}: {e}", params.display());
            return EXIT_INPUT;
        }
    };
    let ModelSpec::SpinStar(p) = spec else {
        eprintln!("error: {} describes a {} model, not spin_star", params.display(), spec.kind());
        return EXIT_INPUT;
    };
    let times = match parse_grid(grid) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let rho0 = DensityMatrix::pure(&state.unwrap_or_else(config::default_initial_state));
    let mut rho12 = Vec::with_capacity(times.len());
    let mut f = Vec::with_capacity(times.len());
    for &t in &times {
        let rho = spin_star_analytic(&p, &rho0, t).expect("dimension 2");
        rho12.push(vec![rho.get(0, 1)]);
        f.push(p.coherence_factor(t));
    }
    let mut series = SeriesFile::new(times);
    let rho_obs = ObservableSpec::parse("rho12", 2).expect("valid observable");
    observable_columns(&[rho_obs], &rho12, &mut series);
    series.push_column("abs_f", f.iter().map(|z| z.norm()).collect());
    series.push_column("re_f", f.iter().map(|z| z.re).collect());
    series.push_column("im_f", f.iter().map(|z| z.im).collect());
    if let Err(e) = series.write(output, None) {
        eprintln!("error: cannot write {}: {e}", output.display());
        return EXIT_INPUT;
    }
    EXIT_OK
}
