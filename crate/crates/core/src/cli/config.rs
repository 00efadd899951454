//! INI-style run configuration.
//!
//! ```text
//! [model]
//! kind = spin_star          # spin_star | transmon | tabulated
//! alpha = 1.0
//! n_spins = 4
//! beta_omega = 2.0
//!
//! [solver]
//! kind = nmep               # mcwf | nmep | nmqj | rk4
//! t0 = 0
//! t_max = 2.0707963267948966
//! steps = 10000             # or dt = ...
//! n_ensemble = 100000
//! seed = 1
//!
//! [initial]
//! state = 0.7071067811865476, 0.5+0.5j
//!
//! [output]
//! observables = rho12, sigma_z
//! ```

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::ensemble::DEFAULT_CONSOLIDATION_TOL;
use crate::linalg::{DensityMatrix, Operator, StateVector, C64};
use crate::models::{parse_complex, SpinStarParams, TransmonParams};
use crate::reference::ReferenceConfig;
use crate::solvers::{SolverConfig, SolverKind};

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line: Some(line), message: message.into() }
    }

    pub fn general(message: impl Into<String>) -> Self {
        ConfigError { line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

type ConfigResult<T> = std::result::Result<T, ConfigError>;

#[derive(Clone, Debug)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Clone, Debug)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

/// Raw sections with key bookkeeping so unknown keys can be reported.
#[derive(Debug)]
pub struct Ini {
    sections: Vec<Section>,
    used: std::cell::RefCell<HashSet<(String, String)>>,
}

impl Ini {
    pub fn parse(text: &str) -> ConfigResult<Self> {
        let mut sections: Vec<Section> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at(line, "section header must end with `]`"))?
                    .trim();
                if sections.iter().any(|s| s.name == name) {
                    return Err(ConfigError::at(line, format!("duplicate section [{name}]")));
                }
                sections.push(Section { name: name.to_string(), line, entries: Vec::new() });
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line, format!("expected `key = value`, found `{content}`")))?;
            let section = sections
                .last_mut()
                .ok_or_else(|| ConfigError::at(line, "key outside of any section"))?;
            let key = key.trim().to_string();
            if section.entries.iter().any(|e| e.key == key) {
                return Err(ConfigError::at(line, format!("duplicate key `{key}` in [{}]", section.name)));
            }
            section.entries.push(Entry { key, value: value.trim().to_string(), line });
        }
        Ok(Ini { sections, used: Default::default() })
    }

    fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        let entry = self.section(section)?.entries.iter().find(|e| e.key == key)?;
        self.used.borrow_mut().insert((section.to_string(), key.to_string()));
        Some(entry)
    }

    fn require_section(&self, name: &str) -> ConfigResult<&Section> {
        self.section(name).ok_or_else(|| ConfigError::general(format!("missing section [{name}]")))
    }

    fn string(&self, section: &str, key: &str) -> ConfigResult<Option<(String, usize)>> {
        Ok(self.entry(section, key).map(|e| (e.value.clone(), e.line)))
    }

    fn required_string(&self, section: &str, key: &str) -> ConfigResult<(String, usize)> {
        self.string(section, key)?.ok_or_else(|| {
            let line = self.section(section).map(|s| s.line);
            ConfigError { line, message: format!("missing key `{key}` in [{section}]") }
        })
    }

    fn parsed<T: std::str::FromStr>(&self, section: &str, key: &str, what: &str) -> ConfigResult<Option<T>> {
        match self.entry(section, key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| {
                ConfigError::at(e.line, format!("`{section}.{key}` must be {what}, found `{}`", e.value))
            }),
        }
    }

    fn float(&self, section: &str, key: &str) -> ConfigResult<Option<f64>> {
        self.parsed(section, key, "a number")
    }

    fn required_float(&self, section: &str, key: &str) -> ConfigResult<f64> {
        self.float(section, key)?.ok_or_else(|| self.missing(section, key))
    }

    fn missing(&self, section: &str, key: &str) -> ConfigError {
        ConfigError { line: self.section(section).map(|s| s.line), message: format!("missing key `{key}` in [{section}]") }
    }

    fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        self.section(section)?.entries.iter().find(|e| e.key == key).map(|e| e.line)
    }

    /// Fails on the first key that no accessor asked for.
    fn reject_unknown(&self, known_sections: &[&str]) -> ConfigResult<()> {
        let used = self.used.borrow();
        for s in &self.sections {
            if !known_sections.contains(&s.name.as_str()) {
                return Err(ConfigError::at(s.line, format!("unknown section [{}]", s.name)));
            }
            for e in &s.entries {
                if !used.contains(&(s.name.clone(), e.key.clone())) {
                    return Err(ConfigError::at(e.line, format!("unknown key `{}` in [{}]", e.key, s.name)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    SpinStar(SpinStarParams),
    Transmon(TransmonParams),
    Tabulated(PathBuf),
}

impl ModelSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::SpinStar(_) => "spin_star",
            ModelSpec::Transmon(_) => "transmon",
            ModelSpec::Tabulated(_) => "tabulated",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Stochastic(SolverKind),
    Rk4,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverSection {
    pub method: Method,
    pub t0: f64,
    pub t_max: f64,
    pub dt: f64,
    pub n_ensemble: i64,
    pub seed: u64,
    pub consolidation_tol: f64,
    pub consolidation_stride: usize,
    pub record_stride: usize,
    pub monitor_positivity: bool,
    pub positivity_tol: f64,
}

impl SolverSection {
    pub fn stochastic_config(&self) -> Option<SolverConfig> {
        match self.method {
            Method::Stochastic(kind) => Some(SolverConfig {
                kind,
                t0: self.t0,
                t_max: self.t_max,
                dt: self.dt,
                n_ensemble: self.n_ensemble,
                seed: self.seed,
                consolidation_tol: self.consolidation_tol,
                consolidation_stride: self.consolidation_stride,
                record_stride: self.record_stride,
            }),
            Method::Rk4 => None,
        }
    }

    pub fn reference_config(&self) -> Option<ReferenceConfig> {
        match self.method {
            Method::Rk4 => Some(ReferenceConfig {
                t0: self.t0,
                t_max: self.t_max,
                dt: self.dt,
                record_stride: self.record_stride,
                monitor_positivity: self.monitor_positivity,
                positivity_tol: self.positivity_tol,
            }),
            Method::Stochastic(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialSpec {
    State(StateVector),
    Density(DensityMatrix),
}

/// A recorded observable; `abs` reports |⟨O⟩| instead of ⟨O⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSpec {
    pub name: String,
    pub operator: Operator,
    pub abs: bool,
}

impl ObservableSpec {
    /// `sigma_x|y|z`, `identity`, or 1-based `rhoIJ` with ⟨O⟩ = ρ_IJ; an
    /// `abs_` prefix takes the modulus.
    pub fn parse(name: &str, dim: usize) -> Option<Self> {
        let (abs, base) = match name.strip_prefix("abs_") {
            Some(rest) => (true, rest),
            None => (false, name),
        };
        let operator = match base {
            "sigma_x" if dim == 2 => Operator::sigma_x(),
            "sigma_y" if dim == 2 => Operator::sigma_y(),
            "sigma_z" if dim == 2 => Operator::sigma_z(),
            "identity" => Operator::identity(dim),
            _ => {
                let digits = base.strip_prefix("rho")?;
                let (i, j) = if digits.len() == 2 && dim <= 9 {
                    (digits[..1].parse::<usize>().ok()?, digits[1..].parse::<usize>().ok()?)
                } else {
                    let (a, b) = digits.split_once('_')?;
                    (a.parse().ok()?, b.parse().ok()?)
                };
                if i == 0 || j == 0 || i > dim || j > dim {
                    return None;
                }
                // tr(|j⟩⟨i| ρ) = ⟨i|ρ|j⟩
                Operator::matrix_unit(dim, j - 1, i - 1)
            }
        };
        Some(ObservableSpec { name: name.to_string(), operator, abs })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub solver: SolverSection,
    pub initial: InitialSpec,
    pub output_path: Option<PathBuf>,
    pub observables: Vec<ObservableSpec>,
}

/// Default initial state (1/√2)|0⟩ + ((1+i)/2)|1⟩.
pub fn default_initial_state() -> StateVector {
    StateVector::new(&[C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0), C64::new(0.5, 0.5)])
}

fn parse_complex_list(text: &str, line: usize) -> ConfigResult<Vec<C64>> {
    text.split(',')
        .map(|v| parse_complex(v).ok_or_else(|| ConfigError::at(line, format!("invalid complex literal `{}`", v.trim()))))
        .collect()
}

/// Reads the `[model]` section. `base` resolves relative model file paths;
/// `t_max`/`dt` provide transmon defaults.
fn model_section(ini: &Ini, base: &Path, t_max: Option<f64>, dt: Option<f64>) -> ConfigResult<ModelSpec> {
    ini.require_section("model")?;
    let (kind, line) = ini.required_string("model", "kind")?;
    let invalid = |e: crate::Error| ConfigError::at(line, format!("invalid [model] parameters: {e}"));
    match kind.as_str() {
        "spin_star" => {
            let p = SpinStarParams {
                alpha: ini.required_float("model", "alpha")?,
                n_spins: ini.parsed("model", "n_spins", "a positive integer")?.ok_or_else(|| ini.missing("model", "n_spins"))?,
                beta_omega: ini.required_float("model", "beta_omega")?,
            };
            p.validate().map_err(invalid)?;
            Ok(ModelSpec::SpinStar(p))
        }
        "transmon" => {
            let s_max = match ini.float("model", "s_max")? {
                Some(s) => s,
                None => t_max.ok_or_else(|| ini.missing("model", "s_max"))?,
            };
            let table_points = match ini.parsed("model", "table_points", "an integer")? {
                Some(n) => n,
                None => {
                    let spacing = dt.unwrap_or(s_max / 1000.0);
                    ((s_max / spacing).ceil() as usize + 1).max(1000)
                }
            };
            let p = TransmonParams { alpha: ini.required_float("model", "alpha")?, c: ini.required_float("model", "c")?, s_max, table_points };
            p.validate().map_err(invalid)?;
            Ok(ModelSpec::Transmon(p))
        }
        "tabulated" => {
            let (file, file_line) = ini.required_string("model", "file")?;
            let path = base.join(file);
            if !path.is_file() {
                return Err(ConfigError::at(file_line, format!("model file {} does not exist", path.display())));
            }
            Ok(ModelSpec::Tabulated(path))
        }
        other => Err(ConfigError::at(line, format!("unknown model kind `{other}` (expected spin_star, transmon or tabulated)"))),
    }
}

/// Only the `[model]` section, as used by `export-analytic --params`. An
/// optional `[initial] state` is returned alongside.
pub fn parse_model_params(text: &str, base: &Path) -> ConfigResult<(ModelSpec, Option<StateVector>)> {
    let ini = Ini::parse(text)?;
    let model = model_section(&ini, base, None, None)?;
    let state = match ini.string("initial", "state")? {
        Some((v, line)) => Some(
            StateVector::new(&parse_complex_list(&v, line)?)
                .normalize()
                .map_err(|e| ConfigError::at(line, e.to_string()))?,
        ),
        None => None,
    };
    Ok((model, state))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::general(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> ConfigResult<Self> {
        let ini = Ini::parse(text)?;
        let solver = solver_section(&ini)?;
        let model = model_section(&ini, base, Some(solver.t_max), Some(solver.dt))?;
        let dim = match &model {
            ModelSpec::SpinStar(_) | ModelSpec::Transmon(_) => 2,
            ModelSpec::Tabulated(path) => crate::models::TabulatedModel::from_file(path)
                .map(|m| crate::models::LindbladModel::dim(&m))
                .map_err(|e| ConfigError::at(ini.line_of("model", "file").unwrap_or(0), format!("model file: {e}")))?,
        };
        let initial = initial_section(&ini, dim, &solver.method)?;

        let output_path = ini.string("output", "path")?.map(|(p, _)| base.join(p));
        let observables = match ini.string("output", "observables")? {
            Some((list, line)) => list
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|name| {
                    ObservableSpec::parse(name, dim)
                        .ok_or_else(|| ConfigError::at(line, format!("unknown observable `{name}` for dim {dim}")))
                })
                .collect::<ConfigResult<Vec<_>>>()?,
            None => vec![ObservableSpec::parse("rho12", dim).expect("dim >= 2")],
        };
        ini.reject_unknown(&["model", "solver", "initial", "output"])?;
        Ok(RunConfig { model, solver, initial, output_path, observables })
    }
}

fn solver_section(ini: &Ini) -> ConfigResult<SolverSection> {
    let header = ini.require_section("solver")?.line;
    let (kind, kind_line) = ini.required_string("solver", "kind")?;
    let method = match kind.as_str() {
        "rk4" => Method::Rk4,
        other => Method::Stochastic(other.parse().map_err(|_| {
            ConfigError::at(kind_line, format!("unknown solver kind `{other}` (expected mcwf, nmep, nmqj or rk4)"))
        })?),
    };
    let t0 = ini.float("solver", "t0")?.unwrap_or(0.0);
    let t_max = ini.required_float("solver", "t_max")?;
    if !(t_max > t0) {
        return Err(ConfigError::at(ini.line_of("solver", "t_max").unwrap_or(header), "t_max must exceed t0"));
    }
    let dt = match (ini.float("solver", "dt")?, ini.parsed::<usize>("solver", "steps", "a positive integer")?) {
        (Some(_), Some(_)) => {
            let line = ini.line_of("solver", "dt").unwrap_or(header);
            return Err(ConfigError::at(line, "give either `dt` or `steps`, not both"));
        }
        (Some(dt), None) => dt,
        (None, Some(steps)) if steps > 0 => (t_max - t0) / steps as f64,
        (None, Some(_)) => return Err(ConfigError::at(ini.line_of("solver", "steps").unwrap_or(header), "steps must be positive")),
        (None, None) => return Err(ConfigError::at(header, "missing `dt` or `steps` in [solver]")),
    };
    if !(dt > 0.0) || (t_max - t0) / dt < 1.0 - 1e-9 {
        return Err(ConfigError::at(ini.line_of("solver", "dt").unwrap_or(header), "dt must be positive and at most t_max - t0"));
    }
    let stochastic = matches!(method, Method::Stochastic(_));
    let n_ensemble: i64 = match ini.parsed("solver", "n_ensemble", "a positive integer")? {
        Some(n) => n,
        None if stochastic => return Err(ini.missing("solver", "n_ensemble")),
        None => 1,
    };
    if n_ensemble < 1 {
        return Err(ConfigError::at(ini.line_of("solver", "n_ensemble").unwrap_or(header), "n_ensemble must be >= 1"));
    }
    let positive = |key: &str, v: usize| {
        if v == 0 {
            Err(ConfigError::at(ini.line_of("solver", key).unwrap_or(header), format!("{key} must be >= 1")))
        } else {
            Ok(v)
        }
    };
    let section = SolverSection {
        method,
        t0,
        t_max,
        dt,
        n_ensemble,
        seed: ini.parsed("solver", "seed", "a non-negative integer")?.unwrap_or(0),
        consolidation_tol: ini.float("solver", "consolidation_tol")?.unwrap_or(DEFAULT_CONSOLIDATION_TOL),
        consolidation_stride: positive("consolidation_stride", ini.parsed("solver", "consolidation_stride", "an integer")?.unwrap_or(1))?,
        record_stride: positive("record_stride", ini.parsed("solver", "record_stride", "an integer")?.unwrap_or(1))?,
        monitor_positivity: ini.parsed("solver", "monitor_positivity", "true or false")?.unwrap_or(false),
        positivity_tol: ini.float("solver", "positivity_tol")?.unwrap_or(1e-9),
    };
    Ok(section)
}

fn initial_section(ini: &Ini, dim: usize, method: &Method) -> ConfigResult<InitialSpec> {
    let header = ini.require_section("initial")?.line;
    let state = ini.string("initial", "state")?;
    let density = ini.string("initial", "density")?;
    let spec = match (state, density) {
        (Some(_), Some(_)) => return Err(ConfigError::at(header, "give either `state` or `density`, not both")),
        (Some((text, line)), None) => {
            let amps = parse_complex_list(&text, line)?;
            if amps.len() != dim {
                return Err(ConfigError::at(line, format!("state has {} amplitudes, model dimension is {dim}", amps.len())));
            }
            let psi = StateVector::new(&amps).normalize().map_err(|e| ConfigError::at(line, e.to_string()))?;
            InitialSpec::State(psi)
        }
        (None, Some((text, line))) => {
            let rows: Vec<Vec<C64>> =
                text.split(';').map(|row| parse_complex_list(row, line)).collect::<ConfigResult<_>>()?;
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(ConfigError::at(line, format!("density must be {dim}x{dim} (rows separated by `;`)")));
            }
            let m = Operator::new(dim, rows.concat()).map_err(|e| ConfigError::at(line, e.to_string()))?;
            InitialSpec::Density(DensityMatrix::new(m).map_err(|e| ConfigError::at(line, e.to_string()))?)
        }
        (None, None) => return Err(ConfigError::at(header, "missing `state` or `density` in [initial]")),
    };
    match (&spec, method) {
        (InitialSpec::Density(_), Method::Stochastic(kind)) => {
            Err(ConfigError::at(header, format!("solver kind {kind} needs a pure `state`, not a `density`")))
        }
        (InitialSpec::State(psi), Method::Rk4) => Ok(InitialSpec::Density(DensityMatrix::pure(psi))),
        _ => Ok(spec),
    }
}
