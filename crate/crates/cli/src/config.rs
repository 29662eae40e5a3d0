//! Run configuration: experiment registry, parameter schemas, and the
//! defaults ← config file ← command-line flags merge.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_OUT_DIR: &str = "qchaos_out";

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub key: &'static str,
    pub default: f64,
    pub integer: bool,
    pub doc: &'static str,
}

#[derive(Debug, Clone, Copy)]
pub struct ExperimentSpec {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [ParamSpec],
}

pub const EXPERIMENTS: &[ExperimentSpec] = &[
    ExperimentSpec {
        name: "curvature-defect",
        summary: "recover K from mapped circle-length defects with Richardson extrapolation",
        params: &[
            ParamSpec { key: "K", default: -1.0, integer: false, doc: "sectional curvature" },
            ParamSpec { key: "r_max", default: 0.1, integer: false, doc: "largest circle radius (halved per level)" },
            ParamSpec { key: "r_levels", default: 3.0, integer: true, doc: "number of radii in the ladder" },
            ParamSpec { key: "segments", default: 512.0, integer: true, doc: "polygon chords per circle" },
        ],
    },
    ExperimentSpec {
        name: "jacobi-check",
        summary: "numeric geodesic-deviation integration against the closed form, with Wronskian drift",
        params: &[
            ParamSpec { key: "K", default: -1.0, integer: false, doc: "sectional curvature" },
            ParamSpec { key: "t", default: 10.0, integer: false, doc: "integration horizon" },
            ParamSpec { key: "dt", default: 1e-3, integer: false, doc: "integrator step" },
        ],
    },
    ExperimentSpec {
        name: "geodesic-lyapunov",
        summary: "standard exponent of hyperbolic geodesic separation, cross-checked by renormalized tangent evolution",
        params: &[
            ParamSpec { key: "K", default: -1.0, integer: false, doc: "sectional curvature (must be negative)" },
            ParamSpec { key: "t", default: 30.0, integer: false, doc: "separation horizon" },
            ParamSpec { key: "samples", default: 600.0, integer: true, doc: "series samples" },
            ParamSpec { key: "dt", default: 1e-3, integer: false, doc: "tangent integrator step" },
            ParamSpec { key: "renorm", default: 10.0, integer: true, doc: "steps between renormalizations" },
            ParamSpec { key: "tail", default: 0.5, integer: false, doc: "tail fraction for the fit window" },
            ParamSpec { key: "benettin_t", default: 100.0, integer: false, doc: "tangent evolution horizon" },
        ],
    },
    ExperimentSpec {
        name: "deformed-lyapunov",
        summary: "re-measure exponential separations on the tau_q scale: vanishing exponent, linear profile",
        params: &[
            ParamSpec { key: "K", default: -1.0, integer: false, doc: "sectional curvature (must be negative)" },
            ParamSpec { key: "q", default: 0.5, integer: false, doc: "entropic index in (0, 1)" },
            ParamSpec { key: "t", default: 60.0, integer: false, doc: "long separation horizon" },
            ParamSpec { key: "t_short", default: 30.0, integer: false, doc: "short horizon for the shrink check" },
            ParamSpec { key: "samples", default: 600.0, integer: true, doc: "series samples at the long horizon" },
            ParamSpec { key: "tail", default: 0.5, integer: false, doc: "tail fraction for the fit window" },
        ],
    },
    ExperimentSpec {
        name: "modified-exponent",
        summary: "polynomial-degree estimator on synthetic power-law separations",
        params: &[
            ParamSpec { key: "degree", default: 2.5, integer: false, doc: "power-law degree of the synthetic series" },
            ParamSpec { key: "t", default: 100.0, integer: false, doc: "series horizon" },
            ParamSpec { key: "samples", default: 1000.0, integer: true, doc: "series samples" },
            ParamSpec { key: "tail", default: 0.5, integer: false, doc: "tail fraction for the fit window" },
        ],
    },
    ExperimentSpec {
        name: "anosov",
        summary: "uniform-hyperbolicity checks for the torus cat map plus its two-exponent spectrum",
        params: &[
            ParamSpec { key: "samples", default: 100.0, integer: true, doc: "random orbit starting points" },
            ParamSpec { key: "t_max", default: 30.0, integer: true, doc: "iterates checked per point" },
            ParamSpec { key: "tolerance", default: 1e-9, integer: false, doc: "bound tolerance" },
            ParamSpec { key: "spectrum_iters", default: 1_000_000.0, integer: true, doc: "Jacobian products for the spectrum" },
        ],
    },
    ExperimentSpec {
        name: "logistic-edge",
        summary: "logistic-map sensitivity at the period-doubling accumulation point with the q-exponential fit",
        params: &[
            ParamSpec { key: "a", default: 0.0, integer: false, doc: "map parameter; 0 resolves to the accumulation point" },
            ParamSpec { key: "x0", default: 0.2, integer: false, doc: "initial condition for the exponent estimate" },
            ParamSpec { key: "n", default: 100_000.0, integer: true, doc: "iterations" },
            ParamSpec { key: "q_min", default: 0.05, integer: false, doc: "q grid start" },
            ParamSpec { key: "q_max", default: 0.95, integer: false, doc: "q grid end" },
            ParamSpec { key: "q_step", default: 0.01, integer: false, doc: "q grid step" },
            ParamSpec { key: "tail", default: 0.5, integer: false, doc: "tail fraction for the exponent fit" },
        ],
    },
    ExperimentSpec {
        name: "entropy-compose",
        summary: "Tsallis composition law against the brute-force product distribution",
        params: &[
            ParamSpec { key: "q", default: 0.5, integer: false, doc: "entropic index in (0, 1)" },
            ParamSpec { key: "n_a", default: 4.0, integer: true, doc: "outcomes of the first distribution (<= 8)" },
            ParamSpec { key: "n_b", default: 6.0, integer: true, doc: "outcomes of the second distribution (<= 8)" },
        ],
    },
];

pub fn find_experiment(name: &str) -> Option<&'static ExperimentSpec> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: String,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn param(&self, key: &str) -> f64 {
        self.params[key]
    }

    pub fn param_usize(&self, key: &str) -> usize {
        self.params[key] as usize
    }
}

#[derive(Default)]
struct RawConfig {
    experiment: Option<String>,
    seed: Option<String>,
    out: Option<String>,
    params: Vec<(String, String)>,
}

/// Merges defaults ← config file ← command-line flags, in that precedence.
/// `args` are the tokens after the `run` subcommand.
pub fn parse_config(args: &[String]) -> Result<RunConfig, CliError> {
    let mut flags = RawConfig::default();
    let mut config_path: Option<PathBuf> = None;

    let mut i = 0;
    while i < args.len() {
        let flag = &args[i];
        let Some(key) = flag.strip_prefix("--") else {
            return Err(CliError::config(format!(
                "expected a --flag, got `{flag}`"
            )));
        };
        if key.is_empty() {
            return Err(CliError::config("empty flag `--`"));
        }
        let Some(value) = args.get(i + 1) else {
            return Err(CliError::config(format!("flag --{key} is missing a value")));
        };
        match key {
            "experiment" => flags.experiment = Some(value.clone()),
            "config" => config_path = Some(PathBuf::from(value)),
            "seed" => flags.seed = Some(value.clone()),
            "out" => flags.out = Some(value.clone()),
            _ => flags.params.push((key.to_string(), value.clone())),
        }
        i += 2;
    }

    let file = match &config_path {
        Some(path) => parse_config_file(path)?,
        None => RawConfig::default(),
    };

    // Precedence: file first, flags override.
    let experiment_name = flags
        .experiment
        .or(file.experiment)
        .ok_or_else(|| CliError::config("no experiment selected (use --experiment <name>)"))?;
    let spec = find_experiment(&experiment_name).ok_or_else(|| {
        CliError::config(format!(
            "unknown experiment `{experiment_name}` (see `qchaos list`)"
        ))
    })?;

    let mut params: BTreeMap<String, f64> = spec
        .params
        .iter()
        .map(|p| (p.key.to_string(), p.default))
        .collect();
    for (key, value) in file.params.iter().chain(flags.params.iter()) {
        let param = spec
            .params
            .iter()
            .find(|p| p.key == key)
            .ok_or_else(|| {
                CliError::config(format!(
                    "unknown key `{key}` for experiment `{experiment_name}`"
                ))
            })?;
        let parsed: f64 = value.parse().map_err(|_| {
            CliError::config(format!("key `{key}` expects a number, got `{value}`"))
        })?;
        if !parsed.is_finite() {
            return Err(CliError::config(format!("key `{key}` must be finite")));
        }
        if param.integer && (parsed.fract() != 0.0 || parsed < 0.0 || parsed > 2f64.powi(53)) {
            return Err(CliError::config(format!(
                "key `{key}` expects a nonnegative integer, got `{value}`"
            )));
        }
        params.insert(key.clone(), parsed);
    }

    let seed = match flags.seed.or(file.seed) {
        Some(raw) => raw
            .parse::<u64>()
            .map_err(|_| CliError::config(format!("seed expects a u64, got `{raw}`")))?,
        None => DEFAULT_SEED,
    };
    let output_dir = PathBuf::from(flags.out.or(file.out).unwrap_or_else(|| DEFAULT_OUT_DIR.into()));

    Ok(RunConfig {
        experiment: experiment_name,
        params,
        seed,
        output_dir,
    })
}

/// Flat key=value format, one pair per line, `#` comments.
fn parse_config_file(path: &Path) -> Result<RawConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    let mut raw = RawConfig::default();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(CliError::config(format!(
                "{}:{lineno}: expected key = value, got `{trimmed}`",
                path.display()
            )));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty()
            || !key.chars().next().unwrap().is_ascii_alphabetic()
            || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(CliError::config(format!(
                "{}:{lineno}: malformed key `{key}`",
                path.display()
            )));
        }
        if value.is_empty() {
            return Err(CliError::config(format!(
                "{}:{lineno}: key `{key}` has no value",
                path.display()
            )));
        }
        match key {
            "experiment" => raw.experiment = Some(value.to_string()),
            "seed" => raw.seed = Some(value.to_string()),
            "out" => raw.out = Some(value.to_string()),
            _ => raw.params.push((key.to_string(), value.to_string())),
        }
    }
    Ok(raw)
}
