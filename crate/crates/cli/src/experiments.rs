//! The eight registered experiments: each runs the relevant machinery,
//! declares acceptance bands for its headline estimates, and emits
//! plot-ready CSV plus a JSON summary.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use qchaos_core::jacobi::{
    classify_separation, jacobi_component, jacobi_integrate, GrowthClass, JacobiState,
};
use qchaos_core::lyapunov::{
    benettin_flow_exponent, deformed_lyapunov, deformed_series, map_lyapunov_spectrum,
    modified_lyapunov, standard_lyapunov, SeparationSeries,
};
use qchaos_core::qcalc::{DeformParam, Distribution};
use qchaos_core::rng::SplitMix64;
use qchaos_core::spaceform::{SpaceForm, TangentFrame};
use qchaos_core::systems::{
    anosov_verify, cat_map_differential, critical_orbit_sensitivity, edge_of_chaos_param,
    geodesic_separation_series, logistic_sensitivity_series, q_sensitivity_fit, LogisticParams,
};

use crate::config::RunConfig;
use crate::emit::{self, Column};
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct EstimateOut {
    pub name: String,
    pub value: f64,
    pub stderr: f64,
    /// Acceptance band [lo, hi]; absent for informational estimates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<[f64; 2]>,
    pub pass: bool,
}

impl EstimateOut {
    fn banded(name: &str, value: f64, stderr: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            stderr,
            band: Some([lo, hi]),
            pass: value >= lo && value <= hi,
        }
    }

    fn info(name: &str, value: f64, stderr: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            stderr,
            band: None,
            pass: true,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
    pub estimates: Vec<EstimateOut>,
    pub pass: bool,
    pub duration_seconds: f64,
    pub outputs: Vec<String>,
}

struct ExperimentOutput {
    estimates: Vec<EstimateOut>,
    outputs: Vec<PathBuf>,
    /// Parameters after resolution (e.g. a = 0 replaced by the computed
    /// accumulation point).
    resolved: BTreeMap<String, f64>,
}

/// Executes one registered experiment; writes its CSV series, an estimates
/// CSV, and a JSON summary into the configured output directory. Identical
/// configurations produce byte-identical CSV files.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let started = Instant::now();
    emit::ensure_dir(&cfg.output_dir)?;
    let mut out = match cfg.experiment.as_str() {
        "curvature-defect" => curvature_defect(cfg)?,
        "jacobi-check" => jacobi_check(cfg)?,
        "geodesic-lyapunov" => geodesic_lyapunov(cfg)?,
        "deformed-lyapunov" => deformed_lyapunov_experiment(cfg)?,
        "modified-exponent" => modified_exponent(cfg)?,
        "anosov" => anosov_experiment(cfg)?,
        "logistic-edge" => logistic_edge(cfg)?,
        "entropy-compose" => entropy_compose(cfg)?,
        other => return Err(CliError::config(format!("unknown experiment `{other}`"))),
    };

    // Every estimate in the summary also exists in an emitted CSV.
    let estimates_csv = cfg.output_dir.join(format!("{}_estimates.csv", cfg.experiment));
    emit::write_csv(
        &estimates_csv,
        &[
            Column::text(
                "name",
                out.estimates.iter().map(|e| e.name.clone()).collect(),
            ),
            Column::float("value", out.estimates.iter().map(|e| e.value).collect()),
            Column::float("stderr", out.estimates.iter().map(|e| e.stderr).collect()),
        ],
    )?;
    out.outputs.push(estimates_csv);

    let summary = RunSummary {
        experiment: cfg.experiment.clone(),
        params: out.resolved,
        seed: cfg.seed,
        pass: out.estimates.iter().all(|e| e.pass),
        estimates: out.estimates,
        duration_seconds: started.elapsed().as_secs_f64(),
        outputs: out
            .outputs
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
    };
    let summary_path = cfg
        .output_dir
        .join(format!("{}_summary.json", cfg.experiment));
    emit::write_json(&summary_path, &summary)?;
    Ok(summary)
}

pub fn summary_path(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir
        .join(format!("{}_summary.json", cfg.experiment))
}

fn check(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::config(msg.to_string()))
    }
}

/// Canonical 2-frame at the model basepoint.
fn base_frame(space: &SpaceForm) -> Result<TangentFrame, CliError> {
    let state = space.canonical_state();
    let n = space.ambient_dim();
    let mut e1 = vec![0.0; n];
    let mut e2 = vec![0.0; n];
    if space.curvature() == 0.0 {
        e1[0] = 1.0;
        e2[1] = 1.0;
    } else {
        e1[1] = 1.0;
        e2[2] = 1.0;
    }
    space
        .tangent_frame(state.position().to_vec(), vec![e1, e2])
        .map_err(CliError::numeric)
}

fn normal_direction(space: &SpaceForm) -> Vec<f64> {
    let mut v = vec![0.0; space.ambient_dim()];
    v[space.ambient_dim() - 1] = 1.0;
    v
}

fn curvature_defect(cfg: &RunConfig) -> Result<ExperimentOutput, CliError> {
    let k = cfg.param("K");
    let r_max = cfg.param("r_max");
    let levels = cfg.param_usize("r_levels");
    let segments = cfg.param_usize("segments");
    check(levels >= 2, "r_levels must be at least 2 for extrapolation")?;
    check(r_max > 0.0 && r_max <= 0.5, "r_max must be in (0, 0.5]")?;
    check(segments >= 64, "segments must be at least 64")?;

    let space = SpaceForm::new(k, 2).map_err(|e| CliError::config(e.to_string()))?;
    let frame = base_frame(&space)?;
    let radii: Vec<f64> = (0..levels).map(|j| r_max / 2f64.powi(j as i32)).collect();

    let mut per_radius = Vec::with_capacity(radii.len());
    for &r in &radii {
        let d = space
            .circle_defect_curvature(&frame, &[r], segments)
            .map_err(|e| CliError::config(e.to_string()))?;
        per_radius.push(d);
    }
    let estimate = space
        .circle_defect_curvature(&frame, &radii, segments)
        .map_err(|e| CliError::config(e.to_string()))?;

    let csv = cfg.output_dir.join("curvature-defect.csv");
    emit::write_csv(
        &csv,
        &[
            Column::float("r", radii.clone()),
            Column::float("defect_estimate", per_radius),
        ],
    )?;

    Ok(ExperimentOutput {
        estimates: vec![EstimateOut::banded(
            "curvature",
            estimate,
            0.0,
            k - 1e-3,
            k + 1e-3,
        )],
        outputs: vec![csv],
        resolved: cfg.params.clone(),
    })
}

fn jacobi_check(cfg: &RunConfig) -> Result<ExperimentOutput, CliError> {
    let k = cfg.param("K");
    let horizon = cfg.param("t");
    let dt = cfg.param("dt");
    check(horizon > 0.0, "t must be positive")?;
    check(dt > 0.0 && dt < horizon, "dt must be in (0, t)")?;

    let checkpoints = 20usize;
    // Solution scale for the relative comparison: the closed form with
    // (J, J') = (0, 1) has amplitude 1/sqrt(|K|) (1 when flat).
    let amplitude = if k == 0.0 { 1.0 } else { 1.0 / k.abs().sqrt() };

    let mut state = JacobiState::new(0.0, 1.0);
    let mut reached = 0.0;
    let mut times = Vec::with_capacity(checkpoints);
    let mut closed = Vec::with_capacity(checkpoints);
    let mut numeric = Vec::with_capacity(checkpoints);
    let mut rel_errs = Vec::with_capacity(checkpoints);

    // Wronskian pair: decaying+growing modes for K < 0 keep the products
    // O(1) so the drift is measurable; basis pair otherwise.
    let (mut w_a, mut w_b) = if k < 0.0 {
        let rate = (-k).sqrt();
        (JacobiState::new(1.0, -rate), JacobiState::new(1.0, rate))
    } else {
        (JacobiState::new(1.0, 0.0), JacobiState::new(0.0, 1.0))
    };
    let w0 = w_a.value * w_b.derivative - w_b.value * w_a.derivative;
    let mut max_drift: f64 = 0.0;

    let mut max_rel: f64 = 0.0;
    for j in 1..=checkpoints {
        let target = horizon * j as f64 / checkpoints as f64;
        let span = target - reached;
        state = jacobi_integrate(k, state, span, dt).map_err(CliError::numeric)?;
        w_a = jacobi_integrate(k, w_a, span, dt).map_err(CliError::numeric)?;
        w_b = jacobi_integrate(k, w_b, span, dt).map_err(CliError::numeric)?;
        reached = target;

        let exact = jacobi_component(k, 0.0, 1.0, target);
        let rel = (state.value - exact).abs() / exact.abs().max(amplitude);
        max_rel = max_rel.max(rel);
        let w = w_a.value * w_b.derivative - w_b.value * w_a.derivative;
        max_drift = max_drift.max((w - w0).abs());

        times.push(target);
        closed.push(exact);
        numeric.push(state.value);
        rel_errs.push(rel);
    }

    let csv = cfg.output_dir.join("jacobi-check.csv");
    emit::write_csv(
        &csv,
        &[
            Column::float("t", times),
            Column::float("j_closed", closed),
            Column::float("j_numeric", numeric),
            Column::float("rel_err", rel_errs),
        ],
    )?;

    Ok(ExperimentOutput {
        estimates: vec![
            EstimateOut::banded("max_rel_err", max_rel, 0.0, 0.0, 1e-8),
            EstimateOut::banded("wronskian_drift", max_drift, 0.0, 0.0, 1e-9),
        ],
        outputs: vec![csv],
        resolved: cfg.params.clone(),
    })
}

fn series_columns(series: &SeparationSeries) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let times = series.times().to_vec();
    let logs = series.log_deltas().to_vec();
    let deltas: Vec<f64> = logs.iter().map(|s| s.exp()).collect();
    (times, deltas, logs)
}

fn geodesic_lyapunov(cfg: &RunConfig) -> Result<ExperimentOutput, CliError> {
    let k = cfg.param("K");
    let horizon = cfg.param("t");
    let samples = cfg.param_usize("samples");
    let tail = cfg.param("tail");
    check(k < 0.0, "geodesic-lyapunov needs negative curvature")?;
    let rate = (-k).sqrt();
    check(
        rate * horizon <= 700.0,
        "separation exceeds f64 range: need sqrt(-K)*t <= 700",
    )?;

    let space = SpaceForm::new(k, 2).map_err(|e| CliError::config(e.to_string()))?;
    let state = space.canonical_state();
    let series = geodesic_separation_series(&space, &state, &normal_direction(&space), horizon, samples)
        .map_err(|e| CliError::config(e.to_string()))?;
    let standard = standard_lyapunov(&series, tail).map_err(|e| CliError::config(e.to_string()))?;
    let benettin = benettin_flow_exponent(
        k,
        JacobiState::new(0.0, 1.0),
        cfg.param("benettin_t"),
        cfg.param("dt"),
        cfg.param_usize("renorm"),
    )
    .map_err(|e| CliError::config(e.to_string()))?;

    let (times, deltas, logs) = series_columns(&series);
    let csv = cfg.output_dir.join("geodesic-lyapunov.csv");
    emit::write_csv(
        &csv,
        &[
            Column::float("t", times),
            Column::float("delta", deltas),
            Column::float("ln_delta", logs),
        ],
    )?;

    Ok(ExperimentOutput {
        estimates: vec![
            EstimateOut::banded(
                "standard_exponent",
                standard.value,
                standard.stderr,
                rate * 0.98,
                rate * 1.02,
            ),
            EstimateOut::banded(
                "benettin_exponent",
                benettin.value,
                benettin.stderr,
                rate * 0.98,
                rate * 1.02,
            ),
            EstimateOut::banded(
                "method_disagreement",
                (standard.value - benettin.value).abs(),
                0.0,
                0.0,
                0.02 * rate,
            ),
        ],
        outputs: vec![csv],
        resolved: cfg.params.clone(),
    })
}

fn deformed_lyapunov_experiment(cfg: &RunConfig) -> Result<ExperimentOutput, CliError> {
    let k = cfg.param("K");
    let horizon = cfg.param("t");
    let horizon_short = cfg.param("t_short");
    let samples = cfg.param_usize("samples");
    let tail = cfg.param("tail");
    check(k < 0.0, "deformed-lyapunov needs negative curvature")?;
    check(
        horizon_short > 0.0 && horizon_short < horizon,
        "t_short must be in (0, t)",
    )?;
    let rate = (-k).sqrt();
    check(
        rate * horizon <= 700.0,
        "separation exceeds f64 range: need sqrt(-K)*t <= 700",
    )?;
    let deform = DeformParam::new(cfg.param("q")).map_err(|e| CliError::config(e.to_string()))?;

    let space = SpaceForm::new(k, 2).map_err(|e| CliError::config(e.to_string()))?;
    let state = space.canonical_state();
    let dir = normal_direction(&space);
    let series = geodesic_separation_series(&space, &state, &dir, horizon, samples)
        .map_err(|e| CliError::config(e.to_string()))?;
    let samples_short =
        ((samples as f64 * horizon_short / horizon) as usize).max(qchaos_core::lyapunov::MIN_SAMPLES);
    let series_short = geodesic_separation_series(&space, &state, &dir, horizon_short, samples_short)
        .map_err(|e| CliError::config(e.to_string()))?;

    let standard = standard_lyapunov(&series, tail).map_err(CliError::numeric)?;
    let deformed_long = deformed_lyapunov(&deform, &series, tail).map_err(CliError::numeric)?;
    let deformed_short =
        deformed_lyapunov(&deform, &series_short, tail).map_err(CliError::numeric)?;
    let transformed = deformed_series(&deform, &series).map_err(CliError::numeric)?;
    let degree = modified_lyapunov(&transformed, tail).map_err(CliError::numeric)?;
    let class = classify_separation(&transformed).map_err(CliError::numeric)?;
    let is_linear = matches!(class, GrowthClass::Linear);

    let (times, deltas, logs) = series_columns(&series);
    let deformed_logs = transformed.log_deltas().to_vec();
    let deformed_deltas: Vec<f64> = deformed_logs.iter().map(|s| s.exp()).collect();
    let csv = cfg.output_dir.join("deformed-lyapunov.csv");
    emit::write_csv(
        &csv,
        &[
            Column::float("t", times),
            Column::float("delta", deltas),
            Column::float("delta_deformed", deformed_deltas),
            Column::float("ln_delta", logs),
            Column::float("ln_delta_deformed", deformed_logs),
        ],
    )?;

    Ok(ExperimentOutput {
        estimates: vec![
            EstimateOut::banded(
                "standard_exponent",
                standard.value,
                standard.stderr,
                rate * 0.98,
                rate * 1.02,
            ),
            EstimateOut::banded(
                "deformed_exponent",
                deformed_long.value,
                deformed_long.stderr,
                -0.05,
                0.05,
            ),
            EstimateOut::info("deformed_exponent_short", deformed_short.value, deformed_short.stderr),
            EstimateOut::banded(
                "window_shrink",
                deformed_short.value.abs() - deformed_long.value.abs(),
                0.0,
                1e-12,
                1e9,
            ),
            EstimateOut::banded(
                "deformed_poly_degree",
                degree.value,
                degree.stderr,
                0.9,
                1.1,
            ),
            EstimateOut::banded(
                "deformed_classified_linear",
                if is_linear { 1.0 } else { 0.0 },
                0.0,
                0.5,
                1.5,
            ),
        ],
        outputs: vec![csv],
        resolved: cfg.params.clone(),
    })
}

fn modified_exponent(cfg: &RunConfig) -> Result<ExperimentOutput, CliError> {
    let degree = cfg.param("degree");
    let horizon = cfg.param("t");
    let samples = cfg.param_usize("samples");
    let tail = cfg.param("tail");
    check(degree > 0.0, "degree must be positive")?;
    check(horizon > 0.0, "t must be positive")?;
    check(samples >= 50, "need at least 50 samples")?;

    let times: Vec<f64> = (1..=samples)
        .map(|i| horizon * i as f64 / samples as f64)
        .collect();
    let logs: Vec<f64> = times.iter().map(|&t| degree * t.ln()).collect();
    let series = SeparationSeries::from_log_deltas(times, logs).map_err(CliError::numeric)?;
    let modified = modified_lyapunov(&series, tail).map_err(CliError::numeric)?;
    let standard = standard_lyapunov(&series, tail).map_err(CliError::numeric)?;

    let (times, deltas, logs) = series_columns(&series);
    let csv = cfg.output_dir.join("modified-exponent.csv");
    emit::write_csv(
        &csv,
        &[
            Column::float("t", times),
            Column::float("delta", deltas),
            Column::float("ln_delta", logs),
        ],
    )?;

    Ok(ExperimentOutput {
        estimates: vec![
            EstimateOut::banded(
                "modified_exponent",
                modified.value,
                modified.stderr,
                degree - 1e-10,
                degree + 1e-10,
            ),
            EstimateOut::info("standard_exponent", standard.value, standard.stderr),
        ],
        outputs: vec![csv],
        resolved: cfg.params.clone(),
    })
}

fn anosov_experiment(cfg: &RunConfig) -> Result<ExperimentOutput, CliError> {
    let samples = cfg.param_usize("samples");
    let t_max = cfg.param_usize("t_max");
    let tolerance = cfg.param("tolerance");
    let spectrum_iters = cfg.param_usize("spectrum_iters");

    let report = anosov_verify(samples, t_max, tolerance, cfg.seed)
        .map_err(|e| CliError::config(e.to_string()))?;
    let (top, bottom) =
        map_lyapunov_spectrum(std::iter::repeat_n(cat_map_differential(), spectrum_iters))
            .map_err(|e| CliError::config(e.to_string()))?;

    let sqrt5 = 5f64.sqrt();
    let lambda = (3.0 - sqrt5) / 2.0;
    let mu = (3.0 + sqrt5) / 2.0;

    let csv = cfg.output_dir.join("anosov.csv");
    emit::write_csv(
        &csv,
        &[
            Column::text(
                "property",
                report
                    .checks
                    .iter()
                    .map(|c| format!("{:?}", c.property))
                    .collect(),
            ),
            Column::int(
                "applicable",
                report.checks.iter().map(|c| c.applicable as i64).collect(),
            ),
            Column::int(
                "passed",
                report.checks.iter().map(|c| c.passed as i64).collect(),
            ),
            Column::float(
                "measured",
                report.checks.iter().map(|c| c.measured).collect(),
            ),
            Column::float(
                "tolerance",
                report.checks.iter().map(|c| c.tolerance).collect(),
            ),
        ],
    )?;

    Ok(ExperimentOutput {
        estimates: vec![
            EstimateOut::banded(
                "contraction_rate",
                report.contraction_rate,
                0.0,
                lambda - 1e-12,
                lambda + 1e-12,
            ),
            EstimateOut::banded(
                "expansion_rate",
                report.expansion_rate,
                0.0,
                mu - 1e-12,
                mu + 1e-12,
            ),
            EstimateOut::banded(
                "constant",
                report.constant,
                0.0,
                1.0 - tolerance,
                1.0 + tolerance,
            ),
            EstimateOut::banded(
                "checks_passed",
                if report.passed() { 1.0 } else { 0.0 },
                0.0,
                0.5,
                1.5,
            ),
            EstimateOut::banded("spectrum_top", top, 0.0, mu.ln() - 1e-4, mu.ln() + 1e-4),
            EstimateOut::banded("spectrum_sum", top + bottom, 0.0, -1e-8, 1e-8),
        ],
        outputs: vec![csv],
        resolved: cfg.params.clone(),
    })
}

fn logistic_edge(cfg: &RunConfig) -> Result<ExperimentOutput, CliError> {
    let a_raw = cfg.param("a");
    let auto = a_raw == 0.0;
    let a = if auto { edge_of_chaos_param() } else { a_raw };
    let params = LogisticParams::new(a).map_err(|e| CliError::config(e.to_string()))?;
    let x0 = cfg.param("x0");
    let n = cfg.param_usize("n");
    let tail = cfg.param("tail");
    let (q_min, q_max, q_step) = (cfg.param("q_min"), cfg.param("q_max"), cfg.param("q_step"));
    check(
        q_min > 0.0 && q_max < 1.0 && q_min < q_max && q_step > 0.0,
        "q grid must satisfy 0 < q_min < q_max < 1 with positive step",
    )?;
    let mut grid = Vec::new();
    let mut q = q_min;
    while q <= q_max + 1e-12 {
        grid.push(q.min(q_max));
        q += q_step;
    }
    check(grid.len() >= 20, "q grid needs at least 20 values")?;

    let sensitivity = logistic_sensitivity_series(params, x0, n)
        .map_err(|e| CliError::config(e.to_string()))?;
    let exponent =
        standard_lyapunov(&sensitivity.series, tail).map_err(|e| CliError::config(e.to_string()))?;

    let critical = critical_orbit_sensitivity(params, n)
        .map_err(|e| CliError::config(e.to_string()))?;
    let fit = q_sensitivity_fit(&critical.series, &grid)
        .map_err(|e| CliError::config(e.to_string()))?;

    let series_csv = cfg.output_dir.join("logistic-edge.csv");
    emit::write_csv(
        &series_csv,
        &[
            Column::float("n", sensitivity.series.times().to_vec()),
            Column::float("ln_xi", sensitivity.series.log_deltas().to_vec()),
        ],
    )?;
    let mut env = Vec::with_capacity(critical.series.len());
    let mut best = f64::NEG_INFINITY;
    for &s in critical.series.log_deltas() {
        best = best.max(s);
        env.push(best);
    }
    let qfit_csv = cfg.output_dir.join("logistic-edge_qfit.csv");
    emit::write_csv(
        &qfit_csv,
        &[
            Column::float("n", critical.series.times().to_vec()),
            Column::float("ln_xi", critical.series.log_deltas().to_vec()),
            Column::float("env_ln_xi", env),
        ],
    )?;

    let mut resolved = cfg.params.clone();
    resolved.insert("a".to_string(), a);

    let mut estimates = vec![
        if auto {
            EstimateOut::banded(
                "lyapunov_exponent",
                exponent.value,
                exponent.stderr,
                -0.01,
                0.01,
            )
        } else {
            EstimateOut::info("lyapunov_exponent", exponent.value, exponent.stderr)
        },
        if auto {
            EstimateOut::banded("q_sen", fit.q_sen, 0.0, 0.15, 0.35)
        } else {
            EstimateOut::info("q_sen", fit.q_sen, 0.0)
        },
        EstimateOut::info("lambda_q", fit.lambda_q, 0.0),
        EstimateOut::info("fit_quality", fit.fit_quality, 0.0),
    ];
    if let Some(step) = sensitivity.zero_hit {
        estimates.push(EstimateOut::info("zero_hit_step", step as f64, 0.0));
    }

    Ok(ExperimentOutput {
        estimates,
        outputs: vec![series_csv, qfit_csv],
        resolved,
    })
}

fn entropy_compose(cfg: &RunConfig) -> Result<ExperimentOutput, CliError> {
    let deform = DeformParam::new(cfg.param("q")).map_err(|e| CliError::config(e.to_string()))?;
    let n_a = cfg.param_usize("n_a");
    let n_b = cfg.param_usize("n_b");
    check(
        (2..=8).contains(&n_a) && (2..=8).contains(&n_b),
        "distribution sizes must be in 2..=8",
    )?;

    let mut gen = SplitMix64::new(cfg.seed);
    let mut draw = |count: usize| -> Result<Distribution, CliError> {
        let raw: Vec<f64> = (0..count).map(|_| 0.1 + gen.next_f64()).collect();
        let sum: f64 = raw.iter().sum();
        Distribution::new(raw.into_iter().map(|x| x / sum).collect())
            .map_err(CliError::numeric)
    };
    let pa = draw(n_a)?;
    let pb = draw(n_b)?;
    let joint = pa.product(&pb).map_err(CliError::numeric)?;

    let s_a = deform.tsallis_entropy(&pa);
    let s_b = deform.tsallis_entropy(&pb);
    let direct = deform.tsallis_entropy(&joint);
    let composed = deform.compose_entropies(s_a, s_b);
    let residual = (direct - composed).abs();

    let mut idx_a = Vec::new();
    let mut idx_b = Vec::new();
    let mut col_pa = Vec::new();
    let mut col_pb = Vec::new();
    let mut col_joint = Vec::new();
    for (i, &a) in pa.probabilities().iter().enumerate() {
        for (j, &b) in pb.probabilities().iter().enumerate() {
            idx_a.push(i as i64);
            idx_b.push(j as i64);
            col_pa.push(a);
            col_pb.push(b);
            col_joint.push(joint.probabilities()[i * n_b + j]);
        }
    }
    let csv = cfg.output_dir.join("entropy-compose.csv");
    emit::write_csv(
        &csv,
        &[
            Column::int("i", idx_a),
            Column::int("j", idx_b),
            Column::float("p_a", col_pa),
            Column::float("p_b", col_pb),
            Column::float("p_joint", col_joint),
        ],
    )?;

    Ok(ExperimentOutput {
        estimates: vec![
            EstimateOut::info("entropy_a", s_a, 0.0),
            EstimateOut::info("entropy_b", s_b, 0.0),
            EstimateOut::info("entropy_joint", direct, 0.0),
            EstimateOut::info("entropy_composed", composed, 0.0),
            EstimateOut::banded("composition_residual", residual, 0.0, 0.0, 1e-12),
        ],
        outputs: vec![csv],
        resolved: cfg.params.clone(),
    })
}
