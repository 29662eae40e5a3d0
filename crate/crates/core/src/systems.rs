//! Concrete dynamical systems driving the estimators: geodesic separation on
//! space forms, the uniformly hyperbolic torus map with splitting
//! verification, and the logistic map at the edge of chaos.

use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::jacobi::{self, JacobiState};
use crate::lyapunov::{LyapunovError, SeparationSeries};
use crate::math;
use crate::rng::SplitMix64;
use crate::spaceform::{PhaseState, SpaceForm, SpaceFormError};

#[derive(Debug, Clone, PartialEq)]
pub enum SystemsError {
    InvalidParameter(&'static str),
    ZeroDirection,
    /// Direction has no component normal to the geodesic velocity.
    DegenerateDirection,
    /// Jacobi field vanished exactly at a sample time (conjugate point).
    ConjugatePoint { t: f64 },
    /// Envelope has too few points for the q-sensitivity fit.
    EnvelopeTooShort { len: usize, needed: usize },
    Geometry(SpaceFormError),
    Series(LyapunovError),
}

impl fmt::Display for SystemsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
            Self::ZeroDirection => write!(f, "zero separation direction"),
            Self::DegenerateDirection => {
                write!(f, "separation direction parallel to the geodesic velocity")
            }
            Self::ConjugatePoint { t } => {
                write!(f, "separation vanished exactly at t = {t} (conjugate point)")
            }
            Self::EnvelopeTooShort { len, needed } => {
                write!(f, "envelope has {len} points, fit needs {needed}")
            }
            Self::Geometry(e) => write!(f, "geometry error: {e}"),
            Self::Series(e) => write!(f, "series error: {e}"),
        }
    }
}

impl core::error::Error for SystemsError {}

impl From<SpaceFormError> for SystemsError {
    fn from(e: SpaceFormError) -> Self {
        Self::Geometry(e)
    }
}

impl From<LyapunovError> for SystemsError {
    fn from(e: LyapunovError) -> Self {
        Self::Series(e)
    }
}

/// Infinitesimal separation history |J(t)| of nearby geodesics from `state`,
/// with the normal Jacobi data J(0) = 0, J'(0) = 1, sampled at `samples`
/// uniform times in (0, total_time]. On a space form the normal component
/// obeys J'' + K·J = 0 regardless of the direction, which is only validated.
pub fn geodesic_separation_series(
    space: &SpaceForm,
    state: &PhaseState,
    direction: &[f64],
    total_time: f64,
    samples: usize,
) -> Result<SeparationSeries, SystemsError> {
    if !(total_time > 0.0) || !total_time.is_finite() {
        return Err(SystemsError::InvalidParameter("total time must be positive"));
    }
    if samples < 50 {
        return Err(SystemsError::InvalidParameter("need at least 50 samples"));
    }
    let norm_sq: f64 = direction.iter().map(|c| c * c).sum();
    if norm_sq == 0.0 {
        return Err(SystemsError::ZeroDirection);
    }
    // Must be a genuine tangent direction with a normal component.
    let g_dd = space.metric_inner(state.position(), direction, direction)?;
    let along = space.metric_inner(state.position(), direction, state.velocity())?;
    let normal_sq = g_dd - along * along;
    if normal_sq <= 1e-24 * norm_sq {
        return Err(SystemsError::DegenerateDirection);
    }

    let k = space.curvature();
    let dt = 1e-3;
    let mut jac = JacobiState::new(0.0, 1.0);
    let mut times = Vec::with_capacity(samples);
    let mut logs = Vec::with_capacity(samples);
    let mut reached = 0.0;
    for i in 1..=samples {
        let target = total_time * i as f64 / samples as f64;
        let span = target - reached;
        jac = jacobi::jacobi_integrate(k, jac, span, dt)
            .map_err(|_| SystemsError::InvalidParameter("integration failed"))?;
        reached = target;
        let sep = jac.value.abs();
        if sep == 0.0 {
            return Err(SystemsError::ConjugatePoint { t: target });
        }
        times.push(target);
        logs.push(math::ln(sep));
    }
    Ok(SeparationSeries::from_log_deltas(times, logs)?)
}

/// n applications of the torus automorphism (x, y) ↦ (2x+y, x+y) mod 1.
pub fn cat_map_iterate(state: (f64, f64), n: usize) -> (f64, f64) {
    let (mut x, mut y) = state;
    for _ in 0..n {
        let nx = libm::fmod(2.0 * x + y, 1.0);
        let ny = libm::fmod(x + y, 1.0);
        x = if nx < 0.0 { nx + 1.0 } else { nx };
        y = if ny < 0.0 { ny + 1.0 } else { ny };
    }
    (x, y)
}

/// Tangent map of the cat map (constant in phase space).
pub fn cat_map_differential() -> [[f64; 2]; 2] {
    [[2.0, 1.0], [1.0, 1.0]]
}

fn cat_map_inverse_differential() -> [[f64; 2]; 2] {
    [[1.0, -1.0], [-1.0, 2.0]]
}

/// Hyperbolicity property tags for [`AnosovReport::checks`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HyperbolicProperty {
    /// E⁰ spanned by the flow generator — not applicable to a discrete map.
    FlowDirection,
    /// Stable/unstable directions invariant under the differential.
    SplittingInvariance,
    /// ‖df^t Y‖ ≤ c·λ^t·‖Y‖ for stable Y.
    UniformContraction,
    /// ‖df^{−t} Z‖ ≤ c·μ^{−t}·‖Z‖ for unstable Z.
    UniformExpansion,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyCheck {
    pub property: HyperbolicProperty,
    pub applicable: bool,
    pub passed: bool,
    /// Worst observed deviation for this property.
    pub measured: f64,
    pub tolerance: f64,
}

/// Measured hyperbolic splitting data with per-property verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct AnosovReport {
    pub expansion_rate: f64,
    pub contraction_rate: f64,
    /// Worst cumulative-bound constant c over all sample points and times.
    pub constant: f64,
    pub unstable: [f64; 2],
    pub stable: [f64; 2],
    /// None for discrete-time maps.
    pub flow_direction: Option<[f64; 2]>,
    pub checks: Vec<PropertyCheck>,
}

impl AnosovReport {
    /// All applicable checks passed and the rates form a hyperbolic pair.
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.applicable)
            .all(|c| c.passed)
            && self.contraction_rate > 0.0
            && self.contraction_rate < 1.0
            && self.expansion_rate > 1.0
            && self.constant > 0.0
    }
}

struct SplittingClaim {
    unstable: [f64; 2],
    stable: [f64; 2],
    contraction: f64,
    expansion: f64,
}

fn norm2(v: [f64; 2]) -> f64 {
    math::hypot(v[0], v[1])
}

fn apply2(m: &[[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Splitting verification shared by the cat map and negative controls.
///
/// Cumulative contraction/expansion is measured as a product of per-step
/// stretching factors of the claimed directions re-evaluated along the
/// orbit: iterating a float direction t-fold instead would let the ~1e-16
/// eigenvector rounding grow as μ^{2t} and swamp any tolerance past t ≈ 9,
/// while the per-step product is exactly ‖df^t‖ restricted to the splitting
/// whenever the invariance check passes.
#[allow(clippy::too_many_arguments)]
fn verify_splitting(
    step: impl Fn((f64, f64)) -> (f64, f64),
    differential: impl Fn((f64, f64)) -> [[f64; 2]; 2],
    inverse_differential: impl Fn((f64, f64)) -> [[f64; 2]; 2],
    claim: &SplittingClaim,
    samples: usize,
    t_max: usize,
    tolerance: f64,
    seed: u64,
) -> AnosovReport {
    let u = claim.unstable;
    let s = claim.stable;
    let log_lambda = math::ln(claim.contraction);
    let log_mu = math::ln(claim.expansion);

    let mut gen = SplitMix64::new(seed);
    let mut worst_invariance: f64 = 0.0;
    let mut worst_contraction: f64 = 0.0;
    let mut worst_expansion: f64 = 0.0;
    let mut constant: f64 = 0.0;
    let mut contraction_log_sum = 0.0;
    let mut expansion_log_sum = 0.0;
    let mut step_count = 0u64;

    for _ in 0..samples {
        let mut p = (gen.next_f64(), gen.next_f64());
        let mut stable_log = 0.0;
        let mut unstable_log = 0.0;
        for t in 1..=t_max {
            let d = differential(p);
            let d_inv = inverse_differential(p);

            // Property 2: directions map to parallel directions.
            let du = apply2(&d, u);
            let ds = apply2(&d, s);
            let sin_u = (du[0] * u[1] - du[1] * u[0]).abs() / (norm2(du) * norm2(u));
            let sin_s = (ds[0] * s[1] - ds[1] * s[0]).abs() / (norm2(ds) * norm2(s));
            worst_invariance = worst_invariance.max(sin_u).max(sin_s);

            // Property 3: cumulative stable stretching vs c·λ^t.
            let stable_factor = norm2(ds) / norm2(s);
            stable_log += math::ln(stable_factor);
            let c_s = math::exp(stable_log - t as f64 * log_lambda);
            worst_contraction = worst_contraction.max((c_s - 1.0).abs());
            constant = constant.max(c_s);

            // Property 4: cumulative inverse-unstable stretching vs c·μ^{−t}.
            let diu = apply2(&d_inv, u);
            let inverse_factor = norm2(diu) / norm2(u);
            unstable_log += math::ln(inverse_factor);
            let c_u = math::exp(unstable_log + t as f64 * log_mu);
            worst_expansion = worst_expansion.max((c_u - 1.0).abs());
            constant = constant.max(c_u);

            contraction_log_sum += math::ln(stable_factor);
            expansion_log_sum += math::ln(norm2(du) / norm2(u));
            step_count += 1;

            p = step(p);
        }
    }

    let contraction_rate = math::exp(contraction_log_sum / step_count as f64);
    let expansion_rate = math::exp(expansion_log_sum / step_count as f64);
    let checks = alloc::vec![
        PropertyCheck {
            property: HyperbolicProperty::FlowDirection,
            applicable: false,
            passed: true,
            measured: 0.0,
            tolerance,
        },
        PropertyCheck {
            property: HyperbolicProperty::SplittingInvariance,
            applicable: true,
            passed: worst_invariance <= tolerance,
            measured: worst_invariance,
            tolerance,
        },
        PropertyCheck {
            property: HyperbolicProperty::UniformContraction,
            applicable: true,
            passed: worst_contraction <= tolerance,
            measured: worst_contraction,
            tolerance,
        },
        PropertyCheck {
            property: HyperbolicProperty::UniformExpansion,
            applicable: true,
            passed: worst_expansion <= tolerance,
            measured: worst_expansion,
            tolerance,
        },
    ];
    AnosovReport {
        expansion_rate,
        contraction_rate,
        constant,
        unstable: u,
        stable: s,
        flow_direction: None,
        checks,
    }
}

/// Verifies the uniform-hyperbolicity properties of the cat map against its
/// exact splitting: eigendirections (φ, 1) and (1, −φ) with rates
/// λ = (3−√5)/2, μ = (3+√5)/2 and c = 1, checked over `samples` seeded
/// orbit points and all 1 ≤ t ≤ t_max.
pub fn anosov_verify(
    samples: usize,
    t_max: usize,
    tolerance: f64,
    seed: u64,
) -> Result<AnosovReport, SystemsError> {
    if samples < 100 {
        return Err(SystemsError::InvalidParameter("need at least 100 samples"));
    }
    if t_max < 10 {
        return Err(SystemsError::InvalidParameter("need t_max >= 10"));
    }
    if !(tolerance > 0.0) {
        return Err(SystemsError::InvalidParameter("tolerance must be positive"));
    }
    let sqrt5 = math::sqrt(5.0);
    let phi = (1.0 + sqrt5) / 2.0;
    let nu = math::hypot(phi, 1.0);
    let claim = SplittingClaim {
        unstable: [phi / nu, 1.0 / nu],
        stable: [1.0 / nu, -phi / nu],
        contraction: (3.0 - sqrt5) / 2.0,
        expansion: (3.0 + sqrt5) / 2.0,
    };
    Ok(verify_splitting(
        |p| cat_map_iterate(p, 1),
        |_| cat_map_differential(),
        |_| cat_map_inverse_differential(),
        &claim,
        samples,
        t_max,
        tolerance,
        seed,
    ))
}

/// Logistic family x ↦ 1 − a·x² on [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    a: f64,
}

impl LogisticParams {
    pub fn new(a: f64) -> Result<Self, SystemsError> {
        if !(a > 0.0 && a <= 2.0) {
            return Err(SystemsError::InvalidParameter("a outside (0, 2]"));
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        1.0 - self.a * x * x
    }

    /// |f'(x)| = 2a|x|.
    #[inline]
    pub fn derivative_magnitude(&self, x: f64) -> f64 {
        2.0 * self.a * x.abs()
    }
}

/// Sensitivity series ξ(n) = |Π_{i<n} f'(x_i)| with the orbit outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityOutcome {
    pub series: SeparationSeries,
    /// Iteration at which the orbit hit the critical point exactly (ξ = 0
    /// from there on); the series is truncated just before it.
    pub zero_hit: Option<usize>,
}

/// Tangent sensitivity of the logistic map: ξ(n) accumulated in log space,
/// sampled at every iteration count n = 1..=n_iters.
pub fn logistic_sensitivity_series(
    params: LogisticParams,
    x0: f64,
    n_iters: usize,
) -> Result<SensitivityOutcome, SystemsError> {
    if !(x0 > -1.0 && x0 < 1.0) {
        return Err(SystemsError::InvalidParameter("x0 outside (-1, 1)"));
    }
    if n_iters < 1000 {
        return Err(SystemsError::InvalidParameter("need at least 1000 iterations"));
    }
    accumulate_sensitivity(params, x0, n_iters)
}

/// Sensitivity accumulated along the orbit of the critical value f(0) = 1 —
/// the backbone of the attractor at the period-doubling accumulation point.
/// The q-exponential envelope structure is anchored to this orbit; offset
/// starting points detach from it once ξ peaks exceed 1/offset.
pub fn critical_orbit_sensitivity(
    params: LogisticParams,
    n_iters: usize,
) -> Result<SensitivityOutcome, SystemsError> {
    if n_iters < 1000 {
        return Err(SystemsError::InvalidParameter("need at least 1000 iterations"));
    }
    accumulate_sensitivity(params, 1.0, n_iters)
}

fn accumulate_sensitivity(
    params: LogisticParams,
    x0: f64,
    n_iters: usize,
) -> Result<SensitivityOutcome, SystemsError> {
    let mut x = x0;
    let mut acc = 0.0;
    let mut times = Vec::with_capacity(n_iters);
    let mut logs = Vec::with_capacity(n_iters);
    let mut zero_hit = None;
    for n in 1..=n_iters {
        let d = params.derivative_magnitude(x);
        if d == 0.0 {
            zero_hit = Some(n);
            break;
        }
        acc += math::ln(d);
        times.push(n as f64);
        logs.push(acc);
        x = params.apply(x);
    }
    Ok(SensitivityOutcome {
        series: SeparationSeries::from_log_deltas(times, logs)?,
        zero_hit,
    })
}

static EDGE_PARAM_BITS: AtomicU64 = AtomicU64::new(0);

/// Period-doubling accumulation parameter a_∞ of x ↦ 1 − a·x²; computed once
/// by bisecting the superstable 2^k-cycle conditions f_a^{2^k}(0) = 0 and
/// extrapolating the geometric tail, then cached.
pub fn edge_of_chaos_param() -> f64 {
    let cached = EDGE_PARAM_BITS.load(Ordering::Relaxed);
    if cached != 0 {
        return f64::from_bits(cached);
    }
    let value = compute_edge_param();
    EDGE_PARAM_BITS.store(value.to_bits(), Ordering::Relaxed);
    value
}

fn superstable_residual(a: f64, period: u64) -> f64 {
    let mut x = 0.0f64;
    for _ in 0..period {
        x = 1.0 - a * x * x;
    }
    x
}

fn bisect_superstable(mut lo: f64, mut hi: f64, period: u64) -> Option<f64> {
    let mut f_lo = superstable_residual(lo, period);
    let f_hi = superstable_residual(hi, period);
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return None;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let f_mid = superstable_residual(mid, period);
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn compute_edge_param() -> f64 {
    // a_1 = 1 exactly: the superstable 2-cycle {0, 1}.
    let mut params = alloc::vec![1.0f64];
    // a_2 on a fixed bracket below the accumulation point.
    let a2 = bisect_superstable(1.2, 1.4, 4).expect("period-4 bracket");
    params.push(a2);
    let mut gap = a2 - 1.0;
    let mut ratio = 4.4f64;
    for k in 3..=16u32 {
        let period = 1u64 << k;
        let predicted_gap = gap / ratio;
        let center = params[params.len() - 1] + predicted_gap;
        // The next superstable parameter is the only root above a_{k-1} and
        // below the accumulation point; the bracket must stay under it.
        let mut lo = center - 0.3 * predicted_gap;
        let mut hi = center + 0.15 * predicted_gap;
        let mut found = bisect_superstable(lo, hi, period);
        let mut widen = 0;
        while found.is_none() && widen < 30 {
            lo -= 0.1 * predicted_gap;
            hi += 0.02 * predicted_gap;
            found = bisect_superstable(lo, hi, period);
            widen += 1;
        }
        let ak = found.expect("superstable bracket");
        let new_gap = ak - params[params.len() - 1];
        ratio = gap / new_gap;
        gap = new_gap;
        params.push(ak);
    }
    // Geometric-tail extrapolation: a_inf = a_K + gap_K/(delta - 1).
    let n = params.len();
    let gap_last = params[n - 1] - params[n - 2];
    let gap_prev = params[n - 2] - params[n - 3];
    params[n - 1] + gap_last / (gap_prev / gap_last - 1.0)
}

/// Result of the q-sensitivity fit: the grid q whose q-logarithm linearizes
/// the sensitivity envelope best, the corresponding slope, and the misfit
/// 1 − R² (0 = perfectly linear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QSensitivityFit {
    pub q_sen: f64,
    pub lambda_q: f64,
    pub fit_quality: f64,
}

/// Fits dξ/dt = λ_q ξ^q growth to the upper envelope (running maxima) of a
/// sensitivity series: for each grid q, the q-logarithm of the envelope is
/// fitted linearly in t over a log-uniform ladder of sample indices; the q
/// minimizing the misfit wins.
///
/// The ladder gives every scale comparable weight. With uniform-in-t
/// weighting the latest plateau holds half the points and the argmin becomes
/// an artifact of where the series happens to end.
pub fn q_sensitivity_fit(
    series: &SeparationSeries,
    q_grid: &[f64],
) -> Result<QSensitivityFit, SystemsError> {
    if q_grid.len() < 20 {
        return Err(SystemsError::InvalidParameter("need at least 20 grid values"));
    }
    if q_grid.iter().any(|&q| !(q > 0.0 && q < 1.0)) {
        return Err(SystemsError::InvalidParameter("grid q outside (0, 1)"));
    }
    // Running maxima in log space; the raw edge-of-chaos sensitivity
    // oscillates over orders of magnitude while the conjectured q-exponential
    // bound governs this envelope.
    let mut envelope = Vec::with_capacity(series.len());
    let mut best = f64::NEG_INFINITY;
    for &s in series.log_deltas() {
        best = best.max(s);
        envelope.push(best);
    }

    const LADDER_RATIO: f64 = 1.03;
    const MIN_ENVELOPE: usize = 100;
    let n = series.len();
    let mut picks: Vec<usize> = Vec::new();
    let mut pos = 1.0f64;
    while (pos as usize) <= n {
        let i = (pos as usize).min(n);
        if picks.last() != Some(&i) {
            picks.push(i);
        }
        pos *= LADDER_RATIO;
    }
    if picks.last() != Some(&n) {
        picks.push(n);
    }
    if picks.len() < MIN_ENVELOPE {
        return Err(SystemsError::EnvelopeTooShort {
            len: picks.len(),
            needed: MIN_ENVELOPE,
        });
    }
    let times: Vec<f64> = picks.iter().map(|&i| series.times()[i - 1]).collect();
    let env_points: Vec<f64> = picks.iter().map(|&i| envelope[i - 1]).collect();

    let mut result: Option<QSensitivityFit> = None;
    for &q in q_grid {
        let opq = 1.0 - q;
        // ln_q(xi) from ln xi: expm1((1-q)·ln xi)/(1-q).
        let ys: Vec<f64> = env_points
            .iter()
            .map(|&s| math::expm1(opq * s) / opq)
            .collect();
        if ys.iter().any(|y| !y.is_finite()) {
            continue;
        }
        let fit = crate::fit::linear_fit(&times, &ys);
        let misfit = crate::fit::misfit(&times, &ys, &fit);
        let better = match &result {
            None => true,
            Some(r) => misfit < r.fit_quality,
        };
        if better {
            result = Some(QSensitivityFit {
                q_sen: q,
                lambda_q: fit.slope,
                fit_quality: misfit,
            });
        }
    }
    result.ok_or(SystemsError::InvalidParameter(
        "no grid q produced a finite fit",
    ))
}
