//! Constant-curvature model geometries and their geodesic flows.
//!
//! The three regimes are realized as embedded models with closed-form flows:
//! K < 0 as the upper hyperboloid ⟨x,x⟩ = 1/K in Minkowski space (leading
//! coordinate timelike), K > 0 as the round sphere ⟨x,x⟩ = 1/K, and K = 0 as
//! affine space. Embeddings avoid chart singularities, so geodesics can be
//! integrated for long times; the ambient geodesic equation is
//! x'' = −K·g(x',x')·x in all three cases.
//!
//! The curvature tensor is R(X,Y)Z = K(g(Y,Z)X − g(Z,X)Y), and the
//! circle-defect estimator recovers K from mapped circle lengths via
//! (3/π)·(2πr − l_r)/r³ extrapolated to r → 0.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::math;

/// Tolerance for tangency / on-surface validation of operation inputs.
const INPUT_TOL: f64 = 1e-6;
/// Tolerance for phase-state construction (constraint and unit speed).
const STATE_TOL: f64 = 1e-9;
/// Tolerance for frame orthonormality after construction.
const FRAME_TOL: f64 = 1e-9;
/// Minkowski norms of far-out hyperboloid vectors are differences of huge
/// near-equal products; below |value| = RESOLVE_FLOOR·Σc_i² an evaluation is
/// cancellation noise and constraint corrections would inject it, so they are
/// skipped there.
const RESOLVE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceFormError {
    DimensionTooSmall(usize),
    NotFinite,
    DimensionMismatch { expected: usize, got: usize },
    OffSurface { residual: f64 },
    NotTangent { residual: f64 },
    NotUnitSpeed { speed_sq: f64 },
    DegenerateFrame,
    FrameSize { expected: usize, got: usize },
    InvalidStep { dt: f64 },
    NegativeTime { t: f64 },
    InvalidRadii(&'static str),
    BeyondInjectivityRadius { radius: f64, limit: f64 },
    TooFewSegments { segments: usize },
    ZeroVector,
}

impl fmt::Display for SpaceFormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionTooSmall(n) => write!(f, "dimension {n} < 2"),
            Self::NotFinite => write!(f, "non-finite input"),
            Self::DimensionMismatch { expected, got } => {
                write!(f, "expected ambient dimension {expected}, got {got}")
            }
            Self::OffSurface { residual } => {
                write!(f, "point off the model surface (residual {residual:e})")
            }
            Self::NotTangent { residual } => {
                write!(f, "vector not tangent (residual {residual:e})")
            }
            Self::NotUnitSpeed { speed_sq } => {
                write!(f, "velocity is not unit speed (g(v,v) = {speed_sq})")
            }
            Self::DegenerateFrame => write!(f, "frame vectors are linearly dependent"),
            Self::FrameSize { expected, got } => {
                write!(f, "frame must have {expected} vectors, got {got}")
            }
            Self::InvalidStep { dt } => write!(f, "step dt = {dt} must be positive"),
            Self::NegativeTime { t } => write!(f, "time t = {t} must be nonnegative"),
            Self::InvalidRadii(why) => write!(f, "invalid radius ladder: {why}"),
            Self::BeyondInjectivityRadius { radius, limit } => {
                write!(f, "radius {radius} at or beyond injectivity radius {limit}")
            }
            Self::TooFewSegments { segments } => {
                write!(f, "{segments} segments < 64")
            }
            Self::ZeroVector => write!(f, "zero vector"),
        }
    }
}

impl core::error::Error for SpaceFormError {}

/// Point + unit-speed tangent vector: the state of the geodesic flow.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    position: Vec<f64>,
    velocity: Vec<f64>,
}

impl PhaseState {
    pub fn position(&self) -> &[f64] {
        &self.position
    }

    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }
}

/// g-orthonormal tangent vectors at a common basepoint.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame {
    basepoint: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

impl TangentFrame {
    pub fn basepoint(&self) -> &[f64] {
        &self.basepoint
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }
}

/// Simply connected model geometry of constant sectional curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceForm {
    curvature: f64,
    dim: usize,
}

impl SpaceForm {
    pub fn new(curvature: f64, dim: usize) -> Result<Self, SpaceFormError> {
        if !curvature.is_finite() {
            return Err(SpaceFormError::NotFinite);
        }
        if dim < 2 {
            return Err(SpaceFormError::DimensionTooSmall(dim));
        }
        Ok(Self { curvature, dim })
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Length of embedded coordinate vectors: n+1 for curved models, n flat.
    pub fn ambient_dim(&self) -> usize {
        if self.curvature == 0.0 {
            self.dim
        } else {
            self.dim + 1
        }
    }

    /// Ambient bilinear form: Minkowski (leading coordinate timelike) for
    /// K < 0, Euclidean otherwise.
    pub fn model_inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..a.len() {
            acc += a[i] * b[i];
        }
        if self.curvature < 0.0 {
            acc - 2.0 * a[0] * b[0]
        } else {
            acc
        }
    }

    /// Canonical basepoint: (R, 0, …, 0) on curved models, the origin flat.
    pub fn base_point(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.ambient_dim()];
        if self.curvature != 0.0 {
            p[0] = 1.0 / math::sqrt(self.curvature.abs());
        }
        p
    }

    /// Basepoint plus unit velocity along the first spatial direction.
    pub fn canonical_state(&self) -> PhaseState {
        let p = self.base_point();
        let mut v = vec![0.0; self.ambient_dim()];
        if self.curvature == 0.0 {
            v[0] = 1.0;
        } else {
            v[1] = 1.0;
        }
        PhaseState {
            position: p,
            velocity: v,
        }
    }

    fn check_dim(&self, v: &[f64]) -> Result<(), SpaceFormError> {
        if v.len() != self.ambient_dim() {
            return Err(SpaceFormError::DimensionMismatch {
                expected: self.ambient_dim(),
                got: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(SpaceFormError::NotFinite);
        }
        Ok(())
    }

    /// |⟨x,x⟩ − 1/K| scaled by the size of the terms entering the sum, so the
    /// check stays meaningful for far-out hyperboloid points where the raw
    /// difference drowns in f64 rounding.
    fn surface_residual(&self, x: &[f64]) -> f64 {
        if self.curvature == 0.0 {
            return 0.0;
        }
        let sumsq: f64 = x.iter().map(|c| c * c).sum();
        let target = 1.0 / self.curvature;
        (self.model_inner(x, x) - target).abs() / (sumsq + target.abs())
    }

    fn check_on_surface(&self, x: &[f64], tol: f64) -> Result<(), SpaceFormError> {
        self.check_dim(x)?;
        let residual = self.surface_residual(x);
        if residual > tol {
            return Err(SpaceFormError::OffSurface { residual });
        }
        if self.curvature < 0.0 && x[0] <= 0.0 {
            return Err(SpaceFormError::OffSurface { residual: x[0] });
        }
        Ok(())
    }

    fn tangency_residual(&self, p: &[f64], u: &[f64]) -> f64 {
        if self.curvature == 0.0 {
            return 0.0;
        }
        let np = math::sqrt(p.iter().map(|c| c * c).sum::<f64>());
        let nu = math::sqrt(u.iter().map(|c| c * c).sum::<f64>());
        if nu == 0.0 {
            return 0.0;
        }
        self.model_inner(p, u).abs() / (np * nu)
    }

    fn check_tangent(&self, p: &[f64], u: &[f64], tol: f64) -> Result<(), SpaceFormError> {
        self.check_dim(u)?;
        let residual = self.tangency_residual(p, u);
        if residual > tol {
            return Err(SpaceFormError::NotTangent { residual });
        }
        Ok(())
    }

    /// Remove the ambient normal component, leaving a tangent vector at p.
    pub(crate) fn project_tangent(&self, p: &[f64], w: &[f64]) -> Vec<f64> {
        if self.curvature == 0.0 {
            return w.to_vec();
        }
        let coeff = self.model_inner(p, w) / self.model_inner(p, p);
        w.iter().zip(p).map(|(wi, pi)| wi - coeff * pi).collect()
    }

    /// Validated state constructor: on-surface, tangent, unit speed.
    pub fn phase_state(
        &self,
        position: Vec<f64>,
        velocity: Vec<f64>,
    ) -> Result<PhaseState, SpaceFormError> {
        self.check_on_surface(&position, STATE_TOL)?;
        self.check_tangent(&position, &velocity, STATE_TOL)?;
        let speed_sq = self.model_inner(&velocity, &velocity);
        if (speed_sq - 1.0).abs() > STATE_TOL {
            return Err(SpaceFormError::NotUnitSpeed { speed_sq });
        }
        Ok(PhaseState { position, velocity })
    }

    /// Riemannian inner product g(u, v) of tangent vectors at p.
    pub fn metric_inner(&self, p: &[f64], u: &[f64], v: &[f64]) -> Result<f64, SpaceFormError> {
        self.check_on_surface(p, INPUT_TOL)?;
        self.check_tangent(p, u, INPUT_TOL)?;
        self.check_tangent(p, v, INPUT_TOL)?;
        Ok(self.model_inner(u, v))
    }

    /// R(X,Y)Z = K(g(Y,Z)X − g(Z,X)Y).
    pub fn curvature_tensor_apply(
        &self,
        p: &[f64],
        x: &[f64],
        y: &[f64],
        z: &[f64],
    ) -> Result<Vec<f64>, SpaceFormError> {
        self.check_on_surface(p, INPUT_TOL)?;
        self.check_tangent(p, x, INPUT_TOL)?;
        self.check_tangent(p, y, INPUT_TOL)?;
        self.check_tangent(p, z, INPUT_TOL)?;
        let g_yz = self.model_inner(y, z);
        let g_zx = self.model_inner(z, x);
        let k = self.curvature;
        Ok(x.iter()
            .zip(y)
            .map(|(xi, yi)| k * (g_yz * xi - g_zx * yi))
            .collect())
    }

    /// Orthonormal frame at a basepoint, Gram–Schmidt with respect to g.
    pub fn tangent_frame(
        &self,
        basepoint: Vec<f64>,
        vectors: Vec<Vec<f64>>,
    ) -> Result<TangentFrame, SpaceFormError> {
        self.check_on_surface(&basepoint, INPUT_TOL)?;
        let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
        for raw in &vectors {
            self.check_tangent(&basepoint, raw, INPUT_TOL)?;
            let mut v = self.project_tangent(&basepoint, raw);
            let original = math::sqrt(self.model_inner(&v, &v).max(0.0));
            if original == 0.0 {
                return Err(SpaceFormError::DegenerateFrame);
            }
            for e in &ortho {
                let c = self.model_inner(&v, e);
                for (vi, ei) in v.iter_mut().zip(e) {
                    *vi -= c * ei;
                }
            }
            let remaining = math::sqrt(self.model_inner(&v, &v).max(0.0));
            if remaining <= 1e-9 * original {
                return Err(SpaceFormError::DegenerateFrame);
            }
            v.iter_mut().for_each(|c| *c /= remaining);
            ortho.push(v);
        }
        debug_assert!(self.frame_orthonormality_residual(&ortho) <= FRAME_TOL);
        Ok(TangentFrame {
            basepoint,
            vectors: ortho,
        })
    }

    fn frame_orthonormality_residual(&self, vs: &[Vec<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..vs.len() {
            for j in 0..=i {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.model_inner(&vs[i], &vs[j]) - target).abs());
            }
        }
        worst
    }

    /// Sectional curvature g(R(e1,e2)e2, e1) of the plane a 2-frame spans;
    /// equals K for every plane at every point.
    pub fn sectional_curvature(&self, frame: &TangentFrame) -> Result<f64, SpaceFormError> {
        if frame.vectors.len() != 2 {
            return Err(SpaceFormError::FrameSize {
                expected: 2,
                got: frame.vectors.len(),
            });
        }
        let e1 = &frame.vectors[0];
        let e2 = &frame.vectors[1];
        let r = self.curvature_tensor_apply(&frame.basepoint, e1, e2, e2)?;
        Ok(self.model_inner(&r, e1))
    }

    /// Point at arc length ‖v‖ along the geodesic from p in direction v.
    pub fn exp_map(&self, p: &[f64], v: &[f64]) -> Result<Vec<f64>, SpaceFormError> {
        self.check_on_surface(p, INPUT_TOL)?;
        self.check_tangent(p, v, INPUT_TOL)?;
        let v = self.project_tangent(p, v);
        let s = math::sqrt(self.model_inner(&v, &v).max(0.0));
        if s == 0.0 {
            return Ok(p.to_vec());
        }
        let k = self.curvature;
        if k == 0.0 {
            return Ok(p.iter().zip(&v).map(|(pi, vi)| pi + vi).collect());
        }
        let rate = math::sqrt(k.abs());
        let (c, sn) = if k < 0.0 {
            (math::cosh(rate * s), math::sinh(rate * s))
        } else {
            (math::cos(rate * s), math::sin(rate * s))
        };
        // p·c + (v/s)·sn/rate, with v/s the unit initial direction.
        Ok(p.iter()
            .zip(&v)
            .map(|(pi, vi)| pi * c + (vi / s) * sn / rate)
            .collect())
    }

    /// Closed-form geodesic distance. Symmetric, zero iff x = y.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64, SpaceFormError> {
        self.check_on_surface(x, INPUT_TOL)?;
        self.check_on_surface(y, INPUT_TOL)?;
        let k = self.curvature;
        if k == 0.0 {
            let dsq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            return Ok(math::sqrt(dsq));
        }
        let z = k * self.model_inner(x, y);
        let rate = math::sqrt(k.abs());
        if k < 0.0 {
            Ok(math::acosh(z.max(1.0)) / rate)
        } else {
            Ok(math::acos(z.clamp(-1.0, 1.0)) / rate)
        }
    }

    /// Exact geodesic flow for time t (any sign): position and velocity
    /// advanced by the closed form, constraints preserved.
    pub fn geodesic_flow_closed(&self, state: &PhaseState, t: f64) -> PhaseState {
        let k = self.curvature;
        let x = &state.position;
        let v = &state.velocity;
        if k == 0.0 {
            return PhaseState {
                position: x.iter().zip(v).map(|(xi, vi)| xi + t * vi).collect(),
                velocity: v.clone(),
            };
        }
        let rate = math::sqrt(k.abs());
        if k < 0.0 {
            let c = math::cosh(rate * t);
            let s = math::sinh(rate * t);
            PhaseState {
                position: x.iter().zip(v).map(|(xi, vi)| xi * c + vi * s / rate).collect(),
                velocity: x.iter().zip(v).map(|(xi, vi)| xi * rate * s + vi * c).collect(),
            }
        } else {
            let c = math::cos(rate * t);
            let s = math::sin(rate * t);
            PhaseState {
                position: x.iter().zip(v).map(|(xi, vi)| xi * c + vi * s / rate).collect(),
                velocity: x.iter().zip(v).map(|(xi, vi)| -xi * rate * s + vi * c).collect(),
            }
        }
    }

    fn geodesic_rhs(&self, x: &[f64], v: &[f64], dx: &mut [f64], dv: &mut [f64]) {
        // g(v,v) is conserved at 1 by the flow; once its evaluation is
        // cancellation noise (far-out hyperboloid points), substitute the
        // invariant value instead of feeding noise into the stiffness.
        let sumsq_v: f64 = v.iter().map(|c| c * c).sum();
        let s2 = self.model_inner(v, v);
        let speed_sq = if s2.abs() >= RESOLVE_FLOOR * sumsq_v { s2 } else { 1.0 };
        let coeff = -self.curvature * speed_sq;
        for i in 0..x.len() {
            dx[i] = v[i];
            dv[i] = coeff * x[i];
        }
    }

    fn reproject(&self, x: &mut [f64], v: &mut [f64]) {
        if self.curvature != 0.0 {
            let sumsq_x: f64 = x.iter().map(|c| c * c).sum();
            let m = self.model_inner(x, x);
            let ratio = (1.0 / self.curvature) / m;
            if m.abs() >= RESOLVE_FLOOR * sumsq_x && ratio > 0.0 {
                let scale = math::sqrt(ratio);
                x.iter_mut().for_each(|c| *c *= scale);
                let coeff = self.model_inner(x, v) / self.model_inner(x, x);
                for i in 0..v.len() {
                    v[i] -= coeff * x[i];
                }
            }
        }
        let sumsq_v: f64 = v.iter().map(|c| c * c).sum();
        let s2 = self.model_inner(v, v);
        if s2 >= RESOLVE_FLOOR * sumsq_v {
            let speed = math::sqrt(s2);
            v.iter_mut().for_each(|c| *c /= speed);
        }
    }

    /// Classical one-step 4th-order integration of x'' = −K·g(x',x')·x with
    /// constraint reprojection after every step.
    pub fn geodesic_flow_numeric(
        &self,
        state: &PhaseState,
        t: f64,
        dt: f64,
    ) -> Result<PhaseState, SpaceFormError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(SpaceFormError::InvalidStep { dt });
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(SpaceFormError::NegativeTime { t });
        }
        let n = self.ambient_dim();
        let mut x = state.position.clone();
        let mut v = state.velocity.clone();

        let mut kx = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut kv = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut xs = vec![0.0; n];
        let mut vs = vec![0.0; n];

        let full_steps = (t / dt) as u64;
        let remainder = t - full_steps as f64 * dt;
        let mut step = |x: &mut Vec<f64>, v: &mut Vec<f64>, h: f64| {
            self.geodesic_rhs(x, v, &mut kx[0], &mut kv[0]);
            for i in 0..n {
                xs[i] = x[i] + 0.5 * h * kx[0][i];
                vs[i] = v[i] + 0.5 * h * kv[0][i];
            }
            self.geodesic_rhs(&xs, &vs, &mut kx[1], &mut kv[1]);
            for i in 0..n {
                xs[i] = x[i] + 0.5 * h * kx[1][i];
                vs[i] = v[i] + 0.5 * h * kv[1][i];
            }
            self.geodesic_rhs(&xs, &vs, &mut kx[2], &mut kv[2]);
            for i in 0..n {
                xs[i] = x[i] + h * kx[2][i];
                vs[i] = v[i] + h * kv[2][i];
            }
            self.geodesic_rhs(&xs, &vs, &mut kx[3], &mut kv[3]);
            for i in 0..n {
                x[i] += h / 6.0 * (kx[0][i] + 2.0 * kx[1][i] + 2.0 * kx[2][i] + kx[3][i]);
                v[i] += h / 6.0 * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
            }
            self.reproject(x, v);
        };
        for _ in 0..full_steps {
            step(&mut x, &mut v, dt);
        }
        if remainder > 1e-12 * dt {
            step(&mut x, &mut v, remainder);
        }
        Ok(PhaseState {
            position: x,
            velocity: v,
        })
    }

    /// Curvature from circle-length defect: maps tangent circles of the given
    /// radii through the exponential map, measures each circumference as a
    /// corrected polygonal length with `segments` chords, forms
    /// (3/π)(2πr − l_r)/r³ and extrapolates r → 0 (leading error O(r²)).
    pub fn circle_defect_curvature(
        &self,
        frame: &TangentFrame,
        radii: &[f64],
        segments: usize,
    ) -> Result<f64, SpaceFormError> {
        if frame.vectors.len() != 2 {
            return Err(SpaceFormError::FrameSize {
                expected: 2,
                got: frame.vectors.len(),
            });
        }
        if segments < 64 {
            return Err(SpaceFormError::TooFewSegments { segments });
        }
        if radii.is_empty() {
            return Err(SpaceFormError::InvalidRadii("empty"));
        }
        for w in radii.windows(2) {
            if !(w[1] < w[0]) {
                return Err(SpaceFormError::InvalidRadii("not strictly decreasing"));
            }
        }
        if radii.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(SpaceFormError::InvalidRadii("non-positive radius"));
        }
        if radii[0] > 0.5 {
            return Err(SpaceFormError::InvalidRadii("max radius above 0.5"));
        }
        if self.curvature > 0.0 {
            let limit = PI / math::sqrt(self.curvature);
            if radii[0] >= limit {
                return Err(SpaceFormError::BeyondInjectivityRadius {
                    radius: radii[0],
                    limit,
                });
            }
        }

        let p = &frame.basepoint;
        let e1 = &frame.vectors[0];
        let e2 = &frame.vectors[1];
        let m = segments;
        // Inscribed polygon underestimates a circle's length by the factor
        // sin(π/m)/(π/m); undo it so the flat case is exact.
        let chord_correction = (PI / m as f64) / math::sin(PI / m as f64);

        let mut defects: Vec<(f64, f64)> = Vec::with_capacity(radii.len());
        for &r in radii {
            let mut points: Vec<Vec<f64>> = Vec::with_capacity(m);
            for j in 0..m {
                let theta = 2.0 * PI * j as f64 / m as f64;
                let (ct, st) = (math::cos(theta), math::sin(theta));
                let w: Vec<f64> = e1
                    .iter()
                    .zip(e2)
                    .map(|(a, b)| r * (ct * a + st * b))
                    .collect();
                points.push(self.exp_map(p, &w)?);
            }
            let mut length = 0.0;
            for j in 0..m {
                length += self.distance(&points[j], &points[(j + 1) % m])?;
            }
            length *= chord_correction;
            let defect = (3.0 / PI) * (2.0 * PI * r - length) / (r * r * r);
            defects.push((r * r, defect));
        }
        Ok(extrapolate_to_zero(&defects))
    }
}

/// Neville's algorithm: evaluate at 0 the polynomial through (x_i, y_i).
/// With x = r² this is Richardson extrapolation on the r² error ladder.
fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    let mut val: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let xs: Vec<f64> = points.iter().map(|&(x, _)| x).collect();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            val[i] = (xj * val[i] - xi * val[i + 1]) / (xj - xi);
        }
    }
    val[0]
}
