//! The concrete 7-state attitude estimator: quaternion mechanization plus
//! gyro drift, corrected by gated Euler pseudo-observations.
//!
//! State vector layout is `[q_w, q_x, q_y, q_z, ε_x, ε_y, ε_z]`: the full
//! attitude quaternion propagated directly through the filter (renormalized
//! after every averaging step) and the three-axis Markov gyro drift. The
//! measurement is the 3-vector (roll, pitch, yaw) produced by
//! [`fast_euler`], so the observation model is simply the Euler extraction
//! of the quaternion block, independent of the drift block.

use thiserror::Error;

use crate::attitude::{wrap_angle, EulerAngles, Quaternion, RotationVector};
use crate::cubature::{CubatureKalmanFilter, FilterError, StateModel};
use crate::fasteuler::{fast_euler, GateConfig};
use crate::linalg::{vec3, FactorizationMethod, MatN, VecN};
use crate::scalar::Scalar;
use crate::sensors::ImuSample;

/// Dimension of the packed filter state.
pub const STATE_DIM: usize = 7;

/// Dimension of the Euler observation.
pub const OBS_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AhrsError {
    #[error(transparent)]
    Filter(#[from] FilterError),
    /// Static initialization could not produce a valid attitude.
    #[error("static initialization failed: {0}")]
    InitFailed(InitFailure),
    /// Sample timestamps must strictly increase.
    #[error("non-monotonic timestamp")]
    NonMonotonicTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitFailure {
    Empty,
    NotStatic,
    GateRejected,
}

impl std::fmt::Display for InitFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitFailure::Empty => write!(f, "no samples"),
            InitFailure::NotStatic => write!(f, "accel gate failed on most samples"),
            InitFailure::GateRejected => write!(f, "averaged sample rejected by gates"),
        }
    }
}

/// Attitude quaternion plus gyro drift, the unpacked filter state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AhrsState<T> {
    pub q: Quaternion<T>,
    pub drift: [T; 3],
}

impl<T: Scalar> AhrsState<T> {
    pub fn level() -> Self {
        AhrsState {
            q: Quaternion::identity(),
            drift: [T::zero(); 3],
        }
    }

    pub fn pack(&self) -> VecN<T> {
        VecN::from_slice(&[
            self.q.w,
            self.q.x,
            self.q.y,
            self.q.z,
            self.drift[0],
            self.drift[1],
            self.drift[2],
        ])
    }

    pub fn unpack(x: &VecN<T>) -> Self {
        AhrsState {
            q: Quaternion::from_components(x[0], x[1], x[2], x[3]),
            drift: [x[4], x[5], x[6]],
        }
    }
}

/// Estimator tuning; every field has a model-representative default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AhrsConfig<T> {
    /// Markov correlation time constant of the drift model, s.
    pub tau_g: T,
    /// Gyro white noise density feeding the attitude block of Q, rad/s.
    pub sigma_gyro_white: T,
    /// Drift-driving noise density feeding the drift block of Q, rad/s/√s.
    pub sigma_drift: T,
    /// Observation noise standard deviations (roll, pitch, yaw), rad.
    pub r_std: [T; 3],
    /// FastEuler validity gates.
    pub gate: GateConfig<T>,
    /// Initial variance of each quaternion component.
    pub p0_attitude: T,
    /// Initial variance of each drift component, (rad/s)².
    pub p0_drift: T,
    /// Updates are skipped when the estimated |pitch| exceeds this, rad.
    pub gimbal_guard: T,
    /// dt assumed for the first sample, before a time base exists, s.
    pub nominal_dt: T,
    /// Samples averaged by static initialization.
    pub init_window: usize,
    /// Run the measurement update every k-th sample (1 = every sample).
    pub decimation: u64,
    /// Sanity bound on the drift estimate norm, rad/s.
    pub drift_limit: T,
    /// Master switch for measurement fusion; with it off the estimator is
    /// pure open-loop mechanization.
    pub fuse_observations: bool,
}

impl<T: Scalar> Default for AhrsConfig<T> {
    fn default() -> Self {
        AhrsConfig {
            tau_g: T::of(300.0),
            sigma_gyro_white: T::of(5e-3),
            sigma_drift: T::of(1e-4),
            r_std: [
                T::of(1f64.to_radians()),
                T::of(1f64.to_radians()),
                T::of(2f64.to_radians()),
            ],
            gate: GateConfig::default(),
            p0_attitude: T::of(4e-4),
            p0_drift: T::of(4e-4),
            gimbal_guard: T::of(85f64.to_radians()),
            nominal_dt: T::of(0.01),
            init_window: 100,
            decimation: 1,
            drift_limit: T::of(0.2),
            fuse_observations: true,
        }
    }
}

/// Process/measurement model wired into the cubature filter.
#[derive(Debug, Clone)]
pub struct AhrsModel<T> {
    pub tau_g: T,
    pub sigma_gyro_white: T,
    pub sigma_drift: T,
    pub r_std: [T; 3],
}

impl<T: Scalar> AhrsModel<T> {
    pub fn from_config(cfg: &AhrsConfig<T>) -> Self {
        AhrsModel {
            tau_g: cfg.tau_g,
            sigma_gyro_white: cfg.sigma_gyro_white,
            sigma_drift: cfg.sigma_drift,
            r_std: cfg.r_std,
        }
    }
}

impl<T: Scalar> StateModel<T> for AhrsModel<T> {
    type Control = [T; 3];

    fn state_dim(&self) -> usize {
        STATE_DIM
    }

    fn obs_dim(&self) -> usize {
        OBS_DIM
    }

    /// Bias-corrected rate mechanization plus drift decay:
    /// `q ← q ⊗ δq((u − ε)·dt)`, `ε ← e^{−dt/τ}·ε`.
    fn process(&self, x: &VecN<T>, u: &[T; 3], dt: T) -> VecN<T> {
        let s = AhrsState::unpack(x);
        let phi = RotationVector(vec3::scale(vec3::sub(*u, s.drift), dt));
        let delta = Quaternion::from_rotation_vector(&phi);
        // Sign-continuous product: a canonical flip here would negate the
        // quaternion block under an unchanged covariance.
        let q = s.q.mul_continuous(&delta);
        let decay = (-dt / self.tau_g).exp();
        AhrsState {
            q,
            drift: vec3::scale(s.drift, decay),
        }
        .pack()
    }

    /// Euler angles of the quaternion block; independent of the drift block.
    fn measure(&self, x: &VecN<T>) -> VecN<T> {
        let s = AhrsState::unpack(x);
        let e = s.q.normalized().to_euler();
        VecN::from_slice(&[e.roll, e.pitch, e.yaw])
    }

    /// Attitude block: white gyro noise lifted through the quaternion rate
    /// map, `¼·σ²·dt²·G(q)G(q)ᵀ`; drift block: `σ_dr²·dt·I₃`; no cross
    /// terms.
    fn process_noise(&self, x: &VecN<T>, dt: T) -> MatN<T> {
        let s = AhrsState::unpack(x);
        let q = s.q.normalized();
        // G columns are q ⊗ e_i restricted to the vector part.
        let g = [
            [-q.x, -q.y, -q.z],
            [q.w, -q.z, q.y],
            [q.z, q.w, -q.x],
            [-q.y, q.x, q.w],
        ];
        let s_att = self.sigma_gyro_white * dt;
        let att_gain = s_att * s_att * T::of(0.25);
        let mut n = MatN::zeros(STATE_DIM);
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = T::zero();
                for k in 0..3 {
                    acc = acc + g[i][k] * g[j][k];
                }
                n[(i, j)] = acc * att_gain;
            }
        }
        let drift_var = self.sigma_drift * self.sigma_drift * dt;
        for i in 4..STATE_DIM {
            n[(i, i)] = drift_var;
        }
        n
    }

    fn measurement_noise(&self) -> MatN<T> {
        MatN::diag(&[
            self.r_std[0] * self.r_std[0],
            self.r_std[1] * self.r_std[1],
            self.r_std[2] * self.r_std[2],
        ])
    }

    fn constrain(&self, x: &mut VecN<T>) {
        let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
        if norm > T::zero() {
            for i in 0..4 {
                x[i] = x[i] / norm;
            }
        } else {
            x[0] = T::one();
        }
    }

    /// Roll and yaw are full-circle angles; keep their residuals on the
    /// short arc. Pitch lives in [-π/2, π/2] and needs no wrap.
    fn wrap_innovation(&self, nu: &mut VecN<T>) {
        nu[0] = wrap_angle(nu[0]);
        nu[2] = wrap_angle(nu[2]);
    }
}

/// Per-sample estimator output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeEstimate<T> {
    pub t: T,
    pub euler: EulerAngles<T>,
    pub q: Quaternion<T>,
    pub drift: [T; 3],
    pub accel_valid: bool,
    pub mag_valid: bool,
    /// Whether the measurement update actually ran this cycle.
    pub updated: bool,
    /// Wrapped innovation of the update when it ran.
    pub innovation: Option<[T; 3]>,
}

/// Streaming estimator: predict on every sample, update when the gates and
/// the gimbal guard allow.
#[derive(Debug, Clone)]
pub struct AhrsEstimator<T> {
    filter: CubatureKalmanFilter<T, AhrsModel<T>>,
    cfg: AhrsConfig<T>,
    last_t: Option<T>,
}

impl<T: Scalar> AhrsEstimator<T> {
    pub fn new(cfg: AhrsConfig<T>, initial: AhrsState<T>, method: FactorizationMethod) -> Self {
        let model = AhrsModel::from_config(&cfg);
        let mut p0 = MatN::zeros(STATE_DIM);
        for i in 0..4 {
            p0[(i, i)] = cfg.p0_attitude;
        }
        for i in 4..STATE_DIM {
            p0[(i, i)] = cfg.p0_drift;
        }
        AhrsEstimator {
            filter: CubatureKalmanFilter::new(model, initial.pack(), p0, method),
            cfg,
            last_t: None,
        }
    }

    pub fn config(&self) -> &AhrsConfig<T> {
        &self.cfg
    }

    pub fn state(&self) -> AhrsState<T> {
        AhrsState::unpack(&self.filter.state().x)
    }

    pub fn covariance(&self) -> &MatN<T> {
        &self.filter.state().p
    }

    pub fn steps(&self) -> u64 {
        self.filter.state().step
    }

    /// Direct access to the underlying filter state, used by the harness to
    /// inject covariance faults.
    pub fn filter_mut(&mut self) -> &mut CubatureKalmanFilter<T, AhrsModel<T>> {
        &mut self.filter
    }

    fn step_dt(&mut self, t: T) -> Result<T, AhrsError> {
        let dt = match self.last_t {
            None => self.cfg.nominal_dt,
            Some(prev) => {
                if t <= prev {
                    return Err(AhrsError::NonMonotonicTime);
                }
                t - prev
            }
        };
        self.last_t = Some(t);
        Ok(dt)
    }

    /// One full cycle: always predict, update when the observation gates and
    /// the gimbal guard allow it.
    pub fn step(&mut self, imu: &ImuSample<T>) -> Result<AttitudeEstimate<T>, AhrsError> {
        let dt = self.step_dt(imu.t)?;
        self.filter.predict(&imu.gyro, dt)?;

        let obs = fast_euler(imu.accel, imu.mag, &self.cfg.gate);
        let mut updated = false;
        let mut innovation = None;

        if self.cfg.fuse_observations && self.filter.state().step % self.cfg.decimation == 0 {
            if let Some(angles) = obs.angles() {
                let pitch_est = self.state().q.to_euler().pitch;
                if pitch_est.abs() < self.cfg.gimbal_guard {
                    let z = VecN::from_slice(&angles.as_array());
                    let nu = self.filter.update(&z)?;
                    innovation = Some([nu[0], nu[1], nu[2]]);
                    updated = true;
                    self.clamp_drift();
                }
            }
        }

        let state = self.state();
        Ok(AttitudeEstimate {
            t: imu.t,
            euler: state.q.to_euler(),
            q: state.q.canonical(),
            drift: state.drift,
            accel_valid: obs.accel_valid(),
            mag_valid: obs.mag_valid(),
            updated,
            innovation,
        })
    }

    /// Prediction-only cycle: the open-loop mechanization baseline runs the
    /// exact same code path with the gain never applied.
    pub fn step_predict_only(&mut self, imu: &ImuSample<T>) -> Result<AttitudeEstimate<T>, AhrsError> {
        let dt = self.step_dt(imu.t)?;
        self.filter.predict(&imu.gyro, dt)?;
        let state = self.state();
        Ok(AttitudeEstimate {
            t: imu.t,
            euler: state.q.to_euler(),
            q: state.q.canonical(),
            drift: state.drift,
            accel_valid: false,
            mag_valid: false,
            updated: false,
            innovation: None,
        })
    }

    fn clamp_drift(&mut self) {
        let limit = self.cfg.drift_limit;
        let x = self.filter.state_mut();
        let norm = (x.x[4] * x.x[4] + x.x[5] * x.x[5] + x.x[6] * x.x[6]).sqrt();
        if norm > limit {
            let scale = limit / norm;
            for i in 4..STATE_DIM {
                x.x[i] = x.x[i] * scale;
            }
        }
    }
}

/// Average the first samples of a static stream into an initial state:
/// attitude from FastEuler on the mean accel/mag, drift from the mean gyro.
///
/// Fails when more than half the samples trip the accel gate (the stream is
/// not static) or when the averaged sample itself is rejected.
pub fn init_static<T: Scalar>(
    samples: &[ImuSample<T>],
    gate: &GateConfig<T>,
) -> Result<AhrsState<T>, AhrsError> {
    if samples.is_empty() {
        return Err(AhrsError::InitFailed(InitFailure::Empty));
    }
    let inv = T::of_usize(samples.len()).recip();
    let mut accel = [T::zero(); 3];
    let mut mag = [T::zero(); 3];
    let mut gyro = [T::zero(); 3];
    let mut rejected = 0usize;
    for s in samples {
        if !fast_euler(s.accel, s.mag, gate).accel_valid() {
            rejected += 1;
        }
        for i in 0..3 {
            accel[i] = accel[i] + s.accel[i] * inv;
            mag[i] = mag[i] + s.mag[i] * inv;
            gyro[i] = gyro[i] + s.gyro[i] * inv;
        }
    }
    if rejected * 2 > samples.len() {
        return Err(AhrsError::InitFailed(InitFailure::NotStatic));
    }
    let obs = fast_euler(accel, mag, gate);
    match obs.angles() {
        Some(e) => Ok(AhrsState {
            q: Quaternion::from_euler(&e),
            drift: gyro,
        }),
        None => Err(AhrsError::InitFailed(InitFailure::GateRejected)),
    }
}
