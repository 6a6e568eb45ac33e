//! IMU/magnetometer attitude and heading estimation built on a cubature
//! Kalman filter with interchangeable covariance factorizations.
//!
//! The crate provides:
//!
//! - [`linalg`] — small fixed-dimension vectors/matrices plus the two
//!   covariance square roots the filter variants differ on: Cholesky and a
//!   symmetric (Jacobi) SVD that tolerates indefinite or rank-deficient
//!   covariances.
//! - [`attitude`] — unit quaternion kinematics: rotation-vector updates,
//!   Hamilton products, Z-Y-X Euler conversions.
//! - [`sensors`] — gyroscope error model (first-order Markov drift + white
//!   noise) and ideal accelerometer/magnetometer measurement models.
//! - [`fasteuler`] — direct accel/mag to Euler-angle pseudo-observation with
//!   an accelerometer-magnitude validity gate.
//! - [`cubature`] — the generic third-degree cubature Kalman filter,
//!   parameterized over the state model and the factorization method.
//! - [`ahrs`] — the concrete 7-state (quaternion + gyro drift) estimator.
//! - [`sim`] — trajectory scenarios, sensor synthesis, CSV replay.
//! - [`eval`] — RMSE computation and filter comparison harness.
//!
//! Core math is generic over the scalar type (`f32` or `f64`) through the
//! [`Scalar`] trait; the simulator and evaluation layers are `f64`.

pub mod ahrs;
pub mod attitude;
pub mod config;
pub mod cubature;
pub mod eval;
pub mod fasteuler;
pub mod linalg;
pub mod sensors;
pub mod sim;

mod scalar;

pub use scalar::Scalar;

/// 64-bit quaternion, the representation used by the simulator and CLI.
pub type Quat64 = attitude::Quaternion<f64>;
/// 32-bit quaternion.
pub type Quat32 = attitude::Quaternion<f32>;
/// 64-bit Euler angle triple.
pub type Euler64 = attitude::EulerAngles<f64>;
/// 32-bit Euler angle triple.
pub type Euler32 = attitude::EulerAngles<f32>;
/// 64-bit square matrix.
pub type Mat64 = linalg::MatN<f64>;
/// 32-bit square matrix.
pub type Mat32 = linalg::MatN<f32>;
/// 64-bit vector.
pub type Vec64 = linalg::VecN<f64>;
/// 32-bit vector.
pub type Vec32 = linalg::VecN<f32>;
