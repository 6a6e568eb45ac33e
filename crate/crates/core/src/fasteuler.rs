//! Direct accel/mag to Euler-angle conversion with validity gating.
//!
//! One accelerometer/magnetometer sample is turned into a (roll, pitch, yaw)
//! pseudo-observation: roll and pitch from the gravity direction, yaw from
//! the tilt-compensated magnetic field. A magnitude gate on the specific
//! force rejects samples taken under linear acceleration, and a band gate on
//! the magnetic norm rejects disturbed field readings; gate failures yield
//! absent angles rather than errors, which is exactly what lets the filter
//! skip bad observation cycles.

use crate::attitude::{wrap_to_2pi, EulerAngles};
use crate::linalg::vec3;
use crate::scalar::Scalar;
use crate::sensors::STANDARD_GRAVITY;

/// Validity gate parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConfig<T> {
    /// Tolerated deviation of the specific-force norm from gravity, m/s².
    pub accel_tolerance: T,
    /// Acceptable magnetometer magnitude band relative to the unit
    /// reference, `(min, max)`.
    pub mag_norm_band: (T, T),
}

impl<T: Scalar> Default for GateConfig<T> {
    fn default() -> Self {
        GateConfig {
            accel_tolerance: T::of(0.5),
            mag_norm_band: (T::of(0.5), T::of(1.5)),
        }
    }
}

/// Euler-angle pseudo-observation; absent fields mark failed gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerObservation<T> {
    /// Roll and pitch from gravity; present when the accel gate passed.
    pub tilt: Option<(T, T)>,
    /// Tilt-compensated heading in `[0, 2π)`; present only when both gates
    /// passed, since the compensation needs roll and pitch.
    pub yaw: Option<T>,
}

impl<T: Scalar> EulerObservation<T> {
    pub fn accel_valid(&self) -> bool {
        self.tilt.is_some()
    }

    pub fn mag_valid(&self) -> bool {
        self.yaw.is_some()
    }

    /// The full 3-angle observation the filter consumes; `None` unless both
    /// gates passed.
    pub fn angles(&self) -> Option<EulerAngles<T>> {
        match (self.tilt, self.yaw) {
            (Some((roll, pitch)), Some(yaw)) => Some(EulerAngles { roll, pitch, yaw }),
            _ => None,
        }
    }

    fn rejected() -> Self {
        EulerObservation {
            tilt: None,
            yaw: None,
        }
    }
}

/// Convert one accel/mag sample into an Euler observation.
///
/// Roll is `atan2(-a_y, -a_z)`; pitch divides by the full horizontal
/// magnitude, `atan2(a_x, √(a_y² + a_z²))`, so the inversion is exact at any
/// roll. Yaw comes from the de-tilted field components and is wrapped to
/// `[0, 2π)`.
pub fn fast_euler<T: Scalar>(
    accel: [T; 3],
    mag: [T; 3],
    cfg: &GateConfig<T>,
) -> EulerObservation<T> {
    let accel_norm = vec3::norm(accel);
    let g = T::of(STANDARD_GRAVITY);
    if !(accel[0].is_finite() && accel[1].is_finite() && accel[2].is_finite())
        || accel_norm == T::zero()
        || (accel_norm - g).abs() > cfg.accel_tolerance
    {
        return EulerObservation::rejected();
    }

    let roll = (-accel[1]).atan2(-accel[2]);
    let horizontal = (accel[1] * accel[1] + accel[2] * accel[2]).sqrt();
    let pitch = accel[0].atan2(horizontal);
    let tilt = Some((roll, pitch));

    let mag_norm = vec3::norm(mag);
    if !(mag[0].is_finite() && mag[1].is_finite() && mag[2].is_finite())
        || mag_norm <= cfg.mag_norm_band.0
        || mag_norm >= cfg.mag_norm_band.1
    {
        return EulerObservation { tilt, yaw: None };
    }

    let (sr, cr) = roll.sin_cos();
    let (sp, cp) = pitch.sin_cos();
    let hx = mag[0] * cp + mag[1] * sp * sr + mag[2] * sp * cr;
    let hy = mag[1] * cr - mag[2] * sr;
    let mut yaw = (-hy).atan2(hx);
    if yaw < T::zero() {
        yaw = yaw + T::of(2.0) * T::PI();
    }
    EulerObservation {
        tilt,
        yaw: Some(wrap_to_2pi(yaw)),
    }
}
