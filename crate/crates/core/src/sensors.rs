//! Gyroscope error model and ideal accelerometer/magnetometer measurement
//! models.
//!
//! The gyro error is a slowly varying first-order Markov drift plus white
//! measurement noise; a constant turn-on bias is folded into the drift state
//! by initializing it nonzero. The same model serves double duty: the
//! simulator integrates it to corrupt synthetic rate data, and the filter's
//! process model propagates the drift estimate with the identical decay.

use crate::attitude::Quaternion;
use crate::linalg::vec3;
use crate::scalar::Scalar;

/// Standard gravity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Parameters of the gyroscope error model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GyroErrorState<T> {
    /// Random drift ε_r, rad/s.
    pub drift: [T; 3],
    /// Markov correlation time constant τ_g, s.
    pub tau: T,
    /// Drift-driving noise density, rad/s/√s.
    pub sigma_drift: T,
    /// White measurement noise standard deviation, rad/s.
    pub sigma_white: T,
}

impl<T: Scalar> Default for GyroErrorState<T> {
    fn default() -> Self {
        GyroErrorState {
            drift: [T::zero(); 3],
            tau: T::of(300.0),
            sigma_drift: T::of(1e-4),
            sigma_white: T::of(5e-3),
        }
    }
}

/// One timestamped IMU/magnetometer sample in body axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuSample<T> {
    /// Timestamp, s; strictly increasing within a stream.
    pub t: T,
    /// Angular rate, rad/s.
    pub gyro: [T; 3],
    /// Specific force, m/s².
    pub accel: [T; 3],
    /// Magnetic field direction, normalized.
    pub mag: [T; 3],
}

/// Magnetic field direction in the navigation frame (unit NED vector);
/// declination is baked into the east component at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagReference<T> {
    direction: [T; 3],
}

impl<T: Scalar> MagReference<T> {
    /// Normalizing constructor from NED components.
    pub fn new(ned: [T; 3]) -> Self {
        let n = vec3::norm(ned);
        assert!(n > T::zero(), "magnetic reference must be nonzero");
        MagReference {
            direction: vec3::scale(ned, n.recip()),
        }
    }

    /// Horizontal field pointing true north.
    pub fn north() -> Self {
        MagReference {
            direction: [T::one(), T::zero(), T::zero()],
        }
    }

    /// Field with the given inclination (dip, positive down) and declination
    /// (positive east of true north), radians.
    pub fn from_inclination_declination(inclination: T, declination: T) -> Self {
        let (si, ci) = inclination.sin_cos();
        let (sd, cd) = declination.sin_cos();
        MagReference {
            direction: [ci * cd, ci * sd, si],
        }
    }

    pub fn direction(&self) -> [T; 3] {
        self.direction
    }
}

/// Advance the Markov drift one step: exponential decay plus driving noise.
///
/// `noise` is a standard-normal sample; the Euler–Maruyama scaling
/// `σ_drift·√dt` is applied here.
pub fn drift_step<T: Scalar>(
    drift: [T; 3],
    tau: T,
    sigma_drift: T,
    dt: T,
    noise: [T; 3],
) -> [T; 3] {
    debug_assert!(dt > T::zero());
    let decay = (-dt / tau).exp();
    let gain = sigma_drift * dt.sqrt();
    [
        drift[0] * decay + noise[0] * gain,
        drift[1] * decay + noise[1] * gain,
        drift[2] * decay + noise[2] * gain,
    ]
}

/// Corrupt a true body rate with drift and white noise: `ω + ε_r + σ_ε·w`.
pub fn gyro_measure<T: Scalar>(
    omega_true: [T; 3],
    err: &GyroErrorState<T>,
    white: [T; 3],
) -> [T; 3] {
    [
        omega_true[0] + err.drift[0] + white[0] * err.sigma_white,
        omega_true[1] + err.drift[1] + white[1] * err.sigma_white,
        omega_true[2] + err.drift[2] + white[2] * err.sigma_white,
    ]
}

/// Specific force seen by a body-mounted accelerometer:
/// `f_b = C_n^b (a_lin − g_n) + noise` with `g_n = [0, 0, +g]`.
///
/// `noise` is already scaled to m/s².
pub fn accel_measure<T: Scalar>(q: &Quaternion<T>, a_lin_nav: [T; 3], noise: [T; 3]) -> [T; 3] {
    let g_nav = [T::zero(), T::zero(), T::of(STANDARD_GRAVITY)];
    let f_nav = vec3::sub(a_lin_nav, g_nav);
    vec3::add(q.rotate_to_body(f_nav), noise)
}

/// Magnetometer reading: the navigation-frame reference expressed in body
/// axes plus additive noise.
pub fn mag_measure<T: Scalar>(
    q: &Quaternion<T>,
    reference: &MagReference<T>,
    noise: [T; 3],
) -> [T; 3] {
    vec3::add(q.rotate_to_body(reference.direction()), noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attitude::EulerAngles;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn drift_decays_deterministically() {
        let out = drift_step([0.01, 0.0, 0.0], 300.0, 1e-5, 0.01, [0.0; 3]);
        let expected = 0.01 * (-0.01f64 / 300.0).exp();
        assert!((out[0] - expected).abs() < 1e-18);
        assert_eq!(out[1], 0.0);
        assert_eq!(out[2], 0.0);
    }

    #[test]
    fn drift_zero_is_fixed_point() {
        let out = drift_step([0.0; 3], 300.0, 1e-5, 0.01, [0.0; 3]);
        assert_eq!(out, [0.0; 3]);
    }

    #[test]
    fn drift_contracts_monotonically() {
        let mut d = [0.02, -0.01, 0.005];
        let mut prev = vec3::norm(d);
        for _ in 0..100 {
            d = drift_step(d, 50.0, 0.0, 0.1, [0.0; 3]);
            let n = vec3::norm(d);
            assert!(n < prev);
            prev = n;
        }
    }

    #[test]
    fn drift_stationary_variance_matches_ou_process() {
        // Ornstein–Uhlenbeck stationary variance is σ²τ/2. Use a short
        // correlation time so the 10⁶-step run holds enough independent
        // samples for a 5% check.
        let tau = 0.5;
        let dt = 0.01;
        let sigma = 2e-3;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut d = [0.0f64; 3];
        let burn_in = 10_000;
        let steps = 1_000_000;
        let mut acc = 0.0;
        let mut count = 0usize;
        for k in 0..steps {
            let noise = [
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            ];
            d = drift_step(d, tau, sigma, dt, noise);
            if k >= burn_in {
                acc += d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
                count += 3;
            }
        }
        let var = acc / count as f64;
        let expected = sigma * sigma * tau / 2.0;
        assert!(
            (var - expected).abs() < 0.05 * expected,
            "var {var:e} vs expected {expected:e}"
        );
    }

    #[test]
    fn gyro_measure_error_free() {
        let err = GyroErrorState::<f64> {
            drift: [0.0; 3],
            sigma_white: 0.0,
            ..Default::default()
        };
        assert_eq!(
            gyro_measure([0.1, -0.2, 0.3], &err, [1.0; 3]),
            [0.1, -0.2, 0.3]
        );
    }

    #[test]
    fn gyro_measure_pure_drift() {
        let err = GyroErrorState::<f64> {
            drift: [0.01, 0.0, 0.0],
            sigma_white: 0.0,
            ..Default::default()
        };
        assert_eq!(gyro_measure([0.0; 3], &err, [0.0; 3]), [0.01, 0.0, 0.0]);
    }

    #[test]
    fn gyro_measure_is_affine_in_rate() {
        let err = GyroErrorState::<f64> {
            drift: [0.003, -0.001, 0.002],
            sigma_white: 0.005,
            ..Default::default()
        };
        let w = [0.4, -0.7, 0.1];
        let a = [0.2, 0.3, -0.5];
        let b = [0.1, -0.2, 0.6];
        let ab = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
        let ga = gyro_measure(a, &err, w);
        let gab = gyro_measure(ab, &err, w);
        for i in 0..3 {
            assert!((gab[i] - ga[i] - b[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn gyro_sample_mean_converges() {
        let err = GyroErrorState::<f64> {
            drift: [0.01, -0.02, 0.005],
            sigma_white: 0.005,
            ..Default::default()
        };
        let omega = [0.1, 0.2, -0.3];
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let mut mean = [0.0f64; 3];
        for _ in 0..n {
            let white = [
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            ];
            let m = gyro_measure(omega, &err, white);
            for i in 0..3 {
                mean[i] += m[i];
            }
        }
        let bound = 3.0 * err.sigma_white / (n as f64).sqrt();
        for i in 0..3 {
            mean[i] /= n as f64;
            assert!((mean[i] - omega[i] - err.drift[i]).abs() < bound);
        }
    }

    #[test]
    fn accel_level_static() {
        let f = accel_measure(&Quaternion::<f64>::identity(), [0.0; 3], [0.0; 3]);
        assert!((f[0]).abs() < 1e-15);
        assert!((f[1]).abs() < 1e-15);
        assert!((f[2] + STANDARD_GRAVITY).abs() < 1e-12);
    }

    #[test]
    fn accel_rolled_static_matches_rotation_oracle() {
        // 90° roll: gravity swings onto the body y axis.
        let q = Quaternion::from_euler(&EulerAngles::new(FRAC_PI_2, 0.0, 0.0));
        let f = accel_measure(&q, [0.0; 3], [0.0; 3]);
        assert!((f[0]).abs() < 1e-12);
        assert!((f[1] + STANDARD_GRAVITY).abs() < 1e-12);
        assert!((f[2]).abs() < 1e-12);
    }

    #[test]
    fn accel_static_norm_equals_gravity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let q = Quaternion::from_euler(&EulerAngles::new(
                rand::Rng::random_range(&mut rng, -3.0..3.0),
                rand::Rng::random_range(&mut rng, -1.5..1.5),
                rand::Rng::random_range(&mut rng, 0.0..6.28),
            ));
            let f = accel_measure(&q, [0.0; 3], [0.0; 3]);
            assert!((vec3::norm(f) - STANDARD_GRAVITY).abs() < 1e-12);
        }
    }

    #[test]
    fn mag_identity_attitude() {
        let m = mag_measure(&Quaternion::<f64>::identity(), &MagReference::north(), [0.0; 3]);
        assert!((m[0] - 1.0).abs() < 1e-15);
        assert!(m[1].abs() < 1e-15);
        assert!(m[2].abs() < 1e-15);
    }

    #[test]
    fn mag_yawed_body_x_reads_east_component() {
        let reference = MagReference::new([0.8, 0.6, 0.0]);
        let q = Quaternion::from_euler(&EulerAngles::new(0.0, 0.0, FRAC_PI_2));
        let m = mag_measure(&q, &reference, [0.0; 3]);
        assert!((m[0] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn mag_noiseless_norm_is_unit() {
        let reference = MagReference::<f64>::from_inclination_declination(1.0, 0.1);
        let q = Quaternion::from_euler(&EulerAngles::new(0.5, -0.3, 2.0));
        let m = mag_measure(&q, &reference, [0.0; 3]);
        assert!((vec3::norm(m) - 1.0).abs() < 1e-12);
    }
}
