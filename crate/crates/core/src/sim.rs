//! Scenario generation, sensor-stream synthesis, and CSV replay.
//!
//! Trajectories are analytic Euler-angle profiles rather than vehicle
//! dynamics: the point is exact ground truth for RMSE, not aerodynamics. The
//! body rate stored with each truth sample is the exact per-interval
//! rotation vector between consecutive attitudes divided by the sample
//! period, so re-integrating the rates reproduces the stored attitude to
//! machine precision — the same piecewise-constant-rate model the filter
//! mechanization assumes.
//!
//! CSV schema (SI units: s, rad/s, m/s², normalized mag, rad):
//!
//! ```text
//! t,gx,gy,gz,ax,ay,az,mx,my,mz[,roll,pitch,yaw]
//! ```
//!
//! UTF-8, `#`-prefixed comment lines permitted, decimal point `.`, values
//! written with 15 significant digits.

use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::attitude::{wrap_to_2pi, EulerAngles, Quaternion};
use crate::linalg::vec3;
use crate::sensors::{
    accel_measure, drift_step, gyro_measure, mag_measure, GyroErrorState, ImuSample, MagReference,
    STANDARD_GRAVITY,
};

/// Attitude trajectory profile.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// Constant attitude, zero rates.
    Static { euler: EulerAngles<f64> },
    /// Gentle sinusoidal roll/pitch (±10°) with a 10°/s yaw ramp; body
    /// rates stay below 20°/s and there is no linear acceleration.
    LowDynamic,
    /// ±45°/±35° roll/pitch maneuvers with rates up to ~170°/s and
    /// coordinated linear acceleration up to 2 g, so the accel gate
    /// genuinely trips.
    HighDynamic,
    /// Piecewise-linear Euler spline through `(t, roll, pitch, yaw)`
    /// waypoints.
    Custom(Vec<Waypoint>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub t: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Static { .. } => "static",
            Profile::LowDynamic => "low-dynamic",
            Profile::HighDynamic => "high-dynamic",
            Profile::Custom(_) => "custom",
        }
    }

    /// Euler angles and navigation-frame linear acceleration at time `t`.
    fn eval(&self, t: f64) -> (EulerAngles<f64>, [f64; 3]) {
        match self {
            Profile::Static { euler } => (*euler, [0.0; 3]),
            Profile::LowDynamic => {
                let roll = 10f64.to_radians() * (2.0 * std::f64::consts::PI * 0.10 * t).sin();
                let pitch =
                    10f64.to_radians() * (2.0 * std::f64::consts::PI * 0.08 * t + 0.5).sin();
                let yaw = wrap_to_2pi(10f64.to_radians() * t);
                (EulerAngles::new(roll, pitch, yaw), [0.0; 3])
            }
            Profile::HighDynamic => {
                let roll = 45f64.to_radians() * (2.0 * std::f64::consts::PI * 0.50 * t).sin();
                let pitch =
                    35f64.to_radians() * (2.0 * std::f64::consts::PI * 0.30 * t + 1.0).sin();
                let yaw = wrap_to_2pi(
                    30f64.to_radians() * t
                        + 15f64.to_radians() * (2.0 * std::f64::consts::PI * 0.25 * t).sin(),
                );
                let magnitude =
                    2.0 * STANDARD_GRAVITY * (2.0 * std::f64::consts::PI * 0.06 * t).sin();
                let heading = 0.2 * t;
                let a_lin = [
                    magnitude * heading.cos(),
                    magnitude * heading.sin(),
                    0.0,
                ];
                (EulerAngles::new(roll, pitch, yaw), a_lin)
            }
            Profile::Custom(waypoints) => {
                assert!(!waypoints.is_empty(), "custom profile needs waypoints");
                let first = waypoints.first().unwrap();
                let last = waypoints.last().unwrap();
                if t <= first.t {
                    return (
                        EulerAngles::new(first.roll, first.pitch, wrap_to_2pi(first.yaw)),
                        [0.0; 3],
                    );
                }
                if t >= last.t {
                    return (
                        EulerAngles::new(last.roll, last.pitch, wrap_to_2pi(last.yaw)),
                        [0.0; 3],
                    );
                }
                let idx = waypoints.partition_point(|w| w.t <= t) - 1;
                let a = waypoints[idx];
                let b = waypoints[idx + 1];
                let f = (t - a.t) / (b.t - a.t);
                (
                    EulerAngles::new(
                        a.roll + f * (b.roll - a.roll),
                        a.pitch + f * (b.pitch - a.pitch),
                        wrap_to_2pi(a.yaw + f * (b.yaw - a.yaw)),
                    ),
                    [0.0; 3],
                )
            }
        }
    }
}

/// Sensor noise configuration for synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Gyro white noise std, rad/s.
    pub gyro_white: f64,
    /// Markov drift driving noise density, rad/s/√s.
    pub drift_sigma: f64,
    /// Markov drift time constant, s.
    pub drift_tau: f64,
    /// Initial (turn-on) drift folded into the Markov state, rad/s.
    pub drift_init: [f64; 3],
    /// Constant additive gyro bias, rad/s; stays constant for the whole run
    /// unlike the decaying Markov state.
    pub gyro_bias: [f64; 3],
    /// Accelerometer noise std, m/s².
    pub accel: f64,
    /// Magnetometer noise std, normalized units.
    pub mag: f64,
    /// Magnetic field inclination (dip), rad.
    pub mag_inclination: f64,
    /// Magnetic declination, rad.
    pub mag_declination: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            gyro_white: 5e-3,
            drift_sigma: 1e-4,
            drift_tau: 300.0,
            drift_init: [5e-3, -5e-3, 3e-3],
            gyro_bias: [0.0; 3],
            accel: 0.05,
            mag: 0.01,
            mag_inclination: 60f64.to_radians(),
            mag_declination: 0.0,
        }
    }
}

impl NoiseConfig {
    /// All noise terms zeroed; synthesized sensors become exact.
    pub fn zero() -> Self {
        NoiseConfig {
            gyro_white: 0.0,
            drift_sigma: 0.0,
            drift_tau: 300.0,
            drift_init: [0.0; 3],
            gyro_bias: [0.0; 3],
            accel: 0.0,
            mag: 0.0,
            mag_inclination: 60f64.to_radians(),
            mag_declination: 0.0,
        }
    }

    pub fn mag_reference(&self) -> MagReference<f64> {
        MagReference::from_inclination_declination(self.mag_inclination, self.mag_declination)
    }
}

/// A simulation scenario: trajectory profile, timing, noise, seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub duration_s: f64,
    pub rate_hz: f64,
    pub profile: Profile,
    pub noise: NoiseConfig,
    pub seed: u64,
}

impl Scenario {
    pub fn new(profile: Profile, duration_s: f64, rate_hz: f64, seed: u64) -> Self {
        assert!(duration_s > 0.0, "duration must be positive");
        assert!(
            (10.0..=1000.0).contains(&rate_hz),
            "rate must be within 10..=1000 Hz"
        );
        Scenario {
            name: profile.name().to_string(),
            duration_s,
            rate_hz,
            profile,
            noise: NoiseConfig::default(),
            seed,
        }
    }
}

/// Ground-truth sample: attitude, exact interval body rate, linear
/// acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthSample {
    pub t: f64,
    pub attitude: Quaternion<f64>,
    pub euler: EulerAngles<f64>,
    /// Body rate over `[t, t + dt)`: the rotation vector between the stored
    /// attitudes divided by dt, so integration reproduces the truth exactly.
    pub omega: [f64; 3],
    /// Navigation-frame linear acceleration, m/s².
    pub a_lin: [f64; 3],
}

/// Sample the scenario's trajectory.
pub fn gen_trajectory(scenario: &Scenario) -> Vec<TruthSample> {
    let dt = 1.0 / scenario.rate_hz;
    let count = (scenario.duration_s * scenario.rate_hz).round() as usize;
    assert!(count >= 2, "scenario too short");
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let t = k as f64 * dt;
        let (euler, a_lin) = scenario.profile.eval(t);
        out.push(TruthSample {
            t,
            attitude: Quaternion::from_euler(&euler),
            euler,
            omega: [0.0; 3],
            a_lin,
        });
    }
    for k in 0..count - 1 {
        let delta = out[k]
            .attitude
            .conjugate()
            .mul_continuous(&out[k + 1].attitude);
        out[k].omega = vec3::scale(delta.to_rotation_vector().0, 1.0 / dt);
    }
    if count >= 2 {
        out[count - 1].omega = out[count - 2].omega;
    }
    out
}

/// Corrupt a truth series into an IMU sample stream; deterministic under the
/// seed.
pub fn synthesize(truth: &[TruthSample], noise: &NoiseConfig, seed: u64) -> Vec<ImuSample<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reference = noise.mag_reference();
    let mut drift = noise.drift_init;
    let err_template = GyroErrorState {
        drift,
        tau: noise.drift_tau,
        sigma_drift: noise.drift_sigma,
        sigma_white: noise.gyro_white,
    };
    let mut out = Vec::with_capacity(truth.len());
    let draw3 = |rng: &mut ChaCha8Rng| -> [f64; 3] {
        [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ]
    };
    let dt = if truth.len() >= 2 {
        truth[1].t - truth[0].t
    } else {
        0.01
    };
    for s in truth {
        let n_drift = draw3(&mut rng);
        let n_gyro = draw3(&mut rng);
        let n_accel = draw3(&mut rng);
        let n_mag = draw3(&mut rng);
        let err = GyroErrorState {
            drift: vec3::add(drift, noise.gyro_bias),
            ..err_template
        };
        let gyro = gyro_measure(s.omega, &err, n_gyro);
        let accel = accel_measure(
            &s.attitude,
            s.a_lin,
            vec3::scale(n_accel, noise.accel),
        );
        let mag = mag_measure(&s.attitude, &reference, vec3::scale(n_mag, noise.mag));
        out.push(ImuSample {
            t: s.t,
            gyro,
            accel,
            mag,
        });
        drift = drift_step(drift, noise.drift_tau, noise.drift_sigma, dt, n_drift);
    }
    out
}

/// CSV ingestion/serialization errors.
#[derive(Debug, Error)]
pub enum CsvError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error at line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("non-monotonic timestamp at line {line}")]
    NonMonotonicTime { line: usize },
}

const CSV_COLUMNS: [&str; 10] = ["t", "gx", "gy", "gz", "ax", "ay", "az", "mx", "my", "mz"];
const CSV_TRUTH_COLUMNS: [&str; 3] = ["roll", "pitch", "yaw"];

/// A replayed sensor log: samples plus optional index-aligned truth angles.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorLog {
    pub samples: Vec<ImuSample<f64>>,
    pub truth: Option<Vec<EulerAngles<f64>>>,
}

fn fmt15(v: f64) -> String {
    format!("{v:.14e}")
}

/// Write a sample stream (and optional aligned truth) as CSV.
pub fn write_csv<W: Write>(
    w: &mut W,
    samples: &[ImuSample<f64>],
    truth: Option<&[TruthSample]>,
) -> Result<(), CsvError> {
    if let Some(t) = truth {
        assert_eq!(t.len(), samples.len(), "truth must align with samples");
        writeln!(
            w,
            "{},{}",
            CSV_COLUMNS.join(","),
            CSV_TRUTH_COLUMNS.join(",")
        )?;
    } else {
        writeln!(w, "{}", CSV_COLUMNS.join(","))?;
    }
    for (i, s) in samples.iter().enumerate() {
        let mut fields = vec![
            fmt15(s.t),
            fmt15(s.gyro[0]),
            fmt15(s.gyro[1]),
            fmt15(s.gyro[2]),
            fmt15(s.accel[0]),
            fmt15(s.accel[1]),
            fmt15(s.accel[2]),
            fmt15(s.mag[0]),
            fmt15(s.mag[1]),
            fmt15(s.mag[2]),
        ];
        if let Some(t) = truth {
            fields.push(fmt15(t[i].euler.roll));
            fields.push(fmt15(t[i].euler.pitch));
            fields.push(fmt15(t[i].euler.yaw));
        }
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Parse a CSV sensor log; `#` comment lines and blank lines are skipped,
/// the header is mandatory, timestamps must strictly increase.
pub fn read_csv<R: BufRead>(reader: R) -> Result<SensorLog, CsvError> {
    let mut samples = Vec::new();
    let mut truth: Option<Vec<EulerAngles<f64>>> = None;
    let mut header_seen = false;
    let mut expect_cols = 0usize;
    let mut last_t: Option<f64> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if !header_seen {
            let base_ok = fields.len() >= CSV_COLUMNS.len()
                && fields[..CSV_COLUMNS.len()]
                    .iter()
                    .zip(CSV_COLUMNS)
                    .all(|(a, b)| a.eq_ignore_ascii_case(b));
            let with_truth = fields.len() == CSV_COLUMNS.len() + CSV_TRUTH_COLUMNS.len()
                && fields[CSV_COLUMNS.len()..]
                    .iter()
                    .zip(CSV_TRUTH_COLUMNS)
                    .all(|(a, b)| a.eq_ignore_ascii_case(b));
            if !(base_ok && (fields.len() == CSV_COLUMNS.len() || with_truth)) {
                return Err(CsvError::Format {
                    line: line_no,
                    reason: format!("expected header '{}[,roll,pitch,yaw]'", CSV_COLUMNS.join(",")),
                });
            }
            expect_cols = fields.len();
            if with_truth {
                truth = Some(Vec::new());
            }
            header_seen = true;
            continue;
        }
        if fields.len() != expect_cols {
            return Err(CsvError::Format {
                line: line_no,
                reason: format!("expected {} fields, found {}", expect_cols, fields.len()),
            });
        }
        let mut values = [0.0f64; 13];
        for (i, f) in fields.iter().enumerate() {
            values[i] = f.parse::<f64>().map_err(|e| CsvError::Format {
                line: line_no,
                reason: format!("field {} ('{}'): {}", i + 1, f, e),
            })?;
            if !values[i].is_finite() {
                return Err(CsvError::Format {
                    line: line_no,
                    reason: format!("field {} is not finite", i + 1),
                });
            }
        }
        if let Some(prev) = last_t {
            if values[0] <= prev {
                return Err(CsvError::NonMonotonicTime { line: line_no });
            }
        }
        last_t = Some(values[0]);
        samples.push(ImuSample {
            t: values[0],
            gyro: [values[1], values[2], values[3]],
            accel: [values[4], values[5], values[6]],
            mag: [values[7], values[8], values[9]],
        });
        if let Some(truth_rows) = truth.as_mut() {
            truth_rows.push(EulerAngles::new(values[10], values[11], values[12]));
        }
    }
    if !header_seen {
        return Err(CsvError::Format {
            line: 0,
            reason: "missing header".to_string(),
        });
    }
    Ok(SensorLog { samples, truth })
}

/// Read a sensor log from a file path.
pub fn load_csv(path: &std::path::Path) -> Result<SensorLog, CsvError> {
    let file = std::fs::File::open(path)?;
    read_csv(std::io::BufReader::new(file))
}

/// Write a sample stream (and optional truth) to a file path.
pub fn save_csv(
    path: &std::path::Path,
    samples: &[ImuSample<f64>],
    truth: Option<&[TruthSample]>,
) -> Result<(), CsvError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_csv(&mut file, samples, truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attitude::wrap_angle;
    use crate::fasteuler::{fast_euler, GateConfig};

    fn low_dynamic_scenario() -> Scenario {
        Scenario::new(Profile::LowDynamic, 20.0, 100.0, 7)
    }

    #[test]
    fn static_profile_constant_attitude_zero_rates() {
        let euler = EulerAngles::new(0.1, -0.05, 0.7);
        let sc = Scenario::new(Profile::Static { euler }, 5.0, 100.0, 1);
        let truth = gen_trajectory(&sc);
        assert_eq!(truth.len(), 500);
        for s in &truth {
            assert!(s.attitude.angle_to(&truth[0].attitude) < 1e-14);
            assert!(vec3::norm(s.omega) < 1e-12);
        }
    }

    #[test]
    fn truth_self_consistent_under_integration() {
        for profile in [Profile::LowDynamic, Profile::HighDynamic] {
            let sc = Scenario::new(profile, 20.0, 100.0, 1);
            let truth = gen_trajectory(&sc);
            let dt = 1.0 / sc.rate_hz;
            let mut q = truth[0].attitude;
            let mut worst: f64 = 0.0;
            for k in 0..truth.len() - 1 {
                let delta = Quaternion::from_rotation_vector(&crate::attitude::RotationVector(
                    vec3::scale(truth[k].omega, dt),
                ));
                q = q.mul_continuous(&delta);
                worst = worst.max(q.angle_to(&truth[k + 1].attitude));
            }
            assert!(worst < 1e-6, "max integration gap {worst}");
        }
    }

    #[test]
    fn high_dynamic_trips_the_accel_gate() {
        let sc = Scenario::new(Profile::HighDynamic, 30.0, 100.0, 1);
        let truth = gen_trajectory(&sc);
        let alpha = GateConfig::<f64>::default().accel_tolerance;
        let tripped = truth.iter().any(|s| {
            let f = accel_measure(&s.attitude, s.a_lin, [0.0; 3]);
            (vec3::norm(f) - STANDARD_GRAVITY).abs() > alpha
        });
        assert!(tripped, "no interval exceeded the gate");
        // And the low-dynamic profile never trips it.
        let sc = low_dynamic_scenario();
        let truth = gen_trajectory(&sc);
        let tripped = truth.iter().any(|s| {
            let f = accel_measure(&s.attitude, s.a_lin, [0.0; 3]);
            (vec3::norm(f) - STANDARD_GRAVITY).abs() > alpha
        });
        assert!(!tripped);
    }

    #[test]
    fn zero_noise_static_recovers_exactly_via_fasteuler() {
        let euler = EulerAngles::new(0.2, 0.1, 1.3);
        let mut sc = Scenario::new(Profile::Static { euler }, 1.0, 100.0, 3);
        sc.noise = NoiseConfig::zero();
        let truth = gen_trajectory(&sc);
        let samples = synthesize(&truth, &sc.noise, sc.seed);
        let gate = GateConfig::default();
        for s in &samples {
            let obs = fast_euler(s.accel, s.mag, &gate);
            let a = obs.angles().expect("gates must pass");
            assert!(wrap_angle(a.roll - euler.roll).abs() < 1e-12);
            assert!((a.pitch - euler.pitch).abs() < 1e-12);
            assert!(wrap_angle(a.yaw - euler.yaw).abs() < 1e-12);
        }
    }

    #[test]
    fn synthesis_is_seed_deterministic() {
        let sc = low_dynamic_scenario();
        let truth = gen_trajectory(&sc);
        let a = synthesize(&truth, &sc.noise, 42);
        let b = synthesize(&truth, &sc.noise, 42);
        assert_eq!(a, b);
        let c = synthesize(&truth, &sc.noise, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn csv_bytes_reproducible() {
        let sc = low_dynamic_scenario();
        let truth = gen_trajectory(&sc);
        let samples = synthesize(&truth, &sc.noise, sc.seed);
        let mut buf_a = Vec::new();
        write_csv(&mut buf_a, &samples, Some(&truth)).unwrap();
        let mut buf_b = Vec::new();
        write_csv(&mut buf_b, &samples, Some(&truth)).unwrap();
        assert_eq!(buf_a, buf_b);
    }

    #[test]
    fn csv_round_trip() {
        let sc = low_dynamic_scenario();
        let truth = gen_trajectory(&sc);
        let samples = synthesize(&truth, &sc.noise, sc.seed);
        let mut buf = Vec::new();
        write_csv(&mut buf, &samples, Some(&truth)).unwrap();
        let log = read_csv(&buf[..]).unwrap();
        assert_eq!(log.samples.len(), samples.len());
        let truth_angles = log.truth.expect("truth columns present");
        for (a, b) in log.samples.iter().zip(&samples) {
            assert!((a.t - b.t).abs() <= 1e-14 * b.t.abs());
            for i in 0..3 {
                assert!((a.gyro[i] - b.gyro[i]).abs() <= 1e-14 * b.gyro[i].abs());
                assert!((a.accel[i] - b.accel[i]).abs() <= 1e-14 * b.accel[i].abs());
                assert!((a.mag[i] - b.mag[i]).abs() <= 1e-14 * b.mag[i].abs());
            }
        }
        for (a, b) in truth_angles.iter().zip(&truth) {
            assert!((a.roll - b.euler.roll).abs() <= 1e-14 * b.euler.roll.abs().max(1.0));
        }
    }

    #[test]
    fn golden_fixture_parses_to_known_values() {
        let text = "\
# fixture authored with write_csv, values hand-rounded
t,gx,gy,gz,ax,ay,az,mx,my,mz
0.0,0.01,-0.02,0.03,0.0,0.0,-9.80665,1.0,0.0,0.0
0.01,0.0,0.0,0.0,0.1,-0.1,-9.8,0.9,0.1,0.05
0.02,1e-3,2e-3,3e-3,0.0,0.0,-9.80665,1.0,0.0,0.0
0.03,0.0,0.0,0.1,0.0,0.0,-9.80665,0.99,0.01,0.0
0.04,0.0,0.0,0.0,0.0,0.0,-9.80665,1.0,0.0,0.0
0.05,0.0,0.0,0.0,0.0,0.0,-9.80665,1.0,0.0,0.0
0.06,0.0,0.0,0.0,0.0,0.0,-9.80665,1.0,0.0,0.0
0.07,0.0,0.0,0.0,0.0,0.0,-9.80665,1.0,0.0,0.0
0.08,0.0,0.0,0.0,0.0,0.0,-9.80665,1.0,0.0,0.0

0.09,0.0,0.0,0.0,0.0,0.0,-9.80665,1.0,0.0,0.0
";
        let log = read_csv(text.as_bytes()).unwrap();
        assert_eq!(log.samples.len(), 10);
        assert!(log.truth.is_none());
        assert_eq!(log.samples[0].gyro, [0.01, -0.02, 0.03]);
        assert_eq!(log.samples[0].accel[2], -9.80665);
        assert_eq!(log.samples[2].gyro, [1e-3, 2e-3, 3e-3]);
        assert_eq!(log.samples[9].t, 0.09);
    }

    #[test]
    fn empty_file_is_format_error() {
        let err = read_csv("".as_bytes()).unwrap_err();
        assert!(matches!(err, CsvError::Format { .. }));
    }

    #[test]
    fn malformed_header_is_format_error() {
        let err = read_csv("time,gx,gy\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CsvError::Format { line: 1, .. }));
    }

    #[test]
    fn bad_row_reports_line_number() {
        let text = "t,gx,gy,gz,ax,ay,az,mx,my,mz\n0.0,0,0,0,0,0,-9.8,1,0,0\nnope,0,0,0,0,0,-9.8,1,0,0\n";
        let err = read_csv(text.as_bytes()).unwrap_err();
        match err {
            CsvError::Format { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_monotonic_time_reports_first_offender() {
        let text = "t,gx,gy,gz,ax,ay,az,mx,my,mz\n0.0,0,0,0,0,0,-9.8,1,0,0\n0.01,0,0,0,0,0,-9.8,1,0,0\n0.01,0,0,0,0,0,-9.8,1,0,0\n";
        let err = read_csv(text.as_bytes()).unwrap_err();
        match err {
            CsvError::NonMonotonicTime { line } => assert_eq!(line, 4),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn custom_profile_interpolates_waypoints() {
        let profile = Profile::Custom(vec![
            Waypoint {
                t: 0.0,
                roll: 0.0,
                pitch: 0.0,
                yaw: 0.0,
            },
            Waypoint {
                t: 10.0,
                roll: 0.4,
                pitch: -0.2,
                yaw: 1.0,
            },
        ]);
        let sc = Scenario::new(profile, 10.0, 100.0, 1);
        let truth = gen_trajectory(&sc);
        let mid = &truth[500];
        assert!((mid.euler.roll - 0.2).abs() < 1e-12);
        assert!((mid.euler.pitch + 0.1).abs() < 1e-12);
        assert!((mid.euler.yaw - 0.5).abs() < 1e-12);
    }
}
