//! Flat key-value run configuration: scenario, noise, gates, filter tuning.
//!
//! The format is one `key = value` pair per line, `#` comments, no sections.
//! [`default_config_text`] emits the full documented key set; the CLI's
//! `init-config` subcommand writes it to disk.

use thiserror::Error;

use crate::ahrs::AhrsConfig;
use crate::attitude::EulerAngles;
use crate::fasteuler::GateConfig;
use crate::sim::{NoiseConfig, Profile, Scenario};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Which filter variants a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterChoice {
    Ckf,
    Svdckf,
    Both,
}

impl FilterChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ckf" => Some(FilterChoice::Ckf),
            "svdckf" => Some(FilterChoice::Svdckf),
            "both" => Some(FilterChoice::Both),
            _ => None,
        }
    }
}

/// Everything a run needs: the scenario plus estimator settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub filter_choice: FilterChoice,
    pub ahrs: AhrsConfig<f64>,
    /// Static-profile attitude, applied when `profile = static`.
    pub static_euler: EulerAngles<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: Scenario::new(crate::sim::Profile::LowDynamic, 120.0, 100.0, 42),
            filter_choice: FilterChoice::Both,
            ahrs: AhrsConfig::default(),
            static_euler: EulerAngles::default(),
        }
    }
}

impl RunConfig {
    /// Parse from config-file text; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut profile_name = "low-dynamic".to_string();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: line_no,
                reason: "expected 'key = value'".to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let err = |reason: String| ConfigError::Parse {
                line: line_no,
                reason,
            };
            let parse_f64 = |v: &str| {
                v.parse::<f64>()
                    .map_err(|e| err(format!("'{v}' is not a number: {e}")))
            };
            let parse_triple = |v: &str| -> Result<[f64; 3], ConfigError> {
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(err(format!("'{v}' is not a comma-separated triple")));
                }
                Ok([
                    parse_f64(parts[0])?,
                    parse_f64(parts[1])?,
                    parse_f64(parts[2])?,
                ])
            };
            match key {
                "name" => cfg.scenario.name = value.to_string(),
                "profile" => {
                    profile_name = value.to_string();
                }
                "duration_s" => {
                    let v = parse_f64(value)?;
                    if v <= 0.0 {
                        return Err(err("duration must be positive".to_string()));
                    }
                    cfg.scenario.duration_s = v;
                }
                "rate_hz" => {
                    let v = parse_f64(value)?;
                    if !(10.0..=1000.0).contains(&v) {
                        return Err(err("rate must be within 10..=1000 Hz".to_string()));
                    }
                    cfg.scenario.rate_hz = v;
                }
                "seed" => {
                    cfg.scenario.seed = value
                        .parse::<u64>()
                        .map_err(|e| err(format!("'{value}' is not a seed: {e}")))?;
                }
                "static.roll_deg" => cfg.static_euler.roll = parse_f64(value)?.to_radians(),
                "static.pitch_deg" => cfg.static_euler.pitch = parse_f64(value)?.to_radians(),
                "static.yaw_deg" => cfg.static_euler.yaw = parse_f64(value)?.to_radians(),
                "noise.gyro_white" => cfg.scenario.noise.gyro_white = parse_f64(value)?,
                "noise.drift_sigma" => cfg.scenario.noise.drift_sigma = parse_f64(value)?,
                "noise.drift_tau" => cfg.scenario.noise.drift_tau = parse_f64(value)?,
                "noise.drift_init" => cfg.scenario.noise.drift_init = parse_triple(value)?,
                "noise.gyro_bias" => cfg.scenario.noise.gyro_bias = parse_triple(value)?,
                "noise.accel" => cfg.scenario.noise.accel = parse_f64(value)?,
                "noise.mag" => cfg.scenario.noise.mag = parse_f64(value)?,
                "noise.mag_inclination_deg" => {
                    cfg.scenario.noise.mag_inclination = parse_f64(value)?.to_radians();
                }
                "noise.mag_declination_deg" => {
                    cfg.scenario.noise.mag_declination = parse_f64(value)?.to_radians();
                }
                "gate.alpha" => cfg.ahrs.gate.accel_tolerance = parse_f64(value)?,
                "gate.mag_band" => {
                    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                    if parts.len() != 2 {
                        return Err(err("expected 'min,max'".to_string()));
                    }
                    let band = (parse_f64(parts[0])?, parse_f64(parts[1])?);
                    if !(band.0 > 0.0 && band.0 < band.1) {
                        return Err(err("band must satisfy 0 < min < max".to_string()));
                    }
                    cfg.ahrs.gate.mag_norm_band = band;
                }
                "filter.method" => {
                    cfg.filter_choice = FilterChoice::parse(value)
                        .ok_or_else(|| err(format!("'{value}' is not ckf|svdckf|both")))?;
                }
                "filter.r_roll_deg" => cfg.ahrs.r_std[0] = parse_f64(value)?.to_radians(),
                "filter.r_pitch_deg" => cfg.ahrs.r_std[1] = parse_f64(value)?.to_radians(),
                "filter.r_yaw_deg" => cfg.ahrs.r_std[2] = parse_f64(value)?.to_radians(),
                "filter.tau" => cfg.ahrs.tau_g = parse_f64(value)?,
                "filter.sigma_gyro_white" => cfg.ahrs.sigma_gyro_white = parse_f64(value)?,
                "filter.sigma_drift" => cfg.ahrs.sigma_drift = parse_f64(value)?,
                "filter.gimbal_guard_deg" => {
                    cfg.ahrs.gimbal_guard = parse_f64(value)?.to_radians();
                }
                "filter.init_window" => {
                    cfg.ahrs.init_window = value
                        .parse::<usize>()
                        .map_err(|e| err(format!("'{value}': {e}")))?;
                }
                "filter.decimation" => {
                    let v = value
                        .parse::<u64>()
                        .map_err(|e| err(format!("'{value}': {e}")))?;
                    if v == 0 {
                        return Err(err("decimation must be at least 1".to_string()));
                    }
                    cfg.ahrs.decimation = v;
                }
                "filter.p0_attitude" => cfg.ahrs.p0_attitude = parse_f64(value)?,
                "filter.p0_drift" => cfg.ahrs.p0_drift = parse_f64(value)?,
                other => {
                    return Err(err(format!("unknown key '{other}'")));
                }
            }
        }
        cfg.scenario.profile = match profile_name.as_str() {
            "static" => Profile::Static {
                euler: cfg.static_euler,
            },
            "low-dynamic" => Profile::LowDynamic,
            "high-dynamic" => Profile::HighDynamic,
            other => {
                return Err(ConfigError::Parse {
                    line: 0,
                    reason: format!("unknown profile '{other}'"),
                });
            }
        };
        if cfg.scenario.name.is_empty() {
            cfg.scenario.name = cfg.scenario.profile.name().to_string();
        } else if cfg.scenario.name == "low-dynamic" {
            cfg.scenario.name = cfg.scenario.profile.name().to_string();
        }
        Ok(cfg)
    }

    /// Parse a config file from disk.
    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// The nominal dt implied by the scenario rate, wired into the
    /// estimator's first-sample fallback.
    pub fn ahrs_config(&self) -> AhrsConfig<f64> {
        AhrsConfig {
            nominal_dt: 1.0 / self.scenario.rate_hz,
            ..self.ahrs
        }
    }

    pub fn gate(&self) -> GateConfig<f64> {
        self.ahrs.gate
    }
}

/// The documented default configuration, suitable for `init-config`.
pub fn default_config_text() -> String {
    let d = NoiseConfig::default();
    format!(
        "\
# Run configuration: one 'key = value' per line, '#' starts a comment.

# Scenario ------------------------------------------------------------
# profile: static | low-dynamic | high-dynamic
profile = low-dynamic
duration_s = 120
rate_hz = 100
seed = 42

# Attitude held by the static profile (ignored otherwise).
static.roll_deg = 0
static.pitch_deg = 0
static.yaw_deg = 0

# Sensor noise ---------------------------------------------------------
# Gyro white noise std, rad/s.
noise.gyro_white = {gyro_white}
# Markov drift driving noise density, rad/s/sqrt(s).
noise.drift_sigma = {drift_sigma}
# Markov drift correlation time, s.
noise.drift_tau = {drift_tau}
# Initial (turn-on) drift per axis, rad/s; decays with drift_tau.
noise.drift_init = {di0},{di1},{di2}
# Constant additive gyro bias per axis, rad/s; never decays.
noise.gyro_bias = 0,0,0
# Accelerometer noise std, m/s^2.
noise.accel = {accel}
# Magnetometer noise std, normalized units.
noise.mag = {mag}
# Magnetic field inclination (dip) and declination, degrees.
noise.mag_inclination_deg = 60
noise.mag_declination_deg = 0

# Observation gates ------------------------------------------------------
# Tolerated deviation of |accel| from gravity, m/s^2.
gate.alpha = 0.5
# Acceptable magnetometer magnitude band.
gate.mag_band = 0.5,1.5

# Filter -----------------------------------------------------------------
# method: ckf | svdckf | both
filter.method = both
# Observation noise std per angle, degrees.
filter.r_roll_deg = 1.0
filter.r_pitch_deg = 1.0
filter.r_yaw_deg = 2.0
# Drift model mirrored inside the filter.
filter.tau = 300
filter.sigma_gyro_white = 0.005
filter.sigma_drift = 1e-4
# Updates are skipped when estimated |pitch| exceeds this, degrees.
filter.gimbal_guard_deg = 85
# Samples averaged by static initialization.
filter.init_window = 100
# Run the measurement update every k-th sample.
filter.decimation = 1
# Initial covariance diagonals.
filter.p0_attitude = 4e-4
filter.p0_drift = 4e-4
",
        gyro_white = d.gyro_white,
        drift_sigma = d.drift_sigma,
        drift_tau = d.drift_tau,
        di0 = d.drift_init[0],
        di1 = d.drift_init[1],
        di2 = d.drift_init[2],
        accel = d.accel,
        mag = d.mag,
    )
}
