//! RMSE computation and the CKF-vs-SVDCKF comparison harness.
//!
//! A comparison feeds one immutable sample stream to every requested filter
//! (plus an open-loop gyro-integration baseline), each on its own thread,
//! and assembles per-axis attitude RMSE in degrees. One filter's failure —
//! which only the Cholesky path can produce — never aborts the others; the
//! failed run is reported with the step at which it died.
//!
//! Report rendering is deliberately timing-free so that repeated runs under
//! the same seed produce byte-identical artifacts; runtimes are returned
//! alongside for display on the terminal.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::ahrs::{init_static, AhrsError, AhrsEstimator, AhrsState, AttitudeEstimate, STATE_DIM};
use crate::attitude::{wrap_angle, EulerAngles};
use crate::config::{FilterChoice, RunConfig};
use crate::linalg::FactorizationMethod;
use crate::sensors::ImuSample;
use crate::sim::{gen_trajectory, synthesize, Scenario, SensorLog};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("estimate and truth series are not time-aligned")]
    Misaligned,
    #[error("not enough samples: {got}, need more than {need}")]
    NotEnoughSamples { got: usize, need: usize },
    #[error("initialization failed: {0}")]
    Init(#[from] AhrsError),
}

/// A timestamped Euler triple, the unit of RMSE computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedAngles {
    pub t: f64,
    pub angles: EulerAngles<f64>,
}

/// Per-axis RMSE in degrees over time-aligned series.
///
/// Differences are wrapped to `(-π, π]` before squaring, so a truth yaw of
/// 359° against an estimate of 1° scores 2°, and adding 2π to either series
/// changes nothing.
pub fn rmse(estimates: &[TimedAngles], truth: &[TimedAngles]) -> Result<[f64; 3], EvalError> {
    if estimates.len() != truth.len() || estimates.is_empty() {
        return Err(EvalError::Misaligned);
    }
    let mut acc = [0.0f64; 3];
    for (e, t) in estimates.iter().zip(truth) {
        if e.t != t.t {
            return Err(EvalError::Misaligned);
        }
        let diffs = [
            wrap_angle(e.angles.roll - t.angles.roll),
            wrap_angle(e.angles.pitch - t.angles.pitch),
            wrap_angle(e.angles.yaw - t.angles.yaw),
        ];
        for i in 0..3 {
            acc[i] += diffs[i] * diffs[i];
        }
    }
    let n = estimates.len() as f64;
    Ok([
        (acc[0] / n).sqrt().to_degrees(),
        (acc[1] / n).sqrt().to_degrees(),
        (acc[2] / n).sqrt().to_degrees(),
    ])
}

/// What a comparison consumes: a synthetic scenario or a replayed log.
#[derive(Debug, Clone)]
pub enum CompareInput {
    Scenario(Scenario),
    Log(SensorLog),
}

/// Comparison options beyond the run configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompareOptions {
    /// Zero out one covariance eigen-direction right before this evaluated
    /// step, demonstrating the factorization failure mode.
    pub inject_rank_deficiency: Option<u64>,
}

/// One filter's trace through the comparison.
#[derive(Debug, Clone)]
pub struct FilterRun {
    pub label: String,
    /// `None` marks the open-loop baseline.
    pub method: Option<FactorizationMethod>,
    /// Estimates for evaluated samples, a prefix when the run failed.
    pub estimates: Vec<AttitudeEstimate<f64>>,
    pub failed_at_step: Option<u64>,
    pub error: Option<String>,
    pub runtime: Duration,
    pub rmse_deg: Option<[f64; 3]>,
    pub updates_applied: usize,
}

/// Assembled comparison result.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub scenario_name: String,
    /// Timestamps of the evaluated samples (after the init window).
    pub times: Vec<f64>,
    /// Truth aligned with `times`, when available.
    pub truth: Option<Vec<EulerAngles<f64>>>,
    pub runs: Vec<FilterRun>,
}

fn run_one(
    label: &str,
    method: Option<FactorizationMethod>,
    cfg: &RunConfig,
    init: AhrsState<f64>,
    samples: &[ImuSample<f64>],
    start_t: Option<f64>,
    inject_at: Option<u64>,
) -> FilterRun {
    let filter_method = method.unwrap_or(FactorizationMethod::Svd);
    let mut est = AhrsEstimator::new(cfg.ahrs_config(), init, filter_method);
    if let Some(t0) = start_t {
        // Anchor the time base at the last init sample so the first
        // evaluated dt is the true sample period.
        let _ = est.step_predict_only(&ImuSample {
            t: t0,
            gyro: [0.0; 3],
            accel: [0.0; 3],
            mag: [0.0; 3],
        });
    }
    let started = Instant::now();
    let mut estimates = Vec::with_capacity(samples.len());
    let mut failed_at_step = None;
    let mut error = None;
    let mut updates_applied = 0usize;
    for (k, s) in samples.iter().enumerate() {
        if method.is_some() && inject_at == Some(k as u64) {
            let state = est.filter_mut().state_mut();
            for i in 0..STATE_DIM {
                state.p[(STATE_DIM - 1, i)] = 0.0;
                state.p[(i, STATE_DIM - 1)] = 0.0;
            }
        }
        let result = if method.is_some() {
            est.step(s)
        } else {
            est.step_predict_only(s)
        };
        match result {
            Ok(e) => {
                if e.updated {
                    updates_applied += 1;
                }
                estimates.push(e);
            }
            Err(err) => {
                failed_at_step = Some(k as u64);
                error = Some(err.to_string());
                break;
            }
        }
    }
    let runtime = started.elapsed();
    FilterRun {
        label: label.to_string(),
        method,
        estimates,
        failed_at_step,
        error,
        runtime,
        rmse_deg: None,
        updates_applied,
    }
}

/// Run every requested filter over the identical input stream and compute
/// per-axis RMSE against truth where available.
pub fn compare(
    input: &CompareInput,
    cfg: &RunConfig,
    opts: &CompareOptions,
) -> Result<Comparison, EvalError> {
    let (name, samples, truth): (String, Vec<ImuSample<f64>>, Option<Vec<EulerAngles<f64>>>) =
        match input {
            CompareInput::Scenario(sc) => {
                let truth_series = gen_trajectory(sc);
                let samples = synthesize(&truth_series, &sc.noise, sc.seed);
                let truth = truth_series.iter().map(|s| s.euler).collect();
                (sc.name.clone(), samples, Some(truth))
            }
            CompareInput::Log(log) => (
                "replay".to_string(),
                log.samples.clone(),
                log.truth.clone(),
            ),
        };

    let window = cfg.ahrs.init_window.max(1);
    if samples.len() <= window + 1 {
        return Err(EvalError::NotEnoughSamples {
            got: samples.len(),
            need: window + 1,
        });
    }
    let init = init_static(&samples[..window], &cfg.gate())?;
    let eval_samples = &samples[window..];
    let start_t = Some(samples[window - 1].t);
    let times: Vec<f64> = eval_samples.iter().map(|s| s.t).collect();
    let eval_truth = truth.map(|t| t[window..].to_vec());

    let mut plan: Vec<(&str, Option<FactorizationMethod>)> = vec![("gyro-only", None)];
    match cfg.filter_choice {
        FilterChoice::Ckf => plan.push(("ckf", Some(FactorizationMethod::Cholesky))),
        FilterChoice::Svdckf => plan.push(("svdckf", Some(FactorizationMethod::Svd))),
        FilterChoice::Both => {
            plan.push(("ckf", Some(FactorizationMethod::Cholesky)));
            plan.push(("svdckf", Some(FactorizationMethod::Svd)));
        }
    }

    let mut runs: Vec<FilterRun> = std::thread::scope(|scope| {
        let handles: Vec<_> = plan
            .iter()
            .map(|(label, method)| {
                let init = init;
                scope.spawn(move || {
                    run_one(
                        label,
                        *method,
                        cfg,
                        init,
                        eval_samples,
                        start_t,
                        opts.inject_rank_deficiency,
                    )
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("filter thread panicked"))
            .collect()
    });

    if let Some(truth) = &eval_truth {
        for run in &mut runs {
            if run.failed_at_step.is_some() {
                continue;
            }
            let est_series: Vec<TimedAngles> = run
                .estimates
                .iter()
                .map(|e| TimedAngles {
                    t: e.t,
                    angles: e.euler,
                })
                .collect();
            let truth_series: Vec<TimedAngles> = times
                .iter()
                .zip(truth)
                .map(|(&t, &angles)| TimedAngles { t, angles })
                .collect();
            run.rmse_deg = Some(rmse(&est_series, &truth_series)?);
        }
    }

    Ok(Comparison {
        scenario_name: name,
        times,
        truth: eval_truth,
        runs,
    })
}

/// Aligned plain-text RMSE table; timing-free so outputs are reproducible.
pub fn render_report_table(cmp: &Comparison) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario: {}\n", cmp.scenario_name));
    out.push_str(&format!("samples evaluated: {}\n", cmp.times.len()));
    out.push_str(&format!(
        "{:<12}{:>12}{:>12}{:>12}{:>10}\n",
        "filter", "RMSE_roll", "RMSE_pitch", "RMSE_yaw", "updates"
    ));
    for run in &cmp.runs {
        match (&run.rmse_deg, run.failed_at_step) {
            (_, Some(step)) => {
                out.push_str(&format!("{:<12}FAILED at step {}\n", run.label, step));
            }
            (Some(r), None) => {
                out.push_str(&format!(
                    "{:<12}{:>12.4}{:>12.4}{:>12.4}{:>10}\n",
                    run.label, r[0], r[1], r[2], run.updates_applied
                ));
            }
            (None, None) => {
                out.push_str(&format!(
                    "{:<12}{:>12}{:>12}{:>12}{:>10}\n",
                    run.label, "-", "-", "-", run.updates_applied
                ));
            }
        }
    }
    out
}

/// Machine-readable twin of the report table.
pub fn render_report_csv(cmp: &Comparison) -> String {
    let mut out = String::from(
        "scenario,filter,samples,rmse_roll_deg,rmse_pitch_deg,rmse_yaw_deg,updates,failed_at_step\n",
    );
    for run in &cmp.runs {
        let (r0, r1, r2) = match run.rmse_deg {
            Some(r) => (
                format!("{:.4}", r[0]),
                format!("{:.4}", r[1]),
                format!("{:.4}", r[2]),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        let failed = run
            .failed_at_step
            .map(|s| s.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            cmp.scenario_name,
            run.label,
            cmp.times.len(),
            r0,
            r1,
            r2,
            run.updates_applied,
            failed
        ));
    }
    out
}

/// Per-sample plot data: time, truth angles, every run's angles and update
/// flag. Angles in degrees; cells are empty after a run's failure point.
pub fn render_plot_csv(cmp: &Comparison) -> String {
    let mut header = String::from("t,truth_roll,truth_pitch,truth_yaw");
    for run in &cmp.runs {
        header.push_str(&format!(
            ",{l}_roll,{l}_pitch,{l}_yaw,{l}_updated",
            l = run.label
        ));
    }
    let mut out = header;
    out.push('\n');
    for (i, &t) in cmp.times.iter().enumerate() {
        out.push_str(&format!("{t:.6}"));
        match &cmp.truth {
            Some(truth) => {
                let e = truth[i];
                out.push_str(&format!(
                    ",{:.6},{:.6},{:.6}",
                    e.roll.to_degrees(),
                    e.pitch.to_degrees(),
                    e.yaw.to_degrees()
                ));
            }
            None => out.push_str(",,,"),
        }
        for run in &cmp.runs {
            match run.estimates.get(i) {
                Some(e) => out.push_str(&format!(
                    ",{:.6},{:.6},{:.6},{}",
                    e.euler.roll.to_degrees(),
                    e.euler.pitch.to_degrees(),
                    e.euler.yaw.to_degrees(),
                    u8::from(e.updated)
                )),
                None => out.push_str(",,,,"),
            }
        }
        out.push('\n');
    }
    out
}
