//! Third-degree cubature Kalman filter, generic over the state model and
//! the covariance factorization method.
//!
//! The spherical-radial rule places 2n equally weighted points at `±√n`
//! along the columns of a square root of the covariance. Everything else is
//! the usual sigma-point predict/correct cycle; the only difference between
//! the two filter variants is whether that square root comes from Cholesky
//! or from the eigenvalue-clamped symmetric SVD, which is what decides
//! whether a non-positive-definite covariance kills the run or not.
//!
//! Angle-valued states need two hooks beyond the textbook cycle:
//! [`StateModel::constrain`] renormalizes the quaternion block of propagated
//! points and means, and [`StateModel::wrap_innovation`] keeps angular
//! residuals on the short arc. Both default to no-ops for plain vector
//! models.

use thiserror::Error;

use crate::linalg::{
    sqrt_factor, sym_inverse, FactorizationMethod, LinalgError, MatN, MatRect, VecN,
};
use crate::scalar::Scalar;

/// Errors surfaced by a filter step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    /// Observation vector does not match the model's observation dimension.
    #[error("observation dimension {got}, model expects {want}")]
    DimensionMismatch { got: usize, want: usize },
    /// Non-finite entry in an observation.
    #[error("non-finite observation")]
    NonFiniteObservation,
}

/// The deterministic point set of the third-degree spherical-radial rule.
#[derive(Debug, Clone)]
pub struct CubatureSet<T> {
    /// 2n points `±√n·e_j` in the unit-covariance space.
    pub points: Vec<VecN<T>>,
    /// Common weight `1/(2n)`.
    pub weight: T,
}

/// Generate the cubature point set for an n-dimensional state.
pub fn cubature_points<T: Scalar>(n: usize) -> CubatureSet<T> {
    assert!(n >= 1);
    let m = 2 * n;
    let radius = T::of_usize(n).sqrt();
    let mut points = Vec::with_capacity(m);
    for j in 0..n {
        let mut p = VecN::zeros(n);
        p[j] = radius;
        points.push(p);
    }
    for j in 0..n {
        let mut p = VecN::zeros(n);
        p[j] = -radius;
        points.push(p);
    }
    CubatureSet {
        points,
        weight: T::of_usize(m).recip(),
    }
}

/// Filter mean and covariance plus a step counter.
#[derive(Debug, Clone)]
pub struct FilterState<T> {
    pub x: VecN<T>,
    pub p: MatN<T>,
    pub step: u64,
}

/// State-space model the filter is parameterized over.
pub trait StateModel<T: Scalar> {
    /// Control input type of the process function (the gyro sample for the
    /// attitude model, `()` for test models).
    type Control;

    fn state_dim(&self) -> usize;
    fn obs_dim(&self) -> usize;

    /// Deterministic process function `f(x, u, dt)`.
    fn process(&self, x: &VecN<T>, u: &Self::Control, dt: T) -> VecN<T>;

    /// Measurement function `h(x)`.
    fn measure(&self, x: &VecN<T>) -> VecN<T>;

    /// Process noise `Q_k`, evaluated at the pre-prediction state.
    fn process_noise(&self, x: &VecN<T>, dt: T) -> MatN<T>;

    /// Observation noise `R_k`.
    fn measurement_noise(&self) -> MatN<T>;

    /// Re-impose state constraints (quaternion renormalization) on a
    /// propagated point or mean.
    fn constrain(&self, _x: &mut VecN<T>) {}

    /// Wrap angular components of an observation-space residual onto the
    /// short arc.
    fn wrap_innovation(&self, _nu: &mut VecN<T>) {}
}

/// A cubature Kalman filter instance bound to one model and one
/// factorization method.
#[derive(Debug, Clone)]
pub struct CubatureKalmanFilter<T, M> {
    pub model: M,
    pub method: FactorizationMethod,
    state: FilterState<T>,
}

impl<T: Scalar, M: StateModel<T>> CubatureKalmanFilter<T, M> {
    pub fn new(model: M, x0: VecN<T>, p0: MatN<T>, method: FactorizationMethod) -> Self {
        assert_eq!(x0.dim(), model.state_dim());
        assert_eq!(p0.dim(), model.state_dim());
        CubatureKalmanFilter {
            model,
            method,
            state: FilterState {
                x: x0,
                p: p0.symmetrized(),
                step: 0,
            },
        }
    }

    pub fn state(&self) -> &FilterState<T> {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut FilterState<T> {
        &mut self.state
    }

    /// Generate the sigma points `x̂ ± √n · column_j(factor)`.
    fn sigma_points(&self) -> Result<Vec<VecN<T>>, FilterError> {
        let n = self.model.state_dim();
        let factor = sqrt_factor(&self.state.p.symmetrized(), self.method)?;
        let radius = T::of_usize(n).sqrt();
        let mut points = Vec::with_capacity(2 * n);
        for j in 0..n {
            points.push(&self.state.x + &factor.factor.col(j).scaled(radius));
        }
        for j in 0..n {
            points.push(&self.state.x - &factor.factor.col(j).scaled(radius));
        }
        Ok(points)
    }

    /// Time update: propagate the point set through the process function and
    /// re-assemble mean and covariance plus process noise.
    ///
    /// On the Cholesky path this propagates `FactorizationFailed` whenever
    /// the covariance has lost positive definiteness; the SVD path cannot
    /// fail that way.
    pub fn predict(&mut self, u: &M::Control, dt: T) -> Result<(), FilterError> {
        let n = self.model.state_dim();
        let m = 2 * n;
        let weight = T::of_usize(m).recip();

        let q = self.model.process_noise(&self.state.x, dt);
        let mut propagated = self.sigma_points()?;
        for p in propagated.iter_mut() {
            let mut next = self.model.process(p, u, dt);
            self.model.constrain(&mut next);
            *p = next;
        }

        let mut mean = VecN::zeros(n);
        for p in &propagated {
            for i in 0..n {
                mean[i] = mean[i] + p[i];
            }
        }
        for i in 0..n {
            mean[i] = mean[i] * weight;
        }

        // Deviation form of the covariance sum; algebraically identical to
        // the raw second-moment form but immune to cancellation.
        let mut cov = q;
        for p in &propagated {
            let d = p - &mean;
            cov.add_scaled_outer(&d, &d, weight);
        }

        self.model.constrain(&mut mean);
        self.state.x = mean;
        self.state.p = cov.symmetrized();
        self.state.step += 1;
        Ok(())
    }

    /// Measurement update; returns the wrapped innovation that was applied.
    pub fn update(&mut self, z: &VecN<T>) -> Result<VecN<T>, FilterError> {
        let n = self.model.state_dim();
        let d = self.model.obs_dim();
        if z.dim() != d {
            return Err(FilterError::DimensionMismatch {
                got: z.dim(),
                want: d,
            });
        }
        if !z.is_finite() {
            return Err(FilterError::NonFiniteObservation);
        }
        let m = 2 * n;
        let weight = T::of_usize(m).recip();

        let points = self.sigma_points()?;
        let mut observed: Vec<VecN<T>> = Vec::with_capacity(m);
        for p in &points {
            let mut constrained = p.clone();
            self.model.constrain(&mut constrained);
            observed.push(self.model.measure(&constrained));
        }

        // Re-branch angular observations around the first point so that a
        // point cloud straddling the 0/2π seam averages on one branch.
        let reference = observed[0].clone();
        for zi in observed.iter_mut().skip(1) {
            let mut delta = &*zi - &reference;
            self.model.wrap_innovation(&mut delta);
            *zi = &reference + &delta;
        }

        let mut z_mean = VecN::zeros(d);
        for zi in &observed {
            for i in 0..d {
                z_mean[i] = z_mean[i] + zi[i];
            }
        }
        for i in 0..d {
            z_mean[i] = z_mean[i] * weight;
        }

        let mut p_zz = self.model.measurement_noise();
        assert_eq!(p_zz.dim(), d);
        let mut p_xz = MatRect::zeros(n, d);
        for (p, zi) in points.iter().zip(&observed) {
            let dz = zi - &z_mean;
            p_zz.add_scaled_outer(&dz, &dz, weight);
            let dx = p - &self.state.x;
            p_xz.add_scaled_outer(&dx, &dz, weight);
        }

        let p_zz_inv = sym_inverse(&p_zz.symmetrized())?;
        let gain = p_xz.mul_square(&p_zz_inv);

        let mut innovation = z - &z_mean;
        self.model.wrap_innovation(&mut innovation);

        let correction = gain.mul_vec(&innovation);
        let mut x_new = &self.state.x + &correction;
        self.model.constrain(&mut x_new);

        let p_new = &self.state.p - &gain.sandwich(&p_zz);

        self.state.x = x_new;
        self.state.p = p_new.symmetrized();
        Ok(innovation)
    }
}
