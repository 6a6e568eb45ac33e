//! Quaternion attitude kinematics.
//!
//! Conventions, fixed once for the whole crate:
//!
//! - Navigation frame is NED (north-east-down), body frame is FRD
//!   (front-right-down). Gravity in the navigation frame is `[0, 0, +g]`, so
//!   a resting accelerometer reads `[0, 0, -g]` specific force.
//! - Quaternions are scalar-first `(w, x, y, z)` and unit norm. The stored
//!   quaternion rotates body-frame vectors into the navigation frame via
//!   [`Quaternion::rotate`]; [`Quaternion::rotate_to_body`] is the inverse
//!   map used to express navigation-frame quantities in body axes.
//! - Euler angles follow the aerospace Z-Y-X (yaw, pitch, roll) sequence with
//!   roll in `(-π, π]`, pitch in `[-π/2, π/2]`, yaw in `[0, 2π)`.

use crate::linalg::vec3;
use crate::scalar::Scalar;

/// Rotation-vector magnitude below which the sine ratio switches to its
/// two-term Taylor expansion.
const SMALL_ANGLE: f64 = 1e-8;

/// Pitch distance from ±π/2 under which Euler extraction uses the
/// gimbal-lock convention (roll reported as zero, yaw absorbs the free
/// angle).
const GIMBAL_EPS: f64 = 1e-6;

/// Unit rotation quaternion, scalar-first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

/// Angular increment `ω·dt` in radians; magnitude must stay below π, which
/// the sampling-rate precondition of the mechanization guarantees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationVector<T>(pub [T; 3]);

/// Z-Y-X Euler angle triple in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles<T> {
    pub roll: T,
    pub pitch: T,
    pub yaw: T,
}

impl<T: Scalar> EulerAngles<T> {
    pub fn new(roll: T, pitch: T, yaw: T) -> Self {
        EulerAngles { roll, pitch, yaw }
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.roll, self.pitch, self.yaw]
    }
}

/// Wrap an angle to `(-π, π]`.
pub fn wrap_angle<T: Scalar>(a: T) -> T {
    let two_pi = T::of(2.0) * T::PI();
    let mut v = a % two_pi;
    if v > T::PI() {
        v = v - two_pi;
    } else if v <= -T::PI() {
        v = v + two_pi;
    }
    v
}

/// Wrap an angle to `[0, 2π)`.
pub fn wrap_to_2pi<T: Scalar>(a: T) -> T {
    let two_pi = T::of(2.0) * T::PI();
    let mut v = a % two_pi;
    if v < T::zero() {
        v = v + two_pi;
    }
    // `-1e-20 % 2π` rounds to 2π itself; fold that back to zero.
    if v >= two_pi {
        v = v - two_pi;
    }
    v
}

impl<T: Scalar> Quaternion<T> {
    pub fn identity() -> Self {
        Quaternion {
            w: T::one(),
            x: T::zero(),
            y: T::zero(),
            z: T::zero(),
        }
    }

    /// Build from raw components, normalizing and canonicalizing the sign.
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Quaternion { w, x, y, z }.normalized().canonical()
    }

    /// Build from raw components without normalization; callers must uphold
    /// the unit-norm invariant themselves.
    pub fn from_components(w: T, x: T, y: T, z: T) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn norm(&self) -> T {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == T::zero() {
            return Self::identity();
        }
        Quaternion {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    /// Canonical sign: `w >= 0`, so that `q` and `-q` (the same rotation)
    /// compare equal after canonicalization.
    pub fn canonical(&self) -> Self {
        if self.w < T::zero() {
            Quaternion {
                w: -self.w,
                x: -self.x,
                y: -self.y,
                z: -self.z,
            }
        } else {
            *self
        }
    }

    pub fn conjugate(&self) -> Self {
        Quaternion {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn dot(&self, other: &Self) -> T {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Hamilton product, renormalized and sign-canonicalized.
    pub fn mul(&self, rhs: &Self) -> Self {
        self.mul_continuous(rhs).canonical()
    }

    /// Hamilton product, renormalized but *not* sign-canonicalized.
    ///
    /// The filter mechanization composes with this variant: a canonical sign
    /// flip mid-run would negate the quaternion block of the state vector
    /// while the covariance cross terms kept their old sign.
    pub fn mul_continuous(&self, rhs: &Self) -> Self {
        let (w1, x1, y1, z1) = (self.w, self.x, self.y, self.z);
        let (w2, x2, y2, z2) = (rhs.w, rhs.x, rhs.y, rhs.z);
        Quaternion {
            w: w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            x: w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            y: w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            z: w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        }
        .normalized()
    }

    /// Rotate a body-frame vector into the navigation frame (`v' = q v q*`).
    pub fn rotate(&self, v: [T; 3]) -> [T; 3] {
        // q v q* expanded via the double-cross-product form.
        let qv = [self.x, self.y, self.z];
        let t = vec3::scale(vec3::cross(qv, v), T::of(2.0));
        vec3::add(v, vec3::add(vec3::scale(t, self.w), vec3::cross(qv, t)))
    }

    /// Express a navigation-frame vector in body axes (`v' = q* v q`).
    pub fn rotate_to_body(&self, v: [T; 3]) -> [T; 3] {
        self.conjugate().rotate(v)
    }

    /// Z-Y-X Euler extraction; yaw is mapped to `[0, 2π)`.
    pub fn to_euler(&self) -> EulerAngles<T> {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        let two = T::of(2.0);
        let sin_pitch = (two * (w * y - x * z)).max(-T::one()).min(T::one());
        let pitch = sin_pitch.asin();
        let half_pi = T::of(0.5) * T::PI();
        if half_pi - pitch.abs() < T::of(GIMBAL_EPS) {
            // Gimbal lock: roll and yaw are degenerate; report roll as zero
            // and let yaw absorb the free angle.
            let yaw = wrap_to_2pi(two * z.atan2(w));
            return EulerAngles {
                roll: T::zero(),
                pitch: if sin_pitch >= T::zero() { half_pi } else { -half_pi },
                yaw,
            };
        }
        let roll = (two * (w * x + y * z)).atan2(T::one() - two * (x * x + y * y));
        let yaw_raw = (two * (w * z + x * y)).atan2(T::one() - two * (y * y + z * z));
        EulerAngles {
            roll,
            pitch,
            yaw: wrap_to_2pi(yaw_raw),
        }
    }

    /// Inverse of [`Quaternion::to_euler`]: compose yaw, pitch, roll.
    pub fn from_euler(e: &EulerAngles<T>) -> Self {
        let half = T::of(0.5);
        let (sr, cr) = (e.roll * half).sin_cos();
        let (sp, cp) = (e.pitch * half).sin_cos();
        let (sy, cy) = (e.yaw * half).sin_cos();
        Quaternion {
            w: cy * cp * cr + sy * sp * sr,
            x: cy * cp * sr - sy * sp * cr,
            y: cy * sp * cr + sy * cp * sr,
            z: sy * cp * cr - cy * sp * sr,
        }
        .normalized()
        .canonical()
    }

    /// Delta quaternion for an angular increment.
    ///
    /// For magnitudes below the small-angle threshold the `sin(Δ/2)/Δ` ratio
    /// is evaluated by its two-term Taylor expansion `1/2 - Δ²/48`.
    pub fn from_rotation_vector(phi: &RotationVector<T>) -> Self {
        let v = phi.0;
        let angle = vec3::norm(v);
        debug_assert!(angle < T::PI(), "rotation increment must stay below pi");
        let half = T::of(0.5);
        let ratio = if angle < T::of(SMALL_ANGLE) {
            half - angle * angle / T::of(48.0)
        } else {
            (angle * half).sin() / angle
        };
        Quaternion {
            w: (angle * half).cos(),
            x: v[0] * ratio,
            y: v[1] * ratio,
            z: v[2] * ratio,
        }
        .normalized()
        .canonical()
    }

    /// Rotation vector (log map) of the quaternion; inverse of
    /// [`Quaternion::from_rotation_vector`] on magnitudes below π.
    pub fn to_rotation_vector(&self) -> RotationVector<T> {
        let q = self.canonical();
        let qv = [q.x, q.y, q.z];
        let s = vec3::norm(qv);
        let factor = if s < T::of(SMALL_ANGLE) {
            // angle/sin(angle/2) ≈ 2 + s²/3 for small s
            T::of(2.0) + s * s / T::of(3.0)
        } else {
            let angle = T::of(2.0) * s.atan2(q.w);
            angle / s
        };
        RotationVector(vec3::scale(qv, factor))
    }

    /// Angular distance to another rotation, insensitive to the sign
    /// ambiguity of the double cover.
    pub fn angle_to(&self, other: &Self) -> T {
        let d = self.dot(other).abs().min(T::one());
        T::of(2.0) * d.acos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn rotvec_zero_is_identity() {
        let q = Quaternion::from_rotation_vector(&RotationVector([0.0, 0.0, 0.0]));
        assert_eq!(q, Quaternion::identity());
    }

    #[test]
    fn rotvec_quarter_turn_about_x() {
        let q = Quaternion::from_rotation_vector(&RotationVector([FRAC_PI_2, 0.0, 0.0]));
        assert_close(q.w, FRAC_PI_4.cos(), 1e-15);
        assert_close(q.x, FRAC_PI_4.sin(), 1e-15);
        assert_close(q.y, 0.0, 1e-15);
        assert_close(q.z, 0.0, 1e-15);
    }

    #[test]
    fn rotvec_tiny_angle_taylor_branch() {
        let q = Quaternion::from_rotation_vector(&RotationVector([1e-12, 0.0, 0.0]));
        assert_close(q.w, 1.0, 1e-15);
        assert!((q.x - 5e-13).abs() < 1e-27);
        assert_close(q.norm(), 1.0, 1e-15);
    }

    #[test]
    fn taylor_branch_continuous_at_threshold() {
        // Evaluate both branches just around the switch point.
        let a = 1e-8;
        let exact = (a / 2.0f64).sin() / a;
        let taylor = 0.5 - a * a / 48.0;
        assert!((exact - taylor).abs() < 1e-12);
    }

    #[test]
    fn quat_mul_identity() {
        let a = Quaternion::from_euler(&EulerAngles::new(0.4, -0.2, 1.3));
        let r = a.mul(&Quaternion::identity());
        assert!(a.angle_to(&r) < 1e-12);
    }

    #[test]
    fn quat_mul_two_quarter_turns() {
        let h = Quaternion::from_components(FRAC_PI_4.cos(), FRAC_PI_4.sin(), 0.0, 0.0);
        let r = h.mul(&h);
        assert_close(r.w, 0.0, 1e-15);
        assert_close(r.x, 1.0, 1e-15);
        assert_close(r.y, 0.0, 1e-15);
        assert_close(r.z, 0.0, 1e-15);
    }

    #[test]
    fn quat_mul_inverse_gives_identity() {
        let a = Quaternion::from_euler(&EulerAngles::new(0.7, 0.3, 2.5));
        let r = a.mul(&a.conjugate());
        assert!(r.angle_to(&Quaternion::identity()) < 1e-12);
    }

    #[test]
    fn euler_identity() {
        let e = Quaternion::<f64>::identity().to_euler();
        assert_close(e.roll, 0.0, 1e-15);
        assert_close(e.pitch, 0.0, 1e-15);
        assert_close(e.yaw, 0.0, 1e-15);
    }

    #[test]
    fn euler_round_trip_fixed_case() {
        let e0 = EulerAngles::new(0.3, -0.2, 1.0);
        let e1 = Quaternion::from_euler(&e0).to_euler();
        assert_close(e1.roll, 0.3, 1e-12);
        assert_close(e1.pitch, -0.2, 1e-12);
        assert_close(e1.yaw, 1.0, 1e-12);
    }

    #[test]
    fn euler_gimbal_convention() {
        let q = Quaternion::from_euler(&EulerAngles::new(0.4, FRAC_PI_2, 1.2));
        let e = q.to_euler();
        assert_close(e.pitch, FRAC_PI_2, 1e-9);
        assert_close(e.roll, 0.0, 1e-12);
        // Yaw absorbs the free angle: yaw - roll is the invariant at +π/2.
        assert_close(e.yaw, wrap_to_2pi(1.2 - 0.4), 1e-9);
    }

    #[test]
    fn euler_round_trip_seeded() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..200 {
            let e0 = EulerAngles::new(
                rng.random_range(-PI + 1e-3..PI),
                rng.random_range(-FRAC_PI_2 + 1e-3..FRAC_PI_2 - 1e-3),
                rng.random_range(0.0..2.0 * PI),
            );
            let e1 = Quaternion::from_euler(&e0).to_euler();
            assert_close(e1.roll, e0.roll, 1e-9);
            assert_close(e1.pitch, e0.pitch, 1e-9);
            let dyaw = wrap_angle(e1.yaw - e0.yaw);
            assert!(dyaw.abs() < 1e-9);
        }
    }

    #[test]
    fn rotate_identity_and_z_quarter_turn() {
        let v = [1.0, 0.0, 0.0];
        let r = Quaternion::<f64>::identity().rotate(v);
        assert_close(r[0], 1.0, 1e-15);

        let q = Quaternion::from_euler(&EulerAngles::new(0.0, 0.0, FRAC_PI_2));
        let r = q.rotate(v);
        assert_close(r[0], 0.0, 1e-15);
        assert_close(r[1], 1.0, 1e-15);
        assert_close(r[2], 0.0, 1e-15);
    }

    #[test]
    fn rotate_matches_matrix_form() {
        // Independent rotation-matrix oracle built from the Euler angles.
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..50 {
            let (roll, pitch, yaw) = (
                rng.random_range(-3.0..3.0),
                rng.random_range(-1.5..1.5),
                rng.random_range(0.0..6.28),
            );
            let (sr, cr) = (roll as f64).sin_cos();
            let (sp, cp) = (pitch as f64).sin_cos();
            let (sy, cy) = (yaw as f64).sin_cos();
            // Active Z-Y-X rotation matrix (body-to-nav).
            let m = [
                [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
                [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
                [-sp, cp * sr, cp * cr],
            ];
            let v = [
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ];
            let expected = [
                m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
                m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
                m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
            ];
            let q = Quaternion::from_euler(&EulerAngles::new(roll, pitch, yaw));
            let got = q.rotate(v);
            for i in 0..3 {
                assert_close(got[i], expected[i], 1e-12);
            }
        }
    }

    #[test]
    fn rotate_preserves_norm() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..100 {
            let q = Quaternion::from_euler(&EulerAngles::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-1.5..1.5),
                rng.random_range(0.0..6.28),
            ));
            let v = [
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            ];
            let r = q.rotate(v);
            assert_close(vec3::norm(r), vec3::norm(v), 1e-12);
        }
    }

    #[test]
    fn norm_preserved_over_many_operations() {
        let mut rng = StdRng::seed_from_u64(37);
        let mut q = Quaternion::<f64>::identity();
        for _ in 0..100_000 {
            let phi = RotationVector([
                rng.random_range(-0.01..0.01),
                rng.random_range(-0.01..0.01),
                rng.random_range(-0.01..0.01),
            ]);
            q = q.mul(&Quaternion::from_rotation_vector(&phi));
        }
        assert!((q.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn parallel_rotvec_composition() {
        let axis = [0.3, -0.5, 0.2];
        let n = vec3::norm(axis);
        let unit = vec3::scale(axis, 1.0 / n);
        let a = 0.7;
        let b = 0.4;
        let qa = Quaternion::from_rotation_vector(&RotationVector(vec3::scale(unit, a)));
        let qb = Quaternion::from_rotation_vector(&RotationVector(vec3::scale(unit, b)));
        let qsum = Quaternion::from_rotation_vector(&RotationVector(vec3::scale(unit, a + b)));
        let composed = qa.mul(&qb);
        assert!(composed.angle_to(&qsum) < 1e-12);
    }

    #[test]
    fn rotation_vector_round_trip() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..100 {
            let phi = [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ];
            let q = Quaternion::from_rotation_vector(&RotationVector(phi));
            let back = q.to_rotation_vector().0;
            for i in 0..3 {
                assert_close(back[i], phi[i], 1e-12);
            }
        }
    }

    #[test]
    fn f32_round_trip_smoke() {
        let e0 = EulerAngles::<f32>::new(0.3, -0.2, 1.0);
        let e1 = Quaternion::from_euler(&e0).to_euler();
        assert!((e1.roll - 0.3).abs() < 1e-5);
        assert!((e1.pitch + 0.2).abs() < 1e-5);
        assert!((e1.yaw - 1.0).abs() < 1e-5);
    }
}
