//! Small fixed-dimension linear algebra and the two covariance square roots.
//!
//! The filter state dimension here is 7 and the observation dimension 3, so
//! everything is a dense, heap-backed, row-major square matrix with the
//! dimension fixed at construction. The interesting part is the pair of
//! factorizations the filter variants select between:
//!
//! - [`cholesky`] — the classic lower-triangular square root, which fails on
//!   covariance matrices that have drifted indefinite or singular;
//! - [`sym_svd`] — a symmetric SVD via cyclic Jacobi rotations that clamps
//!   non-positive eigenvalues to a small floor and therefore always yields a
//!   usable factor.

use thiserror::Error;

use crate::scalar::Scalar;

/// Floor applied to eigenvalues produced by [`sym_svd`]; keeps the square
/// root real when the input is indefinite or rank deficient.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Jacobi sweeps stop once the off-diagonal Frobenius norm falls below this
/// fraction of the input norm.
pub const JACOBI_TOL: f64 = 1e-12;

/// Upper bound on cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Condition-number bound for [`sym_inverse`].
pub const MAX_CONDITION: f64 = 1e12;

/// Errors from factorization and inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LinalgError {
    /// Cholesky hit a non-positive pivot: the matrix is not positive definite.
    #[error("factorization failed: matrix not positive definite (pivot {pivot})")]
    FactorizationFailed { pivot: usize },
    /// Input contained NaN or infinity.
    #[error("non-finite entry in matrix input")]
    NonFinite,
    /// Condition number exceeded [`MAX_CONDITION`].
    #[error("matrix too ill-conditioned to invert")]
    IllConditioned,
}

/// Which covariance square root the filter uses; this switch is the entire
/// difference between the two filter variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorizationMethod {
    Cholesky,
    Svd,
}

impl std::fmt::Display for FactorizationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FactorizationMethod::Cholesky => write!(f, "cholesky"),
            FactorizationMethod::Svd => write!(f, "svd"),
        }
    }
}

/// A matrix `M` with `M·Mᵀ` reconstructing the source covariance.
#[derive(Debug, Clone)]
pub struct SqrtFactor<T> {
    pub factor: MatN<T>,
    pub method: FactorizationMethod,
}

/// Dense vector with dimension fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct VecN<T> {
    data: Vec<T>,
}

impl<T: Scalar> VecN<T> {
    pub fn zeros(n: usize) -> Self {
        VecN {
            data: vec![T::zero(); n],
        }
    }

    pub fn from_vec(data: Vec<T>) -> Self {
        VecN { data }
    }

    pub fn from_slice(data: &[T]) -> Self {
        VecN {
            data: data.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, s: T) -> Self {
        VecN {
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Outer product `self · otherᵀ` as a rectangular accumulation into a
    /// square matrix is only defined for equal dimensions; see
    /// [`MatN::add_scaled_outer`] for the rectangular case used by the filter.
    pub fn outer(&self, other: &Self) -> MatN<T> {
        let n = self.dim();
        assert_eq!(n, other.dim());
        let mut m = MatN::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.data[i] * other.data[j];
            }
        }
        m
    }
}

impl<T> std::ops::Index<usize> for VecN<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.data[i]
    }
}

impl<T> std::ops::IndexMut<usize> for VecN<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[i]
    }
}

impl<T: Scalar> std::ops::Add for &VecN<T> {
    type Output = VecN<T>;
    fn add(self, rhs: &VecN<T>) -> VecN<T> {
        assert_eq!(self.dim(), rhs.dim());
        VecN {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Scalar> std::ops::Sub for &VecN<T> {
    type Output = VecN<T>;
    fn sub(self, rhs: &VecN<T>) -> VecN<T> {
        assert_eq!(self.dim(), rhs.dim());
        VecN {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

/// Dense square matrix, row-major, dimension fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MatN<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> MatN<T> {
    pub fn zeros(n: usize) -> Self {
        MatN {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diag(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Row-major construction; panics when `data.len() != n * n`.
    pub fn from_row_major(n: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), n * n, "row-major data must have n*n entries");
        MatN { n, data }
    }

    pub fn from_rows(rows: &[&[T]]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend_from_slice(row);
        }
        MatN { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &VecN<T>) -> VecN<T> {
        assert_eq!(self.n, v.dim());
        let mut out = VecN::zeros(self.n);
        for i in 0..self.n {
            let mut acc = T::zero();
            for j in 0..self.n {
                acc = acc + self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn scaled(&self, s: T) -> Self {
        MatN {
            n: self.n,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn col(&self, j: usize) -> VecN<T> {
        let mut v = VecN::zeros(self.n);
        for i in 0..self.n {
            v[i] = self[(i, j)];
        }
        v
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    /// `(M + Mᵀ) / 2`, applied before every factorization.
    pub fn symmetrized(&self) -> Self {
        let half = T::of(0.5);
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = (self[(i, j)] + self[(j, i)]) * half;
            }
        }
        m
    }

    /// `self += scale · a · bᵀ` where `a` has `self.n` rows and `b` may have a
    /// different dimension only in the rectangular helper below; here both
    /// must match `self.n`.
    pub fn add_scaled_outer(&mut self, a: &VecN<T>, b: &VecN<T>, scale: T) {
        assert_eq!(a.dim(), self.n);
        assert_eq!(b.dim(), self.n);
        for i in 0..self.n {
            let ai = a[i] * scale;
            for j in 0..self.n {
                self[(i, j)] = self[(i, j)] + ai * b[j];
            }
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for MatN<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for MatN<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Scalar> std::ops::Add for &MatN<T> {
    type Output = MatN<T>;
    fn add(self, rhs: &MatN<T>) -> MatN<T> {
        assert_eq!(self.n, rhs.n);
        MatN {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Scalar> std::ops::Sub for &MatN<T> {
    type Output = MatN<T>;
    fn sub(self, rhs: &MatN<T>) -> MatN<T> {
        assert_eq!(self.n, rhs.n);
        MatN {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

/// Rectangular matrix used only for filter gain and cross-covariance blocks
/// (`n × m` with `n != m`).
#[derive(Debug, Clone, PartialEq)]
pub struct MatRect<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> MatRect<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatRect {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn add_scaled_outer(&mut self, a: &VecN<T>, b: &VecN<T>, scale: T) {
        assert_eq!(a.dim(), self.rows);
        assert_eq!(b.dim(), self.cols);
        for i in 0..self.rows {
            let ai = a[i] * scale;
            for j in 0..self.cols {
                self[(i, j)] = self[(i, j)] + ai * b[j];
            }
        }
    }

    /// `self · m` where `m` is square with dimension `self.cols`.
    pub fn mul_square(&self, m: &MatN<T>) -> MatRect<T> {
        assert_eq!(self.cols, m.dim());
        let mut out = MatRect::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..self.cols {
                    out[(i, j)] = out[(i, j)] + a * m[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &VecN<T>) -> VecN<T> {
        assert_eq!(self.cols, v.dim());
        let mut out = VecN::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = T::zero();
            for j in 0..self.cols {
                acc = acc + self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// `self · m · selfᵀ`, the covariance contraction used in the update.
    pub fn sandwich(&self, m: &MatN<T>) -> MatN<T> {
        let km = self.mul_square(m);
        let mut out = MatN::zeros(self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + km[(i, k)] * self[(j, k)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

impl<T> std::ops::Index<(usize, usize)> for MatRect<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for MatRect<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Symmetric SVD via cyclic Jacobi rotations.
///
/// Returns `(U, S)` with `U` orthogonal and `S` sorted descending so that
/// `U · diag(S) · Uᵀ` reconstructs the symmetrized input. For a symmetric
/// matrix the right factor equals the left, so only `U` is returned.
/// Eigenvalues below [`EIGENVALUE_FLOOR`] (including negatives of an
/// indefinite input) are clamped to the floor, which is what lets the filter
/// keep running on covariances Cholesky rejects.
pub fn sym_svd<T: Scalar>(p: &MatN<T>) -> Result<(MatN<T>, VecN<T>), LinalgError> {
    if !p.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let mut a = p.symmetrized();
    let n = a.dim();
    let mut u = MatN::identity(n);
    if n == 1 {
        let floor = T::of(EIGENVALUE_FLOOR);
        return Ok((u, VecN::from_vec(vec![a[(0, 0)].max(floor)])));
    }

    let scale = a.frobenius_norm().max(T::min_positive_value());
    let tol = T::of(JACOBI_TOL) * scale;
    let mut prev_off = T::infinity();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= tol || off >= prev_off {
            break;
        }
        prev_off = off;
        for p_idx in 0..n - 1 {
            for q_idx in p_idx + 1..n {
                jacobi_rotate(&mut a, &mut u, p_idx, q_idx);
            }
        }
    }

    // Sort eigenpairs descending and clamp to the floor.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .partial_cmp(&a[(i, i)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let floor = T::of(EIGENVALUE_FLOOR);
    let mut s = VecN::zeros(n);
    let mut u_sorted = MatN::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        s[dst] = a[(src, src)].max(floor);
        for row in 0..n {
            u_sorted[(row, dst)] = u[(row, src)];
        }
    }
    Ok((u_sorted, s))
}

fn off_diagonal_norm<T: Scalar>(a: &MatN<T>) -> T {
    let n = a.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc = acc + a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation zeroing `a[(p, q)]`, accumulated into `u`.
fn jacobi_rotate<T: Scalar>(a: &mut MatN<T>, u: &mut MatN<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == T::zero() {
        return;
    }
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    let theta = (aqq - app) / (T::of(2.0) * apq);
    // Stable tangent of the rotation angle (Rutishauser).
    let t = if theta.abs() > T::of(1e20) {
        (T::of(2.0) * theta).recip()
    } else {
        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = (t * t + T::one()).sqrt().recip();
    let s = t * c;
    let tau = s / (T::one() + c);

    let n = a.dim();
    a[(p, p)] = app - t * apq;
    a[(q, q)] = aqq + t * apq;
    a[(p, q)] = T::zero();
    a[(q, p)] = T::zero();
    for k in 0..n {
        if k != p && k != q {
            let akp = a[(k, p)];
            let akq = a[(k, q)];
            a[(k, p)] = akp - s * (akq + tau * akp);
            a[(p, k)] = a[(k, p)];
            a[(k, q)] = akq + s * (akp - tau * akq);
            a[(q, k)] = a[(k, q)];
        }
    }
    for k in 0..n {
        let ukp = u[(k, p)];
        let ukq = u[(k, q)];
        u[(k, p)] = ukp - s * (ukq + tau * ukp);
        u[(k, q)] = ukq + s * (ukp - tau * ukq);
    }
}

/// Lower-triangular Cholesky factor with `L · Lᵀ = P`.
///
/// Fails with [`LinalgError::FactorizationFailed`] on any non-positive pivot,
/// i.e. whenever the (symmetrized) input is not strictly positive definite.
pub fn cholesky<T: Scalar>(p: &MatN<T>) -> Result<MatN<T>, LinalgError> {
    if !p.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let a = p.symmetrized();
    let n = a.dim();
    let mut l = MatN::zeros(n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if d <= T::zero() || !d.is_finite() {
            return Err(LinalgError::FactorizationFailed { pivot: j });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut acc = a[(i, j)];
            for k in 0..j {
                acc = acc - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = acc / djj;
        }
    }
    Ok(l)
}

/// Square root of a symmetric matrix by the selected method.
///
/// Cholesky yields the lower-triangular factor; SVD yields `U · diag(√S)`,
/// which reconstructs the eigenvalue-clamped input on indefinite or
/// rank-deficient matrices where Cholesky errors out.
pub fn sqrt_factor<T: Scalar>(
    p: &MatN<T>,
    method: FactorizationMethod,
) -> Result<SqrtFactor<T>, LinalgError> {
    let factor = match method {
        FactorizationMethod::Cholesky => cholesky(p)?,
        FactorizationMethod::Svd => {
            let (u, s) = sym_svd(p)?;
            let n = u.dim();
            let mut f = u;
            for j in 0..n {
                let root = s[j].sqrt();
                for i in 0..n {
                    f[(i, j)] = f[(i, j)] * root;
                }
            }
            f
        }
    };
    Ok(SqrtFactor { factor, method })
}

/// Inverse of a symmetric positive (semi-)definite matrix via the SVD path,
/// used for the innovation covariance.
///
/// Fails with [`LinalgError::IllConditioned`] when the post-clamp condition
/// number exceeds [`MAX_CONDITION`].
pub fn sym_inverse<T: Scalar>(p: &MatN<T>) -> Result<MatN<T>, LinalgError> {
    let (u, s) = sym_svd(p)?;
    let n = u.dim();
    let cond = s[0] / s[n - 1];
    if !cond.is_finite() || cond > T::of(MAX_CONDITION) {
        return Err(LinalgError::IllConditioned);
    }
    let mut inv = MatN::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = T::zero();
            for k in 0..n {
                acc = acc + u[(i, k)] * u[(j, k)] / s[k];
            }
            inv[(i, j)] = acc;
        }
    }
    Ok(inv)
}

/// 3-vector helpers shared by the attitude and sensor models.
pub mod vec3 {
    use crate::scalar::Scalar;

    pub fn add<T: Scalar>(a: [T; 3], b: [T; 3]) -> [T; 3] {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    pub fn sub<T: Scalar>(a: [T; 3], b: [T; 3]) -> [T; 3] {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    pub fn scale<T: Scalar>(a: [T; 3], s: T) -> [T; 3] {
        [a[0] * s, a[1] * s, a[2] * s]
    }

    pub fn dot<T: Scalar>(a: [T; 3], b: [T; 3]) -> T {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    pub fn cross<T: Scalar>(a: [T; 3], b: [T; 3]) -> [T; 3] {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    pub fn norm<T: Scalar>(a: [T; 3]) -> T {
        dot(a, a).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn reconstruct_svd(u: &MatN<f64>, s: &VecN<f64>) -> MatN<f64> {
        let n = u.dim();
        let mut out = MatN::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += u[(i, k)] * s[k] * u[(j, k)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    fn random_spd(n: usize, rng: &mut StdRng) -> MatN<f64> {
        // A·Aᵀ + n·I is comfortably positive definite.
        let mut a = MatN::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = rng.random_range(-1.0..1.0);
            }
        }
        let mut p = a.matmul(&a.transpose());
        for i in 0..n {
            p[(i, i)] += 0.5 * n as f64;
        }
        p
    }

    fn frob_diff(a: &MatN<f64>, b: &MatN<f64>) -> f64 {
        (a - b).frobenius_norm()
    }

    #[test]
    fn sym_svd_identity() {
        let p = MatN::<f64>::identity(3);
        let (u, s) = sym_svd(&p).unwrap();
        for k in 0..3 {
            assert!((s[k] - 1.0).abs() < 1e-14);
        }
        let utu = u.transpose().matmul(&u);
        assert!(frob_diff(&utu, &MatN::identity(3)) < 1e-10);
    }

    #[test]
    fn sym_svd_diagonal() {
        let p = MatN::<f64>::diag(&[4.0, 1.0]);
        let (u, s) = sym_svd(&p).unwrap();
        assert!((s[0] - 4.0).abs() < 1e-14);
        assert!((s[1] - 1.0).abs() < 1e-14);
        // Columns are axis vectors up to sign.
        assert!((u[(0, 0)].abs() - 1.0).abs() < 1e-14);
        assert!((u[(1, 1)].abs() - 1.0).abs() < 1e-14);
        assert!(u[(1, 0)].abs() < 1e-14);
        assert!(u[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn sym_svd_random_spd_7x7() {
        let mut rng = StdRng::seed_from_u64(7);
        let p = random_spd(7, &mut rng);
        let (u, s) = sym_svd(&p).unwrap();
        let recon = reconstruct_svd(&u, &s);
        assert!(frob_diff(&recon, &p.symmetrized()) < 1e-9 * p.frobenius_norm());
        for k in 0..6 {
            assert!(s[k] >= s[k + 1]);
        }
    }

    #[test]
    fn sym_svd_orthogonality_and_clamp() {
        let mut rng = StdRng::seed_from_u64(11);
        for n in 2..=8 {
            // Indefinite input: random symmetric, no positivity.
            let mut a = MatN::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let v: f64 = rng.random_range(-2.0..2.0);
                    a[(i, j)] = v;
                    a[(j, i)] = v;
                }
            }
            let (u, s) = sym_svd(&a).unwrap();
            let utu = u.transpose().matmul(&u);
            assert!(frob_diff(&utu, &MatN::identity(n)) < 1e-10);
            for k in 0..n {
                assert!(s[k] >= EIGENVALUE_FLOOR);
            }
        }
    }

    #[test]
    fn sym_svd_rejects_non_finite() {
        let mut p = MatN::<f64>::identity(2);
        p[(0, 1)] = f64::NAN;
        assert_eq!(sym_svd(&p).unwrap_err(), LinalgError::NonFinite);
    }

    #[test]
    fn cholesky_identity() {
        let p = MatN::<f64>::identity(3);
        let l = cholesky(&p).unwrap();
        assert!(frob_diff(&l, &p) < 1e-15);
    }

    #[test]
    fn cholesky_hand_case() {
        let p = MatN::<f64>::from_rows(&[&[4.0, 2.0], &[2.0, 2.0]]);
        let l = cholesky(&p).unwrap();
        assert!((l[(0, 0)] - 2.0).abs() < 1e-14);
        assert!(l[(0, 1)].abs() < 1e-14);
        assert!((l[(1, 0)] - 1.0).abs() < 1e-14);
        assert!((l[(1, 1)] - 1.0).abs() < 1e-14);
        let recon = l.matmul(&l.transpose());
        assert!(frob_diff(&recon, &p) < 1e-10);
    }

    #[test]
    fn cholesky_indefinite_fails() {
        let p = MatN::<f64>::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(matches!(
            cholesky(&p),
            Err(LinalgError::FactorizationFailed { .. })
        ));
    }

    #[test]
    fn sqrt_factor_svd_identity() {
        let f = sqrt_factor(&MatN::<f64>::identity(2), FactorizationMethod::Svd).unwrap();
        let recon = f.factor.matmul(&f.factor.transpose());
        assert!(frob_diff(&recon, &MatN::identity(2)) < 1e-10);
        // Factor is orthogonal up to column signs/permutation.
        for i in 0..2 {
            for j in 0..2 {
                let v = f.factor[(i, j)].abs();
                assert!(v < 1e-7 || (v - 1.0).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn sqrt_factor_rank_deficient() {
        let p = MatN::<f64>::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let f = sqrt_factor(&p, FactorizationMethod::Svd).unwrap();
        let (_, s) = sym_svd(&p).unwrap();
        assert!((s[0] - 2.0).abs() < 1e-12);
        assert!((s[1] - EIGENVALUE_FLOOR).abs() < 1e-13);
        // Reconstruction matches the clamped matrix.
        let recon = f.factor.matmul(&f.factor.transpose());
        assert!(frob_diff(&recon, &p) < 1e-9 * p.frobenius_norm() + 1e-11);

        assert!(matches!(
            sqrt_factor(&p, FactorizationMethod::Cholesky),
            Err(LinalgError::FactorizationFailed { .. })
        ));
    }

    #[test]
    fn sqrt_factor_round_trip_both_methods() {
        let mut rng = StdRng::seed_from_u64(42);
        for n in 2..=8 {
            for _ in 0..20 {
                let p = random_spd(n, &mut rng);
                for method in [FactorizationMethod::Cholesky, FactorizationMethod::Svd] {
                    let f = sqrt_factor(&p, method).unwrap();
                    let recon = f.factor.matmul(&f.factor.transpose());
                    assert!(
                        frob_diff(&recon, &p) < 1e-9 * p.frobenius_norm(),
                        "dim {n} method {method}"
                    );
                }
            }
        }
    }

    #[test]
    fn cholesky_and_svd_agree_on_spd() {
        let mut rng = StdRng::seed_from_u64(3);
        for n in [3, 7] {
            let p = random_spd(n, &mut rng);
            let l = cholesky(&p).unwrap();
            let (u, s) = sym_svd(&p).unwrap();
            let via_chol = l.matmul(&l.transpose());
            let via_svd = reconstruct_svd(&u, &s);
            assert!(frob_diff(&via_chol, &via_svd) < 1e-9 * p.frobenius_norm());
        }
    }

    #[test]
    fn sym_inverse_round_trip() {
        let mut rng = StdRng::seed_from_u64(5);
        let p = random_spd(3, &mut rng);
        let inv = sym_inverse(&p).unwrap();
        let prod = p.matmul(&inv);
        assert!(frob_diff(&prod, &MatN::identity(3)) < 1e-10);
    }

    #[test]
    fn sym_inverse_ill_conditioned() {
        let p = MatN::<f64>::diag(&[1.0, 1e13]);
        assert_eq!(sym_inverse(&p).unwrap_err(), LinalgError::IllConditioned);
    }

    #[test]
    fn sym_svd_f32_smoke() {
        let p = MatN::<f32>::diag(&[4.0, 1.0]);
        let (u, s) = sym_svd(&p).unwrap();
        assert!((s[0] - 4.0).abs() < 1e-5);
        let utu = u.transpose().matmul(&u);
        let err = (&utu - &MatN::identity(2)).frobenius_norm();
        assert!(err < 1e-6);
    }

    #[test]
    fn large_scale_matrix_converges() {
        // The R→∞ style innovation covariance: huge diagonal plus off-diagonal.
        let mut p = MatN::<f64>::diag(&[1e12, 1e12, 1e12]);
        p[(0, 1)] = 3e10;
        p[(1, 0)] = 3e10;
        let (u, s) = sym_svd(&p).unwrap();
        let recon = reconstruct_svd(&u, &s);
        assert!(frob_diff(&recon, &p) < 1e-9 * p.frobenius_norm());
    }
}
