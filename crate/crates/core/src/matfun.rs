//! Dense matrix-function kernels.
//!
//! Everything geometric in the crate is assembled from the functions here:
//! the exponential (scaling and squaring around a diagonal Padé core), the
//! spectral logarithm / square root / real powers of symmetric positive
//! definite matrices, the principal logarithm of J-commuting orthogonal
//! matrices, the Fréchet derivative of the exponential and the polar
//! decomposition.
//!
//! All functions are pure. The Hilbert-Schmidt norm is the Frobenius norm of
//! the real matrix and the adjoint is the transpose.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real matrix. Geometric routines expect a square matrix of even size
/// `2n` with finite entries; see [`check_real_matrix`].
pub type RealMatrix = DMatrix<f64>;

/// Degree of the diagonal Padé approximant used after scaling.
pub const PADE_DEGREE: usize = 8;

/// The exponential is evaluated on `x / 2^s` with `||x / 2^s||_1 <= SQUARING_THRESHOLD`.
/// At this radius the [8/8] Padé truncation error is below 1e-23, far under
/// double precision round-off.
pub const SQUARING_THRESHOLD: f64 = 0.5;

/// Inputs with a larger 1-norm are rejected with [`Error::Overflow`].
pub const EXPM_NORM_CAP: f64 = 1.0e3;

/// Numerical thresholds shared by the membership predicates and spectral kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralTolerance {
    /// Relative tolerance for algebraic membership residuals.
    pub membership_tol: f64,
    /// Smallest admissible eigenvalue (or singular value) of positive inputs.
    pub pd_floor: f64,
    /// Smallest admissible angular distance of a unitary eigenvalue from -1.
    pub branch_guard: f64,
}

impl Default for SpectralTolerance {
    fn default() -> Self {
        Self {
            membership_tol: 1e-8,
            pd_floor: 1e-10,
            branch_guard: 1e-6,
        }
    }
}

impl SpectralTolerance {
    pub fn new(membership_tol: f64, pd_floor: f64, branch_guard: f64) -> Result<Self> {
        let tol = Self {
            membership_tol,
            pd_floor,
            branch_guard,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("membership_tol", self.membership_tol),
            ("pd_floor", self.pd_floor),
            ("branch_guard", self.branch_guard),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be strictly positive, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Membership threshold for a residual measured on a matrix of Frobenius norm `norm`,
    /// scaled like a quadratic expression in the matrix: `tol * (1 + norm^2)`.
    pub fn quadratic_threshold(&self, norm: f64) -> f64 {
        self.membership_tol * (1.0 + norm * norm)
    }

    /// Threshold for residuals linear in the matrix: `tol * (1 + norm)`.
    pub fn linear_threshold(&self, norm: f64) -> f64 {
        self.membership_tol * (1.0 + norm)
    }
}

pub fn ensure_square(m: &RealMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_finite(m: &RealMatrix) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Checks the carrier invariants: square, even size `>= 2`, finite entries.
/// Returns the half dimension `n`.
pub fn check_real_matrix(m: &RealMatrix) -> Result<usize> {
    let dim = ensure_square(m)?;
    if dim < 2 || dim % 2 != 0 {
        return Err(Error::OddDimension(dim));
    }
    ensure_finite(m)?;
    Ok(dim / 2)
}

pub fn ensure_same_dim(a: &RealMatrix, b: &RealMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(())
}

/// The block matrix `[[0, -I], [I, 0]]` of size `2n`.
pub(crate) fn block_j(n: usize) -> RealMatrix {
    let mut j = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(m: &RealMatrix) -> f64 {
    m.norm()
}

/// Trace inner product `<a, b> = tr(b^T a)`.
pub fn trace_inner(a: &RealMatrix, b: &RealMatrix) -> f64 {
    a.dot(b)
}

/// Operator norm (largest singular value).
pub fn operator_norm(m: &RealMatrix) -> f64 {
    m.clone().singular_values().max()
}

pub fn one_norm(m: &RealMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn symmetrize(m: &RealMatrix) -> RealMatrix {
    (m + m.transpose()) * 0.5
}

pub fn antisymmetrize(m: &RealMatrix) -> RealMatrix {
    (m - m.transpose()) * 0.5
}

pub fn symmetry_residual(m: &RealMatrix) -> f64 {
    (m - m.transpose()).norm()
}

pub fn commutator(a: &RealMatrix, b: &RealMatrix) -> RealMatrix {
    a * b - b * a
}

fn pade_coefficients(degree: usize) -> Vec<f64> {
    let m = degree as f64;
    let mut c = vec![1.0; degree + 1];
    for k in 1..=degree {
        let kf = k as f64;
        c[k] = c[k - 1] * (m - kf + 1.0) / (kf * (2.0 * m - kf + 1.0));
    }
    c
}

/// Matrix exponential by scaling and squaring with a diagonal [8/8] Padé core.
///
/// Accepts any square finite matrix. Fails with [`Error::Overflow`] when
/// `||x||_1 > EXPM_NORM_CAP` or when squaring produces non-finite entries.
pub fn expm(x: &RealMatrix) -> Result<RealMatrix> {
    let dim = ensure_square(x)?;
    ensure_finite(x)?;
    let norm = one_norm(x);
    if norm > EXPM_NORM_CAP {
        return Err(Error::Overflow {
            norm,
            cap: EXPM_NORM_CAP,
        });
    }
    let squarings = if norm > SQUARING_THRESHOLD {
        (norm / SQUARING_THRESHOLD).log2().ceil() as i32
    } else {
        0
    };
    let scaled = x * 2f64.powi(-squarings);

    let c = pade_coefficients(PADE_DEGREE);
    let identity = RealMatrix::identity(dim, dim);
    let square = &scaled * &scaled;
    let mut even = RealMatrix::zeros(dim, dim);
    let mut odd = RealMatrix::zeros(dim, dim);
    let mut power = identity;
    for k in 0..=PADE_DEGREE / 2 {
        even += &power * c[2 * k];
        if 2 * k < PADE_DEGREE {
            odd += &power * c[2 * k + 1];
        }
        if k < PADE_DEGREE / 2 {
            power = &power * &square;
        }
    }
    let odd = &scaled * odd;
    let numerator = &even + &odd;
    let denominator = &even - &odd;
    let mut result = denominator
        .lu()
        .solve(&numerator)
        .ok_or(Error::Singular {
            min_singular_value: 0.0,
        })?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    if ensure_finite(&result).is_err() {
        return Err(Error::Overflow {
            norm,
            cap: EXPM_NORM_CAP,
        });
    }
    Ok(result)
}

fn spd_eigen(p: &RealMatrix, tol: &SpectralTolerance) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    ensure_square(p)?;
    ensure_finite(p)?;
    let residual = symmetry_residual(p);
    if residual > tol.linear_threshold(p.norm()) {
        return Err(Error::NotSymmetric { residual });
    }
    let eig = symmetrize(p).symmetric_eigen();
    let min_eigenvalue = eig.eigenvalues.min();
    if min_eigenvalue < tol.pd_floor {
        return Err(Error::NotPositiveDefinite { min_eigenvalue });
    }
    Ok(eig)
}

/// Applies a scalar function to the spectrum of a symmetric positive definite matrix.
pub fn spd_apply(
    p: &RealMatrix,
    tol: &SpectralTolerance,
    f: impl Fn(f64) -> f64,
) -> Result<RealMatrix> {
    let eig = spd_eigen(p, tol)?;
    let values = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&l| f(l)));
    let v = &eig.eigenvectors;
    let out = v * RealMatrix::from_diagonal(&values) * v.transpose();
    Ok(symmetrize(&out))
}

/// Symmetric logarithm of a symmetric positive definite matrix.
pub fn logm_spd(p: &RealMatrix, tol: &SpectralTolerance) -> Result<RealMatrix> {
    spd_apply(p, tol, f64::ln)
}

/// The unique symmetric positive definite square root.
pub fn sqrtm_spd(p: &RealMatrix, tol: &SpectralTolerance) -> Result<RealMatrix> {
    spd_apply(p, tol, f64::sqrt)
}

pub fn inv_sqrtm_spd(p: &RealMatrix, tol: &SpectralTolerance) -> Result<RealMatrix> {
    spd_apply(p, tol, |l| 1.0 / l.sqrt())
}

/// Principal real power `p^t` of a symmetric positive definite matrix.
pub fn powm_spd(p: &RealMatrix, t: f64, tol: &SpectralTolerance) -> Result<RealMatrix> {
    spd_apply(p, tol, |l| l.powf(t))
}

/// Residual of `u` against the J-commuting orthogonal (hence symplectic) conditions:
/// the largest of `||u^T u - 1||`, `||uJ - Ju||` and `||u^T J u - J||`.
pub fn unitary_j_residual(u: &RealMatrix) -> Result<f64> {
    let n = check_real_matrix(u)?;
    let j = block_j(n);
    let identity = RealMatrix::identity(2 * n, 2 * n);
    let orth = (u.transpose() * u - identity).norm();
    let comm = (u * &j - &j * u).norm();
    let symp = (u.transpose() * &j * u - &j).norm();
    Ok(orth.max(comm).max(symp))
}

/// Principal logarithm of a J-commuting orthogonal matrix.
///
/// The matrix `[[A, -B], [B, A]]` is identified with the complex unitary
/// `A + iB`; its eigenvalue logarithms are taken on the principal branch via
/// a complex Schur form and the result is mapped back to the real
/// representation. The output is anti-symmetric, commutes with `J` and has
/// operator norm at most `pi`.
pub fn logm_unitary_j(u: &RealMatrix, tol: &SpectralTolerance) -> Result<RealMatrix> {
    let n = check_real_matrix(u)?;
    let residual = unitary_j_residual(u)?;
    if residual > tol.quadratic_threshold(u.norm()) {
        return Err(Error::NotUnitaryJ { residual });
    }
    let complex = DMatrix::<Complex<f64>>::from_fn(n, n, |i, k| {
        Complex::new(u[(i, k)], u[(n + i, k)])
    });
    let (q, t) = complex.schur().unpack();
    let mut log_diag = DMatrix::<Complex<f64>>::zeros(n, n);
    for i in 0..n {
        let lambda = t[(i, i)];
        let theta = lambda.im.atan2(lambda.re);
        let distance = PI - theta.abs();
        if distance < tol.branch_guard {
            return Err(Error::BranchAmbiguity { distance });
        }
        log_diag[(i, i)] = Complex::new(0.0, theta);
    }
    let log = &q * log_diag * q.adjoint();
    let mut real = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for k in 0..n {
            let z = log[(i, k)];
            real[(i, k)] = z.re;
            real[(n + i, n + k)] = z.re;
            real[(n + i, k)] = z.im;
            real[(i, n + k)] = -z.im;
        }
    }
    Ok(antisymmetrize(&real))
}

/// Fréchet derivative of the exponential at `x` in direction `y`, read off
/// the upper-right block of `exp([[x, y], [0, x]])`.
pub fn dexp_frechet(x: &RealMatrix, y: &RealMatrix) -> Result<RealMatrix> {
    let dim = ensure_square(x)?;
    ensure_same_dim(x, y)?;
    let mut block = RealMatrix::zeros(2 * dim, 2 * dim);
    block.view_mut((0, 0), (dim, dim)).copy_from(x);
    block.view_mut((dim, dim), (dim, dim)).copy_from(x);
    block.view_mut((0, dim), (dim, dim)).copy_from(y);
    let e = expm(&block)?;
    Ok(e.view((0, dim), (dim, dim)).into_owned())
}

/// Orthogonal and positive factors of an invertible matrix, `g = unitary * positive`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarFactors {
    pub unitary: RealMatrix,
    pub positive: RealMatrix,
}

/// Polar decomposition through the SVD `g = W S V^T`: `positive = V S V^T`
/// (the square root of `g^T g`) and `unitary = W V^T`.
pub fn polar_decompose(g: &RealMatrix, tol: &SpectralTolerance) -> Result<PolarFactors> {
    ensure_square(g)?;
    ensure_finite(g)?;
    let svd = g.clone().svd(true, true);
    let min_singular_value = svd.singular_values.min();
    if min_singular_value < tol.pd_floor {
        return Err(Error::Singular { min_singular_value });
    }
    let w = svd.u.as_ref().expect("left singular vectors requested");
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let unitary = w * v_t;
    let positive = v_t.transpose() * RealMatrix::from_diagonal(&svd.singular_values) * v_t;
    Ok(PolarFactors {
        unitary,
        positive: symmetrize(&positive),
    })
}
