//! The group layer: complex structure, membership predicates, Lie-algebra
//! parities, the symplectic inverse, the congruence action on positive
//! elements and seeded random generation.
//!
//! The complex structure is fixed to `J = [[0, -I], [I, 0]]`. Every complex
//! structure on a finite-dimensional real space is orthogonally conjugate to
//! this one.
//!
//! In finite dimension every matrix is Hilbert-Schmidt, so the restricted
//! group coincides with the full symplectic group `{g : g^T J g = J}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matfun::{
    antisymmetrize, block_j, check_real_matrix, ensure_same_dim, expm, inv_sqrtm_spd, logm_spd,
    logm_unitary_j, polar_decompose, powm_spd, sqrtm_spd, symmetrize, symmetry_residual,
    unitary_j_residual, RealMatrix, SpectralTolerance,
};

/// A complex structure `J` with `J^2 = -1` and `J^T = -J`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure {
    n: usize,
    matrix: RealMatrix,
}

impl ComplexStructure {
    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }
}

/// The block complex structure `[[0, -I_n], [I_n, 0]]`.
pub fn standard_j(n: usize) -> Result<ComplexStructure> {
    if n == 0 {
        return Err(Error::InvalidParameter("half dimension must be >= 1".into()));
    }
    Ok(ComplexStructure {
        n,
        matrix: block_j(n),
    })
}

/// Outcome of a membership predicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipCheck {
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl MembershipCheck {
    fn new(residual: f64, threshold: f64) -> Self {
        Self {
            residual,
            threshold,
            pass: residual <= threshold,
        }
    }
}

fn ensure_j_dim(m: &RealMatrix, j: &ComplexStructure) -> Result<()> {
    check_real_matrix(m)?;
    if m.nrows() != j.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            found: m.nrows(),
        });
    }
    Ok(())
}

/// Residual `||g^T J g - J||_2` against the threshold `tol * (1 + ||g||_2^2)`.
pub fn is_symplectic(
    g: &RealMatrix,
    j: &ComplexStructure,
    tol: &SpectralTolerance,
) -> Result<MembershipCheck> {
    ensure_j_dim(g, j)?;
    let jm = j.matrix();
    let residual = (g.transpose() * jm * g - jm).norm();
    Ok(MembershipCheck::new(residual, tol.quadratic_threshold(g.norm())))
}

/// Symmetry type of a Lie-algebra element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    General,
    /// Symmetric; equivalently anticommutes with `J`.
    Hermitian,
    /// Anti-symmetric; equivalently commutes with `J`.
    AntiHermitian,
}

/// Classification reported by [`is_sp_algebra`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityClass {
    /// Not in the algebra.
    None,
    General,
    Hermitian,
    AntiHermitian,
    /// Both parities hold, which only happens for zero.
    Both,
}

impl ParityClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParityClass::None => "none",
            ParityClass::General => "general",
            ParityClass::Hermitian => "hermitian",
            ParityClass::AntiHermitian => "anti_hermitian",
            ParityClass::Both => "hermitian+anti_hermitian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraCheck {
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub hermitian: bool,
    pub anti_hermitian: bool,
}

impl AlgebraCheck {
    pub fn classification(&self) -> ParityClass {
        match (self.pass, self.hermitian, self.anti_hermitian) {
            (false, _, _) => ParityClass::None,
            (true, true, true) => ParityClass::Both,
            (true, true, false) => ParityClass::Hermitian,
            (true, false, true) => ParityClass::AntiHermitian,
            (true, false, false) => ParityClass::General,
        }
    }

    pub fn satisfies(&self, parity: Parity) -> bool {
        self.pass
            && match parity {
                Parity::General => true,
                Parity::Hermitian => self.hermitian,
                Parity::AntiHermitian => self.anti_hermitian,
            }
    }
}

/// Residual `||xJ + Jx^T||_2` against `tol * (1 + ||x||_2)`, with parity flags.
pub fn is_sp_algebra(
    x: &RealMatrix,
    j: &ComplexStructure,
    tol: &SpectralTolerance,
) -> Result<AlgebraCheck> {
    ensure_j_dim(x, j)?;
    let jm = j.matrix();
    let residual = (x * jm + jm * x.transpose()).norm();
    let threshold = tol.linear_threshold(x.norm());
    Ok(AlgebraCheck {
        residual,
        threshold,
        pass: residual <= threshold,
        hermitian: symmetry_residual(x) <= threshold,
        anti_hermitian: (x + x.transpose()).norm() <= threshold,
    })
}

fn j_for(m: &RealMatrix) -> Result<ComplexStructure> {
    standard_j(check_real_matrix(m)?)
}

/// An invertible matrix with `g^T J g = J` within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticElement {
    matrix: RealMatrix,
    tol: SpectralTolerance,
}

impl SymplecticElement {
    pub fn new(matrix: RealMatrix, tol: SpectralTolerance) -> Result<Self> {
        let j = j_for(&matrix)?;
        let check = is_symplectic(&matrix, &j, &tol)?;
        if !check.pass {
            return Err(Error::NotSymplectic {
                residual: check.residual,
            });
        }
        let min_singular_value = matrix.clone().singular_values().min();
        if min_singular_value < tol.pd_floor {
            return Err(Error::Singular { min_singular_value });
        }
        Ok(Self { matrix, tol })
    }

    pub fn identity(n: usize, tol: SpectralTolerance) -> Self {
        Self {
            matrix: RealMatrix::identity(2 * n, 2 * n),
            tol,
        }
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.matrix
    }

    pub fn tol(&self) -> &SpectralTolerance {
        &self.tol
    }

    pub fn half_dim(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `-J g^T J`; no linear solve.
    pub fn inverse(&self) -> SymplecticElement {
        symplectic_inverse(self)
    }

    pub fn transpose(&self) -> Result<SymplecticElement> {
        SymplecticElement::new(self.matrix.transpose(), self.tol)
    }

    pub fn compose(&self, other: &SymplecticElement) -> Result<SymplecticElement> {
        ensure_same_dim(&self.matrix, &other.matrix)?;
        SymplecticElement::new(&self.matrix * &other.matrix, self.tol)
    }
}

/// The symplectic inverse `g^{-1} = -J g^T J`.
pub fn symplectic_inverse(g: &SymplecticElement) -> SymplecticElement {
    let j = block_j(g.half_dim());
    SymplecticElement {
        matrix: -(&j * g.matrix.transpose() * &j),
        tol: g.tol,
    }
}

/// Element of the Lie algebra `{x : xJ = -J x^T}` with its parity.
#[derive(Debug, Clone, PartialEq)]
pub struct SpAlgebraElement {
    matrix: RealMatrix,
    parity: Parity,
}

impl SpAlgebraElement {
    pub fn new(matrix: RealMatrix, parity: Parity, tol: &SpectralTolerance) -> Result<Self> {
        let j = j_for(&matrix)?;
        let check = is_sp_algebra(&matrix, &j, tol)?;
        if !check.pass {
            return Err(Error::NotInAlgebra {
                residual: check.residual,
            });
        }
        if !check.satisfies(parity) {
            return Err(Error::WrongParity(match parity {
                Parity::Hermitian => "expected a symmetric element",
                Parity::AntiHermitian => "expected an anti-symmetric element",
                Parity::General => unreachable!(),
            }));
        }
        Ok(Self { matrix, parity })
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.matrix
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn exp(&self, tol: SpectralTolerance) -> Result<SymplecticElement> {
        SymplecticElement::new(expm(&self.matrix)?, tol)
    }
}

/// Symmetric positive definite symplectic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSymplectic {
    matrix: RealMatrix,
    tol: SpectralTolerance,
}

impl PositiveSymplectic {
    pub fn new(matrix: RealMatrix, tol: SpectralTolerance) -> Result<Self> {
        let j = j_for(&matrix)?;
        let residual = symmetry_residual(&matrix);
        if residual > tol.linear_threshold(matrix.norm()) {
            return Err(Error::NotSymmetric { residual });
        }
        let min_eigenvalue = symmetrize(&matrix).symmetric_eigenvalues().min();
        if min_eigenvalue < tol.pd_floor {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        let check = is_symplectic(&matrix, &j, &tol)?;
        if !check.pass {
            return Err(Error::NotSymplectic {
                residual: check.residual,
            });
        }
        Ok(Self { matrix, tol })
    }

    pub fn identity(n: usize, tol: SpectralTolerance) -> Self {
        Self {
            matrix: RealMatrix::identity(2 * n, 2 * n),
            tol,
        }
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.matrix
    }

    pub fn tol(&self) -> &SpectralTolerance {
        &self.tol
    }

    pub fn half_dim(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn sqrt(&self) -> Result<RealMatrix> {
        sqrtm_spd(&self.matrix, &self.tol)
    }

    pub fn inv_sqrt(&self) -> Result<RealMatrix> {
        inv_sqrtm_spd(&self.matrix, &self.tol)
    }

    pub fn log(&self) -> Result<RealMatrix> {
        logm_spd(&self.matrix, &self.tol)
    }

    pub fn power(&self, t: f64) -> Result<RealMatrix> {
        powm_spd(&self.matrix, t, &self.tol)
    }

    /// `g^{-1} = -J g J` for positive symplectic `g`.
    pub fn inverse(&self) -> PositiveSymplectic {
        let j = block_j(self.half_dim());
        PositiveSymplectic {
            matrix: symmetrize(&-(&j * &self.matrix * &j)),
            tol: self.tol,
        }
    }

    pub fn to_symplectic(&self) -> SymplecticElement {
        SymplecticElement {
            matrix: self.matrix.clone(),
            tol: self.tol,
        }
    }
}

/// Orthogonal matrix commuting with `J` (the unitary group of the complexified space).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryJ {
    matrix: RealMatrix,
    tol: SpectralTolerance,
}

impl UnitaryJ {
    pub fn new(matrix: RealMatrix, tol: SpectralTolerance) -> Result<Self> {
        let residual = unitary_j_residual(&matrix)?;
        if residual > tol.quadratic_threshold(matrix.norm()) {
            return Err(Error::NotUnitaryJ { residual });
        }
        Ok(Self { matrix, tol })
    }

    pub fn identity(n: usize, tol: SpectralTolerance) -> Self {
        Self {
            matrix: RealMatrix::identity(2 * n, 2 * n),
            tol,
        }
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.matrix
    }

    pub fn tol(&self) -> &SpectralTolerance {
        &self.tol
    }

    /// Principal logarithm; anti-symmetric, J-commuting, operator norm `<= pi`.
    pub fn log(&self) -> Result<RealMatrix> {
        logm_unitary_j(&self.matrix, &self.tol)
    }

    pub fn to_symplectic(&self) -> SymplecticElement {
        SymplecticElement {
            matrix: self.matrix.clone(),
            tol: self.tol,
        }
    }
}

/// Polar factors of a symplectic element; both factors are again symplectic.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPair {
    pub unitary: UnitaryJ,
    pub positive: PositiveSymplectic,
}

impl PolarPair {
    pub fn of(g: &SymplecticElement) -> Result<Self> {
        let factors = polar_decompose(g.matrix(), g.tol())?;
        Ok(Self {
            unitary: UnitaryJ::new(factors.unitary, *g.tol())?,
            positive: PositiveSymplectic::new(factors.positive, *g.tol())?,
        })
    }

    pub fn reassemble(&self) -> RealMatrix {
        self.unitary.matrix() * self.positive.matrix()
    }
}

/// Orthogonal projection `x -> (x + J x J) / 2` of a symmetric matrix onto the
/// symmetric part of the algebra.
pub fn project_sp_h(x: &RealMatrix, tol: &SpectralTolerance) -> Result<SpAlgebraElement> {
    let j = block_j(check_real_matrix(x)?);
    let residual = symmetry_residual(x);
    if residual > tol.linear_threshold(x.norm()) {
        return Err(Error::NotSymmetric { residual });
    }
    let p = (x + &j * x * &j) * 0.5;
    Ok(SpAlgebraElement {
        matrix: symmetrize(&p),
        parity: Parity::Hermitian,
    })
}

/// Orthogonal projection of an arbitrary matrix onto the algebra:
/// `x -> (x + J x^T J) / 2`.
pub fn project_sp(x: &RealMatrix) -> Result<RealMatrix> {
    let j = block_j(check_real_matrix(x)?);
    Ok((x + &j * x.transpose() * &j) * 0.5)
}

/// The congruence action `(g, a) -> g a g^T`.
pub fn group_action(g: &SymplecticElement, a: &PositiveSymplectic) -> Result<PositiveSymplectic> {
    ensure_same_dim(g.matrix(), a.matrix())?;
    let m = g.matrix() * a.matrix() * g.matrix().transpose();
    PositiveSymplectic::new(symmetrize(&m), *g.tol())
}

/// `g = exp(log(X)/2) exp(-log(Y)/2)`, which satisfies `g Y g^T = X`.
pub fn transporter(x: &PositiveSymplectic, y: &PositiveSymplectic) -> Result<SymplecticElement> {
    ensure_same_dim(x.matrix(), y.matrix())?;
    let half_x = expm(&(x.log()? * 0.5))?;
    let half_y = expm(&(y.log()? * -0.5))?;
    SymplecticElement::new(half_x * half_y, *x.tol())
}

/// The section `b^{1/2} a^{-1/2}` of `g -> g a g^T`.
pub fn global_section(a: &PositiveSymplectic, b: &PositiveSymplectic) -> Result<SymplecticElement> {
    ensure_same_dim(a.matrix(), b.matrix())?;
    SymplecticElement::new(b.sqrt()? * a.inv_sqrt()?, *a.tol())
}

// ---------------------------------------------------------------------------
// Seeded random generation
// ---------------------------------------------------------------------------

/// The splitmix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: `splitmix64(seed ^ splitmix64(index))`.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> RealMatrix {
    RealMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn normalized(m: RealMatrix, scale: f64) -> RealMatrix {
    let norm = m.norm();
    if scale == 0.0 || norm == 0.0 {
        RealMatrix::zeros(m.nrows(), m.ncols())
    } else {
        m * (scale / norm)
    }
}

/// Random algebra element with Frobenius norm exactly `scale`, drawn from `rng`.
///
/// Hermitian parity uses `S + J S J` with `S` a Gaussian symmetric matrix;
/// anti-Hermitian parity uses `A - J A J` with `A` Gaussian anti-symmetric;
/// general elements mix the two unit-norm parts with a random angle.
pub fn sample_sp_algebra<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    parity: Parity,
    scale: f64,
) -> Result<SpAlgebraElement> {
    if n == 0 {
        return Err(Error::InvalidParameter("half dimension must be >= 1".into()));
    }
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scale must be finite and non-negative, got {scale}"
        )));
    }
    let j = block_j(n);
    let mut hermitian = || {
        let s = symmetrize(&gaussian_matrix(rng, 2 * n));
        normalized(&s + &j * &s * &j, 1.0)
    };
    let matrix = match parity {
        Parity::Hermitian => hermitian(),
        Parity::AntiHermitian => {
            let a = antisymmetrize(&gaussian_matrix(rng, 2 * n));
            normalized(&a - &j * &a * &j, 1.0)
        }
        Parity::General => {
            let h = hermitian();
            let a = antisymmetrize(&gaussian_matrix(rng, 2 * n));
            let a = normalized(&a - &j * &a * &j, 1.0);
            let angle = rng.random::<f64>() * std::f64::consts::FRAC_PI_2;
            h * angle.cos() + a * angle.sin()
        }
    };
    Ok(SpAlgebraElement {
        matrix: normalized(matrix, scale),
        parity,
    })
}

/// Deterministic-in-seed random algebra element with `||x||_2 = scale`.
pub fn random_sp_algebra(n: usize, parity: Parity, scale: f64, seed: u64) -> Result<SpAlgebraElement> {
    sample_sp_algebra(&mut seeded_rng(seed), n, parity, scale)
}

pub fn sample_symplectic<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    scale: f64,
    tol: SpectralTolerance,
) -> Result<SymplecticElement> {
    sample_sp_algebra(rng, n, Parity::General, scale)?.exp(tol)
}

pub fn sample_positive<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    scale: f64,
    tol: SpectralTolerance,
) -> Result<PositiveSymplectic> {
    let x = sample_sp_algebra(rng, n, Parity::Hermitian, scale)?;
    PositiveSymplectic::new(symmetrize(&expm(x.matrix())?), tol)
}

pub fn sample_unitary<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    scale: f64,
    tol: SpectralTolerance,
) -> Result<UnitaryJ> {
    let x = sample_sp_algebra(rng, n, Parity::AntiHermitian, scale)?;
    UnitaryJ::new(expm(x.matrix())?, tol)
}

/// A normal algebra element `x + y` with commuting parts `x` (symmetric) and
/// `y` (anti-symmetric), `||x + y||_2 = scale`.
///
/// Coordinates are split into random blocks. A block with eigenvalue
/// `lambda != 0` carries `diag(lambda I, -lambda I)` in `x` and a rotation
/// `A (+) A` (A anti-symmetric) in `y`; a block with `lambda = 0` also gets a
/// symmetric `B` in `y = [[A, -B], [B, A]]`. The pair is then conjugated by a
/// random J-commuting orthogonal matrix.
pub fn sample_normal_sp<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    scale: f64,
    tol: SpectralTolerance,
) -> Result<(SpAlgebraElement, SpAlgebraElement)> {
    let mut x0 = RealMatrix::zeros(2 * n, 2 * n);
    let mut y0 = RealMatrix::zeros(2 * n, 2 * n);
    let mut start = 0;
    while start < n {
        let size = rng.random_range(1..=n - start);
        let lambda = if rng.random_range(0..3) == 0 {
            0.0
        } else {
            rng.sample::<f64, _>(StandardNormal)
        };
        let a = antisymmetrize(&gaussian_matrix(rng, size));
        let b = if lambda == 0.0 {
            symmetrize(&gaussian_matrix(rng, size))
        } else {
            RealMatrix::zeros(size, size)
        };
        for i in 0..size {
            x0[(start + i, start + i)] = lambda;
            x0[(n + start + i, n + start + i)] = -lambda;
            for k in 0..size {
                y0[(start + i, start + k)] = a[(i, k)];
                y0[(n + start + i, n + start + k)] = a[(i, k)];
                y0[(n + start + i, start + k)] = b[(i, k)];
                y0[(start + i, n + start + k)] = -b[(i, k)];
            }
        }
        start += size;
    }
    let w_scale = rng.random_range(0.5..3.0);
    let w = sample_unitary(rng, n, w_scale, tol)?;
    let wm = w.matrix();
    let x = symmetrize(&(wm * x0 * wm.transpose()));
    let y = antisymmetrize(&(wm * y0 * wm.transpose()));
    let norm = (&x + &y).norm();
    let factor = if norm == 0.0 || scale == 0.0 { 0.0 } else { scale / norm };
    Ok((
        SpAlgebraElement::new(x * factor, Parity::Hermitian, &tol)?,
        SpAlgebraElement::new(y * factor, Parity::AntiHermitian, &tol)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tol() -> SpectralTolerance {
        SpectralTolerance::default()
    }

    fn m2(a: f64, b: f64, c: f64, d: f64) -> RealMatrix {
        RealMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    #[test]
    fn standard_j_structure() {
        let j = standard_j(1).unwrap();
        assert_eq!(j.matrix(), &m2(0.0, -1.0, 1.0, 0.0));
        assert_eq!(j.matrix() * j.matrix(), -RealMatrix::identity(2, 2));
        let j2 = standard_j(2).unwrap();
        assert_eq!(j2.matrix().transpose(), -j2.matrix());
        let orth = j2.matrix().transpose() * j2.matrix();
        assert_eq!(orth, RealMatrix::identity(4, 4));
        assert!(standard_j(0).is_err());
    }

    #[test]
    fn symplectic_predicate_examples() {
        let j = standard_j(1).unwrap();
        let c = is_symplectic(&RealMatrix::identity(2, 2), &j, &tol()).unwrap();
        assert!(c.pass && c.residual == 0.0);
        let shear = m2(1.0, 1.0, 0.0, 1.0);
        assert!(is_symplectic(&shear, &j, &tol()).unwrap().pass);
        let c = is_symplectic(&(RealMatrix::identity(2, 2) * 2.0), &j, &tol()).unwrap();
        assert!(!c.pass);
        // g^T J g = 4J, so the residual is ||3J|| = 3 sqrt(2)
        assert_relative_eq!(c.residual, 3.0 * 2f64.sqrt(), epsilon = 1e-14);
        let j2 = standard_j(2).unwrap();
        assert!(matches!(
            is_symplectic(&shear, &j2, &tol()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn algebra_predicate_examples() {
        let j = standard_j(2).unwrap();
        let zero = is_sp_algebra(&RealMatrix::zeros(4, 4), &j, &tol()).unwrap();
        assert!(zero.pass && zero.hermitian && zero.anti_hermitian);
        assert_eq!(zero.classification(), ParityClass::Both);
        let jj = is_sp_algebra(j.matrix(), &j, &tol()).unwrap();
        assert_eq!(jj.classification(), ParityClass::AntiHermitian);
        let id = is_sp_algebra(&RealMatrix::identity(4, 4), &j, &tol()).unwrap();
        assert!(!id.pass);
        assert_eq!(id.classification(), ParityClass::None);
    }

    #[test]
    fn inverse_examples() {
        let id = SymplecticElement::identity(1, tol());
        assert_eq!(id.inverse().matrix(), &RealMatrix::identity(2, 2));
        let shear = SymplecticElement::new(m2(1.0, 1.0, 0.0, 1.0), tol()).unwrap();
        assert_eq!(shear.inverse().matrix(), &m2(1.0, -1.0, 0.0, 1.0));
        for seed in 0..20 {
            let g = sample_symplectic(&mut seeded_rng(seed), 3, 2.0, tol()).unwrap();
            let prod = g.matrix() * g.inverse().matrix();
            assert!((prod - RealMatrix::identity(6, 6)).norm() < 1e-10);
        }
    }

    #[test]
    fn project_sp_h_examples() {
        let p = project_sp_h(&RealMatrix::identity(4, 4), &tol()).unwrap();
        assert!(p.matrix().norm() < 1e-15);
        let s = random_sp_algebra(2, Parity::Hermitian, 1.0, 5).unwrap();
        let p = project_sp_h(s.matrix(), &tol()).unwrap();
        assert!((p.matrix() - s.matrix()).norm() < 1e-14);
        let mut rng = seeded_rng(9);
        let x = symmetrize(&gaussian_matrix(&mut rng, 6));
        let once = project_sp_h(&x, &tol()).unwrap();
        let twice = project_sp_h(once.matrix(), &tol()).unwrap();
        assert!((once.matrix() - twice.matrix()).norm() < 1e-12);
        let y = symmetrize(&gaussian_matrix(&mut rng, 6));
        let py = project_sp_h(&y, &tol()).unwrap();
        let ortho = (&x - once.matrix()).dot(py.matrix());
        assert!(ortho.abs() < 1e-12);
        let not_sym = m2(0.0, 1.0, 0.0, 0.0);
        assert!(matches!(project_sp_h(&not_sym, &tol()), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn random_parities_hold() {
        let j = block_j(3);
        for seed in 0..20 {
            let h = random_sp_algebra(3, Parity::Hermitian, 1.5, seed).unwrap();
            let x = h.matrix();
            assert!((x - x.transpose()).norm() < 1e-12);
            assert!((x * &j + &j * x).norm() < 1e-12);
            assert_relative_eq!(x.norm(), 1.5, epsilon = 1e-12);
            let a = random_sp_algebra(3, Parity::AntiHermitian, 1.5, seed).unwrap();
            let y = a.matrix();
            assert!((y + y.transpose()).norm() < 1e-12);
            assert!((y * &j - &j * y).norm() < 1e-12);
        }
        let zero = random_sp_algebra(2, Parity::General, 0.0, 1).unwrap();
        assert_eq!(zero.matrix(), &RealMatrix::zeros(4, 4));
    }

    #[test]
    fn random_is_deterministic_in_seed() {
        let a = random_sp_algebra(2, Parity::General, 1.0, 42).unwrap();
        let b = random_sp_algebra(2, Parity::General, 1.0, 42).unwrap();
        let c = random_sp_algebra(2, Parity::General, 1.0, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(child_seed(1, 0), child_seed(1, 1));
    }

    #[test]
    fn group_action_examples() {
        let a = sample_positive(&mut seeded_rng(3), 2, 1.0, tol()).unwrap();
        let id = SymplecticElement::identity(2, tol());
        let out = group_action(&id, &a).unwrap();
        assert!((out.matrix() - a.matrix()).norm() < 1e-14);
        let g = sample_symplectic(&mut seeded_rng(4), 2, 1.0, tol()).unwrap();
        let out = group_action(&g, &PositiveSymplectic::identity(2, tol())).unwrap();
        assert!((out.matrix() - g.matrix() * g.matrix().transpose()).norm() < 1e-13);
    }

    #[test]
    fn transporter_and_section() {
        let a = sample_positive(&mut seeded_rng(11), 2, 1.5, tol()).unwrap();
        let g = transporter(&a, &a).unwrap();
        assert!((g.matrix() - RealMatrix::identity(4, 4)).norm() < 1e-12);
        let id = PositiveSymplectic::identity(2, tol());
        let g = transporter(&a, &id).unwrap();
        assert!((g.matrix() - a.sqrt().unwrap()).norm() < 1e-12);
        for seed in 0..10 {
            let mut rng = seeded_rng(100 + seed);
            let x = sample_positive(&mut rng, 3, 2.0, tol()).unwrap();
            let y = sample_positive(&mut rng, 3, 2.0, tol()).unwrap();
            let g = transporter(&x, &y).unwrap();
            let back = g.matrix() * y.matrix() * g.matrix().transpose();
            assert!((back - x.matrix()).norm() <= 1e-9 * x.matrix().norm());
            let s = global_section(&x, &y).unwrap();
            let b = s.matrix() * x.matrix() * s.matrix().transpose();
            assert!((b - y.matrix()).norm() <= 1e-9 * y.matrix().norm());
        }
        let s = global_section(&a, &a).unwrap();
        assert!((s.matrix() - RealMatrix::identity(4, 4)).norm() < 1e-12);
        let s = global_section(&id, &a).unwrap();
        assert!((s.matrix() - a.sqrt().unwrap()).norm() < 1e-12);
    }

    #[test]
    fn adjoint_and_polar_stability() {
        for seed in 0..20 {
            let g = sample_symplectic(&mut seeded_rng(seed), 2, 2.0, tol()).unwrap();
            assert!(g.transpose().is_ok());
            let pair = PolarPair::of(&g).unwrap();
            assert!((pair.reassemble() - g.matrix()).norm() <= 1e-10 * g.matrix().norm());
        }
    }

    #[test]
    fn exp_parities_land_in_subgroups() {
        for seed in 0..10 {
            let mut rng = seeded_rng(seed);
            assert!(sample_positive(&mut rng, 3, 2.0, tol()).is_ok());
            assert!(sample_unitary(&mut rng, 3, 2.0, tol()).is_ok());
        }
    }

    #[test]
    fn normal_samples_commute() {
        for seed in 0..20 {
            for n in 1..=4 {
                let (x, y) = sample_normal_sp(&mut seeded_rng(seed), n, 1.0, tol()).unwrap();
                let c = x.matrix() * y.matrix() - y.matrix() * x.matrix();
                assert!(c.norm() < 1e-12, "n={n} seed={seed}");
                assert_relative_eq!((x.matrix() + y.matrix()).norm(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn membership_constructors_reject() {
        let t = tol();
        assert!(matches!(
            SymplecticElement::new(RealMatrix::identity(2, 2) * 2.0, t),
            Err(Error::NotSymplectic { .. })
        ));
        assert!(matches!(
            PositiveSymplectic::new(m2(1.0, 1.0, 0.0, 1.0), t),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            UnitaryJ::new(m2(1.0, 0.0, 0.0, -1.0), t),
            Err(Error::NotUnitaryJ { .. })
        ));
        assert!(matches!(
            SpAlgebraElement::new(block_j(1), Parity::Hermitian, &t),
            Err(Error::WrongParity(_))
        ));
        assert!(matches!(
            SymplecticElement::new(RealMatrix::identity(3, 3), t),
            Err(Error::OddDimension(3))
        ));
    }
}
