//! The congruence-invariant metric `p(a, x) = ||a^{-1/2} x a^{-1/2}||_2` on
//! positive symplectic matrices, its geodesics and distance.

use crate::error::{Error, Result};
use crate::matfun::{
    dexp_frechet, ensure_same_dim, expm, inv_sqrtm_spd, logm_spd, symmetrize, symmetry_residual,
    RealMatrix, SpectralTolerance,
};
use crate::sympgroup::PositiveSymplectic;

fn ensure_symmetric(x: &RealMatrix, tol: &SpectralTolerance) -> Result<()> {
    let residual = symmetry_residual(x);
    if residual > tol.linear_threshold(x.norm()) {
        return Err(Error::NotSymmetric { residual });
    }
    Ok(())
}

/// `||a^{-1/2} x a^{-1/2}||_2` for SPD `a`, without membership checks on `x`.
pub fn positive_speed(a: &RealMatrix, x: &RealMatrix, tol: &SpectralTolerance) -> Result<f64> {
    let r = inv_sqrtm_spd(a, tol)?;
    Ok((&r * x * &r).norm())
}

pub fn metric_positive(a: &PositiveSymplectic, x: &RealMatrix) -> Result<f64> {
    ensure_same_dim(a.matrix(), x)?;
    ensure_symmetric(x, a.tol())?;
    positive_speed(a.matrix(), x, a.tol())
}

/// The geodesic `t -> p^{1/2} exp(t log(p^{-1/2} q p^{-1/2})) p^{1/2}`, with
/// the endpoint-dependent factors computed once.
#[derive(Debug, Clone)]
pub struct PositiveGeodesic {
    p_half: RealMatrix,
    log_ratio: RealMatrix,
    tol: SpectralTolerance,
}

impl PositiveGeodesic {
    pub fn new(p: &PositiveSymplectic, q: &PositiveSymplectic) -> Result<Self> {
        ensure_same_dim(p.matrix(), q.matrix())?;
        let p_half = p.sqrt()?;
        let p_inv_half = p.inv_sqrt()?;
        let ratio = symmetrize(&(&p_inv_half * q.matrix() * &p_inv_half));
        let log_ratio = logm_spd(&ratio, p.tol())?;
        Ok(Self {
            p_half,
            log_ratio,
            tol: *p.tol(),
        })
    }

    pub fn matrix_at(&self, t: f64) -> Result<RealMatrix> {
        let mid = expm(&(&self.log_ratio * t))?;
        Ok(symmetrize(&(&self.p_half * mid * &self.p_half)))
    }

    pub fn at(&self, t: f64) -> Result<PositiveSymplectic> {
        PositiveSymplectic::new(self.matrix_at(t)?, self.tol)
    }

    /// `log(p^{-1/2} q p^{-1/2})`.
    pub fn log_ratio(&self) -> &RealMatrix {
        &self.log_ratio
    }

    pub fn length(&self) -> f64 {
        self.log_ratio.norm()
    }
}

pub fn geodesic_positive(p: &PositiveSymplectic, q: &PositiveSymplectic, t: f64) -> Result<PositiveSymplectic> {
    PositiveGeodesic::new(p, q)?.at(t)
}

/// `||log(p^{-1/2} q p^{-1/2})||_2`.
pub fn dist_positive(p: &PositiveSymplectic, q: &PositiveSymplectic) -> Result<f64> {
    Ok(PositiveGeodesic::new(p, q)?.length())
}

/// `||log p - log q||_2`, a lower bound for [`dist_positive`].
pub fn log_euclidean_distance(p: &PositiveSymplectic, q: &PositiveSymplectic) -> Result<f64> {
    ensure_same_dim(p.matrix(), q.matrix())?;
    Ok((p.log()? - q.log()?).norm())
}

/// `||e^{-x/2} dexp_x(y) e^{-x/2}||_2 - ||y||_2` for symmetric `x`, `y`; never
/// negative in exact arithmetic.
pub fn emi_gap(x: &RealMatrix, y: &RealMatrix) -> Result<f64> {
    let tol = SpectralTolerance::default();
    ensure_same_dim(x, y)?;
    ensure_symmetric(x, &tol)?;
    ensure_symmetric(y, &tol)?;
    let half = expm(&(x * -0.5))?;
    let d = dexp_frechet(x, y)?;
    Ok((&half * d * &half).norm() - y.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sympgroup::{
        group_action, sample_positive, sample_sp_algebra, sample_symplectic, seeded_rng, Parity,
    };
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use std::f64::consts::{E, SQRT_2};

    fn tol() -> SpectralTolerance {
        SpectralTolerance::default()
    }

    fn pos_diag(values: &[f64]) -> PositiveSymplectic {
        PositiveSymplectic::new(RealMatrix::from_diagonal(&DVector::from_row_slice(values)), tol()).unwrap()
    }

    #[test]
    fn metric_positive_examples() {
        let id = PositiveSymplectic::identity(1, tol());
        let x = RealMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -1.0]);
        assert_relative_eq!(metric_positive(&id, &x).unwrap(), x.norm(), epsilon = 1e-15);
        let a = pos_diag(&[4.0, 0.25]);
        assert_relative_eq!(metric_positive(&a, a.matrix()).unwrap(), SQRT_2, epsilon = 1e-14);
        let skew = RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(matches!(metric_positive(&a, &skew), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn metric_positive_congruence_invariance() {
        let mut rng = seeded_rng(21);
        for _ in 0..10 {
            let a = sample_positive(&mut rng, 2, 2.0, tol()).unwrap();
            let g = sample_symplectic(&mut rng, 2, 2.0, tol()).unwrap();
            let s = sample_sp_algebra(&mut rng, 2, Parity::Hermitian, 1.0).unwrap();
            let ah = a.sqrt().unwrap();
            let x = &ah * s.matrix() * &ah;
            let moved = group_action(&g, &a).unwrap();
            let gx = g.matrix() * &x * g.matrix().transpose();
            let lhs = metric_positive(&moved, &symmetrize(&gx)).unwrap();
            let rhs = metric_positive(&a, &x).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs));
        }
    }

    #[test]
    fn geodesic_examples() {
        let id = PositiveSymplectic::identity(1, tol());
        let q = pos_diag(&[E * E, 1.0 / (E * E)]);
        let mid = geodesic_positive(&id, &q, 0.5).unwrap();
        assert_relative_eq!(mid.matrix(), pos_diag(&[E, 1.0 / E]).matrix(), max_relative = 1e-13);

        let mut rng = seeded_rng(22);
        let p = sample_positive(&mut rng, 2, 2.0, tol()).unwrap();
        let q = sample_positive(&mut rng, 2, 2.0, tol()).unwrap();
        let still = geodesic_positive(&p, &p, 0.3).unwrap();
        assert!((still.matrix() - p.matrix()).norm() < 1e-12);
        let idn = PositiveSymplectic::identity(2, tol());
        let pow = geodesic_positive(&idn, &q, 0.3).unwrap();
        assert!((pow.matrix() - q.power(0.3).unwrap()).norm() < 1e-12);
        let start = geodesic_positive(&p, &q, 0.0).unwrap();
        let end = geodesic_positive(&p, &q, 1.0).unwrap();
        assert!((start.matrix() - p.matrix()).norm() <= 1e-10 * p.matrix().norm());
        assert!((end.matrix() - q.matrix()).norm() <= 1e-10 * q.matrix().norm());
    }

    #[test]
    fn distance_examples() {
        let mut rng = seeded_rng(23);
        let p = sample_positive(&mut rng, 2, 2.0, tol()).unwrap();
        assert!(dist_positive(&p, &p).unwrap() < 1e-12);
        let id = PositiveSymplectic::identity(1, tol());
        let q = pos_diag(&[E, 1.0 / E]);
        assert_relative_eq!(dist_positive(&id, &q).unwrap(), SQRT_2, epsilon = 1e-14);
        for _ in 0..10 {
            let p = sample_positive(&mut rng, 3, 2.0, tol()).unwrap();
            let q = sample_positive(&mut rng, 3, 2.0, tol()).unwrap();
            let g = sample_symplectic(&mut rng, 3, 2.0, tol()).unwrap();
            let d = dist_positive(&p, &q).unwrap();
            assert!((d - dist_positive(&q, &p).unwrap()).abs() < 1e-10);
            let moved = dist_positive(&group_action(&g, &p).unwrap(), &group_action(&g, &q).unwrap()).unwrap();
            assert!((d - moved).abs() < 1e-9);
            assert!(d >= log_euclidean_distance(&p, &q).unwrap() - 1e-9);
        }
    }

    #[test]
    fn emi_examples() {
        let mut rng = seeded_rng(24);
        let y = sample_sp_algebra(&mut rng, 2, Parity::Hermitian, 1.0).unwrap();
        let zero = RealMatrix::zeros(4, 4);
        assert!(emi_gap(&zero, y.matrix()).unwrap().abs() < 1e-14);
        assert!(emi_gap(y.matrix(), &zero).unwrap().abs() < 1e-14);
        for _ in 0..200 {
            let x = sample_sp_algebra(&mut rng, 2, Parity::Hermitian, 2.0).unwrap();
            let y = sample_sp_algebra(&mut rng, 2, Parity::Hermitian, 1.0).unwrap();
            assert!(emi_gap(x.matrix(), y.matrix()).unwrap() >= -1e-10);
        }
    }
}
