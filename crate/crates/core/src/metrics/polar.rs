//! The polar-product metric: the group is identified with
//! `U(H_J) x Sp+` through `g -> (u, |g|)` and given the product of the trace
//! metric on the unitary factor and the positive-cone metric on `|g|`.

use crate::error::{Error, Result};
use crate::matfun::{block_j, ensure_same_dim, expm, operator_norm, symmetrize, RealMatrix};
use crate::sympgroup::{PolarPair, PositiveSymplectic, SymplecticElement, UnitaryJ};

use super::ambient::positive_tangent_residual;
use super::positive::{metric_positive, PositiveGeodesic};

/// `d_2(u, v) = ||log(u^T v)||_2` with the principal logarithm.
pub fn dist_unitary(u: &UnitaryJ, v: &UnitaryJ) -> Result<f64> {
    ensure_same_dim(u.matrix(), v.matrix())?;
    let rel = UnitaryJ::new(u.matrix().transpose() * v.matrix(), *u.tol())?;
    Ok(rel.log()?.norm())
}

/// `(||x||_2^2 + p(P, y)^2)^{1/2}` for `x` tangent to the unitary factor at `u`
/// and `y` tangent to the positive factor at `P`.
pub fn metric_polar(u: &UnitaryJ, positive: &PositiveSymplectic, x: &RealMatrix, y: &RealMatrix) -> Result<f64> {
    ensure_same_dim(u.matrix(), x)?;
    ensure_same_dim(positive.matrix(), y)?;
    let w = u.matrix().transpose() * x;
    let j = block_j(u.matrix().nrows() / 2);
    let residual = (&w + w.transpose()).norm().max((&w * &j - &j * &w).norm());
    if residual > u.tol().linear_threshold(w.norm()) {
        return Err(Error::NotTangent { residual });
    }
    let speed = metric_positive(positive, y)?;
    let residual = positive_tangent_residual(positive, y)?;
    if residual > positive.tol().linear_threshold(speed) {
        return Err(Error::NotTangent { residual });
    }
    Ok(x.norm().hypot(speed))
}

/// The curve `u_p e^{tz} |p|^{1/2} (|p|^{-1/2} |q| |p|^{-1/2})^t |p|^{1/2}`
/// with `e^z = u_p^T u_q` and `||z|| <= pi`.
#[derive(Debug, Clone)]
pub struct PolarGeodesic {
    unitary_start: RealMatrix,
    rotation: RealMatrix,
    positive: PositiveGeodesic,
    source: SymplecticElement,
}

impl PolarGeodesic {
    pub fn new(p: &SymplecticElement, q: &SymplecticElement) -> Result<Self> {
        ensure_same_dim(p.matrix(), q.matrix())?;
        let pp = PolarPair::of(p)?;
        let qq = PolarPair::of(q)?;
        let rel = UnitaryJ::new(
            pp.unitary.matrix().transpose() * qq.unitary.matrix(),
            *p.tol(),
        )?;
        let rotation = rel.log()?;
        let positive = PositiveGeodesic::new(&pp.positive, &qq.positive)?;
        Ok(Self {
            unitary_start: pp.unitary.into_matrix(),
            rotation,
            positive,
            source: p.clone(),
        })
    }

    /// The anti-symmetric generator `z` of the unitary factor.
    pub fn rotation(&self) -> &RealMatrix {
        &self.rotation
    }

    pub fn positive_geodesic(&self) -> &PositiveGeodesic {
        &self.positive
    }

    /// Unitary and positive factors at `t`.
    pub fn factors_at(&self, t: f64) -> Result<(RealMatrix, RealMatrix)> {
        let u = &self.unitary_start * expm(&(&self.rotation * t))?;
        Ok((u, self.positive.matrix_at(t)?))
    }

    pub fn matrix_at(&self, t: f64) -> Result<RealMatrix> {
        let (u, p) = self.factors_at(t)?;
        Ok(u * p)
    }

    pub fn at(&self, t: f64) -> Result<SymplecticElement> {
        SymplecticElement::new(self.matrix_at(t)?, *self.source.tol())
    }

    /// `(||z||_2^2 + ||log(|p|^{-1/2}|q||p|^{-1/2})||_2^2)^{1/2}`.
    pub fn length(&self) -> f64 {
        self.rotation.norm().hypot(self.positive.length())
    }
}

pub fn geodesic_polar(p: &SymplecticElement, q: &SymplecticElement, t: f64) -> Result<SymplecticElement> {
    PolarGeodesic::new(p, q)?.at(t)
}

/// `d_P(p, q) = (d_2(u_p, u_q)^2 + d_p(|p|, |q|)^2)^{1/2}`.
pub fn dist_polar(p: &SymplecticElement, q: &SymplecticElement) -> Result<f64> {
    Ok(PolarGeodesic::new(p, q)?.length())
}

/// `c(p, q) = (2 max{e^{4||ln v||} (||p|| ||p^{-1}||)^2, ||p|| ||p^{-1}||})^{1/2}`
/// with `v = |p|^{-1/2} |q| |p|^{-1/2}`. All norms here are operator norms.
pub fn comparison_constant(p: &SymplecticElement, q: &SymplecticElement) -> Result<f64> {
    ensure_same_dim(p.matrix(), q.matrix())?;
    let pp = PolarPair::of(p)?;
    let qq = PolarPair::of(q)?;
    let r = pp.positive.inv_sqrt()?;
    let v = PositiveSymplectic::new(symmetrize(&(&r * qq.positive.matrix() * &r)), *p.tol())?;
    let log_norm = operator_norm(&v.log()?);
    let singular = p.matrix().clone().singular_values();
    let condition = singular.max() / singular.min();
    let c2 = 2.0 * ((4.0 * log_norm).exp() * condition * condition).max(condition);
    Ok(c2.sqrt())
}
