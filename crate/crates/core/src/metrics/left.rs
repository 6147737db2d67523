//! Left-invariant metric `I(g, v) = ||g^{-1} v||_2` on the symplectic group.

use crate::curves::SampledCurve;
use crate::error::{Error, Result};
use crate::matfun::{block_j, commutator, ensure_same_dim, expm, RealMatrix};
use crate::sympgroup::{is_sp_algebra, project_sp, standard_j, SymplecticElement};

fn symplectic_inverse_matrix(g: &RealMatrix) -> RealMatrix {
    let j = block_j(g.nrows() / 2);
    -(&j * g.transpose() * &j)
}

/// `||g^{-1} v||_2` without a tangency check; `g` must be symplectic.
pub fn left_speed(g: &RealMatrix, v: &RealMatrix) -> f64 {
    (symplectic_inverse_matrix(g) * v).norm()
}

fn left_translate_tangent(g: &SymplecticElement, v: &RealMatrix) -> Result<RealMatrix> {
    ensure_same_dim(g.matrix(), v)?;
    let x = g.inverse().matrix() * v;
    let check = is_sp_algebra(&x, &standard_j(g.half_dim())?, g.tol())?;
    if !check.pass {
        return Err(Error::NotTangent {
            residual: check.residual,
        });
    }
    Ok(x)
}

/// The left-invariant norm of a tangent vector `v` at `g`.
pub fn metric_left(g: &SymplecticElement, v: &RealMatrix) -> Result<f64> {
    Ok(left_translate_tangent(g, v)?.norm())
}

/// Geodesic through `g0` with initial velocity `g0 v0`:
/// `g0 exp(t v0^T) exp(t (v0 - v0^T))`.
pub fn exp_left(g0: &SymplecticElement, v0: &RealMatrix, t: f64) -> Result<SymplecticElement> {
    ensure_same_dim(g0.matrix(), v0)?;
    let check = is_sp_algebra(v0, &standard_j(g0.half_dim())?, g0.tol())?;
    if !check.pass {
        return Err(Error::NotInAlgebra {
            residual: check.residual,
        });
    }
    let vt = v0.transpose();
    let first = expm(&(&vt * t))?;
    let second = expm(&((v0 - &vt) * t))?;
    SymplecticElement::new(g0.matrix() * first * second, *g0.tol())
}

/// The metric spray `F_g(v) = v g^{-1} v + g v^T (g g^T)^{-1} v - v v^T (g^T)^{-1}`.
///
/// Inverses here come from a generic LU factorization, so the result is an
/// evaluation independent of [`christoffel_left`].
pub fn spray_left(g: &SymplecticElement, v: &RealMatrix) -> Result<RealMatrix> {
    ensure_same_dim(g.matrix(), v)?;
    let gm = g.matrix();
    let inv = gm.clone().try_inverse().ok_or(Error::Singular {
        min_singular_value: 0.0,
    })?;
    let gram_inv = (gm * gm.transpose())
        .try_inverse()
        .ok_or(Error::Singular {
            min_singular_value: 0.0,
        })?;
    Ok(v * &inv * v + gm * v.transpose() * gram_inv * v - v * v.transpose() * inv.transpose())
}

/// Bilinear form of the spray: `Gamma_g(gx, gy) = g (xy + yx + x^T y + y^T x - x y^T - y x^T) / 2`.
pub fn christoffel_left(g: &SymplecticElement, v: &RealMatrix, w: &RealMatrix) -> Result<RealMatrix> {
    let x = left_translate_tangent(g, v)?;
    let y = left_translate_tangent(g, w)?;
    let xt = x.transpose();
    let yt = y.transpose();
    let inner = &x * &y + &y * &x + &xt * &y + &yt * &x - &x * &yt - &y * &xt;
    Ok(g.matrix() * inner * 0.5)
}

/// Values of a vector field at a subset of the nodes of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples {
    /// Curve parameters of the nodes.
    pub params: Vec<f64>,
    /// Node indices into the source curve.
    pub nodes: Vec<usize>,
    /// Field values `D_t eta`.
    pub values: Vec<RealMatrix>,
    /// Left-translated values `alpha^{-1} D_t eta`, which lie in the algebra.
    pub left_components: Vec<RealMatrix>,
}

impl FieldSamples {
    /// Largest left-invariant norm over the nodes.
    pub fn max_left_norm(&self) -> f64 {
        self.left_components
            .iter()
            .map(|m| m.norm())
            .fold(0.0, f64::max)
    }
}

/// Covariant derivative of the left-invariant Levi-Civita connection of a
/// field `eta` along a sampled curve `alpha`:
///
/// `alpha^{-1} D_t eta = mu' + ([beta, mu] + [beta, mu^T] + [mu, beta^T]) / 2`
///
/// with `beta = alpha^{-1} alpha'` and `mu = alpha^{-1} eta`. Both derivatives
/// use second-order central differences, so values are produced at interior
/// nodes only. `beta` is projected onto the algebra, which removes the
/// normal component of the finite-difference error.
pub fn covariant_derivative_left(curve: &SampledCurve, field: &SampledCurve) -> Result<FieldSamples> {
    if !curve.tag().is_symplectic() {
        return Err(Error::InvalidCurve(format!(
            "covariant derivative needs a curve in the group, got {}",
            curve.tag()
        )));
    }
    let nodes = curve.len();
    if nodes < 5 {
        return Err(Error::GridTooCoarse { nodes, required: 5 });
    }
    if field.len() != nodes {
        return Err(Error::InvalidCurve(format!(
            "field has {} nodes, curve has {nodes}",
            field.len()
        )));
    }
    let n = curve.half_dim();
    let j = standard_j(n)?;
    let tol = curve.tol();
    let h = curve.step();
    let alpha = curve.values();
    let eta = field.values();
    let inverses: Vec<RealMatrix> = alpha.iter().map(symplectic_inverse_matrix).collect();
    let mut mu = Vec::with_capacity(nodes);
    for (inv, e) in inverses.iter().zip(eta) {
        ensure_same_dim(inv, e)?;
        let m = inv * e;
        let check = is_sp_algebra(&m, &j, tol)?;
        if !check.pass {
            return Err(Error::NotTangent {
                residual: check.residual,
            });
        }
        mu.push(m);
    }

    let mut out = FieldSamples {
        params: Vec::with_capacity(nodes - 2),
        nodes: Vec::with_capacity(nodes - 2),
        values: Vec::with_capacity(nodes - 2),
        left_components: Vec::with_capacity(nodes - 2),
    };
    for i in 1..nodes - 1 {
        let beta = project_sp(&(&inverses[i] * (&alpha[i + 1] - &alpha[i - 1]) / (2.0 * h)))?;
        let mu_dot = (&mu[i + 1] - &mu[i - 1]) / (2.0 * h);
        let m = &mu[i];
        let brackets = commutator(&beta, m)
            + commutator(&beta, &m.transpose())
            + commutator(m, &beta.transpose());
        let left = mu_dot + brackets * 0.5;
        out.params.push(curve.grid()[i]);
        out.nodes.push(i);
        out.values.push(&alpha[i] * &left);
        out.left_components.push(left);
    }
    Ok(out)
}
