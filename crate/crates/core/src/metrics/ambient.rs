//! The positive part as a submanifold of the symmetric matrices with the
//! trace inner product: the idempotent `Pi_g`, the orthogonal tangent
//! projection and the geodesic-equation residual.

use crate::curves::{ManifoldTag, SampledCurve};
use crate::error::{Error, Result};
use crate::matfun::{block_j, ensure_same_dim, symmetrize, symmetry_residual, RealMatrix};
use crate::sympgroup::PositiveSymplectic;

fn pi_raw(g: &RealMatrix, x: &RealMatrix) -> RealMatrix {
    let j = block_j(g.nrows() / 2);
    (x + g * &j * x * &j * g) * 0.5
}

fn ensure_symmetric_input(g: &PositiveSymplectic, x: &RealMatrix) -> Result<()> {
    ensure_same_dim(g.matrix(), x)?;
    let residual = symmetry_residual(x);
    if residual > g.tol().linear_threshold(x.norm()) {
        return Err(Error::NotSymmetric { residual });
    }
    Ok(())
}

/// `Pi_g(x) = (x + g J x J g) / 2`: an idempotent with range `g^{1/2} sp_h g^{1/2}`
/// whose trace adjoint is `Pi_{g^{-1}}`.
pub fn pi_g(g: &PositiveSymplectic, x: &RealMatrix) -> Result<RealMatrix> {
    ensure_symmetric_input(g, x)?;
    Ok(symmetrize(&pi_raw(g.matrix(), x)))
}

/// `||y J + J y||_2` with `y = base^{-1/2} x base^{-1/2}`; zero exactly when
/// `x` is tangent to the positive part at `base`.
pub fn positive_tangent_residual(base: &PositiveSymplectic, x: &RealMatrix) -> Result<f64> {
    ensure_same_dim(base.matrix(), x)?;
    let r = base.inv_sqrt()?;
    let y = &r * x * &r;
    let j = block_j(base.half_dim());
    Ok((&y * &j + &j * &y).norm())
}

/// Ambient metric `||x||_2` of a tangent vector at `g`.
pub fn metric_ambient(g: &PositiveSymplectic, x: &RealMatrix) -> Result<f64> {
    ensure_symmetric_input(g, x)?;
    let residual = positive_tangent_residual(g, x)?;
    let r = g.inv_sqrt()?;
    if residual > g.tol().linear_threshold((&r * x * &r).norm()) {
        return Err(Error::NotTangent { residual });
    }
    Ok(x.norm())
}

/// Orthonormal basis coordinates of a symmetric matrix: diagonal entries and
/// `sqrt(2) x_ij` for `i < j`.
fn sym_to_vec(x: &RealMatrix) -> Vec<f64> {
    let d = x.nrows();
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        out.push(x[(i, i)]);
        for k in i + 1..d {
            out.push(std::f64::consts::SQRT_2 * 0.5 * (x[(i, k)] + x[(k, i)]));
        }
    }
    out
}

fn vec_to_sym(v: &[f64], d: usize) -> RealMatrix {
    let mut x = RealMatrix::zeros(d, d);
    let mut idx = 0;
    for i in 0..d {
        x[(i, i)] = v[idx];
        idx += 1;
        for k in i + 1..d {
            let val = v[idx] / std::f64::consts::SQRT_2;
            x[(i, k)] = val;
            x[(k, i)] = val;
            idx += 1;
        }
    }
    x
}

/// Orthogonal (trace inner product) projection onto the tangent space at `g`:
/// `E = (Pi_g + Pi_{g^{-1}} - 1)^{-1} Pi_{g^{-1}}`.
///
/// The operator is assembled on an orthonormal basis of the symmetric
/// matrices (dimension `n(2n+1)`) and solved densely.
pub fn tangent_project_e(g: &PositiveSymplectic, x: &RealMatrix) -> Result<RealMatrix> {
    ensure_symmetric_input(g, x)?;
    let d = g.matrix().nrows();
    let m = d * (d + 1) / 2;
    let gm = g.matrix();
    let g_inv = g.inverse();
    let gi = g_inv.matrix();
    let mut op = RealMatrix::zeros(m, m);
    let mut unit = vec![0.0; m];
    for k in 0..m {
        unit[k] = 1.0;
        let e = vec_to_sym(&unit, d);
        unit[k] = 0.0;
        let image = pi_raw(gm, &e) + pi_raw(gi, &e) - &e;
        for (row, value) in sym_to_vec(&image).into_iter().enumerate() {
            op[(row, k)] = value;
        }
    }
    let svd = op.clone().svd(false, false);
    let max = svd.singular_values.max();
    let rcond = if max > 0.0 {
        svd.singular_values.min() / max
    } else {
        0.0
    };
    if rcond < 1e-12 {
        return Err(Error::SingularProjectionSystem { rcond });
    }
    let rhs = nalgebra::DVector::from_vec(sym_to_vec(&pi_raw(gi, x)));
    let solution = op
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularProjectionSystem { rcond })?;
    Ok(vec_to_sym(solution.as_slice(), d))
}

/// Largest `||a a'' a + J a'' J||_2` over interior nodes, with `a''` from
/// second-order central differences. Vanishes (up to `O(h^2)`) along
/// geodesics of the ambient metric.
pub fn ambient_residual(curve: &SampledCurve) -> Result<f64> {
    if curve.tag() != ManifoldTag::PositiveSymplectic {
        return Err(Error::InvalidCurve(format!(
            "ambient residual needs a positive curve, got {}",
            curve.tag()
        )));
    }
    let nodes = curve.len();
    if nodes < 7 {
        return Err(Error::GridTooCoarse { nodes, required: 7 });
    }
    let h = curve.step();
    let a = curve.values();
    let j = block_j(curve.half_dim());
    let mut worst: f64 = 0.0;
    for i in 1..nodes - 1 {
        let acc = (&a[i + 1] - &a[i] * 2.0 + &a[i - 1]) / (h * h);
        let r = (&a[i] * &acc * &a[i] + &j * &acc * &j).norm();
        worst = worst.max(r);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::{expm, SpectralTolerance};
    use crate::sympgroup::{project_sp_h, sample_positive, sample_sp_algebra, seeded_rng, Parity};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn tol() -> SpectralTolerance {
        SpectralTolerance::default()
    }

    fn random_symmetric(rng: &mut impl Rng, d: usize) -> RealMatrix {
        symmetrize(&RealMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal)))
    }

    #[test]
    fn pi_examples() {
        let id = PositiveSymplectic::identity(2, tol());
        let out = pi_g(&id, &RealMatrix::identity(4, 4)).unwrap();
        assert!(out.norm() < 1e-15);
        let mut rng = seeded_rng(31);
        for _ in 0..10 {
            let g = sample_positive(&mut rng, 2, 2.0, tol()).unwrap();
            let s = sample_sp_algebra(&mut rng, 2, Parity::Hermitian, 1.0).unwrap();
            let gh = g.sqrt().unwrap();
            let v = &gh * s.matrix() * &gh;
            assert!((pi_g(&g, &v).unwrap() - &v).norm() < 1e-10 * (1.0 + v.norm()));
            let x = random_symmetric(&mut rng, 4);
            let y = random_symmetric(&mut rng, 4);
            let once = pi_g(&g, &x).unwrap();
            let twice = pi_g(&g, &once).unwrap();
            assert!((&once - twice).norm() < 1e-10 * (1.0 + once.norm()));
            let lhs = once.dot(&y);
            let rhs = x.dot(&pi_g(&g.inverse(), &y).unwrap());
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn projection_at_identity_is_project_sp_h() {
        let mut rng = seeded_rng(32);
        let id = PositiveSymplectic::identity(2, tol());
        let x = random_symmetric(&mut rng, 4);
        let e = tangent_project_e(&id, &x).unwrap();
        let p = project_sp_h(&x, &tol()).unwrap();
        assert!((e - p.matrix()).norm() < 1e-12);
    }

    #[test]
    fn projection_fixes_tangent_vectors_and_is_orthogonal() {
        let mut rng = seeded_rng(33);
        for n in 1..=3 {
            let g = sample_positive(&mut rng, n, 2.0, tol()).unwrap();
            let s = sample_sp_algebra(&mut rng, n, Parity::Hermitian, 1.0).unwrap();
            let gh = g.sqrt().unwrap();
            let v = &gh * s.matrix() * &gh;
            let e = tangent_project_e(&g, &v).unwrap();
            assert!((&e - &v).norm() < 1e-9 * (1.0 + v.norm()));

            let x = random_symmetric(&mut rng, 2 * n);
            let w = tangent_project_e(&g, &x).unwrap();
            let w2 = tangent_project_e(&g, &w).unwrap();
            assert!((&w - &w2).norm() < 1e-9 * (1.0 + w.norm()));
            assert!(positive_tangent_residual(&g, &w).unwrap() < 1e-9 * (1.0 + w.norm()));
            // x - w is orthogonal to Pi_g(e_k) for every basis element e_k
            let d = 2 * n;
            let m = d * (d + 1) / 2;
            let mut unit = vec![0.0; m];
            for k in 0..m {
                unit[k] = 1.0;
                let t = pi_g(&g, &vec_to_sym(&unit, d)).unwrap();
                unit[k] = 0.0;
                assert!((&x - &w).dot(&t).abs() < 1e-9 * (1.0 + x.norm() * t.norm()));
            }
        }
    }

    #[test]
    fn ambient_metric_checks_tangency() {
        let mut rng = seeded_rng(34);
        let g = sample_positive(&mut rng, 2, 1.0, tol()).unwrap();
        let s = sample_sp_algebra(&mut rng, 2, Parity::Hermitian, 1.0).unwrap();
        let gh = g.sqrt().unwrap();
        let v = &gh * s.matrix() * &gh;
        assert!((metric_ambient(&g, &v).unwrap() - v.norm()).abs() < 1e-15);
        assert!(matches!(
            metric_ambient(&g, &RealMatrix::identity(4, 4)),
            Err(Error::NotTangent { .. })
        ));
    }

    #[test]
    fn ambient_residual_cases() {
        let constant = SampledCurve::from_fn(8, ManifoldTag::PositiveSymplectic, tol(), |_| {
            Ok(RealMatrix::identity(2, 2))
        })
        .unwrap();
        assert_eq!(ambient_residual(&constant).unwrap(), 0.0);

        let short = SampledCurve::from_fn(5, ManifoldTag::PositiveSymplectic, tol(), |_| {
            Ok(RealMatrix::identity(2, 2))
        })
        .unwrap();
        assert!(matches!(ambient_residual(&short), Err(Error::GridTooCoarse { .. })));

        // e^{ts} with s = diag(1, -1): residual is s^2 (e^{3ts} - e^{-ts}) in
        // exact arithmetic; largest at the last interior node
        let s = RealMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let curve = SampledCurve::from_fn(64, ManifoldTag::PositiveSymplectic, tol(), |t| {
            Ok(symmetrize(&expm(&(&s * t))?))
        })
        .unwrap();
        let r = ambient_residual(&curve).unwrap();
        let t: f64 = 63.0 / 64.0;
        let first = (3.0 * t).exp() - (-t).exp();
        let second = t.exp() - (-3.0 * t).exp();
        let exact = first.hypot(second);
        assert!((r - exact).abs() < 1e-3 * exact, "{r} vs {exact}");
    }
}
