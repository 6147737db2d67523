use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    SuiteConfig, SuiteId, Trial, AMBIENT_COMPETITORS, CAUCHY_EPSILONS, COMPETITORS,
    COMPETITOR_AMPLITUDE, LENGTH_SLACK, NORMAL_TIMES,
};
use crate::curves::{
    competitors, curve_length, sample_closed_form, GeodesicData, ManifoldTag, SampledCurve,
};
use crate::error::{Error, Result};
use crate::matfun::{
    commutator, expm, symmetrize, symmetry_residual, trace_inner, unitary_j_residual, RealMatrix,
};
use crate::metrics::{
    comparison_constant, covariant_derivative_left, dist_polar, dist_positive, dist_unitary,
    emi_gap, exp_left, pi_g, positive_tangent_residual, MetricKind, PolarGeodesic,
};
use crate::sympgroup::{
    global_section, group_action, is_sp_algebra, is_symplectic, sample_normal_sp,
    sample_positive, sample_sp_algebra, sample_symplectic, sample_unitary, standard_j,
    transporter, Parity, PolarPair, SymplecticElement,
};

/// Ratio `r(N) / r(2N)` is only required when `r(N)` exceeds this floor;
/// below it the residual is dominated by rounding.
pub(super) const ORDER_FLOOR: f64 = 1e-8;
const PROJECTION_TOL: f64 = 1e-10;
const RANGE_TOL: f64 = 1e-8;
const NORMAL_TOL: f64 = 1e-9;
const CAUCHY_SLACK: f64 = 1e-9;
const CHORD_SLACK: f64 = 1e-9;
/// The S3 velocity is capped at this fraction of the scale: the
/// finite-difference residual grows like `||v0||^3 h^2`.
const VELOCITY_FRACTION: f64 = 0.5;
const MAX_BRANCH_RESAMPLES: usize = 16;

pub(super) fn run(config: &SuiteConfig, index: usize, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    match config.suite {
        SuiteId::S1 => adjoint_polar(config, rng, trial),
        SuiteId::S2 => closure(config, rng, trial),
        SuiteId::S3 => left_parallel(config, rng, trial),
        SuiteId::S4 => positive_minimality(config, rng, trial),
        SuiteId::S5 => emi(config, rng, trial),
        SuiteId::S6 => projection(config, rng, trial),
        SuiteId::S7 => ambient_bound(config, rng, trial),
        SuiteId::S8 => polar_minimality(config, rng, trial),
        SuiteId::S9 => comparison(config, rng, trial),
        SuiteId::S10 => unitary_equivalence(config, rng, trial),
        SuiteId::S11 => normal_speed(config, rng, trial),
        SuiteId::S12 => cauchy_transfer(config, index, rng, trial),
        SuiteId::S13 => transitivity(config, rng, trial),
    }
}

fn radius(rng: &mut ChaCha8Rng, scale: f64) -> f64 {
    scale * rng.random::<f64>()
}

fn symplectic(rng: &mut ChaCha8Rng, config: &SuiteConfig) -> Result<SymplecticElement> {
    let r = radius(rng, config.scale);
    sample_symplectic(rng, config.n, r, config.tol)
}

fn positive(rng: &mut ChaCha8Rng, config: &SuiteConfig) -> Result<crate::sympgroup::PositiveSymplectic> {
    let r = radius(rng, config.scale);
    sample_positive(rng, config.n, r, config.tol)
}

fn algebra(rng: &mut ChaCha8Rng, config: &SuiteConfig, parity: Parity) -> Result<RealMatrix> {
    let r = radius(rng, config.scale);
    Ok(sample_sp_algebra(rng, config.n, parity, r)?.into_matrix())
}

fn symplectic_check(trial: &mut Trial, name: &str, m: &RealMatrix, config: &SuiteConfig) -> Result<()> {
    let check = is_symplectic(m, &standard_j(config.n)?, &config.tol)?;
    trial.membership(name, check);
    Ok(())
}

fn algebra_check(trial: &mut Trial, name: &str, m: &RealMatrix, config: &SuiteConfig) -> Result<()> {
    let check = is_sp_algebra(m, &standard_j(config.n)?, &config.tol)?;
    trial.at_most(name, check.residual, check.threshold);
    Ok(())
}

fn adjoint_polar(config: &SuiteConfig, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let g = symplectic(rng, config)?;
    trial.input("g", g.matrix());
    symplectic_check(trial, "adjoint_residual", &g.matrix().transpose(), config)?;
    let pair = PolarPair::of(&g)?;
    let u = pair.unitary.matrix();
    let p = pair.positive.matrix();
    trial.at_most(
        "unitary_residual",
        unitary_j_residual(u)?,
        config.tol.quadratic_threshold(u.norm()),
    );
    symplectic_check(trial, "positive_residual", p, config)?;
    trial.at_most(
        "positive_symmetry_residual",
        symmetry_residual(p),
        config.tol.linear_threshold(p.norm()),
    );
    let min_eigenvalue = p.clone().symmetric_eigenvalues().min();
    trial.at_least("positive_min_eigenvalue", min_eigenvalue, config.tol.pd_floor);
    trial.at_most(
        "reassembly_residual",
        (pair.reassemble() - g.matrix()).norm(),
        config.tol.linear_threshold(g.matrix().norm()),
    );
    Ok(())
}

fn closure(config: &SuiteConfig, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let g = symplectic(rng, config)?;
    let h = symplectic(rng, config)?;
    let x = algebra(rng, config, Parity::General)?;
    let y = algebra(rng, config, Parity::General)?;
    trial.input("g", g.matrix());
    trial.input("h", h.matrix());
    trial.input("x", &x);
    trial.input("y", &y);
    let gm = g.matrix();
    let inverse = g.inverse();
    symplectic_check(trial, "product_residual", &(gm * h.matrix()), config)?;
    symplectic_check(trial, "inverse_residual", inverse.matrix(), config)?;
    symplectic_check(trial, "transpose_residual", &gm.transpose(), config)?;
    symplectic_check(trial, "exp_residual", &expm(&x)?, config)?;
    let identity = RealMatrix::identity(gm.nrows(), gm.ncols());
    trial.at_most(
        "inverse_identity_residual",
        (inverse.matrix() * gm - identity).norm(),
        config.tol.quadratic_threshold(gm.norm()),
    );
    algebra_check(trial, "bracket_residual", &commutator(&x, &y), config)?;
    algebra_check(trial, "sum_residual", &(&x + &y), config)?;
    algebra_check(trial, "algebra_transpose_residual", &x.transpose(), config)?;
    algebra_check(trial, "adjoint_action_residual", &(gm * &x * inverse.matrix()), config)?;
    Ok(())
}

fn left_geodesic(g0: &SymplecticElement, v0: &RealMatrix, intervals: usize) -> Result<(SampledCurve, SampledCurve)> {
    let k = v0 - v0.transpose();
    let curve = sample_closed_form(
        MetricKind::LeftInvariant,
        &GeodesicData::Initial {
            start: g0.clone(),
            velocity: v0.clone(),
        },
        intervals,
    )?;
    let values: Vec<RealMatrix> = curve
        .values()
        .iter()
        .zip(curve.grid())
        .map(|(a, &t)| Ok(a * expm(&(&k * -t))? * v0 * expm(&(&k * t))?))
        .collect::<Result<_>>()?;
    let field = SampledCurve::new(curve.grid().to_vec(), values, ManifoldTag::Free, *g0.tol())?;
    Ok((curve, field))
}

fn left_parallel(config: &SuiteConfig, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let g0 = symplectic(rng, config)?;
    let r = radius(rng, VELOCITY_FRACTION * config.scale);
    let v0 = sample_sp_algebra(rng, config.n, Parity::General, r)?.into_matrix();
    trial.input("g0", g0.matrix());
    trial.input("v0", &v0);
    let (curve, field) = left_geodesic(&g0, &v0, config.grid)?;
    let coarse = covariant_derivative_left(&curve, &field)?.max_left_norm();
    let (curve, field) = left_geodesic(&g0, &v0, 2 * config.grid)?;
    let fine = covariant_derivative_left(&curve, &field)?.max_left_norm();
    trial.at_most("residual_coarse", coarse, 1e-3);
    trial.record("residual_fine", fine);
    if coarse > ORDER_FLOOR {
        trial.at_least("refinement_ratio", coarse / fine, 3.5);
    }
    Ok(())
}

fn positive_minimality(config: &SuiteConfig, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let p = positive(rng, config)?;
    let q = positive(rng, config)?;
    let bump_seed = rng.random::<u64>();
    trial.input("p", p.matrix());
    trial.input("q", q.matrix());
    let distance = dist_positive(&p, &q)?;
    let data = GeodesicData::Endpoints {
        start: p.to_symplectic(),
        end: q.to_symplectic(),
    };
    let geodesic = sample_closed_form(MetricKind::PositiveCone, &data, config.grid)?;
    trial.record("distance", distance);
    trial.record("geodesic_length", curve_length(&geodesic, MetricKind::PositiveCone)?);
    let mut shortest = f64::INFINITY;
    for competitor in competitors(&geodesic, COMPETITORS, COMPETITOR_AMPLITUDE, bump_seed)? {
        shortest = shortest.min(curve_length(&competitor, MetricKind::PositiveCone)?);
    }
    trial.at_least("shortest_competitor", shortest, distance - LENGTH_SLACK);
    Ok(())
}

fn emi(config: &SuiteConfig, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let x = algebra(rng, config, Parity::Hermitian)?;
    let y = sample_sp_algebra(rng, config.n, Parity::Hermitian, 1.0)?.into_matrix();
    trial.input("x", &x);
    trial.input("y", &y);
    trial.at_least("emi_gap", emi_gap(&x, &y)?, -1e-10);
    Ok(())
}

fn projection(config: &SuiteConfig, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let g = positive(rng, config)?;
    let dim = 2 * config.n;
    let mut symmetric = || {
        let m = symmetrize(&RealMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal)));
        let norm = m.norm();
        m / norm
    };
    let x = symmetric();
    let y = symmetric();
    trial.input("g", g.matrix());
    trial.input("x", &x);
    trial.input("y", &y);
    let px = pi_g(&g, &x)?;
    trial.at_most("idempotence_residual", (pi_g(&g, &px)? - &px).norm(), PROJECTION_TOL);
    let ginv = g.inverse();
    let lhs = trace_inner(&px, &y);
    let rhs = trace_inner(&x, &pi_g(&ginv, &y)?);
    trial.at_most("adjoint_residual", (lhs - rhs).abs(), PROJECTION_TOL);
    trial.at_most("range_residual", positive_tangent_residual(&g, &px)?, RANGE_TOL);
    Ok(())
}

fn ambient_bound(config: &SuiteConfig, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let a = positive(rng, config)?;
    let b = positive(rng, config)?;
    let bump_seed = rng.random::<u64>();
    trial.input("a", a.matrix());
    trial.input("b", b.matrix());
    let chord = (a.matrix() - b.matrix()).norm();
    let data = GeodesicData::Endpoints {
        start: a.to_symplectic(),
        end: b.to_symplectic(),
    };
    let geodesic = sample_closed_form(MetricKind::PositiveCone, &data, config.grid)?;
    let mut paths = vec![geodesic.clone()];
    paths.extend(competitors(&geodesic, AMBIENT_COMPETITORS - 1, COMPETITOR_AMPLITUDE, bump_seed)?);
    let mut shortest = f64::INFINITY;
    for path in &paths {
        shortest = shortest.min(curve_length(path, MetricKind::PositiveAmbient)?);
    }
    trial.record("chord", chord);
    trial.at_least("shortest_ambient_length", shortest, chord - LENGTH_SLACK);
    Ok(())
}

fn polar_minimality(config: &SuiteConfig, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let p = symplectic(rng, config)?;
    let q = symplectic(rng, config)?;
    let bump_seed = rng.random::<u64>();
    trial.input("p", p.matrix());
    trial.input("q", q.matrix());
    let distance = dist_polar(&p, &q)?;
    let pp = PolarPair::of(&p)?;
    let qq = PolarPair::of(&q)?;
    let by_parts = dist_unitary(&pp.unitary, &qq.unitary)?.hypot(dist_positive(&pp.positive, &qq.positive)?);
    trial.at_most(
        "formula_residual",
        (distance - by_parts).abs(),
        config.tol.linear_threshold(distance),
    );
    let data = GeodesicData::Endpoints { start: p, end: q };
    let geodesic = sample_closed_form(MetricKind::PolarProduct, &data, config.grid)?;
    let length = curve_length(&geodesic, MetricKind::PolarProduct)?;
    trial.record("geodesic_length", length);
    trial.record("distance", distance);
    let mut shortest = f64::INFINITY;
    for competitor in competitors(&geodesic, COMPETITORS, COMPETITOR_AMPLITUDE, bump_seed)? {
        shortest = shortest.min(curve_length(&competitor, MetricKind::PolarProduct)?);
    }
    trial.at_least("shortest_competitor", shortest, distance - LENGTH_SLACK);
    Ok(())
}

fn comparison(config: &SuiteConfig, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let p = symplectic(rng, config)?;
    let q = symplectic(rng, config)?;
    trial.input("p", p.matrix());
    trial.input("q", q.matrix());
    let geodesic = PolarGeodesic::new(&p, &q)?;
    let distance = geodesic.length();
    let c = comparison_constant(&p, &q)?;
    let curve = SampledCurve::from_fn(2 * config.grid, ManifoldTag::Symplectic, config.tol, |t| geodesic.matrix_at(t))?;
    let left_length = curve_length(&curve, MetricKind::LeftInvariant)?;
    trial.record("comparison_constant", c);
    trial.record("polar_distance", distance);
    trial.at_most("left_length", left_length, c * distance + LENGTH_SLACK);
    Ok(())
}

fn unitary_equivalence(config: &SuiteConfig, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let spread = PI * config.scale;
    for attempt in 0..=MAX_BRANCH_RESAMPLES {
        let r = radius(rng, spread);
        let u = sample_unitary(rng, config.n, r, config.tol)?;
        let r = radius(rng, spread);
        let v = sample_unitary(rng, config.n, r, config.tol)?;
        let d = match dist_unitary(&u, &v) {
            Err(Error::BranchAmbiguity { .. }) if attempt < MAX_BRANCH_RESAMPLES => continue,
            other => other?,
        };
        trial.input("u", u.matrix());
        trial.input("v", v.matrix());
        let chord = (u.matrix() - v.matrix()).norm();
        let lower = (1.0 - PI * PI / 12.0).sqrt() * d;
        trial.record("resamples", attempt as f64);
        trial.record("trace_distance", d);
        trial.at_least("chord_lower", chord, lower);
        trial.at_most("chord_upper", chord, d + CHORD_SLACK);
        return Ok(());
    }
    unreachable!("the last attempt either returns or propagates its error")
}

fn normal_speed(config: &SuiteConfig, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let r = radius(rng, config.scale);
    let (x, y) = sample_normal_sp(rng, config.n, r, config.tol)?;
    let v = x.matrix() + y.matrix();
    trial.input("v", &v);
    trial.record("normality_residual", commutator(&v, &v.transpose()).norm());
    let identity = SymplecticElement::identity(config.n, config.tol);
    let mut worst: f64 = 0.0;
    for t in NORMAL_TIMES {
        let a = exp_left(&identity, &v, t)?;
        worst = worst.max((a.matrix() - expm(&(&v * t))?).norm());
    }
    trial.at_most("max_deviation", worst, NORMAL_TOL);
    Ok(())
}

fn cauchy_transfer(config: &SuiteConfig, index: usize, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let eps = CAUCHY_EPSILONS[index % CAUCHY_EPSILONS.len()];
    let v = sample_sp_algebra(rng, config.n, Parity::General, eps)?.into_matrix();
    trial.input("v", &v);
    let identity = SymplecticElement::identity(config.n, config.tol);
    let g = exp_left(&identity, &v, 1.0)?;
    let deviation = (g.matrix() - RealMatrix::identity(2 * config.n, 2 * config.n)).norm();
    trial.record("epsilon", eps);
    trial.at_most("deviation", deviation, (3.0 * eps).exp() * eps + CAUCHY_SLACK);
    Ok(())
}

fn transitivity(config: &SuiteConfig, rng: &mut ChaCha8Rng, trial: &mut Trial) -> Result<()> {
    let a = positive(rng, config)?;
    let b = positive(rng, config)?;
    trial.input("a", a.matrix());
    trial.input("b", b.matrix());
    let g = transporter(&a, &b)?;
    symplectic_check(trial, "transporter_residual", g.matrix(), config)?;
    let moved = group_action(&g, &b)?;
    let scale = g.matrix().norm().powi(2) * b.matrix().norm();
    trial.at_most(
        "transport_residual",
        (moved.matrix() - a.matrix()).norm(),
        config.tol.linear_threshold(scale),
    );
    let back = transporter(&b, &a)?;
    let identity = RealMatrix::identity(2 * config.n, 2 * config.n);
    trial.at_most(
        "round_trip_residual",
        (back.matrix() * g.matrix() - &identity).norm(),
        config.tol.quadratic_threshold(g.matrix().norm().max(back.matrix().norm())),
    );
    let sigma = global_section(&a, &b)?;
    symplectic_check(trial, "section_residual", sigma.matrix(), config)?;
    let moved = group_action(&sigma, &a)?;
    let scale = sigma.matrix().norm().powi(2) * a.matrix().norm();
    trial.at_most(
        "section_transport_residual",
        (moved.matrix() - b.matrix()).norm(),
        config.tol.linear_threshold(scale),
    );
    let fixed = global_section(&a, &a)?;
    trial.at_most(
        "section_identity_residual",
        (fixed.matrix() - identity).norm(),
        config.tol.linear_threshold(a.matrix().norm()),
    );
    Ok(())
}
