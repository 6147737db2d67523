//! Sampled curves on a uniform grid of `[0, 1]`, their numerical length under
//! each metric, and endpoint-fixed perturbations used as competitors in
//! minimality experiments.
//!
//! Velocities come from second-order finite differences (central inside,
//! one-sided at the endpoints) and speeds are integrated with composite
//! Simpson for an even number of intervals, trapezoid otherwise. The length
//! error is `O(h^2)` with `h = 1/N`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matfun::{
    check_real_matrix, expm, polar_decompose, symmetrize, RealMatrix, SpectralTolerance,
};
use crate::metrics::{exp_left, left_speed, positive_speed, MetricKind, PolarGeodesic, PositiveGeodesic};
use crate::sympgroup::{
    child_seed, is_sp_algebra, is_symplectic, sample_sp_algebra, seeded_rng, standard_j, Parity,
    PositiveSymplectic, SymplecticElement, UnitaryJ,
};

/// Smallest number of intervals a curve may have.
pub const MIN_INTERVALS: usize = 4;

const GRID_TOLERANCE: f64 = 1e-12;

/// Which membership predicate the values of a curve satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldTag {
    Symplectic,
    PositiveSymplectic,
    UnitaryJ,
    /// No constraint; used for vector fields along a curve.
    Free,
}

impl ManifoldTag {
    /// True for tags whose values are symplectic matrices.
    pub fn is_symplectic(&self) -> bool {
        !matches!(self, ManifoldTag::Free)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ManifoldTag::Symplectic => "symplectic",
            ManifoldTag::PositiveSymplectic => "positive_symplectic",
            ManifoldTag::UnitaryJ => "unitary_j",
            ManifoldTag::Free => "free",
        }
    }
}

impl fmt::Display for ManifoldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ManifoldTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symplectic" => Ok(ManifoldTag::Symplectic),
            "positive_symplectic" | "positive" => Ok(ManifoldTag::PositiveSymplectic),
            "unitary_j" | "unitaryj" | "unitary" => Ok(ManifoldTag::UnitaryJ),
            "free" => Ok(ManifoldTag::Free),
            other => Err(Error::InvalidParameter(format!("unknown manifold '{other}'"))),
        }
    }
}

fn check_member(value: &RealMatrix, tag: ManifoldTag, tol: &SpectralTolerance) -> Result<()> {
    match tag {
        ManifoldTag::Symplectic => {
            let n = check_real_matrix(value)?;
            let check = is_symplectic(value, &standard_j(n)?, tol)?;
            if !check.pass {
                return Err(Error::NotSymplectic {
                    residual: check.residual,
                });
            }
        }
        ManifoldTag::PositiveSymplectic => {
            PositiveSymplectic::new(value.clone(), *tol)?;
        }
        ManifoldTag::UnitaryJ => {
            UnitaryJ::new(value.clone(), *tol)?;
        }
        ManifoldTag::Free => {
            check_real_matrix(value)?;
        }
    }
    Ok(())
}

/// Values of a path at `N + 1` uniformly spaced parameters `i / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    grid: Vec<f64>,
    values: Vec<RealMatrix>,
    tag: ManifoldTag,
    tol: SpectralTolerance,
}

impl SampledCurve {
    /// Validates the grid (uniform, from 0 to 1, at least [`MIN_INTERVALS`]
    /// intervals) and the membership of every value.
    pub fn new(
        grid: Vec<f64>,
        values: Vec<RealMatrix>,
        tag: ManifoldTag,
        tol: SpectralTolerance,
    ) -> Result<Self> {
        tol.validate()?;
        if grid.len() != values.len() {
            return Err(Error::InvalidCurve(format!(
                "grid has {} nodes but there are {} values",
                grid.len(),
                values.len()
            )));
        }
        let nodes = grid.len();
        if nodes < MIN_INTERVALS + 1 {
            return Err(Error::GridTooCoarse {
                nodes,
                required: MIN_INTERVALS + 1,
            });
        }
        let intervals = (nodes - 1) as f64;
        for (i, &t) in grid.iter().enumerate() {
            if !t.is_finite() || (t - i as f64 / intervals).abs() > GRID_TOLERANCE {
                return Err(Error::InvalidCurve(format!(
                    "grid node {i} is {t}, expected {}",
                    i as f64 / intervals
                )));
            }
        }
        if grid[0] != 0.0 || grid[nodes - 1] != 1.0 {
            return Err(Error::InvalidCurve("grid must start at 0 and end at 1".into()));
        }
        check_real_matrix(&values[0])?;
        let dim = values[0].nrows();
        for value in &values {
            if value.nrows() != dim || value.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: value.nrows().max(value.ncols()),
                });
            }
            check_member(value, tag, &tol)?;
        }
        Ok(Self {
            grid,
            values,
            tag,
            tol,
        })
    }

    /// Tabulates `f` at `i / intervals` for `i = 0..=intervals`.
    pub fn from_fn<F>(intervals: usize, tag: ManifoldTag, tol: SpectralTolerance, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<RealMatrix>,
    {
        if intervals < MIN_INTERVALS {
            return Err(Error::GridTooCoarse {
                nodes: intervals + 1,
                required: MIN_INTERVALS + 1,
            });
        }
        let grid = uniform_grid(intervals);
        let values = grid.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        Self::new(grid, values, tag, tol)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[RealMatrix] {
        &self.values
    }

    pub fn into_values(self) -> Vec<RealMatrix> {
        self.values
    }

    pub fn tag(&self) -> ManifoldTag {
        self.tag
    }

    pub fn tol(&self) -> &SpectralTolerance {
        &self.tol
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    /// Grid spacing `1 / N`.
    pub fn step(&self) -> f64 {
        1.0 / self.intervals() as f64
    }

    pub fn dim(&self) -> usize {
        self.values[0].nrows()
    }

    pub fn half_dim(&self) -> usize {
        self.dim() / 2
    }

    pub fn first(&self) -> &RealMatrix {
        &self.values[0]
    }

    pub fn last(&self) -> &RealMatrix {
        &self.values[self.values.len() - 1]
    }
}

/// `i / intervals` for `i = 0..=intervals`, with exact endpoints.
pub fn uniform_grid(intervals: usize) -> Vec<f64> {
    (0..=intervals).map(|i| i as f64 / intervals as f64).collect()
}

/// Input for [`sample_closed_form`].
#[derive(Debug, Clone)]
pub enum GeodesicData {
    /// Start point and left-translated initial velocity, for the left-invariant metric.
    Initial {
        start: SymplecticElement,
        velocity: RealMatrix,
    },
    /// Two endpoints, for the positive-cone and polar metrics.
    Endpoints {
        start: SymplecticElement,
        end: SymplecticElement,
    },
}

/// Tabulates the closed-form geodesic of `kind` at `i / intervals`.
pub fn sample_closed_form(kind: MetricKind, data: &GeodesicData, intervals: usize) -> Result<SampledCurve> {
    match (kind, data) {
        (MetricKind::LeftInvariant, GeodesicData::Initial { start, velocity }) => {
            SampledCurve::from_fn(intervals, ManifoldTag::Symplectic, *start.tol(), |t| {
                Ok(exp_left(start, velocity, t)?.into_matrix())
            })
        }
        (MetricKind::PositiveCone, GeodesicData::Endpoints { start, end }) => {
            let tol = *start.tol();
            let p = PositiveSymplectic::new(start.matrix().clone(), tol)?;
            let q = PositiveSymplectic::new(end.matrix().clone(), tol)?;
            let geodesic = PositiveGeodesic::new(&p, &q)?;
            SampledCurve::from_fn(intervals, ManifoldTag::PositiveSymplectic, tol, |t| geodesic.matrix_at(t))
        }
        (MetricKind::PolarProduct, GeodesicData::Endpoints { start, end }) => {
            let geodesic = PolarGeodesic::new(start, end)?;
            SampledCurve::from_fn(intervals, ManifoldTag::Symplectic, *start.tol(), |t| geodesic.matrix_at(t))
        }
        (MetricKind::PositiveAmbient, _) => Err(Error::NoClosedForm("ambient geodesic")),
        (MetricKind::LeftInvariant, GeodesicData::Endpoints { .. }) => {
            Err(Error::NoClosedForm("left-invariant geodesic between two endpoints"))
        }
        (_, GeodesicData::Initial { .. }) => Err(Error::InvalidParameter(format!(
            "the {kind} geodesic is sampled from endpoints"
        ))),
    }
}

/// Second-order finite-difference derivative of a sequence on a uniform grid.
pub fn finite_difference(values: &[RealMatrix], h: f64) -> Result<Vec<RealMatrix>> {
    let nodes = values.len();
    if nodes < 3 {
        return Err(Error::GridTooCoarse { nodes, required: 3 });
    }
    let mut out = Vec::with_capacity(nodes);
    out.push((&values[1] * 4.0 - &values[0] * 3.0 - &values[2]) / (2.0 * h));
    for i in 1..nodes - 1 {
        out.push((&values[i + 1] - &values[i - 1]) / (2.0 * h));
    }
    out.push((&values[nodes - 1] * 3.0 - &values[nodes - 2] * 4.0 + &values[nodes - 3]) / (2.0 * h));
    Ok(out)
}

/// Composite Simpson for an even number of intervals, trapezoid otherwise.
pub fn integrate(samples: &[f64], h: f64) -> f64 {
    let intervals = samples.len().saturating_sub(1);
    if intervals == 0 {
        return 0.0;
    }
    if intervals.is_multiple_of(2) {
        let mut sum = samples[0] + samples[intervals];
        for (i, s) in samples.iter().enumerate().take(intervals).skip(1) {
            sum += if i % 2 == 1 { 4.0 * s } else { 2.0 * s };
        }
        sum * h / 3.0
    } else {
        let inner: f64 = samples[1..intervals].iter().sum();
        h * (inner + 0.5 * (samples[0] + samples[intervals]))
    }
}

fn require_tag(curve: &SampledCurve, kind: MetricKind, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidCurve(format!(
            "{kind} length is not defined for a {} curve",
            curve.tag()
        )))
    }
}

/// Node-wise speeds of `curve` under `kind`.
pub fn curve_speeds(curve: &SampledCurve, kind: MetricKind) -> Result<Vec<f64>> {
    let h = curve.step();
    let tol = curve.tol();
    let values = curve.values();
    match kind {
        MetricKind::LeftInvariant => {
            require_tag(curve, kind, curve.tag().is_symplectic())?;
            let velocity = finite_difference(values, h)?;
            Ok(values.iter().zip(&velocity).map(|(g, v)| left_speed(g, v)).collect())
        }
        MetricKind::PositiveCone => {
            require_tag(curve, kind, curve.tag() == ManifoldTag::PositiveSymplectic)?;
            let velocity = finite_difference(values, h)?;
            values
                .iter()
                .zip(&velocity)
                .map(|(a, x)| positive_speed(a, &symmetrize(x), tol))
                .collect()
        }
        MetricKind::PositiveAmbient => {
            require_tag(curve, kind, curve.tag() == ManifoldTag::PositiveSymplectic)?;
            let velocity = finite_difference(values, h)?;
            Ok(velocity.iter().map(|x| x.norm()).collect())
        }
        MetricKind::PolarProduct => {
            require_tag(curve, kind, curve.tag().is_symplectic())?;
            let mut unitary = Vec::with_capacity(values.len());
            let mut positive = Vec::with_capacity(values.len());
            for g in values {
                let factors = polar_decompose(g, tol)?;
                unitary.push(factors.unitary);
                positive.push(factors.positive);
            }
            let du = finite_difference(&unitary, h)?;
            let dp = finite_difference(&positive, h)?;
            positive
                .iter()
                .zip(du.iter().zip(&dp))
                .map(|(p, (x, y))| Ok(x.norm().hypot(positive_speed(p, &symmetrize(y), tol)?)))
                .collect()
        }
    }
}

/// Numerical length `int_0^1 b(alpha(t), alpha'(t)) dt` under `kind`.
pub fn curve_length(curve: &SampledCurve, kind: MetricKind) -> Result<f64> {
    if curve.intervals() < MIN_INTERVALS {
        return Err(Error::GridTooCoarse {
            nodes: curve.len(),
            required: MIN_INTERVALS + 1,
        });
    }
    let speeds = curve_speeds(curve, kind)?;
    Ok(integrate(&speeds, curve.step()))
}

fn bump(curve: &SampledCurve, i: usize) -> f64 {
    if i == 0 || i == curve.intervals() {
        0.0
    } else {
        (std::f64::consts::PI * curve.grid()[i]).sin()
    }
}

/// Endpoint-fixed variation by the bump `exp(amplitude sin(pi t) direction)`.
///
/// Symplectic and unitary curves are right-multiplied by the factor, positive
/// curves are moved by congruence `e a e^T`. The direction must lie in the
/// algebra, and for unitary curves it must also be anti-Hermitian.
pub fn perturb_curve(curve: &SampledCurve, direction: &RealMatrix, amplitude: f64) -> Result<SampledCurve> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "amplitude must be finite and non-negative, got {amplitude}"
        )));
    }
    let tag = curve.tag();
    if tag == ManifoldTag::Free {
        return Err(Error::InvalidCurve("cannot perturb a free curve".into()));
    }
    if direction.nrows() != curve.dim() || direction.ncols() != curve.dim() {
        return Err(Error::DimensionMismatch {
            expected: curve.dim(),
            found: direction.nrows().max(direction.ncols()),
        });
    }
    let check = is_sp_algebra(direction, &standard_j(curve.half_dim())?, curve.tol())?;
    let parity = if tag == ManifoldTag::UnitaryJ {
        Parity::AntiHermitian
    } else {
        Parity::General
    };
    if !check.satisfies(parity) {
        return Err(Error::NotInAlgebra {
            residual: check.residual,
        });
    }
    if amplitude == 0.0 {
        return Ok(curve.clone());
    }
    let mut values = Vec::with_capacity(curve.len());
    for (i, value) in curve.values().iter().enumerate() {
        let s = bump(curve, i);
        if s == 0.0 {
            values.push(value.clone());
            continue;
        }
        let e = expm(&(direction * (amplitude * s)))?;
        values.push(match tag {
            ManifoldTag::PositiveSymplectic => symmetrize(&(&e * value * e.transpose())),
            _ => value * e,
        });
    }
    SampledCurve::new(curve.grid().to_vec(), values, tag, *curve.tol())
}

/// Unit-norm perturbation direction suitable for curves with tag `tag`.
pub fn random_direction(tag: ManifoldTag, n: usize, seed: u64) -> Result<RealMatrix> {
    let parity = match tag {
        ManifoldTag::UnitaryJ => Parity::AntiHermitian,
        ManifoldTag::Free => return Err(Error::InvalidCurve("cannot perturb a free curve".into())),
        _ => Parity::General,
    };
    Ok(sample_sp_algebra(&mut seeded_rng(seed), n, parity, 1.0)?.into_matrix())
}

/// `count` competitors of `curve`, the `k`-th using the direction drawn from
/// `child_seed(seed, k)`.
pub fn competitors(curve: &SampledCurve, count: usize, amplitude: f64, seed: u64) -> Result<Vec<SampledCurve>> {
    (0..count as u64)
        .map(|k| {
            let direction = random_direction(curve.tag(), curve.half_dim(), child_seed(seed, k))?;
            perturb_curve(curve, &direction, amplitude)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{dist_polar, dist_positive};
    use crate::sympgroup::{sample_positive, sample_symplectic, sample_unitary};
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use std::f64::consts::{E, SQRT_2};

    fn tol() -> SpectralTolerance {
        SpectralTolerance::default()
    }

    fn diag(values: &[f64]) -> RealMatrix {
        RealMatrix::from_diagonal(&DVector::from_row_slice(values))
    }

    fn endpoints(p: &RealMatrix, q: &RealMatrix) -> GeodesicData {
        GeodesicData::Endpoints {
            start: SymplecticElement::new(p.clone(), tol()).unwrap(),
            end: SymplecticElement::new(q.clone(), tol()).unwrap(),
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let id = RealMatrix::identity(2, 2);
        let short = SampledCurve::new(uniform_grid(3), vec![id.clone(); 4], ManifoldTag::Symplectic, tol());
        assert!(matches!(short, Err(Error::GridTooCoarse { .. })));
        let mut grid = uniform_grid(4);
        grid[2] = 0.6;
        let uneven = SampledCurve::new(grid, vec![id.clone(); 5], ManifoldTag::Symplectic, tol());
        assert!(matches!(uneven, Err(Error::InvalidCurve(_))));
        let mismatch = SampledCurve::new(uniform_grid(4), vec![id.clone(); 4], ManifoldTag::Symplectic, tol());
        assert!(matches!(mismatch, Err(Error::InvalidCurve(_))));
        let not_symplectic = SampledCurve::from_fn(4, ManifoldTag::Symplectic, tol(), |t| Ok(&id * (1.0 + t)));
        assert!(matches!(not_symplectic, Err(Error::NotSymplectic { .. })));
    }

    #[test]
    fn positive_sampling_matches_powers() {
        let q = diag(&[E, 1.0 / E]);
        let curve = sample_closed_form(MetricKind::PositiveCone, &endpoints(&RealMatrix::identity(2, 2), &q), 4).unwrap();
        for (i, value) in curve.values().iter().enumerate() {
            let s = i as f64 / 4.0;
            assert!((value - diag(&[s.exp(), (-s).exp()])).norm() < 1e-14);
        }
    }

    #[test]
    fn left_sampling_with_zero_velocity_is_constant() {
        let data = GeodesicData::Initial {
            start: SymplecticElement::identity(2, tol()),
            velocity: RealMatrix::zeros(4, 4),
        };
        let curve = sample_closed_form(MetricKind::LeftInvariant, &data, 8).unwrap();
        for value in curve.values() {
            assert_eq!(value, &RealMatrix::identity(4, 4));
        }
        assert_eq!(curve_length(&curve, MetricKind::LeftInvariant).unwrap(), 0.0);
    }

    #[test]
    fn polar_sampling_of_positive_endpoint_matches_positive() {
        let mut rng = seeded_rng(51);
        let g = sample_positive(&mut rng, 2, 1.5, tol()).unwrap();
        let data = endpoints(&RealMatrix::identity(4, 4), g.matrix());
        let polar = sample_closed_form(MetricKind::PolarProduct, &data, 16).unwrap();
        let positive = sample_closed_form(MetricKind::PositiveCone, &data, 16).unwrap();
        for (a, b) in polar.values().iter().zip(positive.values()) {
            assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn sampling_rejects_missing_closed_forms() {
        let data = endpoints(&RealMatrix::identity(2, 2), &RealMatrix::identity(2, 2));
        assert!(matches!(
            sample_closed_form(MetricKind::PositiveAmbient, &data, 8),
            Err(Error::NoClosedForm(_))
        ));
        assert!(matches!(
            sample_closed_form(MetricKind::LeftInvariant, &data, 8),
            Err(Error::NoClosedForm(_))
        ));
    }

    #[test]
    fn quadrature_of_known_lengths() {
        let q = diag(&[E, 1.0 / E]);
        let data = endpoints(&RealMatrix::identity(2, 2), &q);
        let curve = sample_closed_form(MetricKind::PositiveCone, &data, 64).unwrap();
        let length = curve_length(&curve, MetricKind::PositiveCone).unwrap();
        assert!((length - SQRT_2).abs() < 1e-4);

        let mut rng = seeded_rng(52);
        let (x, y) = crate::sympgroup::sample_normal_sp(&mut rng, 1, 1.0, tol()).unwrap();
        let v = x.matrix() + y.matrix();
        let curve = SampledCurve::from_fn(64, ManifoldTag::Symplectic, tol(), |t| expm(&(&v * t))).unwrap();
        let length = curve_length(&curve, MetricKind::LeftInvariant).unwrap();
        assert!((length - v.norm()).abs() < 1e-4);

        let constant = SampledCurve::from_fn(7, ManifoldTag::PositiveSymplectic, tol(), |_| Ok(q.clone())).unwrap();
        for kind in MetricKind::ALL {
            assert!(curve_length(&constant, kind).unwrap() < 1e-14);
        }
    }

    #[test]
    fn quadrature_error_is_second_order() {
        let mut rng = seeded_rng(53);
        for _ in 0..5 {
            let p = sample_symplectic(&mut rng, 2, 1.5, tol()).unwrap();
            let q = sample_symplectic(&mut rng, 2, 1.5, tol()).unwrap();
            let data = GeodesicData::Endpoints { start: p.clone(), end: q.clone() };
            let exact = dist_polar(&p, &q).unwrap();
            let errors: Vec<f64> = [16, 32, 64]
                .iter()
                .map(|&n| {
                    let c = sample_closed_form(MetricKind::PolarProduct, &data, n).unwrap();
                    (curve_length(&c, MetricKind::PolarProduct).unwrap() - exact).abs()
                })
                .collect();
            assert!(errors[0] / errors[1] > 3.5 && errors[1] / errors[2] > 3.5, "{errors:?}");
        }
    }

    #[test]
    fn odd_grids_use_trapezoid() {
        let samples = [1.0, 2.0, 3.0, 4.0];
        assert_relative_eq!(integrate(&samples, 1.0 / 3.0), 2.5, epsilon = 1e-15);
        let samples: Vec<f64> = uniform_grid(4).iter().map(|t| t * t).collect();
        assert_relative_eq!(integrate(&samples, 0.25), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn frozen_unitary_part_gives_positive_length() {
        let mut rng = seeded_rng(54);
        let u = sample_unitary(&mut rng, 2, 2.0, tol()).unwrap();
        let p = sample_positive(&mut rng, 2, 1.5, tol()).unwrap();
        let q = sample_positive(&mut rng, 2, 1.5, tol()).unwrap();
        let geodesic = PositiveGeodesic::new(&p, &q).unwrap();
        let positive = SampledCurve::from_fn(32, ManifoldTag::PositiveSymplectic, tol(), |t| geodesic.matrix_at(t)).unwrap();
        let product = SampledCurve::from_fn(32, ManifoldTag::Symplectic, tol(), |t| Ok(u.matrix() * geodesic.matrix_at(t)?)).unwrap();
        let lp = curve_length(&positive, MetricKind::PositiveCone).unwrap();
        let lq = curve_length(&product, MetricKind::PolarProduct).unwrap();
        assert!((lp - lq).abs() < 1e-10 * lp.max(1.0));
    }

    #[test]
    fn perturbation_keeps_endpoints() {
        let mut rng = seeded_rng(55);
        let p = sample_positive(&mut rng, 2, 1.5, tol()).unwrap();
        let q = sample_positive(&mut rng, 2, 1.5, tol()).unwrap();
        let data = endpoints(p.matrix(), q.matrix());
        let curve = sample_closed_form(MetricKind::PositiveCone, &data, 32).unwrap();
        let d = random_direction(ManifoldTag::PositiveSymplectic, 2, 9).unwrap();
        assert_eq!(perturb_curve(&curve, &d, 0.0).unwrap(), curve);
        let bumped = perturb_curve(&curve, &d, 0.3).unwrap();
        assert_eq!(bumped.first(), curve.first());
        assert_eq!(bumped.last(), curve.last());
        assert!((bumped.values()[16].clone() - &curve.values()[16]).norm() > 1e-3);
        let exact = dist_positive(&p, &q).unwrap();
        for competitor in competitors(&curve, 8, 0.3, 3).unwrap() {
            assert!(curve_length(&competitor, MetricKind::PositiveCone).unwrap() >= exact - 1e-6);
        }
        assert!(perturb_curve(&curve, &d, -1.0).is_err());
    }

    #[test]
    fn unitary_perturbation_needs_anti_hermitian_direction() {
        let mut rng = seeded_rng(56);
        let u = sample_unitary(&mut rng, 2, 1.0, tol()).unwrap();
        let curve = SampledCurve::from_fn(8, ManifoldTag::UnitaryJ, tol(), |t| {
            Ok(u.matrix() * expm(&(u.log()? * t))?)
        })
        .unwrap();
        let general = random_direction(ManifoldTag::Symplectic, 2, 1).unwrap();
        assert!(matches!(perturb_curve(&curve, &general, 0.2), Err(Error::NotInAlgebra { .. })));
        let anti = random_direction(ManifoldTag::UnitaryJ, 2, 1).unwrap();
        let bumped = perturb_curve(&curve, &anti, 0.2).unwrap();
        assert_eq!(bumped.tag(), ManifoldTag::UnitaryJ);
    }
}
