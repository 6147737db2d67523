//! The four Riemannian structures on the symplectic group and its positive part.
//!
//! | kind | lives on | norm of a tangent vector |
//! |------|----------|--------------------------|
//! | [`MetricKind::LeftInvariant`] | `Sp` | `||g^{-1} v||_2` |
//! | [`MetricKind::PositiveCone`] | `Sp+` | `||a^{-1/2} x a^{-1/2}||_2` |
//! | [`MetricKind::PositiveAmbient`] | `Sp+` | `||x||_2` |
//! | [`MetricKind::PolarProduct`] | `Sp` via `g -> (u, |g|)` | `(||x||_2^2 + p(|g|, y)^2)^{1/2}` |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

mod ambient;
mod left;
mod polar;
mod positive;

pub use ambient::{
    ambient_residual, metric_ambient, pi_g, positive_tangent_residual, tangent_project_e,
};
pub use left::{
    christoffel_left, covariant_derivative_left, exp_left, left_speed, metric_left, spray_left,
    FieldSamples,
};
pub use polar::{
    comparison_constant, dist_polar, dist_unitary, geodesic_polar, metric_polar, PolarGeodesic,
};
pub use positive::{
    dist_positive, emi_gap, geodesic_positive, log_euclidean_distance, metric_positive,
    positive_speed, PositiveGeodesic,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    LeftInvariant,
    PositiveCone,
    PositiveAmbient,
    PolarProduct,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::LeftInvariant,
        MetricKind::PositiveCone,
        MetricKind::PositiveAmbient,
        MetricKind::PolarProduct,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MetricKind::LeftInvariant => "left_invariant",
            MetricKind::PositiveCone => "positive_cone",
            MetricKind::PositiveAmbient => "positive_ambient",
            MetricKind::PolarProduct => "polar_product",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "left" | "left_invariant" => Ok(MetricKind::LeftInvariant),
            "positive" | "positive_cone" => Ok(MetricKind::PositiveCone),
            "ambient" | "positive_ambient" => Ok(MetricKind::PositiveAmbient),
            "polar" | "polar_product" => Ok(MetricKind::PolarProduct),
            other => Err(Error::InvalidParameter(format!("unknown metric '{other}'"))),
        }
    }
}
