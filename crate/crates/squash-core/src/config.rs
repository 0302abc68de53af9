use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

/// Numeric tolerances used across the library. One record so callers can
/// override them in a single place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute tolerance on unit-scale geometry.
    pub abs: f64,
    /// Relative determinant threshold below which a simplex counts as degenerate.
    pub degenerate: f64,
    /// Half-width of the band around zero where N . n is treated as vertical.
    pub vertical_dot: f64,
    /// An angle within this of pi/2 counts as vertical.
    pub vertical_angle: f64,
    /// Circumcenters with |alt| below this violate genericity.
    pub genericity: f64,
    /// Bisection stops once the bracket is this short.
    pub bisection: f64,
    /// Residual at which implicit projection counts as converged.
    pub newton_residual: f64,
    /// Merge gap for 1-D interval unions.
    pub interval_merge: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abs: 1e-10,
            degenerate: 1e-14,
            vertical_dot: 1e-9,
            vertical_angle: 1e-7,
            genericity: 1e-9,
            bisection: 1e-10,
            newton_residual: 1e-12,
            interval_merge: 1e-9,
        }
    }
}

/// Whether data-parallel loops fan out over rayon or run on the calling thread.
/// Without the `parallel` feature both variants run sequentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Serializes infinities as JSON null and reads null back as +inf.
pub(crate) mod float_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
