use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Real coefficient type used by Pauli sums and transfer matrices.
pub trait Scalar: Float + FromPrimitive + NumAssign + Default + Debug + Display + Send + Sync + Sum + 'static {
    /// Coefficients smaller than this in magnitude are dropped when terms merge.
    fn drop_tolerance() -> Self;

    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 converts to every float type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn drop_tolerance() -> Self {
        1e-14
    }
}

impl Scalar for f32 {
    // 1e-14 is below f32 resolution for unit-scale coefficients; scale with epsilon.
    fn drop_tolerance() -> Self {
        1e-7
    }
}
