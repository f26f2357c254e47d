use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// Real scalar used by the channel, density-evolution and exponent code.
///
/// Implemented for `f32` and `f64`. Exact quantities (rate loss, census
/// multiplicities) use big integers and rationals instead.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits the scalar type")
    }

    /// Base-2 binary entropy, with h(0) = h(1) = 0.
    fn h2(self) -> Self {
        let one = Self::one();
        if self <= Self::zero() || self >= one {
            return Self::zero();
        }
        -(self * self.log2()) - (one - self) * (one - self).log2()
    }
}

impl Real for f32 {}
impl Real for f64 {}
