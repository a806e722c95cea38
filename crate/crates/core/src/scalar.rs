//! Scalar abstraction shared by every numerical kernel in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar the solver stack is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + for<'a> Sum<&'a Self>
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Falling factorial `p (p-1) ... (p-k+1)`, zero when `k > p`.
pub(crate) fn falling(p: usize, k: usize) -> usize {
    if k > p {
        return 0;
    }
    ((p - k + 1)..=p).product()
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    falling(n, k) / falling(k, k)
}

/// Integer power with a possibly negative base, `x^0 = 1` including `0^0`.
#[inline]
pub(crate) fn ipow<T: Real>(x: T, e: usize) -> T {
    let mut acc = T::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}
