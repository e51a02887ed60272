//! Scalar abstraction: the numerical core is generic over the floating type.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating scalar the solvers run on: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum<Self>
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum<Self>
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for embedding an `f64` literal into the working scalar type.
#[inline]
pub fn lit<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("literal not representable")
}

#[inline]
pub fn usize_f<F: Real>(n: usize) -> F {
    F::from_usize(n).expect("usize not representable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lit_roundtrip() {
        let x: f64 = lit(0.25);
        assert_eq!(x, 0.25);
        let y: f32 = lit(0.5);
        assert_eq!(y, 0.5f32);
    }
}
