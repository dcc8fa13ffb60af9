//! Scalar abstraction shared by every geometric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the construction and tracer are generic over.
///
/// Implemented for `f32` and `f64`. All tolerances quoted in the crate are
/// calibrated for `f64`; with `f32` they are floored at a small multiple of
/// the type's machine epsilon (see [`tol`]).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in scalar type")
}

/// A tolerance of `v`, never smaller than 64 ulps of one in `T`.
#[inline]
pub fn tol<T: Real>(v: f64) -> T {
    let floor = T::epsilon() * lit(64.0);
    let t = lit::<T>(v);
    if t < floor {
        floor
    } else {
        t
    }
}

/// Relative error of `value` against `reference`, guarded against a zero reference.
#[inline]
pub fn rel_err<T: Real>(value: T, reference: T) -> T {
    let denom = reference.abs().max(T::min_positive_value());
    (value - reference).abs() / denom
}
