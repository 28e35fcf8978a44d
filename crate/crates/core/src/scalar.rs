//! The scalar abstraction every numerical routine in the crate is written against.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::Serialize;

use crate::eigen::DenseEigen;

/// Real floating point scalar (`f32` or `f64`) together with the tolerances
/// the inequality checks use at that precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + DenseEigen
    + Send
    + Sync
    + 'static
{
    /// Relative slack accepted when checking an inequality `lhs <= rhs`.
    const CHECK_TOL: f64;
    /// Distance below which an eigenvalue is identified with an interval boundary.
    const BOUNDARY_TOL: f64;
    /// Residual tolerance for "this signal lies in the subspace" tests.
    const MEMBERSHIP_TOL: f64;

    /// Converts an `f64` literal. Panics only if the literal is not representable,
    /// which cannot happen for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn check_tol() -> Self {
        Self::lit(Self::CHECK_TOL)
    }

    fn boundary_tol() -> Self {
        Self::lit(Self::BOUNDARY_TOL)
    }

    fn membership_tol() -> Self {
        Self::lit(Self::MEMBERSHIP_TOL)
    }
}

impl Real for f64 {
    const CHECK_TOL: f64 = 1e-9;
    const BOUNDARY_TOL: f64 = 1e-10;
    const MEMBERSHIP_TOL: f64 = 1e-8;
}

impl Real for f32 {
    const CHECK_TOL: f64 = 1e-4;
    const BOUNDARY_TOL: f64 = 1e-5;
    const MEMBERSHIP_TOL: f64 = 1e-3;
}

/// `x^e`, exact when `e == 1`.
#[inline]
pub(crate) fn pow<T: Real>(x: T, e: T) -> T {
    if e == T::one() {
        x
    } else {
        x.powf(e)
    }
}

/// `x^(1/p)`, using `sqrt` for `p == 2` so closed forms compare bit-exactly.
#[inline]
pub(crate) fn root<T: Real>(x: T, p: T) -> T {
    if p == T::one() {
        x
    } else if p == T::lit(2.0) {
        x.sqrt()
    } else {
        x.powf(p.recip())
    }
}

/// Whether `lhs <= rhs` holds up to the relative slack `CHECK_TOL * max(1, rhs)`.
#[inline]
pub(crate) fn within_slack<T: Real>(lhs: T, rhs: T) -> bool {
    rhs - lhs >= -T::check_tol() * T::one().max(rhs.abs())
}

/// Serializes a scalar as a JSON number, writing non-finite values as the
/// strings `"inf"`, `"-inf"` and `"nan"`.
pub fn serialize_extended<T: Real, S: serde::Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    let v = x.as_f64();
    if v.is_finite() {
        s.serialize_f64(v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}
