//! Integer scalars.
//!
//! Every exact computation in the crate is generic over [`Scalar`]. The
//! default instantiation is [`num_bigint::BigInt`]; fixed-width types work
//! too, and arithmetic through the helpers below panics on overflow instead
//! of wrapping.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

/// An exact signed integer type.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + Hash
    + Ord
    + Integer
    + Signed
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + Display
        + Hash
        + Ord
        + Integer
        + Signed
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

#[inline]
pub fn add<Z: Scalar>(a: &Z, b: &Z) -> Z {
    a.checked_add(b).expect("integer overflow in addition")
}

#[inline]
pub fn sub<Z: Scalar>(a: &Z, b: &Z) -> Z {
    a.checked_sub(b).expect("integer overflow in subtraction")
}

#[inline]
pub fn mul<Z: Scalar>(a: &Z, b: &Z) -> Z {
    a.checked_mul(b).expect("integer overflow in multiplication")
}

#[inline]
pub fn neg<Z: Scalar>(a: &Z) -> Z {
    sub(&Z::zero(), a)
}

#[inline]
pub fn int<Z: Scalar>(v: i64) -> Z {
    Z::from_i64(v).expect("value does not fit the scalar type")
}

/// Parses a base-10 integer with an optional sign.
pub fn parse<Z: Scalar>(s: &str) -> Option<Z> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    if s.is_empty() {
        return None;
    }
    Z::from_str_radix(s, 10).ok()
}
