//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the numerical core is generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Extended-real serde: finite values are plain numbers, non-finite values are
/// the strings `"inf"`, `"-inf"` and `"nan"` (JSON has no infinity literal).
pub mod extended {
    use super::Real;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Real, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        let x = v.as_f64();
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        let x = match Repr::deserialize(d)? {
            Repr::Num(x) => x,
            Repr::Str(s) => match s.as_str() {
                "inf" | "+inf" | "infinity" => f64::INFINITY,
                "-inf" | "-infinity" => f64::NEG_INFINITY,
                "nan" => f64::NAN,
                other => {
                    return Err(serde::de::Error::custom(format!(
                        "expected a number or inf/-inf/nan, got {other:?}"
                    )))
                }
            },
        };
        T::from_f64(x).ok_or_else(|| serde::de::Error::custom("value not representable"))
    }

    /// Same encoding for `Vec<T>`.
    pub mod vec {
        use super::super::Real;
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        #[derive(Deserialize)]
        #[serde(transparent)]
        struct Item<T: Real>(#[serde(with = "super")] T);

        pub fn serialize<T: Real, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
            struct One<'a, T: Real>(&'a T);
            impl<T: Real> serde::Serialize for One<'_, T> {
                fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                    super::serialize(self.0, s)
                }
            }
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&One(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<Vec<T>, D::Error> {
            let items: Vec<Item<T>> = Vec::deserialize(d)?;
            Ok(items.into_iter().map(|i| i.0).collect())
        }
    }
}

/// `0 · ∞ = 0` product used by every supremum functional.
#[inline]
pub(crate) fn mul0<T: Real>(a: T, b: T) -> T {
    if a.is_zero() || b.is_zero() {
        T::zero()
    } else {
        a * b
    }
}

/// `x^e` for a nonnegative extended real with the conventions `0^(-e) = ∞`,
/// `∞^(-e) = 0` and `x^0 = 1`.
#[inline]
pub(crate) fn pow_ext<T: Real>(x: T, e: T) -> T {
    if e.is_zero() {
        return T::one();
    }
    if x.is_zero() {
        return if e > T::zero() { T::zero() } else { T::infinity() };
    }
    if x.is_infinite() {
        return if e > T::zero() { T::infinity() } else { T::zero() };
    }
    x.powf(e)
}
