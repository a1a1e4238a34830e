//! Serde helpers: exact integers and rationals are emitted as decimal strings.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

pub(crate) fn big_uint<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

/// A rational reported as `{"num": "...", "den": "...", "value": f64}`.
#[derive(Serialize)]
struct RationalRepr {
    num: String,
    den: String,
    value: f64,
}

pub(crate) fn rational_repr(v: &BigRational) -> impl Serialize {
    RationalRepr {
        num: v.numer().to_str_radix(10),
        den: v.denom().to_str_radix(10),
        value: rational_to_f64(v),
    }
}

pub(crate) fn rational<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    rational_repr(v).serialize(s)
}

/// Float value of a big rational that survives huge numerators/denominators.
pub fn rational_to_f64(v: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (v.numer().to_f64(), v.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both sides down to a common scale before dividing.
    let nb = v.numer().bits() as i64;
    let db = v.denom().bits() as i64;
    let shift_n = (nb - 900).max(0) as usize;
    let shift_d = (db - 900).max(0) as usize;
    let n = (v.numer() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (v.denom() >> shift_d).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}
