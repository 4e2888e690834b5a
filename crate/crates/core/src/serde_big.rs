//! Big integers serialize as decimal strings so reports stay readable and
//! portable to JSON consumers without arbitrary-precision numbers.

use num_bigint::BigInt;
use serde::Serializer;

pub fn vec<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}
