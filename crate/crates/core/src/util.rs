//! Small helpers shared across modules.

/// Maps an `f64` to an `i64` whose integer order matches `f64::total_cmp`.
pub(crate) fn ordered_key(x: f64) -> i64 {
    let b = x.to_bits() as i64;
    b ^ ((((b >> 63) as u64) >> 1) as i64)
}

pub(crate) fn from_ordered_key(k: i64) -> f64 {
    f64::from_bits((k ^ ((((k >> 63) as u64) >> 1) as i64)) as u64)
}
