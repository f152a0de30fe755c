//! Exact rational scalars and their wire format.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rat = num_rational::BigRational;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

pub fn is_zero(r: &Rat) -> bool {
    r.numer().is_zero()
}

/// Canonical wire form `p/q` in lowest terms, `q > 0`. Integers render
/// with an explicit denominator, e.g. `1/1`, `-3/1`.
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p`, `-p` or `p/q`. The denominator must be nonzero; the sign
/// may sit on either component and is normalized away.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational literal".to_string());
    }
    let parse_int = |part: &str| -> Result<BigInt, String> {
        part.trim()
            .parse::<BigInt>()
            .map_err(|_| format!("invalid integer `{part}` in rational literal"))
    };
    match s.split_once('/') {
        None => Ok(Rat::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let n = parse_int(num)?;
            let d = parse_int(den)?;
            if d.is_zero() {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(Rat::new(n, d))
        }
    }
}
