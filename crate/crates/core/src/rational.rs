//! Exact rational scalars and their JSON string form `"p/q"`.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Q = Ratio<i128>;

pub fn q(num: i128, den: i128) -> Q {
    Q::new(num, den)
}

pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

/// Representative of `x mod 1` in `[0, 1)`.
pub fn frac(x: Q) -> Q {
    x - x.floor()
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_int(x: Q) -> Q {
    let f = frac(x);
    let g = Q::one() - f;
    if f < g {
        f
    } else {
        g
    }
}

pub fn to_f64(x: Q) -> f64 {
    // Split to keep precision for large numerators.
    let whole = x.trunc();
    let rest = x - whole;
    whole.to_integer() as f64 + (*rest.numer() as f64) / (*rest.denom() as f64)
}

pub fn lcm(a: i128, b: i128) -> i128 {
    a.lcm(&b)
}

/// Exact rational from an f64 when it has a small denominator (at most 2^40).
pub fn from_f64_exact(x: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let mut den: i128 = 1;
    let mut v = x;
    for _ in 0..=40 {
        if v.fract() == 0.0 && v.abs() < 1e30 {
            return Some(Q::new(v as i128, den));
        }
        v *= 2.0;
        den *= 2;
    }
    // Fall back to small decimal denominators, e.g. 0.1.
    for d in [3i128, 5, 6, 7, 9, 10, 12, 100, 1000, 10_000] {
        let n = (x * d as f64).round();
        if (n / d as f64 - x).abs() <= f64::EPSILON * x.abs().max(1.0) {
            return Some(Q::new(n as i128, d));
        }
    }
    None
}

pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: i128 = n.parse().map_err(|_| format!("bad rational numerator in {s:?}"))?;
    let d: i128 = d.parse().map_err(|_| format!("bad rational denominator in {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Q::new(n, d))
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn abs(x: Q) -> Q {
    x.abs()
}

pub fn floor_i64(x: Q) -> i64 {
    x.floor().to_integer().to_i64().expect("floor out of i64 range")
}

/// serde adapter: a single rational as `"p/q"`; numbers are accepted on input.
pub mod serde_q {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Str(String),
        Int(i64),
        Float(f64),
    }

    fn from_raw<E: serde::de::Error>(raw: Raw) -> Result<Q, E> {
        match raw {
            Raw::Str(s) => parse_q(&s).map_err(E::custom),
            Raw::Int(i) => Ok(Q::from_integer(i as i128)),
            Raw::Float(f) => from_f64_exact(f)
                .ok_or_else(|| E::custom(format!("{f} is not a rational with a small denominator"))),
        }
    }

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        from_raw(Raw::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(xs.iter().map(fmt_q))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            let raw: Vec<Raw> = Vec::deserialize(d)?;
            raw.into_iter().map(from_raw).collect()
        }
    }

    pub mod pair {
        use super::*;

        pub fn serialize<S: Serializer>(xs: &[Q; 2], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(xs.iter().map(fmt_q))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Q; 2], D::Error> {
            let raw: [Raw; 2] = <[Raw; 2]>::deserialize(d)?;
            let [a, b] = raw;
            Ok([from_raw(a)?, from_raw(b)?])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_is_in_unit_interval() {
        assert_eq!(frac(q(-1, 3)), q(2, 3));
        assert_eq!(frac(q(7, 2)), q(1, 2));
        assert_eq!(frac(qi(-2)), qi(0));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_q(" -4 / 6").unwrap(), q(-2, 3));
        assert_eq!(parse_q("5").unwrap(), qi(5));
        assert!(parse_q("1/0").is_err());
        assert_eq!(fmt_q(&q(-2, 4)), "-1/2");
        assert_eq!(fmt_q(&qi(3)), "3");
    }

    #[test]
    fn exact_float_conversion() {
        assert_eq!(from_f64_exact(0.25), Some(q(1, 4)));
        assert_eq!(from_f64_exact(-3.0), Some(qi(-3)));
        assert_eq!(from_f64_exact(0.1), Some(q(1, 10)));
        assert_eq!(from_f64_exact(f64::NAN), None);
    }

    #[test]
    fn to_f64_keeps_precision() {
        assert_eq!(to_f64(q(1, 3)), 1.0 / 3.0);
        assert_eq!(to_f64(q(-7, 2)), -3.5);
    }
}
