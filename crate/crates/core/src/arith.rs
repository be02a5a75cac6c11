//! Exact rational arithmetic and the special sequences used throughout the crate.
//!
//! All tables are lazily extended and shared between threads.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: BigInt) -> Q {
    Q::from_integer(n)
}

/// Formats as `p/q`, or `p` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: `{s}`"));
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().map_err(|_| bad())?;
            let d: BigInt = b.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(qi(s.parse().map_err(|_| bad())?)),
    }
}

/// Integer power with negative exponents allowed for nonzero bases.
pub fn qpow(x: &Q, e: i64) -> Q {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

pub fn to_i64(x: &Q) -> Option<i64> {
    if x.denom().is_one() {
        x.numer().to_i64()
    } else {
        None
    }
}

/// Serde adapter for the `p/q` string form.
pub mod qser {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

static FACTORIALS: Lazy<RwLock<Vec<BigInt>>> = Lazy::new(|| RwLock::new(vec![BigInt::one()]));

pub fn factorial(n: usize) -> BigInt {
    if let Some(v) = FACTORIALS.read().get(n) {
        return v.clone();
    }
    let mut t = FACTORIALS.write();
    while t.len() <= n {
        let k = t.len();
        let next = &t[k - 1] * BigInt::from(k);
        t.push(next);
    }
    t[n].clone()
}

pub fn factorial_q(n: usize) -> Q {
    qi(factorial(n))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Generalized binomial coefficient `C(a, k)` for rational `a`.
pub fn binomial_q(a: &Q, k: usize) -> Q {
    let mut r = Q::one();
    for i in 0..k {
        r = r * (a - q(i as i64));
    }
    r / factorial_q(k)
}

/// Coefficients of `S(t) = (e^{t/2} - e^{-t/2})/t` through `t^order`.
pub fn s_coefficients(order: usize) -> Vec<Q> {
    (0..=order)
        .map(|k| {
            if k % 2 == 1 {
                Q::zero()
            } else {
                let two = BigInt::from(2).pow(k as u32);
                Q::new(BigInt::one(), two * factorial(k + 1))
            }
        })
        .collect()
}

static BERN_HALF: Lazy<RwLock<Vec<Q>>> = Lazy::new(|| RwLock::new(vec![Q::one()]));

/// `[t^{2g}] 1/S(t)`, which equals `B_{2g}(1/2)/(2g)!`.
pub fn bernoulli_half(g: usize) -> Q {
    if let Some(v) = BERN_HALF.read().get(g) {
        return v.clone();
    }
    let mut t = BERN_HALF.write();
    let s = s_coefficients(2 * g);
    while t.len() <= g {
        let h = t.len();
        let mut acc = Q::zero();
        for j in 1..=h {
            acc += &s[2 * j] * &t[h - j];
        }
        t.push(-acc);
    }
    t[g].clone()
}

static BERNOULLI: Lazy<RwLock<Vec<Q>>> = Lazy::new(|| RwLock::new(vec![Q::one()]));

/// Bernoulli numbers from `t/(e^t - 1)`, so `B_1 = -1/2`.
pub fn bernoulli_number(n: usize) -> Q {
    if let Some(v) = BERNOULLI.read().get(n) {
        return v.clone();
    }
    let mut t = BERNOULLI.write();
    while t.len() <= n {
        let m = t.len();
        let mut acc = Q::zero();
        for (k, bk) in t.iter().enumerate() {
            acc += qi(binomial(m + 1, k)) * bk;
        }
        t.push(-acc / q(m as i64 + 1));
    }
    t[n].clone()
}

pub fn bernoulli_numbers(n: usize) -> Vec<Q> {
    (0..=n).map(bernoulli_number).collect()
}

/// `B_n(x) = sum_k C(n,k) B_k x^{n-k}`.
pub fn bernoulli_poly(n: usize, x: &Q) -> Q {
    (0..=n)
        .map(|k| qi(binomial(n, k)) * bernoulli_number(k) * qpow(x, (n - k) as i64))
        .sum()
}

/// The r-step factorial `m!_(r)`.
pub fn r_factorial(m: i64, r: i64) -> Result<Q> {
    if m <= 0 || r <= 0 {
        return Err(Error::InvalidArgument(format!(
            "r_factorial needs m > 0 and r > 0, got m={m}, r={r}"
        )));
    }
    let mut acc = BigInt::one();
    let mut k = m;
    while k > 0 {
        acc *= BigInt::from(k);
        k -= r;
    }
    Ok(qi(acc))
}

pub fn double_factorial(m: i64) -> Q {
    if m <= 0 {
        Q::one()
    } else {
        r_factorial(m, 2).expect("positive")
    }
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

/// Integer divisors of a nonzero integer (positive ones).
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut small = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            small.push(d.clone());
            let other = &n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    small.extend(out.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_half_values() {
        assert_eq!(bernoulli_half(0), q(1));
        assert_eq!(bernoulli_half(1), qr(-1, 24));
        assert_eq!(bernoulli_half(2), qr(7, 5760));
    }

    #[test]
    fn s_values() {
        let s = s_coefficients(4);
        assert_eq!(s, vec![q(1), q(0), qr(1, 24), q(0), qr(1, 1920)]);
    }

    #[test]
    fn r_factorials() {
        assert_eq!(r_factorial(3, 2).unwrap(), q(3));
        assert_eq!(r_factorial(7, 3).unwrap(), q(28));
        assert_eq!(r_factorial(5, 2).unwrap(), q(15));
        assert!(r_factorial(0, 2).is_err());
    }

    #[test]
    fn bernoulli_numbers_low() {
        assert_eq!(
            bernoulli_numbers(6),
            vec![q(1), qr(-1, 2), qr(1, 6), q(0), qr(-1, 30), q(0), qr(1, 42)]
        );
    }

    #[test]
    fn half_matches_polynomial() {
        for g in 0..=10 {
            let lhs = bernoulli_half(g) * factorial_q(2 * g);
            assert_eq!(lhs, bernoulli_poly(2 * g, &qr(1, 2)), "g={g}");
        }
    }

    #[test]
    fn roundtrip_format() {
        for s in ["3/7", "-5", "0", "12/4"] {
            let x = parse_q(s).unwrap();
            assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
        }
        assert_eq!(fmt_q(&qr(12, 4)), "3");
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn divisor_list() {
        let d: Vec<i64> = divisors(&BigInt::from(12)).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(d, vec![1, 2, 3, 4, 6, 12]);
    }
}

/// `count` rationals `p/q` with `|p| <= 40`, `1 <= q <= 12`, reproducible from `seed`.
pub fn seeded_rationals(seed: u64, count: usize) -> Vec<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Q::new(rng.gen_range(-40i64..=40).into(), rng.gen_range(1i64..=12).into())).collect()
}
