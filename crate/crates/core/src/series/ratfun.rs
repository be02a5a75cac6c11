use crate::arith::{fmt_q, q, qpow, Q};
use crate::error::{Error, Result};
use crate::series::series1::Series1;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Dense univariate polynomial, coefficients from degree 0 upward.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(pub Vec<Q>);

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(fmt_q).collect();
        write!(f, "[{}]", v.join(", "))
    }
}

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// `z - a`.
    pub fn linear(a: &Q) -> Self {
        Self::new(vec![-a.clone(), Q::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn lead(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.0.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly(vec![]);
        }
        let mut v = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::new(v)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.0.clone();
        let dl = d.lead();
        let dd = d.0.len();
        if r.len() < dd {
            return (Poly(vec![]), self.clone());
        }
        let mut quo = vec![Q::zero(); r.len() - dd + 1];
        for k in (0..quo.len()).rev() {
            let c = &r[k + dd - 1] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            quo[k] = c;
        }
        (Self::new(quo), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.0.iter().enumerate().skip(1).map(|(k, c)| c * q(k as i64)).collect())
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Coefficients of `p(b + t)`.
    pub fn shift(&self, b: &Q) -> Self {
        let mut acc = Poly(vec![]);
        let lin = Self::new(vec![b.clone(), Q::one()]);
        for c in self.0.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(c.clone()));
        }
        acc
    }

    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Poly(vec![]);
        for c in self.0.iter().rev() {
            acc = acc.mul(inner).add(&Self::constant(c.clone()));
        }
        acc
    }

    pub fn to_series(&self) -> Series1 {
        Series1::exact(0, self.0.clone())
    }

    /// Primitive integer polynomial with the same roots.
    fn integer_primitive(&self) -> Vec<BigInt> {
        let mut l = BigInt::one();
        for c in &self.0 {
            l = l.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|x| x / &g).collect()
    }

    /// Rational roots with multiplicities, and the remaining cofactor without rational roots.
    pub fn rational_roots(&self) -> (Vec<(Q, usize)>, Poly) {
        let mut rest = self.clone();
        let mut roots = Vec::new();
        if rest.is_zero() {
            return (roots, rest);
        }
        let mut zero_mult = 0;
        while rest.0.first().is_some_and(|c| c.is_zero()) {
            rest = Poly::new(rest.0[1..].to_vec());
            zero_mult += 1;
        }
        if zero_mult > 0 {
            roots.push((Q::zero(), zero_mult));
        }
        if rest.degree() >= 1 {
            let ints = rest.integer_primitive();
            let a0 = ints[0].abs();
            let an = ints.last().unwrap().abs();
            let ps = crate::arith::divisors(&a0);
            let qs = crate::arith::divisors(&an);
            let mut cands: Vec<Q> = Vec::new();
            for p in &ps {
                for qq in &qs {
                    for s in [1i64, -1] {
                        let c = Q::new(p * BigInt::from(s), qq.clone());
                        if !cands.contains(&c) {
                            cands.push(c);
                        }
                    }
                }
            }
            cands.sort();
            for c in cands {
                let mut m = 0;
                while rest.degree() >= 1 && rest.eval(&c).is_zero() {
                    rest = rest.divrem(&Poly::linear(&c)).0;
                    m += 1;
                }
                if m > 0 {
                    roots.push((c, m));
                }
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        (roots, rest)
    }
}

/// Reduced quotient of polynomials with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction1 {
    pub num: Poly,
    pub den: Poly,
}

impl fmt::Debug for RationalFunction1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{:?}", self.num, self.den)
    }
}

impl RationalFunction1 {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let g = num.gcd(&den);
        let (n, _) = num.divrem(&g);
        let (d, _) = den.divrem(&g);
        let l = d.lead();
        Ok(RationalFunction1 { num: n.scale(&l.recip()), den: d.scale(&l.recip()) })
    }

    pub fn poly(p: Poly) -> Self {
        RationalFunction1 { num: p, den: Poly::one() }
    }

    pub fn constant(c: Q) -> Self {
        Self::poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::poly(Poly(vec![]))
    }

    pub fn z() -> Self {
        Self::poly(Poly::x())
    }

    /// `c z^k` for any integer `k`.
    pub fn monomial(c: Q, k: i64) -> Self {
        let mut v = vec![Q::zero(); k.unsigned_abs() as usize + 1];
        if k >= 0 {
            v[k as usize] = c;
            Self::poly(Poly::new(v))
        } else {
            v[(-k) as usize] = Q::one();
            Self::new(Poly::constant(c), Poly::new(v)).expect("nonzero")
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den)).expect("nonzero")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction1 { num: self.num.scale(&q(-1)), den: self.den.clone() }
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.num.scale(c), self.den.clone()).expect("nonzero")
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero")
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::InvalidArgument("division by the zero function".into()));
        }
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { Self::constant(Q::one()).div(self)? } else { self.clone() };
        Ok((0..e.unsigned_abs()).fold(Self::constant(Q::one()), |acc, _| acc.mul(&base)))
    }

    pub fn derivative(&self) -> Self {
        let n = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        Self::new(n, self.den.mul(&self.den)).expect("nonzero")
    }

    pub fn eval(&self, x: &Q) -> Result<Q> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::PoleCollision(format!("z = {}", fmt_q(x))));
        }
        Ok(self.num.eval(x) / d)
    }

    /// `r(p(z))` for a polynomial `p`.
    pub fn compose_poly(&self, p: &Poly) -> Self {
        Self::new(self.num.compose(p), self.den.compose(p)).expect("nonzero")
    }

    /// Laurent expansion of `r(b + t)` through `t^order`.
    pub fn expand_at(&self, b: &Q, order: i64) -> Result<Series1> {
        let ns = self.num.shift(b);
        let ds = self.den.shift(b);
        let v = ds.0.iter().take_while(|c| c.is_zero()).count() as i64;
        if self.num.is_zero() {
            return Ok(Series1::zero(order));
        }
        let dser = Series1::exact(0, ds.0.clone()).truncate(order + 2 * v);
        let inv = dser.inverse()?;
        Ok((&ns.to_series() * &inv).truncate(order))
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    /// Order of vanishing at `b` (negative for a pole).
    pub fn order_at(&self, b: &Q) -> i64 {
        let count = |p: &Poly| {
            let mut p = p.clone();
            let mut k = 0;
            while !p.is_zero() && p.eval(b).is_zero() {
                p = p.divrem(&Poly::linear(b)).0;
                k += 1;
            }
            k
        };
        count(&self.num) - count(&self.den)
    }
}

/// Serializable polynomial-quotient description, coefficients as rational strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RatFunSpec {
    pub num: Vec<String>,
    #[serde(default = "default_den")]
    pub den: Vec<String>,
}

fn default_den() -> Vec<String> {
    vec!["1".into()]
}

impl RatFunSpec {
    pub fn build(&self) -> Result<RationalFunction1> {
        let p = |v: &Vec<String>| -> Result<Poly> {
            Ok(Poly::new(v.iter().map(|s| crate::arith::parse_q(s)).collect::<Result<Vec<_>>>()?))
        };
        RationalFunction1::new(p(&self.num)?, p(&self.den)?)
    }

    pub fn from_rf(r: &RationalFunction1) -> Self {
        RatFunSpec { num: r.num.0.iter().map(fmt_q).collect(), den: r.den.0.iter().map(fmt_q).collect() }
    }
}

/// `1/(z-a)^k * 1/(z-b)^l` written as `sum c_j/(z-a)^j + sum d_j/(z-b)^j`, for `a != b`.
pub fn partial_fraction_pair(a: &Q, k: u32, b: &Q, l: u32) -> (Vec<(u32, Q)>, Vec<(u32, Q)>) {
    let d = a - b;
    let side = |k: u32, l: u32, d: &Q| -> Vec<(u32, Q)> {
        let mut out = Vec::new();
        for j in 0..k {
            let c = crate::arith::qi(crate::arith::binomial((l + j - 1) as usize, j as usize));
            let sign = if j % 2 == 0 { q(1) } else { q(-1) };
            let v = sign * c * qpow(d, -((l + j) as i64));
            out.push((k - j, v));
        }
        out
    };
    (side(k, l, &d), side(l, k, &-d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    #[test]
    fn roots_found() {
        let p = Poly::from_ints(&[-1, 0, 1]);
        let (r, rest) = p.rational_roots();
        assert_eq!(r, vec![(q(-1), 1), (q(1), 1)]);
        assert_eq!(rest.degree(), 0);
        let p2 = Poly::from_ints(&[2, 0, -1]);
        let (r2, rest2) = p2.rational_roots();
        assert!(r2.is_empty());
        assert_eq!(rest2.degree(), 2);
        let p3 = Poly::from_ints(&[0, 0, 3]);
        assert_eq!(p3.rational_roots().0, vec![(q(0), 2)]);
    }

    #[test]
    fn expansion_geometric() {
        let r = RationalFunction1::new(Poly::one(), Poly::from_ints(&[-1, 1])).unwrap();
        let s = r.expand_at(&q(3), 1).unwrap();
        assert_eq!(s, Series1::new(0, vec![qr(1, 2), qr(-1, 4)], 1));
    }

    #[test]
    fn reduced_form() {
        let r = RationalFunction1::new(Poly::from_ints(&[-1, 0, 1]), Poly::from_ints(&[2, 2])).unwrap();
        assert_eq!(r.num, Poly::new(vec![qr(-1, 2), qr(1, 2)]));
        assert_eq!(r.den, Poly::one());
    }

    #[test]
    fn pair_fractions() {
        let (pa, pb) = partial_fraction_pair(&q(1), 1, &q(-1), 1);
        assert_eq!(pa, vec![(1, qr(1, 2))]);
        assert_eq!(pb, vec![(1, qr(-1, 2))]);
        for (k, l) in [(2u32, 3u32), (3, 1), (1, 4)] {
            let (a, b) = (qr(2, 3), qr(-5, 7));
            let (pa, pb) = partial_fraction_pair(&a, k, &b, l);
            let x = qr(11, 13);
            let lhs = qpow(&(&x - &a), -(k as i64)) * qpow(&(&x - &b), -(l as i64));
            let rhs: Q = pa.iter().map(|(j, c)| c * qpow(&(&x - &a), -(*j as i64))).sum::<Q>()
                + pb.iter().map(|(j, c)| c * qpow(&(&x - &b), -(*j as i64))).sum::<Q>();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn laurent_at_pole() {
        let r = RationalFunction1::new(Poly::one(), Poly::from_ints(&[0, 0, 1, 1])).unwrap();
        let s = r.expand_at(&q(0), 1).unwrap();
        assert_eq!(s.coeff(-2), q(1));
        assert_eq!(s.coeff(-1), q(-1));
        assert_eq!(s.coeff(0), q(1));
    }
}
