use crate::arith::{q, qr, Q};
use crate::error::{Error, Result};
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Truncation order used for exact (polynomial or Laurent polynomial) series.
pub const EXACT: i64 = 1 << 40;

fn sat_add(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        (a + b).min(EXACT)
    }
}

/// Truncated univariate Laurent series `sum_{k >= start} c_k t^k + O(t^{order+1})`.
///
/// Coefficients are stored densely from `start`; leading and trailing zeros are trimmed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series1 {
    start: i64,
    coeffs: Vec<Q>,
    order: i64,
}

impl fmt::Debug for Series1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.terms() {
            parts.push(format!("({})t^{}", crate::arith::fmt_q(c), k));
        }
        if self.order < EXACT {
            parts.push(format!("O(t^{})", self.order + 1));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl Series1 {
    pub fn new(start: i64, coeffs: Vec<Q>, order: i64) -> Self {
        let mut s = Series1 { start, coeffs, order };
        s.normalize();
        s
    }

    pub fn exact(start: i64, coeffs: Vec<Q>) -> Self {
        Self::new(start, coeffs, EXACT)
    }

    pub fn zero(order: i64) -> Self {
        Series1 { start: 0, coeffs: vec![], order }
    }

    pub fn constant(c: Q, order: i64) -> Self {
        Self::new(0, vec![c], order)
    }

    pub fn one(order: i64) -> Self {
        Self::constant(Q::one(), order)
    }

    pub fn monomial(c: Q, deg: i64, order: i64) -> Self {
        Self::new(deg, vec![c], order)
    }

    /// The series `t` truncated at `order`.
    pub fn var(order: i64) -> Self {
        Self::monomial(Q::one(), 1, order)
    }

    fn normalize(&mut self) {
        let limit = self.order - self.start + 1;
        if limit <= 0 {
            self.coeffs.clear();
        } else if (self.coeffs.len() as i64) > limit {
            self.coeffs.truncate(limit as usize);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.start += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.start = 0;
        }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order >= EXACT
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest degree carrying a nonzero coefficient; `order + 1` for the zero series.
    pub fn valuation(&self) -> i64 {
        if self.coeffs.is_empty() {
            sat_add(self.order, 1)
        } else {
            self.start
        }
    }

    pub fn coeff(&self, d: i64) -> Q {
        let k = d - self.start;
        if k < 0 || k >= self.coeffs.len() as i64 {
            Q::zero()
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    pub fn coeff_ref(&self, d: i64) -> Option<&Q> {
        let k = d - self.start;
        if k < 0 {
            None
        } else {
            self.coeffs.get(k as usize).filter(|c| !c.is_zero())
        }
    }

    /// Coefficient that is guaranteed known; errors if beyond the truncation.
    pub fn known_coeff(&self, d: i64) -> Result<Q> {
        if d > self.order {
            return Err(Error::Truncation(format!(
                "coefficient t^{d} requested from series known through t^{}",
                self.order
            )));
        }
        Ok(self.coeff(d))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.start + k as i64, c))
    }

    pub fn truncate(&self, order: i64) -> Self {
        Self::new(self.start, self.coeffs.clone(), order.min(self.order))
    }

    pub fn residue(&self) -> Q {
        self.coeff(-1)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.order);
        }
        Self::new(self.start, self.coeffs.iter().map(|x| x * c).collect(), self.order)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Series1 {
            start: if self.coeffs.is_empty() { 0 } else { self.start + k },
            coeffs: self.coeffs.clone(),
            order: sat_add(self.order, k),
        }
    }

    fn add_impl(&self, other: &Self, sign: bool) -> Self {
        let order = self.order.min(other.order);
        if self.coeffs.is_empty() && other.coeffs.is_empty() {
            return Self::zero(order);
        }
        let lo = self.valuation().min(other.valuation());
        let hi_a = self.start + self.coeffs.len() as i64 - 1;
        let hi_b = other.start + other.coeffs.len() as i64 - 1;
        let hi = hi_a.max(hi_b).min(order);
        if hi < lo {
            return Self::zero(order);
        }
        let mut v = vec![Q::zero(); (hi - lo + 1) as usize];
        for (d, c) in self.terms() {
            if d <= hi {
                v[(d - lo) as usize] += c;
            }
        }
        for (d, c) in other.terms() {
            if d <= hi {
                if sign {
                    v[(d - lo) as usize] += c;
                } else {
                    v[(d - lo) as usize] -= c;
                }
            }
        }
        Self::new(lo, v, order)
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let order = sat_add(self.order, other.valuation()).min(sat_add(other.order, self.valuation()));
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero(order);
        }
        let lo = self.start + other.start;
        let hi = (self.start + self.coeffs.len() as i64 - 1 + other.start + other.coeffs.len() as i64 - 1)
            .min(order);
        if hi < lo {
            return Self::zero(order);
        }
        let len = (hi - lo + 1) as usize;
        let mut v = vec![Q::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    v[i + j] += a * b;
                }
            }
        }
        Self::new(lo, v, order)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::NotInvertible);
        }
        let v = self.start;
        let rel = self.order - v;
        let out_order = if self.is_exact() { EXACT } else { -v + rel };
        let c0inv = self.coeffs[0].recip();
        if self.is_exact() && self.coeffs.len() > 1 {
            return Err(Error::Truncation("inverse of an exact non-monomial needs a truncation".into()));
        }
        let len = if self.is_exact() { 1 } else { (rel + 1).max(0) as usize };
        let mut b = vec![Q::zero(); len];
        for k in 0..len {
            let mut acc = if k == 0 { Q::one() } else { Q::zero() };
            for j in 1..=k.min(self.coeffs.len().saturating_sub(1)) {
                acc -= &self.coeffs[j] * &b[k - j];
            }
            b[k] = acc * &c0inv;
        }
        Ok(Self::new(-v, b, out_order))
    }

    /// Inverse computed with an explicit relative precision, for exact inputs.
    pub fn inverse_to(&self, order: i64) -> Result<Self> {
        if self.is_exact() {
            let v = self.valuation();
            self.truncate(order + 2 * v).inverse()
        } else {
            Ok(self.inverse()?.truncate(order))
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_ref(&other.inverse()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let mut result = Self::one(EXACT);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        Ok(result)
    }

    pub fn derivative(&self) -> Self {
        let v: Vec<Q> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * q(self.start + k as i64))
            .collect();
        Self::new(self.start - 1, v, if self.is_exact() { EXACT } else { self.order - 1 })
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Result<Self> {
        if !self.coeff(-1).is_zero() {
            return Err(Error::InvalidArgument("integral of a series with a t^-1 term".into()));
        }
        let v: Vec<Q> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let d = self.start + k as i64;
                if d == -1 {
                    Q::zero()
                } else {
                    c / q(d + 1)
                }
            })
            .collect();
        Ok(Self::new(self.start + 1, v, sat_add(self.order, 1)))
    }

    /// `self(inner(t))` for `inner` of positive valuation.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let vb = inner.valuation();
        if inner.is_zero() || vb < 1 {
            return Err(Error::InvalidArgument("composition needs inner series of positive valuation".into()));
        }
        let cap = if self.is_exact() { EXACT } else { sat_add(self.order, 1).saturating_mul(vb) - 1 };
        if self.coeffs.is_empty() {
            return Ok(Self::zero(cap.min(EXACT)));
        }
        let top = self.start + self.coeffs.len() as i64 - 1;
        let mut acc = Self::zero(EXACT);
        for d in (self.start.min(0)..=top.max(0)).rev() {
            acc = acc.mul_ref(inner).add_impl(&Self::constant(self.coeff(d), EXACT), true);
            if d == self.start.min(0) {
                break;
            }
        }
        if self.start < 0 {
            let tail = inner.pow(self.start)?;
            acc = acc.mul_ref(&tail);
        }
        let order = acc.order.min(cap);
        Ok(acc.truncate(order))
    }

    /// Compositional inverse of a series `a_1 t + a_2 t^2 + ...` with `a_1 != 0`.
    pub fn reversion(&self) -> Result<Self> {
        if self.start != 1 || self.coeffs.is_empty() {
            return Err(Error::InvalidArgument("reversion needs valuation exactly 1".into()));
        }
        let n = self.order;
        if n >= EXACT {
            return Err(Error::Truncation("reversion of an exact series needs a truncation".into()));
        }
        // Lagrange inversion: [t^k] b = [t^{k-1}] (t/f)^k / k.
        let h = self.shift(-1).truncate(n - 1).inverse()?;
        let mut hk = Self::one(n - 1);
        let mut coeffs = Vec::with_capacity(n as usize);
        for k in 1..=n {
            hk = (&hk * &h).truncate(n - 1);
            coeffs.push(hk.coeff(k - 1) / Q::from_integer(k.into()));
        }
        let b = Self::new(1, coeffs, n);
        Ok(b.truncate(n))
    }

    pub fn exp(&self) -> Result<Self> {
        if self.valuation() < 1 {
            if !self.coeff(0).is_zero() || self.valuation() < 0 {
                return Err(Error::InvalidArgument("exp needs zero constant term".into()));
            }
        }
        if self.is_zero() {
            return Ok(Self::one(self.order));
        }
        if self.is_exact() {
            return Err(Error::Truncation("exp of an exact series needs a truncation".into()));
        }
        let n = self.order;
        let dv = self.derivative();
        let mut e = vec![Q::zero(); (n + 1).max(0) as usize];
        if !e.is_empty() {
            e[0] = Q::one();
        }
        for k in 1..e.len() {
            let mut acc = Q::zero();
            for j in 1..=k {
                let c = dv.coeff(j as i64 - 1);
                if !c.is_zero() {
                    acc += c * &e[k - j];
                }
            }
            e[k] = acc / q(k as i64);
        }
        Ok(Self::new(0, e, n))
    }

    /// `log(self)` for a series with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if self.valuation() < 0 || self.coeff(0) != Q::one() {
            return Err(Error::LogDomain(crate::arith::fmt_q(&self.coeff(0))));
        }
        if self.is_exact() {
            return Err(Error::Truncation("log of an exact series needs a truncation".into()));
        }
        self.derivative().mul_ref(&self.inverse()?).integral()
    }

    /// `self^a` for rational `a`, constant term 1.
    pub fn pow_q(&self, a: &Q) -> Result<Self> {
        Ok(self.log()?.scale(a).exp()?)
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.pow_q(&qr(1, 2))
    }

    /// `f(t) -> f(c t)`.
    pub fn rescale(&self, c: &Q) -> Self {
        let mut p = crate::arith::qpow(c, self.start);
        let mut v = Vec::with_capacity(self.coeffs.len());
        for x in &self.coeffs {
            v.push(x * &p);
            p *= c;
        }
        Self::new(self.start, v, self.order)
    }

    pub fn eval_poly(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for (d, c) in self.terms() {
            acc += c * crate::arith::qpow(x, d);
        }
        acc
    }
}

impl Add for &Series1 {
    type Output = Series1;
    fn add(self, o: &Series1) -> Series1 {
        self.add_impl(o, true)
    }
}

impl Sub for &Series1 {
    type Output = Series1;
    fn sub(self, o: &Series1) -> Series1 {
        self.add_impl(o, false)
    }
}

impl Mul for &Series1 {
    type Output = Series1;
    fn mul(self, o: &Series1) -> Series1 {
        self.mul_ref(o)
    }
}

impl Neg for &Series1 {
    type Output = Series1;
    fn neg(self) -> Series1 {
        self.scale(&q(-1))
    }
}

impl Add for Series1 {
    type Output = Series1;
    fn add(self, o: Series1) -> Series1 {
        &self + &o
    }
}

impl Sub for Series1 {
    type Output = Series1;
    fn sub(self, o: Series1) -> Series1 {
        &self - &o
    }
}

impl Mul for Series1 {
    type Output = Series1;
    fn mul(self, o: Series1) -> Series1 {
        &self * &o
    }
}

impl Neg for Series1 {
    type Output = Series1;
    fn neg(self) -> Series1 {
        -&self
    }
}
