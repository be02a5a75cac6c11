use crate::arith::{fmt_q, q, Q};
use crate::error::{Error, Result};
use crate::series::series1::{Series1, EXACT};
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub const MAXV: usize = 12;

/// Exponent vector; unused slots stay zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub [i16; MAXV]);

impl Mono {
    pub fn zero() -> Self {
        Mono([0; MAXV])
    }

    pub fn unit(i: usize, e: i16) -> Self {
        let mut m = Mono::zero();
        m.0[i] = e;
        m
    }

    pub fn from_slice(e: &[i16]) -> Self {
        let mut m = Mono::zero();
        m.0[..e.len()].copy_from_slice(e);
        m
    }

    pub fn add(&self, o: &Mono) -> Mono {
        let mut r = [0i16; MAXV];
        for k in 0..MAXV {
            r[k] = self.0[k] + o.0[k];
        }
        Mono(r)
    }

    pub fn neg(&self) -> Mono {
        let mut r = self.0;
        for x in r.iter_mut() {
            *x = -*x;
        }
        Mono(r)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn get(&self, i: usize) -> i16 {
        self.0[i]
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0)
    }
}

/// A linear truncation constraint: monomials with `sum w_k e_k > bound` are discarded.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Constraint {
    pub weights: [i16; MAXV],
    pub bound: i64,
}

impl Constraint {
    pub fn degree(&self, m: &Mono) -> i64 {
        let mut d = 0i64;
        for k in 0..MAXV {
            d += self.weights[k] as i64 * m.0[k] as i64;
        }
        d
    }

    /// Total degree in the given variables.
    pub fn total(vars: &[usize], bound: i64) -> Self {
        let mut w = [0i16; MAXV];
        for &v in vars {
            w[v] = 1;
        }
        Constraint { weights: w, bound }
    }
}

fn sat(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        (a + b).min(EXACT)
    }
}

/// Sparse truncated Laurent series in several variables.
#[derive(Clone)]
pub struct MultiSeries {
    names: Arc<Vec<String>>,
    terms: HashMap<Mono, Q>,
    trunc: Vec<Constraint>,
}

impl PartialEq for MultiSeries {
    fn eq(&self, o: &Self) -> bool {
        self.terms == o.terms
    }
}

impl fmt::Debug for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| {
                let mut s = fmt_q(c);
                for (i, n) in self.names.iter().enumerate() {
                    let e = m.0[i];
                    if e != 0 {
                        s.push_str(&format!("*{n}^{e}"));
                    }
                }
                s
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl MultiSeries {
    pub fn new(names: Arc<Vec<String>>, trunc: Vec<Constraint>) -> Self {
        assert!(names.len() <= MAXV, "too many variables");
        MultiSeries { names, terms: HashMap::new(), trunc }
    }

    pub fn with_names(names: &[&str], trunc: Vec<Constraint>) -> Self {
        Self::new(Arc::new(names.iter().map(|s| s.to_string()).collect()), trunc)
    }

    pub fn zero_like(&self) -> Self {
        MultiSeries { names: self.names.clone(), terms: HashMap::new(), trunc: self.trunc.clone() }
    }

    /// Same variables, exact (no truncation).
    pub fn exact_like(&self) -> Self {
        MultiSeries { names: self.names.clone(), terms: HashMap::new(), trunc: vec![] }
    }

    pub fn constant_like(&self, c: Q) -> Self {
        let mut s = self.exact_like();
        s.add_term(Mono::zero(), c);
        s
    }

    pub fn monomial_like(&self, m: Mono, c: Q) -> Self {
        let mut s = self.exact_like();
        s.add_term(m, c);
        s
    }

    pub fn var_like(&self, i: usize) -> Self {
        self.monomial_like(Mono::unit(i, 1), Q::one())
    }

    pub fn names(&self) -> &Arc<Vec<String>> {
        &self.names
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn trunc(&self) -> &[Constraint] {
        &self.trunc
    }

    pub fn set_trunc(&mut self, t: Vec<Constraint>) {
        self.trunc = t;
        self.enforce();
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Mono) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.terms.iter()
    }

    pub fn sorted_terms(&self) -> Vec<(&Mono, &Q)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    fn admits(&self, m: &Mono) -> bool {
        self.trunc.iter().all(|c| c.degree(m) <= c.bound)
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() || !self.admits(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn enforce(&mut self) {
        let trunc = self.trunc.clone();
        self.terms.retain(|m, c| !c.is_zero() && trunc.iter().all(|t| t.degree(m) <= t.bound));
    }

    /// Discards terms failing the predicate; the truncation state is unchanged.
    pub fn retain(&mut self, f: impl Fn(&Mono) -> bool) {
        self.terms.retain(|m, _| f(m));
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        if let Some(old) = self.trunc.iter_mut().find(|x| x.weights == c.weights) {
            old.bound = old.bound.min(c.bound);
        } else {
            self.trunc.push(c);
        }
        self.enforce();
    }

    fn valuation(&self, w: &[i16; MAXV]) -> i64 {
        let own = self.trunc.iter().find(|c| &c.weights == w).map(|c| c.bound);
        let probe = Constraint { weights: *w, bound: 0 };
        let known = self.terms.keys().map(|m| probe.degree(m)).min();
        match (known, own) {
            (Some(k), Some(n)) => k.min(n + 1),
            (Some(k), None) => k,
            (None, Some(n)) => sat(n, 1),
            (None, None) => EXACT,
        }
    }

    fn merged_weights(&self, o: &Self) -> Vec<[i16; MAXV]> {
        let mut ws: Vec<[i16; MAXV]> = self.trunc.iter().map(|c| c.weights).collect();
        for c in &o.trunc {
            if !ws.contains(&c.weights) {
                ws.push(c.weights);
            }
        }
        ws
    }

    fn bound_of(&self, w: &[i16; MAXV]) -> i64 {
        self.trunc.iter().find(|c| &c.weights == w).map(|c| c.bound).unwrap_or(EXACT)
    }

    fn sum_trunc(&self, o: &Self) -> Vec<Constraint> {
        self.merged_weights(o)
            .into_iter()
            .map(|w| Constraint { bound: self.bound_of(&w).min(o.bound_of(&w)), weights: w })
            .filter(|c| c.bound < EXACT)
            .collect()
    }

    fn prod_trunc(&self, o: &Self) -> Vec<Constraint> {
        self.merged_weights(o)
            .into_iter()
            .map(|w| {
                let b = sat(self.bound_of(&w), o.valuation(&w)).min(sat(o.bound_of(&w), self.valuation(&w)));
                Constraint { weights: w, bound: b }
            })
            .filter(|c| c.bound < EXACT)
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = MultiSeries { names: self.names.clone(), terms: self.terms.clone(), trunc: self.sum_trunc(o) };
        r.enforce();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn add_assign(&mut self, o: &Self) {
        self.trunc = self.sum_trunc(o);
        self.enforce();
        for (m, c) in &o.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&q(-1))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut r = self.zero_like();
        if c.is_zero() {
            return r;
        }
        r.terms = self.terms.iter().map(|(m, x)| (*m, x * c)).collect();
        r
    }

    /// Multiplies by an exact monomial.
    pub fn mul_mono(&self, m: &Mono, c: &Q) -> Self {
        let trunc = self
            .trunc
            .iter()
            .map(|t| Constraint { weights: t.weights, bound: t.bound + t.degree(m) })
            .collect();
        let mut r = MultiSeries { names: self.names.clone(), terms: HashMap::new(), trunc };
        for (k, x) in &self.terms {
            r.add_term(k.add(m), x * c);
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let trunc = self.prod_trunc(o);
        self.mul_with(o, trunc)
    }

    /// Product restricted to the given truncation (which must be implied by the operands).
    pub fn mul_with(&self, o: &Self, trunc: Vec<Constraint>) -> Self {
        let (a, b) = if self.terms.len() <= o.terms.len() { (self, o) } else { (o, self) };
        let mut r = MultiSeries { names: self.names.clone(), terms: HashMap::new(), trunc };
        if a.terms.is_empty() {
            return r;
        }
        let bt: Vec<(&Mono, &Q, Vec<i64>)> =
            b.terms.iter().map(|(m, c)| (m, c, r.trunc.iter().map(|t| t.degree(m)).collect())).collect();
        for (ma, ca) in &a.terms {
            let da: Vec<i64> = r.trunc.iter().map(|t| t.degree(ma)).collect();
            for (mb, cb, db) in &bt {
                if r.trunc.iter().enumerate().all(|(k, t)| da[k] + db[k] <= t.bound) {
                    let m = ma.add(mb);
                    let c = ca * *cb;
                    match r.terms.entry(m) {
                        std::collections::hash_map::Entry::Occupied(mut e) => {
                            *e.get_mut() += c;
                        }
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(c);
                        }
                    }
                }
            }
        }
        r.terms.retain(|_, c| !c.is_zero());
        r
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = self.constant_like(Q::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn split_constant(&self) -> (Q, Self) {
        let c = self.coeff(&Mono::zero());
        let mut rest = self.clone();
        rest.terms.remove(&Mono::zero());
        (c, rest)
    }

    /// Tightens the truncation to the meet with `other`.
    pub fn restrict(&mut self, other: &Self) {
        self.trunc = self.sum_trunc(other);
        self.enforce();
    }

    fn geometric(rest: &Self, c0: &Q, cap: usize) -> Result<Self> {
        let r = rest.scale(&-c0.recip());
        let mut acc = rest.constant_like(Q::one());
        acc.trunc = rest.trunc.clone();
        let mut p = acc.clone();
        for _ in 0..cap {
            p = p.mul(&r);
            p.restrict(&acc);
            if p.is_empty() {
                return Ok(acc.scale(&c0.recip()));
            }
            acc.add_assign(&p);
        }
        Err(Error::NotNilpotent("geometric series did not terminate".into()))
    }

    pub fn inverse(&self) -> Result<Self> {
        let (c0, rest) = self.split_constant();
        if !c0.is_zero() {
            if let Ok(v) = Self::geometric(&rest, &c0, 4096) {
                return Ok(v);
            }
        }
        if self.terms.is_empty() {
            return Err(Error::NotInvertible);
        }
        let mut lo = [i16::MAX; MAXV];
        for m in self.terms.keys() {
            for k in 0..MAXV {
                lo[k] = lo[k].min(m.0[k]);
            }
        }
        let lo = Mono(lo);
        if lo.is_zero() || !self.terms.contains_key(&lo) {
            return Err(Error::NotInvertible);
        }
        let inner = self.mul_mono(&lo.neg(), &Q::one());
        let (c1, rest1) = inner.split_constant();
        let inv = Self::geometric(&rest1, &c1, 4096).map_err(|_| Error::NotInvertible)?;
        Ok(inv.mul_mono(&lo.neg(), &Q::one()))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inverse()?))
    }

    pub fn exp(&self) -> Result<Self> {
        let (c0, _) = self.split_constant();
        if !c0.is_zero() {
            return Err(Error::InvalidArgument("exp needs zero constant term".into()));
        }
        let mut acc = self.constant_like(Q::one());
        acc.trunc = self.trunc.clone();
        let mut p = acc.clone();
        for k in 1..4096 {
            p = p.mul(self).scale(&crate::arith::qr(1, k));
            p.restrict(&acc);
            if p.is_empty() {
                return Ok(acc);
            }
            acc.add_assign(&p);
        }
        Err(Error::NotNilpotent("exp argument".into()))
    }

    pub fn log(&self) -> Result<Self> {
        let (c0, rest) = self.split_constant();
        if c0 != Q::one() {
            return Err(Error::LogDomain(fmt_q(&c0)));
        }
        let mut acc = rest.zero_like();
        acc.trunc = rest.trunc.clone();
        let mut p = rest.constant_like(Q::one());
        for k in 1..4096i64 {
            p = p.mul(&rest);
            p.restrict(&acc);
            if p.is_empty() {
                return Ok(acc);
            }
            let sign = if k % 2 == 1 { q(1) } else { q(-1) };
            acc.add_assign(&p.scale(&(sign / q(k))));
        }
        Err(Error::NotNilpotent("log argument".into()))
    }

    pub fn derivative(&self, i: usize) -> Self {
        let trunc = self
            .trunc
            .iter()
            .map(|t| Constraint { weights: t.weights, bound: t.bound - t.weights[i] as i64 })
            .collect();
        let mut r = MultiSeries { names: self.names.clone(), terms: HashMap::new(), trunc };
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e != 0 {
                let mut m2 = *m;
                m2.0[i] -= 1;
                r.add_term(m2, c * q(e as i64));
            }
        }
        r
    }

    /// Coefficient of `x_i^e`, as a series in the remaining variables.
    pub fn coeff_of(&self, i: usize, e: i16) -> Result<Self> {
        let mut trunc = Vec::new();
        for t in &self.trunc {
            let shifted = t.bound - t.weights[i] as i64 * e as i64;
            let mut w = t.weights;
            w[i] = 0;
            if w.iter().all(|&x| x == 0) {
                if shifted < 0 {
                    return Err(Error::Truncation(format!(
                        "coefficient of {}^{e} lies beyond the truncation",
                        self.names.get(i).map(|s| s.as_str()).unwrap_or("?")
                    )));
                }
                continue;
            }
            trunc.push(Constraint { weights: t.weights, bound: shifted });
        }
        let mut r = MultiSeries { names: self.names.clone(), terms: HashMap::new(), trunc };
        for (m, c) in &self.terms {
            if m.0[i] == e {
                let mut m2 = *m;
                m2.0[i] = 0;
                r.terms.insert(m2, c.clone());
            }
        }
        Ok(r)
    }

    /// Range of exponents of variable `i` present.
    pub fn degree_range(&self, i: usize) -> Option<(i16, i16)> {
        let mut it = self.terms.keys().map(|m| m.0[i]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    /// Embeds a univariate series in variable `i`.
    pub fn from_series1(&self, i: usize, s: &Series1) -> Self {
        let mut r = self.exact_like();
        if s.order() < EXACT {
            r.trunc.push(Constraint { weights: Mono::unit(i, 1).0, bound: s.order() });
        }
        for (d, c) in s.terms() {
            r.terms.insert(Mono::unit(i, d as i16), c.clone());
        }
        r
    }

    /// Applies a coefficient transformation termwise.
    pub fn map_coeffs(&self, f: impl Fn(&Mono, &Q) -> Q) -> Self {
        let mut r = self.zero_like();
        for (m, c) in &self.terms {
            let v = f(m, c);
            if !v.is_zero() {
                r.terms.insert(*m, v);
            }
        }
        r
    }

    /// Maps exponent vectors (the map must be injective on the support).
    pub fn map_monos(&self, f: impl Fn(&Mono) -> Mono) -> Self {
        let mut r = self.exact_like();
        for (m, c) in &self.terms {
            r.add_term(f(m), c.clone());
        }
        r
    }

    pub fn with_trunc(mut self, t: Vec<Constraint>) -> Self {
        self.set_trunc(t);
        self
    }

    pub fn max_degree(&self, w: &[i16; MAXV]) -> Option<i64> {
        let probe = Constraint { weights: *w, bound: 0 };
        self.terms.keys().map(|m| probe.degree(m)).max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    fn ring(bound: i64) -> MultiSeries {
        MultiSeries::with_names(&["t", "u", "h"], vec![Constraint::total(&[0], bound)])
    }

    #[test]
    fn product_and_inverse() {
        let z = ring(6);
        let t = z.var_like(0);
        let one = z.constant_like(q(1));
        let p = one.add(&t).mul(&one.sub(&t));
        assert_eq!(p, one.sub(&t.mul(&t)));
        let s = MultiSeries::from_series1(&z, 0, &Series1::new(0, crate::arith::s_coefficients(2), 2));
        let inv = s.inverse().unwrap();
        let mut want = z.constant_like(q(1));
        want.add_term(Mono::unit(0, 2), qr(-1, 24));
        assert_eq!(inv, want);
    }

    #[test]
    fn laurent_bookkeeping() {
        let z = ring(6);
        let a = z.monomial_like(Mono::unit(2, -1), q(1));
        let b = z.monomial_like(Mono::from_slice(&[0, 1, 2]), q(1));
        assert_eq!(a.mul(&b), z.monomial_like(Mono::from_slice(&[0, 1, 1]), q(1)));
    }

    #[test]
    fn exp_hbar_u() {
        let z = MultiSeries::with_names(&["u", "h"], vec![Constraint::total(&[1], 4)]);
        let mut a = z.monomial_like(Mono::from_slice(&[1, 1]), q(1));
        a.add_term(Mono::from_slice(&[2, 2]), qr(-1, 2));
        a.set_trunc(z.trunc().to_vec());
        let e = a.exp().unwrap();
        assert_eq!(e.coeff(&Mono::from_slice(&[2, 2])), q(0));
        assert_eq!(e.log().unwrap(), a);
    }

    #[test]
    fn not_invertible() {
        let z = ring(4);
        let a = z.var_like(0).add(&z.var_like(1));
        assert_eq!(a.inverse().unwrap_err(), Error::NotInvertible);
    }

    #[test]
    fn monomial_factor_inverse() {
        let z = ring(5);
        let t = z.var_like(0);
        let a = t.mul(&z.constant_like(q(1)).add(&t)).with_trunc(z.trunc().to_vec());
        let inv = a.inverse().unwrap();
        let back = inv.mul(&a);
        assert_eq!(back, z.constant_like(q(1)));
    }

    #[test]
    fn coefficient_extraction() {
        let z = ring(3);
        let mut a = z.zero_like();
        a.add_term(Mono::from_slice(&[1, 2, 0]), q(3));
        a.add_term(Mono::from_slice(&[2, 1, 0]), q(5));
        let c = a.coeff_of(1, 2).unwrap();
        assert_eq!(c.coeff(&Mono::unit(0, 1)), q(3));
        assert!(z.coeff_of(0, 4).is_err());
    }
}
