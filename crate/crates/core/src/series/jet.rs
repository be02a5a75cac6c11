use crate::arith::{fmt_q, qr, Q};
use crate::error::{Error, Result};
use crate::series::multi::{Constraint, Mono, MultiSeries};
use crate::series::series1::Series1;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Default base points for correlator comparison.
pub fn default_base_points(n: usize) -> Vec<Q> {
    let table = [qr(5, 3), qr(7, 2), qr(11, 4), qr(13, 6), qr(17, 5), qr(19, 7)];
    assert!(n <= table.len(), "at most {} default base points", table.len());
    table[..n].to_vec()
}

/// Default base points moved by seeded offsets in `(0, 1/4]`, kept pairwise distinct.
pub fn jittered_base_points(n: usize, seed: u64) -> Vec<Q> {
    let mut stream = seed;
    loop {
        let offsets = crate::arith::seeded_rationals(stream, n);
        let pts: Vec<Q> = default_base_points(n)
            .into_iter()
            .zip(offsets)
            .map(|(b, o)| b + (crate::arith::abs_q(&o) + qr(1, 1)) / qr(4 * 41, 1))
            .collect();
        if pts.iter().enumerate().all(|(i, a)| pts[i + 1..].iter().all(|b| a != b)) {
            return pts;
        }
        stream = stream.wrapping_add(1);
    }
}

/// Truncated Taylor expansion at rational base points, in shifted variables `e_i = z_i - b_i`.
#[derive(Clone, Debug)]
pub struct Jet {
    pub base: Vec<Q>,
    pub order: usize,
    pub coeffs: MultiSeries,
}

impl PartialEq for Jet {
    fn eq(&self, o: &Self) -> bool {
        self.base == o.base && self.order == o.order && self.coeffs == o.coeffs
    }
}

pub fn jet_names(n: usize) -> Arc<Vec<String>> {
    Arc::new((1..=n).map(|i| format!("e{i}")).collect())
}

/// Empty series in the jet variables, truncated at total degree `order`.
pub fn jet_ring(n: usize, order: usize) -> MultiSeries {
    MultiSeries::new(jet_names(n), vec![Constraint::total(&(0..n).collect::<Vec<_>>(), order as i64)])
}

#[derive(Serialize, Deserialize)]
struct JetTerm {
    exp: Vec<i16>,
    val: String,
}

#[derive(Serialize, Deserialize)]
struct JetJson {
    base: serde_json::Map<String, serde_json::Value>,
    order: usize,
    coeffs: Vec<JetTerm>,
}

impl Jet {
    pub fn new(base: Vec<Q>, order: usize, coeffs: MultiSeries) -> Self {
        let mut c = coeffs;
        c.add_constraint(Constraint::total(&(0..base.len()).collect::<Vec<_>>(), order as i64));
        Jet { base, order, coeffs: c }
    }

    pub fn zero(base: Vec<Q>, order: usize) -> Self {
        let n = base.len();
        Jet { base, order, coeffs: jet_ring(n, order) }
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn value(&self) -> Q {
        self.coeffs.coeff(&Mono::zero())
    }

    pub fn coeff(&self, exps: &[i16]) -> Q {
        self.coeffs.coeff(&Mono::from_slice(exps))
    }

    /// Outer product of per-variable univariate expansions times a scalar.
    pub fn from_factors(base: Vec<Q>, order: usize, c: &Q, factors: &[Series1]) -> Self {
        let n = base.len();
        let mut acc = jet_ring(n, order).constant_like(c.clone());
        for (i, s) in factors.iter().enumerate() {
            let m = acc.from_series1(i, &s.truncate(order as i64));
            acc = acc.mul(&m);
        }
        Jet::new(base, order, acc)
    }

    pub fn add(&self, o: &Jet) -> Jet {
        assert_eq!(self.base, o.base, "jets at different base points");
        Jet { base: self.base.clone(), order: self.order.min(o.order), coeffs: self.coeffs.add(&o.coeffs) }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        self.add(&Jet { base: o.base.clone(), order: o.order, coeffs: o.coeffs.neg() })
    }

    pub fn scale(&self, c: &Q) -> Jet {
        Jet { base: self.base.clone(), order: self.order, coeffs: self.coeffs.scale(c) }
    }

    /// Reorders variables: new variable `k` is old variable `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Jet {
        let n = self.n();
        let base = perm.iter().map(|&p| self.base[p].clone()).collect();
        let coeffs = self.coeffs.map_monos(|m| {
            let mut e = [0i16; crate::series::multi::MAXV];
            for k in 0..n {
                e[k] = m.0[perm[k]];
            }
            Mono(e)
        });
        Jet::new(base, self.order, coeffs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.n();
        let mut base = serde_json::Map::new();
        for (i, b) in self.base.iter().enumerate() {
            base.insert(format!("z{}", i + 1), serde_json::Value::String(fmt_q(b)));
        }
        let coeffs = self
            .coeffs
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| JetTerm { exp: m.0[..n].to_vec(), val: fmt_q(c) })
            .collect();
        serde_json::to_value(JetJson { base, order: self.order, coeffs }).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Jet> {
        let j: JetJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let n = j.base.len();
        let mut base = Vec::with_capacity(n);
        for i in 0..n {
            let s = j
                .base
                .get(&format!("z{}", i + 1))
                .and_then(|x| x.as_str())
                .ok_or_else(|| Error::Parse(format!("missing base point z{}", i + 1)))?;
            base.push(crate::arith::parse_q(s)?);
        }
        let mut c = jet_ring(n, j.order);
        for t in j.coeffs {
            c.add_term(Mono::from_slice(&t.exp), crate::arith::parse_q(&t.val)?);
        }
        Ok(Jet { base, order: j.order, coeffs: c })
    }
}

/// Small expression language for exact jet expansion.
#[derive(Clone, Debug)]
pub enum JetExpr {
    Var(usize),
    Const(Q),
    Add(Box<JetExpr>, Box<JetExpr>),
    Sub(Box<JetExpr>, Box<JetExpr>),
    Mul(Box<JetExpr>, Box<JetExpr>),
    Div(Box<JetExpr>, Box<JetExpr>),
    Pow(Box<JetExpr>, i64),
}

impl JetExpr {
    pub fn var(i: usize) -> Self {
        JetExpr::Var(i)
    }
    pub fn c(x: Q) -> Self {
        JetExpr::Const(x)
    }
    pub fn add(a: JetExpr, b: JetExpr) -> Self {
        JetExpr::Add(Box::new(a), Box::new(b))
    }
    pub fn sub(a: JetExpr, b: JetExpr) -> Self {
        JetExpr::Sub(Box::new(a), Box::new(b))
    }
    pub fn mul(a: JetExpr, b: JetExpr) -> Self {
        JetExpr::Mul(Box::new(a), Box::new(b))
    }
    pub fn div(a: JetExpr, b: JetExpr) -> Self {
        JetExpr::Div(Box::new(a), Box::new(b))
    }
    pub fn pow(a: JetExpr, e: i64) -> Self {
        JetExpr::Pow(Box::new(a), e)
    }

    fn vars(&self, out: &mut Vec<usize>) {
        match self {
            JetExpr::Var(i) => {
                if !out.contains(i) {
                    out.push(*i)
                }
            }
            JetExpr::Const(_) => {}
            JetExpr::Add(a, b) | JetExpr::Sub(a, b) | JetExpr::Mul(a, b) | JetExpr::Div(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            JetExpr::Pow(a, _) => a.vars(out),
        }
    }

    fn eval(&self, ring: &MultiSeries, base: &[Q]) -> Result<MultiSeries> {
        Ok(match self {
            JetExpr::Var(i) => {
                if *i >= base.len() {
                    return Err(Error::InvalidArgument(format!("no base point for z{}", i + 1)));
                }
                let mut s = ring.var_like(*i).add(&ring.constant_like(base[*i].clone()));
                s.set_trunc(ring.trunc().to_vec());
                s
            }
            JetExpr::Const(c) => {
                let mut s = ring.constant_like(c.clone());
                s.set_trunc(ring.trunc().to_vec());
                s
            }
            JetExpr::Add(a, b) => a.eval(ring, base)?.add(&b.eval(ring, base)?),
            JetExpr::Sub(a, b) => a.eval(ring, base)?.sub(&b.eval(ring, base)?),
            JetExpr::Mul(a, b) => a.eval(ring, base)?.mul(&b.eval(ring, base)?),
            JetExpr::Div(a, b) => {
                let d = b.eval(ring, base)?;
                if d.coeff(&Mono::zero()) == Q::from_integer(0.into()) {
                    let mut vs = Vec::new();
                    b.vars(&mut vs);
                    vs.sort();
                    let names: Vec<String> = vs.iter().map(|i| format!("z{}", i + 1)).collect();
                    return Err(Error::PoleCollision(names.join(",")));
                }
                a.eval(ring, base)?.div(&d)?
            }
            JetExpr::Pow(a, e) => {
                let s = a.eval(ring, base)?;
                if *e >= 0 {
                    s.pow(*e as u32)
                } else {
                    if s.coeff(&Mono::zero()) == Q::from_integer(0.into()) {
                        let mut vs = Vec::new();
                        a.vars(&mut vs);
                        vs.sort();
                        let names: Vec<String> = vs.iter().map(|i| format!("z{}", i + 1)).collect();
                        return Err(Error::PoleCollision(names.join(",")));
                    }
                    s.inverse()?.pow((-e) as u32)
                }
            }
        })
    }
}

pub fn jet_expand(expr: &JetExpr, base: &[Q], order: usize) -> Result<Jet> {
    let ring = jet_ring(base.len(), order);
    let v = expr.eval(&ring, base)?;
    Ok(Jet::new(base.to_vec(), order, v))
}
