use crate::arith::{fmt_q, parse_q, q, Q};
use crate::curves::SpectralCurve;
use crate::error::{Error, Result};
use crate::series::ratfun::partial_fraction_pair;
use crate::series::{jet_ring, Jet, Series1};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// `1/(z_var - pole)^order`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub var: usize,
    pub pole: Q,
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatorTensor {
    pub g: usize,
    pub n: usize,
    terms: BTreeMap<Vec<Factor>, Q>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    factors: Vec<(usize, String, u32)>,
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    g: usize,
    n: usize,
    terms: Vec<TermJson>,
}

/// Expands a product of factors in one variable into single-pole terms.
fn split_variable(factors: &[&Factor]) -> Vec<(Q, u32, Q)> {
    let mut acc: Vec<(Q, u32, Q)> = Vec::new();
    for f in factors {
        if f.order == 0 {
            continue;
        }
        if acc.is_empty() {
            acc.push((f.pole.clone(), f.order, q(1)));
            continue;
        }
        let mut next: BTreeMap<(Q, u32), Q> = BTreeMap::new();
        for (p, k, c) in &acc {
            if *k == 0 {
                *next.entry((f.pole.clone(), f.order)).or_insert_with(Q::zero) += c;
            } else if *p == f.pole {
                *next.entry((p.clone(), k + f.order)).or_insert_with(Q::zero) += c;
            } else {
                let (left, right) = partial_fraction_pair(p, *k, &f.pole, f.order);
                for (j, v) in left {
                    *next.entry((p.clone(), j)).or_insert_with(Q::zero) += c * v;
                }
                for (j, v) in right {
                    *next.entry((f.pole.clone(), j)).or_insert_with(Q::zero) += c * v;
                }
            }
        }
        acc = next.into_iter().filter(|(_, c)| !c.is_zero()).map(|((p, k), c)| (p, k, c)).collect();
    }
    if acc.is_empty() {
        acc.push((q(0), 0, q(1)));
    }
    acc
}

impl CorrelatorTensor {
    pub fn zero(g: usize, n: usize) -> Self {
        CorrelatorTensor { g, n, terms: BTreeMap::new() }
    }

    /// Builds a tensor from raw terms, merging and canonicalizing.
    pub fn from_terms(g: usize, n: usize, terms: BTreeMap<Vec<Factor>, Q>) -> Self {
        CorrelatorTensor { g, n, terms }.normalize()
    }

    pub fn from_list(g: usize, n: usize, terms: Vec<(Q, Vec<Factor>)>) -> Self {
        let mut t = Self::zero(g, n);
        for (c, f) in terms {
            let mut f = f;
            f.sort();
            *t.terms.entry(f).or_insert_with(Q::zero) += c;
        }
        t.normalize()
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Factor>, &Q)> {
        self.terms.iter()
    }

    pub fn max_order_at(&self, var: usize, pole: &Q) -> u32 {
        self.terms
            .keys()
            .flat_map(|fs| fs.iter())
            .filter(|f| f.var == var && f.pole == *pole)
            .map(|f| f.order)
            .max()
            .unwrap_or(0)
    }

    pub fn max_order(&self) -> u32 {
        self.terms.keys().flat_map(|fs| fs.iter()).map(|f| f.order).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Q) -> Self {
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        CorrelatorTensor { g: self.g, n: self.n, terms }.normalize()
    }

    /// Merges equal signatures, splits repeated variables by partial fractions,
    /// drops zeros, and orders terms canonically.
    pub fn normalize(&self) -> Self {
        let mut out: BTreeMap<Vec<Factor>, Q> = BTreeMap::new();
        for (factors, c) in &self.terms {
            if c.is_zero() {
                continue;
            }
            let mut by_var: BTreeMap<usize, Vec<&Factor>> = BTreeMap::new();
            for f in factors {
                by_var.entry(f.var).or_default().push(f);
            }
            let mut partial: Vec<(Vec<Factor>, Q)> = vec![(vec![], c.clone())];
            for (var, fs) in by_var {
                let pieces = split_variable(&fs);
                let mut next = Vec::with_capacity(partial.len() * pieces.len());
                for (key, v) in &partial {
                    for (p, k, w) in &pieces {
                        let mut key = key.clone();
                        if *k > 0 {
                            key.push(Factor { var, pole: p.clone(), order: *k });
                        }
                        next.push((key, v * w));
                    }
                }
                partial = next;
            }
            for (mut key, v) in partial {
                key.sort();
                *out.entry(key).or_insert_with(Q::zero) += v;
            }
        }
        out.retain(|_, v| !v.is_zero());
        CorrelatorTensor { g: self.g, n: self.n, terms: out }
    }

    /// Relabels variables: new variable `k` is old variable `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0; perm.len()];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        let terms = self
            .terms
            .iter()
            .map(|(fs, c)| {
                let mut nf: Vec<Factor> =
                    fs.iter().map(|f| Factor { var: inv[f.var], pole: f.pole.clone(), order: f.order }).collect();
                nf.sort();
                (nf, c.clone())
            })
            .collect();
        CorrelatorTensor { g: self.g, n: self.n, terms }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms = self
            .terms
            .iter()
            .map(|(fs, c)| TermJson {
                coeff: fmt_q(c),
                factors: fs.iter().map(|f| (f.var + 1, fmt_q(&f.pole), f.order)).collect(),
            })
            .collect();
        serde_json::to_value(TensorJson { g: self.g, n: self.n, terms }).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: TensorJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let mut list = Vec::new();
        for t in j.terms {
            let mut fs = Vec::new();
            for (i, p, k) in t.factors {
                if i == 0 || i > j.n {
                    return Err(Error::Parse(format!("variable index {i} out of range")));
                }
                fs.push(Factor { var: i - 1, pole: parse_q(&p)?, order: k });
            }
            list.push((parse_q(&t.coeff)?, fs));
        }
        Ok(Self::from_list(j.g, j.n, list))
    }

    /// Jet of `omega / prod dz_i` at the base points.
    pub fn omega_jet(&self, base: &[Q], order: usize) -> Result<Jet> {
        self.jet_with(base, order, |_| Ok(Series1::one(crate::series::EXACT)))
    }

    /// Jet of `W_{g,n} = omega / prod dx_i` at the base points.
    pub fn w_jet(&self, curve: &SpectralCurve, base: &[Q], order: usize) -> Result<Jet> {
        let dx = curve.dx();
        self.jet_with(base, order, |b| {
            let d = dx.expand_at(b, order as i64).map_err(|_| Error::PoleCollision("dx".into()))?;
            if d.coeff(0).is_zero() {
                return Err(Error::PoleCollision("dx".into()));
            }
            d.inverse()
        })
    }

    fn jet_with(&self, base: &[Q], order: usize, weight: impl Fn(&Q) -> Result<Series1>) -> Result<Jet> {
        if base.len() != self.n {
            return Err(Error::InvalidArgument(format!("need {} base points, got {}", self.n, base.len())));
        }
        let ord = order as i64;
        let mut weights = Vec::with_capacity(self.n);
        for (i, b) in base.iter().enumerate() {
            weights.push(weight(b).map_err(|e| match e {
                Error::PoleCollision(_) => Error::PoleCollision(format!("z{}", i + 1)),
                other => other,
            })?);
        }
        let mut cache: HashMap<(usize, Q, u32), Series1> = HashMap::new();
        let ring = jet_ring(self.n, order);
        let mut acc = ring.zero_like();
        for (fs, c) in &self.terms {
            let mut prod = ring.constant_like(c.clone());
            let mut seen = vec![false; self.n];
            for f in fs {
                seen[f.var] = true;
                let key = (f.var, f.pole.clone(), f.order);
                if !cache.contains_key(&key) {
                    let shift = &base[f.var] - &f.pole;
                    if shift.is_zero() {
                        return Err(Error::PoleCollision(format!("z{}", f.var + 1)));
                    }
                    let s = Series1::new(0, vec![shift, q(1)], ord).inverse()?.pow(f.order as i64)?;
                    cache.insert(key.clone(), &s * &weights[f.var]);
                }
                prod = prod.mul(&ring.from_series1(f.var, &cache[&key].truncate(ord)));
            }
            for (v, s) in seen.iter().enumerate() {
                if !s {
                    prod = prod.mul(&ring.from_series1(v, &weights[v].truncate(ord)));
                }
            }
            acc.add_assign(&prod);
        }
        Ok(Jet::new(base.to_vec(), order, acc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    fn f(var: usize, pole: i64, order: u32) -> Factor {
        Factor { var, pole: q(pole), order }
    }

    #[test]
    fn merge_to_empty() {
        let t = CorrelatorTensor::from_list(0, 1, vec![(q(1), vec![f(0, 0, 2)]), (q(-1), vec![f(0, 0, 2)])]);
        assert!(t.is_zero());
    }

    #[test]
    fn partial_fractions() {
        let t = CorrelatorTensor::from_list(0, 1, vec![(q(1), vec![f(0, 1, 1), f(0, -1, 1)])]);
        let want = CorrelatorTensor::from_list(0, 1, vec![(qr(1, 2), vec![f(0, 1, 1)]), (qr(-1, 2), vec![f(0, -1, 1)])]);
        assert_eq!(t, want);
        assert_eq!(t.normalize(), t);
    }

    #[test]
    fn json_roundtrip() {
        let t = CorrelatorTensor::from_list(1, 2, vec![(qr(3, 7), vec![f(0, 1, 2), f(1, -1, 3)])]);
        assert_eq!(CorrelatorTensor::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn omega_jet_value() {
        let t = CorrelatorTensor::from_list(0, 3, vec![(q(1), vec![f(0, 0, 2), f(1, 0, 2), f(2, 0, 2)])]);
        let j = t.omega_jet(&[q(1), q(2), q(3)], 0).unwrap();
        assert_eq!(j.value(), qr(1, 36));
    }
}
