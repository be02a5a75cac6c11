//! Eynard-Orantin recursion on genus-zero curves with simple rational ramification points.
//!
//! Correlators are stored in the pole basis: each term is a coefficient times, for every
//! variable, a factor `1/(z_i - beta)^k` at a ramification point `beta`.

mod tensor;

pub use tensor::{CorrelatorTensor, Factor};

use crate::arith::{q, qr, Q};
use crate::curves::{ramification, SpectralCurve};
use crate::error::{Error, Result};
use crate::series::Series1;
use num_traits::Zero;
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

type Key = Vec<Factor>;

static MEMO: Lazy<RwLock<HashMap<(String, usize, usize), Arc<CorrelatorTensor>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn memo_budget_terms() -> usize {
    let mb = std::env::var("TRXY_MEMO_MB").ok().and_then(|s| s.parse::<usize>().ok()).unwrap_or(1024);
    mb.saturating_mul(1 << 20) / 256
}

fn memo_size() -> usize {
    MEMO.read().values().map(|t| t.len() * t.n.max(1)).sum()
}

pub fn clear_memo() {
    MEMO.write().clear();
}

/// Local data at one ramification point, at a fixed precision.
struct Local {
    beta: Q,
    sigma: Series1,
    dsigma: Series1,
    /// `1/D(t)` with `D = (Y(t) - Y(sigma(t))) x'(beta + t)`.
    dinv: Series1,
    prec: i64,
    kser: Vec<Series1>,
    slot_q: HashMap<(Q, u32), Series1>,
    slot_s: HashMap<(Q, u32), Series1>,
}

impl Local {
    fn new(curve: &SpectralCurve, beta: &Q, sigma: &Series1, prec: i64) -> Result<Self> {
        let sigma = sigma.truncate(prec);
        let dsigma = sigma.derivative();
        let y = curve.y.increment_at(beta, prec + 1)?;
        let ys = y.compose(&sigma)?;
        let dx = curve.dx().expand_at(beta, prec)?;
        let d = &(&y - &ys) * &dx;
        let dinv = d.inverse()?;
        Ok(Local {
            beta: beta.clone(),
            sigma,
            dsigma,
            dinv,
            prec,
            kser: Vec::new(),
            slot_q: HashMap::new(),
            slot_s: HashMap::new(),
        })
    }

    /// `1/2 (t^m - sigma^m) / D(t)`.
    fn kernel(&mut self, m: usize) -> Result<Series1> {
        while self.kser.len() <= m {
            let k = self.kser.len() as i64;
            let tm = Series1::monomial(q(1), k, crate::series::EXACT);
            let sm = self.sigma.pow(k)?;
            let s = (&(&tm - &sm) * &self.dinv).scale(&qr(1, 2));
            self.kser.push(s);
        }
        Ok(self.kser[m].clone())
    }

    /// `1/(z - pole)^k` at `z = beta + t`.
    fn at_q(&mut self, pole: &Q, k: u32) -> Result<Series1> {
        if let Some(s) = self.slot_q.get(&(pole.clone(), k)) {
            return Ok(s.clone());
        }
        let s = if *pole == self.beta {
            Series1::monomial(q(1), -(k as i64), crate::series::EXACT)
        } else {
            let c = &self.beta - pole;
            Series1::new(0, vec![c, q(1)], self.prec).inverse()?.pow(k as i64)?
        };
        self.slot_q.insert((pole.clone(), k), s.clone());
        Ok(s)
    }

    /// `sigma'(t) / (beta + sigma(t) - pole)^k`.
    fn at_sigma(&mut self, pole: &Q, k: u32) -> Result<Series1> {
        if let Some(s) = self.slot_s.get(&(pole.clone(), k)) {
            return Ok(s.clone());
        }
        let base = if *pole == self.beta {
            self.sigma.pow(-(k as i64))?
        } else {
            self.at_q(pole, k)?.compose(&self.sigma)?
        };
        let s = &base * &self.dsigma;
        self.slot_s.insert((pole.clone(), k), s.clone());
        Ok(s)
    }

    fn b_diag(&self) -> Result<Series1> {
        let t = Series1::var(crate::series::EXACT);
        let d = &t - &self.sigma;
        Ok(&d.pow(-2)? * &self.dsigma)
    }
}

fn valuation_bound(s: &Series1) -> i64 {
    if s.is_zero() {
        s.order() + 1
    } else {
        s.valuation()
    }
}

fn add_into(map: &mut BTreeMap<Key, Series1>, key: Key, s: Series1) {
    match map.get_mut(&key) {
        Some(v) => *v = &*v + &s,
        None => {
            map.insert(key, s);
        }
    }
}

/// One side of a product in the recursion: a function of the local slot and the spectators `vars`.
enum Side {
    B(usize),
    T(Arc<CorrelatorTensor>, Vec<usize>),
}

/// Groups a side by its spectator factors, summing slot expansions.
fn side_series(loc: &mut Local, side: &Side, sigma_slot: bool, mcap: i64) -> Result<BTreeMap<Key, Series1>> {
    let mut out = BTreeMap::new();
    match side {
        Side::B(j) => {
            let beta = loc.beta.clone();
            let w = if sigma_slot { loc.sigma.clone() } else { Series1::var(crate::series::EXACT) };
            let mut wm = Series1::one(crate::series::EXACT);
            for m in 0..=mcap.max(0) {
                let mut s = wm.scale(&q(m + 1));
                if sigma_slot {
                    s = &s * &loc.dsigma;
                }
                out.insert(vec![Factor { var: *j, pole: beta.clone(), order: (m + 2) as u32 }], s);
                wm = &wm * &w;
            }
        }
        Side::T(t, vars) => {
            for (factors, c) in t.terms() {
                let f0 = &factors[0];
                let l = if sigma_slot { loc.at_sigma(&f0.pole, f0.order)? } else { loc.at_q(&f0.pole, f0.order)? };
                let key: Key = factors[1..]
                    .iter()
                    .zip(vars)
                    .map(|(f, &v)| Factor { var: v, pole: f.pole.clone(), order: f.order })
                    .collect();
                add_into(&mut out, key, l.scale(c));
            }
        }
    }
    Ok(out)
}

fn side_pole(side: &Side, loc: &Local) -> i64 {
    match side {
        Side::B(_) => 0,
        Side::T(t, _) => t.max_order_at(0, &loc.beta) as i64,
    }
}

fn merge_keys(a: &Key, b: &Key) -> Key {
    let mut k: Key = a.iter().chain(b.iter()).cloned().collect();
    k.sort();
    k
}

/// Computes `omega_{g,n}` on `curve` by the recursion (memoized).
pub fn omega(curve: &SpectralCurve, g: usize, n: usize) -> Result<Arc<CorrelatorTensor>> {
    if 2 * g + n < 3 || n == 0 {
        return Err(Error::InvalidArgument(format!("omega needs 2g+n-2 > 0 and n >= 1, got ({g},{n})")));
    }
    let key = (curve.content_key(), g, n);
    if let Some(t) = MEMO.read().get(&key) {
        return Ok(t.clone());
    }
    let ram = ramification(curve, 4)?;
    let t = if ram.is_empty() {
        Arc::new(CorrelatorTensor::zero(g, n))
    } else {
        Arc::new(compute(curve, g, n)?)
    };
    if memo_size() + t.len() * n <= memo_budget_terms() {
        MEMO.write().insert(key, t.clone());
    }
    Ok(t)
}

fn compute(curve: &SpectralCurve, g: usize, n: usize) -> Result<CorrelatorTensor> {
    let mut prec = (6 * g + 2 * n + 6) as i64;
    for _ in 0..6 {
        match compute_at(curve, g, n, prec) {
            Err(Error::Truncation(_)) => prec *= 2,
            other => return other,
        }
    }
    Err(Error::Truncation(format!("recursion for ({g},{n}) did not converge in precision")))
}

fn compute_at(curve: &SpectralCurve, g: usize, n: usize, prec: i64) -> Result<CorrelatorTensor> {
    let ram = ramification(curve, prec + 2)?;
    let spect: Vec<usize> = (1..n).collect();
    let mut result: BTreeMap<Key, Q> = BTreeMap::new();

    let mut pairs: Vec<(Side, Side)> = Vec::new();
    let mut diag: Option<Arc<CorrelatorTensor>> = None;
    let mut diag_b = false;
    if g >= 1 {
        if g == 1 && n == 1 {
            diag_b = true;
        } else {
            diag = Some(omega(curve, g - 1, n + 1)?);
        }
    }
    let m = spect.len();
    for mask in 0u32..(1u32 << m) {
        let i1: Vec<usize> = (0..m).filter(|b| mask & (1 << b) != 0).map(|b| spect[b]).collect();
        let i2: Vec<usize> = (0..m).filter(|b| mask & (1 << b) == 0).map(|b| spect[b]).collect();
        for g1 in 0..=g {
            let g2 = g - g1;
            if (g1 == 0 && i1.is_empty()) || (g2 == 0 && i2.is_empty()) {
                continue;
            }
            let side = |gg: usize, ii: &Vec<usize>| -> Result<Side> {
                if gg == 0 && ii.len() == 1 {
                    Ok(Side::B(ii[0]))
                } else {
                    Ok(Side::T(omega(curve, gg, ii.len() + 1)?, ii.clone()))
                }
            };
            pairs.push((side(g1, &i1)?, side(g2, &i2)?));
        }
    }

    for (bi, beta) in ram.points.iter().enumerate() {
        let mut loc = Local::new(curve, beta, &ram.involutions[bi], prec)?;
        let mut integrand: BTreeMap<Key, Series1> = BTreeMap::new();
        if diag_b {
            integrand.insert(vec![], loc.b_diag()?);
        }
        if let Some(t) = &diag {
            for (factors, c) in t.terms() {
                let a = loc.at_q(&factors[0].pole, factors[0].order)?;
                let b = loc.at_sigma(&factors[1].pole, factors[1].order)?;
                let key: Key = factors[2..]
                    .iter()
                    .zip(&spect)
                    .map(|(f, &v)| Factor { var: v, pole: f.pole.clone(), order: f.order })
                    .collect();
                add_into(&mut integrand, key, (&a * &b).scale(c));
            }
        }
        for (s1, s2) in &pairs {
            let p1 = side_pole(s1, &loc);
            let p2 = side_pole(s2, &loc);
            let a = side_series(&mut loc, s1, false, p2)?;
            let b = side_series(&mut loc, s2, true, p1)?;
            for (ka, sa) in &a {
                for (kb, sb) in &b {
                    add_into(&mut integrand, merge_keys(ka, kb), sa * sb);
                }
            }
        }
        for (key, f) in integrand {
            let v = valuation_bound(&f);
            if v >= 1 {
                continue;
            }
            for mk in 1..=(1 - v) as usize {
                let k = loc.kernel(mk)?;
                let r = (&k * &f).known_coeff(-1)?;
                if r.is_zero() {
                    continue;
                }
                let mut full = vec![Factor { var: 0, pole: beta.clone(), order: (mk + 1) as u32 }];
                full.extend(key.iter().cloned());
                let e = result.entry(full).or_insert_with(Q::zero);
                *e += r;
            }
        }
    }
    result.retain(|_, v| !v.is_zero());
    Ok(CorrelatorTensor::from_terms(g, n, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::preset;
    use crate::series::default_base_points;

    #[test]
    fn airy_03() {
        let c = preset("airy", &[]).unwrap();
        let t = omega(&c, 0, 3).unwrap();
        assert_eq!(t.len(), 1);
        let (f, v) = t.terms().next().unwrap();
        assert_eq!(*v, qr(-1, 2));
        assert!(f.iter().all(|x| x.order == 2 && x.pole == q(0)));
    }

    #[test]
    fn airy_11() {
        let c = preset("airy", &[]).unwrap();
        let t = omega(&c, 1, 1).unwrap();
        assert_eq!(t.len(), 1);
        let (f, v) = t.terms().next().unwrap();
        assert_eq!(*v, qr(-1, 16));
        assert_eq!(f[0].order, 4);
    }

    #[test]
    fn gamma_unramified_vanishes() {
        let c = preset("gamma", &[]).unwrap();
        assert!(omega(&c, 1, 1).unwrap().is_zero());
    }

    #[test]
    fn symmetric_on_two_points() {
        let c = preset("gw-p1", &[("t", q(1))]).unwrap();
        let t = omega(&c, 1, 2).unwrap();
        let base = default_base_points(2);
        let j = t.w_jet(&c, &base, 2).unwrap();
        let t2 = t.permuted(&[1, 0]);
        let j2 = t2.w_jet(&c, &base, 2).unwrap();
        assert_eq!(j, j2);
    }
}
