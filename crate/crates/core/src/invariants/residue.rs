//! Exact residues at `z = 0`: per-variable pairings against correlator tensors, and
//! contour-ordered iterated residues of cycle-kernel integrands.

use crate::arith::{binomial, q, qi, qpow, Q};
use crate::error::{Error, Result};
use crate::tr::CorrelatorTensor;
use crate::xy::enumerate::n_cycles;
use crate::series::{Constraint, Mono, MultiSeries, MAXV};
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};

/// Finite Laurent polynomial in one variable, exponent to coefficient.
pub type Laurent = BTreeMap<i64, Q>;

/// `[z^j] (z - pole)^(-order)` for `j >= 0` and `pole != 0`.
fn pole_coefficient(pole: &Q, order: u32, j: i64) -> Q {
    let m = order as i64;
    let c = qi(binomial((m + j - 1) as usize, j as usize));
    c * qpow(&-pole.clone(), -m) * qpow(pole, -j)
}

/// `Res_{z=0} w(z) dz / (z - pole)^order`.
pub fn pair(w: &Laurent, pole: &Q, order: u32) -> Q {
    let mut acc = q(0);
    for (e, c) in w {
        if order == 0 {
            if *e == -1 {
                acc += c;
            }
            continue;
        }
        let j = -1 - e;
        if pole.is_zero() {
            if j == -(order as i64) {
                acc += c;
            }
        } else if j >= 0 {
            acc += c * pole_coefficient(pole, order, j);
        }
    }
    acc
}

/// `Res_{z_1=0} ... Res_{z_n=0} prod_i w_i(z_i) omega(z_1, ..., z_n)` for a tensor in
/// product form (each factor is one-variable).
pub fn tensor_residue(t: &CorrelatorTensor, weights: &[Laurent]) -> Result<Q> {
    if weights.len() != t.n {
        return Err(Error::InvalidArgument(format!("need {} weights, got {}", t.n, weights.len())));
    }
    let mut cache: HashMap<(usize, Q, u32), Q> = HashMap::new();
    let mut total = q(0);
    for (factors, c) in t.terms() {
        let mut v = c.clone();
        let mut seen = vec![false; t.n];
        for f in factors {
            if seen[f.var] {
                return Err(Error::InvalidArgument("tensor term is not in product form".into()));
            }
            seen[f.var] = true;
            let key = (f.var, f.pole.clone(), f.order);
            let r = cache.entry(key).or_insert_with(|| pair(&weights[f.var], &f.pole, f.order)).clone();
            v *= r;
            if v.is_zero() {
                break;
            }
        }
        if !v.is_zero() {
            for (i, s) in seen.iter().enumerate() {
                if !s {
                    v *= pair(&weights[i], &q(0), 0);
                }
            }
        }
        total += v;
    }
    Ok(total)
}

/// Variable layout for cycle-kernel integrands: `hbar`, then `z_1..z_n`, then one
/// optional parameter per point.
#[derive(Clone, Debug)]
pub struct KernelRing {
    pub n: usize,
    pub with_params: bool,
    pub base: MultiSeries,
}

impl KernelRing {
    /// `hbar <= h_bound`; parameter `i` bounded by `param_bounds[i]` when present.
    pub fn new(n: usize, h_bound: i64, param_bounds: Option<&[i64]>) -> Result<Self> {
        let with_params = param_bounds.is_some();
        let nv = 1 + n + if with_params { n } else { 0 };
        if nv > MAXV {
            return Err(Error::EnumerationLimit(n));
        }
        let mut names = vec!["h".to_string()];
        for i in 0..n {
            names.push(format!("z{}", i + 1));
        }
        let mut trunc = vec![Constraint::total(&[0], h_bound)];
        if let Some(b) = param_bounds {
            for (i, bi) in b.iter().enumerate() {
                names.push(format!("m{}", i + 1));
                trunc.push(Constraint::total(&[1 + n + i], *bi));
            }
        }
        let base = MultiSeries::new(std::sync::Arc::new(names), trunc);
        Ok(KernelRing { n, with_params, base })
    }

    pub fn h(&self) -> usize {
        0
    }

    pub fn z(&self, i: usize) -> usize {
        1 + i
    }

    pub fn param(&self, i: usize) -> usize {
        1 + self.n + i
    }

    pub fn zero(&self) -> MultiSeries {
        self.base.zero_like()
    }

    pub fn constant(&self, c: Q) -> MultiSeries {
        self.base.constant_like(c).with_trunc(self.base.trunc().to_vec())
    }

    pub fn mono(&self, exps: &[(usize, i16)], c: Q) -> MultiSeries {
        let mut m = Mono::zero();
        for (v, e) in exps {
            m.0[*v] += e;
        }
        self.base.monomial_like(m, c).with_trunc(self.base.trunc().to_vec())
    }

    /// `exp(s)` for `s` nilpotent in the scalar truncation.
    pub fn exp(&self, s: &MultiSeries) -> Result<MultiSeries> {
        s.clone().with_trunc(self.base.trunc().to_vec()).exp()
    }
}

/// Exponential scale `e^{c hbar u_i}` where `u_i` is the point's parameter (variable or number).
#[derive(Clone, Debug)]
pub enum Scale {
    Number(Q),
    Param,
}

fn scaled(ring: &KernelRing, i: usize, u: &Scale, c: Q) -> Result<MultiSeries> {
    let arg = match u {
        Scale::Number(k) => ring.mono(&[(ring.h(), 1)], c * k),
        Scale::Param => ring.mono(&[(ring.h(), 1), (ring.param(i), 1)], c),
    };
    ring.exp(&arg)
}

fn min_partial(s: &MultiSeries, ring: &KernelRing, rank: &[usize], k: usize) -> i64 {
    s.terms().map(|(m, _)| (0..=k).map(|p| m.0[ring.z(rank[p])] as i64).sum::<i64>()).min().unwrap_or(0)
}

/// `[hbar^h] Res_{z_{ord[n-1]}=0} ... Res_{z_{ord[0]}=0} prod_i E_i(z_i)
/// Sum_{n-cycles sigma} prod_i 1/(z_i e^{hbar u_i/2} - z_sigma(i) e^{-hbar u_sigma(i)/2})`,
/// with the innermost contour `ord[0]` smallest. Returns the remaining series in the
/// parameters.
pub fn cycle_residue(
    ring: &KernelRing,
    factors: &[MultiSeries],
    u: &[Scale],
    contour: &[usize],
    h: i64,
) -> Result<MultiSeries> {
    let n = ring.n;
    if factors.len() != n || u.len() != n || contour.len() != n || n < 2 {
        return Err(Error::InvalidArgument("cycle residue needs n >= 2 matching inputs".into()));
    }
    let mut pos = vec![0usize; n];
    for (p, &i) in contour.iter().enumerate() {
        if i >= n {
            return Err(Error::InvalidArgument("contour order is not a permutation".into()));
        }
        pos[i] = p;
    }
    let mut check = contour.to_vec();
    check.sort_unstable();
    if check != (0..n).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument("contour order is not a permutation".into()));
    }
    // Truncation bounds: in nested-annulus coordinates the exponent partial sums
    // sum_{p<=k} e_{contour[p]} must end at -(k+1).
    let reach: i64 = factors
        .iter()
        .map(|f| {
            let (lo, hi) = (0..n)
                .map(|i| f.degree_range(ring.z(i)).unwrap_or((0, 0)))
                .fold((0i64, 0i64), |(a, b), (l, hh)| (a.min(l as i64), b.max(hh as i64)));
            hi - lo
        })
        .sum();
    let mmax = n as i64 + reach;
    let mut pieces: Vec<Vec<MultiSeries>> = Vec::new();
    let mut edge_cache: HashMap<(usize, usize), MultiSeries> = HashMap::new();
    let cycles = n_cycles(n)?;
    for cyc in &cycles {
        let mut row = Vec::new();
        for (i, &j) in cyc.iter().enumerate() {
            if !edge_cache.contains_key(&(i, j)) {
                edge_cache.insert((i, j), edge_series(ring, u, i, j, pos[i] < pos[j], mmax)?);
            }
            row.push(edge_cache[&(i, j)].clone());
        }
        pieces.push(row);
    }
    let mut trunc = ring.base.trunc().to_vec();
    for k in 0..n {
        let mut slack = 0i64;
        for f in factors {
            slack += (-min_partial(f, ring, contour, k)).max(0);
        }
        let e = edge_cache.values().map(|s| (-min_partial(s, ring, contour, k)).max(0)).max().unwrap_or(0);
        slack += e * n as i64;
        let mut w = [0i16; MAXV];
        for p in 0..=k {
            w[ring.z(contour[p])] = 1;
        }
        trunc.push(Constraint { weights: w, bound: -(k as i64 + 1) + slack });
    }
    let mut common = ring.constant(q(1)).with_trunc(trunc.clone());
    for f in factors {
        common = common.mul_with(f, trunc.clone());
    }
    let mut total = ring.zero();
    for row in pieces {
        let mut acc = common.clone();
        for e in &row {
            acc = acc.mul_with(e, trunc.clone());
        }
        total.add_assign(&extract(ring, &acc, h)?);
    }
    Ok(total)
}

/// Expansion of one kernel factor in the annulus where the lower-rank variable is smaller.
fn edge_series(ring: &KernelRing, u: &[Scale], i: usize, j: usize, i_inner: bool, mmax: i64) -> Result<MultiSeries> {
    let mut s = ring.zero();
    for m in 0..=mmax {
        let mi = m as i16;
        let (mono, hs) = if i_inner {
            let a = scaled(ring, i, &u[i], Q::from_integer((m).into()) / q(2))?;
            let b = scaled(ring, j, &u[j], Q::from_integer((m + 1).into()) / q(2))?;
            (ring.mono(&[(ring.z(i), mi), (ring.z(j), -mi - 1)], q(-1)), a.mul(&b))
        } else {
            let a = scaled(ring, j, &u[j], -Q::from_integer((m).into()) / q(2))?;
            let b = scaled(ring, i, &u[i], -Q::from_integer((m + 1).into()) / q(2))?;
            (ring.mono(&[(ring.z(j), mi), (ring.z(i), -mi - 1)], q(1)), a.mul(&b))
        };
        s.add_assign(&mono.mul(&hs));
    }
    Ok(s)
}

/// Coefficient of `hbar^h prod z_i^{-1}`.
pub fn extract(ring: &KernelRing, s: &MultiSeries, h: i64) -> Result<MultiSeries> {
    let mut r = ring.zero().with_trunc(vec![]);
    for (m, c) in s.terms() {
        if m.0[ring.h()] as i64 != h || (0..ring.n).any(|i| m.0[ring.z(i)] != -1) {
            continue;
        }
        let mut rest = *m;
        rest.0[ring.h()] = 0;
        for i in 0..ring.n {
            rest.0[ring.z(i)] = 0;
        }
        r.add_term(rest, c.clone());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;
    use crate::tr::Factor;

    #[test]
    fn pairing_against_poles() {
        // Res z^{-2} dz/(z-1) = [z^1] 1/(z-1) = -1.
        let w: Laurent = [(-2, q(1))].into_iter().collect();
        assert_eq!(pair(&w, &q(1), 1), q(-1));
        // Res z^{-3} dz/(z-2)^2 = [z^2] (z-2)^{-2} = 3/16.
        let w: Laurent = [(-3, q(1))].into_iter().collect();
        assert_eq!(pair(&w, &q(2), 2), qr(3, 16));
        let w: Laurent = [(3, q(5))].into_iter().collect();
        assert_eq!(pair(&w, &q(0), 4), q(5));
    }

    #[test]
    fn tensor_pairing() {
        let t = CorrelatorTensor::from_list(
            0,
            2,
            vec![(q(2), vec![Factor { var: 0, pole: q(0), order: 2 }, Factor { var: 1, pole: q(1), order: 1 }])],
        );
        let w0: Laurent = [(1, q(1))].into_iter().collect();
        let w1: Laurent = [(-1, q(3))].into_iter().collect();
        // 2 * 1 * 3 * (-1).
        assert_eq!(tensor_residue(&t, &[w0, w1]).unwrap(), q(-6));
    }

    #[test]
    fn two_point_kernel_without_hbar() {
        // At hbar = 0 the kernel is -1/(z1 - z2)^2 = -sum (m+1) z1^m z2^{-m-2} for |z1| < |z2|.
        let ring = KernelRing::new(2, 0, None).unwrap();
        let f0 = ring.mono(&[(ring.z(0), -1)], q(1));
        let f1 = ring.mono(&[(ring.z(1), 1)], q(1));
        let u = [Scale::Number(q(1)), Scale::Number(q(1))];
        let r = cycle_residue(&ring, &[f0, f1], &u, &[0, 1], 0).unwrap();
        assert_eq!(r.coeff(&Mono::zero()), q(-1));
    }
}
