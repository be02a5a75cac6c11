use super::ctx::{fmt_var, Ctx};
use super::enumerate::set_partitions;
use super::{edge, y_coordinates};
use crate::arith::{binomial_q, factorial_q, q, qr, s_coefficients, Q};
use crate::curves::{KernelType, SpectralCurve};
use crate::error::{Error, Result};
use crate::series::{Constraint, Jet, Mono, MultiSeries, Poly, RationalFunction1, Series1};
use crate::tr::{omega, CorrelatorTensor};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

type PoleKey = Option<(Q, u32)>;

struct Dual<'a> {
    ctx: Ctx<'a>,
    keys: HashMap<PoleKey, usize>,
    s_cache: HashMap<(usize, PoleKey), MultiSeries>,
}

impl<'a> Dual<'a> {
    /// `[1/(z - beta)^k] / y'(z)`.
    fn factor_function(&self, key: &PoleKey) -> Result<RationalFunction1> {
        let dy = self.ctx.curve.dy();
        let base = match key {
            None => RationalFunction1::constant(q(1)),
            Some((beta, k)) => RationalFunction1::new(Poly::one(), Poly::linear(beta).pow(*k))?,
        };
        base.div(&dy)
    }

    fn s_factor(&mut self, i: usize, key: &PoleKey) -> Result<MultiSeries> {
        if let Some(v) = self.s_cache.get(&(i, key.clone())) {
            return Ok(v.clone());
        }
        let next = self.keys.len();
        let id = 2_000_000 + *self.keys.entry(key.clone()).or_insert(next);
        let f = self.factor_function(key)?;
        let s = self.ctx.s_operator(i, id, &f, 0)?;
        self.s_cache.insert((i, key.clone()), s.clone());
        Ok(s)
    }

    /// `hbar^{hpow} prod_k hbar u S(hbar u d/dy)` at variables `vars` applied to `W^vee`.
    fn tensor_part(&mut self, t: &CorrelatorTensor, vars: &[usize], hpow: i64) -> Result<MultiSeries> {
        let mut acc = self.ctx.ring().zero_like();
        for (factors, coef) in t.terms() {
            let mut prod = self.ctx.constant(coef.clone());
            for (k, &v) in vars.iter().enumerate() {
                let key = factors.iter().find(|f| f.var == k).map(|f| (f.pole.clone(), f.order));
                let s = self.s_factor(v, &key)?;
                prod = self.ctx.mulf(&prod, &s);
            }
            acc.add_assign(&prod);
        }
        let mut r = acc.mul_mono(&Mono::unit(self.ctx.h(), hpow as i16), &q(1));
        r.restrict(&self.ctx.ring());
        self.ctx.filter(&mut r);
        Ok(r)
    }

    fn y_series(&self, i: usize, order: i64) -> Result<(Series1, Series1)> {
        let y = &self.ctx.curve.y.rational;
        let b = &self.ctx.base[i];
        let s = y.expand_at(b, order).map_err(|_| Error::PoleCollision(fmt_var(i)))?;
        let d = y.derivative().expand_at(b, order).map_err(|_| Error::PoleCollision(fmt_var(i)))?;
        if d.coeff(0) == q(0) || s.valuation() < 0 || d.valuation() < 0 {
            return Err(Error::PoleCollision(fmt_var(i)));
        }
        Ok((s, d))
    }

    /// `sum s_a s_b hbar^{2+2a+2b} u_i^{2a+1} u_j^{2b+1} D_i^{2a} D_j^{2b} f`, where
    /// `D = (1/y') d/dz` is written through `da, db` on the working variables.
    fn two_point_s(
        &self,
        f: &MultiSeries,
        da: &dyn Fn(&MultiSeries) -> MultiSeries,
        db: &dyn Fn(&MultiSeries) -> MultiSeries,
        ui: usize,
        uj: usize,
        close: &dyn Fn(&MultiSeries) -> Result<MultiSeries>,
    ) -> Result<MultiSeries> {
        let c = &self.ctx;
        let s = s_coefficients(c.hb.max(0) as usize + 2);
        let mut acc = c.ring().zero_like();
        let mut row = f.clone();
        let mut a = 0i64;
        while 2 + 2 * a <= c.hb {
            let mut g = row.clone();
            let mut b = 0i64;
            while 2 + 2 * a + 2 * b <= c.hb {
                let mut m = Mono::zero();
                m.0[c.h()] = (2 + 2 * a + 2 * b) as i16;
                m.0[ui] += (2 * a + 1) as i16;
                m.0[uj] += (2 * b + 1) as i16;
                let coef = &s[2 * a as usize] * &s[2 * b as usize];
                let mut piece = close(&g)?.mul_mono(&m, &coef);
                piece.restrict(&c.ring());
                acc.add_assign(&piece);
                g = db(&db(&g));
                b += 1;
            }
            row = da(&da(&row));
            a += 1;
        }
        Ok(acc)
    }

    /// Genus-zero part of the pair exponent beyond `log P_ij`: the regular part
    /// `W^vee_{0,2} - 1/(y_i - y_j)^2` under both shift operators.
    fn regular_pair(&self, i: usize, j: usize) -> Result<MultiSeries> {
        let c = &self.ctx;
        let k = c.eb + c.hb + 4;
        let (ei, ej) = (c.e(i), c.e(j));
        let mut ring = c.ring_with(&[(ei, k), (ej, k)]);
        ring.add_constraint(Constraint::total(&[ei, ej], self.filtered_degree(2)));
        let (yi, dyi) = self.y_series(i, k)?;
        let (yj, dyj) = self.y_series(j, k)?;
        let yi = ring.from_series1(ei, &yi).restrict_to(&ring);
        let yj = ring.from_series1(ej, &yj).restrict_to(&ring);
        let pi = ring.from_series1(ei, &dyi).restrict_to(&ring);
        let pj = ring.from_series1(ej, &dyj).restrict_to(&ring);
        let dz = ring
            .constant_like(&c.base[i] - &c.base[j])
            .add(&ring.var_like(ei))
            .sub(&ring.var_like(ej))
            .restrict_to(&ring);
        let pair = format!("{} and {}", fmt_var(i), fmt_var(j));
        let inv = |s: &MultiSeries| s.inverse().map_err(|_| Error::PoleCollision(pair.clone()));
        let w02 = inv(&dz.mul(&dz).mul(&pi).mul(&pj))?;
        let dyy = yi.sub(&yj);
        let sing = inv(&dyy.mul(&dyy))?;
        let f = w02.sub(&sing);
        let ipi = inv(&pi)?;
        let ipj = inv(&pj)?;
        let da = |s: &MultiSeries| ipi.mul(&s.derivative(ei));
        let db = |s: &MultiSeries| ipj.mul(&s.derivative(ej));
        let close = |s: &MultiSeries| Ok(s.clone());
        let r = self.two_point_s(&f, &da, &db, c.u(i), c.u(j), &close)?;
        Ok(self.to_ring(r))
    }

    /// Total `e`-degree, before `hb` derivatives and a shift by `extra`, that a pair term
    /// needs to survive the weight filter.
    fn filtered_degree(&self, extra: i64) -> i64 {
        let c = &self.ctx;
        (c.qmax - 2).max(0) / 2 + c.hb.max(0) / 2 + extra + 1
    }

    /// Drops the auxiliary truncation, keeping only terms that pass the weight filter.
    fn to_ring(&self, mut r: MultiSeries) -> MultiSeries {
        r.set_trunc(self.ctx.ring().trunc().to_vec());
        self.ctx.filter(&mut r);
        r
    }

    /// Diagonal value of the regular part at variable `j`, with `z_2 = z_1 + d`.
    fn regular_diagonal(&self, j: usize) -> Result<MultiSeries> {
        let c = &self.ctx;
        let k = self.filtered_degree(4).min(c.eb + c.hb + 6);
        let (e, d) = (c.e(j), c.d());
        let mut ring = c.ring_with(&[]);
        ring.add_constraint(Constraint::total(&[e, d], k));
        let (ys, dys) = self.y_series(j, k + 2)?;
        let ev = ring.var_like(e);
        let dv = ring.var_like(d);
        let sum = ev.add(&dv);
        let mut p1 = ring.zero_like();
        let mut p2 = ring.zero_like();
        let mut quot = ring.zero_like();
        let mut pow_s = ring.constant_like(q(1)).restrict_to(&ring);
        for kk in 0..=k {
            let ck = dys.coeff(kk);
            p1.add_assign(&ring.monomial_like(Mono::unit(e, kk as i16), ck.clone()).restrict_to(&ring));
            p2.add_assign(&pow_s.scale(&ck));
            let yk = ys.coeff(kk + 1);
            if yk != q(0) {
                let kk1 = kk as usize + 1;
                for l in 1..=kk1 {
                    let mut m = Mono::zero();
                    m.0[e] = (kk1 - l) as i16;
                    m.0[d] = (l - 1) as i16;
                    let cf = binomial_q(&q(kk1 as i64), l) * &yk;
                    quot.add_assign(&ring.monomial_like(m, cf).restrict_to(&ring));
                }
            }
            pow_s = pow_s.mul(&sum);
        }
        let what = fmt_var(j);
        let inv = |s: &MultiSeries| s.inverse().map_err(|_| Error::PoleCollision(what.clone()));
        let num = inv(&p1.mul(&p2))?.sub(&inv(&quot.mul(&quot))?);
        for low in 0..2 {
            if !num.coeff_of(d, low)?.is_zero() {
                return Err(Error::UnsupportedCurve("dual two-point function is singular on the diagonal".into()));
            }
        }
        let r = num.mul_mono(&Mono::unit(d, -2), &q(1));
        let ip1 = inv(&p1)?;
        let ip2 = inv(&p2)?;
        let da = |s: &MultiSeries| ip1.mul(&s.derivative(e).sub(&s.derivative(d)));
        let db = |s: &MultiSeries| ip2.mul(&s.derivative(d));
        let ring_j = c.ring();
        let close = |s: &MultiSeries| -> Result<MultiSeries> {
            let mut v = s.coeff_of(d, 0)?;
            v.restrict(&ring_j);
            Ok(v)
        };
        let uj = c.u(j);
        let r = self.two_point_s(&r, &da, &db, uj, uj, &close)?;
        Ok(self.to_ring(r))
    }
}

trait RestrictTo {
    fn restrict_to(self, r: &MultiSeries) -> MultiSeries;
}

impl RestrictTo for MultiSeries {
    fn restrict_to(mut self, r: &MultiSeries) -> MultiSeries {
        self.restrict(r);
        self
    }
}

/// Sorted label lists of length `k` with repetition allowed.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|m: Vec<usize>| {
                let lo = m.last().copied().unwrap_or(0);
                (lo..n).map(move |v| {
                    let mut m = m.clone();
                    m.push(v);
                    m
                })
            })
            .collect();
    }
    out
}

fn subsets(n: usize, min: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .filter(|m| m.count_ones() as usize >= min)
        .map(|m| (0..n).filter(|b| m & (1 << b) != 0).collect())
        .collect()
}

/// Sum over connected bicoloured graphs, organized as the connected part of
/// `prod_I exp(c_I)` times the diagonal factors `exp(c_jj / 2)`.
pub(super) fn evaluate(curve: &SpectralCurve, g: usize, n: usize, base: &[Q], order: usize) -> Result<Jet> {
    super::enumerate::bicoloured(n, 0)?;
    let target = (2 * g + n) as i64 - 2;
    let ctx = Ctx::new(curve, n, base, order, target, n as i64)?;
    let kernel = ctx.kernel;
    let mobius = kernel == KernelType::Exponential
        || (curve.y.rational.num.degree() <= 1 && curve.y.rational.den.degree() <= 1);
    let hb = ctx.hb;
    let mut dual = Dual { ctx, keys: HashMap::new(), s_cache: HashMap::new() };
    let swapped = curve.swap_xy();
    let mut tensors: BTreeMap<(usize, usize), Arc<CorrelatorTensor>> = BTreeMap::new();
    if !mobius {
        for k in 1..=(hb.max(0) as usize / 2 + 1).max(n) {
            let mut gg = 0usize;
            while 2 * gg as i64 + 2 * k as i64 - 2 <= hb {
                if 2 * gg + k >= 3 {
                    tensors.insert((gg, k), omega(&swapped, gg, k)?);
                }
                gg += 1;
            }
        }
    }

    // Neighbourhoods with repeated labels, weighted by the inverse multiplicity factorials,
    // accumulated on their supports.
    let mut repeated: BTreeMap<Vec<usize>, MultiSeries> = BTreeMap::new();
    for ((gg, k), t) in &tensors {
        if *k < 3 {
            continue;
        }
        for ms in multisets(n, *k) {
            let mut support = ms.clone();
            support.dedup();
            if support.len() == ms.len() {
                continue;
            }
            let mut weight = q(1);
            for v in &support {
                weight *= factorial_q(ms.iter().filter(|w| *w == v).count());
            }
            let part = dual.tensor_part(t, &ms, (2 * gg + k) as i64 - 2)?.scale(&weight.recip());
            match repeated.get_mut(&support) {
                Some(acc) => acc.add_assign(&part),
                None => {
                    repeated.insert(support, part);
                }
            }
        }
    }

    let ys = y_coordinates(&dual.ctx)?;
    let mut exps: BTreeMap<Vec<usize>, MultiSeries> = BTreeMap::new();
    for set in subsets(n, 2) {
        let k = set.len();
        let mut c_i = dual.ctx.ring().zero_like();
        for ((gg, kk), t) in &tensors {
            if *kk == k && !(k == 2 && *gg == 0) {
                c_i.add_assign(&dual.tensor_part(t, &set, (2 * gg + k) as i64 - 2)?);
            }
        }
        if let Some(r) = repeated.get(&set) {
            c_i.add_assign(r);
        }
        let mut e = if k == 2 && !mobius {
            c_i.add_assign(&dual.regular_pair(set[0], set[1])?);
            dual.ctx.exp(&c_i)?
        } else {
            dual.ctx.exp(&c_i)?
        };
        if k == 2 {
            let p = edge(&dual.ctx, &ys, set[0], set[1])?.add(&dual.ctx.constant(q(1)));
            e = dual.ctx.mulf(&e, &p);
        }
        exps.insert(set, e);
    }

    let mut prefactor = dual.ctx.constant(q(1));
    let mut a = Vec::with_capacity(n);
    for j in 0..n {
        let mut diag = dual.ctx.ring().zero_like();
        if !mobius {
            diag.add_assign(&dual.regular_diagonal(j)?);
            for ((gg, kk), t) in &tensors {
                if *kk == 2 && *gg >= 1 {
                    diag.add_assign(&dual.tensor_part(t, &[j, j], 2 * *gg as i64)?);
                }
            }
        }
        let mut diag = diag.scale(&qr(1, 2));
        if let Some(r) = repeated.get(&vec![j]) {
            diag.add_assign(r);
        }
        let half = dual.ctx.exp(&diag)?;
        let mut m = Mono::zero();
        m.0[dual.ctx.h()] = -1;
        m.0[dual.ctx.u(j)] = -1;
        let local = dual.ctx.mulf(&half, &dual.ctx.diagonal(j)).mul_mono(&m, &q(1));
        prefactor = prefactor.mul(&local);

        let mut extra = Vec::new();
        for ((gg, kk), t) in &tensors {
            if *kk == 1 {
                let mut w = RationalFunction1::zero();
                for (factors, coef) in t.terms() {
                    let key = factors.first().map(|f| (f.pole.clone(), f.order));
                    w = w.add(&dual.factor_function(&key)?.scale(coef));
                }
                extra.push((*gg, w));
            }
        }
        a.push(dual.ctx.exponent(j, &extra)?);
    }

    let mut blocks: BTreeMap<Vec<usize>, MultiSeries> = BTreeMap::new();
    for set in subsets(n, 1) {
        let mut f = dual.ctx.constant(q(1));
        for (sub, e) in &exps {
            if sub.iter().all(|v| set.contains(v)) {
                f = dual.ctx.mulf(&f, e);
            }
        }
        blocks.insert(set, f);
    }
    let mut conn = dual.ctx.ring().zero_like();
    for p in set_partitions(n) {
        let k = p.len();
        let mu = if k % 2 == 1 { factorial_q(k - 1) } else { -factorial_q(k - 1) };
        let mut prod = dual.ctx.constant(mu);
        for b in &p {
            prod = dual.ctx.mulf(&prod, &blocks[b]);
        }
        conn.add_assign(&prod);
    }
    let t = conn.mul(&prefactor);
    dual.ctx.apply(t, &a)
}

#[cfg(test)]
mod tests {
    use super::super::enumerate::bicoloured;
    use super::*;
    use crate::curves::preset;
    use crate::series::default_base_points;

    /// Truncated polynomials in a counting parameter.
    fn mul(a: &[Q], b: &[Q], k: usize) -> Vec<Q> {
        let mut r = vec![q(0); k + 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j <= k {
                    r[i + j] += x * y;
                }
            }
        }
        r
    }

    fn exp_lin(c: &Q, k: usize) -> Vec<Q> {
        (0..=k).map(|m| crate::arith::qpow(c, m as i64) / factorial_q(m)).collect()
    }

    #[test]
    fn bicoloured_sum_is_connected_exponential() {
        let n = 3;
        let k = 4;
        let weight = |e: &Vec<usize>| -> Q {
            if e[0] == e[1] && e.len() == 2 {
                q(2 + e[0] as i64)
            } else {
                q(e.iter().map(|v| *v as i64 + 1).product::<i64>() + e.len() as i64)
            }
        };
        let mut direct = vec![q(0); k + 1];
        for gr in bicoloured(n, k).unwrap() {
            let mut w = q(1);
            for e in &gr.edges {
                w *= weight(e);
            }
            direct[gr.edges.len()] += w / q(gr.automorphisms as i64);
        }
    let mut blocks: BTreeMap<Vec<usize>, Vec<Q>> = BTreeMap::new();
        for set in subsets(n, 1) {
            let mut f = vec![q(1)];
            for sub in subsets(n, 2) {
                if sub.iter().all(|v| set.contains(v)) {
                    f = mul(&f, &exp_lin(&weight(&sub), k), k);
                }
            }
            blocks.insert(set, f);
        }
        let mut conn = vec![q(0); k + 1];
        for p in set_partitions(n) {
            let m = p.len();
            let mu = if m % 2 == 1 { factorial_q(m - 1) } else { -factorial_q(m - 1) };
            let mut prod = vec![mu];
            for b in &p {
                prod = mul(&prod, &blocks[b], k);
            }
            for (i, v) in prod.into_iter().enumerate() {
                conn[i] += v;
            }
        }
        for j in 0..n {
            conn = mul(&conn, &exp_lin(&(weight(&vec![j, j]) / q(2)), k), k);
        }
        assert_eq!(direct, conn);
    }

    #[test]
    fn general_matches_cycles_on_unramified_dual() {
        let c = preset("airy", &[]).unwrap();
        let b = default_base_points(2);
        assert_eq!(super::evaluate(&c, 1, 2, &b, 1).unwrap(), super::super::xy_cycles(&c, 1, 2, &b, 1).unwrap());
    }

    #[test]
    fn cubic_one_point() {
        let c = preset("cubic", &[]).unwrap();
        let b = default_base_points(1);
        let x = super::evaluate(&c, 1, 1, &b, 2).unwrap();
        let t = super::super::correlator(&c, 1, 1, super::super::Method::Tr, &b, 2).unwrap();
        assert_eq!(x, t);
    }
}
