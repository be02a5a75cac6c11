use crate::arith::{bernoulli_half, q, s_coefficients, Q};
use crate::curves::{KernelType, SpectralCurve};
use crate::error::{Error, Result};
use crate::series::{jet_ring, Constraint, Jet, Mono, MultiSeries, RationalFunction1};
use std::collections::HashMap;
use std::sync::Arc;

/// Working ring for one dual evaluation: `hbar`, `u_1..u_n`, `e_1..e_n` and a spare `d`.
pub(crate) struct Ctx<'a> {
    pub curve: &'a SpectralCurve,
    pub kernel: KernelType,
    pub n: usize,
    pub base: Vec<Q>,
    pub order: usize,
    pub target: i64,
    pub hb: i64,
    pub eb: i64,
    pub qmax: i64,
    names: Arc<Vec<String>>,
    dx_inv: Vec<MultiSeries>,
    weight: Vec<MultiSeries>,
    dy_chain: HashMap<(usize, usize), RationalFunction1>,
}

pub(crate) fn fmt_var(i: usize) -> String {
    format!("z{}", i + 1)
}

fn pole(i: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::NotInvertible | Error::PoleCollision(_) => Error::PoleCollision(fmt_var(i)),
        other => other,
    }
}

impl<'a> Ctx<'a> {
    /// `target` is the `hbar` power extracted at the end; `slack` bounds the number of
    /// later factors that can lower the filter weight by one.
    pub fn new(curve: &'a SpectralCurve, n: usize, base: &[Q], order: usize, target: i64, slack: i64) -> Result<Self> {
        if base.len() != n {
            return Err(Error::InvalidArgument(format!("need {n} base points, got {}", base.len())));
        }
        if 2 * n + 2 > crate::series::MAXV {
            return Err(Error::EnumerationLimit(n));
        }
        let kernel = curve.kernel_type()?;
        let hb = target + n as i64;
        let eb = order as i64 + (3 * hb) / 2 + 3;
        let mut names = vec!["h".to_string()];
        names.extend((1..=n).map(|i| format!("u{i}")));
        names.extend((1..=n).map(|i| format!("e{i}")));
        names.push("d".into());
        let mut ctx = Ctx {
            curve,
            kernel,
            n,
            base: base.to_vec(),
            order,
            target,
            hb,
            eb,
            qmax: 2 * order as i64 + 3 * target + slack,
            names: Arc::new(names),
            dx_inv: vec![],
            weight: vec![],
            dy_chain: HashMap::new(),
        };
        let dx = curve.dx();
        let dy = curve.dy();
        for i in 0..n {
            if dx.eval(&ctx.base[i]).map(|v| v == q(0)).unwrap_or(true) {
                return Err(Error::PoleCollision(fmt_var(i)));
            }
            let inv = RationalFunction1::constant(q(1)).div(&dx).map_err(pole(i))?;
            let w = dy.div(&dx).map_err(pole(i))?.neg();
            ctx.dx_inv.push(ctx.expand(i, &inv)?);
            ctx.weight.push(ctx.expand(i, &w)?);
        }
        Ok(ctx)
    }

    pub fn h(&self) -> usize {
        0
    }

    pub fn u(&self, i: usize) -> usize {
        1 + i
    }

    pub fn e(&self, i: usize) -> usize {
        1 + self.n + i
    }

    pub fn d(&self) -> usize {
        1 + 2 * self.n
    }

    pub fn ring(&self) -> MultiSeries {
        let mut t = vec![Constraint::total(&[self.h()], self.hb)];
        for i in 0..self.n {
            t.push(Constraint::total(&[self.e(i)], self.eb));
        }
        MultiSeries::new(self.names.clone(), t)
    }

    /// Empty series with `hbar <= hb` and the given bounds on single variables.
    pub fn ring_with(&self, bounds: &[(usize, i64)]) -> MultiSeries {
        let mut t = vec![Constraint::total(&[self.h()], self.hb)];
        for &(v, b) in bounds {
            t.push(Constraint::total(&[v], b));
        }
        MultiSeries::new(self.names.clone(), t)
    }

    pub fn constant(&self, c: Q) -> MultiSeries {
        self.ring().constant_like(c)
    }

    pub fn mono(&self, exps: &[(usize, i16)], c: Q) -> MultiSeries {
        let mut m = Mono::zero();
        for &(v, e) in exps {
            m.0[v] += e;
        }
        self.ring().monomial_like(m, c)
    }

    fn weight_of(&self, m: &Mono) -> i64 {
        let mut w = 3 * m.0[0] as i64;
        for i in 0..self.n {
            w += 2 * m.0[self.e(i)] as i64 - 2 * m.0[self.u(i)] as i64;
        }
        w
    }

    /// Drops monomials that cannot reach the final coefficient.
    pub fn filter(&self, s: &mut MultiSeries) {
        self.filter_with(s, 0);
    }

    fn filter_with(&self, s: &mut MultiSeries, extra: i64) {
        let cap = self.qmax + extra;
        let n = self.n;
        s.retain(|m| {
            let mut w = 3 * m.0[0] as i64;
            for i in 0..n {
                w += 2 * m.0[1 + n + i] as i64 - 2 * m.0[1 + i] as i64;
            }
            w <= cap && (m.0[0] as i64) <= cap
        });
    }

    pub fn mulf(&self, a: &MultiSeries, b: &MultiSeries) -> MultiSeries {
        let mut r = a.mul(b);
        self.filter(&mut r);
        r
    }

    /// `f(b_i + e_i)`; a pole at the base point is a collision.
    pub fn expand(&self, i: usize, f: &RationalFunction1) -> Result<MultiSeries> {
        let s = f.expand_at(&self.base[i], self.eb).map_err(pole(i))?;
        if s.valuation() < 0 && !s.is_zero() {
            return Err(Error::PoleCollision(fmt_var(i)));
        }
        Ok(self.ring().from_series1(self.e(i), &s))
    }

    /// `1/d` for a series with invertible constant term, filtered termwise.
    pub fn inverse(&self, d: &MultiSeries, what: &str) -> Result<MultiSeries> {
        let c0 = d.coeff(&Mono::zero());
        if c0 == q(0) {
            return Err(Error::PoleCollision(what.into()));
        }
        let mut rest = d.clone();
        rest.retain(|m| !m.is_zero());
        let r = rest.scale(&-c0.recip());
        if r.terms().any(|(m, _)| self.weight_of(m) <= 0) {
            return d.inverse();
        }
        let mut acc = self.ring().constant_like(q(1));
        acc.restrict(&self.ring());
        acc.restrict(d);
        let mut p = acc.clone();
        for _ in 0..4096 {
            p = self.mulf(&p, &r);
            p.restrict(&acc);
            if p.is_empty() {
                return Ok(acc.scale(&c0.recip()));
            }
            acc.add_assign(&p);
        }
        Err(Error::NotNilpotent("kernel denominator".into()))
    }

    /// `exp(a)` for `a` without constant term, filtered termwise.
    pub fn exp(&self, a: &MultiSeries) -> Result<MultiSeries> {
        self.exp_with(a, 0)
    }

    /// As `exp`, for a factor that will multiply terms of weight down to `-extra`.
    pub fn exp_with(&self, a: &MultiSeries, extra: i64) -> Result<MultiSeries> {
        if a.coeff(&Mono::zero()) != q(0) {
            return Err(Error::InvalidArgument("exp needs zero constant term".into()));
        }
        let mut acc = self.ring().constant_like(q(1));
        acc.restrict(&self.ring());
        acc.restrict(a);
        let mut p = acc.clone();
        for k in 1..4096i64 {
            p = p.mul(a).scale(&crate::arith::qr(1, k));
            self.filter_with(&mut p, extra);
            p.restrict(&acc);
            if p.is_empty() {
                return Ok(acc);
            }
            acc.add_assign(&p);
        }
        Err(Error::NotNilpotent("exponent".into()))
    }

    /// `(d/dy)^k f` in the `z`-chart, for rational `f` tagged by `key`.
    pub fn dy_pow(&mut self, key: usize, f: &RationalFunction1, k: usize) -> Result<RationalFunction1> {
        let dy = self.curve.dy();
        if !self.dy_chain.contains_key(&(key, 0)) {
            self.dy_chain.insert((key, 0), f.clone());
        }
        let mut j = 0;
        while j < k {
            if !self.dy_chain.contains_key(&(key, j + 1)) {
                let prev = self.dy_chain[&(key, j)].clone();
                let next = prev.derivative().div(&dy)?;
                self.dy_chain.insert((key, j + 1), next);
            }
            j += 1;
        }
        Ok(self.dy_chain[&(key, k)].clone())
    }

    /// `(d/dy)^k x` for `k >= 1`.
    pub fn dy_pow_x(&mut self, k: usize) -> Result<RationalFunction1> {
        assert!(k >= 1);
        let first = self.curve.dx().div(&self.curve.dy())?;
        self.dy_pow(usize::MAX, &first, k - 1)
    }

    /// `hbar^{h_offset} hbar u S(hbar u d/dy) f` at variable `i`, for rational `f`.
    pub fn s_operator(&mut self, i: usize, key: usize, f: &RationalFunction1, h_offset: i64) -> Result<MultiSeries> {
        let s = s_coefficients(self.hb.max(0) as usize + 1);
        let mut acc = self.ring().zero_like();
        let mut j = 0usize;
        while h_offset + 2 * j as i64 + 1 <= self.hb {
            let d = self.dy_pow(key, f, 2 * j)?;
            let e = self.expand(i, &d)?;
            let m = self.mono(&[(self.h(), (h_offset + 2 * j as i64 + 1) as i16), (self.u(i), 2 * j as i16 + 1)], s[2 * j].clone());
            acc.add_assign(&e.mul(&m));
            j += 1;
        }
        Ok(acc)
    }

    /// Exponent of the dual one-point operator at variable `i`: the `x` part, the
    /// Bernoulli correction when present, and `extra` one-point dual terms `(g, W_g(z))`.
    pub fn exponent(&mut self, i: usize, extra: &[(usize, RationalFunction1)]) -> Result<MultiSeries> {
        let s = s_coefficients(self.hb.max(0) as usize + 1);
        let corr = self.curve.bernoulli_correction();
        let mut acc = self.ring().zero_like();
        let mut d = 1usize;
        while 2 * d as i64 <= self.hb {
            let dx = self.dy_pow_x(2 * d)?;
            let e = self.expand(i, &dx)?;
            let mut coef_total = self.ring().zero_like();
            for j in 0..=d {
                let k = d - j;
                if k > 0 && !corr {
                    continue;
                }
                let c = &s[2 * j] * bernoulli_half(k);
                if c == q(0) {
                    continue;
                }
                coef_total.add_assign(&self.mono(&[(self.h(), 2 * d as i16), (self.u(i), 2 * j as i16 + 1)], c));
            }
            acc.add_assign(&e.mul(&coef_total));
            d += 1;
        }
        for (k, (g, w)) in extra.iter().enumerate() {
            let key = 1_000_000 + k;
            let part = self.s_operator(i, key, w, 2 * *g as i64 - 1)?;
            acc.add_assign(&part);
        }
        Ok(acc)
    }

    /// Applies the dual one-point operators at every variable, with exponents `a`,
    /// to `t`, and extracts `[hbar^target]` as a jet.
    pub fn apply(&self, t: MultiSeries, a: &[MultiSeries]) -> Result<Jet> {
        let mut t = t;
        self.filter(&mut t);
        for i in 0..self.n {
            let lo = t.terms().map(|(m, _)| self.weight_of(m)).min().unwrap_or(0);
            let e = self.exp_with(&a[i], (-lo).max(0))?;
            let ti = self.mulf(&t, &e);
            let hi = ti.degree_range(self.u(i)).map(|r| r.1).unwrap_or(0).max(0);
            let mut r = self.ring().zero_like();
            r.restrict(&ti);
            for m in (0..=hi).rev() {
                let gm = ti.coeff_of(self.u(i), m)?.mul(&self.weight[i]);
                let dr = self.dx_inv[i].mul(&r.derivative(self.e(i)));
                r = gm.sub(&dr);
                self.filter_with(&mut r, 2 * m as i64);
            }
            t = r;
        }
        self.finish(&t)
    }

    /// Extracts `[hbar^target]` and converts to a jet.
    pub fn finish(&self, t: &MultiSeries) -> Result<Jet> {
        let c = t.coeff_of(self.h(), self.target as i16)?;
        for i in 0..self.n {
            let w = Mono::unit(self.e(i), 1).0;
            let b = c.trunc().iter().find(|x| x.weights == w).map(|x| x.bound).unwrap_or(crate::series::EXACT);
            if b < self.order as i64 {
                return Err(Error::Truncation(format!(
                    "dual expansion in {} known only through order {b}",
                    fmt_var(i)
                )));
            }
        }
        let mut out = jet_ring(self.n, self.order);
        for (m, v) in c.terms() {
            if (0..self.n).any(|i| m.0[self.u(i)] != 0) {
                continue;
            }
            let mut e = Mono::zero();
            let mut total = 0i64;
            for i in 0..self.n {
                e.0[i] = m.0[self.e(i)];
                total += e.0[i] as i64;
            }
            if total <= self.order as i64 {
                out.add_term(e, v.clone());
            }
        }
        Ok(Jet::new(self.base.clone(), self.order, out))
    }

    /// `y(b_i + e_i)` for the linear kernel, `z^s` for the exponential one.
    pub fn y_coordinate(&self, i: usize) -> Result<MultiSeries> {
        match self.kernel {
            KernelType::Linear => self.expand(i, &self.curve.y.rational),
            KernelType::Exponential => {
                let s = self.curve.y.pure_log_coefficient().expect("exponential kernel");
                let f = RationalFunction1::monomial(q(1), if s == q(1) { 1 } else { -1 });
                self.expand(i, &f)
            }
        }
    }

    /// `exp(c hbar u_i)`.
    pub fn exp_hu(&self, i: usize, c: Q) -> Result<MultiSeries> {
        let a = self.mono(&[(self.h(), 1), (self.u(i), 1)], c);
        self.exp(&a)
    }

    /// Diagonal factor: `1` for the linear kernel, `1/S(hbar u_i)` for the exponential one.
    pub fn diagonal(&self, i: usize) -> MultiSeries {
        let mut acc = self.constant(q(1));
        if self.kernel == KernelType::Exponential {
            let mut g = 1usize;
            while 2 * g as i64 <= self.hb {
                acc.add_assign(&self.mono(&[(self.h(), 2 * g as i16), (self.u(i), 2 * g as i16)], bernoulli_half(g)));
                g += 1;
            }
        }
        acc
    }
}
