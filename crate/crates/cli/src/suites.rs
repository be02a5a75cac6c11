use rayon::prelude::*;
use serde_json::{json, Value};

use trxy::arith::{bernoulli_half, factorial_q, fmt_q, q, qpow, qr, seeded_rationals};
use trxy::curves::{preset, SpectralCurve};
use trxy::invariants::{
    extract_gw_p1, extract_hodge_linear, extract_psi, extract_rspin, extract_triple_hodge, gw_degree_one_product,
    gw_one_point_series, quantum_curve_check, Pipeline,
};
use trxy::series::{default_base_points, jittered_base_points, RationalFunction1};
use trxy::xy::connected::{cauchy_matrix, cauchy_product, det};
use trxy::xy::{correlator, one_point_residual, Method};
use trxy::{Error, Q};

use crate::{Failure, OutFormat, VerifyArgs};

pub const SUITES: &[&str] = &["gamma", "dilog", "airy", "rspin", "lambert", "vertex", "p1", "cauchy", "oracle"];

type Body = Box<dyn Fn() -> Result<(bool, String), Error> + Send + Sync>;

struct Task {
    name: String,
    body: Body,
}

fn task(name: impl Into<String>, body: impl Fn() -> Result<(bool, String), Error> + Send + Sync + 'static) -> Task {
    Task { name: name.into(), body: Box::new(body) }
}

struct Check {
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Clone, Copy)]
struct Ctx {
    gmax: Option<usize>,
    order: usize,
    seed: u64,
}

impl Ctx {
    fn gmax(&self, default: usize) -> usize {
        self.gmax.unwrap_or(default)
    }

    fn base(&self, n: usize) -> Vec<Q> {
        if self.seed == 0 {
            default_base_points(n)
        } else {
            jittered_base_points(n, self.seed)
        }
    }

    /// Stable `(g, n)` with `g <= gmax`, `n <= 3` and `2g - 2 + n <= 2 gmax`.
    fn pairs(&self, default: usize) -> Vec<(usize, usize)> {
        let gm = self.gmax(default);
        let mut v = Vec::new();
        for g in 0..=gm {
            for n in 1..=3 {
                if 2 * g + n >= 3 && 2 * g + n - 2 <= 2 * gm {
                    v.push((g, n));
                }
            }
        }
        v
    }
}

fn curve(name: &str, params: &[(&str, Q)]) -> SpectralCurve {
    preset(name, params).expect("built-in preset")
}

fn agree(c: &SpectralCurve, g: usize, n: usize, a: Method, b: Method, ctx: Ctx) -> Task {
    let c = c.clone();
    let base = ctx.base(n);
    let name = format!("{} ({g},{n}) {} = {}", label(&c), a.as_str(), b.as_str());
    task(name, move || {
        let ja = correlator(&c, g, n, a, &base, ctx.order)?;
        let jb = correlator(&c, g, n, b, &base, ctx.order)?;
        let terms = ja.to_json()["coeffs"].as_array().map_or(0, |v| v.len());
        Ok((ja == jb, format!("{terms} jet terms, order {}", ctx.order)))
    })
}

fn label(c: &SpectralCurve) -> String {
    let p: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={}", fmt_q(v))).collect();
    if p.is_empty() {
        c.name.clone()
    } else {
        format!("{} {}", c.name, p.join(" "))
    }
}

fn equal(v: Q, want: Q) -> (bool, String) {
    let ok = v == want;
    if ok {
        (true, fmt_q(&v))
    } else {
        (false, format!("{} vs expected {}", fmt_q(&v), fmt_q(&want)))
    }
}

fn quantum_curve(name: &'static str, order: usize) -> Task {
    task(format!("{name} quantum curve through hbar^{order}"), move || {
        let c = quantum_curve_check(&curve(name, &[]), order)?;
        let bad: Vec<String> = c.residuals.iter().filter(|r| !r.is_zero()).map(|r| r.power.to_string()).collect();
        let detail = if bad.is_empty() { c.relation.clone() } else { format!("nonzero at hbar^{}", bad.join(",")) };
        Ok((c.passed(), detail))
    })
}

/// `b_g d^{2g-1}(1/x) = -B_{2g}(1/2)/(2g) x^{-2g}`.
fn stirling_w(g: usize) -> RationalFunction1 {
    let m = 2 * g - 1;
    RationalFunction1::monomial(bernoulli_half(g) * qpow(&q(-1), m as i64) * factorial_q(m), -(2 * g as i64))
}

fn gamma(ctx: Ctx) -> Vec<Task> {
    let gm = ctx.gmax(5);
    let mut v = Vec::new();
    for g in 1..=gm {
        v.push(task(format!("gamma W_{{{g},1}} = b_g d^{}(1/x)", 2 * g - 1), move || {
            let base = ctx.base(1);
            let j = correlator(&curve("gamma", &[]), g, 1, Method::XyCycles, &base, ctx.order)?;
            let s = stirling_w(g).expand_at(&base[0], ctx.order as i64)?;
            let ok = (0..=ctx.order).all(|k| j.coeff(&[k as i16]) == s.coeff(k as i64));
            Ok((ok, format!("leading coefficient {}", fmt_q(&j.value()))))
        }));
    }
    for g in 0..=gm.min(2) {
        for n in 2..=3 {
            if 2 * g + n < 3 {
                continue;
            }
            v.push(task(format!("gamma W_{{{g},{n}}} = 0"), move || {
                let j = correlator(&curve("gamma", &[]), g, n, Method::XyCycles, &ctx.base(n), ctx.order)?;
                Ok((j.is_zero(), if j.is_zero() { "vanishes".into() } else { "nonzero jet".into() }))
            }));
        }
    }
    v.push(quantum_curve("gamma", 2 * gm));
    v
}

fn dilog(ctx: Ctx) -> Vec<Task> {
    let gm = ctx.gmax(5);
    let mut v: Vec<Task> = (1..=gm)
        .map(|g| {
            task(format!("dilog self-duality residual at hbar^{}", 2 * g), move || {
                let r = one_point_residual(&curve("dilog", &[]), g, &ctx.base(1)[0], ctx.order)?;
                Ok((r.is_zero(), if r.is_zero() { "vanishes".into() } else { r.to_json().to_string() }))
            })
        })
        .collect();
    v.push(quantum_curve("dilog", 2 * gm));
    v
}

fn airy(ctx: Ctx) -> Vec<Task> {
    let gm = ctx.gmax(2);
    let table: Vec<(usize, Vec<usize>, Q)> = vec![
        (0, vec![0, 0, 0], q(1)),
        (0, vec![1, 0, 0, 0], q(1)),
        (1, vec![1], qr(1, 24)),
        (1, vec![1, 1], qr(1, 24)),
        (1, vec![2, 0], qr(1, 24)),
        (2, vec![4], qr(1, 1152)),
        (2, vec![3, 2], qr(29, 5760)),
        (3, vec![7], qr(1, 82944)),
    ];
    let mut v = Vec::new();
    for (g, k, want) in table.into_iter().filter(|(g, _, _)| *g <= gm) {
        let pipes: &[Pipeline] = if k.len() > 3 { &[Pipeline::Tr] } else { &[Pipeline::Tr, Pipeline::Xy] };
        for &p in pipes {
            let (k, want) = (k.clone(), want.clone());
            v.push(task(format!("<tau {k:?}>_{g} via {}", p.as_str()), move || Ok(equal(extract_psi(g, &k, p)?.value, want.clone()))));
        }
    }
    let c = curve("airy", &[]);
    for (g, n) in ctx.pairs(2) {
        v.push(agree(&c, g, n, Method::Tr, Method::XyCycles, ctx));
    }
    v
}

fn rspin(ctx: Ctx) -> Vec<Task> {
    let gm = ctx.gmax(1);
    let mut v = Vec::new();
    let reductions: Vec<(usize, Vec<usize>)> = vec![(0, vec![0, 0, 0]), (1, vec![1]), (1, vec![1, 1]), (2, vec![4]), (2, vec![2, 3])];
    for (g, k) in reductions.into_iter().filter(|(g, _)| *g <= gm) {
        v.push(task(format!("r = 2 reduces to psi classes, <tau {k:?}>_{g}"), move || {
            let ones = vec![1; k.len()];
            Ok(equal(extract_rspin(2, g, &k, &ones)?.value, extract_psi(g, &k, Pipeline::Tr)?.value))
        }));
    }
    let table: Vec<(i64, usize, Vec<usize>, Vec<usize>, Q)> = vec![
        (3, 0, vec![0, 0, 0], vec![1, 1, 2], q(1)),
        (4, 0, vec![0, 0, 0], vec![1, 1, 3], q(1)),
        (4, 0, vec![0, 0, 0], vec![1, 2, 2], q(1)),
        (3, 1, vec![1], vec![1], qr(1, 12)),
        (4, 1, vec![1], vec![1], qr(1, 8)),
    ];
    for (r, g, k, a, want) in table.into_iter().filter(|t| t.1 <= gm) {
        v.push(task(format!("<tau {k:?} a {a:?}>_{g} for r = {r}"), move || Ok(equal(extract_rspin(r, g, &k, &a)?.value, want.clone()))));
    }
    v.push(task("non-integral degree is flagged", || {
        let rec = extract_rspin(3, 0, &[0, 0, 0], &[1, 1, 1])?;
        Ok((rec.flag.is_some() && rec.value == q(0), format!("{:?}", rec.flag)))
    }));
    v
}

/// Genus zero: `(k_1 + ... + k_n)^{n-3}`.
fn genus_zero_hodge(k: &[usize]) -> Q {
    qpow(&q(k.iter().sum::<usize>() as i64), k.len() as i64 - 3)
}

fn lambert(ctx: Ctx) -> Vec<Task> {
    let mut v = Vec::new();
    let c = curve("lambert-exp", &[]);
    for (g, n) in ctx.pairs(2) {
        v.push(agree(&c, g, n, Method::Tr, Method::XyCycles, ctx));
    }
    let cases: Vec<(usize, Vec<usize>, Q)> = vec![
        (0, vec![1, 1, 1], genus_zero_hodge(&[1, 1, 1])),
        (0, vec![1, 2, 1, 1], genus_zero_hodge(&[1, 2, 1, 1])),
        (0, vec![2, 3, 1, 2], genus_zero_hodge(&[2, 3, 1, 2])),
        (1, vec![1], q(0)),
        (1, vec![3], qr(2, 24)),
        (1, vec![2, 3], qr(4 + 6 + 9 - 5, 24)),
    ];
    for (g, k, want) in cases {
        for p in [Pipeline::Tr, Pipeline::Xy] {
            let (k, want) = (k.clone(), want.clone());
            v.push(task(format!("linear Hodge {k:?} g={g} via {}", p.as_str()), move || Ok(equal(extract_hodge_linear(g, &k, p)?.value, want.clone()))));
        }
    }
    v.push(quantum_curve("lambert-exp", 2 * ctx.gmax(2)));
    v
}

/// Genus one, one point: `(k + c_1)/24` with `c_1 = -(1 + 1/f - 1/(1+f))`.
fn triple_genus_one(f: &Q, k: usize) -> Q {
    let c1 = -(q(1) + f.recip() - (q(1) + f).recip());
    (q(k as i64) + c1) / q(24)
}

fn vertex(ctx: Ctx) -> Vec<Task> {
    let mut v = Vec::new();
    for f in 1..=3 {
        let c = curve("vertex", &[("f", q(f))]);
        for (g, n) in ctx.pairs(2) {
            v.push(agree(&c, g, n, Method::Tr, Method::XyCycles, ctx));
        }
    }
    for f in [q(1), q(2), q(3)] {
        for k in [vec![1, 1, 1], vec![1, 2, 1, 1]] {
            let want = genus_zero_hodge(&k);
            let f = f.clone();
            v.push(task(format!("triple Hodge f={} {k:?} g=0", fmt_q(&f)), move || {
                Ok(equal(extract_triple_hodge(&f, 0, &k, Pipeline::Tr)?.value, want.clone()))
            }));
        }
        for k in 1..=2 {
            let want = triple_genus_one(&f, k);
            for p in [Pipeline::Tr, Pipeline::Xy] {
                let (f, want) = (f.clone(), want.clone());
                v.push(task(format!("triple Hodge f={} [{k}] g=1 via {}", fmt_q(&f), p.as_str()), move || {
                    Ok(equal(extract_triple_hodge(&f, 1, &[k], p)?.value, want.clone()))
                }));
            }
        }
    }
    v
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn p1(ctx: Ctx) -> Vec<Task> {
    let gm = ctx.gmax(2);
    let mut v = Vec::new();
    for t in 1..=2 {
        let c = curve("gw-p1", &[("t", q(t))]);
        for (g, n) in ctx.pairs(2) {
            v.push(agree(&c, g, n, Method::Tr, Method::XyCycles, ctx));
        }
    }
    for g in 0..=gm {
        for n in 1..=3 {
            for b in compositions(2 * g, n) {
                v.push(task(format!("degree one g={g} b={b:?}"), move || Ok(equal(extract_gw_p1(g, &b, Pipeline::Xy)?.value, gw_degree_one_product(&b)))));
            }
        }
    }
    for g in 0..=gm {
        for d in 0..=2usize {
            if g == 0 && d == 0 {
                continue;
            }
            let b = 2 * g + 2 * d - 2;
            let pipes: &[Pipeline] = if g == 0 { &[Pipeline::Xy] } else { &[Pipeline::Xy, Pipeline::Tr] };
            for &p in pipes {
                v.push(task(format!("one point g={g} d={d} via {}", p.as_str()), move || {
                    Ok(equal(extract_gw_p1(g, &[b], p)?.value, gw_one_point_series(g, d)?))
                }));
            }
        }
    }
    for g in 1..=gm + 1 {
        v.push(task(format!("W_{{{g},1}} at t = 0 equals gamma"), move || {
            let base = ctx.base(1);
            let a = correlator(&curve("gw-p1", &[("t", q(0))]), g, 1, Method::XyCycles, &base, ctx.order)?;
            let b = correlator(&curve("gamma", &[]), g, 1, Method::XyCycles, &base, ctx.order)?;
            Ok((a == b, format!("leading coefficient {}", fmt_q(&a.value()))))
        }));
    }
    v
}

fn cauchy(ctx: Ctx) -> Vec<Task> {
    const DRAWS: usize = 100;
    let pool = seeded_rationals(ctx.seed, 64 * DRAWS);
    let mut draws = Vec::new();
    let mut at = 0;
    while draws.len() < DRAWS && at + 8 <= pool.len() {
        let n = 1 + draws.len() % 4;
        let (a, b) = (pool[at..at + n].to_vec(), pool[at + n..at + 2 * n].to_vec());
        at += 2 * n;
        let distinct = |v: &[Q]| v.iter().enumerate().all(|(i, x)| !v[i + 1..].contains(x));
        if distinct(&a) && distinct(&b) && a.iter().all(|x| b.iter().all(|y| x + y != q(0))) {
            draws.push((a, b));
        }
    }
    vec![task(format!("Cauchy determinant over {DRAWS} seeded draws"), move || {
        let bad = draws.par_iter().position_first(|(a, b)| det(&cauchy_matrix(a, b)) != cauchy_product(a, b));
        Ok(match bad {
            None => (true, format!("{} draws, seed {}", draws.len(), ctx.seed)),
            Some(i) => (false, format!("draw {i} fails")),
        })
    })]
}

fn oracle(ctx: Ctx) -> Vec<Task> {
    let mut curves = vec![curve("lambert-exp", &[])];
    curves.extend((1..=3).map(|f| curve("vertex", &[("f", q(f))])));
    curves.extend((1..=2).map(|t| curve("gw-p1", &[("t", q(t))])));
    let mut v = Vec::new();
    for c in &curves {
        for (g, n) in ctx.pairs(2) {
            v.push(agree(c, g, n, Method::XyCycles, Method::XyGraphs, ctx));
        }
    }
    let cubic = curve("cubic", &[]);
    for (g, n) in [(0, 3), (1, 1), (1, 2)] {
        v.push(agree(&cubic, g, n, Method::XyGeneral, Method::Tr, ctx));
    }
    v
}

fn tasks(name: &str, ctx: Ctx) -> Vec<Task> {
    match name {
        "gamma" => gamma(ctx),
        "dilog" => dilog(ctx),
        "airy" => airy(ctx),
        "rspin" => rspin(ctx),
        "lambert" => lambert(ctx),
        "vertex" => vertex(ctx),
        "p1" => p1(ctx),
        "cauchy" => cauchy(ctx),
        "oracle" => oracle(ctx),
        _ => unreachable!("suite names are validated"),
    }
}

fn run(t: &Task) -> Check {
    match (t.body)() {
        Ok((passed, detail)) => Check { name: t.name.clone(), passed, detail },
        Err(e) => Check { name: t.name.clone(), passed: false, detail: format!("error {}: {e}", e.code()) },
    }
}

pub fn verify(a: &VerifyArgs) -> Result<bool, Failure> {
    let names: Vec<&str> = match a.suite.as_str() {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => return Err(Error::InvalidArgument(format!("unknown suite `{s}`; expected one of {} or all", SUITES.join(", "))).into()),
    };
    let ctx = Ctx { gmax: a.gmax, order: a.jet_order, seed: a.seed };
    let all: Vec<(usize, Task)> = names.iter().enumerate().flat_map(|(i, s)| tasks(s, ctx).into_iter().map(move |t| (i, t))).collect();
    let checks: Vec<(usize, Check)> = all.par_iter().map(|(i, t)| (*i, run(t))).collect();
    let passed = checks.iter().filter(|(_, c)| c.passed).count();
    let failed = checks.len() - passed;
    match a.out.out {
        OutFormat::Json => {
            let suites: Vec<Value> = names
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let cs: Vec<Value> = checks
                        .iter()
                        .filter(|(j, _)| *j == i)
                        .map(|(_, c)| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                        .collect();
                    json!({ "suite": s, "checks": cs })
                })
                .collect();
            let v = json!({ "suites": suites, "passed": passed, "failed": failed });
            outln!("{}", serde_json::to_string_pretty(&v).expect("json value serializes"));
        }
        OutFormat::Text => {
            for (i, s) in names.iter().enumerate() {
                outln!("[{s}]");
                for (_, c) in checks.iter().filter(|(j, _)| *j == i) {
                    outln!("  {}  {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                }
            }
            outln!("{} checks, {passed} passed, {failed} failed", checks.len());
        }
    }
    Ok(failed == 0)
}
