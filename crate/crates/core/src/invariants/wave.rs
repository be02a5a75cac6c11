use crate::arith::{bernoulli_half, factorial_q, fmt_q, q, qpow, qr, Q};
use crate::curves::{LogRationalFunction, SpectralCurve};
use crate::error::{Error, Result};
use crate::series::RationalFunction1;
use num_traits::Zero;
use serde_json::json;

/// `d/ds` in the uniformizing chart, where `s' = ds/dz`.
fn d_chart(f: &RationalFunction1, s_prime: &RationalFunction1) -> Result<RationalFunction1> {
    f.derivative().div(s_prime)
}

/// `d^m v / ds^m` for `m >= 1`.
fn derivatives(v: &LogRationalFunction, s: &LogRationalFunction, upto: usize) -> Result<Vec<RationalFunction1>> {
    let sp = s.derivative();
    let mut out = vec![RationalFunction1::zero()];
    if upto == 0 {
        return Ok(out);
    }
    let mut d = v.derivative().div(&sp)?;
    out.push(d.clone());
    for _ in 2..=upto {
        d = d_chart(&d, &sp)?;
        out.push(d.clone());
    }
    Ok(out)
}

/// One-point primitives `Phi_{g,1} = b_g (d/ds)^{2g-1} v` for `1 <= g <= g_max`.
fn primitives(v: &LogRationalFunction, s: &LogRationalFunction, g_max: usize) -> Result<Vec<RationalFunction1>> {
    let d = derivatives(v, s, (2 * g_max).saturating_sub(1))?;
    Ok((1..=g_max).map(|g| d[2 * g - 1].scale(&bernoulli_half(g))).collect())
}

/// Perturbative wave function of a curve whose only nonzero stable correlators are one-point.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunctionSeries {
    pub curve: String,
    pub g_max: usize,
    /// `d Phi_{0,1} / dx = y`.
    pub leading_derivative: LogRationalFunction,
    /// Regularized `Phi_{0,2}(x, x) = -log(dx/dz)`.
    pub phi02: LogRationalFunction,
    /// `Phi_{g,1}(x)` for `g = 1..=g_max`, rational in `z`.
    pub phi: Vec<RationalFunction1>,
    x: LogRationalFunction,
}

impl WaveFunctionSeries {
    /// Coefficient of `hbar^{2g-1}` in `log Psi` for `g >= 1`.
    pub fn coefficient(&self, g: usize) -> Option<&RationalFunction1> {
        g.checked_sub(1).and_then(|i| self.phi.get(i))
    }

    /// `d Phi_{g,1} / dx`, which must equal `W_{g,1}`.
    pub fn w_one_point(&self, g: usize) -> Result<RationalFunction1> {
        let p = self.coefficient(g).ok_or_else(|| Error::InvalidArgument(format!("g = {g} outside 1..={}", self.g_max)))?;
        d_chart(p, &self.x.derivative())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .phi
            .iter()
            .enumerate()
            .map(|(i, p)| json!({ "hbar": 2 * i as i64 + 1, "phi": LogRationalFunction::rational(p.clone()).describe() }))
            .collect();
        json!({
            "curve": self.curve,
            "g_max": self.g_max,
            "chart": "z",
            "leading_derivative": self.leading_derivative.describe(),
            "phi02": self.phi02.describe(),
            "terms": terms,
        })
    }
}

fn wave_supported(curve: &SpectralCurve) -> bool {
    matches!(curve.name.as_str(), "gamma" | "dilog")
}

/// `log Psi = Phi_{0,1}/hbar + Phi_{0,2}/2 + sum_g hbar^{2g-1} Phi_{g,1}` with integration
/// constants dropped.
pub fn wave_function(curve: &SpectralCurve, g_max: usize) -> Result<WaveFunctionSeries> {
    if !wave_supported(curve) {
        return Err(Error::UnsupportedCurve(format!("{}: no closed one-point family for the wave function", curve.name)));
    }
    Ok(WaveFunctionSeries {
        curve: curve.name.clone(),
        g_max,
        leading_derivative: curve.y.clone(),
        phi02: LogRationalFunction::log(q(-1), curve.dx()),
        phi: primitives(&curve.y, &curve.x, g_max)?,
        x: curve.x.clone(),
    })
}

/// One order of a functional-relation check: `log_part * v + rational`.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub power: usize,
    pub log_part: Q,
    pub rational: RationalFunction1,
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        self.log_part.is_zero() && self.rational.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveCheck {
    pub curve: String,
    pub order: usize,
    pub relation: String,
    pub residuals: Vec<Residual>,
    pub semiclassical: bool,
}

impl CurveCheck {
    pub fn passed(&self) -> bool {
        self.semiclassical && self.residuals.iter().all(|r| r.is_zero())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let res: Vec<serde_json::Value> = self
            .residuals
            .iter()
            .map(|r| {
                json!({
                    "hbar": r.power,
                    "log_part": fmt_q(&r.log_part),
                    "rational": LogRationalFunction::rational(r.rational.clone()).describe(),
                })
            })
            .collect();
        json!({
            "curve": self.curve,
            "order": self.order,
            "relation": self.relation,
            "semiclassical": self.semiclassical,
            "residuals": res,
            "passed": self.passed(),
        })
    }
}

/// `sum_g hbar^{2g-1} [Phi_g(s + a hbar) - Phi_g(s + b hbar)] + [Phi02(s + a hbar) - Phi02(s + b hbar)]/2
///  - v(s + c hbar) - k hbar`, order by order.
struct Relation<'a> {
    s: &'a LogRationalFunction,
    v: &'a LogRationalFunction,
    phi02: Option<LogRationalFunction>,
    a: Q,
    b: Q,
    c: Q,
    k: Q,
}

impl Relation<'_> {
    fn residuals(&self, order: usize) -> Result<Vec<Residual>> {
        let g_max = order / 2;
        let dv = derivatives(self.v, self.s, order.max(1))?;
        let phis = primitives(self.v, self.s, g_max)?;
        let sp = self.s.derivative();
        let weight = |j: usize| (qpow(&self.a, j as i64) - qpow(&self.b, j as i64)) / factorial_q(j);
        let d02: Vec<RationalFunction1> = match &self.phi02 {
            Some(p) => derivatives(p, self.s, order.max(1))?.into_iter().map(|r| r.scale(&qr(1, 2))).collect(),
            None => vec![RationalFunction1::zero(); order.max(1) + 1],
        };
        let mut out = Vec::new();
        for p in 0..=order {
            let mut log_part = Q::zero();
            let mut rat = RationalFunction1::zero();
            let lead = weight(p + 1);
            if p == 0 {
                log_part += lead;
            } else {
                rat = rat.add(&dv[p].scale(&lead));
            }
            for g in 1..=g_max {
                if 2 * g > p {
                    break;
                }
                let j = p + 1 - 2 * g;
                let mut d = phis[g - 1].clone();
                for _ in 0..j {
                    d = d_chart(&d, &sp)?;
                }
                rat = rat.add(&d.scale(&weight(j)));
            }
            if p >= 1 {
                rat = rat.add(&d02[p].scale(&weight(p)));
            }
            let shift = qpow(&self.c, p as i64) / factorial_q(p);
            if p == 0 {
                log_part -= shift;
            } else {
                rat = rat.sub(&dv[p].scale(&shift));
            }
            if p == 1 {
                rat = rat.sub(&RationalFunction1::constant(self.k.clone()));
            }
            out.push(Residual { power: p, log_part, rational: rat });
        }
        Ok(out)
    }
}

/// Order-by-order check of the quantum curve annihilating the wave function.
pub fn quantum_curve_check(curve: &SpectralCurve, order: usize) -> Result<CurveCheck> {
    let (relation, rel, semiclassical) = match curve.name.as_str() {
        "gamma" => (
            "log Psi(x+h) - log Psi(x) - log(x + h/2)",
            Relation { s: &curve.x, v: &curve.y, phi02: Some(LogRationalFunction::log(q(-1), curve.dx())), a: q(1), b: q(0), c: qr(1, 2), k: q(0) },
            // e^y = x: z = z.
            curve.y.derivative().mul(&curve.x.rational) == curve.x.derivative(),
        ),
        "dilog" => (
            "(1 + e^{x+h/2}) Psi(x) + Psi(x+h) e^{-h/2}",
            Relation { s: &curve.x, v: &curve.y, phi02: Some(LogRationalFunction::log(q(-1), curve.dx())), a: q(1), b: q(0), c: qr(1, 2), k: qr(1, 2) },
            // e^x = -1 - e^y: both sides are -1 - z.
            semiclassical_dilog(curve)?,
        ),
        "lambert-exp" => (
            "log Psi'(y+h/2) - log Psi'(y-h/2) - x(y)",
            Relation { s: &curve.y, v: &curve.x, phi02: None, a: qr(1, 2), b: qr(-1, 2), c: q(0), k: q(0) },
            // e^x = e^y / y with x = z - log z and y = z.
            curve.x.derivative() == RationalFunction1::constant(q(1)).sub(&RationalFunction1::monomial(q(1), -1))
                && curve.y.derivative() == RationalFunction1::constant(q(1)),
        ),
        other => return Err(Error::UnsupportedCurve(format!("{other}: no quantum curve relation"))),
    };
    Ok(CurveCheck { curve: curve.name.clone(), order, relation: relation.into(), residuals: rel.residuals(order)?, semiclassical })
}

fn semiclassical_dilog(curve: &SpectralCurve) -> Result<bool> {
    // e^x = -1 - z and e^y = z at sample points.
    let xs = &curve.x.logs;
    let ys = &curve.y.logs;
    if xs.len() != 1 || ys.len() != 1 || !curve.x.rational.is_zero() || !curve.y.rational.is_zero() {
        return Ok(false);
    }
    for t in [q(2), q(5), qr(1, 3)] {
        let ex = xs[0].1.eval(&t)?;
        let ey = ys[0].1.eval(&t)?;
        if xs[0].0 != q(1) || ys[0].0 != q(1) || ex != -q(1) - ey {
            return Ok(false);
        }
    }
    Ok(true)
}
