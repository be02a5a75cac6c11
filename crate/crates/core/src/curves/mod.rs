//! Genus-zero spectral curves with rational and logarithmic parts, the preset catalogue,
//! and ramification data.

mod ramification;

pub use ramification::{ramification, RamificationData};

use crate::arith::{fmt_q, parse_q, q, qr, Q};
use crate::error::{Error, Result};
use crate::series::ratfun::RatFunSpec;
use crate::series::{Poly, RationalFunction1, Series1};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// `rational(z) + sum_k c_k log r_k(z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LogRationalFunction {
    pub rational: RationalFunction1,
    pub logs: Vec<(Q, RationalFunction1)>,
}

impl LogRationalFunction {
    pub fn rational(r: RationalFunction1) -> Self {
        LogRationalFunction { rational: r, logs: vec![] }
    }

    pub fn log(c: Q, arg: RationalFunction1) -> Self {
        LogRationalFunction { rational: RationalFunction1::zero(), logs: vec![(c, arg)] }
    }

    pub fn plus(mut self, o: LogRationalFunction) -> Self {
        self.rational = self.rational.add(&o.rational);
        self.logs.extend(o.logs);
        self
    }

    pub fn has_logs(&self) -> bool {
        self.logs.iter().any(|(c, _)| *c != q(0))
    }

    pub fn scale(&self, c: &Q) -> Self {
        LogRationalFunction {
            rational: self.rational.scale(c),
            logs: self.logs.iter().map(|(k, r)| (k * c, r.clone())).collect(),
        }
    }

    pub fn derivative(&self) -> RationalFunction1 {
        let mut d = self.rational.derivative();
        for (c, r) in &self.logs {
            d = d.add(&r.derivative().div(r).expect("nonzero log argument").scale(c));
        }
        d
    }

    /// `f(b + t) - f(b)` as a series through `t^order`.
    pub fn increment_at(&self, b: &Q, order: i64) -> Result<Series1> {
        self.derivative().expand_at(b, order - 1)?.integral()
    }

    /// Is this `c log z` with no other part?
    pub fn pure_log_coefficient(&self) -> Option<Q> {
        if !self.rational.is_zero() || self.logs.len() != 1 {
            return None;
        }
        let (c, r) = &self.logs[0];
        if r.is_polynomial() && r.num == Poly::x() {
            Some(c.clone())
        } else {
            None
        }
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if !self.rational.is_zero() {
            parts.push(format!("{:?}", self.rational));
        }
        for (c, r) in &self.logs {
            parts.push(format!("{}*log({:?})", fmt_q(c), r));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    Algebraic,
    ExpExp,
    ExpMixed,
}

impl Form {
    pub fn as_str(&self) -> &'static str {
        match self {
            Form::Algebraic => "algebraic",
            Form::ExpExp => "exp-exp",
            Form::ExpMixed => "exp-mixed",
        }
    }
}

/// Shape of the pair kernel in the dual cycle sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelType {
    /// `y` rational: kernels in differences of `y`.
    Linear,
    /// `y = s log z`, `s = +-1`: kernels in `z e^{+-hbar u/2}`.
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpectralCurve {
    pub name: String,
    pub x: LogRationalFunction,
    pub y: LogRationalFunction,
    pub form: Form,
    pub params: BTreeMap<String, Q>,
    pub certificate: String,
}

impl SpectralCurve {
    pub fn dx(&self) -> RationalFunction1 {
        self.x.derivative()
    }

    pub fn dy(&self) -> RationalFunction1 {
        self.y.derivative()
    }

    /// Whether the dual one-point family carries the Bernoulli correction.
    pub fn bernoulli_correction(&self) -> bool {
        self.form != Form::Algebraic && self.x.has_logs()
    }

    pub fn kernel_type(&self) -> Result<KernelType> {
        if !self.y.has_logs() {
            return Ok(KernelType::Linear);
        }
        match self.y.pure_log_coefficient() {
            Some(c) if c == q(1) || c == q(-1) => Ok(KernelType::Exponential),
            _ => Err(Error::UnsupportedCurve(format!(
                "{}: y must be rational or +-log z for the dual evaluators",
                self.name
            ))),
        }
    }

    /// Stable content key used for memoization.
    pub fn content_key(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={}", fmt_q(v))).collect();
        format!(
            "{}|{}|{}|{}|{}",
            self.name,
            self.form.as_str(),
            self.x.describe(),
            self.y.describe(),
            params.join(",")
        )
    }

    pub fn swap_xy(&self) -> SpectralCurve {
        let (name, certificate) = match (self.name.strip_suffix("-swapped"), self.certificate.strip_prefix("swapped: ")) {
            (Some(n), Some(c)) => (n.to_string(), c.to_string()),
            _ => (format!("{}-swapped", self.name), format!("swapped: {}", self.certificate)),
        };
        SpectralCurve { name, x: self.y.clone(), y: self.x.clone(), form: self.form, params: self.params.clone(), certificate }
    }

    /// Rescales `y` by a constant.
    pub fn scale_y(&self, c: &Q) -> SpectralCurve {
        let mut s = self.clone();
        s.y = self.y.scale(c);
        s.name = format!("{}*y{}", self.name, fmt_q(c));
        s
    }
}

fn z() -> RationalFunction1 {
    RationalFunction1::z()
}

fn lin(a: i64, b: i64) -> RationalFunction1 {
    RationalFunction1::poly(Poly::from_ints(&[a, b]))
}

fn req(params: &BTreeMap<String, Q>, k: &str) -> Result<Q> {
    params.get(k).cloned().ok_or_else(|| Error::BadParameter(k.into()))
}

pub const PRESETS: &[(&str, &str)] = &[
    ("airy", "x = z^2, y = z"),
    ("rspin", "x = z^r, y = z (param r >= 2)"),
    ("gamma", "x = z, y = log z"),
    ("lambert-shifted", "x = z - log z, y = log z"),
    ("lambert-exp", "x = z - log z, y = z"),
    ("dilog", "x = log(-1-z), y = log z"),
    ("vertex", "x = -f log z - log(1-z), y = -log z (param f)"),
    ("gw-p1", "x = z + t^2/z, y = log z (param t)"),
    ("orbifold", "x = (log z)/a - z, y = z (param a)"),
    ("cubic", "x = z^2, y = z^3/3 - z"),
];

pub fn make_preset(name: &str, params: &BTreeMap<String, Q>) -> Result<SpectralCurve> {
    let mut used: BTreeMap<String, Q> = BTreeMap::new();
    let (x, y, form, cert) = match name {
        "airy" => (
            LogRationalFunction::rational(RationalFunction1::monomial(q(1), 2)),
            LogRationalFunction::rational(z()),
            Form::Algebraic,
            "polynomial curve x = y^2".to_string(),
        ),
        "rspin" => {
            let r = req(params, "r")?;
            let ri = crate::arith::to_i64(&r).filter(|&v| v >= 2).ok_or_else(|| Error::BadParameter("r".into()))?;
            used.insert("r".into(), r);
            (
                LogRationalFunction::rational(RationalFunction1::monomial(q(1), ri)),
                LogRationalFunction::rational(z()),
                Form::Algebraic,
                format!("polynomial curve x = y^{ri}"),
            )
        }
        "gamma" => (
            LogRationalFunction::rational(z()),
            LogRationalFunction::log(q(1), z()),
            Form::ExpExp,
            "e^y = x, so e^x = exp(e^y)".to_string(),
        ),
        "lambert-shifted" => (
            LogRationalFunction::rational(z()).plus(LogRationalFunction::log(q(-1), z())),
            LogRationalFunction::log(q(1), z()),
            Form::Algebraic,
            "x = e^y - y".to_string(),
        ),
        "lambert-exp" => (
            LogRationalFunction::rational(z()).plus(LogRationalFunction::log(q(-1), z())),
            LogRationalFunction::rational(z()),
            Form::ExpMixed,
            "e^x = e^y / y".to_string(),
        ),
        "dilog" => (
            LogRationalFunction::log(q(1), lin(-1, -1)),
            LogRationalFunction::log(q(1), z()),
            Form::ExpExp,
            "e^x = -1 - e^y".to_string(),
        ),
        "vertex" => {
            let f = req(params, "f")?;
            if f == q(0) || f == q(-1) {
                return Err(Error::BadParameter("f (must avoid 0 and -1)".into()));
            }
            used.insert("f".into(), f.clone());
            (
                LogRationalFunction::log(-f.clone(), z()).plus(LogRationalFunction::log(q(-1), lin(1, -1))),
                LogRationalFunction::log(q(-1), z()),
                Form::ExpExp,
                format!("e^x = e^({} y) / (1 - e^-y)", fmt_q(&f)),
            )
        }
        "gw-p1" => {
            let t = req(params, "t")?;
            used.insert("t".into(), t.clone());
            let t2 = &t * &t;
            (
                LogRationalFunction::rational(z().add(&RationalFunction1::monomial(t2.clone(), -1))),
                LogRationalFunction::log(q(1), z()),
                Form::ExpExp,
                format!("x = e^y + {} e^-y", fmt_q(&t2)),
            )
        }
        "orbifold" => {
            let a = req(params, "a")?;
            if a == q(0) {
                return Err(Error::BadParameter("a (must be nonzero)".into()));
            }
            used.insert("a".into(), a.clone());
            (
                LogRationalFunction::log(a.recip(), z()).plus(LogRationalFunction::rational(z().scale(&q(-1)))),
                LogRationalFunction::rational(z()),
                Form::ExpMixed,
                format!("e^({} x) = y / e^({} y)", fmt_q(&a), fmt_q(&a)),
            )
        }
        "cubic" => (
            LogRationalFunction::rational(RationalFunction1::monomial(q(1), 2)),
            LogRationalFunction::rational(RationalFunction1::poly(Poly::new(vec![q(0), q(-1), q(0), qr(1, 3)]))),
            Form::Algebraic,
            "x = z^2, y = z^3/3 - z".to_string(),
        ),
        other => return Err(Error::UnknownPreset(other.into())),
    };
    Ok(SpectralCurve { name: name.into(), x, y, form, params: used, certificate: cert })
}

pub fn preset(name: &str, params: &[(&str, Q)]) -> Result<SpectralCurve> {
    let m = params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    make_preset(name, &m)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub rational: RatFunSpec,
    #[serde(default)]
    pub logs: Vec<(String, RatFunSpec)>,
}

/// Custom curve document, loadable from TOML or JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveSpec {
    pub name: String,
    pub form: Form,
    pub x: FunctionSpec,
    pub y: FunctionSpec,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

impl FunctionSpec {
    fn build(&self) -> Result<LogRationalFunction> {
        let mut f = LogRationalFunction::rational(self.rational.build()?);
        for (c, r) in &self.logs {
            f.logs.push((parse_q(c)?, r.build()?));
        }
        Ok(f)
    }
}

impl CurveSpec {
    pub fn build(&self) -> Result<SpectralCurve> {
        let x = self.x.build()?;
        let y = self.y.build()?;
        if x.derivative().is_zero() || y.derivative().is_zero() {
            return Err(Error::InvalidArgument("dx and dy must not vanish identically".into()));
        }
        let mut params = BTreeMap::new();
        for (k, v) in &self.params {
            params.insert(k.clone(), parse_q(v)?);
        }
        Ok(SpectralCurve {
            name: self.name.clone(),
            x,
            y,
            form: self.form,
            params,
            certificate: "user supplied".into(),
        })
    }

    pub fn parse(text: &str) -> Result<SpectralCurve> {
        let spec: CurveSpec = match serde_json::from_str(text) {
            Ok(s) => s,
            Err(_) => toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?,
        };
        spec.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_data() {
        let c = preset("airy", &[]).unwrap();
        assert_eq!(c.form, Form::Algebraic);
        assert_eq!(c.dx(), RationalFunction1::poly(Poly::from_ints(&[0, 2])));
    }

    #[test]
    fn vertex_derivative() {
        let c = preset("vertex", &[("f", q(1))]).unwrap();
        assert_eq!(c.form, Form::ExpExp);
        let d = c.dx();
        assert_eq!(d.eval(&qr(1, 2)).unwrap(), q(0));
        assert!(c.bernoulli_correction());
        assert_eq!(c.kernel_type().unwrap(), KernelType::Exponential);
    }

    #[test]
    fn gw_at_zero_is_gamma() {
        let g = preset("gw-p1", &[("t", q(0))]).unwrap();
        let gam = preset("gamma", &[]).unwrap();
        assert_eq!(g.x, gam.x);
        assert_eq!(g.y, gam.y);
    }

    #[test]
    fn swap_is_involution() {
        for name in ["airy", "lambert-shifted", "lambert-exp", "dilog"] {
            let c = preset(name, &[]).unwrap();
            let s = c.swap_xy();
            assert_eq!(s.x, c.y);
            assert_eq!(s.swap_xy(), c);
        }
    }

    #[test]
    fn preset_errors() {
        assert!(matches!(preset("nope", &[]), Err(Error::UnknownPreset(_))));
        assert!(matches!(preset("vertex", &[]), Err(Error::BadParameter(_))));
        assert!(matches!(preset("vertex", &[("f", q(-1))]), Err(Error::BadParameter(_))));
        assert!(matches!(preset("rspin", &[("r", qr(5, 2))]), Err(Error::BadParameter(_))));
    }

    #[test]
    fn custom_curve_toml() {
        let text = r#"
name = "custom-airy"
form = "algebraic"
[x]
rational = { num = ["0", "0", "1"] }
[y]
rational = { num = ["0", "1"] }
"#;
        let c = CurveSpec::parse(text).unwrap();
        let a = preset("airy", &[]).unwrap();
        assert_eq!(c.x, a.x);
        assert_eq!(c.y, a.y);
    }
}
