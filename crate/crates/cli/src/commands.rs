use serde_json::{json, Value};
use std::collections::BTreeMap;

use trxy::arith::{fmt_q, parse_q};
use trxy::curves::{make_preset, CurveSpec, SpectralCurve, PRESETS};
use trxy::invariants::{
    extract_gw_p1_ordered, extract_hodge_linear, extract_psi, extract_rspin, extract_triple_hodge, InvariantRecord, Pipeline,
};
use trxy::series::{default_base_points, jittered_base_points, Jet};
use trxy::xy::{correlator, Method};
use trxy::{Error, Q};

use crate::{ComputeArgs, CurveArgs, ExtractArgs, Failure, Invariant, OutFormat};

fn print_json(v: &Value) {
    outln!("{}", serde_json::to_string_pretty(v).expect("json value serializes"));
}

pub fn list_curves(out: OutFormat) -> Result<(), Failure> {
    match out {
        OutFormat::Json => {
            let v: Vec<Value> = PRESETS.iter().map(|(n, d)| json!({ "name": n, "description": d })).collect();
            print_json(&Value::Array(v));
        }
        OutFormat::Text => {
            let w = PRESETS.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
            for (n, d) in PRESETS {
                outln!("{n:<w$}  {d}");
            }
        }
    }
    Ok(())
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, Q>, Failure> {
    let mut m = BTreeMap::new();
    for p in raw {
        let (k, v) = p.split_once('=').ok_or_else(|| Failure::Usage(format!("--param expects k=v, got `{p}`")))?;
        m.insert(k.trim().to_string(), parse_q(v.trim())?);
    }
    Ok(m)
}

pub fn load_curve(a: &CurveArgs) -> Result<SpectralCurve, Failure> {
    match (&a.curve, &a.curve_file) {
        (Some(name), None) => Ok(make_preset(name, &parse_params(&a.params)?)?),
        (None, Some(path)) => {
            if !a.params.is_empty() {
                return Err(Failure::Usage("--param applies to presets only".into()));
            }
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            Ok(CurveSpec::parse(&text)?)
        }
        _ => Err(Failure::Usage("one of --curve or --curve-file is required".into())),
    }
}

fn base_points(raw: Option<&str>, seed: Option<u64>, n: usize) -> Result<Vec<Q>, Failure> {
    let Some(raw) = raw else {
        return Ok(match seed {
            Some(s) => jittered_base_points(n, s),
            None => default_base_points(n),
        });
    };
    if seed.is_some() {
        return Err(Failure::Usage("--seed and --base-points are exclusive".into()));
    }
    let pts = raw.split(',').map(|s| parse_q(s.trim())).collect::<Result<Vec<Q>, Error>>()?;
    if pts.len() != n {
        return Err(Error::InvalidArgument(format!("{} base points given for n = {n}", pts.len())).into());
    }
    for i in 0..n {
        if pts[i + 1..].contains(&pts[i]) {
            return Err(Error::InvalidArgument("base points must be distinct".into()).into());
        }
    }
    Ok(pts)
}

fn jet_lines(j: &Jet) -> Vec<String> {
    let v = j.to_json();
    let terms = v["coeffs"].as_array().cloned().unwrap_or_default();
    if terms.is_empty() {
        return vec!["  0".into()];
    }
    terms
        .iter()
        .map(|t| {
            let e: Vec<String> = t["exp"].as_array().into_iter().flatten().map(|x| x.to_string()).collect();
            format!("  [{}] {}", e.join(","), t["val"].as_str().unwrap_or(""))
        })
        .collect()
}

fn params_json(c: &SpectralCurve) -> Value {
    let m: serde_json::Map<String, Value> = c.params.iter().map(|(k, v)| (k.clone(), Value::String(fmt_q(v)))).collect();
    Value::Object(m)
}

pub fn compute(a: &ComputeArgs) -> Result<(), Failure> {
    let curve = load_curve(&a.curve)?;
    let method = Method::parse(&a.method)?;
    let base = base_points(a.base_points.as_deref(), a.seed, a.n)?;
    let tensor = match method {
        Method::Tr => Some(trxy::tr::omega(&curve, a.g, a.n)?),
        _ => None,
    };
    let jet = match &tensor {
        Some(t) => t.w_jet(&curve, &base, a.jet_order)?,
        None => correlator(&curve, a.g, a.n, method, &base, a.jet_order)?,
    };
    match a.out.out {
        OutFormat::Json => {
            let mut v = json!({
                "curve": curve.name,
                "params": params_json(&curve),
                "g": a.g,
                "n": a.n,
                "method": method.as_str(),
                "base": base.iter().map(fmt_q).collect::<Vec<_>>(),
                "order": a.jet_order,
                "jet": jet.to_json(),
            });
            if let Some(t) = &tensor {
                v["tensor"] = t.to_json();
            }
            print_json(&v);
        }
        OutFormat::Text => {
            let base: Vec<String> = base.iter().map(fmt_q).collect();
            outln!("W_{{{},{}}} on {} via {}", a.g, a.n, curve.name, method.as_str());
            outln!("base ({}), order {}", base.join(", "), a.jet_order);
            for l in jet_lines(&jet) {
                outln!("{l}");
            }
        }
    }
    Ok(())
}

fn pipeline(a: &ExtractArgs, default: Pipeline) -> Result<Pipeline, Failure> {
    match a.method.as_deref() {
        None => Ok(default),
        Some(m) => Ok(Pipeline::parse(m)?),
    }
}

fn required<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, Failure> {
    v.clone().ok_or_else(|| Failure::Usage(format!("{flag} is required for this invariant")))
}

pub fn extract(a: &ExtractArgs) -> Result<(), Failure> {
    let rec: InvariantRecord = match a.invariant {
        Invariant::Psi => extract_psi(a.g, &a.k, pipeline(a, Pipeline::Tr)?)?,
        Invariant::Rspin => {
            if pipeline(a, Pipeline::Xy)? != Pipeline::Xy {
                return Err(Error::InvalidArgument("r-spin numbers are read from the cycle formula only".into()).into());
            }
            extract_rspin(required(&a.r, "--r")?, a.g, &a.k, &a.a)?
        }
        Invariant::HodgeLinear => extract_hodge_linear(a.g, &a.k, pipeline(a, Pipeline::Tr)?)?,
        Invariant::TripleHodge => {
            let f = parse_q(&required(&a.f, "--f")?)?;
            extract_triple_hodge(&f, a.g, &a.k, pipeline(a, Pipeline::Tr)?)?
        }
        Invariant::GwP1 => {
            let contour: Vec<usize> = if a.contour.is_empty() {
                (0..a.b.len()).collect()
            } else {
                if a.contour.contains(&0) {
                    return Err(Failure::Usage("--contour indices are 1-based".into()));
                }
                a.contour.iter().map(|i| i - 1).collect()
            };
            extract_gw_p1_ordered(a.g, &a.b, pipeline(a, Pipeline::Xy)?, &contour)?
        }
    };
    match a.out.out {
        OutFormat::Json => print_json(&rec.to_json()),
        OutFormat::Text => outln!("{}", rec.describe()),
    }
    Ok(())
}
