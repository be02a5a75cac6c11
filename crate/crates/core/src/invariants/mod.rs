//! Enumerative invariants read off correlators by exact residue and coefficient
//! extraction, wave functions, and quantum-curve checks.

pub mod fit;
mod gw;
mod hodge;
mod psi;
pub mod residue;
mod wave;

pub use gw::{extract_gw_p1, extract_gw_p1_ordered, gw_degree_one_product, gw_one_point_series};
pub use hodge::{extract_hodge_linear, extract_triple_hodge};
pub use psi::{extract_psi, extract_rspin};
pub use wave::{quantum_curve_check, wave_function, CurveCheck, WaveFunctionSeries};

use crate::arith::{fmt_q, qser, Q};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Psi,
    Rspin,
    HodgeLinear,
    TripleHodge,
    GwP1,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Psi => "psi",
            Kind::Rspin => "rspin",
            Kind::HodgeLinear => "hodge_linear",
            Kind::TripleHodge => "triple_hodge",
            Kind::GwP1 => "gw_p1",
        }
    }
}

/// Which family of correlators the number is read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    /// Residues of the recursion's tensors.
    Tr,
    /// The cycle formula of the duality.
    Xy,
}

impl Pipeline {
    pub fn as_str(&self) -> &'static str {
        match self {
            Pipeline::Tr => "tr",
            Pipeline::Xy => "xy",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "tr" => Ok(Pipeline::Tr),
            "xy" | "xy-cycles" => Ok(Pipeline::Xy),
            other => Err(Error::InvalidArgument(format!("unknown pipeline `{other}`"))),
        }
    }
}

/// Why a record holds zero or an unnormalized number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    DimensionMismatch,
    NonIntegralDegree,
    NoDegree,
    /// The normalizing prefactor vanishes; the value is the bare residue.
    RawResidue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub kind: Kind,
    pub g: usize,
    pub indices: Vec<i64>,
    pub params: BTreeMap<String, String>,
    #[serde(with = "qser")]
    pub value: Q,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<Flag>,
}

impl InvariantRecord {
    pub(crate) fn new(kind: Kind, g: usize, indices: Vec<i64>, params: &[(&str, String)], value: Q) -> Self {
        InvariantRecord {
            kind,
            g,
            indices,
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            value,
            flag: None,
        }
    }

    pub(crate) fn flagged(mut self, f: Flag) -> Self {
        self.flag = Some(f);
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("record serializes")
    }

    pub fn describe(&self) -> String {
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut s = format!("{} g={} [{}]", self.kind.as_str(), self.g, idx.join(","));
        if !params.is_empty() {
            s.push_str(&format!(" {}", params.join(" ")));
        }
        s.push_str(&format!(" = {}", fmt_q(&self.value)));
        if let Some(f) = self.flag {
            s.push_str(&format!(" ({f:?})"));
        }
        s
    }
}

pub(crate) fn euler(g: usize, n: usize) -> Result<i64> {
    let chi = 2 * g as i64 - 2 + n as i64;
    if n == 0 || chi <= 0 {
        return Err(Error::InvalidArgument(format!("(g, n) = ({g}, {n}) is not stable")));
    }
    Ok(chi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    #[test]
    fn record_json_shape() {
        let r = InvariantRecord::new(Kind::GwP1, 1, vec![2], &[("d", "1".into())], qr(1, 24));
        let v = r.to_json();
        assert_eq!(v["kind"], "gw_p1");
        assert_eq!(v["value"], "1/24");
        assert!(v.get("flag").is_none());
        let back: InvariantRecord = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
        let f = r.flagged(Flag::NoDegree).to_json();
        assert_eq!(f["flag"], "no_degree");
    }
}
