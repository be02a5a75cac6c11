use super::fit::fit_homogeneous;
use super::{euler, Flag, InvariantRecord, Kind, Pipeline};
use crate::arith::{q, qpow, r_factorial, Q};
use crate::curves::{preset, SpectralCurve};
use crate::error::{Error, Result};
use crate::xy::xy_cycles;
use num_traits::Zero;
use once_cell::sync::Lazy;
use parking_lot::Mutex;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

type Fit = Arc<BTreeMap<Vec<i64>, Q>>;

static FITS: Lazy<Mutex<HashMap<(i64, usize, usize), Fit>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn curve(r: i64) -> Result<SpectralCurve> {
    if r == 2 {
        preset("airy", &[])
    } else {
        preset("rspin", &[("r", q(r))])
    }
}

/// Total pole degree of `W_{g,n}` on `x = z^r`.
fn total_degree(r: i64, g: usize, n: usize) -> i64 {
    let (g, n) = (g as i64, n as i64);
    r * (3 * g - 3 + 2 * n) - (r - 2) * (g - 1) + n
}

/// Laurent coefficients of `W_{g,n}` on `x = z^r` from cycle-formula evaluations.
fn xy_laurent(r: i64, g: usize, n: usize) -> Result<Fit> {
    if let Some(f) = FITS.lock().get(&(r, g, n)) {
        return Ok(f.clone());
    }
    let c = curve(r)?;
    let fit = fit_homogeneous(n, total_degree(r, g, n), |z| Ok(xy_cycles(&c, g, n, z, 0)?.value()))?;
    let fit = Arc::new(fit);
    FITS.lock().insert((r, g, n), fit.clone());
    Ok(fit)
}

/// Coefficient of `W_{g,n}` at `prod z_i^{-e_i}` read off the Airy tensor.
fn tr_coefficient(g: usize, n: usize, e: &[i64]) -> Result<Q> {
    let c = preset("airy", &[])?;
    let t = crate::tr::omega(&c, g, n)?;
    let mut acc = Q::zero();
    for (factors, v) in t.terms() {
        let mut orders = vec![0i64; n];
        let mut at_zero = true;
        for f in factors {
            at_zero &= f.pole.is_zero();
            orders[f.var] = f.order as i64;
        }
        // W = omega / prod (2 z_i dz_i).
        if at_zero && orders.iter().zip(e).all(|(o, ei)| o + 1 == *ei) {
            acc += v;
        }
    }
    Ok(acc / qpow(&q(2), n as i64))
}

/// `(-r)^{g-1-|k|} prod (r k_i + a_i)!_(r) / r`.
fn normalization(r: i64, g: usize, k: &[usize], a: &[usize]) -> Result<Q> {
    let ksum: i64 = k.iter().map(|&x| x as i64).sum();
    let mut c = qpow(&q(-r), g as i64 - 1 - ksum);
    for (&ki, &ai) in k.iter().zip(a) {
        c *= r_factorial(r * ki as i64 + ai as i64, r)? / q(r);
    }
    Ok(c)
}

/// `<tau_{k_1} ... tau_{k_n}>_g` from the Airy curve.
pub fn extract_psi(g: usize, k: &[usize], pipeline: Pipeline) -> Result<InvariantRecord> {
    let n = k.len();
    euler(g, n)?;
    let idx: Vec<i64> = k.iter().map(|&x| x as i64).collect();
    let rec = |v: Q| InvariantRecord::new(Kind::Psi, g, idx.clone(), &[("pipeline", pipeline.as_str().into())], v);
    let ksum: usize = k.iter().sum();
    if ksum as i64 != 3 * g as i64 - 3 + n as i64 {
        return Ok(rec(q(0)).flagged(Flag::DimensionMismatch));
    }
    let e: Vec<i64> = k.iter().map(|&x| 2 * x as i64 + 3).collect();
    let ones = vec![1usize; n];
    let coeff = match pipeline {
        Pipeline::Tr => tr_coefficient(g, n, &e)?,
        Pipeline::Xy => xy_laurent(2, g, n)?.get(&e).cloned().unwrap_or_else(Q::zero),
    };
    Ok(rec(coeff / normalization(2, g, k, &ones)?))
}

/// Witten `r`-spin intersection numbers `<tau_{k_1,a_1} ... tau_{k_n,a_n}>_g` from the
/// cycle formula on `x = z^r`.
pub fn extract_rspin(r: i64, g: usize, k: &[usize], a: &[usize]) -> Result<InvariantRecord> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("r must be at least 2, got {r}")));
    }
    if k.len() != a.len() {
        return Err(Error::InvalidArgument("k and a must have equal length".into()));
    }
    if let Some(bad) = a.iter().find(|&&ai| ai < 1 || ai as i64 > r - 1) {
        return Err(Error::InvalidArgument(format!("a = {bad} outside 1..{}", r - 1)));
    }
    let n = k.len();
    euler(g, n)?;
    let mut idx: Vec<i64> = k.iter().map(|&x| x as i64).collect();
    idx.extend(a.iter().map(|&x| x as i64));
    let rec = |v: Q| InvariantRecord::new(Kind::Rspin, g, idx.clone(), &[("r", r.to_string())], v);
    let shifted: i64 = (r - 2) * (g as i64 - 1) + a.iter().map(|&x| x as i64 - 1).sum::<i64>();
    if shifted < 0 || shifted % r != 0 {
        return Ok(rec(q(0)).flagged(Flag::NonIntegralDegree));
    }
    let s = shifted / r;
    let ksum: i64 = k.iter().map(|&x| x as i64).sum();
    if ksum != 3 * g as i64 - 3 + n as i64 - s {
        return Ok(rec(q(0)).flagged(Flag::DimensionMismatch));
    }
    let e: Vec<i64> = k.iter().zip(a).map(|(&ki, &ai)| r * (ki as i64 + 1) + ai as i64).collect();
    let coeff = xy_laurent(r, g, n)?.get(&e).cloned().unwrap_or_else(Q::zero);
    Ok(rec(coeff / normalization(r, g, k, a)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    #[test]
    fn small_psi_both_pipelines() {
        for p in [Pipeline::Tr, Pipeline::Xy] {
            assert_eq!(extract_psi(0, &[0, 0, 0], p).unwrap().value, q(1));
            assert_eq!(extract_psi(1, &[1], p).unwrap().value, qr(1, 24));
            assert_eq!(extract_psi(1, &[1, 1], p).unwrap().value, qr(1, 24));
            assert_eq!(extract_psi(1, &[2, 0], p).unwrap().value, qr(1, 24));
            assert_eq!(extract_psi(2, &[4], p).unwrap().value, qr(1, 1152));
        }
    }

    #[test]
    fn dimension_mismatch_is_flagged() {
        let r = extract_psi(1, &[2], Pipeline::Tr).unwrap();
        assert_eq!(r.value, q(0));
        assert_eq!(r.flag, Some(Flag::DimensionMismatch));
    }

    #[test]
    fn rspin_reduces_to_psi() {
        assert_eq!(extract_rspin(2, 1, &[1], &[1]).unwrap().value, qr(1, 24));
        assert_eq!(extract_rspin(2, 0, &[0, 0, 0], &[1, 1, 1]).unwrap().value, q(1));
    }

    #[test]
    fn three_spin_genus_zero() {
        assert_eq!(extract_rspin(3, 0, &[0, 0, 0], &[1, 1, 2]).unwrap().value, q(1));
        let r = extract_rspin(3, 0, &[0, 0, 0], &[1, 1, 1]).unwrap();
        assert_eq!(r.flag, Some(Flag::NonIntegralDegree));
    }

    #[test]
    fn rspin_rejects_bad_labels() {
        assert!(extract_rspin(3, 0, &[0, 0, 0], &[1, 1, 3]).is_err());
        assert!(extract_rspin(3, 0, &[0, 0, 0], &[0, 1, 2]).is_err());
    }
}
