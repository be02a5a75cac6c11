//! Exact recovery of homogeneous Laurent polynomials in `1/z_i` from point values.

use crate::arith::{q, qpow, Q};
use crate::error::{Error, Result};
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Solves the square system `a x = b` by fraction-exact Gaussian elimination.
pub fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Result<Vec<Q>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("solve needs a square system".into()));
    }
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or_else(|| Error::Inconsistent("singular sample matrix".into()))?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                let v = &f * &a[col][c];
                a[r][c] -= v;
            }
            let v = &f * &b[col];
            b[r] -= v;
        }
    }
    Ok((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Exponent vectors `e` with `e_i >= 1` and `sum e_i = d`, in lexicographic order.
pub fn compositions(n: usize, d: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() + 1 == n {
            if left >= 1 {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for e in 1..=left - (n - cur.len() - 1) as i64 {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    if n > 0 {
        rec(n, d, &mut cur, &mut out);
    }
    out
}

fn lattice(dims: usize, deg: usize) -> Vec<Vec<usize>> {
    if dims == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..=deg {
        for mut rest in lattice(dims - 1, deg - i) {
            rest.insert(0, i);
            out.push(rest);
        }
    }
    out
}

fn monomial(w: &[Q], e: &[i64]) -> Q {
    w.iter().zip(e).map(|(x, k)| qpow(x, *k)).product()
}

/// Given `eval(z)` equal to `sum_e c_e prod z_i^{-e_i}` over `e_i >= 1`, `sum e_i = d`,
/// returns the nonzero `c_e`. Samples lie on a principal lattice in `w = 1/z` with
/// `w_n = 1`, which is unisolvent for this space; two further points check the fit.
pub fn fit_homogeneous<F>(n: usize, d: i64, eval: F) -> Result<BTreeMap<Vec<i64>, Q>>
where
    F: Fn(&[Q]) -> Result<Q> + Sync,
{
    if n == 0 || d < n as i64 {
        return Ok(BTreeMap::new());
    }
    let exps = compositions(n, d);
    let deg = (d - n as i64) as usize;
    let axes = n - 1;
    let node = |j: usize, i: usize| q(2 + j as i64 + (i * axes.max(1)) as i64);
    let mut points: Vec<Vec<Q>> = lattice(axes, deg)
        .into_iter()
        .map(|idx| {
            let mut w: Vec<Q> = idx.iter().enumerate().map(|(j, &i)| node(j, i)).collect();
            w.push(q(1));
            w
        })
        .collect();
    let checks: Vec<Vec<Q>> = vec![
        (0..n).map(|j| Q::new((7 + 3 * j as i64).into(), (2 + j as i64).into())).collect(),
        (0..n).map(|j| Q::new((11 + 5 * j as i64).into(), (3 + j as i64).into())).collect(),
    ];
    points.extend(checks.iter().cloned());
    let values: Vec<Q> = points
        .par_iter()
        .map(|w| {
            let z: Vec<Q> = w.iter().map(|x| x.recip()).collect();
            eval(&z)
        })
        .collect::<Result<Vec<Q>>>()?;
    let m = exps.len();
    let a: Vec<Vec<Q>> = points[..m].iter().map(|w| exps.iter().map(|e| monomial(w, e)).collect()).collect();
    let c = solve(a, values[..m].to_vec())?;
    for (w, v) in points[m..].iter().zip(&values[m..]) {
        let fitted: Q = exps.iter().zip(&c).map(|(e, ce)| ce * monomial(w, e)).sum();
        if &fitted != v {
            return Err(Error::Inconsistent(format!("sampled values are not a homogeneous Laurent polynomial of degree -{d}")));
        }
    }
    Ok(exps.into_iter().zip(c).filter(|(_, v)| !v.is_zero()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(3, 9).len(), 28);
        assert_eq!(compositions(1, 5), vec![vec![5]]);
        assert!(compositions(2, 1).is_empty());
    }

    #[test]
    fn recovers_known_polynomial() {
        let f = |z: &[Q]| Ok(qr(3, 2) / (qpow(&z[0], 3) * &z[1]) - q(5) / (&z[0] * qpow(&z[1], 3)) + q(2) / qpow(&(&z[0] * &z[1]), 2));
        let c = fit_homogeneous(2, 4, f).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c[&vec![3, 1]], qr(3, 2));
        assert_eq!(c[&vec![1, 3]], q(-5));
        assert_eq!(c[&vec![2, 2]], q(2));
    }

    #[test]
    fn detects_wrong_degree() {
        let f = |z: &[Q]| Ok(z[0].recip() + z[1].recip() + (&z[0] * &z[1]).recip());
        assert!(matches!(fit_homogeneous(2, 2, f), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn solves_small_system() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        assert_eq!(solve(a, vec![q(3), q(5)]).unwrap(), vec![qr(4, 5), qr(7, 5)]);
    }
}
