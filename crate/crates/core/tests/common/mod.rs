//! Property bodies shared by the proptest suite and the acceptance gate.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use trxy::arith::{q, qpow, Q};
use trxy::curves::{preset, SpectralCurve};
use trxy::series::Series1;
use trxy::xy::connected::{cauchy_matrix, cauchy_product, det};

pub const ORDER: i64 = 8;

pub fn rational() -> impl Strategy<Value = Q> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

pub fn nonzero_rational() -> impl Strategy<Value = Q> {
    rational().prop_filter("nonzero", |x| *x != q(0))
}

/// Series `sum_{k=start}^{ORDER} c_k t^k + O(t^{ORDER+1})`.
pub fn series(start: i64) -> impl Strategy<Value = Series1> {
    prop::collection::vec(rational(), (ORDER - start + 1) as usize).prop_map(move |c| Series1::new(start, c, ORDER))
}

pub fn cauchy_inputs() -> impl Strategy<Value = (Vec<Q>, Vec<Q>)> {
    (1usize..=4).prop_flat_map(|n| (prop::collection::vec(rational(), n), prop::collection::vec(rational(), n)))
}

pub fn cauchy_identity(a: &[Q], b: &[Q]) -> Result<(), TestCaseError> {
    let distinct = |v: &[Q]| v.iter().enumerate().all(|(i, x)| v[i + 1..].iter().all(|y| x != y));
    prop_assume!(distinct(a) && distinct(b));
    prop_assume!(a.iter().all(|x| b.iter().all(|y| x + y != q(0))));
    prop_assert_eq!(det(&cauchy_matrix(a, b)), cauchy_product(a, b));
    Ok(())
}

pub fn exp_log_round_trip(s: &Series1) -> Result<(), TestCaseError> {
    let e = s.exp().map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&e.log().map_err(|e| TestCaseError::fail(e.to_string()))?, s);
    let one_plus = &Series1::one(ORDER) + s;
    let back = one_plus.log().and_then(|l| l.exp()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(back, one_plus);
    Ok(())
}

/// `f(f^{-1}(t)) = f^{-1}(f(t)) = t` for `f = a t + ...`, `a != 0`.
pub fn reversion_round_trip(a: &Q, rest: &Series1) -> Result<(), TestCaseError> {
    let f = &Series1::monomial(a.clone(), 1, ORDER) + rest;
    let r = f.reversion().map_err(|e| TestCaseError::fail(e.to_string()))?;
    let t = Series1::var(ORDER);
    prop_assert_eq!(f.compose(&r).map_err(|e| TestCaseError::fail(e.to_string()))?, t.clone());
    prop_assert_eq!(r.compose(&f).map_err(|e| TestCaseError::fail(e.to_string()))?, t);
    Ok(())
}

pub fn residue_of_derivative(s: &Series1) -> Result<(), TestCaseError> {
    prop_assert_eq!(s.derivative().residue(), q(0));
    Ok(())
}

/// Curves and `(g, n)` whose tensors are checked for symmetry and homogeneity.
pub fn tensor_cases() -> Vec<(SpectralCurve, usize, usize)> {
    let curves = [
        preset("airy", &[]).unwrap(),
        preset("cubic", &[]).unwrap(),
        preset("lambert-exp", &[]).unwrap(),
        preset("vertex", &[("f", q(2))]).unwrap(),
        preset("gw-p1", &[("t", q(1))]).unwrap(),
    ];
    let mut out = Vec::new();
    for c in curves {
        for (g, n) in [(0, 3), (1, 1), (1, 2), (0, 4)] {
            out.push((c.clone(), g, n));
        }
    }
    out
}

pub fn tensor_symmetry(c: &SpectralCurve, g: usize, n: usize) -> Result<(), TestCaseError> {
    let t = trxy::tr::omega(c, g, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let base = t.normalize();
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..n {
        perm.rotate_left(1);
        prop_assert_eq!(&t.permuted(&perm).normalize(), &base, "{} ({}, {}) {:?}", c.name, g, n, perm);
        if n > 1 {
            let mut sw = perm.clone();
            sw.swap(0, 1);
            prop_assert_eq!(&t.permuted(&sw).normalize(), &base);
        }
    }
    Ok(())
}

/// `omega_{g,n}` of `(x, c y)` is `c^{2-2g-n}` times that of `(x, y)`.
pub fn tensor_homogeneity(curve: &SpectralCurve, g: usize, n: usize, c: &Q) -> Result<(), TestCaseError> {
    let t = trxy::tr::omega(curve, g, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let s = trxy::tr::omega(&curve.scale_y(c), g, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let w = qpow(c, 2 - 2 * g as i64 - n as i64);
    prop_assert_eq!(s.normalize(), t.scale(&w).normalize(), "{} ({}, {})", curve.name, g, n);
    Ok(())
}
