use super::hodge::{cycle_sign, s_of, tr_sign, xy_residue};
use super::residue::{tensor_residue, KernelRing, Laurent, Scale};
use super::{euler, Flag, InvariantRecord, Kind, Pipeline};
use num_traits::Zero;
use crate::arith::{factorial_q, q, qpow, s_coefficients, Q};
use crate::curves::preset;
use crate::error::{Error, Result};
use crate::series::{Mono, MultiSeries, Series1};

/// Degree fixed by the dimension condition `sum b_i = 2g - 2 + 2d`.
fn degree(g: usize, b: &[usize]) -> Option<usize> {
    let s: i64 = b.iter().map(|&x| x as i64).sum::<i64>() - 2 * g as i64 + 2;
    (s >= 0 && s % 2 == 0).then_some((s / 2) as usize)
}

/// `Res_{z=0} e^{mu x} omega` at `[mu^{b+1}]`, with `e^{mu (z + 1/z)}` on the `t = 1` curve.
fn tr_residue(g: usize, b: &[usize]) -> Result<Q> {
    let c = preset("gw-p1", &[("t", q(1))])?;
    let t = crate::tr::omega(&c, g, b.len())?;
    let weights: Vec<Laurent> = b
        .iter()
        .map(|&bi| {
            let m = bi as i64 + 1;
            let mut w = Laurent::new();
            for p in 0..=m {
                *w.entry(2 * p - m).or_insert_with(|| q(0)) += (factorial_q(p as usize) * factorial_q((m - p) as usize)).recip();
            }
            w
        })
        .collect();
    tensor_residue(&t, &weights)
}

/// The cycle residue formula with contours taken in the given order (innermost first).
fn xy_residue_ordered(g: usize, b: &[usize], contour: &[usize]) -> Result<Q> {
    let n = b.len();
    let chi = 2 * g as i64 - 2 + n as i64;
    let h = if n == 1 { chi + 1 } else { chi };
    // One point: the extra 1/mu of the kernel moves the wanted power up by one.
    let bounds: Vec<i64> = b.iter().map(|&x| x as i64 + 1 + i64::from(n == 1)).collect();
    let ring = KernelRing::new(n, h, Some(&bounds))?;
    let u = vec![Scale::Param; n];
    let factors = (0..n)
        .map(|i| {
            let zz = ring.mono(&[(ring.z(i), 1)], q(1)).add(&ring.mono(&[(ring.z(i), -1)], q(1)));
            let arg = s_of(&ring, i, &Scale::Param, h).mul(&ring.mono(&[(ring.param(i), 1)], q(1))).mul(&zz);
            ring.exp(&arg)
        })
        .collect::<Result<Vec<MultiSeries>>>()?;
    let r = xy_residue(&ring, &factors, &u, contour, chi)?;
    let mut m = Mono::zero();
    for (i, bi) in bounds.iter().enumerate() {
        m.0[ring.param(i)] = *bi as i16;
    }
    Ok(r.coeff(&m))
}

fn record(g: usize, b: &[usize], d: Option<usize>, pipeline: Pipeline, v: Q) -> InvariantRecord {
    let idx = b.iter().map(|&x| x as i64).collect();
    let mut params = vec![("pipeline", pipeline.as_str().to_string())];
    if let Some(d) = d {
        params.push(("d", d.to_string()));
    }
    InvariantRecord::new(Kind::GwP1, g, idx, &params, v)
}

/// Stationary invariants `<tau_{b_1}(w) ... tau_{b_n}(w)>_{g,d}` of the projective line.
///
/// The cycle formula also covers the unstable `(0, 1)` and `(0, 2)`; the recursion does not.
pub fn extract_gw_p1(g: usize, b: &[usize], pipeline: Pipeline) -> Result<InvariantRecord> {
    let contour: Vec<usize> = (0..b.len()).collect();
    extract_gw_p1_ordered(g, b, pipeline, &contour)
}

/// As [`extract_gw_p1`], with an explicit contour order for the cycle formula.
pub fn extract_gw_p1_ordered(g: usize, b: &[usize], pipeline: Pipeline, contour: &[usize]) -> Result<InvariantRecord> {
    let n = b.len();
    if n == 0 {
        return Err(Error::InvalidArgument("at least one insertion is required".into()));
    }
    if pipeline == Pipeline::Tr {
        euler(g, n)?;
    }
    let mut seen = contour.to_vec();
    seen.sort_unstable();
    if seen != (0..n).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument("contour order must list every point once".into()));
    }
    let Some(d) = degree(g, b) else {
        return Ok(record(g, b, None, pipeline, q(0)).flagged(Flag::NoDegree));
    };
    let v = match pipeline {
        Pipeline::Tr => tr_residue(g, b)? * tr_sign(n),
        Pipeline::Xy => xy_residue_ordered(g, b, contour)? * cycle_sign(n),
    };
    Ok(record(g, b, Some(d), pipeline, v))
}

/// Degree-one invariants in closed form: `prod 1/(2^{2c_i} (2c_i + 1)!)` when every
/// `b_i = 2c_i` is even, and zero otherwise.
pub fn gw_degree_one_product(b: &[usize]) -> Q {
    if b.iter().any(|x| x % 2 == 1) {
        return Q::zero();
    }
    b.iter().map(|&x| (qpow(&q(2), x as i64) * factorial_q(x + 1)).recip()).product()
}

/// One-point series `[t^{2g}] S(t)^{2d-1} / (d!)^2`.
pub fn gw_one_point_series(g: usize, d: usize) -> Result<Q> {
    let order = 2 * g as i64;
    let s = Series1::new(0, s_coefficients(2 * g), order);
    let p = s.pow(2 * d as i64 - 1)?;
    Ok(p.coeff(order) / qpow(&factorial_q(d), 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    fn xy(g: usize, b: &[usize]) -> Q {
        extract_gw_p1(g, b, Pipeline::Xy).unwrap().value
    }

    #[test]
    fn one_point_series() {
        for (g, d) in [(0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)] {
            let b = 2 * g + 2 * d - 2;
            let want = gw_one_point_series(g, d).unwrap();
            assert_eq!(xy(g, &[b]), want, "g={g} d={d}");
            if g > 0 {
                assert_eq!(extract_gw_p1(g, &[b], Pipeline::Tr).unwrap().value, want);
            }
        }
        assert_eq!(gw_one_point_series(0, 1).unwrap(), q(1));
        assert_eq!(gw_one_point_series(1, 1).unwrap(), qr(1, 24));
        assert_eq!(gw_one_point_series(2, 1).unwrap(), qr(1, 1920));
        assert_eq!(gw_one_point_series(1, 0).unwrap(), qr(-1, 24));
    }

    #[test]
    fn degree_one_closed_form() {
        assert_eq!(gw_degree_one_product(&[4]), qr(1, 1920));
        assert_eq!(gw_degree_one_product(&[2, 2]), qr(1, 576));
        assert_eq!(gw_degree_one_product(&[1, 1]), q(0));
        assert_eq!(xy(2, &[4]), qr(1, 1920));
        assert_eq!(xy(2, &[2, 2]), qr(1, 576));
        assert_eq!(xy(1, &[1, 1]), q(0));
        assert_eq!(xy(1, &[2, 0]), qr(1, 24));
        assert_eq!(xy(0, &[0, 0]), q(1));
    }

    #[test]
    fn divisor_and_completed_cycles() {
        // <tau_1(w)^2>_{0,2} = 1/2 from contents of the two partitions of 2.
        assert_eq!(xy(0, &[1, 1, 0]), q(1));
        assert_eq!(extract_gw_p1(0, &[1, 1, 0], Pipeline::Tr).unwrap().value, q(1));
    }

    #[test]
    fn no_degree_is_flagged() {
        let r = extract_gw_p1(1, &[1], Pipeline::Xy).unwrap();
        assert_eq!(r.flag, Some(Flag::NoDegree));
        assert!(extract_gw_p1(0, &[0], Pipeline::Tr).is_err());
        assert!(extract_gw_p1_ordered(1, &[2, 0], Pipeline::Xy, &[0, 0]).is_err());
    }

    #[test]
    fn cycle_sum_is_independent_of_contour_order() {
        for (g, bb) in [(2usize, vec![2usize, 2, 0]), (1, vec![2, 1, 1])] {
            let tr = extract_gw_p1(g, &bb, Pipeline::Tr).unwrap().value;
            for o in [vec![0usize, 1, 2], vec![2, 1, 0], vec![1, 0, 2], vec![1, 2, 0]] {
                assert_eq!(extract_gw_p1_ordered(g, &bb, Pipeline::Xy, &o).unwrap().value, tr, "{bb:?} {o:?}");
            }
        }
    }
}
