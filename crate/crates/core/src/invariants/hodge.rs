use super::residue::{cycle_residue, extract, tensor_residue, KernelRing, Laurent, Scale};
use super::{euler, Flag, InvariantRecord, Kind, Pipeline};
use crate::arith::{binomial, factorial_q, fmt_q, is_integer, q, qi, qpow, s_coefficients, to_i64, Q};
use crate::curves::preset;
use crate::error::{Error, Result};
use crate::series::{Mono, MultiSeries};
use num_traits::Zero;

/// `S(hbar u_i)` in the kernel ring.
pub(crate) fn s_of(ring: &KernelRing, i: usize, u: &Scale, hmax: i64) -> MultiSeries {
    let s = s_coefficients(hmax.max(0) as usize);
    let mut acc = ring.zero();
    for (j, c) in s.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let j16 = j as i16;
        acc.add_assign(&match u {
            Scale::Number(k) => ring.mono(&[(ring.h(), j16)], c * qpow(k, j as i64)),
            Scale::Param => ring.mono(&[(ring.h(), j16), (ring.param(i), j16)], c.clone()),
        });
    }
    acc
}

/// `[hbar^chi]` of the cycle formula, or for one point `[hbar^{2g}] E(z) dz / (z S(hbar u))`
/// (the caller divides by `u`).
pub(crate) fn xy_residue(ring: &KernelRing, factors: &[MultiSeries], u: &[Scale], contour: &[usize], chi: i64) -> Result<MultiSeries> {
    if ring.n == 1 {
        let s = s_of(ring, 0, &u[0], chi + 1);
        let t = factors[0].mul(&ring.mono(&[(ring.z(0), -1)], q(1))).mul(&s.inverse()?);
        extract(ring, &t, chi + 1)
    } else {
        cycle_residue(ring, factors, u, contour, chi)
    }
}

fn h_bound(n: usize, chi: i64) -> i64 {
    if n == 1 {
        chi + 1
    } else {
        chi
    }
}

/// `sum_{p<=cap} (c z S(hbar u))^p / p!`.
fn truncated_exp(ring: &KernelRing, i: usize, u: &Scale, c: &Q, cap: i64, hmax: i64) -> MultiSeries {
    let a = s_of(ring, i, u, hmax).mul(&ring.mono(&[(ring.z(i), 1)], c.clone()));
    let mut acc = ring.constant(q(1));
    let mut p = ring.constant(q(1));
    for k in 1..=cap {
        p = p.mul(&a).scale(&Q::new(1.into(), k.into()));
        acc.add_assign(&p);
    }
    acc
}

fn contour(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn check_k(k: &[usize]) -> Result<()> {
    if k.iter().any(|&x| x == 0) {
        return Err(Error::InvalidArgument("k_i must be at least 1".into()));
    }
    Ok(())
}

/// `prod k_i^{k_i+1} / k_i!`.
fn lambert_weight(k: &[usize]) -> Q {
    k.iter().map(|&x| qpow(&q(x as i64), x as i64 + 1) / factorial_q(x)).product()
}

/// `Res e^{k x} omega` with `e^{k x} = e^{k z} z^{-k}` on the Lambert curve.
fn lambert_tr_residue(g: usize, k: &[usize]) -> Result<Q> {
    let c = preset("lambert-exp", &[])?;
    let t = crate::tr::omega(&c, g, k.len())?;
    let extra = t.max_order() as i64;
    let weights: Vec<Laurent> = k
        .iter()
        .map(|&ki| {
            let kq = q(ki as i64);
            (0..ki as i64 + extra).map(|p| (p - ki as i64, qpow(&kq, p) / factorial_q(p as usize))).collect()
        })
        .collect();
    tensor_residue(&t, &weights)
}

fn lambert_xy_residue(g: usize, k: &[usize]) -> Result<Q> {
    let n = k.len();
    let chi = euler(g, n)?;
    let ring = KernelRing::new(n, h_bound(n, chi), None)?;
    let big: i64 = k.iter().map(|&x| x as i64).sum();
    let u: Vec<Scale> = k.iter().map(|&x| Scale::Number(q(x as i64))).collect();
    let factors: Vec<MultiSeries> = (0..n)
        .map(|i| {
            let kq = q(k[i] as i64);
            truncated_exp(&ring, i, &u[i], &kq, big, h_bound(n, chi)).mul(&ring.mono(&[(ring.z(i), -(k[i] as i16))], q(1)))
        })
        .collect();
    let r = xy_residue(&ring, &factors, &u, &contour(n), chi)?.coeff(&Mono::zero());
    Ok(if n == 1 { r / q(k[0] as i64) } else { r })
}

/// `(-1)^n`: orientation of the `n` residues of the recursion's tensors.
pub(crate) fn tr_sign(n: usize) -> Q {
    if n % 2 == 1 {
        q(-1)
    } else {
        q(1)
    }
}

/// `(-1)^{n+1}`: sign of an `n`-cycle in the cycle formula.
pub(crate) fn cycle_sign(n: usize) -> Q {
    -tr_sign(n)
}

/// `<Lambda(1) / prod (1 - k_i psi_i)>_g` from the Lambert curve.
pub fn extract_hodge_linear(g: usize, k: &[usize], pipeline: Pipeline) -> Result<InvariantRecord> {
    check_k(k)?;
    let n = k.len();
    euler(g, n)?;
    let raw = match pipeline {
        Pipeline::Tr => lambert_tr_residue(g, k)? * tr_sign(n),
        Pipeline::Xy => lambert_xy_residue(g, k)? * cycle_sign(n),
    };
    let idx = k.iter().map(|&x| x as i64).collect();
    Ok(InvariantRecord::new(Kind::HodgeLinear, g, idx, &[("pipeline", pipeline.as_str().into())], raw / lambert_weight(k)))
}

/// `f k (f k + 1) ... (f k + k) / k!` up to sign: the generalized
/// `(k(1+f))! f k / (k! (f k)!)`.
fn vertex_factor(f: &Q, k: usize) -> Q {
    let fk = f * q(k as i64);
    let mut c = fk.clone();
    for j in 1..=k {
        c *= &fk + q(j as i64);
    }
    -c / factorial_q(k)
}

fn vertex_prefactor(f: &Q, g: usize, k: &[usize]) -> Q {
    let base = qpow(&(f * (f + q(1))), g as i64 - 1);
    if base.is_zero() && g == 0 {
        return Q::zero();
    }
    k.iter().fold(base, |acc, &ki| acc * vertex_factor(f, ki))
}

fn integral_fk(f: &Q, k: &[usize]) -> Result<Vec<i64>> {
    k.iter()
        .map(|&ki| {
            let v = f * q(ki as i64);
            if is_integer(&v) {
                Ok(to_i64(&v).expect("small"))
            } else {
                Err(Error::InvalidArgument(format!("f k = {} must be an integer for a residue at z = 0", fmt_q(&v))))
            }
        })
        .collect()
}

/// `Res e^{k x} omega` with `e^{k x} = z^{-f k} (1 - z)^{-k}` on the vertex curve.
fn vertex_tr_residue(f: &Q, g: usize, k: &[usize]) -> Result<Q> {
    let fk = integral_fk(f, k)?;
    let c = preset("vertex", &[("f", f.clone())])?;
    let t = crate::tr::omega(&c, g, k.len())?;
    let extra = t.max_order() as i64;
    let weights: Vec<Laurent> = k
        .iter()
        .zip(&fk)
        .map(|(&ki, &fki)| {
            (0..(fki + extra).max(0))
                .map(|p| (p - fki, qi(binomial(ki + p as usize - 1, p as usize))))
                .collect()
        })
        .collect();
    tensor_residue(&t, &weights)
}

/// `z^{-f k} prod_{m<k} 1/(1 - z e^{hbar (m + (1-k)/2)})` through `z^{cap - f k}`.
fn vertex_factor_series(ring: &KernelRing, i: usize, k: usize, fk: i64, cap: i64) -> Result<MultiSeries> {
    let mut acc = ring.constant(q(1));
    for m in 0..k {
        let shift = q(m as i64) + Q::new((1 - k as i64).into(), 2.into());
        let mut geo = ring.zero();
        for p in 0..=cap.max(0) {
            let e = ring.exp(&ring.mono(&[(ring.h(), 1)], &shift * q(p)))?;
            geo.add_assign(&e.mul(&ring.mono(&[(ring.z(i), p as i16)], q(1))));
        }
        acc = acc.mul(&geo);
        acc.retain(|mm| (mm.0[ring.z(i)] as i64) <= cap);
    }
    Ok(acc.mul(&ring.mono(&[(ring.z(i), -(fk as i16))], q(1))))
}

fn vertex_xy_residue(f: &Q, g: usize, k: &[usize]) -> Result<Q> {
    let n = k.len();
    let chi = euler(g, n)?;
    let fk = integral_fk(f, k)?;
    let big: i64 = fk.iter().sum();
    let ring = KernelRing::new(n, h_bound(n, chi), None)?;
    let u: Vec<Scale> = k.iter().map(|&x| Scale::Number(q(x as i64))).collect();
    let factors = (0..n).map(|i| vertex_factor_series(&ring, i, k[i], fk[i], big)).collect::<Result<Vec<_>>>()?;
    let r = xy_residue(&ring, &factors, &u, &contour(n), chi)?.coeff(&Mono::zero());
    Ok(if n == 1 { r / q(k[0] as i64) } else { r })
}

/// `<Lambda(1) Lambda(f) Lambda(-1-f) / prod (1 - k_i psi_i)>_g` from the framed vertex curve,
/// with `Lambda(a) = 1 + sum_j (-1)^j a^{-j} lambda_j`.
///
/// Equivalently `(-1)^{3g-3+n}` times the same integral against `prod 1/(1 + k_i psi_i)`
/// with `Lambda(a) = 1 + sum_j a^{-j} lambda_j`.
pub fn extract_triple_hodge(f: &Q, g: usize, k: &[usize], pipeline: Pipeline) -> Result<InvariantRecord> {
    check_k(k)?;
    let n = k.len();
    euler(g, n)?;
    let raw = match pipeline {
        Pipeline::Tr => vertex_tr_residue(f, g, k)? * tr_sign(n),
        // The multiplicative kernel carries an extra (-1)^n against the additive one.
        Pipeline::Xy => -vertex_xy_residue(f, g, k)?,
    };
    let idx = k.iter().map(|&x| x as i64).collect();
    let params = [("f", fmt_q(f)), ("pipeline", pipeline.as_str().into())];
    let pre = vertex_prefactor(f, g, k);
    if pre.is_zero() {
        return Ok(InvariantRecord::new(Kind::TripleHodge, g, idx, &params, raw).flagged(Flag::RawResidue));
    }
    Ok(InvariantRecord::new(Kind::TripleHodge, g, idx, &params, raw / pre))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    fn both<F: Fn(Pipeline) -> Q>(f: F) -> Q {
        let a = f(Pipeline::Tr);
        assert_eq!(a, f(Pipeline::Xy));
        a
    }

    /// `k^{2g-2} [t^{2g}] S(t)^{k-1}`: the one-part linear Hodge integral.
    fn one_part(g: usize, k: usize) -> Q {
        let s = crate::series::Series1::new(0, s_coefficients(2 * g), 2 * g as i64);
        let p = s.pow(k as i64 - 1).unwrap();
        qpow(&q(k as i64), 2 * g as i64 - 2) * p.coeff(2 * g as i64)
    }

    #[test]
    fn linear_hodge_small() {
        let h = |g: usize, k: Vec<usize>| both(|p| extract_hodge_linear(g, &k, p).unwrap().value);
        assert_eq!(h(1, vec![1]), q(0));
        assert_eq!(h(1, vec![2]), qr(1, 24));
        assert_eq!(h(0, vec![1, 1, 1]), q(1));
        assert_eq!(h(0, vec![1, 2, 2]), q(1));
        assert_eq!(h(0, vec![1, 2, 1, 1]), q(5));
        // (k1^2 + k1 k2 + k2^2 - k1 - k2) / 24
        assert_eq!(h(1, vec![1, 2]), qr(1, 6));
        assert_eq!(h(1, vec![2, 3]), qr(7, 12));
    }

    #[test]
    fn linear_hodge_one_part() {
        for (g, k) in [(1, 3), (2, 1), (2, 2), (2, 3)] {
            assert_eq!(both(|p| extract_hodge_linear(g, &[k], p).unwrap().value), one_part(g, k), "g={g} k={k}");
        }
    }

    /// Degree-one part over the moduli of elliptic curves with `c1` the `lambda_1` coefficient.
    fn triple_genus_one(f: &Q, k: &[usize]) -> Q {
        let c1 = -(q(1) + f.recip() - (f + q(1)).recip());
        let ks: Q = k.iter().map(|&x| q(x as i64)).sum();
        let quad: Q = match k {
            [a] => q(*a as i64),
            [a, b] => {
                let (a, b) = (q(*a as i64), q(*b as i64));
                &a * &a + &a * &b + &b * &b
            }
            _ => unreachable!(),
        };
        if k.len() == 1 {
            (c1 + quad) / q(24)
        } else {
            (quad + c1 * ks) / q(24)
        }
    }

    #[test]
    fn triple_hodge_against_lambda_expansion() {
        for f in [q(1), q(2), q(3), qr(1, 2)] {
            for k in [vec![2usize], vec![2, 2], vec![2, 4]] {
                let want = triple_genus_one(&f, &k);
                assert_eq!(both(|p| extract_triple_hodge(&f, 1, &k, p).unwrap().value), want, "f={f} k={k:?}");
            }
        }
        let o = |f: i64, k: &[usize]| both(|p| extract_triple_hodge(&q(f), 1, k, p).unwrap().value);
        assert_eq!(o(1, &[1]), qr(-1, 48));
        assert_eq!(o(2, &[1]), qr(-1, 144));
        assert_eq!(o(1, &[1, 1]), q(0));
        assert_eq!(o(2, &[1, 1]), qr(1, 36));
    }

    #[test]
    fn triple_hodge_genus_zero() {
        for f in [q(1), q(2)] {
            for k in [vec![1usize, 1, 1], vec![1, 1, 1, 1], vec![1, 2, 1, 1]] {
                let s: i64 = k.iter().map(|&x| x as i64).sum();
                let want = qpow(&q(s), k.len() as i64 - 3);
                assert_eq!(both(|p| extract_triple_hodge(&f, 0, &k, p).unwrap().value), want);
            }
        }
    }

    #[test]
    fn triple_hodge_preconditions() {
        assert!(extract_triple_hodge(&qr(1, 2), 1, &[1], Pipeline::Tr).is_err());
        assert!(extract_triple_hodge(&q(1), 1, &[0], Pipeline::Xy).is_err());
        let r = extract_triple_hodge(&q(0), 1, &[1], Pipeline::Xy).unwrap();
        assert_eq!(r.flag, Some(Flag::RawResidue));
    }
}
