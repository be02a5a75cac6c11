//! Connected parts by Möbius inversion on the partition lattice.

use super::enumerate::set_partitions;
use crate::arith::{factorial_q, q, Q};
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::ops::{Add, Mul};

/// Values indexed by nonempty subsets of `0..n` (sorted label lists).
pub type SubsetFamily<T> = BTreeMap<Vec<usize>, T>;

/// Inverts `W°(I) = sum_{partitions of I} prod W(block)` for `I = 0..n`.
pub fn connected_part<T>(n: usize, disconnected: &SubsetFamily<T>, scale: impl Fn(&T, &Q) -> T) -> Result<T>
where
    T: Clone + for<'a> Add<&'a T, Output = T> + for<'a> Mul<&'a T, Output = T>,
{
    let mut total: Option<T> = None;
    for p in set_partitions(n) {
        let k = p.len();
        let mu = if k % 2 == 1 { factorial_q(k - 1) } else { -factorial_q(k - 1) };
        let mut prod: Option<T> = None;
        for block in &p {
            let v = disconnected
                .get(block)
                .ok_or_else(|| Error::MissingData(format!("no value for subset {block:?}")))?;
            prod = Some(match prod {
                None => v.clone(),
                Some(acc) => acc * v,
            });
        }
        let term = scale(&prod.expect("nonempty partition"), &mu);
        total = Some(match total {
            None => term,
            Some(acc) => acc + &term,
        });
    }
    total.ok_or_else(|| Error::InvalidArgument("n must be at least 1".into()))
}

/// Rational specialization.
pub fn connected_part_q(n: usize, disconnected: &SubsetFamily<Q>) -> Result<Q> {
    connected_part(n, disconnected, |v, c| v * c)
}

/// Determinant by cofactor expansion (small matrices only).
pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    if n == 0 {
        return q(1);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = q(0);
    for c in 0..n {
        let minor: Vec<Vec<Q>> = m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, v)| v.clone()).collect()).collect();
        let term = &m[0][c] * det(&minor);
        if c % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Product side of the Cauchy determinant identity.
pub fn cauchy_product(a: &[Q], b: &[Q]) -> Q {
    let n = a.len();
    let mut v = q(1);
    for i in 0..n {
        v /= &a[i] + &b[i];
        for j in i + 1..n {
            v *= (&a[i] - &a[j]) * (&b[i] - &b[j]);
            v /= (&a[i] + &b[j]) * (&a[j] + &b[i]);
        }
    }
    v
}

pub fn cauchy_matrix(a: &[Q], b: &[Q]) -> Vec<Vec<Q>> {
    a.iter().map(|ai| b.iter().map(|bj| (ai + bj).recip()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    fn family(n: usize, f: impl Fn(&[usize]) -> Q) -> SubsetFamily<Q> {
        let mut m = BTreeMap::new();
        for mask in 1u32..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|b| mask & (1 << b) != 0).collect();
            let v = f(&s);
            m.insert(s, v);
        }
        m
    }

    #[test]
    fn small_cases() {
        let f1 = family(1, |_| qr(3, 2));
        assert_eq!(connected_part_q(1, &f1).unwrap(), qr(3, 2));
        let f2 = family(2, |s| if s.len() == 1 { q(2) } else { q(7) });
        assert_eq!(connected_part_q(2, &f2).unwrap(), q(7 - 4));
    }

    #[test]
    fn three_point_oracle() {
        let f = family(3, |s| match s.len() {
            1 => q(1),
            2 => q(2),
            _ => q(10),
        });
        // Connected pair part is 2 - 1 = 1; W3° = W3 + 3 W2 W1 + W1^3.
        assert_eq!(connected_part_q(3, &f).unwrap(), q(10 - 3 - 1));
    }

    #[test]
    fn missing_subset() {
        let mut f = family(2, |_| q(1));
        f.remove(&vec![0, 1]);
        assert!(matches!(connected_part_q(2, &f), Err(Error::MissingData(_))));
    }

    #[test]
    fn cauchy_example() {
        let a = [q(1), q(2)];
        let b = [q(3), q(5)];
        assert_eq!(det(&cauchy_matrix(&a, &b)), qr(1, 420));
        assert_eq!(cauchy_product(&a, &b), qr(1, 420));
    }
}
