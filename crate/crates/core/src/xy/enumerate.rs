//! Exhaustive enumeration of the combinatorial objects in the duality sums.

use crate::error::{Error, Result};

pub const MAX_N: usize = 6;

fn check(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > MAX_N {
        return Err(Error::EnumerationLimit(n));
    }
    Ok(())
}

/// Edges `(i, j)` with `i < j` on `n` labelled vertices.
fn all_edges(n: usize) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            e.push((i, j));
        }
    }
    e
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for &(a, b) in edges {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        parent[ra] = rb;
    }
    let r0 = find(&mut parent, 0);
    (1..n).all(|v| find(&mut parent, v) == r0)
}

/// Connected simple graphs on `n` labelled vertices, as edge lists.
pub fn connected_graphs(n: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    check(n)?;
    let edges = all_edges(n);
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << edges.len()) {
        let chosen: Vec<(usize, usize)> =
            edges.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, e)| *e).collect();
        if connected(n, &chosen) {
            out.push(chosen);
        }
    }
    Ok(out)
}

/// Cyclic permutations of `0..n` as successor maps.
pub fn n_cycles(n: usize) -> Result<Vec<Vec<usize>>> {
    check(n)?;
    let mut out = Vec::new();
    let mut rest: Vec<usize> = (1..n).collect();
    permute(&mut rest, 0, &mut |order| {
        let mut succ = vec![0; n];
        let mut prev = 0;
        for &v in order {
            succ[prev] = v;
            prev = v;
        }
        succ[prev] = 0;
        out.push(succ);
    });
    out.sort();
    Ok(out)
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Set partitions of `0..n`, blocks sorted.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn rec(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, n, blocks, out);
        blocks.pop();
    }
    rec(0, n, &mut blocks, &mut out);
    out
}

/// Bicoloured graph: the neighbourhoods of its black vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BicolouredGraph {
    pub n: usize,
    /// Each entry is a black vertex: a set of at least two white labels, or `[j, j]`.
    pub edges: Vec<Vec<usize>>,
    pub automorphisms: u64,
}

/// Bicoloured graphs with at most `max_black` black vertices.
pub fn bicoloured(n: usize, max_black: usize) -> Result<Vec<BicolouredGraph>> {
    check(n)?;
    let mut kinds: Vec<Vec<usize>> = Vec::new();
    for j in 0..n {
        kinds.push(vec![j, j]);
    }
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() >= 2 {
            kinds.push((0..n).filter(|b| mask & (1 << b) != 0).collect());
        }
    }
    let mut out = Vec::new();
    let mut mult = vec![0usize; kinds.len()];
    fn rec(
        k: usize,
        left: usize,
        n: usize,
        kinds: &[Vec<usize>],
        mult: &mut Vec<usize>,
        out: &mut Vec<BicolouredGraph>,
    ) {
        if k == kinds.len() {
            let mut edges = Vec::new();
            let mut aut: u64 = 1;
            let mut pairs = Vec::new();
            for (kind, &m) in kinds.iter().zip(mult.iter()) {
                for _ in 0..m {
                    edges.push(kind.clone());
                }
                aut *= (1..=m as u64).product::<u64>();
                if kind.len() == 2 && kind[0] == kind[1] {
                    aut *= 1u64 << m;
                } else if m > 0 {
                    for w in kind.windows(2) {
                        pairs.push((w[0], w[1]));
                    }
                }
            }
            if n == 1 || connected(n, &pairs) {
                out.push(BicolouredGraph { n, edges, automorphisms: aut });
            }
            return;
        }
        for m in 0..=left {
            mult[k] = m;
            rec(k + 1, left - m, n, kinds, mult, out);
        }
        mult[k] = 0;
    }
    rec(0, max_black, n, &kinds, &mut mult, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connected_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| connected_graphs(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 38, 728]);
    }

    #[test]
    fn cycle_counts() {
        assert_eq!(n_cycles(3).unwrap().len(), 2);
        assert_eq!(n_cycles(4).unwrap().len(), 6);
        assert_eq!(n_cycles(1).unwrap(), vec![vec![0]]);
        for c in n_cycles(4).unwrap() {
            let mut v = 0;
            for _ in 0..4 {
                v = c[v];
            }
            assert_eq!(v, 0);
            let mut seen = vec![false; 4];
            let mut w = 0;
            for _ in 0..4 {
                seen[w] = true;
                w = c[w];
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn bell_numbers() {
        let b: Vec<usize> = (0..=5).map(|n| set_partitions(n).len()).collect();
        assert_eq!(b, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn limits() {
        assert_eq!(connected_graphs(7).unwrap_err(), Error::EnumerationLimit(7));
    }

    #[test]
    fn bicoloured_small() {
        let g = bicoloured(2, 2).unwrap();
        let with_pair = g.iter().filter(|x| x.edges.contains(&vec![0, 1])).count();
        assert!(with_pair > 0);
        assert!(g.iter().all(|x| x.edges.iter().any(|e| e == &vec![0, 1])));
        let double = g.iter().find(|x| x.edges == vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(double.automorphisms, 2);
    }
}
