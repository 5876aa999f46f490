//! Small-dimensional linear algebra over the prime field `F_p`.

use num::bigint::BigInt;
use num::traits::{One, Zero};

/// Gaussian binomial `[n choose k]_q`.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let q = BigInt::from(q);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= num::pow(q.clone(), (n - i) as usize) - 1;
        den *= num::pow(q.clone(), (i + 1) as usize) - 1;
    }
    num / den
}

/// All `k`-dimensional subspaces of `F_p^n`, each given by its reduced row echelon basis.
pub fn subspaces(n: usize, k: usize, p: u64) -> Vec<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    for pivots in combinations(n, k) {
        // free positions: (row r, column c) with c > pivot[r] and c not a pivot
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                let pv = pivots.clone();
                ((pivots[r] + 1)..n).filter(move |c| !pv.contains(c)).map(move |c| (r, c))
            })
            .collect();
        let total = (p as u128).pow(free.len() as u32);
        for mut code in 0..total {
            let mut rows = vec![vec![0u64; n]; k];
            for (r, &c) in pivots.iter().enumerate() {
                rows[r][c] = 1;
            }
            for &(r, c) in &free {
                rows[r][c] = (code % p as u128) as u64;
                code /= p as u128;
            }
            out.push(rows);
        }
    }
    out
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Rank of a matrix over `F_p` (rows given as vectors).
pub fn rank(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = inv_mod(m[rank][c], p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for j in 0..cols {
                    m[r][j] = (m[r][j] + p * p - f * m[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Symmetric bilinear form `xᵀ G y` over `F_p`.
pub fn bilinear(g: &[Vec<u64>], x: &[u64], y: &[u64], p: u64) -> u64 {
    let mut s = 0;
    for i in 0..x.len() {
        for j in 0..y.len() {
            s = (s + x[i] * g[i][j] % p * y[j]) % p;
        }
    }
    s
}

/// Brute-force count of totally isotropic `k`-dimensional subspaces.
pub fn count_isotropic_subspaces(g: &[Vec<u64>], k: usize, p: u64) -> u64 {
    subspaces(g.len(), k, p)
        .into_iter()
        .filter(|basis| {
            basis.iter().all(|x| basis.iter().all(|y| bilinear(g, x, y, p) == 0))
        })
        .count() as u64
}

/// Brute-force count of isometric embeddings of `(F_p^n, L)` into `(F_p^m, M)`.
pub fn count_isometries(m: &[Vec<u64>], l: &[Vec<u64>], p: u64) -> u64 {
    let dim_m = m.len();
    let n = l.len();
    let vectors: Vec<Vec<u64>> = all_vectors(dim_m, p);
    let mut count = 0u64;
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    fn go(
        i: usize,
        m: &[Vec<u64>],
        l: &[Vec<u64>],
        p: u64,
        vectors: &[Vec<u64>],
        chosen: &mut Vec<usize>,
        count: &mut u64,
    ) {
        if i == l.len() {
            *count += 1;
            return;
        }
        for (idx, v) in vectors.iter().enumerate() {
            let ok = (0..i).all(|j| bilinear(m, &vectors[chosen[j]], v, p) == l[j][i] % p)
                && bilinear(m, v, v, p) == l[i][i] % p;
            if ok {
                chosen.push(idx);
                go(i + 1, m, l, p, vectors, chosen, count);
                chosen.pop();
            }
        }
    }
    go(0, m, l, p, &vectors, &mut chosen, &mut count);
    count
}

pub fn all_vectors(n: usize, p: u64) -> Vec<Vec<u64>> {
    let total = p.pow(n as u32);
    (0..total)
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let d = c % p;
                    c /= p;
                    d
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_counts_match_gaussian_binomials() {
        for p in [3u64, 5] {
            for n in 0..=4usize {
                for k in 0..=n {
                    let c = subspaces(n, k, p).len();
                    assert_eq!(BigInt::from(c), gaussian_binomial(n as u32, k as u32, p));
                }
            }
        }
    }

    #[test]
    fn isotropic_lines_in_three_space() {
        let g = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(count_isotropic_subspaces(&g, 1, 3), 4);
        assert_eq!(count_isotropic_subspaces(&g, 1, 5), 6);
    }

    #[test]
    fn orthogonal_group_of_three_space() {
        let g = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(count_isometries(&g, &g, 3), 48);
        assert_eq!(count_isometries(&[vec![1]], &[vec![1]], 3), 2);
    }

    #[test]
    fn rank_basic() {
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]], 3), 1);
        assert_eq!(rank(&[vec![1, 2], vec![2, 1]], 3), 1);
        assert_eq!(rank(&[vec![1, 2], vec![0, 1]], 3), 2);
    }
}
