//! Hermite normal form for `O_F`-lattices in `F^n`. `O_F` is a discrete valuation
//! ring with uniformizer `π`, so a lattice has a unique upper-triangular basis with
//! pivots `π^k` and entries above each pivot reduced to `π`-adic digits in `0..p`.

use super::matrix::Matrix;
use crate::local_ring::{Ext, RingConfig, Q};

/// Hashable, totally ordered fingerprint of a lattice.
pub type LatticeKey = Vec<(Q, Q)>;

/// Canonical `r` with `x - r ∈ π^k O_F`, written with digits `0..p` from `π^{v(x)}` upward.
pub fn reduce_mod_pi_pow(cfg: &RingConfig, x: &Ext, k: i64) -> Ext {
    let Some(v) = cfg.val_pi(x) else { return cfg.zero() };
    if v >= k {
        return cfg.zero();
    }
    let mut y = x * &cfg.pi_pow(-v);
    let mut rep = cfg.zero();
    let inv_pi = cfg.pi_pow(-1);
    for i in 0..(k - v) {
        let d = cfg.residue(&y.a);
        let dq = cfg.int(d as i64);
        if d != 0 {
            rep = rep + &dq * &cfg.pi_pow(v + i);
        }
        y = &(&y - &dq) * &inv_pi;
    }
    rep
}

/// Hermite form of the lattice spanned by the columns of `gens` (which must span `F^n`).
pub fn echelon(cfg: &RingConfig, gens: &Matrix) -> Option<Matrix> {
    let n = gens.rows;
    let mut pool: Vec<Vec<Ext>> = gens.cols_vec().into_iter().filter(|c| c.iter().any(|x| !x.is_zero())).collect();
    let mut basis: Vec<Vec<Ext>> = vec![Vec::new(); n];
    let mut exps = vec![0i64; n];
    for r in (0..n).rev() {
        let (idx, k) = pool
            .iter()
            .enumerate()
            .filter_map(|(i, c)| cfg.val_pi(&c[r]).map(|v| (i, v)))
            .min_by_key(|&(_, v)| v)?;
        let mut piv = pool.swap_remove(idx);
        let pk = cfg.pi_pow(k);
        let u = &pk / &piv[r];
        for x in piv.iter_mut() {
            *x = &*x * &u;
        }
        let inv_pk = cfg.pi_pow(-k);
        for c in pool.iter_mut() {
            if c[r].is_zero() {
                continue;
            }
            let f = &c[r] * &inv_pk;
            for (ci, pi) in c.iter_mut().zip(piv.iter()) {
                *ci = &*ci - &(&f * pi);
            }
        }
        pool.retain(|c| c.iter().any(|x| !x.is_zero()));
        basis[r] = piv;
        exps[r] = k;
    }
    for r in (0..n).rev() {
        let inv_pk = cfg.pi_pow(-exps[r]);
        for s in (r + 1)..n {
            let x = basis[s][r].clone();
            if x.is_zero() {
                continue;
            }
            let rep = reduce_mod_pi_pow(cfg, &x, exps[r]);
            let f = &(&x - &rep) * &inv_pk;
            if f.is_zero() {
                continue;
            }
            let col_r = basis[r].clone();
            for (si, ri) in basis[s].iter_mut().zip(col_r.iter()) {
                *si = &*si - &(&f * ri);
            }
        }
    }
    Some(Matrix::from_cols(&basis, n, gens.pi0))
}

pub fn key_of(m: &Matrix) -> LatticeKey {
    m.entries().map(|x| (x.a.clone(), x.b.clone())).collect()
}

/// Coordinates of `x` in the basis `b` are all integral.
pub fn contains(cfg: &RingConfig, b: &Matrix, x: &[Ext]) -> bool {
    match b.solve(x) {
        Some(c) => c.iter().all(|e| cfg.val_pi(e).map_or(true, |v| v >= 0)),
        None => false,
    }
}

/// Every column of `sub` lies in the lattice with basis `b`.
pub fn contains_lattice(cfg: &RingConfig, b: &Matrix, sub: &Matrix) -> bool {
    let Some(inv) = b.inverse() else { return false };
    let coords = inv.mul(sub);
    is_integral_matrix(cfg, &coords)
}

pub fn is_integral_matrix(cfg: &RingConfig, m: &Matrix) -> bool {
    m.entries().all(|e| e.is_zero() || cfg.val_pi(e).unwrap() >= 0)
}

/// Minimum `π`-adic valuation of the entries (`None` for the zero matrix).
pub fn min_val(cfg: &RingConfig, m: &Matrix) -> Option<i64> {
    m.entries().filter_map(|e| cfg.val_pi(e)).min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_ring::{q_int, Twist};

    #[test]
    fn digit_reduction() {
        let cfg = RingConfig::new(3, Twist::One).unwrap();
        let x = cfg.int(7) + cfg.pi();
        // 7 + π ≡ 1 + π mod π², digits (1, 1)
        assert_eq!(reduce_mod_pi_pow(&cfg, &x, 2), cfg.int(1) + cfg.pi());
        assert_eq!(reduce_mod_pi_pow(&cfg, &x, 1), cfg.int(1));
        let y = cfg.pi_pow(-1) * cfg.int(2);
        assert_eq!(reduce_mod_pi_pow(&cfg, &y, 0), y);
        assert_eq!(reduce_mod_pi_pow(&cfg, &cfg.embed(q_int(9)), 3), cfg.zero());
    }

    #[test]
    fn echelon_is_canonical() {
        let cfg = RingConfig::new(3, Twist::One).unwrap();
        let pi = cfg.pi();
        let a = Matrix::from_rows(
            vec![vec![cfg.int(1), pi.clone()], vec![cfg.int(0), cfg.int(3)]],
            cfg.pi0_int(),
        );
        let b = Matrix::from_rows(
            vec![vec![cfg.int(2), &pi + &cfg.int(5)], vec![cfg.int(3), cfg.int(12)]],
            cfg.pi0_int(),
        );
        let ea = echelon(&cfg, &a).unwrap();
        let eb = echelon(&cfg, &b).unwrap();
        assert_eq!(key_of(&ea) == key_of(&eb), contains_lattice(&cfg, &a, &b) && contains_lattice(&cfg, &b, &a));
        let c = a.hcat(&b);
        let ec = echelon(&cfg, &c).unwrap();
        assert!(contains_lattice(&cfg, &ec, &a));
        assert!(contains_lattice(&cfg, &ec, &b));
    }
}
