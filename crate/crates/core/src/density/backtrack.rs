//! Reference enumerator: plain backtracking over tuples, for any `M` in `Herm^∨`.

use num::bigint::{BigInt, BigUint};
use num::traits::{ToPrimitive, Zero};

use super::oracle::RepCount;
use super::poly::qpow;
use super::DensityError;
use crate::lattice::Gram;
use crate::local_ring::{residue_mod, RingConfig, Q};

/// Integer data of a Gram matrix modulo `p^d`: diagonal entries and `π·G_ij` as pairs.
struct Reduced {
    m: u64,
    pi0: u64,
    diag: Vec<u64>,
    off: Vec<Vec<(u64, u64)>>,
}

fn reduce(cfg: &RingConfig, g: &Gram, m: u64) -> Result<Reduced, DensityError> {
    let n = g.rank();
    let mb = BigInt::from(m);
    let r = |x: &Q| residue_mod(x, &mb).to_u64().unwrap();
    let mut diag = vec![0; n];
    let mut off = vec![vec![(0, 0); n]; n];
    for i in 0..n {
        let d = &g.entry(i, i).a;
        if !d.is_zero() && cfg.vp(d).unwrap() < 0 {
            return Err(DensityError::Hypothesis("Gram not in Herm^∨".into()));
        }
        diag[i] = r(d);
        for j in 0..n {
            if i != j {
                let h = &cfg.pi() * g.entry(i, j);
                if !h.is_integral(cfg.p) {
                    return Err(DensityError::Hypothesis("Gram not in Herm^∨".into()));
                }
                off[i][j] = (r(&h.a), r(&h.b));
            }
        }
    }
    Ok(Reduced { m, pi0: (cfg.pi0_int() as u64) % m, diag, off })
}

impl Reduced {
    fn mul(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let m = self.m;
        ((x.0 * y.0 + self.pi0 * (x.1 * y.1 % m)) % m, (x.0 * y.1 + x.1 * y.0) % m)
    }

    fn conj(&self, x: (u64, u64)) -> (u64, u64) {
        (x.0, (self.m - x.1) % self.m)
    }

    /// `((x,x) mod p^d, π·(x,y) mod π^{2d})` style moments for a pair of vectors.
    fn diag_moment(&self, x: &[(u64, u64)]) -> u64 {
        let m = self.m;
        let k = x.len();
        let mut s = 0;
        for i in 0..k {
            s += self.diag[i] * self.mul(self.conj(x[i]), x[i]).0 % m;
            for j in (i + 1)..k {
                // tr(x̄_i G_ij x_j) = 2t where x̄_i (π G_ij) x_j = s + tπ
                let z = self.mul(self.mul(self.conj(x[i]), self.off[i][j]), x[j]);
                s += 2 * z.1;
            }
        }
        s % m
    }

    /// `π·(x, y)` reduced mod `π^{2d}`.
    fn off_moment(&self, x: &[(u64, u64)], y: &[(u64, u64)]) -> (u64, u64) {
        let m = self.m;
        let k = x.len();
        let pi = (0, 1);
        let mut acc = (0, 0);
        for i in 0..k {
            for j in 0..k {
                let g = if i == j { self.mul(pi, (self.diag[i], 0)) } else { self.off[i][j] };
                let z = self.mul(self.mul(self.conj(x[i]), g), y[j]);
                acc = ((acc.0 + z.0) % m, (acc.1 + z.1) % m);
            }
        }
        acc
    }
}

/// `|I(M, L, d)|` by backtracking over `x_1, …, x_n`, checking each new vector
/// against the target as soon as it is placed.
pub fn count_reps_backtrack(
    cfg: &RingConfig,
    m: &Gram,
    l: &Gram,
    d: u32,
    budget: u64,
) -> Result<RepCount, DensityError> {
    if d == 0 {
        return Err(DensityError::BadLevel);
    }
    let n = l.rank();
    let rank_m = m.rank();
    let modulus = cfg.p.pow(d);
    let normalize = |raw: BigUint| {
        let normalized =
            Q::from_integer(BigInt::from(raw.clone())) * qpow(cfg.q(), -(d as i64) * n as i64 * (2 * rank_m as i64 - n as i64));
        RepCount { d, raw, normalized }
    };
    let mr = reduce(cfg, m, modulus)?;
    let lr = match reduce(cfg, l, modulus) {
        Ok(r) => r,
        Err(_) => return Ok(normalize(BigUint::zero())),
    };
    let elems = (modulus * modulus) as usize;
    let nvec = (elems as u64).checked_pow(rank_m as u32).unwrap_or(u64::MAX);
    let est = nvec.saturating_mul(n as u64);
    if est > budget {
        return Err(DensityError::Budget { needed: est, budget });
    }
    let vectors: Vec<Vec<(u64, u64)>> = (0..nvec)
        .map(|mut c| {
            (0..rank_m)
                .map(|_| {
                    let e = c % elems as u64;
                    c /= elems as u64;
                    (e / modulus, e % modulus)
                })
                .collect()
        })
        .collect();
    // vectors matching each diagonal target, computed once
    let by_diag: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..vectors.len()).filter(|&v| mr.diag_moment(&vectors[v]) == lr.diag[i]).collect())
        .collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut count = BigUint::zero();
    fn go(
        j: usize,
        chosen: &mut Vec<usize>,
        vectors: &[Vec<(u64, u64)>],
        by_diag: &[Vec<usize>],
        mr: &Reduced,
        lr: &Reduced,
        count: &mut BigUint,
    ) {
        if j == by_diag.len() {
            *count += 1u32;
            return;
        }
        for &v in &by_diag[j] {
            let ok = chosen.iter().enumerate().all(|(i, &u)| mr.off_moment(&vectors[u], &vectors[v]) == lr.off[i][j]);
            if ok {
                chosen.push(v);
                go(j + 1, chosen, vectors, by_diag, mr, lr, count);
                chosen.pop();
            }
        }
    }
    go(0, &mut chosen, &vectors, &by_diag, &mr, &lr, &mut count);
    Ok(normalize(count))
}
