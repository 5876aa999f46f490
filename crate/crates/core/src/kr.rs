//! The analytic side: correction coefficients `c^{n,i}_ε`, the derived density
//! `∂Den(L)`, and its primitive parts `∂Den(L)^{(n₁)}`.

use std::collections::HashMap;
use std::sync::Mutex;

use num::traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::density::closed::isotropic_product;
use crate::density::{alpha_poly_with, AlphaOptions, DensityError, DensityPoly, Engine};
use crate::lattice::{self, h_n_i, superlattices, unimodular, Gram, LatticeError, Matrix};
use crate::local_ring::{q_int, RingConfig, Q};

#[derive(Debug, Error)]
pub enum KrError {
    #[error("rank {0} is not supported here")]
    Rank(usize),
    #[error("sign {0} is not ±1")]
    Sign(i8),
    #[error("split n1 = {n1} is not within rank {n}")]
    Split { n1: usize, n: usize },
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Anything that produces `α(M, L, X)`.
pub trait DensitySource {
    fn cfg(&self) -> &RingConfig;
    fn alpha(&self, m: &Gram, l: &Gram) -> Result<DensityPoly, DensityError>;
}

impl DensitySource for Engine {
    fn cfg(&self) -> &RingConfig {
        Engine::cfg(self)
    }

    fn alpha(&self, m: &Gram, l: &Gram) -> Result<DensityPoly, DensityError> {
        Engine::alpha(self, m, l)
    }
}

/// Densities interpolated from representation counts.
pub struct Counting {
    pub cfg: RingConfig,
    pub opts: AlphaOptions,
}

impl DensitySource for Counting {
    fn cfg(&self) -> &RingConfig {
        &self.cfg
    }

    fn alpha(&self, m: &Gram, l: &Gram) -> Result<DensityPoly, DensityError> {
        alpha_poly_with(&self.cfg, m, l, self.opts)
    }
}

fn ser_vec<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn ser_mat<S: Serializer>(m: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

/// `A C = -2B` for one `(n, ε, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoefficientTable {
    pub n: usize,
    pub eps: i8,
    pub q: u64,
    pub r: usize,
    #[serde(serialize_with = "ser_mat")]
    pub a: Vec<Vec<Q>>,
    #[serde(serialize_with = "ser_vec")]
    pub b: Vec<Q>,
    #[serde(serialize_with = "ser_vec")]
    pub c: Vec<Q>,
}

impl CoefficientTable {
    /// `A·C + 2B`, componentwise.
    pub fn residual(&self) -> Vec<Q> {
        (0..self.r)
            .map(|i| {
                let ac: Q = (0..self.r).fold(Q::zero(), |s, j| s + &self.a[i][j] * &self.c[j]);
                ac + q_int(2) * &self.b[i]
            })
            .collect()
    }
}

/// Number of correction terms: `(n-1)/2` for odd `n`, `⌊(n+ε)/2⌋` for even `n`.
pub fn r_eps(n: usize, eps: i8) -> usize {
    if n % 2 == 1 {
        (n - 1) / 2
    } else if eps == 1 {
        n / 2
    } else {
        (n - 1) / 2
    }
}

fn check_sign(eps: i8) -> Result<(), KrError> {
    if eps == 1 || eps == -1 {
        Ok(())
    } else {
        Err(KrError::Sign(eps))
    }
}

fn qp(q: u64, k: i64) -> Q {
    crate::density::qpow(q, k)
}

/// `α(H^j, H^j) = ∏_{0<s≤j} (1 - q^{-2s})`.
pub fn alpha_hj_hj(q: u64, j: usize) -> Q {
    (1..=j as i64).fold(Q::one(), |acc, s| acc * (Q::one() - qp(q, -2 * s)))
}

/// `A^{(j,j)} = α(H^{n,j}_ε, H^{n,j}_ε)`; a zero-dimensional unimodular part contributes 1.
pub fn a_diagonal(q: u64, n: usize, j: usize, eps: i8) -> Q {
    let m = (n - 2 * j) as i64;
    if m == 0 {
        return alpha_hj_hj(q, j);
    }
    let mut out = q_int(2) * qp(q, m * (m - 1) / 2) * alpha_hj_hj(q, j);
    for s in 1..=(m - 1) / 2 {
        out *= Q::one() - qp(q, -2 * s);
    }
    if n % 2 == 0 {
        out *= Q::one() - q_int(eps as i64) * qp(q, -m / 2);
    }
    out
}

/// Witt index of the residue space of `I(n - 2i, ε)` as used by the off-diagonal entries.
fn witt_index(n: usize, i: usize, eps: i8) -> i64 {
    let m = (n - 2 * i) as i64;
    if n % 2 == 1 {
        (m - 1) / 2
    } else {
        (m - 1 + eps as i64) / 2
    }
}

/// The upper-triangular matrix `A`, `A^{(i,j)} = α(H^{n,j}_ε, H^{n,i}_ε)` (1-based `i ≤ j`).
pub fn a_matrix(q: u64, n: usize, eps: i8) -> Vec<Vec<Q>> {
    let r = r_eps(n, eps);
    let mut a = vec![vec![Q::zero(); r]; r];
    for j in 1..=r {
        let diag = a_diagonal(q, n, j, eps);
        for i in 1..=j {
            let m = (n - 2 * i) as i64;
            let ratio = isotropic_product(q, m, witt_index(n, i, eps), (j - i) as i64);
            a[i - 1][j - 1] = &diag * ratio;
        }
    }
    a
}

/// Solves the upper-triangular system `a·x = rhs`.
pub fn back_substitute(a: &[Vec<Q>], rhs: &[Q]) -> Vec<Q> {
    let r = rhs.len();
    let mut x = vec![Q::zero(); r];
    for i in (0..r).rev() {
        let tail: Q = ((i + 1)..r).fold(Q::zero(), |s, j| s + &a[i][j] * &x[j]);
        x[i] = (&rhs[i] - tail) / &a[i][i];
    }
    x
}

/// `A` from the closed product formulas and `B_j = α'(I(n, -ε), H^{n,j}_ε)` from `src`.
pub fn build_system<S: DensitySource + ?Sized>(src: &S, n: usize, eps: i8) -> Result<(Vec<Vec<Q>>, Vec<Q>), KrError> {
    check_sign(eps)?;
    if n == 0 {
        return Err(KrError::Rank(0));
    }
    let cfg = src.cfg();
    let r = r_eps(n, eps);
    let s = unimodular(cfg, n, -eps)?;
    let mut b = Vec::with_capacity(r);
    for j in 1..=r {
        let h = h_n_i(cfg, n, j, eps)?;
        b.push(src.alpha(&s, &h)?.derivative_prime());
    }
    Ok((a_matrix(cfg.q(), n, eps), b))
}

pub fn coeffs<S: DensitySource + ?Sized>(src: &S, n: usize, eps: i8) -> Result<CoefficientTable, KrError> {
    let (a, b) = build_system(src, n, eps)?;
    let rhs: Vec<Q> = b.iter().map(|x| q_int(-2) * x).collect();
    let c = back_substitute(&a, &rhs);
    Ok(CoefficientTable { n, eps, q: src.cfg().q(), r: c.len(), a, b, c })
}

/// Embeds coordinates of `L₁' ⊂ L₁ ⊗ F` into coordinates of `L₁' ⊕ L₂`.
fn extend_coords(c1: &Matrix, n: usize) -> Matrix {
    let n1 = c1.rows;
    Matrix::block_diag(&[c1.clone(), Matrix::identity(n - n1, c1.pi0)], c1.pi0)
}

/// Derived densities over one density source, caching coefficient tables and normalizers.
pub struct Analytic<S: DensitySource> {
    src: S,
    tables: Mutex<HashMap<(usize, i8), (CoefficientTable, Q)>>,
}

impl<S: DensitySource> Analytic<S> {
    pub fn new(src: S) -> Self {
        Analytic { src, tables: Mutex::new(HashMap::new()) }
    }

    pub fn source(&self) -> &S {
        &self.src
    }

    pub fn cfg(&self) -> &RingConfig {
        self.src.cfg()
    }

    /// The coefficient table and `α(I(n, -ε), I(n, -ε))`.
    fn table(&self, n: usize, eps: i8) -> Result<(CoefficientTable, Q), KrError> {
        if let Some(t) = self.tables.lock().unwrap().get(&(n, eps)) {
            return Ok(t.clone());
        }
        let table = coeffs(&self.src, n, eps)?;
        let s = unimodular(self.cfg(), n, -eps)?;
        let norm = self.src.alpha(&s, &s)?.eval(&Q::one());
        let entry = (table, norm);
        self.tables.lock().unwrap().insert((n, eps), entry.clone());
        Ok(entry)
    }

    pub fn coeffs(&self, n: usize, eps: i8) -> Result<CoefficientTable, KrError> {
        Ok(self.table(n, eps)?.0)
    }

    /// `∂Den(L) = [2α'(I(n,-ε), L) + Σ_i c^{n,i}_ε α(H^{n,i}_ε, L)] / α(I(n,-ε), I(n,-ε))`, `ε = χ(L)`.
    pub fn pden(&self, l: &Gram) -> Result<Q, KrError> {
        let cfg = self.cfg();
        let n = l.rank();
        if n == 0 {
            return Err(KrError::Rank(0));
        }
        let eps = lattice::sign(cfg, l);
        let (table, norm) = self.table(n, eps)?;
        let s = unimodular(cfg, n, -eps)?;
        let mut num = q_int(2) * self.src.alpha(&s, l)?.derivative_prime();
        for (i, c) in table.c.iter().enumerate() {
            let h = h_n_i(cfg, n, i + 1, eps)?;
            num += c * self.src.alpha(&h, l)?.eval(&Q::one());
        }
        Ok(num / norm)
    }

    /// `∂Den(L)^{(n₁)}`, `L₁` spanned by the first `n1` basis vectors of `l`.
    pub fn pden_prim(&self, l: &Gram, n1: usize) -> Result<Q, KrError> {
        let cfg = self.cfg();
        let n = l.rank();
        if n1 == 0 || n1 > n {
            return Err(KrError::Split { n1, n });
        }
        let idx: Vec<usize> = (0..n1).collect();
        let l1 = l.sub(&idx);
        let mut out = self.pden(l)?;
        for i in 1..=n1 {
            let ii = i as i64;
            let mut w = qp(cfg.q(), ii * (ii - 1) / 2);
            if i % 2 == 0 {
                w = -w;
            }
            for s in superlattices(cfg, &l1, i) {
                let g = l.transform(&extend_coords(&s.coords, n));
                out -= &w * self.pden(&g)?;
            }
        }
        Ok(out)
    }

    /// `Σ_{L₁ ⊆ L₁'} ∂Den(L₁' ⊕ L₂)^{(n₁)}` over integral `L₁' ⊕ L₂`.
    pub fn prim_decomposition(&self, l: &Gram, n1: usize) -> Result<Q, KrError> {
        let cfg = self.cfg();
        let supers = lattice::integral_partial_superlattices(cfg, l, n1, lattice::DEFAULT_LATTICE_BUDGET)?;
        let mut out = Q::zero();
        for s in supers {
            out += self.pden_prim(&s.gram, n1)?;
        }
        Ok(out)
    }
}

impl Analytic<Engine> {
    pub fn with_engine(cfg: &RingConfig) -> Self {
        Analytic::new(Engine::new(cfg))
    }
}

/// Brute-force count of `k`-dimensional isotropic subspaces in the residue space of `I(m, ε)`.
pub fn residue_isotropic_count(cfg: &RingConfig, m: usize, eps: i8, k: usize) -> Result<u64, KrError> {
    let g = unimodular(cfg, m, eps)?;
    let rows: Vec<Vec<u64>> =
        (0..m).map(|i| (0..m).map(|j| cfg.residue(&g.entry(i, j).a)).collect()).collect();
    Ok(crate::ff::count_isotropic_subspaces(&rows, k, cfg.p))
}
