//! Hermitian Gram matrices, standard lattices, Jordan splittings, invariants and
//! the superlattice enumerations used by the inclusion-exclusion formulas.
//!
//! Forms are `(x, y) = x̄ᵀ Φ y`, conjugate-linear in the first slot.

pub mod dsl;
pub mod hnf;
pub mod matrix;

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num::bigint::BigInt;
use num::traits::{One, Zero};
use serde::Serialize;

use crate::ff;
use crate::local_ring::{q_int, Ext, RingConfig, Q};
pub use hnf::LatticeKey;
pub use matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    NotHermitian,
    Degenerate,
    BadParameters(String),
    NotIntegral,
    Parse { token: String, message: String },
    Budget(usize),
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::NotHermitian => write!(f, "Gram matrix is not Hermitian"),
            LatticeError::Degenerate => write!(f, "Gram matrix is degenerate"),
            LatticeError::BadParameters(s) => write!(f, "invalid lattice parameters: {s}"),
            LatticeError::NotIntegral => write!(f, "lattice is not integral"),
            LatticeError::Parse { token, message } => write!(f, "parse error at `{token}`: {message}"),
            LatticeError::Budget(n) => write!(f, "enumeration budget of {n} lattices exceeded"),
        }
    }
}

impl std::error::Error for LatticeError {}

/// Hermitian Gram matrix of a lattice with respect to a chosen basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gram {
    pub m: Matrix,
}

impl Gram {
    pub fn new(m: Matrix) -> Result<Self, LatticeError> {
        if !m.is_hermitian() {
            return Err(LatticeError::NotHermitian);
        }
        if m.rows > 0 && m.det().is_zero() {
            return Err(LatticeError::Degenerate);
        }
        Ok(Gram { m })
    }

    pub fn empty(pi0: i64) -> Self {
        Gram { m: Matrix::zeros(0, 0, pi0) }
    }

    pub fn rank(&self) -> usize {
        self.m.rows
    }

    pub fn pi0(&self) -> i64 {
        self.m.pi0
    }

    pub fn entry(&self, i: usize, j: usize) -> &Ext {
        &self.m[(i, j)]
    }

    /// Determinant, an element of `F₀`.
    pub fn det(&self) -> Q {
        if self.rank() == 0 {
            return Q::one();
        }
        let d = self.m.det();
        debug_assert!(d.b.is_zero());
        d.a
    }

    pub fn orth_sum(&self, other: &Gram) -> Gram {
        Gram { m: Matrix::block_diag(&[self.m.clone(), other.m.clone()], self.pi0()) }
    }

    pub fn orth_sum_all(parts: &[Gram], pi0: i64) -> Gram {
        let ms: Vec<Matrix> = parts.iter().map(|g| g.m.clone()).collect();
        Gram { m: Matrix::block_diag(&ms, pi0) }
    }

    pub fn scale(&self, c: &Q) -> Gram {
        Gram { m: self.m.scale(&Ext::from_base(c.clone(), self.pi0())) }
    }

    /// Gram matrix of the lattice spanned by the columns of `c`.
    pub fn transform(&self, c: &Matrix) -> Gram {
        Gram { m: self.m.sesquilinear(c, c) }
    }

    pub fn sub(&self, idx: &[usize]) -> Gram {
        Gram { m: self.m.submatrix(idx, idx) }
    }

    pub fn is_integral(&self, cfg: &RingConfig) -> bool {
        hnf::is_integral_matrix(cfg, &self.m)
    }

    /// Every diagonal entry lies in `O_{F₀}` and every off-diagonal entry in `π^{-1}O_F`.
    pub fn in_herm_dual(&self, cfg: &RingConfig) -> bool {
        (0..self.rank()).all(|i| {
            (0..self.rank()).all(|j| {
                let v = cfg.val_pi(self.entry(i, j));
                match v {
                    None => true,
                    Some(v) if i == j => v >= 0,
                    Some(v) => v >= -1,
                }
            })
        })
    }
}

impl fmt::Display for Gram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.m)
    }
}

pub fn diag(cfg: &RingConfig, values: &[Q]) -> Gram {
    let mut m = Matrix::zeros(values.len(), values.len(), cfg.pi0_int());
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = cfg.embed(v.clone());
    }
    Gram { m }
}

/// `H_e = [[0, π^e], [(-π)^e, 0]]`.
pub fn hyperbolic(cfg: &RingConfig, e: i64) -> Gram {
    let mut m = Matrix::zeros(2, 2, cfg.pi0_int());
    let pe = cfg.pi_pow(e);
    m[(0, 1)] = pe.clone();
    m[(1, 0)] = pe.conj();
    Gram { m }
}

/// `H = H_{-1}`.
pub fn h_plane(cfg: &RingConfig) -> Gram {
    hyperbolic(cfg, -1)
}

/// Unimodular `I(n, ε) = Diag(1, …, 1, ν)` with sign `ε`.
pub fn unimodular(cfg: &RingConfig, n: usize, eps: i8) -> Result<Gram, LatticeError> {
    if n == 0 {
        return if eps == 1 {
            Ok(Gram::empty(cfg.pi0_int()))
        } else {
            Err(LatticeError::BadParameters("I(0, -1) does not exist".into()))
        };
    }
    let pre = if (n * (n - 1) / 2) % 2 == 0 { Q::one() } else { -Q::one() };
    let base = cfg.legendre(&pre);
    let nu = cfg.unit_with_chi(base * eps);
    let mut vals = vec![Q::one(); n];
    vals[n - 1] = nu;
    Ok(diag(cfg, &vals))
}

/// `H^{n,i}_ε = H^i ⊥ I(n - 2i, ε)`.
pub fn h_n_i(cfg: &RingConfig, n: usize, i: usize, eps: i8) -> Result<Gram, LatticeError> {
    if 2 * i > n {
        return Err(LatticeError::BadParameters(format!("H^({n},{i}) needs n >= 2i")));
    }
    let mut parts = vec![h_plane(cfg); i];
    parts.push(unimodular(cfg, n - 2 * i, eps)?);
    Ok(Gram::orth_sum_all(&parts, cfg.pi0_int()))
}

/// Named standard lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StdLattice {
    I { n: usize, eps: i8 },
    H,
    Hodd(i64),
    Hni { n: usize, i: usize, eps: i8 },
    /// `(unit, k)` pairs giving `unit·(-π₀)^k`.
    Diag(Vec<(Q, i64)>),
}

pub fn std_lattice(cfg: &RingConfig, kind: &StdLattice) -> Result<Gram, LatticeError> {
    match kind {
        StdLattice::I { n, eps } => unimodular(cfg, *n, *eps),
        StdLattice::H => Ok(h_plane(cfg)),
        StdLattice::Hodd(e) => {
            if e.rem_euclid(2) != 1 {
                return Err(LatticeError::BadParameters(format!("H_{e} needs an odd exponent")));
            }
            Ok(hyperbolic(cfg, *e))
        }
        StdLattice::Hni { n, i, eps } => h_n_i(cfg, *n, *i, *eps),
        StdLattice::Diag(entries) => {
            let vals: Vec<Q> = entries.iter().map(|(u, k)| u * cfg.neg_pi0_pow(*k)).collect();
            if vals.iter().any(|v| v.is_zero()) {
                return Err(LatticeError::Degenerate);
            }
            Ok(diag(cfg, &vals))
        }
    }
}

/// One orthogonal summand of a Jordan splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    /// `⟨value⟩` with `value = u·(-π₀)^{exp/2}`.
    Unary { value: Q, exp: i64 },
    /// A `π^exp`-modular plane, `exp` odd; isometric to `H_exp`.
    Binary { exp: i64, gram: Matrix },
}

impl Block {
    pub fn exp(&self) -> i64 {
        match self {
            Block::Unary { exp, .. } | Block::Binary { exp, .. } => *exp,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Block::Unary { .. } => 1,
            Block::Binary { .. } => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct JordanForm {
    pub blocks: Vec<Block>,
    /// Columns are the new basis in the old coordinates.
    pub basis: Matrix,
    /// `basisᴴ · G · basis`, block diagonal.
    pub gram: Matrix,
}

/// Isometry class data for one scale: rank and, for even scales, the class of the
/// product of the unit parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Component {
    pub exp: i64,
    pub rank: usize,
    pub det_chi: i8,
}

pub type JordanKey = Vec<Component>;

pub fn jordan_form(cfg: &RingConfig, g: &Gram) -> Result<JordanForm, LatticeError> {
    if !g.m.is_hermitian() {
        return Err(LatticeError::NotHermitian);
    }
    let n = g.rank();
    if n > 0 && g.m.det().is_zero() {
        return Err(LatticeError::Degenerate);
    }
    let pi0 = g.pi0();
    let mut vecs: Vec<Vec<Ext>> = Matrix::identity(n, pi0).cols_vec();
    let form = |x: &[Ext], y: &[Ext]| -> Ext {
        let gy = g.m.mul_vec(y);
        x.iter().zip(gy.iter()).fold(cfg.zero(), |acc, (a, b)| acc + &a.conj() * b)
    };
    let mut blocks: Vec<(Block, Vec<Vec<Ext>>)> = Vec::new();
    while !vecs.is_empty() {
        let k = vecs.len();
        let mut best: Option<(i64, usize, usize)> = None;
        for i in 0..k {
            for j in i..k {
                let v = cfg.val_pi(&form(&vecs[i], &vecs[j]));
                if let Some(v) = v {
                    // prefer diagonal entries on ties
                    let better = match best {
                        None => true,
                        Some((bv, bi, bj)) => v < bv || (v == bv && i == j && bi != bj),
                    };
                    if better {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, i, j) = best.ok_or(LatticeError::Degenerate)?;
        if i == j || v % 2 == 0 {
            let x = if i == j {
                vecs[i].clone()
            } else {
                vecs[i].iter().zip(vecs[j].iter()).map(|(a, b)| a + b).collect()
            };
            let xx = form(&x, &x);
            let drop = i;
            vecs[drop] = x.clone();
            vecs.remove(drop);
            for w in vecs.iter_mut() {
                let c = &form(&x, w) / &xx;
                for (wi, xi) in w.iter_mut().zip(x.iter()) {
                    *wi = &*wi - &(&c * xi);
                }
            }
            blocks.push((Block::Unary { value: xx.a.clone(), exp: v }, vec![x]));
        } else {
            let x = vecs[i].clone();
            let y = vecs[j].clone();
            vecs.remove(j);
            vecs.remove(i);
            let p = Matrix::from_rows(
                vec![vec![form(&x, &x), form(&x, &y)], vec![form(&y, &x), form(&y, &y)]],
                pi0,
            );
            let pinv = p.inverse().ok_or(LatticeError::Degenerate)?;
            for w in vecs.iter_mut() {
                let rhs = [form(&x, w), form(&y, w)];
                let c = pinv.mul_vec(&rhs);
                for t in 0..n {
                    w[t] = &w[t] - &(&(&c[0] * &x[t]) + &(&c[1] * &y[t]));
                }
            }
            blocks.push((Block::Binary { exp: v, gram: p }, vec![x, y]));
        }
    }
    blocks.sort_by_key(|(b, _)| b.exp());
    let cols: Vec<Vec<Ext>> = blocks.iter().flat_map(|(_, vs)| vs.clone()).collect();
    let basis = Matrix::from_cols(&cols, n, pi0);
    let gram = g.m.sesquilinear(&basis, &basis);
    Ok(JordanForm { blocks: blocks.into_iter().map(|(b, _)| b).collect(), basis, gram })
}

impl JordanForm {
    pub fn key(&self, cfg: &RingConfig) -> JordanKey {
        let mut by_exp: BTreeMap<i64, (usize, i8)> = BTreeMap::new();
        for b in &self.blocks {
            let e = by_exp.entry(b.exp()).or_insert((0, 1));
            match b {
                Block::Unary { value, exp } => {
                    let u = value / cfg.neg_pi0_pow(exp / 2);
                    e.0 += 1;
                    e.1 *= cfg.legendre(&u);
                }
                Block::Binary { .. } => e.0 += 2,
            }
        }
        by_exp
            .into_iter()
            .map(|(exp, (rank, det_chi))| Component { exp, rank, det_chi })
            .collect()
    }
}

/// A Gram matrix in canonical block form for a Jordan key.
pub fn gram_from_key(cfg: &RingConfig, key: &[Component]) -> Gram {
    let mut parts = Vec::new();
    for c in key {
        if c.exp % 2 == 0 {
            let scale = cfg.neg_pi0_pow(c.exp / 2);
            let mut vals = vec![scale.clone(); c.rank];
            if let Some(last) = vals.last_mut() {
                *last = &scale * cfg.unit_with_chi(c.det_chi);
            }
            parts.push(diag(cfg, &vals));
        } else {
            for _ in 0..c.rank / 2 {
                parts.push(hyperbolic(cfg, c.exp));
            }
        }
    }
    Gram::orth_sum_all(&parts, cfg.pi0_int())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeInvariants {
    pub fund: Vec<i64>,
    #[serde(rename = "vL")]
    pub v_l: i64,
    #[serde(rename = "tL")]
    pub t_l: usize,
    pub sign: i8,
    pub t_o: usize,
}

/// `χ((-1)^{n(n-1)/2} det)`.
pub fn sign(cfg: &RingConfig, g: &Gram) -> i8 {
    let n = g.rank();
    let mut d = g.det();
    if (n * n.saturating_sub(1) / 2) % 2 == 1 {
        d = -d;
    }
    cfg.chi(&d).expect("nondegenerate")
}

pub fn invariants(cfg: &RingConfig, g: &Gram) -> Result<LatticeInvariants, LatticeError> {
    let jf = jordan_form(cfg, g)?;
    let mut fund: Vec<i64> = jf.blocks.iter().flat_map(|b| vec![b.exp(); b.rank()]).collect();
    fund.sort();
    let v_l = fund.first().copied().unwrap_or(i64::MAX);
    let t_l = fund.iter().filter(|&&a| a >= 1).count();
    let t_o = fund.iter().filter(|&&a| a != -1).count();
    Ok(LatticeInvariants { fund, v_l, t_l, sign: sign(cfg, g), t_o })
}

pub fn jordan_key(cfg: &RingConfig, g: &Gram) -> Result<JordanKey, LatticeError> {
    Ok(jordan_form(cfg, g)?.key(cfg))
}

/// Gram matrix of `L^♯` in the dual basis.
pub fn dual_gram(g: &Gram) -> Result<Gram, LatticeError> {
    let inv = g.m.inverse().ok_or(LatticeError::Degenerate)?;
    Ok(Gram { m: inv })
}

/// A superlattice `L'` of `L`: basis coordinates with respect to the basis of `L`, and its Gram matrix.
#[derive(Clone, Debug)]
pub struct Superlattice {
    pub coords: Matrix,
    pub gram: Gram,
}

/// All `L'` with `L ⊂ L' ⊂ π^{-1}L` and `dim_{F_q} L'/L = i`.
pub fn superlattices(cfg: &RingConfig, g: &Gram, i: usize) -> Vec<Superlattice> {
    let n = g.rank();
    let inv_pi = cfg.pi_pow(-1);
    ff::subspaces(n, i, cfg.p)
        .into_iter()
        .map(|rows| {
            let lifts: Vec<Vec<Ext>> =
                rows.iter().map(|r| r.iter().map(|&d| &cfg.int(d as i64) * &inv_pi).collect()).collect();
            let gens = Matrix::identity(n, cfg.pi0_int()).hcat(&Matrix::from_cols(&lifts, n, cfg.pi0_int()));
            let coords = hnf::echelon(cfg, &gens).expect("full rank");
            let gram = g.transform(&coords);
            Superlattice { coords, gram }
        })
        .collect()
}

/// Default cap on the number of lattices an enumeration may visit.
pub const DEFAULT_LATTICE_BUDGET: usize = 200_000;

/// All integral `L' ⊇ L`, in canonical order.
pub fn integral_superlattices(cfg: &RingConfig, g: &Gram) -> Result<Vec<Superlattice>, LatticeError> {
    integral_superlattices_with_budget(cfg, g, DEFAULT_LATTICE_BUDGET)
}

pub fn integral_superlattices_with_budget(
    cfg: &RingConfig,
    g: &Gram,
    budget: usize,
) -> Result<Vec<Superlattice>, LatticeError> {
    integral_partial_superlattices(cfg, g, g.rank(), budget)
}

/// All integral `L₁' ⊕ L₂ ⊇ L₁ ⊕ L₂` with `L₁' ⊂ L₁ ⊗ F`, where `L₁` is spanned by the
/// first `n1` basis vectors, in canonical order.
pub fn integral_partial_superlattices(
    cfg: &RingConfig,
    g: &Gram,
    n1: usize,
    budget: usize,
) -> Result<Vec<Superlattice>, LatticeError> {
    if !g.is_integral(cfg) {
        return Err(LatticeError::NotIntegral);
    }
    let n = g.rank();
    if n1 > n {
        return Err(LatticeError::BadParameters(format!("n1 = {n1} exceeds rank {n}")));
    }
    let start = hnf::echelon(cfg, &Matrix::identity(n, cfg.pi0_int())).expect("identity");
    let mut seen: HashSet<LatticeKey> = HashSet::new();
    let mut out: Vec<(LatticeKey, Superlattice)> = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(hnf::key_of(&start));
    queue.push_back(start);
    let inv_pi = cfg.pi_pow(-1);
    let lines: Vec<Vec<u64>> = if n1 == 0 {
        Vec::new()
    } else {
        ff::subspaces(n1, 1, cfg.p)
            .into_iter()
            .map(|l| {
                let mut v = l[0].clone();
                v.resize(n, 0);
                v
            })
            .collect()
    };
    while let Some(c) = queue.pop_front() {
        let gram = g.transform(&c);
        out.push((hnf::key_of(&c), Superlattice { coords: c.clone(), gram }));
        if out.len() > budget {
            return Err(LatticeError::Budget(budget));
        }
        for line in &lines {
            // the first n1 echelon columns span L₁'
            let v: Vec<Ext> = line.iter().map(|&d| cfg.int(d as i64)).collect();
            let w: Vec<Ext> = c.mul_vec(&v).iter().map(|x| x * &inv_pi).collect();
            let gens = c.hcat(&Matrix::from_cols(&[w], n, cfg.pi0_int()));
            let e = hnf::echelon(cfg, &gens).expect("full rank");
            let key = hnf::key_of(&e);
            if seen.contains(&key) {
                continue;
            }
            seen.insert(key);
            if g.transform(&e).is_integral(cfg) {
                queue.push_back(e);
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out.into_iter().map(|(_, s)| s).collect())
}

/// `1 + Σ_{i=1}^m (-1)^i q^{i(i-1)/2} [m choose i]_q`.
pub fn subspace_alt_sum(m: u32, q: u64) -> BigInt {
    let mut s = BigInt::one();
    for i in 1..=m {
        let t = num::pow(BigInt::from(q), (i * (i - 1) / 2) as usize) * ff::gaussian_binomial(m, i, q);
        if i % 2 == 1 {
            s -= t;
        } else {
            s += t;
        }
    }
    s
}

/// Convenience: `u·(-π₀)^k` as a rational.
pub fn scaled_unit(cfg: &RingConfig, u: i64, k: i64) -> Q {
    q_int(u) * cfg.neg_pi0_pow(k)
}

#[cfg(test)]
mod tests;
