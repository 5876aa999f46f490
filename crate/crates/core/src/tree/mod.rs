//! Vertex lattices in a three-dimensional Hermitian space, supports of special
//! cycles, and intersection numbers computed from them.
//!
//! A lattice `Λ` with `πΛ ⊆ Λ^♯ ⊆ Λ` is a vertex lattice of type `dim Λ/Λ^♯`.
//! In rank three the types are 0 and 2, and inclusion makes them into a
//! `(q+1)`-regular bipartite tree.

mod int;
mod support;
#[cfg(test)]
mod tests;

pub use int::{int_pairing, int_prim2, int_total, mu, IntPath, IntReport};
pub use support::{
    complement_class, enumerate_support, enumerate_support_in, shape_of, support_counts_closed, Shape,
    SupportCounts, SupportGraph, SupportSet, SUPPORT_BUDGET,
};

use std::fmt;

use crate::ff;
use crate::kr::KrError;
use crate::lattice::{hnf, jordan_form, Block, Gram, LatticeError, LatticeKey, Matrix};
use crate::local_ring::{Ext, RingConfig};

#[derive(Debug)]
pub enum TreeError {
    Rank(usize),
    NotIntegral,
    NotVertex,
    Singular,
    Unsupported(String),
    Budget(usize),
    Lattice(LatticeError),
    Kr(KrError),
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::Rank(n) => write!(f, "unsupported rank {n}"),
            TreeError::NotIntegral => f.write_str("lattice is not integral"),
            TreeError::NotVertex => f.write_str("not a vertex lattice"),
            TreeError::Singular => f.write_str("singular basis"),
            TreeError::Unsupported(s) => write!(f, "unsupported input: {s}"),
            TreeError::Budget(n) => write!(f, "support enumeration exceeded {n} vertices"),
            TreeError::Lattice(e) => write!(f, "{e}"),
            TreeError::Kr(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for TreeError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            TreeError::Lattice(e) => Some(e),
            TreeError::Kr(e) => Some(e),
            _ => None,
        }
    }
}

impl From<LatticeError> for TreeError {
    fn from(e: LatticeError) -> Self {
        TreeError::Lattice(e)
    }
}

impl From<KrError> for TreeError {
    fn from(e: KrError) -> Self {
        TreeError::Kr(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexType {
    Zero,
    Two,
}

impl VertexType {
    pub fn t(self) -> usize {
        match self {
            VertexType::Zero => 0,
            VertexType::Two => 2,
        }
    }
}

/// A vertex lattice given by its echelon basis in ambient coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexLattice {
    pub basis: Matrix,
    pub kind: VertexType,
    pub key: LatticeKey,
}

/// The rational Hermitian space `L ⊗ F` of rank three, with coordinates in a basis
/// of Gram matrix `phi`, and the coordinates `basis` of the input lattice.
#[derive(Clone, Debug)]
pub struct AmbientSpace {
    pub cfg: RingConfig,
    pub rank: usize,
    pub phi: Gram,
    pub basis: Matrix,
}

/// Scale each Jordan vector to unit norm, or to an `H_1`-type pair.
fn normalized(cfg: &RingConfig, vecs: &Matrix, blocks: &[Block]) -> Matrix {
    let mut cols = Vec::new();
    let mut j = 0;
    for b in blocks {
        let k = match b {
            Block::Unary { exp, .. } => exp / 2,
            Block::Binary { exp, .. } => (exp - 1) / 2,
        };
        let s = cfg.pi_pow(-k);
        for _ in 0..b.rank() {
            cols.push(vecs.col(j).iter().map(|x| x * &s).collect::<Vec<Ext>>());
            j += 1;
        }
    }
    Matrix::from_cols(&cols, vecs.rows, cfg.pi0_int())
}

/// Embed `L` (rank at most three, padded by `⟨1⟩`) isometrically into a rank-three space.
pub fn embed(cfg: &RingConfig, l: &Gram) -> Result<AmbientSpace, TreeError> {
    embed_with_complement(cfg, l, &num::one())
}

/// Embed `L ⊥ ⟨t, …, t⟩` and remember the coordinates of `L`.
pub fn embed_with_complement(cfg: &RingConfig, l: &Gram, t: &crate::Q) -> Result<AmbientSpace, TreeError> {
    let n = l.rank();
    if n == 0 || n > 3 {
        return Err(TreeError::Rank(n));
    }
    let pad = crate::lattice::diag(cfg, &vec![t.clone(); 3 - n]);
    let full = l.orth_sum(&pad);
    let jf = jordan_form(cfg, &full)?;
    let w = normalized(cfg, &jf.basis, &jf.blocks);
    let phi = full.transform(&w);
    let winv = w.inverse().ok_or(TreeError::Singular)?;
    let basis = winv.select_cols(&(0..n).collect::<Vec<_>>());
    debug_assert_eq!(phi.m.sesquilinear(&basis, &basis), l.m);
    Ok(AmbientSpace { cfg: cfg.clone(), rank: n, phi, basis })
}

impl AmbientSpace {
    fn pi0(&self) -> i64 {
        self.cfg.pi0_int()
    }

    /// Gram matrix of the vectors in the columns of `b`.
    pub fn gram(&self, b: &Matrix) -> Matrix {
        self.phi.m.sesquilinear(b, b)
    }

    /// Type of the lattice with basis `b`, if it is a vertex lattice.
    pub fn classify(&self, b: &Matrix) -> Option<VertexType> {
        let g = self.gram(b);
        let ginv = g.inverse()?;
        if !hnf::is_integral_matrix(&self.cfg, &ginv) {
            return None;
        }
        if hnf::min_val(&self.cfg, &g).map_or(false, |v| v < -1) {
            return None;
        }
        match self.cfg.val_pi(&g.det()) {
            Some(0) => Some(VertexType::Zero),
            Some(-2) => Some(VertexType::Two),
            _ => None,
        }
    }

    /// The vertex lattice generated by the columns of `gens`.
    pub fn vertex(&self, gens: &Matrix) -> Result<VertexLattice, TreeError> {
        let basis = hnf::echelon(&self.cfg, gens).ok_or(TreeError::Singular)?;
        let kind = self.classify(&basis).ok_or(TreeError::NotVertex)?;
        let key = hnf::key_of(&basis);
        Ok(VertexLattice { basis, kind, key })
    }

    /// Basis of `Λ^♯`.
    pub fn dual(&self, lam: &VertexLattice) -> Matrix {
        self.dual_of(&lam.basis).expect("vertex lattices are nondegenerate")
    }

    pub fn dual_of(&self, b: &Matrix) -> Option<Matrix> {
        Some(b.mul(&self.gram(b).inverse()?))
    }

    pub fn member(&self, x: &[Ext], lam: &VertexLattice) -> bool {
        hnf::contains(&self.cfg, &lam.basis, x)
    }

    /// Every column of `y` lies in `Λ^♯`.
    pub fn dual_contains(&self, lam: &VertexLattice, y: &Matrix) -> bool {
        let pairing = self.phi.m.sesquilinear(&lam.basis, y);
        hnf::is_integral_matrix(&self.cfg, &pairing)
    }

    /// Type-0 input: the `q+1` type-2 lattices containing it. Type-2 input: the
    /// `q+1` type-0 lattices it contains.
    pub fn neighbors(&self, lam: &VertexLattice) -> Vec<VertexLattice> {
        let cfg = &self.cfg;
        let (base, scale, want) = match lam.kind {
            VertexType::Zero => (lam.basis.clone(), cfg.pi_pow(-1), VertexType::Two),
            VertexType::Two => (self.dual(lam), cfg.one(), VertexType::Zero),
        };
        let mut out: Vec<VertexLattice> = Vec::new();
        for line in ff::subspaces(3, 1, cfg.p) {
            let digits: Vec<Ext> = line[0].iter().map(|&d| cfg.int(d as i64)).collect();
            let v: Vec<Ext> = lam.basis.mul_vec(&digits).iter().map(|x| x * &scale).collect();
            let gens = base.hcat(&Matrix::from_cols(&[v], 3, self.pi0()));
            let Some(basis) = hnf::echelon(cfg, &gens) else { continue };
            if self.classify(&basis) != Some(want) {
                continue;
            }
            let key = hnf::key_of(&basis);
            if out.iter().all(|o| o.key != key) {
                out.push(VertexLattice { basis, kind: want, key });
            }
        }
        out
    }

    /// A basis of the orthogonal complement of the columns of `y`.
    pub fn complement(&self, y: &Matrix) -> Result<Matrix, TreeError> {
        let k = y.cols;
        let gy_inv = self.gram(y).inverse().ok_or(TreeError::Singular)?;
        let mut cols: Vec<Vec<Ext>> = Vec::new();
        for e in Matrix::identity(3, self.pi0()).cols_vec() {
            if cols.len() == 3 - k {
                break;
            }
            let em = Matrix::from_cols(&[e.clone()], 3, self.pi0());
            let c = gy_inv.mul(&self.phi.m.sesquilinear(y, &em));
            let proj = y.mul(&c);
            let z: Vec<Ext> = e.iter().zip(proj.col(0).iter()).map(|(a, b)| a - b).collect();
            let mut trial = cols.clone();
            trial.push(z.clone());
            let m = y.hcat(&Matrix::from_cols(&trial, 3, self.pi0()));
            if independent(&m) {
                cols.push(z);
            }
        }
        Ok(Matrix::from_cols(&cols, 3, self.pi0()))
    }

    /// A vertex lattice `Λ` with `y ⊆ Λ^♯`: the dual of the span of the scaled
    /// Jordan vectors of `y` and of its complement.
    pub fn vertex_over(&self, y: &Matrix) -> Result<VertexLattice, TreeError> {
        let mut parts = Vec::new();
        let mut pieces = vec![y.clone()];
        if y.cols < 3 {
            pieces.push(self.complement(y)?);
        }
        for piece in pieces {
            let g = Gram::new(self.gram(&piece))?;
            let jf = jordan_form(&self.cfg, &g)?;
            parts.push(normalized(&self.cfg, &piece.mul(&jf.basis), &jf.blocks));
        }
        let n = parts[0].hcat(parts.get(1).unwrap_or(&Matrix::zeros(3, 0, self.pi0())));
        let lam = self.dual_of(&n).ok_or(TreeError::Singular)?;
        self.vertex(&lam)
    }
}

/// Columns are linearly independent over `F`: some maximal minor is nonzero.
fn independent(m: &Matrix) -> bool {
    let k = m.cols;
    if k > m.rows {
        return false;
    }
    let cols: Vec<usize> = (0..k).collect();
    row_subsets(m.rows, k).iter().any(|rows| !m.submatrix(rows, &cols).det().is_zero())
}

fn row_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            row_subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}
