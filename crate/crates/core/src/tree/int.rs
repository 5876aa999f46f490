use num::traits::Zero;

use super::{embed, enumerate_support_in, AmbientSpace, TreeError, VertexLattice, VertexType, SUPPORT_BUDGET};
use crate::kr::{Analytic, DensitySource};
use crate::lattice::{hnf, integral_partial_superlattices, jordan_form, Block, Gram, Matrix, DEFAULT_LATTICE_BUDGET};
use crate::local_ring::{q_int, Ext, Q};

/// `+1_Λ(x)` for type 2, `-1_Λ(x)` for type 0.
pub fn int_pairing(amb: &AmbientSpace, x: &[Ext], lam: &VertexLattice) -> i64 {
    let inside = amb.member(x, lam) as i64;
    match lam.kind {
        VertexType::Two => inside,
        VertexType::Zero => -inside,
    }
}

/// `Σ_{Λ₂ ∈ V²(L♭)} (2·1_{Λ₂}(x) − Σ_{Λ₀ ⊂ Λ₂} 1_{Λ₀}(x))` for `v(L♭) > 0`.
pub fn int_prim2(amb: &AmbientSpace, lflat: &Matrix, x: &[Ext]) -> Result<i64, TreeError> {
    let v = hnf::min_val(&amb.cfg, &amb.gram(lflat)).ok_or(TreeError::Singular)?;
    if v <= 0 {
        return Err(TreeError::Unsupported(format!("v(L♭) = {v}, the geometric formula needs v > 0")));
    }
    let set = enumerate_support_in(amb, lflat, SUPPORT_BUDGET)?;
    let mut total = 0;
    for lam2 in &set.v2 {
        total += 2 * int_pairing(amb, x, lam2);
        for lam0 in amb.neighbors(lam2) {
            total += int_pairing(amb, x, &lam0);
        }
    }
    Ok(total)
}

/// `2Σ_{s=0}^{a} q^s(a+b+1−2s) − a − b − 2`, and 0 for `a < 0`.
pub fn mu(q: u64, a: i64, b: i64) -> i64 {
    if a < 0 {
        return 0;
    }
    let q = q as i64;
    let s: i64 = (0..=a).map(|s| q.pow(s as u32) * (a + b + 1 - 2 * s)).sum();
    2 * s - a - b - 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntPath {
    /// `v(L) < 0`.
    NotIntegral,
    /// `v(L) = 0`: rank-2 derived density of the complement of a unit vector plus `|V⁰(L)|`.
    UnitSplit,
    /// `v(L) > 0`: sum of primitive parts over integral `L'♭ ⊇ L♭`.
    Decomposition,
}

#[derive(Clone, Debug)]
pub struct IntReport {
    pub value: Q,
    pub path: IntPath,
    /// Terms computed by lattice enumeration and pairings.
    pub geometric_terms: usize,
    /// Terms taken from the rank-2 analytic identity.
    pub bridge_terms: usize,
}

/// `Int(L)` for an integral rank-3 Gram matrix, without consulting `∂Den(L)`.
pub fn int_total<S: DensitySource>(an: &Analytic<S>, t: &Gram) -> Result<IntReport, TreeError> {
    let cfg = an.cfg();
    if t.rank() != 3 {
        return Err(TreeError::Rank(t.rank()));
    }
    let report = |value, path, geometric_terms, bridge_terms| IntReport { value, path, geometric_terms, bridge_terms };
    if !t.is_integral(cfg) {
        return Ok(report(Q::zero(), IntPath::NotIntegral, 0, 0));
    }
    let jf = jordan_form(cfg, t)?;
    let amb = embed(cfg, t)?;
    // Jordan vectors in ambient coordinates.
    let jv = amb.basis.mul(&jf.basis);
    if jf.blocks[0].exp() == 0 {
        let Block::Unary { value: u1, .. } = &jf.blocks[0] else { unreachable!("exponent 0 is unary") };
        let rest = Gram { m: jf.gram.submatrix(&[1, 2], &[1, 2]) }.scale(&u1.recip());
        let bridge = an.pden(&rest)?;
        let set = enumerate_support_in(&amb, &amb.basis, SUPPORT_BUDGET)?;
        let v0 = q_int(set.v0.len() as i64);
        return Ok(report(bridge + v0, IntPath::UnitSplit, 1, 1));
    }
    // x: a unary block of maximal exponent; L♭: the other Jordan vectors.
    let mut col = 0;
    let mut x_col = None;
    let mut best = i64::MIN;
    for b in &jf.blocks {
        if let Block::Unary { exp, .. } = b {
            if *exp >= best {
                best = *exp;
                x_col = Some(col);
            }
        }
        col += b.rank();
    }
    let xc = x_col.ok_or_else(|| TreeError::Unsupported("no unary Jordan block".into()))?;
    let order: Vec<usize> = (0..3).filter(|&c| c != xc).chain([xc]).collect();
    let basis = jv.select_cols(&order);
    let g = Gram { m: amb.gram(&basis) };
    let x = basis.col(2);
    let mut value = Q::zero();
    let (mut geo, mut bridge) = (0, 0);
    for s in integral_partial_superlattices(cfg, &g, 2, DEFAULT_LATTICE_BUDGET)? {
        let flat = Gram { m: s.gram.m.submatrix(&[0, 1], &[0, 1]) };
        let v = hnf::min_val(cfg, &flat.m).ok_or(TreeError::Singular)?;
        if v > 0 {
            let y = basis.mul(&s.coords).select_cols(&[0, 1]);
            value += q_int(int_prim2(&amb, &y, &x)?);
            geo += 1;
        } else {
            value += an.pden_prim(&s.gram, 2)?;
            bridge += 1;
        }
    }
    Ok(report(value, IntPath::Decomposition, geo, bridge))
}
