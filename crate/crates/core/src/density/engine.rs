//! Analytic density polynomials `α(M, L, X)` for `M = H^i ⊥ (unimodular)` and `L` of
//! rank at most three, by recursion on the Jordan data of `L`.
//!
//! Rules, applied in order:
//! * a scale below `π^{-1}` gives zero;
//! * `H` summands of `L` factor out, `α(M, H^i ⊥ L₂, X) = ∏_{j<i}(1 - q^{2j}X)·α(M, L₂, q^{2i}X)`;
//! * a unit `⟨u⟩` peels off through the two vector orbits of norm `u`;
//! * rank one is a finite Gauss-sum expansion valid for any diagonal-plus-hyperbolic `M`;
//! * otherwise a rank-two block `L₁` with `v(L₁) > 0` is split off: superlattices of
//!   `L₁` plus the primitive part, which decomposes over three orbit types.

use std::collections::HashMap;
use std::sync::Mutex;

use num::traits::{One, Zero};

use super::poly::{qpow, DensityPoly};
use super::DensityError;
use crate::lattice::{self, diag, hyperbolic, jordan_key, superlattices, Component, Gram, JordanKey};
use crate::local_ring::{q_int, RingConfig, Q};

/// A diagonal-plus-hyperbolic lattice: unary blocks `u(-π₀)^c` recorded as
/// `(c, χ(u))`, and planes `H_e` recorded by `e`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DiagForm {
    pub unary: Vec<(i64, i8)>,
    pub hyp: Vec<i64>,
}

impl DiagForm {
    pub fn unimodular(m: usize, chi_det: i8) -> Self {
        let mut unary = vec![(0, 1); m];
        if let Some(last) = unary.last_mut() {
            last.1 = chi_det;
        }
        DiagForm { unary, hyp: Vec::new() }
    }
}

/// `α(M ⊥ H^k, ⟨t⟩)` at `X = q^{-2k}` with `t = t₀(-π₀)^{vt}`, `χ(t₀) = chi_t`.
pub fn alpha_rank1(cfg: &RingConfig, m: &DiagForm, vt: i64, chi_t: i8) -> DensityPoly {
    if vt < 0 {
        return DensityPoly::zero();
    }
    let q = cfg.q();
    let chi_m1 = cfg.legendre(&q_int(-1));
    let mut coeffs = vec![Q::one()];
    for s in 1..=vt + 1 {
        let small: Vec<&(i64, i8)> = m.unary.iter().filter(|(c, _)| *c < s).collect();
        let n_s = small.len() as i64;
        let mut qexp = s;
        qexp += small.iter().map(|(c, _)| c - s).sum::<i64>();
        qexp -= m.hyp.iter().map(|&e| (2 * s - 1 - e).max(0)).sum::<i64>();
        let sign_units: i8 = small.iter().map(|(_, u)| *u).product();
        let mut chi = sign_units * if n_s % 2 == 1 { chi_m1 } else { 1 };
        let term = if n_s % 2 == 0 {
            // g^N = (χ(-1) q)^{N/2}
            if (n_s / 2) % 2 == 1 {
                chi *= chi_m1;
            }
            qexp += n_s / 2;
            if s <= vt {
                q_int(chi as i64) * (Q::one() - qpow(q, -1))
            } else {
                q_int(-(chi as i64)) * qpow(q, -1)
            }
        } else if s == vt + 1 {
            // g^{N+1} = (χ(-1) q)^{(N+1)/2}
            if ((n_s + 1) / 2) % 2 == 1 {
                chi *= chi_m1;
            }
            qexp += (n_s + 1) / 2 - 1;
            q_int((chi * chi_t) as i64)
        } else {
            Q::zero()
        };
        coeffs.push(term * qpow(q, qexp));
    }
    DensityPoly::new(coeffs)
}

/// `β_i(M, L₁, X)` for a rank-one `L₁ = ⟨t⟩` and unimodular `M` of rank `m`:
/// index 1 is the `H^k` orbit, index 0 the orbit inside `M`.
pub fn beta_rank1(q: u64, m: usize, chi_m: i8, vt_positive: bool, chi_t: i8) -> [DensityPoly; 2] {
    let x = DensityPoly::x();
    let mi = m as i64;
    let b0 = if !vt_positive {
        if m % 2 == 1 {
            Q::one() + q_int((chi_m * chi_t) as i64) * qpow(q, -(mi - 1) / 2)
        } else {
            Q::one() - q_int(chi_m as i64) * qpow(q, -mi / 2)
        }
    } else if m % 2 == 1 {
        Q::one() - qpow(q, 1 - mi)
    } else {
        Q::one() - qpow(q, 1 - mi) + q_int(chi_m as i64) * (q_int(q as i64) - Q::one()) * qpow(q, -mi / 2)
    };
    [x.scale(&b0), DensityPoly::one_minus(Q::one())]
}

/// `β_i(M, L₁, X)`, `i = 0, 1, 2`, for a rank-two `L₁` with `v(L₁) > 0` and unimodular `M`.
pub fn beta_rank2_positive(q: u64, m: usize, chi_m: i8) -> [DensityPoly; 3] {
    let mi = m as i64;
    let qq = q_int(q as i64);
    let one = Q::one();
    let x = DensityPoly::x();
    let one_minus_x = DensityPoly::one_minus(one.clone());
    let even = m % 2 == 0;
    let b2 = &one_minus_x * &DensityPoly::one_minus(&qq * &qq);
    let mut c1 = &one - qpow(q, 1 - mi);
    if even {
        c1 += q_int(chi_m as i64) * (&qq - &one) * qpow(q, -mi / 2);
    }
    let b1 = (&x * &one_minus_x).scale(&(&qq * (&qq + &one) * c1));
    let c0 = if even {
        &qq * ((&one - qpow(q, 2 - mi)) + q_int(chi_m as i64) * (&qq * &qq - &one) * qpow(q, -mi / 2)) * (&one - qpow(q, 2 - mi))
    } else {
        &qq * (&one - qpow(q, 1 - mi)) * (&one - qpow(q, 3 - mi))
    };
    let b0 = DensityPoly::monomial(c0, 2);
    [b0, b1, b2]
}

/// `χ(M)` for a unimodular lattice of rank `m` and determinant class `chi_det`.
pub fn unimodular_sign(cfg: &RingConfig, m: usize, chi_det: i8) -> i8 {
    let chi_m1 = cfg.legendre(&q_int(-1));
    let pairs = m * m.saturating_sub(1) / 2;
    chi_det * if pairs % 2 == 1 { chi_m1 } else { 1 }
}

type MemoKey = (usize, i8, JordanKey);

/// Memoizing evaluator for one ring.
pub struct Engine {
    cfg: RingConfig,
    memo: Mutex<HashMap<MemoKey, DensityPoly>>,
}

/// Split `M` into `(i, m, χ(det))` for `M ≅ H^i ⊥ I_m`, if it has that shape.
pub fn split_hyperbolic_unimodular(cfg: &RingConfig, m: &Gram) -> Result<(usize, usize, i8), DensityError> {
    let key = jordan_key(cfg, m)?;
    let mut h = 0;
    let mut uni = (0, 1);
    for c in &key {
        match c.exp {
            -1 => h = c.rank / 2,
            0 => uni = (c.rank, c.det_chi),
            _ => return Err(DensityError::Hypothesis("M must be H^i ⊥ unimodular".into())),
        }
    }
    Ok((h, uni.0, uni.1))
}

impl Engine {
    pub fn new(cfg: &RingConfig) -> Self {
        Engine { cfg: cfg.clone(), memo: Mutex::new(HashMap::new()) }
    }

    pub fn cfg(&self) -> &RingConfig {
        &self.cfg
    }

    /// `α(M, L, X)` for `M ≅ H^i ⊥ (unimodular)` and `rank L ≤ 3`.
    pub fn alpha(&self, m: &Gram, l: &Gram) -> Result<DensityPoly, DensityError> {
        let (h, rank, chi_det) = split_hyperbolic_unimodular(&self.cfg, m)?;
        let key = jordan_key(&self.cfg, l)?;
        let poly = self.alpha_unimodular(rank, chi_det, &key)?;
        Ok(poly.rescale(&qpow(self.cfg.q(), -2 * h as i64)))
    }

    pub fn alpha_prime(&self, m: &Gram, l: &Gram) -> Result<Q, DensityError> {
        Ok(self.alpha(m, l)?.derivative_prime())
    }

    /// `α(I_m ⊥ H^k, L, X)` where `I_m` has determinant class `chi_det`.
    pub fn alpha_unimodular(&self, m: usize, chi_det: i8, key: &[Component]) -> Result<DensityPoly, DensityError> {
        let n: usize = key.iter().map(|c| c.rank).sum();
        if n > 3 {
            return Err(DensityError::Hypothesis(format!("rank {n} target not supported")));
        }
        let memo_key = (m, chi_det, key.to_vec());
        if let Some(p) = self.memo.lock().unwrap().get(&memo_key) {
            return Ok(p.clone());
        }
        let result = self.compute(m, chi_det, key, n)?;
        self.memo.lock().unwrap().insert(memo_key, result.clone());
        Ok(result)
    }

    fn compute(&self, m: usize, chi_det: i8, key: &[Component], n: usize) -> Result<DensityPoly, DensityError> {
        let cfg = &self.cfg;
        let q = cfg.q();
        if n == 0 {
            return Ok(DensityPoly::one());
        }
        if key[0].exp <= -2 {
            return Ok(DensityPoly::zero());
        }
        if key[0].exp == -1 {
            let r = key[0].rank / 2;
            let mut factor = DensityPoly::one();
            for j in 0..r {
                factor = &factor * &DensityPoly::one_minus(qpow(q, 2 * j as i64));
            }
            let rest = self.alpha_unimodular(m, chi_det, &key[1..])?;
            return Ok(&factor * &rest.rescale(&qpow(q, 2 * r as i64)));
        }
        let chi_m = unimodular_sign(cfg, m, chi_det);
        let chi_m1 = cfg.legendre(&q_int(-1));
        if key[0].exp == 0 {
            // peel ⟨u⟩ off the unimodular component
            let (chi_u, rest) = peel_unit(&key);
            let [b0, b1] = beta_rank1(q, m, chi_m, false, chi_u);
            let bigger = self.alpha_unimodular(m + 1, chi_det * chi_m1 * chi_u, &rest)?;
            let mut out = &b1 * &bigger.rescale(&q_int(q as i64 * q as i64));
            if m >= 1 && !b0.is_zero() {
                let smaller = self.alpha_unimodular(m - 1, chi_det * chi_u, &rest)?;
                let w = qpow(q, n as i64 - 1);
                out = &out + &(&b0 * &smaller).scale(&w);
            }
            return Ok(out);
        }
        if n == 1 {
            let c = &key[0];
            return Ok(alpha_rank1(cfg, &DiagForm::unimodular(m, chi_det), c.exp / 2, c.det_chi));
        }
        self.split_rank_two(m, chi_det, chi_m, key, n)
    }

    /// `v(L) > 0`, `rank L ∈ {2, 3}`.
    fn split_rank_two(&self, m: usize, chi_det: i8, chi_m: i8, key: &[Component], n: usize) -> Result<DensityPoly, DensityError> {
        let cfg = &self.cfg;
        let q = cfg.q();
        let chi_m1 = cfg.legendre(&q_int(-1));
        let (l1, l2) = split_off_plane(cfg, key);
        // -L₁ as a DiagForm, and the rank-one remainder
        let neg_l1 = match &l1 {
            Piece::Plane(e) => DiagForm { unary: Vec::new(), hyp: vec![*e] },
            Piece::Pair(a, b) => DiagForm {
                unary: vec![(a.0, a.1 * chi_m1), (b.0, b.1 * chi_m1)],
                hyp: Vec::new(),
            },
        };
        let l1_gram = l1.gram(cfg);
        let l2_gram = match l2 {
            Some((c, u)) => diag(cfg, &[lattice::scaled_unit(cfg, if u == 1 { 1 } else { cfg.nonresidue() as i64 }, c)]),
            None => Gram::empty(cfg.pi0_int()),
        };

        let mut out = DensityPoly::zero();
        // superlattice terms
        for i in 1..=2usize {
            let ii = i as i64;
            let w = qpow(q, ii * (ii - 1) / 2 + ii * (n as i64 - m as i64));
            let sign = if i % 2 == 1 { Q::one() } else { -Q::one() };
            let mut sum = DensityPoly::zero();
            for s in superlattices(cfg, &l1_gram, i) {
                let g = s.gram.orth_sum(&l2_gram);
                let k = jordan_key(cfg, &g)?;
                sum = &sum + &self.alpha_unimodular(m, chi_det, &k)?;
            }
            out = &out + &(&DensityPoly::monomial(&w * &sign, i) * &sum);
        }
        // primitive part
        let betas = beta_rank2_positive(q, m, chi_m);
        for (i, beta) in betas.iter().enumerate() {
            if beta.is_zero() {
                continue;
            }
            let rank_i = m as i64 - 2 * (2 - i as i64);
            if rank_i < 0 {
                continue;
            }
            let inner = match l2 {
                None => DensityPoly::one(),
                Some((c, u)) => {
                    let det_i = if i % 2 == 1 { chi_det * chi_m1 } else { chi_det };
                    let mut form = DiagForm::unimodular(rank_i as usize, det_i);
                    form.unary.extend(neg_l1.unary.iter().copied());
                    form.hyp.extend(neg_l1.hyp.iter().copied());
                    alpha_rank1(cfg, &form, c, u).rescale(&qpow(q, 2 * i as i64))
                }
            };
            let w = qpow(q, (2 - i as i64) * (n as i64 - 2));
            out = &out + &(beta * &inner).scale(&w);
        }
        Ok(out)
    }
}

/// Removes one unit from the scale-0 component; returns its class and the rest.
fn peel_unit(key: &[Component]) -> (i8, JordanKey) {
    let mut rest = key.to_vec();
    let c = &mut rest[0];
    if c.rank == 1 {
        let chi = c.det_chi;
        rest.remove(0);
        (chi, rest)
    } else {
        c.rank -= 1;
        (1, rest)
    }
}

enum Piece {
    Plane(i64),
    Pair((i64, i8), (i64, i8)),
}

impl Piece {
    fn gram(&self, cfg: &RingConfig) -> Gram {
        let unit = |c: i64, u: i8| lattice::scaled_unit(cfg, if u == 1 { 1 } else { cfg.nonresidue() as i64 }, c);
        match self {
            Piece::Plane(e) => hyperbolic(cfg, *e),
            Piece::Pair(a, b) => diag(cfg, &[unit(a.0, a.1), unit(b.0, b.1)]),
        }
    }
}

/// Unary entries `(c, χ(u))` of a Jordan key in order.
fn unary_entries(c: &Component) -> Vec<(i64, i8)> {
    let mut v = vec![(c.exp / 2, 1i8); c.rank];
    if let Some(last) = v.last_mut() {
        last.1 = c.det_chi;
    }
    v
}

/// Chooses a rank-two orthogonal summand of smallest scale and the rank-one rest.
fn split_off_plane(_cfg: &RingConfig, key: &[Component]) -> (Piece, Option<(i64, i8)>) {
    if key[0].exp % 2 != 0 {
        let rest = key[1..].first().map(|c| unary_entries(c)[0]);
        let rest = if key[0].rank > 2 { None } else { rest };
        return (Piece::Plane(key[0].exp), rest);
    }
    let mut entries: Vec<(i64, i8)> = Vec::new();
    let mut planes: Vec<i64> = Vec::new();
    for c in key {
        if c.exp % 2 == 0 {
            entries.extend(unary_entries(c));
        } else {
            planes.extend(std::iter::repeat(c.exp).take(c.rank / 2));
        }
    }
    if entries.len() == 1 {
        // a unary of smaller scale and a plane: split off the plane instead
        return (Piece::Plane(planes[0]), Some(entries[0]));
    }
    let rest = entries.get(2).copied();
    (Piece::Pair(entries[0], entries[1]), rest)
}
