//! Closed-form density polynomials and primitive density tables.
//!
//! Every evaluator checks its hypotheses and returns [`DensityError::Hypothesis`]
//! outside them.

use num::traits::{One, Zero};
use serde::Serialize;

use super::engine::{alpha_rank1, unimodular_sign, DiagForm};
use super::poly::{qpow, DensityPoly};
use super::DensityError;
use crate::local_ring::{q_int, RingConfig, Q};

/// Result of a closed-form evaluator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ClosedValue {
    Poly(DensityPoly),
    Value(#[serde(serialize_with = "ser_q")] Q),
}

fn ser_q<S: serde::Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl ClosedValue {
    pub fn poly(&self) -> Option<&DensityPoly> {
        match self {
            ClosedValue::Poly(p) => Some(p),
            ClosedValue::Value(_) => None,
        }
    }

    pub fn value(&self) -> Option<&Q> {
        match self {
            ClosedValue::Value(v) => Some(v),
            ClosedValue::Poly(_) => None,
        }
    }
}

/// Closed-form evaluators. Signs are quadratic characters in `{1, -1}`.
///
/// `chi_s` is `χ(S)` of the unimodular part, `chi_t` the class of a unit part,
/// `chi_tt` the sign `χ(T)` of a rank-two target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum Formula {
    /// `α(S_{a,b}, ⟨t⟩, X)` with `S_{a,b} = Diag(S, ν₁(-π₀)^a, ν₂(-π₀)^b)`, `0 ≤ a ≤ b ≤ v(t)`.
    RankOneSab { m: usize, chi_s: i8, nu1: i8, nu2: i8, a: i64, b: i64, vt: i64, chi_t: i8 },
    /// `α(S ⊥ H_i, ⟨t⟩, X)` for odd `m`.
    RankOnePlane { m: usize, chi_s: i8, i: i64, vt: i64, chi_t: i8 },
    /// `α(S, Diag(u₁(-π₀)^a, u₂(-π₀)^b), X)` for isotropic `S` of even rank.
    EvenRankTwo { m: usize, chi_s: i8, a: i64, b: i64, chi_tt: i8 },
    /// `α(Diag(1, ν), Diag(u₁(-π₀)^a, u₂(-π₀)^b), X)`.
    BinaryRankTwo { chi_s: i8, a: i64, b: i64, chi_tt: i8 },
    /// `α(S, Diag(u₁(-π₀)^a, u₂(-π₀)^b), X)` for odd `m ≥ 3`.
    OddRankTwo { m: usize, chi_s: i8, a: i64, b: i64, chi_u1: i8, chi_u2: i8 },
    /// `∂Den(Diag(1, T₂)) - ∂Den(T₂)`, `T₂ = Diag(u₁(-π₀)^a, u₂(-π₀)^b)`, `0 ≤ a ≤ b`.
    DiagOneDifference { a: i64, chi_tt: i8 },
    /// `∂Den^{(2)}(Diag(u₁(-π₀)^a, u₂(-π₀)^b, u₃(-π₀)^c))`, `0 < a ≤ b ≤ c`; `chi` is `χ(-u₂u₃)`.
    PrimDiag { a: i64, b: i64, c: i64, chi: i8 },
    /// `∂Den^{(2)}(Diag(H_a, u₃(-π₀)^c))`, `a` odd and positive.
    PrimPlane { a: i64, c: i64 },
    /// `β(H^k, L)` from the rank `n` and `t_o(L)`.
    BetaHk { k: usize, n: usize, t_o: usize },
    /// Rank-one primitive pieces `[β₀, β₁]` for a unimodular `M`.
    BetaRankOne { m: usize, chi_m: i8, vt_positive: bool, chi_l: i8 },
    /// `β₀(M, L, X)` for rank-two `L`; see [`beta0_rank2`].
    BetaZeroRankTwo { m: usize, chi_m: i8, t: usize, chi_l: i8, chi_u1: i8 },
    /// `β₁(M, L, X)` for rank-two `L`; see [`beta1_rank2`].
    BetaOneRankTwo { m: usize, chi_m: i8, t: usize, chi_l: i8, chi_u1: i8 },
    /// `β₂(M, L, X)` for rank-two `L`.
    BetaTwoRankTwo { is_h: bool },
}

fn hyp(msg: impl Into<String>) -> DensityError {
    DensityError::Hypothesis(msg.into())
}

fn check_sign(s: i8) -> Result<(), DensityError> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(hyp(format!("sign {s} is not ±1")))
    }
}

fn z(n: i64) -> Q {
    q_int(n)
}

fn chi_q(c: i8) -> Q {
    q_int(c as i64)
}

/// `Σ_{i=lo}^{hi} (c·X)^i`.
fn geometric(c: &Q, lo: i64, hi: i64) -> DensityPoly {
    let mut out = DensityPoly::zero();
    for i in lo.max(0)..=hi {
        out = &out + &DensityPoly::monomial(crate::local_ring::pow_q(c, i), i as usize);
    }
    out
}

fn mono(c: Q, k: i64) -> DensityPoly {
    DensityPoly::monomial(c, k as usize)
}

/// Evaluates a formula.
pub fn closed_alpha(cfg: &RingConfig, f: &Formula) -> Result<ClosedValue, DensityError> {
    let q = cfg.q();
    let chi_m1 = cfg.legendre(&q_int(-1));
    use ClosedValue::{Poly, Value};
    Ok(match *f {
        Formula::RankOneSab { m, chi_s, nu1, nu2, a, b, vt, chi_t } => {
            for s in [chi_s, nu1, nu2, chi_t] {
                check_sign(s)?;
            }
            Poly(rank_one_sab(q, chi_m1, m, chi_s, nu1, nu2, a, b, vt, chi_t)?)
        }
        Formula::RankOnePlane { m, chi_s, i, vt, chi_t } => {
            check_sign(chi_s)?;
            check_sign(chi_t)?;
            Poly(rank_one_plane(q, m, chi_s, i, vt, chi_t)?)
        }
        Formula::EvenRankTwo { m, chi_s, a, b, chi_tt } => {
            check_sign(chi_s)?;
            check_sign(chi_tt)?;
            Poly(even_rank_two(q, m, chi_s, a, b, chi_tt)?)
        }
        Formula::BinaryRankTwo { chi_s, a, b, chi_tt } => {
            check_sign(chi_s)?;
            check_sign(chi_tt)?;
            Poly(binary_rank_two(q, chi_s, a, b, chi_tt)?)
        }
        Formula::OddRankTwo { m, chi_s, a, b, chi_u1, chi_u2 } => {
            for s in [chi_s, chi_u1, chi_u2] {
                check_sign(s)?;
            }
            Poly(odd_rank_two(cfg, m, chi_s, a, b, chi_u1, chi_u2)?)
        }
        Formula::DiagOneDifference { a, chi_tt } => {
            check_sign(chi_tt)?;
            if a < 0 {
                return Err(hyp("need a ≥ 0"));
            }
            if chi_tt == 1 {
                Value(Q::one() + (1..=a).map(|i| z(2) * qpow(q, i)).fold(Q::zero(), |s, t| s + t))
            } else {
                Value(Q::one())
            }
        }
        Formula::PrimDiag { a, b, c, chi } => {
            check_sign(chi)?;
            if !(0 < a && a <= b && b <= c) {
                return Err(hyp("need 0 < a ≤ b ≤ c"));
            }
            Value(Q::one() + chi_q(chi) * qpow(q, a) * (qpow(q, a) - qpow(q, b)) - qpow(q, a + b))
        }
        Formula::PrimPlane { a, c } => {
            if a <= 0 || a % 2 == 0 || c < 0 {
                return Err(hyp("need a odd and positive, c ≥ 0"));
            }
            Value(if a <= 2 * c { Q::one() - qpow(q, a) } else { Q::one() - qpow(q, 2 * c + 1) })
        }
        Formula::BetaHk { k, n, t_o } => Value(beta_hk(q, k, n, t_o)),
        Formula::BetaRankOne { m, chi_m, vt_positive, chi_l } => {
            check_sign(chi_m)?;
            check_sign(chi_l)?;
            let [b0, _] = super::engine::beta_rank1(q, m, chi_m, vt_positive, chi_l);
            Poly(b0)
        }
        Formula::BetaZeroRankTwo { m, chi_m, t, chi_l, chi_u1 } => Poly(beta0_rank2(q, m, chi_m, t, chi_l, chi_u1)?),
        Formula::BetaOneRankTwo { m, chi_m, t, chi_l, chi_u1 } => Poly(beta1_rank2(q, m, chi_m, t, chi_l, chi_u1)?),
        Formula::BetaTwoRankTwo { is_h } => {
            let base = DensityPoly::one_minus(Q::one());
            Poly(if is_h { base } else { &base * &DensityPoly::one_minus(z((q * q) as i64)) })
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn rank_one_sab(
    q: u64,
    chi_m1: i8,
    m: usize,
    chi_s: i8,
    nu1: i8,
    nu2: i8,
    a: i64,
    b: i64,
    vt: i64,
    chi_t: i8,
) -> Result<DensityPoly, DensityError> {
    if m == 0 || !(0 <= a && a <= b && b <= vt) {
        return Err(hyp("need m ≥ 1 and 0 ≤ a ≤ b ≤ v(t)"));
    }
    let mi = m as i64;
    let qq = z(q as i64);
    let chi_sab = chi_s * chi_m1 * nu1 * nu2;
    let mut out = DensityPoly::one();
    if m % 2 == 1 {
        let c = chi_q(chi_s * chi_m1 * nu1) * (&qq - Q::one());
        for s in a + 1..=b {
            out = &out + &mono(&c * qpow(q, -mi * s + a + (mi - 1) / 2), s);
        }
        let top = chi_q(chi_sab * chi_t) * qpow(q, -(mi + 1) * vt + a + b - (mi + 1) / 2);
        out = &out + &mono(top, vt + 1);
    } else {
        let c = chi_q(chi_s) * (&qq - Q::one());
        for s in 1..=a {
            out = &out + &mono(&c * qpow(q, -(mi - 1) * s + mi / 2 - 1), s);
        }
        let c2 = chi_q(chi_sab) * (&qq - Q::one());
        for s in b + 1..=vt {
            out = &out + &mono(&c2 * qpow(q, a + b - (mi + 1) * s + mi / 2), s);
        }
        let top = -chi_q(chi_sab) * qpow(q, a + b - (mi + 1) * vt - 1 - mi / 2);
        out = &out + &mono(top, vt + 1);
    }
    Ok(out)
}

fn rank_one_plane(q: u64, m: usize, chi_s: i8, i: i64, vt: i64, chi_t: i8) -> Result<DensityPoly, DensityError> {
    if m % 2 == 0 || i < 0 || vt < 0 {
        return Err(hyp("need odd m, i ≥ 0, v(t) ≥ 0"));
    }
    let mi = m as i64;
    let e = if i <= 2 * vt {
        -(vt + 1) * (mi + 1) + (mi + 1) / 2 + i
    } else {
        -(vt + 1) * (mi - 1) + (mi - 1) / 2
    };
    Ok(&DensityPoly::one() + &mono(chi_q(chi_s * chi_t) * qpow(q, e), vt + 1))
}

fn even_rank_two(q: u64, m: usize, chi_s: i8, a: i64, b: i64, chi_tt: i8) -> Result<DensityPoly, DensityError> {
    if m < 2 || m % 2 == 1 || (m == 2 && chi_s == -1) || !(0 <= a && a <= b) {
        return Err(hyp("need isotropic S of even rank and 0 ≤ a ≤ b"));
    }
    let mi = m as i64;
    let qq = z(q as i64);
    let one = Q::one();
    let y = qpow(q, 2 - mi);
    let x = DensityPoly::x();
    let one_minus_x = DensityPoly::one_minus(one.clone());
    let cs = chi_q(chi_s);
    let ct = chi_q(chi_tt);
    let ypow = |k: i64| mono(crate::local_ring::pow_q(&y, k), k);

    let mut inner = DensityPoly::zero();
    for d in 1..=a {
        inner = &inner + &ypow(d).scale(&(qpow(q, d) - &one));
    }
    let tail = &ypow(b + 1) * &geometric(&qpow(q, 1 - mi), 0, a);
    inner = &inner + &tail.scale(&(&ct * qpow(q, a)));
    let gamma = inner.scale(&(&cs * qpow(q, mi / 2)));

    let t1 = &one_minus_x * &(&geometric(&y, 0, a) + &gamma);
    let t2 = {
        let f = &qq * (&one - &cs * qpow(q, -mi / 2));
        let g = &DensityPoly::one() + &ypow(b + 1).scale(&(&cs * &ct * qpow(q, (mi - 2) / 2)));
        &(&x * &ypow(a)).scale(&f) * &g
    };
    let t3 = {
        let f = &one - qpow(q, -(mi - 1)) + (&qq - &one) * &cs * qpow(q, -mi / 2);
        let g = &(&geometric(&y, 0, a - 1).scale(&qq) + &gamma) - &ypow(a + b + 1).scale(&(&cs * &ct * qpow(q, mi / 2)));
        (&x * &g).scale(&f)
    };
    Ok(&(&t1 + &t2) + &t3)
}

fn binary_rank_two(q: u64, chi_s: i8, a: i64, b: i64, chi_tt: i8) -> Result<DensityPoly, DensityError> {
    if !(0 <= a && a <= b) {
        return Err(hyp("need 0 ≤ a ≤ b"));
    }
    let qq = z(q as i64);
    let one = Q::one();
    let cs = chi_q(chi_s);
    let ct = chi_q(chi_tt);
    let one_minus_x = DensityPoly::one_minus(one.clone());
    let t1 = (&one_minus_x * &geometric(&qq, 0, a)).scale(&(&one + &cs + &qq * &cs));
    let t2 = (&(&mono(one.clone(), b + 1) * &one_minus_x) * &geometric(&qpow(q, -1), 0, a)).scale(&(-&ct * qpow(q, a + 1)));
    let t3 = (&mono(one.clone(), a + b + 2) + &DensityPoly::constant(&cs * &ct)).scale(&(-&ct * (&one + &qq)));
    let t4 = (&mono(one.clone(), a + 1) * &(&DensityPoly::one() + &mono(ct.clone(), b - a))).scale(&((&one + &cs) * qpow(q, a + 1)));
    Ok(&(&(&t1 + &t2) + &t3) + &t4)
}

/// Evaluated through the rank-one induction: peel `u₁(-π₀)^a` down to a unit,
/// `α = Σ_{i=0}^a (q^{2-m}X)^{a-i} [(1-X)·A₁(i)(q²X) + q·β₀(i)·A₀(i)]`, each `A`
/// a rank-one density of a diagonal form.
#[allow(clippy::too_many_arguments)]
fn odd_rank_two(
    cfg: &RingConfig,
    m: usize,
    chi_s: i8,
    a: i64,
    b: i64,
    chi_u1: i8,
    chi_u2: i8,
) -> Result<DensityPoly, DensityError> {
    if m < 3 || m % 2 == 0 || !(0 <= a && a <= b) {
        return Err(hyp("need odd m ≥ 3 and 0 ≤ a ≤ b"));
    }
    let q = cfg.q();
    let mi = m as i64;
    let one = Q::one();
    let chi_m1 = cfg.legendre(&q_int(-1));
    let det_s = unimodular_sign(cfg, m, chi_s);
    let y = qpow(q, 2 - mi);
    let one_minus_x = DensityPoly::one_minus(one.clone());
    let mut out = DensityPoly::zero();
    for i in 0..=a {
        let mut f1 = DiagForm::unimodular(m, det_s);
        f1.unary.push((i, chi_m1 * chi_u1));
        let a1 = alpha_rank1(cfg, &f1, b, chi_u2).rescale(&z((q * q) as i64));
        let (b0, f0) = if i == 0 {
            let b0 = &one + chi_q(chi_s * chi_u1) * qpow(q, -(mi - 1) / 2);
            (b0, DiagForm::unimodular(m - 1, det_s * chi_u1))
        } else {
            let mut f0 = DiagForm::unimodular(m - 2, unimodular_sign(cfg, m - 2, chi_s));
            f0.unary.push((i, chi_m1 * chi_u1));
            (&one - qpow(q, 1 - mi), f0)
        };
        let a0 = alpha_rank1(cfg, &f0, b, chi_u2);
        let p_i = &(&one_minus_x * &a1) + &(&DensityPoly::x() * &a0).scale(&(z(q as i64) * b0));
        out = &out + &(&mono(crate::local_ring::pow_q(&y, a - i), a - i) * &p_i);
    }
    Ok(out)
}

/// `β(H^k, L) = ∏_{k-(n+t_o)/2 < i ≤ k} (1 - q^{-2i})`.
pub fn beta_hk(q: u64, k: usize, n: usize, t_o: usize) -> Q {
    let k = k as i64;
    // lower bound is exclusive and may be a half-integer
    let lo2 = 2 * k - (n + t_o) as i64;
    let mut out = Q::one();
    for i in (lo2.div_euclid(2))..=k {
        if 2 * i > lo2 {
            out *= Q::one() - qpow(q, -2 * i);
        }
    }
    out
}

/// `β₀(M, L, X)` for unimodular `M` of rank `m` and rank-two `L`, where `t = t(L)`.
/// For `t = 1`, `L = Diag(u₁, u₂(-π₀)^b)` with `b > 0` and `chi_u1 = χ(u₁)`.
pub fn beta0_rank2(q: u64, m: usize, chi_m: i8, t: usize, chi_l: i8, chi_u1: i8) -> Result<DensityPoly, DensityError> {
    let mi = m as i64;
    let qq = z(q as i64);
    let one = Q::one();
    let cm = chi_q(chi_m);
    let cl = chi_q(chi_l);
    let c = if m % 2 == 1 {
        match t {
            0 => &qq * (&one - qpow(q, 1 - mi)),
            1 => &qq * (&one + &cm * chi_q(chi_u1) * qpow_half(q, 3 - mi)?) * (&one - qpow(q, 1 - mi)),
            2 => &qq * (&one - qpow(q, 1 - mi)) * (&one - qpow(q, 3 - mi)),
            _ => return Err(hyp("t(L) ≤ 2")),
        }
    } else {
        match t {
            0 => &qq * (&one - &cl * qpow(q, 1 - mi) + &cl * &cm * (&qq - &cl) * qpow(q, -mi / 2)),
            1 => &qq * (&one - &cm * qpow(q, -mi / 2)) * (&one - qpow(q, 2 - mi)),
            2 => &qq * ((&one - qpow(q, 2 - mi)) + &cm * (&qq * &qq - &one) * qpow(q, -mi / 2)) * (&one - qpow(q, 2 - mi)),
            _ => return Err(hyp("t(L) ≤ 2")),
        }
    };
    Ok(DensityPoly::monomial(c, 2))
}

/// `β₁(M, L, X)` for unimodular `M` of rank `m` and rank-two `L`.
pub fn beta1_rank2(q: u64, m: usize, chi_m: i8, t: usize, chi_l: i8, chi_u1: i8) -> Result<DensityPoly, DensityError> {
    let mi = m as i64;
    let qq = z(q as i64);
    let one = Q::one();
    let cm = chi_q(chi_m);
    let even = if m % 2 == 0 { one.clone() } else { Q::zero() };
    let c = match t {
        2 => &qq * (&qq + &one) * ((&one - qpow(q, 1 - mi)) + &even * &cm * (&qq - &one) * qpow(q, -mi / 2)),
        1 if m % 2 == 1 => &qq * (&one + &qq - qpow(q, 1 - mi) + &cm * chi_q(chi_u1) * qpow_half(q, 3 - mi)?),
        1 => &qq * (&one + &qq - qpow(q, 1 - mi) - &cm * qpow(q, -mi / 2)),
        0 if chi_l == 1 => &qq * (&qq + &one - z(2) * qpow(q, 1 - mi) + &even * &cm * (&qq - &one) * qpow(q, -mi / 2)),
        0 => &qq * (&qq + &one) * (&one - &even * &cm * qpow(q, -mi / 2)),
        _ => return Err(hyp("t(L) ≤ 2")),
    };
    let x = DensityPoly::x();
    Ok((&x * &DensityPoly::one_minus(one)).scale(&c))
}

/// `q^{e/2}` for even `e`.
fn qpow_half(q: u64, e: i64) -> Result<Q, DensityError> {
    if e % 2 != 0 {
        return Err(hyp("half-integral power of q"));
    }
    Ok(qpow(q, e / 2))
}

/// Least `ℓ` with `π^ℓ T^{-1}` integral, from the fundamental invariants of `T`.
pub fn cancel_index(fund: &[i64]) -> i64 {
    fund.iter().copied().max().unwrap_or(0)
}

/// Whether appending a block of valuation `v_extra` leaves `α(·, T)` unchanged.
pub fn cancels(fund: &[i64], v_extra: i64) -> bool {
    v_extra > cancel_index(fund)
}

/// `|O(V)(F_q)|` for a nondegenerate quadratic space of dimension `dim` and sign `eps`
/// (`eps` is ignored in odd dimension).
pub fn orthogonal_group_order(q: u64, dim: usize, eps: i8) -> Q {
    if dim == 0 {
        return Q::one();
    }
    let d = dim as i64;
    let mut out = z(2) * qpow(q, d * (d - 1) / 2);
    if dim % 2 == 1 {
        for s in 1..=(d - 1) / 2 {
            out *= Q::one() - qpow(q, -2 * s);
        }
    } else {
        out *= Q::one() - chi_q(eps) * qpow(q, -d / 2);
        for s in 1..d / 2 {
            out *= Q::one() - qpow(q, -2 * s);
        }
    }
    out
}

/// `I(n, d, k) = ∏_{s=1}^k (q^{d-s+1} - 1)(q^{n-d-s} + 1) / (q^s - 1)`.
pub fn isotropic_product(q: u64, n: i64, d: i64, k: i64) -> Q {
    let one = Q::one();
    let mut out = one.clone();
    for s in 1..=k {
        out *= (qpow(q, d - s + 1) - &one) * (qpow(q, n - d - s) + &one) / (qpow(q, s) - &one);
    }
    out
}
