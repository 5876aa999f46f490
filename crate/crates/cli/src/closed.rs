//! Pick the closed-form density formula that applies to a pair `(M, L)`.

use anyhow::{anyhow, bail, Result};
use ramified_kr::density::Formula;
use ramified_kr::lattice::{jordan_form, sign, Block, Gram};
use ramified_kr::{RingConfig, Q};

fn chi(cfg: &RingConfig, x: &Q) -> Result<i8> {
    cfg.chi(x).map_err(|e| anyhow!("{e}"))
}

/// `(exp/2, χ(unit))` for a unary block `u·(-π₀)^{exp/2}`.
fn unary(cfg: &RingConfig, value: &Q, exp: i64) -> Result<(i64, i8)> {
    let k = exp / 2;
    Ok((k, chi(cfg, &(value / cfg.neg_pi0_pow(k)))?))
}

fn unaries(cfg: &RingConfig, g: &Gram) -> Result<Option<Vec<(i64, i8)>>> {
    let jf = jordan_form(cfg, g)?;
    let mut out = Vec::new();
    for b in &jf.blocks {
        match b {
            Block::Unary { value, exp } => out.push(unary(cfg, value, *exp)?),
            Block::Binary { .. } => return Ok(None),
        }
    }
    out.sort();
    Ok(Some(out))
}

/// Sign of the unimodular lattice with unit classes `units`.
fn unimodular_sign(cfg: &RingConfig, units: &[i8]) -> i8 {
    let m = units.len();
    let det: i8 = units.iter().product();
    let flip = if (m * m.saturating_sub(1) / 2) % 2 == 1 { cfg.legendre(&Q::from_integer((-1).into())) } else { 1 };
    det * flip
}

/// The formula evaluating `α(M, L, X)`, when one applies.
pub fn formula_for(cfg: &RingConfig, m: &Gram, l: &Gram) -> Result<Formula> {
    match l.rank() {
        1 => rank_one(cfg, m, l),
        2 => rank_two(cfg, m, l),
        n => bail!("no closed form for a target of rank {n}"),
    }
}

fn rank_one(cfg: &RingConfig, m: &Gram, l: &Gram) -> Result<Formula> {
    let (vt, chi_t) = unaries(cfg, l)?.and_then(|v| v.first().copied()).ok_or_else(|| anyhow!("bad target"))?;
    let jf = jordan_form(cfg, m)?;
    let planes: Vec<i64> = jf.blocks.iter().filter_map(|b| matches!(b, Block::Binary { .. }).then(|| b.exp())).collect();
    let mut units = Vec::new();
    let mut scaled = Vec::new();
    for b in &jf.blocks {
        if let Block::Unary { value, exp } = b {
            let (k, c) = unary(cfg, value, *exp)?;
            if k == 0 {
                units.push(c);
            } else {
                scaled.push((k, c));
            }
        }
    }
    match (planes.as_slice(), scaled.len()) {
        ([i], 0) if !units.is_empty() => {
            return Ok(Formula::RankOnePlane { m: units.len(), chi_s: unimodular_sign(cfg, &units), i: *i, vt, chi_t });
        }
        ([], _) => {}
        _ => bail!("no closed form: M must be S ⊥ H_i or S ⊥ Diag(ν₁(-π₀)^a, ν₂(-π₀)^b)"),
    }
    // Fill the two distinguished slots from the unimodular part when needed.
    scaled.sort();
    while scaled.len() < 2 {
        let c = units.pop().ok_or_else(|| anyhow!("no closed form: M has rank below 3"))?;
        scaled.insert(0, (0, c));
    }
    if scaled.len() > 2 || units.is_empty() {
        bail!("no closed form: M must be S ⊥ Diag(ν₁(-π₀)^a, ν₂(-π₀)^b) with S unimodular");
    }
    let [(a, nu1), (b, nu2)] = [scaled[0], scaled[1]];
    Ok(Formula::RankOneSab { m: units.len(), chi_s: unimodular_sign(cfg, &units), nu1, nu2, a, b, vt, chi_t })
}

fn rank_two(cfg: &RingConfig, m: &Gram, l: &Gram) -> Result<Formula> {
    let t = unaries(cfg, l)?.ok_or_else(|| anyhow!("no closed form for a non-diagonal rank-two target"))?;
    let s = unaries(cfg, m)?.ok_or_else(|| anyhow!("no closed form: M must be unimodular"))?;
    if s.iter().any(|&(k, _)| k != 0) {
        bail!("no closed form: M must be unimodular");
    }
    let [(a, u1), (b, u2)] = [t[0], t[1]];
    let mr = m.rank();
    let chi_s = sign(cfg, m);
    let chi_tt = sign(cfg, l);
    Ok(match mr {
        2 if chi_s == -1 => Formula::BinaryRankTwo { chi_s, a, b, chi_tt },
        r if r % 2 == 0 => Formula::EvenRankTwo { m: r, chi_s, a, b, chi_tt },
        r if r >= 3 => Formula::OddRankTwo { m: r, chi_s, a, b, chi_u1: u1, chi_u2: u2 },
        _ => bail!("no closed form for rank-one M and rank-two L"),
    })
}
