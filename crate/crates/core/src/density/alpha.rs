//! Density polynomials from counting: evaluate `α(M ⊥ H^k, L)` at several `k` and
//! interpolate in `X = q^{-2k}`.

use super::oracle::{count_series, CountOptions, Mode, DEFAULT_WORK_BUDGET};
use super::poly::{qpow, DensityPoly};
use super::DensityError;
use crate::lattice::{invariants, superlattices, Gram, Matrix};
use crate::local_ring::{RingConfig, Q};

#[derive(Clone, Copy, Debug)]
pub struct AlphaOptions {
    /// Counting level; `None` picks [`default_level`].
    pub d: Option<u32>,
    /// Interpolation degree cap; `None` uses `n·(max fund + 2)`.
    pub max_degree: Option<usize>,
    pub budget: u64,
}

impl Default for AlphaOptions {
    fn default() -> Self {
        AlphaOptions { d: None, max_degree: None, budget: DEFAULT_WORK_BUDGET }
    }
}

fn max_fund(cfg: &RingConfig, g: &Gram) -> Result<i64, DensityError> {
    if g.rank() == 0 {
        return Ok(0);
    }
    Ok(*invariants(cfg, g)?.fund.last().unwrap())
}

/// Smallest level with `π^{2d}` strictly above `π^{f+1}`, `f` the largest Jordan
/// scale of `M` and `L`.
pub fn default_level(cfg: &RingConfig, m: &Gram, l: &Gram) -> Result<u32, DensityError> {
    let top = max_fund(cfg, m)?.max(max_fund(cfg, l)?).max(0);
    Ok(((top + 1) / 2 + 1) as u32)
}

pub fn default_degree_cap(cfg: &RingConfig, l: &Gram) -> Result<usize, DensityError> {
    let top = max_fund(cfg, l)?.max(-1);
    Ok(l.rank().max(1) * (top + 2) as usize)
}

/// Interpolates stratum `stratum` of the counts in `mode`. The degree grows until
/// the fit through `k = 0..=D` also matches the next two points.
fn interpolate_counts(
    cfg: &RingConfig,
    m: &Gram,
    l: &Gram,
    mode: Mode,
    opts: AlphaOptions,
) -> Result<Vec<DensityPoly>, DensityError> {
    let d = match opts.d {
        Some(d) => d,
        None => default_level(cfg, m, l)?,
    };
    let cap = match opts.max_degree {
        Some(c) => c,
        None => default_degree_cap(cfg, l)?,
    };
    let copts = CountOptions::new(d).with_mode(mode).with_budget(opts.budget);
    let q = cfg.q();
    let xs: Vec<Q> = (0..=cap + 2).map(|k| qpow(q, -2 * k as i64)).collect();
    let mut kmax = 3.min(cap + 2);
    let mut series = count_series(cfg, m, l, kmax, copts)?;
    let strata = series[0].counts.len();
    let mut out = Vec::with_capacity(strata);
    for s in 0..strata {
        let mut found = None;
        for deg in 0..=cap {
            while kmax < deg + 2 {
                kmax = (2 * kmax).min(cap + 2);
                series = count_series(cfg, m, l, kmax, copts)?;
            }
            let pts: Vec<(Q, Q)> =
                (0..=deg).map(|k| (xs[k].clone(), series[k].counts[s].normalized.clone())).collect();
            let fit = DensityPoly::interpolate(&pts);
            let holds = (deg + 1..=deg + 2).all(|k| fit.eval(&xs[k]) == series[k].counts[s].normalized);
            if holds {
                found = Some(fit);
                break;
            }
        }
        out.push(found.ok_or(DensityError::NoStabilization(cap))?);
    }
    Ok(out)
}

/// `α(M, L, X)` built from counts.
pub fn alpha_poly(cfg: &RingConfig, m: &Gram, l: &Gram) -> Result<DensityPoly, DensityError> {
    alpha_poly_with(cfg, m, l, AlphaOptions::default())
}

pub fn alpha_poly_with(cfg: &RingConfig, m: &Gram, l: &Gram, opts: AlphaOptions) -> Result<DensityPoly, DensityError> {
    Ok(interpolate_counts(cfg, m, l, Mode::Full, opts)?.remove(0))
}

/// `β(M, L, X)^{(ℓ)}`, the first `ℓ` vectors independent mod `π`.
pub fn beta_poly(cfg: &RingConfig, m: &Gram, l: &Gram, ell: usize, opts: AlphaOptions) -> Result<DensityPoly, DensityError> {
    Ok(interpolate_counts(cfg, m, l, Mode::Primitive(ell), opts)?.remove(0))
}

/// `β_i(M, L, X)` for `i = 0..=ℓ`, split by the rank of the projection to `H^k`.
pub fn beta_strata(cfg: &RingConfig, m: &Gram, l: &Gram, ell: usize, opts: AlphaOptions) -> Result<Vec<DensityPoly>, DensityError> {
    interpolate_counts(cfg, m, l, Mode::Stratified(ell), opts)
}

/// `α'(M, L) = -dα/dX` at `X = 1`.
pub fn alpha_prime(cfg: &RingConfig, m: &Gram, l: &Gram) -> Result<Q, DensityError> {
    Ok(alpha_poly(cfg, m, l)?.derivative_prime())
}

/// `β(M, L₁ ⊕ L₂, X)^{(n₁)}` from full densities: `α(M, L, X)` minus the
/// alternating sum over `L₁ ⊂ L₁' ⊂ π^{-1}L₁` with weights
/// `(-1)^{i-1} q^{i(i-1)/2 + i(n-m)} X^i`, `i = dim L₁'/L₁`.
pub fn beta_prim_poly(cfg: &RingConfig, m: &Gram, l: &Gram, n1: usize, opts: AlphaOptions) -> Result<DensityPoly, DensityError> {
    let n = l.rank();
    if n1 == 0 || n1 > n {
        return Err(DensityError::Hypothesis(format!("primitive prefix {n1} must lie in 1..={n}")));
    }
    let mut out = alpha_poly_with(cfg, m, l, opts)?;
    let l1 = l.sub(&(0..n1).collect::<Vec<_>>());
    let (nn, mm) = (n as i64, m.rank() as i64);
    for i in 1..=n1 {
        let ii = i as i64;
        let mut w = qpow(cfg.q(), ii * (ii - 1) / 2 + ii * (nn - mm));
        if i % 2 == 0 {
            w = -w;
        }
        let weight = DensityPoly::monomial(w, i);
        for s in superlattices(cfg, &l1, i) {
            let coords = Matrix::block_diag(&[s.coords, Matrix::identity(n - n1, cfg.pi0_int())], cfg.pi0_int());
            let a = alpha_poly_with(cfg, m, &l.transform(&coords), opts)?;
            out = &out - &(&weight * &a);
        }
    }
    Ok(out)
}
