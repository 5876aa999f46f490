//! Brute-force representation counts `|I(M ⊥ H^k, L, d)|`.
//!
//! A tuple `x = (x_1..x_n)` of vectors in `M/π₀^d M` contributes its moment matrix
//! `T(x) = ((x_i, x_j))`. The moment matrix is additive over an orthogonal splitting
//! of `M`, so the count is a convolution over the blocks of `M` of per-block
//! histograms on the finite group of moment matrices modulo `π₀^d Herm^∨`.
//!
//! Moment coordinates: diagonal entries mod `p^d`; off-diagonal entries `T_ij`
//! (i < j) are stored as `π·T_ij mod π^{2d}`, a pair in `(Z/p^d)²`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num::bigint::{BigInt, BigUint};
use num::traits::{ToPrimitive, Zero};

use super::poly::qpow;
use super::DensityError;
use crate::ff;
use crate::lattice::{jordan_key, Component, Gram};
use crate::local_ring::{residue_mod, RingConfig, Q};

/// Which tuples are counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// All tuples.
    Full,
    /// The first `ell` vectors are independent modulo `π`.
    Primitive(usize),
    /// As `Primitive`, bucketed by the rank of the projection of the first `ell`
    /// vectors to the added `H^k` summand modulo `π`.
    Stratified(usize),
}

impl Mode {
    fn ell(&self) -> usize {
        match self {
            Mode::Full => 0,
            Mode::Primitive(l) | Mode::Stratified(l) => *l,
        }
    }
}

/// A raw and normalized count at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepCount {
    pub d: u32,
    pub raw: BigUint,
    pub normalized: Q,
}

/// Counts for `M ⊥ H^k`, one entry per stratum (a single entry unless stratified).
#[derive(Clone, Debug)]
pub struct SeriesPoint {
    pub k: usize,
    pub counts: Vec<RepCount>,
}

impl SeriesPoint {
    pub fn total(&self) -> Q {
        self.counts.iter().fold(Q::zero(), |a, c| a + &c.normalized)
    }
}

/// Default cap on multiply-add operations per count.
pub const DEFAULT_WORK_BUDGET: u64 = 20_000_000_000;

/// Largest moment group the dense tables may index.
pub const MAX_STATES: u64 = 1 << 22;

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    pub d: u32,
    pub mode: Mode,
    pub budget: u64,
}

impl CountOptions {
    pub fn new(d: u32) -> Self {
        CountOptions { d, mode: Mode::Full, budget: DEFAULT_WORK_BUDGET }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

/// Subspaces of `F_p^ell` with join and span tables.
struct Subspaces {
    p: u64,
    ell: usize,
    dims: Vec<usize>,
    join: Vec<u16>,
    span_of_vec: Vec<u16>,
    count: usize,
    full: u16,
}

impl Subspaces {
    fn new(p: u64, ell: usize) -> Self {
        let mut bases: Vec<Vec<Vec<u64>>> = Vec::new();
        let mut dims = Vec::new();
        for k in 0..=ell {
            for b in ff::subspaces(ell, k, p) {
                bases.push(b);
                dims.push(k);
            }
        }
        let count = bases.len();
        let index: HashMap<Vec<Vec<u64>>, u16> =
            bases.iter().enumerate().map(|(i, b)| (b.clone(), i as u16)).collect();
        let canon = |rows: Vec<Vec<u64>>| -> u16 { index[&rref(&rows, p, ell)] };
        let mut join = vec![0u16; count * count];
        for a in 0..count {
            for b in 0..count {
                let mut rows = bases[a].clone();
                rows.extend(bases[b].iter().cloned());
                join[a * count + b] = canon(rows);
            }
        }
        let nvec = p.pow(ell as u32) as usize;
        let span_of_vec = (0..nvec)
            .map(|v| {
                let digits: Vec<u64> = (0..ell).map(|i| (v as u64 / p.pow(i as u32)) % p).collect();
                canon(vec![digits])
            })
            .collect();
        let full = (0..count).find(|&i| dims[i] == ell).unwrap() as u16;
        Subspaces { p, ell, dims, join, span_of_vec, count, full }
    }

    fn join(&self, a: u16, b: u16) -> u16 {
        self.join[a as usize * self.count + b as usize]
    }

    fn vec_index(&self, coords: impl Iterator<Item = u64>) -> usize {
        let mut idx = 0usize;
        let mut w = 1usize;
        for c in coords.take(self.ell) {
            idx += (c % self.p) as usize * w;
            w *= self.p as usize;
        }
        idx
    }
}

/// Reduced row echelon form of a set of rows over `F_p`, dropping zero rows.
fn rref(rows: &[Vec<u64>], p: u64, n: usize) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let mut r = 0;
    for c in 0..n {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let inv = ff::inv_mod(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..n {
                    m[i][j] = (m[i][j] + p - f * m[r][j] % p) % p;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

/// Digit-wise addition on `(Z/m)^digits` encoded in mixed radix.
struct Adder {
    m: u64,
    digits: usize,
    lo_size: usize,
    add_lo: Vec<u32>,
    add_hi: Vec<u32>,
}

impl Adder {
    fn new(m: u64, digits: usize) -> Self {
        if digits <= 1 {
            return Adder { m, digits, lo_size: 0, add_lo: Vec::new(), add_hi: Vec::new() };
        }
        let lo_digits = digits / 2;
        let hi_digits = digits - lo_digits;
        let table = |k: usize| -> (usize, Vec<u32>) {
            let size = (m as usize).pow(k as u32);
            let mut t = vec![0u32; size * size];
            for a in 0..size {
                for b in 0..size {
                    t[a * size + b] = digitwise_add(a, b, m, k) as u32;
                }
            }
            (size, t)
        };
        let (lo_size, add_lo) = table(lo_digits);
        let (_, add_hi) = table(hi_digits);
        Adder { m, digits, lo_size, add_lo, add_hi }
    }

    #[inline]
    fn add(&self, x: usize, y: usize) -> usize {
        if self.digits <= 1 {
            return (x + y) % self.m as usize;
        }
        let (xh, xl) = (x / self.lo_size, x % self.lo_size);
        let (yh, yl) = (y / self.lo_size, y % self.lo_size);
        let hi_size = self.add_hi.len().isqrt();
        self.add_hi[xh * hi_size + yh] as usize * self.lo_size + self.add_lo[xl * self.lo_size + yl] as usize
    }

    fn neg(&self, x: usize) -> usize {
        let m = self.m as usize;
        let mut out = 0;
        let mut w = 1;
        let mut x = x;
        for _ in 0..self.digits.max(1) {
            let d = x % m;
            x /= m;
            out += ((m - d) % m) * w;
            w *= m;
        }
        out
    }
}

fn digitwise_add(a: usize, b: usize, m: u64, k: usize) -> usize {
    let m = m as usize;
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    let mut w = 1;
    for _ in 0..k {
        out += ((a % m + b % m) % m) * w;
        a /= m;
        b /= m;
        w *= m;
    }
    out
}

/// Arithmetic in `O_F/π^{2d} ≅ (Z/p^d)²`.
#[derive(Clone, Copy)]
struct Level {
    p: u64,
    m: u64,
    pi0: u64,
}

impl Level {
    #[inline]
    fn mul(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        let m = self.m;
        (
            (x.0 * y.0 + self.pi0 * (x.1 * y.1 % m)) % m,
            (x.0 * y.1 + x.1 * y.0) % m,
        )
    }

    #[inline]
    fn conj(&self, x: (u64, u64)) -> (u64, u64) {
        (x.0, (self.m - x.1) % self.m)
    }
}

/// Histogram of one block: `(moment index, column-span id) -> count`.
type Hist = Vec<(u32, u16, u128)>;

/// A distribution over `(moment, span)` cells; the true count is `v[i]·p^shift`.
#[derive(Clone, Debug)]
struct Dist {
    v: Vec<u128>,
    shift: u32,
}

impl Dist {
    /// Divides out the largest common power of `p`.
    fn normalize(&mut self, p: u64) {
        let p = p as u128;
        loop {
            let mut any = false;
            for &x in &self.v {
                if x != 0 {
                    any = true;
                    if x % p != 0 {
                        return;
                    }
                }
            }
            if !any {
                return;
            }
            for x in self.v.iter_mut() {
                *x /= p;
            }
            self.shift += 1;
        }
    }
}

struct Ctx {
    n: usize,
    level: Level,
    size: usize,
    adder: Adder,
    subs: Subspaces,
}

impl Ctx {
    fn new(cfg: &RingConfig, n: usize, d: u32, ell: usize) -> Self {
        let p = cfg.p;
        let m = p.pow(d);
        let pi0 = (cfg.pi0_int() as u64) % m;
        let digits = n * n;
        let size = (m as usize).pow(digits as u32);
        Ctx {
            n,
            level: Level { p, m, pi0 },
            size,
            adder: Adder::new(m, digits),
            subs: Subspaces::new(p, ell),
        }
    }

    fn encode(&self, digits: &[u64]) -> usize {
        let m = self.level.m as usize;
        digits.iter().rev().fold(0usize, |acc, &d| acc * m + d as usize)
    }

    fn pair_offset(&self, i: usize, j: usize) -> usize {
        // pairs (i<j) in lexicographic order after the n diagonal digits
        let n = self.n;
        let before: usize = (0..i).map(|r| n - 1 - r).sum();
        n + 2 * (before + (j - i - 1))
    }

    fn from_dense(&self, dense: &[u64]) -> Hist {
        let ns = self.subs.count;
        dense
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(idx, &c)| ((idx / ns) as u32, (idx % ns) as u16, c as u128))
            .collect()
    }

    /// Histogram of the unary block `⟨c⟩`.
    fn unary_hist(&self, c: u64) -> Hist {
        let n = self.n;
        let lv = self.level;
        let m = lv.m;
        let ns = self.subs.count;
        let mut dense = vec![0u64; self.size * ns];
        let elems: Vec<(u64, u64)> = (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
        let mut digits = vec![0u64; n * n];
        for_each_tuple(elems.len(), n, |ys| {
            let y: Vec<(u64, u64)> = ys.iter().map(|&i| elems[i]).collect();
            for i in 0..n {
                let nm = lv.mul(lv.conj(y[i]), y[i]).0;
                digits[i] = c * nm % m;
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let (s, t) = lv.mul(lv.conj(y[i]), y[j]);
                    let off = self.pair_offset(i, j);
                    digits[off] = c * (lv.pi0 * t % m) % m;
                    digits[off + 1] = c * s % m;
                }
            }
            let col = self.subs.vec_index(y.iter().map(|e| e.0));
            let sub = self.subs.span_of_vec[col] as usize;
            dense[self.encode(&digits) * ns + sub] += 1;
        });
        self.from_dense(&dense)
    }

    /// Histogram of the plane `H_e` (`e` odd, `e ≥ -1`).
    fn hyperbolic_hist(&self, e: i64) -> Hist {
        if self.n == 1 {
            return self.hyperbolic_hist_rank1(e);
        }
        let n = self.n;
        let lv = self.level;
        let m = lv.m;
        let ns = self.subs.count;
        let f = ff::pow_mod(lv.pi0, ((e + 1) / 2) as u64, m);
        let mut dense = vec![0u64; self.size * ns];
        let elems: Vec<(u64, u64)> = (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
        let mut digits = vec![0u64; n * n];
        for_each_tuple(elems.len(), n, |als| {
            let al: Vec<(u64, u64)> = als.iter().map(|&i| elems[i]).collect();
            let acol = self.subs.vec_index(al.iter().map(|e| e.0));
            let aspan = self.subs.span_of_vec[acol];
            for_each_tuple(elems.len(), n, |bes| {
                let be: Vec<(u64, u64)> = bes.iter().map(|&i| elems[i]).collect();
                for i in 0..n {
                    let z = lv.mul(lv.conj(al[i]), be[i]);
                    digits[i] = 2 * f % m * z.1 % m;
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        let x = lv.mul(lv.conj(al[i]), be[j]);
                        let y = lv.mul(lv.conj(be[i]), al[j]);
                        let off = self.pair_offset(i, j);
                        digits[off] = f * ((x.0 + m - y.0) % m) % m;
                        digits[off + 1] = f * ((x.1 + m - y.1) % m) % m;
                    }
                }
                let bcol = self.subs.vec_index(be.iter().map(|e| e.0));
                let sub = self.subs.join(aspan, self.subs.span_of_vec[bcol]) as usize;
                dense[self.encode(&digits) * ns + sub] += 1;
            });
        });
        self.from_dense(&dense)
    }

    /// Rank-one targets: the value is `2f·(α_a β_b - α_b β_a)`, a difference of two
    /// independent products, so the histogram is a convolution of product counts.
    fn hyperbolic_hist_rank1(&self, e: i64) -> Hist {
        let lv = self.level;
        let m = lv.m as usize;
        let p = lv.p as usize;
        let f = ff::pow_mod(lv.pi0, ((e + 1) / 2) as u64, lv.m) as usize;
        let product_counts = |restrict: bool| -> Vec<u128> {
            let mut c = vec![0u128; m];
            let step = if restrict { p } else { 1 };
            for u in (0..m).step_by(step) {
                for w in 0..m {
                    c[u * w % m] += 1;
                }
            }
            c
        };
        let diff = |a: &[u128], b: &[u128]| -> Vec<u128> {
            let mut out = vec![0u128; m];
            for (x, &ca) in a.iter().enumerate() {
                if ca == 0 {
                    continue;
                }
                for (y, &cb) in b.iter().enumerate() {
                    if cb != 0 {
                        out[(x + m - y) % m] += ca * cb;
                    }
                }
            }
            out
        };
        let all = product_counts(false);
        let d_all = diff(&all, &all);
        let value = |x: usize| (2 * f % m * x % m) as u32;
        let mut out: HashMap<(u32, u16), u128> = HashMap::new();
        if self.subs.ell == 0 {
            for (x, &c) in d_all.iter().enumerate() {
                *out.entry((value(x), 0)).or_default() += c;
            }
        } else {
            let zero = product_counts(true);
            let d_zero = diff(&zero, &zero);
            let zero_id = (0..self.subs.count).find(|&i| self.subs.dims[i] == 0).unwrap() as u16;
            for x in 0..m {
                *out.entry((value(x), zero_id)).or_default() += d_zero[x];
                *out.entry((value(x), self.subs.full)).or_default() += d_all[x] - d_zero[x];
            }
        }
        let mut h: Hist = out.into_iter().filter(|(_, c)| *c != 0).map(|((a, s), c)| (a, s, c)).collect();
        h.sort();
        h
    }

    /// `dist ⊛ hist` on the moment group, joining column spans.
    fn convolve(&self, dist: &Dist, hist: &Hist, budget: &mut u64) -> Result<Dist, DensityError> {
        let ns = self.subs.count;
        let support: Vec<usize> = (0..dist.v.len()).filter(|&i| dist.v[i] != 0).collect();
        let work = support.len() as u64 * hist.len() as u64;
        if work > *budget {
            return Err(DensityError::Budget { needed: work, budget: *budget });
        }
        *budget -= work;
        // keep headroom: split the histogram's common p-power into the shift
        let mut h = Dist { v: hist.iter().map(|e| e.2).collect(), shift: 0 };
        h.normalize(self.level.p);
        let mut out = vec![0u128; dist.v.len()];
        for &i in &support {
            let c = dist.v[i];
            let (mom, sub) = (i / ns, (i % ns) as u16);
            for (&(hm, hs, _), &hc) in hist.iter().zip(h.v.iter()) {
                let nm = self.adder.add(mom, hm as usize);
                let nsub = self.subs.join(sub, hs) as usize;
                let slot = &mut out[nm * ns + nsub];
                *slot = slot.checked_add(c.checked_mul(hc).ok_or(DensityError::Overflow)?).ok_or(DensityError::Overflow)?;
            }
        }
        let mut d = Dist { v: out, shift: dist.shift + h.shift };
        d.normalize(self.level.p);
        Ok(d)
    }

    fn delta(&self) -> Dist {
        let mut v = vec![0u128; self.size * self.subs.count];
        let zero_id = (0..self.subs.count).find(|&i| self.subs.dims[i] == 0).unwrap();
        v[zero_id] = 1;
        Dist { v, shift: 0 }
    }
}

/// Calls `f` on every tuple in `{0..base}^len`.
fn for_each_tuple(base: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut t = vec![0usize; len];
    loop {
        f(&t);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            t[i] += 1;
            if t[i] < base {
                break;
            }
            t[i] = 0;
            i += 1;
        }
    }
}

/// One summand of `M`: `⟨c⟩` or `H_e`.
#[derive(Clone, Debug, PartialEq, Eq)]
enum MBlock {
    Unary(Q),
    Hyp(i64),
}

fn blocks_of(cfg: &RingConfig, key: &[Component]) -> Vec<MBlock> {
    let mut out = Vec::new();
    for c in key {
        if c.exp % 2 == 0 {
            let scale = cfg.neg_pi0_pow(c.exp / 2);
            for i in 0..c.rank {
                let u = if i + 1 == c.rank { cfg.unit_with_chi(c.det_chi) } else { Q::from_integer(1.into()) };
                out.push(MBlock::Unary(u * &scale));
            }
        } else {
            for _ in 0..c.rank / 2 {
                out.push(MBlock::Hyp(c.exp));
            }
        }
    }
    out
}

/// Target moment digits of `L`, or `None` if `L ∉ Herm^∨` (no tuple can match).
fn target_digits(cfg: &RingConfig, ctx: &Ctx, l: &Gram) -> Option<Vec<u64>> {
    let n = ctx.n;
    let m = BigInt::from(ctx.level.m);
    let mut digits = vec![0u64; n * n];
    let to_u64 = |x: &Q| residue_mod(x, &m).to_u64().unwrap();
    for i in 0..n {
        let t = l.entry(i, i);
        if !t.a.is_zero() && cfg.vp(&t.a).unwrap() < 0 {
            return None;
        }
        digits[i] = to_u64(&t.a);
        for j in (i + 1)..n {
            let pt = &cfg.pi() * l.entry(i, j);
            if !pt.is_integral(cfg.p) {
                return None;
            }
            let off = ctx.pair_offset(i, j);
            digits[off] = to_u64(&pt.a);
            digits[off + 1] = to_u64(&pt.b);
        }
    }
    Some(digits)
}

type SeriesKey = (u64, i64, usize, u32, usize);

fn h_series_cache() -> &'static Mutex<HashMap<SeriesKey, Arc<Vec<Dist>>>> {
    static CACHE: OnceLock<Mutex<HashMap<SeriesKey, Arc<Vec<Dist>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Distributions of `H^k` for `k = 0..=kmax`, memoized and extended across calls.
fn h_series(cfg: &RingConfig, ctx: &Ctx, d: u32, kmax: usize, budget: &mut u64) -> Result<Arc<Vec<Dist>>, DensityError> {
    let key = (cfg.p, cfg.pi0_int(), ctx.n, d, ctx.subs.ell);
    let cached = h_series_cache().lock().unwrap().get(&key).cloned();
    let mut series: Vec<Dist> = match cached {
        Some(s) if s.len() > kmax => return Ok(s),
        Some(s) => s.as_ref().clone(),
        None => vec![ctx.delta()],
    };
    let hist = ctx.hyperbolic_hist(-1);
    while series.len() <= kmax {
        let next = ctx.convolve(series.last().unwrap(), &hist, budget)?;
        series.push(next);
    }
    let s = Arc::new(series);
    h_series_cache().lock().unwrap().insert(key, s.clone());
    Ok(s)
}

/// Counts for `M ⊥ H^k`, `k = 0..=kmax`, at level `opts.d`.
pub fn count_series(
    cfg: &RingConfig,
    m: &Gram,
    l: &Gram,
    kmax: usize,
    opts: CountOptions,
) -> Result<Vec<SeriesPoint>, DensityError> {
    let d = opts.d;
    if d == 0 {
        return Err(DensityError::BadLevel);
    }
    let n = l.rank();
    let ell = opts.mode.ell();
    if ell > n {
        return Err(DensityError::Hypothesis(format!("primitive prefix {ell} exceeds rank {n}")));
    }
    let m_key = jordan_key(cfg, m)?;
    let m_rank = m.rank();
    let level = cfg.p.checked_pow(d).ok_or(DensityError::Budget { needed: u64::MAX, budget: opts.budget })?;
    let size = level.checked_pow((n * n) as u32).unwrap_or(u64::MAX);
    let hist_cost = if n >= 2 { level.checked_pow((4 * n) as u32).unwrap_or(u64::MAX) } else { level };
    if size > MAX_STATES || hist_cost > opts.budget {
        return Err(DensityError::Budget { needed: size.max(hist_cost), budget: opts.budget.min(MAX_STATES) });
    }
    let ctx = Ctx::new(cfg, n, d, ell);
    let strata = match opts.mode {
        Mode::Stratified(_) => ell + 1,
        _ => 1,
    };
    let zero_point = |k: usize| SeriesPoint {
        k,
        counts: vec![RepCount { d, raw: BigUint::zero(), normalized: Q::zero() }; strata],
    };
    let Some(target) = target_digits(cfg, &ctx, l) else {
        return Ok((0..=kmax).map(zero_point).collect());
    };
    let mut budget = opts.budget;
    let t_idx = ctx.encode(&target);

    // distribution of the M part
    let mut a = ctx.delta();
    let mlevel = BigInt::from(ctx.level.m);
    for b in blocks_of(cfg, &m_key) {
        let hist = match b {
            MBlock::Unary(c) => {
                if cfg.vp(&c).unwrap() < 0 {
                    return Err(DensityError::Hypothesis("M must lie in Herm^∨".into()));
                }
                ctx.unary_hist(residue_mod(&c, &mlevel).to_u64().unwrap())
            }
            MBlock::Hyp(e) => {
                if e < -1 {
                    return Err(DensityError::Hypothesis("M must lie in Herm^∨".into()));
                }
                ctx.hyperbolic_hist(e)
            }
        };
        a = ctx.convolve(&a, &hist, &mut budget)?;
    }
    let hs = h_series(cfg, &ctx, d, kmax, &mut budget)?;

    let ns = ctx.subs.count;
    let a_support: Vec<usize> = (0..a.v.len()).filter(|&i| a.v[i] != 0).collect();
    let mut out = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let hk = &hs[k];
        let mut raw = vec![BigUint::zero(); strata];
        for &i in &a_support {
            let (mom, sa) = (i / ns, (i % ns) as u16);
            let need = ctx.adder.add(t_idx, ctx.adder.neg(mom));
            for sh in 0..ns as u16 {
                let c = hk.v[need * ns + sh as usize];
                if c == 0 || ctx.subs.join(sa, sh) != ctx.subs.full {
                    continue;
                }
                let stratum = if strata > 1 { ctx.subs.dims[sh as usize] } else { 0 };
                raw[stratum] += BigUint::from(a.v[i]) * BigUint::from(c);
            }
        }
        let factor = BigUint::from(cfg.p).pow(a.shift + hk.shift);
        for r in raw.iter_mut() {
            *r *= &factor;
        }
        let mprime = (m_rank + 2 * k) as i64;
        let scale = qpow(cfg.q(), -(d as i64) * n as i64 * (2 * mprime - n as i64));
        let counts = raw
            .into_iter()
            .map(|r| {
                let normalized = Q::from_integer(BigInt::from(r.clone())) * &scale;
                RepCount { d, raw: r, normalized }
            })
            .collect();
        out.push(SeriesPoint { k, counts });
    }
    Ok(out)
}

/// `|I(M, L, d)|` and its normalization `q^{-dn(2m-n)}·|I|`.
pub fn count_reps(cfg: &RingConfig, m: &Gram, l: &Gram, d: u32) -> Result<RepCount, DensityError> {
    let s = count_series(cfg, m, l, 0, CountOptions::new(d))?;
    Ok(s[0].counts[0].clone())
}

/// Primitive counts with the first `ell` vectors of `L` independent mod `π`.
pub fn count_reps_primitive(
    cfg: &RingConfig,
    m: &Gram,
    l: &Gram,
    d: u32,
    ell: usize,
    stratify: bool,
) -> Result<Vec<RepCount>, DensityError> {
    let mode = if stratify { Mode::Stratified(ell) } else { Mode::Primitive(ell) };
    let s = count_series(cfg, m, l, 0, CountOptions::new(d).with_mode(mode))?;
    Ok(s[0].counts.clone())
}
