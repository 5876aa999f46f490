//! Acceptance checks, one line per criterion. All comparisons are exact.

use std::process::ExitCode;
use std::time::Instant;

use num::traits::{One, Zero};
use ramified_kr::density::alpha::default_level;
use ramified_kr::density::closed::{closed_alpha, Formula};
use ramified_kr::density::{
    alpha_poly, alpha_poly_with, count_reps_primitive, count_series, qpow, AlphaOptions, CountOptions,
};
use ramified_kr::kr::{a_matrix, residue_isotropic_count, Analytic, Counting};
use ramified_kr::lattice::{
    diag, h_n_i, h_plane, hyperbolic, invariants, subspace_alt_sum, unimodular, Gram,
};
use ramified_kr::tree::{embed, enumerate_support, int_prim2, int_total, support_counts_closed};
use ramified_kr::{RingConfig, Twist, Q};

type Outcome = Result<String, String>;

fn cfg(p: u64, twist: Twist) -> RingConfig {
    RingConfig::new(p, twist).unwrap()
}

fn both(p: u64) -> [RingConfig; 2] {
    [cfg(p, Twist::One), cfg(p, Twist::NonResidue)]
}

fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// `u·(-π₀)^k` with `χ(u) = chi`.
fn sc(c: &RingConfig, chi: i8, k: i64) -> Q {
    c.unit_with_chi(chi) * c.neg_pi0_pow(k)
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok && failures.len() < 5 {
        failures.push(what());
    }
}

fn within(failures: &mut Vec<String>, start: Instant, limit_secs: f64) -> f64 {
    let secs = start.elapsed().as_secs_f64();
    if secs >= limit_secs {
        failures.push(format!("took {secs:.1}s, target {limit_secs:.0}s"));
    }
    secs
}

fn verdict(cases: usize, failures: Vec<String>) -> Outcome {
    if failures.is_empty() {
        Ok(format!("{cases} cases"))
    } else {
        Err(format!("{cases} cases, first failures: {}", failures.join("; ")))
    }
}

/// Normalized counts of `M ⊥ H^k`, `k = 0..=2`, at the first level where they agree with the next.
fn stabilized_series(c: &RingConfig, m: &Gram, l: &Gram) -> Result<Vec<Q>, String> {
    let mut d = default_level(c, m, l).map_err(|e| e.to_string())?;
    let at = |d: u32| -> Result<Vec<Q>, String> {
        let s = count_series(c, m, l, 2, CountOptions::new(d)).map_err(|e| e.to_string())?;
        Ok(s.into_iter().map(|p| p.counts[0].normalized.clone()).collect())
    };
    let mut cur = at(d)?;
    loop {
        let next = at(d + 1)?;
        if next == cur {
            return Ok(cur);
        }
        if d > 6 {
            return Err(format!("no stabilization for M={m} L={l}"));
        }
        d += 1;
        cur = next;
    }
}

fn c1() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut cases = 0;
    for p in [3u64, 5] {
        for c in both(p) {
            for m in [1usize, 3] {
                for chi_s in [1i8, -1] {
                    let s = unimodular(&c, m, chi_s).map_err(|e| e.to_string())?;
                    for (nu1, nu2) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
                        for b in 0..=1i64 {
                            for a in 0..=b {
                                let mm = s.orth_sum(&diag(&c, &[sc(&c, nu1, a), sc(&c, nu2, b)]));
                                for vt in b..=2 {
                                    for chi_t in [1i8, -1] {
                                        let l = diag(&c, &[sc(&c, chi_t, vt)]);
                                        let f = Formula::RankOneSab { m, chi_s, nu1, nu2, a, b, vt, chi_t };
                                        let poly = closed_alpha(&c, &f).map_err(|e| e.to_string())?.poly().cloned();
                                        let poly = poly.ok_or("rank-one formula is a polynomial")?;
                                        let counts = stabilized_series(&c, &mm, &l)?;
                                        for (k, count) in counts.iter().enumerate() {
                                            cases += 1;
                                            let x = qpow(p, -2 * k as i64);
                                            check(&mut failures, &poly.eval(&x) == count, || format!("{f:?} p={p} k={k}"));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    within(&mut failures, start, 300.0);
    verdict(cases, failures)
}

fn c2() -> Outcome {
    let c = cfg(3, Twist::One);
    let nu = c.unit_with_chi(-1);
    let pi0 = c.neg_pi0();
    let ls = vec![
        diag(&c, &[qi(1)]),
        diag(&c, &[nu.clone()]),
        diag(&c, &[pi0.clone()]),
        diag(&c, &[pi0.clone() * &pi0]),
        diag(&c, &[qi(1), qi(1)]),
        diag(&c, &[qi(1), nu.clone()]),
        diag(&c, &[qi(1), pi0.clone()]),
        diag(&c, &[pi0.clone(), nu * &pi0]),
        hyperbolic(&c, 1),
        h_plane(&c),
    ];
    let mut failures = Vec::new();
    let mut cases = 0;
    for l in &ls {
        let inv = invariants(&c, l).map_err(|e| e.to_string())?;
        for k in 1..=3usize {
            let hk = Gram::orth_sum_all(&vec![h_plane(&c); k], c.pi0_int());
            let d = default_level(&c, &hk, l).map_err(|e| e.to_string())?;
            let count = |d| count_reps_primitive(&c, &hk, l, d, l.rank(), false).map(|v| v[0].normalized.clone());
            let got = count(d).map_err(|e| e.to_string())?;
            if l.rank() == 1 {
                let next = count(d + 1).map_err(|e| e.to_string())?;
                check(&mut failures, next == got, || format!("level {d} not stable for L={l} k={k}"));
            }
            let want = closed_alpha(&c, &Formula::BetaHk { k, n: l.rank(), t_o: inv.t_o }).map_err(|e| e.to_string())?;
            cases += 1;
            check(&mut failures, Some(&got) == want.value(), || format!("L={l} k={k}: count {got}"));
        }
    }
    verdict(cases, failures)
}

fn c3() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for p in [3u64, 5, 7] {
        for c in both(p) {
            let an = Analytic::with_engine(&c);
            let q = qi(p as i64);
            for eps in [1i8, -1] {
                let t = an.coeffs(3, eps).map_err(|e| e.to_string())?;
                cases += 1;
                let want = vec![&q * &q / (&q + qi(1))];
                check(&mut failures, t.c == want, || format!("n=3 q={p} eps={eps}: {:?}", t.c));
            }
            let t = an.coeffs(2, 1).map_err(|e| e.to_string())?;
            cases += 1;
            let want = vec![qi(-2) * &q * &q / (&q * &q - qi(1))];
            check(&mut failures, t.c == want, || format!("n=2 q={p}: {:?}", t.c));
        }
    }
    verdict(cases, failures)
}

fn c4() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for c in both(3) {
        let opts = AlphaOptions { d: Some(1), ..AlphaOptions::default() };
        let src = Counting { cfg: c.clone(), opts };
        let q = qi(3);
        let coeff = &q * &q / (&q + qi(1));
        for eps in [1i8, -1] {
            let s = unimodular(&c, 3, -eps).map_err(|e| e.to_string())?;
            let h = h_n_i(&c, 3, 1, eps).map_err(|e| e.to_string())?;
            let a_sh = alpha_poly_with(&c, &s, &h, opts).map_err(|e| e.to_string())?;
            let a_hh = alpha_poly_with(&c, &h, &h, opts).map_err(|e| e.to_string())?;
            let lhs = qi(2) * a_sh.derivative_prime() + &coeff * a_hh.eval(&Q::one());
            cases += 1;
            check(&mut failures, lhs.is_zero(), || format!("eps={eps}: residual {lhs}"));
            let solved = ramified_kr::kr::coeffs(&src, 3, eps).map_err(|e| e.to_string())?;
            cases += 1;
            check(&mut failures, solved.c == vec![coeff.clone()], || format!("eps={eps}: counted C = {:?}", solved.c));
        }
    }
    verdict(cases, failures)
}

fn c5() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for p in [3u64, 5] {
        let c = cfg(p, Twist::One);
        for n in 1..=5usize {
            for eps in [1i8, -1] {
                let a = a_matrix(p, n, eps);
                for j in 1..=a.len() {
                    for i in 1..j {
                        let ratio = &a[i - 1][j - 1] / &a[j - 1][j - 1];
                        let brute = residue_isotropic_count(&c, n - 2 * i, eps, j - i).map_err(|e| e.to_string())?;
                        cases += 1;
                        check(&mut failures, ratio == qi(brute as i64), || format!("q={p} n={n} eps={eps} ({i},{j})"));
                    }
                }
            }
        }
    }
    verdict(cases, failures)
}

/// Rank-3 cases of the primitive grid: `(Gram, closed formula)`.
fn primitive_grid(c: &RingConfig) -> Vec<(Gram, Formula)> {
    let chi_m1 = c.legendre(&qi(-1));
    let mut out = Vec::new();
    for a in 1..=3i64 {
        for b in a..=3 {
            for cc in b..=3 {
                for u1 in [1i8, -1] {
                    for u2 in [1i8, -1] {
                        for u3 in [1i8, -1] {
                            let t = diag(c, &[sc(c, u1, a), sc(c, u2, b), sc(c, u3, cc)]);
                            out.push((t, Formula::PrimDiag { a, b, c: cc, chi: chi_m1 * u2 * u3 }));
                        }
                    }
                }
            }
        }
    }
    for a in [1i64, 3] {
        for cc in 0..=3 {
            for u3 in [1i8, -1] {
                let t = hyperbolic(c, a).orth_sum(&diag(c, &[sc(c, u3, cc)]));
                out.push((t, Formula::PrimPlane { a, c: cc }));
            }
        }
    }
    out
}

fn c6() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for c in both(3) {
        let an = Analytic::with_engine(&c);
        for (t, f) in primitive_grid(&c) {
            let got = an.pden_prim(&t, 2).map_err(|e| e.to_string())?;
            let want = closed_alpha(&c, &f).map_err(|e| e.to_string())?;
            cases += 1;
            check(&mut failures, Some(&got) == want.value(), || format!("{f:?}: pden_prim {got}"));
        }
    }
    verdict(cases, failures)
}

fn c7() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut cases = 0;
    for c in both(3) {
        let mut shapes = vec![hyperbolic(&c, 1), hyperbolic(&c, 3)];
        for a in 0..=2 {
            for b in a..=2 {
                for x in [1i8, -1] {
                    for y in [1i8, -1] {
                        shapes.push(diag(&c, &[sc(&c, x, a), sc(&c, y, b)]));
                    }
                }
            }
        }
        for flat in &shapes {
            for t in [Q::one(), c.unit_with_chi(-1)] {
                let s = enumerate_support(&c, flat, &t).map_err(|e| e.to_string())?;
                let closed = support_counts_closed(&c, flat, &t).map_err(|e| e.to_string())?;
                cases += 1;
                check(&mut failures, s.counts() == closed, || format!("{flat} t={t}: {:?} vs {closed:?}", s.counts()));
            }
        }
    }
    within(&mut failures, start, 60.0);
    verdict(cases, failures)
}

fn c8() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for c in both(3) {
        let an = Analytic::with_engine(&c);
        for (t, f) in primitive_grid(&c) {
            let amb = embed(&c, &t).map_err(|e| e.to_string())?;
            let y = amb.basis.select_cols(&[0, 1]);
            let geo = int_prim2(&amb, &y, &amb.basis.col(2)).map_err(|e| e.to_string())?;
            let ana = an.pden_prim(&t, 2).map_err(|e| e.to_string())?;
            cases += 1;
            check(&mut failures, qi(geo) == ana, || format!("{f:?}: int {geo} vs pden {ana}"));
        }
    }
    verdict(cases, failures)
}

fn c9() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let (mut cases, mut bridged) = (0, 0);
    for c in both(3) {
        let an = Analytic::with_engine(&c);
        let mut grid = Vec::new();
        for a in 0..=2i64 {
            for b in a..=2 {
                for cc in b..=2 {
                    for u1 in [1i8, -1] {
                        for u2 in [1i8, -1] {
                            for u3 in [1i8, -1] {
                                grid.push(diag(&c, &[sc(&c, u1, a), sc(&c, u2, b), sc(&c, u3, cc)]));
                            }
                        }
                    }
                }
            }
        }
        for a in [1i64, 3] {
            for cc in 0..=2 {
                for u in [1i8, -1] {
                    grid.push(hyperbolic(&c, a).orth_sum(&diag(&c, &[sc(&c, u, cc)])));
                }
            }
        }
        for t in &grid {
            let int = int_total(&an, t).map_err(|e| e.to_string())?;
            let pden = an.pden(t).map_err(|e| e.to_string())?;
            cases += 1;
            bridged += int.bridge_terms;
            check(&mut failures, int.value == pden, || format!("{t}: int {} pden {pden}", int.value));
        }
        for cc in 0..=2 {
            for u in [1i8, -1] {
                let t = h_plane(&c).orth_sum(&diag(&c, &[sc(&c, u, cc)]));
                let int = int_total(&an, &t).map_err(|e| e.to_string())?;
                let pden = an.pden(&t).map_err(|e| e.to_string())?;
                cases += 1;
                check(&mut failures, int.value.is_zero() && pden.is_zero(), || format!("{t}: int {} pden {pden}", int.value));
            }
        }
    }
    within(&mut failures, start, 600.0);
    verdict(cases, failures).map(|s| format!("{s}, {bridged} rank-2 bridge terms"))
}

fn c10() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for m in 1..=5u32 {
        for q in [3u64, 5, 7, 9] {
            cases += 1;
            let s = subspace_alt_sum(m, q);
            check(&mut failures, s.is_zero(), || format!("m={m} q={q}: {s}"));
        }
    }
    for c in both(3) {
        let h = h_plane(&c);
        let q2 = qpow(3, 2);
        for eps in [1i8, -1] {
            let m = unimodular(&c, 3, eps).map_err(|e| e.to_string())?;
            let ah = alpha_poly(&c, &m, &h).map_err(|e| e.to_string())?;
            for v in [qi(1), c.unit_with_chi(-1)] {
                let l2 = diag(&c, &[v]);
                let whole = alpha_poly(&c, &m, &h.orth_sum(&l2)).map_err(|e| e.to_string())?;
                let rest = alpha_poly(&c, &m, &l2).map_err(|e| e.to_string())?.rescale(&q2);
                cases += 1;
                check(&mut failures, whole == &ah * &rest, || format!("eps={eps} L2={l2}"));
            }
        }
    }
    verdict(cases, failures)
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 rank-one closed form vs counts", c1),
        ("2 beta product formula", c2),
        ("3 coefficient values", c3),
        ("4 defining equation from counts", c4),
        ("5 A-matrix ratios vs isotropic subspaces", c5),
        ("6 primitive closed forms", c6),
        ("7 support counts", c7),
        ("8 geometric primitive = analytic primitive", c8),
        ("9 Int = pden on the rank-3 grid", c9),
        ("10 alternating sum and factorization", c10),
    ];
    let results: Vec<(&str, Outcome, f64)> = criteria
        .iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
            (*name, r, t.elapsed().as_secs_f64())
        })
        .collect();
    let mut all = true;
    for (name, r, secs) in &results {
        match r {
            Ok(d) => println!("criterion {name}: PASS ({d}; {secs:.1}s)"),
            Err(d) => {
                all = false;
                println!("criterion {name}: FAIL ({d}; {secs:.1}s)");
            }
        }
    }
    let passed = results.iter().filter(|r| r.1.is_ok()).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
