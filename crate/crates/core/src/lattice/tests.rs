use super::dsl::parse_gram;
use super::*;
use crate::local_ring::{q_int, Twist};
use proptest::prelude::*;

fn cfg3() -> RingConfig {
    RingConfig::new(3, Twist::One).unwrap()
}

fn all_cfgs() -> Vec<RingConfig> {
    let mut v = Vec::new();
    for p in [3u64, 5, 7] {
        for t in [Twist::One, Twist::NonResidue] {
            v.push(RingConfig::new(p, t).unwrap());
        }
    }
    v
}

#[test]
fn hyperbolic_plane_data() {
    for cfg in all_cfgs() {
        let h = h_plane(&cfg);
        assert_eq!(h.det(), cfg.pi0().recip());
        assert_eq!(sign(&cfg, &h), 1);
        let inv = invariants(&cfg, &h).unwrap();
        assert_eq!(inv.fund, vec![-1, -1]);
        assert_eq!(inv.t_o, 0);
        assert_eq!(inv.v_l, -1);
    }
}

#[test]
fn unimodular_signs() {
    for cfg in all_cfgs() {
        for n in 1..=5 {
            for eps in [1i8, -1] {
                let g = unimodular(&cfg, n, eps).unwrap();
                assert_eq!(sign(&cfg, &g), eps, "n={n}");
                let inv = invariants(&cfg, &g).unwrap();
                assert_eq!(inv.fund, vec![0; n]);
                assert_eq!(inv.t_o, n);
                assert_eq!(inv.t_l, 0);
            }
        }
        assert!(unimodular(&cfg, 0, -1).is_err());
        for eps in [1i8, -1] {
            let g = h_n_i(&cfg, 3, 1, eps).unwrap();
            assert_eq!(sign(&cfg, &g), eps);
            let g = h_n_i(&cfg, 4, 2, 1).unwrap();
            assert_eq!(sign(&cfg, &g), 1);
        }
        assert!(h_n_i(&cfg, 3, 2, 1).is_err());
    }
}

#[test]
fn jordan_examples() {
    let cfg = cfg3();
    let jf = jordan_form(&cfg, &h_plane(&cfg)).unwrap();
    assert_eq!(jf.blocks.len(), 1);
    assert!(matches!(jf.blocks[0], Block::Binary { exp: -1, .. }));

    let g = diag(&cfg, &[q_int(2) * cfg.pi0(), q_int(1)]);
    let jf = jordan_form(&cfg, &g).unwrap();
    assert_eq!(jf.blocks[0].exp(), 0);
    assert_eq!(jf.blocks[1].exp(), 2);
    assert_eq!(jf.gram, g.transform(&jf.basis).m);

    // dense Gram whose smallest entry is an odd off-diagonal
    let pi = cfg.pi();
    let m = Matrix::from_rows(
        vec![
            vec![cfg.embed(cfg.pi0()), &pi + &cfg.embed(cfg.pi0())],
            vec![&(-&pi) + &cfg.embed(cfg.pi0()), cfg.embed(q_int(9) * cfg.pi0())],
        ],
        cfg.pi0_int(),
    );
    let g = Gram::new(m).unwrap();
    let jf = jordan_form(&cfg, &g).unwrap();
    assert_eq!(jf.blocks.len(), 1);
    assert_eq!(jf.blocks[0].exp(), 1);
    let inv = invariants(&cfg, &g).unwrap();
    assert_eq!(inv.fund, vec![1, 1]);
    assert_eq!(inv.fund.iter().sum::<i64>(), cfg.val_pi(&cfg.embed(g.det())).unwrap());
}

#[test]
fn odd_hyperbolic_invariants() {
    let cfg = cfg3();
    for a in 0..3 {
        let g = hyperbolic(&cfg, 2 * a + 1);
        assert_eq!(invariants(&cfg, &g).unwrap().fund, vec![2 * a + 1, 2 * a + 1]);
    }
}

#[test]
fn dual_examples() {
    let cfg = cfg3();
    let g = diag(&cfg, &[cfg.pi0()]);
    assert_eq!(dual_gram(&g).unwrap(), diag(&cfg, &[cfg.pi0().recip()]));
    let h = h_plane(&cfg);
    let pi_h = h.scale(&cfg.neg_pi0());
    assert_eq!(dual_gram(&h).unwrap(), pi_h);
    let i3 = unimodular(&cfg, 3, 1).unwrap();
    assert_eq!(invariants(&cfg, &dual_gram(&i3).unwrap()).unwrap().fund, vec![0, 0, 0]);
}

#[test]
fn superlattice_counts() {
    let cfg = cfg3();
    let l = diag(&cfg, &[q_int(2) * cfg.neg_pi0_pow(2)]);
    let s = superlattices(&cfg, &l, 1);
    assert_eq!(s.len(), 1);
    assert_eq!(invariants(&cfg, &s[0].gram).unwrap().fund, vec![2]);
    let l2 = diag(&cfg, &[cfg.pi0(), cfg.pi0()]);
    assert_eq!(superlattices(&cfg, &l2, 1).len(), 4);
    let l3 = unimodular(&cfg, 3, 1).unwrap();
    assert_eq!(superlattices(&cfg, &l3, 2).len(), 13);
}

#[test]
fn integral_superlattice_examples() {
    let cfg = cfg3();
    let u = unimodular(&cfg, 2, 1).unwrap();
    assert_eq!(integral_superlattices(&cfg, &u).unwrap().len(), 1);
    let l = diag(&cfg, &[cfg.neg_pi0()]);
    let s = integral_superlattices(&cfg, &l).unwrap();
    assert_eq!(s.len(), 2);
    let h1 = hyperbolic(&cfg, 1);
    let s = integral_superlattices(&cfg, &h1).unwrap();
    assert_eq!(s.len(), 1 + 4);
    assert!(integral_superlattices(&cfg, &h_plane(&cfg)).is_err());
}

#[test]
fn integral_superlattices_closed_under_order() {
    let cfg = cfg3();
    let l = diag(&cfg, &[cfg.neg_pi0(), cfg.neg_pi0_pow(2)]);
    let all = integral_superlattices(&cfg, &l).unwrap();
    let keys: HashSet<LatticeKey> = all.iter().map(|s| hnf::key_of(&s.coords)).collect();
    for s in &all {
        // every index-q sublattice of s that still contains L is in the list
        for sub in superlattices(&cfg, &l, 1) {
            let both = hnf::contains_lattice(&cfg, &s.coords, &sub.coords);
            if both {
                assert!(keys.contains(&hnf::key_of(&sub.coords)));
            }
        }
    }
}

#[test]
fn alternating_subspace_sum() {
    assert_eq!(subspace_alt_sum(0, 3), BigInt::one());
    for q in [3u64, 5, 7, 9] {
        for m in 1..=5 {
            assert_eq!(subspace_alt_sum(m, q), BigInt::zero());
        }
    }
}

#[test]
fn dsl_round_trip() {
    let cfg = cfg3();
    let g = parse_gram(&cfg, "H + diag(1)").unwrap();
    assert_eq!(g, h_n_i(&cfg, 3, 1, sign(&cfg, &diag(&cfg, &[q_int(1)]))).unwrap());
    let g = parse_gram(&cfg, "diag(1*pi0^1, s*(-pi0)^2, pi0)").unwrap();
    assert_eq!(
        g,
        diag(&cfg, &[cfg.pi0(), q_int(2) * cfg.neg_pi0_pow(2), cfg.pi0()])
    );
    let g = parse_gram(&cfg, "Hodd(3)").unwrap();
    assert_eq!(g, hyperbolic(&cfg, 3));
    assert_eq!(parse_gram(&cfg, "I(3,-1)").unwrap(), unimodular(&cfg, 3, -1).unwrap());
    match parse_gram(&cfg, "diag(1, x)") {
        Err(LatticeError::Parse { token, .. }) => assert_eq!(token, "x"),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(parse_gram(&cfg, "Hodd(2)"), Err(LatticeError::Parse { .. })));
    assert!(matches!(parse_gram(&cfg, "diag(0)"), Err(LatticeError::Parse { .. })));
}

fn arb_diag() -> impl Strategy<Value = Vec<(u8, i64)>> {
    prop::collection::vec((0u8..2, -1i64..3), 1..=3)
}

fn build(cfg: &RingConfig, entries: &[(u8, i64)]) -> Gram {
    let vals: Vec<Q> = entries
        .iter()
        .map(|&(u, k)| cfg.unit_with_chi(if u == 0 { 1 } else { -1 }) * cfg.neg_pi0_pow(k))
        .collect();
    diag(cfg, &vals)
}

/// Mixes the basis by a unimodular upper-triangular change.
fn mix(cfg: &RingConfig, g: &Gram, seed: i64) -> Gram {
    let n = g.rank();
    let mut c = Matrix::identity(n, cfg.pi0_int());
    for i in 0..n {
        for j in (i + 1)..n {
            c[(i, j)] = cfg.int(seed + (i * 2 + j) as i64) + cfg.pi();
        }
    }
    g.transform(&c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jordan_preserves_invariants(entries in arb_diag(), seed in 0i64..5, twist in any::<bool>()) {
        let cfg = RingConfig::new(3, if twist { Twist::One } else { Twist::NonResidue }).unwrap();
        let g = build(&cfg, &entries);
        let mixed = mix(&cfg, &g, seed);
        let a = invariants(&cfg, &g).unwrap();
        let b = invariants(&cfg, &mixed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(jordan_key(&cfg, &g).unwrap(), jordan_key(&cfg, &mixed).unwrap());
        let jf = jordan_form(&cfg, &mixed).unwrap();
        let jg = Gram::new(jf.gram.clone()).unwrap();
        prop_assert_eq!(invariants(&cfg, &jg).unwrap(), b);
    }

    #[test]
    fn scaling_rule(entries in arb_diag(), u in 0u8..2) {
        let cfg = RingConfig::new(5, Twist::One).unwrap();
        let g = build(&cfg, &entries);
        let unit = cfg.unit_with_chi(if u == 0 { 1 } else { -1 });
        let s = g.scale(&unit);
        let a = invariants(&cfg, &g).unwrap();
        let b = invariants(&cfg, &s).unwrap();
        prop_assert_eq!(&a.fund, &b.fund);
        let factor = if u == 0 || g.rank() % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(b.sign, a.sign * factor);
    }

    #[test]
    fn double_dual(entries in arb_diag(), seed in 0i64..4) {
        let cfg = cfg3();
        let g = mix(&cfg, &build(&cfg, &entries), seed);
        let dd = dual_gram(&dual_gram(&g).unwrap()).unwrap();
        prop_assert_eq!(invariants(&cfg, &dd).unwrap().fund, invariants(&cfg, &g).unwrap().fund);
    }

    #[test]
    fn superlattice_sandwich(entries in arb_diag(), i in 0usize..3) {
        let cfg = cfg3();
        let g = build(&cfg, &entries);
        let n = g.rank();
        let i = i.min(n);
        let id = Matrix::identity(n, cfg.pi0_int());
        for s in superlattices(&cfg, &g, i) {
            prop_assert!(hnf::contains_lattice(&cfg, &s.coords, &id));
            let pi_c = s.coords.scale(&cfg.pi());
            prop_assert!(hnf::contains_lattice(&cfg, &id, &pi_c));
            prop_assert_eq!(g.transform(&s.coords), s.gram.clone());
        }
    }
}
