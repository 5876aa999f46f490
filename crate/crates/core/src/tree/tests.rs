use num::traits::{One, Zero};

use super::*;
use crate::kr::Analytic;
use crate::lattice::{diag, hyperbolic, Gram};
use crate::local_ring::{q_int, Twist, Q};

fn cfg(p: u64, twist: Twist) -> RingConfig {
    RingConfig::new(p, twist).unwrap()
}

fn unit(c: &RingConfig, chi: i8) -> Q {
    c.unit_with_chi(chi)
}

fn dg(c: &RingConfig, entries: &[(i8, i64)]) -> Gram {
    let vals: Vec<Q> = entries.iter().map(|&(chi, k)| unit(c, chi) * c.neg_pi0_pow(k)).collect();
    diag(c, &vals)
}

/// All rank-2 shapes with fundamental invariants at most `(4, 4)`.
fn flat_shapes(c: &RingConfig) -> Vec<Gram> {
    let mut out = vec![hyperbolic(c, 1), hyperbolic(c, 3)];
    for a in 0..=2 {
        for b in a..=2 {
            for x in [1, -1] {
                for y in [1, -1] {
                    out.push(dg(c, &[(x, a), (y, b)]));
                }
            }
        }
    }
    out
}

#[test]
fn embed_is_isometric() {
    let c = cfg(3, Twist::One);
    for g in [dg(&c, &[(1, 0), (1, 0), (1, 0)]), hyperbolic(&c, 1), dg(&c, &[(-1, 2)]), hyperbolic(&c, 3).orth_sum(&dg(&c, &[(-1, 1)]))] {
        let amb = embed(&c, &g).unwrap();
        assert_eq!(amb.gram(&amb.basis), g.m);
        assert!(!amb.phi.m.det().is_zero());
    }
    let amb = embed(&c, &dg(&c, &[(1, 0), (1, 0), (1, 0)])).unwrap();
    assert_eq!(amb.basis, crate::lattice::Matrix::identity(3, c.pi0_int()));
}

#[test]
fn neighbors_are_vertices_of_the_other_type() {
    for c in [cfg(3, Twist::One), cfg(5, Twist::NonResidue)] {
        let q = c.q() as usize;
        let amb = embed(&c, &dg(&c, &[(1, 0), (-1, 0), (1, 0)])).unwrap();
        let start = amb.vertex_over(&amb.basis).unwrap();
        assert_eq!(start.kind, VertexType::Zero);
        assert_eq!(hnf::key_of(&hnf::echelon(&c, &amb.dual(&start)).unwrap()), start.key);
        let ups = amb.neighbors(&start);
        assert_eq!(ups.len(), q + 1);
        for up in &ups {
            assert_eq!(up.kind, VertexType::Two);
            let d = amb.dual(up);
            assert!(hnf::contains_lattice(&c, &up.basis, &d));
            assert!(hnf::contains_lattice(&c, &d, &up.basis.scale(&c.pi())));
            assert_eq!(c.val_pi(&up.basis.inverse().unwrap().mul(&d).det()), Some(2));
            let dd = amb.dual_of(&d).unwrap();
            assert_eq!(hnf::key_of(&hnf::echelon(&c, &dd).unwrap()), up.key);
            let downs = amb.neighbors(up);
            assert_eq!(downs.len(), q + 1);
            assert!(downs.iter().any(|d| d.key == start.key));
            assert!(downs.iter().all(|d| d.kind == VertexType::Zero));
        }
    }
}

#[test]
fn pairing_signs() {
    let c = cfg(3, Twist::One);
    let amb = embed(&c, &dg(&c, &[(1, 0), (1, 0), (1, 0)])).unwrap();
    let l0 = amb.vertex_over(&amb.basis).unwrap();
    let l2 = amb.neighbors(&l0).remove(0);
    let e = amb.basis.col(0);
    assert_eq!(int_pairing(&amb, &e, &l0), -1);
    assert_eq!(int_pairing(&amb, &e, &l2), 1);
    let far: Vec<Ext> = e.iter().map(|x| x * &c.pi_pow(-2)).collect();
    assert_eq!(int_pairing(&amb, &far, &l0), 0);
    assert_eq!(int_pairing(&amb, &far, &l2), 0);
}

#[test]
fn small_supports() {
    let c = cfg(3, Twist::One);
    let q = c.q();
    let s = enumerate_support(&c, &hyperbolic(&c, 1), &Q::one()).unwrap();
    assert_eq!(s.counts(), SupportCounts { v0: q + 1, v2: 1, boundary: q + 1, skeleton: 0 });
    // x₁^⊥ = ⟨ν, t⟩ is nonsplit iff χ(-νt) = -1.
    let flat = dg(&c, &[(1, 0), (-1, 0)]);
    let t = if c.chi(&(-unit(&c, -1))).unwrap() == 1 { unit(&c, -1) } else { Q::one() };
    let s = enumerate_support(&c, &flat, &t).unwrap();
    assert_eq!(s.counts(), SupportCounts { v0: 1, v2: 0, boundary: 1, skeleton: 1 });
    let split_t = if c.chi(&(-unit(&c, 1))).unwrap() == 1 { Q::one() } else { unit(&c, -1) };
    let s = enumerate_support(&c, &dg(&c, &[(1, 0), (1, 1)]), &split_t).unwrap();
    assert_eq!(s.counts().v0, 1 + 2 * q);
}

#[test]
fn supports_match_closed_counts() {
    for c in [cfg(3, Twist::One), cfg(3, Twist::NonResidue)] {
        for flat in flat_shapes(&c) {
            for t in [Q::one(), unit(&c, -1)] {
                let s = enumerate_support(&c, &flat, &t).unwrap();
                let closed = support_counts_closed(&c, &flat, &t).unwrap();
                assert_eq!(s.counts(), closed, "{flat} with complement {t}");
            }
        }
    }
}

#[test]
fn boundary_and_zero_pairing() {
    let c = cfg(3, Twist::One);
    let q = c.q() as usize;
    for flat in flat_shapes(&c) {
        for t in [Q::one(), unit(&c, -1)] {
            let amb = embed_with_complement(&c, &flat, &t).unwrap();
            let s = enumerate_support_in(&amb, &amb.basis, SUPPORT_BUDGET).unwrap();
            for (i, v) in s.v0.iter().enumerate() {
                let outside = amb.neighbors(v).iter().any(|n| !amb.dual_contains(n, &amb.basis));
                assert_eq!(s.boundary[i], outside);
                if crate::lattice::hnf::min_val(&c, &flat.m).unwrap() > 0 {
                    let mult = if s.boundary[i] { 1 } else { q + 1 };
                    assert_eq!(2 * s.up_degree(i), 2 * mult, "{flat}");
                }
            }
        }
    }
}

#[test]
fn mu_values() {
    for q in [3u64, 5, 7] {
        assert_eq!(mu(q, -1, 4), 0);
        assert_eq!(mu(q, 0, 0), 0);
        assert_eq!(mu(q, 0, 1), 1);
        for b in 1..=10 {
            assert_eq!(mu(q, 0, b) - mu(q, 0, b - 1), 1);
        }
        let qi = q as i64;
        for a in 1..=4 {
            for b in a + 1..=6 {
                let d = mu(q, a, b) - qi * mu(q, a - 1, b) - mu(q, a, b - 1) + qi * mu(q, a - 1, b - 1);
                assert_eq!(d, qi + 1, "a={a} b={b}");
            }
        }
    }
}

/// `Diag(L♭, x)` as Gram, with `L♭` in the first two coordinates.
fn split_case(c: &RingConfig, flat: &Gram, x: &Q) -> (AmbientSpace, Gram) {
    let full = flat.orth_sum(&diag(c, &[x.clone()]));
    (embed(c, &full).unwrap(), full)
}

#[test]
fn geometric_primitive_matches_analytic() {
    let c = cfg(3, Twist::One);
    let an = Analytic::with_engine(&c);
    let q = c.q() as i64;
    let mut cases = Vec::new();
    for a in [1, 3] {
        for k in 0..=2 {
            cases.push((hyperbolic(&c, a), unit(&c, 1) * c.neg_pi0_pow(k)));
        }
    }
    cases.push((dg(&c, &[(1, 1), (1, 1)]), unit(&c, -1) * c.neg_pi0_pow(1)));
    cases.push((dg(&c, &[(1, 1), (-1, 2)]), unit(&c, 1) * c.neg_pi0_pow(1)));
    for (flat, x) in cases {
        let (amb, full) = split_case(&c, &flat, &x);
        let y = amb.basis.select_cols(&[0, 1]);
        let geo = int_prim2(&amb, &y, &amb.basis.col(2)).unwrap();
        let ana = an.pden_prim(&full, 2).unwrap();
        assert_eq!(q_int(geo), ana, "{full}");
    }
    let (amb, _) = split_case(&c, &hyperbolic(&c, 1), &Q::one());
    assert_eq!(int_prim2(&amb, &amb.basis.select_cols(&[0, 1]), &amb.basis.col(2)).unwrap(), 1 - q);
}

#[test]
fn int_total_small_cases() {
    let c = cfg(3, Twist::One);
    let an = Analytic::with_engine(&c);
    let h = hyperbolic(&c, -1).orth_sum(&dg(&c, &[(1, 1)]));
    let r = int_total(&an, &h).unwrap();
    assert_eq!(r.path, IntPath::NotIntegral);
    assert!(r.value.is_zero());
    let i3 = dg(&c, &[(1, 0), (1, 0), (1, 0)]);
    let r = int_total(&an, &i3).unwrap();
    assert_eq!(r.value, an.pden(&dg(&c, &[(1, 0), (1, 0)])).unwrap() + Q::one());
    for g in [dg(&c, &[(1, 1), (-1, 1), (1, 2)]), dg(&c, &[(1, 0), (1, 1), (-1, 1)]), hyperbolic(&c, 1).orth_sum(&dg(&c, &[(1, 1)]))] {
        let r = int_total(&an, &g).unwrap();
        assert_eq!(r.value, an.pden(&g).unwrap(), "{g}");
    }
}
