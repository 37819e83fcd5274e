//! Randomised invariants over small posets, relations and spaces.

use std::sync::Arc;

use oakit_core::lattice::{
    downset_lattice, is_boolean, lattice_from_poset, open_set_lattice, poset_from_pairs,
    powerset_lattice, product_lattice, topo_ops, topology_from_opens, PointSet,
};
use oakit_core::morphisms::{compose, map_to_rel, rel_to_map_in, symmetric_pair_report};
use oakit_core::overlap::{
    check_overlap_algebra, is_overlap_algebra, positivity, PositivityMode,
};
use oakit_core::sublocales::{sublocale_frame, standard_nuclei};
use oakit_core::{Caps, Elem, FinLattice, Relation};
use proptest::prelude::*;

fn caps() -> Caps {
    Caps::default()
}

/// A naturally labelled poset on `n` points from a bit pattern over the
/// pairs `i < j`; the closure is taken by the constructor.
fn poset_pairs(n: usize, bits: u16) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .enumerate()
        .filter(|(k, _)| bits >> k & 1 == 1)
        .map(|(_, p)| p)
        .collect()
}

fn arb_downset_lattice() -> impl Strategy<Value = Arc<FinLattice>> {
    (0usize..=4, any::<u16>()).prop_map(|(n, bits)| {
        let p = poset_from_pairs(n, &poset_pairs(n, bits)).unwrap();
        downset_lattice(&p, &caps()).unwrap()
    })
}

fn arb_relation(max: usize) -> impl Strategy<Value = Relation> {
    (0..=max, 0..=max, any::<u64>()).prop_map(|(x, y, bits)| Relation::from_bits(x, y, bits))
}

fn pow(n: usize) -> Arc<FinLattice> {
    powerset_lattice(n, &caps()).unwrap()
}

/// Close a family of subsets under unions and intersections and add the
/// empty and full sets.
fn close_family(n: usize, seeds: &[PointSet]) -> Vec<PointSet> {
    let full: PointSet = (1 << n) - 1;
    let mut fam: Vec<PointSet> = vec![0, full];
    fam.extend(seeds.iter().map(|s| s & full));
    loop {
        let mut next = fam.clone();
        for &u in &fam {
            for &v in &fam {
                next.push(u | v);
                next.push(u & v);
            }
        }
        next.sort_unstable();
        next.dedup();
        if next.len() == fam.len() {
            return next;
        }
        fam = next;
    }
}

proptest! {
    #[test]
    fn lattice_laws(l in arb_downset_lattice()) {
        for x in l.elements() {
            prop_assert_eq!(l.meet(x, x), x);
            prop_assert_eq!(l.join(x, l.bottom()), x);
            prop_assert_eq!(l.meet(x, l.top()), x);
            for y in l.elements() {
                prop_assert_eq!(l.meet(x, y), l.meet(y, x));
                prop_assert_eq!(l.join(x, l.meet(x, y)), x);
                prop_assert_eq!(l.leq(x, y), l.meet(x, y) == x);
                for z in l.elements() {
                    prop_assert_eq!(l.meet(x, l.join(y, z)), l.join(l.meet(x, y), l.meet(x, z)));
                }
            }
        }
        prop_assert!(l.is_frame());
    }

    #[test]
    fn heyting_residuation(l in arb_downset_lattice()) {
        for x in l.elements() {
            for y in l.elements() {
                let imp = l.implies(x, y).unwrap();
                for z in l.elements() {
                    prop_assert_eq!(l.leq(l.meet(z, x), y), l.leq(z, imp));
                }
            }
        }
    }

    #[test]
    fn overlap_algebra_iff_boolean(l in arb_downset_lattice()) {
        let r = check_overlap_algebra(&l, None).unwrap();
        prop_assert_eq!(r.is_overlap_algebra, is_boolean(&l));
        prop_assert_eq!(r.is_overlap_algebra, is_overlap_algebra(&l));
        prop_assert!(r.violations.is_empty());
    }

    #[test]
    fn fast_positivity_matches_oracle(l in arb_downset_lattice()) {
        prop_assume!(l.size() <= 10);
        for x in l.elements() {
            prop_assert_eq!(
                positivity(&l, x, PositivityMode::Fast, &caps()).unwrap(),
                positivity(&l, x, PositivityMode::Oracle, &caps()).unwrap()
            );
        }
    }

    #[test]
    fn dagger_is_an_involution(r in arb_relation(3)) {
        let (px, py) = (pow(r.src_size()), pow(r.tgt_size()));
        let f = rel_to_map_in(&r, &py, &px).unwrap();
        let d = f.dagger().unwrap();
        prop_assert_eq!(d.dagger().unwrap(), f.clone());
        prop_assert!(symmetric_pair_report(&f, &d).unwrap().symmetric.holds);
        prop_assert_eq!(map_to_rel(&d).unwrap(), r.transpose());
    }

    #[test]
    fn dagger_reverses_composition(r in arb_relation(2), bits in any::<u64>(), nz in 0usize..=2) {
        let s = Relation::from_bits(r.tgt_size(), nz, bits);
        let (px, py, pz) = (pow(r.src_size()), pow(r.tgt_size()), pow(nz));
        let rinv = rel_to_map_in(&r, &py, &px).unwrap();
        let sinv = rel_to_map_in(&s, &pz, &py).unwrap();
        let gf = compose(&rinv, &sinv).unwrap();
        let lhs = gf.dagger().unwrap();
        let rhs = compose(&sinv.dagger().unwrap(), &rinv.dagger().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn topological_operators(n in 0usize..=4, seeds in prop::collection::vec(any::<u64>(), 0..4), y in any::<u64>()) {
        let opens = close_family(n, &seeds);
        let t = topology_from_opens(n, &opens, &caps()).unwrap();
        let y = y & t.full();
        let ops = topo_ops(&t, y);
        prop_assert!(ops.interior & !y == 0 && y & !ops.closure == 0);
        prop_assert!(t.is_open(ops.interior));
        prop_assert_eq!(t.interior(ops.interior), ops.interior);
        prop_assert_eq!(t.closure(ops.closure), ops.closure);
        prop_assert!(t.is_open(ops.regular_core));
        prop_assert_eq!(t.regular_core(ops.regular_core), ops.regular_core);
        // closure is the complement of the interior of the complement
        prop_assert_eq!(ops.closure, t.full() & !t.interior(t.full() & !y));
        prop_assert_eq!(open_set_lattice(&t).size(), opens.len());
    }

    #[test]
    fn standard_nuclei_have_frame_quotients(l in arb_downset_lattice(), a in any::<usize>()) {
        let a = a % l.size();
        let s = standard_nuclei(&l, a).unwrap();
        for j in [&s.open, &s.closed, &s.boolean] {
            let sub = sublocale_frame(j).unwrap();
            prop_assert!(sub.lattice.is_frame());
            prop_assert_eq!(sub.embedding.clone(), j.fixed_points());
            for x in l.elements() {
                prop_assert_eq!(sub.embedding[sub.m_star.image(x)], j.apply(x));
            }
        }
        prop_assert!(is_overlap_algebra(&sublocale_frame(&s.boolean).unwrap().lattice));
    }

    #[test]
    fn product_layout_round_trips(a in arb_downset_lattice(), b in arb_downset_lattice()) {
        let p = product_lattice(&[a.clone(), b.clone()], &caps()).unwrap();
        for t in p.lattice.elements() {
            let parts = p.layout.decode(t);
            prop_assert_eq!(p.layout.encode(&parts), t);
            for u in p.lattice.elements() {
                let q = p.layout.decode(u);
                prop_assert_eq!(p.lattice.leq(t, u), a.leq(parts[0], q[0]) && b.leq(parts[1], q[1]));
            }
        }
        prop_assert_eq!(is_overlap_algebra(&p.lattice), is_boolean(&a) && is_boolean(&b));
    }
}

#[test]
fn closure_of_generating_pairs() {
    let p = poset_from_pairs(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    let l = lattice_from_poset(p).unwrap();
    let expected: Vec<(Elem, Elem)> = (0..4).flat_map(|x| (x + 1..4).map(move |y| (x, y))).collect();
    let strict: Vec<(Elem, Elem)> = (0..4)
        .flat_map(|x| (0..4).map(move |y| (x, y)))
        .filter(|&(x, y)| l.lt(x, y))
        .collect();
    assert_eq!(strict, expected);
}
