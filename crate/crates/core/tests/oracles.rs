//! Brute-force cross-checks of the optimized code paths.

use std::collections::{BTreeSet, HashMap, HashSet};

use proptest::prelude::*;

use psl_polytopes::census::count_cyclic;
use psl_polytopes::equivalence::{all_automorphism_points, dedupe, Equivalence};
use psl_polytopes::group::{ElemId, GroupCtx, GroupKind, PointPerm};
use psl_polytopes::polytope::{build_lattice, f_vector_of};
use psl_polytopes::presentation::{parse, render, string_coxeter, Presentation, Word};
use psl_polytopes::search::{search, CGroupRecord, GenTuple, SearchOptions};
use psl_polytopes::todd_coxeter::group_order;

fn psl(q: u32) -> GroupCtx {
    GroupCtx::new(q, GroupKind::Psl).unwrap()
}

fn records(ctx: &GroupCtx, rank: usize) -> Vec<CGroupRecord> {
    search(ctx, rank, SearchOptions::default()).unwrap().records
}

/// Least image of the tuple under every automorphism, optionally also of
/// its reverse.
fn brute_key(ctx: &GroupCtx, autos: &[(PointPerm, PointPerm)], t: &[ElemId], duality: bool) -> Vec<ElemId> {
    let image = |t: &[ElemId]| {
        autos
            .iter()
            .map(|(p, pinv)| {
                t.iter()
                    .map(|&x| ctx.conj_by_points(x, p, pinv).unwrap())
                    .collect::<Vec<_>>()
            })
            .min()
            .unwrap()
    };
    let key = image(t);
    if duality {
        let rev: Vec<ElemId> = t.iter().rev().copied().collect();
        key.min(image(&rev))
    } else {
        key
    }
}

/// The two partitions of `0..n` induced by the labelings are equal.
fn same_partition<A: Eq + std::hash::Hash, B: Eq + std::hash::Hash>(a: &[A], b: &[B]) -> bool {
    let mut ab: HashMap<&A, &B> = HashMap::new();
    let mut ba: HashMap<&B, &A> = HashMap::new();
    a.iter()
        .zip(b)
        .all(|(x, y)| *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x)
}

#[test]
fn equivalence_classes_match_brute_force_automorphisms() {
    for (q, rank) in [(8, 3), (9, 3), (11, 3), (13, 3), (16, 3), (25, 3), (11, 4), (19, 4)] {
        let g = psl(q);
        let autos: Vec<(PointPerm, PointPerm)> = all_automorphism_points(&g)
            .into_iter()
            .map(|p| (p.inverse(), p))
            .collect();
        let recs = records(&g, rank);
        for (eq, duality) in [
            (Equivalence::Automorphism, false),
            (Equivalence::AutomorphismDuality, true),
        ] {
            let mut label = vec![0; recs.len()];
            for (k, class) in dedupe(&g, &recs, eq).unwrap().iter().enumerate() {
                for &m in &class.members {
                    label[m] = k;
                }
            }
            let brute: Vec<Vec<ElemId>> = recs
                .iter()
                .map(|r| brute_key(&g, &autos, r.tuple.gens(), duality))
                .collect();
            assert!(same_partition(&label, &brute), "q={q} rank {rank} {eq:?}");
        }
    }
}

fn right_cosets(ctx: &GroupCtx, whole: &[ElemId], sub: &[ElemId]) -> HashSet<BTreeSet<ElemId>> {
    whole
        .iter()
        .map(|&g| sub.iter().map(|&h| ctx.mul(h, g)).collect())
        .collect()
}

fn elements(ctx: &GroupCtx, gens: &[ElemId]) -> Vec<ElemId> {
    ctx.closure(gens, None).subgroup().unwrap().ids().to_vec()
}

fn parabolic(t: &GenTuple, i: usize) -> Vec<ElemId> {
    t.gens()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &x)| x)
        .collect()
}

#[test]
fn f_vectors_match_explicit_cosets() {
    for (q, rank) in [(13, 3), (16, 3), (11, 4), (19, 4)] {
        let g = psl(q);
        for r in records(&g, rank) {
            let whole = elements(&g, r.tuple.gens());
            let counts: Vec<usize> = (0..rank)
                .map(|i| right_cosets(&g, &whole, &elements(&g, &parabolic(&r.tuple, i))).len())
                .collect();
            assert_eq!(f_vector_of(&g, &r.tuple).0, counts, "q={q} {:?}", r.tuple);
        }
    }
}

#[test]
fn incidence_is_coset_intersection() {
    let g = psl(11);
    let t = records(&g, 4)[0].tuple.clone();
    let lattice = build_lattice(&g, &t).unwrap();
    let coset = |i: usize, a: usize| -> HashSet<ElemId> {
        let rep = lattice.faces(i)[a].representative;
        elements(&g, &parabolic(&t, i)).iter().map(|&h| g.mul(h, rep)).collect()
    };
    for i in 0..4 {
        for j in i + 1..4 {
            for a in 0..lattice.faces(i).len() {
                let ca = coset(i, a);
                for b in 0..lattice.faces(j).len() {
                    let meets = !ca.is_disjoint(&coset(j, b));
                    assert_eq!(lattice.is_incident(i, a, j, b), meets, "faces {i}:{a} {j}:{b}");
                }
            }
        }
    }
}

fn euler_phi(n: u32) -> u64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn cyclic_subgroup_counts_from_element_orders() {
    for q in [7, 9, 11, 13, 16, 17, 25] {
        let g = psl(q);
        let mut by_order: HashMap<u32, u64> = HashMap::new();
        for x in g.elements() {
            *by_order.entry(g.elem_order(x)).or_default() += 1;
        }
        for (&d, &n) in by_order
            .iter()
            .filter(|(&d, _)| d > 1 && !(q as u64).is_multiple_of(d as u64))
        {
            let report = count_cyclic(&g, d).unwrap();
            assert_eq!(report.observed_count, n / euler_phi(d), "q={q} d={d}");
        }
    }
}

#[test]
fn coxeter_group_orders() {
    for m in 2..=12u32 {
        let e = group_order(&string_coxeter(&[m]).unwrap(), 1000).unwrap();
        assert_eq!(e.index(), Some(2 * m as usize), "dihedral of order {}", 2 * m);
    }
    for (orders, want) in [
        (vec![3, 3, 3], 120),
        (vec![3, 4, 3], 1152),
        (vec![3, 3, 5], 14400),
        (vec![4, 3, 3], 384),
    ] {
        let e = group_order(&string_coxeter(&orders).unwrap(), 1_000_000).unwrap();
        assert_eq!(e.index(), Some(want), "{orders:?}");
    }
}

#[test]
fn coset_table_respects_relators() {
    let pres = string_coxeter(&[3, 5, 3]).unwrap();
    let pres = psl_polytopes::presentation::with_petrie(pres, Some(5), Some(5)).unwrap();
    let e = group_order(&pres, 100_000).unwrap();
    let table = e.table.as_ref().unwrap();
    assert!(table.relators_hold(&pres));
    for c in 0..table.index() {
        for g in 0..pres.ngens {
            assert_eq!(
                table.act(table.act(c, g), g),
                c,
                "generator {g} is an involution on coset {c}"
            );
        }
    }
}

fn presentations() -> impl Strategy<Value = Presentation> {
    (1usize..5).prop_flat_map(|n| {
        let word = prop::collection::vec(0..n, 1..9).prop_map(Word);
        let periodic = (prop::collection::vec(0..n, 1..4), 2usize..6).prop_map(|(w, k)| Word(w).pow(k));
        prop::collection::vec(prop_oneof![word, periodic], 1..6)
            .prop_map(move |rels| Presentation::new(n, rels).unwrap())
    })
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(p in presentations()) {
        let text = render(&p);
        prop_assert_eq!(parse(&text).unwrap(), p, "{}", text);
    }
}
