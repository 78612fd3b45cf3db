//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the console.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use psl_polytopes::census::{run_census, verify_lemma3, CensusReport};
use psl_polytopes::cli::{prime_powers_up_to, sweep, table1, Named, SweepLine};
use psl_polytopes::equivalence::{dedupe, is_self_dual, Equivalence};
use psl_polytopes::group::{ElemId, GroupCtx, GroupKind};
use psl_polytopes::perm;
use psl_polytopes::polytope::{build_lattice, identify_facet_and_vertex_figure, petrie_orders};
use psl_polytopes::presentation::{amalgam, string_coxeter, with_petrie, MapSymbol};
use psl_polytopes::search::{
    all_string_tuples, intersection_property, intersection_property_reduced, naive_search, search, CGroupRecord,
    GenTuple, SearchOptions,
};
use psl_polytopes::todd_coxeter::{enumerate, group_order, Outcome, DEFAULT_MAX_COSETS};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn psl(q: u32) -> GroupCtx {
    GroupCtx::new(q, GroupKind::Psl).unwrap()
}

fn first_rank4(ctx: &GroupCtx) -> GenTuple {
    search(ctx, 4, SearchOptions::default()).unwrap().records[0]
        .tuple
        .clone()
}

fn nonempty(lines: &[SweepLine]) -> BTreeSet<u32> {
    lines.iter().map(|l| l.q).collect()
}

fn classification_sweep() -> Check {
    let qs = prime_powers_up_to(61);
    let report = sweep(&qs, &[4], None).map_err(|e| e.to_string())?;
    ensure!(
        report.summary.len() == qs.len(),
        "summary rows {} for {} values of q",
        report.summary.len(),
        qs.len()
    );
    ensure!(
        nonempty(&report.lines) == BTreeSet::from([11, 19]),
        "nonempty at {:?}",
        nonempty(&report.lines)
    );
    let types: Vec<(u32, Vec<u32>)> = report.lines.iter().map(|l| (l.q, l.schlafli.clone())).collect();
    ensure!(
        types == vec![(11, vec![3, 5, 3]), (19, vec![5, 3, 5])],
        "types {types:?}"
    );
    Ok(format!(
        "{} prime powers, classes only at q=11 {{3,5,3}} and q=19 {{5,3,5}}",
        qs.len()
    ))
}

fn eleven_cell() -> Check {
    let g = psl(11);
    let t = first_rank4(&g);
    let l = build_lattice(&g, &t).map_err(|e| e.to_string())?;
    ensure!(l.f_vector().0 == [11, 55, 55, 11], "f = {:?}", l.f_vector());
    let graph = l.edge_graph().map_err(|e| e.to_string())?;
    ensure!(graph.vertices == 11 && graph.is_complete(), "edge graph not K11");
    ensure!(
        petrie_orders(&g, &t).unwrap() == (5, 5),
        "petrie {:?}",
        petrie_orders(&g, &t)
    );
    ensure!(is_self_dual(&g, &t).unwrap(), "not self-dual");
    let facet = g.generated_order(&t.gens()[0..3], None).unwrap();
    let vertex = g.generated_order(&t.gens()[1..4], None).unwrap();
    ensure!(facet == 60 && vertex == 60, "facet {facet}, vertex {vertex}");
    let (f, v) = identify_facet_and_vertex_figure(&g, &t).unwrap();
    Ok(format!(
        "f=(11,55,55,11), K11, petrie (5,5), self-dual, facet {f} and vertex-figure {v} of order 60"
    ))
}

fn fifty_seven_cell() -> Check {
    let g = psl(19);
    let t = first_rank4(&g);
    let l = build_lattice(&g, &t).map_err(|e| e.to_string())?;
    ensure!(l.f_vector().0 == [57, 171, 171, 57], "f = {:?}", l.f_vector());
    ensure!(
        petrie_orders(&g, &t).unwrap() == (5, 5),
        "petrie {:?}",
        petrie_orders(&g, &t)
    );
    ensure!(is_self_dual(&g, &t).unwrap(), "not self-dual");
    ensure!(l.flag_count() == 3420, "flags {}", l.flag_count());
    ensure!(l.diamond_sampled(10_000, 7), "diamond condition failed on a sample");
    Ok("f=(57,171,171,57), petrie (5,5), self-dual, 3420 flags, 10^4 diamond samples".into())
}

fn table_one() -> Check {
    let rows = table1(DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
    let orders: Vec<Option<usize>> = rows.iter().map(|r| r.order).collect();
    let want = [1, 1, 3420, 60, 1, 96, 24, 660, 1, 120].map(Some);
    ensure!(orders == want, "orders {orders:?}");
    let labels: Vec<Option<&str>> = rows.iter().map(|r| r.structure.as_deref()).collect();
    let want_labels = [
        Some("1"),
        Some("1"),
        None,
        Some("A5"),
        Some("1"),
        Some("2^4:S3"),
        Some("S4"),
        None,
        Some("1"),
        Some("S5"),
    ];
    ensure!(labels == want_labels, "structures {labels:?}");
    Ok("orders [1, 1, 3420, 60, 1, 96, 24, 660, 1, 120]".into())
}

fn presentation_identities() -> Check {
    let cases = [
        (
            "{3,5,3}+(5,5)",
            with_petrie(string_coxeter(&[3, 5, 3]).unwrap(), Some(5), Some(5)).unwrap(),
            660,
        ),
        (
            "{5,3,5}+(5,5)",
            with_petrie(string_coxeter(&[5, 3, 5]).unwrap(), Some(5), Some(5)).unwrap(),
            3420,
        ),
        ("{3,5,3}+(-,5)", Named::Dropped353.presentation().unwrap(), 660),
        (
            "amalgam 11-cell",
            amalgam(MapSymbol::new(3, 5, 5), MapSymbol::new(5, 3, 5)).unwrap(),
            660,
        ),
    ];
    for (name, pres, want) in cases {
        let e = group_order(&pres, DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
        ensure!(e.index() == Some(want), "{name}: {:?}", e.outcome);
        let image = e.permutation_image().map_err(|e| e.to_string())?;
        let regenerated = perm::group_order(&image);
        ensure!(
            regenerated == want as u128,
            "{name}: permutation image has order {regenerated}"
        );
    }
    Ok("660, 3420, 660 with one relator dropped; permutation images regenerate the same orders".into())
}

fn rank_three_existence() -> Check {
    let qs = [5, 7, 9, 11, 13];
    let report = sweep(&qs, &[3], None).map_err(|e| e.to_string())?;
    let found = nonempty(&report.lines);
    ensure!(found == BTreeSet::from([5, 11, 13]), "polyhedra at {found:?}");
    Ok("polyhedra at q=5, 11, 13; none at 7, 9".into())
}

fn rank_five_absence() -> Check {
    let report = sweep(&[11, 19], &[5], None).map_err(|e| e.to_string())?;
    ensure!(report.lines.is_empty(), "{} rank-5 classes", report.lines.len());
    Ok("no rank-5 string C-groups at q=11, 19".into())
}

fn census() -> Check {
    let mut rows = 0;
    for q in [5, 7, 9, 11, 13, 25] {
        let reports = run_census(&psl(q)).map_err(|e| e.to_string())?;
        let wanted: &[u8] = match q {
            9 => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
            25 => &[5, 6, 10, 11],
            _ => &[1, 2, 3, 4, 7, 8, 9],
        };
        for r in reports.iter().filter(|r| wanted.contains(&r.family.number())) {
            ensure!(r.matches(), "{r}");
            rows += 1;
        }
        for f in wanted {
            ensure!(
                reports.iter().any(|r| r.family.number() == *f),
                "q={q}: family {f} missing"
            );
        }
        if q == 11 {
            let count = |fam: u8, param: &str| -> Option<u64> {
                reports
                    .iter()
                    .find(|r: &&CensusReport| r.family.number() == fam && r.parameter == param)
                    .map(|r| r.observed_count)
            };
            let pinned = [
                (2, "d=5", 66),
                (2, "d=3", 55),
                (3, "d=3", 110),
                (3, "d=6", 55),
                (4, "", 55),
                (1, "", 12),
                (7, "", 55),
                (8, "", 0),
                (9, "", 22),
            ];
            for (fam, param, want) in pinned {
                ensure!(
                    count(fam, param) == Some(want),
                    "q=11 family {fam} {param}: {:?}",
                    count(fam, param)
                );
            }
        }
    }
    Ok(format!("{rows} rows agree, q=11 pinned values reproduced"))
}

fn lemma_three() -> Check {
    let r = verify_lemma3(&psl(25), 5).map_err(|e| e.to_string())?;
    ensure!(
        r.dihedral_violations == 0,
        "{} dihedral intersections of order > 4",
        r.dihedral_violations
    );
    ensure!(
        r.cyclic_violations == 0,
        "{} bad cyclic intersections",
        r.cyclic_violations
    );
    ensure!(r.qualifying > 0, "no qualifying intersections were examined");
    Ok(format!(
        "{} subgroups, {} pairs, 0 dihedral of order > 4, {} cyclic intersections all of order 2 or 3",
        r.subgroups, r.pairs, r.qualifying
    ))
}

/// Lexicographically least conjugate, by trying every element.
fn brute_conjugacy_key(ctx: &GroupCtx, t: &[ElemId]) -> Vec<ElemId> {
    ctx.elements()
        .map(|g| t.iter().map(|&x| ctx.conj(x, g)).collect::<Vec<_>>())
        .min()
        .unwrap()
}

fn brute_classes(ctx: &GroupCtx, records: &[CGroupRecord]) -> BTreeSet<Vec<ElemId>> {
    records
        .iter()
        .map(|r| brute_conjugacy_key(ctx, r.tuple.gens()))
        .collect()
}

fn oracle_equivalence() -> Check {
    let mut compared = 0;
    for q in [5, 7, 9] {
        let g = psl(q);
        for rank in [3, 4] {
            let naive = naive_search(&g, rank).map_err(|e| e.to_string())?;
            let fast = search(&g, rank, SearchOptions::default())
                .map_err(|e| e.to_string())?
                .records;
            let (a, b) = (brute_classes(&g, &naive), brute_classes(&g, &fast));
            ensure!(
                a == b,
                "q={q} rank {rank}: naive {} classes, pruned {}",
                a.len(),
                b.len()
            );
            let deduped = dedupe(&g, &fast, Equivalence::Conjugacy).map_err(|e| e.to_string())?;
            ensure!(
                deduped.len() == a.len(),
                "q={q} rank {rank}: canonizer finds {} classes",
                deduped.len()
            );
            compared += a.len();
        }
    }
    let mut tuples = 0;
    for q in prime_powers_up_to(13) {
        let g = psl(q);
        for rank in [3, 4] {
            for t in all_string_tuples(&g, rank).map_err(|e| e.to_string())? {
                let literal = intersection_property(&g, t.gens());
                ensure!(
                    literal == intersection_property_reduced(&g, t.gens()),
                    "q={q} disagreement on {t:?}"
                );
                tuples += 1;
            }
        }
    }
    Ok(format!(
        "{compared} conjugacy classes match the naive search; reduced check agrees on {tuples} tuples"
    ))
}

fn out_of_reach() -> Check {
    let pres = Named::Dropped535.presentation().map_err(|e| e.to_string())?;
    let e = enumerate(&pres, &[], DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
    match e.outcome {
        Outcome::OverLimit { max_cosets, .. } => Ok(format!("{{{{5,3}},{{3,5}}_5}} over limit at {max_cosets} cosets")),
        Outcome::Closed { index } => Err(format!("closed with index {index}")),
    }
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("rank-4 classification for q <= 61", classification_sweep),
        ("11-cell invariants", eleven_cell),
        ("57-cell invariants", fifty_seven_cell),
        ("amalgam table orders", table_one),
        ("presentation identities", presentation_identities),
        ("rank-3 existence", rank_three_existence),
        ("rank-5 absence", rank_five_absence),
        ("subgroup census", census),
        ("subfield intersections", lemma_three),
        ("search against naive oracle", oracle_equivalence),
        ("unreachable order reported as over limit", out_of_reach),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
