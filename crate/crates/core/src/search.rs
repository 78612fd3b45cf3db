//! Exhaustive search for string C-group generating tuples.
//!
//! A tuple `(ρ0, …, ρ(n−1))` of involutions is recorded when non-adjacent
//! generators commute, the intersection property holds and the tuple
//! generates the whole group.
//!
//! Canonicalization: ρ1 is fixed to the smallest involution of each
//! conjugacy class of involutions, ρ2 runs over representatives of the
//! orbits of the centralizer of ρ1, and the remaining generators are drawn
//! from the centralizers forced by the string relations.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Closure, ElemId, GroupCtx, GroupKind, SubgroupSet};

/// An ordered tuple of generators `ρ0, …, ρ(n−1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenTuple(pub Vec<ElemId>);

impl GenTuple {
    pub fn new(gens: impl Into<Vec<ElemId>>) -> Self {
        GenTuple(gens.into())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn gens(&self) -> &[ElemId] {
        &self.0
    }

    /// The dual tuple `(ρ(n−1), …, ρ0)`.
    pub fn reversed(&self) -> GenTuple {
        GenTuple(self.0.iter().rev().copied().collect())
    }
}

/// Orders of the products of consecutive generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SchlafliType(pub Vec<u32>);

impl std::fmt::Display for SchlafliType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CGroupRecord {
    pub tuple: GenTuple,
    pub schlafli: SchlafliType,
    pub generates_full_group: bool,
    /// Orders of `ρiρ(i+1)ρ(i+2)`; for rank 4 these are the facet and
    /// vertex-figure Petrie orders.
    pub petrie: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub candidates: u64,
    pub string_ok: u64,
    pub intersection_ok: u64,
    /// String C-groups generating a proper subgroup.
    pub degenerate: u64,
    /// Survivors of the pruned pipeline rejected by the literal re-check.
    /// Nonzero means the reduced check disagrees with the definition.
    pub reverify_rejected: u64,
    pub recorded: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum IpStrategy {
    /// All pairs of generator subsets.
    Literal,
    /// Recursive check on the two maximal parabolic subgroups.
    #[default]
    Reduced,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    pub ip: IpStrategy,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub records: Vec<CGroupRecord>,
    pub stats: SearchStats,
}

/// Distinct involutions, commuting whenever they are not adjacent.
pub fn string_condition(ctx: &GroupCtx, gens: &[ElemId]) -> bool {
    let n = gens.len();
    if gens
        .iter()
        .any(|&g| (g as usize) >= ctx.order() || !ctx.is_involution(g))
    {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            if gens[i] == gens[j] {
                return false;
            }
            if j - i >= 2 && !ctx.commute(gens[i], gens[j]) {
                return false;
            }
        }
    }
    true
}

fn subset_gens(gens: &[ElemId], mask: usize) -> Vec<ElemId> {
    gens.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &g)| g)
        .collect()
}

/// The intersection property checked against its definition: for all
/// subsets `J`, `K`, `⟨ρJ⟩ ∩ ⟨ρK⟩ = ⟨ρ(J∩K)⟩`.
///
/// Comparable pairs (`J ⊆ K` or `K ⊆ J`) hold for every tuple and are not
/// evaluated.
pub fn intersection_property(ctx: &GroupCtx, gens: &[ElemId]) -> bool {
    let n = gens.len();
    let full = (1usize << n) - 1;
    let mut cache: Vec<Option<SubgroupSet>> = vec![None; full + 1];
    let sub = |mask: usize, cache: &mut Vec<Option<SubgroupSet>>| -> SubgroupSet {
        cache[mask]
            .get_or_insert_with(|| {
                ctx.closure(&subset_gens(gens, mask), None)
                    .subgroup()
                    .expect("uncapped closure")
            })
            .clone()
    };
    for j in 0..=full {
        for k in j + 1..=full {
            let meet = j & k;
            if meet == j || meet == k {
                continue;
            }
            let a = sub(j, &mut cache);
            let b = sub(k, &mut cache);
            let m = sub(meet, &mut cache);
            if a.intersection_len(&b) != m.len() {
                return false;
            }
        }
    }
    true
}

/// Recursive variant: a string group is a C-group iff `⟨ρ0..ρ(n−2)⟩` and
/// `⟨ρ1..ρ(n−1)⟩` are C-groups meeting in `⟨ρ1..ρ(n−2)⟩`.
///
/// Closures of proper subsets are capped at `|G|/2`: a proper parabolic
/// subgroup that fills the group contains the missing generator, which
/// already violates the property.
pub fn intersection_property_reduced(ctx: &GroupCtx, gens: &[ElemId]) -> bool {
    let n = gens.len();
    let cap = ctx.order() / 2;
    let mut cache: HashMap<(usize, usize), Option<SubgroupSet>> = HashMap::new();
    fn range_closure<'c>(
        ctx: &GroupCtx,
        gens: &[ElemId],
        cap: usize,
        cache: &'c mut HashMap<(usize, usize), Option<SubgroupSet>>,
        lo: usize,
        hi: usize,
    ) -> Option<&'c SubgroupSet> {
        cache
            .entry((lo, hi))
            .or_insert_with(|| match ctx.closure(&gens[lo..hi], Some(cap)) {
                Closure::Subgroup(s) => Some(s),
                Closure::OverCap { .. } => None,
            })
            .as_ref()
    }
    fn check(
        ctx: &GroupCtx,
        gens: &[ElemId],
        cap: usize,
        cache: &mut HashMap<(usize, usize), Option<SubgroupSet>>,
        lo: usize,
        hi: usize,
    ) -> bool {
        match hi - lo {
            0 | 1 => true,
            2 => gens[lo] != gens[lo + 1],
            _ => {
                if !check(ctx, gens, cap, cache, lo, hi - 1) || !check(ctx, gens, cap, cache, lo + 1, hi) {
                    return false;
                }
                let Some(left) = range_closure(ctx, gens, cap, cache, lo, hi - 1).cloned() else {
                    return false;
                };
                let Some(right) = range_closure(ctx, gens, cap, cache, lo + 1, hi).cloned() else {
                    return false;
                };
                let Some(mid) = range_closure(ctx, gens, cap, cache, lo + 1, hi - 1) else {
                    return false;
                };
                left.intersection_len(&right) == mid.len()
            }
        }
    }
    if n < 3 {
        return n < 2 || gens[0] != gens[1];
    }
    check(ctx, gens, cap, &mut cache, 0, n)
}

/// Orders of `ρiρ(i+1)`.
pub fn schlafli_type(ctx: &GroupCtx, gens: &[ElemId]) -> SchlafliType {
    SchlafliType(gens.windows(2).map(|w| ctx.elem_order(ctx.mul(w[0], w[1]))).collect())
}

/// Orders of `ρiρ(i+1)ρ(i+2)`.
pub fn petrie_orders(ctx: &GroupCtx, gens: &[ElemId]) -> Vec<u32> {
    gens.windows(3).map(|w| ctx.elem_order(ctx.mul_all(w))).collect()
}

/// Full check against the definitions, independent of any pruning.
pub fn is_string_cgroup(ctx: &GroupCtx, gens: &[ElemId]) -> bool {
    string_condition(ctx, gens) && intersection_property(ctx, gens)
}

fn check_rank(rank: usize) -> Result<()> {
    if (3..=5).contains(&rank) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("rank must be 3, 4 or 5, got {rank}")))
    }
}

/// Involution conjugacy class representatives (smallest id in each class).
///
/// For PSL(2,q) there is exactly one class; this is asserted because the
/// search relies on it for the ρ1 normalization.
pub fn involution_class_reps(ctx: &GroupCtx) -> Vec<ElemId> {
    let reps: Vec<ElemId> = ctx
        .conjugacy_orbits(ctx.involutions())
        .into_iter()
        .map(|o| o[0])
        .collect();
    if ctx.kind() == GroupKind::Psl {
        assert!(
            reps.len() <= 1,
            "involutions of PSL(2,{}) are not all conjugate",
            ctx.q()
        );
    }
    reps
}

struct Counters {
    candidates: AtomicU64,
    string_ok: AtomicU64,
    intersection_ok: AtomicU64,
    degenerate: AtomicU64,
    reverify_rejected: AtomicU64,
}

impl Counters {
    fn new() -> Self {
        Counters {
            candidates: AtomicU64::new(0),
            string_ok: AtomicU64::new(0),
            intersection_ok: AtomicU64::new(0),
            degenerate: AtomicU64::new(0),
            reverify_rejected: AtomicU64::new(0),
        }
    }
}

fn evaluate(ctx: &GroupCtx, gens: &[ElemId], ip: IpStrategy, c: &Counters) -> Option<CGroupRecord> {
    c.candidates.fetch_add(1, Ordering::Relaxed);
    if !string_condition(ctx, gens) {
        return None;
    }
    c.string_ok.fetch_add(1, Ordering::Relaxed);
    let ip_ok = match ip {
        IpStrategy::Literal => intersection_property(ctx, gens),
        IpStrategy::Reduced => intersection_property_reduced(ctx, gens),
    };
    if !ip_ok {
        return None;
    }
    c.intersection_ok.fetch_add(1, Ordering::Relaxed);
    if !ctx.generates_group(gens) {
        c.degenerate.fetch_add(1, Ordering::Relaxed);
        return None;
    }
    if ip != IpStrategy::Literal && !is_string_cgroup(ctx, gens) {
        c.reverify_rejected.fetch_add(1, Ordering::Relaxed);
        return None;
    }
    Some(CGroupRecord {
        tuple: GenTuple::new(gens),
        schlafli: schlafli_type(ctx, gens),
        generates_full_group: true,
        petrie: petrie_orders(ctx, gens),
    })
}

fn commuting_involutions(ctx: &GroupCtx, with: &[ElemId]) -> Vec<ElemId> {
    ctx.involutions()
        .iter()
        .copied()
        .filter(|&x| with.iter().all(|&w| x != w && ctx.commute(x, w)))
        .collect()
}

/// Candidate tuples for fixed `(ρ1, ρ2)`, following the string relations.
fn extend_pair(ctx: &GroupCtx, rank: usize, r1: ElemId, r2: ElemId) -> Vec<Vec<ElemId>> {
    let mut out = Vec::new();
    for r0 in commuting_involutions(ctx, &[r2]) {
        if rank == 3 {
            out.push(vec![r0, r1, r2]);
            continue;
        }
        let c01 = commuting_involutions(ctx, &[r0, r1]);
        for &r3 in &c01 {
            if rank == 4 {
                out.push(vec![r0, r1, r2, r3]);
                continue;
            }
            for &r4 in c01.iter().filter(|&&x| x != r2 && ctx.commute(x, r2)) {
                out.push(vec![r0, r1, r2, r3, r4]);
            }
        }
    }
    out
}

/// Exhaustive search up to conjugacy in `ctx`.
pub fn search(ctx: &GroupCtx, rank: usize, opts: SearchOptions) -> Result<SearchOutcome> {
    check_rank(rank)?;
    let run = || {
        let counters = Counters::new();
        let mut pairs = Vec::new();
        for r1 in involution_class_reps(ctx) {
            let cent = ctx.centralizer(r1);
            let others: Vec<ElemId> = ctx.involutions().iter().copied().filter(|&x| x != r1).collect();
            let mut seen = std::collections::HashSet::new();
            for &x in &others {
                if seen.contains(&x) {
                    continue;
                }
                for &c in cent.ids() {
                    seen.insert(ctx.conj(x, c));
                }
                pairs.push((r1, x));
            }
        }
        let mut records: Vec<CGroupRecord> = pairs
            .par_iter()
            .flat_map_iter(|&(r1, r2)| {
                extend_pair(ctx, rank, r1, r2)
                    .into_iter()
                    .filter_map(|t| evaluate(ctx, &t, opts.ip, &counters))
                    .collect::<Vec<_>>()
            })
            .collect();
        records.sort_by(|a, b| (&a.schlafli, &a.tuple).cmp(&(&b.schlafli, &b.tuple)));
        let stats = SearchStats {
            candidates: counters.candidates.into_inner(),
            string_ok: counters.string_ok.into_inner(),
            intersection_ok: counters.intersection_ok.into_inner(),
            degenerate: counters.degenerate.into_inner(),
            reverify_rejected: counters.reverify_rejected.into_inner(),
            recorded: records.len() as u64,
        };
        SearchOutcome { records, stats }
    };
    match opts.workers {
        None => Ok(run()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            Ok(pool.install(run))
        }
    }
}

/// Every tuple of involutions satisfying the string condition, with no
/// symmetry reduction.
pub fn all_string_tuples(ctx: &GroupCtx, rank: usize) -> Result<Vec<GenTuple>> {
    check_rank(rank)?;
    let mut out = Vec::new();
    for &r1 in ctx.involutions() {
        for &r2 in ctx.involutions() {
            if r1 == r2 {
                continue;
            }
            for t in extend_pair(ctx, rank, r1, r2) {
                if string_condition(ctx, &t) {
                    out.push(GenTuple(t));
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Reference search: every `rank`-tuple of involutions, literal checks only.
/// Exponential in the number of involutions; meant for small q.
pub fn naive_search(ctx: &GroupCtx, rank: usize) -> Result<Vec<CGroupRecord>> {
    check_rank(rank)?;
    let inv = ctx.involutions();
    let counters = Counters::new();
    let mut records = Vec::new();
    let mut idx = vec![0usize; rank];
    'outer: loop {
        let t: Vec<ElemId> = idx.iter().map(|&i| inv[i]).collect();
        if let Some(r) = evaluate(ctx, &t, IpStrategy::Literal, &counters) {
            records.push(r);
        }
        for slot in (0..rank).rev() {
            idx[slot] += 1;
            if idx[slot] < inv.len() {
                continue 'outer;
            }
            idx[slot] = 0;
        }
        break;
    }
    records.sort_by(|a, b| (&a.schlafli, &a.tuple).cmp(&(&b.schlafli, &b.tuple)));
    Ok(records)
}
