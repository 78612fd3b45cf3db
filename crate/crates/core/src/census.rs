//! Brute-force counts of the subgroups of PSL(2,q), family by family,
//! compared with the closed-form counts of Dickson's classification.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ElemId, GroupCtx, GroupKind, SubgroupSet, IDENTITY};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// Sylow p-subgroups `E_q`.
    SylowP = 1,
    Cyclic = 2,
    Dihedral = 3,
    Klein = 4,
    ElementaryAbelian = 5,
    /// `E_{p^s} ⋊ C_h`.
    Frobenius = 6,
    A4 = 7,
    S4 = 8,
    A5 = 9,
    Subfield = 10,
    SubfieldPgl = 11,
}

impl Family {
    pub fn number(self) -> u8 {
        self as u8
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub q: u32,
    pub family: Family,
    /// `d=…`, `s=…`, `s=…,h=…` or `w=…`; empty when the family has none.
    pub parameter: String,
    pub formula_count: u64,
    pub observed_count: u64,
    pub classes_formula: u64,
    pub classes_observed: u64,
}

impl CensusReport {
    pub fn matches(&self) -> bool {
        self.formula_count == self.observed_count && self.classes_formula == self.classes_observed
    }

    pub const CSV_HEADER: &'static str =
        "q,family,parameter,formula_count,observed_count,classes_formula,classes_observed,match";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.q,
            self.family.number(),
            self.parameter,
            self.formula_count,
            self.observed_count,
            self.classes_formula,
            self.classes_observed,
            self.matches()
        )
    }
}

impl fmt::Display for CensusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q={} family {} {}: formula {} observed {}, classes {} vs {}{}",
            self.q,
            self.family.number(),
            self.parameter,
            self.formula_count,
            self.observed_count,
            self.classes_formula,
            self.classes_observed,
            if self.matches() { "" } else { "  MISMATCH" }
        )
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// The factor written `(2,1,1)`: 2 when p is odd and r/k even, otherwise 1.
pub fn two_one_one(p: u64, r: u64, k: u64) -> u64 {
    if p > 2 && (r / k).is_multiple_of(2) {
        2
    } else {
        1
    }
}

/// Number of `s`-dimensional subspaces of `F_p^r`.
pub fn gaussian_binomial(p: u64, r: u64, s: u64) -> u64 {
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..s {
        num *= (p.pow((r - i) as u32) - 1) as u128;
        den *= (p.pow((i + 1) as u32) - 1) as u128;
    }
    (num / den) as u64
}

/// Closed-form counts.
pub mod formula {
    use super::{gaussian_binomial, gcd, two_one_one};

    fn g(q: u64) -> u64 {
        gcd(2, q - 1)
    }

    pub fn group_order(q: u64) -> u64 {
        q * (q * q - 1) / g(q)
    }

    /// Cyclic subgroups of order d: q(q∓1)/2 when d divides (q±1)/(2,q−1).
    /// For even q the count is q(q∓1)/2 as well, with the same sign rule.
    pub fn cyclic(q: u64, d: u64) -> Option<u64> {
        if ((q + 1) / g(q)).is_multiple_of(d) {
            Some(q * (q - 1) / 2)
        } else if ((q - 1) / g(q)).is_multiple_of(d) {
            Some(q * (q + 1) / 2)
        } else {
            None
        }
    }

    pub fn dihedral(q: u64, d: u64) -> u64 {
        q * (q * q - 1) / (2 * d * g(q))
    }

    /// Classes of dihedral subgroups of order 2d: the parity of
    /// (q±1)/(d(2,q−1)), taking the sign for which d divides (q±1)/(2,q−1).
    pub fn dihedral_classes(q: u64, d: u64) -> Option<u64> {
        let plus = (q + 1) / g(q);
        let minus = (q - 1) / g(q);
        let m = if plus.is_multiple_of(d) {
            plus / d
        } else if minus.is_multiple_of(d) {
            minus / d
        } else {
            return None;
        };
        Some(if m % 2 == 1 { 1 } else { 2 })
    }

    /// The other binding of ±: (q∓1)/(d(2,q−1)), when that is an integer.
    pub fn dihedral_classes_opposite_sign(q: u64, d: u64) -> Option<u64> {
        let plus = (q + 1) / g(q);
        let minus = (q - 1) / g(q);
        let other = if plus.is_multiple_of(d) {
            q - 1
        } else if minus.is_multiple_of(d) {
            q + 1
        } else {
            return None;
        };
        (other % (d * g(q)) == 0).then(|| if (other / (d * g(q))) % 2 == 1 { 1 } else { 2 })
    }

    pub fn klein(q: u64) -> u64 {
        q * (q * q - 1) / (12 * g(q))
    }

    /// One class when q ≡ ±3 (mod 8), two when q ≡ ±1 (mod 8).
    pub fn klein_classes(q: u64) -> u64 {
        if q % 8 == 1 || q % 8 == 7 {
            2
        } else {
            1
        }
    }

    /// Number of sets (= classes) of E_{p^s}, 1 ≤ s ≤ r.
    pub fn elem_abelian_sets(p: u64, r: u64, s: u64) -> u64 {
        let k = gcd(r, s);
        let q = p.pow(r as u32);
        let mut num = (two_one_one(p, r, k) * (p.pow(k as u32) - 1)) as u128;
        let mut den = (q - 1) as u128;
        for i in 0..s {
            num *= (p.pow(r as u32) - p.pow(i as u32)) as u128;
            den *= (p.pow(s as u32) - p.pow(i as u32)) as u128;
        }
        (num / den) as u64
    }

    pub fn elem_abelian_per_set(p: u64, r: u64, s: u64) -> u64 {
        let k = gcd(r, s);
        let q = p.pow(r as u32);
        (q * q - 1) / (two_one_one(p, r, k) * (p.pow(k as u32) - 1))
    }

    /// Total E_{p^s}: (q+1) times the number of s-subspaces of F_p^r.
    pub fn elem_abelian(p: u64, r: u64, s: u64) -> u64 {
        elem_abelian_sets(p, r, s) * elem_abelian_per_set(p, r, s)
    }

    /// Orders h > 1 of cyclic complements in E_{p^s} ⋊ C_h: the divisors of
    /// (2,1,1)(p^k − 1)/2 (for p = 2, of p^k − 1).
    pub fn frobenius_complements(p: u64, r: u64, s: u64) -> Vec<u64> {
        let k = gcd(r, s);
        let bound = if p == 2 {
            p.pow(k as u32) - 1
        } else {
            two_one_one(p, r, k) * (p.pow(k as u32) - 1) / 2
        };
        (2..=bound).filter(|h| bound % h == 0).collect()
    }

    /// Subgroups E_{p^s} ⋊ C_h for one admissible h:
    /// (q+1)·p^(r−s)·[r choose s]_p, in as many sets as family 5 has.
    pub fn frobenius(p: u64, r: u64, s: u64) -> u64 {
        (p.pow(r as u32) + 1) * p.pow((r - s) as u32) * gaussian_binomial(p, r, s)
    }

    /// The printed set count for E_{p^s} ⋊ h (kept for comparison; it is
    /// not an integer in general).
    pub fn frobenius_sets_as_printed(p: u64, r: u64, s: u64) -> f64 {
        let k = gcd(r, s);
        let q = p.pow(r as u32) as f64;
        let mut num = (two_one_one(p, r, k) * (p.pow(k as u32) - 1)) as f64;
        let mut den = p.pow((r - s) as u32) as f64 * (q - 1.0);
        for i in 1..s {
            num *= (p.pow(r as u32) - p.pow(i as u32)) as f64;
        }
        for i in 0..s {
            den *= (p.pow(s as u32) - p.pow(i as u32)) as f64;
        }
        num / den
    }

    /// A4 for q odd or q = 4^m.
    pub fn a4(q: u64) -> u64 {
        q * (q * q - 1) / (12 * g(q))
    }

    /// S4: two classes for q ≡ ±1 (mod 8); returns (total, classes).
    pub fn s4(q: u64) -> (u64, u64) {
        if q % 8 == 1 || q % 8 == 7 {
            (2 * q * (q * q - 1) / (24 * g(q)), 2)
        } else {
            (0, 0)
        }
    }

    /// A5: two classes for q ≡ ±1 (mod 5), one for q = 4^m; A5 ≅ L2(5)
    /// for q ≡ 0 (mod 5) belongs to family 10. Returns (total, classes).
    pub fn a5(q: u64, is_power_of_4: bool) -> (u64, u64) {
        let per_class = q * (q * q - 1) / (60 * g(q));
        if q % 5 == 1 || q % 5 == 4 {
            (2 * per_class, 2)
        } else if is_power_of_4 {
            (per_class, 1)
        } else {
            (0, 0)
        }
    }

    /// L2(p^w), w | r: (total, classes).
    pub fn subfield(p: u64, r: u64, w: u64) -> (u64, u64) {
        let q = p.pow(r as u32);
        let pw = p.pow(w as u32);
        let total = q * (q * q - 1) / (pw * (pw * pw - 1));
        (total, two_one_one(p, r, w))
    }

    /// PGL2(p^w), 2w | r: two classes of q(q²−1)/(2p^w(p^{2w}−1)) each.
    pub fn subfield_pgl(p: u64, r: u64, w: u64) -> (u64, u64) {
        let q = p.pow(r as u32);
        let pw = p.pow(w as u32);
        (2 * q * (q * q - 1) / (2 * pw * (pw * pw - 1)), 2)
    }
}

/// Conjugation orbits of a family of subgroups under the group.
pub fn count_classes(ctx: &GroupCtx, subgroups: &[SubgroupSet]) -> u64 {
    let index: HashMap<&SubgroupSet, usize> = subgroups.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut seen = vec![false; subgroups.len()];
    let mut classes = 0;
    for start in 0..subgroups.len() {
        if seen[start] {
            continue;
        }
        classes += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for &g in ctx.generators() {
                let img = conjugate(ctx, &subgroups[i], g);
                let j = *index.get(&img).expect("family closed under conjugation");
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    classes
}

fn conjugate(ctx: &GroupCtx, s: &SubgroupSet, g: ElemId) -> SubgroupSet {
    SubgroupSet::from_ids(s.ids().iter().map(|&x| ctx.conj(x, g)).collect())
}

/// Every conjugate of every subgroup in `seeds`.
fn conjugate_closure(ctx: &GroupCtx, seeds: Vec<SubgroupSet>) -> Vec<SubgroupSet> {
    let mut all: HashSet<SubgroupSet> = seeds.iter().cloned().collect();
    let mut stack = seeds;
    while let Some(s) = stack.pop() {
        for &g in ctx.generators() {
            let c = conjugate(ctx, &s, g);
            if all.insert(c.clone()) {
                stack.push(c);
            }
        }
    }
    sorted(all)
}

fn sorted(set: HashSet<SubgroupSet>) -> Vec<SubgroupSet> {
    let mut v: Vec<SubgroupSet> = set.into_iter().collect();
    v.sort();
    v
}

fn cyclic(ctx: &GroupCtx, g: ElemId) -> SubgroupSet {
    ctx.closure(&[g], None).subgroup().expect("uncapped closure")
}

fn whole_group(ctx: &GroupCtx) -> SubgroupSet {
    SubgroupSet::from_ids(ctx.elements().collect())
}

fn report(
    ctx: &GroupCtx,
    family: Family,
    parameter: String,
    formula: (u64, u64),
    found: &[SubgroupSet],
) -> CensusReport {
    for s in found {
        assert_eq!(ctx.order() % s.len(), 0, "subgroup order must divide the group order");
    }
    CensusReport {
        q: ctx.q(),
        family,
        parameter,
        formula_count: formula.0,
        observed_count: found.len() as u64,
        classes_formula: formula.1,
        classes_observed: count_classes(ctx, found),
    }
}

fn require_psl(ctx: &GroupCtx) -> Result<()> {
    if ctx.kind() == GroupKind::Psl {
        Ok(())
    } else {
        Err(Error::InvalidParameter("the census runs on PSL(2,q)".into()))
    }
}

/// Cyclic subgroups of order d, for d > 1 dividing (q±1)/(2,q−1).
pub fn cyclic_subgroups(ctx: &GroupCtx, d: u32) -> Vec<SubgroupSet> {
    let set: HashSet<SubgroupSet> = ctx
        .elements()
        .filter(|&g| ctx.elem_order(g) == d)
        .map(|g| cyclic(ctx, g))
        .collect();
    sorted(set)
}

pub fn count_cyclic(ctx: &GroupCtx, d: u32) -> Result<CensusReport> {
    require_psl(ctx)?;
    let q = ctx.q() as u64;
    let formula = formula::cyclic(q, d as u64)
        .filter(|_| d > 1)
        .ok_or_else(|| Error::InvalidParameter(format!("{d} does not divide (q±1)/(2,q−1) for q={q}")))?;
    Ok(report(
        ctx,
        Family::Cyclic,
        format!("d={d}"),
        (formula, 1),
        &cyclic_subgroups(ctx, d),
    ))
}

/// Dihedral subgroups of order 2d, d > 2: a cyclic group of order d with
/// an involution inverting it.
pub fn dihedral_subgroups(ctx: &GroupCtx, d: u32) -> Vec<SubgroupSet> {
    let mut set = HashSet::new();
    for c in cyclic_subgroups(ctx, d) {
        let gen = *c.ids().iter().find(|&&g| ctx.elem_order(g) == d).expect("generator");
        let inv = ctx.inv(gen);
        for &t in ctx.involutions() {
            if ctx.conj(gen, t) == inv {
                set.insert(ctx.closure(&[gen, t], None).subgroup().expect("uncapped closure"));
            }
        }
    }
    sorted(set)
}

pub fn count_dihedral(ctx: &GroupCtx, d: u32) -> Result<CensusReport> {
    require_psl(ctx)?;
    let q = ctx.q() as u64;
    let classes = formula::dihedral_classes(q, d as u64)
        .filter(|_| d > 2)
        .ok_or_else(|| Error::InvalidParameter(format!("{d} is not a valid dihedral parameter for q={q}")))?;
    let found = dihedral_subgroups(ctx, d);
    Ok(report(
        ctx,
        Family::Dihedral,
        format!("d={d}"),
        (formula::dihedral(q, d as u64), classes),
        &found,
    ))
}

pub fn klein_subgroups(ctx: &GroupCtx) -> Vec<SubgroupSet> {
    let inv = ctx.involutions();
    let mut set = HashSet::new();
    for (i, &a) in inv.iter().enumerate() {
        for &b in &inv[i + 1..] {
            if ctx.commute(a, b) {
                set.insert(SubgroupSet::from_ids(vec![IDENTITY, a, b, ctx.mul(a, b)]));
            }
        }
    }
    sorted(set)
}

pub fn count_klein(ctx: &GroupCtx) -> Result<CensusReport> {
    require_psl(ctx)?;
    let q = ctx.q() as u64;
    if q.is_multiple_of(2) {
        return Err(Error::InvalidParameter(
            "Klein four-groups are counted for odd q".into(),
        ));
    }
    let formula = (formula::klein(q), formula::klein_classes(q));
    Ok(report(
        ctx,
        Family::Klein,
        String::new(),
        formula,
        &klein_subgroups(ctx),
    ))
}

/// The Sylow p-subgroups, each found as the centralizer of one of its
/// elements of order p (in PSL(2,q) that centralizer is the Sylow subgroup).
pub fn sylow_p_subgroups(ctx: &GroupCtx) -> Vec<SubgroupSet> {
    let p = ctx.field().p();
    let set: HashSet<SubgroupSet> = ctx
        .elements()
        .filter(|&g| ctx.elem_order(g) == p)
        .map(|g| ctx.centralizer(g))
        .collect();
    sorted(set)
}

/// Elementary abelian subgroups of order p^s, built up inside each Sylow
/// p-subgroup one generator at a time.
pub fn elem_abelian_subgroups(ctx: &GroupCtx, s: u32) -> Vec<SubgroupSet> {
    let p = ctx.field().p() as usize;
    let target = p.pow(s);
    let mut all = HashSet::new();
    for sylow in sylow_p_subgroups(ctx) {
        let mut layer: HashSet<SubgroupSet> = HashSet::from([SubgroupSet::trivial()]);
        while layer.iter().next().is_some_and(|l| l.len() < target) {
            let mut next = HashSet::new();
            for sub in &layer {
                for &g in sylow.ids() {
                    if !sub.contains(g) {
                        let mut gens = sub.ids().to_vec();
                        gens.push(g);
                        next.insert(ctx.closure(&gens, None).subgroup().expect("uncapped closure"));
                    }
                }
            }
            layer = next;
        }
        all.extend(layer);
    }
    sorted(all)
}

fn check_s(ctx: &GroupCtx, s: u32, allow_r: bool) -> Result<()> {
    let r = ctx.field().r();
    if s == 0 || s > r || (s == r && !allow_r) {
        return Err(Error::InvalidParameter(format!("s={s} out of range for r={r}")));
    }
    Ok(())
}

/// Family 1 when s = r, family 5 when 1 ≤ s < r.
pub fn count_elem_abelian(ctx: &GroupCtx, s: u32) -> Result<CensusReport> {
    require_psl(ctx)?;
    check_s(ctx, s, true)?;
    let (p, r) = (ctx.field().p() as u64, ctx.field().r() as u64);
    let q = ctx.q() as u64;
    if s as u64 == r {
        return Ok(report(
            ctx,
            Family::SylowP,
            String::new(),
            (q + 1, 1),
            &sylow_p_subgroups(ctx),
        ));
    }
    let formula = (
        formula::elem_abelian(p, r, s as u64),
        formula::elem_abelian_sets(p, r, s as u64),
    );
    Ok(report(
        ctx,
        Family::ElementaryAbelian,
        format!("s={s}"),
        formula,
        &elem_abelian_subgroups(ctx, s),
    ))
}

/// Subgroups `E ⋊ C_h` with E elementary abelian of order p^s, keyed by h.
pub fn frobenius_subgroups(ctx: &GroupCtx, s: u32) -> BTreeMap<u32, Vec<SubgroupSet>> {
    let p = ctx.field().p();
    let bases = if s == ctx.field().r() {
        sylow_p_subgroups(ctx)
    } else {
        elem_abelian_subgroups(ctx, s)
    };
    let mut by_h: BTreeMap<u32, HashSet<SubgroupSet>> = BTreeMap::new();
    for e in &bases {
        for t in ctx.elements() {
            let h = ctx.elem_order(t);
            if h < 2 || h.is_multiple_of(p) {
                continue;
            }
            let normalizes = e.ids().iter().all(|&x| e.contains(ctx.conj(x, t)));
            if !normalizes {
                continue;
            }
            let mut gens = e.ids().to_vec();
            gens.push(t);
            let sub = ctx.closure(&gens, None).subgroup().expect("uncapped closure");
            if sub.len() == e.len() * h as usize {
                by_h.entry(h).or_default().insert(sub);
            }
        }
    }
    by_h.into_iter().map(|(h, set)| (h, sorted(set))).collect()
}

/// One report per complement order h: every h the formula admits and every
/// h observed.
pub fn count_frobenius(ctx: &GroupCtx, s: u32) -> Result<Vec<CensusReport>> {
    require_psl(ctx)?;
    check_s(ctx, s, true)?;
    let (p, r) = (ctx.field().p() as u64, ctx.field().r() as u64);
    let observed = frobenius_subgroups(ctx, s);
    let admitted = formula::frobenius_complements(p, r, s as u64);
    let mut hs: Vec<u64> = admitted
        .iter()
        .copied()
        .chain(observed.keys().map(|&h| h as u64))
        .collect();
    hs.sort_unstable();
    hs.dedup();
    Ok(hs
        .into_iter()
        .map(|h| {
            let formula = if admitted.contains(&h) {
                (
                    formula::frobenius(p, r, s as u64),
                    formula::elem_abelian_sets(p, r, s as u64),
                )
            } else {
                (0, 0)
            };
            let found = observed.get(&(h as u32)).map_or(&[][..], Vec::as_slice);
            report(ctx, Family::Frobenius, format!("s={s};h={h}"), formula, found)
        })
        .collect())
}

/// All subgroups of the given order and element-order profile that are
/// generated by an involution and one further element.
///
/// Involutions are all conjugate, so it suffices to close pairs whose first
/// entry is one fixed involution and then take conjugates.
pub fn two_generated_subgroups(ctx: &GroupCtx, order: usize, profile: &[usize]) -> Vec<SubgroupSet> {
    if order == ctx.order() {
        let g = whole_group(ctx);
        return if ctx.order_profile(&g) == profile {
            vec![g]
        } else {
            vec![]
        };
    }
    let Some(&t) = ctx.involutions().first() else {
        return vec![];
    };
    let elems: Vec<ElemId> = ctx.elements().collect();
    let seeds: HashSet<SubgroupSet> = elems
        .par_iter()
        .filter_map(|&x| {
            let sub = ctx.closure(&[t, x], Some(order)).subgroup()?;
            (sub.len() == order && ctx.order_profile(&sub) == profile).then_some(sub)
        })
        .collect();
    conjugate_closure(ctx, seeds.into_iter().collect())
}

/// Element-order profile of PSL(2,q') or PGL(2,q').
pub fn reference_profile(q: u32, kind: GroupKind) -> Result<(usize, Vec<usize>)> {
    let g = GroupCtx::new(q, kind)?;
    Ok((g.order(), g.order_profile(&whole_group(&g))))
}

const A4_PROFILE: [usize; 4] = [0, 1, 3, 8];
const S4_PROFILE: [usize; 5] = [0, 1, 9, 8, 6];
const A5_PROFILE: [usize; 6] = [0, 1, 15, 20, 0, 24];

/// Families 7, 8 and 9.
pub fn count_a4_s4_a5(ctx: &GroupCtx) -> Result<[CensusReport; 3]> {
    require_psl(ctx)?;
    let q = ctx.q() as u64;
    let (p, r) = (ctx.field().p() as u64, ctx.field().r() as u64);
    let power_of_4 = p == 2 && r % 2 == 0;
    let a4_exists = q % 2 == 1 || power_of_4;
    let a4 = two_generated_subgroups(ctx, 12, &A4_PROFILE);
    let s4 = two_generated_subgroups(ctx, 24, &S4_PROFILE);
    let mut a5 = two_generated_subgroups(ctx, 60, &A5_PROFILE);
    if q.is_multiple_of(5) {
        // Listed with the subfield groups L2(5).
        a5.clear();
    }
    let a4_formula = if a4_exists {
        (formula::a4(q), formula::klein_classes(q))
    } else {
        (0, 0)
    };
    Ok([
        report(ctx, Family::A4, String::new(), a4_formula, &a4),
        report(ctx, Family::S4, String::new(), formula::s4(q), &s4),
        report(ctx, Family::A5, String::new(), formula::a5(q, power_of_4), &a5),
    ])
}

/// L2(p^w) (family 10) or PGL2(p^w) (family 11) subgroups.
pub fn subfield_subgroups(ctx: &GroupCtx, w: u32, kind: GroupKind) -> Result<Vec<SubgroupSet>> {
    let p = ctx.field().p();
    let (order, profile) = reference_profile(p.pow(w), kind)?;
    Ok(two_generated_subgroups(ctx, order, &profile))
}

pub fn count_subfield_groups(ctx: &GroupCtx, w: u32, kind: GroupKind) -> Result<CensusReport> {
    require_psl(ctx)?;
    let (p, r) = (ctx.field().p() as u64, ctx.field().r() as u64);
    let w64 = w as u64;
    let (family, formula) = match kind {
        GroupKind::Psl if w > 0 && r % w64 == 0 => (Family::Subfield, formula::subfield(p, r, w64)),
        GroupKind::Pgl if w > 0 && r % (2 * w64) == 0 && p > 2 => {
            (Family::SubfieldPgl, formula::subfield_pgl(p, r, w64))
        }
        _ => return Err(Error::InvalidParameter(format!("w={w} is not valid for q={}", ctx.q()))),
    };
    let found = subfield_subgroups(ctx, w, kind)?;
    Ok(report(ctx, family, format!("w={w}"), formula, &found))
}

/// Every family and parameter that applies at this q.
pub fn run_census(ctx: &GroupCtx) -> Result<Vec<CensusReport>> {
    require_psl(ctx)?;
    let q = ctx.q() as u64;
    let (p, r) = (ctx.field().p(), ctx.field().r());
    let g = gcd(2, q - 1);
    let mut out = vec![count_elem_abelian(ctx, r)?];
    let mut ds: Vec<u64> = divisors((q + 1) / g).into_iter().chain(divisors((q - 1) / g)).collect();
    ds.sort_unstable();
    ds.dedup();
    for &d in ds.iter().filter(|&&d| d > 1) {
        out.push(count_cyclic(ctx, d as u32)?);
    }
    for &d in ds.iter().filter(|&&d| d > 2) {
        out.push(count_dihedral(ctx, d as u32)?);
    }
    if q % 2 == 1 {
        out.push(count_klein(ctx)?);
    }
    for s in 1..r {
        out.push(count_elem_abelian(ctx, s)?);
    }
    for s in 1..=r {
        out.extend(count_frobenius(ctx, s)?);
    }
    out.extend(count_a4_s4_a5(ctx)?);
    for w in (1..=r).filter(|w| r % w == 0) {
        out.push(count_subfield_groups(ctx, w, GroupKind::Psl)?);
    }
    if p > 2 {
        for w in (1..=r).filter(|w| r % (2 * w) == 0) {
            out.push(count_subfield_groups(ctx, w, GroupKind::Pgl)?);
        }
    }
    Ok(out)
}

pub fn to_csv(reports: &[CensusReport]) -> String {
    let mut s = String::from(CensusReport::CSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Outcome of the pairwise-intersection check on subfield subgroups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub q: u32,
    pub qprime: u32,
    pub subgroups: usize,
    pub pairs: usize,
    /// Intersection shape (order and element-order profile) → pair count.
    pub shapes: BTreeMap<String, usize>,
    /// Intersections that are dihedral of order greater than 4.
    pub dihedral_violations: usize,
    /// Intersections containing an element of order k > 2 whose cyclic
    /// group has a maximal dihedral normalizer.
    pub qualifying: usize,
    /// Qualifying intersections that are not cyclic of order (q'±1)/2.
    pub cyclic_violations: usize,
}

impl IntersectionReport {
    pub fn holds(&self) -> bool {
        self.dihedral_violations == 0 && self.cyclic_violations == 0
    }
}

fn is_dihedral(ctx: &GroupCtx, s: &SubgroupSet) -> bool {
    let n = s.len();
    if n < 6 || n % 2 == 1 {
        return false;
    }
    let k = n / 2;
    let has_rotation = s.ids().iter().any(|&g| ctx.elem_order(g) as usize == k);
    let involutions = s.ids().iter().filter(|&&g| ctx.elem_order(g) == 2).count();
    has_rotation && involutions == if k % 2 == 1 { k } else { k + 1 }
}

fn is_cyclic(ctx: &GroupCtx, s: &SubgroupSet) -> bool {
    s.ids().iter().any(|&g| ctx.elem_order(g) as usize == s.len())
}

fn normalizer(ctx: &GroupCtx, s: &SubgroupSet) -> SubgroupSet {
    SubgroupSet::from_ids(
        ctx.elements()
            .filter(|&g| s.ids().iter().all(|&x| s.contains(ctx.conj(x, g))))
            .collect(),
    )
}

/// Pairwise intersections of the L2(q') subgroups of PSL(2,q).
pub fn verify_lemma3(ctx: &GroupCtx, qprime: u32) -> Result<IntersectionReport> {
    require_psl(ctx)?;
    let (p, r) = (ctx.field().p(), ctx.field().r());
    let w = (1..=r)
        .find(|&w| p.pow(w) == qprime && r % w == 0)
        .ok_or_else(|| Error::InvalidParameter(format!("GF({qprime}) is not a subfield of GF({})", ctx.q())))?;
    let subs = subfield_subgroups(ctx, w, GroupKind::Psl)?;
    let q = ctx.q() as usize;
    let g = gcd(2, q as u64 - 1) as usize;
    let maximal_dihedral = [q - 1, q + 1].map(|m| 2 * m / g);
    let admissible = [(qprime as usize).div_ceil(2), (qprime as usize - 1) / 2];

    let pairs: Vec<(usize, usize)> = (0..subs.len())
        .flat_map(|i| (i + 1..subs.len()).map(move |j| (i, j)))
        .collect();
    let intersections: Vec<SubgroupSet> = pairs.par_iter().map(|&(i, j)| subs[i].intersection(&subs[j])).collect();

    let mut normalizer_cache: HashMap<SubgroupSet, bool> = HashMap::new();
    let mut rep = IntersectionReport {
        q: ctx.q(),
        qprime,
        subgroups: subs.len(),
        pairs: pairs.len(),
        shapes: BTreeMap::new(),
        dihedral_violations: 0,
        qualifying: 0,
        cyclic_violations: 0,
    };
    for inter in &intersections {
        let shape = format!("order {} profile {:?}", inter.len(), ctx.order_profile(inter));
        *rep.shapes.entry(shape).or_default() += 1;
        if is_dihedral(ctx, inter) {
            rep.dihedral_violations += 1;
        }
        let mut qualifies = false;
        for &x in inter.ids() {
            if ctx.elem_order(x) <= 2 {
                continue;
            }
            let c = cyclic(ctx, x);
            let dihedral_normalizer = *normalizer_cache.entry(c.clone()).or_insert_with(|| {
                let n = normalizer(ctx, &c);
                is_dihedral(ctx, &n) && maximal_dihedral.contains(&n.len())
            });
            if dihedral_normalizer {
                qualifies = true;
                break;
            }
        }
        if qualifies {
            rep.qualifying += 1;
            if !(is_cyclic(ctx, inter) && admissible.contains(&inter.len())) {
                rep.cyclic_violations += 1;
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psl(q: u32) -> GroupCtx {
        GroupCtx::new(q, GroupKind::Psl).unwrap()
    }

    #[test]
    fn two_one_one_convention() {
        assert_eq!(two_one_one(3, 2, 1), 2);
        assert_eq!(two_one_one(3, 3, 1), 1);
        assert_eq!(two_one_one(2, 2, 1), 1);
        assert_eq!(two_one_one(5, 2, 2), 1);
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(3, 2, 1), 4);
        assert_eq!(gaussian_binomial(2, 4, 2), 35);
        assert_eq!(gaussian_binomial(5, 2, 2), 1);
    }

    #[test]
    fn printed_frobenius_set_count_is_not_integral() {
        let v = formula::frobenius_sets_as_printed(3, 2, 1);
        assert!((v - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn psl11_pinned_counts() {
        let g = psl(11);
        assert_eq!(count_cyclic(&g, 5).unwrap().observed_count, 66);
        assert_eq!(count_cyclic(&g, 3).unwrap().observed_count, 55);
        assert_eq!(count_dihedral(&g, 3).unwrap().observed_count, 110);
        assert_eq!(count_dihedral(&g, 6).unwrap().observed_count, 55);
        assert_eq!(count_klein(&g).unwrap().observed_count, 55);
        assert_eq!(count_elem_abelian(&g, 1).unwrap().observed_count, 12);
        let [a4, s4, a5] = count_a4_s4_a5(&g).unwrap();
        assert_eq!((a4.observed_count, s4.observed_count, a5.observed_count), (55, 0, 22));
        assert!(a4.matches() && s4.matches() && a5.matches());
    }

    #[test]
    fn dihedral_class_parity_reading() {
        // d=3 divides (11+1)/2; (q+1)/(2d) = 2 is even, so two classes. The
        // opposite sign gives 10/6, which is not an integer.
        let g = psl(11);
        let r = count_dihedral(&g, 3).unwrap();
        assert_eq!(r.classes_observed, 2);
        assert_eq!(formula::dihedral_classes(11, 3), Some(2));
        assert_eq!(formula::dihedral_classes_opposite_sign(11, 3), None);
    }

    #[test]
    fn small_cases() {
        assert_eq!(count_cyclic(&psl(5), 2).unwrap().observed_count, 15);
        let d = count_dihedral(&psl(7), 3).unwrap();
        assert_eq!((d.formula_count, d.observed_count), (28, 28));
        assert_eq!(count_a4_s4_a5(&psl(7)).unwrap()[2].formula_count, 0);
        assert!(count_cyclic(&psl(11), 4).is_err());
        assert!(count_dihedral(&psl(11), 2).is_err());
        assert!(count_elem_abelian(&psl(11), 2).is_err());
    }

    #[test]
    fn census_q9() {
        let g = psl(9);
        for r in run_census(&g).unwrap() {
            assert!(r.matches(), "{r}");
        }
        assert_eq!(count_a4_s4_a5(&g).unwrap()[1].observed_count, 30);
    }

    #[test]
    fn csv_shape() {
        let g = psl(5);
        let csv = to_csv(&run_census(&g).unwrap());
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CensusReport::CSV_HEADER));
        assert!(lines.all(|l| l.split(',').count() == 8));
    }

    /// Labels are told apart by (order, element-order profile); no two
    /// distinct labels in scope may share one.
    #[test]
    fn profiles_separate_labels() {
        for q in [11, 13, 25] {
            let g = psl(q);
            let mut labels: Vec<(String, usize, Vec<usize>)> = Vec::new();
            let mut push = |name: String, subs: Vec<SubgroupSet>| {
                if let Some(s) = subs.first() {
                    labels.push((name, s.len(), g.order_profile(s)));
                }
            };
            let p = g.field().p();
            for d in (2..=13).filter(|d| d % p != 0) {
                push(format!("Z{d}"), cyclic_subgroups(&g, d));
            }
            for d in (3..=13).filter(|d| d % p != 0) {
                push(format!("D{}", 2 * d), dihedral_subgroups(&g, d));
            }
            push("V4".into(), klein_subgroups(&g));
            for s in 1..=g.field().r() {
                push(format!("E{}", g.field().p().pow(s)), elem_abelian_subgroups(&g, s));
            }
            for (name, q0, kind) in [
                ("A4", 3, GroupKind::Psl),
                ("S4", 3, GroupKind::Pgl),
                ("A5", 5, GroupKind::Psl),
            ] {
                let (order, profile) = reference_profile(q0, kind).unwrap();
                labels.push((name.into(), order, profile));
            }
            for (i, a) in labels.iter().enumerate() {
                for b in &labels[i + 1..] {
                    assert!(a.1 != b.1 || a.2 != b.2, "q={q}: {} and {} share a profile", a.0, b.0);
                }
            }
        }
    }
}
