//! Classification of generating tuples up to conjugacy, automorphisms
//! (PΓL(2,q) acting on PSL(2,q)) and duality.
//!
//! Each tuple gets a canonical key: the lexicographically smallest image of
//! the tuple under the acting group. The first entry is moved to the smallest
//! involution of its orbit with a Schreier transversal, then the stabilizer
//! of that involution is scanned exhaustively.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ElemId, GroupCtx, PointPerm};
use crate::search::{CGroupRecord, GenTuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Equivalence {
    /// Conjugation inside the group itself.
    Conjugacy,
    /// Conjugation by PGL(2,q) composed with field automorphisms.
    Automorphism,
    /// As `Automorphism`, also identifying a tuple with its reversal.
    AutomorphismDuality,
}

struct PermPair {
    perm: PointPerm,
    inv: PointPerm,
}

impl PermPair {
    fn new(perm: PointPerm) -> Self {
        let inv = perm.inverse();
        PermPair { perm, inv }
    }
}

pub struct Canonizer<'a> {
    ctx: &'a GroupCtx,
    duality: bool,
    /// Involution ↦ (orbit minimum, element moving it there).
    to_min: HashMap<ElemId, (ElemId, PermPair)>,
    stabilizers: HashMap<ElemId, Vec<PermPair>>,
}

/// Point permutations generating the acting group for `eq`.
pub fn acting_generators(ctx: &GroupCtx, eq: Equivalence) -> Vec<PointPerm> {
    let mut gens: Vec<PointPerm> = match eq {
        Equivalence::Conjugacy => ctx.generators().iter().map(|&g| ctx.point_perm(g)).collect(),
        Equivalence::Automorphism | Equivalence::AutomorphismDuality => {
            let mut g = ctx.pgl_generator_points();
            g.push(ctx.frobenius_points());
            g
        }
    };
    gens.retain(|p| !p.is_identity());
    gens
}

impl<'a> Canonizer<'a> {
    pub fn new(ctx: &'a GroupCtx, eq: Equivalence) -> Self {
        let gens: Vec<PermPair> = acting_generators(ctx, eq).into_iter().map(PermPair::new).collect();
        let act = |x: ElemId, p: &PermPair| {
            ctx.conj_by_points(x, &p.perm, &p.inv)
                .expect("acting group normalizes the group")
        };
        let mut to_min = HashMap::new();
        let mut stabilizers = HashMap::new();
        let degree = ctx.degree();
        let mut involutions = ctx.involutions().to_vec();
        involutions.sort_unstable();
        for &start in &involutions {
            if to_min.contains_key(&start) {
                continue;
            }
            // Schreier tree from the orbit minimum (the first unvisited
            // involution in id order).
            let mut transversal: HashMap<ElemId, PointPerm> = HashMap::new();
            transversal.insert(start, PointPerm::identity(degree));
            let mut queue = VecDeque::from([start]);
            let mut order = vec![start];
            while let Some(x) = queue.pop_front() {
                for s in &gens {
                    let y = act(x, s);
                    if !transversal.contains_key(&y) {
                        let t = transversal[&x].then(&s.perm);
                        transversal.insert(y, t);
                        queue.push_back(y);
                        order.push(y);
                    }
                }
            }
            // Schreier generators t_x s t_{x^s}⁻¹ generate the stabilizer.
            let mut stab_gens: Vec<PointPerm> = Vec::new();
            let mut stab: HashSet<PointPerm> = HashSet::from([PointPerm::identity(degree)]);
            for &x in &order {
                for s in &gens {
                    let y = act(x, s);
                    let h = transversal[&x].then(&s.perm).then(&transversal[&y].inverse());
                    if !stab.contains(&h) {
                        stab_gens.push(h);
                        stab = close_perms(&stab_gens, degree);
                    }
                }
            }
            let mut stab: Vec<PointPerm> = stab.into_iter().collect();
            stab.sort();
            stabilizers.insert(start, stab.into_iter().map(PermPair::new).collect());
            for (x, t) in transversal {
                to_min.insert(x, (start, PermPair::new(t.inverse())));
            }
        }
        Canonizer {
            ctx,
            duality: eq == Equivalence::AutomorphismDuality,
            to_min,
            stabilizers,
        }
    }

    fn directed_key(&self, gens: &[ElemId]) -> Result<Vec<ElemId>> {
        let first = *gens.first().ok_or_else(|| Error::InvalidTuple("empty tuple".into()))?;
        let (min, mv) = self
            .to_min
            .get(&first)
            .ok_or_else(|| Error::InvalidTuple(format!("first generator {first} is not an involution")))?;
        let moved: Vec<ElemId> = gens
            .iter()
            .map(|&g| self.ctx.conj_by_points(g, &mv.perm, &mv.inv).expect("normalizer"))
            .collect();
        let mut best: Option<Vec<ElemId>> = None;
        for s in &self.stabilizers[min] {
            let img: Vec<ElemId> = moved
                .iter()
                .map(|&g| self.ctx.conj_by_points(g, &s.perm, &s.inv).expect("normalizer"))
                .collect();
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img);
            }
        }
        Ok(best.expect("stabilizer contains the identity"))
    }

    /// Canonical representative of the tuple's equivalence class.
    pub fn key(&self, tuple: &GenTuple) -> Result<GenTuple> {
        let mut key = self.directed_key(tuple.gens())?;
        if self.duality {
            let rev = self.directed_key(tuple.reversed().gens())?;
            key = key.min(rev);
        }
        Ok(GenTuple(key))
    }

    /// Order of the stabilizer of the smallest involution in the acting group.
    pub fn stabilizer_order(&self, involution: ElemId) -> Option<usize> {
        let (min, _) = self.to_min.get(&involution)?;
        Some(self.stabilizers[min].len())
    }
}

fn close_perms(gens: &[PointPerm], degree: usize) -> HashSet<PointPerm> {
    let id = PointPerm::identity(degree);
    let mut set = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.then(g);
            if set.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    set
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceClass {
    pub key: GenTuple,
    /// Indices into the record slice passed to [`dedupe`].
    pub members: Vec<usize>,
}

/// Groups records into classes; classes are sorted by the representative's
/// Schläfli type, then by key.
pub fn dedupe(ctx: &GroupCtx, records: &[CGroupRecord], eq: Equivalence) -> Result<Vec<EquivalenceClass>> {
    let canon = Canonizer::new(ctx, eq);
    let mut by_key: HashMap<GenTuple, Vec<usize>> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        by_key.entry(canon.key(&r.tuple)?).or_default().push(i);
    }
    let mut classes: Vec<EquivalenceClass> = by_key
        .into_iter()
        .map(|(key, members)| EquivalenceClass { key, members })
        .collect();
    classes.sort_by_key(|c| (crate::search::schlafli_type(ctx, c.key.gens()), c.key.clone()));
    Ok(classes)
}

/// True iff the reversed tuple is in the same automorphism class.
pub fn is_self_dual(ctx: &GroupCtx, tuple: &GenTuple) -> Result<bool> {
    let canon = Canonizer::new(ctx, Equivalence::Automorphism);
    Ok(canon.key(tuple)? == canon.key(&tuple.reversed())?)
}

/// Every element of PΓL(2,q) as a point permutation. Brute force; meant as a
/// test oracle for small q.
pub fn all_automorphism_points(ctx: &GroupCtx) -> Vec<PointPerm> {
    let q = ctx.q();
    let t = ctx.tables();
    let mut pgl = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let det = t.add(t.mul(a, d), t.neg(t.mul(b, c)));
                    let normalized = a == 1 || (a == 0 && b == 1);
                    if det != 0 && normalized {
                        pgl.push(ctx.mobius([a, b, c, d]));
                    }
                }
            }
        }
    }
    let frob = ctx.frobenius_points();
    let mut out = Vec::new();
    let mut power = PointPerm::identity(ctx.degree());
    for _ in 0..ctx.field().r() {
        out.extend(pgl.iter().map(|p| p.then(&power)));
        power = power.then(&frob);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupKind;
    use crate::search::{search, SearchOptions};

    #[test]
    fn conjugate_tuples_share_a_key() {
        let g = GroupCtx::new(11, GroupKind::Psl).unwrap();
        let rec = &search(&g, 4, SearchOptions::default()).unwrap().records[0];
        let canon = Canonizer::new(&g, Equivalence::Conjugacy);
        let k = canon.key(&rec.tuple).unwrap();
        for h in g.elements().step_by(7) {
            let conj = GenTuple(rec.tuple.gens().iter().map(|&x| g.conj(x, h)).collect());
            assert_eq!(canon.key(&conj).unwrap(), k);
        }
    }

    #[test]
    fn stabilizer_orders() {
        // C_G(t) in PSL(2,11) has order 12; in PΓL(2,11) = PGL(2,11) it is 24.
        let g = GroupCtx::new(11, GroupKind::Psl).unwrap();
        let t = g.involutions()[0];
        assert_eq!(Canonizer::new(&g, Equivalence::Conjugacy).stabilizer_order(t), Some(12));
        assert_eq!(
            Canonizer::new(&g, Equivalence::Automorphism).stabilizer_order(t),
            Some(24)
        );
        // PΓL(2,9) has order 1440; 45 involutions in one orbit.
        let g9 = GroupCtx::new(9, GroupKind::Psl).unwrap();
        assert_eq!(
            Canonizer::new(&g9, Equivalence::Automorphism).stabilizer_order(g9.involutions()[0]),
            Some(1440 / 45)
        );
    }

    #[test]
    fn eleven_cell_is_one_class_and_self_dual() {
        let g = GroupCtx::new(11, GroupKind::Psl).unwrap();
        let recs = search(&g, 4, SearchOptions::default()).unwrap().records;
        let classes = dedupe(&g, &recs, Equivalence::AutomorphismDuality).unwrap();
        assert_eq!(classes.len(), 1);
        assert!(is_self_dual(&g, &recs[0].tuple).unwrap());
    }

    #[test]
    fn non_involution_first_entry_is_rejected() {
        let g = GroupCtx::new(7, GroupKind::Psl).unwrap();
        let canon = Canonizer::new(&g, Equivalence::Conjugacy);
        assert!(canon.key(&GenTuple(vec![0, 1, 2])).is_err());
        assert!(canon.key(&GenTuple(vec![])).is_err());
    }

    #[test]
    fn pgamma_l_enumeration_order() {
        let g = GroupCtx::new(9, GroupKind::Psl).unwrap();
        let all = all_automorphism_points(&g);
        assert_eq!(all.len(), 1440);
        let distinct: HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 1440);
    }
}
