//! PSL(2,q) and PGL(2,q) as permutation groups on the projective line.
//!
//! Points `0..q` are the field elements `[a : 1]` in index order, point `q` is
//! `∞ = [1 : 0]`. Every element is stored as its image vector; ids are the
//! positions in the lexicographically sorted element table, so the identity
//! always has id 0.
//!
//! Products use the "left then right" convention: `mul(a, b)` maps `x` to
//! `b(a(x))`, and `conj(a, g) = g⁻¹ a g`. Since PGL(2,q) is sharply
//! 3-transitive, an element is pinned down by the images of `0`, `1`, `∞`;
//! the dense lookup on that triple makes multiplication O(1).

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, FieldTables};

pub type ElemId = u32;
pub const IDENTITY: ElemId = 0;

/// Default largest `q` for which a group table is materialized.
pub const DEFAULT_GROUP_BOUND: u32 = 128;
/// Points are stored as bytes.
pub const MAX_GROUP_BOUND: u32 = 255;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Psl,
    Pgl,
}

/// A permutation of the projective line, stored as an image vector.
///
/// Composition follows the same convention as group elements:
/// `a.then(b)` applies `a` first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointPerm(Vec<u8>);

impl PointPerm {
    pub fn identity(degree: usize) -> Self {
        PointPerm((0..degree).map(|i| i as u8).collect())
    }

    pub fn from_images(images: Vec<u8>) -> Self {
        PointPerm(images)
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: u8) -> u8 {
        self.0[x as usize]
    }

    pub fn then(&self, next: &PointPerm) -> PointPerm {
        PointPerm(self.0.iter().map(|&x| next.apply(x)).collect())
    }

    pub fn inverse(&self) -> PointPerm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        PointPerm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }
}

/// A subgroup given as a sorted vector of element ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgroupSet {
    ids: Vec<ElemId>,
}

impl SubgroupSet {
    pub fn trivial() -> Self {
        SubgroupSet { ids: vec![IDENTITY] }
    }

    /// Builds from an arbitrary id list; the caller vouches for closure.
    pub fn from_ids(mut ids: Vec<ElemId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        SubgroupSet { ids }
    }

    pub fn ids(&self) -> &[ElemId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: ElemId) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    pub fn intersection(&self, other: &SubgroupSet) -> SubgroupSet {
        let (a, b) = (&self.ids, &other.ids);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        SubgroupSet { ids: out }
    }

    pub fn intersection_len(&self, other: &SubgroupSet) -> usize {
        let (a, b) = (&self.ids, &other.ids);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    pub fn is_subset(&self, other: &SubgroupSet) -> bool {
        self.intersection_len(other) == self.len()
    }
}

/// Result of a capped closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Closure {
    Subgroup(SubgroupSet),
    /// The generated subgroup has more than `cap` elements.
    OverCap {
        cap: usize,
    },
}

impl Closure {
    pub fn subgroup(self) -> Option<SubgroupSet> {
        match self {
            Closure::Subgroup(s) => Some(s),
            Closure::OverCap { .. } => None,
        }
    }
}

pub struct GroupCtx {
    kind: GroupKind,
    field: FieldSpec,
    tables: FieldTables,
    degree: usize,
    images: Vec<u8>,
    lookup: Vec<u32>,
    inverse: Vec<ElemId>,
    orders: Vec<u32>,
    involutions: Vec<ElemId>,
    generators: Vec<ElemId>,
}

impl std::fmt::Debug for GroupCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupCtx")
            .field("kind", &self.kind)
            .field("q", &self.q())
            .field("order", &self.order())
            .finish()
    }
}

/// |PSL(2,q)| = q(q²−1)/gcd(2,q−1); |PGL(2,q)| = q(q²−1).
pub fn expected_order(q: u64, kind: GroupKind) -> u64 {
    let full = q * (q * q - 1);
    match kind {
        GroupKind::Pgl => full,
        GroupKind::Psl if q % 2 == 1 => full / 2,
        GroupKind::Psl => full,
    }
}

impl GroupCtx {
    pub fn new(q: u32, kind: GroupKind) -> Result<Self> {
        Self::build(&FieldSpec::from_order(q as u64)?, kind)
    }

    pub fn build(field: &FieldSpec, kind: GroupKind) -> Result<Self> {
        Self::build_with_bound(field, kind, DEFAULT_GROUP_BOUND)
    }

    pub fn build_with_bound(field: &FieldSpec, kind: GroupKind, bound: u32) -> Result<Self> {
        let q = field.q();
        let bound = bound.min(MAX_GROUP_BOUND);
        if q > bound {
            return Err(Error::GroupTooLarge { q, bound });
        }
        if kind == GroupKind::Pgl && q.is_multiple_of(2) {
            return Err(Error::PglNeedsOddQ);
        }
        let tables = FieldTables::new(field)?;
        let degree = q as usize + 1;
        let odd = q % 2 == 1;
        let mut square = vec![false; q as usize];
        for x in 1..q {
            square[tables.mul(x, x) as usize] = true;
        }

        // Projectively normalized matrices: the first nonzero entry is 1.
        let mut flat: Vec<u8> = Vec::new();
        let mut push = |a: u32, b: u32, c: u32, d: u32| {
            let det = tables.add(tables.mul(a, d), tables.neg(tables.mul(b, c)));
            if det == 0 {
                return;
            }
            if kind == GroupKind::Psl && odd && !square[det as usize] {
                return;
            }
            flat.extend(mobius_images(&tables, q, [a, b, c, d]));
        };
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    push(1, b, c, d);
                }
            }
        }
        for c in 0..q {
            for d in 0..q {
                push(0, 1, c, d);
            }
        }

        let count = flat.len() / degree;
        let expected = expected_order(q as u64, kind);
        let mut perm: Vec<usize> = (0..count).collect();
        perm.sort_unstable_by(|&i, &j| flat[i * degree..(i + 1) * degree].cmp(&flat[j * degree..(j + 1) * degree]));
        let mut images = Vec::with_capacity(flat.len());
        for &i in &perm {
            images.extend_from_slice(&flat[i * degree..(i + 1) * degree]);
        }
        drop(flat);
        let distinct = images
            .chunks_exact(degree)
            .zip(images.chunks_exact(degree).skip(1))
            .all(|(x, y)| x != y);
        assert!(distinct, "duplicate normalized matrices for q = {q}");
        assert_eq!(
            count as u64, expected,
            "group order mismatch for {kind:?}(2,{q}): field or normalization bug"
        );

        let mut lookup = vec![NONE; degree * degree * degree];
        for (id, img) in images.chunks_exact(degree).enumerate() {
            lookup[key3(degree, img[0], img[1], img[degree - 1])] = id as u32;
        }

        let mut ctx = GroupCtx {
            kind,
            field: field.clone(),
            tables,
            degree,
            images,
            lookup,
            inverse: Vec::new(),
            orders: Vec::new(),
            involutions: Vec::new(),
            generators: Vec::new(),
        };
        debug_assert!(ctx.images(IDENTITY).iter().enumerate().all(|(i, &x)| i == x as usize));

        ctx.inverse = (0..count as u32)
            .map(|id| {
                let img = ctx.images(id);
                let mut pre = [0u8; 3];
                for (x, &y) in img.iter().enumerate() {
                    if y == 0 {
                        pre[0] = x as u8;
                    } else if y == 1 {
                        pre[1] = x as u8;
                    } else if y as usize == degree - 1 {
                        pre[2] = x as u8;
                    }
                }
                ctx.lookup[key3(degree, pre[0], pre[1], pre[2])]
            })
            .collect();
        ctx.orders = (0..count as u32)
            .map(|id| {
                let mut x = id;
                let mut k = 1;
                while x != IDENTITY {
                    x = ctx.mul(x, id);
                    k += 1;
                }
                k
            })
            .collect();
        ctx.involutions = (0..count as u32).filter(|&id| ctx.orders[id as usize] == 2).collect();
        ctx.generators = ctx.standard_generators();
        Ok(ctx)
    }

    fn standard_generators(&self) -> Vec<ElemId> {
        let t = &self.tables;
        let q = self.q();
        let omega = self.field.index(&self.field.primitive_element());
        let minus_one = t.neg(1);
        let candidates: Vec<[u32; 4]> = match self.kind {
            GroupKind::Pgl => vec![[1, 1, 0, 1], [omega, 0, 0, 1], [0, 1, 1, 0]],
            GroupKind::Psl => vec![[1, 1, 0, 1], [t.mul(omega, omega), 0, 0, 1], [0, minus_one, 1, 0]],
        };
        let mut gens: Vec<ElemId> = candidates
            .into_iter()
            .filter_map(|m| self.id_of_images(&mobius_images(t, q, m)))
            .filter(|&g| g != IDENTITY)
            .collect();
        gens.dedup();
        // Fall back to greedy extension if the standard set is deficient.
        let mut current = self.closure(&gens, None).subgroup().unwrap();
        let mut next = 1;
        while current.len() < self.order() {
            while current.contains(next) {
                next += 1;
            }
            gens.push(next);
            current = self.closure(&gens, None).subgroup().unwrap();
        }
        gens
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn tables(&self) -> &FieldTables {
        &self.tables
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// Number of points of the projective line, `q + 1`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.inverse.len()
    }

    pub fn images(&self, id: ElemId) -> &[u8] {
        let d = self.degree;
        &self.images[id as usize * d..(id as usize + 1) * d]
    }

    pub fn point_perm(&self, id: ElemId) -> PointPerm {
        PointPerm(self.images(id).to_vec())
    }

    pub fn point_label(&self, point: usize) -> String {
        if point == self.degree - 1 {
            "∞".to_string()
        } else {
            self.field.from_index(point as u32).to_string()
        }
    }

    #[inline]
    fn id_of_triple(&self, x0: u8, x1: u8, xinf: u8) -> Option<ElemId> {
        let id = self.lookup[key3(self.degree, x0, x1, xinf)];
        (id != NONE).then_some(id)
    }

    /// Looks up a full image vector; `None` if it is not a group element.
    pub fn id_of_images(&self, images: &[u8]) -> Option<ElemId> {
        if images.len() != self.degree {
            return None;
        }
        let id = self.id_of_triple(images[0], images[1], images[self.degree - 1])?;
        (self.images(id) == images).then_some(id)
    }

    #[inline]
    pub fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        let ia = self.images(a);
        let ib = self.images(b);
        let inf = self.degree - 1;
        self.lookup[key3(
            self.degree,
            ib[ia[0] as usize],
            ib[ia[1] as usize],
            ib[ia[inf] as usize],
        )]
    }

    #[inline]
    pub fn inv(&self, a: ElemId) -> ElemId {
        self.inverse[a as usize]
    }

    /// `g⁻¹ a g`.
    #[inline]
    pub fn conj(&self, a: ElemId, g: ElemId) -> ElemId {
        self.mul(self.mul(self.inv(g), a), g)
    }

    pub fn pow(&self, a: ElemId, mut e: u64) -> ElemId {
        let mut base = a;
        let mut acc = IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn mul_all(&self, word: &[ElemId]) -> ElemId {
        word.iter().fold(IDENTITY, |acc, &g| self.mul(acc, g))
    }

    #[inline]
    pub fn elem_order(&self, a: ElemId) -> u32 {
        self.orders[a as usize]
    }

    #[inline]
    pub fn is_involution(&self, a: ElemId) -> bool {
        self.orders[a as usize] == 2
    }

    #[inline]
    pub fn commute(&self, a: ElemId, b: ElemId) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn involutions(&self) -> &[ElemId] {
        &self.involutions
    }

    /// A small generating set (standard Möbius generators when they suffice).
    pub fn generators(&self) -> &[ElemId] {
        &self.generators
    }

    pub fn elements(&self) -> impl Iterator<Item = ElemId> {
        0..self.order() as ElemId
    }

    /// `profile[d]` is the number of elements of order d in `subgroup`.
    pub fn order_profile(&self, subgroup: &SubgroupSet) -> Vec<usize> {
        let mut profile = Vec::new();
        for &g in subgroup.ids() {
            let o = self.elem_order(g) as usize;
            if profile.len() <= o {
                profile.resize(o + 1, 0);
            }
            profile[o] += 1;
        }
        profile
    }

    pub fn centralizer(&self, a: ElemId) -> SubgroupSet {
        SubgroupSet {
            ids: self.elements().filter(|&g| self.commute(g, a)).collect(),
        }
    }

    /// Subgroup generated by `gens`, by breadth-first right multiplication.
    ///
    /// With `cap = Some(n)`, stops as soon as more than `n` elements are found.
    pub fn closure(&self, gens: &[ElemId], cap: Option<usize>) -> Closure {
        let mut seen = vec![0u64; self.order().div_ceil(64)];
        let mut elems = vec![IDENTITY];
        seen[0] |= 1;
        let mut head = 0;
        while head < elems.len() {
            let x = elems[head];
            head += 1;
            for &g in gens {
                let y = self.mul(x, g);
                let (w, bit) = (y as usize / 64, 1u64 << (y % 64));
                if seen[w] & bit == 0 {
                    seen[w] |= bit;
                    elems.push(y);
                    if cap.is_some_and(|c| elems.len() > c) {
                        return Closure::OverCap { cap: cap.unwrap() };
                    }
                }
            }
        }
        Closure::Subgroup(SubgroupSet::from_ids(elems))
    }

    /// Like [`closure`](Self::closure) but only reports the order.
    pub fn generated_order(&self, gens: &[ElemId], cap: Option<usize>) -> Option<usize> {
        self.closure(gens, cap).subgroup().map(|s| s.len())
    }

    pub fn generates_group(&self, gens: &[ElemId]) -> bool {
        self.subgroup_order(gens) == self.order()
    }

    /// Order of `⟨gens⟩` from orbit lengths along the stabilizer chain of
    /// the points ∞, 0, 1. The pointwise stabilizer of three points is
    /// trivial, so the product of the three orbit lengths is the order.
    pub fn subgroup_order(&self, gens: &[ElemId]) -> usize {
        let mut level: Vec<ElemId> = gens.iter().copied().filter(|&g| g != IDENTITY).collect();
        let mut order = 1;
        for point in [self.degree - 1, 0, 1] {
            if level.is_empty() {
                break;
            }
            let (orbit_len, stab) = self.schreier_level(&level, point);
            order *= orbit_len;
            level = stab;
        }
        debug_assert!(level.is_empty(), "three-point stabilizer must be trivial");
        order
    }

    /// Orbit length of `point` and Schreier generators of its stabilizer.
    fn schreier_level(&self, gens: &[ElemId], point: usize) -> (usize, Vec<ElemId>) {
        let mut trans: Vec<Option<ElemId>> = vec![None; self.degree];
        trans[point] = Some(IDENTITY);
        let mut orbit = vec![point];
        let mut head = 0;
        while head < orbit.len() {
            let x = orbit[head];
            head += 1;
            for &s in gens {
                let y = self.images(s)[x] as usize;
                if trans[y].is_none() {
                    trans[y] = Some(self.mul(trans[x].unwrap(), s));
                    orbit.push(y);
                }
            }
        }
        let mut stab = Vec::new();
        for &x in &orbit {
            for &s in gens {
                let y = self.images(s)[x] as usize;
                let h = self.mul(self.mul(trans[x].unwrap(), s), self.inv(trans[y].unwrap()));
                if h != IDENTITY {
                    stab.push(h);
                }
            }
        }
        stab.sort_unstable();
        stab.dedup();
        (orbit.len(), stab)
    }

    /// `a^π`: conjugation of an element by a point permutation that
    /// normalizes the group. `None` if the result is not in the group.
    pub fn conj_by_points(&self, a: ElemId, perm: &PointPerm, perm_inv: &PointPerm) -> Option<ElemId> {
        let img = self.images(a);
        let inf = (self.degree - 1) as u8;
        let at = |x: u8| perm.apply(img[perm_inv.apply(x) as usize]);
        self.id_of_triple(at(0), at(1), at(inf))
    }

    /// The map `id ↦ id^π` on the whole element table.
    pub fn conjugation_map(&self, perm: &PointPerm) -> Result<Vec<ElemId>> {
        let inv = perm.inverse();
        self.elements()
            .map(|a| {
                self.conj_by_points(a, perm, &inv)
                    .ok_or_else(|| Error::Structure("point permutation does not normalize the group".into()))
            })
            .collect()
    }

    /// Point permutation induced by `x ↦ x^p`; fixes ∞.
    pub fn frobenius_points(&self) -> PointPerm {
        let f = &self.field;
        let q = self.q();
        let mut img: Vec<u8> = (0..q).map(|i| f.index(&f.frobenius(&f.from_index(i))) as u8).collect();
        img.push(q as u8);
        PointPerm(img)
    }

    /// The Frobenius automorphism as a map on element ids.
    pub fn frobenius(&self) -> Vec<ElemId> {
        self.conjugation_map(&self.frobenius_points())
            .expect("Frobenius normalizes PSL and PGL")
    }

    /// Möbius map `x ↦ (ax+b)/(cx+d)` on the projective line (entries are
    /// field indices; the matrix must be invertible).
    pub fn mobius(&self, matrix: [u32; 4]) -> PointPerm {
        PointPerm(mobius_images(&self.tables, self.q(), matrix))
    }

    /// Generators of PGL(2,q) as point permutations: `x+1`, `ωx`, `1/x`.
    pub fn pgl_generator_points(&self) -> Vec<PointPerm> {
        let omega = self.field.index(&self.field.primitive_element());
        [[1, 1, 0, 1], [omega, 0, 0, 1], [0, 1, 1, 0]]
            .into_iter()
            .map(|m| self.mobius(m))
            .collect()
    }

    /// Orbits of `items` under conjugation by the group's generators.
    pub fn conjugacy_orbits(&self, items: &[ElemId]) -> Vec<Vec<ElemId>> {
        let maps: Vec<Vec<ElemId>> = self
            .generators
            .iter()
            .map(|&g| self.elements().map(|a| self.conj(a, g)).collect())
            .collect();
        orbits_under_maps(items, &maps)
    }
}

/// Orbits of a set of ids under a collection of id maps. Each orbit is sorted.
pub fn orbits_under_maps(items: &[ElemId], maps: &[Vec<ElemId>]) -> Vec<Vec<ElemId>> {
    let mut assigned = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    for &start in &sorted {
        if !assigned.insert(start) {
            continue;
        }
        let mut orbit = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for m in maps {
                let y = m[x as usize];
                if assigned.insert(y) {
                    orbit.push(y);
                    queue.push_back(y);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

#[inline]
fn key3(degree: usize, a: u8, b: u8, c: u8) -> usize {
    (a as usize * degree + b as usize) * degree + c as usize
}

fn mobius_images(t: &FieldTables, q: u32, [a, b, c, d]: [u32; 4]) -> Vec<u8> {
    let inf = q;
    let mut img = Vec::with_capacity(q as usize + 1);
    for x in 0..q {
        let num = t.add(t.mul(a, x), b);
        let den = t.add(t.mul(c, x), d);
        img.push(if den == 0 { inf } else { t.div(num, den) } as u8);
    }
    img.push(if c == 0 { inf } else { t.div(a, c) } as u8);
    img
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn g13() -> &'static GroupCtx {
        static G: OnceLock<GroupCtx> = OnceLock::new();
        G.get_or_init(|| GroupCtx::new(13, GroupKind::Psl).unwrap())
    }

    proptest! {
        #[test]
        fn subgroup_order_matches_closure(a in 0u32..1092, b in 0u32..1092, c in 0u32..1092) {
            let g = g13();
            let closed = g.generated_order(&[a, b, c], None).unwrap();
            prop_assert_eq!(g.subgroup_order(&[a, b, c]), closed);
            prop_assert_eq!(g.subgroup_order(&[a, b]), g.generated_order(&[a, b], None).unwrap());
        }

        #[test]
        fn associativity_and_lagrange(a in 0u32..1092, b in 0u32..1092, c in 0u32..1092) {
            let g = g13();
            prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
            // Permutation semantics: images compose left then right.
            let ab = g.images(g.mul(a, b)).to_vec();
            let composed: Vec<u8> = g.images(a).iter().map(|&x| g.images(b)[x as usize]).collect();
            prop_assert_eq!(ab, composed);
            prop_assert_eq!(g.order() % g.centralizer(a).len(), 0);
        }
    }
}
