//! Small permutation groups given by generators, for checking the groups
//! produced by coset enumeration.

use std::collections::{HashMap, HashSet, VecDeque};

/// A permutation of `0..n` as an image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Apply `self`, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.0.len()];
        let mut l = 1u64;
        for s in 0..self.0.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0u64;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            l = lcm(l, len);
        }
        l
    }

    pub fn is_valid(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        self.0
            .iter()
            .all(|&x| (x as usize) < seen.len() && !std::mem::replace(&mut seen[x as usize], true))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// All elements of the group generated by `gens`, or `None` if there are
/// more than `cap`.
pub fn closure(gens: &[Perm], degree: usize, cap: usize) -> Option<Vec<Perm>> {
    let id = Perm::identity(degree);
    let mut seen = HashSet::from([id.clone()]);
    let mut elems = vec![id];
    let mut head = 0;
    while head < elems.len() {
        let x = elems[head].clone();
        head += 1;
        for g in gens {
            let y = x.then(g);
            if seen.insert(y.clone()) {
                if elems.len() == cap {
                    return None;
                }
                elems.push(y);
            }
        }
    }
    Some(elems)
}

/// Order of the group generated by `gens`, by orbit-stabilizer along a
/// chain of point stabilizers (Schreier–Sims without sifting shortcuts).
pub fn group_order(gens: &[Perm]) -> u128 {
    let Some(degree) = gens.first().map(Perm::degree) else {
        return 1;
    };
    let mut order: u128 = 1;
    let mut level: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
    let mut base = 0;
    while !level.is_empty() && base < degree {
        // Orbit of `base` with transversal.
        let mut trans: HashMap<u32, Perm> = HashMap::from([(base as u32, Perm::identity(degree))]);
        let mut queue = VecDeque::from([base as u32]);
        while let Some(x) = queue.pop_front() {
            for g in &level {
                let y = g.0[x as usize];
                if !trans.contains_key(&y) {
                    let t = trans[&x].then(g);
                    trans.insert(y, t);
                    queue.push_back(y);
                }
            }
        }
        order *= trans.len() as u128;
        // Schreier generators of the stabilizer of `base`.
        let mut next: Vec<Perm> = Vec::new();
        let mut seen = HashSet::new();
        for (&x, tx) in &trans {
            for g in &level {
                let y = g.0[x as usize];
                let s = tx.then(g).then(&trans[&y].inverse());
                if !s.is_identity() && seen.insert(s.clone()) {
                    next.push(s);
                }
            }
        }
        level = reduce_generators(next, degree);
        base += 1;
    }
    order
}

/// Replaces a generating set with a smaller one generating the same group,
/// by discarding generators already in the span of the earlier ones; the
/// span is tracked only while it stays small.
fn reduce_generators(gens: Vec<Perm>, degree: usize) -> Vec<Perm> {
    const SPAN_CAP: usize = 20_000;
    let mut kept: Vec<Perm> = Vec::new();
    let mut span: Option<HashSet<Perm>> = Some(HashSet::from([Perm::identity(degree)]));
    for g in gens {
        if let Some(s) = &span {
            if s.contains(&g) {
                continue;
            }
        }
        kept.push(g);
        span = span.and_then(|_| closure(&kept, degree, SPAN_CAP).map(|v| v.into_iter().collect()));
    }
    kept
}

/// A group given by all of its elements, for brute-force structure probes.
pub struct SmallGroup {
    elems: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

impl SmallGroup {
    pub fn generate(gens: &[Perm], cap: usize) -> Option<Self> {
        let degree = gens.first().map_or(0, Perm::degree);
        let elems = closure(gens, degree, cap)?;
        let index = elems.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Some(SmallGroup { elems, index })
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    /// `profile[d]` = number of elements of order d.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut profile = Vec::new();
        for g in &self.elems {
            let o = g.order() as usize;
            if profile.len() <= o {
                profile.resize(o + 1, 0);
            }
            profile[o] += 1;
        }
        profile
    }

    pub fn is_abelian(&self) -> bool {
        self.elems
            .iter()
            .all(|a| self.elems.iter().all(|b| a.then(b) == b.then(a)))
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&self.elems[a].then(&self.elems[b])]
    }

    fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let inv: Vec<usize> = self.elems.iter().map(|g| self.index[&g.inverse()]).collect();
        let mut seen = vec![false; self.order()];
        let mut classes = Vec::new();
        for a in 0..self.order() {
            if seen[a] {
                continue;
            }
            let mut class: Vec<usize> = (0..self.order()).map(|g| self.mul(self.mul(inv[g], a), g)).collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                seen[c] = true;
            }
            classes.push(class);
        }
        classes
    }

    /// Whether some elementary abelian normal subgroup of order `2^k` has a
    /// quotient that is nonabelian exactly when `quotient_nonabelian` is set.
    /// Normal subgroups are unions of classes, so the classes of involutions
    /// are combined exhaustively.
    pub fn has_elementary_abelian_normal_2_subgroup(&self, k: u32, quotient_nonabelian: bool) -> bool {
        let target = 1usize << k;
        let classes: Vec<Vec<usize>> = self
            .conjugacy_classes()
            .into_iter()
            .filter(|c| self.elems[c[0]].order() == 2)
            .collect();
        if classes.len() > 20 {
            return false;
        }
        let id = self.index[&Perm::identity(self.elems[0].degree())];
        for mask in 0u32..(1 << classes.len()) {
            let mut n: Vec<usize> = vec![id];
            for (i, c) in classes.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    n.extend(c);
                }
            }
            if n.len() != target {
                continue;
            }
            let set: HashSet<usize> = n.iter().copied().collect();
            let closed = n.iter().all(|&a| n.iter().all(|&b| set.contains(&self.mul(a, b))));
            let abelian = n.iter().all(|&a| n.iter().all(|&b| self.mul(a, b) == self.mul(b, a)));
            if !(closed && abelian) {
                continue;
            }
            // G/N is abelian iff every commutator lies in N.
            let inv = |a: usize| self.index[&self.elems[a].inverse()];
            let quotient_abelian = (0..self.order())
                .all(|a| (0..self.order()).all(|b| set.contains(&self.mul(self.mul(inv(a), inv(b)), self.mul(a, b)))));
            if quotient_abelian != quotient_nonabelian {
                return true;
            }
        }
        false
    }
}

/// Names a few small groups from their element-order histogram:
/// S4, A5 and S5 are determined by it among groups of their orders.
pub fn recognize_by_profile(profile: &[usize]) -> Option<&'static str> {
    const KNOWN: [(&str, &[usize]); 3] = [
        ("S4", &[0, 1, 9, 8, 6]),
        ("A5", &[0, 1, 15, 20, 0, 24]),
        ("S5", &[0, 1, 25, 20, 30, 24, 20]),
    ];
    KNOWN.iter().find(|(_, p)| *p == profile).map(|(n, _)| *n)
}

/// Structure label for groups of order at most 120; `None` when nothing
/// matches.
pub fn structure_label(gens: &[Perm]) -> Option<&'static str> {
    let g = SmallGroup::generate(gens, 120)?;
    if g.order() == 1 {
        return Some("1");
    }
    if let Some(name) = recognize_by_profile(&g.order_profile()) {
        return Some(name);
    }
    if g.order() == 96 && g.has_elementary_abelian_normal_2_subgroup(4, true) {
        return Some("2^4:S3");
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: usize) -> Vec<Perm> {
        let mut t = Perm::identity(n);
        t.0.swap(0, 1);
        let c = Perm((1..n as u32).chain([0]).collect());
        vec![t, c]
    }

    #[test]
    fn symmetric_groups() {
        assert_eq!(group_order(&sym(5)), 120);
        assert_eq!(group_order(&sym(8)), 40320);
        assert_eq!(structure_label(&sym(5)), Some("S5"));
        assert_eq!(structure_label(&sym(4)), Some("S4"));
    }

    #[test]
    fn alternating_group_a5() {
        let a = Perm(vec![1, 2, 0, 3, 4]);
        let b = Perm(vec![1, 2, 3, 4, 0]);
        assert_eq!(group_order(&[a.clone(), b.clone()]), 60);
        assert_eq!(structure_label(&[a, b]), Some("A5"));
    }

    #[test]
    fn cyclic_and_order() {
        let c = Perm(vec![1, 2, 0, 4, 3]);
        assert_eq!(c.order(), 6);
        assert_eq!(group_order(std::slice::from_ref(&c)), 6);
        assert!(SmallGroup::generate(&[c], 10).unwrap().is_abelian());
    }

    #[test]
    fn klein_four_in_s4() {
        // V4 is normal in S4 with quotient S3.
        let s4 = SmallGroup::generate(&sym(4), 24).unwrap();
        assert!(s4.has_elementary_abelian_normal_2_subgroup(2, true));
        assert!(!s4.has_elementary_abelian_normal_2_subgroup(3, true));
    }
}
